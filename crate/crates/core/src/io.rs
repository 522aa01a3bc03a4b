//! JSON wire formats.
//!
//! Arrays are 0-based. Numbers are IEEE doubles. Each DTO mirrors one domain
//! type and validates on conversion.

use crate::bending::{BendingError, DiagonalSet, FiberValue};
use crate::geom::Vec3;
use crate::grassmann::{FrameError, TwoFrame};
use crate::polyspace::{Polygon, PolygonError, SideLengths};
use crate::tol::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `{ "r": [...], "u": [[x, y, z], ...] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonJson {
    pub r: Vec<f64>,
    pub u: Vec<[f64; 3]>,
}

impl From<&Polygon> for PolygonJson {
    fn from(p: &Polygon) -> Self {
        Self {
            r: p.lengths().as_slice().to_vec(),
            u: p.edges().iter().map(|e| [e.x, e.y, e.z]).collect(),
        }
    }
}

impl PolygonJson {
    pub fn into_polygon(self, tol: &Tolerances) -> Result<Polygon, PolygonError> {
        let lengths = SideLengths::new(self.r)?;
        let edges = self
            .u
            .into_iter()
            .map(|[x, y, z]| Vec3::new(x, y, z))
            .collect();
        Polygon::new(edges, lengths, tol)
    }
}

/// `{ "n": int, "diagonals": [[i, j], ...] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalSetJson {
    pub n: usize,
    pub diagonals: Vec<[usize; 2]>,
}

impl From<&DiagonalSet> for DiagonalSetJson {
    fn from(d: &DiagonalSet) -> Self {
        Self {
            n: d.n(),
            diagonals: d.diagonals().iter().map(|p| [p.a(), p.b()]).collect(),
        }
    }
}

impl DiagonalSetJson {
    pub fn into_diagonal_set(self) -> Result<DiagonalSet, BendingError> {
        DiagonalSet::new(
            self.n,
            self.diagonals.into_iter().map(|[a, b]| (a, b)).collect(),
        )
    }
}

/// `{ "c": [...] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberValueJson {
    pub c: Vec<f64>,
}

impl From<&FiberValue> for FiberValueJson {
    fn from(v: &FiberValue) -> Self {
        Self {
            c: v.as_slice().to_vec(),
        }
    }
}

impl FiberValueJson {
    pub fn into_fiber_value(self) -> Result<FiberValue, BendingError> {
        FiberValue::new(self.c)
    }
}

/// `{ "n": int, "z": [[re, im], ...], "w": [[re, im], ...] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoFrameJson {
    pub n: usize,
    pub z: Vec<[f64; 2]>,
    pub w: Vec<[f64; 2]>,
}

impl From<&TwoFrame> for TwoFrameJson {
    fn from(f: &TwoFrame) -> Self {
        Self {
            n: f.n(),
            z: f.z().iter().map(|c| [c.re, c.im]).collect(),
            w: f.w().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TwoFrameJson {
    pub fn into_frame(self) -> Result<TwoFrame, FrameError> {
        if self.z.len() != self.n || self.w.len() != self.n {
            return Err(FrameError::ShapeMismatch {
                z: self.z.len(),
                w: self.w.len(),
            });
        }
        let conv = |v: Vec<[f64; 2]>| {
            v.into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect()
        };
        TwoFrame::new(conv(self.z), conv(self.w))
    }
}
