//! Two-frames in ℂⁿ and their integrable system.
//!
//! A two-frame is a pair `(z, w)` of orthonormal vectors in ℂⁿ. Writing each
//! coordinate pair as a quaternion `z^i + w^i j` and conjugating, the map
//! `q ↦ q̄ i q` sends a frame to a closed polygon of perimeter 2 in ℝ³ (one
//! imaginary-quaternion edge per coordinate). Side lengths upstairs are the
//! diagonal torus momenta `(|z^i|² + |w^i|²)/2 = r_i/2`.
//!
//! For an index set `I`, the restricted rows form an n×2 block `A_I` whose
//! scaled Gram matrix `½ A_I† A_I` is 2×2 Hermitian; its eigenvalues
//! `λ₁ ≥ λ₂` carry all the spectral data of the rank-two momentum matrix
//! `½ A_I A_I†`. The second eigenvalues attached to a family of non-crossing
//! diagonals, together with the first `n − 1` side functions, form an
//! integrable system that descends to the bending system: per diagonal,
//! `4 λ₂ = Σ_{i ∈ I} r_i − |Σ_{i ∈ I} q_i|`.
//!
//! Taking prefix sets `I = {1..k}` produces the Gel'fand-Cetlin pattern of
//! the Hermitian matrix `((z^i z̄^j + w^i w̄^j)/2)`, whose top row is
//! `(½, ½)`. On a fiber of the bending system the pattern entries have
//! closed forms in `(r, c)`; the graph of equalities among them detects
//! vanishing diagonals through its diamond cycles.

use crate::bending::{BendingError, BendingSystem, FiberValue};
use crate::geom::{conj_i, herm2_eigs, Quaternion, Vec3};
use crate::polyspace::{Polygon, PolygonError, SideLengths};
use crate::tol::Tolerances;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FrameError {
    #[error("not a two-frame: {0}")]
    NotAFrame(String),
    #[error("vectors must have equal positive length, got {z} and {w}")]
    ShapeMismatch { z: usize, w: usize },
    #[error("the partial edge sum over the index set has norm {0}, expected 0")]
    PartialSumNonzero(f64),
    #[error("cannot normalize a block with norm {0}")]
    DegenerateNormalization(f64),
    #[error("index {0} out of range for n = {1}")]
    IndexOutOfRange(usize, usize),
    #[error("the ladder construction needs the caterpillar diagonal family")]
    NotCaterpillar,
    #[error(transparent)]
    Bending(#[from] BendingError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// Hermitian inner product `Σ conj(a_i) b_i`.
fn hdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Two-frames
// ---------------------------------------------------------------------------

/// An orthonormal pair of vectors in ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFrame {
    z: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl TwoFrame {
    pub fn new(z: Vec<Complex64>, w: Vec<Complex64>) -> Result<Self, FrameError> {
        Self::new_with_tolerance(z, w, 1e-12)
    }

    pub fn new_with_tolerance(
        z: Vec<Complex64>,
        w: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self, FrameError> {
        if z.len() != w.len() || z.is_empty() {
            return Err(FrameError::ShapeMismatch {
                z: z.len(),
                w: w.len(),
            });
        }
        let (nz, nw) = (cnorm(&z), cnorm(&w));
        if (nz - 1.0).abs() > tol || (nw - 1.0).abs() > tol {
            return Err(FrameError::NotAFrame(format!("|z| = {nz}, |w| = {nw}")));
        }
        let ip = hdot(&z, &w).norm();
        if ip > tol {
            return Err(FrameError::NotAFrame(format!("|⟨z, w⟩| = {ip}")));
        }
        Ok(Self { z, w })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    /// Coordinate quaternion `z^i + w^i j`.
    pub fn coordinate_quaternion(&self, i: usize) -> Quaternion {
        Quaternion::from_complex_pair(self.z[i], self.w[i])
    }

    /// Act by a unit quaternion on the right of every coordinate
    /// quaternion; the image polygon rotates rigidly.
    pub fn apply_unit_quaternion(&self, p: Quaternion) -> TwoFrame {
        let p = p.normalized();
        let mut z = Vec::with_capacity(self.n());
        let mut w = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let q = self.coordinate_quaternion(i) * p;
            z.push(Complex64::new(q.re, q.i));
            w.push(Complex64::new(q.j, q.k));
        }
        TwoFrame { z, w }
    }

    /// Act by a diagonal unitary (one phase per coordinate).
    pub fn apply_phases(&self, phases: &[f64]) -> TwoFrame {
        let rot = |c: Complex64, t: f64| c * Complex64::from_polar(1.0, t);
        TwoFrame {
            z: self
                .z
                .iter()
                .zip(phases)
                .map(|(&c, &t)| rot(c, t))
                .collect(),
            w: self
                .w
                .iter()
                .zip(phases)
                .map(|(&c, &t)| rot(c, t))
                .collect(),
        }
    }
}

/// Seeded uniform frame: orthonormalize two complex Gaussian vectors.
pub fn random_frame<R: Rng>(n: usize, rng: &mut R) -> TwoFrame {
    loop {
        let mut gauss = || -> Vec<Complex64> {
            (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        };
        let mut z = gauss();
        let mut w = gauss();
        let nz = cnorm(&z);
        if nz < 1e-6 {
            continue;
        }
        z.iter_mut().for_each(|c| *c /= nz);
        let ip = hdot(&z, &w);
        for (wi, zi) in w.iter_mut().zip(&z) {
            *wi -= ip * zi;
        }
        let nw = cnorm(&w);
        if nw < 1e-6 {
            continue;
        }
        w.iter_mut().for_each(|c| *c /= nw);
        return TwoFrame { z, w };
    }
}

// ---------------------------------------------------------------------------
// The quaternionic map to polygons
// ---------------------------------------------------------------------------

/// Edge vector of one coordinate: `q̄ i q` for `q = z + wj`, i.e.
/// `(|z|² − |w|², −2 Im(z̄w), 2 Re(z̄w))`. Its norm is `|z|² + |w|²`.
pub fn hopf_edge(z: Complex64, w: Complex64) -> Vec3 {
    conj_i(z, w)
}

/// The polygon image of a frame: edge vectors, side lengths (perimeter 2),
/// and the indices of improper (zero-length) edges.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePolygon {
    pub edges: Vec<Vec3>,
    pub lengths: Vec<f64>,
    pub improper: Vec<usize>,
}

impl FramePolygon {
    /// Closing defect `|Σ edges|`; vanishes on frames.
    pub fn closing_defect(&self) -> f64 {
        self.edges
            .iter()
            .fold(Vec3::default(), |acc, &e| acc + e)
            .norm()
    }

    pub fn perimeter(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Convert to a unit-edge polygon; errors when an edge is improper.
    pub fn to_polygon(&self) -> Result<Polygon, FrameError> {
        if let Some(&i) = self.improper.first() {
            return Err(FrameError::NotAFrame(format!(
                "edge {i} is improper (zero length)"
            )));
        }
        let lengths = SideLengths::new(self.lengths.clone())?;
        let edges = self
            .edges
            .iter()
            .zip(&self.lengths)
            .map(|(&e, &r)| e * (1.0 / r))
            .collect();
        Ok(Polygon::new(edges, lengths, &Tolerances::default())?)
    }
}

/// Map a frame to its image polygon. The edges sum to zero because
/// `Σ q̄_i i q_i = i(|z|² − |w|² + 2⟨z, w⟩j)` vanishes on frames, and the
/// perimeter is `|z|² + |w|² = 2`.
pub fn frame_to_polygon(f: &TwoFrame) -> FramePolygon {
    let edges: Vec<Vec3> = (0..f.n()).map(|i| hopf_edge(f.z[i], f.w[i])).collect();
    let lengths: Vec<f64> = edges.iter().map(|e| e.norm()).collect();
    let improper = lengths
        .iter()
        .enumerate()
        .filter(|(_, &r)| r <= 1e-12)
        .map(|(i, _)| i)
        .collect();
    FramePolygon {
        edges,
        lengths,
        improper,
    }
}

// ---------------------------------------------------------------------------
// The integrable system upstairs
// ---------------------------------------------------------------------------

/// Side function `ψ_{q^i} = (|z^i|² + |w^i|²)/2`, equal to half the image
/// side length.
pub fn side_momentum(f: &TwoFrame, i: usize) -> Result<f64, FrameError> {
    if i >= f.n() {
        return Err(FrameError::IndexOutOfRange(i, f.n()));
    }
    Ok(0.5 * (f.z[i].norm_sqr() + f.w[i].norm_sqr()))
}

/// The two nonzero eigenvalues `(λ₁, λ₂)` of the restricted momentum matrix
/// `((z^i z̄^j + w^i w̄^j)/2)_{i,j ∈ I}`, via the 2×2 Gram matrix
/// `½ A_I† A_I` in closed form. `λ₁ + λ₂ = Σ_{i ∈ I} ψ_{q^i}`.
pub fn diagonal_eigenvalues(f: &TwoFrame, index_set: &[usize]) -> Result<(f64, f64), FrameError> {
    let mut g11 = 0.0;
    let mut g22 = 0.0;
    let mut g12 = Complex64::default();
    for &i in index_set {
        if i >= f.n() {
            return Err(FrameError::IndexOutOfRange(i, f.n()));
        }
        g11 += 0.5 * f.z[i].norm_sqr();
        g22 += 0.5 * f.w[i].norm_sqr();
        g12 += 0.5 * f.z[i].conj() * f.w[i];
    }
    Ok(herm2_eigs(g11, g22, g12))
}

/// The full system value of a frame: second eigenvalues per chosen diagonal
/// and the first `n − 1` side functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub psi_d: Vec<f64>,
    pub psi_q: Vec<f64>,
}

pub fn psi_values(f: &TwoFrame, sys: &BendingSystem) -> Result<PsiValue, FrameError> {
    let mut psi_d = Vec::with_capacity(sys.diagonals().len());
    for d in sys.diagonals() {
        let idx: Vec<usize> = (d.a()..d.b()).collect();
        psi_d.push(diagonal_eigenvalues(f, &idx)?.1);
    }
    let psi_q = (0..f.n() - 1)
        .map(|i| side_momentum(f, i))
        .collect::<Result<_, _>>()?;
    Ok(PsiValue { psi_d, psi_q })
}

/// Residuals of the correspondence with the bending system downstairs: per
/// diagonal with index set `I`, `|4 λ₂ + |Σ_{i ∈ I} q_i| − Σ_{i ∈ I} r_i|`,
/// where `q_i` are the image polygon edges and `r_i` their lengths.
pub fn check_relation(f: &TwoFrame, sys: &BendingSystem) -> Result<Vec<f64>, FrameError> {
    let image = frame_to_polygon(f);
    let mut residuals = Vec::with_capacity(sys.diagonals().len());
    for d in sys.diagonals() {
        let idx: Vec<usize> = (d.a()..d.b()).collect();
        let (_, l2) = diagonal_eigenvalues(f, &idx)?;
        let mut chord = Vec3::default();
        let mut rsum = 0.0;
        for &i in &idx {
            chord += image.edges[i];
            rsum += image.lengths[i];
        }
        residuals.push((4.0 * l2 + chord.norm() - rsum).abs());
    }
    Ok(residuals)
}

/// Split a frame along an index set whose image edges sum to zero.
///
/// The restrictions to `I` and to its complement are again frames after
/// positive rescalings `α₁, α₂` (returned); their images are the two wedge
/// pieces of the polygon up to scale.
pub fn split_frame(
    f: &TwoFrame,
    index_set: &[usize],
) -> Result<(TwoFrame, TwoFrame, f64, f64), FrameError> {
    let n = f.n();
    let mut inside = vec![false; n];
    for &i in index_set {
        if i >= n {
            return Err(FrameError::IndexOutOfRange(i, n));
        }
        inside[i] = true;
    }
    let mut partial = Vec3::default();
    for &i in index_set {
        partial += hopf_edge(f.z[i], f.w[i]);
    }
    let defect = partial.norm();
    if defect > 1e-10 {
        return Err(FrameError::PartialSumNonzero(defect));
    }
    let block = |keep: bool| -> (Vec<Complex64>, Vec<Complex64>) {
        let z = (0..n)
            .filter(|&i| inside[i] == keep)
            .map(|i| f.z[i])
            .collect();
        let w = (0..n)
            .filter(|&i| inside[i] == keep)
            .map(|i| f.w[i])
            .collect();
        (z, w)
    };
    let normalize =
        |(mut z, mut w): (Vec<Complex64>, Vec<Complex64>)| -> Result<(TwoFrame, f64), FrameError> {
            let nz = cnorm(&z);
            if z.is_empty() || nz <= 1e-12 {
                return Err(FrameError::DegenerateNormalization(nz));
            }
            let alpha = 1.0 / nz;
            z.iter_mut().for_each(|c| *c *= alpha);
            w.iter_mut().for_each(|c| *c *= alpha);
            // The vanishing partial edge sum forces |z_I| = |w_I| and
            // ⟨z_I, w_I⟩ = 0, up to the stated defect.
            let band = 1e-12 + 4.0 * defect * alpha * alpha;
            let frame = TwoFrame::new_with_tolerance(z, w, band)?;
            Ok((frame, alpha))
        };
    let (left, alpha1) = normalize(block(true))?;
    let (right, alpha2) = normalize(block(false))?;
    Ok((left, right, alpha1, alpha2))
}

// ---------------------------------------------------------------------------
// Gel'fand-Cetlin patterns
// ---------------------------------------------------------------------------

/// Triangular pattern of the eigenvalues of nested upper-left minors of the
/// momentum matrix of a frame. Only the first two rows are nonzero; entry
/// `mu[k − 1] = (μ₁ᵏ, μ₂ᵏ)` for `k = 1..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcPattern {
    pub mu: Vec<[f64; 2]>,
}

impl GcPattern {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Entry `μ_i^k`, 1-based in both indices; zero for `i > 2`.
    pub fn entry(&self, i: usize, k: usize) -> f64 {
        if i >= 3 {
            0.0
        } else {
            self.mu[k - 1][i - 1]
        }
    }

    /// Largest violation of the interlacing inequalities
    /// `μ_i^{k+1} ≥ μ_i^k ≥ μ_{i+1}^{k+1}` (the zero rows included).
    pub fn interlacing_violation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 1..self.n() {
            for i in 1..=k.min(2) {
                worst = worst.max(self.entry(i, k) - self.entry(i, k + 1));
                worst = worst.max(self.entry(i + 1, k + 1) - self.entry(i, k));
            }
        }
        worst.max(-self.entry(2, 1)).max(self.entry(2, 1))
    }
}

/// The pattern of a frame, via the prefix Gram matrices.
pub fn gc_pattern(f: &TwoFrame) -> GcPattern {
    let mut mu = Vec::with_capacity(f.n());
    let mut prefix: Vec<usize> = Vec::with_capacity(f.n());
    for k in 0..f.n() {
        prefix.push(k);
        let (l1, l2) = diagonal_eigenvalues(f, &prefix).expect("prefix indices are in range");
        mu.push([l1, l2]);
    }
    GcPattern { mu }
}

// ---------------------------------------------------------------------------
// The equality graph on a fiber
// ---------------------------------------------------------------------------

/// A pattern entry `μ_i^k` as a graph vertex (1-based, `i ∈ {1, 2}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GcNode {
    pub i: u8,
    pub k: usize,
}

/// The graph of equalities among Gel'fand-Cetlin functions on a fiber of
/// the caterpillar system, with its diamond flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberGraph {
    pub n: usize,
    /// Closed-form values `(μ₁ᵏ, μ₂ᵏ)` for `k = 1..n`.
    pub values: Vec<[f64; 2]>,
    /// Diagram-adjacent pairs that are equal on the fiber.
    pub edges: Vec<(GcNode, GcNode)>,
    /// Per caterpillar diagonal: whether its diamond cycle is present,
    /// equivalently whether the diagonal vanishes on the fiber.
    pub diamonds: Vec<bool>,
}

/// Build the equality graph from `(r, c)` in closed form:
/// `4 μ_i^k = Σ_{j ≤ k} r_j ± ℓ_{k−1}` with the boundary conventions
/// `ℓ_0 = r_1` and `ℓ_{n−2} = r_n` (1-based indices; `ℓ` the diagonal
/// lengths `√(2c)`).
pub fn fiber_graph(
    sys: &BendingSystem,
    c: &FiberValue,
    tol: &Tolerances,
) -> Result<FiberGraph, FrameError> {
    if !sys.diagonal_set().is_caterpillar() {
        return Err(FrameError::NotCaterpillar);
    }
    sys.fiber_feasible(c, tol)?;
    let n = sys.n();
    let r = sys.lengths().as_slice();
    let scale = sys.lengths().perimeter();
    // ℓ_m for the 1-based ladder index m = 0..n−2.
    let len_m = |m: usize| -> f64 {
        if m == 0 {
            r[0]
        } else if m == n - 2 {
            r[n - 1]
        } else {
            c.diagonal_length(m - 1)
        }
    };
    let mut values = Vec::with_capacity(n);
    let mut prefix = 0.0;
    for k in 1..=n {
        prefix += r[k - 1];
        if k == n {
            values.push([0.25 * prefix, 0.25 * prefix]);
        } else {
            let l = len_m(k - 1);
            values.push([0.25 * (prefix + l), 0.25 * (prefix - l)]);
        }
    }
    let value = |node: GcNode| values[node.k - 1][node.i as usize - 1];
    let band = 1e-10 * scale.max(1.0);
    let mut edges = Vec::new();
    for k in 1..n {
        let pairs = [
            (GcNode { i: 1, k }, GcNode { i: 1, k: k + 1 }),
            (GcNode { i: 1, k }, GcNode { i: 2, k: k + 1 }),
            (GcNode { i: 2, k }, GcNode { i: 2, k: k + 1 }),
        ];
        for (a, b) in pairs {
            if (value(a) - value(b)).abs() <= band {
                edges.push((a, b));
            }
        }
    }
    // Diamond D_k (0-based diagonal index) sits around the equality
    // μ₁^{k+2} = μ₂^{k+2}, which holds exactly when the diagonal vanishes.
    let diamonds = (0..n - 3)
        .map(|k| c.diagonal_length(k) <= tol.len_zero * scale)
        .collect();
    Ok(FiberGraph {
        n,
        values,
        edges,
        diamonds,
    })
}

impl FiberGraph {
    /// The four diagram edges of the diamond around diagonal `k` (0-based).
    fn diamond_cycle(&self, k: usize) -> [(GcNode, GcNode); 4] {
        let i = k + 1; // 1-based ladder row below the equality μ₁ = μ₂
        [
            (GcNode { i: 1, k: i }, GcNode { i: 1, k: i + 1 }),
            (GcNode { i: 1, k: i }, GcNode { i: 2, k: i + 1 }),
            (GcNode { i: 2, k: i + 1 }, GcNode { i: 2, k: i + 2 }),
            (GcNode { i: 1, k: i + 1 }, GcNode { i: 2, k: i + 2 }),
        ]
    }

    /// DOT rendering: pattern vertices labeled with their values, equality
    /// edges solid, diamond cycles highlighted.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph gc_fiber {\n  node [shape=ellipse];\n");
        for k in 1..=self.n {
            for i in 1..=2usize {
                let v = self.values[k - 1][i - 1];
                let _ = writeln!(out, "  mu_{i}_{k} [label=\"mu{i}^{k} = {v:.12}\"];");
            }
        }
        let mut highlighted = Vec::new();
        for (k, &flag) in self.diamonds.iter().enumerate() {
            if flag {
                highlighted.extend(self.diamond_cycle(k));
            }
        }
        for &(a, b) in &self.edges {
            let in_diamond = highlighted
                .iter()
                .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b));
            let style = if in_diamond {
                " [color=red penwidth=2]"
            } else {
                ""
            };
            let _ = writeln!(out, "  mu_{}_{} -- mu_{}_{}{};", a.i, a.k, b.i, b.k, style);
        }
        out.push_str("}\n");
        out
    }
}
