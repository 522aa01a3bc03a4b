//! Spaces of closed polygons in ℝ³ with fixed side lengths.
//!
//! A polygon with side lengths `r = (r_0, …, r_{n−1})` is stored as its unit
//! edge directions `u = (u^0, …, u^{n−1})` subject to the closing condition
//! `Σ r_i u^i = 0`; translations are quotiented away by construction. The
//! module provides the tangent space (per-edge orthogonality plus the
//! infinitesimal closing condition), the symplectic pairing
//! `ω(X, Y) = Σ r_i det(u^i, X^i, Y^i)`, the rigid-rotation orbit directions
//! and the projection onto their metric complement, canonical representatives
//! for the quotient by global rotations, and the stratification into
//! nondegenerate and degenerate (lined) polygons.
//!
//! Vertex and edge indices are 0-based throughout, cyclically: edge `i` joins
//! vertex `i` to vertex `i + 1 (mod n)`.

use crate::geom::{det3, Rotation, Vec3, BASIS, E1};
use crate::tol::Tolerances;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolygonError {
    #[error("need at least 3 side lengths, got {0}")]
    TooFewSides(usize),
    #[error("side length {index} is not a positive finite number: {value}")]
    NonPositiveSide { index: usize, value: f64 },
    #[error("edge count {edges} does not match side-length count {sides}")]
    LengthMismatch { edges: usize, sides: usize },
    #[error("edge {index} is not a unit vector: |u| = {norm}")]
    NonUnitEdge { index: usize, norm: f64 },
    #[error("closing condition violated: |Σ r_i u^i| = {defect} exceeds {tol}")]
    ClosingViolation { defect: f64, tol: f64 },
    #[error("index pair ({a}, {b}) out of range for an n-gon with n = {n}")]
    IndexOutOfRange { a: usize, b: usize, n: usize },
    #[error("({a}, {b}) is a side, not a diagonal, of an n-gon with n = {n}")]
    NotADiagonal { a: usize, b: usize, n: usize },
    #[error("vector {index} violates tangency: {detail}")]
    TangencyViolation { index: usize, detail: String },
}

// ---------------------------------------------------------------------------
// Side lengths
// ---------------------------------------------------------------------------

/// Positive side lengths `(r_0, …, r_{n−1})`, `n ≥ 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideLengths(Vec<f64>);

impl SideLengths {
    pub fn new(r: Vec<f64>) -> Result<Self, PolygonError> {
        if r.len() < 3 {
            return Err(PolygonError::TooFewSides(r.len()));
        }
        for (index, &value) in r.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(PolygonError::NonPositiveSide { index, value });
            }
        }
        Ok(Self(r))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn perimeter(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for SideLengths {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Whether no signed combination `Σ ε_i r_i` with `ε_i = ±1` vanishes.
///
/// Exactly the condition under which no lined polygon exists and the moduli
/// space is a manifold. Exhaustive over `2^(n−1)` sign patterns (`ε_0` fixed
/// to `+1`), which is fine at desk scale; the cost doubles per side beyond
/// n ≈ 24.
pub fn is_generic(r: &SideLengths) -> bool {
    let n = r.n();
    let scale: f64 = r.perimeter();
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut sum = r[0];
        for i in 1..n {
            if mask >> (i - 1) & 1 == 1 {
                sum -= r[i];
            } else {
                sum += r[i];
            }
        }
        if sum.abs() <= 1e-12 * scale {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Index pairs and faces
// ---------------------------------------------------------------------------

/// An unordered vertex pair `(a, b)`, normalized to `a < b`, addressing the
/// chord from vertex `a` to vertex `b`.
///
/// The chord is a *side* when the vertices are cyclically adjacent
/// (`b = a + 1`, or `(a, b) = (0, n−1)`), and a *diagonal* otherwise. The
/// chord vector does not depend on the orientation beyond a sign, so the
/// normalized order is canonical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexPair {
    a: usize,
    b: usize,
}

impl IndexPair {
    /// Normalizing constructor; `a` and `b` must be distinct vertices of an
    /// n-gon.
    pub fn new(a: usize, b: usize, n: usize) -> Result<Self, PolygonError> {
        if a == b || a >= n || b >= n {
            return Err(PolygonError::IndexOutOfRange { a, b, n });
        }
        Ok(Self {
            a: a.min(b),
            b: a.max(b),
        })
    }

    /// A true diagonal: non-adjacent vertices.
    pub fn new_diagonal(a: usize, b: usize, n: usize) -> Result<Self, PolygonError> {
        let pair = Self::new(a, b, n)?;
        if pair.is_side(n) {
            return Err(PolygonError::NotADiagonal {
                a: pair.a,
                b: pair.b,
                n,
            });
        }
        Ok(pair)
    }

    pub fn a(self) -> usize {
        self.a
    }

    pub fn b(self) -> usize {
        self.b
    }

    pub fn is_side(self, n: usize) -> bool {
        self.b == self.a + 1 || (self.a == 0 && self.b == n - 1)
    }

    /// For a side, the index of the polygon edge it coincides with.
    pub fn side_edge_index(self, n: usize) -> Option<usize> {
        if self.b == self.a + 1 {
            Some(self.a)
        } else if self.a == 0 && self.b == n - 1 {
            Some(n - 1)
        } else {
            None
        }
    }

    /// Whether two chords of a convex n-gon cross in the interior: exactly
    /// one endpoint of the other lies strictly between `a` and `b` cyclically.
    /// Chords sharing an endpoint never cross.
    pub fn crosses(self, other: IndexPair) -> bool {
        if self.a == other.a || self.a == other.b || self.b == other.a || self.b == other.b {
            return false;
        }
        let inside = |x: usize| self.a < x && x < self.b;
        inside(other.a) != inside(other.b)
    }
}

/// A triangle on vertices `i < j < k`: the chord triple
/// `(d_{i,j}, d_{j,k}, d_{k,i})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Face {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        let mut v = [i, j, k];
        v.sort_unstable();
        Self {
            i: v[0],
            j: v[1],
            k: v[2],
        }
    }

    /// The three chords bounding the face, in the order
    /// `(i,j), (j,k), (i,k)`.
    pub fn chords(self, n: usize) -> [IndexPair; 3] {
        [
            IndexPair::new(self.i, self.j, n).unwrap(),
            IndexPair::new(self.j, self.k, n).unwrap(),
            IndexPair::new(self.i, self.k, n).unwrap(),
        ]
    }
}

impl std::fmt::Display for Face {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.i, self.j, self.k)
    }
}

// ---------------------------------------------------------------------------
// Polygon
// ---------------------------------------------------------------------------

/// A closed polygon: unit edge directions satisfying the weighted closing
/// condition for its side lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    edges: Vec<Vec3>,
    lengths: SideLengths,
}

impl Polygon {
    /// Validate edge directions against side lengths.
    ///
    /// Edges within `tol.unit_edge` of unit norm are renormalized; edges
    /// farther out are rejected. The closing defect `|Σ r_i u^i|` must stay
    /// below `tol.closing` relative to the perimeter.
    pub fn new(
        edges: Vec<Vec3>,
        lengths: SideLengths,
        tol: &Tolerances,
    ) -> Result<Self, PolygonError> {
        if edges.len() != lengths.n() {
            return Err(PolygonError::LengthMismatch {
                edges: edges.len(),
                sides: lengths.n(),
            });
        }
        let mut normalized = edges;
        for (index, u) in normalized.iter_mut().enumerate() {
            let norm = u.norm();
            if !norm.is_finite() || (norm - 1.0).abs() > tol.unit_edge {
                return Err(PolygonError::NonUnitEdge { index, norm });
            }
            *u = *u * (1.0 / norm);
        }
        let poly = Self {
            edges: normalized,
            lengths,
        };
        let defect = poly.closing_defect();
        let bound = tol.closing * poly.lengths.perimeter();
        // NaN defects must fail validation too.
        if defect.is_nan() || defect > bound {
            return Err(PolygonError::ClosingViolation { defect, tol: bound });
        }
        Ok(poly)
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec3] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Vec3 {
        self.edges[i]
    }

    pub fn lengths(&self) -> &SideLengths {
        &self.lengths
    }

    /// Momentum of the global rotation action: `μ(u) = Σ r_i u^i`. Zero on
    /// closed polygons, up to rounding.
    pub fn momentum(&self) -> Vec3 {
        let mut m = Vec3::default();
        for (u, &r) in self.edges.iter().zip(self.lengths.as_slice()) {
            m += *u * r;
        }
        m
    }

    pub fn closing_defect(&self) -> f64 {
        self.momentum().norm()
    }

    /// Chord vector from vertex `a` to vertex `b` of the pair:
    /// `d_{a,b} = r_a u^a + … + r_{b−1} u^{b−1}` for `a < b`.
    pub fn diagonal(&self, pair: IndexPair) -> Vec3 {
        let mut d = Vec3::default();
        for i in pair.a()..pair.b() {
            d += self.edges[i] * self.lengths[i];
        }
        d
    }

    /// Chord vector walking forward cyclically from vertex `a` to vertex `b`
    /// (`a` and `b` arbitrary distinct vertices).
    pub fn diagonal_cyclic(&self, a: usize, b: usize) -> Vec3 {
        let n = self.n();
        let mut d = Vec3::default();
        let mut i = a;
        while i != b {
            d += self.edges[i] * self.lengths[i];
            i = (i + 1) % n;
        }
        d
    }

    /// Apply a global rotation to every edge.
    pub fn rotated(&self, rot: Rotation) -> Polygon {
        Polygon {
            edges: self.edges.iter().map(|&u| rot.apply(u)).collect(),
            lengths: self.lengths.clone(),
        }
    }

    /// Largest per-edge distance to another polygon with the same n.
    pub fn edge_distance(&self, other: &Polygon) -> f64 {
        self.edges
            .iter()
            .zip(other.edges.iter())
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Tangent vectors
// ---------------------------------------------------------------------------

/// Tangent vector to the polygon space: one 3-vector per edge, orthogonal to
/// that edge, with vanishing weighted sum.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    comps: Vec<Vec3>,
}

impl TangentVector {
    /// Wrap components without validation; used by constructions that are
    /// tangent by algebra (bending fields, orbit fields).
    pub fn from_components(comps: Vec<Vec3>) -> Self {
        Self { comps }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            comps: vec![Vec3::default(); n],
        }
    }

    pub fn components(&self) -> &[Vec3] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> Vec3 {
        self.comps[i]
    }

    /// Check membership in the tangent space at `u`.
    pub fn validate_at(&self, u: &Polygon, tol: &Tolerances) -> Result<(), PolygonError> {
        if self.comps.len() != u.n() {
            return Err(PolygonError::LengthMismatch {
                edges: self.comps.len(),
                sides: u.n(),
            });
        }
        for (i, (&x, &e)) in self.comps.iter().zip(u.edges()).enumerate() {
            let bound = tol.closing * x.norm().max(1.0);
            let dot = e.dot(x).abs();
            if dot.is_nan() || dot > bound {
                return Err(PolygonError::TangencyViolation {
                    index: i,
                    detail: format!("⟨u^i, X^i⟩ = {dot:.3e}"),
                });
            }
        }
        let mut closing = Vec3::default();
        let mut scale = 1.0_f64;
        for (i, &x) in self.comps.iter().enumerate() {
            closing += x * u.lengths()[i];
            scale = scale.max(x.norm() * u.lengths()[i]);
        }
        let defect = closing.norm();
        if defect.is_nan() || defect > tol.closing * scale {
            return Err(PolygonError::TangencyViolation {
                index: usize::MAX,
                detail: format!("|Σ r_i X^i| = {defect:.3e}"),
            });
        }
        Ok(())
    }

    /// Norm in the weighted metric `⟨X, Y⟩ = Σ r_i ⟨X^i, Y^i⟩`.
    pub fn metric_norm(&self, r: &SideLengths) -> f64 {
        metric_dot(self, self, r).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            comps: self.comps.iter().map(|&x| x * s).collect(),
        }
    }
}

impl std::ops::Sub for &TangentVector {
    type Output = TangentVector;
    fn sub(self, o: &TangentVector) -> TangentVector {
        TangentVector {
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// Riemannian pairing `Σ r_i ⟨X^i, Y^i⟩`.
pub fn metric_dot(x: &TangentVector, y: &TangentVector, r: &SideLengths) -> f64 {
    x.comps
        .iter()
        .zip(&y.comps)
        .zip(r.as_slice())
        .map(|((&a, &b), &w)| w * a.dot(b))
        .sum()
}

/// Symplectic pairing `ω_u(X, Y) = Σ r_i det(u^i, X^i, Y^i)`.
///
/// Antisymmetric and bilinear; vanishes when either argument fails the
/// tangency contract, which is rejected instead.
pub fn omega(
    u: &Polygon,
    x: &TangentVector,
    y: &TangentVector,
    tol: &Tolerances,
) -> Result<f64, PolygonError> {
    x.validate_at(u, tol)?;
    y.validate_at(u, tol)?;
    Ok(omega_unchecked(u, x, y))
}

/// [`omega`] without the tangency validation, for hot loops on vectors that
/// are tangent by construction.
pub fn omega_unchecked(u: &Polygon, x: &TangentVector, y: &TangentVector) -> f64 {
    u.edges()
        .iter()
        .zip(x.components())
        .zip(y.components())
        .zip(u.lengths().as_slice())
        .map(|(((&e, &a), &b), &r)| r * det3(e, a, b))
        .sum()
}

/// Infinitesimal global rotation with angular velocity `v`:
/// `(v × u^0, …, v × u^{n−1})`. Tangent at every polygon.
pub fn orbit_tangent(u: &Polygon, v: Vec3) -> TangentVector {
    TangentVector::from_components(u.edges().iter().map(|&e| v.cross(e)).collect())
}

/// Project a tangent vector onto the metric complement of the rotation-orbit
/// directions.
///
/// The horizontal component represents the tangent space of the quotient by
/// global rotations. Orbit fields project to zero; the projection is
/// idempotent. On lined polygons the orbit directions span only two
/// dimensions and the rank-deficient direction is dropped.
pub fn horizontal_project(u: &Polygon, x: &TangentVector) -> TangentVector {
    let r = u.lengths();
    // Orthonormalize the orbit generators in the weighted metric, dropping
    // near-zero directions (degenerate polygons).
    let mut basis: Vec<TangentVector> = Vec::with_capacity(3);
    let scale = r.perimeter().sqrt();
    for e in BASIS {
        let mut g = orbit_tangent(u, e);
        for b in &basis {
            let c = metric_dot(&g, b, r);
            g = &g - &b.scaled(c);
        }
        let norm = g.metric_norm(r);
        if norm > 1e-12 * scale {
            basis.push(g.scaled(1.0 / norm));
        }
    }
    let mut h = x.clone();
    for b in &basis {
        let c = metric_dot(&h, b, r);
        h = &h - &b.scaled(c);
    }
    h
}

// ---------------------------------------------------------------------------
// Stratification and canonical representatives
// ---------------------------------------------------------------------------

/// Isotropy stratum of a polygon under the global rotation action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stratum {
    /// Trivial isotropy; the generic stratum.
    Nondegenerate,
    /// All edges on one line: the isotropy is the circle of rotations about
    /// `direction` (the first edge, fixing the sign convention).
    Degenerate { direction: Vec3 },
}

/// Classify a polygon as lined or not: degenerate iff every edge is
/// collinear with the first, componentwise `|u^i × u^0| < tol.collinear`.
pub fn stratum_of(u: &Polygon, tol: &Tolerances) -> Stratum {
    let first = u.edge(0);
    let lined = u
        .edges()
        .iter()
        .all(|&e| e.cross(first).max_abs() < tol.collinear);
    if lined {
        Stratum::Degenerate { direction: first }
    } else {
        Stratum::Nondegenerate
    }
}

/// Canonical representative of the orbit of `u` under global rotations.
///
/// Rotates so the first edge is `e1` and the first edge not collinear with
/// it lies in the xy-plane with positive y component. Two polygons in one
/// orbit map to the same representative (nondegenerate case); lined polygons
/// only get `u^0 = e1`.
pub fn align_canonical(u: &Polygon, tol: &Tolerances) -> Polygon {
    let first = u.edge(0);
    let rot = Rotation::from_arc(first, E1);
    let mut aligned = u.rotated(rot);
    // Pin the residual rotation about e1 using the first non-collinear edge.
    let pivot = aligned
        .edges()
        .iter()
        .position(|&e| e.cross(E1).max_abs() >= tol.collinear);
    if let Some(k) = pivot {
        let e = aligned.edge(k);
        let spin = Rotation::about_axis_unchecked(E1, -f64::atan2(e.z, e.y));
        aligned = aligned.rotated(spin);
    }
    // Restore exact unit norms; rotation introduces only rounding noise.
    Polygon::new(
        aligned.edges.clone(),
        aligned.lengths.clone(),
        &Tolerances::default(),
    )
    .expect("rotation preserves validity")
}
