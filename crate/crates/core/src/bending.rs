//! Bending-flow integrable systems on polygon spaces.
//!
//! A maximal family of `n − 3` pairwise non-crossing diagonals of an n-gon
//! induces a triangulation into `n − 2` adapted faces and the momentum map
//! `F_k(u) = ½ |d_k(u)|²`. The Hamiltonian vector field of `F_k` rotates the
//! edges on one side of the diagonal about the diagonal axis (a *bending*),
//! so the flows are rigid rotations and are implemented exactly — never by
//! ODE stepping. On the open set where no adapted face degenerates, the
//! diagonal lengths together with the dihedral angles across each diagonal
//! form global action-angle coordinates; the angles are normalized so that a
//! planar polygon has all angles zero and the unit-speed bending flow in `k`
//! advances the `k`-th angle at unit rate.
//!
//! The inverse construction, [`BendingSystem::build_polygon`], hinges the
//! faces of the triangulation tree together one at a time from prescribed
//! fiber values and dihedral angles; [`BendingSystem::sample_fiber`] drives
//! it with seeded random angles (and random attachment directions where a
//! diagonal vanishes and the hinge degenerates to a point).

use crate::geom::{Rotation, Vec3, E1};
use crate::polyspace::{Face, IndexPair, Polygon, PolygonError, SideLengths, TangentVector};
use crate::tol::Tolerances;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BendingError {
    #[error("a system on an n-gon needs n ≥ 4, got n = {0}")]
    TooFewVertices(usize),
    #[error("expected {expected} diagonals for an {n}-gon, got {got}")]
    WrongCount {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("({a}, {b}) is a side of the {n}-gon, not a diagonal")]
    SideNotDiagonal { a: usize, b: usize, n: usize },
    #[error("diagonal listed twice: ({a}, {b})")]
    DuplicateDiagonal { a: usize, b: usize },
    #[error("diagonals ({}, {}) and ({}, {}) cross", p.a(), p.b(), q.a(), q.b())]
    CrossingDiagonals { p: IndexPair, q: IndexPair },
    #[error("polygon side lengths do not match the system")]
    SideLengthMismatch,
    #[error("diagonal index {index} out of range ({count} diagonals)")]
    DiagonalIndexOutOfRange { index: usize, count: usize },
    #[error("fiber value has {got} entries, expected {expected}")]
    FiberValueLength { expected: usize, got: usize },
    #[error("fiber value {index} is negative: {value}")]
    NegativeFiberValue { index: usize, value: f64 },
    #[error(
        "infeasible fiber: face {face} has chord lengths ({l0}, {l1}, {l2}) violating the triangle inequality"
    )]
    InfeasibleFiber {
        face: Face,
        l0: f64,
        l1: f64,
        l2: f64,
    },
    #[error("normalized flow undefined: diagonal {index} vanishes")]
    ZeroDiagonal { index: usize },
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("angle list has {got} entries, expected {expected}")]
    AngleLength { expected: usize, got: usize },
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

// ---------------------------------------------------------------------------
// Diagonal sets and triangulations
// ---------------------------------------------------------------------------

/// A maximal non-crossing family of diagonals of the n-gon, together with
/// the triangulation it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSet {
    n: usize,
    diags: Vec<IndexPair>,
    faces: Vec<Face>,
    /// Per diagonal, the indices of the two adjacent faces as
    /// `[inside, outside]`: the inside face has its apex strictly between
    /// the diagonal endpoints.
    diag_faces: Vec<[usize; 2]>,
    index_of: BTreeMap<IndexPair, usize>,
}

impl DiagonalSet {
    /// Validate a family of diagonals: correct cardinality, true diagonals,
    /// pairwise non-crossing. Derives the adapted faces.
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self, BendingError> {
        if n < 4 {
            return Err(BendingError::TooFewVertices(n));
        }
        let expected = n - 3;
        if pairs.len() != expected {
            return Err(BendingError::WrongCount {
                n,
                expected,
                got: pairs.len(),
            });
        }
        let mut diags = Vec::with_capacity(expected);
        for &(a, b) in &pairs {
            let pair = IndexPair::new_diagonal(a, b, n).map_err(|e| match e {
                PolygonError::NotADiagonal { a, b, n } => BendingError::SideNotDiagonal { a, b, n },
                other => BendingError::Polygon(other),
            })?;
            diags.push(pair);
        }
        for i in 0..diags.len() {
            for j in (i + 1)..diags.len() {
                if diags[i] == diags[j] {
                    return Err(BendingError::DuplicateDiagonal {
                        a: diags[i].a(),
                        b: diags[i].b(),
                    });
                }
                if diags[i].crosses(diags[j]) {
                    return Err(BendingError::CrossingDiagonals {
                        p: diags[i],
                        q: diags[j],
                    });
                }
            }
        }

        // A triple of vertices spans a face exactly when all three chords
        // are sides or chosen diagonals: the enclosed region contains no
        // other vertex because the family is non-crossing and maximal.
        let is_chord = |a: usize, b: usize| {
            let p = IndexPair::new(a, b, n).unwrap();
            p.is_side(n) || diags.contains(&p)
        };
        let mut faces = Vec::with_capacity(n - 2);
        for i in 0..n {
            for j in (i + 1)..n {
                if !is_chord(i, j) {
                    continue;
                }
                for k in (j + 1)..n {
                    if is_chord(j, k) && is_chord(i, k) {
                        faces.push(Face::new(i, j, k));
                    }
                }
            }
        }
        debug_assert_eq!(
            faces.len(),
            n - 2,
            "maximal non-crossing family must triangulate"
        );

        let mut diag_faces = Vec::with_capacity(expected);
        let mut index_of = BTreeMap::new();
        for (idx, &d) in diags.iter().enumerate() {
            let adjacent: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| {
                    let vs = [f.i, f.j, f.k];
                    vs.contains(&d.a()) && vs.contains(&d.b())
                })
                .map(|(fi, _)| fi)
                .collect();
            debug_assert_eq!(adjacent.len(), 2, "every diagonal bounds exactly two faces");
            let apex = |fi: usize| {
                let f = faces[fi];
                [f.i, f.j, f.k]
                    .into_iter()
                    .find(|&v| v != d.a() && v != d.b())
                    .unwrap()
            };
            let (inside, outside) = if d.a() < apex(adjacent[0]) && apex(adjacent[0]) < d.b() {
                (adjacent[0], adjacent[1])
            } else {
                (adjacent[1], adjacent[0])
            };
            diag_faces.push([inside, outside]);
            index_of.insert(d, idx);
        }

        Ok(Self {
            n,
            diags,
            faces,
            diag_faces,
            index_of,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> &[IndexPair] {
        &self.diags
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn diagonal_index(&self, pair: IndexPair) -> Option<usize> {
        self.index_of.get(&pair).copied()
    }

    /// `[inside, outside]` adjacent face indices of diagonal `k`.
    pub fn adjacent_faces(&self, k: usize) -> [usize; 2] {
        self.diag_faces[k]
    }

    /// The fan where all diagonals emanate from vertex 0.
    pub fn caterpillar(n: usize) -> Result<Self, BendingError> {
        if n < 4 {
            return Err(BendingError::TooFewVertices(n));
        }
        Self::new(n, (2..n - 1).map(|m| (0, m)).collect())
    }

    /// Whether this is the caterpillar fan from vertex 0.
    pub fn is_caterpillar(&self) -> bool {
        self.diags
            .iter()
            .enumerate()
            .all(|(i, d)| d.a() == 0 && d.b() == i + 2)
    }

    /// A zigzag (path-dual) triangulation, distinct from every fan for
    /// n ≥ 5.
    pub fn snake(n: usize) -> Result<Self, BendingError> {
        if n < 4 {
            return Err(BendingError::TooFewVertices(n));
        }
        // Vertex sequence 1, 0, 2, n−1, 3, n−2, …; consecutive triples are
        // the triangle fan of the zigzag path.
        let mut seq = vec![1usize, 0];
        let (mut lo, mut hi) = (2usize, n - 1);
        let mut take_lo = true;
        while lo <= hi {
            if take_lo {
                seq.push(lo);
                lo += 1;
            } else {
                seq.push(hi);
                hi -= 1;
            }
            take_lo = !take_lo;
        }
        let mut pairs = Vec::new();
        for w in seq.windows(3) {
            for (x, y) in [(w[0], w[1]), (w[1], w[2]), (w[0], w[2])] {
                if let Ok(p) = IndexPair::new_diagonal(x, y, n) {
                    if !pairs.contains(&(p.a(), p.b())) {
                        pairs.push((p.a(), p.b()));
                    }
                }
            }
        }
        Self::new(n, pairs)
    }

    /// Every triangulation of the convex n-gon (Catalan(n−2) of them).
    pub fn enumerate_all(n: usize) -> Result<Vec<Self>, BendingError> {
        if n < 4 {
            return Err(BendingError::TooFewVertices(n));
        }
        fn rec(a: usize, b: usize) -> Vec<Vec<(usize, usize)>> {
            if b - a < 2 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for m in (a + 1)..b {
                for left in rec(a, m) {
                    for right in rec(m, b) {
                        let mut t = left.clone();
                        t.extend_from_slice(&right);
                        if m > a + 1 {
                            t.push((a, m));
                        }
                        if b > m + 1 {
                            t.push((m, b));
                        }
                        out.push(t);
                    }
                }
            }
            out
        }
        rec(0, n - 1)
            .into_iter()
            .map(|pairs| Self::new(n, pairs))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Fiber values and the bending system
// ---------------------------------------------------------------------------

/// Value of the momentum map: `c_k = ½ |d_k|² ≥ 0` per diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberValue(Vec<f64>);

impl FiberValue {
    pub fn new(c: Vec<f64>) -> Result<Self, BendingError> {
        for (index, &value) in c.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(BendingError::NegativeFiberValue { index, value });
            }
        }
        Ok(Self(c))
    }

    /// Fiber value with prescribed diagonal lengths `ℓ_k`: `c_k = ½ ℓ_k²`.
    pub fn from_lengths(lens: &[f64]) -> Result<Self, BendingError> {
        Self::new(lens.iter().map(|l| 0.5 * l * l).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Diagonal length `ℓ_k = √(2 c_k)`.
    pub fn diagonal_length(&self, k: usize) -> f64 {
        (2.0 * self.0[k]).sqrt()
    }
}

impl std::ops::Index<usize> for FiberValue {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Action-angle data at a regular point: diagonal lengths `ℓ` and dihedral
/// angles `θ ∈ [0, 2π)`, zero exactly on planar polygons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionAngle {
    pub lengths: Vec<f64>,
    pub angles: Vec<f64>,
}

/// A bending system: side lengths plus a validated diagonal family.
#[derive(Debug, Clone, PartialEq)]
pub struct BendingSystem {
    lengths: SideLengths,
    diagonals: DiagonalSet,
}

impl BendingSystem {
    pub fn new(lengths: SideLengths, diagonals: DiagonalSet) -> Result<Self, BendingError> {
        if lengths.n() != diagonals.n() {
            return Err(BendingError::SideLengthMismatch);
        }
        Ok(Self { lengths, diagonals })
    }

    pub fn n(&self) -> usize {
        self.lengths.n()
    }

    pub fn lengths(&self) -> &SideLengths {
        &self.lengths
    }

    pub fn diagonal_set(&self) -> &DiagonalSet {
        &self.diagonals
    }

    pub fn diagonals(&self) -> &[IndexPair] {
        self.diagonals.diagonals()
    }

    pub fn faces(&self) -> &[Face] {
        self.diagonals.faces()
    }

    fn check_polygon(&self, u: &Polygon) -> Result<(), BendingError> {
        if u.n() != self.n() {
            return Err(BendingError::SideLengthMismatch);
        }
        let scale = self.lengths.perimeter();
        let ok = u
            .lengths()
            .as_slice()
            .iter()
            .zip(self.lengths.as_slice())
            .all(|(&a, &b)| (a - b).abs() <= 1e-12 * scale);
        if !ok {
            return Err(BendingError::SideLengthMismatch);
        }
        Ok(())
    }

    fn check_diag_index(&self, k: usize) -> Result<IndexPair, BendingError> {
        self.diagonals
            .diagonals()
            .get(k)
            .copied()
            .ok_or(BendingError::DiagonalIndexOutOfRange {
                index: k,
                count: self.diagonals.diagonals().len(),
            })
    }

    fn check_fiber_value(&self, c: &FiberValue) -> Result<(), BendingError> {
        if c.len() != self.n() - 3 {
            return Err(BendingError::FiberValueLength {
                expected: self.n() - 3,
                got: c.len(),
            });
        }
        Ok(())
    }

    /// Length of any chord on the fiber `c`: side lengths are fixed, chosen
    /// diagonals carry `ℓ = √(2c)`. `None` for chords that are neither.
    pub fn chord_length_on_fiber(&self, c: &FiberValue, pair: IndexPair) -> Option<f64> {
        if let Some(edge) = pair.side_edge_index(self.n()) {
            Some(self.lengths[edge])
        } else {
            self.diagonals
                .diagonal_index(pair)
                .map(|k| c.diagonal_length(k))
        }
    }

    /// The three chord lengths of an adapted face on the fiber `c`.
    pub fn face_lengths_on_fiber(&self, c: &FiberValue, face: Face) -> [f64; 3] {
        let n = self.n();
        face.chords(n).map(|p| {
            self.chord_length_on_fiber(c, p)
                .expect("adapted face chords are sides or chosen diagonals")
        })
    }

    /// Triangle-inequality feasibility of the fiber: every adapted face must
    /// satisfy its inequalities non-strictly (within the equality band).
    pub fn fiber_feasible(&self, c: &FiberValue, tol: &Tolerances) -> Result<(), BendingError> {
        self.check_fiber_value(c)?;
        for &face in self.faces() {
            let [l0, l1, l2] = self.face_lengths_on_fiber(c, face);
            let scale = l0.max(l1).max(l2).max(1e-300);
            let band = tol.equality * scale;
            if l0 > l1 + l2 + band || l1 > l0 + l2 + band || l2 > l0 + l1 + band {
                return Err(BendingError::InfeasibleFiber { face, l0, l1, l2 });
            }
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // Momentum map and bending fields
    // -----------------------------------------------------------------------

    /// The momentum map `F(u) = (½ |d_1(u)|², …, ½ |d_{n−3}(u)|²)`.
    pub fn momentum(&self, u: &Polygon) -> Result<FiberValue, BendingError> {
        self.check_polygon(u)?;
        Ok(FiberValue(
            self.diagonals()
                .iter()
                .map(|&d| 0.5 * u.diagonal(d).norm_sq())
                .collect(),
        ))
    }

    /// Hamiltonian vector field of `F_k` at `u`: `d_k × u^i` on the edges
    /// between the diagonal endpoints, zero elsewhere. Vanishes when the
    /// diagonal does.
    pub fn bending_field(&self, u: &Polygon, k: usize) -> Result<TangentVector, BendingError> {
        self.check_polygon(u)?;
        let pair = self.check_diag_index(k)?;
        Ok(bending_field_of_pair(u, pair))
    }

    /// The bending that rotates the complementary half of the polygon, with
    /// inverse orientation. Differs from [`BendingSystem::bending_field`] by
    /// the global-rotation field with angular velocity `d_k`, so both induce
    /// the same motion modulo rigid rotations.
    pub fn inverse_bending_field(
        &self,
        u: &Polygon,
        k: usize,
    ) -> Result<TangentVector, BendingError> {
        self.check_polygon(u)?;
        let pair = self.check_diag_index(k)?;
        let d = u.diagonal(pair);
        let mut comps = vec![Vec3::default(); u.n()];
        for (i, c) in comps.iter_mut().enumerate() {
            if i < pair.a() || i >= pair.b() {
                *c = -d.cross(u.edge(i));
            }
        }
        Ok(TangentVector::from_components(comps))
    }

    /// The symplectic pairing of two bending fields,
    /// `ω(X_k, X_m) = Σ_i r_i det(u^i, X_k^i, X_m^i)`.
    ///
    /// Zero (up to rounding) for every pair inside the system, since chosen
    /// diagonals never cross.
    pub fn poisson_bracket(&self, u: &Polygon, k: usize, m: usize) -> Result<f64, BendingError> {
        self.check_polygon(u)?;
        let pk = self.check_diag_index(k)?;
        let pm = self.check_diag_index(m)?;
        Ok(bracket_of_pairs(u, pk, pm))
    }

    // -----------------------------------------------------------------------
    // Flows
    // -----------------------------------------------------------------------

    /// Bending flow: rotate the edges between the endpoints of diagonal `k`
    /// about the diagonal axis, by angle `t` (normalized, unit angular speed)
    /// or `t·|d_k|` (Hamiltonian flow of `F_k`).
    ///
    /// A single exact rotation: the closing condition and all momenta are
    /// preserved to rounding, and the normalized flow is 2π-periodic.
    pub fn flow(
        &self,
        u: &Polygon,
        k: usize,
        t: f64,
        normalized: bool,
    ) -> Result<Polygon, BendingError> {
        self.check_polygon(u)?;
        let pair = self.check_diag_index(k)?;
        let d = u.diagonal(pair);
        let len = d.norm();
        let zero = len <= 1e-14 * self.lengths.perimeter();
        if normalized && zero {
            return Err(BendingError::ZeroDiagonal { index: k });
        }
        if zero {
            return Ok(u.clone()); // Hamiltonian flow of F_k fixes u when d_k = 0.
        }
        let angle = if normalized { t } else { t * len };
        Ok(rotate_edge_range(u, pair.a(), pair.b(), d, angle))
    }

    // -----------------------------------------------------------------------
    // Action-angle coordinates
    // -----------------------------------------------------------------------

    /// Action-angle coordinates at a regular point: `ℓ_k = |d_k(u)|` and the
    /// dihedral angle `θ_k ∈ [0, 2π)` across diagonal `k`, oriented so the
    /// normalized flow in `k` advances `θ_k` at unit rate and offset so that
    /// planar polygons have `θ = 0`.
    ///
    /// Errors with [`BendingError::SingularPoint`] when a diagonal vanishes
    /// or an adapted face degenerates.
    pub fn action_angle(&self, u: &Polygon) -> Result<ActionAngle, BendingError> {
        self.check_polygon(u)?;
        let mut lengths = Vec::with_capacity(self.diagonals().len());
        let mut angles = Vec::with_capacity(self.diagonals().len());
        for (k, &pair) in self.diagonals().iter().enumerate() {
            let d = u.diagonal(pair);
            let len = d.norm();
            if len <= 1e-10 * self.lengths.perimeter() {
                return Err(BendingError::SingularPoint(format!(
                    "diagonal {} = ({}, {}) vanishes",
                    k,
                    pair.a(),
                    pair.b()
                )));
            }
            let [inside, outside] = self.diagonals.adjacent_faces(k);
            let apex = |fi: usize| {
                let f = self.faces()[fi];
                [f.i, f.j, f.k]
                    .into_iter()
                    .find(|&v| v != pair.a() && v != pair.b())
                    .unwrap()
            };
            let theta = hinge_angle(u, pair, apex(inside), apex(outside)).ok_or_else(|| {
                BendingError::SingularPoint(format!(
                    "a face adjacent to diagonal ({}, {}) is degenerate",
                    pair.a(),
                    pair.b()
                ))
            })?;
            lengths.push(len);
            angles.push(theta);
        }
        Ok(ActionAngle { lengths, angles })
    }

    // -----------------------------------------------------------------------
    // Building polygons on a fiber
    // -----------------------------------------------------------------------

    /// Construct a polygon with momentum `c` and dihedral angles `angles`,
    /// by placing the faces of the triangulation tree one at a time, hinging
    /// each about its shared diagonal.
    ///
    /// Where a face is forced degenerate by an equality in `c` the hinge
    /// angle is immaterial and ignored; where a diagonal vanishes the
    /// attachment direction is chosen deterministically.
    pub fn build_polygon(&self, c: &FiberValue, angles: &[f64]) -> Result<Polygon, BendingError> {
        if angles.len() != self.n() - 3 {
            return Err(BendingError::AngleLength {
                expected: self.n() - 3,
                got: angles.len(),
            });
        }
        self.build_from_parts(c, angles, None)
    }

    /// Seeded random points of the fiber: uniform angles on every torus
    /// hinge and uniform attachment directions on the point hinges left by
    /// vanishing diagonals. Deterministic per `(seed, sample index)` and
    /// independent of scheduling.
    pub fn sample_fiber(
        &self,
        c: &FiberValue,
        count: usize,
        seed: u64,
    ) -> Result<Vec<Polygon>, BendingError> {
        self.fiber_feasible(c, &Tolerances::default())?;
        let m = self.n() - 3;
        let mut out = Vec::with_capacity(count);
        for index in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, index as u64));
            let angles: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..TAU)).collect();
            let dirs: Vec<Vec3> = (0..m).map(|_| random_unit(&mut rng)).collect();
            out.push(self.build_from_parts(c, &angles, Some(&dirs))?);
        }
        Ok(out)
    }

    fn build_from_parts(
        &self,
        c: &FiberValue,
        angles: &[f64],
        zero_dirs: Option<&[Vec3]>,
    ) -> Result<Polygon, BendingError> {
        let tol = Tolerances::default();
        self.fiber_feasible(c, &tol)?;
        let n = self.n();
        let scale = self.lengths.perimeter();
        let ztol = tol.len_zero * scale;
        let len = |pair: IndexPair| self.chord_length_on_fiber(c, pair).unwrap();

        let mut pos: Vec<Option<Vec3>> = vec![None; n];

        // Root: the face containing the closing side (n−1, 0).
        let root = self
            .faces()
            .iter()
            .position(|f| {
                let vs = [f.i, f.j, f.k];
                vs.contains(&0) && vs.contains(&(n - 1))
            })
            .expect("the closing side belongs to exactly one face");
        {
            let f = self.faces()[root];
            let verts = [f.i, f.j, f.k];
            // Base the placement on the longest chord; a side is always
            // present so it is positive.
            let chords = [(f.i, f.j), (f.j, f.k), (f.i, f.k)];
            let (p, q) = chords
                .into_iter()
                .max_by(|&(a1, b1), &(a2, b2)| {
                    let l1 = len(IndexPair::new(a1, b1, n).unwrap());
                    let l2 = len(IndexPair::new(a2, b2, n).unwrap());
                    l1.total_cmp(&l2)
                })
                .unwrap();
            let apex = verts.into_iter().find(|&v| v != p && v != q).unwrap();
            let l_pq = len(IndexPair::new(p, q, n).unwrap());
            let l_pa = len(IndexPair::new(p, apex, n).unwrap());
            let l_qa = len(IndexPair::new(q, apex, n).unwrap());
            pos[p] = Some(Vec3::default());
            pos[q] = Some(Vec3::new(l_pq, 0.0, 0.0));
            let (alpha, h) = apex_coordinates(l_pq, l_pa, l_qa);
            pos[apex] = Some(Vec3::new(alpha, h, 0.0));
        }

        // Hinge the remaining faces on, walking the dual tree from the root.
        let mut visited = vec![false; self.faces().len()];
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(fi) = queue.pop_front() {
            let face = self.faces()[fi];
            for pair in face.chords(n) {
                let Some(k) = self.diagonals.diagonal_index(pair) else {
                    continue;
                };
                let [fa, fb] = self.diagonals.adjacent_faces(k);
                let child = if fa == fi { fb } else { fa };
                if visited[child] {
                    continue;
                }
                visited[child] = true;
                queue.push_back(child);

                let g = self.faces()[child];
                let apex_child = [g.i, g.j, g.k]
                    .into_iter()
                    .find(|&v| v != pair.a() && v != pair.b())
                    .unwrap();
                let apex_parent = [face.i, face.j, face.k]
                    .into_iter()
                    .find(|&v| v != pair.a() && v != pair.b())
                    .unwrap();
                let pa = pos[pair.a()].expect("parent face placed");
                let pb = pos[pair.b()].expect("parent face placed");
                let pm = pos[apex_parent].expect("parent face placed");
                let l_hinge = len(pair);
                let l_ac = len(IndexPair::new(pair.a(), apex_child, n).unwrap());
                let l_bc = len(IndexPair::new(pair.b(), apex_child, n).unwrap());

                let placed = if l_hinge <= ztol {
                    // Point hinge: attach in a prescribed or deterministic
                    // direction from the pinch point.
                    let dir = match zero_dirs {
                        Some(dirs) => dirs[k],
                        None => (pa - pm).normalized(1e-14 * scale).unwrap_or(E1),
                    };
                    pa + dir * l_ac
                } else {
                    let axis = (pb - pa) * (1.0 / l_hinge);
                    // A nearly collapsed parent face leaves only a sliver of
                    // perpendicular component whose normalization is not
                    // accurately orthogonal to the axis; re-orthogonalize
                    // once so apex distances stay exact.
                    let w_parent = perp_component(pm - pa, axis)
                        .normalized(1e-12 * scale)
                        .and_then(|unit| perp_component(unit, axis).normalized(0.5))
                        .unwrap_or_else(|| axis.any_unit_normal());
                    let parent_is_inside = pair.a() < apex_parent && apex_parent < pair.b();
                    let theta = angles[k];
                    let spin = if parent_is_inside {
                        -(theta + std::f64::consts::PI)
                    } else {
                        theta + std::f64::consts::PI
                    };
                    let w_child = Rotation::about_axis_unchecked(axis, spin).apply(w_parent);
                    let (alpha, h) = apex_coordinates(l_hinge, l_ac, l_bc);
                    pa + axis * alpha + w_child * h
                };
                if pos[apex_child].is_none() {
                    pos[apex_child] = Some(placed);
                }
            }
        }

        let verts: Vec<Vec3> = pos
            .into_iter()
            .map(|p| p.expect("triangulation covers every vertex"))
            .collect();
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let e = verts[(i + 1) % n] - verts[i];
            edges.push(e * (1.0 / self.lengths[i]));
        }
        Ok(Polygon::new(edges, self.lengths.clone(), &tol)?)
    }
}

// ---------------------------------------------------------------------------
// Free helpers on raw index pairs
// ---------------------------------------------------------------------------

/// Bending field of an arbitrary chord, not necessarily part of a system.
pub fn bending_field_of_pair(u: &Polygon, pair: IndexPair) -> TangentVector {
    let d = u.diagonal(pair);
    let mut comps = vec![Vec3::default(); u.n()];
    for (i, comp) in comps.iter_mut().enumerate().take(pair.b()).skip(pair.a()) {
        *comp = d.cross(u.edge(i));
    }
    TangentVector::from_components(comps)
}

/// `ω(X_p, X_q)` for the bending fields of two arbitrary chords, evaluated
/// by the coordinate determinant formula. Nonzero in general for crossing
/// chords; zero up to rounding for disjoint ones.
pub fn bracket_of_pairs(u: &Polygon, p: IndexPair, q: IndexPair) -> f64 {
    let dp = u.diagonal(p);
    let dq = u.diagonal(q);
    let lo = p.a().max(q.a());
    let hi = p.b().min(q.b());
    let mut sum = 0.0;
    for i in lo..hi {
        let e = u.edge(i);
        sum += u.lengths()[i] * crate::geom::det3(e, dp.cross(e), dq.cross(e));
    }
    sum
}

/// Rotate the cyclic edge range `[from, to)` of `u` about `axis` by `angle`.
/// The axis must be the chord spanned by the range for the result to stay
/// closed. A zero angle returns the polygon bit-exactly.
pub fn rotate_edge_range(u: &Polygon, from: usize, to: usize, axis: Vec3, angle: f64) -> Polygon {
    if angle == 0.0 {
        return u.clone();
    }
    let n = u.n();
    let rot = Rotation::about_axis_unchecked(axis, angle);
    let mut edges: Vec<Vec3> = u.edges().to_vec();
    let mut i = from;
    while i != to {
        edges[i] = rot.apply(edges[i]);
        i = (i + 1) % n;
    }
    Polygon::new(edges, u.lengths().clone(), &Tolerances::default())
        .expect("rotation about the spanned chord preserves closing")
}

/// Dihedral angle across the chord `pair`, measured from the face with apex
/// `outside_apex` to the face with apex `inside_apex`, in `[0, 2π)`; zero
/// for coplanar faces on opposite sides (planar polygons). `None` when the
/// chord or either face normal vanishes.
fn hinge_angle(
    u: &Polygon,
    pair: IndexPair,
    inside_apex: usize,
    outside_apex: usize,
) -> Option<f64> {
    let scale = u.lengths().perimeter();
    let d = u.diagonal(pair);
    let axis = d.normalized(1e-10 * scale)?;
    let (a, b) = (pair.a(), pair.b());
    let x = inside_apex;
    let n_in = u
        .diagonal(IndexPair::new(a, x, u.n()).unwrap())
        .cross(u.diagonal(IndexPair::new(x, b, u.n()).unwrap()));
    let y = outside_apex;
    let n_out = if y > b {
        d.cross(u.diagonal(IndexPair::new(b, y, u.n()).unwrap()))
    } else {
        u.diagonal(IndexPair::new(y, a, u.n()).unwrap()).cross(d)
    };
    let n_in = n_in.normalized(1e-10 * scale * scale)?;
    let n_out = n_out.normalized(1e-10 * scale * scale)?;
    Some(wrap_angle(f64::atan2(
        crate::geom::det3(n_out, n_in, axis),
        n_out.dot(n_in),
    )))
}

/// Wrap into `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w == TAU {
        0.0
    } else {
        w
    }
}

/// Distance between angles on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

/// In-plane coordinates of a triangle apex over the base `(0,0)--(l_base,0)`
/// given the other two side lengths; the height is clamped at equality.
fn apex_coordinates(l_base: f64, l_left: f64, l_right: f64) -> (f64, f64) {
    if l_base <= 0.0 {
        return (l_left, 0.0);
    }
    let alpha = (l_left * l_left + l_base * l_base - l_right * l_right) / (2.0 * l_base);
    let h = (l_left * l_left - alpha * alpha).max(0.0).sqrt();
    (alpha, h)
}

fn perp_component(v: Vec3, unit_axis: Vec3) -> Vec3 {
    v - unit_axis * v.dot(unit_axis)
}

/// SplitMix64 step, for deriving independent per-sample streams.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform unit vector from three Gaussians.
pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if let Some(u) = v.normalized(1e-6) {
            return u;
        }
    }
}
