//! Structure of the fibers of a bending system.
//!
//! All fiber-level decisions are made from `(r, c)` arithmetic alone: the
//! chord lengths of every adapted face are constant along a fiber, so
//! degeneracy is a property of the fiber, not of a sampled polygon. A face
//! is degenerate when its three chord lengths attain a triangle inequality
//! with equality (the triangle collapses onto a line) or when a chord is a
//! vanishing diagonal.
//!
//! A fiber with no degenerate face is a torus of dimension `n − 3`. A
//! singular fiber is classified by a recursion mirroring its geometry:
//!
//! 1. cut the polygon at every vanishing diagonal — each pinch splits off a
//!    closed sub-polygon (a *wedge piece*);
//! 2. inside a piece with no vanishing chord, a collapsed face splits the
//!    piece into three smaller closed polygons, each gaining one new side of
//!    the collapsed face's chord length; recurse;
//! 3. a digon or a fully collapsed piece contributes a sphere factor, a
//!    nondegenerate triangle a rigid `SO(3)` factor, and a regular piece a
//!    rigid factor with one torus circle per internal diagonal. When sub
//!    pieces recombine across a collapsed face, torus ranks add and each
//!    rigid piece beyond the first contributes one further circle (its spin
//!    about the common line).
//!
//! The resulting product model is certified a posteriori: the bending fields
//! together with the per-piece rotation fields span the fiber's tangent
//! space, so the model dimension must match their numerical rank, and the
//! symplectic form must vanish on their span (the fibers are isotropic).

use crate::bending::{mix_seed, BendingError, BendingSystem, FiberValue};
use crate::geom::{Vec3, BASIS};
use crate::polyspace::{omega_unchecked, Face, IndexPair, Polygon, TangentVector};
use crate::tol::Tolerances;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FiberError {
    #[error(transparent)]
    Bending(#[from] BendingError),
    #[error("polygon is not on the requested fiber: |F_{index}(u) − c_{index}| = {defect}")]
    NotOnFiber { index: usize, defect: f64 },
    #[error("face {0} is not an adapted face of the system")]
    FaceNotAdapted(Face),
    #[error("face {0} is not degenerate at this polygon")]
    FaceNotDegenerate(Face),
    #[error("the chord from vertex {0} to vertex {1} vanishes; the opening move needs it nonzero")]
    ZeroDiagonal(usize, usize),
    #[error("diagonal {0} does not vanish on this fiber")]
    DiagonalNotVanishing(usize),
    #[error(
        "polygon lies outside the dense set: chords ({0}, {1}) and ({1}, {2}) are collinear here"
    )]
    NotInDenseSet(usize, usize, usize),
}

// ---------------------------------------------------------------------------
// Face statuses
// ---------------------------------------------------------------------------

/// Fiber-level status of one adapted face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FaceKind {
    Nondegenerate,
    /// The three chords are collinear with all lengths positive; the signs
    /// `dependence` satisfy `Σ dependence_p · length_p = 0` (the longest
    /// chord carries `−1`).
    DegenerateCollinear {
        dependence: [f64; 3],
    },
    /// Some chord of the face is a vanishing chosen diagonal.
    HasZeroDiagonalSide,
}

/// Status of an adapted face, decidable from `(r, c)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceStatus {
    pub face: Face,
    pub kind: FaceKind,
    /// Chord lengths in the order `(i,j), (j,k), (i,k)`.
    pub lengths: [f64; 3],
}

/// Whether a chord length counts as vanishing at the given scale.
fn is_zero_len(len: f64, scale: f64, tol: &Tolerances) -> bool {
    len <= tol.len_zero * scale
}

fn classify_lengths(lengths: [f64; 3], zero: [bool; 3], band: f64) -> FaceKind {
    if zero.iter().any(|&z| z) {
        return FaceKind::HasZeroDiagonalSide;
    }
    let [a, b, c] = lengths;
    let scale = a.max(b).max(c);
    let eq = |x: f64, y: f64| (x - y).abs() <= band * scale;
    if eq(a, b + c) {
        FaceKind::DegenerateCollinear {
            dependence: [-1.0, 1.0, 1.0],
        }
    } else if eq(b, a + c) {
        FaceKind::DegenerateCollinear {
            dependence: [1.0, -1.0, 1.0],
        }
    } else if eq(c, a + b) {
        FaceKind::DegenerateCollinear {
            dependence: [1.0, 1.0, -1.0],
        }
    } else {
        FaceKind::Nondegenerate
    }
}

/// Status of every adapted face on the fiber `c`, from `(r, c)` alone.
///
/// Errors with `InfeasibleFiber` when some face violates its triangle
/// inequality strictly (the fiber is empty).
pub fn face_statuses(
    sys: &BendingSystem,
    c: &FiberValue,
    tol: &Tolerances,
) -> Result<Vec<FaceStatus>, FiberError> {
    sys.fiber_feasible(c, tol)?;
    let scale = sys.lengths().perimeter();
    let n = sys.n();
    let mut out = Vec::with_capacity(sys.faces().len());
    for &face in sys.faces() {
        let lengths = sys.face_lengths_on_fiber(c, face);
        let chords = face.chords(n);
        let mut zero = [false; 3];
        for (z, p) in zero.iter_mut().zip(chords) {
            *z = !p.is_side(n) && is_zero_len(sys.chord_length_on_fiber(c, p).unwrap(), scale, tol);
        }
        out.push(FaceStatus {
            face,
            kind: classify_lengths(lengths, zero, tol.equality),
            lengths,
        });
    }
    Ok(out)
}

/// Whether the fiber over `c` consists of singular points: some adapted face
/// is degenerate there.
pub fn is_singular_fiber(
    sys: &BendingSystem,
    c: &FiberValue,
    tol: &Tolerances,
) -> Result<bool, FiberError> {
    Ok(face_statuses(sys, c, tol)?
        .iter()
        .any(|s| s.kind != FaceKind::Nondegenerate))
}

/// Indices of the chosen diagonals vanishing on the fiber.
pub fn vanishing_diagonals(sys: &BendingSystem, c: &FiberValue, tol: &Tolerances) -> Vec<usize> {
    let scale = sys.lengths().perimeter();
    (0..c.len())
        .filter(|&k| is_zero_len(c.diagonal_length(k), scale, tol))
        .collect()
}

// ---------------------------------------------------------------------------
// Length pieces: the combinatorial residue of a fiber
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
struct PieceSide {
    len: f64,
    /// Ambient edge index, `None` for sides created by opening a face.
    orig: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PieceChord {
    a: usize,
    b: usize,
    len: f64,
}

/// A closed polygon with known side lengths, triangulated by chords with
/// known lengths. Vertices are `0..m` cyclically; side `i` joins vertex `i`
/// to `i + 1 (mod m)`. Digons carry no chords.
#[derive(Debug, Clone, PartialEq)]
struct LengthPiece {
    sides: Vec<PieceSide>,
    chords: Vec<PieceChord>,
}

impl LengthPiece {
    fn from_fiber(sys: &BendingSystem, c: &FiberValue) -> Self {
        let sides = sys
            .lengths()
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &len)| PieceSide { len, orig: Some(i) })
            .collect();
        let chords = sys
            .diagonals()
            .iter()
            .enumerate()
            .map(|(k, d)| PieceChord {
                a: d.a(),
                b: d.b(),
                len: c.diagonal_length(k),
            })
            .collect();
        Self { sides, chords }
    }

    fn m(&self) -> usize {
        self.sides.len()
    }

    /// Length of the chord or side joining two distinct vertices, when it
    /// exists in the triangulation.
    fn connection_len(&self, a: usize, b: usize) -> Option<f64> {
        let m = self.m();
        if (a + 1) % m == b {
            return Some(self.sides[a].len);
        }
        if (b + 1) % m == a {
            return Some(self.sides[b].len);
        }
        self.chords
            .iter()
            .find(|ch| (ch.a == a && ch.b == b) || (ch.a == b && ch.b == a))
            .map(|ch| ch.len)
    }

    /// The triangulation faces as sorted vertex triples. A triple spans a
    /// face exactly when all three connections exist.
    fn faces(&self) -> Vec<[usize; 3]> {
        let m = self.m();
        if m < 3 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(m - 2);
        for i in 0..m {
            for j in (i + 1)..m {
                if self.connection_len(i, j).is_none() {
                    continue;
                }
                for k in (j + 1)..m {
                    if self.connection_len(j, k).is_some() && self.connection_len(i, k).is_some() {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), m - 2);
        out
    }

    /// Cut at a vanishing chord: the two closed sub-polygons obtained by
    /// pinching the chord's endpoints together. Chords that pinch onto a
    /// side are dropped and the pair flanking the collapsed face merges.
    fn cut_at(&self, chord_idx: usize) -> (LengthPiece, LengthPiece) {
        let cut = self.chords[chord_idx];
        let m = self.m();
        let extract = |vertices: Vec<usize>| -> LengthPiece {
            let mm = vertices.len();
            let index_of = |v: usize| -> usize {
                if v == cut.a || v == cut.b {
                    0
                } else {
                    vertices.iter().position(|&x| x == v).unwrap()
                }
            };
            let sides: Vec<PieceSide> = vertices.iter().map(|&v| self.sides[v]).collect();
            let adjacent = |x: usize, y: usize| (y + mm - x) % mm == 1 || (x + mm - y) % mm == 1;
            let mut chords: Vec<PieceChord> = Vec::new();
            for ch in &self.chords {
                if ch.a == cut.a && ch.b == cut.b {
                    continue;
                }
                let inside = |v: usize| v == cut.a || v == cut.b || vertices.contains(&v);
                if !(inside(ch.a) && inside(ch.b)) {
                    continue;
                }
                let (x, y) = (index_of(ch.a), index_of(ch.b));
                let (x, y) = (x.min(y), x.max(y));
                if adjacent(x, y) {
                    continue; // pinched onto a side
                }
                if chords.iter().any(|c2| c2.a == x && c2.b == y) {
                    continue; // flank pair merged into one chord
                }
                chords.push(PieceChord {
                    a: x,
                    b: y,
                    len: ch.len,
                });
            }
            LengthPiece { sides, chords }
        };
        let side_a: Vec<usize> = (cut.a..cut.b).collect();
        let side_b: Vec<usize> = (0..m - (cut.b - cut.a))
            .map(|off| (cut.b + off) % m)
            .collect();
        (extract(side_a), extract(side_b))
    }

    /// Split along a collapsed face into three closed sub-polygons, each
    /// gaining one new (virtual) side of the corresponding chord length.
    fn split_at_face(&self, face: [usize; 3]) -> [LengthPiece; 3] {
        let m = self.m();
        let [i, j, k] = face;
        let face_chord = |x: usize, y: usize| (x.min(y), x.max(y));
        let boundary = [face_chord(i, j), face_chord(j, k), face_chord(i, k)];
        let extract = |start: usize, end: usize| -> LengthPiece {
            // Closed polygon: a virtual side of the chord length from `end`
            // back to `start`, then the ambient sides start..end cyclically.
            let virt = PieceSide {
                len: self.connection_len(start, end).unwrap(),
                orig: None,
            };
            let mut vertices = Vec::new();
            let mut v = start;
            while v != end {
                vertices.push(v);
                v = (v + 1) % m;
            }
            let mut sides = vec![virt];
            sides.extend(vertices.iter().map(|&v| self.sides[v]));
            // Piece vertex 0 is `end` (start of the virtual side); ambient
            // vertex `start` becomes 1, the rest follow in order.
            let index_of = |v: usize| -> usize {
                if v == end {
                    0
                } else {
                    1 + vertices.iter().position(|&x| x == v).unwrap()
                }
            };
            let in_range = |v: usize| v == end || vertices.contains(&v);
            let mut chords = Vec::new();
            for ch in &self.chords {
                if boundary.contains(&(ch.a, ch.b)) || !(in_range(ch.a) && in_range(ch.b)) {
                    continue;
                }
                let (x, y) = (index_of(ch.a), index_of(ch.b));
                chords.push(PieceChord {
                    a: x.min(y),
                    b: x.max(y),
                    len: ch.len,
                });
            }
            LengthPiece { sides, chords }
        };
        [extract(i, j), extract(j, k), extract(k, i)]
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Diffeomorphism type of one wedge piece of a fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceModel {
    /// `S²`: a space of digons or of fully collapsed polygons.
    Sphere,
    /// `SO(3) × T^m`: a rigid frame with `m` bending circles (`m = 0` for a
    /// space of nondegenerate triangles).
    Rigid { torus_rank: usize },
}

impl PieceModel {
    pub fn dim(self) -> usize {
        match self {
            PieceModel::Sphere => 2,
            PieceModel::Rigid { torus_rank } => 3 + torus_rank,
        }
    }
}

/// One wedge piece of the decomposition at vanishing diagonals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgePiece {
    /// Ambient edge indices of the piece, ascending.
    pub edges: Vec<usize>,
    #[serde(flatten)]
    pub model: PieceModel,
}

/// Fiber type: `I` carries at least one rigid factor and the quotient by
/// global rotations is a manifold; `II` has only sphere factors and the
/// quotient is an orbispace stratified by its lined configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberType {
    I,
    II,
}

/// Classification of a fiber into its homogeneous model
/// `SO(3)^p × T^q × (S²)^k` (before the quotient by global rotations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberModel {
    /// Count of rigid `SO(3)` factors.
    pub p: usize,
    /// Total torus rank.
    pub q: usize,
    /// Count of sphere factors.
    pub k: usize,
    #[serde(rename = "type")]
    pub fiber_type: FiberType,
    /// Whether the fiber is Lagrangian in the moduli space: type I with
    /// quotient dimension `n − 3`.
    pub lagrangian: bool,
    /// `3p + q + 2k`, the dimension before the rotation quotient; equals the
    /// rank of the tangent generators.
    pub dim_total: usize,
    /// Dimension after the rotation quotient: `3(p−1) + q + 2k` for type I;
    /// for type II the dimension `max(2k − 3, 0)` of the stratum of
    /// non-lined configurations.
    pub dim_quotient: usize,
    pub pieces: Vec<WedgePiece>,
}

fn classify_piece(piece: &LengthPiece, tol: &Tolerances) -> PieceModel {
    let m = piece.m();
    if m == 2 {
        return PieceModel::Sphere;
    }
    let faces = piece.faces();
    let status_of = |f: &[usize; 3]| {
        let lens = [
            piece.connection_len(f[0], f[1]).unwrap(),
            piece.connection_len(f[1], f[2]).unwrap(),
            piece.connection_len(f[0], f[2]).unwrap(),
        ];
        classify_lengths(lens, [false; 3], tol.equality)
    };
    let degenerate = faces
        .iter()
        .find(|f| matches!(status_of(f), FaceKind::DegenerateCollinear { .. }));
    let Some(&face) = degenerate else {
        return PieceModel::Rigid { torus_rank: m - 3 }; // regular piece (m = 3 included)
    };
    if m == 3 {
        return PieceModel::Sphere; // collapsed triangle
    }
    let parts = piece.split_at_face(face);
    let models = parts.map(|p| classify_piece(&p, tol));
    combine_split_models(&models)
}

/// Recombination across a collapsed face: all spheres stay a sphere; with at
/// least one rigid part, torus ranks add and every rigid part beyond the
/// first contributes one extra circle (its spin about the common line).
fn combine_split_models(models: &[PieceModel]) -> PieceModel {
    let rigid = models
        .iter()
        .filter(|m| matches!(m, PieceModel::Rigid { .. }))
        .count();
    if rigid == 0 {
        return PieceModel::Sphere;
    }
    let rank_sum: usize = models
        .iter()
        .map(|m| match m {
            PieceModel::Rigid { torus_rank } => *torus_rank,
            PieceModel::Sphere => 0,
        })
        .sum();
    PieceModel::Rigid {
        torus_rank: rank_sum + rigid - 1,
    }
}

/// Wedge decomposition at vanishing diagonals, in combinatorial form.
fn wedge_pieces(sys: &BendingSystem, c: &FiberValue, tol: &Tolerances) -> Vec<LengthPiece> {
    let scale = sys.lengths().perimeter();
    let mut queue = vec![LengthPiece::from_fiber(sys, c)];
    let mut done = Vec::new();
    while let Some(piece) = queue.pop() {
        match piece
            .chords
            .iter()
            .position(|ch| is_zero_len(ch.len, scale, tol))
        {
            Some(idx) => {
                let (a, b) = piece.cut_at(idx);
                queue.push(a);
                queue.push(b);
            }
            None => done.push(piece),
        }
    }
    // Deterministic order: by smallest ambient edge index.
    done.sort_by_key(|p| {
        p.sides
            .iter()
            .filter_map(|s| s.orig)
            .min()
            .unwrap_or(usize::MAX)
    });
    done
}

/// Classify the fiber over `c` into its homogeneous model.
pub fn classify_fiber(
    sys: &BendingSystem,
    c: &FiberValue,
    tol: &Tolerances,
) -> Result<FiberModel, FiberError> {
    sys.fiber_feasible(c, tol)?;
    let n = sys.n();
    let pieces_raw = wedge_pieces(sys, c, tol);
    let mut pieces = Vec::with_capacity(pieces_raw.len());
    let (mut p, mut q, mut k) = (0usize, 0usize, 0usize);
    let mut all_pieces_full = true;
    for piece in &pieces_raw {
        let model = classify_piece(piece, tol);
        match model {
            PieceModel::Sphere => k += 1,
            PieceModel::Rigid { torus_rank } => {
                p += 1;
                q += torus_rank;
            }
        }
        // A piece is "full" when its model dimension equals its side count:
        // digons, nondegenerate triangles, regular pieces.
        all_pieces_full &= model.dim() == piece.m();
        let mut edges: Vec<usize> = piece.sides.iter().filter_map(|s| s.orig).collect();
        edges.sort_unstable();
        pieces.push(WedgePiece { edges, model });
    }
    let fiber_type = if p >= 1 { FiberType::I } else { FiberType::II };
    let dim_total = 3 * p + q + 2 * k;
    let dim_quotient = match fiber_type {
        FiberType::I => 3 * (p - 1) + q + 2 * k,
        FiberType::II => (2 * k).saturating_sub(3),
    };
    let lagrangian = fiber_type == FiberType::I && dim_quotient == n - 3;
    debug_assert_eq!(
        lagrangian,
        fiber_type == FiberType::I && all_pieces_full,
        "dimension count and piece-kind characterization must agree"
    );
    Ok(FiberModel {
        p,
        q,
        k,
        fiber_type,
        lagrangian,
        dim_total,
        dim_quotient,
        pieces,
    })
}

// ---------------------------------------------------------------------------
// Tangent generators, rank, and isotropy certification
// ---------------------------------------------------------------------------

/// A spanning family for the tangent space of the fiber through `u`: all
/// `n − 3` bending fields (vanishing ones included) plus, for each wedge
/// piece, the three rotation fields of that piece about the coordinate axes.
pub fn tangent_generators(
    sys: &BendingSystem,
    u: &Polygon,
    c: &FiberValue,
    tol: &Tolerances,
) -> Result<Vec<TangentVector>, FiberError> {
    let measured = sys.momentum(u)?;
    let scale = sys.lengths().perimeter();
    for k in 0..c.len() {
        let defect = (measured[k] - c[k]).abs();
        if defect > 1e-8 * scale * scale {
            return Err(FiberError::NotOnFiber { index: k, defect });
        }
    }
    let mut gens = Vec::new();
    for k in 0..sys.diagonals().len() {
        gens.push(sys.bending_field(u, k)?);
    }
    for piece in wedge_pieces(sys, c, tol) {
        let edges: Vec<usize> = piece.sides.iter().filter_map(|s| s.orig).collect();
        for axis in BASIS {
            let mut comps = vec![Vec3::default(); u.n()];
            for &e in &edges {
                comps[e] = axis.cross(u.edge(e));
            }
            gens.push(TangentVector::from_components(comps));
        }
    }
    Ok(gens)
}

/// Numerical rank of a family of tangent vectors: singular values below
/// `tol.rank` times the largest count as zero.
pub fn generator_rank(gens: &[TangentVector], tol: &Tolerances) -> usize {
    let svs = singular_values(gens);
    let smax = svs.iter().fold(0.0_f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return 0;
    }
    svs.iter().filter(|&&s| s > tol.rank * smax).count()
}

/// Numerical rank against an external reference scale, for families whose
/// members may all be near zero (for instance, horizontally projected
/// bending fields at a singular point). Singular values below
/// `tol.rank · reference` count as zero.
pub fn rank_with_reference(gens: &[TangentVector], reference: f64, tol: &Tolerances) -> usize {
    if reference <= 0.0 {
        return 0;
    }
    singular_values(gens)
        .iter()
        .filter(|&&s| s > tol.rank * reference)
        .count()
}

fn singular_values(gens: &[TangentVector]) -> Vec<f64> {
    if gens.is_empty() {
        return Vec::new();
    }
    let cols = gens[0].components().len() * 3;
    let mat = nalgebra::DMatrix::from_fn(gens.len(), cols, |r, c| {
        let v = gens[r].component(c / 3);
        [v.x, v.y, v.z][c % 3]
    });
    mat.svd(false, false).singular_values.as_slice().to_vec()
}

/// Per-sample record of an isotropy certification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleCertificate {
    pub max_omega: f64,
    pub rank: usize,
}

/// Certification that the symplectic form vanishes on the span of the
/// tangent generators along a fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub c: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub per_sample: Vec<SampleCertificate>,
    /// Maximum `|ω(ĝ_i, ĝ_j)|` over all sampled pairs of unit-metric-length
    /// generators.
    pub max_omega: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Sample the fiber and evaluate `ω` on every pair of metric-normalized
/// tangent generators; PASS when the maximum stays below `tol.isotropy`.
pub fn certify_isotropy(
    sys: &BendingSystem,
    c: &FiberValue,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<IsotropyReport, FiberError> {
    let polys = sys.sample_fiber(c, samples, seed)?;
    let mut per_sample = Vec::with_capacity(polys.len());
    let mut max_omega = 0.0_f64;
    for u in &polys {
        let gens = tangent_generators(sys, u, c, tol)?;
        let rank = generator_rank(&gens, tol);
        let normalized: Vec<TangentVector> = gens
            .iter()
            .filter_map(|g| {
                let norm = g.metric_norm(u.lengths());
                (norm > 1e-12 * sys.lengths().perimeter()).then(|| g.scaled(1.0 / norm))
            })
            .collect();
        let mut local = 0.0_f64;
        for i in 0..normalized.len() {
            for j in (i + 1)..normalized.len() {
                local = local.max(omega_unchecked(u, &normalized[i], &normalized[j]).abs());
            }
        }
        max_omega = max_omega.max(local);
        per_sample.push(SampleCertificate {
            max_omega: local,
            rank,
        });
    }
    Ok(IsotropyReport {
        c: c.as_slice().to_vec(),
        seed,
        samples,
        per_sample,
        max_omega,
        threshold: tol.isotropy,
        pass: max_omega < tol.isotropy,
    })
}

// ---------------------------------------------------------------------------
// Approximation constructions
// ---------------------------------------------------------------------------

/// Open a collapsed face by nudging its middle vertex off the common line.
///
/// For the face `(i, j, k)`, the edges into and out of vertex `j` are
/// replaced by `(r_{j−1} u^{j−1} + t x)/‖·‖` and `(r_j u^j − t x)/‖·‖`, with
/// `x` a unit vector orthogonal to the chord from `i` to `j`, and the two
/// side lengths pick up the corresponding norms. The result is a closed
/// polygon with the perturbed side lengths on which the face is opened for
/// `t ≠ 0`; previously open faces stay open for small `t`, and both the
/// polygon and its side lengths converge back as `t → 0`.
pub fn perturb_open_face(
    sys: &BendingSystem,
    u: &Polygon,
    face: Face,
    t: f64,
) -> Result<(Polygon, crate::polyspace::SideLengths), FiberError> {
    let tol = Tolerances::default();
    if !sys.faces().contains(&face) {
        return Err(FiberError::FaceNotAdapted(face));
    }
    let n = sys.n();
    let scale = sys.lengths().perimeter();
    let d_ij = u.diagonal(IndexPair::new(face.i, face.j, n).unwrap());
    let d_jk = u.diagonal(IndexPair::new(face.j, face.k, n).unwrap());
    if d_ij.norm() <= tol.len_zero * scale {
        return Err(FiberError::ZeroDiagonal(face.i, face.j));
    }
    if d_ij.cross(d_jk).norm() > 1e-8 * scale * scale {
        return Err(FiberError::FaceNotDegenerate(face));
    }
    let x = d_ij.any_unit_normal();
    let j = face.j;
    let prev = u.edge(j - 1) * u.lengths()[j - 1] + x * t;
    let next = u.edge(j) * u.lengths()[j] - x * t;
    let mut edges: Vec<Vec3> = u.edges().to_vec();
    let mut lens: Vec<f64> = u.lengths().as_slice().to_vec();
    lens[j - 1] = prev.norm();
    lens[j] = next.norm();
    edges[j - 1] = prev * (1.0 / lens[j - 1]);
    edges[j] = next * (1.0 / lens[j]);
    let lengths = crate::polyspace::SideLengths::new(lens).map_err(BendingError::Polygon)?;
    let moved = Polygon::new(edges, lengths.clone(), &tol).map_err(BendingError::Polygon)?;
    Ok((moved, lengths))
}

/// Re-open a vanishing diagonal by bending along a chord that crosses it.
///
/// Walks the adapted faces adjacent to the vanishing diagonal `k` to locate
/// a vertex `k1` strictly between its endpoints and a vertex `k2` outside
/// with the connecting chords not forced to vanish, then rotates the edges
/// from `k1` to `k2` (cyclically) about the chord between them by angle `t`.
/// Side lengths are unchanged; diagonal `k` has positive length for small
/// `t ≠ 0`, at a linear rate, and every nonvanishing diagonal stays
/// nonvanishing.
pub fn perturb_vanishing_diagonal(
    sys: &BendingSystem,
    u: &Polygon,
    k: usize,
    t: f64,
) -> Result<Polygon, FiberError> {
    let tol = Tolerances::default();
    let scale = sys.lengths().perimeter();
    let pair = *sys.diagonals().get(k).ok_or(FiberError::Bending(
        BendingError::DiagonalIndexOutOfRange { index: k, count: sys.diagonals().len() },
    ))?;
    let d = u.diagonal(pair);
    if d.norm() > tol.len_zero * scale {
        return Err(FiberError::DiagonalNotVanishing(k));
    }
    let (a, b) = (pair.a(), pair.b());
    let faces = sys.faces();
    let apex = |fi: usize, x: usize, y: usize| {
        let f = faces[fi];
        [f.i, f.j, f.k]
            .into_iter()
            .find(|&v| v != x && v != y)
            .unwrap()
    };
    let [inside_face, outside_face] = sys.diagonal_set().adjacent_faces(k);
    let k1 = apex(inside_face, a, b);

    // Walk outward across vanishing chords until the chord from b to the
    // candidate apex has positive length at u.
    let mut cur_face = outside_face;
    let mut cand = apex(cur_face, a, b);
    loop {
        let len = u.diagonal_cyclic(b, cand).norm();
        if len > tol.len_zero * scale {
            break;
        }
        let here = cur_face;
        let next_face = faces
            .iter()
            .enumerate()
            .position(|(fi, f)| {
                let vs = [f.i, f.j, f.k];
                fi != here && vs.contains(&b) && vs.contains(&cand)
            })
            .ok_or(FiberError::NotInDenseSet(k1, b, cand))?;
        cur_face = next_face;
        cand = apex(cur_face, b, cand);
    }
    let k2 = cand;

    // Dense-set condition: the chords from k1 to b and from b to k2 must
    // not be collinear at u, otherwise this bending fixes the diagonal.
    let d1 = u.diagonal_cyclic(k1, b);
    let d2 = u.diagonal_cyclic(b, k2);
    if d1.cross(d2).norm() <= 1e-10 * scale * scale {
        return Err(FiberError::NotInDenseSet(k1, b, k2));
    }
    let axis = u.diagonal_cyclic(k1, k2);
    Ok(crate::bending::rotate_edge_range(u, k1, k2, axis, t))
}

/// Seeded fiber samples together with their tangent-generator ranks.
pub fn sampled_ranks(
    sys: &BendingSystem,
    c: &FiberValue,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<usize>, FiberError> {
    let polys = sys.sample_fiber(c, samples, mix_seed(seed, 0x5eed))?;
    polys
        .iter()
        .map(|u| Ok(generator_rank(&tangent_generators(sys, u, c, tol)?, tol)))
        .collect()
}
