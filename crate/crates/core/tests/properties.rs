//! Property-based invariants for the geometry kernel and the polygon
//! spaces, on proptest-generated inputs.

use polybend::bending::{circle_distance, BendingSystem, DiagonalSet, FiberValue};
use polybend::geom::{det3, rotate, Quaternion, Rotation, Vec3, BASIS, E1};
use polybend::polyspace::{
    align_canonical, horizontal_project, metric_dot, omega, orbit_tangent, stratum_of, Polygon,
    SideLengths, Stratum, TangentVector,
};
use polybend::verify::random_polygon;
use polybend::Tolerances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn unit_vector() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter_map("nonzero", |(x, y, z)| Vec3::new(x, y, z).normalized(0.2))
}

fn small_vector() -> impl Strategy<Value = Vec3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn quaternion() -> impl Strategy<Value = Quaternion> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_filter_map(
        "nonzero",
        |(a, b, c, d)| {
            let q = Quaternion::new(a, b, c, d);
            (q.norm() > 0.2).then_some(q)
        },
    )
}

proptest! {
    /// Rotations preserve inner products and norms.
    #[test]
    fn rotations_are_isometries(axis in unit_vector(), t in angle(), u in small_vector(), v in small_vector()) {
        let r = Rotation::from_axis_angle(axis, t).unwrap();
        let (ru, rv) = (rotate(r, u), rotate(r, v));
        prop_assert!((ru.dot(rv) - u.dot(v)).abs() < 1e-12 * (1.0 + u.norm() * v.norm()));
        prop_assert!((ru.norm() - u.norm()).abs() < 1e-12 * (1.0 + u.norm()));
    }

    /// Applying two rotations in sequence equals applying the composition.
    #[test]
    fn rotation_composition(a in unit_vector(), s in angle(), b in unit_vector(), t in angle(), v in small_vector()) {
        let r1 = Rotation::from_axis_angle(a, s).unwrap();
        let r2 = Rotation::from_axis_angle(b, t).unwrap();
        let seq = r1.apply(r2.apply(v));
        let composed = r1.compose(r2).apply(v);
        prop_assert!((seq - composed).norm() < 1e-12 * (1.0 + v.norm()));
    }

    /// Quaternion multiplication is associative and norm-multiplicative.
    #[test]
    fn quaternion_algebra(p in quaternion(), q in quaternion(), r in quaternion()) {
        let left = (p * q) * r;
        let right = p * (q * r);
        let scale = p.norm() * q.norm() * r.norm();
        prop_assert!((left.re - right.re).abs() < 1e-12 * scale);
        prop_assert!((left.imag() - right.imag()).norm() < 1e-12 * scale);
        prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() < 1e-12 * scale);
    }

    /// Conjugation compatibility: (qP)̄ i (qP) = P⁻¹ (q̄ i q) P for unit P.
    #[test]
    fn conjugation_equivariance(q in quaternion(), p in quaternion()) {
        let p = p.normalized();
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let phi = |x: Quaternion| x.conjugate() * i * x;
        let lhs = phi(q * p);
        let rhs = p.inverse() * phi(q) * p;
        let scale = 1.0 + q.norm_sq();
        prop_assert!((lhs.re - rhs.re).abs() < 1e-12 * scale);
        prop_assert!((lhs.imag() - rhs.imag()).norm() < 1e-12 * scale);
    }
}

fn seeded_polygon(n: usize, seed: u64) -> Polygon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_polygon(n, &mut rng)
}

/// A random tangent vector: project per-edge noise onto the edge normals,
/// then cancel the weighted sum inside the per-edge normal planes.
fn seeded_tangent(u: &Polygon, seed: u64) -> TangentVector {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = u.n();
    let mut comps: Vec<Vec3> = (0..n)
        .map(|i| {
            let raw = Vec3::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            let e = u.edge(i);
            raw - e * raw.dot(e)
        })
        .collect();
    // Solve M v = Σ r_i X^i with M = Σ r_i (I − u^i u^iᵀ), then subtract
    // the correction field v − ⟨v, u^i⟩ u^i, which stays edge-orthogonal.
    let mut m = nalgebra::Matrix3::zeros();
    let mut s = nalgebra::Vector3::zeros();
    for i in 0..n {
        let r = u.lengths()[i];
        let e = u.edge(i);
        let en = nalgebra::Vector3::new(e.x, e.y, e.z);
        m += r * (nalgebra::Matrix3::identity() - en * en.transpose());
        let x = comps[i];
        s += r * nalgebra::Vector3::new(x.x, x.y, x.z);
    }
    let v = m.svd(true, true).solve(&s, 1e-12).expect("pseudo-solve");
    let v = Vec3::new(v[0], v[1], v[2]);
    for (i, c) in comps.iter_mut().enumerate() {
        let e = u.edge(i);
        *c -= v - e * v.dot(e);
    }
    TangentVector::from_components(comps)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The symplectic pairing is antisymmetric and bilinear, and rotation
    /// fields lie in its kernel against every tangent vector (the polygon
    /// spaces sit at the zero level of the rotation momentum).
    #[test]
    fn omega_properties(n in 4usize..8, seed in 0u64..1000, scale in -3.0..3.0f64) {
        let tol = Tolerances::default();
        let u = seeded_polygon(n, seed);
        let x = seeded_tangent(&u, seed ^ 0xAAAA);
        let y = seeded_tangent(&u, seed ^ 0x5555);
        let xy = omega(&u, &x, &y, &tol).unwrap();
        let yx = omega(&u, &y, &x, &tol).unwrap();
        prop_assert!((xy + yx).abs() < 1e-12 * (1.0 + xy.abs()));
        let scaled = omega(&u, &x.scaled(scale), &y, &tol).unwrap();
        prop_assert!((scaled - scale * xy).abs() < 1e-10 * (1.0 + xy.abs()) * (1.0 + scale.abs()));
        let spin = orbit_tangent(&u, Vec3::new(0.4, -0.9, 0.2));
        let against_orbit = omega(&u, &spin, &x, &tol).unwrap();
        prop_assert!(against_orbit.abs() < 1e-10 * u.lengths().perimeter().powi(2));
    }

    /// Horizontal projection is idempotent and lands orthogonal to every
    /// rotation generator.
    #[test]
    fn horizontal_projection_properties(n in 4usize..8, seed in 0u64..1000) {
        let u = seeded_polygon(n, seed);
        let x = seeded_tangent(&u, seed ^ 0x1234);
        let h1 = horizontal_project(&u, &x);
        let h2 = horizontal_project(&u, &h1);
        let scale = x.metric_norm(u.lengths()).max(1.0);
        prop_assert!((&h1 - &h2).metric_norm(u.lengths()) < 1e-10 * scale);
        for e in BASIS {
            let g = orbit_tangent(&u, e);
            prop_assert!(metric_dot(&h1, &g, u.lengths()).abs() < 1e-10 * scale * u.lengths().perimeter());
        }
    }

    /// Canonical representatives are constant on rotation orbits and
    /// preserve the closing defect; strata are rotation-invariant.
    #[test]
    fn canonical_alignment_properties(n in 4usize..8, seed in 0u64..1000, axis in unit_vector(), t in angle()) {
        let tol = Tolerances::default();
        let u = seeded_polygon(n, seed);
        let rot = Rotation::from_axis_angle(axis, t).unwrap();
        let v = u.rotated(rot);
        let (cu, cv) = (align_canonical(&u, &tol), align_canonical(&v, &tol));
        prop_assert!(cu.edge_distance(&cv) < 1e-10);
        prop_assert!((cu.closing_defect() - u.closing_defect()).abs() < 1e-12 * u.lengths().perimeter());
        prop_assert_eq!(
            matches!(stratum_of(&u, &tol), Stratum::Nondegenerate),
            matches!(stratum_of(&v, &tol), Stratum::Nondegenerate)
        );
    }

    /// Flow invariance of every momentum component on random fibers and
    /// random diagonals, for the Hamiltonian and normalized flows alike.
    #[test]
    fn flow_preserves_momenta(n in 4usize..8, seed in 0u64..500, t in angle(), normalized in any::<bool>()) {
        let u = seeded_polygon(n, seed);
        let sys = BendingSystem::new(u.lengths().clone(), DiagonalSet::caterpillar(n).unwrap()).unwrap();
        let before = sys.momentum(&u).unwrap();
        for k in 0..n - 3 {
            let Ok(moved) = sys.flow(&u, k, t, normalized) else { continue };
            let after = sys.momentum(&moved).unwrap();
            for m in 0..n - 3 {
                prop_assert!((after[m] - before[m]).abs() < 1e-10 * before[m].max(1.0));
            }
        }
    }

    /// The bending field is Hamiltonian for its momentum against arbitrary
    /// tangent directions: the derivative of F_k along any tangent curve
    /// with velocity Y equals ω(X_k, Y).
    #[test]
    fn bending_field_is_hamiltonian(n in 4usize..8, seed in 0u64..500) {
        let u = seeded_polygon(n, seed);
        let sys = BendingSystem::new(u.lengths().clone(), DiagonalSet::caterpillar(n).unwrap())
            .unwrap();
        let y = seeded_tangent(&u, seed ^ 0xFEED);
        // Curve through u with velocity Y: renormalized per-edge translate.
        // Its edges leave the unit sphere only at second order.
        let at = |s: f64| -> Vec<Vec3> {
            (0..n)
                .map(|i| {
                    let e = u.edge(i) + y.component(i) * s;
                    e * (1.0 / e.norm())
                })
                .collect()
        };
        let momentum_of = |edges: &[Vec3], a: usize, b: usize| -> f64 {
            let mut d = Vec3::default();
            for i in a..b {
                d += edges[i] * u.lengths()[i];
            }
            0.5 * d.norm_sq()
        };
        let h = 1e-6;
        for (k, pair) in sys.diagonals().iter().enumerate() {
            let fd = (momentum_of(&at(h), pair.a(), pair.b())
                - momentum_of(&at(-h), pair.a(), pair.b()))
                / (2.0 * h);
            let x = sys.bending_field(&u, k).unwrap();
            let pairing = polybend::polyspace::omega_unchecked(&u, &x, &y);
            let scale = 1.0 + pairing.abs();
            prop_assert!((fd - pairing).abs() < 1e-6 * scale, "k={k}: fd={fd} omega={pairing}");
        }
    }

    /// Round trip through build: prescribed angles on a grid of the torus
    /// are measured back, and the built polygon lies on the fiber.
    #[test]
    fn build_measures_back(i in 0usize..5, j in 0usize..5, l1 in 0.4..1.8f64, l2 in 0.4..1.8f64) {
        let sys = BendingSystem::new(
            SideLengths::new(vec![1.0; 5]).unwrap(),
            DiagonalSet::caterpillar(5).unwrap(),
        )
        .unwrap();
        let c = FiberValue::from_lengths(&[l1, l2]).unwrap();
        let tol = Tolerances::default();
        if sys.fiber_feasible(&c, &tol).is_err() {
            return Ok(());
        }
        // Stay off the collapsed-face boundary so angles are well-defined.
        let statuses = polybend::fibers::face_statuses(&sys, &c, &tol).unwrap();
        let open = statuses.iter().all(|s| {
            let [a, b, cc] = s.lengths;
            (a + b - cc).min(b + cc - a).min(a + cc - b) > 0.05
        });
        if !open {
            return Ok(());
        }
        let angles = [TAU * (i as f64) / 5.0, TAU * (j as f64) / 5.0];
        let u = sys.build_polygon(&c, &angles).unwrap();
        let aa = sys.action_angle(&u).unwrap();
        for k in 0..2 {
            prop_assert!(circle_distance(aa.angles[k], angles[k]) < 1e-8);
        }
        let back = sys.momentum(&u).unwrap();
        prop_assert!((back[0] - c[0]).abs() < 1e-10 && (back[1] - c[1]).abs() < 1e-10);
    }
}

/// On a lined polygon the averaging of any tangent vector over the axial
/// rotation circle is the zero field: no tangent direction is fixed by the
/// isotropy group.
#[test]
fn axial_average_of_tangents_vanishes_on_lined_polygons() {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20 {
        // Random lined hexagon with balanced signs.
        let dir = polybend::bending::random_unit(&mut rng);
        let signs = [1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let edges: Vec<Vec3> = signs.iter().map(|&s| dir * s).collect();
        let u = Polygon::new(edges, SideLengths::new(vec![1.0; 6]).unwrap(), &tol).unwrap();
        assert!(matches!(stratum_of(&u, &tol), Stratum::Degenerate { .. }));

        // Random tangent: per-edge vectors in the normal plane of the line,
        // with the weighted mean removed to restore infinitesimal closing.
        let mut comps: Vec<Vec3> = (0..6)
            .map(|_| {
                let raw = Vec3::new(
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                );
                raw - dir * raw.dot(dir)
            })
            .collect();
        let mean = comps.iter().fold(Vec3::default(), |a, &b| a + b) * (1.0 / 6.0);
        comps.iter_mut().for_each(|c| *c -= mean);
        let x = TangentVector::from_components(comps);
        x.validate_at(&u, &tol).unwrap();

        // Average over an equispaced grid of rotations about the line; the
        // grid sum of each Fourier mode cancels exactly.
        let steps = 64;
        let mut acc = vec![Vec3::default(); 6];
        for s in 0..steps {
            let rot = Rotation::about_axis_unchecked(dir, TAU * (s as f64) / (steps as f64));
            for (a, c) in acc.iter_mut().zip(x.components()) {
                *a += rot.apply(*c);
            }
        }
        let max = acc
            .iter()
            .map(|a| (*a * (1.0 / steps as f64)).norm())
            .fold(0.0_f64, f64::max);
        assert!(max < 1e-9, "trial {trial}: averaged field has norm {max}");
    }
}

/// Classification-sampling consistency up to n = 7: on a coarse grid of
/// fiber values, the rank of the tangent generators at sampled polygons
/// equals the classified model dimension.
#[test]
fn rank_matches_model_dimension_up_to_n7() {
    use polybend::fibers::{classify_fiber, sampled_ranks};
    use polybend::verify::{fiber_grid, grid_side_lengths};
    let tol = Tolerances::default();
    let mut fibers = 0;
    for n in 4..=7 {
        let grid_points = if n <= 5 { 7 } else { 4 };
        for r in grid_side_lengths(n) {
            let sys = BendingSystem::new(r, DiagonalSet::caterpillar(n).unwrap()).unwrap();
            for c in fiber_grid(&sys, grid_points, &tol) {
                fibers += 1;
                let model = classify_fiber(&sys, &c, &tol).unwrap();
                for (i, rank) in sampled_ranks(&sys, &c, 10, 7, &tol)
                    .unwrap()
                    .iter()
                    .enumerate()
                {
                    assert_eq!(
                        *rank,
                        model.dim_total,
                        "n={n} c={:?} sample {i}",
                        c.as_slice()
                    );
                }
            }
        }
    }
    assert!(fibers > 200, "coarse grids cover {fibers} fibers");
}

/// The same consistency over every triangulation of the n-gon for n ≤ 6,
/// isotropy certificates included: the classification recursion must not
/// depend on the caterpillar layout.
#[test]
fn all_triangulations_rank_and_isotropy_consistency() {
    use polybend::fibers::{certify_isotropy, classify_fiber, sampled_ranks};
    use polybend::verify::{fiber_grid, grid_side_lengths};
    let tol = Tolerances::default();
    let mut fibers = 0;
    let mut worst_omega = 0.0_f64;
    for n in 4..=6 {
        for tri in DiagonalSet::enumerate_all(n).unwrap() {
            for r in grid_side_lengths(n) {
                let sys = BendingSystem::new(r.clone(), tri.clone()).unwrap();
                let points = if n == 6 { 4 } else { 6 };
                for c in fiber_grid(&sys, points, &tol) {
                    fibers += 1;
                    let model = classify_fiber(&sys, &c, &tol).unwrap();
                    for (i, rank) in sampled_ranks(&sys, &c, 6, 99, &tol)
                        .unwrap()
                        .iter()
                        .enumerate()
                    {
                        assert_eq!(
                            *rank,
                            model.dim_total,
                            "n={n} tri={:?} r={:?} c={:?} sample {i}",
                            tri.diagonals(),
                            r.as_slice(),
                            c.as_slice()
                        );
                    }
                    let cert = certify_isotropy(&sys, &c, 6, 5, &tol).unwrap();
                    assert!(
                        cert.pass,
                        "n={n} tri={:?} c={:?}: max omega {}",
                        tri.diagonals(),
                        c.as_slice(),
                        cert.max_omega
                    );
                    worst_omega = worst_omega.max(cert.max_omega);
                }
            }
        }
    }
    println!("{fibers} fibers over all triangulations, worst omega {worst_omega:.3e}");
    assert!(fibers > 400);
}

/// Orbit fields evaluate to the hand cross products on the axis-aligned
/// square, and the zero vector gives the zero field.
#[test]
fn orbit_field_hand_values() {
    let tol = Tolerances::default();
    let u = Polygon::new(
        vec![E1, BASIS[1], -E1, -BASIS[1]],
        SideLengths::new(vec![1.0; 4]).unwrap(),
        &tol,
    )
    .unwrap();
    let x = orbit_tangent(&u, BASIS[2]);
    assert!((x.component(0) - BASIS[1]).norm() < 1e-15); // e3 × e1 = e2
    assert!((x.component(1) + E1).norm() < 1e-15); // e3 × e2 = −e1
    let zero = orbit_tangent(&u, Vec3::default());
    assert!(zero.components().iter().all(|c| c.norm() == 0.0));
    // det3 orientation sanity: det(e1, e2, e3) = 1.
    assert_eq!(det3(E1, BASIS[1], BASIS[2]), 1.0);
}
