//! Acceptance suite: one test per structural criterion, each printing a
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Thresholds are pinned here, not configurable: these are the exit gates.

use polybend::bending::{BendingSystem, DiagonalSet, FiberValue};
use polybend::fibers::{
    certify_isotropy, classify_fiber, generator_rank, sampled_ranks, tangent_generators,
    vanishing_diagonals, FiberType,
};
use polybend::grassmann::{fiber_graph, gc_pattern, TwoFrame};
use polybend::polyspace::SideLengths;
use polybend::verify::{fiber_grid, grid_side_lengths, run_suite, RunConfig, Suite, SuiteReport};
use polybend::Tolerances;

fn gate(criterion: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "[criterion {criterion:02}] {} — {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn config(samples: usize, ns: &[usize]) -> RunConfig {
    RunConfig {
        seed: 0x0B5E55ED,
        samples,
        grid: 9,
        ns: ns.to_vec(),
        tolerances: Tolerances::default(),
    }
}

fn check(report: &SuiteReport, name_prefix: &str) -> (bool, String) {
    let found = report
        .checks
        .iter()
        .find(|c| c.name.starts_with(name_prefix))
        .unwrap_or_else(|| panic!("no check named '{name_prefix}*' in suite {}", report.suite));
    let detail = format!(
        "max residual {:.3e} (threshold {:.0e}) over {} items{}",
        found.max_residual,
        found.threshold,
        found.items,
        found
            .counterexample
            .as_deref()
            .map(|e| format!("; counterexample: {e}"))
            .unwrap_or_default()
    );
    (found.pass, detail)
}

fn unit_system(n: usize) -> BendingSystem {
    BendingSystem::new(
        SideLengths::new(vec![1.0; n]).unwrap(),
        DiagonalSet::caterpillar(n).unwrap(),
    )
    .unwrap()
}

fn fv(lens: &[f64]) -> FiberValue {
    FiberValue::from_lengths(lens).unwrap()
}

/// The named singular cases beyond the grids: square fibers at ℓ ∈ {0, √2, 2},
/// pentagon wedge/collapse cases, hexagon double wedge.
fn named_fibers() -> Vec<(BendingSystem, FiberValue)> {
    vec![
        (unit_system(4), fv(&[0.0])),
        (unit_system(4), fv(&[2.0_f64.sqrt()])),
        (unit_system(4), fv(&[2.0])),
        (unit_system(5), fv(&[0.0, 1.0])),
        (unit_system(5), fv(&[2.0, 1.5])),
        (unit_system(5), fv(&[1.0, 0.0])),
        (unit_system(6), fv(&[1.0, 0.0, 1.0])),
        (unit_system(6), fv(&[0.0, 1.0, 0.0])),
    ]
}

#[test]
fn c01_poisson_commutativity() {
    let start = std::time::Instant::now();
    let report = run_suite(Suite::Poisson, &config(1000, &[4, 5, 6, 7, 8]));
    let elapsed = start.elapsed().as_secs_f64();
    let (catalan_ok, catalan_detail) = check(&report, "triangulation enumeration");
    gate(
        1,
        "triangulation count equals the Catalan numbers",
        catalan_ok,
        &catalan_detail,
    );
    let (ok, detail) = check(&report, "pairwise brackets vanish");
    gate(1, "Poisson-commutativity |bracket| < 1e-9", ok, &detail);
    gate(
        1,
        "runtime target under 60 s",
        elapsed < 60.0,
        &format!("{elapsed:.1}s"),
    );
}

#[test]
fn c02_flow_exactness() {
    let report = run_suite(Suite::Flow, &config(200, &[4, 5, 6, 7, 8]));
    let (ok, detail) = check(&report, "momentum drift");
    gate(
        2,
        "momentum invariance under composed flows of 100π",
        ok,
        &detail,
    );
    let (ok, detail) = check(&report, "closing defect");
    gate(2, "closing defect < 1e-12 throughout", ok, &detail);
    let (ok, detail) = check(&report, "normalized flow is 2π-periodic");
    gate(2, "periodicity of the normalized flow < 1e-10", ok, &detail);
}

#[test]
fn c03_action_angle_contract() {
    let report = run_suite(Suite::Flow, &config(200, &[4, 5, 6, 7, 8]));
    let (ok, detail) = check(&report, "normalized flow advances its angle");
    gate(
        3,
        "flows advance angles at unit rate, fixing the rest, < 1e-8",
        ok,
        &detail,
    );
}

#[test]
fn c04_singularity_criterion() {
    let report = run_suite(Suite::Isotropy, &config(20, &[4, 5]));
    let (ok, detail) = check(&report, "face-degeneracy criterion");
    gate(
        4,
        "face criterion agrees with the projected-rank test on the n = 4, 5 grids",
        ok,
        &detail,
    );
}

#[test]
fn c05_fiber_structure_rank() {
    let report = run_suite(Suite::Isotropy, &config(20, &[4, 5]));
    let (ok, detail) = check(&report, "generator rank equals");
    gate(
        5,
        "generator rank equals model dimension on the grids",
        ok,
        &detail,
    );

    let tol = Tolerances::default();
    let mut worst: Option<String> = None;
    let mut fibers = 0;
    for (sys, c) in named_fibers() {
        let model = classify_fiber(&sys, &c, &tol).unwrap();
        fibers += 1;
        for (i, rank) in sampled_ranks(&sys, &c, 10, 17, &tol)
            .unwrap()
            .iter()
            .enumerate()
        {
            if *rank != model.dim_total {
                worst.get_or_insert(format!(
                    "n={} c={:?} sample {i}: rank {rank} vs dim {}",
                    sys.n(),
                    c.as_slice(),
                    model.dim_total
                ));
            }
        }
    }
    gate(
        5,
        "generator rank equals model dimension on the named degenerate fibers",
        worst.is_none(),
        &worst.unwrap_or_else(|| format!("{fibers} fibers, 10 samples each")),
    );
}

#[test]
fn c06_isotropy_of_singular_fibers() {
    let report = run_suite(Suite::Isotropy, &config(20, &[4, 5]));
    let (ok, detail) = check(&report, "isotropy: max");
    gate(6, "normalized |omega| < 1e-8 across the grids", ok, &detail);

    let tol = Tolerances::default();
    let mut max = 0.0_f64;
    let mut all_pass = true;
    for (sys, c) in named_fibers() {
        let cert = certify_isotropy(&sys, &c, 20, 23, &tol).unwrap();
        max = max.max(cert.max_omega);
        all_pass &= cert.pass;
    }
    gate(
        6,
        "isotropy certificates on the named singular fibers (20 samples each)",
        all_pass,
        &format!("max |omega| = {max:.3e}"),
    );
}

#[test]
fn c07_lagrangian_corollary() {
    let report = run_suite(Suite::Isotropy, &config(20, &[4, 5]));
    let (ok, detail) = check(&report, "Lagrangian flag");
    gate(
        7,
        "Lagrangian flag equals the rank-derived flag on the grids",
        ok,
        &detail,
    );

    let tol = Tolerances::default();
    // Positive: a regular fiber and the hexagon wedge of two nondegenerate
    // triangles; negative: the pentagon with a collapsed (1,1,2) piece.
    let cases = [
        (unit_system(5), fv(&[1.2, 1.4]), true, (1, 2, 0)),
        (unit_system(6), fv(&[1.0, 0.0, 1.0]), true, (2, 0, 0)),
        (unit_system(5), fv(&[2.0, 1.5]), false, (1, 1, 0)),
    ];
    for (sys, c, expect_lagrangian, expect_pqk) in cases {
        let n = sys.n();
        let model = classify_fiber(&sys, &c, &tol).unwrap();
        assert_eq!(
            (model.p, model.q, model.k),
            expect_pqk,
            "c={:?}",
            c.as_slice()
        );
        let u = sys.sample_fiber(&c, 1, 5).unwrap().remove(0);
        let rank = generator_rank(&tangent_generators(&sys, &u, &c, &tol).unwrap(), &tol);
        let by_rank = model.fiber_type == FiberType::I && rank - 3 == n - 3;
        gate(
            7,
            "Lagrangian flag on the named cases",
            model.lagrangian == expect_lagrangian && by_rank == expect_lagrangian,
            &format!(
                "n={n} c={:?}: flag={} rank-derived={} expected={}",
                c.as_slice(),
                model.lagrangian,
                by_rank,
                expect_lagrangian
            ),
        );
    }
}

#[test]
fn c08_grassmann_relation() {
    let report = run_suite(Suite::Grassmann, &config(1000, &[4, 5, 6, 7, 8]));
    let (ok, detail) = check(&report, "second-eigenvalue relation");
    gate(
        8,
        "relation residuals < 1e-10 over 1000 frames per n",
        ok,
        &detail,
    );
    let (ok, detail) = check(&report, "image polygons have perimeter 2");
    gate(8, "perimeter identity < 1e-12", ok, &detail);
    let (ok, detail) = check(&report, "image polygons close");
    gate(8, "closing identity < 1e-12", ok, &detail);
}

#[test]
fn c09_gc_ladder() {
    let report = run_suite(Suite::Gc, &config(1000, &[4, 5, 6, 7, 8]));
    let (ok, detail) = check(&report, "ladder closed-form identities");
    gate(9, "ladder identities < 1e-10 on random frames", ok, &detail);
    let (ok, detail) = check(&report, "interlacing inequalities");
    gate(9, "interlacing < 1e-10 on random frames", ok, &detail);

    // The worked four-coordinate example, Gram matrices checked by hand.
    let c = |x: f64| num_complex::Complex64::new(x, 0.0);
    let frame = TwoFrame::new(vec![c(0.5); 4], vec![c(0.5), c(-0.5), c(0.5), c(-0.5)]).unwrap();
    let pat = gc_pattern(&frame);
    let expect = [
        (1, 1, 0.25),
        (1, 2, 0.25),
        (2, 2, 0.25),
        (1, 4, 0.5),
        (2, 4, 0.5),
    ];
    let worst = expect
        .iter()
        .map(|&(i, k, v)| (pat.entry(i, k) - v).abs())
        .fold(0.0_f64, f64::max);
    gate(
        9,
        "worked example μ₁¹ = ¼, μ₁² = μ₂² = ¼, μᵢ⁴ = ½",
        worst < 1e-12,
        &format!("max deviation {worst:.3e}"),
    );
}

#[test]
fn c10_diamond_equivalence() {
    let report = run_suite(Suite::Gc, &config(50, &[4, 5, 6]));
    let (ok, detail) = check(&report, "diamond flags equal");
    gate(
        10,
        "diamond flags equal the vanishing-diagonal sets (n = 4, 5, 6)",
        ok,
        &detail,
    );

    // Exhaustive cross-check without the suite wrapper, counting fibers.
    let tol = Tolerances::default();
    let mut fibers = 0;
    for n in [4usize, 5, 6] {
        for r in grid_side_lengths(n) {
            let sys = BendingSystem::new(r, DiagonalSet::caterpillar(n).unwrap()).unwrap();
            for c in fiber_grid(&sys, 9, &tol) {
                fibers += 1;
                let graph = fiber_graph(&sys, &c, &tol).unwrap();
                let flags: Vec<usize> = graph
                    .diamonds
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d)
                    .map(|(k, _)| k)
                    .collect();
                assert_eq!(
                    flags,
                    vanishing_diagonals(&sys, &c, &tol),
                    "n={n} c={:?}",
                    c.as_slice()
                );
            }
        }
    }
    gate(
        10,
        "exhaustive grid census",
        fibers > 100,
        &format!("{fibers} feasible fibers checked"),
    );
}
