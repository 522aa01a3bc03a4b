//! Reproducible verification suites with machine-readable reports.
//!
//! Each suite turns one family of structural claims into a batch of seeded
//! numerical checks and reports the worst residual per check together with a
//! reproducer string for the first counterexample. Suites are deterministic
//! under `(parameters, seed)` regardless of thread count: work items are
//! enumerated in a fixed order, carry per-item derived seeds, and are
//! aggregated in order.

use crate::bending::{mix_seed, wrap_angle, BendingSystem, DiagonalSet, FiberValue};
use crate::fibers::{
    certify_isotropy, classify_fiber, generator_rank, is_singular_fiber, rank_with_reference,
    tangent_generators, vanishing_diagonals, FiberType,
};
use crate::geom::Vec3;
use crate::grassmann::{
    check_relation, fiber_graph, frame_to_polygon, gc_pattern, random_frame, side_momentum,
};
use crate::polyspace::{horizontal_project, is_generic, Polygon, SideLengths, TangentVector};
use crate::tol::Tolerances;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::time::Instant;

/// Parameters recorded verbatim in every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub grid: usize,
    pub ns: Vec<usize>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 200,
            grid: 9,
            ns: (4..=8).collect(),
            tolerances: Tolerances::default(),
        }
    }
}

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub items: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Reproducer for the first failure, when any.
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn new(
        name: &str,
        items: usize,
        max_residual: f64,
        threshold: f64,
        counterexample: Option<String>,
    ) -> Self {
        Self {
            name: name.to_string(),
            items,
            max_residual,
            threshold,
            pass: max_residual < threshold && counterexample.is_none(),
            counterexample,
        }
    }

    /// A boolean check: residual 0 or 1 against threshold ½.
    fn boolean(name: &str, items: usize, failures: usize, counterexample: Option<String>) -> Self {
        Self {
            name: name.to_string(),
            items,
            max_residual: failures as f64,
            threshold: 0.5,
            pass: failures == 0,
            counterexample,
        }
    }
}

/// Full report of one suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub version: String,
    pub config: RunConfig,
    pub wall_seconds: f64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl SuiteReport {
    fn assemble(suite: &str, config: &RunConfig, start: Instant, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            wall_seconds: start.elapsed().as_secs_f64(),
            checks,
            pass,
        }
    }
}

/// The available suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Poisson,
    Flow,
    Isotropy,
    Grassmann,
    Gc,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "poisson" => Ok(Self::Poisson),
            "flow" => Ok(Self::Flow),
            "isotropy" => Ok(Self::Isotropy),
            "grassmann" => Ok(Self::Grassmann),
            "gc" => Ok(Self::Gc),
            other => Err(format!(
                "unknown suite '{other}' (expected poisson, flow, isotropy, grassmann, or gc)"
            )),
        }
    }
}

/// Run one suite.
pub fn run_suite(suite: Suite, config: &RunConfig) -> SuiteReport {
    match suite {
        Suite::Poisson => poisson_suite(config),
        Suite::Flow => flow_suite(config),
        Suite::Isotropy => isotropy_suite(config),
        Suite::Grassmann => grassmann_suite(config),
        Suite::Gc => gc_suite(config),
    }
}

// ---------------------------------------------------------------------------
// Random data
// ---------------------------------------------------------------------------

/// Random closed polygon: cyclic differences of Gaussian points, so the
/// closing condition holds by construction; side lengths are the random
/// chord lengths. Resamples until no side is tiny.
pub fn random_polygon<R: Rng>(n: usize, rng: &mut R) -> Polygon {
    let tol = Tolerances::default();
    loop {
        let pts: Vec<Vec3> = (0..n)
            .map(|_| {
                Vec3::new(
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                )
            })
            .collect();
        let mut edges = Vec::with_capacity(n);
        let mut lens = Vec::with_capacity(n);
        for i in 0..n {
            let e = pts[(i + 1) % n] - pts[i];
            lens.push(e.norm());
            edges.push(e);
        }
        if lens.iter().any(|&l| l < 0.05) {
            continue;
        }
        let lengths = SideLengths::new(lens.clone()).unwrap();
        let unit: Vec<Vec3> = edges
            .iter()
            .zip(&lens)
            .map(|(&e, &l)| e * (1.0 / l))
            .collect();
        if let Ok(p) = Polygon::new(unit, lengths, &tol) {
            return p;
        }
    }
}

/// Side lengths exercised on the fiber grids: the unit n-gon (non-generic,
/// rich in collapsed fibers) and a generic dyadic choice.
pub fn grid_side_lengths(n: usize) -> Vec<SideLengths> {
    let mut out = vec![SideLengths::new(vec![1.0; n]).unwrap()];
    // One coordinate is an odd multiple of 1/16 while the rest are even, so
    // no signed sum can vanish; dyadic values keep grid boundaries exact.
    let pool = [1.0, 0.75, 1.25, 1.625, 0.5, 1.1875, 0.875, 1.375];
    if n <= pool.len() {
        let generic = SideLengths::new(pool[..n].to_vec()).unwrap();
        assert!(is_generic(&generic), "dyadic side lengths must be generic");
        out.push(generic);
    }
    out
}

/// Axis-aligned grid over the feasible diagonal lengths of the system,
/// boundary values included, filtered by fiber feasibility.
pub fn fiber_grid(sys: &BendingSystem, points: usize, tol: &Tolerances) -> Vec<FiberValue> {
    let r = sys.lengths().as_slice();
    let span = |edges: &[f64]| -> (f64, f64) {
        let sum: f64 = edges.iter().sum();
        let max = edges.iter().fold(0.0_f64, |a, &b| a.max(b));
        ((2.0 * max - sum).max(0.0), sum)
    };
    let axes: Vec<Vec<f64>> = sys
        .diagonals()
        .iter()
        .map(|d| {
            let (lo1, hi1) = span(&r[d.a()..d.b()]);
            let complement: Vec<f64> = r[..d.a()].iter().chain(&r[d.b()..]).copied().collect();
            let (lo2, hi2) = span(&complement);
            let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
            (0..points)
                .map(|i| lo + (hi - lo) * (i as f64) / ((points - 1) as f64))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut index = vec![0usize; axes.len()];
    'outer: loop {
        let lens: Vec<f64> = index.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
        let c = FiberValue::from_lengths(&lens).unwrap();
        if sys.fiber_feasible(&c, tol).is_ok() {
            out.push(c);
        }
        for pos in 0..index.len() {
            index[pos] += 1;
            if index[pos] < axes[pos].len() {
                continue 'outer;
            }
            index[pos] = 0;
        }
        break;
    }
    out
}

// ---------------------------------------------------------------------------
// Poisson suite
// ---------------------------------------------------------------------------

/// Catalan numbers indexed by polygon size, for the enumerator check.
fn catalan_triangulations(n: usize) -> usize {
    // C_{n-2} with C_2 = 2 at n = 4.
    let m = n - 2;
    let mut c = vec![1u64; m + 1];
    for i in 1..=m {
        c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
    }
    c[m] as usize
}

/// Pairwise Poisson brackets of the momentum components vanish, for every
/// triangulation of every tested polygon size, on random polygons.
pub fn poisson_suite(config: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let tol = &config.tolerances;
    let mut checks = Vec::new();

    let mut enum_failures = 0;
    let mut enum_example = None;
    let mut items: Vec<(usize, usize, DiagonalSet)> = Vec::new();
    for &n in &config.ns {
        let tris = DiagonalSet::enumerate_all(n).expect("n >= 4");
        if tris.len() != catalan_triangulations(n) {
            enum_failures += 1;
            enum_example.get_or_insert(format!(
                "n={n}: enumerated {} triangulations, expected {}",
                tris.len(),
                catalan_triangulations(n)
            ));
        }
        for (ti, tri) in tris.into_iter().enumerate() {
            items.push((n, ti, tri));
        }
    }
    checks.push(CheckResult::boolean(
        "triangulation enumeration matches the Catalan count",
        config.ns.len(),
        enum_failures,
        enum_example,
    ));

    let results: Vec<(f64, Option<String>)> = items
        .par_iter()
        .map(|(n, ti, tri)| {
            let mut worst = 0.0_f64;
            let mut example = None;
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix_seed(config.seed, (*n as u64) << 32 | *ti as u64));
            let m = n - 3;
            for s in 0..config.samples {
                let u = random_polygon(*n, &mut rng);
                let sys = BendingSystem::new(u.lengths().clone(), tri.clone()).unwrap();
                for k in 0..m {
                    for l in (k + 1)..m {
                        let b = sys.poisson_bracket(&u, k, l).unwrap().abs();
                        if b > worst {
                            worst = b;
                            if b >= tol.symplectic {
                                example.get_or_insert(format!(
                                    "n={n} triangulation={ti} sample={s} pair=({k},{l}) |bracket|={b}"
                                ));
                            }
                        }
                    }
                }
            }
            (worst, example)
        })
        .collect();
    let max_residual = results.iter().fold(0.0_f64, |a, (b, _)| a.max(*b));
    let counterexample = results.iter().find_map(|(_, e)| e.clone());
    checks.push(CheckResult::new(
        "pairwise brackets vanish on every triangulation",
        items.len() * config.samples,
        max_residual,
        tol.symplectic,
        counterexample,
    ));

    SuiteReport::assemble("poisson", config, start, checks)
}

// ---------------------------------------------------------------------------
// Flow suite
// ---------------------------------------------------------------------------

/// Flow exactness (momentum invariance, closing preservation, periodicity)
/// and the action-angle contract at regular points.
pub fn flow_suite(config: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let tol = &config.tolerances;
    let mut checks = Vec::new();

    struct FlowWorst {
        drift: f64,
        closing: f64,
        period: f64,
        example: Option<String>,
    }

    let items: Vec<(usize, usize)> = config
        .ns
        .iter()
        .flat_map(|&n| (0..config.samples).map(move |case| (n, case)))
        .collect();
    let results: Vec<FlowWorst> = items
        .par_iter()
        .map(|&(n, case)| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix_seed(config.seed, (n as u64) << 32 | case as u64));
            let u0 = random_polygon(n, &mut rng);
            let sys =
                BendingSystem::new(u0.lengths().clone(), DiagonalSet::caterpillar(n).unwrap())
                    .unwrap();
            let c0 = sys.momentum(&u0).unwrap();
            let mut worst = FlowWorst {
                drift: 0.0,
                closing: 0.0,
                period: 0.0,
                example: None,
            };
            // Compose normalized flows with total angle 100π.
            let steps = 100;
            let mut u = u0.clone();
            for _ in 0..steps {
                let k = rng.random_range(0..n - 3);
                let t = if rng.random::<bool>() { PI } else { -PI };
                match sys.flow(&u, k, t, true) {
                    Ok(next) => u = next,
                    Err(_) => continue, // vanishing diagonal: measure-zero event
                }
                worst.closing = worst.closing.max(u.closing_defect());
            }
            let c1 = sys.momentum(&u).unwrap();
            for k in 0..n - 3 {
                let drift = (c1[k] - c0[k]).abs() / c0[k].abs().max(1.0);
                worst.drift = worst.drift.max(drift);
            }
            // Periodicity of each normalized flow.
            for k in 0..n - 3 {
                if let Ok(turned) = sys.flow(&u0, k, TAU, true) {
                    worst.period = worst.period.max(turned.edge_distance(&u0));
                }
            }
            if worst.drift >= 1e-10 || worst.closing >= 1e-12 || worst.period >= 1e-10 {
                worst.example = Some(format!(
                    "n={n} case={case}: drift={} closing={} period={}",
                    worst.drift, worst.closing, worst.period
                ));
            }
            worst
        })
        .collect();
    let fold = |f: fn(&FlowWorst) -> f64| results.iter().map(f).fold(0.0_f64, f64::max);
    let first_example = |threshold: fn(&FlowWorst) -> bool| {
        results
            .iter()
            .find(|w| threshold(w))
            .and_then(|w| w.example.clone())
    };
    checks.push(CheckResult::new(
        "momentum drift under composed flows of total angle 100π",
        items.len(),
        fold(|w| w.drift),
        1e-10,
        first_example(|w| w.drift >= 1e-10),
    ));
    checks.push(CheckResult::new(
        "closing defect along flows",
        items.len(),
        fold(|w| w.closing),
        1e-12,
        first_example(|w| w.closing >= 1e-12),
    ));
    checks.push(CheckResult::new(
        "normalized flow is 2π-periodic",
        items.len(),
        fold(|w| w.period),
        1e-10,
        first_example(|w| w.period >= 1e-10),
    ));

    // Action-angle contract at regular points: the normalized flow in k
    // advances θ_k at unit rate and fixes every other coordinate.
    let mut angle_worst = 0.0_f64;
    let mut angle_example = None;
    let mut angle_items = 0usize;
    for &n in &config.ns {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, 0xA46E << 16 | n as u64));
        let mut tested = 0;
        while tested < 20 {
            let u = random_polygon(n, &mut rng);
            let sys = BendingSystem::new(u.lengths().clone(), DiagonalSet::caterpillar(n).unwrap())
                .unwrap();
            let Ok(before) = sys.action_angle(&u) else {
                continue;
            };
            // Stay clear of the singular set so angles are well-conditioned.
            let scale = sys.lengths().perimeter();
            if before.lengths.iter().any(|&l| l < 0.05 * scale) {
                continue;
            }
            let statuses =
                crate::fibers::face_statuses(&sys, &sys.momentum(&u).unwrap(), tol).unwrap();
            let open = statuses.iter().all(|s| {
                let [a, b, c] = s.lengths;
                let m = a.max(b).max(c);
                (a + b - c).min(b + c - a).min(a + c - b) > 0.02 * m
            });
            if !open {
                continue;
            }
            tested += 1;
            angle_items += 1;
            for k in 0..n - 3 {
                for &t in &[0.4, PI, 5.3, TAU] {
                    let Ok(moved) = sys.flow(&u, k, t, true) else {
                        continue;
                    };
                    let Ok(after) = sys.action_angle(&moved) else {
                        continue;
                    };
                    for p in 0..n - 3 {
                        let expect = if p == k {
                            wrap_angle(before.angles[p] + t)
                        } else {
                            before.angles[p]
                        };
                        let da = crate::bending::circle_distance(after.angles[p], expect);
                        let dl = (after.lengths[p] - before.lengths[p]).abs();
                        let res = da.max(dl);
                        if res > angle_worst {
                            angle_worst = res;
                            if res >= tol.angle {
                                angle_example.get_or_insert(format!(
                                    "n={n} k={k} p={p} t={t}: angle/length residual {res}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    checks.push(CheckResult::new(
        "normalized flow advances its angle at unit rate and fixes the rest",
        angle_items,
        angle_worst,
        tol.angle,
        angle_example,
    ));

    SuiteReport::assemble("flow", config, start, checks)
}

// ---------------------------------------------------------------------------
// Isotropy / fiber-structure suite
// ---------------------------------------------------------------------------

/// Everything the fiber grids certify: the face-degeneracy singularity
/// criterion against the rank of the projected bending fields, model
/// dimension against generator rank, isotropy of singular fibers, and the
/// Lagrangian flag recomputed from rank data.
pub fn isotropy_suite(config: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let tol = &config.tolerances;
    let mut checks = Vec::new();

    struct GridOutcome {
        criterion_mismatch: Option<String>,
        rank_mismatch: Option<String>,
        lagrangian_mismatch: Option<String>,
        max_omega: f64,
        omega_example: Option<String>,
        fibers: usize,
        singular: usize,
    }

    let items: Vec<(usize, SideLengths)> = config
        .ns
        .iter()
        .flat_map(|&n| grid_side_lengths(n).into_iter().map(move |r| (n, r)))
        .collect();

    let outcomes: Vec<GridOutcome> = items
        .par_iter()
        .map(|(n, r)| {
            let sys = BendingSystem::new(r.clone(), DiagonalSet::caterpillar(*n).unwrap()).unwrap();
            let mut out = GridOutcome {
                criterion_mismatch: None,
                rank_mismatch: None,
                lagrangian_mismatch: None,
                max_omega: 0.0,
                omega_example: None,
                fibers: 0,
                singular: 0,
            };
            for (ci, c) in fiber_grid(&sys, config.grid, tol).into_iter().enumerate() {
                out.fibers += 1;
                let singular = is_singular_fiber(&sys, &c, tol).unwrap();
                let model = classify_fiber(&sys, &c, tol).unwrap();
                if singular {
                    out.singular += 1;
                }
                let describe =
                    || format!("n={n} r={:?} fiber {ci} c={:?}", r.as_slice(), c.as_slice());

                let samples = sys
                    .sample_fiber(&c, 10, mix_seed(config.seed, ci as u64))
                    .unwrap();
                for u in &samples {
                    // Singularity criterion: rank of the horizontally
                    // projected bending fields drops exactly on singular
                    // fibers. The rank threshold is measured against the
                    // unprojected field scale, so a family that is wholly
                    // projected away counts as rank zero.
                    let fields: Vec<TangentVector> = (0..*n - 3)
                        .map(|k| sys.bending_field(u, k).unwrap())
                        .collect();
                    let reference = fields
                        .iter()
                        .map(|f| f.metric_norm(u.lengths()))
                        .fold(0.0_f64, f64::max);
                    let projected: Vec<TangentVector> =
                        fields.iter().map(|f| horizontal_project(u, f)).collect();
                    let hp_rank = rank_with_reference(&projected, reference, tol);
                    if (hp_rank < *n - 3) != singular {
                        out.criterion_mismatch.get_or_insert(format!(
                            "{}: projected rank {hp_rank}, singular={singular}",
                            describe()
                        ));
                    }
                    // Model dimension against the generator rank.
                    let gens = tangent_generators(&sys, u, &c, tol).unwrap();
                    let rank = generator_rank(&gens, tol);
                    if rank != model.dim_total {
                        out.rank_mismatch.get_or_insert(format!(
                            "{}: rank {rank} vs model dimension {}",
                            describe(),
                            model.dim_total
                        ));
                    }
                    // Lagrangian flag from rank data.
                    let lagrangian_by_rank = model.fiber_type == FiberType::I && rank - 3 == *n - 3;
                    if lagrangian_by_rank != model.lagrangian {
                        out.lagrangian_mismatch.get_or_insert(format!(
                            "{}: flag {} vs rank-derived {}",
                            describe(),
                            model.lagrangian,
                            lagrangian_by_rank
                        ));
                    }
                }
                // Isotropy on every fiber (Lagrangian tori included).
                let cert = certify_isotropy(
                    &sys,
                    &c,
                    config.samples.max(5),
                    mix_seed(config.seed, 0xB0B ^ ci as u64),
                    tol,
                )
                .unwrap();
                if cert.max_omega > out.max_omega {
                    out.max_omega = cert.max_omega;
                    if !cert.pass {
                        out.omega_example.get_or_insert(format!(
                            "{}: max |omega| = {}",
                            describe(),
                            cert.max_omega
                        ));
                    }
                }
            }
            out
        })
        .collect();

    let fibers: usize = outcomes.iter().map(|o| o.fibers).sum();
    let singular: usize = outcomes.iter().map(|o| o.singular).sum();
    let pick = |f: fn(&GridOutcome) -> Option<String>| outcomes.iter().find_map(f);
    checks.push(CheckResult::boolean(
        "face-degeneracy criterion agrees with the projected-rank test",
        fibers,
        outcomes
            .iter()
            .filter(|o| o.criterion_mismatch.is_some())
            .count(),
        pick(|o| o.criterion_mismatch.clone()),
    ));
    checks.push(CheckResult::boolean(
        "generator rank equals the classified model dimension",
        fibers,
        outcomes
            .iter()
            .filter(|o| o.rank_mismatch.is_some())
            .count(),
        pick(|o| o.rank_mismatch.clone()),
    ));
    checks.push(CheckResult::boolean(
        "Lagrangian flag equals the rank-derived flag",
        fibers,
        outcomes
            .iter()
            .filter(|o| o.lagrangian_mismatch.is_some())
            .count(),
        pick(|o| o.lagrangian_mismatch.clone()),
    ));
    let max_omega = outcomes.iter().fold(0.0_f64, |a, o| a.max(o.max_omega));
    checks.push(CheckResult::new(
        &format!(
            "isotropy: max |omega| over {singular} singular and {} regular fibers",
            fibers - singular
        ),
        fibers,
        max_omega,
        tol.isotropy,
        pick(|o| o.omega_example.clone()),
    ));

    SuiteReport::assemble("isotropy", config, start, checks)
}

// ---------------------------------------------------------------------------
// Grassmann suite
// ---------------------------------------------------------------------------

/// The frame-to-polygon correspondence: perimeter and closing identities and
/// the per-diagonal second-eigenvalue relation, over seeded random frames on
/// the caterpillar and a snake triangulation.
pub fn grassmann_suite(config: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let tol = &config.tolerances;

    struct FrameWorst {
        relation: f64,
        perimeter: f64,
        closing: f64,
        example: Option<String>,
    }

    let items: Vec<usize> = config.ns.clone();
    let results: Vec<FrameWorst> = items
        .par_iter()
        .map(|&n| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, n as u64));
            let mut worst = FrameWorst {
                relation: 0.0,
                perimeter: 0.0,
                closing: 0.0,
                example: None,
            };
            for s in 0..config.samples {
                let f = random_frame(n, &mut rng);
                let image = frame_to_polygon(&f);
                worst.perimeter = worst.perimeter.max((image.perimeter() - 2.0).abs());
                worst.closing = worst.closing.max(image.closing_defect());
                let r = SideLengths::new(image.lengths.clone()).unwrap();
                for diag in [
                    DiagonalSet::caterpillar(n).unwrap(),
                    DiagonalSet::snake(n).unwrap(),
                ] {
                    let sys = BendingSystem::new(r.clone(), diag).unwrap();
                    for (k, res) in check_relation(&f, &sys).unwrap().iter().enumerate() {
                        if *res > worst.relation {
                            worst.relation = *res;
                            if *res >= 1e-10 {
                                worst.example.get_or_insert(format!(
                                    "n={n} frame={s} diagonal={k} residual={res}"
                                ));
                            }
                        }
                    }
                }
            }
            worst
        })
        .collect();
    let fold = |f: fn(&FrameWorst) -> f64| results.iter().map(f).fold(0.0_f64, f64::max);
    let checks = vec![
        CheckResult::new(
            "second-eigenvalue relation to the diagonal lengths",
            items.len() * config.samples,
            fold(|w| w.relation),
            1e-10,
            results.iter().find_map(|w| w.example.clone()),
        ),
        CheckResult::new(
            "image polygons have perimeter 2",
            items.len() * config.samples,
            fold(|w| w.perimeter),
            tol.kernel,
            None,
        ),
        CheckResult::new(
            "image polygons close",
            items.len() * config.samples,
            fold(|w| w.closing),
            tol.kernel,
            None,
        ),
    ];
    SuiteReport::assemble("grassmann", config, start, checks)
}

// ---------------------------------------------------------------------------
// Gel'fand-Cetlin suite
// ---------------------------------------------------------------------------

/// Ladder identities, interlacing, and the diamond/vanishing-diagonal
/// equivalence on exhaustive small grids.
pub fn gc_suite(config: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let tol = &config.tolerances;
    let mut checks = Vec::new();

    let mut ladder_worst = 0.0_f64;
    let mut interlace_worst = 0.0_f64;
    let mut example = None;
    let mut items = 0usize;
    for &n in &config.ns {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, 0x6C ^ n as u64));
        for s in 0..config.samples {
            items += 1;
            let f = random_frame(n, &mut rng);
            let pat = gc_pattern(&f);
            interlace_worst = interlace_worst.max(pat.interlacing_violation());
            // Top row ½, ½; bottom row (ψ_{q¹}, 0); trace identity per row.
            let mut local = (pat.entry(1, n) - 0.5)
                .abs()
                .max((pat.entry(2, n) - 0.5).abs());
            local = local.max((pat.entry(1, 1) - side_momentum(&f, 0).unwrap()).abs());
            local = local.max(pat.entry(2, 1).abs());
            for k in 1..=n {
                let sum: f64 = (0..k).map(|i| side_momentum(&f, i).unwrap()).sum();
                local = local.max((pat.entry(1, k) + pat.entry(2, k) - sum).abs());
            }
            if local > ladder_worst {
                ladder_worst = local;
                if local >= 1e-10 {
                    example.get_or_insert(format!("n={n} frame={s} ladder residual={local}"));
                }
            }
        }
    }
    checks.push(CheckResult::new(
        "ladder closed-form identities",
        items,
        ladder_worst,
        1e-10,
        example,
    ));
    checks.push(CheckResult::new(
        "interlacing inequalities",
        items,
        interlace_worst,
        1e-10,
        None,
    ));

    // Diamond flags equal the vanishing-diagonal set, over (r, c) grids.
    let mut mismatches = 0usize;
    let mut diamond_example = None;
    let mut grid_fibers = 0usize;
    for &n in config.ns.iter().filter(|&&n| n <= 6) {
        for r in grid_side_lengths(n) {
            let sys = BendingSystem::new(r.clone(), DiagonalSet::caterpillar(n).unwrap()).unwrap();
            for c in fiber_grid(&sys, config.grid, tol) {
                grid_fibers += 1;
                let graph = fiber_graph(&sys, &c, tol).unwrap();
                let flags: Vec<usize> = graph
                    .diamonds
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d)
                    .map(|(k, _)| k)
                    .collect();
                let vanish = vanishing_diagonals(&sys, &c, tol);
                if flags != vanish {
                    mismatches += 1;
                    diamond_example.get_or_insert(format!(
                        "n={n} r={:?} c={:?}: diamonds {:?} vs vanishing {:?}",
                        r.as_slice(),
                        c.as_slice(),
                        flags,
                        vanish
                    ));
                }
            }
        }
    }
    checks.push(CheckResult::boolean(
        "diamond flags equal the vanishing-diagonal set",
        grid_fibers,
        mismatches,
        diamond_example,
    ));

    SuiteReport::assemble("gc", config, start, checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_runs_pass() {
        let config = RunConfig {
            seed: 7,
            samples: 20,
            grid: 5,
            ns: vec![4, 5],
            tolerances: Tolerances::default(),
        };
        for suite in [
            Suite::Poisson,
            Suite::Flow,
            Suite::Isotropy,
            Suite::Grassmann,
            Suite::Gc,
        ] {
            let report = run_suite(suite, &config);
            assert!(
                report.pass,
                "{} failed: {:?}",
                report.suite,
                report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| (&c.name, c.max_residual, &c.counterexample))
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let config = RunConfig {
            seed: 3,
            samples: 8,
            grid: 5,
            ns: vec![5],
            tolerances: Tolerances::default(),
        };
        let a = run_suite(Suite::Poisson, &config);
        let b = run_suite(Suite::Poisson, &config);
        assert_eq!(
            serde_json::to_string(&a.checks).unwrap(),
            serde_json::to_string(&b.checks).unwrap()
        );
    }

    #[test]
    fn grids_include_boundaries() {
        let sys = BendingSystem::new(
            SideLengths::new(vec![1.0; 4]).unwrap(),
            DiagonalSet::caterpillar(4).unwrap(),
        )
        .unwrap();
        let grid = fiber_grid(&sys, 9, &Tolerances::default());
        assert_eq!(grid.len(), 9);
        let lens: Vec<f64> = grid.iter().map(|c| c.diagonal_length(0)).collect();
        assert_eq!(lens[0], 0.0);
        assert!((lens[8] - 2.0).abs() < 1e-15);
    }
}
