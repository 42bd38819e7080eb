//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use adlab::diagnostics::{
    attainment_profile, caccioppoli_check, choose_nu, parabolicity_test, poincare_check, radial_tent, w_decay_check,
    weighted_f_integral, CaccioppoliForm, GrowthClass, InequalityReport, PsiChoice, Verdict, WeightFunctions,
};
use adlab::manifold::{check_comparison_bounds, sandwich_check, solve_jacobi, CurvatureProfile, JacobiOptions, ModelManifold, RadialProfile};
use adlab::pde::{exhaustion_solve, AngularMode, BoundaryData, ExhaustionReport, ExhaustionSetup, PolarGrid, ScalarField, SolverConfig, Stage};
use adlab::young::build_young_pair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Jacobi
const FLAT_REL_TOL: f64 = 1e-14;
const SINH_TOL: f64 = 1e-8;
const SANDWICH_TRIPLES: usize = 20;
// Comparison bounds
const COMPARISON_R_MAX: f64 = 1e4;
// Young
const YOUNG_SAMPLES: usize = 10_000;
const YOUNG_REL_TOL: f64 = 1e-9;
const F_GRID_POINTS: usize = 200;
const RATIO_DELTA: f64 = 0.2;
// PDE oracle
const FLAT_SUP_TOL: f64 = 5e-3;
const FLAT_N: usize = 128;
const MIN_ORDER: f64 = 1.8;
const SMALL_AMPLITUDE: f64 = 1e-3;
const SMALL_DATA_TOL: f64 = 1e-5;
// Maximum principle and homogeneity
const MAX_PRINCIPLE_TOL: f64 = 1e-10;
const HOMOGENEITY_TOL: f64 = 1e-8;
// Pipeline
const EPS: f64 = 1.0;
const EPS_BAR: f64 = 0.5;
const EPS_TILDE: f64 = 0.5;
const R0: f64 = 8.0;
const CAP: f64 = 0.25;
const PIPELINE_R_MAX: f64 = 1e4;
const RADIUS_FACTORS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
const BASE_DS: f64 = 0.05;
const BASE_N_THETA: usize = 32;
const FINAL_CAUCHY_TOL: f64 = 1e-3;
const ATTAINMENT_FRACTION: f64 = 0.5;
// Flat contrast: the harmonic extension of cos on the ball of radius R deviates R_core / R from the mean on the core ball.
const FLAT_MEAN_TOL: f64 = 0.02;
// Inequalities
const TOL_DISC: f64 = 0.05;
const ETA_INNER: f64 = 0.5;
const ETA_OUTER: f64 = 0.9;
const YOUNG_P: f64 = 2.0;
const YOUNG_EPS0: f64 = 0.5;
const YOUNG_LAMBDA: f64 = 1.25;
// Parabolicity
const INTEGRAL_REL_TOL: f64 = 0.01;
// Decay
const TAIL_EXPONENT_MAX: f64 = -1.8;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

/// Records the maximum principle excess of every solve in the suite.
#[derive(Default)]
struct SolveLog {
    solves: usize,
    worst: f64,
    worst_label: String,
}

impl SolveLog {
    fn record(&mut self, label: &str, u: &ScalarField<f64>, boundary: &[f64]) {
        let lo = boundary.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = boundary.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let excess = (lo - u.min()).max(u.max() - hi).max(0.0);
        self.solves += 1;
        if excess >= self.worst {
            self.worst = excess;
            self.worst_label = label.into();
        }
    }

    fn record_stages(&mut self, label: &str, stages: &[Stage<f64>]) {
        for st in stages {
            if let Ok(sol) = &st.solution {
                self.record(&format!("{label} R={:.3}", st.radius), &sol.field, &st.theta.boundary_values());
            }
        }
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn sci(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", "))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0])
}

fn criterion_1() -> Outcome {
    let flat = solve_jacobi(|_| 0.0f64, 50.0, 1e-10).expect("flat warp");
    let flat_err = flat
        .nodes()
        .iter()
        .zip(flat.values())
        .zip(flat.derivatives())
        .fold(0.0f64, |m, ((&r, &f), &fp)| m.max((f - r).abs() / r.max(f64::MIN_POSITIVE)).max((fp - 1.0).abs()));

    let hyp = solve_jacobi(|_| 1.0f64, 5.0, 1e-10).expect("hyperbolic warp");
    let mut sinh_err = sup_diff(hyp.values(), &hyp.nodes().iter().map(|r| r.sinh()).collect::<Vec<_>>());
    for i in 0..=1000 {
        let r = 5.0 * i as f64 / 1000.0;
        sinh_err = sinh_err.max((hyp.value(r).expect("inside table") - r.sinh()).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut sandwiched = 0;
    let mut drawn = 0;
    while drawn < SANDWICH_TRIPLES {
        let eps = rng.gen_range(0.3..2.5);
        let eps_bar = rng.gen_range(0.05..0.95) * eps;
        let r0 = rng.gen_range(6.0..20.0);
        let cap = rng.gen_range(0.05..1.0);
        let Ok(prof) = CurvatureProfile::new(eps, eps_bar, r0, cap) else { continue };
        drawn += 1;
        let t = rng.gen_range(0.0..1.0);
        let freq = rng.gen_range(0.1..3.0);
        let k2 = |r: f64| {
            let (a, b) = (prof.a_squared(r), prof.b_squared(r));
            a + (b - a) * t * (0.5 + 0.5 * (freq * r).sin())
        };
        let fa = solve_jacobi(|r| prof.a_squared(r), 300.0, 1e-10).expect("lower warp");
        let fk = solve_jacobi(k2, 300.0, 1e-10).expect("middle warp");
        let fb = solve_jacobi(|r| prof.b_squared(r), 300.0, 1e-10).expect("upper warp");
        if sandwich_check(&fa, &fk, &fb).expect("shared nodes") {
            sandwiched += 1;
        }
    }
    Outcome::new(
        flat_err <= FLAT_REL_TOL && sinh_err <= SINH_TOL && sandwiched == SANDWICH_TRIPLES,
        format!("flat rel err {flat_err:.2e} (<= {FLAT_REL_TOL:e}), sinh sup err {sinh_err:.2e} (<= {SINH_TOL:e}), sandwich {sandwiched}/{SANDWICH_TRIPLES}"),
    )
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in [0.5, 1.0, 2.0] {
        let eps_tilde = eps / 2.0;
        let prof = CurvatureProfile::new(eps, eps / 2.0, R0, CAP).expect("profile");
        let m = ModelManifold::build(3, prof.upper(), COMPARISON_R_MAX, &JacobiOptions::default()).expect("warp");
        let rep = check_comparison_bounds(m.warp(), &prof, eps_tilde).expect("scan");
        let w = m.warp();
        let violations = match rep.r1 {
            Some(r1) => w
                .nodes()
                .iter()
                .enumerate()
                .filter(|&(_, &r)| r >= r1)
                .filter(|&(i, &r)| {
                    let (f, fp) = (w.values()[i], w.derivatives()[i]);
                    let lr = r.ln();
                    f < r * lr.powf(1.0 + eps_tilde) || fp / f < 1.0 / r + (1.0 + eps_tilde) / (r * lr)
                })
                .count(),
            None => usize::MAX,
        };
        let reaches = w.r_max() >= COMPARISON_R_MAX;
        ok &= rep.r1.is_some_and(f64::is_finite) && violations == 0 && reaches;
        parts.push(format!("eps {eps}: R1 {:?}, violations {violations}", rep.r1));
    }
    Outcome::new(ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, eps0, lambda) in [(2.0, 0.5, 1.25), (3.0, 0.5, 1.25), (2.0, 0.9, 1.5)] {
        let pair = build_young_pair(p, eps0, lambda).expect("young pair");
        let mut young_bad = 0;
        for _ in 0..YOUNG_SAMPLES {
            let s = 10f64.powf(rng.gen_range(-12.0..(3.0 * p)));
            let v = 10f64.powf(rng.gen_range(-4.0..12.0));
            let rhs = pair.g_tilde(s).expect("g") + pair.f_tilde(v).expect("f");
            if s * v > rhs * (1.0 + YOUNG_REL_TOL) {
                young_bad += 1;
            }
        }
        let mut f_bad = 0;
        for i in 0..F_GRID_POINTS {
            let t = 10f64.powf(-6.0 * (1.0 - i as f64 / (F_GRID_POINTS - 1) as f64));
            if pair.log_conjugate_f(t).expect("F") > pair.log_f_bound(t) {
                f_bad += 1;
            }
        }
        let ratio = pair.psi_ratio(pair.t_table_min()).expect("ratio");
        let window = (2.0 * p * 0.45, (1.0 + RATIO_DELTA).powf(p) * p);
        let in_window = ratio >= window.0 && ratio <= window.1;
        ok &= young_bad == 0 && f_bad == 0 && in_window;
        parts.push(format!(
            "({p},{eps0},{lambda}): young {young_bad}/{YOUNG_SAMPLES} bad, F {f_bad}/{F_GRID_POINTS} bad, ratio {ratio:.4} in [{:.3}, {:.3}]",
            window.0, window.1
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn flat_disk(n: usize) -> Arc<PolarGrid<f64>> {
    let m = Arc::new(ModelManifold::<f64>::flat(2, 3.0).expect("flat"));
    Arc::new(PolarGrid::new(m, 1.0, n, n, AngularMode::Full).expect("grid"))
}

fn criterion_4(log: &mut SolveLog) -> Outcome {
    let mut errs = Vec::new();
    for n in [FLAT_N / 4, FLAT_N / 2, FLAT_N] {
        let g = flat_disk(n);
        let b: Vec<f64> = g.angles().iter().map(|t| t.cos()).collect();
        let u = adlab::pde::solve_on_ball(&g, &b, &SolverConfig::p_laplace(2.0)).expect("harmonic solve").field;
        log.record(&format!("flat disk N={n}"), &u, &b);
        let exact = ScalarField::from_fn(g.clone(), |r, t| r * t.cos());
        errs.push(sup_diff(u.values(), exact.values()));
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();

    let g = flat_disk(FLAT_N);
    let b: Vec<f64> = g.angles().iter().map(|t| SMALL_AMPLITUDE * t.cos()).collect();
    let w = adlab::pde::solve_on_ball(&g, &b, &SolverConfig::minimal_graph()).expect("minimal graph solve").field;
    log.record("flat disk minimal graph", &w, &b);
    let scaled = ScalarField::from_fn(g.clone(), |r, t| SMALL_AMPLITUDE * r * t.cos());
    let small_err = sup_diff(w.values(), scaled.values());

    let last = *errs.last().expect("three levels");
    Outcome::new(
        last <= FLAT_SUP_TOL && orders.iter().all(|&o| o >= MIN_ORDER) && small_err <= SMALL_DATA_TOL,
        format!("errors {}, orders {orders:.3?}, minimal graph vs scaled harmonic {small_err:.2e}", sci(&errs)),
    )
}

fn homogeneity(log: &mut SolveLog) -> (bool, String) {
    let hyp = Arc::new(ModelManifold::<f64>::hyperbolic(2, 4.0).expect("hyperbolic"));
    let prof = CurvatureProfile::new(EPS, EPS_BAR, R0, CAP).expect("profile");
    let curved = Arc::new(ModelManifold::build(3, prof.upper(), 20.0, &JacobiOptions::default()).expect("warp"));
    let grids = [
        Arc::new(PolarGrid::new(hyp, 2.5, 24, 20, AngularMode::Full).expect("grid")),
        Arc::new(PolarGrid::new(curved, 6.0, 32, 24, AngularMode::Axisymmetric).expect("grid")),
    ];
    let mut worst = 0.0f64;
    for g in &grids {
        let b: Vec<f64> = g.angles().iter().map(|t| t.cos() + 0.5 * (3.0 * t).sin().abs()).collect();
        for p in [1.5, 2.0, 3.0] {
            let cfg = SolverConfig::p_laplace(p);
            let u = adlab::pde::solve_on_ball(g, &b, &cfg).expect("solve").field;
            log.record(&format!("homogeneity p={p}"), &u, &b);
            for lambda in [-1.0, 3.0] {
                let bl: Vec<f64> = b.iter().map(|v| lambda * v).collect();
                let v = adlab::pde::solve_on_ball(g, &bl, &cfg).expect("solve").field;
                log.record(&format!("homogeneity p={p} lambda={lambda}"), &v, &bl);
                let scaled: Vec<f64> = u.values().iter().map(|x| lambda * x).collect();
                worst = worst.max(sup_diff(&scaled, v.values()) / f64::abs(lambda));
            }
        }
    }
    (worst <= HOMOGENEITY_TOL, format!("homogeneity sup |lambda u(f) - u(lambda f)| / |lambda| = {worst:.2e} (<= {HOMOGENEITY_TOL:e})"))
}

struct Pipeline {
    manifold: Arc<ModelManifold<f64>>,
    r1: f64,
    radii: Vec<f64>,
    data: BoundaryData<f64>,
    stages: Vec<Stage<f64>>,
    report: ExhaustionReport,
}

fn run_pipeline(manifold: Arc<ModelManifold<f64>>, r1: f64, ds: f64, n_theta: usize) -> Pipeline {
    let radii: Vec<f64> = RADIUS_FACTORS.iter().map(|s| s * r1).collect();
    let setup = ExhaustionSetup { ds, n_theta, mode: AngularMode::Axisymmetric, r1: 1.0, parallel: true };
    let data = BoundaryData::cosine(1.0);
    let (stages, report) = exhaustion_solve(&manifold, &data, &radii, &setup, &SolverConfig::minimal_graph()).expect("exhaustion");
    assert!(report.failures.is_empty(), "stage failures: {:?}", report.failures);
    Pipeline { manifold, r1, radii, data, stages, report }
}

fn criterion_6(pipe: &Pipeline) -> Outcome {
    let c = &pipe.report.cauchy_differences;
    let pairs: Vec<_> = pipe.stages.iter().map(|s| (&s.solution.as_ref().expect("solved").field, &s.theta)).collect();
    let att = attainment_profile(&pairs, ATTAINMENT_FRACTION).expect("attainment");
    let last = c.last().copied().unwrap_or(f64::INFINITY);
    Outcome::new(
        strictly_decreasing(c) && last <= FINAL_CAUCHY_TOL && att.strictly_decreasing,
        format!(
            "R1 {:.4}, radii {:.3?}, cauchy {} (final <= {FINAL_CAUCHY_TOL:e}), oscillation at R_k/2 {:.4?}",
            pipe.r1, pipe.report.radii, sci(c), att.oscillation
        ),
    )
}

fn criterion_7(curved: &Pipeline, log: &mut SolveLog) -> Outcome {
    let flat = Arc::new(ModelManifold::<f64>::flat(3, PIPELINE_R_MAX).expect("flat"));
    let pipe = run_pipeline(flat, curved.r1, BASE_DS, BASE_N_THETA);
    log.record_stages("flat pipeline", &pipe.stages);
    let dev: Vec<f64> = pipe.report.core_deviation_from_mean.iter().map(|d| d.expect("solved")).collect();
    let core = pipe.report.core_radius;
    let oracle: Vec<f64> = pipe.report.radii.iter().map(|r| core / r).collect();
    let gap = sup_diff(&dev, &oracle);
    let curved_dev: Vec<f64> = curved.report.core_deviation_from_mean.iter().map(|d| d.expect("solved")).collect();
    let (flat_last, curved_last) = (dev[dev.len() - 1], curved_dev[curved_dev.len() - 1]);
    Outcome::new(
        strictly_decreasing(&dev) && gap <= FLAT_MEAN_TOL && curved_last > 2.0 * flat_last,
        format!("flat core deviation {dev:.4?} vs R_core/R_k {oracle:.4?} (gap {gap:.2e}); curved {curved_dev:.4?}"),
    )
}

struct InequalityRun {
    cacc_square: Vec<InequalityReport>,
    cacc_young: Vec<InequalityReport>,
    poincare: Vec<InequalityReport>,
}

fn inequalities(pipe: &Pipeline, weights: &WeightFunctions<f64>) -> InequalityRun {
    let pair = build_young_pair(YOUNG_P, YOUNG_EPS0, YOUNG_LAMBDA).expect("young pair");
    let t_delta = pair.delta_thresholds(RATIO_DELTA).expect("thresholds");
    let mut run = InequalityRun { cacc_square: Vec::new(), cacc_young: Vec::new(), poincare: Vec::new() };
    for st in &pipe.stages {
        let u = &st.solution.as_ref().expect("solved").field;
        let sup = u.zip_with(&st.theta, |a, b| a - b).expect("same grid").sup_norm();
        let nu = choose_nu(sup, t_delta).expect("nu");
        let eta = radial_tent(&st.grid, ETA_INNER * st.radius, ETA_OUTER * st.radius).expect("cutoff");
        let form = CaccioppoliForm::MinimalGraph;
        run.cacc_square.push(caccioppoli_check(u, &st.theta, nu, &eta, PsiChoice::Square, form, TOL_DISC).expect("caccioppoli"));
        run.cacc_young.push(caccioppoli_check(u, &st.theta, nu, &eta, PsiChoice::Young(&pair), form, TOL_DISC).expect("caccioppoli"));
        run.poincare.push(poincare_check(u, &st.theta, nu, &pair, weights, TOL_DISC).expect("poincare"));
    }
    run
}

fn criterion_8(base: &Pipeline, fine: &Pipeline) -> Outcome {
    let weights = WeightFunctions::new(base.manifold.clone(), YOUNG_P, EPS_TILDE, base.r1).expect("weights");
    let coarse = inequalities(base, &weights);
    let refined = inequalities(fine, &weights);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c, f) in [
        ("caccioppoli square", &coarse.cacc_square, &refined.cacc_square),
        ("caccioppoli young", &coarse.cacc_young, &refined.cacc_young),
        ("poincare", &coarse.poincare, &refined.poincare),
    ] {
        let base_ok = c.iter().all(|r| r.passed && r.slack <= TOL_DISC);
        let shrinks = c.iter().zip(f).all(|(a, b)| b.slack <= a.slack);
        ok &= base_ok && shrinks;
        let ratios: Vec<f64> = c.iter().map(|r| r.lhs / r.rhs).collect();
        let fine_ratios: Vec<f64> = f.iter().map(|r| r.lhs / r.rhs).collect();
        let slacks: Vec<(f64, f64)> = c.iter().zip(f).map(|(a, b)| (a.slack, b.slack)).collect();
        parts.push(format!("{name}: lhs/rhs {ratios:.4?} -> {fine_ratios:.4?}, slack {slacks:?}"));
    }
    let audit = weights.grad_w_audit();
    let grad_ok = audit.r2.is_some() && audit.max_ratio_beyond <= 1.0 + 64.0 * f64::EPSILON;
    let mut sampled = 0.0f64;
    if let Some(r2) = audit.r2 {
        let r_top = *base.radii.last().expect("radii");
        for i in 0..=400 {
            let r = r2 + (r_top - r2).max(0.0) * i as f64 / 400.0;
            sampled = sampled.max(weights.grad_w(r).abs() / weights.l(r).powf(1.0 / YOUNG_P));
        }
    }
    ok &= grad_ok && sampled <= 1.0 + 64.0 * f64::EPSILON;
    parts.push(format!("|grad w| / L^(1/p) beyond R2 = {:?}: max {:.4} on nodes, {sampled:.4} sampled", audit.r2, audit.max_ratio_beyond));
    Outcome::new(ok, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();

    let r_big = 1e6;
    let flat = ModelManifold::<f64>::flat(2, r_big).expect("flat");
    let rep = parabolicity_test(&flat, 2.0, 1.0, r_big).expect("flat integral");
    let exact = (r_big / 1.0).ln() / (2.0 * PI);
    let got = *rep.partial_integrals.last().expect("samples");
    let err = (got - exact).abs() / exact;
    ok &= rep.verdict == Verdict::DivergentTrend && err <= INTEGRAL_REL_TOL;
    parts.push(format!("flat: {:?}, I(1e6) {got:.6} vs {exact:.6} (rel {err:.1e})", rep.verdict));

    let hyp = ModelManifold::<f64>::hyperbolic(2, 60.0).expect("hyperbolic");
    let rep = parabolicity_test(&hyp, 2.0, 1.0, 60.0).expect("hyperbolic integral");
    // int_1^inf d rho / (2 pi sinh rho)
    let limit = -(0.5f64).tanh().ln() / (2.0 * PI);
    let got = *rep.partial_integrals.last().expect("samples");
    let err = (got - limit).abs() / limit;
    ok &= rep.verdict == Verdict::ConvergentTrend && err <= INTEGRAL_REL_TOL;
    parts.push(format!("hyperbolic: {:?}, I(60) {got:.6} vs limit {limit:.6} (rel {err:.1e})", rep.verdict));

    for n in [2usize, 3] {
        let m = ModelManifold::<f64>::build(n, RadialProfile::borderline(3.0, 0.5), r_big, &JacobiOptions::default()).expect("borderline");
        for p in [n as f64, n as f64 + 1.0] {
            let rep = parabolicity_test(&m, p, 5.0, r_big).expect("borderline integral");
            let class_ok = p != n as f64 || rep.fit.best.class == GrowthClass::LogLog;
            ok &= rep.verdict == Verdict::DivergentTrend && class_ok;
            parts.push(format!("borderline n={n} p={p}: {:?}, fit {:?}", rep.verdict, rep.fit.best.class));
        }
    }
    Outcome::new(ok, parts.join("; "))
}

fn criterion_10(pipe: &Pipeline) -> Outcome {
    let largest = &pipe.stages.last().expect("stages").solution.as_ref().expect("solved").field;
    let decay = w_decay_check(&[largest]).expect("w decay").remove(0);
    let pair = build_young_pair(YOUNG_P, YOUNG_EPS0, YOUNG_LAMBDA).expect("young pair");
    let weights = WeightFunctions::new(pipe.manifold.clone(), YOUNG_P, EPS_TILDE, pipe.r1).expect("weights");
    let f = weighted_f_integral(&pipe.data, 1.0, AngularMode::Axisymmetric, &pair, &weights, 1.0, PIPELINE_R_MAX, 20).expect("weighted F");
    Outcome::new(
        decay.decreasing_trend && f.verdict == Verdict::ConvergentTrend && f.tail_exponent <= TAIL_EXPONENT_MAX,
        format!(
            "r|grad log W| outer-half slope {:.3e}, decreasing fraction {:.2}; weighted F {:?}, tail exponent {:.2} (<= {TAIL_EXPONENT_MAX})",
            decay.outer_half_slope, decay.decreasing_fraction, f.verdict, f.tail_exponent
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut log = SolveLog::default();

    let c1 = criterion_1();
    let c2 = criterion_2();
    let c3 = criterion_3();
    let c4 = criterion_4(&mut log);
    let (homog_ok, homog_detail) = homogeneity(&mut log);

    let prof = CurvatureProfile::new(EPS, EPS_BAR, R0, CAP).expect("profile");
    let manifold = Arc::new(ModelManifold::build(3, prof.upper(), PIPELINE_R_MAX, &JacobiOptions::default()).expect("warp"));
    let r1 = check_comparison_bounds(manifold.warp(), &prof, EPS_TILDE).expect("scan").r1.expect("finite R1");
    let base = run_pipeline(manifold.clone(), r1, BASE_DS, BASE_N_THETA);
    log.record_stages("pipeline", &base.stages);
    let fine = run_pipeline(manifold, r1, BASE_DS / 2.0, 2 * BASE_N_THETA);
    log.record_stages("refined pipeline", &fine.stages);

    let c6 = criterion_6(&base);
    let c7 = criterion_7(&base, &mut log);
    let c8 = criterion_8(&base, &fine);
    let c9 = criterion_9();
    let c10 = criterion_10(&base);

    let c5 = Outcome::new(
        homog_ok && log.worst <= MAX_PRINCIPLE_TOL,
        format!("{} solves, worst excess {:.2e} ({}) (<= {MAX_PRINCIPLE_TOL:e}); {homog_detail}", log.solves, log.worst, log.worst_label),
    );

    let titles = [
        "Jacobi oracle",
        "comparison bounds",
        "Young suite",
        "flat disk oracle",
        "maximum principle and homogeneity",
        "minimal graph pipeline",
        "flat contrast",
        "inequality audits",
        "parabolicity verdicts",
        "decay diagnostics",
    ];
    let outcomes = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10];
    let mut failed = 0;
    for (k, (title, o)) in titles.iter().zip(&outcomes).enumerate() {
        println!("{} criterion {:>2} ({title}): {}", if o.passed { "PASS" } else { "FAIL" }, k + 1, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} passed in {:.1}s", outcomes.len() - failed, outcomes.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
