//! Subcommand pipelines.

use std::sync::Arc;

use adlab::diagnostics::{
    attainment_profile, caccioppoli_check, choose_nu, parabolicity_test, poincare_check, radial_tent, w_decay_check,
    weighted_f_integral, CaccioppoliForm, CheckRecord, DiagnosticsReport, InequalityReport, ProfileTable, PsiChoice, Verdict,
    WeightFunctions, SAMPLES_PER_DECADE,
};
use adlab::manifold::{check_comparison_bounds, ComparisonReport, ModelManifold};
use adlab::pde::{exhaustion_solve, radial_extension, solve_on_ball, Equation, ExhaustionReport, ExhaustionSetup, PolarGrid, ScalarField, Stage};
use adlab::young::{build_young_pair, YoungPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::{csv_rows, ArtifactDir, StageRecord};
use crate::config::{CheckKind, ExperimentConfig, ManifoldKind, RadiiUnit};
use crate::CliError;

/// Tolerance of the maximum principle check.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-10;
/// Largest admissible tail exponent of the weighted `F` density.
pub const TAIL_EXPONENT_MAX: f64 = -1.8;

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<String>,
    pub failed_checks: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failed_checks.is_empty() {
            0
        } else {
            3
        }
    }
}

pub struct Context {
    pub config: ExperimentConfig,
    pub out: ArtifactDir,
}

impl Context {
    pub fn new(config: ExperimentConfig) -> Result<Self, CliError> {
        config.validate()?;
        let out = ArtifactDir::new(config.output.dir.clone(), config.hash())?;
        Ok(Context { config, out })
    }

    fn manifold(&self) -> Result<Arc<ModelManifold<f64>>, CliError> {
        Ok(Arc::new(self.config.build_manifold()?))
    }

    fn comparison(&self, m: &ModelManifold<f64>) -> Result<Option<ComparisonReport>, CliError> {
        match (self.config.curvature(), self.config.eps_tilde()) {
            (Some(prof), Some(et)) => Ok(Some(check_comparison_bounds(m.warp(), &prof, et)?)),
            _ => Ok(None),
        }
    }

    fn comparison_r1(&self, m: &ModelManifold<f64>) -> Result<Option<f64>, CliError> {
        Ok(self.comparison(m)?.and_then(|c| c.r1))
    }

    fn pair(&self) -> Result<YoungPair<f64>, CliError> {
        let y = &self.config.young;
        Ok(build_young_pair(y.p, y.eps0, y.lambda)?)
    }

    fn radii(&self, m: &ModelManifold<f64>) -> Result<Vec<f64>, CliError> {
        let e = &self.config.experiment;
        let radii: Vec<f64> = match e.radii_unit {
            RadiiUnit::Absolute => e.radii.clone(),
            RadiiUnit::ComparisonR1 => {
                let r1 = self.comparison_r1(m)?.ok_or_else(|| {
                    CliError::Numeric(format!("comparison bounds do not settle before R_max = {}", m.r_max()))
                })?;
                e.radii.iter().map(|f| f * r1).collect()
            }
        };
        if !(e.r1 < radii[0]) {
            return Err(CliError::Validation {
                path: "experiment.r1".into(),
                reason: format!("extension radius {} must lie below the smallest radius {}", e.r1, radii[0]),
            });
        }
        if radii[radii.len() - 1] > m.r_max() {
            return Err(CliError::Validation {
                path: "manifold.R_max".into(),
                reason: format!("largest ball radius {} exceeds the warp table end {}", radii[radii.len() - 1], m.r_max()),
            });
        }
        Ok(radii)
    }

    fn setup(&self, refine: bool) -> ExhaustionSetup<f64> {
        let e = &self.config.experiment;
        let k = if refine { 2 } else { 1 };
        ExhaustionSetup { ds: e.ds / k as f64, n_theta: e.n_theta * k, mode: e.mode, r1: e.r1, parallel: true }
    }

    fn wants(&self, c: CheckKind) -> bool {
        self.config.diagnostics.checks.contains(&c)
    }

    /// Runs `f` and records the stage in the manifest whatever the result.
    pub fn stage(&self, command: &str, f: impl FnOnce(&Self) -> Result<Outcome, CliError>) -> Result<Outcome, CliError> {
        let res = f(self);
        let record = match &res {
            Ok(o) => StageRecord {
                command: command.into(),
                status: if o.failed_checks.is_empty() { "ok".into() } else { "diagnostic_failure".into() },
                exit_code: o.exit_code(),
                artifacts: o.artifacts.clone(),
                error: (!o.failed_checks.is_empty()).then(|| format!("failed checks: {}", o.failed_checks.join(", "))),
            },
            Err(e) => StageRecord {
                command: command.into(),
                status: "error".into(),
                exit_code: e.exit_code(),
                artifacts: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        self.out.record_stage(record)?;
        res
    }
}

#[derive(Serialize)]
struct ManifoldArtifact {
    record: adlab::manifold::ManifoldRecord,
    kind: ManifoldKind,
    audit: adlab::manifold::WarpAudit,
    comparison: Option<ComparisonReport>,
}

pub fn jacobi(ctx: &Context) -> Result<Outcome, CliError> {
    let m = ctx.manifold()?;
    let comparison = ctx.comparison(&m)?;
    let audit = m.warp().audit();
    let mut out = Outcome::default();
    let data = ManifoldArtifact { record: m.record(ctx.config.curvature().as_ref()), kind: ctx.config.manifold.kind, audit: audit.clone(), comparison: comparison.clone() };
    out.artifacts.push(ctx.out.write_json("manifold.json", "manifold", &data)?);
    out.artifacts.push(ctx.out.write_csv("manifold.csv", |b| Ok(m.write_csv(b)?))?);
    if !(audit.positive && audit.strictly_increasing) {
        out.failed_checks.push("warp_audit".into());
    }
    if let Some(c) = comparison {
        if c.r1.is_none() {
            out.failed_checks.push("comparison_bounds".into());
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct YoungArtifact {
    p: f64,
    eps0: f64,
    lambda: f64,
    delta: f64,
    t_small: f64,
    t_large: f64,
    t_table_min: f64,
    t_table_max: f64,
    f_table_max: f64,
    log_c: f64,
    t_delta: f64,
    ratio_at_min: f64,
    ratio_window: [f64; 2],
    young_inequality: SampleAudit,
    f_bound: SampleAudit,
}

#[derive(Serialize)]
struct SampleAudit {
    samples: usize,
    violations: usize,
    /// Largest `lhs / rhs` over the samples.
    worst_ratio: f64,
    seed: Option<u64>,
}

pub fn young(ctx: &Context) -> Result<Outcome, CliError> {
    let y = &ctx.config.young;
    let d = &ctx.config.diagnostics;
    let pair = ctx.pair()?;
    let p = pair.p;
    let t_delta = pair.delta_thresholds(y.delta)?;
    let t_min = pair.t_table_min();
    let ratio_at_min = pair.psi_ratio(t_min)?;
    let pm1 = p - 1.0;
    let expo = if pm1 > 0.0 { (p / pm1).min(p) } else { p };
    let window = [p / (1.0 + y.delta).powf(expo), 2.0 * p];

    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let mut yi = SampleAudit { samples: d.young_samples, violations: 0, worst_ratio: 0.0, seed: Some(d.seed) };
    for _ in 0..d.young_samples {
        let s = 10f64.powf(rng.gen_range(-12.0..(3.0 * p)));
        let v = 10f64.powf(rng.gen_range(-4.0..12.0));
        let rhs = pair.g_tilde(s)? + pair.f_tilde(v)?;
        let q = s * v / rhs;
        yi.worst_ratio = yi.worst_ratio.max(q);
        if q > 1.0 + 1e-9 {
            yi.violations += 1;
        }
    }
    let grid: Vec<f64> = (0..200).map(|i| 10f64.powf(-6.0 + 6.0 * i as f64 / 199.0)).collect();
    let mut fb = SampleAudit { samples: grid.len(), violations: 0, worst_ratio: 0.0, seed: None };
    let mut f_rows = Vec::new();
    for &t in &grid {
        let (lf, lb) = (pair.log_conjugate_f(t)?, pair.log_f_bound(t));
        fb.worst_ratio = fb.worst_ratio.max((lf - lb).exp());
        if lf > lb {
            fb.violations += 1;
        }
        f_rows.push(vec![t, lf, lb]);
    }
    let data = YoungArtifact {
        p,
        eps0: pair.eps0,
        lambda: pair.lambda,
        delta: y.delta,
        t_small: pair.t_small,
        t_large: pair.t_large,
        t_table_min: t_min,
        t_table_max: pair.t_table_max(),
        f_table_max: pair.f_table_max(),
        log_c: pair.log_c,
        t_delta,
        ratio_at_min,
        ratio_window: window,
        young_inequality: yi,
        f_bound: fb,
    };
    let mut out = Outcome::default();
    if data.young_inequality.violations > 0 {
        out.failed_checks.push("young_inequality".into());
    }
    if data.f_bound.violations > 0 {
        out.failed_checks.push("f_bound".into());
    }
    if !(ratio_at_min >= window[0] && ratio_at_min <= window[1]) {
        out.failed_checks.push("psi_ratio_window".into());
    }
    out.artifacts.push(ctx.out.write_json("young.json", "young", &data)?);
    let (lo, hi) = (t_min.ln(), pair.t_table_max().ln());
    let mut rows = Vec::new();
    for i in 0..=400 {
        let t = (lo + (hi - lo) * i as f64 / 400.0).exp().min(pair.t_table_max());
        rows.push(vec![t, pair.log_phi(t)?, pair.log_phi_prime(t)?, pair.log_psi(t)?, pair.psi_ratio(t)?]);
    }
    out.artifacts.push(ctx.out.write_csv("young.csv", |b| csv_rows(b, &["t", "log_phi", "log_phi_prime", "log_psi", "psi_ratio"], rows))?);
    out.artifacts.push(ctx.out.write_csv("young_f.csv", |b| csv_rows(b, &["t", "log_F", "log_bound"], f_rows))?);
    Ok(out)
}

fn max_principle(u: &ScalarField<f64>, boundary: &[f64], resolution: &str, radius: f64) -> CheckRecord {
    let (bmin, bmax) = boundary.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (umin, umax) = (u.min(), u.max());
    let excess = (bmin - umin).max(umax - bmax).max(0.0);
    let mut c = CheckRecord::flag(&format!("max_principle[R={radius:.6}]"), excess <= MAX_PRINCIPLE_TOL, resolution, format!("boundary [{bmin:e}, {bmax:e}], solution [{umin:e}, {umax:e}]"));
    c.slack = Some(excess);
    c.tolerance = Some(MAX_PRINCIPLE_TOL);
    c
}

fn resolution(g: &PolarGrid<f64>) -> String {
    format!("{}x{}", g.n_r(), g.n_theta())
}

pub fn solve(ctx: &Context) -> Result<Outcome, CliError> {
    let m = ctx.manifold()?;
    let radii = ctx.radii(&m)?;
    let radius = radii[radii.len() - 1];
    let s = ctx.setup(false);
    let grid = Arc::new(PolarGrid::with_spacing(m, radius, s.ds, s.n_theta, s.mode)?);
    let theta = radial_extension(&ctx.config.experiment.boundary, &grid, s.r1)?;
    let boundary = theta.boundary_values();
    let sol = solve_on_ball(&grid, &boundary, &ctx.config.solver)?;
    let check = max_principle(&sol.field, &boundary, &resolution(&grid), grid.radius());
    let mut out = Outcome::default();
    if !check.passed {
        out.failed_checks.push(check.name.clone());
    }
    let data = json!({ "radius": grid.radius(), "grid": resolution(&grid), "report": sol.report, "max_principle": check });
    out.artifacts.push(ctx.out.write_json("solve.json", "solve", &data)?);
    out.artifacts.push(ctx.out.write_csv("solution.csv", |b| Ok(sol.field.write_csv(b)?))?);
    Ok(out)
}

/// Inequality checks on one stage.
struct StageChecks {
    caccioppoli_square: InequalityReport,
    caccioppoli_young: InequalityReport,
    poincare: Option<InequalityReport>,
    nu: f64,
    /// `u` and `theta` agree to rounding, so both sides are noise.
    vacuous: bool,
}

/// Relative size of `sup|u - theta|` below which the inequality checks are vacuous.
const ROUNDING_FLOOR: f64 = 1e-12;

fn stage_checks(ctx: &Context, st: &Stage<f64>, pair: &YoungPair<f64>, weights: Option<&WeightFunctions<f64>>) -> Result<StageChecks, CliError> {
    let d = &ctx.config.diagnostics;
    let u = &st.solution.as_ref().map_err(|e| CliError::Numeric(e.to_string()))?.field;
    let sup = u.zip_with(&st.theta, |a, b| a - b)?.sup_norm();
    let nu = choose_nu(sup, pair.delta_thresholds(ctx.config.young.delta)?)?;
    let g = &st.grid;
    let r_out = (d.eta_outer * st.radius).min(g.radii()[g.n_r() - 1]);
    let eta = radial_tent(g, (d.eta_inner * st.radius).min(0.5 * r_out), r_out)?;
    let form = match ctx.config.solver.equation {
        Equation::MinimalGraph => CaccioppoliForm::MinimalGraph,
        Equation::PLaplace { p } => CaccioppoliForm::PLaplace { p },
    };
    let tol = d.tol_disc;
    let mut sq = caccioppoli_check(u, &st.theta, nu, &eta, PsiChoice::Square, form, tol)?;
    sq.name.push_str("_square");
    let mut yg = caccioppoli_check(u, &st.theta, nu, &eta, PsiChoice::Young(pair), form, tol)?;
    yg.name.push_str("_young");
    let mut poincare = match weights {
        Some(w) => Some(poincare_check(u, &st.theta, nu, pair, w, tol)?),
        None => None,
    };
    let vacuous = sup <= ROUNDING_FLOOR * (1.0 + st.theta.sup_norm());
    if vacuous {
        for r in [Some(&mut sq), Some(&mut yg), poincare.as_mut()].into_iter().flatten() {
            r.passed = true;
            r.slack = 0.0;
        }
    }
    Ok(StageChecks { caccioppoli_square: sq, caccioppoli_young: yg, poincare, nu, vacuous })
}

fn push_inequality(rep: &mut DiagnosticsReport, r: &InequalityReport, radius: f64, sc: &StageChecks) {
    let mut c = CheckRecord::from_inequality(r);
    c.name = format!("{}[R={radius:.6}]", r.name);
    c.note = format!("{}; nu {}", c.note, sc.nu);
    if sc.vacuous {
        c.note.push_str("; u and theta agree to rounding");
    }
    rep.push(c);
}

fn slack_trend(rep: &mut DiagnosticsReport, name: &str, coarse: &InequalityReport, fine: &InequalityReport) {
    let passed = fine.slack <= coarse.slack;
    let note = format!(
        "slack {:e} -> {:e}, ratio {:?} -> {:?}",
        coarse.slack, fine.slack, coarse.ratio, fine.ratio
    );
    let mut c = CheckRecord::flag(&format!("{name}_refinement"), passed, &format!("{}x{} -> {}x{}", coarse.n_r, coarse.n_theta, fine.n_r, fine.n_theta), note);
    c.lhs = Some(fine.slack);
    c.rhs = Some(coarse.slack);
    rep.push(c);
}

#[derive(Serialize)]
struct ExhaustArtifact {
    report: ExhaustionReport,
    stage_files: Vec<String>,
    solve_reports: Vec<Option<adlab::pde::SolveReport>>,
}

pub fn exhaust(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let m = ctx.manifold()?;
    let radii = ctx.radii(&m)?;
    let data = &cfg.experiment.boundary;
    let (stages, report) = exhaustion_solve(&m, data, &radii, &ctx.setup(false), &cfg.solver)?;
    let mut out = Outcome::default();
    let mut files = Vec::new();
    for (k, st) in stages.iter().enumerate() {
        if let Ok(sol) = &st.solution {
            let name = format!("solutions/u_{k}.csv");
            files.push(ctx.out.write_csv(&name, |b| Ok(sol.field.write_csv(b)?))?);
        }
    }
    let art = ExhaustArtifact {
        report: report.clone(),
        stage_files: files.clone(),
        solve_reports: stages.iter().map(|s| s.solution.as_ref().ok().map(|x| x.report.clone())).collect(),
    };
    out.artifacts.push(ctx.out.write_json("exhaustion.json", "exhaustion", &art)?);
    out.artifacts.extend(files);
    let osc_rows: Vec<Vec<f64>> = report
        .oscillation
        .iter()
        .enumerate()
        .flat_map(|(k, prof)| prof.iter().map(move |&(r, o)| vec![k as f64, r, o]))
        .collect();
    out.artifacts.push(ctx.out.write_csv("oscillation.csv", |b| csv_rows(b, &["stage", "r", "oscillation"], osc_rows))?);

    let rep = diagnostics(ctx, &m, &stages, &report)?;
    out.artifacts.push(ctx.out.write_json("diagnostics.json", "diagnostics", &rep)?);
    for t in &rep.profiles {
        let name = format!("profiles/{}.csv", t.name);
        out.artifacts.push(ctx.out.write_csv(&name, |b| Ok(t.write_csv(b)?))?);
    }
    out.failed_checks = rep.failed().into_iter().map(String::from).collect();
    if !report.failures.is_empty() {
        let msg = report.failures.iter().map(|(k, e)| format!("stage {k}: {e}")).collect::<Vec<_>>().join("; ");
        return Err(CliError::Numeric(format!("exhaustion stages failed ({msg}); artifacts of the other stages were kept")));
    }
    Ok(out)
}

/// Strictly decreasing, or identically zero up to rounding (as for constant data).
fn decreasing_or_vanishing(v: &[f64], scale: f64) -> bool {
    let tiny = 1e-12 * (1.0 + scale);
    !v.is_empty() && (v.iter().all(|x| x.abs() <= tiny) || v.windows(2).all(|w| w[1] < w[0]))
}

fn diagnostics(ctx: &Context, m: &Arc<ModelManifold<f64>>, stages: &[Stage<f64>], report: &ExhaustionReport) -> Result<DiagnosticsReport, CliError> {
    let cfg = &ctx.config;
    let d = &cfg.diagnostics;
    let mut rep = DiagnosticsReport::default();
    let ok: Vec<&Stage<f64>> = stages.iter().filter(|s| s.solution.is_ok()).collect();
    let last_res = ok.last().map(|s| resolution(&s.grid)).unwrap_or_default();

    if ctx.wants(CheckKind::MaxPrinciple) {
        for st in &ok {
            let u = &st.solution.as_ref().expect("filtered").field;
            rep.push(max_principle(u, &st.theta.boundary_values(), &resolution(&st.grid), st.radius));
        }
    }
    if ctx.wants(CheckKind::Cauchy) {
        let c = &report.cauchy_differences;
        let mut rec = CheckRecord::flag("cauchy_decreasing", decreasing_or_vanishing(c, report.data_sup), &last_res, format!("core radius {}, differences {c:?}", report.core_radius));
        rec.lhs = c.last().copied();
        rep.push(rec);
        rep.push_profile(ProfileTable::from_pairs("cauchy", ["radius", "sup_difference"], &report.radii[1..].iter().copied().zip(c.iter().copied()).collect::<Vec<_>>()));
    }
    if ctx.wants(CheckKind::Attainment) && ok.len() >= 2 {
        let pairs: Vec<_> = ok.iter().map(|s| (&s.solution.as_ref().expect("filtered").field, &s.theta)).collect();
        let a = attainment_profile(&pairs, d.attainment_fraction)?;
        rep.push(CheckRecord::flag("attainment_decreasing", a.strictly_decreasing || decreasing_or_vanishing(&a.oscillation, report.data_sup), &last_res, format!("fraction {}", a.fraction)));
        rep.push_profile(ProfileTable::from_pairs("attainment", ["radius", "oscillation"], &a.radii.iter().copied().zip(a.oscillation.iter().copied()).collect::<Vec<_>>()));
    }

    let pair = ctx.pair()?;
    let r1w = ctx.comparison_r1(m)?;
    let weights = match (r1w, cfg.eps_tilde()) {
        (Some(r1), Some(et)) => Some(WeightFunctions::new(m.clone(), cfg.young.p, et, r1)?),
        _ => None,
    };
    let need_ineq = ctx.wants(CheckKind::Caccioppoli) || ctx.wants(CheckKind::Poincare);
    if need_ineq {
        let mut coarse = None;
        for st in &ok {
            let sc = stage_checks(ctx, st, &pair, weights.as_ref())?;
            if ctx.wants(CheckKind::Caccioppoli) {
                push_inequality(&mut rep, &sc.caccioppoli_square, st.radius, &sc);
                push_inequality(&mut rep, &sc.caccioppoli_young, st.radius, &sc);
            }
            if ctx.wants(CheckKind::Poincare) {
                if let Some(pc) = &sc.poincare {
                    push_inequality(&mut rep, pc, st.radius, &sc);
                }
            }
            coarse = Some(sc);
        }
        if cfg.experiment.refine {
            if let Some(coarse) = coarse {
                let (fine_stages, _) = exhaustion_solve(m, &cfg.experiment.boundary, &ok.iter().map(|s| s.radius).collect::<Vec<_>>(), &ctx.setup(true), &cfg.solver)?;
                let st = fine_stages.last().expect("non-empty");
                let fine = stage_checks(ctx, st, &pair, weights.as_ref())?;
                if ctx.wants(CheckKind::Caccioppoli) {
                    slack_trend(&mut rep, "caccioppoli_young", &coarse.caccioppoli_young, &fine.caccioppoli_young);
                }
                if let (true, Some(a), Some(b)) = (ctx.wants(CheckKind::Poincare), &coarse.poincare, &fine.poincare) {
                    slack_trend(&mut rep, "weighted_poincare", a, b);
                }
            }
        }
    }
    if let Some(w) = &weights {
        if ctx.wants(CheckKind::GradW) {
            let a = w.grad_w_audit();
            let passed = a.r2.is_some() && a.max_ratio_beyond <= 1.0 + 1e-12;
            let mut c = CheckRecord::flag("grad_w_bound", passed, &format!("{} warp nodes", a.nodes_checked), format!("R2 {:?}, core bound {:e}", a.r2, a.core_bound));
            c.lhs = Some(a.max_ratio_beyond);
            c.rhs = Some(1.0);
            rep.push(c);
            let radii: Vec<f64> = m.warp().nodes().iter().copied().filter(|&r| r > 0.0).step_by(8).collect();
            let mut t = ProfileTable::new("weights", &["r", "E", "C", "L", "w", "grad_w"]);
            t.rows = w.tabulate(&radii).iter().map(|r| vec![r.r, r.e, r.c, r.l, r.w, r.grad_w]).collect();
            rep.push_profile(t);
        }
        if ctx.wants(CheckKind::Laplacian) {
            let a = w.laplacian_audit()?;
            let mut c = CheckRecord::flag("laplacian_bound", a.violations == 0, &format!("{} warp nodes", a.nodes_checked), format!("worst radius {:e}", a.worst_radius));
            c.lhs = Some(a.min_margin);
            rep.push(c);
        }
        if ctx.wants(CheckKind::WeightedF) {
            let r_max = d.weighted_f_r_max.unwrap_or(m.r_max());
            let f = weighted_f_integral(&cfg.experiment.boundary, cfg.experiment.r1, cfg.experiment.mode, &pair, w, d.weighted_f_c0, r_max, SAMPLES_PER_DECADE)?;
            let passed = f.verdict == Verdict::ConvergentTrend && f.tail_exponent <= TAIL_EXPONENT_MAX;
            let mut c = CheckRecord::flag("weighted_f_integral", passed, &format!("{} radii", f.radii.len()), format!("verdict {:?}", f.verdict));
            c.lhs = Some(f.tail_exponent);
            c.rhs = Some(TAIL_EXPONENT_MAX);
            rep.push(c);
            let mut t = ProfileTable::new("weighted_f", &["r", "log_density", "log_partial"]);
            t.rows = (0..f.radii.len()).map(|i| vec![f.radii[i], f.log_density[i], f.log_partial[i]]).collect();
            rep.push_profile(t);
        }
    }
    if ctx.wants(CheckKind::WDecay) && cfg.solver.equation == Equation::MinimalGraph && !ok.is_empty() {
        let us: Vec<_> = ok.iter().map(|s| &s.solution.as_ref().expect("filtered").field).collect();
        let reps = w_decay_check(&us)?;
        let last = reps.last().expect("non-empty");
        let mut c = CheckRecord::flag("w_decay", last.decreasing_trend, &last_res, format!("decreasing fraction {:.3}", last.decreasing_fraction));
        c.lhs = Some(last.outer_half_slope);
        rep.push(c);
        rep.push_profile(ProfileTable::from_pairs("w_decay", ["r", "r_grad_log_w"], &last.profile));
    }
    if ctx.wants(CheckKind::Structure) {
        if let Equation::PLaplace { p } = cfg.solver.equation {
            // structure constants of the p-Laplacian are alpha = beta = 1
            let n = cfg.manifold.n as f64;
            let mut c = CheckRecord::flag("structure_exponent", p < n, "", format!("p = {p}, n alpha / beta = {n}"));
            c.lhs = Some(p);
            c.rhs = Some(n);
            rep.push(c);
        }
    }
    Ok(rep)
}

pub fn parabolicity(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let m = ctx.manifold()?;
    let d = &cfg.diagnostics;
    let exponent = d.parabolicity_exponent.unwrap_or(cfg.p());
    let r_max = d.parabolicity_r_max.unwrap_or(m.r_max());
    let r0 = d.parabolicity_r0.unwrap_or((0.1 * r_max).min(5.0));
    let rep = parabolicity_test(&m, exponent, r0, r_max)?;
    let mut out = Outcome::default();
    out.artifacts.push(ctx.out.write_json("parabolicity.json", "parabolicity", &json!({ "exponent": exponent, "r0": r0, "report": rep }))?);
    let rows: Vec<Vec<f64>> = rep.radii.iter().zip(&rep.partial_integrals).map(|(&r, &i)| vec![r, i]).collect();
    out.artifacts.push(ctx.out.write_csv("parabolicity.csv", |b| csv_rows(b, &["R", "I"], rows))?);
    Ok(out)
}

/// Artifacts `report` needs and the subcommand producing each.
pub const REPORT_INPUTS: [(&str, &str); 4] =
    [("manifold.json", "jacobi"), ("young.json", "young"), ("exhaustion.json", "exhaust"), ("diagnostics.json", "exhaust")];

pub fn report(ctx: &Context) -> Result<Outcome, CliError> {
    let mut missing = Vec::new();
    let mut docs = serde_json::Map::new();
    for (file, cmd) in REPORT_INPUTS {
        match ctx.out.read_json(file)? {
            Some(env) if env.config_hash == ctx.out.hash() => {
                docs.insert(file.trim_end_matches(".json").into(), env.data);
            }
            Some(_) => missing.push(format!("{file} is from a different config (run `{cmd}`)")),
            None => missing.push(format!("{file} (run `{cmd}`)")),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Dependency(missing));
    }
    let par = ctx.out.read_json("parabolicity.json")?.filter(|e| e.config_hash == ctx.out.hash()).map(|e| e.data);
    let checks = docs["diagnostics"]["checks"].as_array().cloned().unwrap_or_default();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c["passed"] == Value::Bool(false))
        .filter_map(|c| c["name"].as_str().map(String::from))
        .collect();
    let summary = json!({
        "name": ctx.config.name,
        "manifold": {
            "n": docs["manifold"]["record"]["n"],
            "kind": docs["manifold"]["kind"],
            "comparison": docs["manifold"]["comparison"],
        },
        "young": {
            "t_delta": docs["young"]["t_delta"],
            "ratio_at_min": docs["young"]["ratio_at_min"],
            "young_inequality_violations": docs["young"]["young_inequality"]["violations"],
            "f_bound_violations": docs["young"]["f_bound"]["violations"],
        },
        "exhaustion": {
            "radii": docs["exhaustion"]["report"]["radii"],
            "cauchy_differences": docs["exhaustion"]["report"]["cauchy_differences"],
            "core_deviation_from_mean": docs["exhaustion"]["report"]["core_deviation_from_mean"],
            "failures": docs["exhaustion"]["report"]["failures"],
        },
        "parabolicity": par.as_ref().map(|p| json!({ "exponent": p["exponent"], "verdict": p["report"]["verdict"], "fit": p["report"]["fit"]["best"] })),
        "checks_total": checks.len(),
        "checks_failed": failed,
    });
    let mut out = Outcome::default();
    out.artifacts.push(ctx.out.write_json("summary.json", "summary", &summary)?);
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["name", "passed", "lhs", "rhs", "slack", "tolerance", "resolution"]).map_err(err)?;
        let num = |v: &Value| v.as_f64().map(|x| format!("{x:e}")).unwrap_or_default();
        for c in &checks {
            w.write_record([
                c["name"].as_str().unwrap_or_default().to_string(),
                c["passed"].to_string(),
                num(&c["lhs"]),
                num(&c["rhs"]),
                num(&c["slack"]),
                num(&c["tolerance"]),
                c["resolution"].as_str().unwrap_or_default().to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    out.artifacts.push(ctx.out.write_csv("summary_checks.csv", |b| {
        b.extend_from_slice(&buf);
        Ok(())
    })?);
    out.failed_checks = failed;
    Ok(out)
}

pub type CommandFn = fn(&Context) -> Result<Outcome, CliError>;

/// Runs every stage in order; later stages still run after a failure.
pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let mut all = Outcome::default();
    let mut first_err = None;
    let steps: [(&str, CommandFn); 5] =
        [("jacobi", jacobi), ("young", young), ("exhaust", exhaust), ("parabolicity", parabolicity), ("report", report)];
    ctx.out.write_text("config.toml", &ctx.config.to_toml())?;
    for (name, f) in steps {
        match ctx.stage(name, f) {
            Ok(o) => {
                all.artifacts.extend(o.artifacts);
                for c in o.failed_checks {
                    if !all.failed_checks.contains(&c) {
                        all.failed_checks.push(c);
                    }
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(all),
    }
}
