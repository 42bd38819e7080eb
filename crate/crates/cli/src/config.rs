//! Experiment configuration, presets and validation.

use std::path::{Path, PathBuf};

use adlab::manifold::{CurvatureProfile, JacobiOptions, ModelManifold, RadialProfile};
use adlab::pde::{AngularMode, BoundaryData, Equation, SolverConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// Allows minimal-graph runs in dimension 2.
    #[serde(default)]
    pub exploratory: bool,
    pub manifold: ManifoldBlock,
    #[serde(default)]
    pub young: YoungBlock,
    pub solver: SolverConfig<f64>,
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub diagnostics: DiagnosticsBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    /// Curvature equal to the upper envelope `-(1+eps)/(r^2 log r)` outside the core.
    Comparison,
    Flat,
    Hyperbolic,
    /// `K = -1/(r^2 log r)`.
    Borderline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldBlock {
    pub n: usize,
    #[serde(default = "default_kind")]
    pub kind: ManifoldKind,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub eps_bar: Option<f64>,
    #[serde(default = "default_r0", rename = "R0")]
    pub r0: f64,
    #[serde(default = "default_cap")]
    pub cap: f64,
    #[serde(default = "default_r_max", rename = "R_max")]
    pub r_max: f64,
    #[serde(default = "default_ode_tol")]
    pub ode_tol: f64,
    #[serde(default = "default_ode_ds")]
    pub ode_ds: f64,
}

fn default_kind() -> ManifoldKind {
    ManifoldKind::Comparison
}
fn default_r0() -> f64 {
    8.0
}
fn default_cap() -> f64 {
    0.25
}
fn default_r_max() -> f64 {
    1e4
}
fn default_ode_tol() -> f64 {
    1e-10
}
fn default_ode_ds() -> f64 {
    0.005
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YoungBlock {
    pub p: f64,
    pub eps0: f64,
    pub lambda: f64,
    /// Slack `delta` in the two-sided bounds on `psi'/phi'^p`.
    pub delta: f64,
}

impl Default for YoungBlock {
    fn default() -> Self {
        YoungBlock { p: 2.0, eps0: 0.5, lambda: 1.25, delta: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiiUnit {
    Absolute,
    /// Multiples of the radius where the comparison bounds start to hold.
    ComparisonR1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub boundary: BoundaryData<f64>,
    /// Extension radius of the boundary data.
    #[serde(default = "default_r1")]
    pub r1: f64,
    pub radii: Vec<f64>,
    #[serde(default = "default_unit")]
    pub radii_unit: RadiiUnit,
    /// Node spacing in `s = log(1 + r)`.
    #[serde(default = "default_ds")]
    pub ds: f64,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_mode")]
    pub mode: AngularMode,
    /// Repeat the exhaustion at half the spacing for the refinement study.
    #[serde(default = "default_true")]
    pub refine: bool,
}

fn default_r1() -> f64 {
    1.0
}
fn default_unit() -> RadiiUnit {
    RadiiUnit::Absolute
}
fn default_ds() -> f64 {
    0.05
}
fn default_n_theta() -> usize {
    32
}
fn default_mode() -> AngularMode {
    AngularMode::Axisymmetric
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    MaxPrinciple,
    Cauchy,
    Attainment,
    Caccioppoli,
    Poincare,
    GradW,
    Laplacian,
    WDecay,
    WeightedF,
    Structure,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::MaxPrinciple,
        CheckKind::Cauchy,
        CheckKind::Attainment,
        CheckKind::Caccioppoli,
        CheckKind::Poincare,
        CheckKind::GradW,
        CheckKind::Laplacian,
        CheckKind::WDecay,
        CheckKind::WeightedF,
        CheckKind::Structure,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsBlock {
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckKind>,
    #[serde(default = "default_tol_disc")]
    pub tol_disc: f64,
    /// Defaults to `eps / 2`.
    #[serde(default)]
    pub eps_tilde: Option<f64>,
    /// Cutoff is `1` inside `eta_inner * R` and `0` beyond `eta_outer * R`.
    #[serde(default = "default_eta_inner")]
    pub eta_inner: f64,
    #[serde(default = "default_eta_outer")]
    pub eta_outer: f64,
    /// Sphere radius of the attainment profile as a fraction of each ball radius.
    #[serde(default = "default_fraction")]
    pub attainment_fraction: f64,
    #[serde(default = "default_c0")]
    pub weighted_f_c0: f64,
    /// Defaults to the warp table end.
    #[serde(default)]
    pub weighted_f_r_max: Option<f64>,
    /// Exponent of the parabolicity integral; defaults to the Young exponent.
    #[serde(default)]
    pub parabolicity_exponent: Option<f64>,
    /// Defaults to `min(5, R_max / 10)`.
    #[serde(default)]
    pub parabolicity_r0: Option<f64>,
    /// Defaults to the warp table end.
    #[serde(default)]
    pub parabolicity_r_max: Option<f64>,
    /// Random pairs for the Young inequality audit.
    #[serde(default = "default_samples")]
    pub young_samples: usize,
    /// Seed of the randomized property sampling.
    #[serde(default)]
    pub seed: u64,
}

fn all_checks() -> Vec<CheckKind> {
    CheckKind::ALL.to_vec()
}
fn default_tol_disc() -> f64 {
    0.05
}
fn default_eta_inner() -> f64 {
    0.5
}
fn default_eta_outer() -> f64 {
    0.9
}
fn default_fraction() -> f64 {
    0.5
}
fn default_c0() -> f64 {
    1.0
}
fn default_samples() -> usize {
    10_000
}

impl Default for DiagnosticsBlock {
    fn default() -> Self {
        DiagnosticsBlock {
            checks: all_checks(),
            tol_disc: default_tol_disc(),
            eps_tilde: None,
            eta_inner: default_eta_inner(),
            eta_outer: default_eta_outer(),
            attainment_fraction: default_fraction(),
            weighted_f_c0: default_c0(),
            weighted_f_r_max: None,
            parabolicity_exponent: None,
            parabolicity_r0: None,
            parabolicity_r_max: None,
            young_samples: default_samples(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("out") }
    }
}

fn invalid(path: &str, reason: impl Into<String>) -> CliError {
    CliError::Validation { path: path.to_string(), reason: reason.into() }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| invalid("<config>", e.message().to_string() + &span_hint(text, e.span())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is plain data")
    }

    /// SHA-256 of the canonical JSON form; the output directory does not enter the hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputBlock::default();
        let bytes = serde_json::to_vec(&c).expect("config is plain data");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn eps_tilde(&self) -> Option<f64> {
        self.diagnostics.eps_tilde.or(self.manifold.eps.map(|e| 0.5 * e))
    }

    pub fn curvature(&self) -> Option<CurvatureProfile<f64>> {
        let m = &self.manifold;
        match (m.kind, m.eps, m.eps_bar) {
            (ManifoldKind::Comparison, Some(eps), Some(eps_bar)) => CurvatureProfile::new(eps, eps_bar, m.r0, m.cap).ok(),
            _ => None,
        }
    }

    pub fn radial_profile(&self) -> RadialProfile<f64> {
        let m = &self.manifold;
        match m.kind {
            ManifoldKind::Flat => RadialProfile::flat(),
            ManifoldKind::Hyperbolic => RadialProfile::hyperbolic(),
            ManifoldKind::Borderline => RadialProfile::borderline(m.r0, m.cap),
            ManifoldKind::Comparison => self.curvature().expect("validated").upper(),
        }
    }

    pub fn build_manifold(&self) -> Result<ModelManifold<f64>, CliError> {
        let m = &self.manifold;
        let opts = JacobiOptions { tol: m.ode_tol, ds: m.ode_ds };
        Ok(ModelManifold::build(m.n, self.radial_profile(), m.r_max, &opts)?)
    }

    pub fn p(&self) -> f64 {
        match self.solver.equation {
            Equation::PLaplace { p } => p,
            Equation::MinimalGraph => self.young.p,
        }
    }

    /// Field-level and cross-field checks.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.manifold;
        if m.n < 2 {
            return Err(invalid("manifold.n", format!("dimension must be at least 2, got {}", m.n)));
        }
        if !(m.r_max > 0.0 && m.r_max.is_finite()) {
            return Err(invalid("manifold.R_max", "must be positive and finite"));
        }
        if !(m.ode_tol > 0.0) || !(m.ode_ds > 0.0) {
            return Err(invalid("manifold.ode_tol", "ODE tolerance and node spacing must be positive"));
        }
        match m.kind {
            ManifoldKind::Comparison => {
                let (Some(eps), Some(eps_bar)) = (m.eps, m.eps_bar) else {
                    return Err(invalid("manifold.eps", "comparison manifolds need both eps and eps_bar"));
                };
                if !(eps > eps_bar && eps_bar > 0.0) {
                    return Err(invalid(
                        "manifold.eps_bar",
                        format!("the curvature hypothesis needs constants eps > eps_bar > 0, got eps = {eps}, eps_bar = {eps_bar}"),
                    ));
                }
                CurvatureProfile::new(eps, eps_bar, m.r0, m.cap).map_err(|e| invalid("manifold.R0", e.to_string()))?;
            }
            ManifoldKind::Borderline => {
                RadialProfile::borderline(m.r0, m.cap).validate().map_err(|e| invalid("manifold.R0", e.to_string()))?;
            }
            _ => {}
        }
        let y = &self.young;
        if !(y.p >= 1.0) || !(y.eps0 > 0.0 && y.eps0 < 1.0) || !(y.lambda > 1.0 && y.lambda < 1.0 + y.eps0) {
            return Err(invalid("young", "need p >= 1, 0 < eps0 < 1 and 1 < lambda < 1 + eps0"));
        }
        if !(y.delta > 0.0) {
            return Err(invalid("young.delta", "must be positive"));
        }
        self.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
        match self.solver.equation {
            Equation::PLaplace { p } if p != y.p => {
                return Err(invalid("young.p", format!("exponent {} differs from the solver exponent {p}", y.p)));
            }
            Equation::MinimalGraph if m.n < 3 && !self.exploratory => {
                return Err(invalid("manifold.n", "minimal graph runs need n >= 3; set `exploratory = true` for n = 2"));
            }
            _ => {}
        }
        let e = &self.experiment;
        e.boundary.validate().map_err(|err| invalid("experiment.boundary", err.to_string()))?;
        if e.radii.is_empty() || e.radii.iter().any(|r| !(*r > 0.0)) || e.radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("experiment.radii", "must be positive and strictly increasing"));
        }
        if e.radii_unit == RadiiUnit::ComparisonR1 && m.kind != ManifoldKind::Comparison {
            return Err(invalid("experiment.radii_unit", "comparison_r1 needs a comparison manifold"));
        }
        if e.radii_unit == RadiiUnit::Absolute && !(e.r1 < e.radii[0]) {
            return Err(invalid("experiment.r1", format!("extension radius {} must lie below the smallest radius {}", e.r1, e.radii[0])));
        }
        if !(e.r1 > 0.0) {
            return Err(invalid("experiment.r1", "must be positive"));
        }
        if !(e.ds > 0.0) || e.n_theta < 4 {
            return Err(invalid("experiment.ds", "need ds > 0 and n_theta >= 4"));
        }
        if e.mode == AngularMode::Full && m.n != 2 {
            return Err(invalid("experiment.mode", "the full-circle layout is for n = 2"));
        }
        let d = &self.diagnostics;
        if !(d.tol_disc >= 0.0) {
            return Err(invalid("diagnostics.tol_disc", "must be non-negative"));
        }
        if !(0.0 <= d.eta_inner && d.eta_inner < d.eta_outer && d.eta_outer < 1.0) {
            return Err(invalid("diagnostics.eta_outer", "need 0 <= eta_inner < eta_outer < 1"));
        }
        if !(d.attainment_fraction > 0.0 && d.attainment_fraction <= 1.0) {
            return Err(invalid("diagnostics.attainment_fraction", "must lie in (0, 1]"));
        }
        if let (Some(et), Some(eps)) = (self.eps_tilde(), m.eps) {
            if !(et > 0.0 && et < eps) {
                return Err(invalid("diagnostics.eps_tilde", format!("must lie in (0, eps) = (0, {eps})")));
            }
        }
        if let Some(q) = d.parabolicity_exponent {
            if !(q > 1.0) {
                return Err(invalid("diagnostics.parabolicity_exponent", "must exceed 1"));
            }
        }
        Ok(())
    }
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(s) => {
            let line = text[..s.start.min(text.len())].lines().count().max(1);
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

pub const PRESETS: [&str; 4] = ["p-laplace", "minimal-graph", "flat-counterexample", "borderline-parabolic"];

/// Built-in configurations.
pub fn preset(name: &str) -> Result<ExperimentConfig, CliError> {
    let text = match name {
        "p-laplace" => P_LAPLACE,
        "minimal-graph" => MINIMAL_GRAPH,
        "flat-counterexample" => FLAT,
        "borderline-parabolic" => BORDERLINE,
        _ => return Err(invalid("--preset", format!("unknown preset `{name}`; available: {}", PRESETS.join(", ")))),
    };
    ExperimentConfig::from_toml(text)
}

const P_LAPLACE: &str = r#"
name = "p-laplace"

[manifold]
n = 3
kind = "comparison"
eps = 1.0
eps_bar = 0.5

[young]
p = 2.0
eps0 = 0.5
lambda = 1.25
delta = 0.2

[solver.equation]
kind = "p_laplace"
p = 2.0

[experiment]
boundary = { kind = "cosine", amplitude = 1.0, k = 1, offset = 0.0 }
radii = [1.0, 2.0, 4.0, 8.0]
radii_unit = "comparison_r1"

[diagnostics]
checks = ["max_principle", "cauchy", "attainment", "caccioppoli", "poincare", "grad_w", "laplacian", "weighted_f", "structure"]
"#;

const MINIMAL_GRAPH: &str = r#"
name = "minimal-graph"

[manifold]
n = 3
kind = "comparison"
eps = 1.0
eps_bar = 0.5

[solver.equation]
kind = "minimal_graph"

[experiment]
boundary = { kind = "cosine", amplitude = 1.0, k = 1, offset = 0.0 }
radii = [1.0, 2.0, 4.0, 8.0]
radii_unit = "comparison_r1"

[diagnostics]
checks = ["max_principle", "cauchy", "attainment", "caccioppoli", "poincare", "grad_w", "laplacian", "w_decay", "weighted_f"]
"#;

const FLAT: &str = r#"
name = "flat-counterexample"

[manifold]
n = 3
kind = "flat"
R_max = 100.0

[solver.equation]
kind = "minimal_graph"

[experiment]
boundary = { kind = "cosine", amplitude = 1.0, k = 1, offset = 0.0 }
radii = [4.0, 8.0, 16.0, 32.0]

[diagnostics]
checks = ["max_principle"]
parabolicity_exponent = 3.0
"#;

const BORDERLINE: &str = r#"
name = "borderline-parabolic"

[manifold]
n = 2
kind = "borderline"
R0 = 3.0
cap = 0.5
R_max = 1e6

[solver.equation]
kind = "p_laplace"
p = 2.0

[experiment]
boundary = { kind = "cosine", amplitude = 1.0, k = 1, offset = 0.0 }
radii = [4.0, 8.0, 16.0]
mode = "full"

[diagnostics]
checks = ["max_principle"]
"#;
