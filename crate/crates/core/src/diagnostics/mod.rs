//! Numerical checks of the inequalities and criteria behind solvability at infinity.

mod growth;
mod inequalities;
mod parabolicity;
mod profiles;
mod weights;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

pub use growth::{fit_growth, slope, Candidate, GrowthClass, GrowthFit, Verdict};
pub use inequalities::{caccioppoli_check, choose_nu, poincare_check, radial_tent, CaccioppoliForm, InequalityReport, PsiChoice, TOL_DISC};
pub use parabolicity::{parabolicity_test, parabolicity_test_delta, ParabolicityReport, SAMPLES_PER_DECADE};
pub use profiles::{
    attainment_profile, oscillation_profile, w_decay_check, w_decay_profile, weighted_f_integral, AttainmentReport, WDecayReport,
    WeightedFReport,
};
pub use weights::{GradWAudit, LaplacianAudit, WeightFunctions, WeightRow};

/// A named pass/fail entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub tolerance: Option<f64>,
    /// Grid or sampling resolution the check ran at.
    pub resolution: String,
    pub note: String,
}

impl CheckRecord {
    pub fn from_inequality(r: &InequalityReport) -> Self {
        CheckRecord {
            name: r.name.clone(),
            passed: r.passed,
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            slack: Some(r.slack),
            tolerance: Some(r.tolerance),
            resolution: format!("{}x{}", r.n_r, r.n_theta),
            note: r.ratio.map(|q| format!("ratio {q:.6e}")).unwrap_or_default(),
        }
    }

    pub fn flag(name: &str, passed: bool, resolution: &str, note: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            passed,
            lhs: None,
            rhs: None,
            slack: None,
            tolerance: None,
            resolution: resolution.into(),
            note: note.into(),
        }
    }
}

/// Radius-indexed table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ProfileTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        ProfileTable { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn from_pairs(name: &str, columns: [&str; 2], pairs: &[(f64, f64)]) -> Self {
        let mut t = Self::new(name, &columns);
        t.rows = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        t
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Domain(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub checks: Vec<CheckRecord>,
    pub profiles: Vec<ProfileTable>,
}

impl DiagnosticsReport {
    pub fn push(&mut self, check: CheckRecord) {
        self.checks.push(check);
    }

    pub fn push_profile(&mut self, table: ProfileTable) {
        self.profiles.push(table);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}
