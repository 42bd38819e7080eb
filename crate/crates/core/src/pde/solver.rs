//! Damped Newton minimization of the discrete energies on a ball.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::energy::{assemble, energy, Equation};
use super::field::{Location, ScalarField};
use super::grid::PolarGrid;
use crate::error::{Error, Result};
use crate::linalg::{pcg, BandedSym};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct NewtonConfig<T> {
    pub max_iter: usize,
    /// Tolerance on `max_k |g_k| / H_kk`.
    pub tol: T,
    /// Armijo sufficient-decrease constant.
    pub armijo: T,
    /// Step reduction factor in backtracking.
    pub backtrack: T,
    /// Smallest step before falling back to lagged-coefficient iterations.
    pub min_step: T,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        NewtonConfig {
            max_iter: 60,
            tol: T::lit(1e-11),
            armijo: T::lit(1e-4),
            backtrack: T::lit(0.5),
            min_step: T::lit(1.0 / 1024.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearSolver<T> {
    /// Banded Cholesky.
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Pcg { tol: T, max_iter: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SolverConfig<T> {
    pub equation: Equation<T>,
    /// Regularization `delta` in `(|grad u|^2 + delta^2)^{(p-2)/2}`.
    #[serde(default = "default_delta")]
    pub delta_reg: T,
    #[serde(default)]
    pub newton: NewtonConfig<T>,
    #[serde(default = "default_linear")]
    pub linear: LinearSolver<T>,
}

fn default_delta<T: Real>() -> T {
    T::lit(1e-8)
}

fn default_linear<T>() -> LinearSolver<T> {
    LinearSolver::Direct
}

impl<T: Real> SolverConfig<T> {
    pub fn new(equation: Equation<T>) -> Self {
        SolverConfig { equation, delta_reg: default_delta(), newton: NewtonConfig::default(), linear: LinearSolver::Direct }
    }

    pub fn p_laplace(p: T) -> Self {
        Self::new(Equation::PLaplace { p })
    }

    pub fn minimal_graph() -> Self {
        Self::new(Equation::MinimalGraph)
    }

    pub fn validate(&self) -> Result<()> {
        if let Equation::PLaplace { p } = self.equation {
            if !(p > T::one()) || !p.is_finite() {
                return Err(Error::param("p", format!("must be finite and greater than 1, got {p}")));
            }
        }
        if !(self.delta_reg > T::zero()) {
            return Err(Error::param("delta_reg", "must be positive"));
        }
        let n = &self.newton;
        if !(n.tol > T::zero()) || n.max_iter == 0 {
            return Err(Error::param("newton", "tolerance and iteration budget must be positive"));
        }
        if !(n.backtrack > T::zero() && n.backtrack < T::one()) || !(n.min_step > T::zero()) {
            return Err(Error::param("newton", "backtrack must lie in (0, 1) and min_step be positive"));
        }
        if let LinearSolver::Pcg { tol, max_iter } = self.linear {
            if !(tol > T::zero()) || max_iter == 0 {
                return Err(Error::param("linear", "tolerance and iteration budget must be positive"));
            }
        }
        Ok(())
    }

    /// Regularization values visited: `1e-2, 1e-4, 1e-6` above the target when `p < 2`.
    pub fn delta_schedule(&self) -> Vec<T> {
        let mut out = Vec::new();
        if let Equation::PLaplace { p } = self.equation {
            if p < T::lit(2.0) {
                for d in [1e-2, 1e-4, 1e-6] {
                    if T::lit(d) > self.delta_reg {
                        out.push(T::lit(d));
                    }
                }
            }
        }
        out.push(self.delta_reg);
        out
    }
}

/// Iteration log of a solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub energy_trace: Vec<f64>,
    pub step_lengths: Vec<f64>,
    pub lagged_steps: usize,
    pub delta_schedule: Vec<f64>,
    pub final_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub field: ScalarField<T>,
    pub report: SolveReport,
}

/// Minimizes the discrete energy with the boundary ring fixed to `boundary`
/// (one value per angular node).
pub fn solve_on_ball<T: Real>(grid: &Arc<PolarGrid<T>>, boundary: &[T], config: &SolverConfig<T>) -> Result<Solution<T>> {
    solve_with_guess(grid, boundary, config, None)
}

pub fn solve_with_guess<T: Real>(
    grid: &Arc<PolarGrid<T>>,
    boundary: &[T],
    config: &SolverConfig<T>,
    guess: Option<&[T]>,
) -> Result<Solution<T>> {
    config.validate()?;
    if boundary.len() != grid.n_angles() {
        return Err(Error::Precondition(format!("expected {} boundary values, got {}", grid.n_angles(), boundary.len())));
    }
    if let Some(k) = boundary.iter().position(|v| !v.is_finite()) {
        return Err(Error::Precondition(format!("non-finite boundary value at angle index {k}")));
    }
    let mut u = vec![T::zero(); grid.n_nodes()];
    let nr = grid.n_r();
    for (j, &b) in boundary.iter().enumerate() {
        u[grid.node(nr, j)] = b;
    }
    let mut report = SolveReport::default();
    match guess {
        Some(g) if g.len() == grid.n_nodes() => u[..grid.n_unknowns()].copy_from_slice(&g[..grid.n_unknowns()]),
        Some(g) => return Err(Error::Precondition(format!("guess has {} values, expected {}", g.len(), grid.n_nodes()))),
        None if !config.equation.is_linear() => {
            let linear = SolverConfig { equation: Equation::PLaplace { p: T::lit(2.0) }, ..config.clone() };
            newton(grid, &linear, T::one(), &mut u, &mut SolveReport::default())?;
        }
        None => {}
    }
    for delta in config.delta_schedule() {
        report.delta_schedule.push(delta.as_f64());
        newton(grid, config, delta, &mut u, &mut report)?;
    }
    let field = ScalarField::new(grid.clone(), Location::Node, u)?;
    Ok(Solution { field, report })
}

fn scaled_residual<T: Real>(g: &[T], h: &BandedSym<T>) -> T {
    g.iter().zip(h.diagonal()).fold(T::zero(), |a, (&g, d)| a.max(g.abs() / d))
}

fn direction<T: Real>(grid: &PolarGrid<T>, config: &SolverConfig<T>, h: BandedSym<T>, g: &[T]) -> Result<Vec<T>> {
    let mut d: Vec<T> = g.iter().map(|&v| -v).collect();
    match config.linear {
        LinearSolver::Direct => {
            let chol = h.cholesky().map_err(|e| locate(grid, e))?;
            chol.solve(&mut d);
            Ok(d)
        }
        LinearSolver::Pcg { tol, max_iter } => {
            let mut x = vec![T::zero(); d.len()];
            pcg(&h, &d, &mut x, tol, max_iter).map_err(|e| locate(grid, e))?;
            Ok(x)
        }
    }
}

fn locate<T: Real>(grid: &PolarGrid<T>, e: Error) -> Error {
    match e {
        Error::Singular { index, .. } if index > 0 => {
            let ring = 1 + (index - 1) / grid.n_angles();
            let angle = (0..grid.n_angles()).find(|&j| grid.node(ring, j) == index).unwrap_or(0);
            Error::Singular { index, ring, angle }
        }
        other => other,
    }
}

fn newton<T: Real>(grid: &PolarGrid<T>, config: &SolverConfig<T>, delta: T, u: &mut [T], report: &mut SolveReport) -> Result<()> {
    let m = grid.n_unknowns();
    let eq = &config.equation;
    let nc = &config.newton;
    let mut e = energy(grid, eq, delta, u);
    report.energy_trace.push(e.as_f64());
    let mut trial = u.to_vec();
    for _ in 0..nc.max_iter {
        let mut h = BandedSym::zeros(m, grid.bandwidth());
        let g = assemble(grid, eq, delta, u, Some(&mut h), false);
        let res = scaled_residual(&g, &h);
        report.residual_history.push(res.as_f64());
        report.final_residual = res.as_f64();
        if res <= nc.tol {
            return Ok(());
        }
        report.iterations += 1;
        let mut accepted = false;
        for lagged in [false, true] {
            let (hm, gm) = if lagged {
                let mut hl = BandedSym::zeros(m, grid.bandwidth());
                let gl = assemble(grid, eq, delta, u, Some(&mut hl), true);
                (hl, gl)
            } else {
                (h.clone(), g.clone())
            };
            let d = direction(grid, config, hm, &gm)?;
            let slope = gm.iter().zip(&d).fold(T::zero(), |a, (&g, &d)| a + g * d);
            if !(slope < T::zero()) {
                continue;
            }
            let mut step = T::one();
            // energy differences below this are rounding noise
            let noise = T::epsilon() * T::lit(64.0) * e.abs().max(T::min_positive_value());
            while step >= nc.min_step {
                for k in 0..m {
                    trial[k] = u[k] + step * d[k];
                }
                let et = energy(grid, eq, delta, &trial);
                if et <= e + nc.armijo * step * slope || (et <= e + noise && -slope <= noise) {
                    u[..m].copy_from_slice(&trial[..m]);
                    e = et.min(e);
                    report.energy_trace.push(et.as_f64());
                    report.step_lengths.push(step.as_f64());
                    if lagged {
                        report.lagged_steps += 1;
                    }
                    accepted = true;
                    break;
                }
                step = step * nc.backtrack;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            return Err(Error::Convergence {
                iterations: report.iterations,
                last_residual: res.as_f64(),
                residual_history: report.residual_history.clone(),
            });
        }
    }
    let mut h = BandedSym::zeros(m, grid.bandwidth());
    let g = assemble(grid, eq, delta, u, Some(&mut h), false);
    let res = scaled_residual(&g, &h);
    report.residual_history.push(res.as_f64());
    report.final_residual = res.as_f64();
    if res <= nc.tol {
        return Ok(());
    }
    Err(Error::Convergence { iterations: report.iterations, last_residual: res.as_f64(), residual_history: report.residual_history.clone() })
}
