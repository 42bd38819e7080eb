//! Solves on an increasing sequence of balls with radially extended data.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::boundary::{radial_extension, BoundaryData};
use super::field::ScalarField;
use super::grid::{AngularMode, PolarGrid};
use super::solver::{solve_on_ball, Solution, SolverConfig};
use crate::error::{Error, Result};
use crate::manifold::ModelManifold;
use crate::scalar::Real;

/// Grid recipe shared by all balls so that their nodes coincide on common rings.
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustionSetup<T> {
    pub ds: T,
    pub n_theta: usize,
    pub mode: AngularMode,
    /// Extension radius of the boundary data.
    pub r1: T,
    /// Solve the balls concurrently.
    pub parallel: bool,
}

/// One ball of the exhaustion.
#[derive(Clone, Debug)]
pub struct Stage<T> {
    pub radius: T,
    pub grid: Arc<PolarGrid<T>>,
    pub theta: ScalarField<T>,
    pub solution: Result<Solution<T>>,
}

/// Summary of an exhaustion run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustionReport {
    /// Ball radii after snapping to the grid lattice.
    pub radii: Vec<f64>,
    /// Radius of the smallest ball, where consecutive solutions are compared.
    pub core_radius: f64,
    /// `sup |u_{k+1} - u_k|` on the core ball for consecutive successful stages.
    pub cauchy_differences: Vec<f64>,
    /// `sup |u_k - mean of data|` on the core ball per stage.
    pub core_deviation_from_mean: Vec<Option<f64>>,
    pub data_sup: f64,
    pub solution_sup: Vec<Option<f64>>,
    pub sup_bound_holds: bool,
    /// `(r, max over the sphere of |u_k - theta|)` per stage.
    pub oscillation: Vec<Vec<(f64, f64)>>,
    pub failures: Vec<(usize, String)>,
}

pub fn exhaustion_solve<T: Real>(
    manifold: &Arc<ModelManifold<T>>,
    data: &BoundaryData<T>,
    radii: &[T],
    setup: &ExhaustionSetup<T>,
    config: &SolverConfig<T>,
) -> Result<(Vec<Stage<T>>, ExhaustionReport)> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("radii", "schedule must be non-empty and strictly increasing"));
    }
    if !(setup.r1 < radii[0]) {
        return Err(Error::param("r1", format!("extension radius {} must be below the first radius {}", setup.r1, radii[0])));
    }
    config.validate()?;
    data.validate()?;
    let grids = radii
        .iter()
        .map(|&r| PolarGrid::with_spacing(manifold.clone(), r, setup.ds, setup.n_theta, setup.mode).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    if grids.windows(2).any(|w| w[1].n_r() <= w[0].n_r()) {
        return Err(Error::param("radii", format!("radii collapse after snapping to the lattice ds = {}", setup.ds)));
    }
    let run = |grid: &Arc<PolarGrid<T>>| -> Result<Stage<T>> {
        let theta = radial_extension(data, grid, setup.r1)?;
        let boundary = theta.boundary_values();
        let solution = solve_on_ball(grid, &boundary, config);
        Ok(Stage { radius: grid.radius(), grid: grid.clone(), theta, solution })
    };
    let stages: Vec<Stage<T>> = if setup.parallel {
        grids.par_iter().map(run).collect::<Result<_>>()?
    } else {
        grids.iter().map(run).collect::<Result<_>>()?
    };
    let report = summarize(&stages, data);
    Ok((stages, report))
}

fn summarize<T: Real>(stages: &[Stage<T>], data: &BoundaryData<T>) -> ExhaustionReport {
    let core = &stages[0].grid;
    let core_rings = core.n_r();
    let n_ang = core.n_angles();
    let (dmin, dmax) = data.min_max(4096);
    let data_sup = dmin.abs().max(dmax.abs()).as_f64();
    let mean = data.mean(core.mode(), core.dim());
    let mut failures = Vec::new();
    let mut solution_sup = Vec::new();
    let mut core_dev = Vec::new();
    let mut oscillation = Vec::new();
    for (k, st) in stages.iter().enumerate() {
        match &st.solution {
            Ok(sol) => {
                let u = &sol.field;
                solution_sup.push(Some(u.sup_norm().as_f64()));
                let dev = (0..=core_rings)
                    .flat_map(|i| (0..n_ang).map(move |j| (i, j)))
                    .fold(T::zero(), |a, (i, j)| a.max((u.at(i, j) - mean).abs()));
                core_dev.push(Some(dev.as_f64()));
                let g = &st.grid;
                let prof = (0..=g.n_r())
                    .map(|i| {
                        let m = (0..g.n_angles()).fold(T::zero(), |a, j| a.max((u.at(i, j) - st.theta.at(i, j)).abs()));
                        (g.radii()[i].as_f64(), m.as_f64())
                    })
                    .collect();
                oscillation.push(prof);
            }
            Err(e) => {
                failures.push((k, e.to_string()));
                solution_sup.push(None);
                core_dev.push(None);
                oscillation.push(Vec::new());
            }
        }
    }
    let ok: Vec<&Solution<T>> = stages.iter().filter_map(|s| s.solution.as_ref().ok()).collect();
    let cauchy = ok
        .windows(2)
        .map(|w| {
            (0..=core_rings)
                .flat_map(|i| (0..n_ang).map(move |j| (i, j)))
                .fold(T::zero(), |a, (i, j)| a.max((w[1].field.at(i, j) - w[0].field.at(i, j)).abs()))
                .as_f64()
        })
        .collect();
    let tol = 1e-10 * (1.0 + data_sup);
    ExhaustionReport {
        radii: stages.iter().map(|s| s.radius.as_f64()).collect(),
        core_radius: core.radius().as_f64(),
        cauchy_differences: cauchy,
        core_deviation_from_mean: core_dev,
        data_sup,
        sup_bound_holds: solution_sup.iter().flatten().all(|&s| s <= data_sup + tol),
        solution_sup,
        oscillation,
        failures,
    }
}
