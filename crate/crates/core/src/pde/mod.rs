//! Energy-minimizing solvers for the p-Laplace and minimal graph equations on geodesic balls.

mod boundary;
mod energy;
mod exhaustion;
mod field;
mod grid;
mod solver;

pub use boundary::{lipschitz_approximation, radial_extension, BoundaryData};
pub use energy::{assemble, energy, Equation};
pub use exhaustion::{exhaustion_solve, ExhaustionReport, ExhaustionSetup, Stage};
pub use field::{compute_w, grad_log_w, Location, ScalarField};
pub use grid::{AngularMode, Cell, PolarGrid};
pub use solver::{solve_on_ball, solve_with_guess, LinearSolver, NewtonConfig, Solution, SolveReport, SolverConfig};
