//! Numerical laboratory for the asymptotic Dirichlet problem on rotationally symmetric
//! Cartan-Hadamard model manifolds.

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod pde;
pub mod quadrature;
pub mod scalar;
pub mod young;

pub use error::{Error, Result};
pub use scalar::Real;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Double-precision aliases.
pub mod f64 {
    pub type ModelManifold = crate::manifold::ModelManifold<f64>;
    pub type WarpFunction = crate::manifold::WarpFunction<f64>;
    pub type CurvatureProfile = crate::manifold::CurvatureProfile<f64>;
    pub type RadialProfile = crate::manifold::RadialProfile<f64>;
    pub type YoungPair = crate::young::YoungPair<f64>;
    pub type PolarGrid = crate::pde::PolarGrid<f64>;
    pub type ScalarField = crate::pde::ScalarField<f64>;
    pub type SolverConfig = crate::pde::SolverConfig<f64>;
    pub type BoundaryData = crate::pde::BoundaryData<f64>;
    pub type WeightFunctions = crate::diagnostics::WeightFunctions<f64>;
}

/// Single-precision aliases.
pub mod f32 {
    pub type ModelManifold = crate::manifold::ModelManifold<f32>;
    pub type WarpFunction = crate::manifold::WarpFunction<f32>;
    pub type CurvatureProfile = crate::manifold::CurvatureProfile<f32>;
    pub type RadialProfile = crate::manifold::RadialProfile<f32>;
    pub type YoungPair = crate::young::YoungPair<f32>;
    pub type PolarGrid = crate::pde::PolarGrid<f32>;
    pub type ScalarField = crate::pde::ScalarField<f32>;
    pub type SolverConfig = crate::pde::SolverConfig<f32>;
    pub type BoundaryData = crate::pde::BoundaryData<f32>;
    pub type WeightFunctions = crate::diagnostics::WeightFunctions<f32>;
}
