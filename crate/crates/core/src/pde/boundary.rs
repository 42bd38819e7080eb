//! Boundary data at infinity and its radial extension.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::grid::{AngularMode, PolarGrid};
use crate::error::{Error, Result};
use crate::quadrature::composite;
use crate::scalar::Real;

fn wrap<T: Real>(theta: T) -> T {
    theta - T::TAU() * (theta / T::TAU()).floor()
}

/// Lipschitz functions of the angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryData<T> {
    Constant { value: T },
    /// `offset + amplitude cos(k theta)`.
    Cosine { amplitude: T, k: u32, offset: T },
    /// Linear interpolation through `(angles[i], values[i])`, periodic with period `2 pi`.
    PiecewiseLinear { angles: Vec<T>, values: Vec<T> },
}

impl<T: Real> BoundaryData<T> {
    pub fn constant(value: T) -> Self {
        BoundaryData::Constant { value }
    }

    pub fn cosine(amplitude: T) -> Self {
        BoundaryData::Cosine { amplitude, k: 1, offset: T::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        if let BoundaryData::PiecewiseLinear { angles, values } = self {
            if angles.is_empty() || angles.len() != values.len() {
                return Err(Error::param("boundary", "knots and values must be non-empty and of equal length"));
            }
            if angles.windows(2).any(|w| !(w[1] > w[0])) || angles[0] < T::zero() || angles[angles.len() - 1] >= T::TAU() {
                return Err(Error::param("boundary", "knot angles must increase strictly within [0, 2 pi)"));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("boundary", "values must be finite"));
            }
        }
        Ok(())
    }

    fn segment(angles: &[T], theta: T) -> (T, T, usize, usize) {
        let n = angles.len();
        let th = wrap(theta);
        let i = angles.partition_point(|&a| a <= th);
        let (lo, hi) = if i == 0 { (n - 1, 0) } else { (i - 1, i % n) };
        let a0 = if i == 0 { angles[lo] - T::TAU() } else { angles[lo] };
        let a1 = if hi <= lo { angles[hi] + T::TAU() } else { angles[hi] };
        (a0, a1, lo, hi)
    }

    pub fn eval(&self, theta: T) -> T {
        match self {
            BoundaryData::Constant { value } => *value,
            BoundaryData::Cosine { amplitude, k, offset } => *offset + *amplitude * (T::from_usize_lossy(*k as usize) * theta).cos(),
            BoundaryData::PiecewiseLinear { angles, values } => {
                if angles.len() == 1 {
                    return values[0];
                }
                let (a0, a1, lo, hi) = Self::segment(angles, theta);
                let mut th = wrap(theta);
                if th < a0 {
                    th = th + T::TAU();
                }
                values[lo] + (values[hi] - values[lo]) * (th - a0) / (a1 - a0)
            }
        }
    }

    /// One-sided derivative in `theta`.
    pub fn derivative(&self, theta: T) -> T {
        match self {
            BoundaryData::Constant { .. } => T::zero(),
            BoundaryData::Cosine { amplitude, k, .. } => {
                let k = T::from_usize_lossy(*k as usize);
                -*amplitude * k * (k * theta).sin()
            }
            BoundaryData::PiecewiseLinear { angles, values } => {
                if angles.len() == 1 {
                    return T::zero();
                }
                let (a0, a1, lo, hi) = Self::segment(angles, theta);
                (values[hi] - values[lo]) / (a1 - a0)
            }
        }
    }

    /// Lipschitz constant in the angle.
    pub fn lipschitz(&self) -> T {
        match self {
            BoundaryData::Constant { .. } => T::zero(),
            BoundaryData::Cosine { amplitude, k, .. } => amplitude.abs() * T::from_usize_lossy(*k as usize),
            BoundaryData::PiecewiseLinear { angles, values } => {
                let n = angles.len();
                (0..n).fold(T::zero(), |acc, i| {
                    let j = (i + 1) % n;
                    let gap = if j == 0 { angles[0] + T::TAU() - angles[i] } else { angles[j] - angles[i] };
                    if n == 1 {
                        acc
                    } else {
                        acc.max((values[j] - values[i]).abs() / gap)
                    }
                })
            }
        }
    }

    /// Mean over the sphere at infinity for the given layout.
    pub fn mean(&self, mode: AngularMode, n: usize) -> T {
        if let BoundaryData::Constant { value } = self {
            return *value;
        }
        match mode {
            AngularMode::Full => composite(T::zero(), T::TAU(), 64, 8, |t| self.eval(t)) / T::TAU(),
            AngularMode::Axisymmetric => {
                let w = |t: T| t.sin().powi(n as i32 - 2);
                composite(T::zero(), T::PI(), 64, 8, |t| self.eval(t) * w(t)) / composite(T::zero(), T::PI(), 64, 8, w)
            }
        }
    }

    pub fn min_max(&self, samples: usize) -> (T, T) {
        (0..samples).fold((T::infinity(), T::neg_infinity()), |(lo, hi), i| {
            let v = self.eval(T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(samples));
            (lo.min(v), hi.max(v))
        })
    }
}

/// Piecewise linear interpolant of continuous data at `knots` equispaced angles;
/// converges uniformly as `knots` grows.
pub fn lipschitz_approximation<T: Real>(g: impl Fn(T) -> T, knots: usize) -> Result<BoundaryData<T>> {
    if knots == 0 {
        return Err(Error::param("knots", "need at least one knot"));
    }
    let angles: Vec<T> = (0..knots).map(|i| T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(knots)).collect();
    let values = angles.iter().map(|&a| g(a)).collect();
    let data = BoundaryData::PiecewiseLinear { angles, values };
    data.validate()?;
    Ok(data)
}

/// `theta(r, t) = chi(r) data(t) + (1 - chi(r)) mean` with `chi` the C1 smoothstep of `r / r1`.
pub fn radial_extension<T: Real>(data: &BoundaryData<T>, grid: &Arc<PolarGrid<T>>, r1: T) -> Result<ScalarField<T>> {
    data.validate()?;
    if !(r1 > T::zero()) || r1 >= grid.radius() {
        return Err(Error::param("r1", format!("extension radius must lie in (0, R) = (0, {}), got {r1}", grid.radius())));
    }
    let mean = data.mean(grid.mode(), grid.dim());
    Ok(ScalarField::from_fn(grid.clone(), |r, t| {
        let chi = (r / r1).smoothstep();
        chi * data.eval(t) + (T::one() - chi) * mean
    }))
}
