use serde::Serialize;

use super::growth::{fit_growth, GrowthFit, Verdict};
use crate::error::{Error, Result};
use crate::manifold::ModelManifold;
use crate::quadrature::composite;
use crate::scalar::{unit_sphere_area, Real};

/// Samples of the partial integral per decade of `R`.
pub const SAMPLES_PER_DECADE: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParabolicityReport {
    /// Power applied to `vol(dB_rho)` in the integrand denominator.
    pub power: f64,
    pub r0: f64,
    pub r_max: f64,
    pub radii: Vec<f64>,
    /// `I(R) = int_{r0}^R vol(dB_rho)^{-power} d rho`.
    pub partial_integrals: Vec<f64>,
    /// Fit over the outer decade.
    pub fit: GrowthFit,
    pub verdict: Verdict,
}

/// Partial integrals of `vol(dB_rho)^{-1/(p-1)}`; divergence means `M` is `p`-parabolic.
pub fn parabolicity_test<T: Real>(manifold: &ModelManifold<T>, exponent: T, r0: T, r_max: T) -> Result<ParabolicityReport> {
    if !(exponent > T::one()) || !exponent.is_finite() {
        return Err(Error::param("exponent", format!("must be finite and greater than 1, got {exponent}")));
    }
    partial_integral(manifold, T::one() / (exponent - T::one()), r0, r_max)
}

/// Same integral with power `1 / delta`.
pub fn parabolicity_test_delta<T: Real>(manifold: &ModelManifold<T>, delta: T, r0: T, r_max: T) -> Result<ParabolicityReport> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::param("delta", format!("must be positive, got {delta}")));
    }
    partial_integral(manifold, T::one() / delta, r0, r_max)
}

fn partial_integral<T: Real>(manifold: &ModelManifold<T>, power: T, r0: T, r_max: T) -> Result<ParabolicityReport> {
    if !(r0 > T::zero()) {
        return Err(Error::Domain(format!("r0 must be positive, got {r0}")));
    }
    if !(r_max >= T::lit(10.0) * r0) {
        return Err(Error::Domain(format!("need at least one decade: r0 = {r0}, R_max = {r_max}")));
    }
    if r_max > manifold.r_max() {
        return Err(Error::Domain(format!("R_max = {r_max} exceeds the warp table end {}", manifold.r_max())));
    }
    let warp = manifold.warp();
    if !(warp.value(r0)? > T::zero()) {
        return Err(Error::Domain(format!("f(r0) must be positive at r0 = {r0}")));
    }
    let log_omega = unit_sphere_area::<T>(manifold.dim() - 1).ln();
    let nm1 = T::from_usize_lossy(manifold.dim() - 1);
    let mut err = None;
    // integrate rho g(rho) in s = log rho
    let mut integrand = |s: T| {
        let rho = s.exp();
        match warp.value(rho) {
            Ok(f) => (s - power * (log_omega + nm1 * f.ln())).exp(),
            Err(e) => {
                err = Some(e);
                T::zero()
            }
        }
    };
    let (s0, s1) = (r0.ln(), r_max.ln());
    let steps = ((s1 - s0) / T::lit(10.0).ln() * T::from_usize_lossy(SAMPLES_PER_DECADE)).ceil().to_usize().unwrap_or(1).max(1);
    let h = (s1 - s0) / T::from_usize_lossy(steps);
    let mut radii = Vec::with_capacity(steps);
    let mut partial = Vec::with_capacity(steps);
    let mut acc = T::zero();
    for k in 0..steps {
        let a = s0 + h * T::from_usize_lossy(k);
        let b = if k + 1 == steps { s1 } else { a + h };
        acc = acc + composite(a, b, 4, 8, &mut integrand);
        radii.push(b.exp().as_f64());
        partial.push(acc.as_f64());
    }
    if let Some(e) = err {
        return Err(e);
    }
    let cut = r_max.as_f64() / 10.0 * (1.0 - 1e-12);
    let start = radii.iter().position(|&r| r >= cut).unwrap_or(0);
    let fit = fit_growth(&radii[start..], &partial[start..]);
    Ok(ParabolicityReport {
        power: power.as_f64(),
        r0: r0.as_f64(),
        r_max: r_max.as_f64(),
        verdict: fit.verdict,
        radii,
        partial_integrals: partial,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::growth::GrowthClass;
    use crate::manifold::{JacobiOptions, RadialProfile};
    use std::f64::consts::PI;

    #[test]
    fn flat_plane_is_two_parabolic() {
        let m = ModelManifold::<f64>::flat(2, 1e6).unwrap();
        let rep = parabolicity_test(&m, 2.0, 1.0, 1e6).unwrap();
        let exact = (1e6f64).ln() / (2.0 * PI);
        let got = *rep.partial_integrals.last().unwrap();
        assert!((got - exact).abs() < 1e-10 * exact, "{got} vs {exact}");
        assert_eq!(rep.verdict, Verdict::DivergentTrend);
        assert_eq!(rep.fit.best.class, GrowthClass::Log);
    }

    #[test]
    fn hyperbolic_plane_is_not() {
        let m = ModelManifold::<f64>::hyperbolic(2, 60.0).unwrap();
        let rep = parabolicity_test(&m, 2.0, 1.0, 60.0).unwrap();
        // int_1^inf d rho / (2 pi sinh rho) = -log tanh(1/2) / (2 pi)
        let limit = -(0.5f64).tanh().ln() / (2.0 * PI);
        let got = *rep.partial_integrals.last().unwrap();
        assert!((got - limit).abs() < 1e-9 * limit, "{got} vs {limit}");
        assert_eq!(rep.verdict, Verdict::ConvergentTrend);
    }

    #[test]
    fn flat_space_is_p_parabolic_only_for_p_at_least_n() {
        let m = ModelManifold::<f64>::flat(3, 1e5).unwrap();
        assert_eq!(parabolicity_test(&m, 3.0, 1.0, 1e5).unwrap().verdict, Verdict::DivergentTrend);
        assert_eq!(parabolicity_test(&m, 4.0, 1.0, 1e5).unwrap().verdict, Verdict::DivergentTrend);
        assert_eq!(parabolicity_test(&m, 2.0, 1.0, 1e5).unwrap().verdict, Verdict::ConvergentTrend);
    }

    #[test]
    fn delta_form_matches_exponent_form() {
        let m = ModelManifold::<f64>::hyperbolic(2, 30.0).unwrap();
        let a = parabolicity_test(&m, 1.5, 1.0, 30.0).unwrap();
        let b = parabolicity_test_delta(&m, 0.5, 1.0, 30.0).unwrap();
        assert_eq!(a.partial_integrals, b.partial_integrals);
    }

    #[test]
    fn borderline_curvature_gives_log_log_growth() {
        let m = ModelManifold::<f64>::build(2, RadialProfile::borderline(3.0, 0.5), 1e6, &JacobiOptions::default()).unwrap();
        for p in [2.0, 3.0] {
            let rep = parabolicity_test(&m, p, 5.0, 1e6).unwrap();
            assert_eq!(rep.verdict, Verdict::DivergentTrend, "p = {p}");
            if p == 2.0 {
                assert_eq!(rep.fit.best.class, GrowthClass::LogLog);
            }
        }
    }

    #[test]
    fn domain_errors() {
        let m = ModelManifold::<f64>::flat(2, 100.0).unwrap();
        assert!(parabolicity_test(&m, 2.0, 0.0, 100.0).is_err());
        assert!(parabolicity_test(&m, 2.0, 20.0, 100.0).is_err());
        assert!(parabolicity_test(&m, 2.0, 1.0, 1000.0).is_err());
        assert!(parabolicity_test(&m, 1.0, 1.0, 100.0).is_err());
        assert!(parabolicity_test_delta(&m, 0.0, 1.0, 100.0).is_err());
    }
}
