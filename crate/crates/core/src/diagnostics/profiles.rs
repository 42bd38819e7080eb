use serde::Serialize;

use super::growth::{slope, Verdict};
use super::weights::WeightFunctions;
use crate::error::{Error, Result};
use crate::pde::{grad_log_w, AngularMode, BoundaryData, ScalarField};
use crate::quadrature::gauss_legendre_points;
use crate::scalar::{log_sum_exp, unit_sphere_area, Real};
use crate::young::YoungPair;

/// `(radius, max over the sphere of |u - theta|)`, linear in `s = log(1+r)` between rings.
pub fn oscillation_profile<T: Real>(u: &ScalarField<T>, theta: &ScalarField<T>, spheres: &[T]) -> Result<Vec<(f64, f64)>> {
    let d = u.zip_with(theta, |a, b| a - b)?;
    let g = u.grid();
    let s = |r: T| r.ln_1p();
    let radii = g.radii();
    spheres
        .iter()
        .map(|&rho| {
            let top = g.radius() * (T::one() + T::epsilon() * T::lit(64.0));
            if !(rho >= T::zero() && rho <= top) {
                return Err(Error::Domain(format!("sphere radius {rho} outside [0, {}]", g.radius())));
            }
            let rho = rho.min(g.radius());
            let i = radii.partition_point(|&r| r <= rho).min(g.n_r()).max(1) - 1;
            let w = (s(rho) - s(radii[i])) / (s(radii[i + 1]) - s(radii[i]));
            let m = (0..g.n_angles()).fold(T::zero(), |a, j| {
                a.max(((T::one() - w) * d.at(i, j) + w * d.at(i + 1, j)).abs())
            });
            Ok((rho.as_f64(), m.as_f64()))
        })
        .collect()
}

/// Boundary-attainment signature across an exhaustion: `|u_k - theta_k|` on the sphere of
/// radius `fraction * R_k` for each stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttainmentReport {
    pub fraction: f64,
    pub radii: Vec<f64>,
    pub oscillation: Vec<f64>,
    pub strictly_decreasing: bool,
}

pub fn attainment_profile<T: Real>(stages: &[(&ScalarField<T>, &ScalarField<T>)], fraction: T) -> Result<AttainmentReport> {
    if !(fraction > T::zero() && fraction < T::one()) {
        return Err(Error::param("fraction", format!("must lie in (0, 1), got {fraction}")));
    }
    let mut radii = Vec::new();
    let mut osc = Vec::new();
    for (u, theta) in stages {
        let rho = fraction * u.grid().radius();
        let (r, o) = oscillation_profile(u, theta, &[rho])?[0];
        radii.push(r);
        osc.push(o);
    }
    Ok(AttainmentReport {
        fraction: fraction.as_f64(),
        strictly_decreasing: osc.windows(2).all(|w| w[1] < w[0]),
        radii,
        oscillation: osc,
    })
}

/// `max over each ring of r |grad log W|` for a minimal graph solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WDecayReport {
    /// `(r, max r |grad log W|)` at cell-centre radii.
    pub profile: Vec<(f64, f64)>,
    /// Least-squares slope of the profile against `r` over the outer half.
    pub outer_half_slope: f64,
    /// Fraction of consecutive outer-half samples that decrease.
    pub decreasing_fraction: f64,
    pub decreasing_trend: bool,
}

pub fn w_decay_profile<T: Real>(u: &ScalarField<T>) -> Result<Vec<(f64, f64)>> {
    let g = u.grid();
    let d = grad_log_w(u)?;
    Ok((0..g.n_r())
        .map(|i| {
            let r = g.cell_center(i, 0).0;
            let m = (0..g.n_theta()).fold(T::zero(), |a, j| a.max(d.at_cell(i, j)));
            (r.as_f64(), (r * m).as_f64())
        })
        .collect())
}

/// Runs [`w_decay_profile`] on every solution and judges the trend on the largest domain.
pub fn w_decay_check<T: Real>(solutions: &[&ScalarField<T>]) -> Result<Vec<WDecayReport>> {
    solutions
        .iter()
        .map(|u| {
            let profile = w_decay_profile(u)?;
            let half = u.grid().radius().as_f64() / 2.0;
            let outer: Vec<(f64, f64)> = profile.iter().copied().filter(|(r, _)| *r >= half).collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = outer.iter().copied().unzip();
            let outer_half_slope = if xs.len() >= 2 { slope(&xs, &ys) } else { f64::NAN };
            let steps = ys.len().saturating_sub(1).max(1);
            let down = ys.windows(2).filter(|w| w[1] < w[0]).count();
            let decreasing_trend = outer_half_slope < 0.0 && ys.last() < ys.first();
            Ok(WDecayReport { profile, outer_half_slope, decreasing_fraction: down as f64 / steps as f64, decreasing_trend })
        })
        .collect()
}

/// Density of `int F(c0 |grad theta| r log(1+r) / L) L` over spheres, plus partial integrals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedFReport {
    pub c0: f64,
    pub radii: Vec<f64>,
    /// Natural log of the sphere-integrated integrand at each radius.
    pub log_density: Vec<f64>,
    /// Natural log of the partial integral over `[0, R]`.
    pub log_partial: Vec<f64>,
    /// Log-log slope of the density against `r` over the last decade.
    pub tail_exponent: f64,
    pub verdict: Verdict,
}

/// Angular quadrature for the data sphere: `(angle, weight)` with weights summing to the sphere area.
fn sphere_rule<T: Real>(mode: AngularMode, n: usize, panels: usize) -> Vec<(T, T)> {
    let (len, w) = match mode {
        AngularMode::Full => (T::TAU(), T::one()),
        AngularMode::Axisymmetric => (T::PI(), unit_sphere_area::<T>(n - 2)),
    };
    let h = len / T::from_usize_lossy(panels);
    let mut out = Vec::new();
    for k in 0..panels {
        let a = h * T::from_usize_lossy(k);
        for (x, q) in gauss_legendre_points(a, a + h, 4) {
            let dens = match mode {
                AngularMode::Full => T::one(),
                AngularMode::Axisymmetric => x.sin().powi(n as i32 - 2),
            };
            out.push((x, w * q * dens));
        }
    }
    out
}

/// Evaluates the weighted `F` integral for the radial extension of `data` beyond `r1`
/// (`theta = data` there, so `|grad theta| = |data'| / f`), sampling up to `r_max`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_f_integral<T: Real>(
    data: &BoundaryData<T>,
    r1: T,
    mode: AngularMode,
    pair: &YoungPair<T>,
    weights: &WeightFunctions<T>,
    c0: T,
    r_max: T,
    samples_per_decade: usize,
) -> Result<WeightedFReport> {
    let m = weights.manifold();
    let n = m.dim();
    if mode == AngularMode::Full && n != 2 {
        return Err(Error::param("mode", "full angular mode needs n = 2"));
    }
    if !(c0 > T::zero()) {
        return Err(Error::param("c0", format!("must be positive, got {c0}")));
    }
    if !(r1 > T::zero()) || !(r_max >= T::lit(10.0) * r1) || r_max > m.r_max() {
        return Err(Error::Domain(format!("need 10 r1 <= r_max <= {}, got r1 = {r1}, r_max = {r_max}", m.r_max())));
    }
    let rule = sphere_rule::<T>(mode, n, 64);
    let slopes: Vec<(T, T)> = rule.iter().map(|&(x, q)| (data.derivative(x).abs(), q)).collect();
    let top = pair.f_table_max();
    let log_density = |r: T| -> Result<T> {
        let f = m.warp().value(r)?;
        let l = weights.l(r);
        let scale = c0 * r * r.ln_1p() / (l * f);
        let mut terms = Vec::with_capacity(slopes.len());
        for &(d, q) in &slopes {
            let s = scale * d;
            if s > top {
                return Err(Error::Range { value: s.as_f64(), min: 0.0, max: top.as_f64() });
            }
            terms.push(pair.log_conjugate_f(s)? + q.ln());
        }
        Ok(log_sum_exp(terms) + l.ln() + T::from_usize_lossy(n - 1) * f.ln())
    };
    let (s0, s1) = (r1.ln(), r_max.ln());
    let steps = ((s1 - s0) / T::lit(10.0).ln() * T::from_usize_lossy(samples_per_decade.max(2))).ceil().to_usize().unwrap_or(2);
    let h = (s1 - s0) / T::from_usize_lossy(steps);
    let mut radii = Vec::new();
    let mut dens = Vec::new();
    let mut partial = Vec::new();
    let mut acc = T::neg_infinity();
    for k in 0..steps {
        let a = s0 + h * T::from_usize_lossy(k);
        let mut pieces = vec![acc];
        for (s, q) in gauss_legendre_points(a, a + h, 6) {
            let r = s.exp().min(r_max);
            pieces.push(log_density(r)? + s + q.ln());
        }
        acc = log_sum_exp(pieces);
        let r = if k + 1 == steps { r_max } else { (a + h).exp().min(r_max) };
        radii.push(r.as_f64());
        dens.push(log_density(r)?.as_f64());
        partial.push(acc.as_f64());
    }
    let cut = r_max.as_f64() / 10.0 * (1.0 - 1e-12);
    let tail: Vec<(f64, f64)> =
        radii.iter().zip(&dens).filter(|(r, d)| **r >= cut && d.is_finite()).map(|(r, d)| (r.ln(), *d)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
    let tail_exponent = if xs.len() >= 2 {
        slope(&xs, &ys)
    } else if dens.last().is_some_and(|d| *d == f64::NEG_INFINITY) {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    };
    let verdict = if tail_exponent < -1.1 {
        Verdict::ConvergentTrend
    } else if tail_exponent > -0.9 {
        Verdict::DivergentTrend
    } else {
        Verdict::Inconclusive
    };
    Ok(WeightedFReport { c0: c0.as_f64(), radii, log_density: dens, log_partial: partial, tail_exponent, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{check_comparison_bounds, CurvatureProfile, JacobiOptions, ModelManifold};
    use crate::pde::{radial_extension, AngularMode, PolarGrid};
    use crate::young::build_young_pair;
    use std::sync::Arc;

    #[test]
    fn constant_data_give_zero_profiles() {
        let m = Arc::new(ModelManifold::<f64>::hyperbolic(3, 6.0).unwrap());
        let g = Arc::new(PolarGrid::new(m.clone(), 4.0, 12, 8, AngularMode::Axisymmetric).unwrap());
        let theta = radial_extension(&BoundaryData::Constant { value: 0.4 }, &g, 1.0).unwrap();
        let prof = oscillation_profile(&theta, &theta, &[0.0, 1.0, 4.0]).unwrap();
        assert!(prof.iter().all(|&(_, o)| o == 0.0));
        let w = w_decay_check(&[&theta]).unwrap();
        assert!(w[0].profile.iter().all(|&(_, v)| v == 0.0));
        assert!(oscillation_profile(&theta, &theta, &[5.0]).is_err());

        let pair = build_young_pair(2.0, 0.5, 1.25).unwrap();
        let wf = WeightFunctions::new(m, 2.0, 0.5, 2.0).unwrap();
        let rep = weighted_f_integral(&BoundaryData::Constant { value: 1.0 }, 0.5, AngularMode::Axisymmetric, &pair, &wf, 1.0, 6.0, 10)
            .unwrap();
        assert!(rep.log_partial.iter().all(|v| *v == f64::NEG_INFINITY));
    }

    #[test]
    fn oscillation_interpolates_between_rings() {
        let m = Arc::new(ModelManifold::<f64>::flat(2, 3.0).unwrap());
        let g = Arc::new(PolarGrid::new(m, 2.0, 10, 8, AngularMode::Full).unwrap());
        let u = ScalarField::from_fn(g.clone(), |r, _| r.ln_1p());
        let z = ScalarField::constant(g.clone(), 0.0);
        for rho in [0.0, 0.37, 1.2, 2.0] {
            let (_, o) = oscillation_profile(&u, &z, &[rho]).unwrap()[0];
            assert!((o - rho.ln_1p()).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_f_decays_on_the_curved_model_but_not_on_flat_space() {
        let prof = CurvatureProfile::new(1.0, 0.5, 8.0, 0.25).unwrap();
        let m = Arc::new(ModelManifold::build(3, prof.upper(), 1e4, &JacobiOptions::default()).unwrap());
        let r1 = check_comparison_bounds(m.warp(), &prof, 0.5).unwrap().r1.unwrap();
        let pair = build_young_pair(2.0, 0.5, 1.25).unwrap();
        let wf = WeightFunctions::new(m, 2.0, 0.5, r1).unwrap();
        let data = BoundaryData::cosine(1.0);
        let rep = weighted_f_integral(&data, 1.0, AngularMode::Axisymmetric, &pair, &wf, 1.0, 1e4, 10).unwrap();
        assert_eq!(rep.verdict, Verdict::ConvergentTrend);
        assert!(rep.tail_exponent <= -1.8, "{}", rep.tail_exponent);

        let flat = Arc::new(ModelManifold::<f64>::flat(3, 1e4).unwrap());
        let wf = WeightFunctions::new(flat, 2.0, 0.5, r1).unwrap();
        let rep = weighted_f_integral(&data, 1.0, AngularMode::Axisymmetric, &pair, &wf, 1.0, 1e4, 10).unwrap();
        assert_eq!(rep.verdict, Verdict::DivergentTrend);
    }
}
