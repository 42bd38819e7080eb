//! Rotationally symmetric model manifolds `dr^2 + f(r)^2 dsigma^2`.

mod jacobi;
mod profile;
mod warp;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::{unit_sphere_area, Real};

pub use jacobi::{log_spaced_nodes, solve_jacobi, solve_jacobi_with, JacobiOptions};
pub use profile::{CurvatureProfile, RadialProfile};
pub use warp::{WarpAudit, WarpFunction};

/// A model manifold of dimension `n` with warp `f = f_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelManifold<T> {
    n: usize,
    warp: WarpFunction<T>,
    profile: RadialProfile<T>,
}

impl<T: Real> ModelManifold<T> {
    /// Builds the manifold by solving the Jacobi equation for `profile` on `[0, r_max]`.
    pub fn build(n: usize, profile: RadialProfile<T>, r_max: T, opts: &JacobiOptions<T>) -> Result<Self> {
        profile.validate()?;
        let warp = solve_jacobi_with(|r| profile.k_squared(r), r_max, opts)?;
        Self::from_warp(n, warp, profile)
    }

    pub fn from_warp(n: usize, warp: WarpFunction<T>, profile: RadialProfile<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "dimension must be at least 2"));
        }
        Ok(ModelManifold { n, warp, profile })
    }

    pub fn flat(n: usize, r_max: T) -> Result<Self> {
        Self::build(n, RadialProfile::flat(), r_max, &JacobiOptions::default())
    }

    pub fn hyperbolic(n: usize, r_max: T) -> Result<Self> {
        Self::build(n, RadialProfile::hyperbolic(), r_max, &JacobiOptions::default())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn warp(&self) -> &WarpFunction<T> {
        &self.warp
    }

    pub fn profile(&self) -> &RadialProfile<T> {
        &self.profile
    }

    pub fn r_max(&self) -> T {
        self.warp.r_max()
    }

    /// `Delta r = (n - 1) f'(r) / f(r)`, singular at the pole.
    pub fn laplacian_r(&self, r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::Domain(format!("Laplacian of r is singular at r = {r}")));
        }
        let (f, fp) = self.warp.eval(r)?;
        Ok(T::from_usize_lossy(self.n - 1) * fp / f)
    }

    /// `|S^{n-1}| f(rho)^{n-1}`.
    pub fn sphere_volume(&self, rho: T) -> Result<T> {
        if rho < T::zero() {
            return Err(Error::Domain(format!("negative radius {rho}")));
        }
        let f = self.warp.value(rho)?;
        Ok(unit_sphere_area::<T>(self.n - 1) * f.powi(self.n as i32 - 1))
    }

    /// `int_a^b f(r)^m dr` by Gauss-Legendre on every warp interval.
    pub fn radial_moment(&self, a: T, b: T, m: i32) -> Result<T> {
        if a > b {
            return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
        }
        let nodes = self.warp.nodes();
        let mut total = T::zero();
        let mut lo = a;
        let start = nodes.partition_point(|&x| x <= a);
        for &x in nodes[start..].iter().chain(std::iter::once(&b)) {
            let hi = x.min(b);
            if hi > lo {
                let mut err = None;
                total = total
                    + gauss_legendre(lo, hi, 8, |r| match self.warp.value(r) {
                        Ok(f) => f.powi(m),
                        Err(e) => {
                            err = Some(e);
                            T::zero()
                        }
                    });
                if let Some(e) = err {
                    return Err(e);
                }
                lo = hi;
            }
            if x >= b {
                break;
            }
        }
        Ok(total)
    }

    /// `vol B_R = |S^{n-1}| int_0^R f^{n-1}`.
    pub fn ball_volume(&self, radius: T) -> Result<T> {
        Ok(unit_sphere_area::<T>(self.n - 1) * self.radial_moment(T::zero(), radius, self.n as i32 - 1)?)
    }

    /// Serializable snapshot: dimension, profile parameters and warp tables.
    pub fn record(&self, curvature: Option<&CurvatureProfile<T>>) -> ManifoldRecord {
        ManifoldRecord {
            n: self.n,
            eps: curvature.map(|c| c.eps.as_f64()),
            eps_bar: curvature.map(|c| c.eps_bar.as_f64()),
            r0: curvature.map(|c| c.r0.as_f64()),
            cap: curvature.map(|c| c.cap.as_f64()),
            profile: to_f64_profile(&self.profile),
            nodes: self.warp.nodes.iter().map(|x| x.as_f64()).collect(),
            f: self.warp.f.iter().map(|x| x.as_f64()).collect(),
            fprime: self.warp.fprime.iter().map(|x| x.as_f64()).collect(),
            k2: self.warp.k2.iter().map(|x| x.as_f64()).collect(),
        }
    }

    /// CSV table `r, f, fprime, laplacian_r, sphere_volume`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv: {e}"));
        w.write_record(["r", "f", "fprime", "laplacian_r", "sphere_volume"]).map_err(io)?;
        let omega = unit_sphere_area::<T>(self.n - 1);
        let nm1 = T::from_usize_lossy(self.n - 1);
        for i in 0..self.warp.len() {
            let (r, f, fp) = (self.warp.nodes[i], self.warp.f[i], self.warp.fprime[i]);
            let lap = if r > T::zero() {
                format!("{:e}", (nm1 * fp / f).as_f64())
            } else {
                String::new()
            };
            w.write_record([
                format!("{:e}", r.as_f64()),
                format!("{:e}", f.as_f64()),
                format!("{:e}", fp.as_f64()),
                lap,
                format!("{:e}", (omega * f.powi(self.n as i32 - 1)).as_f64()),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Domain(format!("csv: {e}")))?;
        Ok(())
    }
}

fn to_f64_profile<T: Real>(p: &RadialProfile<T>) -> RadialProfile<f64> {
    match *p {
        RadialProfile::Constant { k2 } => RadialProfile::Constant { k2: k2.as_f64() },
        RadialProfile::UpperLog { eps, r0, cap } => RadialProfile::UpperLog {
            eps: eps.as_f64(),
            r0: r0.as_f64(),
            cap: cap.as_f64(),
        },
        RadialProfile::LowerLog { eps_bar, r0, cap } => RadialProfile::LowerLog {
            eps_bar: eps_bar.as_f64(),
            r0: r0.as_f64(),
            cap: cap.as_f64(),
        },
    }
}

/// JSON form of a model manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldRecord {
    pub n: usize,
    pub eps: Option<f64>,
    pub eps_bar: Option<f64>,
    #[serde(rename = "R0")]
    pub r0: Option<f64>,
    pub cap: Option<f64>,
    pub profile: RadialProfile<f64>,
    pub nodes: Vec<f64>,
    pub f: Vec<f64>,
    pub fprime: Vec<f64>,
    pub k2: Vec<f64>,
}

impl ManifoldRecord {
    pub fn into_manifold<T: Real>(self) -> Result<ModelManifold<T>> {
        let conv = |v: Vec<f64>| v.into_iter().map(T::lit).collect::<Vec<T>>();
        let warp = WarpFunction::from_parts(conv(self.nodes), conv(self.f), conv(self.fprime), conv(self.k2))?;
        let profile = match self.profile {
            RadialProfile::Constant { k2 } => RadialProfile::Constant { k2: T::lit(k2) },
            RadialProfile::UpperLog { eps, r0, cap } => RadialProfile::UpperLog {
                eps: T::lit(eps),
                r0: T::lit(r0),
                cap: T::lit(cap),
            },
            RadialProfile::LowerLog { eps_bar, r0, cap } => RadialProfile::LowerLog {
                eps_bar: T::lit(eps_bar),
                r0: T::lit(r0),
                cap: T::lit(cap),
            },
        };
        ModelManifold::from_warp(self.n, warp, profile)
    }
}

/// Outcome of scanning a warp for the growth bounds
/// `f >= r (log r)^{1+e}` and `f'/f >= 1/r + (1+e)/(r log r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub eps_tilde: f64,
    /// Smallest node beyond which both bounds hold up to the end of the table.
    pub r1: Option<f64>,
    /// First node where a bound fails, when no `r1` exists.
    pub first_violation: Option<f64>,
    /// Last node where a bound fails, if any.
    pub last_violation: Option<f64>,
}

/// Scans the warp nodes `r >= e` for the growth bounds with exponent `1 + eps_tilde`.
pub fn check_comparison_bounds<T: Real>(
    warp: &WarpFunction<T>,
    profile: &CurvatureProfile<T>,
    eps_tilde: T,
) -> Result<ComparisonReport> {
    if !(eps_tilde > T::zero() && eps_tilde < profile.eps) {
        return Err(Error::param(
            "eps_tilde",
            format!("must lie in (0, eps) = (0, {}), got {}", profile.eps, eps_tilde),
        ));
    }
    let start = T::E();
    let one_plus = T::one() + eps_tilde;
    let mut first_violation = None;
    let mut last_violation = None;
    let mut scanned = None;
    for i in 0..warp.len() {
        let r = warp.nodes[i];
        if r < start {
            continue;
        }
        let lr = r.ln();
        let growth = warp.f[i] >= r * lr.powf(one_plus);
        let log_slope = warp.fprime[i] / warp.f[i] >= T::one() / r + one_plus / (r * lr);
        if !(growth && log_slope) {
            first_violation.get_or_insert(r);
            last_violation = Some(r);
        }
        scanned = Some(i);
    }
    let Some(last_idx) = scanned else {
        return Err(Error::Domain(format!(
            "warp table ends at {} before the scan start {}",
            warp.r_max(),
            start
        )));
    };
    let r1 = match last_violation {
        None => Some(start.max(warp.nodes[warp.nodes.partition_point(|&x| x < start)])),
        Some(v) => {
            let idx = warp.nodes.partition_point(|&x| x <= v);
            (idx <= last_idx).then(|| warp.nodes[idx])
        }
    };
    Ok(ComparisonReport {
        eps_tilde: eps_tilde.as_f64(),
        r1: r1.map(|x| x.as_f64()),
        first_violation: if r1.is_none() { first_violation.map(|x| x.as_f64()) } else { None },
        last_violation: last_violation.map(|x| x.as_f64()),
    })
}

/// `f_a <= f_k <= f_b` at every shared node (relative slack `1e-10` for rounding).
pub fn sandwich_check<T: Real>(
    f_a: &WarpFunction<T>,
    f_k: &WarpFunction<T>,
    f_b: &WarpFunction<T>,
) -> Result<bool> {
    if f_a.nodes != f_k.nodes || f_k.nodes != f_b.nodes {
        return Err(Error::Domain("warp functions must share their node sets".into()));
    }
    let slack = T::lit(1e-10);
    let le = |x: T, y: T| x <= y + slack * y.abs().max(T::one());
    Ok((0..f_k.len()).all(|i| le(f_a.f[i], f_k.f[i]) && le(f_k.f[i], f_b.f[i])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_warp_is_identity() {
        let w = solve_jacobi(|_| 0.0f64, 10.0, 1e-10).unwrap();
        assert_eq!(w.r_max(), 10.0);
        let (f, fp) = w.eval(10.0).unwrap();
        assert!((f - 10.0).abs() < 1e-12 && (fp - 1.0).abs() < 1e-12);
        for &r in &[0.3, 2.7, 9.99] {
            assert!((w.value(r).unwrap() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_warp_is_sinh() {
        let w = solve_jacobi(|_| 1.0f64, 2.0, 1e-10).unwrap();
        assert!((w.value(2.0).unwrap() - 2f64.sinh()).abs() < 1e-8);
        let (_, fp) = w.eval(1.234).unwrap();
        assert!((fp - 1.234f64.cosh()).abs() < 1e-8);
    }

    #[test]
    fn warp_invariants_hold() {
        let prof = CurvatureProfile::new(1.0f64, 0.5, 8.0, 0.5).unwrap();
        for p in [prof.upper(), prof.lower(), RadialProfile::hyperbolic()] {
            let m = ModelManifold::build(3, p, 60.0, &JacobiOptions::default()).unwrap();
            let a = m.warp().audit();
            assert_eq!(a.f_at_zero, 0.0);
            assert_eq!(a.fprime_at_zero, 1.0);
            assert!(a.min_fprime >= 1.0 - 1e-12);
            assert!(a.strictly_increasing && a.positive);
            assert!(a.max_tangential_curvature <= 1e-12);
            // node spacing reaches ~0.3 at r = 60
            assert!(a.max_second_difference_defect < 2e-2, "{a:?}");
        }
    }

    #[test]
    fn second_difference_defect_is_second_order() {
        let defect = |ds: f64| {
            let w = solve_jacobi_with(|_| 1.0f64, 3.0, &JacobiOptions { tol: 1e-12, ds }).unwrap();
            w.audit().max_second_difference_defect
        };
        let ratio = defect(0.02) / defect(0.01);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn overflow_reports_radius() {
        match solve_jacobi(|_| 1.0f64, 2000.0, 1e-8) {
            Err(Error::Overflow { radius }) => assert!(radius > 600.0 && radius < 720.0, "{radius}"),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn log_mode_continues_past_threshold() {
        // sinh(400) ~ 2.6e173 exceeds sqrt(f64::MAX) ~ 1.3e154.
        let w = solve_jacobi(|_| 1.0f64, 400.0, 1e-10).unwrap();
        let f = w.value(400.0).unwrap();
        let exact = (400.0f64 - 2f64.ln()).exp();
        assert!(((f - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn non_finite_profile_is_rejected() {
        let r = solve_jacobi(|r: f64| if r > 1.0 { f64::NAN } else { 0.0 }, 3.0, 1e-8);
        assert!(matches!(r, Err(Error::ProfileDomain { .. })));
    }

    #[test]
    fn laplacian_and_sphere_volume() {
        let flat = ModelManifold::<f64>::flat(3, 10.0).unwrap();
        assert!((flat.laplacian_r(2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((flat.sphere_volume(1.0).unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(flat.laplacian_r(0.0).is_err());
        let hyp = ModelManifold::<f64>::hyperbolic(2, 5.0).unwrap();
        assert!((hyp.laplacian_r(1.0).unwrap() - 1.0 / 1f64.tanh()).abs() < 1e-8);
        assert!((hyp.sphere_volume(1.0).unwrap() - 2.0 * std::f64::consts::PI * 1f64.sinh()).abs() < 1e-8);
        let vols: Vec<f64> = (1..50).map(|i| hyp.sphere_volume(i as f64 * 0.1).unwrap()).collect();
        assert!(vols.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn ball_volumes_match_closed_forms() {
        let flat = ModelManifold::<f64>::flat(3, 4.0).unwrap();
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 27.0;
        assert!((flat.ball_volume(3.0).unwrap() - exact).abs() < 1e-10 * exact);
        let hyp = ModelManifold::<f64>::hyperbolic(2, 4.0).unwrap();
        let exact = 2.0 * std::f64::consts::PI * (3f64.cosh() - 1.0);
        assert!((hyp.ball_volume(3.0).unwrap() - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn comparison_scan_on_flat_fails() {
        let prof = CurvatureProfile::new(1.0f64, 0.5, 8.0, 0.0).unwrap();
        let w = solve_jacobi(|_| 0.0, 1000.0, 1e-10).unwrap();
        let rep = check_comparison_bounds(&w, &prof, 0.5).unwrap();
        assert!(rep.r1.is_none());
        assert!(rep.first_violation.is_some());
        assert!(check_comparison_bounds(&w, &prof, 1.0).is_err());
        assert!(check_comparison_bounds(&w, &prof, 0.0).is_err());
    }

    #[test]
    fn comparison_scan_on_hyperbolic_succeeds() {
        let prof = CurvatureProfile::new(1.0f64, 0.5, 8.0, 0.0).unwrap();
        let w = solve_jacobi(|_| 1.0, 60.0, 1e-10).unwrap();
        let rep = check_comparison_bounds(&w, &prof, 0.5).unwrap();
        // brute force: sinh r >= r (log r)^1.5 and coth r >= 1/r + 1.5/(r log r) from r = 8 on
        let ok = |r: f64| r.sinh() >= r * r.ln().powf(1.5) && 1.0 / r.tanh() >= 1.0 / r + 1.5 / (r * r.ln());
        assert!((0..=520).map(|i| 8.0 + i as f64 * 0.1).all(ok));
        assert!(rep.r1.unwrap() < 8.01);
        assert!(rep.last_violation.is_none());
    }

    #[test]
    fn sandwich_with_closed_forms() {
        let w0 = solve_jacobi(|_| 0.0f64, 5.0, 1e-10).unwrap();
        let w1 = solve_jacobi(|_| 1.0f64, 5.0, 1e-10).unwrap();
        let w4 = solve_jacobi(|_| 4.0f64, 5.0, 1e-10).unwrap();
        assert!(sandwich_check(&w0, &w1, &w4).unwrap());
        assert!(sandwich_check(&w1, &w1, &w1).unwrap());
        assert!(!sandwich_check(&w4, &w1, &w0).unwrap());
        let short = solve_jacobi(|_| 1.0f64, 4.0, 1e-10).unwrap();
        assert!(sandwich_check(&w0, &short, &w4).is_err());
        // closed forms: r <= sinh r <= sinh(2r)/2
        for (i, &r) in w1.nodes().iter().enumerate() {
            assert!((w4.values()[i] - (2.0 * r).sinh() / 2.0).abs() < 1e-7 * (2.0 * r).sinh().max(1.0));
        }
    }

    #[test]
    fn record_round_trip() {
        let m = ModelManifold::<f64>::hyperbolic(2, 3.0).unwrap();
        let rec = m.record(None);
        let json = serde_json::to_string(&rec).unwrap();
        let back: ManifoldRecord = serde_json::from_str(&json).unwrap();
        let m2: ModelManifold<f64> = back.into_manifold().unwrap();
        assert_eq!(m2, m);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,f,fprime,laplacian_r,sphere_volume"));
        assert_eq!(text.lines().count(), m.warp().len() + 1);
    }
}
