//! The pair `(H, G, gamma, phi, psi, F)` built from the two-branch homeomorphism `H`.

use serde::Serialize;

use super::table::LogLogTable;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_laguerre_points, gauss_legendre_points};
use crate::scalar::Real;

/// Lower end of the tabulated `u` range.
pub const TABLE_MIN: f64 = 1e-12;
/// Upper end of the tabulated `u` range.
pub const TABLE_MAX: f64 = 1e3;
/// Table nodes per decade of `u`.
pub const NODES_PER_DECADE: usize = 40;
/// Where the small-`t` branch of `H` ends.
pub const T_SMALL: f64 = 1e-3;

/// Cubic Hermite bridge in `(ln t, ln H)` between the two branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bridge<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
    pub m0: T,
    pub m1: T,
}

impl<T: Real> Bridge<T> {
    fn eval(&self, x: T) -> (T, T) {
        let h = self.x1 - self.x0;
        let s = (x - self.x0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (two, three) = (T::lit(2.0), T::lit(3.0));
        let y = (two * s3 - three * s2 + T::one()) * self.y0
            + (s3 - two * s2 + s) * h * self.m0
            + (three * s2 - two * s3) * self.y1
            + (s3 - s2) * h * self.m1;
        let dy = T::lit(6.0) * (s2 - s) * (self.y0 - self.y1) / h
            + (three * s2 - T::lit(4.0) * s + T::one()) * self.m0
            + (three * s2 - two * s) * self.m1;
        (y, dy)
    }
}

/// Tabulated columns on the `u` grid, each as a log-log Hermite table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YoungTables<T> {
    /// `H(u)`
    pub h: LogLogTable<T>,
    /// `G(u) = int_0^u H`
    pub g: LogLogTable<T>,
    /// `gamma(G(u)) = int_0^u H(v)/v dv`
    pub gamma: LogLogTable<T>,
    /// `K(u) = u H(u) - G(u)`
    pub k: LogLogTable<T>,
    /// `G~'(u^p) = H(u) (G(u)/u)^{p-1}`
    pub y: LogLogTable<T>,
}

/// Complementary Young data for exponent `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YoungPair<T> {
    pub p: T,
    pub eps0: T,
    pub lambda: T,
    pub t_small: T,
    pub t_large: T,
    /// `ln c` in `F(t) = c F~(t^p)`.
    pub log_c: T,
    pub bridge: Bridge<T>,
    pub tables: YoungTables<T>,
}

/// Builds the pair for `p >= 1`, `0 < eps0 < 1`, `1 < lambda < 1 + eps0`.
pub fn build_young_pair<T: Real>(p: T, eps0: T, lambda: T) -> Result<YoungPair<T>> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::param("p", format!("must be finite and at least 1, got {p}")));
    }
    if !(eps0 > T::zero() && eps0 < T::one()) {
        return Err(Error::param("eps0", format!("must lie in (0, 1), got {eps0}")));
    }
    if !(lambda > T::one() && lambda < T::one() + eps0) {
        return Err(Error::param("lambda", format!("must lie in (1, 1 + eps0) = (1, {}), got {lambda}", T::one() + eps0)));
    }
    let t_small = T::lit(T_SMALL);
    let q = p / eps0;
    let x0 = t_small.ln();
    let (y0, m0) = small_log_h(-x0, lambda);
    let mut t_large = T::one();
    let bridge = loop {
        let x1 = t_large.ln();
        let y1 = q * x1;
        let delta = (y1 - y0) / (x1 - x0);
        if delta > T::zero() {
            let (a, b) = (m0 / delta, q / delta);
            if a * a + b * b < T::lit(9.0) {
                break Bridge { x0, x1, y0, y1, m0, m1: q };
            }
        }
        t_large = t_large * T::lit(2.0);
        if t_large > T::lit(TABLE_MAX) {
            return Err(Error::Construction {
                lo: T_SMALL,
                hi: t_large.as_f64(),
                reason: "no monotone cubic bridge between the branches of H".into(),
            });
        }
    };
    let mut pair = YoungPair {
        p,
        eps0,
        lambda,
        t_small,
        t_large,
        log_c: T::zero(),
        bridge,
        tables: build_tables(p, lambda, &bridge, t_small, t_large, q)?,
    };
    pair.log_c = pair.calibrate_log_c()?;
    Ok(pair)
}

fn small_log_h<T: Real>(l: T, lambda: T) -> (T, T) {
    let ll = l.ln();
    (-l.ln() - lambda * ll.ln(), (T::one() + lambda / ll) / l)
}

/// `ln int_L^inf e^{-s} w(s) ds` for `w = g` or `w = g * sigma` with `g(s) = 1/(s (ln s)^lambda)`.
fn small_laguerre<T: Real>(l: T, lambda: T, with_sigma: bool) -> T {
    let mut sum = T::zero();
    for (z, w) in gauss_laguerre_points::<T>() {
        let s = l + z;
        let ls = s.ln();
        let mut g = T::one() / (s * ls.powf(lambda));
        if with_sigma {
            g = g * (T::one() + lambda / ls) / s;
        }
        sum = sum + w * g;
    }
    -l + sum.ln()
}

fn build_tables<T: Real>(p: T, lambda: T, bridge: &Bridge<T>, t_small: T, t_large: T, q: T) -> Result<YoungTables<T>> {
    let (lo, hi) = (T::lit(TABLE_MIN).ln(), T::lit(TABLE_MAX).ln());
    let n = (((hi - lo) / T::LN_10()).as_f64() * NODES_PER_DECADE as f64).round() as usize;
    let mut xs: Vec<T> = (0..=n).map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n)).collect();
    for j in [t_small.ln(), t_large.ln()] {
        if j > lo && j < hi {
            xs.push(j);
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let gap = T::lit(1e-6);
    xs.dedup_by(|b, a| (*b - *a).abs() < gap);

    let log_h = |x: T| -> (T, T) {
        if x <= bridge.x0 {
            small_log_h(-x, lambda)
        } else if x < bridge.x1 {
            bridge.eval(x)
        } else {
            (q * x, q)
        }
    };
    let nodes = gauss_legendre_points::<T>(T::zero(), T::one(), 8);
    let pm1 = p - T::one();
    let (mut lh, mut mh, mut lg, mut mg, mut lgam, mut mgam, mut lk, mut mk, mut ly, mut my) =
        (vec![], vec![], vec![], vec![], vec![], vec![], vec![], vec![], vec![], vec![]);
    let (mut g_lin, mut gam_lin) = (T::zero(), T::zero());
    let mut prev_x = xs[0];
    for &x in &xs {
        let (h_log, sigma) = log_h(x);
        let h = h_log.exp();
        let u = x.exp();
        let (g_log, gam_log, k_log);
        if x <= bridge.x0 {
            let l = -x;
            g_log = small_laguerre(l, lambda, false);
            k_log = small_laguerre(l, lambda, true);
            gam_log = (l.ln().powf(T::one() - lambda) / (lambda - T::one())).ln();
            g_lin = g_log.exp();
            gam_lin = gam_log.exp();
        } else {
            let a = prev_x.max(bridge.x0);
            let w = x - a;
            for &(s, wt) in &nodes {
                let xi = a + w * s;
                let hi = log_h(xi).0.exp();
                g_lin = g_lin + w * wt * hi * xi.exp();
                gam_lin = gam_lin + w * wt * hi;
            }
            g_log = g_lin.ln();
            gam_log = gam_lin.ln();
            k_log = (u * h - g_lin).ln();
        }
        let uh_over_g = (x + h_log - g_log).exp();
        lh.push(h_log);
        mh.push(sigma);
        lg.push(g_log);
        mg.push(uh_over_g);
        lgam.push(gam_log);
        mgam.push((h_log - gam_log).exp());
        lk.push(k_log);
        mk.push((x + h_log - k_log).exp() * sigma);
        ly.push(h_log + pm1 * (g_log - x));
        my.push(sigma + pm1 * (uh_over_g - T::one()));
        prev_x = x;
    }
    Ok(YoungTables {
        h: LogLogTable::new(xs.clone(), lh, mh)?,
        g: LogLogTable::new(xs.clone(), lg, mg)?,
        gamma: LogLogTable::new(xs.clone(), lgam, mgam)?,
        k: LogLogTable::new(xs.clone(), lk, mk)?,
        y: LogLogTable::new(xs, ly, my)?,
    })
}

fn neg_inf<T: Real>() -> T {
    T::neg_infinity()
}

impl<T: Real> YoungPair<T> {
    fn x_min(&self) -> T {
        self.tables.g.x_range().0
    }

    /// Bisection for `ln u` below the table where `ln y(ln u) = target`.
    fn small_y_inverse(&self, target: T) -> T {
        let mut lo_l = -self.x_min();
        let mut hi_l = lo_l * T::lit(2.0);
        while self.small_log_y(hi_l) > target {
            lo_l = hi_l;
            hi_l = hi_l * T::lit(2.0);
            if !hi_l.is_finite() {
                return neg_inf();
            }
        }
        for _ in 0..200 {
            let mid = (lo_l + hi_l) / T::lit(2.0);
            if self.small_log_y(mid) > target {
                lo_l = mid;
            } else {
                hi_l = mid;
            }
            if hi_l - lo_l <= T::epsilon() * hi_l {
                break;
            }
        }
        -(lo_l + hi_l) / T::lit(2.0)
    }

    fn small_log_y(&self, l: T) -> T {
        let (h, _) = small_log_h(l, self.lambda);
        h + (self.p - T::one()) * (small_laguerre(l, self.lambda, false) + l)
    }

    /// `(ln H, d ln H / d ln u)` at `ln u`.
    pub fn log_h(&self, x: T) -> Result<(T, T)> {
        if x < self.x_min() {
            return Ok(small_log_h(-x, self.lambda));
        }
        self.tables.h.eval(x)
    }

    /// `ln G` at `ln u`.
    pub fn log_g(&self, x: T) -> Result<T> {
        if x < self.x_min() {
            return Ok(small_laguerre(-x, self.lambda, false));
        }
        Ok(self.tables.g.eval(x)?.0)
    }

    /// `ln K` at `ln u`, `K = uH - G`.
    pub fn log_k(&self, x: T) -> Result<T> {
        if x < self.x_min() {
            return Ok(small_laguerre(-x, self.lambda, true));
        }
        Ok(self.tables.k.eval(x)?.0)
    }

    /// `ln gamma(G(u))` at `ln u`.
    pub fn log_gamma_of_u(&self, x: T) -> Result<T> {
        if x < self.x_min() {
            let l = -x;
            return Ok((l.ln().powf(T::one() - self.lambda) / (self.lambda - T::one())).ln());
        }
        Ok(self.tables.gamma.eval(x)?.0)
    }

    /// `ln phi'(t) = ln gamma^{-1}`-preimage `ln u` with `gamma(G(u)) = t`.
    pub fn log_phi_prime(&self, t: T) -> Result<T> {
        if t < T::zero() {
            return Err(Error::Domain(format!("negative argument {t}")));
        }
        if t == T::zero() {
            return Ok(neg_inf());
        }
        let lt = t.ln();
        if lt < self.tables.gamma.y_range().0 {
            let lm1 = self.lambda - T::one();
            let log_l = (lm1 * t).powf(-T::one() / lm1);
            return Ok(-log_l.exp());
        }
        self.tables.gamma.invert(lt)
    }

    pub fn log_phi(&self, t: T) -> Result<T> {
        let x = self.log_phi_prime(t)?;
        if x == neg_inf() {
            return Ok(x);
        }
        self.log_g(x)
    }

    /// `phi = gamma^{-1}`.
    pub fn phi(&self, t: T) -> Result<T> {
        Ok(self.log_phi(t)?.exp())
    }

    /// `phi' = G^{-1} o phi`.
    pub fn phi_prime(&self, t: T) -> Result<T> {
        Ok(self.log_phi_prime(t)?.exp())
    }

    pub fn log_psi(&self, t: T) -> Result<T> {
        let x = self.log_phi_prime(t)?;
        if x == neg_inf() {
            return Ok(x);
        }
        Ok((self.p - T::one()) * x + self.log_g(x)?)
    }

    /// `psi = phi'^{p-1} phi`.
    pub fn psi(&self, t: T) -> Result<T> {
        Ok(self.log_psi(t)?.exp())
    }

    /// `G(u) / (u H(u))`, which equals `phi'' phi / phi'^2` at `t` with `phi'(t) = u`.
    fn g_over_uh(&self, x: T) -> Result<T> {
        Ok((self.log_g(x)? - x - self.log_h(x)?.0).exp())
    }

    /// `phi''(t) phi(t) / phi'(t)^2`.
    pub fn phi_curvature_ratio(&self, t: T) -> Result<T> {
        let x = self.log_phi_prime(t)?;
        if x == neg_inf() {
            return Ok(T::one());
        }
        self.g_over_uh(x)
    }

    /// `psi'(t) / phi'(t)^p = 1 + (p - 1) phi'' phi / phi'^2`.
    pub fn psi_ratio(&self, t: T) -> Result<T> {
        Ok(T::one() + (self.p - T::one()) * self.phi_curvature_ratio(t)?)
    }

    /// Smallest argument of `phi` covered by the tables.
    pub fn t_table_min(&self) -> T {
        self.tables.gamma.y_range().0.exp()
    }

    /// Largest argument of `phi` covered by the tables.
    pub fn t_table_max(&self) -> T {
        self.tables.gamma.y_range().1.exp()
    }

    /// `G(u)`.
    pub fn g(&self, u: T) -> Result<T> {
        if u <= T::zero() {
            return if u == T::zero() { Ok(T::zero()) } else { Err(Error::Domain(format!("negative argument {u}"))) };
        }
        Ok(self.log_g(u.ln())?.exp())
    }

    /// `G^{-1}(s)`.
    pub fn g_inv(&self, s: T) -> Result<T> {
        if s <= T::zero() {
            return if s == T::zero() { Ok(T::zero()) } else { Err(Error::Domain(format!("negative argument {s}"))) };
        }
        let ls = s.ln();
        if ls < self.tables.g.y_range().0 {
            let mut lo = T::lit(2.0) * self.x_min();
            while small_laguerre(-lo, self.lambda, false) > ls {
                lo = lo * T::lit(2.0);
            }
            let mut hi = self.x_min();
            for _ in 0..200 {
                let mid = (lo + hi) / T::lit(2.0);
                if small_laguerre(-mid, self.lambda, false) > ls {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(((lo + hi) / T::lit(2.0)).exp());
        }
        Ok(self.tables.g.invert(ls)?.exp())
    }

    /// `H(u)`.
    pub fn h(&self, u: T) -> Result<T> {
        if u <= T::zero() {
            return if u == T::zero() { Ok(T::zero()) } else { Err(Error::Domain(format!("negative argument {u}"))) };
        }
        Ok(self.log_h(u.ln())?.0.exp())
    }

    /// `gamma(s) = int_0^s 1/G^{-1}`.
    pub fn gamma(&self, s: T) -> Result<T> {
        let u = self.g_inv(s)?;
        if u == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.log_gamma_of_u(u.ln())?.exp())
    }

    /// `G~(s) = G(s^{1/p})^p`.
    pub fn g_tilde(&self, s: T) -> Result<T> {
        if s == T::zero() {
            return Ok(T::zero());
        }
        Ok((self.p * self.log_g(s.ln() / self.p)?).exp())
    }

    /// `ln F~(y)`, with `F~` the complementary Young function of `G~`.
    pub fn log_f_tilde(&self, y: T) -> Result<T> {
        if y < T::zero() {
            return Err(Error::Domain(format!("negative argument {y}")));
        }
        if y == T::zero() {
            return Ok(neg_inf());
        }
        let ly = y.ln();
        let x = if ly < self.tables.y.y_range().0 { self.small_y_inverse(ly) } else { self.tables.y.invert(ly)? };
        if x == neg_inf() {
            return Ok(x);
        }
        Ok((self.p - T::one()) * self.log_g(x)? + self.log_k(x)?)
    }

    pub fn f_tilde(&self, y: T) -> Result<T> {
        Ok(self.log_f_tilde(y)?.exp())
    }

    /// `ln F(t) = ln c + ln F~(t^p)`.
    pub fn log_conjugate_f(&self, t: T) -> Result<T> {
        if t < T::zero() {
            return Err(Error::Domain(format!("negative argument {t}")));
        }
        if t == T::zero() {
            return Ok(neg_inf());
        }
        Ok(self.log_c + self.log_f_tilde((self.p * t.ln()).exp())?)
    }

    /// `F(t) = c F~(t^p)`.
    pub fn conjugate_f(&self, t: T) -> Result<T> {
        Ok(self.log_conjugate_f(t)?.exp())
    }

    /// Logarithm of `t^{p+eps0} exp(-(1/t) (log(e + 1/t))^{-1-eps0})`.
    pub fn log_f_bound(&self, t: T) -> T {
        let inv = T::one() / t;
        (self.p + self.eps0) * t.ln() - inv * (T::E() + inv).ln().powf(-T::one() - self.eps0)
    }

    /// Largest `t` at which `F` is tabulated.
    pub fn f_table_max(&self) -> T {
        (self.tables.y.y_range().1 / self.p).exp()
    }

    /// `min (ln bound - ln F~(t^p))` over a log grid of `t` from `1e-3` to the table end.
    fn calibrate_log_c(&self) -> Result<T> {
        let lo = T::lit(1e-3).ln();
        let top = self.f_table_max().ln();
        let hi = top - T::epsilon() * T::lit(64.0) * (T::one() + top.abs());
        let n = 4000;
        let mut best = T::infinity();
        for i in 0..=n {
            let lt = lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            let t = lt.exp();
            let gap = self.log_f_bound(t) - self.log_f_tilde((self.p * lt).exp())?;
            best = best.min(gap);
        }
        Ok(best)
    }

    /// Largest table point `t_delta` such that the two-sided bounds on `psi'/phi'^p` and on
    /// `psi^p / psi'^{p-1}` hold on every table point in `(0, t_delta]`.
    pub fn delta_thresholds(&self, delta: T) -> Result<T> {
        if !(delta > T::zero()) {
            return Err(Error::param("delta", format!("must be positive, got {delta}")));
        }
        let p = self.p;
        let pm1 = p - T::one();
        let exponent = if pm1 > T::zero() { (p / pm1).min(p) } else { p };
        let lower = p / (T::one() + delta).powf(exponent);
        let upper = T::lit(2.0) * p;
        let xs = self.tables.gamma.x();
        let mut last = None;
        for (i, &x) in xs.iter().enumerate() {
            let ratio = T::one() + pm1 * self.g_over_uh(x)?;
            if !(ratio >= lower && ratio <= upper) {
                if i == 0 {
                    return Err(Error::Domain(format!(
                        "delta bounds fail at the smallest table point t = {} (ratio {ratio}, admissible [{lower}, {upper}])",
                        self.tables.gamma.y()[0].exp()
                    )));
                }
                break;
            }
            last = Some(i);
        }
        let i = last.expect("first node checked");
        Ok(self.tables.gamma.y()[i].exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair() -> YoungPair<f64> {
        build_young_pair(2.0, 0.5, 1.25).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values from adaptive high-precision quadrature of the same H.
    #[allow(clippy::excessive_precision)]
    const ORACLE: [(f64, [f64; 4]); 6] = [
        (1e-12, [8.078932166832937e-03, 7.708311994674549e-15, 2.963535749896300e+00, 3.706201721583875e-16]),
        (1e-6, [2.165497454509491e-02, 1.968883794109746e-08, 3.142280241895100e+00, 1.966136603997459e-09]),
        (1e-3, [6.352914667891633e-02, 5.247321841749141e-05, 3.392516623498079e+00, 1.105592826142492e-05]),
        (0.5, [4.541026925530133e+00, 9.088295215555998e-01, 6.913827479834069e+00, 1.361683941209467e+00]),
        (10.0, [1.092587695178108e+04, 2.455292032216528e+04, 3.228850866640440e+03, 8.470584919564548e+04]),
        (100.0, [1.000000000000000e+08, 2.000007435256589e+09, 2.500097439796104e+07, 7.999992564743411e+09]),
    ];

    #[test]
    fn tables_match_reference_quadrature() {
        let y = pair();
        assert_eq!(y.t_large, 16.0);
        for (u, [h, g, gam, k]) in ORACLE {
            let x = u.ln();
            assert!(rel(y.h(u).unwrap(), h) < 1e-12, "H({u})");
            assert!(rel(y.g(u).unwrap(), g) < 1e-9, "G({u})");
            assert!(rel(y.log_gamma_of_u(x).unwrap().exp(), gam) < 1e-9, "Gamma({u})");
            assert!(rel(y.log_k(x).unwrap().exp(), k) < 1e-9, "K({u})");
        }
    }

    #[test]
    fn phi_matches_reference_inversion() {
        let cases = [
            (3.2, 1.024023431949065e-05, 2.604118537452194e-07),
            (5.0, 2.481101997982008e-01, 1.779616834488258e-01),
            (10.0, 7.802548938426004e-01, 2.910543229828189e+00),
        ];
        let y = pair();
        for (t, dphi, phi) in cases {
            assert!(rel(y.phi_prime(t).unwrap(), dphi) < 1e-6, "phi'({t})");
            assert!(rel(y.phi(t).unwrap(), phi) < 1e-6, "phi({t})");
        }
        let y = build_young_pair(2.0, 0.9, 1.5).unwrap();
        assert_eq!(y.t_large, 8.0);
        assert!(rel(y.phi(5.0).unwrap(), 2.252188552138511) < 1e-6);
        assert!(rel(y.phi_prime(3.2).unwrap(), 6.348830394257672e-01) < 1e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_young_pair(0.5, 0.5, 1.25), Err(Error::Parameter { name: "p", .. })));
        assert!(matches!(build_young_pair(2.0, 1.0, 1.25), Err(Error::Parameter { name: "eps0", .. })));
        assert!(matches!(build_young_pair(2.0, 0.5, 1.5), Err(Error::Parameter { name: "lambda", .. })));
        assert!(matches!(build_young_pair(2.0, 0.5, 1.0), Err(Error::Parameter { name: "lambda", .. })));
    }

    #[test]
    fn endpoints_vanish() {
        let y = pair();
        assert_eq!(y.g(0.0).unwrap(), 0.0);
        assert_eq!(y.gamma(0.0).unwrap(), 0.0);
        assert_eq!(y.phi(0.0).unwrap(), 0.0);
        assert_eq!(y.phi_prime(0.0).unwrap(), 0.0);
        assert_eq!(y.psi(0.0).unwrap(), 0.0);
        assert_eq!(y.conjugate_f(0.0).unwrap(), 0.0);
        assert!(y.phi(-1.0).is_err());
    }

    #[test]
    fn small_branch_asymptotics() {
        let y = pair();
        for i in 0..=10 {
            let t = 10f64.powf(-20.0 - 0.1 * i as f64);
            let l = (1.0 / t).ln();
            let v = y.h(t).unwrap() * l * l.ln().powf(1.25);
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tables_strictly_increasing() {
        for (p, e, l) in [(1.0f64, 0.5, 1.25), (2.0, 0.5, 1.25), (3.0, 0.5, 1.25), (2.0, 0.9, 1.5)] {
            let y = build_young_pair(p, e, l).unwrap();
            let t = &y.tables;
            for col in [&t.h, &t.g, &t.gamma, &t.k, &t.y] {
                assert!(col.y().windows(2).all(|w| w[1] > w[0]));
                assert!(col.slopes().iter().all(|&m| m > 0.0));
            }
        }
    }

    #[test]
    fn g_is_convex_on_random_triples() {
        let y = pair();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a: f64 = 10f64.powf(rng.gen_range(-12.0..2.5));
            let b: f64 = 10f64.powf(rng.gen_range(-12.0..2.5));
            let mid = y.g(0.5 * (a + b)).unwrap();
            let mean = 0.5 * (y.g(a).unwrap() + y.g(b).unwrap());
            assert!(mid <= mean * (1.0 + 1e-12), "{a} {b}");
        }
    }

    #[test]
    fn identities_and_round_trips() {
        let y = pair();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (lo, hi) = (y.t_table_min().ln(), 1e6f64.ln());
        for _ in 0..1000 {
            let t = rng.gen_range(lo..hi).exp();
            let phi = y.phi(t).unwrap();
            let dphi = y.phi_prime(t).unwrap();
            // G o phi' = phi, through the inverse G table
            assert!(rel(y.g_inv(phi).unwrap(), dphi) < 1e-6, "t = {t}");
            assert!(rel(y.g(dphi).unwrap(), phi) < 1e-6);
            assert!(rel(y.gamma(phi).unwrap(), t) < 1e-6);
            let s = dphi;
            assert!(rel(y.g_inv(y.g(s).unwrap()).unwrap(), s) < 1e-6);
        }
    }

    #[test]
    fn phi_prime_agrees_with_difference_quotient() {
        let y = pair();
        for t in [3.5, 5.0, 8.0, 20.0, 100.0] {
            let h = 1e-4 * t;
            let fd = (y.phi(t + h).unwrap() - y.phi(t - h).unwrap()) / (2.0 * h);
            assert!(rel(fd, y.phi_prime(t).unwrap()) < 1e-5, "t = {t}");
        }
    }

    #[test]
    fn psi_ratio_tends_to_p() {
        for p in [2.0f64, 3.0] {
            let y = build_young_pair(p, 0.5, 1.25).unwrap();
            let mut prev_gap = f64::INFINITY;
            for u in [1e-2, 1e-4, 1e-6, 1e-9, 1e-12] {
                let t = y.log_gamma_of_u(f64::ln(u)).unwrap().exp();
                let h = 1e-5 * t;
                let fd = (y.psi(t + h).unwrap() - y.psi(t - h).unwrap()) / (2.0 * h);
                let ratio = fd / y.phi_prime(t).unwrap().powf(p);
                assert!(rel(ratio, y.psi_ratio(t).unwrap()) < 1e-4, "p = {p}, u = {u}");
                let gap = (ratio - p).abs();
                assert!(gap < prev_gap);
                prev_gap = gap;
            }
            assert!(prev_gap < 0.05 * p);
            assert_eq!(y.psi_ratio(0.5).unwrap(), p);
        }
    }

    #[test]
    fn curvature_ratio_approaches_one() {
        let y = pair();
        let near = y.phi_curvature_ratio(y.t_table_min()).unwrap();
        let far = y.phi_curvature_ratio(10.0).unwrap();
        assert!((near - 1.0).abs() < (far - 1.0).abs());
        assert!((near - 1.0).abs() < 0.05);
    }

    #[test]
    fn young_inequality_for_g_tilde() {
        for (p, e, l) in [(2.0f64, 0.5, 1.25), (3.0, 0.5, 1.25)] {
            let y = build_young_pair(p, e, l).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..2000 {
                let s = 10f64.powf(rng.gen_range(-12.0..(3.0 * p)));
                let v = 10f64.powf(rng.gen_range(-4.0..12.0));
                let rhs = y.g_tilde(s).unwrap() + y.f_tilde(v).unwrap();
                assert!(s * v <= rhs * (1.0 + 1e-9), "{s} {v}");
            }
            // equality along the graph of G~'
            for x in [1e-6, 1e-3, 0.5, 10.0] {
                let s: f64 = f64::powf(x, p);
                let slope = y.h(x).unwrap() * (y.g(x).unwrap() / x).powf(p - 1.0);
                let rhs = y.g_tilde(s).unwrap() + y.f_tilde(slope).unwrap();
                assert!(rel(rhs, s * slope) < 1e-6);
            }
        }
    }

    #[test]
    fn f_respects_growth_bound() {
        for (p, e, l) in [(2.0f64, 0.5, 1.25), (3.0, 0.5, 1.25), (2.0, 0.9, 1.5)] {
            let y = build_young_pair(p, e, l).unwrap();
            assert!(y.log_c.is_finite());
            for i in 0..200 {
                let t = 10f64.powf(-4.0 + 4.0 * (i as f64 + 0.5) / 200.0);
                assert!(y.log_conjugate_f(t).unwrap() <= y.log_f_bound(t), "t = {t}");
            }
            // F(t) t^{-p-eps0} increases towards its limit c
            let g = |t: f64| y.log_conjugate_f(t).unwrap() - (p + e) * t.ln();
            let (a, b, c) = (g(1e4), g(1e5), g(1e6));
            assert!(a < b && b < c && c - b < b - a && c <= 0.0, "{p} {e}: {a} {b} {c}");
        }
    }

    #[test]
    fn delta_thresholds_behave() {
        let y = pair();
        assert_eq!(y.delta_thresholds(1e6).unwrap(), y.t_table_max());
        let t1 = y.delta_thresholds(1.0).unwrap();
        let t05 = y.delta_thresholds(0.5).unwrap();
        let t01 = y.delta_thresholds(0.1).unwrap();
        assert!(t01 > 0.0 && t01.is_finite() && t01 < t1);
        assert!(t1 >= t05 && t05 >= t01);
        assert!(y.delta_thresholds(1e-4).is_err());
        assert!(y.delta_thresholds(0.0).is_err());
        // brute force: the ratio stays admissible on a fine grid below t_delta
        let lower = 2.0 / 1.1f64.powi(2);
        for i in 0..200 {
            let t = y.t_table_min() + (t01 - y.t_table_min()) * i as f64 / 199.0;
            let r = y.psi_ratio(t).unwrap();
            assert!(r >= lower - 1e-9 && r <= 4.0);
        }
    }

    #[test]
    fn n_function_limits() {
        let y = pair();
        let lo = 1e-12;
        let hi = 1e3;
        assert!(y.g(lo).unwrap() / lo < 1e-2);
        assert!(y.g(hi).unwrap() / hi > 1e9);
    }

    #[test]
    fn serializes_parameters_and_tables() {
        let y = pair();
        let v: serde_json::Value = serde_json::to_value(&y).unwrap();
        assert_eq!(v["p"], 2.0);
        assert_eq!(v["tables"]["g"]["x"].as_array().unwrap().len(), y.tables.g.x().len());
    }

    #[test]
    fn single_precision_build() {
        let y = build_young_pair(2.0f32, 0.5, 1.25).unwrap();
        assert!((y.phi(5.0).unwrap() - 0.17796168).abs() < 1e-3);
    }
}
