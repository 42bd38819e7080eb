use std::sync::Arc;

use serde::Serialize;

use super::weights::WeightFunctions;
use crate::error::{Error, Result};
use crate::pde::{grad_log_w, PolarGrid, ScalarField};
use crate::scalar::Real;
use crate::young::YoungPair;

/// Default discretization allowance for the one-sided checks.
pub const TOL_DISC: f64 = 0.05;

/// Test function `Psi` in the Caccioppoli inequality.
#[derive(Clone, Copy, Debug)]
pub enum PsiChoice<'a, T> {
    /// `Psi(t) = t^2`.
    Square,
    /// `Psi = psi = phi'^{p-1} phi` of a Young pair.
    Young(&'a YoungPair<T>),
}

impl<T: Real> PsiChoice<'_, T> {
    /// `(ln Psi(t), ln Psi'(t))`, both `-inf` at `t = 0`.
    fn logs(&self, t: T) -> Result<(T, T)> {
        if t <= T::zero() {
            return Ok((T::neg_infinity(), T::neg_infinity()));
        }
        match self {
            PsiChoice::Square => Ok((T::lit(2.0) * t.ln(), T::lit(2.0).ln() + t.ln())),
            PsiChoice::Young(pair) => {
                let lpp = pair.log_phi_prime(t)?;
                Ok((pair.log_psi(t)?, pair.psi_ratio(t)?.ln() + pair.p * lpp))
            }
        }
    }
}

/// Which inequality `caccioppoli_check` evaluates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CaccioppoliForm<T> {
    /// `int eta^2 Psi'(h)|grad u|^2 <= 4 int eta^2 Psi'(h)|grad theta|^2
    ///   + 8 nu^2 int Psi^2/Psi'(h) |grad eta|^2 + 4 nu^2 int eta^2 Psi^2/Psi'(h) |grad log W|^2`.
    MinimalGraph,
    /// `(int eta^p Psi'(h)|grad u|^p)^{1/p} <= (int eta^p Psi'(h)|grad theta|^p)^{1/p}
    ///   + p nu (int Psi^p/Psi'^{p-1}(h) |grad eta|^p)^{1/p}`.
    PLaplace { p: T },
}

/// One-sided inequality `lhs <= rhs` measured on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Individual integrals entering the two sides.
    pub terms: Vec<(String, f64)>,
    /// `lhs / rhs`, a sharpness indicator; `None` when `rhs = 0`.
    pub ratio: Option<f64>,
    /// `max(0, lhs / rhs - 1)`: the excess the discretization needs.
    pub slack: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub n_r: usize,
    pub n_theta: usize,
}

impl InequalityReport {
    fn new(name: &str, lhs: f64, rhs: f64, terms: Vec<(String, f64)>, tolerance: f64, grid: (usize, usize)) -> Self {
        let ratio = (rhs > 0.0).then(|| lhs / rhs);
        let slack = match ratio {
            Some(q) => (q - 1.0).max(0.0),
            None if lhs > 0.0 => f64::INFINITY,
            None => 0.0,
        };
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            terms,
            ratio,
            slack,
            tolerance,
            passed: lhs <= rhs * (1.0 + tolerance),
            n_r: grid.0,
            n_theta: grid.1,
        }
    }
}

/// Smallest power of two `nu` with `sup|u - theta| / nu <= t_delta`.
pub fn choose_nu<T: Real>(sup_diff: T, t_delta: T) -> Result<T> {
    if !(t_delta > T::zero()) || !(sup_diff >= T::zero()) {
        return Err(Error::param("t_delta", "threshold must be positive and the difference finite"));
    }
    if sup_diff == T::zero() {
        return Ok(T::one());
    }
    let k = (sup_diff / t_delta).log2().ceil();
    let mut nu = T::lit(2.0).powf(k);
    while sup_diff / nu > t_delta {
        nu = nu * T::lit(2.0);
    }
    Ok(nu)
}

/// Radial tent: `1` on `r <= r_in`, linear down to `0` at `r_out`, `0` beyond.
pub fn radial_tent<T: Real>(grid: &Arc<PolarGrid<T>>, r_in: T, r_out: T) -> Result<ScalarField<T>> {
    if !(r_in >= T::zero() && r_out > r_in) {
        return Err(Error::param("r_out", format!("need 0 <= r_in < r_out, got {r_in}, {r_out}")));
    }
    Ok(ScalarField::from_fn(grid.clone(), |r, _| ((r_out - r) / (r_out - r_in)).max(T::zero()).min(T::one())))
}

fn same_grid<T: Real>(fields: &[&ScalarField<T>]) -> Result<()> {
    let g = fields[0].grid();
    for f in fields {
        if !Arc::ptr_eq(f.grid(), g) {
            return Err(Error::Precondition("fields live on different grids".into()));
        }
        if f.location() != crate::pde::Location::Node {
            return Err(Error::Precondition("expected nodal fields".into()));
        }
    }
    Ok(())
}

fn check_cutoff<T: Real>(eta: &ScalarField<T>) -> Result<()> {
    let g = eta.grid();
    if eta.values().iter().any(|&v| !(v >= T::zero() && v <= T::one())) {
        return Err(Error::Precondition("cutoff must take values in [0, 1]".into()));
    }
    let nr = g.n_r();
    for i in [nr - 1, nr] {
        if eta.ring(i).iter().any(|&v| v != T::zero()) {
            return Err(Error::Precondition(format!("cutoff support reaches the boundary (ring {i} is nonzero)")));
        }
    }
    Ok(())
}

/// Per-cell averages of `|u - theta| / nu`.
fn cell_h<T: Real>(u: &ScalarField<T>, theta: &ScalarField<T>, nu: T) -> Result<Vec<T>> {
    let h = u.zip_with(theta, |a, b| (a - b).abs() / nu)?;
    Ok(h.to_cells()?.into_values())
}

fn grid_shape<T: Real>(g: &PolarGrid<T>) -> (usize, usize) {
    (g.n_r(), g.n_theta())
}

/// Evaluates the Caccioppoli inequality for a computed solution `u` with data `theta`.
pub fn caccioppoli_check<T: Real>(
    u: &ScalarField<T>,
    theta: &ScalarField<T>,
    nu: T,
    eta: &ScalarField<T>,
    psi: PsiChoice<'_, T>,
    form: CaccioppoliForm<T>,
    tol_disc: f64,
) -> Result<InequalityReport> {
    same_grid(&[u, theta, eta])?;
    if !(nu > T::zero()) {
        return Err(Error::param("nu", format!("must be positive, got {nu}")));
    }
    check_cutoff(eta)?;
    let g = u.grid();
    let h = cell_h(u, theta, nu)?;
    if let PsiChoice::Young(pair) = psi {
        let top = h.iter().fold(T::zero(), |a, &b| a.max(b));
        if top > pair.t_table_max() {
            return Err(Error::Range { value: top.as_f64(), min: 0.0, max: pair.t_table_max().as_f64() });
        }
    }
    let du = u.cell_gradient_squared()?.into_values();
    let dth = theta.cell_gradient_squared()?.into_values();
    let deta = eta.cell_gradient_squared()?.into_values();
    let eta_c = eta.to_cells()?.into_values();
    let cells = g.cells();
    let report = match form {
        CaccioppoliForm::MinimalGraph => {
            let dlw = grad_log_w(u)?.into_values();
            let (mut a, mut b, mut c, mut d) = (T::zero(), T::zero(), T::zero(), T::zero());
            for (k, cell) in cells.iter().enumerate() {
                let (lp, ldp) = psi.logs(h[k])?;
                if ldp == T::neg_infinity() {
                    continue;
                }
                let v = cell.volume;
                let e2 = eta_c[k] * eta_c[k];
                let dpsi = ldp.exp();
                let ratio = (T::lit(2.0) * lp - ldp).exp();
                a = a + v * e2 * dpsi * du[k];
                b = b + v * e2 * dpsi * dth[k];
                c = c + v * ratio * deta[k];
                d = d + v * e2 * ratio * dlw[k] * dlw[k];
            }
            let nu2 = nu * nu;
            let rhs = T::lit(4.0) * b + T::lit(8.0) * nu2 * c + T::lit(4.0) * nu2 * d;
            let terms = vec![
                ("eta2_dpsi_grad_u2".into(), a.as_f64()),
                ("eta2_dpsi_grad_theta2".into(), b.as_f64()),
                ("psi2_over_dpsi_grad_eta2".into(), c.as_f64()),
                ("eta2_psi2_over_dpsi_grad_log_w2".into(), d.as_f64()),
            ];
            InequalityReport::new("caccioppoli_minimal_graph", a.as_f64(), rhs.as_f64(), terms, tol_disc, grid_shape(g))
        }
        CaccioppoliForm::PLaplace { p } => {
            if !(p > T::one()) {
                return Err(Error::param("p", format!("must exceed 1, got {p}")));
            }
            let half_p = p / T::lit(2.0);
            let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
            for (k, cell) in cells.iter().enumerate() {
                let (lp, ldp) = psi.logs(h[k])?;
                if ldp == T::neg_infinity() {
                    continue;
                }
                let v = cell.volume;
                let ep = eta_c[k].powf(p);
                let dpsi = ldp.exp();
                a = a + v * ep * dpsi * du[k].powf(half_p);
                b = b + v * ep * dpsi * dth[k].powf(half_p);
                c = c + v * (p * lp - (p - T::one()) * ldp).exp() * deta[k].powf(half_p);
            }
            let inv = T::one() / p;
            let lhs = a.powf(inv);
            let rhs = b.powf(inv) + p * nu * c.powf(inv);
            let terms = vec![
                ("eta_p_dpsi_grad_u_p".into(), a.as_f64()),
                ("eta_p_dpsi_grad_theta_p".into(), b.as_f64()),
                ("psi_p_over_dpsi_grad_eta_p".into(), c.as_f64()),
            ];
            InequalityReport::new("caccioppoli_p_laplace", lhs.as_f64(), rhs.as_f64(), terms, tol_disc, grid_shape(g))
        }
    };
    Ok(report)
}

/// Weighted Poincare inequality
/// `n (int phi(h)^p L)^{1/p} <= p (int |grad h|^p phi'(h)^p w^p)^{1/p}` with `h = |u - theta| / nu`.
pub fn poincare_check<T: Real>(
    u: &ScalarField<T>,
    theta: &ScalarField<T>,
    nu: T,
    pair: &YoungPair<T>,
    weights: &WeightFunctions<T>,
    tol_disc: f64,
) -> Result<InequalityReport> {
    same_grid(&[u, theta])?;
    if !(nu > T::zero()) {
        return Err(Error::param("nu", format!("must be positive, got {nu}")));
    }
    let g = u.grid();
    if !Arc::ptr_eq(g.manifold(), weights.manifold()) && g.dim() != weights.manifold().dim() {
        return Err(Error::Precondition("weights were built for a different manifold".into()));
    }
    if (pair.p - weights.p).abs() > T::epsilon() * T::lit(16.0) * pair.p {
        return Err(Error::Precondition(format!("Young pair exponent {} differs from the weight exponent {}", pair.p, weights.p)));
    }
    let p = pair.p;
    let h = cell_h(u, theta, nu)?;
    let top = h.iter().fold(T::zero(), |a, &b| a.max(b));
    if top > pair.t_table_max() {
        return Err(Error::Range { value: top.as_f64(), min: 0.0, max: pair.t_table_max().as_f64() });
    }
    let diff = u.zip_with(theta, |a, b| a - b)?;
    let dh2 = diff.cell_gradient_squared()?.into_values();
    let inv_nu2 = T::one() / (nu * nu);
    let (mut a, mut b) = (T::zero(), T::zero());
    for (k, cell) in g.cells().iter().enumerate() {
        if h[k] <= T::zero() {
            continue;
        }
        let r = g.cell_center(cell.ring, cell.sector).0;
        let v = cell.volume;
        a = a + v * (p * pair.log_phi(h[k])?).exp() * weights.l(r);
        b = b + v * (dh2[k] * inv_nu2).powf(p / T::lit(2.0)) * (p * pair.log_phi_prime(h[k])?).exp() * weights.w(r).powf(p);
    }
    let inv = T::one() / p;
    let n = T::from_usize_lossy(g.dim());
    let lhs = n * a.powf(inv);
    let rhs = p * b.powf(inv);
    let terms = vec![("phi_p_l".into(), a.as_f64()), ("grad_h_p_dphi_p_w_p".into(), b.as_f64())];
    Ok(InequalityReport::new("weighted_poincare", lhs.as_f64(), rhs.as_f64(), terms, tol_disc, grid_shape(g)))
}
