use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::ModelManifold;
use crate::scalar::Real;

/// Radial weights `E, C, L, w` of the weighted Poincare inequality.
///
/// `E` vanishes on `[0, r1]`, equals `(1 + eps~) log(1+r) / log r` beyond `2 r1`, and is a
/// smoothstep blend in between.
#[derive(Clone, Debug)]
pub struct WeightFunctions<T> {
    manifold: Arc<ModelManifold<T>>,
    pub p: T,
    pub eps_tilde: T,
    pub r1: T,
}

/// One row of [`WeightFunctions::tabulate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightRow {
    pub r: f64,
    pub e: f64,
    pub c: f64,
    pub l: f64,
    pub w: f64,
    pub grad_w: f64,
}

/// Where `|grad w| <= L^{1/p}` starts to hold on the warp table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradWAudit {
    /// Smallest warp node beyond which the bound holds at every node; `None` if it fails at `r_max`.
    pub r2: Option<f64>,
    /// `max |grad w|` over nodes below `r2`.
    pub core_bound: f64,
    /// `max |grad w| / L^{1/p}` over nodes at or beyond `r2`.
    pub max_ratio_beyond: f64,
    pub nodes_checked: usize,
}

/// `r log(1+r) Delta r >= (n-1)(log(1+r) + E)` on the warp nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplacianAudit {
    /// Smallest `lhs - rhs` over nodes.
    pub min_margin: f64,
    pub worst_radius: f64,
    pub violations: usize,
    pub nodes_checked: usize,
}

impl<T: Real> WeightFunctions<T> {
    pub fn new(manifold: Arc<ModelManifold<T>>, p: T, eps_tilde: T, r1: T) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return Err(Error::param("p", format!("must be finite and greater than 1, got {p}")));
        }
        if !(eps_tilde > T::zero()) || !eps_tilde.is_finite() {
            return Err(Error::param("eps_tilde", format!("must be positive, got {eps_tilde}")));
        }
        if !(r1 > T::one()) || !r1.is_finite() {
            return Err(Error::param("r1", format!("must exceed 1 so that log r1 > 0, got {r1}")));
        }
        Ok(WeightFunctions { manifold, p, eps_tilde, r1 })
    }

    pub fn manifold(&self) -> &Arc<ModelManifold<T>> {
        &self.manifold
    }

    fn n(&self) -> T {
        T::from_usize_lossy(self.manifold.dim())
    }

    /// `(E, E')`.
    pub fn e(&self, r: T) -> (T, T) {
        if r <= self.r1 {
            return (T::zero(), T::zero());
        }
        let k = T::one() + self.eps_tilde;
        let (lp, lr) = (r.ln_1p(), r.ln());
        let formula = k * lp / lr;
        let dformula = k * (T::one() / ((T::one() + r) * lr) - lp / (r * lr * lr));
        let x = (r - self.r1) / self.r1;
        let s = x.smoothstep();
        let ds = x.smoothstep_prime() / self.r1;
        (s * formula, ds * formula + s * dformula)
    }

    /// `(C, C')` with `C = r / (n (1+r)) + (n-1) E / n`.
    pub fn c(&self, r: T) -> (T, T) {
        let n = self.n();
        let (e, de) = self.e(r);
        let one = T::one();
        (r / (n * (one + r)) + (n - one) * e / n, one / (n * (one + r) * (one + r)) + (n - one) * de / n)
    }

    pub fn l(&self, r: T) -> T {
        r.ln_1p() + self.c(r).0
    }

    /// `w = r log(1+r) / L^{(p-1)/p}`.
    pub fn w(&self, r: T) -> T {
        let p = self.p;
        r * r.ln_1p() / self.l(r).powf((p - T::one()) / p)
    }

    /// Radial derivative of `w`, which is `|grad w|` up to sign.
    pub fn grad_w(&self, r: T) -> T {
        let one = T::one();
        let p = self.p;
        let (c, dc) = self.c(r);
        let lp = r.ln_1p();
        let l = lp + c;
        let a = (lp + r / (one + r)) / l;
        let b = (one / p - one) * r * lp * (one / (one + r) + dc) / (l * l);
        l.powf(one / p) * (a + b)
    }

    /// Explicit bound `1/n + (n-1)/n (1 + eps~) log(1 + r1) / log r1` on `C`.
    pub fn c_bound(&self) -> T {
        let n = self.n();
        let one = T::one();
        one / n + (n - one) / n * (one + self.eps_tilde) * self.r1.ln_1p() / self.r1.ln()
    }

    pub fn tabulate(&self, radii: &[T]) -> Vec<WeightRow> {
        radii
            .iter()
            .map(|&r| WeightRow {
                r: r.as_f64(),
                e: self.e(r).0.as_f64(),
                c: self.c(r).0.as_f64(),
                l: self.l(r).as_f64(),
                w: self.w(r).as_f64(),
                grad_w: self.grad_w(r).as_f64(),
            })
            .collect()
    }

    /// Scans the warp nodes for the region where `|grad w| <= L^{1/p}`.
    pub fn grad_w_audit(&self) -> GradWAudit {
        let nodes: Vec<T> = self.manifold.warp().nodes().iter().copied().filter(|&r| r > T::zero()).collect();
        let inv_p = T::one() / self.p;
        let ratio = |r: T| self.grad_w(r).abs() / self.l(r).powf(inv_p);
        let slack = T::one() + T::epsilon() * T::lit(64.0);
        let mut start = nodes.len();
        while start > 0 && ratio(nodes[start - 1]) <= slack {
            start -= 1;
        }
        let r2 = (start < nodes.len()).then(|| nodes[start].as_f64());
        let core_bound = nodes[..start].iter().fold(T::zero(), |a, &r| a.max(self.grad_w(r).abs()));
        let max_ratio_beyond = nodes[start..].iter().fold(T::zero(), |a, &r| a.max(ratio(r)));
        GradWAudit {
            r2,
            core_bound: core_bound.as_f64(),
            max_ratio_beyond: max_ratio_beyond.as_f64(),
            nodes_checked: nodes.len(),
        }
    }

    /// Checks the Laplacian lower bound that feeds the Poincare inequality.
    pub fn laplacian_audit(&self) -> Result<LaplacianAudit> {
        let nm1 = self.n() - T::one();
        let mut min_margin = T::infinity();
        let mut worst = T::zero();
        let mut violations = 0;
        let mut checked = 0;
        for &r in self.manifold.warp().nodes().iter().filter(|&&r| r > T::zero()) {
            let lhs = r * r.ln_1p() * self.manifold.laplacian_r(r)?;
            let rhs = nm1 * (r.ln_1p() + self.e(r).0);
            let margin = lhs - rhs;
            // relative rounding allowance
            if margin < -T::epsilon() * T::lit(64.0) * rhs.abs() {
                violations += 1;
            }
            if margin < min_margin {
                min_margin = margin;
                worst = r;
            }
            checked += 1;
        }
        Ok(LaplacianAudit { min_margin: min_margin.as_f64(), worst_radius: worst.as_f64(), violations, nodes_checked: checked })
    }
}
