use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tabulated solution of the Jacobi problem `f(0) = 0, f'(0) = 1, f'' = k^2 f`.
///
/// Between nodes `f` is reconstructed by quintic Hermite interpolation of
/// `(f, f', f'' = k^2 f)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpFunction<T> {
    pub(crate) nodes: Vec<T>,
    pub(crate) f: Vec<T>,
    pub(crate) fprime: Vec<T>,
    pub(crate) k2: Vec<T>,
}

/// Node-wise invariant audit of a warp function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WarpAudit {
    pub f_at_zero: f64,
    pub fprime_at_zero: f64,
    pub min_fprime: f64,
    pub strictly_increasing: bool,
    pub positive: bool,
    /// Largest tangential curvature `(1 - f'^2)/f^2` over nodes with `r > 0`.
    pub max_tangential_curvature: f64,
    /// Largest `|f'' - k^2 f| / max(1, f)` measured by second differences at interior nodes.
    pub max_second_difference_defect: f64,
}

impl<T: Real> WarpFunction<T> {
    pub fn from_parts(nodes: Vec<T>, f: Vec<T>, fprime: Vec<T>, k2: Vec<T>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 || f.len() != n || fprime.len() != n || k2.len() != n {
            return Err(Error::Domain("warp arrays must share a length of at least 2".into()));
        }
        if nodes[0] != T::zero() || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("warp nodes must start at 0 and increase strictly".into()));
        }
        Ok(WarpFunction { nodes, f, fprime, k2 })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.f
    }

    pub fn derivatives(&self) -> &[T] {
        &self.fprime
    }

    pub fn k_squared_at_nodes(&self) -> &[T] {
        &self.k2
    }

    pub fn r_max(&self) -> T {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(f(r), f'(r))` for `0 <= r <= r_max`.
    pub fn eval(&self, r: T) -> Result<(T, T)> {
        let rmax = self.r_max();
        if !(r >= T::zero() && r <= rmax) {
            return Err(Error::Domain(format!("r = {r} outside warp range [0, {rmax}]")));
        }
        let i = match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => return Ok((self.f[i], self.fprime[i])),
            Err(i) => i - 1,
        };
        Ok(self.hermite(i, r))
    }

    pub fn value(&self, r: T) -> Result<T> {
        self.eval(r).map(|v| v.0)
    }

    fn hermite(&self, i: usize, r: T) -> (T, T) {
        let (r0, r1) = (self.nodes[i], self.nodes[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (p0, p1) = (self.f[i], self.f[i + 1]);
        let (d0, d1) = (self.fprime[i] * h, self.fprime[i + 1] * h);
        let (s0, s1) = (self.k2[i] * p0 * h * h, self.k2[i + 1] * p1 * h * h);
        let c = T::lit;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = T::one() - c(10.0) * t3 + c(15.0) * t4 - c(6.0) * t5;
        let h1 = t - c(6.0) * t3 + c(8.0) * t4 - c(3.0) * t5;
        let h2 = c(0.5) * (t2 - c(3.0) * t3 + c(3.0) * t4 - t5);
        let h3 = c(0.5) * (t3 - c(2.0) * t4 + t5);
        let h4 = -c(4.0) * t3 + c(7.0) * t4 - c(3.0) * t5;
        let h5 = c(10.0) * t3 - c(15.0) * t4 + c(6.0) * t5;
        let value = p0 * h0 + d0 * h1 + s0 * h2 + s1 * h3 + d1 * h4 + p1 * h5;
        let g0 = -c(30.0) * t2 + c(60.0) * t3 - c(30.0) * t4;
        let g1 = T::one() - c(18.0) * t2 + c(32.0) * t3 - c(15.0) * t4;
        let g2 = c(0.5) * (c(2.0) * t - c(9.0) * t2 + c(12.0) * t3 - c(5.0) * t4);
        let g3 = c(0.5) * (c(3.0) * t2 - c(8.0) * t3 + c(5.0) * t4);
        let g4 = -c(12.0) * t2 + c(28.0) * t3 - c(15.0) * t4;
        let g5 = -g0;
        let slope = (p0 * g0 + d0 * g1 + s0 * g2 + s1 * g3 + d1 * g4 + p1 * g5) / h;
        (value, slope)
    }

    /// Checks the Jacobi invariants at every node.
    pub fn audit(&self) -> WarpAudit {
        let n = self.len();
        let min_fprime = self.fprime.iter().copied().fold(T::infinity(), T::min);
        let strictly_increasing = self.f.windows(2).all(|w| w[1] > w[0]);
        let positive = self.f[1..].iter().all(|&v| v > T::zero());
        let max_tangential_curvature = (1..n)
            .map(|i| (T::one() - self.fprime[i] * self.fprime[i]) / (self.f[i] * self.f[i]))
            .fold(T::neg_infinity(), T::max);
        let mut defect = T::zero();
        for i in 1..n - 1 {
            let (hm, hp) = (self.nodes[i] - self.nodes[i - 1], self.nodes[i + 1] - self.nodes[i]);
            let second = T::lit(2.0)
                * (hm * self.f[i + 1] - (hm + hp) * self.f[i] + hp * self.f[i - 1])
                / (hm * hp * (hm + hp));
            let d = (second - self.k2[i] * self.f[i]).abs() / self.f[i].max(T::one());
            defect = defect.max(d);
        }
        WarpAudit {
            f_at_zero: self.f[0].as_f64(),
            fprime_at_zero: self.fprime[0].as_f64(),
            min_fprime: min_fprime.as_f64(),
            strictly_increasing,
            positive,
            max_tangential_curvature: max_tangential_curvature.as_f64(),
            max_second_difference_defect: defect.as_f64(),
        }
    }
}
