//! Monotone cubic Hermite tables in log-log coordinates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `ln y` against `x = ln u` with exact slopes `d ln y / d ln u` at the nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogLogTable<T> {
    x: Vec<T>,
    y: Vec<T>,
    m: Vec<T>,
}

fn hermite<T: Real>(x0: T, x1: T, y0: T, y1: T, m0: T, m1: T, x: T) -> (T, T) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let (s2, s3) = (s * s, s * s * s);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let y = (two * s3 - three * s2 + T::one()) * y0
        + (s3 - two * s2 + s) * h * m0
        + (three * s2 - two * s3) * y1
        + (s3 - s2) * h * m1;
    let dy = T::lit(6.0) * (s2 - s) * (y0 - y1) / h
        + (three * s2 - T::lit(4.0) * s + T::one()) * m0
        + (three * s2 - two * s) * m1;
    (y, dy)
}

impl<T: Real> LogLogTable<T> {
    /// Checks strict monotonicity of both coordinates and the Fritsch-Carlson
    /// condition `alpha^2 + beta^2 <= 9` on every interval.
    pub fn new(x: Vec<T>, y: Vec<T>, m: Vec<T>) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() || x.len() != m.len() {
            return Err(Error::Precondition("table columns must share a length of at least 2".into()));
        }
        for i in 1..x.len() {
            let (lo, hi) = (x[i - 1].exp().as_f64(), x[i].exp().as_f64());
            let bad = |reason: &str| Error::Construction { lo, hi, reason: reason.into() };
            if !(x[i] > x[i - 1]) {
                return Err(bad("abscissae not strictly increasing"));
            }
            if !(y[i] > y[i - 1]) {
                return Err(bad("values not strictly increasing"));
            }
            let delta = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            let (a, b) = (m[i - 1] / delta, m[i] / delta);
            if !(a >= T::zero() && b >= T::zero() && a * a + b * b <= T::lit(9.0)) {
                return Err(bad("slopes violate the monotone Hermite condition"));
            }
        }
        Ok(LogLogTable { x, y, m })
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn slopes(&self) -> &[T] {
        &self.m
    }

    pub fn x_range(&self) -> (T, T) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn y_range(&self) -> (T, T) {
        (self.y[0], self.y[self.y.len() - 1])
    }

    fn interval(knots: &[T], v: T) -> usize {
        knots.partition_point(|&k| k <= v).clamp(1, knots.len() - 1) - 1
    }

    /// `(ln y, d ln y / d ln u)` at `x = ln u`.
    pub fn eval(&self, x: T) -> Result<(T, T)> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return Err(Error::Range { value: x.exp().as_f64(), min: lo.exp().as_f64(), max: hi.exp().as_f64() });
        }
        let i = Self::interval(&self.x, x);
        Ok(hermite(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], self.m[i], self.m[i + 1], x))
    }

    /// Solves `ln y(x) = target` by safeguarded Newton inside the bracketing interval.
    pub fn invert(&self, target: T) -> Result<T> {
        let (lo, hi) = self.y_range();
        if !(target >= lo && target <= hi) {
            return Err(Error::Range { value: target.exp().as_f64(), min: lo.exp().as_f64(), max: hi.exp().as_f64() });
        }
        let i = Self::interval(&self.y, target);
        let (mut a, mut b) = (self.x[i], self.x[i + 1]);
        let f = |x: T| hermite(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], self.m[i], self.m[i + 1], x);
        let mut x = a + (b - a) * (target - self.y[i]) / (self.y[i + 1] - self.y[i]);
        let tol = T::epsilon() * T::lit(4.0) * (T::one() + x.abs());
        for _ in 0..100 {
            let (v, dv) = f(x);
            let r = v - target;
            if r == T::zero() {
                return Ok(x);
            }
            if r > T::zero() {
                b = x;
            } else {
                a = x;
            }
            let newton = x - r / dv;
            let next = if dv > T::zero() && newton > a && newton < b {
                newton
            } else {
                (a + b) / T::lit(2.0)
            };
            if (next - x).abs() <= tol || b - a <= tol {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_table(k: f64) -> LogLogTable<f64> {
        let x: Vec<f64> = (0..=20).map(|i| -5.0 + 0.5 * i as f64).collect();
        let y = x.iter().map(|&x| k * x).collect();
        LogLogTable::new(x, y, vec![k; 21]).unwrap()
    }

    #[test]
    fn reproduces_power_laws() {
        let t = power_table(2.5);
        let (y, m) = t.eval(1.234).unwrap();
        assert!((y - 2.5 * 1.234).abs() < 1e-14 && (m - 2.5).abs() < 1e-14);
        assert!((t.invert(2.5 * -3.21).unwrap() + 3.21).abs() < 1e-13);
    }

    #[test]
    fn range_errors() {
        let t = power_table(1.0);
        assert!(matches!(t.eval(5.5), Err(Error::Range { .. })));
        assert!(matches!(t.invert(-6.0), Err(Error::Range { .. })));
    }

    #[test]
    fn rejects_non_monotone_data() {
        let r = LogLogTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.5], vec![1.0; 3]);
        assert!(matches!(r, Err(Error::Construction { .. })));
        let r = LogLogTable::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 5.0]);
        assert!(matches!(r, Err(Error::Construction { .. })));
    }

    #[test]
    fn fourth_order_on_smooth_data() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let y = x.iter().map(|x| x.exp()).collect();
            let m = x.iter().map(|x| x.exp()).collect();
            let t = LogLogTable::new(x, y, m).unwrap();
            (0..1000).map(|i| i as f64 / 1000.0).map(|x| (t.eval(x).unwrap().0 - x.exp()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(8) / err(16);
        assert!(ratio > 12.0, "{ratio}");
    }
}
