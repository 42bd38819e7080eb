//! Fixed-order Gauss rules and a few composite integrators.

use std::sync::OnceLock;

use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed once per order.
fn legendre_rule(order: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: [OnceLock<(Vec<f64>, Vec<f64>)>; 17] = [const { OnceLock::new() }; 17];
    assert!((1..=16).contains(&order), "unsupported Gauss-Legendre order {order}");
    RULES[order].get_or_init(|| {
        let n = order;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
        (x, w)
    })
}

/// Gauss-Laguerre rule for `int_0^inf e^{-y} g(y) dy`.
fn laguerre_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 24;
        let mut x = vec![0.0; N];
        let mut w = vec![0.0; N];
        let mut z = 0.0f64;
        for i in 0..N {
            let nf = N as f64;
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2])
                }
            };
            let mut pp = 0.0;
            for _ in 0..200 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..N {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 - z) * p2 / (j + 1) as f64 - j as f64 * p3 / (j + 1) as f64;
                }
                pp = nf * (p1 - p2) / z;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            // w_i = 1 / (z_i L_n'(z_i)^2)
            w[i] = 1.0 / (z * pp * pp);
        }
        (x, w)
    })
}

/// `int_a^b g` with an `order`-point Gauss-Legendre rule.
pub fn gauss_legendre<T: Real>(a: T, b: T, order: usize, mut g: impl FnMut(T) -> T) -> T {
    let (x, w) = legendre_rule(order);
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    x.iter()
        .zip(w)
        .fold(T::zero(), |acc, (&xi, &wi)| acc + T::lit(wi) * g(mid + half * T::lit(xi)))
        * half
}

/// Nodes (mapped to `[a, b]`) and weights of the `order`-point Gauss-Legendre rule.
pub fn gauss_legendre_points<T: Real>(a: T, b: T, order: usize) -> Vec<(T, T)> {
    let (x, w) = legendre_rule(order);
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    x.iter()
        .zip(w)
        .map(|(&xi, &wi)| (mid + half * T::lit(xi), half * T::lit(wi)))
        .collect()
}

/// Nodes and weights of the Gauss-Laguerre rule (weight `e^{-y}` on `[0, inf)`).
pub fn gauss_laguerre_points<T: Real>() -> Vec<(T, T)> {
    let (x, w) = laguerre_rule();
    x.iter().zip(w).map(|(&a, &b)| (T::lit(a), T::lit(b))).collect()
}

/// Composite Gauss-Legendre over `panels` equal panels.
pub fn composite<T: Real>(a: T, b: T, panels: usize, order: usize, mut g: impl FnMut(T) -> T) -> T {
    let h = (b - a) / T::from_usize_lossy(panels);
    (0..panels).fold(T::zero(), |acc, k| {
        let lo = a + h * T::from_usize_lossy(k);
        acc + gauss_legendre(lo, lo + h, order, &mut g)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for order in 1..=10 {
            let deg = 2 * order - 1;
            let v = gauss_legendre(0.0f64, 2.0, order, |x| x.powi(deg as i32));
            let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-12 * exact, "order {order}: {v} vs {exact}");
        }
    }

    #[test]
    fn laguerre_moments() {
        // int_0^inf e^{-y} y^k dy = k!
        let pts = gauss_laguerre_points::<f64>();
        let mut fact = 1.0;
        for k in 0..20 {
            if k > 0 {
                fact *= k as f64;
            }
            let v: f64 = pts.iter().map(|(y, w)| w * y.powi(k)).sum();
            assert!((v - fact).abs() < 1e-10 * fact, "moment {k}: {v} vs {fact}");
        }
    }

    #[test]
    fn composite_sine() {
        let v = composite(0.0f64, std::f64::consts::PI, 8, 5, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
