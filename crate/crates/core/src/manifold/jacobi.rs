//! Adaptive Dormand-Prince 5(4) integration of the Jacobi initial value problem.

use crate::error::{Error, Result};
use crate::manifold::warp::WarpFunction;
use crate::scalar::Real;

/// Integration controls for [`solve_jacobi_with`].
#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions<T> {
    /// Local error tolerance per unit length (mixed absolute/relative).
    pub tol: T,
    /// Output node spacing in `s = log(1 + r)`.
    pub ds: T,
}

impl<T: Real> Default for JacobiOptions<T> {
    fn default() -> Self {
        JacobiOptions {
            tol: T::lit(1e-10).max(T::epsilon() * T::lit(16.0)),
            ds: T::lit(0.005),
        }
    }
}

/// Output nodes `r_i = exp(i ds') - 1` with `ds' <= ds` chosen so the last node is `r_max`.
pub fn log_spaced_nodes<T: Real>(r_max: T, ds: T) -> Vec<T> {
    let s_max = r_max.ln_1p();
    let n = (s_max / ds).ceil().to_usize().unwrap_or(1).max(1);
    let step = s_max / T::from_usize_lossy(n);
    let mut nodes: Vec<T> = (0..n).map(|i| (step * T::from_usize_lossy(i)).exp_m1()).collect();
    nodes.push(r_max);
    nodes
}

/// Solves `f(0) = 0, f'(0) = 1, f'' = k^2 f` on `[0, r_max]` with default node spacing.
pub fn solve_jacobi<T: Real>(k_squared: impl Fn(T) -> T, r_max: T, tol: T) -> Result<WarpFunction<T>> {
    solve_jacobi_with(
        k_squared,
        r_max,
        &JacobiOptions {
            tol,
            ..JacobiOptions::default()
        },
    )
}

#[derive(Clone, Copy)]
enum Mode {
    /// `(f, f')`
    Linear,
    /// `(log f, f'/f)`, used once `f` is large.
    Log,
}

fn rhs<T: Real>(mode: Mode, k2: T, y: [T; 2]) -> [T; 2] {
    match mode {
        Mode::Linear => [y[1], k2 * y[0]],
        Mode::Log => [y[1], k2 - y[1] * y[1]],
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step; returns the fifth order solution and the embedded error vector.
fn dp_step<T: Real>(
    k_squared: &impl Fn(T) -> T,
    mode: Mode,
    r: T,
    h: T,
    y: [T; 2],
) -> Result<([T; 2], [T; 2])> {
    let mut k = [[T::zero(); 2]; 7];
    for s in 0..7 {
        let rs = r + h * T::lit(C[s]);
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = T::lit(A[s - 1][j]);
            ys[0] = ys[0] + h * a * kj[0];
            ys[1] = ys[1] + h * a * kj[1];
        }
        let k2 = k_squared(rs);
        if !k2.is_finite() || k2 < T::zero() {
            return Err(Error::ProfileDomain { radius: rs.as_f64() });
        }
        k[s] = rhs(mode, k2, ys);
    }
    // FSAL: the last stage is evaluated at the fifth order solution.
    let mut y5 = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        let b = T::lit(A[5][j]);
        y5[0] = y5[0] + h * b * kj[0];
        y5[1] = y5[1] + h * b * kj[1];
    }
    let mut err = [T::zero(); 2];
    for (j, kj) in k.iter().enumerate() {
        let e = T::lit(E[j]);
        err[0] = err[0] + h * e * kj[0];
        err[1] = err[1] + h * e * kj[1];
    }
    Ok((y5, err))
}

/// Solves the Jacobi problem, recording `(f, f')` on a log-spaced node set.
///
/// Integration switches to `(log f, f'/f)` once `f` exceeds the square root of the largest
/// representable value; if `f` itself stops being representable the radius reached is reported.
pub fn solve_jacobi_with<T: Real>(
    k_squared: impl Fn(T) -> T,
    r_max: T,
    opts: &JacobiOptions<T>,
) -> Result<WarpFunction<T>> {
    if !(r_max > T::zero() && r_max.is_finite()) {
        return Err(Error::param("r_max", "must be positive and finite"));
    }
    if !(opts.tol > T::zero() && opts.ds > T::zero()) {
        return Err(Error::param("tol", "tolerance and node spacing must be positive"));
    }
    let outputs = log_spaced_nodes(r_max, opts.ds);
    let threshold = T::max_value().sqrt();
    let k0 = k_squared(T::zero());
    if !k0.is_finite() || k0 < T::zero() {
        return Err(Error::ProfileDomain { radius: 0.0 });
    }

    let mut nodes = vec![T::zero()];
    let mut fs = vec![T::zero()];
    let mut fps = vec![T::one()];
    let mut k2s = vec![k0];

    let mut mode = Mode::Linear;
    let mut y = [T::zero(), T::one()];
    let mut r = T::zero();
    let mut h = (outputs[1] - outputs[0]).min(T::lit(1e-3));
    let h_floor = T::epsilon() * T::lit(16.0);

    for &target in &outputs[1..] {
        while r < target {
            let remaining = target - r;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let (y_new, err) = dp_step(&k_squared, mode, r, step, y)?;
            let scale0 = opts.tol * (T::one() + y[0].abs().max(y_new[0].abs()));
            let scale1 = opts.tol * (T::one() + y[1].abs().max(y_new[1].abs()));
            let norm = (err[0].abs() / scale0).max(err[1].abs() / scale1) / step.max(h_floor);
            if !norm.is_finite() {
                if matches!(mode, Mode::Linear) && !y_new[0].is_finite() {
                    return Err(Error::Overflow {
                        radius: nodes.last().unwrap().as_f64(),
                    });
                }
                h = step * T::lit(0.2);
            } else if norm <= T::one() {
                r = if last { target } else { r + step };
                y = y_new;
                if matches!(mode, Mode::Linear) && y[0] > threshold {
                    mode = Mode::Log;
                    y = [y[0].ln(), y[1] / y[0]];
                }
                let factor = if norm == T::zero() {
                    T::lit(5.0)
                } else {
                    (T::lit(0.9) * norm.powf(T::lit(-0.2))).min(T::lit(5.0))
                };
                // Keep the step proposal from the last interior step when clipping at a node.
                if !last {
                    h = step * factor;
                } else {
                    h = h.max(step * factor);
                }
            } else {
                h = step * (T::lit(0.9) * norm.powf(T::lit(-0.2))).max(T::lit(0.2));
            }
            if h < h_floor * (T::one() + r) {
                return Err(Error::Construction {
                    lo: r.as_f64(),
                    hi: target.as_f64(),
                    reason: "step size underflow in Jacobi integration".into(),
                });
            }
        }
        let (f, fp) = match mode {
            Mode::Linear => (y[0], y[1]),
            Mode::Log => {
                let f = y[0].exp();
                (f, y[1] * f)
            }
        };
        if !f.is_finite() || !fp.is_finite() {
            return Err(Error::Overflow {
                radius: nodes.last().unwrap().as_f64(),
            });
        }
        let k2 = k_squared(target);
        if !k2.is_finite() || k2 < T::zero() {
            return Err(Error::ProfileDomain { radius: target.as_f64() });
        }
        nodes.push(target);
        fs.push(f);
        fps.push(fp);
        k2s.push(k2);
    }
    WarpFunction::from_parts(nodes, fs, fps, k2s)
}
