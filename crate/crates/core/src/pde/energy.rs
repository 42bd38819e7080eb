//! Discrete energies `E(u) = sum_c vol_c Phi(t_c)` and their derivatives.

use serde::{Deserialize, Serialize};

use super::grid::PolarGrid;
use crate::linalg::BandedSym;
use crate::scalar::Real;

/// The equation being solved, through its variational integrand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Equation<T> {
    /// `div(|grad u|^{p-2} grad u) = 0`, energy `(1/p) int |grad u|^p`.
    PLaplace { p: T },
    /// `div(grad u / sqrt(1 + |grad u|^2)) = 0`, energy `int sqrt(1 + |grad u|^2)`.
    MinimalGraph,
}

impl<T: Real> Equation<T> {
    /// `(Phi, Phi', Phi'')` at `t = |grad u|^2` with regularization `delta`.
    #[inline]
    pub fn integrand(&self, t: T, delta: T) -> (T, T, T) {
        let half = T::lit(0.5);
        match *self {
            Equation::PLaplace { p } => {
                if p == T::lit(2.0) {
                    return (half * t, half, T::zero());
                }
                let d2 = delta * delta;
                let base = t + d2;
                let e = half * p;
                let pw = base.powf(e - T::lit(2.0));
                (
                    ((base * base * pw) - d2.powf(e)) / p,
                    half * base * pw,
                    half * (e - T::one()) * pw,
                )
            }
            Equation::MinimalGraph => {
                let a = T::one() + t;
                let s = a.sqrt();
                (s, half / s, -T::lit(0.25) / (a * s))
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(*self, Equation::PLaplace { p } if p == T::lit(2.0))
    }
}

/// Energy over the whole grid for nodal values `u`.
pub fn energy<T: Real>(grid: &PolarGrid<T>, eq: &Equation<T>, delta: T, u: &[T]) -> T {
    grid.cells().iter().fold(T::zero(), |acc, c| {
        let t = cell_t(c, u);
        acc + c.weight * eq.integrand(t, delta).0
    })
}

#[inline]
fn cell_t<T: Real>(c: &super::grid::Cell<T>, u: &[T]) -> T {
    c.edges[..c.n_edges].iter().fold(T::zero(), |acc, &(a, b, w)| {
        let d = u[c.nodes[a]] - u[c.nodes[b]];
        acc + w * d * d
    })
}

/// Gradient of the energy with respect to the first `n_unknowns` nodal values.
/// With `hessian`, also assembles the Hessian (`lagged` drops the `Phi''` term).
pub fn assemble<T: Real>(
    grid: &PolarGrid<T>,
    eq: &Equation<T>,
    delta: T,
    u: &[T],
    mut hessian: Option<&mut BandedSym<T>>,
    lagged: bool,
) -> Vec<T> {
    let m = grid.n_unknowns();
    let mut g = vec![T::zero(); m];
    let two = T::lit(2.0);
    for c in grid.cells() {
        let t = cell_t(c, u);
        let (_, d1, d2) = eq.integrand(t, delta);
        let mut dt = [T::zero(); 4];
        for &(a, b, w) in &c.edges[..c.n_edges] {
            let d = two * w * (u[c.nodes[a]] - u[c.nodes[b]]);
            dt[a] = dt[a] + d;
            dt[b] = dt[b] - d;
        }
        let vd1 = c.weight * d1;
        for a in 0..c.n_nodes {
            let ka = c.nodes[a];
            if ka < m {
                g[ka] = g[ka] + vd1 * dt[a];
            }
        }
        if let Some(h) = hessian.as_deref_mut() {
            for &(a, b, w) in &c.edges[..c.n_edges] {
                let (ka, kb) = (c.nodes[a], c.nodes[b]);
                let v = two * vd1 * w;
                if ka < m {
                    h.add(ka, ka, v);
                }
                if kb < m {
                    h.add(kb, kb, v);
                }
                if ka < m && kb < m {
                    h.add(ka, kb, -v);
                }
            }
            if !lagged && d2 != T::zero() {
                let vd2 = c.weight * d2;
                for a in 0..c.n_nodes {
                    let ka = c.nodes[a];
                    if ka >= m {
                        continue;
                    }
                    for b in 0..=a {
                        let kb = c.nodes[b];
                        if kb >= m {
                            continue;
                        }
                        h.add(ka, kb, vd2 * dt[a] * dt[b]);
                    }
                }
            }
        }
    }
    g
}
