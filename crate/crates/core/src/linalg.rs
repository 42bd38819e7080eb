//! Symmetric banded matrices, Cholesky factorization and Jacobi-preconditioned CG.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric matrix storing the lower band `a[i][i - k]`, `k = 0..=bandwidth`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSym<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Real> BandedSym<T> {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        BandedSym { n, bw: bandwidth, data: vec![T::zero(); n * (bandwidth + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.bw, "entry ({i}, {j}) outside the band");
        i * (self.bw + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.bw {
            T::zero()
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)` (and its mirror).
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j);
        self.data[k] = self.data[k] + v;
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.data[i * (self.bw + 1)]).collect()
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for v in y.iter_mut() {
            *v = T::zero();
        }
        for i in 0..self.n {
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            y[i] = y[i] + row[0] * x[i];
            for k in 1..=self.bw.min(i) {
                let j = i - k;
                y[i] = y[i] + row[k] * x[j];
                y[j] = y[j] + row[k] * x[i];
            }
        }
    }

    /// In-place `L L^T` factorization; a non-positive pivot reports its row.
    pub fn cholesky(mut self) -> Result<BandedCholesky<T>> {
        let w = self.bw + 1;
        let scale = self.diagonal().into_iter().fold(T::zero(), |a, b| a.max(b.abs()));
        let floor = scale * T::epsilon() * T::lit(16.0);
        for i in 0..self.n {
            let k0 = self.bw.min(i);
            for k in (1..=k0).rev() {
                let j = i - k;
                // l_ij = (a_ij - sum_{m<j} l_im l_jm) / l_jj
                let mut s = self.data[i * w + k];
                let kj = self.bw.min(j);
                for m in 1..=kj.min(k0 - k) {
                    s = s - self.data[i * w + k + m] * self.data[j * w + m];
                }
                self.data[i * w + k] = s / self.data[j * w];
            }
            let mut d = self.data[i * w];
            for k in 1..=k0 {
                let l = self.data[i * w + k];
                d = d - l * l;
            }
            if !(d > floor) {
                return Err(Error::Singular { index: i, ring: 0, angle: 0 });
            }
            self.data[i * w] = d.sqrt();
        }
        Ok(BandedCholesky { m: self })
    }
}

/// Banded Cholesky factor.
#[derive(Clone, Debug)]
pub struct BandedCholesky<T> {
    m: BandedSym<T>,
}

impl<T: Real> BandedCholesky<T> {
    pub fn solve(&self, b: &mut [T]) {
        let (n, bw) = (self.m.n, self.m.bw);
        let w = bw + 1;
        let d = &self.m.data;
        for i in 0..n {
            let mut s = b[i];
            for k in 1..=bw.min(i) {
                s = s - d[i * w + k] * b[i - k];
            }
            b[i] = s / d[i * w];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in 1..=bw.min(n - 1 - i) {
                s = s - d[(i + k) * w + k] * b[i + k];
            }
            b[i] = s / d[i * w];
        }
    }
}

/// Outcome of a conjugate gradient run.
#[derive(Clone, Debug, PartialEq)]
pub struct CgStats<T> {
    pub iterations: usize,
    pub relative_residual: T,
}

/// Jacobi-preconditioned CG for `a x = b` starting from `x`.
pub fn pcg<T: Real>(a: &BandedSym<T>, b: &[T], x: &mut [T], tol: T, max_iter: usize) -> Result<CgStats<T>> {
    let n = a.dim();
    let dinv: Vec<T> = a
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| if d > T::zero() { Ok(T::one() / d) } else { Err(Error::Singular { index: i, ring: 0, angle: 0 }) })
        .collect::<Result<_>>()?;
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |s, (&a, &b)| s + a * b);
    let bnorm = dot(b, b).sqrt();
    if bnorm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(CgStats { iterations: 0, relative_residual: T::zero() });
    }
    let mut r = vec![T::zero(); n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<T> = r.iter().zip(&dinv).map(|(&r, &d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    let mut history = Vec::new();
    for it in 0..max_iter {
        let res = dot(&r, &r).sqrt() / bnorm;
        history.push(res.as_f64());
        if res <= tol {
            return Ok(CgStats { iterations: it, relative_residual: res });
        }
        a.matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt() / bnorm;
    if res <= tol {
        return Ok(CgStats { iterations: max_iter, relative_residual: res });
    }
    Err(Error::Convergence { iterations: max_iter, last_residual: res.as_f64(), residual_history: history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, bw: usize, seed: u64) -> (BandedSym<f64>, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandedSym::zeros(n, bw);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 1..=bw.min(i) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a.add(i, i - k, v);
                dense[i][i - k] += v;
                dense[i - k][i] += v;
            }
        }
        for i in 0..n {
            let d = 2.0 * bw as f64 + 1.0;
            a.add(i, i, d);
            dense[i][i] += d;
        }
        (a, dense)
    }

    #[test]
    fn cholesky_solves_dense_reference() {
        let (a, dense) = random_spd(40, 5, 1);
        let x: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let mut b: Vec<f64> = dense.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let mut y = vec![0.0; 40];
        a.matvec(&x, &mut y);
        for i in 0..40 {
            assert!((y[i] - b[i]).abs() < 1e-12);
        }
        a.cholesky().unwrap().solve(&mut b);
        for i in 0..40 {
            assert!((b[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pcg_matches_cholesky() {
        let (a, _) = random_spd(200, 12, 2);
        let b: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut x1 = b.clone();
        a.clone().cholesky().unwrap().solve(&mut x1);
        let mut x2 = vec![0.0; 200];
        let stats = pcg(&a, &b, &mut x2, 1e-13, 500).unwrap();
        assert!(stats.iterations > 0);
        for i in 0..200 {
            assert!((x1[i] - x2[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn reports_singular_pivot() {
        let mut a = BandedSym::<f64>::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        a.add(2, 2, 1.0);
        assert!(matches!(a.cholesky(), Err(Error::Singular { index: 1, .. })));
    }
}
