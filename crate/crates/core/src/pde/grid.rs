//! Polar grids on geodesic balls of a model manifold.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::ModelManifold;
use crate::quadrature::gauss_legendre;
use crate::scalar::{unit_sphere_area, Real};

/// Angular layout of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularMode {
    /// Periodic circle `[0, 2pi)`, for `n = 2`.
    Full,
    /// Polar angle on `[0, pi]` for data invariant under rotations about an axis.
    Axisymmetric,
}

/// One grid cell: its nodes, its volume, and the edges entering `t = sum c_e (du_e)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell<T> {
    pub nodes: [usize; 4],
    pub n_nodes: usize,
    /// `(local a, local b, weight)`.
    pub edges: [(usize, usize, T); 4],
    pub n_edges: usize,
    pub volume: T,
    /// Weight of `Phi(t)` in the discrete energy; equals `volume` away from the pole.
    pub weight: T,
    pub ring: usize,
    pub sector: usize,
}

/// Tensor grid in `s = log(1 + r)` and angle. Node 0 is the pole; ring `i >= 1` holds
/// `n_angles` nodes; the boundary ring comes last so unknowns form a prefix.
#[derive(Clone, Debug)]
pub struct PolarGrid<T> {
    manifold: Arc<ModelManifold<T>>,
    mode: AngularMode,
    radius: T,
    s: Vec<T>,
    r: Vec<T>,
    f: Vec<T>,
    theta: Vec<T>,
    dtheta: T,
    n_theta: usize,
    radial_volume: Vec<T>,
    angular_split: Vec<T>,
    angular_measure: Vec<T>,
    cells: Vec<Cell<T>>,
}

impl<T: Real> PolarGrid<T> {
    /// `n_r` uniform steps in `s` up to `radius` and `n_theta` angular intervals.
    pub fn new(manifold: Arc<ModelManifold<T>>, radius: T, n_r: usize, n_theta: usize, mode: AngularMode) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        let s_max = radius.ln_1p();
        let s = (0..=n_r).map(|i| s_max * T::from_usize_lossy(i) / T::from_usize_lossy(n_r)).collect();
        Self::from_s(manifold, s, n_theta, mode)
    }

    /// Uniform `s` spacing `ds`; the radius is snapped to the nearest lattice point `k ds`.
    pub fn with_spacing(manifold: Arc<ModelManifold<T>>, radius: T, ds: T, n_theta: usize, mode: AngularMode) -> Result<Self> {
        if !(ds > T::zero()) {
            return Err(Error::param("ds", format!("must be positive, got {ds}")));
        }
        let k = (radius.ln_1p() / ds).round().to_usize().unwrap_or(0).max(2);
        let s = (0..=k).map(|i| ds * T::from_usize_lossy(i)).collect();
        Self::from_s(manifold, s, n_theta, mode)
    }

    fn from_s(manifold: Arc<ModelManifold<T>>, s: Vec<T>, n_theta: usize, mode: AngularMode) -> Result<Self> {
        let n = manifold.dim();
        let n_r = s.len() - 1;
        if n_r < 2 {
            return Err(Error::param("n_r", "need at least two radial steps"));
        }
        let min_theta = if mode == AngularMode::Full { 3 } else { 2 };
        if n_theta < min_theta {
            return Err(Error::param("n_theta", format!("need at least {min_theta} angular intervals")));
        }
        if mode == AngularMode::Full && n != 2 {
            return Err(Error::param("mode", format!("full angular mode needs n = 2, got n = {n}")));
        }
        let mut r: Vec<T> = s.iter().map(|&s| s.exp_m1()).collect();
        r[0] = T::zero();
        let radius = r[n_r];
        if radius > manifold.r_max() {
            return Err(Error::Domain(format!("ball radius {radius} exceeds the warp table end {}", manifold.r_max())));
        }
        let f = r.iter().map(|&r| manifold.warp().value(r)).collect::<Result<Vec<T>>>()?;
        let (dtheta, theta): (T, Vec<T>) = match mode {
            AngularMode::Full => {
                let d = T::TAU() / T::from_usize_lossy(n_theta);
                (d, (0..n_theta).map(|j| d * T::from_usize_lossy(j)).collect())
            }
            AngularMode::Axisymmetric => {
                let d = T::PI() / T::from_usize_lossy(n_theta);
                (d, (0..=n_theta).map(|j| d * T::from_usize_lossy(j)).collect())
            }
        };
        let radial_volume = (0..n_r)
            .map(|i| manifold.radial_moment(r[i], r[i + 1], n as i32 - 1))
            .collect::<Result<Vec<T>>>()?;
        let half = T::lit(0.5);
        let (angular_measure, angular_split): (Vec<T>, Vec<T>) = match mode {
            AngularMode::Full => (vec![dtheta; n_theta], vec![half; n_theta]),
            AngularMode::Axisymmetric => {
                let w = unit_sphere_area::<T>(n - 2);
                let sin_pow = |x: T| x.sin().powi(n as i32 - 2);
                (0..n_theta)
                    .map(|j| {
                        let mid = theta[j] + half * dtheta;
                        let lo = gauss_legendre(theta[j], mid, 8, sin_pow);
                        let hi = gauss_legendre(mid, theta[j + 1], 8, sin_pow);
                        (w * (lo + hi), lo / (lo + hi))
                    })
                    .unzip()
            }
        };
        let mut grid = PolarGrid {
            manifold,
            mode,
            radius,
            s,
            r,
            f,
            theta,
            dtheta,
            n_theta,
            radial_volume,
            angular_split,
            angular_measure,
            cells: Vec::new(),
        };
        grid.cells = grid.build_cells();
        Ok(grid)
    }

    fn build_cells(&self) -> Vec<Cell<T>> {
        let half = T::lit(0.5);
        let mut cells = Vec::with_capacity(self.n_r() * self.n_theta);
        // Pole cells keep a consistent `t`; their energy weight is rescaled so that linear data
        // balance at ring 1 exactly as in the polar finite-difference stencil.
        let (m0, m1, dr0, dr1, f1) = (self.radial_volume[0], self.radial_volume[1], self.dr(0), self.dr(1), self.f[1]);
        let nm1 = T::from_usize_lossy(self.manifold.dim() - 1);
        let pole_scale = (m1 / dr1 - nm1 * f1.powi(self.manifold.dim() as i32 - 2) * dr1 * half) / (m0 / dr0 + nm1 * m0 / f1);
        for i in 0..self.n_r() {
            let cr = T::one() / (self.dr(i) * self.dr(i));
            for j in 0..self.n_theta {
                let jn = self.next_angle(j);
                let volume = self.radial_volume[i] * self.angular_measure[j];
                let a = self.angular_split[j];
                let cell = if i == 0 {
                    let ca = T::one() / (self.f[1] * self.dtheta).powi(2);
                    Cell {
                        nodes: [0, self.node(1, j), self.node(1, jn), 0],
                        n_nodes: 3,
                        edges: [(0, 1, a * cr), (0, 2, (T::one() - a) * cr), (1, 2, ca), (0, 0, T::zero())],
                        n_edges: 3,
                        volume,
                        weight: pole_scale * volume,
                        ring: i,
                        sector: j,
                    }
                } else {
                    let ca0 = self.angular_weight(i, i);
                    let ca1 = self.angular_weight(i + 1, i);
                    Cell {
                        nodes: [self.node(i, j), self.node(i + 1, j), self.node(i, jn), self.node(i + 1, jn)],
                        n_nodes: 4,
                        edges: [(0, 1, a * cr), (2, 3, (T::one() - a) * cr), (0, 2, ca0), (1, 3, ca1)],
                        n_edges: 4,
                        volume,
                        weight: volume,
                        ring: i,
                        sector: j,
                    }
                };
                cells.push(cell);
            }
        }
        cells
    }

    // Half of ring `i`'s finite-difference angular coefficient `f^{n-3} dr`, spread over the volume of cell ring `cell`.
    fn angular_weight(&self, i: usize, cell: usize) -> T {
        let n = self.manifold.dim() as i32;
        let half = T::lit(0.5);
        half * self.dr(cell) * self.f[i].powi(n - 3) / (self.radial_volume[cell] * self.dtheta * self.dtheta)
    }

    fn next_angle(&self, j: usize) -> usize {
        match self.mode {
            AngularMode::Full => (j + 1) % self.n_theta,
            AngularMode::Axisymmetric => j + 1,
        }
    }

    fn slot(&self, j: usize) -> usize {
        match self.mode {
            AngularMode::Axisymmetric => j,
            AngularMode::Full => {
                let n = self.n_theta;
                if 2 * j < n {
                    2 * j
                } else {
                    2 * (n - 1 - j) + 1
                }
            }
        }
    }

    /// Global index of node `(ring i, angle j)`; all `j` map to the pole at `i = 0`.
    pub fn node(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            0
        } else {
            1 + (i - 1) * self.n_angles() + self.slot(j)
        }
    }

    pub fn manifold(&self) -> &Arc<ModelManifold<T>> {
        &self.manifold
    }

    pub fn mode(&self) -> AngularMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    /// Ball radius (the last ring).
    pub fn radius(&self) -> T {
        self.radius
    }

    /// Number of radial steps; rings are `0..=n_r`.
    pub fn n_r(&self) -> usize {
        self.r.len() - 1
    }

    /// Number of angular intervals (cells per ring).
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Number of distinct angular nodes per ring.
    pub fn n_angles(&self) -> usize {
        self.theta.len()
    }

    pub fn n_nodes(&self) -> usize {
        1 + self.n_r() * self.n_angles()
    }

    /// Interior nodes (pole and rings `1..n_r`), a prefix of the node vector.
    pub fn n_unknowns(&self) -> usize {
        1 + (self.n_r() - 1) * self.n_angles()
    }

    /// Half-bandwidth of the interior stiffness pattern.
    pub fn bandwidth(&self) -> usize {
        self.n_angles() + 2
    }

    pub fn s(&self) -> &[T] {
        &self.s
    }

    pub fn radii(&self) -> &[T] {
        &self.r
    }

    /// Warp values at the rings.
    pub fn warp_at_rings(&self) -> &[T] {
        &self.f
    }

    pub fn angles(&self) -> &[T] {
        &self.theta
    }

    pub fn dtheta(&self) -> T {
        self.dtheta
    }

    pub fn dr(&self, i: usize) -> T {
        self.r[i + 1] - self.r[i]
    }

    pub fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }

    /// `int_{r_i}^{r_{i+1}} f^{n-1} dr`.
    pub fn radial_volume(&self, i: usize) -> T {
        self.radial_volume[i]
    }

    /// Angular measure of sector `j` (includes `|S^{n-2}| sin^{n-2}` in axisymmetric mode).
    pub fn angular_measure(&self, j: usize) -> T {
        self.angular_measure[j]
    }

    /// Total angular measure: `2 pi` or `|S^{n-1}|`.
    pub fn total_angular_measure(&self) -> T {
        self.angular_measure.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn total_volume(&self) -> T {
        self.cells.iter().fold(T::zero(), |a, c| a + c.volume)
    }

    /// Cell center `(r, theta)` with `r` the midpoint in `s`.
    pub fn cell_center(&self, ring: usize, sector: usize) -> (T, T) {
        let half = T::lit(0.5);
        ((half * (self.s[ring] + self.s[ring + 1])).exp_m1(), self.theta[sector] + half * self.dtheta)
    }

    /// Index of the ring nearest to radius `rho`.
    pub fn ring_near(&self, rho: T) -> usize {
        let s = rho.max(T::zero()).ln_1p();
        let i = self.s.partition_point(|&x| x < s).min(self.n_r());
        if i > 0 && (s - self.s[i - 1]) < (self.s[i] - s) {
            i - 1
        } else {
            i
        }
    }
}
