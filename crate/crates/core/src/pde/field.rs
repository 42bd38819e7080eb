//! Scalar fields on polar grids.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{AngularMode, PolarGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Where field values live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    /// One value per grid node, pole first.
    Node,
    /// One value per cell, ring-major.
    Cell,
}

#[derive(Clone, Debug)]
pub struct ScalarField<T> {
    grid: Arc<PolarGrid<T>>,
    location: Location,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(grid: Arc<PolarGrid<T>>, location: Location, values: Vec<T>) -> Result<Self> {
        let expected = match location {
            Location::Node => grid.n_nodes(),
            Location::Cell => grid.cells().len(),
        };
        if values.len() != expected {
            return Err(Error::Precondition(format!("field needs {expected} values, got {}", values.len())));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("non-finite field value at index {k}")));
        }
        Ok(ScalarField { grid, location, values })
    }

    pub fn constant(grid: Arc<PolarGrid<T>>, c: T) -> Self {
        let n = grid.n_nodes();
        ScalarField { grid, location: Location::Node, values: vec![c; n] }
    }

    /// Nodal field `g(r, theta)`.
    pub fn from_fn(grid: Arc<PolarGrid<T>>, g: impl Fn(T, T) -> T) -> Self {
        let mut values = vec![T::zero(); grid.n_nodes()];
        values[0] = g(T::zero(), T::zero());
        for i in 1..=grid.n_r() {
            for j in 0..grid.n_angles() {
                values[grid.node(i, j)] = g(grid.radii()[i], grid.angles()[j]);
            }
        }
        ScalarField { grid, location: Location::Node, values }
    }

    pub fn grid(&self) -> &Arc<PolarGrid<T>> {
        &self.grid
    }

    pub fn location(&self) -> Location {
        self.location
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Nodal value at `(ring i, angle j)`.
    pub fn at(&self, i: usize, j: usize) -> T {
        debug_assert_eq!(self.location, Location::Node);
        self.values[self.grid.node(i, j)]
    }

    /// Cell value at `(ring interval i, sector j)`.
    pub fn at_cell(&self, i: usize, j: usize) -> T {
        debug_assert_eq!(self.location, Location::Cell);
        self.values[i * self.grid.n_theta() + j]
    }

    pub fn map(&self, g: impl Fn(T) -> T) -> Self {
        ScalarField { grid: self.grid.clone(), location: self.location, values: self.values.iter().map(|&v| g(v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid and location.
    pub fn zip_with(&self, other: &Self, g: impl Fn(T, T) -> T) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) || self.location != other.location {
            return Err(Error::Precondition("fields live on different grids".into()));
        }
        Ok(ScalarField {
            grid: self.grid.clone(),
            location: self.location,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect(),
        })
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |a, &b| a.min(b))
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |a, &b| a.max(b))
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
    }

    /// Values on ring `i`, one per angular node.
    pub fn ring(&self, i: usize) -> Vec<T> {
        (0..self.grid.n_angles()).map(|j| self.at(i, j)).collect()
    }

    /// Boundary ring values.
    pub fn boundary_values(&self) -> Vec<T> {
        self.ring(self.grid.n_r())
    }

    /// `t = sum c_e (du_e)^2` per cell, the discrete `|grad u|^2`.
    pub fn cell_gradient_squared(&self) -> Result<ScalarField<T>> {
        if self.location != Location::Node {
            return Err(Error::Precondition("gradient needs a nodal field".into()));
        }
        let values = self
            .grid
            .cells()
            .iter()
            .map(|c| {
                c.edges[..c.n_edges].iter().fold(T::zero(), |acc, &(a, b, w)| {
                    let d = self.values[c.nodes[a]] - self.values[c.nodes[b]];
                    acc + w * d * d
                })
            })
            .collect();
        Ok(ScalarField { grid: self.grid.clone(), location: Location::Cell, values })
    }

    pub fn cell_gradient_norm(&self) -> Result<ScalarField<T>> {
        Ok(self.cell_gradient_squared()?.map(|t| t.sqrt()))
    }

    /// Cell averages of a nodal field.
    pub fn to_cells(&self) -> Result<ScalarField<T>> {
        if self.location != Location::Node {
            return Err(Error::Precondition("already a cell field".into()));
        }
        let values = self
            .grid
            .cells()
            .iter()
            .map(|c| {
                let s = c.nodes[..c.n_nodes].iter().fold(T::zero(), |a, &k| a + self.values[k]);
                s / T::from_usize_lossy(c.n_nodes)
            })
            .collect();
        Ok(ScalarField { grid: self.grid.clone(), location: Location::Cell, values })
    }

    /// `|grad v|` of a cell field by central differences between cell centers
    /// (one-sided at the pole and boundary, mirrored across the symmetry axis).
    pub fn cell_field_gradient_norm(&self) -> Result<ScalarField<T>> {
        if self.location != Location::Cell {
            return Err(Error::Precondition("expected a cell field".into()));
        }
        let g = &self.grid;
        let (nr, nt) = (g.n_r(), g.n_theta());
        let center_r: Vec<T> = (0..nr).map(|i| g.cell_center(i, 0).0).collect();
        let mut out = Vec::with_capacity(nr * nt);
        for i in 0..nr {
            let (il, ih) = (i.saturating_sub(1), (i + 1).min(nr - 1));
            let f = g.manifold().warp().value(center_r[i])?;
            for j in 0..nt {
                let dr = (self.at_cell(ih, j) - self.at_cell(il, j)) / (center_r[ih] - center_r[il]);
                let (jl, jh, span) = match g.mode() {
                    AngularMode::Full => ((j + nt - 1) % nt, (j + 1) % nt, T::lit(2.0)),
                    AngularMode::Axisymmetric => {
                        // the mirror image of sector 0 across the axis is sector 0 itself
                        let jl = j.saturating_sub(1);
                        let jh = (j + 1).min(nt - 1);
                        (jl, jh, T::lit(2.0))
                    }
                };
                let da = (self.at_cell(i, jh) - self.at_cell(i, jl)) / (span * g.dtheta());
                out.push((dr * dr + da * da / (f * f)).sqrt());
            }
        }
        Ok(ScalarField { grid: self.grid.clone(), location: Location::Cell, values: out })
    }

    /// `sum over cells of volume * value`.
    pub fn integrate(&self) -> Result<T> {
        let cells = self.grid.cells();
        Ok(match self.location {
            Location::Cell => cells.iter().zip(&self.values).fold(T::zero(), |a, (c, &v)| a + c.volume * v),
            Location::Node => self.to_cells()?.integrate()?,
        })
    }

    /// CSV of cell centers: `r, theta, u, grad_norm, W`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let u = self.to_cells()?;
        let t = self.cell_gradient_squared()?;
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv: {e}"));
        w.write_record(["r", "theta", "u", "grad_norm", "W"]).map_err(io)?;
        for (k, c) in self.grid.cells().iter().enumerate() {
            let (r, th) = self.grid.cell_center(c.ring, c.sector);
            let t = t.values[k];
            w.write_record([r, th, u.values[k], t.sqrt(), (T::one() + t).sqrt()].map(|v| format!("{:e}", v.as_f64())))
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Domain(format!("csv: {e}")))?;
        Ok(())
    }
}

/// `W = sqrt(1 + |grad u|^2)` per cell.
pub fn compute_w<T: Real>(u: &ScalarField<T>) -> Result<ScalarField<T>> {
    Ok(u.cell_gradient_squared()?.map(|t| (T::one() + t).sqrt()))
}

/// `|grad log W|` per cell.
pub fn grad_log_w<T: Real>(u: &ScalarField<T>) -> Result<ScalarField<T>> {
    compute_w(u)?.map(|w| w.ln()).cell_field_gradient_norm()
}
