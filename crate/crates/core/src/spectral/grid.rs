use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Quadrature grid: points in ℝ^dim with positive weights representing a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Builds a grid from flattened coordinates (`coords.len() == dim * weights.len()`).
    pub fn new(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(crate::error::param("dim", "grid dimension must be positive"));
        }
        if coords.len() != dim * weights.len() {
            return Err(Error::Shape {
                expected: dim * weights.len(),
                got: coords.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(crate::error::param(
                "weights",
                format!("quadrature weights must be positive, found {w}"),
            ));
        }
        Ok(Self {
            dim,
            coords,
            weights,
        })
    }

    /// One-dimensional grid from nodes and weights.
    pub fn from_rule(nodes: &[f64], weights: &[f64]) -> Result<Self> {
        Self::new(1, nodes.to_vec(), weights.to_vec())
    }

    /// Tensor-product grid; points of `self` vary slowest.
    pub fn product(&self, other: &Grid) -> Grid {
        let dim = self.dim + other.dim;
        let n = self.len() * other.len();
        let mut coords = Vec::with_capacity(n * dim);
        let mut weights = Vec::with_capacity(n);
        for i in 0..self.len() {
            for j in 0..other.len() {
                coords.extend_from_slice(self.point(i));
                coords.extend_from_slice(other.point(j));
                weights.push(self.weights[i] * other.weights[j]);
            }
        }
        Grid {
            dim,
            coords,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Total mass of the represented measure.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same points, weights replaced.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Grid> {
        Grid::new(self.dim, self.coords.clone(), weights)
    }
}

/// A complex function sampled on a grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(Complex64::from).collect())
    }

    /// Samples `f` at every grid point.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(grid: Arc<Grid>, f: F) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `(Σ w |f|^p)^{1/p}`; `p = ∞` gives the max over grid points.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, self.grid.weights(), p)
    }

    /// L^p norm against another set of weights on the same points.
    pub fn lp_norm_with(&self, weights: &[f64], p: f64) -> f64 {
        lp_norm(&self.values, weights, p)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.values.len() != other.values.len() {
            return Err(Error::Shape {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn scale(&self, s: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

pub(crate) fn lp_norm(values: &[Complex64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let s: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.norm().powf(p))
        .sum();
    s.powf(1.0 / p)
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
