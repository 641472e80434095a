use num_complex::Complex64;
use rayon::prelude::*;

use super::log_space;
use crate::error::{param, Error, Result};
use crate::spectral::{CoefficientVector, GridFunction, SpectralSystem};

/// Quadrature for `dt/t` on one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TAxis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TAxis {
    pub const DEFAULT_POINTS: usize = 256;

    /// Log-spaced nodes on `[a, b]` with trapezoid weights in `log t`.
    pub fn log_spaced(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > a && n >= 2) {
            return Err(param("t_grid", format!("need 0 < a < b and n ≥ 2, got [{a}, {b}], n={n}")));
        }
        let nodes = log_space(a, b, n);
        let h = (b / a).ln() / (n - 1) as f64;
        let mut weights = vec![h; n];
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        Ok(Self { nodes, weights })
    }
}

/// Order `N ≥ 𝟏` and per-axis `t`-quadrature of `g_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFunctionParams {
    n: Vec<usize>,
    t_axes: Vec<TAxis>,
}

impl SquareFunctionParams {
    pub fn new(n: Vec<usize>, t_axes: Vec<TAxis>) -> Result<Self> {
        if n.is_empty() || n.len() != t_axes.len() {
            return Err(param("N", "one t-axis per entry of N"));
        }
        if n.iter().any(|&v| v == 0) {
            return Err(param("N", format!("entries must be ≥ 1, got {n:?}")));
        }
        for ax in &t_axes {
            if ax.nodes.len() != ax.weights.len() || ax.nodes.is_empty() {
                return Err(param("t_grid", "nodes and weights must be non-empty and match"));
            }
            if ax.weights.iter().any(|&w| !(w > 0.0)) || ax.nodes.iter().any(|&t| !(t > 0.0)) {
                return Err(param("t_grid", "nodes and weights must be positive"));
            }
        }
        Ok(Self { n, t_axes })
    }

    /// Default grid: per axis, 256 log-spaced `t ∈ [10⁻⁴/λ_max, 10⁴/λ_min]` over
    /// the positive eigenvalues of that axis.
    pub fn for_system(sys: &SpectralSystem, n: Vec<usize>) -> Result<Self> {
        let d = sys.dimension();
        if n.len() != d {
            return Err(Error::Arity { multiplier: n.len(), system: d });
        }
        let mut axes = Vec::with_capacity(d);
        for j in 0..d {
            let (lo, hi) = (0..sys.len())
                .map(|i| sys.eigenvalues_at(i)[j])
                .filter(|&l| l > 0.0)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| (lo.min(l), hi.max(l)));
            if !lo.is_finite() {
                return Err(Error::Atl(format!("axis {j} has no positive eigenvalue")));
            }
            axes.push(TAxis::log_spaced(1e-4 / hi, 1e4 / lo, TAxis::DEFAULT_POINTS)?);
        }
        Self::new(n, axes)
    }

    pub fn order(&self) -> &[usize] {
        &self.n
    }

    pub fn t_axes(&self) -> &[TAxis] {
        &self.t_axes
    }
}

/// `g_N(f)(x) = (∫ |Σ_k (tλ(k))^N e^{−⟨t,λ(k)⟩} c_k φ_k(x)|² dt/t)^{1/2}` on the
/// system grid.
pub fn square_function(
    sys: &SpectralSystem,
    c: &CoefficientVector,
    params: &SquareFunctionParams,
) -> Result<GridFunction> {
    let d = sys.dimension();
    if params.n.len() != d {
        return Err(Error::Arity { multiplier: params.n.len(), system: d });
    }
    let dense = sys.dense(c)?;
    let active: Vec<usize> = (0..sys.len()).filter(|&i| dense[i] != Complex64::new(0.0, 0.0)).collect();
    for &i in &active {
        let lambda = sys.eigenvalues_at(i);
        if lambda.iter().any(|&l| l == 0.0) {
            return Err(Error::Atl(format!(
                "coefficient at {} is nonzero but its eigenvalue vector {lambda:?} has a zero entry",
                sys.indices()[i]
            )));
        }
    }
    let grid = sys.grid().clone();
    if active.is_empty() {
        return Ok(GridFunction::zeros(grid));
    }

    // per-axis profiles a_j(t) = (tλ)^{N_j} e^{-tλ}, weighted by √w_t
    let profile = |j: usize, lambda: f64| -> Vec<f64> {
        let ax = &params.t_axes[j];
        let nj = params.n[j] as i32;
        ax.nodes
            .iter()
            .zip(&ax.weights)
            .map(|(&t, &w)| {
                let x = t * lambda;
                w.sqrt() * x.powi(nj) * (-x).exp()
            })
            .collect()
    };
    let profiles: Vec<Vec<Vec<f64>>> = active
        .iter()
        .map(|&i| {
            let lambda = sys.eigenvalues_at(i);
            (0..d).map(|j| profile(j, lambda[j])).collect()
        })
        .collect();
    let na = active.len();
    let mut gram = vec![0.0; na * na];
    for p in 0..na {
        for q in p..na {
            let g: f64 = (0..d)
                .map(|j| {
                    profiles[p][j]
                        .iter()
                        .zip(&profiles[q][j])
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                })
                .product();
            gram[p * na + q] = g;
            gram[q * na + p] = g;
        }
    }

    let coeffs: Vec<Complex64> = active.iter().map(|&i| dense[i]).collect();
    let basis: Vec<&[f64]> = active.iter().map(|&i| sys.basis_on_grid(i)).collect();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let v: Vec<Complex64> = coeffs.iter().zip(&basis).map(|(c, b)| c * b[x]).collect();
            let mut acc = 0.0;
            for p in 0..na {
                let row = &gram[p * na..(p + 1) * na];
                let gv: Complex64 = row.iter().zip(&v).map(|(g, w)| g * w).sum();
                acc += (v[p].conj() * gv).re;
            }
            acc.max(0.0).sqrt()
        })
        .collect();
    GridFunction::from_real(grid, values)
}
