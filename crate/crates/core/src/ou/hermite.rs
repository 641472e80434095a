use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::mehler::MehlerParams;
use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;
use crate::spectral::{BasisFn, Grid, GridFunction, MultiIndex, SpectralSystem};

/// `h_n(x)`, the Hermite polynomial normalized in `L²(π^{-1/2} e^{-x²} dx)`.
pub fn hermite_1d(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..n {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `𝐇_k(x) = ∏_j h_{k_j}(x_j)`.
pub fn hermite_eval(k: &MultiIndex, x: &[f64]) -> f64 {
    k.entries()
        .iter()
        .zip(x)
        .map(|(&kj, &xj)| hermite_1d(kj, xj))
        .product()
}

/// Tensor Gauss–Hermite quadrature for `dγ(x) = π^{-d/2} e^{-|x|²} dx`, plus the
/// Lebesgue weights on the same nodes.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    d: usize,
    k_max: usize,
    nodes: Vec<f64>,
    // per-axis γ weights (sum to 1)
    gamma_weights: Vec<f64>,
    // per-axis dx weights: γ weight divided by the γ density
    lebesgue_weights: Vec<f64>,
    grid: Arc<Grid>,
}

impl HermiteBasis {
    pub fn new(d: usize, k_max: usize, nodes_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(crate::error::param("d", "dimension must be 1, 2 or 3"));
        }
        if nodes_per_axis < k_max + 1 {
            return Err(crate::error::param(
                "nodes_per_axis",
                format!("need at least K_max + 1 = {} nodes", k_max + 1),
            ));
        }
        let rule = gauss_hermite(nodes_per_axis);
        let gamma_weights: Vec<f64> = rule.weights.iter().map(|w| w / PI.sqrt()).collect();
        let lebesgue_weights = rule
            .weights
            .iter()
            .zip(&rule.nodes)
            .map(|(w, x)| w * (x * x).exp())
            .collect();
        let axis = Grid::from_rule(&rule.nodes, &gamma_weights)?;
        let mut grid = axis.clone();
        for _ in 1..d {
            grid = grid.product(&axis);
        }
        Ok(Self {
            d,
            k_max,
            nodes: rule.nodes,
            gamma_weights,
            lebesgue_weights,
            grid: Arc::new(grid),
        })
    }

    /// Default rule: twice the polynomial degree plus headroom for kernel integrals.
    pub fn with_default_nodes(d: usize, k_max: usize) -> Result<Self> {
        Self::new(d, k_max, default_nodes(d, k_max))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn axis_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn axis_gamma_weights(&self) -> &[f64] {
        &self.gamma_weights
    }

    pub fn axis_lebesgue_weights(&self) -> &[f64] {
        &self.lebesgue_weights
    }

    /// Grid carrying the Gaussian measure γ.
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Lebesgue weights of the full tensor grid (γ weight over γ density).
    pub fn lebesgue_weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        (0..self.grid.len())
            .map(|flat| {
                let mut rem = flat;
                let mut w = 1.0;
                for _ in 0..self.d {
                    w *= self.lebesgue_weights[rem % n];
                    rem /= n;
                }
                w
            })
            .collect()
    }

    /// Gram defect `max |⟨𝐇_j, 𝐇_k⟩_γ − δ_jk|` over `|j|, |k| ≤ K_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        // separable: check the one-dimensional Gram matrix up to K_max
        let n = self.k_max + 1;
        let vals: Vec<Vec<f64>> = (0..n)
            .map(|k| self.nodes.iter().map(|&x| hermite_1d(k, x)).collect())
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let g: f64 = vals[i]
                    .iter()
                    .zip(&vals[j])
                    .zip(&self.gamma_weights)
                    .map(|((a, b), w)| a * b * w)
                    .sum();
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// `r^𝓛 f` through the Mehler kernel: `∫ M_r(x, y) f(y) dy` with Lebesgue
    /// weights on the Hermite nodes. The kernel factorizes over coordinates, so
    /// the integral is applied one axis at a time.
    pub fn apply_semigroup_kernel(&self, r: f64, f: &GridFunction) -> Result<GridFunction> {
        let params = MehlerParams::new(r, 1)?;
        if f.grid().len() != self.grid.len() || f.grid().dim() != self.d {
            return Err(Error::GridMismatch);
        }
        let n = self.nodes.len();
        let mut kernel = vec![0.0; n * n];
        for (i, &x) in self.nodes.iter().enumerate() {
            for (j, &y) in self.nodes.iter().enumerate() {
                kernel[i * n + j] = mehler_lebesgue(&params, x, y) * self.gamma_weights[j];
            }
        }
        let mut values = f.values().to_vec();
        // axis a has stride n^(d-1-a) in the flattened tensor grid
        for a in 0..self.d {
            let stride = n.pow((self.d - 1 - a) as u32);
            let block = stride * n;
            let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
            for base in (0..values.len()).step_by(block) {
                for off in 0..stride {
                    for i in 0..n {
                        let row = &kernel[i * n..(i + 1) * n];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (j, &kv) in row.iter().enumerate() {
                            acc += kv * values[base + j * stride + off];
                        }
                        out[base + i * stride + off] = acc;
                    }
                }
            }
            values = out;
        }
        GridFunction::new(f.grid().clone(), values)
    }
}

/// `M_r(x, y) / γ(y)` in one dimension, with the exponentials combined so that
/// nothing overflows at the outer nodes.
fn mehler_lebesgue(p: &MehlerParams, x: f64, y: f64) -> f64 {
    let r = p.r();
    let q = 1.0 - r * r;
    // y² − (rx − y)²/(1 − r²) = x² − (ry − x)²/(1 − r²)
    (x * x - (r * y - x).powi(2) / q).exp() / q.sqrt()
}

/// Node count per axis used by [`ou_system`].
pub fn default_nodes(d: usize, k_max: usize) -> usize {
    match d {
        1 => (2 * k_max + 2).max(96),
        _ => (2 * k_max + 2).max(40),
    }
}

/// OU system in dimension `d` with basis `{𝐇_k : |k| ≤ K_max}` and the single
/// eigenvalue map `k ↦ |k|`.
pub fn ou_system(d: usize, k_max: usize) -> Result<SpectralSystem> {
    ou_system_with_nodes(d, k_max, default_nodes(d, k_max))
}

pub fn ou_system_with_nodes(d: usize, k_max: usize, nodes_per_axis: usize) -> Result<SpectralSystem> {
    let hb = HermiteBasis::new(d, k_max, nodes_per_axis)?;
    let basis: BasisFn = Arc::new(hermite_eval);
    SpectralSystem::new(
        format!("OU(d={d},K={k_max})"),
        1,
        MultiIndex::all_up_to(d, k_max),
        |k| vec![k.order() as f64],
        basis,
        hb.grid().clone(),
    )
}
