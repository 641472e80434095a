use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

use super::heat::HeatKernelModel;
use super::kappa::KappaSpec;
use super::kernel::in_local_region;
use crate::error::{param, Error, Result};
use crate::ou::{mehler_dr, HermiteBasis, MehlerParams};
use crate::spectral::{Grid, GridFunction};

const R_CHUNK: usize = 16;

/// Kernel-path realization of `T = m_κ(𝓛, A)` on the product of the OU
/// quadrature grid and a grid on `Y`, with an optional rough cutoff in
/// `(x1, y1)`.
pub struct ProductOperator<M> {
    ou: HermiteBasis,
    y_grid: Arc<Grid>,
    grid: Arc<Grid>,
    lebesgue: Vec<f64>,
    kappa: KappaSpec,
    model: M,
    // row-major (x1, y1) weights in {0, 1}; None means no cutoff
    mask: Option<Vec<f64>>,
}

impl<M: HeatKernelModel + Clone> Clone for ProductOperator<M> {
    fn clone(&self) -> Self {
        Self {
            ou: self.ou.clone(),
            y_grid: self.y_grid.clone(),
            grid: self.grid.clone(),
            lebesgue: self.lebesgue.clone(),
            kappa: self.kappa.clone(),
            model: self.model.clone(),
            mask: self.mask.clone(),
        }
    }
}

impl<M: HeatKernelModel> ProductOperator<M> {
    /// The product grid is `ou.grid() × y_grid`, OU coordinates varying slowest.
    pub fn new(ou: HermiteBasis, y_grid: Arc<Grid>, kappa: KappaSpec, model: M) -> Result<Self> {
        if y_grid.dim() != model.dim() {
            return Err(param("y_grid", format!("model `{}` expects dimension {}", model.name(), model.dim())));
        }
        if !kappa.is_compact() && !kappa.is_zero() {
            return Err(param("kappa", "kernel path needs support inside (0, 1)"));
        }
        let grid = Arc::new(ou.grid().product(&y_grid));
        let lebesgue = ou.lebesgue_weights();
        Ok(Self { ou, y_grid, grid, lebesgue, kappa, model, mask: None })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn kappa(&self) -> &KappaSpec {
        &self.kappa
    }

    fn n1(&self) -> usize {
        self.ou.grid().len()
    }

    fn local_mask(&self, s: f64) -> Result<Vec<f64>> {
        let g = self.ou.grid();
        let n1 = g.len();
        let mut m = vec![0.0; n1 * n1];
        for i in 0..n1 {
            for j in 0..n1 {
                if in_local_region(g.point(i), g.point(j), s)? {
                    m[i * n1 + j] = 1.0;
                }
            }
        }
        Ok(m)
    }

    fn combined(&self, extra: Vec<f64>) -> Vec<f64> {
        match &self.mask {
            None => extra,
            Some(m) => m.iter().zip(extra).map(|(a, b)| a * b).collect(),
        }
    }

    /// Restricts the kernel to `N_s` in `(x1, y1)`.
    pub fn localize(&self, s: f64) -> Result<Self>
    where
        M: Clone,
    {
        let mask = self.combined(self.local_mask(s)?);
        Ok(Self { mask: Some(mask), ..self.clone() })
    }

    /// Restricts the kernel to the complement of `N_s`.
    pub fn globalize(&self, s: f64) -> Result<Self>
    where
        M: Clone,
    {
        let outside = self.local_mask(s)?.into_iter().map(|v| 1.0 - v).collect();
        let mask = self.combined(outside);
        Ok(Self { mask: Some(mask), ..self.clone() })
    }

    /// The cutoff weights on `(x1, y1)` pairs, if any.
    pub fn mask(&self) -> Option<&[f64]> {
        self.mask.as_deref()
    }

    /// `Tf(x) = ∫∫ K(x, y) f(y) dμ(y2) dy1` by quadrature: 512-node
    /// Gauss–Legendre in `r`, Lebesgue-weighted Hermite nodes in `y1` and the
    /// `Y`-grid weights in `y2`.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        let n1 = self.n1();
        let n2 = self.y_grid.len();
        if self.kappa.is_zero() {
            return Ok(GridFunction::zeros(self.grid.clone()));
        }
        let rule = self.kappa.r_rule()?;
        let d = self.ou.dim();
        let ou_grid = self.ou.grid();
        let fv = f.values();
        let node = |r: f64, wr: f64| -> Vec<Complex64> {
            let coef = wr * self.kappa.evaluate(r);
            let p = MehlerParams::new(r, d).expect("r inside (0,1)");
            // Y-side: G[y1][x2] = Σ_{y2} r^A(x2, y2) μ(y2) f(y1, y2)
            let mut pk = vec![0.0; n2 * n2];
            for a in 0..n2 {
                for b in 0..n2 {
                    pk[a * n2 + b] =
                        self.model.r_power(r, self.y_grid.point(a), self.y_grid.point(b)) * self.y_grid.weights()[b];
                }
            }
            let mut g = vec![Complex64::new(0.0, 0.0); n1 * n2];
            for y1 in 0..n1 {
                let row = &fv[y1 * n2..(y1 + 1) * n2];
                for a in 0..n2 {
                    g[y1 * n2 + a] = pk[a * n2..(a + 1) * n2].iter().zip(row).map(|(k, v)| k * v).sum();
                }
            }
            // OU side: out[x1][x2] = Σ_{y1} ∂_r M_r(x1, y1) dy1 G[y1][x2]
            let mut out = vec![Complex64::new(0.0, 0.0); n1 * n2];
            for x1 in 0..n1 {
                for y1 in 0..n1 {
                    let mut k = mehler_dr(&p, ou_grid.point(x1), ou_grid.point(y1)).expect("dims") * self.lebesgue[y1];
                    if let Some(m) = &self.mask {
                        k *= m[x1 * n1 + y1];
                    }
                    if k == 0.0 {
                        continue;
                    }
                    let src = &g[y1 * n2..(y1 + 1) * n2];
                    for (o, s) in out[x1 * n2..(x1 + 1) * n2].iter_mut().zip(src) {
                        *o += k * s;
                    }
                }
            }
            out.iter_mut().for_each(|v| *v *= coef);
            out
        };
        // fixed chunks summed in order keep the result independent of scheduling
        let pairs: Vec<(f64, f64)> = rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
        let partials: Vec<Vec<Complex64>> = pairs
            .par_chunks(R_CHUNK)
            .map(|chunk| {
                let mut acc = vec![Complex64::new(0.0, 0.0); n1 * n2];
                for &(r, wr) in chunk {
                    acc.iter_mut().zip(node(r, wr)).for_each(|(a, b)| *a += b);
                }
                acc
            })
            .collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for part in partials {
            acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
        }
        GridFunction::new(self.grid.clone(), acc)
    }
}

/// `(T^{loc} f, T^{glob} f)` with the rough cutoff `χ_{N₂}`:
/// `T^{glob}` integrates `(1 − χ_{N₂}) K` and `T^{loc} f = Tf − T^{glob} f`.
pub fn apply_t_split<M: HeatKernelModel + Clone>(op: &ProductOperator<M>, f: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    let full = op.apply(f)?;
    let glob = op.globalize(2.0)?.apply(f)?;
    let loc = full.sub(&glob)?;
    Ok((loc, glob))
}
