use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

use super::mellin::{LogGrid, MellinSampler};
use crate::error::{param, Result};
use crate::spectral::multiplier::MultiplierSpec;

/// Floor applied before taking logarithms of `S(u)`.
const LOG_FLOOR: f64 = 1e-300;

/// `m_{N,t}(λ) = ∏_j (t_j λ_j)^{N_j} · exp(−Σ_j t_j λ_j) · m(λ)`.
pub fn make_mnt(m: &MultiplierSpec, n: &[usize], t: &[f64]) -> Result<MultiplierSpec> {
    let d = m.arity();
    if n.len() != d || t.len() != d {
        return Err(param("N, t", format!("expected length {d}")));
    }
    if t.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(param("t", format!("must be positive, got {t:?}")));
    }
    let n_eval: Vec<i32> = n.iter().map(|&v| v as i32).collect();
    let t_eval = t.to_vec();
    let inner = Arc::new(m.clone());
    let e = inner.clone();
    let (ne, te) = (n_eval.clone(), t_eval.clone());
    let mut spec = MultiplierSpec::new(format!("{}_N{n:?}_t{t:?}", m.name()), d, move |l| {
        let mut factor = 1.0;
        let mut exponent = 0.0;
        for j in 0..l.len() {
            let x = te[j] * l[j];
            factor *= x.powi(ne[j]);
            exponent += x;
        }
        if factor == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        factor * (-exponent).exp() * e.evaluate(l)
    });
    if inner.has_sector() {
        let s = inner.clone();
        spec = spec.with_sector(move |z| {
            let mut factor = Complex64::new(1.0, 0.0);
            let mut exponent = Complex64::new(0.0, 0.0);
            for j in 0..z.len() {
                let x = t_eval[j] * z[j];
                factor *= x.powi(n_eval[j]);
                exponent += x;
            }
            factor * (-exponent).exp() * s.evaluate_sector(z).expect("checked")
        });
    }
    Ok(spec)
}

/// Result of [`decay_check`]: `S(u) = max_t |𝓜(m_{N,t})(u)|` along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// Sampled `u_j` values per axis (other coordinates held at 0).
    pub u: Vec<Vec<f64>>,
    /// `S` at those points, per axis.
    pub sup: Vec<Vec<f64>>,
    /// Least-squares slope of `log S` against `log(1+|u_j|)` over the largest decade.
    pub slopes: Vec<f64>,
    /// `sup_u S(u) ∏_j (1+|u_j|)^{ρ_j}` over all sampled points.
    pub constant: f64,
}

/// Slope of `log y` against `log(1+|x|)` over the points with
/// `|x| ≥ max|x|/10`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(param("x, y", "length mismatch"));
    }
    let top = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(u, _)| u.abs() >= 0.1 * top)
        .map(|(u, s)| ((1.0 + u.abs()).ln(), s.max(LOG_FLOOR).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(param("u_grid", "need at least two points in the largest decade"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(param("u_grid", "largest decade has a single abscissa"));
    }
    Ok(sxy / sxx)
}

/// Samples `S(u) = max_t |𝓜(m_{N,t})(u)|` with `t` over the tensor grid
/// `t_axis^d` and `u` along each coordinate axis.
pub fn decay_check(
    m: &MultiplierSpec,
    n: &[usize],
    rho: &[usize],
    u_axis: &[f64],
    t_axis: &[f64],
    grid: &LogGrid,
) -> Result<DecayReport> {
    let d = m.arity();
    if n.len() != d || rho.len() != d {
        return Err(param("N, rho", format!("expected length {d}")));
    }
    if n.iter().zip(rho).any(|(a, b)| a <= b) {
        return Err(param("N", format!("must exceed rho componentwise, got N={n:?}, rho={rho:?}")));
    }
    if u_axis.is_empty() || t_axis.is_empty() {
        return Err(param("grids", "u and t grids must be non-empty"));
    }
    let nodes = grid.nodes();
    let phase = |u: f64| -> Vec<Complex64> { nodes.iter().map(|&s| Complex64::cis(-u * s)).collect() };
    let zero = phase(0.0);
    let axis_phases: Vec<Vec<Complex64>> = u_axis.iter().map(|&u| phase(u)).collect();

    let nt = t_axis.len();
    let t_total = nt.pow(d as u32);
    let per_t: Vec<Vec<Vec<f64>>> = (0..t_total)
        .into_par_iter()
        .map(|mut i| -> Result<Vec<Vec<f64>>> {
            let mut t = vec![0.0; d];
            for v in t.iter_mut() {
                *v = t_axis[i % nt];
                i /= nt;
            }
            let sampler = MellinSampler::new(&make_mnt(m, n, &t)?, grid)?;
            let mut out = Vec::with_capacity(d);
            for axis in 0..d {
                let mut phases: Vec<Vec<Complex64>> = vec![zero.clone(); d];
                let vals = axis_phases
                    .iter()
                    .map(|ph| {
                        phases[axis] = ph.clone();
                        sampler.contract(&phases).norm()
                    })
                    .collect();
                out.push(vals);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut sup = vec![vec![0.0f64; u_axis.len()]; d];
    for rows in &per_t {
        for (axis, row) in rows.iter().enumerate() {
            for (s, v) in sup[axis].iter_mut().zip(row) {
                *s = s.max(*v);
            }
        }
    }
    let mut slopes = Vec::with_capacity(d);
    let mut constant: f64 = 0.0;
    for axis in 0..d {
        slopes.push(fit_slope(u_axis, &sup[axis])?);
        for (u, s) in u_axis.iter().zip(&sup[axis]) {
            constant = constant.max(s * (1.0 + u.abs()).powi(rho[axis] as i32));
        }
    }
    Ok(DecayReport { u: vec![u_axis.to_vec(); d], sup, slopes, constant })
}
