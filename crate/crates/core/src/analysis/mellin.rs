use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::spectral::multiplier::MultiplierSpec;

/// Tail-mass tolerance of the log-domain and frequency windows.
pub const TAU_TAIL: f64 = 1e-9;

/// Trapezoid grid in `s = log λ` on `[-S, S]` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub s_max: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self { s_max: 30.0, points: 1 << 14 }
    }
}

impl LogGrid {
    pub fn new(s_max: f64, points: usize) -> Result<Self> {
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(param("s_max", format!("must be positive, got {s_max}")));
        }
        if points < 3 {
            return Err(param("points", "need at least 3 points per axis"));
        }
        Ok(Self { s_max, points })
    }

    /// Default grid for `d` axes: `2^14` points in one dimension, `2^11` per
    /// axis otherwise.
    pub fn for_dim(d: usize) -> Self {
        if d <= 1 {
            Self::default()
        } else {
            Self { s_max: 30.0, points: 1 << 11 }
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.s_max / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| -self.s_max + h * i as f64).collect()
    }

    fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.points, self.step())
    }
}

fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w
}

/// Symmetric frequency window `[-U, U]` with `points` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UWindow {
    pub u_max: f64,
    pub points: usize,
}

impl Default for UWindow {
    fn default() -> Self {
        Self { u_max: 40.0, points: 1601 }
    }
}

impl UWindow {
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| -self.u_max + h * i as f64).collect()
    }

    pub fn step(&self) -> f64 {
        2.0 * self.u_max / (self.points - 1) as f64
    }
}

/// Samples of `m(e^s)` on a tensor log-grid, ready for repeated transforms.
#[derive(Debug, Clone)]
pub struct MellinSampler {
    dim: usize,
    grid: LogGrid,
    nodes: Vec<f64>,
    // row-major, last axis fastest, trapezoid weights folded in
    weighted: Vec<Complex64>,
    norm_sq: f64,
    tail: f64,
}

impl MellinSampler {
    /// Samples `m` and rejects it if `∫|m| dλ/λ` outside the window exceeds
    /// [`TAU_TAIL`].
    pub fn new(m: &MultiplierSpec, grid: &LogGrid) -> Result<Self> {
        let s = Self::new_unchecked(m, grid);
        if s.tail > TAU_TAIL {
            return Err(Error::Integrability { tail: s.tail, tol: TAU_TAIL });
        }
        Ok(s)
    }

    fn new_unchecked(m: &MultiplierSpec, grid: &LogGrid) -> Self {
        let d = m.arity();
        let n = grid.points;
        let nodes = grid.nodes();
        let weights = grid.weights();
        let total = n.pow(d as u32);
        let raw: Vec<(Complex64, f64)> = (0..total)
            .into_par_iter()
            .map(|i| {
                let (lambda, w) = tensor_point(i, d, &nodes, &weights);
                (m.evaluate(&lambda), w)
            })
            .collect();
        let norm_sq = raw.iter().map(|(v, w)| w * v.norm_sqr()).sum();
        let weighted = raw.into_iter().map(|(v, w)| w * v).collect();
        let tail = tail_mass(m, grid);
        Self { dim: d, grid: *grid, nodes, weighted, norm_sq, tail }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &LogGrid {
        &self.grid
    }

    /// Estimated `∫|m| dλ/λ` just outside the window.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// `‖m‖²_{L²(dλ/λ)}` on the window.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// `𝓜m(u) = ∫ λ^{-iu} m(λ) dλ/λ`.
    pub fn at(&self, u: &[f64]) -> Complex64 {
        assert_eq!(u.len(), self.dim);
        let phases: Vec<Vec<Complex64>> = u.iter().map(|&v| phase_vector(v, &self.nodes)).collect();
        self.contract(&phases)
    }

    /// Transform at `u` from precomputed per-axis phase vectors `e^{-i u_j s}`.
    pub fn contract(&self, phases: &[Vec<Complex64>]) -> Complex64 {
        let n = self.nodes.len();
        let mut data: Vec<Complex64> = self.weighted.clone();
        for axis in (0..self.dim).rev() {
            let ph = &phases[axis];
            data = data
                .chunks(n)
                .map(|row| row.iter().zip(ph).map(|(a, b)| a * b).sum())
                .collect();
        }
        data[0]
    }

    /// `𝓜m` on the tensor grid `window.nodes()^d`, contracting one axis at a time.
    pub fn on_window(&self, window: &UWindow) -> Vec<Complex64> {
        let n = self.nodes.len();
        let us = window.nodes();
        let nu = us.len();
        let phase: Vec<Vec<Complex64>> = us.iter().map(|&u| phase_vector(u, &self.nodes)).collect();
        // transformed axes rotate to the back, so after d passes the layout is
        // [u_0, …, u_{d-1}] again
        let mut data = self.weighted.clone();
        let mut shape: Vec<usize> = vec![n; self.dim];
        for _ in 0..self.dim {
            let rest: usize = shape[1..].iter().product();
            let mut out = vec![Complex64::new(0.0, 0.0); rest * nu];
            out.par_chunks_mut(nu).enumerate().for_each(|(r, dst)| {
                for (k, ph) in phase.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (i, p) in ph.iter().enumerate() {
                        acc += data[i * rest + r] * p;
                    }
                    dst[k] = acc;
                }
            });
            data = out;
            shape.remove(0);
            shape.push(nu);
        }
        data
    }
}

fn tensor_point(mut i: usize, d: usize, nodes: &[f64], weights: &[f64]) -> (Vec<f64>, f64) {
    let n = nodes.len();
    let mut lambda = vec![0.0; d];
    let mut w = 1.0;
    for j in (0..d).rev() {
        let k = i % n;
        i /= n;
        lambda[j] = nodes[k].exp();
        w *= weights[k];
    }
    (lambda, w)
}

fn phase_vector(u: f64, nodes: &[f64]) -> Vec<Complex64> {
    nodes.iter().map(|&s| Complex64::cis(-u * s)).collect()
}

/// `∫|m| ds` over the slabs where one coordinate lies in `[S, 2S]` or
/// `[-2S, -S]` and the others in `[-S, S]`.
fn tail_mass(m: &MultiplierSpec, grid: &LogGrid) -> f64 {
    let d = m.arity();
    let core = grid.nodes();
    let core_w = grid.weights();
    let band_n = grid.points / 2 + 1;
    let band_h = grid.s_max / (band_n - 1) as f64;
    let band_w = trapezoid_weights(band_n, band_h);
    let mut tail = 0.0;
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            let band: Vec<f64> = (0..band_n)
                .map(|i| sign * (grid.s_max + band_h * i as f64))
                .collect();
            let per_axis: Vec<(&[f64], &[f64])> = (0..d)
                .map(|j| {
                    if j == axis {
                        (band.as_slice(), band_w.as_slice())
                    } else {
                        (core.as_slice(), core_w.as_slice())
                    }
                })
                .collect();
            let sizes: Vec<usize> = per_axis.iter().map(|(n, _)| n.len()).collect();
            let total: usize = sizes.iter().product();
            tail += (0..total)
                .into_par_iter()
                .map(|mut i| {
                    let mut lambda = vec![0.0; d];
                    let mut w = 1.0;
                    for j in (0..d).rev() {
                        let k = i % sizes[j];
                        i /= sizes[j];
                        lambda[j] = per_axis[j].0[k].exp();
                        w *= per_axis[j].1[k];
                    }
                    w * m.evaluate(&lambda).norm()
                })
                .sum::<f64>();
        }
    }
    tail
}

/// `𝓜m(u) = ∫_{(0,∞)^d} λ^{-iu} m(λ) dλ/λ` via `λ = e^s` and the trapezoid rule.
pub fn mellin(m: &MultiplierSpec, u: &[f64], grid: &LogGrid) -> Result<Complex64> {
    if u.len() != m.arity() {
        return Err(param("u", format!("expected length {}, got {}", m.arity(), u.len())));
    }
    Ok(MellinSampler::new(m, grid)?.at(u))
}

/// Values of `𝓜m` on a tensor frequency window.
#[derive(Debug, Clone)]
pub struct MellinSpectrum {
    dim: usize,
    window: UWindow,
    values: Vec<Complex64>,
}

impl MellinSpectrum {
    pub fn new(dim: usize, window: UWindow, values: Vec<Complex64>) -> Result<Self> {
        if window.points < 3 || !(window.u_max > 0.0) {
            return Err(param("window", "need u_max > 0 and at least 3 points"));
        }
        let expected = window.points.pow(dim as u32);
        if values.len() != expected {
            return Err(Error::Shape { expected, got: values.len() });
        }
        Ok(Self { dim, window, values })
    }

    pub fn window(&self) -> &UWindow {
        &self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `∫|𝓜m| du` over the outer tenth of the window along any axis.
    pub fn tail(&self) -> f64 {
        let nodes = self.window.nodes();
        let w = trapezoid_weights(nodes.len(), self.window.step());
        let cut = 0.9 * self.window.u_max;
        let n = nodes.len();
        self.values
            .iter()
            .enumerate()
            .map(|(mut i, v)| {
                let mut weight = 1.0;
                let mut outer = false;
                for _ in 0..self.dim {
                    let k = i % n;
                    i /= n;
                    weight *= w[k];
                    outer |= nodes[k].abs() >= cut;
                }
                if outer {
                    weight * v.norm()
                } else {
                    0.0
                }
            })
            .sum()
    }

    fn check_window(&self) -> Result<()> {
        let tail = self.tail();
        if tail > TAU_TAIL {
            return Err(Error::Window { tail, tol: TAU_TAIL });
        }
        Ok(())
    }

    /// `(2π)^{-d} ‖𝓜m‖²_{L²(du)}` by the trapezoid rule.
    fn scaled_norm_sq(&self) -> f64 {
        let w = trapezoid_weights(self.window.points, self.window.step());
        let n = w.len();
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(mut i, v)| {
                let mut weight = 1.0;
                for _ in 0..self.dim {
                    weight *= w[i % n];
                    i /= n;
                }
                weight * v.norm_sqr()
            })
            .sum();
        s / (2.0 * PI).powi(self.dim as i32)
    }
}

/// `𝓜m` on `window` (tensor grid, first axis slowest).
pub fn mellin_spectrum(m: &MultiplierSpec, window: &UWindow, grid: &LogGrid) -> Result<MellinSpectrum> {
    let sampler = MellinSampler::new(m, grid)?;
    let values = sampler.on_window(window);
    MellinSpectrum::new(m.arity(), *window, values)
}

/// `m(λ) = (2π)^{-d} ∫ 𝓜m(u) λ^{iu} du` from tabulated transform values.
pub fn mellin_inverse(spectrum: &MellinSpectrum, lambda: &[f64]) -> Result<Complex64> {
    if lambda.len() != spectrum.dim {
        return Err(param("lambda", format!("expected length {}", spectrum.dim)));
    }
    if lambda.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(param("lambda", format!("must be positive, got {lambda:?}")));
    }
    spectrum.check_window()?;
    let nodes = spectrum.window.nodes();
    let w = trapezoid_weights(nodes.len(), spectrum.window.step());
    let phases: Vec<Vec<Complex64>> = lambda
        .iter()
        .map(|&l| {
            let s = l.ln();
            nodes.iter().zip(&w).map(|(&u, &wu)| wu * Complex64::cis(u * s)).collect()
        })
        .collect();
    let n = nodes.len();
    let mut data = spectrum.values.clone();
    for axis in (0..spectrum.dim).rev() {
        data = data
            .chunks(n)
            .map(|row| row.iter().zip(&phases[axis]).map(|(a, b)| a * b).sum())
            .collect();
    }
    Ok(data[0] / (2.0 * PI).powi(spectrum.dim as i32))
}

/// `|‖m‖²_{L²(dλ/λ)} − (2π)^{-d}‖𝓜m‖²_{L²(du)}|`.
pub fn plancherel_residual(m: &MultiplierSpec, window: &UWindow, grid: &LogGrid) -> Result<f64> {
    let sampler = MellinSampler::new(m, grid)?;
    let spectrum = MellinSpectrum::new(m.arity(), *window, sampler.on_window(window))?;
    spectrum.check_window()?;
    Ok((sampler.norm_sq() - spectrum.scaled_norm_sq()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::multiplier;

    #[test]
    fn constant_is_not_integrable() {
        let m = multiplier::constant(1, Complex64::new(1.0, 0.0));
        match mellin(&m, &[0.0], &LogGrid::default()) {
            Err(Error::Integrability { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_has_zero_residual() {
        let m = multiplier::constant(1, Complex64::new(0.0, 0.0));
        let r = plancherel_residual(&m, &UWindow::default(), &LogGrid::new(10.0, 257).unwrap()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn contract_matches_on_window_in_two_dimensions() {
        let m = multiplier::product(vec![multiplier::log_gaussian(), multiplier::lambda_exp()]);
        let grid = LogGrid::new(12.0, 301).unwrap();
        let s = MellinSampler::new_unchecked(&m, &grid);
        let window = UWindow { u_max: 2.0, points: 5 };
        let all = s.on_window(&window);
        let us = window.nodes();
        for (a, &u0) in us.iter().enumerate() {
            for (b, &u1) in us.iter().enumerate() {
                let v = s.at(&[u0, u1]);
                assert!((v - all[a * 5 + b]).norm() < 1e-12);
            }
        }
    }
}
