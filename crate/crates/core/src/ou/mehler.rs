use std::f64::consts::PI;

use crate::error::{param, Result};

/// Parameter `r = e^{-t}` of the OU semigroup, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MehlerParams {
    r: f64,
    d: usize,
}

impl MehlerParams {
    pub fn new(r: f64, d: usize) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(param("r", format!("must lie in (0, 1), got {r}")));
        }
        if d == 0 {
            return Err(param("d", "dimension must be positive"));
        }
        Ok(Self { r, d })
    }

    /// From the time parameter, `r = e^{-t}`.
    pub fn from_time(t: f64, d: usize) -> Result<Self> {
        Self::new((-t).exp(), d)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

fn check_dims(p: &MehlerParams, x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != p.d || y.len() != p.d {
        return Err(param(
            "point",
            format!("expected dimension {}, got {} and {}", p.d, x.len(), y.len()),
        ));
    }
    Ok(())
}

fn sq_dist_scaled(r: f64, x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (r * a - b).powi(2)).sum()
}

/// Mehler kernel `M_r(x, y) = π^{-d/2}(1−r²)^{-d/2} exp(−|rx − y|²/(1−r²))`,
/// the kernel of `r^𝓛` against Lebesgue measure.
pub fn mehler_kernel(p: &MehlerParams, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(p, x, y)?;
    let r = p.r;
    let q = 1.0 - r * r;
    let dh = 0.5 * p.d as f64;
    Ok(PI.powf(-dh) * q.powf(-dh) * (-sq_dist_scaled(r, x, y) / q).exp())
}

/// `∂_r M_r(x, y)`.
///
/// `π^{-d/2}(dr − 2r|rx−y|²/(1−r²) − 2⟨rx−y, x⟩)(1−r²)^{-d/2-1} exp(−|rx−y|²/(1−r²))`.
pub fn mehler_dr(p: &MehlerParams, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(p, x, y)?;
    let r = p.r;
    let q = 1.0 - r * r;
    let d = p.d as f64;
    let s2 = sq_dist_scaled(r, x, y);
    let inner: f64 = x.iter().zip(y).map(|(a, b)| (r * a - b) * a).sum();
    let bracket = d * r - 2.0 * r * s2 / q - 2.0 * inner;
    Ok(PI.powf(-0.5 * d) * bracket * q.powf(-0.5 * d - 1.0) * (-s2 / q).exp())
}

/// Comparison kernel `W_r(z) = π^{-d/2}(1−r²)^{-d/2} exp(−|z|²/(1−r²))`.
pub fn heat_kernel_w(p: &MehlerParams, z: &[f64]) -> Result<f64> {
    if z.len() != p.d {
        return Err(param("z", format!("expected dimension {}", p.d)));
    }
    let r = p.r;
    let q = 1.0 - r * r;
    let dh = 0.5 * p.d as f64;
    let z2: f64 = z.iter().map(|v| v * v).sum();
    Ok(PI.powf(-dh) * q.powf(-dh) * (-z2 / q).exp())
}

/// `∂_r W_r(x − y) = π^{-d/2} r (1−r²)^{-d/2-1} exp(−|x−y|²/(1−r²)) [d − 2|x−y|²/(1−r²)]`.
pub fn w_dr(p: &MehlerParams, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(p, x, y)?;
    let r = p.r;
    let q = 1.0 - r * r;
    let d = p.d as f64;
    let z2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(PI.powf(-0.5 * d) * r * q.powf(-0.5 * d - 1.0) * (-z2 / q).exp() * (d - 2.0 * z2 / q))
}
