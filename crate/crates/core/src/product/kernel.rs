use num_complex::Complex64;

use super::heat::{unit_ball_volume, HeatKernelModel};
use super::kappa::KappaSpec;
use crate::error::{param, Result};
use crate::ou::{mehler_dr, w_dr, MehlerParams};

/// A point `(x1, x2)` of `ℝ^d × Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl ProductPoint {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>) -> Self {
        Self { x1, x2 }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
}

/// `η(x, y) = max(|x1 − y1|, ζ(x2, y2))` on `ℝ^d × Y`, with the ball volume of
/// `Λ ⊗ μ`.
pub struct EtaMetric<'a, M: HeatKernelModel + ?Sized> {
    model: &'a M,
}

impl<'a, M: HeatKernelModel + ?Sized> EtaMetric<'a, M> {
    pub fn new(model: &'a M) -> Self {
        Self { model }
    }

    pub fn distance(&self, x: &ProductPoint, y: &ProductPoint) -> f64 {
        euclid(&x.x1, &y.x1).max(self.model.distance(&x.x2, &y.x2))
    }

    /// `(Λ ⊗ μ)(B(x, R)) = |B_{ℝ^d}(R)| · μ(B(x2, R))`.
    pub fn ball_volume(&self, x: &ProductPoint, radius: f64) -> f64 {
        let d = x.x1.len();
        unit_ball_volume(d) * radius.powi(d as i32) * self.model.ball_volume(&x.x2, radius)
    }
}

fn check_points<M: HeatKernelModel + ?Sized>(x: &ProductPoint, y: &ProductPoint, model: &M) -> Result<()> {
    if x.x1.len() != y.x1.len() || x.x1.is_empty() {
        return Err(param("x1, y1", "dimension mismatch"));
    }
    if x.x2.len() != model.dim() || y.x2.len() != model.dim() {
        return Err(param("x2, y2", format!("model `{}` expects dimension {}", model.name(), model.dim())));
    }
    Ok(())
}

fn r_integral<F: Fn(f64) -> f64>(kappa: &KappaSpec, dr: F, x2: &[f64], y2: &[f64], model: &dyn HeatKernelModel) -> Result<Complex64> {
    if kappa.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = kappa.r_rule()?;
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&r, &w)| w * dr(r) * model.r_power(r, x2, y2) * kappa.evaluate(r))
        .sum())
}

/// `K(x, y) = ∫₀¹ ∂_r M_r(x1, y1) r^A(x2, y2) κ(r) dr`, 512-node Gauss–Legendre
/// on the support of `κ`.
pub fn kernel_k<M: HeatKernelModel>(x: &ProductPoint, y: &ProductPoint, kappa: &KappaSpec, model: &M) -> Result<Complex64> {
    check_points(x, y, model)?;
    let d = x.x1.len();
    r_integral(
        kappa,
        |r| mehler_dr(&MehlerParams::new(r, d).expect("r inside (0,1)"), &x.x1, &y.x1).expect("dims checked"),
        &x.x2,
        &y.x2,
        model,
    )
}

/// `K̃(x, y) = ∫₀¹ κ(r) ∂_r W_r(x1 − y1) r^A(x2, y2) dr`.
pub fn kernel_ktilde<M: HeatKernelModel>(x: &ProductPoint, y: &ProductPoint, kappa: &KappaSpec, model: &M) -> Result<Complex64> {
    check_points(x, y, model)?;
    let d = x.x1.len();
    r_integral(
        kappa,
        |r| w_dr(&MehlerParams::new(r, d).expect("r inside (0,1)"), &x.x1, &y.x1).expect("dims checked"),
        &x.x2,
        &y.x2,
        model,
    )
}

/// `(x1, y1) ∈ N_s`, i.e. `|x1 − y1| ≤ s/(1 + |x1| + |y1|)`.
pub fn in_local_region(x1: &[f64], y1: &[f64], s: f64) -> Result<bool> {
    if !(s > 0.0) {
        return Err(param("s", format!("must be positive, got {s}")));
    }
    if x1.len() != y1.len() {
        return Err(param("x1, y1", "dimension mismatch"));
    }
    let nx = x1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y1.iter().map(|v| v * v).sum::<f64>().sqrt();
    // nx + ny commutes exactly, so the test is symmetric bit for bit
    Ok(euclid(x1, y1) * (1.0 + (nx + ny)) <= s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::heat::EuclideanModel;

    #[test]
    fn local_region_examples() {
        assert!(in_local_region(&[0.0], &[0.0], 1.0).unwrap());
        assert!(in_local_region(&[0.0, 0.0], &[1.0, 0.0], 2.0).unwrap());
        assert!(!in_local_region(&[3.0], &[4.0], 2.0).unwrap());
        assert!(in_local_region(&[0.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn zero_kappa_kernels_vanish() {
        let m = EuclideanModel::new(1).unwrap();
        let x = ProductPoint::new(vec![0.1], vec![0.0]);
        let y = ProductPoint::new(vec![0.4], vec![0.3]);
        assert_eq!(kernel_k(&x, &y, &KappaSpec::zero(), &m).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(kernel_ktilde(&x, &y, &KappaSpec::zero(), &m).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn full_support_kappa_is_rejected() {
        let m = EuclideanModel::new(1).unwrap();
        let x = ProductPoint::new(vec![0.1], vec![0.0]);
        assert!(kernel_k(&x, &x, &KappaSpec::one(), &m).is_err());
    }
}
