use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::spectral::multiplier::MultiplierSpec;

/// `(λ, a) ↦ m(e^{iε_1φ_1}λ_1, …, e^{iε_nφ_n}λ_n, a)`: the first `n = phi.len()`
/// variables are rotated, the rest are left alone.
pub fn rotate_multiplier(m: &MultiplierSpec, phi: &[f64], eps: &[i8]) -> Result<MultiplierSpec> {
    if !m.has_sector() {
        return Err(Error::Capability("sector evaluation"));
    }
    if phi.len() != eps.len() || phi.len() > m.arity() {
        return Err(param(
            "phi, eps",
            format!("need equal lengths at most {}, got {} and {}", m.arity(), phi.len(), eps.len()),
        ));
    }
    if eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(param("eps", "entries must be ±1"));
    }
    let rot: Arc<Vec<Complex64>> = Arc::new(
        phi.iter()
            .zip(eps)
            .map(|(&p, &e)| Complex64::cis(e as f64 * p))
            .collect(),
    );
    let inner = Arc::new(m.clone());
    let (r1, i1) = (rot.clone(), inner.clone());
    let spec = MultiplierSpec::new(format!("{}_rot{phi:?}", m.name()), m.arity(), move |l| {
        let z: Vec<Complex64> = l
            .iter()
            .enumerate()
            .map(|(j, &x)| r1.get(j).map_or(Complex64::new(x, 0.0), |r| r * x))
            .collect();
        i1.evaluate_sector(&z).expect("checked")
    })
    .with_sector(move |w| {
        let z: Vec<Complex64> = w
            .iter()
            .enumerate()
            .map(|(j, &x)| rot.get(j).map_or(x, |r| r * x))
            .collect();
        inner.evaluate_sector(&z).expect("checked")
    });
    Ok(match m.sup_norm_hint() {
        Some(s) => spec.with_sup_norm(s),
        None => spec,
    })
}

/// `φ*_p = arcsin|2/p − 1|`.
pub fn phi_star(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(param("p", format!("must lie in (1, ∞), got {p}")));
    }
    Ok((2.0 / p - 1.0).abs().asin())
}

/// Growth exponents of the imaginary powers: `θ` for the `n` operators `L`,
/// `σ` for the `l` operators `A`, and the angles `φ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    theta: Vec<f64>,
    sigma: Vec<f64>,
    phi_p: Vec<f64>,
    p: f64,
}

impl DecayProfile {
    pub fn new(theta: Vec<f64>, sigma: Vec<f64>, phi_p: Vec<f64>, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(param("p", format!("must lie in (1, ∞), got {p}")));
        }
        if theta.iter().chain(&sigma).any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(param("theta, sigma", "exponents must be finite and ≥ 0"));
        }
        if sigma.iter().any(|&v| v == 0.0) {
            return Err(param("sigma", "exponents must be positive"));
        }
        if phi_p.len() != theta.len() {
            return Err(param("phi_p", "one angle per theta entry"));
        }
        if phi_p.iter().any(|&a| !(0.0..FRAC_PI_2).contains(&a)) {
            return Err(param("phi_p", "angles must lie in [0, π/2)"));
        }
        Ok(Self { theta, sigma, phi_p, p })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn phi_p(&self) -> &[f64] {
        &self.phi_p
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn scaled(&self, c: f64) -> Vec<f64> {
        self.theta.iter().chain(&self.sigma).map(|v| c * v + 1.0).collect()
    }
}

/// Strict threshold `|1/p − 1/2|·(θ, σ) + 𝟏`; admissible orders must exceed it.
pub fn required_order(p: f64, profile: &DecayProfile) -> Result<Vec<f64>> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(param("p", format!("must lie in (1, ∞), got {p}")));
    }
    Ok(profile.scaled((1.0 / p - 0.5).abs()))
}

/// Supremum of [`required_order`] over `p ∈ (1, ∞)`: `(θ, σ)/2 + 𝟏`.
pub fn required_order_worst_case(profile: &DecayProfile) -> Vec<f64> {
    profile.scaled(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::multiplier;

    #[test]
    fn zero_angle_is_identity() {
        let m = multiplier::riesz_1d();
        let r = rotate_multiplier(&m, &[0.0], &[1]).unwrap();
        for x in [0.1, 1.0, 7.0] {
            assert!((r.evaluate(&[x]) - m.evaluate(&[x])).norm() < 1e-15);
        }
    }

    #[test]
    fn missing_sector_is_a_capability_error() {
        let m = MultiplierSpec::new("plain", 1, |l| Complex64::new(l[0], 0.0));
        assert!(matches!(rotate_multiplier(&m, &[0.1], &[1]), Err(Error::Capability(_))));
    }

    #[test]
    fn phi_star_values() {
        assert_eq!(phi_star(2.0).unwrap(), 0.0);
        assert!((phi_star(4.0).unwrap() - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
        assert!(phi_star(1.0).is_err());
    }
}
