//! Scalar multiplier functions on `(0, ∞)^d`.

use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
pub type SectorFn = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// Relative step of the central-difference fallback, `h_j = STEP · λ_j`.
pub const RELATIVE_STEP: f64 = 1e-4;

/// A multiplier `m: (0,∞)^d → ℂ`, optionally with analytic partials and a
/// holomorphic extension to rotated arguments.
#[derive(Clone)]
pub struct MultiplierSpec {
    name: String,
    arity: usize,
    eval: RealFn,
    partials: HashMap<Vec<usize>, RealFn>,
    sector: Option<SectorFn>,
    sup_norm_hint: Option<f64>,
    regular_at_origin: bool,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("partials", &self.partials.keys().collect::<Vec<_>>())
            .field("sector", &self.sector.is_some())
            .field("sup_norm_hint", &self.sup_norm_hint)
            .field("regular_at_origin", &self.regular_at_origin)
            .finish()
    }
}

impl MultiplierSpec {
    pub fn new<F>(name: impl Into<String>, arity: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
            partials: HashMap::new(),
            sector: None,
            sup_norm_hint: None,
            regular_at_origin: true,
        }
    }

    pub fn with_partial<F>(mut self, gamma: Vec<usize>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        assert_eq!(gamma.len(), self.arity, "partial order length must equal arity");
        self.partials.insert(gamma, Arc::new(f));
        self
    }

    pub fn with_sector<F>(mut self, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    {
        self.sector = Some(Arc::new(f));
        self
    }

    pub fn with_sup_norm(mut self, s: f64) -> Self {
        self.sup_norm_hint = Some(s);
        self
    }

    /// Marks the multiplier as undefined at the origin (so only ATL systems accept it).
    pub fn singular_at_origin(mut self) -> Self {
        self.regular_at_origin = false;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn sup_norm_hint(&self) -> Option<f64> {
        self.sup_norm_hint
    }

    pub fn is_regular_at_origin(&self) -> bool {
        self.regular_at_origin
    }

    pub fn has_sector(&self) -> bool {
        self.sector.is_some()
    }

    pub fn evaluate(&self, lambda: &[f64]) -> Complex64 {
        (self.eval)(lambda)
    }

    pub fn evaluate_sector(&self, z: &[Complex64]) -> Result<Complex64> {
        match &self.sector {
            Some(f) => Ok(f(z)),
            None => Err(Error::Capability("multiplier has no sector evaluator")),
        }
    }

    pub fn has_partial(&self, gamma: &[usize]) -> bool {
        gamma.iter().all(|&g| g == 0) || self.partials.contains_key(gamma)
    }

    /// `∂^γ m(λ)`, analytic if registered, otherwise a tensor central difference
    /// with per-axis step `1e-4·λ_j`.
    pub fn partial(&self, gamma: &[usize], lambda: &[f64]) -> Result<Complex64> {
        if gamma.len() != self.arity || lambda.len() != self.arity {
            return Err(Error::Arity {
                multiplier: self.arity,
                system: gamma.len().max(lambda.len()),
            });
        }
        let value = if gamma.iter().all(|&g| g == 0) {
            self.evaluate(lambda)
        } else if let Some(f) = self.partials.get(gamma) {
            f(lambda)
        } else {
            self.central_difference(gamma, lambda)?
        };
        if value.re.is_finite() && value.im.is_finite() {
            Ok(value)
        } else {
            Err(Error::Differentiation(format!(
                "∂^{gamma:?} of `{}` is not finite at {lambda:?}",
                self.name
            )))
        }
    }

    fn central_difference(&self, gamma: &[usize], lambda: &[f64]) -> Result<Complex64> {
        let steps: Vec<f64> = lambda.iter().map(|&l| RELATIVE_STEP * l).collect();
        if steps.iter().zip(gamma).any(|(&h, &g)| g > 0 && !(h > 0.0)) {
            return Err(Error::Differentiation(format!(
                "relative step degenerates at {lambda:?}"
            )));
        }
        // stencil per axis: offsets (g/2 − i)·h with binomial signs
        let stencils: Vec<Vec<(f64, f64)>> = gamma
            .iter()
            .zip(&steps)
            .map(|(&g, &h)| {
                (0..=g)
                    .map(|i| {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        let coef = sign * binomial(g, i) / h.powi(g as i32);
                        (0.5 * g as f64 - i as f64, coef)
                    })
                    .collect()
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut point = lambda.to_vec();
        let mut idx = vec![0usize; gamma.len()];
        loop {
            let mut coef = 1.0;
            for (j, st) in stencils.iter().enumerate() {
                let (off, c) = st[idx[j]];
                point[j] = lambda[j] + off * steps[j];
                coef *= c;
            }
            acc += coef * self.evaluate(&point);
            // odometer
            let mut j = 0;
            loop {
                if j == idx.len() {
                    return Ok(acc);
                }
                idx[j] += 1;
                if idx[j] < stencils[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `m ≡ value`.
pub fn constant(arity: usize, value: Complex64) -> MultiplierSpec {
    MultiplierSpec::new(format!("constant({value})"), arity, move |_| value)
        .with_sector(move |_| value)
        .with_sup_norm(value.norm())
}

/// `m(λ) = λ`, the operator itself.
pub fn linear() -> MultiplierSpec {
    MultiplierSpec::new("linear", 1, |l| c(l[0]))
        .with_partial(vec![1], |_| c(1.0))
        .with_partial(vec![2], |_| c(0.0))
        .with_sector(|z| z[0])
}

/// `m(λ) = λ^{iu}`, the imaginary power.
pub fn imaginary_power(u: f64) -> MultiplierSpec {
    let iu = Complex64::new(0.0, u);
    MultiplierSpec::new(format!("imaginary_power({u})"), 1, move |l| c(l[0]).powc(iu))
        .with_partial(vec![1], move |l| iu * c(l[0]).powc(iu - 1.0))
        .with_partial(vec![2], move |l| iu * (iu - 1.0) * c(l[0]).powc(iu - 2.0))
        .with_sector(move |z| z[0].powc(iu))
        .with_sup_norm(1.0)
        .singular_at_origin()
}

/// `m(λ) = λ / (1 + λ)`.
pub fn riesz_1d() -> MultiplierSpec {
    MultiplierSpec::new("riesz", 1, |l| c(l[0] / (1.0 + l[0])))
        .with_partial(vec![1], |l| c(1.0 / (1.0 + l[0]).powi(2)))
        .with_partial(vec![2], |l| c(-2.0 / (1.0 + l[0]).powi(3)))
        .with_sector(|z| z[0] / (1.0 + z[0]))
        .with_sup_norm(1.0)
}

/// `m(λ) = λ_axis / (λ_1 + … + λ_d)`, the joint Riesz transform.
pub fn riesz_joint(arity: usize, axis: usize) -> MultiplierSpec {
    assert!(axis < arity);
    MultiplierSpec::new(format!("riesz_joint({arity},{axis})"), arity, move |l| {
        c(l[axis] / l.iter().sum::<f64>())
    })
    .with_sector(move |z| z[axis] / z.iter().sum::<Complex64>())
    .with_sup_norm(1.0)
    .singular_at_origin()
}

/// `m(λ) = λ e^{-λ}`.
pub fn lambda_exp() -> MultiplierSpec {
    MultiplierSpec::new("lambda_exp", 1, |l| c(l[0] * (-l[0]).exp()))
        .with_partial(vec![1], |l| c((1.0 - l[0]) * (-l[0]).exp()))
        .with_sector(|z| z[0] * (-z[0]).exp())
        .with_sup_norm((-1.0f64).exp())
}

/// `m(λ) = exp(-(log λ)² / 2)`, the log-Gaussian.
pub fn log_gaussian() -> MultiplierSpec {
    MultiplierSpec::new("log_gaussian", 1, |l| c((-0.5 * l[0].ln().powi(2)).exp()))
        .with_partial(vec![1], |l| {
            let s = l[0].ln();
            c(-s / l[0] * (-0.5 * s * s).exp())
        })
        .with_sector(|z| (-0.5 * z[0].ln().powi(2)).exp())
        .with_sup_norm(1.0)
        .singular_at_origin()
}

/// `m(λ) = λ^{iu} e^{-λ}`.
pub fn damped_imaginary_power(u: f64) -> MultiplierSpec {
    let iu = Complex64::new(0.0, u);
    MultiplierSpec::new(format!("damped_imaginary_power({u})"), 1, move |l| {
        c(l[0]).powc(iu) * (-l[0]).exp()
    })
    .with_sector(move |z| z[0].powc(iu) * (-z[0]).exp())
    .with_sup_norm(1.0)
    .singular_at_origin()
}

/// Indicator of the eigenvalue `j`: the spectral projection `P_j`.
pub fn eigen_indicator(j: f64) -> MultiplierSpec {
    MultiplierSpec::new(format!("indicator({j})"), 1, move |l| {
        c(if (l[0] - j).abs() <= 1e-9 * j.abs().max(1.0) {
            1.0
        } else {
            0.0
        })
    })
    .with_sup_norm(1.0)
}

/// `m(λ) = ∏_j m_j(λ_j)` for one-variable factors.
pub fn product(factors: Vec<MultiplierSpec>) -> MultiplierSpec {
    assert!(factors.iter().all(|f| f.arity() == 1));
    let arity = factors.len();
    let name = factors
        .iter()
        .map(|f| f.name().to_string())
        .collect::<Vec<_>>()
        .join("⊗");
    let regular = factors.iter().all(|f| f.is_regular_at_origin());
    let sup = factors
        .iter()
        .map(|f| f.sup_norm_hint())
        .try_fold(1.0, |acc, s| s.map(|s| acc * s));
    let shared = Arc::new(factors);
    let f_eval = shared.clone();
    let mut spec = MultiplierSpec::new(name, arity, move |l| {
        f_eval
            .iter()
            .zip(l)
            .map(|(f, &x)| f.evaluate(&[x]))
            .product()
    });
    if shared.iter().all(|f| f.has_sector()) {
        let f_sec = shared.clone();
        spec = spec.with_sector(move |z| {
            f_sec
                .iter()
                .zip(z)
                .map(|(f, &x)| f.evaluate_sector(&[x]).expect("checked above"))
                .product()
        });
    }
    if let Some(s) = sup {
        spec = spec.with_sup_norm(s);
    }
    if !regular {
        spec = spec.singular_at_origin();
    }
    spec
}

/// `m ∘ proj_axis`: a one-variable multiplier acting on coordinate `axis` of an
/// `arity`-variable spectrum.
pub fn lift(m: MultiplierSpec, axis: usize, arity: usize) -> MultiplierSpec {
    assert_eq!(m.arity(), 1);
    assert!(axis < arity);
    let name = format!("{}@{axis}", m.name());
    let sup = m.sup_norm_hint();
    let regular = m.is_regular_at_origin();
    let inner = Arc::new(m);
    let e = inner.clone();
    let mut spec = MultiplierSpec::new(name, arity, move |l| e.evaluate(&[l[axis]]));
    if inner.has_sector() {
        let s = inner.clone();
        spec = spec.with_sector(move |z| s.evaluate_sector(&[z[axis]]).expect("checked"));
    }
    if let Some(s) = sup {
        spec = spec.with_sup_norm(s);
    }
    if !regular {
        // the lifted function is singular where coordinate `axis` vanishes; the
        // ATL guard only excludes the all-zero vector, so values are still
        // checked for finiteness on application
        spec = spec.singular_at_origin();
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_difference_matches_analytic() {
        let m = imaginary_power(1.3);
        let numeric = MultiplierSpec::new("raw", 1, {
            let m = m.clone();
            move |l| m.evaluate(l)
        });
        for &l in &[0.01, 0.7, 3.0, 250.0] {
            let a = m.partial(&[1], &[l]).unwrap();
            let n = numeric.partial(&[1], &[l]).unwrap();
            assert!((a - n).norm() / a.norm() < 1e-7, "λ={l}");
            let a2 = m.partial(&[2], &[l]).unwrap();
            let n2 = numeric.partial(&[2], &[l]).unwrap();
            assert!((a2 - n2).norm() / a2.norm() < 1e-5, "λ={l}");
        }
    }

    #[test]
    fn mixed_partial_of_product() {
        // ∂1∂2 [λ1 λ2²] = 2 λ2
        let m = MultiplierSpec::new("p", 2, |l| c(l[0] * l[1] * l[1]));
        let v = m.partial(&[1, 1], &[0.4, 1.7]).unwrap();
        assert!((v.re - 3.4).abs() < 1e-6);
    }

    #[test]
    fn missing_sector_is_capability_error() {
        let m = MultiplierSpec::new("plain", 1, |_| c(1.0));
        assert!(matches!(
            m.evaluate_sector(&[Complex64::new(1.0, 0.0)]),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn nonfinite_partial_is_reported() {
        let m = MultiplierSpec::new("blowup", 1, |l| c(1.0 / (l[0] - 1.0)));
        assert!(matches!(
            m.partial(&[0], &[1.0]),
            Err(Error::Differentiation(_))
        ));
    }
}
