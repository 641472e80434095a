use num_complex::Complex64;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{param, Error, Result};
use crate::quadrature::{gauss_laguerre, gauss_legendre, Rule};
use crate::special::gamma;
use crate::spectral::MultiplierSpec;

/// Gauss–Legendre nodes for integrals over the `r`-support of `κ`.
pub const R_NODES: usize = 512;
/// Default support margin `ε` of compactly supported `κ`.
pub const DEFAULT_EPS: f64 = 0.05;
const LAGUERRE_NODES: usize = 64;
// lower end of the log-variable rule, `e^{−40} ≈ 4e−18`
const LOG_CUTOFF: f64 = -40.0;

pub(crate) fn legendre_512() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(R_NODES))
}

fn laguerre() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_laguerre(LAGUERRE_NODES))
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Zero,
    One,
    ImaginaryPower(f64),
    Indicator,
    General,
}

/// `κ` in the variable `r = e^{-t}`, supported in `[lo, hi] ⊆ [0, 1]`.
#[derive(Clone)]
pub struct KappaSpec {
    eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    lo: f64,
    hi: f64,
    sup_norm: f64,
    kind: Kind,
}

impl fmt::Debug for KappaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KappaSpec")
            .field("support", &(self.lo, self.hi))
            .field("sup_norm", &self.sup_norm)
            .field("kind", &self.kind)
            .finish()
    }
}

impl KappaSpec {
    /// General `κ` supported in `[ε, 1−ε]`; values outside are discarded.
    pub fn new<F>(eps: f64, sup_norm: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(param("eps", format!("must lie in (0, 1/2), got {eps}")));
        }
        if !(sup_norm >= 0.0 && sup_norm.is_finite()) {
            return Err(param("sup_norm", "must be finite and ≥ 0"));
        }
        Ok(Self { eval: Arc::new(f), lo: eps, hi: 1.0 - eps, sup_norm, kind: Kind::General })
    }

    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_| Complex64::new(0.0, 0.0)),
            lo: DEFAULT_EPS,
            hi: 1.0 - DEFAULT_EPS,
            sup_norm: 0.0,
            kind: Kind::Zero,
        }
    }

    /// `κ ≡ 1` on all of `(0, 1)`; `m_κ(λ, a) = λ/(λ+a)`.
    pub fn one() -> Self {
        Self {
            eval: Arc::new(|_| Complex64::new(1.0, 0.0)),
            lo: 0.0,
            hi: 1.0,
            sup_norm: 1.0,
            kind: Kind::One,
        }
    }

    /// `κ(t) = t^{iu}/Γ(1+iu)` with `t = −log r`; `m_κ(λ, a) = λ(λ+a)^{−1−iu}`.
    pub fn imaginary_power(u: f64) -> Self {
        let g = gamma(Complex64::new(1.0, u));
        let iu = Complex64::new(0.0, u);
        Self {
            eval: Arc::new(move |r| {
                let t = -r.ln();
                // t^{iu} has no limit at t = 0; a single point carries no mass
                if t > 0.0 {
                    Complex64::new(t, 0.0).powc(iu) / g
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            lo: 0.0,
            hi: 1.0,
            sup_norm: 1.0 / g.norm(),
            kind: Kind::ImaginaryPower(u),
        }
    }

    /// `χ_{[lo, hi]}(r)` with `0 < lo < hi < 1`.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(param("support", format!("need 0 < lo < hi < 1, got [{lo}, {hi}]")));
        }
        Ok(Self {
            eval: Arc::new(|_| Complex64::new(1.0, 0.0)),
            lo,
            hi,
            sup_norm: 1.0,
            kind: Kind::Indicator,
        })
    }

    /// `κ₁ + κ₂` on the hull of the supports.
    pub fn add(&self, other: &KappaSpec) -> KappaSpec {
        let (a, b) = (self.clone(), other.clone());
        KappaSpec {
            eval: Arc::new(move |r| a.evaluate(r) + b.evaluate(r)),
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            sup_norm: self.sup_norm + other.sup_norm,
            kind: Kind::General,
        }
    }

    pub fn evaluate(&self, r: f64) -> Complex64 {
        if r < self.lo || r > self.hi || self.kind == Kind::Zero {
            Complex64::new(0.0, 0.0)
        } else {
            (self.eval)(r)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Whether the support stays inside `(0, 1)`.
    pub fn is_compact(&self) -> bool {
        self.lo > 0.0 && self.hi < 1.0
    }

    pub fn is_zero(&self) -> bool {
        self.kind == Kind::Zero
    }

    /// Gauss–Legendre nodes and weights on the support (compact `κ` only).
    pub(crate) fn r_rule(&self) -> Result<Rule> {
        if !self.is_compact() {
            return Err(param("kappa", "kernel quadrature needs support inside (0, 1)"));
        }
        Ok(legendre_512().mapped(self.lo, self.hi))
    }
}

fn check_args(lambda: f64, a: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) || !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("need λ ≥ 0 and a ≥ 0, got λ={lambda}, a={a}")));
    }
    if lambda == 0.0 && a == 0.0 {
        return Err(Error::Indeterminate("m_κ(0, 0)"));
    }
    Ok(())
}

/// `m_κ(λ, a) = λ ∫₀^∞ e^{−λt} e^{−at} κ(t) dt`, with closed forms for the
/// built-in `κ` and [`m_kappa_numeric`] otherwise.
pub fn m_kappa(lambda: f64, a: f64, kappa: &KappaSpec) -> Result<Complex64> {
    check_args(lambda, a)?;
    if lambda == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let beta = lambda + a;
    Ok(match kappa.kind {
        Kind::Zero => Complex64::new(0.0, 0.0),
        Kind::One => Complex64::new(lambda / beta, 0.0),
        Kind::ImaginaryPower(u) => lambda * Complex64::new(beta, 0.0).powc(Complex64::new(-1.0, -u)),
        Kind::Indicator => {
            let (lo, hi) = kappa.support();
            Complex64::new(lambda / beta * (hi.powf(beta) - lo.powf(beta)), 0.0)
        }
        Kind::General => return m_kappa_numeric(lambda, a, kappa),
    })
}

/// Quadrature path of [`m_kappa`]: in `r`, `λ ∫ r^{λ+a−1} κ(r) dr` by
/// 512-node Gauss–Legendre on a compact support; for full support, in
/// `s = (λ+a) t`, Gauss–Legendre in `log s` on `[0, 1]` and Gauss–Laguerre
/// on `[1, ∞)`.
pub fn m_kappa_numeric(lambda: f64, a: f64, kappa: &KappaSpec) -> Result<Complex64> {
    check_args(lambda, a)?;
    if lambda == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let beta = lambda + a;
    if kappa.is_compact() {
        let rule = legendre_512().mapped(kappa.lo, kappa.hi);
        let s: Complex64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&r, &w)| w * r.powf(beta - 1.0) * kappa.evaluate(r))
            .sum();
        Ok(lambda * s)
    } else {
        // s = βt: ∫₀^∞ e^{−s} κ(e^{−s/β}) ds, split at s = 1; on [0, 1] in
        // v = log s, which resolves the behavior of t^{iu}-type κ near 0
        let f = |s: f64| kappa.evaluate((-s / beta).exp());
        let head: Complex64 = legendre_512()
            .mapped(LOG_CUTOFF, 0.0)
            .nodes
            .iter()
            .zip(&legendre_512().mapped(LOG_CUTOFF, 0.0).weights)
            .map(|(&v, &w)| {
                let s = v.exp();
                w * s * (-s).exp() * f(s)
            })
            .sum();
        let rule = laguerre();
        let tail: Complex64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * f(1.0 + x))
            .sum();
        Ok(lambda / beta * (head + (-1.0f64).exp() * tail))
    }
}

/// `m_κ` as a two-variable multiplier of `(𝓛, A)`; `(0, 0)` evaluates to NaN.
pub fn kappa_multiplier(kappa: &KappaSpec) -> MultiplierSpec {
    let k = kappa.clone();
    let sup = kappa.sup_norm();
    MultiplierSpec::new(format!("m_kappa[{:?}]", kappa.kind), 2, move |l| {
        m_kappa(l[0], l[1], &k).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })
    .with_sup_norm(sup)
    .singular_at_origin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riesz_value() {
        let v = m_kappa(1.0, 1.0, &KappaSpec::one()).unwrap();
        assert!((v - 0.5).norm() < 1e-15);
    }

    #[test]
    fn zero_zero_is_indeterminate() {
        assert!(matches!(m_kappa(0.0, 0.0, &KappaSpec::one()), Err(Error::Indeterminate(_))));
        assert_eq!(m_kappa(0.0, 2.0, &KappaSpec::one()).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn indicator_numeric_matches_closed_form() {
        let k = KappaSpec::indicator(0.1, 0.9).unwrap();
        let plain = KappaSpec::new(0.1, 1.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        for (l, a) in [(0.5, 0.3), (3.0, 7.0), (10.0, 0.01)] {
            let closed = m_kappa(l, a, &k).unwrap();
            let num = m_kappa_numeric(l, a, &plain).unwrap();
            assert!((closed - num).norm() < 1e-13, "{l} {a}");
        }
    }
}
