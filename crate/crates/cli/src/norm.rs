//! Empirical `L^p → L^p` norms of spectral multiplier operators.

use jsm_core::ou::ou_system;
use jsm_core::product::{torus_default_points, torus_system};
use jsm_core::spectral::{
    apply_multiplier, reconstruct, tensor, CoefficientVector, MultiplierSpec, SpectralSystem,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{usage, CliError, CliResult};

/// Resamples allowed per trial before a degenerate input is reported as a
/// numerical failure.
const MAX_RESAMPLES: usize = 100;

/// `m(L)` on a truncated spectral system.
#[derive(Debug)]
pub struct SpectralOperator {
    system: SpectralSystem,
    multiplier: MultiplierSpec,
}

impl SpectralOperator {
    pub fn new(system: SpectralSystem, multiplier: MultiplierSpec) -> CliResult<Self> {
        if system.dimension() != multiplier.arity() {
            return Err(usage(format!(
                "field `multiplier`: arity {} does not match system dimension {}",
                multiplier.arity(),
                system.dimension()
            )));
        }
        Ok(Self { system, multiplier })
    }

    /// `multiplier` on [`standard_system`].
    pub fn on_standard_system(multiplier: MultiplierSpec, k_max: usize, j_max: usize) -> CliResult<Self> {
        let sys = standard_system(multiplier.arity(), k_max, j_max, torus_default_points(j_max))?;
        Self::new(sys, multiplier)
    }

    pub fn system(&self) -> &SpectralSystem {
        &self.system
    }

    pub fn multiplier(&self) -> &MultiplierSpec {
        &self.multiplier
    }

    /// `max_k |m(λ(k))|` over the truncated spectrum.
    pub fn spectral_sup(&self) -> f64 {
        (0..self.system.len())
            .map(|i| self.multiplier.evaluate(self.system.eigenvalues_at(i)).norm())
            .fold(0.0, f64::max)
    }
}

/// One axis: the OU system without its constant mode. Two axes: OU ⊗ torus,
/// the torus without its constant mode.
pub fn standard_system(arity: usize, k_max: usize, j_max: usize, points: usize) -> CliResult<SpectralSystem> {
    Ok(match arity {
        1 => ou_system(1, k_max)?.restrict(|_, l| l[0] > 0.0)?,
        2 => tensor(&ou_system(1, k_max)?, &torus_system(j_max, false, points)?)?,
        a => return Err(usage(format!("field `multiplier`: arity {a} unsupported (1 or 2)"))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub p: f64,
    /// `max` of the trial ratios.
    pub estimate: f64,
    pub trials: usize,
    /// Trial attaining the maximum (first on ties).
    pub argmax: usize,
    /// `‖Tf‖_p / ‖f‖_p` per trial.
    pub ratios: Vec<f64>,
}

impl NormEstimate {
    /// Running maximum over the first `i + 1` trials.
    pub fn running_max(&self) -> Vec<f64> {
        self.ratios
            .iter()
            .scan(0.0f64, |m, &r| {
                *m = m.max(r);
                Some(*m)
            })
            .collect()
    }
}

fn random_coefficients(sys: &SpectralSystem, rng: &mut ChaCha8Rng) -> CoefficientVector {
    sys.indices()
        .iter()
        .map(|k| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            (k.clone(), Complex64::new(re, im))
        })
        .collect()
}

/// `max ‖Tf‖_p / ‖f‖_p` over `trials` random band-limited inputs.
///
/// Coefficients are drawn sequentially from one seeded stream, so a run with
/// more trials extends a run with fewer; inputs whose grid `L^p` norm is zero
/// or non-finite are redrawn.
pub fn estimate_pnorm(op: &SpectralOperator, p: f64, trials: usize, seed: u64) -> CliResult<NormEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(usage(format!("field `p`: need 1 < p < ∞, got {p}")));
    }
    if trials == 0 {
        return Err(usage("field `trials`: need at least one trial"));
    }
    let sys = &op.system;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut attempt = 0;
        loop {
            let c = random_coefficients(sys, &mut rng);
            let norm = reconstruct(&c, sys)?.lp_norm(p);
            if norm.is_finite() && norm > 0.0 {
                inputs.push((c, norm));
                break;
            }
            attempt += 1;
            if attempt == MAX_RESAMPLES {
                return Err(CliError::Numerical(jsm_core::Error::Domain(format!(
                    "trial {t}: {MAX_RESAMPLES} degenerate inputs in a row"
                ))));
            }
        }
    }
    let ratios = inputs
        .par_iter()
        .map(|(c, norm)| -> CliResult<f64> {
            let tf = reconstruct(&apply_multiplier(&op.multiplier, sys, c)?, sys)?;
            Ok(tf.lp_norm(p) / norm)
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let (argmax, estimate) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(NormEstimate { p, estimate, trials, argmax, ratios })
}
