use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::heat::HeatKernelModel;
use super::kappa::KappaSpec;
use super::kernel::{kernel_ktilde, EtaMetric, ProductPoint};
use crate::error::Result;

/// Empirical supremum of a Calderón–Zygmund estimate over a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CzReport {
    pub sup: f64,
    /// Index into the sample where the sup is attained.
    pub argmax: Option<usize>,
    pub evaluated: usize,
    /// Samples dropped because they violate the precondition.
    pub filtered: usize,
}

fn reduce(values: Vec<Option<f64>>) -> CzReport {
    let mut rep = CzReport { sup: 0.0, argmax: None, evaluated: 0, filtered: 0 };
    for (i, v) in values.into_iter().enumerate() {
        match v {
            None => rep.filtered += 1,
            Some(v) => {
                rep.evaluated += 1;
                if rep.argmax.is_none() || v > rep.sup {
                    rep.sup = v;
                    rep.argmax = Some(i);
                }
            }
        }
    }
    rep
}

/// `sup |K̃(x, y)| · (Λ⊗μ)(B(x, η(x, y))) / ‖κ‖_∞` over pairs with `x ≠ y`.
pub fn cz_growth_check<M: HeatKernelModel>(
    pairs: &[(ProductPoint, ProductPoint)],
    kappa: &KappaSpec,
    model: &M,
) -> Result<CzReport> {
    let eta = EtaMetric::new(model);
    let norm = kappa.sup_norm();
    let values = pairs
        .par_iter()
        .map(|(x, y)| {
            let r = eta.distance(x, y);
            if r == 0.0 {
                return Ok(None);
            }
            if kappa.is_zero() || norm == 0.0 {
                return Ok(Some(0.0));
            }
            let k = kernel_ktilde(x, y, kappa, model)?;
            Ok(Some(k.norm() * eta.ball_volume(x, r) / norm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(values))
}

/// `sup |K̃(x, y) − K̃(x, y′)| · (η(x,y)/η(y,y′))^δ · (Λ⊗μ)(B(x, η(x,y))) / ‖κ‖_∞`
/// over triples with `2η(y, y′) ≤ η(x, y)`; `y = y′` contributes 0.
pub fn cz_smooth_check<M: HeatKernelModel>(
    triples: &[(ProductPoint, ProductPoint, ProductPoint)],
    kappa: &KappaSpec,
    model: &M,
) -> Result<CzReport> {
    let eta = EtaMetric::new(model);
    let norm = kappa.sup_norm();
    let delta = model.lipschitz_delta();
    let values = triples
        .par_iter()
        .map(|(x, y, yp)| {
            let rxy = eta.distance(x, y);
            let ryy = eta.distance(y, yp);
            if rxy == 0.0 || 2.0 * ryy > rxy {
                return Ok(None);
            }
            if ryy == 0.0 || kappa.is_zero() || norm == 0.0 {
                return Ok(Some(0.0));
            }
            let diff = kernel_ktilde(x, y, kappa, model)? - kernel_ktilde(x, yp, kappa, model)?;
            Ok(Some(diff.norm() * (rxy / ryy).powf(delta) * eta.ball_volume(x, rxy) / norm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(values))
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, m: usize, half_width: f64) -> ProductPoint {
    let mut coord = |n: usize| (0..n).map(|_| rng.random_range(-half_width..half_width)).collect::<Vec<_>>();
    let x1 = coord(d);
    let x2 = coord(m);
    ProductPoint::new(x1, x2)
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if s > 1e-3 && s <= 1.0 {
            return v.into_iter().map(|a| a / s).collect();
        }
    }
}

// Moves each factor of `p` by a Euclidean length at most `radius`.
fn perturb(rng: &mut ChaCha8Rng, p: &ProductPoint, radius: f64) -> ProductPoint {
    let mut shift = |x: &[f64]| {
        let dir = random_direction(rng, x.len());
        let len = radius * rng.random_range(0.0..1.0f64);
        x.iter().zip(dir).map(|(a, u)| a + len * u).collect::<Vec<_>>()
    };
    let x1 = shift(&p.x1);
    let x2 = shift(&p.x2);
    ProductPoint::new(x1, x2)
}

/// Seeded pairs `(x, y)` on `ℝ^d × ℝ^m`: `x` uniform in `[−2, 2]^{d+m}`, `y` a
/// perturbation of `x` at a log-uniform scale in `[10^{−1.5}, 10^{0.5}]`.
pub fn sample_pairs(d: usize, m: usize, n: usize, seed: u64) -> Vec<(ProductPoint, ProductPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = random_point(&mut rng, d, m, 2.0);
            let scale = 10f64.powf(rng.random_range(-1.5..0.5));
            let y = perturb(&mut rng, &x, scale);
            (x, y)
        })
        .collect()
}

/// Seeded triples `(x, y, y′)` extending [`sample_pairs`], with `y′` within
/// `η(x, y)/2` of `y`, measured as the larger of the two factor distances.
pub fn sample_triples<M: HeatKernelModel>(
    d: usize,
    model: &M,
    n: usize,
    seed: u64,
) -> Vec<(ProductPoint, ProductPoint, ProductPoint)> {
    let eta = EtaMetric::new(model);
    let pairs = sample_pairs(d, model.dim(), n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7472_6970);
    pairs
        .into_iter()
        .map(|(x, y)| {
            let r = eta.distance(&x, &y);
            let yp = perturb(&mut rng, &y, 0.5 * r);
            (x, y, yp)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::EuclideanModel;

    #[test]
    fn zero_kappa_gives_zero() {
        let model = EuclideanModel::new(1).unwrap();
        let pairs = sample_pairs(1, 1, 10, 3);
        let g = cz_growth_check(&pairs, &KappaSpec::zero(), &model).unwrap();
        assert_eq!(g.sup, 0.0);
        let triples = sample_triples(1, &model, 10, 3);
        let s = cz_smooth_check(&triples, &KappaSpec::zero(), &model).unwrap();
        assert_eq!(s.sup, 0.0);
        assert_eq!(s.filtered, 0);
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(sample_pairs(2, 1, 5, 11), sample_pairs(2, 1, 5, 11));
    }
}
