use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::LN_2;

use crate::error::{param, Result};
use crate::quadrature::{gauss_legendre, Rule};
use crate::spectral::multiplier::MultiplierSpec;

/// Gauss–Legendre nodes per axis on one octave `[R, 2R]` (in `log λ`).
const OCTAVE_NODES: usize = 16;

/// The set of box corners `R` over which the dyadic supremum is taken:
/// `R = 2^{l + u}` with `|l| ≤ K` and `u` ranging over `{0} ∪ offsets`.
///
/// The offsets are shared by every octave, so dilating by a power of two
/// permutes the boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicRange {
    k: i32,
    offsets: Vec<f64>,
}

impl DyadicRange {
    pub const DEFAULT_K: i32 = 20;
    pub const DEFAULT_REFINEMENTS: usize = 3;
    pub const DEFAULT_SEED: u64 = 0x6d61_7263;

    /// Pure dyadic corners `2^l`, `|l| ≤ k`.
    pub fn new(k: i32) -> Result<Self> {
        Self::with_offsets(k, Vec::new())
    }

    /// Dyadic corners plus `per_octave` seeded non-dyadic corners per octave.
    pub fn refined(k: i32, per_octave: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = (0..per_octave).map(|_| rng.random_range(0.01..0.99)).collect();
        Self::with_offsets(k, offsets)
    }

    pub fn with_offsets(k: i32, offsets: Vec<f64>) -> Result<Self> {
        if k < 1 {
            return Err(param("K", format!("must be at least 1, got {k}")));
        }
        if offsets.iter().any(|u| !(0.0..1.0).contains(u)) {
            return Err(param("offsets", "fractional offsets must lie in [0, 1)"));
        }
        Ok(Self { k, offsets })
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// All corners, grouped by offset then ascending level.
    pub fn radii(&self) -> Vec<f64> {
        self.corners().map(|(l, base)| pow2(l) * base).collect()
    }

    fn corners(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        std::iter::once(0.0)
            .chain(self.offsets.iter().copied())
            .flat_map(move |u| (-self.k..=self.k).map(move |l| (l, u.exp2())))
    }
}

impl Default for DyadicRange {
    fn default() -> Self {
        Self::refined(Self::DEFAULT_K, Self::DEFAULT_REFINEMENTS, Self::DEFAULT_SEED)
            .expect("default range is valid")
    }
}

/// Order `ρ` of the Marcinkiewicz condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarcOrder(pub Vec<usize>);

impl MarcOrder {
    /// All `γ ≤ ρ` componentwise.
    pub fn below(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &r in &self.0 {
            out = out
                .into_iter()
                .flat_map(|g| {
                    (0..=r).map(move |v| {
                        let mut g = g.clone();
                        g.push(v);
                        g
                    })
                })
                .collect();
        }
        out
    }
}

fn pow2(l: i32) -> f64 {
    2f64.powi(l)
}

fn octave_rule() -> Rule {
    // x ∈ [0, 1], λ = R·2^x, dλ/λ = log 2 · dx
    let r = gauss_legendre(OCTAVE_NODES).mapped(0.0, 1.0);
    Rule {
        nodes: r.nodes.iter().map(|x| x.exp2()).collect(),
        weights: r.weights.iter().map(|w| w * LN_2).collect(),
    }
}

/// `∫_{R<λ<2R} |λ^γ ∂^γ m(λ)|² dλ/λ` over one box with corner `corner`.
pub fn box_integral(m: &MultiplierSpec, gamma: &[usize], corner: &[f64]) -> Result<f64> {
    let rule = octave_rule();
    box_integral_with(m, gamma, corner, &rule)
}

fn box_integral_with(m: &MultiplierSpec, gamma: &[usize], corner: &[f64], rule: &Rule) -> Result<f64> {
    let d = corner.len();
    let n = rule.len();
    let mut idx = vec![0usize; d];
    let mut lambda = vec![0.0; d];
    let mut acc = 0.0;
    loop {
        let mut w = 1.0;
        let mut scale = 1.0;
        for j in 0..d {
            lambda[j] = corner[j] * rule.nodes[idx[j]];
            w *= rule.weights[idx[j]];
            scale *= lambda[j].powi(gamma[j] as i32);
        }
        let v = m.partial(gamma, &lambda)?;
        acc += w * (scale * v).norm_sqr();
        let mut j = 0;
        loop {
            if j == d {
                return Ok(acc);
            }
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `sup_R ∫_{R<λ<2R} |λ^γ ∂^γ m|² dλ/λ` over the boxes of `range`.
pub fn marcinkiewicz_seminorm(m: &MultiplierSpec, gamma: &[usize], range: &DyadicRange) -> Result<f64> {
    let d = m.arity();
    if gamma.len() != d {
        return Err(param("gamma", format!("expected length {d}, got {}", gamma.len())));
    }
    let rule = octave_rule();
    let radii = range.radii();
    let nr = radii.len();
    let total = nr.pow(d as u32);
    (0..total)
        .into_par_iter()
        .map(|mut b| {
            let mut corner = vec![0.0; d];
            for c in corner.iter_mut() {
                *c = radii[b % nr];
                b /= nr;
            }
            box_integral_with(m, gamma, &corner, &rule)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `‖m‖_{Mar,ρ} = sup_{γ ≤ ρ}` of the seminorms.
pub fn mar_norm(m: &MultiplierSpec, rho: &MarcOrder, range: &DyadicRange) -> Result<f64> {
    if rho.0.len() != m.arity() {
        return Err(param("rho", format!("expected length {}, got {}", m.arity(), rho.0.len())));
    }
    let mut best: f64 = 0.0;
    for gamma in rho.below() {
        best = best.max(marcinkiewicz_seminorm(m, &gamma, range)?);
    }
    Ok(best)
}
