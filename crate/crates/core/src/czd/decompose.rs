use rayon::prelude::*;
use std::collections::BTreeMap;

use super::dyadic::{dyadic_maximal, real_values, DyadicSystem};
use crate::error::{param, Error, Result};
use crate::spectral::GridFunction;

/// One bad part `b_j`, supported on `S_j = F_j × Q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BadPart {
    pub level: usize,
    /// Position of `Q_j` in `sys.cubes(level)`.
    pub cube: usize,
    /// The fiber set `F_j`, as X-grid indices.
    pub fibers: Vec<usize>,
    /// Product-grid indices of `S_j`.
    pub support: Vec<usize>,
    /// `b_j` on `support`.
    pub values: Vec<f64>,
}

/// `f = g + Σ_j b_j` at threshold `s`.
#[derive(Debug, Clone)]
pub struct CzResult {
    pub good: GridFunction,
    pub bads: Vec<BadPart>,
    pub threshold: f64,
}

// stopping cubes of one fiber: (level, cube, average)
fn select(row: &[f64], s: f64, sys: &DyadicSystem, fiber: usize) -> Result<Vec<(usize, usize, f64)>> {
    let w = sys.y_grid().weights();
    let mut covered = vec![false; row.len()];
    let mut chosen = Vec::new();
    for l in 0..=sys.l_max() {
        for (c, cube) in sys.cubes(l)?.iter().enumerate() {
            let mem = sys.members(l, c)?;
            if covered[mem[0]] {
                continue;
            }
            let avg = mem.iter().map(|&j| row[j] * w[j]).sum::<f64>() / cube.measure;
            if avg > s {
                if l == 0 {
                    return Err(Error::Domain(format!(
                        "fiber {fiber}: average {avg} over the whole space exceeds s = {s}"
                    )));
                }
                mem.iter().for_each(|&j| covered[j] = true);
                chosen.push((l, c, avg));
            }
        }
    }
    Ok(chosen)
}

/// Fibered Calderón–Zygmund decomposition of a non-negative `f` at height `s`.
///
/// On each fiber the maximal dyadic cubes with `E_l f > s` are selected by
/// stopping time; `g` is `f` off them and the cube average on them, and
/// `b_j = (f − average) χ_{S_j}`, with bad parts merged across fibers by cube.
/// The whole-space average must not exceed `s` on any fiber.
pub fn cz_decompose(f: &GridFunction, s: f64, sys: &DyadicSystem) -> Result<CzResult> {
    sys.check(f)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(param("s", format!("threshold must be positive, got {s}")));
    }
    if let Some(v) = f.values().iter().find(|v| !(v.im == 0.0 && v.re >= 0.0 && v.re.is_finite())) {
        return Err(Error::Domain(format!("f must be finite and non-negative, found {v}")));
    }
    let vals = real_values(f);
    let n2 = sys.y_grid().len();
    let chosen = (0..sys.fibers())
        .into_par_iter()
        .map(|i| select(&vals[i * n2..(i + 1) * n2], s, sys, i))
        .collect::<Result<Vec<_>>>()?;

    let mut good = vals.clone();
    let mut parts: BTreeMap<(usize, usize), BadPart> = BTreeMap::new();
    for (i, picks) in chosen.into_iter().enumerate() {
        for (l, c, avg) in picks {
            let part = parts.entry((l, c)).or_insert_with(|| BadPart {
                level: l,
                cube: c,
                fibers: Vec::new(),
                support: Vec::new(),
                values: Vec::new(),
            });
            part.fibers.push(i);
            for &j in sys.members(l, c)? {
                let k = i * n2 + j;
                part.support.push(k);
                part.values.push(vals[k] - avg);
                good[k] = avg;
            }
        }
    }
    Ok(CzResult {
        good: GridFunction::from_real(sys.grid().clone(), good)?,
        bads: parts.into_values().collect(),
        threshold: s,
    })
}

/// Measured form of the decomposition's properties (i)–(v) and exactness.
#[derive(Debug, Clone, PartialEq)]
pub struct CzProperties {
    /// `‖g‖₁ + Σ‖b_j‖₁` and `4‖f‖₁`.
    pub l1_total: f64,
    pub l1_bound: f64,
    /// `sup|g|` and `C_μ s`.
    pub good_sup: f64,
    pub good_bound: f64,
    /// `max_{x1} (Σ_j μ(S_j(x1)) − s^{−1}∫ f(x1,·) dμ)`; at most 0 when (iii) holds.
    pub measure_excess: f64,
    /// Largest `|∫ b_j(x1,·) dμ|` relative to `‖f‖_∞ μ(Q_j)`.
    pub max_bad_mean: f64,
    /// Smallest and largest selected cube average, against `[s/C_μ, C_μ s]`.
    pub average_range: (f64, f64),
    pub doubling: f64,
    pub threshold: f64,
    /// `⋃ S_j = {𝒟f > s}` as grid sets.
    pub exceptional_set_matches: bool,
    /// `max |f − g − Σ b_j|`.
    pub residual: f64,
}

impl CzProperties {
    pub fn l1_ok(&self) -> bool {
        self.l1_total <= self.l1_bound * (1.0 + 1e-12)
    }

    pub fn good_ok(&self) -> bool {
        self.good_sup <= self.good_bound * (1.0 + 1e-12)
    }

    pub fn measure_ok(&self) -> bool {
        self.measure_excess <= 1e-12 * self.l1_bound.max(1.0)
    }

    pub fn mean_zero_ok(&self) -> bool {
        self.max_bad_mean < 1e-12
    }

    pub fn average_ok(&self) -> bool {
        let (lo, hi) = self.average_range;
        if lo > hi {
            // no bad cubes
            return true;
        }
        lo >= self.threshold / self.doubling * (1.0 - 1e-12) && hi <= self.doubling * self.threshold * (1.0 + 1e-12)
    }

    /// All properties hold and the decomposition is exact to `tol`.
    pub fn all_hold(&self, tol: f64) -> bool {
        self.l1_ok()
            && self.good_ok()
            && self.measure_ok()
            && self.mean_zero_ok()
            && self.average_ok()
            && self.exceptional_set_matches
            && self.residual <= tol
    }
}

impl CzResult {
    /// `b_j` as a function on the whole grid.
    pub fn bad_function(&self, j: usize, sys: &DyadicSystem) -> Result<GridFunction> {
        let part = self.bads.get(j).ok_or_else(|| param("j", format!("only {} bad parts", self.bads.len())))?;
        let mut v = vec![0.0; sys.grid().len()];
        for (&k, &b) in part.support.iter().zip(&part.values) {
            v[k] = b;
        }
        GridFunction::from_real(sys.grid().clone(), v)
    }

    /// Product-grid indices of `⋃ S_j`.
    pub fn exceptional_set(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.bads.iter().flat_map(|b| b.support.iter().copied()).collect();
        all.sort_unstable();
        all
    }

    pub fn properties(&self, f: &GridFunction, sys: &DyadicSystem) -> Result<CzProperties> {
        sys.check(f)?;
        let s = self.threshold;
        let vals = real_values(f);
        let w = sys.grid().weights();
        let yw = sys.y_grid().weights();
        let n2 = sys.y_grid().len();
        let l1 = |v: &[f64]| v.iter().zip(w).map(|(a, b)| a.abs() * b).sum::<f64>();
        let good = real_values(&self.good);
        let mut l1_total = l1(&good);
        let mut recon = good.clone();
        let mut max_bad_mean: f64 = 0.0;
        let mut fiber_measure = vec![0.0; sys.fibers()];
        let f_sup = vals.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let mut average_range = (f64::INFINITY, f64::NEG_INFINITY);
        for part in &self.bads {
            let cube = &sys.cubes(part.level)?[part.cube];
            let mut per_fiber: BTreeMap<usize, f64> = BTreeMap::new();
            for (&k, &b) in part.support.iter().zip(&part.values) {
                l1_total += b.abs() * w[k];
                recon[k] += b;
                *per_fiber.entry(k / n2).or_default() += b * yw[k % n2];
            }
            for (&i, &mean) in &per_fiber {
                fiber_measure[i] += cube.measure;
                max_bad_mean = max_bad_mean.max(mean.abs() / (f_sup.max(f64::MIN_POSITIVE) * cube.measure));
            }
            let avg = good[part.support[0]];
            average_range = (average_range.0.min(avg), average_range.1.max(avg));
        }
        let mut measure_excess = f64::NEG_INFINITY;
        for (i, m) in fiber_measure.iter().enumerate() {
            let mass: f64 = (0..n2).map(|j| vals[i * n2 + j] * yw[j]).sum();
            measure_excess = measure_excess.max(m - mass / s);
        }
        let maximal = real_values(&dyadic_maximal(f, sys)?);
        let above: Vec<usize> = (0..maximal.len()).filter(|&k| maximal[k] > s).collect();
        let residual = vals.iter().zip(&recon).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let doubling = sys.doubling_constant();
        Ok(CzProperties {
            l1_total,
            l1_bound: 4.0 * l1(&vals),
            good_sup: good.iter().fold(0.0, |a, b| a.max(b.abs())),
            good_bound: doubling * s,
            measure_excess,
            max_bad_mean,
            average_range,
            doubling,
            threshold: s,
            exceptional_set_matches: above == self.exceptional_set(),
            residual,
        })
    }
}
