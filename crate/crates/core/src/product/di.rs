use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kernel::in_local_region;
use crate::error::{param, Error, Result};
use crate::ou::{mehler_dr, w_dr, MehlerParams};
use crate::quadrature::adaptive;

const ABS_TOL: f64 = 1e-13;
const REL_TOL: f64 = 1e-10;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

fn check(x1: &[f64], y1: &[f64]) -> Result<()> {
    if x1.is_empty() || x1.len() != y1.len() {
        return Err(param("x1", format!("dimensions {} and {} differ or are zero", x1.len(), y1.len())));
    }
    if x1 == y1 {
        return Err(Error::Domain("x1 = y1: the difference bound is singular on the diagonal".into()));
    }
    if !in_local_region(x1, y1, 2.0)? {
        return Err(Error::Domain(format!("({x1:?}, {y1:?}) is outside N_2")));
    }
    Ok(())
}

/// `D_I(x1, y1) = ∫₀¹ |∂_r M_r(x1, y1) − ∂_r W_r(x1 − y1)| dr` for `(x1, y1) ∈ N₂`,
/// `x1 ≠ y1`. Adaptive Gauss–Kronrod on `[0, ½]`, `[½, r(x1)]`, `[r(x1), 1]`
/// with `r(x1) = max(½, 1 − |x1|²)`.
pub fn di_integral(x1: &[f64], y1: &[f64]) -> Result<f64> {
    check(x1, y1)?;
    let d = x1.len();
    let f = |r: f64| {
        if !(r > 0.0 && r < 1.0) {
            return 0.0;
        }
        let p = MehlerParams::new(r, d).expect("r in (0,1)");
        let m = mehler_dr(&p, x1, y1).expect("dims");
        let w = w_dr(&p, x1, y1).expect("dims");
        (m - w).abs()
    };
    let rx = 0.5f64.max(1.0 - norm(x1).powi(2));
    let mut total = adaptive(f, 0.0, 0.5, ABS_TOL, REL_TOL);
    if rx > 0.5 {
        total += adaptive(f, 0.5, rx, ABS_TOL, REL_TOL);
    }
    total += adaptive(f, rx, 1.0, ABS_TOL, REL_TOL);
    Ok(total)
}

/// `D_I` divided by its bound: `(1+|x1|)/|x1−y1|^{d−1}` for `d > 1`, and
/// `(1+|x1|)·log(C₀/(|x1||x1−y1|))` for `d = 1`, which needs `c0`.
pub fn di_bound_ratio(x1: &[f64], y1: &[f64], c0: Option<f64>) -> Result<f64> {
    let di = di_integral(x1, y1)?;
    let d = x1.len();
    let nx = norm(x1);
    let r = dist(x1, y1);
    let bound = if d > 1 {
        (1.0 + nx) / r.powi(d as i32 - 1)
    } else {
        let c0 = c0.ok_or_else(|| param("c0", "required for d = 1"))?;
        if nx == 0.0 {
            return Ok(0.0);
        }
        let b = (1.0 + nx) * (c0 / (nx * r)).ln();
        if !(b > 0.0) {
            return Err(Error::Domain(format!("log bound is not positive at x1={x1:?}, y1={y1:?}; C0={c0} is too small")));
        }
        b
    };
    Ok(di / bound)
}

/// Smallest `C₀` for which the `d = 1` bound holds with constant 1 at `(x1, y1)`.
pub fn di_c0(x1: &[f64], y1: &[f64]) -> Result<f64> {
    let di = di_integral(x1, y1)?;
    let nx = norm(x1);
    Ok(nx * dist(x1, y1) * (di / (1.0 + nx)).exp())
}

/// Seeded points of `N₂ \ {x1 = y1}` in `ℝ^d`: `x1` uniform in `[−2, 2]^d`,
/// `y1 = x1 + ρu` with `u` a random unit vector and `ρ` uniform in
/// `[0, 2/(3 + 2|x1|))`, so that `1 + |x1| + |y1| < 3 + 2|x1|`.
pub fn sample_local_pairs(d: usize, n: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = norm(&u);
        if !(s > 1e-3 && s <= 1.0) {
            continue;
        }
        let rho = rng.random_range(0.0..1.0) * 2.0 / (3.0 + 2.0 * norm(&x));
        if rho == 0.0 {
            continue;
        }
        let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + rho * b / s).collect();
        out.push((x, y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_checks() {
        assert!(matches!(di_integral(&[0.5, 0.0], &[0.5, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(di_integral(&[3.0], &[4.0]), Err(Error::Domain(_))));
        assert!(di_bound_ratio(&[0.5], &[0.6], None).is_err());
    }

    #[test]
    fn sampled_pairs_lie_in_n2() {
        for (x, y) in sample_local_pairs(2, 200, 5) {
            assert!(in_local_region(&x, &y, 2.0).unwrap());
            assert_ne!(x, y);
        }
    }

    #[test]
    fn c0_makes_ratio_one() {
        let (x, y) = ([0.4], [0.7]);
        let c0 = di_c0(&x, &y).unwrap();
        let ratio = di_bound_ratio(&x, &y, Some(c0)).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12, "{ratio}");
    }
}
