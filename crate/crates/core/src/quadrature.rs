//! Quadrature rules used throughout the crate.
//!
//! Gauss rules are computed by Newton iteration on the three-term recurrence,
//! which keeps relative accuracy in the tiny outer Hermite weights (the
//! Lebesgue-path conversion multiplies them by `exp(x²)`).

use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine map of a rule on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// zero diagonal and off-diagonal `off`.
fn sturm_count(off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for &b in off {
        let prev = if q == 0.0 { f64::EPSILON * b.max(1.0) } else { q };
        q = -x - b * b / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gauss–Hermite rule for the weight `exp(-x²)` on the real line, nodes ascending.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
    let off: Vec<f64> = (1..n).map(|k| (0.5 * k as f64).sqrt()).collect();
    let bound = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    // orthonormal recurrence; returns (p_n(z), sqrt(2n) p_{n-1}(z))
    let eval = |z: f64| {
        let mut p1 = pim4;
        let mut p2 = 0.0;
        for j in 1..=n {
            let p3 = p2;
            p2 = p1;
            let jf = j as f64;
            p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
        }
        (p1, (2.0 * nf).sqrt() * p2)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest eigenvalue by bisection
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if sturm_count(&off, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        let (mut p1, mut pp) = eval(z);
        for _ in 0..3 {
            let step = p1 / pp;
            if !step.is_finite() || step == 0.0 {
                break;
            }
            z -= step;
            (p1, pp) = eval(z);
        }
        nodes.push(z);
        weights.push(2.0 / (pp * pp));
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    // exact symmetry
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss–Laguerre rule for the weight `exp(-x)` on `(0, ∞)`.
pub fn gauss_laguerre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Laguerre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -1.0 / (pp * nf * p2);
    }
    Rule { nodes, weights }
}

/// Trapezoid rule with `n` equally spaced points on `[a, b]` (endpoints included).
pub fn trapezoid(a: f64, b: f64, n: usize) -> Rule {
    assert!(n >= 2, "trapezoid rule needs two points");
    let h = (b - a) / (n - 1) as f64;
    let nodes = (0..n).map(|i| a + h * i as f64).collect();
    let weights = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    Rule { nodes, weights }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

// (Kronrod estimate, error estimate, Kronrod estimate of ∫|f|)
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (fl, fr) = (f(c - dx), f(c + dx));
        kronrod += WGK[j] * (fl + fr);
        abs += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs())
}

/// Subinterval budget of [`adaptive`].
pub const ADAPTIVE_MAX_INTERVALS: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration on `[a, b]`.
///
/// Repeatedly bisects the subinterval with the largest error estimate until
/// the summed estimate is below `max(abs_tol, rel_tol·|I|)`, the estimate hits
/// the rounding level of `∫|f|`, or [`ADAPTIVE_MAX_INTERVALS`] is reached.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let (value, err, abs) = gk15(&f, a, b);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(Piece { a, b, value, err, abs });
    let (mut total, mut total_err, mut total_abs) = (value, err, abs);
    while heap.len() < ADAPTIVE_MAX_INTERVALS {
        let tol = abs_tol.max(rel_tol * total.abs());
        if total_err <= tol || total_err <= 50.0 * f64::EPSILON * total_abs {
            break;
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            heap.push(worst);
            break;
        }
        let (v1, e1, a1) = gk15(&f, worst.a, m);
        let (v2, e2, a2) = gk15(&f, m, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Piece { a: worst.a, b: m, value: v1, err: e1, abs: a1 });
        heap.push(Piece { a: m, b: worst.b, value: v2, err: e2, abs: a2 });
    }
    // resum to drop the drift of the running total
    heap.iter().map(|p| p.value).sum()
}
