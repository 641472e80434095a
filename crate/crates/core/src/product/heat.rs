use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{param, Result};
use crate::spectral::{Grid, MultiIndex, SpectralSystem};

/// The operator `A` on `(Y, ζ, μ)` through its heat kernel.
pub trait HeatKernelModel: Send + Sync {
    fn name(&self) -> String;
    /// Number of coordinates of a point of `Y`.
    fn dim(&self) -> usize;
    /// `e^{−tA}(x2, y2)`.
    fn kernel(&self, t: f64, x2: &[f64], y2: &[f64]) -> f64;
    /// The metric `ζ`.
    fn distance(&self, x2: &[f64], y2: &[f64]) -> f64;
    /// `μ(B(x2, R))`.
    fn ball_volume(&self, x2: &[f64], radius: f64) -> f64;
    fn lipschitz_delta(&self) -> f64;
    /// `(C, c)` in `e^{−tA}(x2,y2) ≤ C/μ(B(x2,√t)) · exp(−c ζ²/t)`.
    fn gauss_constants(&self) -> (f64, f64);
    /// `C_μ` with `μ(B(x, 2R)) ≤ C_μ μ(B(x, R))`.
    fn doubling_constant(&self) -> f64;

    /// `r^A(x2, y2) = e^{(log r) A}(x2, y2)`.
    fn r_power(&self, r: f64, x2: &[f64], y2: &[f64]) -> f64 {
        self.kernel(-r.ln(), x2, y2)
    }
}

/// Volume of the unit ball in `ℝ^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    PI.powf(0.5 * m as f64) / crate::special::gamma_real(0.5 * m as f64 + 1.0)
}

/// `Y = ℝ^m` with Lebesgue measure and `A = −Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanModel {
    m: usize,
}

impl EuclideanModel {
    pub fn new(m: usize) -> Result<Self> {
        if !(1..=3).contains(&m) {
            return Err(param("m", format!("supported dimensions are 1..=3, got {m}")));
        }
        Ok(Self { m })
    }
}

impl HeatKernelModel for EuclideanModel {
    fn name(&self) -> String {
        format!("euclidean({})", self.m)
    }

    fn dim(&self) -> usize {
        self.m
    }

    fn kernel(&self, t: f64, x2: &[f64], y2: &[f64]) -> f64 {
        let z2: f64 = x2.iter().zip(y2).map(|(a, b)| (a - b).powi(2)).sum();
        (4.0 * PI * t).powf(-0.5 * self.m as f64) * (-z2 / (4.0 * t)).exp()
    }

    fn distance(&self, x2: &[f64], y2: &[f64]) -> f64 {
        x2.iter().zip(y2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    fn ball_volume(&self, _x2: &[f64], radius: f64) -> f64 {
        unit_ball_volume(self.m) * radius.powi(self.m as i32)
    }

    fn lipschitz_delta(&self) -> f64 {
        1.0
    }

    fn gauss_constants(&self) -> (f64, f64) {
        (unit_ball_volume(self.m) * (4.0 * PI).powf(-0.5 * self.m as f64), 0.25)
    }

    fn doubling_constant(&self) -> f64 {
        2f64.powi(self.m as i32)
    }
}

/// The circle `ℝ/ℤ` of circumference 1 with `A = −d²/dx²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TorusModel;

/// Smallest representative of `x − y` modulo 1, in `[−1/2, 1/2]`.
pub fn wrap(z: f64) -> f64 {
    z - z.round()
}

impl HeatKernelModel for TorusModel {
    fn name(&self) -> String {
        "torus".into()
    }

    fn dim(&self) -> usize {
        1
    }

    /// Wrapped Gaussian `Σ_n (4πt)^{-1/2} exp(−(z+n)²/4t)`, truncated once terms
    /// drop below `1e−16` of the leading one.
    fn kernel(&self, t: f64, x2: &[f64], y2: &[f64]) -> f64 {
        let z = wrap(x2[0] - y2[0]);
        let pref = (4.0 * PI * t).powf(-0.5);
        let mut sum = (-z * z / (4.0 * t)).exp();
        let lead = sum.max(f64::MIN_POSITIVE);
        for n in 1.. {
            let a = (-(z + n as f64).powi(2) / (4.0 * t)).exp();
            let b = (-(z - n as f64).powi(2) / (4.0 * t)).exp();
            sum += a + b;
            if a + b < 1e-16 * lead.max(sum) {
                break;
            }
        }
        pref * sum
    }

    fn distance(&self, x2: &[f64], y2: &[f64]) -> f64 {
        wrap(x2[0] - y2[0]).abs()
    }

    fn ball_volume(&self, _x2: &[f64], radius: f64) -> f64 {
        (2.0 * radius).min(1.0)
    }

    fn lipschitz_delta(&self) -> f64 {
        1.0
    }

    fn gauss_constants(&self) -> (f64, f64) {
        (2.0, 0.125)
    }

    fn doubling_constant(&self) -> f64 {
        2.0
    }
}

/// Largest ratio of the kernel to its declared Gaussian bound over the
/// sample `(t, x2, y2)`; at most 1 for a conforming model.
pub fn gaussian_bound_ratio<M: HeatKernelModel + ?Sized>(model: &M, samples: &[(f64, Vec<f64>, Vec<f64>)]) -> f64 {
    let (c_big, c_small) = model.gauss_constants();
    samples
        .iter()
        .map(|(t, x, y)| {
            let zeta = model.distance(x, y);
            let bound = c_big / model.ball_volume(x, t.sqrt()) * (-c_small * zeta * zeta / t).exp();
            model.kernel(*t, x, y) / bound
        })
        .fold(0.0, f64::max)
}

/// Trigonometric eigenbasis of the torus: index `0 ↦ 1`, `2j−1 ↦ √2 cos 2πjx`,
/// `2j ↦ √2 sin 2πjx`, eigenvalue `(2πj)²`, on a uniform grid of `points` nodes.
/// Without the constant mode the system is ATL.
pub fn torus_system(j_max: usize, include_constant: bool, points: usize) -> Result<SpectralSystem> {
    if points <= 2 * j_max {
        return Err(param("points", format!("need more than {} nodes for frequency {j_max}", 2 * j_max)));
    }
    let coords: Vec<f64> = (0..points).map(|i| i as f64 / points as f64).collect();
    let grid = Arc::new(Grid::new(1, coords, vec![1.0 / points as f64; points])?);
    let first = if include_constant { 0 } else { 1 };
    let indices: Vec<MultiIndex> = (first..=2 * j_max).map(|k| MultiIndex(vec![k])).collect();
    SpectralSystem::new(
        "torus",
        1,
        indices,
        |k: &MultiIndex| {
            let j = k.0[0].div_ceil(2) as f64;
            vec![(2.0 * PI * j).powi(2)]
        },
        Arc::new(|k: &MultiIndex, x: &[f64]| torus_basis(k.0[0], x[0])),
        grid,
    )
}

/// Default node count for [`torus_system`].
pub fn torus_default_points(j_max: usize) -> usize {
    (4 * j_max + 4).max(16)
}

fn torus_basis(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let j = k.div_ceil(2) as f64;
    let arg = 2.0 * PI * j * x;
    if k % 2 == 1 {
        2f64.sqrt() * arg.cos()
    } else {
        2f64.sqrt() * arg.sin()
    }
}
