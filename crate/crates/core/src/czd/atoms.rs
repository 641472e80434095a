use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::product::HeatKernelModel;
use crate::spectral::{Grid, GridFunction};

/// A function on the grid of `Y` meant to be an `H¹` atom for the ball
/// `B(center, radius)`.
#[derive(Debug, Clone)]
pub struct Atom {
    pub center: Vec<f64>,
    pub radius: f64,
    pub values: GridFunction,
}

/// `μ(B)` for the open ball `ζ(y, center) < radius`, summed over the grid.
pub fn grid_ball_measure<M: HeatKernelModel + ?Sized>(grid: &Grid, center: &[f64], radius: f64, model: &M) -> f64 {
    grid.points()
        .zip(grid.weights())
        .filter(|(p, _)| model.distance(p, center) < radius)
        .map(|(_, w)| w)
        .sum()
}

/// Checks support in `B`, `‖a‖_∞ ≤ 1/μ(B)` and `∫ a dμ = 0`, returning `μ(B)`.
///
/// Violations are reported as `"support"`, `"size"` and `"cancellation"`.
/// The cancellation tolerance is `1e−10` against the bound `∫|a| dμ ≤ 1`.
pub fn validate_atom<M: HeatKernelModel + ?Sized>(atom: &Atom, model: &M) -> Result<f64> {
    let grid = atom.values.grid();
    if atom.center.len() != model.dim() || grid.dim() != model.dim() {
        return Err(param("center", format!("model `{}` expects dimension {}", model.name(), model.dim())));
    }
    if !(atom.radius > 0.0) {
        return Err(param("radius", "must be positive"));
    }
    let mu = grid_ball_measure(grid, &atom.center, atom.radius, model);
    let mut bad = Vec::new();
    let vals = atom.values.values();
    if grid.points().zip(vals).any(|(p, v)| v.norm() != 0.0 && model.distance(p, &atom.center) >= atom.radius) {
        bad.push("support");
    }
    if mu == 0.0 || vals.iter().any(|v| v.norm() > (1.0 + 1e-12) / mu) {
        bad.push("size");
    }
    let mean: Complex64 = vals.iter().zip(grid.weights()).map(|(v, w)| v * w).sum();
    if mean.norm() > 1e-10 {
        bad.push("cancellation");
    }
    if bad.is_empty() {
        Ok(mu)
    } else {
        Err(Error::InvalidAtom(bad))
    }
}

/// `x1 ↦ c(x1) a(·)`, with `c` given on the X grid.
#[derive(Debug, Clone)]
pub struct AtomicTerm {
    pub coefficients: Vec<Complex64>,
    pub atom: Atom,
}

/// `∫ Σ_j |c_j(x1)| dγ(x1)` over the X-grid weights, after validating every
/// atom: an upper bound for the `L¹_γ(H¹)` norm of `Σ_j c_j ⊗ a_j`.
pub fn l1_h1_norm<M: HeatKernelModel + ?Sized>(terms: &[AtomicTerm], x: &Grid, model: &M) -> Result<f64> {
    let mut total = 0.0;
    for t in terms {
        if t.coefficients.len() != x.len() {
            return Err(Error::Shape { expected: x.len(), got: t.coefficients.len() });
        }
        validate_atom(&t.atom, model)?;
        total += t.coefficients.iter().zip(x.weights()).map(|(c, w)| c.norm() * w).sum::<f64>();
    }
    Ok(total)
}
