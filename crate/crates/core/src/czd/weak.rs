use crate::error::{Error, Result};
use crate::spectral::GridFunction;

/// `sup_s s·μ{|f| > s}` with `μ` the grid weights.
///
/// The distribution function only jumps at values of `|f|`, so the sup is the
/// largest `v·μ{|f| ≥ v}` over the distinct values `v` of `|f|`.
pub fn weak_quasinorm(f: &GridFunction) -> f64 {
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    weak_quasinorm_with(&abs, f.grid().weights()).expect("grid sizes agree")
}

/// [`weak_quasinorm`] for values `|f|` with weights `w`.
pub fn weak_quasinorm_with(abs: &[f64], w: &[f64]) -> Result<f64> {
    if abs.len() != w.len() {
        return Err(Error::Shape { expected: w.len(), got: abs.len() });
    }
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&a, &b| abs[b].total_cmp(&abs[a]));
    let mut best: f64 = 0.0;
    let mut mass = 0.0;
    let mut k = 0;
    while k < order.len() {
        let v = abs[order[k]];
        while k < order.len() && abs[order[k]] == v {
            mass += w[order[k]];
            k += 1;
        }
        best = best.max(v * mass);
    }
    Ok(best)
}
