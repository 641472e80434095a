use jsm_core::analysis::{square_function, SquareFunctionParams};
use jsm_core::ou::ou_system;
use jsm_core::special::gamma_real;
use jsm_core::spectral::{tensor, CoefficientVector, SpectralSystem};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::report::{fmt_f64, Outcome, Table};

/// `‖g_N f‖²₂ / ‖f‖²₂` for exactly band-limited `f` without a constant mode.
pub fn constant(n: &[usize]) -> f64 {
    n.iter().map(|&v| gamma_real(2.0 * v as f64) / 4f64.powi(v as i32)).product()
}

fn atl_ou(k_max: usize) -> CliResult<SpectralSystem> {
    Ok(ou_system(1, k_max)?.restrict(|_, l| l[0] > 0.0)?)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let n = cfg.usize_list("n", &[1], 6)?;
    let d = n.len();
    let k_max = cfg.usize_in("k_max", if d == 1 { 16 } else { 6 }, 1, 40)?;
    let trials = cfg.usize_in("trials", 20, 1, 10_000)?;
    let tol = cfg.f64_in("tolerance", 1e-6, |x| x > 0.0, "positive")?;
    let seed = cfg.seed()?;

    let axis = atl_ou(k_max)?;
    let sys = if d == 1 { axis } else { tensor(&axis, &axis)? };
    let params = SquareFunctionParams::for_system(&sys, n.clone())?;
    let want = constant(&n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<CoefficientVector> = (0..trials)
        .map(|_| {
            sys.indices()
                .iter()
                .map(|k| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    (k.clone(), Complex64::new(re, im))
                })
                .collect()
        })
        .collect();
    let measured = inputs
        .par_iter()
        .map(|c| -> CliResult<(f64, f64)> {
            let g = square_function(&sys, c, &params)?;
            Ok((c.norm().powi(2), g.lp_norm(2.0).powi(2)))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new("square_function", &["trial", "f_norm_sq", "g_norm_sq", "ratio", "rel_error"]);
    let mut worst: f64 = 0.0;
    for (i, (f2, g2)) in measured.iter().enumerate() {
        let ratio = g2 / f2;
        let rel = (ratio - want).abs() / want;
        worst = worst.max(rel);
        table.push(vec![i.to_string(), fmt_f64(*f2), fmt_f64(*g2), fmt_f64(ratio), fmt_f64(rel)]);
    }
    let mut out = Outcome::default();
    out.result("expected_constant", want);
    out.result("max_rel_error", worst);
    out.check("l2_constant", worst <= tol, format!("max relative error {} against {}", fmt_f64(worst), fmt_f64(tol)));
    out.tables.push(table);
    Ok(out)
}
