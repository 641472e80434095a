use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::multipliers;
use crate::norm::{estimate_pnorm, standard_system, SpectralOperator};
use crate::report::{fmt_f64, Outcome, Table};
use jsm_core::product::torus_default_points;

/// Slack of the `p = 2` ceiling.
pub const P2_SLACK: f64 = 1e-9;

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let m = multipliers::select(cfg, "riesz2d")?;
    let k_max = cfg.usize_in("k_max", 8, 1, 40)?;
    let j_max = cfg.usize_in("j_max", 4, 1, 32)?;
    let points = if m.arity() == 2 {
        cfg.usize_in("points", torus_default_points(j_max), 2 * j_max + 1, 4096)?
    } else {
        torus_default_points(j_max)
    };
    let p = cfg.f64_in("p", 2.0, |x| x > 1.0 && x.is_finite(), "1 < p < ∞")?;
    let trials = cfg.usize_in("trials", 50, 1, 100_000)?;
    let seed = cfg.seed()?;

    let op = SpectralOperator::new(standard_system(m.arity(), k_max, j_max, points)?, m)?;
    let est = estimate_pnorm(&op, p, trials, seed)?;
    let sup = op.spectral_sup();

    let mut table = Table::new("trials", &["trial", "ratio", "running_max"]);
    for (i, (r, mx)) in est.ratios.iter().zip(est.running_max()).enumerate() {
        table.push(vec![i.to_string(), fmt_f64(*r), fmt_f64(mx)]);
    }
    let mut out = Outcome::default();
    out.result("multiplier", op.multiplier().name());
    out.result("system", op.system().name());
    out.result("estimate", est.estimate);
    out.result("argmax", est.argmax);
    out.result("spectral_sup", sup);
    out.check("nonnegative", est.estimate >= 0.0, fmt_f64(est.estimate));
    if p == 2.0 {
        out.check(
            "p2_ceiling",
            est.estimate <= sup + P2_SLACK,
            format!("{} against spectral sup {}", fmt_f64(est.estimate), fmt_f64(sup)),
        );
    }
    out.tables.push(table);
    Ok(out)
}
