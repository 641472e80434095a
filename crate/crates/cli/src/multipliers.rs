//! Multiplier selection: built-in names, products of one-variable factors, and
//! tabulated files.

use jsm_core::spectral::multiplier::{self, MultiplierSpec};
use num_complex::Complex64;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::{usage, CliResult};

/// One-variable built-ins; `,` joins them into a product.
pub const FACTORS: [&str; 8] =
    ["one", "zero", "riesz", "imaginary-power", "lambda-exp", "log-gaussian", "damped-imaginary-power", "linear"];

/// Two-variable built-ins.
pub const JOINT: [&str; 2] = ["riesz2d", "riesz2d-second"];

fn factor(name: &str, cfg: &ExperimentConfig) -> CliResult<MultiplierSpec> {
    let real = |v: f64| Complex64::new(v, 0.0);
    Ok(match name {
        "one" => multiplier::constant(1, real(1.0)),
        "zero" => multiplier::constant(1, real(0.0)),
        "riesz" => multiplier::riesz_1d(),
        "linear" => multiplier::linear(),
        "lambda-exp" => multiplier::lambda_exp(),
        "log-gaussian" => multiplier::log_gaussian(),
        "imaginary-power" => multiplier::imaginary_power(cfg.f64_in("u", 1.0, f64::is_finite, "finite")?),
        "damped-imaginary-power" => {
            multiplier::damped_imaginary_power(cfg.f64_in("u", 1.0, f64::is_finite, "finite")?)
        }
        other => {
            return Err(usage(format!(
                "field `multiplier`: unknown `{other}` (built-ins: {}, {}, or table:PATH)",
                FACTORS.join(", "),
                JOINT.join(", ")
            )))
        }
    })
}

/// Resolves the `multiplier` field.
pub fn select(cfg: &ExperimentConfig, default: &str) -> CliResult<MultiplierSpec> {
    let spec = cfg.string("multiplier", default);
    match spec.as_str() {
        "riesz2d" => return Ok(multiplier::riesz_joint(2, 0)),
        "riesz2d-second" => return Ok(multiplier::riesz_joint(2, 1)),
        _ => {}
    }
    if let Some(path) = spec.strip_prefix("table:") {
        return tabulated(Path::new(path));
    }
    let factors = spec.split(',').map(|n| factor(n.trim(), cfg)).collect::<CliResult<Vec<_>>>()?;
    Ok(if factors.len() == 1 {
        factors.into_iter().next().expect("one factor")
    } else {
        multiplier::product(factors)
    })
}

/// A one-variable multiplier read from a CSV with header `lambda,re,im`,
/// interpolated linearly in `log λ` and held constant outside the table.
pub fn tabulated(path: &Path) -> CliResult<MultiplierSpec> {
    let field = |msg: String| usage(format!("field `multiplier`: {}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| field(e.to_string()))?;
    let mut rows: Vec<(f64, Complex64)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| field(e.to_string()))?;
        if rec.len() != 3 {
            return Err(field(format!("row {}: expected lambda,re,im", i + 1)));
        }
        let num = |j: usize| -> CliResult<f64> {
            rec[j].parse::<f64>().map_err(|_| field(format!("row {}: `{}` is not a number", i + 1, &rec[j])))
        };
        let (l, re, im) = (num(0)?, num(1)?, num(2)?);
        if !(l > 0.0 && l.is_finite() && re.is_finite() && im.is_finite()) {
            return Err(field(format!("row {}: need lambda > 0 and finite values", i + 1)));
        }
        rows.push((l, Complex64::new(re, im)));
    }
    if rows.len() < 2 {
        return Err(field("need at least two rows".into()));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if rows.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(field("duplicate lambda".into()));
    }
    let sup = rows.iter().fold(0.0f64, |a, r| a.max(r.1.norm()));
    let logs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let vals: Vec<Complex64> = rows.iter().map(|r| r.1).collect();
    let name = format!("table({})", path.display());
    Ok(MultiplierSpec::new(name, 1, move |l| {
        let s = l[0].ln();
        let n = logs.len();
        if !(s > logs[0]) {
            return vals[0];
        }
        if s >= logs[n - 1] {
            return vals[n - 1];
        }
        let j = logs.partition_point(|&x| x <= s);
        let t = (s - logs[j - 1]) / (logs[j] - logs[j - 1]);
        vals[j - 1] * (1.0 - t) + vals[j] * t
    })
    .with_sup_norm(sup))
}
