use jsm_core::analysis::{marcinkiewicz_seminorm, DyadicRange, MarcOrder};

use crate::config::ExperimentConfig;
use crate::error::{usage, CliResult};
use crate::multipliers;
use crate::report::{fmt_f64, Outcome, Table};

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let m = multipliers::select(cfg, "riesz2d")?;
    let d = m.arity();
    let rho = cfg.usize_list("rho", &vec![1; d], 4)?;
    if rho.len() != d {
        return Err(usage(format!("field `rho`: expected {d} entries for `{}`", m.name())));
    }
    let k = cfg.usize_in("k", DyadicRange::DEFAULT_K as usize, 1, 60)?;
    let per_octave = cfg.usize_in("refinements", DyadicRange::DEFAULT_REFINEMENTS, 0, 16)?;
    let offsets_seed = cfg.usize_in("offset_seed", DyadicRange::DEFAULT_SEED as usize, 0, usize::MAX)?;
    let range = DyadicRange::refined(k as i32, per_octave, offsets_seed as u64)?;

    let mut table = Table::new("seminorms", &["gamma", "seminorm"]);
    let mut rows = Vec::new();
    let mut mar: f64 = 0.0;
    for gamma in MarcOrder(rho.clone()).below() {
        let v = marcinkiewicz_seminorm(&m, &gamma, &range)?;
        mar = mar.max(v);
        let g = gamma.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        table.push(vec![g.clone(), fmt_f64(v)]);
        rows.push(serde_json::json!({ "gamma": gamma, "seminorm": v }));
    }
    table.push(vec!["mar".into(), fmt_f64(mar)]);

    let mut out = Outcome::default();
    let all_finite = rows.iter().all(|r| r["seminorm"].is_number());
    out.result("multiplier", m.name());
    out.result("seminorms", rows);
    out.result("mar_norm", mar);
    out.check("seminorms_finite", all_finite && mar.is_finite(), format!("mar norm {}", fmt_f64(mar)));
    out.tables.push(table);
    Ok(out)
}
