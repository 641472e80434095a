use jsm_core::product::{
    cz_growth_check, cz_smooth_check, di_bound_ratio, di_c0, sample_local_pairs, sample_pairs, sample_triples,
    CzReport, EuclideanModel, HeatKernelModel, KappaSpec, TorusModel,
};

use crate::config::ExperimentConfig;
use crate::error::{usage, CliResult};
use crate::report::{fmt_f64, Outcome, Table};

/// Allowed growth of a sampled sup when the sample is doubled.
const STABILITY: f64 = 1.5;

fn kernel_checks<M: HeatKernelModel>(
    model: &M,
    d: usize,
    kappa: &KappaSpec,
    n: usize,
    seed: u64,
    out: &mut Outcome,
    table: &mut Table,
) -> CliResult<()> {
    let m = model.dim();
    let mut row = |check: &str, size: usize, r: &CzReport| {
        table.push(vec![
            check.into(),
            size.to_string(),
            fmt_f64(r.sup),
            r.evaluated.to_string(),
            r.filtered.to_string(),
        ]);
    };
    let g1 = cz_growth_check(&sample_pairs(d, m, n, seed), kappa, model)?;
    let g2 = cz_growth_check(&sample_pairs(d, m, 2 * n, seed), kappa, model)?;
    let s1 = cz_smooth_check(&sample_triples(d, model, n, seed), kappa, model)?;
    let s2 = cz_smooth_check(&sample_triples(d, model, 2 * n, seed), kappa, model)?;
    row("growth", n, &g1);
    row("growth", 2 * n, &g2);
    row("smoothness", n, &s1);
    row("smoothness", 2 * n, &s2);
    out.result("model", model.name());
    out.result("growth_sup", [g1.sup, g2.sup]);
    out.result("smoothness_sup", [s1.sup, s2.sup]);
    for (name, a, b) in [("growth", &g1, &g2), ("smoothness", &s1, &s2)] {
        out.check(
            &format!("{name}_finite"),
            a.sup.is_finite() && b.sup.is_finite(),
            format!("{} / {}", fmt_f64(a.sup), fmt_f64(b.sup)),
        );
        out.check(
            &format!("{name}_stable"),
            b.sup <= STABILITY * a.sup,
            format!("doubling the sample moves the sup from {} to {}", fmt_f64(a.sup), fmt_f64(b.sup)),
        );
    }
    Ok(())
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let model = cfg.string("model", "euclidean");
    let d = cfg.usize_in("d", 1, 1, 3)?;
    let n = cfg.usize_in("pairs", 200, 1, 100_000)?;
    let eps = cfg.f64_in("eps", 0.05, |x| x > 0.0 && x < 0.5, "0 < eps < 1/2")?;
    let di_d = cfg.usize_in("di_d", 2, 1, 3)?;
    let di_n = cfg.usize_in("di_points", 100, 1, 100_000)?;
    let seed = cfg.seed()?;
    let kappa = KappaSpec::indicator(eps, 1.0 - eps)?;

    let mut out = Outcome::default();
    let mut table = Table::new("kernel_estimates", &["check", "sample_size", "sup", "evaluated", "filtered"]);
    match model.as_str() {
        "euclidean" => {
            let m = cfg.usize_in("m", 1, 1, 3)?;
            kernel_checks(&EuclideanModel::new(m)?, d, &kappa, n, seed, &mut out, &mut table)?
        }
        "torus" => kernel_checks(&TorusModel, d, &kappa, n, seed, &mut out, &mut table)?,
        other => return Err(usage(format!("field `model`: unknown `{other}` (euclidean or torus)"))),
    }

    let pairs = sample_local_pairs(di_d, di_n, seed);
    let mut di = Table::new("di_ratios", &["point", "ratio"]);
    let ratios: Vec<f64> = if di_d == 1 {
        // the bound's constant is not given in one dimension: report the
        // smallest one that makes every sampled ratio at most 1
        let c0 = pairs.iter().map(|(x, y)| di_c0(x, y)).collect::<jsm_core::Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
        out.result("di_c0", c0);
        pairs.iter().map(|(x, y)| di_bound_ratio(x, y, Some(c0))).collect::<jsm_core::Result<_>>()?
    } else {
        pairs.iter().map(|(x, y)| di_bound_ratio(x, y, None)).collect::<jsm_core::Result<_>>()?
    };
    for (i, r) in ratios.iter().enumerate() {
        di.push(vec![i.to_string(), fmt_f64(*r)]);
    }
    let sup = ratios.iter().copied().fold(0.0, f64::max);
    out.result("di_ratio_sup", sup);
    out.check("di_ratio_bounded", sup.is_finite(), fmt_f64(sup));
    out.tables.push(table);
    out.tables.push(di);
    Ok(out)
}
