use jsm_core::czd::{cz_decompose, dyadic_maximal, DyadicBase, DyadicSystem};
use jsm_core::ou::HermiteBasis;
use jsm_core::spectral::GridFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{usage, CliResult};
use crate::report::{fmt_f64, Outcome, Table};

fn base(cfg: &ExperimentConfig) -> CliResult<DyadicBase> {
    Ok(match cfg.string("base", "interval").as_str() {
        "interval" => DyadicBase::Interval,
        "torus" => DyadicBase::Torus,
        "window" => DyadicBase::Window {
            dim: cfg.usize_in("dim", 1, 1, 3)?,
            half_width: cfg.f64_in("half_width", 1.0, |x| x > 0.0 && x.is_finite(), "positive")?,
        },
        other => return Err(usage(format!("field `base`: unknown `{other}` (interval, torus or window)"))),
    })
}

/// `4 χ_{[0,1/4)}` in the first coordinate, constant along fibers.
fn spike(sys: &DyadicSystem) -> CliResult<GridFunction> {
    let y = sys.y_grid();
    let lo = match sys.base() {
        DyadicBase::Window { half_width, .. } => -half_width,
        _ => 0.0,
    };
    let side = match sys.base() {
        DyadicBase::Window { half_width, .. } => 2.0 * half_width,
        _ => 1.0,
    };
    let row: Vec<f64> = y.points().map(|p| if p[0] < lo + side / 4.0 { 4.0 } else { 0.0 }).collect();
    let v = (0..sys.fibers()).flat_map(|_| row.iter().copied()).collect();
    Ok(GridFunction::from_real(sys.grid().clone(), v)?)
}

/// Mostly small values with sparse tall spikes.
fn random(sys: &DyadicSystem, seed: u64) -> CliResult<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..sys.grid().len())
        .map(|_| {
            let spike = if rng.random_range(0.0..1.0) < 0.05 { rng.random_range(5.0..40.0) } else { 0.0 };
            rng.random_range(0.0..1.0f64).powi(3) + spike
        })
        .collect();
    Ok(GridFunction::from_real(sys.grid().clone(), v)?)
}

/// Largest whole-space fiber average.
fn top_average(f: &GridFunction, sys: &DyadicSystem) -> f64 {
    let n2 = sys.y_grid().len();
    let w = sys.y_grid().weights();
    let total: f64 = w.iter().sum();
    f.values()
        .chunks(n2)
        .map(|row| row.iter().zip(w).map(|(v, w)| v.re * w).sum::<f64>() / total)
        .fold(0.0, f64::max)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let b = base(cfg)?;
    let cells = cfg.usize_in("cells", 16, 1, 1 << 16)?;
    let fibers = cfg.usize_in("fibers", 0, 0, 64)?;
    let mut sys = DyadicSystem::uniform(b, cells)?;
    if fibers > 0 {
        sys = sys.fibered(HermiteBasis::new(1, fibers - 1, fibers)?.grid().clone());
    }
    let fixture = cfg.string("fixture", "spike");
    let (f, s) = match fixture.as_str() {
        "spike" => (spike(&sys)?, cfg.f64_in("s", 1.0, |x| x > 0.0 && x.is_finite(), "positive")?),
        "random" => {
            let f = random(&sys, cfg.seed()?)?;
            let factor = cfg.f64_in("s_factor", 1.5, |x| x > 1.0 && x.is_finite(), "greater than 1")?;
            let s = factor * top_average(&f, &sys);
            (f, s)
        }
        other => return Err(usage(format!("field `fixture`: unknown `{other}` (spike or random)"))),
    };

    let res = cz_decompose(&f, s, &sys)?;
    let props = res.properties(&f, &sys)?;
    let maximal = dyadic_maximal(&f, &sys)?;

    let mut cubes = Vec::new();
    for part in &res.bads {
        let cube = &sys.cubes(part.level)?[part.cube];
        let average = res.good.values()[part.support[0]].re;
        cubes.push(json!({
            "level": part.level,
            "index": cube.index,
            "lower": cube.lower,
            "upper": cube.lower.iter().map(|l| l + cube.side).collect::<Vec<_>>(),
            "measure": cube.measure,
            "fibers": part.fibers,
            "average": average,
        }));
    }

    let n2 = sys.y_grid().len();
    let mut bad = vec![0.0; sys.grid().len()];
    for part in &res.bads {
        for (&k, &v) in part.support.iter().zip(&part.values) {
            bad[k] += v;
        }
    }
    let mut table = Table::new("decomposition", &["fiber", "y", "f", "good", "bad", "maximal"]);
    for k in 0..sys.grid().len() {
        let y = sys.y_grid().point(k % n2).iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";");
        table.push(vec![
            (k / n2).to_string(),
            y,
            fmt_f64(f.values()[k].re),
            fmt_f64(res.good.values()[k].re),
            fmt_f64(bad[k]),
            fmt_f64(maximal.values()[k].re),
        ]);
    }

    let scale = f.values().iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let exact_tol = 4.0 * f64::EPSILON * scale;
    let mut out = Outcome::default();
    out.result("threshold", s);
    out.result("bad_cubes", cubes);
    out.result(
        "properties",
        json!({
            "l1_total": props.l1_total,
            "l1_bound": props.l1_bound,
            "good_sup": props.good_sup,
            "good_bound": props.good_bound,
            "measure_excess": props.measure_excess,
            "max_bad_mean": props.max_bad_mean,
            "average_range": if res.bads.is_empty() { serde_json::Value::Null } else { json!([props.average_range.0, props.average_range.1]) },
            "doubling": props.doubling,
            "residual": props.residual,
        }),
    );
    out.check("l1_bound", props.l1_ok(), format!("{} against {}", fmt_f64(props.l1_total), fmt_f64(props.l1_bound)));
    out.check("good_bound", props.good_ok(), format!("{} against {}", fmt_f64(props.good_sup), fmt_f64(props.good_bound)));
    out.check("measure_bound", props.measure_ok(), fmt_f64(props.measure_excess));
    out.check("bad_mean_zero", props.mean_zero_ok(), fmt_f64(props.max_bad_mean));
    out.check("average_range", props.average_ok(), format!("doubling constant {}", fmt_f64(props.doubling)));
    out.check("exceptional_set", props.exceptional_set_matches, "union of supports equals {Df > s}");
    out.check("exact", props.residual <= exact_tol, fmt_f64(props.residual));
    out.tables.push(table);
    Ok(out)
}
