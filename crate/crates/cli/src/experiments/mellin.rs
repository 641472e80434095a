use jsm_core::analysis::{decay_check, log_space, LogGrid};

use crate::config::ExperimentConfig;
use crate::error::{usage, CliResult};
use crate::multipliers;
use crate::report::{fmt_f64, Outcome, Table};

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let m = multipliers::select(cfg, "one")?;
    let d = m.arity();
    let rho = cfg.usize_list("rho", &vec![1; d], 6)?;
    let n_default: Vec<usize> = rho.iter().map(|r| r + 1).collect();
    let n = cfg.usize_list("n", &n_default, 8)?;
    if rho.len() != d || n.len() != d {
        return Err(usage(format!("field `rho`/`n`: expected {d} entries for `{}`", m.name())));
    }
    if n.iter().zip(&rho).any(|(a, b)| a <= b) {
        return Err(usage("field `n`: must exceed `rho` componentwise"));
    }
    let positive = |x: f64| x > 0.0 && x.is_finite();
    let u_min = cfg.f64_in("u_min", 2.0, positive, "positive")?;
    let u_max = cfg.f64_in("u_max", 40.0, |x| x > u_min && x.is_finite(), "greater than u_min")?;
    let u_points = cfg.usize_in("u_points", 40, 2, 1000)?;
    let t_min = cfg.f64_in("t_min", 1e-4, positive, "positive")?;
    let t_max = cfg.f64_in("t_max", 1e4, |x| x > t_min && x.is_finite(), "greater than t_min")?;
    let t_points = cfg.usize_in("t_points", if d == 1 { 64 } else { 8 }, 1, 512)?;
    let base = LogGrid::for_dim(d);
    let s_max = cfg.f64_in("s_max", base.s_max, positive, "positive")?;
    let log_points = cfg.usize_in("log_points", base.points, 3, 1 << 20)?;
    let slack = cfg.f64_in("slack", 0.15, |x| x >= 0.0, "non-negative")?;

    let u = log_space(u_min, u_max, u_points);
    let t = if t_points == 1 { vec![t_min] } else { log_space(t_min, t_max, t_points) };
    let rep = decay_check(&m, &n, &rho, &u, &t, &LogGrid::new(s_max, log_points)?)?;

    let mut table = Table::new("decay", &["axis", "u", "sup"]);
    for axis in 0..d {
        for (uv, s) in rep.u[axis].iter().zip(&rep.sup[axis]) {
            table.push(vec![axis.to_string(), fmt_f64(*uv), fmt_f64(*s)]);
        }
    }
    let mut out = Outcome::default();
    out.result("multiplier", m.name());
    out.result("slopes", &rep.slopes);
    out.result("constant", rep.constant);
    for (axis, (&slope, &r)) in rep.slopes.iter().zip(&rho).enumerate() {
        let bound = -(r as f64) + slack;
        out.check(
            &format!("slope_axis_{axis}"),
            slope <= bound,
            format!("slope {} against bound {}", fmt_f64(slope), fmt_f64(bound)),
        );
    }
    out.check("constant_finite", rep.constant.is_finite(), fmt_f64(rep.constant));
    out.tables.push(table);
    Ok(out)
}
