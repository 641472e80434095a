//! The ten acceptance criteria, run in order with one pass/fail line each.
//!
//! Lines go straight to stdout so they appear without `--nocapture`.

use std::f64::consts::LN_2;
use std::io::Write;
use std::time::Instant;

use jsm_cli::norm::{estimate_pnorm, SpectralOperator};
use jsm_cli::{run, ExperimentConfig, Kind};
use jsm_core::analysis::{
    decay_check, log_space, marcinkiewicz_seminorm, mellin, mellin_inverse, mellin_spectrum, plancherel_residual,
    required_order_worst_case, square_function, DecayProfile, DyadicRange, LogGrid, MellinSampler,
    SquareFunctionParams, UWindow,
};
use jsm_core::czd::{cz_decompose, weak_quasinorm, weak_quasinorm_with, DyadicBase, DyadicSystem};
use jsm_core::ou::{
    hermite_1d, hermite_eval, heat_kernel_w, mehler_dr, mehler_kernel, ou_system, w_dr, HermiteBasis, MehlerParams,
};
use jsm_core::product::{
    cz_growth_check, cz_smooth_check, di_bound_ratio, kappa_multiplier, sample_local_pairs, sample_pairs,
    sample_triples, EuclideanModel, KappaSpec,
};
use jsm_core::quadrature::adaptive;
use jsm_core::special::{gamma, gamma_real};
use jsm_core::spectral::{multiplier, tensor, CoefficientVector, GridFunction, MultiIndex, MultiplierSpec, SpectralSystem};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn normal_coeffs(sys: &SpectralSystem, rng: &mut ChaCha8Rng) -> CoefficientVector {
    sys.indices()
        .iter()
        .map(|k| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            (k.clone(), Complex64::new(re, im))
        })
        .collect()
}

fn atl_ou(k_max: usize) -> Result<SpectralSystem, String> {
    ok(ok(ou_system(1, k_max))?.restrict(|_, l| l[0] > 0.0))
}

fn square_function_constant() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let one_axis = atl_ou(16)?;
    let small = atl_ou(6)?;
    let two_axes = ok(tensor(&small, &small))?;
    let mut worst: f64 = 0.0;
    for (sys, n) in [(&one_axis, vec![1]), (&one_axis, vec![2]), (&two_axes, vec![1, 2])] {
        let want: f64 = n.iter().map(|&v| gamma_real(2.0 * v as f64) / 4f64.powi(v as i32)).product();
        let params = ok(SquareFunctionParams::for_system(sys, n.clone()))?;
        for _ in 0..20 {
            let cv = normal_coeffs(sys, &mut rng);
            let g = ok(square_function(sys, &cv, &params))?;
            let rel = (g.lp_norm(2.0).powi(2) - want * cv.norm().powi(2)).abs() / (want * cv.norm().powi(2));
            worst = worst.max(rel);
        }
    }
    ensure!(worst < 1e-6, "max relative error {worst:e}");
    Ok(format!("max relative error {worst:.2e} over 60 inputs"))
}

fn log_gaussian(center: f64, width: f64) -> MultiplierSpec {
    MultiplierSpec::new("log_gaussian", 1, move |l| c((-(l[0].ln() - center).powi(2) / (2.0 * width * width)).exp()))
}

fn mellin_suite() -> Check {
    let grid = LogGrid::default();
    let window = UWindow::default();
    let mut plancherel: f64 = 0.0;
    let mut inversion: f64 = 0.0;
    for (center, width) in [(0.0, 1.0), (1.0, 0.7), (-2.0, 1.5), (0.5, 2.0)] {
        let m = log_gaussian(center, width);
        plancherel = plancherel.max(ok(plancherel_residual(&m, &window, &grid))?);
        let spec = ok(mellin_spectrum(&m, &window, &grid))?;
        for i in 0..=40 {
            let lambda = (-6.0 + 0.3 * i as f64).exp();
            let back = ok(mellin_inverse(&spec, &[lambda]))?;
            inversion = inversion.max((back - m.evaluate(&[lambda])).norm());
        }
    }
    ensure!(plancherel < 1e-8, "Plancherel residual {plancherel:e}");
    ensure!(inversion < 1e-6, "inversion error {inversion:e}");
    let sampler = ok(MellinSampler::new(&multiplier::lambda_exp(), &grid))?;
    let mut gamma_err: f64 = 0.0;
    for u in [0.0, 1.0, -1.0, 3.0, -3.0] {
        gamma_err = gamma_err.max((sampler.at(&[u]) - gamma(Complex64::new(1.0, -u))).norm());
    }
    let direct = ok(mellin(&multiplier::lambda_exp(), &[1.0], &grid))?;
    gamma_err = gamma_err.max((direct - gamma(Complex64::new(1.0, -1.0))).norm());
    ensure!(gamma_err < 1e-6, "Γ(1−iu) mismatch {gamma_err:e}");
    Ok(format!("Plancherel {plancherel:.1e}, inversion {inversion:.1e}, Γ(1−iu) {gamma_err:.1e}"))
}

fn decay_verification() -> Check {
    let grid = LogGrid::default();
    let u = log_space(2.0, 40.0, 40);
    let t = log_space(1e-4, 1e4, 64);
    let mut parts = Vec::new();
    for (name, m) in [("1", multiplier::constant(1, c(1.0))), ("riesz", multiplier::riesz_1d())] {
        for rho in [1usize, 2] {
            let rep = ok(decay_check(&m, &[rho + 1], &[rho], &u, &t, &grid))?;
            let slope = rep.slopes[0];
            ensure!(slope <= -(rho as f64) + 0.15, "{name}, rho={rho}: slope {slope}");
            ensure!(rep.constant.is_finite(), "{name}, rho={rho}: constant {}", rep.constant);
            parts.push(format!("{name}/ρ={rho}: {slope:.2}"));
        }
    }
    Ok(format!("slopes {}", parts.join(", ")))
}

fn marcinkiewicz_norms() -> Check {
    let range = DyadicRange::default();
    let k = ok(marcinkiewicz_seminorm(&multiplier::constant(1, c(1.0)), &[0], &range))?;
    ensure!((k - LN_2).abs() < 1e-8, "constant: {k}");
    let mut worst: f64 = (k - LN_2).abs();
    for u in [0.5, 1.0, 3.0] {
        let v = ok(marcinkiewicz_seminorm(&multiplier::imaginary_power(u), &[1], &range))?;
        worst = worst.max((v - u * u * LN_2).abs());
        ensure!((v - u * u * LN_2).abs() < 1e-8, "λ^{{iu}}, u={u}: {v}");
    }
    // 2-homogeneity: powers of two scale bit-exactly
    for base in [multiplier::riesz_1d(), multiplier::log_gaussian()] {
        let inner = base.clone();
        let scaled = MultiplierSpec::new("scaled", 1, move |l| 4.0 * inner.evaluate(l));
        for gamma in [[0usize], [1]] {
            let plain = MultiplierSpec::new("plain", 1, {
                let b = base.clone();
                move |l| b.evaluate(l)
            });
            let a = ok(marcinkiewicz_seminorm(&plain, &gamma, &range))?;
            let b = ok(marcinkiewicz_seminorm(&scaled, &gamma, &range))?;
            ensure!(b == 16.0 * a, "homogeneity {}: {b} vs {}", base.name(), 16.0 * a);
        }
    }
    let profile = ok(DecayProfile::new(vec![3.0; 2], vec![3.0; 2], vec![0.0; 2], 2.0))?;
    let order = required_order_worst_case(&profile);
    ensure!(order == vec![2.5; 4], "threshold vector {order:?}");
    Ok(format!("closed forms within {worst:.1e}; homogeneity exact; threshold {order:?}"))
}

/// Fourth-order central difference in `r`, Richardson-extrapolated from
/// steps `h` and `h/2`, with its roundoff floor. The plain stencil leaves
/// ~1e-5 relative truncation error on steep Gaussian tails near `r = 1`.
fn fd_r<F: Fn(f64) -> f64>(f: F, r: f64) -> (f64, f64) {
    let h = 2e-4 * r.min(1.0 - r);
    let stencil = |h: f64| (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h);
    let (coarse, fine) = (stencil(h), stencil(h / 2.0));
    (fine + (fine - coarse) / 15.0, 3e-14 * f(r).abs() / h)
}

fn mehler_ou_suite() -> Check {
    let mut notes = Vec::new();
    let mut defect: f64 = 0.0;
    for (d, k) in [(1, 32), (2, 16)] {
        defect = defect.max(ok(ou_system(d, k))?.orthonormality_defect());
    }
    ensure!(defect < 1e-10, "orthonormality defect {defect:e}");
    notes.push(format!("orthonormality {defect:.1e}"));

    let mut mass_err: f64 = 0.0;
    for r in [0.1, 0.5, 0.9, 0.99] {
        for x in [-3.0, 0.0, 0.4, 2.5] {
            let p = ok(MehlerParams::new(r, 1))?;
            let mass = adaptive(|y| mehler_kernel(&p, &[x], &[y]).unwrap(), r * x - 20.0, r * x + 20.0, 1e-14, 1e-13);
            mass_err = mass_err.max((mass - 1.0).abs());
        }
    }
    ensure!(mass_err < 1e-8, "kernel mass error {mass_err:e}");

    let mut eigen: f64 = 0.0;
    for (d, k_max) in [(1, 32), (2, 16)] {
        let hb = ok(HermiteBasis::with_default_nodes(d, k_max))?;
        for r in [0.3, 0.5, 0.8] {
            for k in MultiIndex::all_up_to(d, k_max - 4) {
                let f = GridFunction::sample(hb.grid().clone(), |x| c(hermite_eval(&k, x)));
                let out = ok(hb.apply_semigroup_kernel(r, &f))?;
                eigen = eigen.max(ok(out.sub(&f.scale(c(r.powi(k.order() as i32)))))?.lp_norm(2.0));
            }
        }
    }
    ensure!(eigen < 1e-8, "eigenrelation error {eigen:e}");

    let hb = ok(HermiteBasis::with_default_nodes(1, 32))?;
    let grid = hb.grid().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let coeffs: Vec<f64> = (0..=12).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = GridFunction::sample(grid.clone(), |x| c(coeffs.iter().enumerate().map(|(k, a)| a * hermite_1d(k, x[0])).sum()));
    let mut semigroup: f64 = 0.0;
    for (r, s) in [(0.5, 0.6), (0.8, 0.9), (0.3, 0.7)] {
        let lhs = ok(hb.apply_semigroup_kernel(r, &ok(hb.apply_semigroup_kernel(s, &f))?))?;
        let rhs = ok(hb.apply_semigroup_kernel(r * s, &f))?;
        semigroup = semigroup.max(ok(lhs.sub(&rhs))?.lp_norm(2.0));
    }
    ensure!(semigroup < 1e-8, "semigroup law error {semigroup:e}");

    let mut fd_rel: f64 = 0.0;
    let pts = [-1.3, -0.2, 0.0, 0.6, 1.9];
    for d in 1..=2 {
        for i in -8..=8 {
            let r = (-(0.5 * i as f64).exp()).exp();
            let p = ok(MehlerParams::new(r, d))?;
            for &a in &pts {
                for &b in &pts {
                    let x: Vec<f64> = (0..d).map(|j| a + 0.3 * j as f64).collect();
                    let y: Vec<f64> = (0..d).map(|j| b - 0.2 * j as f64).collect();
                    let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u - v).collect();
                    let exact = ok(mehler_dr(&p, &x, &y))?;
                    let (fd, floor) = fd_r(|s| mehler_kernel(&MehlerParams::new(s, d).unwrap(), &x, &y).unwrap(), r);
                    let exact_w = ok(w_dr(&p, &x, &y))?;
                    let (fdw, floor_w) = fd_r(|s| heat_kernel_w(&MehlerParams::new(s, d).unwrap(), &z).unwrap(), r);
                    for (e, f, fl) in [(exact, fd, floor), (exact_w, fdw, floor_w)] {
                        let excess = (e - f).abs() - fl;
                        if excess > 0.0 {
                            fd_rel = fd_rel.max(excess / e.abs());
                        }
                    }
                }
            }
        }
    }
    ensure!(fd_rel < 1e-6, "∂_r relative error {fd_rel:e}");

    let mut contraction: f64 = 0.0;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..=10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = GridFunction::sample(grid.clone(), |x| c(coeffs.iter().enumerate().map(|(k, a)| a * hermite_1d(k, x[0])).sum()));
        for r in [0.3, 0.7, 0.95] {
            let out = ok(hb.apply_semigroup_kernel(r, &f))?;
            for p in [1.0, 2.0, 4.0] {
                contraction = contraction.max(out.lp_norm(p) / f.lp_norm(p));
            }
        }
    }
    ensure!(contraction <= 1.0 + 1e-12, "Lᵖ(γ) ratio {contraction}");
    notes.push(format!("mass {mass_err:.1e}, eigen {eigen:.1e}, semigroup {semigroup:.1e}, ∂_r {fd_rel:.1e}, max Lᵖ ratio {contraction:.6}"));
    Ok(notes.join("; "))
}

fn riesz_identity_and_kernel_path() -> Check {
    let mut cfg = ExperimentConfig::new(Kind::RieszCrossCheck);
    for (k, v) in [("seed", "606"), ("inputs", "5"), ("eps", "0.1"), ("k_max", "12"), ("j_max", "4")] {
        ok(cfg.set(k, v))?;
    }
    let report = ok(run(&cfg))?;
    let results = &report.outcome.results;
    let identity = results["riesz_identity_defect"].as_f64().unwrap_or(f64::NAN);
    let rel = results["max_rel_error"].as_f64().unwrap_or(f64::NAN);
    ensure!(identity <= 1e-12, "L(L+A)⁻¹ + A(L+A)⁻¹ − I = {identity:e}");
    ensure!(rel <= 1e-5, "kernel vs spectral {rel:e}");
    ensure!(report.all_passed(), "runner invariants failed");
    Ok(format!("identity defect {identity:.1e}; kernel vs spectral {rel:.1e} over 5 inputs"))
}

fn kernel_estimates() -> Check {
    let pairs = sample_local_pairs(2, 100, 77);
    let mut sup: f64 = 0.0;
    for (x, y) in &pairs {
        sup = sup.max(ok(di_bound_ratio(x, y, None))?);
    }
    ensure!(sup.is_finite(), "D_I ratio sup {sup}");
    let model = ok(EuclideanModel::new(1))?;
    let kappa = ok(KappaSpec::indicator(0.05, 0.95))?;
    let g1 = ok(cz_growth_check(&sample_pairs(1, 1, 200, 78), &kappa, &model))?.sup;
    let g2 = ok(cz_growth_check(&sample_pairs(1, 1, 400, 78), &kappa, &model))?.sup;
    let s1 = ok(cz_smooth_check(&sample_triples(1, &model, 200, 79), &kappa, &model))?.sup;
    let s2 = ok(cz_smooth_check(&sample_triples(1, &model, 400, 79), &kappa, &model))?.sup;
    ensure!(g1.is_finite() && s1.is_finite(), "growth {g1}, smoothness {s1}");
    ensure!(g2 < 1.5 * g1 && s2 < 1.5 * s1, "doubling: growth {g1} → {g2}, smoothness {s1} → {s2}");
    Ok(format!("D_I ratio sup {sup:.3}; growth {g1:.3} → {g2:.3}; smoothness {s1:.3} → {s2:.3}"))
}

fn cz_decomposition() -> Check {
    let x = ok(HermiteBasis::new(1, 4, 6))?.grid().clone();
    let systems = [
        ok(DyadicSystem::uniform(DyadicBase::Interval, 32))?.fibered(x.clone()),
        ok(DyadicSystem::uniform(DyadicBase::Torus, 16))?.fibered(x.clone()),
        ok(DyadicSystem::uniform(DyadicBase::Window { dim: 2, half_width: 2.0 }, 8))?.fibered(x),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut l1_ratio: f64 = 0.0;
    let mut bads = 0;
    for i in 0..50 {
        let sys = &systems[i % 3];
        let n = sys.grid().len();
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let spike = if rng.random_range(0.0..1.0) < 0.05 { rng.random_range(5.0..40.0) } else { 0.0 };
                rng.random_range(0.0..1.0f64).powi(3) + spike
            })
            .collect();
        let f = ok(GridFunction::from_real(sys.grid().clone(), v.clone()))?;
        let n2 = sys.y_grid().len();
        let yw = sys.y_grid().weights();
        let total: f64 = yw.iter().sum();
        let top = v.chunks(n2).map(|row| row.iter().zip(yw).map(|(a, b)| a * b).sum::<f64>() / total).fold(0.0, f64::max);
        let s = top * rng.random_range(1.05..6.0);
        let res = ok(cz_decompose(&f, s, sys))?;
        let p = ok(res.properties(&f, sys))?;
        let scale = v.iter().fold(0.0f64, |a, b| a.max(*b));
        ensure!(p.all_hold(4.0 * f64::EPSILON * scale), "input {i}: {p:?}");
        l1_ratio = l1_ratio.max(p.l1_total / (p.l1_bound / 4.0));
        bads += res.bads.len();
    }
    ensure!(l1_ratio <= 4.0, "constant in (i) reached {l1_ratio}");

    let sys = ok(DyadicSystem::uniform(DyadicBase::Interval, 16))?;
    let f = GridFunction::sample(sys.grid().clone(), |p| c(if p[0] < 0.25 { 4.0 } else { 0.0 }));
    let res = ok(cz_decompose(&f, 1.0, &sys))?;
    ensure!(res.bads.len() == 1, "fixture: {} bad parts", res.bads.len());
    let cube = &ok(sys.cubes(res.bads[0].level))?[res.bads[0].cube];
    ensure!(cube.lower == [0.0] && cube.side == 0.5, "fixture cube {cube:?}");
    let good: Vec<f64> = res.good.values().iter().map(|v| v.re).collect();
    ensure!(good.iter().take(8).all(|&g| g == 2.0) && good.iter().skip(8).all(|&g| g == 0.0), "fixture good part {good:?}");
    let p = ok(res.properties(&f, &sys))?;
    ensure!(p.all_hold(0.0), "fixture properties {p:?}");
    Ok(format!("50 random inputs ({bads} bad parts), max (i) constant {l1_ratio:.3}; fixture cube [0, 1/2), g = 2"))
}

fn weak_quasinorm_checks() -> Check {
    let sys = ok(DyadicSystem::uniform(DyadicBase::Interval, 64))?;
    let chi = GridFunction::sample(sys.grid().clone(), |p| c(if p[0] < 0.3 { 1.0 } else { 0.0 }));
    let q = weak_quasinorm(&chi);
    ensure!(q == 19.0 / 64.0, "χ_E: {q}");
    let n = 1000;
    let vals: Vec<f64> = (1..=n).map(|i| n as f64 / i as f64).collect();
    let inv = ok(weak_quasinorm_with(&vals, &vec![1.0 / n as f64; n]))?;
    ensure!((inv - 1.0).abs() < 1e-3, "1/x: {inv}");
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut tests = vec![chi];
    for _ in 0..20 {
        let v: Vec<f64> = (0..64).map(|_| rng.random_range(-3.0..3.0)).collect();
        tests.push(ok(GridFunction::from_real(sys.grid().clone(), v))?);
    }
    for f in &tests {
        let q = weak_quasinorm(f);
        ensure!(weak_quasinorm(&f.scale(c(2.0))) == 2.0 * q, "homogeneity");
        ensure!(q <= f.lp_norm(1.0), "Chebyshev: {q} > {}", f.lp_norm(1.0));
    }
    ensure!(inv <= vals.iter().sum::<f64>() / n as f64, "Chebyshev on 1/x");
    Ok(format!("χ_E exact; 1/x → {inv:.6}; homogeneity exact and Chebyshev on {} inputs", tests.len() + 1))
}

fn p2_norm_ceiling() -> Check {
    let family: Vec<MultiplierSpec> = vec![
        multiplier::constant(1, c(1.0)),
        multiplier::constant(1, c(0.0)),
        multiplier::constant(2, Complex64::new(0.6, -0.8)),
        multiplier::riesz_1d(),
        multiplier::imaginary_power(1.0),
        multiplier::imaginary_power(-4.0),
        multiplier::lambda_exp(),
        multiplier::log_gaussian(),
        multiplier::damped_imaginary_power(2.0),
        multiplier::riesz_joint(2, 0),
        multiplier::riesz_joint(2, 1),
        multiplier::product(vec![multiplier::riesz_1d(), multiplier::lambda_exp()]),
        multiplier::lift(multiplier::log_gaussian(), 1, 2),
        kappa_multiplier(&KappaSpec::one()),
        kappa_multiplier(&ok(KappaSpec::indicator(0.1, 0.9))?),
        kappa_multiplier(&KappaSpec::imaginary_power(1.5)),
    ];
    let mut margin = f64::INFINITY;
    for (i, m) in family.into_iter().enumerate() {
        let name = m.name().to_string();
        let op = ok(SpectralOperator::on_standard_system(m, 8, 4))?;
        let sup = op.spectral_sup();
        let est = ok(estimate_pnorm(&op, 2.0, 20, 1000 + i as u64))?;
        ensure!(est.estimate <= sup + 1e-9, "{name}: {} > {sup}", est.estimate);
        margin = margin.min(sup + 1e-9 - est.estimate);
    }
    Ok(format!("16 multipliers, smallest margin {margin:.2e}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Option<f64>, fn() -> Check); 10] = [
        ("square-function constant", Some(10.0), square_function_constant),
        ("Mellin suite", None, mellin_suite),
        ("decay verification", Some(60.0), decay_verification),
        ("Marcinkiewicz norms", None, marcinkiewicz_norms),
        ("Mehler/OU suite", None, mehler_ou_suite),
        ("Riesz identity and kernel path", Some(120.0), riesz_identity_and_kernel_path),
        ("kernel estimates", None, kernel_estimates),
        ("CZ decomposition", None, cz_decomposition),
        ("weak quasinorm", None, weak_quasinorm_checks),
        ("p=2 norm ceiling", None, p2_norm_ceiling),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let secs = start.elapsed().as_secs_f64();
        let res = match (res, budget) {
            (Ok(_), Some(b)) if secs >= b => Err(format!("took {secs:.1}s, budget {b}s")),
            (r, _) => r,
        };
        let line = match &res {
            Ok(d) => format!("criterion {:>2} PASS  {name} ({secs:.2}s): {d}\n", i + 1),
            Err(e) => format!("criterion {:>2} FAIL  {name} ({secs:.2}s): {e}\n", i + 1),
        };
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        if res.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
