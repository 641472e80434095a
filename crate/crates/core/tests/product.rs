use std::f64::consts::{LN_2, PI};

use jsm_core::ou::{mehler_dr, ou_system, w_dr, HermiteBasis, MehlerParams};
use jsm_core::product::*;
use jsm_core::quadrature::gauss_legendre;
use jsm_core::spectral::{apply_multiplier, reconstruct, tensor, CoefficientVector, GridFunction};
use jsm_core::Error;
use num_complex::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// composite Simpson on [a, b] with n (even) panels
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn m_kappa_examples() {
    assert!((m_kappa(1.0, 1.0, &KappaSpec::one()).unwrap() - 0.5).norm() < 1e-15);
    let want = 0.5 * Complex64::new(0.0, -LN_2).exp();
    let got = m_kappa(1.0, 1.0, &KappaSpec::imaginary_power(1.0)).unwrap();
    assert!((got - want).norm() < 1e-14, "{got}");
    assert_eq!(m_kappa(2.0, 3.0, &KappaSpec::zero()).unwrap(), c(0.0));
}

#[test]
fn riesz_closed_form_matches_laplace_quadrature() {
    let one = KappaSpec::one();
    for i in 0..=20 {
        for j in 1..=20 {
            let (l, a) = (0.5 * i as f64, 0.5 * j as f64);
            let closed = m_kappa(l, a, &one).unwrap();
            let num = m_kappa_numeric(l, a, &one).unwrap();
            assert!((closed - num).norm() < 1e-12, "λ={l} a={a}");
            assert!((closed - l / (l + a)).norm() < 1e-15);
        }
    }
}

#[test]
fn imaginary_power_numeric_path() {
    let k = KappaSpec::imaginary_power(1.0);
    for (l, a) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.5)] {
        let closed = m_kappa(l, a, &k).unwrap();
        let num = m_kappa_numeric(l, a, &k).unwrap();
        assert!((closed - num).norm() < 1e-12, "{l} {a}: {closed} vs {num}");
    }
}

#[test]
fn kappa_values_stay_within_support_and_norm() {
    let k = KappaSpec::new(0.2, 1.0, |r| Complex64::new(0.0, r).exp()).unwrap();
    assert_eq!(k.evaluate(0.1), c(0.0));
    assert_eq!(k.evaluate(0.9), c(0.0));
    for i in 0..=100 {
        assert!(k.evaluate(i as f64 / 100.0).norm() <= k.sup_norm() + 1e-15);
    }
    assert!(KappaSpec::new(0.6, 1.0, |_| c(1.0)).is_err());
}

#[test]
fn kernel_is_linear_in_kappa() {
    let model = EuclideanModel::new(1).unwrap();
    let k1 = KappaSpec::indicator(0.1, 0.9).unwrap();
    let k2 = KappaSpec::new(0.1, 1.0, |r| Complex64::new(r * r, -r)).unwrap();
    let sum = k1.add(&k2);
    let x = ProductPoint::new(vec![0.3], vec![-0.2]);
    let y = ProductPoint::new(vec![0.1], vec![0.4]);
    let lhs = kernel_k(&x, &y, &sum, &model).unwrap();
    let rhs = kernel_k(&x, &y, &k1, &model).unwrap() + kernel_k(&x, &y, &k2, &model).unwrap();
    assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm(), "{lhs} {rhs}");
}

#[test]
fn kernel_bounded_by_absolute_integral() {
    let model = EuclideanModel::new(1).unwrap();
    let kappa = KappaSpec::new(0.1, 1.0, |r| Complex64::new(0.0, 7.0 * r).exp()).unwrap();
    let x = ProductPoint::new(vec![0.4], vec![0.0]);
    let y = ProductPoint::new(vec![-0.3], vec![0.5]);
    let k = kernel_k(&x, &y, &kappa, &model).unwrap();
    let integrand = |r: f64| {
        let p = MehlerParams::new(r, 1).unwrap();
        mehler_dr(&p, &x.x1, &y.x1).unwrap().abs() * model.r_power(r, &x.x2, &y.x2)
    };
    let bound_simpson = simpson(integrand, 0.1, 0.9, 20_000);
    let bound_gl = gauss_legendre(512).mapped(0.1, 0.9).integrate(integrand);
    assert!((bound_simpson - bound_gl).abs() < 1e-8 * bound_gl);
    assert!(k.norm() <= kappa.sup_norm() * bound_gl * (1.0 + 1e-12));
}

#[test]
fn ktilde_is_translation_invariant_in_x1() {
    let model = EuclideanModel::new(2).unwrap();
    let kappa = KappaSpec::indicator(0.05, 0.95).unwrap();
    let x = ProductPoint::new(vec![0.2, -0.1], vec![0.0, 0.3]);
    let y = ProductPoint::new(vec![0.5, 0.4], vec![-0.1, 0.0]);
    let base = kernel_ktilde(&x, &y, &kappa, &model).unwrap();
    for h in [[1.0, 0.0], [-3.5, 2.25]] {
        let xs = ProductPoint::new(vec![x.x1[0] + h[0], x.x1[1] + h[1]], x.x2.clone());
        let ys = ProductPoint::new(vec![y.x1[0] + h[0], y.x1[1] + h[1]], y.x2.clone());
        let moved = kernel_ktilde(&xs, &ys, &kappa, &model).unwrap();
        assert!((moved - base).norm() <= 1e-12 * base.norm());
    }
}

#[test]
fn ktilde_growth_regression() {
    // oracle: Simpson in r of ∂_r W_r(−1) · e^{(log r)Δ}(0, 1) on [0.05, 0.95]
    let model = EuclideanModel::new(1).unwrap();
    let kappa = KappaSpec::indicator(0.05, 0.95).unwrap();
    let x = ProductPoint::new(vec![0.0], vec![0.0]);
    let y = ProductPoint::new(vec![1.0], vec![1.0]);
    let oracle = simpson(
        |r| {
            let p = MehlerParams::new(r, 1).unwrap();
            let t = -r.ln();
            w_dr(&p, &[0.0], &[1.0]).unwrap() * (4.0 * PI * t).powf(-0.5) * (-1.0 / (4.0 * t)).exp()
        },
        0.05,
        0.95,
        20_000,
    );
    let k = kernel_ktilde(&x, &y, &kappa, &model).unwrap();
    assert!((k.re - oracle).abs() < 1e-10 && k.im == 0.0, "{k} vs {oracle}");
    // η = 1, ball volume |B_ℝ(1)|·|B_ℝ(1)| = 4
    let growth = cz_growth_check(&[(x, y)], &kappa, &model).unwrap();
    assert!((growth.sup - 0.167_483_636_441_689_1).abs() < 1e-12, "{}", growth.sup);
    assert!((growth.sup - 4.0 * oracle.abs()).abs() < 1e-9);
}

#[test]
fn local_region_examples_and_symmetry() {
    assert!(in_local_region(&[0.0, 0.0], &[0.0, 0.0], 1.0).unwrap());
    assert!(in_local_region(&[0.0, 0.0], &[1.0, 0.0], 2.0).unwrap());
    assert!(!in_local_region(&[3.0, 0.0], &[4.0, 0.0], 2.0).unwrap());
    for (x, y) in sample_local_pairs(2, 50, 1) {
        for s in [0.5, 1.0, 2.0] {
            assert_eq!(in_local_region(&x, &y, s).unwrap(), in_local_region(&y, &x, s).unwrap());
        }
    }
}

#[test]
fn eta_metric_properties() {
    let model = TorusModel;
    let eta = EtaMetric::new(&model);
    let pairs = sample_pairs(2, 1, 40, 9);
    for w in pairs.windows(2) {
        let (a, b, cc) = (&w[0].0, &w[0].1, &w[1].0);
        assert_eq!(eta.distance(a, b), eta.distance(b, a));
        assert!(eta.distance(a, cc) <= eta.distance(a, b) + eta.distance(b, cc) + 1e-15);
    }
}

#[test]
fn heat_models_conform_to_gaussian_bounds() {
    let mut samples = Vec::new();
    for i in 0..40 {
        let t = 10f64.powf(-3.0 + 5.0 * i as f64 / 39.0);
        for j in 0..=20 {
            let z = j as f64 * 0.15;
            samples.push((t, vec![0.1], vec![0.1 + z]));
        }
    }
    let torus = TorusModel;
    let r = gaussian_bound_ratio(&torus, &samples);
    assert!(r <= 1.0, "torus {r}");
    let e1 = EuclideanModel::new(1).unwrap();
    assert!(gaussian_bound_ratio(&e1, &samples) <= 1.0 + 1e-12);
    let samples2: Vec<_> = samples.iter().map(|(t, x, y)| (*t, vec![x[0], -0.3], vec![y[0], 0.2])).collect();
    let e2 = EuclideanModel::new(2).unwrap();
    assert!(gaussian_bound_ratio(&e2, &samples2) <= 1.0 + 1e-12);
}

#[test]
fn heat_models_are_positive_contractive_and_doubling() {
    let torus = TorusModel;
    let e1 = EuclideanModel::new(1).unwrap();
    for t in [0.01, 0.3, 2.0] {
        let n = 4000;
        let mass_torus: f64 = (0..n).map(|i| torus.kernel(t, &[0.2], &[i as f64 / n as f64])).sum::<f64>() / n as f64;
        assert!((mass_torus - 1.0).abs() < 1e-10);
        let mass_line = simpson(|y| e1.kernel(t, &[0.0], &[y]), -40.0, 40.0, 40_000);
        assert!(mass_line <= 1.0 + 1e-10);
        for y in [0.0, 0.25, 0.5] {
            assert!(torus.kernel(t, &[0.0], &[y]) >= 0.0);
        }
    }
    for radius in [0.01, 0.2, 0.4, 3.0] {
        assert!(torus.ball_volume(&[0.0], 2.0 * radius) <= torus.doubling_constant() * torus.ball_volume(&[0.0], radius));
        assert!(e1.ball_volume(&[0.0], 2.0 * radius) <= e1.doubling_constant() * e1.ball_volume(&[0.0], radius) * (1.0 + 1e-15));
    }
}

fn torus_fixture() -> (jsm_core::spectral::SpectralSystem, ProductOperator<TorusModel>, GridFunction, GridFunction) {
    let k_max = 12;
    let ou = ou_system(1, k_max).unwrap();
    let tor = torus_system(4, false, 24).unwrap();
    let sys = tensor(&ou, &tor).unwrap();
    let mut coeffs = CoefficientVector::new();
    for (i, idx) in sys.indices().iter().enumerate() {
        if i % 3 == 0 {
            coeffs.set(idx.clone(), Complex64::new(1.0 / (1.0 + idx.order() as f64), 0.3));
        }
    }
    let kappa = KappaSpec::indicator(0.1, 0.9).unwrap();
    let spectral = reconstruct(&apply_multiplier(&kappa_multiplier(&kappa), &sys, &coeffs).unwrap(), &sys).unwrap();
    let f = reconstruct(&coeffs, &sys).unwrap();
    let hb = HermiteBasis::with_default_nodes(1, k_max).unwrap();
    let op = ProductOperator::new(hb, tor.grid().clone(), kappa, TorusModel).unwrap();
    let f = GridFunction::new(op.grid().clone(), f.into_values()).unwrap();
    (sys, op, f, spectral)
}

#[test]
fn kernel_path_matches_spectral_path_on_torus() {
    let (sys, op, f, spectral) = torus_fixture();
    assert_eq!(sys.grid().as_ref(), op.grid().as_ref());
    let kernel = op.apply(&f).unwrap();
    let err = kernel.sub(&spectral).unwrap().lp_norm(2.0);
    assert!(err < 1e-5 * spectral.lp_norm(2.0), "{err}");
    assert!(err < 1e-10, "{err}");
}

#[test]
fn local_global_split() {
    let (_, op, f, _) = torus_fixture();
    let full = op.apply(&f).unwrap();
    let (loc, glob) = apply_t_split(&op, &f).unwrap();
    let sum: Vec<Complex64> = loc.values().iter().zip(glob.values()).map(|(a, b)| a + b).collect();
    let scale = full.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (s, t) in sum.iter().zip(full.values()) {
        assert!((s - t).norm() <= 1e-15 * scale);
    }
    let direct = op.localize(2.0).unwrap().apply(&f).unwrap();
    let err = direct.sub(&loc).unwrap().values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(err <= 1e-12 * scale, "{err}");
    assert!(glob.lp_norm(2.0) > 0.0);
}

#[test]
fn rough_cutoff_is_idempotent() {
    let (_, op, f, _) = torus_fixture();
    let once = op.localize(2.0).unwrap();
    let twice = once.localize(2.0).unwrap();
    assert_eq!(once.mask(), twice.mask());
    assert_eq!(once.apply(&f).unwrap().values(), twice.apply(&f).unwrap().values());
    let g = op.globalize(2.0).unwrap();
    assert_eq!(g.globalize(2.0).unwrap().mask(), g.mask());
    // local and global parts of a global operator: the local part vanishes
    let lg = g.localize(2.0).unwrap();
    assert!(lg.mask().unwrap().iter().all(|&m| m == 0.0));
}

#[test]
fn kernel_path_rejects_foreign_grids() {
    let (_, op, _, _) = torus_fixture();
    let other = ou_system(1, 4).unwrap();
    let g = GridFunction::zeros(other.grid().clone());
    assert!(matches!(op.apply(&g), Err(Error::GridMismatch)));
}

// D_I by composite Gauss–Legendre on panels graded geometrically toward r = 1,
// split at the sign changes of ∂_r M_r − ∂_r W_r (located by bisection)
fn di_oracle(x1: &[f64], y1: &[f64]) -> f64 {
    let d = x1.len();
    let g = |r: f64| {
        let p = MehlerParams::new(r, d).unwrap();
        mehler_dr(&p, x1, y1).unwrap() - w_dr(&p, x1, y1).unwrap()
    };
    let mut edges = vec![0.0, 0.5];
    for k in 2..=60 {
        edges.push(1.0 - 0.5f64.powi(k));
    }
    let scan = 20_000;
    for i in 1..scan - 1 {
        let (mut a, mut b) = (i as f64 / scan as f64, (i + 1) as f64 / scan as f64);
        if g(a) * g(b) < 0.0 {
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if g(a) * g(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            edges.push(0.5 * (a + b));
        }
    }
    edges.push(1.0);
    edges.sort_by(f64::total_cmp);
    let rule = gauss_legendre(64);
    let f = |r: f64| if r > 0.0 && r < 1.0 { g(r).abs() } else { 0.0 };
    let mut total = 0.0;
    for w in edges.windows(2) {
        for j in 0..8 {
            let a = w[0] + (w[1] - w[0]) * j as f64 / 8.0;
            let b = w[0] + (w[1] - w[0]) * (j + 1) as f64 / 8.0;
            total += rule.mapped(a, b).integrate(f);
        }
    }
    total
}

#[test]
fn di_regression_d2() {
    let (x, y) = ([0.5, 0.0], [0.6, 0.0]);
    let di = di_integral(&x, &y).unwrap();
    let oracle = di_oracle(&x, &y);
    assert!((di - oracle).abs() < 1e-8 * oracle, "{di} vs {oracle}");
    let ratio = di_bound_ratio(&x, &y, None).unwrap();
    assert!((ratio - 0.075_812_881_309_763_8).abs() < 1e-12, "{ratio}");
    assert!((ratio - di * 0.1 / 1.5).abs() < 1e-15);
}

#[test]
fn di_matches_oracle_on_samples() {
    for (x, y) in sample_local_pairs(2, 8, 21).into_iter().chain(sample_local_pairs(1, 8, 22)) {
        let di = di_integral(&x, &y).unwrap();
        let oracle = di_oracle(&x, &y);
        assert!((di - oracle).abs() < 1e-7 * oracle.max(1.0), "{x:?} {y:?}: {di} vs {oracle}");
    }
}

#[test]
fn di_ratio_bounded_on_n2_sample() {
    let sup = |n| {
        sample_local_pairs(2, n, 7)
            .iter()
            .map(|(x, y)| di_bound_ratio(x, y, None).unwrap())
            .fold(0.0, f64::max)
    };
    let (s100, s200) = (sup(100), sup(200));
    assert!(s100.is_finite() && s100 < 1.0, "{s100}");
    assert!(s200 <= 1.5 * s100, "{s100} {s200}");
}

#[test]
fn di_d1_reports_c0() {
    let pairs = sample_local_pairs(1, 50, 3);
    let c0 = pairs
        .iter()
        .map(|(x, y)| di_c0(x, y).unwrap())
        .fold(0.0, f64::max);
    assert!(c0.is_finite() && c0 > 0.0);
    for (x, y) in &pairs {
        let r = di_bound_ratio(x, y, Some(c0)).unwrap();
        assert!(r <= 1.0 + 1e-12, "{r}");
    }
}

#[test]
fn cz_estimates_finite_and_stable() {
    let model = EuclideanModel::new(1).unwrap();
    let kappa = KappaSpec::indicator(0.05, 0.95).unwrap();
    let g200 = cz_growth_check(&sample_pairs(1, 1, 200, 1), &kappa, &model).unwrap();
    let g400 = cz_growth_check(&sample_pairs(1, 1, 400, 1), &kappa, &model).unwrap();
    assert!(g200.sup.is_finite() && g200.sup > 0.0);
    assert_eq!(g200.evaluated, 200);
    assert!(g400.sup <= 1.5 * g200.sup);
    let s200 = cz_smooth_check(&sample_triples(1, &model, 200, 1), &kappa, &model).unwrap();
    let s400 = cz_smooth_check(&sample_triples(1, &model, 400, 1), &kappa, &model).unwrap();
    assert!(s200.sup.is_finite() && s200.sup > 0.0);
    assert_eq!(s200.filtered, 0);
    assert!(s400.sup <= 1.5 * s200.sup);
}

#[test]
fn cz_smooth_filters_bad_triples() {
    let model = EuclideanModel::new(1).unwrap();
    let kappa = KappaSpec::indicator(0.05, 0.95).unwrap();
    let p = |a: f64, b: f64| ProductPoint::new(vec![a], vec![b]);
    let triples = vec![(p(0.0, 0.0), p(1.0, 0.0), p(1.8, 0.0)), (p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0))];
    let rep = cz_smooth_check(&triples, &kappa, &model).unwrap();
    assert_eq!(rep.filtered, 1);
    assert_eq!(rep.evaluated, 1);
    assert_eq!(rep.sup, 0.0);
}
