use jsm_core::ou::{ou_system, HermiteBasis};
use jsm_core::product::{
    apply_t_split, kappa_multiplier, torus_default_points, torus_system, KappaSpec, ProductOperator, TorusModel,
};
use jsm_core::spectral::{apply_multiplier, multiplier, reconstruct, tensor, CoefficientVector, GridFunction};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::report::{fmt_f64, Outcome, Table};

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let k_max = cfg.usize_in("k_max", 12, 1, 40)?;
    let j_max = cfg.usize_in("j_max", 4, 1, 32)?;
    let points = cfg.usize_in("points", torus_default_points(j_max), 2 * j_max + 1, 4096)?;
    let eps = cfg.f64_in("eps", 0.1, |x| x > 0.0 && x < 0.5, "0 < eps < 1/2")?;
    let inputs = cfg.usize_in("inputs", 5, 1, 100)?;
    let tol = cfg.f64_in("tolerance", 1e-5, |x| x > 0.0, "positive")?;
    let seed = cfg.seed()?;

    let ou = ou_system(1, k_max)?;
    let tor = torus_system(j_max, false, points)?;
    let sys = tensor(&ou, &tor)?;
    let kappa = KappaSpec::indicator(eps, 1.0 - eps)?;
    let m = kappa_multiplier(&kappa);
    let op = ProductOperator::new(HermiteBasis::with_default_nodes(1, k_max)?, tor.grid().clone(), kappa, TorusModel)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<CoefficientVector> = (0..inputs)
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

    let (r0, r1) = (multiplier::riesz_joint(2, 0), multiplier::riesz_joint(2, 1));
    let mut identity_defect: f64 = 0.0;
    let mut worst: f64 = 0.0;
    let mut split_defect: f64 = 0.0;
    let mut table = Table::new("cross_check", &["input", "spectral_l2", "kernel_error_l2", "rel_error", "split_residual"]);
    for (i, c) in coeffs.iter().enumerate() {
        let sum = apply_multiplier(&r0, &sys, c)?.add(&apply_multiplier(&r1, &sys, c)?);
        identity_defect = identity_defect.max(sum.max_abs_diff(c));

        let spectral = reconstruct(&apply_multiplier(&m, &sys, c)?, &sys)?;
        let f = GridFunction::new(op.grid().clone(), reconstruct(c, &sys)?.into_values())?;
        let kernel = op.apply(&f)?;
        let spectral = GridFunction::new(op.grid().clone(), spectral.into_values())?;
        let norm = spectral.lp_norm(2.0);
        let err = kernel.sub(&spectral)?.lp_norm(2.0);
        let rel = err / norm;
        worst = worst.max(rel);

        let (loc, glob) = apply_t_split(&op, &f)?;
        let rebuilt: Vec<Complex64> = loc.values().iter().zip(glob.values()).map(|(a, b)| a + b).collect();
        let split = GridFunction::new(op.grid().clone(), rebuilt)?.sub(&kernel)?.lp_norm(2.0) / norm;
        split_defect = split_defect.max(split);
        table.push(vec![i.to_string(), fmt_f64(norm), fmt_f64(err), fmt_f64(rel), fmt_f64(split)]);
    }

    let mut out = Outcome::default();
    out.result("riesz_identity_defect", identity_defect);
    out.result("max_rel_error", worst);
    out.result("max_split_residual", split_defect);
    out.check("riesz_identity", identity_defect <= 1e-12, fmt_f64(identity_defect));
    out.check("kernel_matches_spectral", worst <= tol, format!("max relative L2 error {}", fmt_f64(worst)));
    out.check("split_additive", split_defect <= 1e-12, fmt_f64(split_defect));
    out.tables.push(table);
    Ok(out)
}
