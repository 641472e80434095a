//! Laplace-transform-type multipliers `m_κ(𝓛, A)` on a product space, their
//! integral kernels and Calderón–Zygmund-type estimates.

mod cz;
mod di;
mod heat;
mod kappa;
mod kernel;
mod split;

pub use cz::{cz_growth_check, cz_smooth_check, sample_pairs, sample_triples, CzReport};
pub use di::{di_bound_ratio, di_c0, di_integral, sample_local_pairs};
pub use heat::{
    gaussian_bound_ratio, torus_default_points, torus_system, unit_ball_volume, wrap, EuclideanModel, HeatKernelModel,
    TorusModel,
};
pub use kappa::{kappa_multiplier, m_kappa, m_kappa_numeric, KappaSpec, DEFAULT_EPS, R_NODES};
pub use kernel::{in_local_region, kernel_k, kernel_ktilde, EtaMetric, ProductPoint};
pub use split::{apply_t_split, ProductOperator};
