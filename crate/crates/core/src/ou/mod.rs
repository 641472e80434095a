//! Ornstein–Uhlenbeck operator: normalized Hermite basis on Gaussian measure,
//! Mehler kernel and the comparison heat kernel `W_r`.

mod hermite;
mod mehler;

pub use hermite::{hermite_1d, hermite_eval, ou_system, ou_system_with_nodes, HermiteBasis};
pub use mehler::{
    heat_kernel_w, mehler_dr, mehler_kernel, w_dr, MehlerParams,
};
