//! Numerical laboratory for joint spectral multipliers of commuting
//! self-adjoint operators.
//!
//! * [`spectral`]: truncated joint eigen-systems and diagonal multipliers.
//! * [`ou`]: Ornstein–Uhlenbeck operator, Hermite basis, Mehler kernel.
//! * [`analysis`]: Marcinkiewicz norms, Mellin transform, decay checks,
//!   square functions.
//! * [`product`]: Laplace-transform-type multipliers of `(𝓛, A)` and their
//!   kernels, local/global split, Calderón–Zygmund estimates.
//! * [`czd`]: dyadic averages, maximal functions, fibered Calderón–Zygmund
//!   decomposition, weak-L¹ quasinorm, H¹ atoms.

pub mod analysis;
pub mod czd;
pub mod error;
pub mod ou;
pub mod product;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
