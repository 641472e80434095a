//! Dyadic analysis on the model spaces: generation averages, the dyadic
//! maximal function, a fibered Calderón–Zygmund decomposition, the weak-`L¹`
//! quasinorm and `H¹` atoms.

mod atoms;
mod decompose;
mod dyadic;
mod weak;

pub use atoms::{grid_ball_measure, l1_h1_norm, validate_atom, Atom, AtomicTerm};
pub use decompose::{cz_decompose, BadPart, CzProperties, CzResult};
pub use dyadic::{dq_maximal, dyadic_average, dyadic_maximal, DyadicBase, DyadicCube, DyadicSystem};
pub use weak::{weak_quasinorm, weak_quasinorm_with};
