//! Quantitative side of the Marcinkiewicz calculus: dyadic seminorms, the
//! Mellin transform, decay of `𝓜(m_{N,t})`, rotated boundary multipliers,
//! the order threshold and the square function `g_N`.

mod decay;
mod marcinkiewicz;
mod mellin;
mod rotation;
mod square;

pub use decay::{decay_check, fit_slope, make_mnt, DecayReport};
pub use marcinkiewicz::{box_integral, mar_norm, marcinkiewicz_seminorm, DyadicRange, MarcOrder};
pub use mellin::{
    mellin, mellin_inverse, mellin_spectrum, plancherel_residual, LogGrid, MellinSampler,
    MellinSpectrum, UWindow, TAU_TAIL,
};
pub use rotation::{phi_star, required_order, required_order_worst_case, rotate_multiplier, DecayProfile};
pub use square::{square_function, SquareFunctionParams, TAxis};

/// `n` points log-spaced on `[a, b]`, endpoints included.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0 && n >= 1);
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
