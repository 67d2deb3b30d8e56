mod bessel;
mod expint;
mod gamma;
mod hypergeometric;

pub use bessel::{
    bessel_k0, bessel_k0_scaled, bickley_ki, bickley_ki_scaled, k0_asymptotic_scaled, k0_series, K0_ASYMPTOTIC_MIN,
    K0_SERIES_MAX,
};
pub use expint::{e1_scaled, ei_scaled};
pub use gamma::{digamma, digamma_complex, gamma, ln_gamma, log_gamma_complex};
pub use hypergeometric::{hyp1f1, HYP1F1_MAX_TERMS};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
