//! Radial Fourier transforms ("spectral functions") of the vacuum-polarization
//! potentials, `v(k) = 4π∫₀^∞ j₀(kr) V(r) r² dr`.
//!
//! For each potential three things are available side by side: the formula
//! as published (`*_as_printed`), an oscillatory-quadrature oracle, and a
//! re-derived closed form (`*_corrected`) that agrees with the oracle. The
//! published Uehling transform has the wrong sign on its logarithm (and a
//! further factor slip when rewritten in k); the published Wichmann-Kroll
//! transform is that of `−c/(r²+α²)²`, i.e. it lost the 1/r of the
//! regularized potential. See [`crate::ledger`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::error::{ensure_positive, Error, Result};
use crate::potentials::{uehling_closed, wichmann_kroll_regularized};
use crate::quadrature::{sine_transform, EvalAccuracy};
use crate::special_functions::{e1_scaled, ei_scaled};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralSource {
    ClosedForm,
    QuadratureOracle,
    CorrectedClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub k: f64,
    pub u_k: f64,
    pub u_tilde_k: f64,
    pub w_k: f64,
    #[serde(rename = "W_k_field")]
    pub w_k_field: f64,
    pub source: SpectralSource,
}

/// `4π∫₀^∞ j₀(kr) V(r) r² dr = (4π/k)∫₀^∞ sin(kr)·rV(r) dr`.
///
/// `r_times_v` must return r·V(r); passing the product avoids a 0·∞ at the
/// origin for Coulomb-like potentials.
pub fn spectral_oracle<F: Fn(f64) -> f64>(r_times_v: F, k: f64, acc: &EvalAccuracy) -> Result<f64> {
    ensure_positive("spectral_oracle", "k", k)?;
    let s = sine_transform(|r| if r == 0.0 { 0.0 } else { r_times_v(r) }, k, acc)?;
    Ok(4.0 * PI / k * s.value)
}

pub fn uehling_spectral_oracle(k: f64, ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<f64> {
    ensure_positive("uehling_spectral_oracle", "k", k)?;
    if ctx.alpha == 0.0 || ctx.charge_product() == 0.0 {
        return Ok(0.0);
    }
    spectral_oracle(|r| r * uehling_closed(r, ctx).unwrap_or(f64::NAN), k, acc)
}

pub fn wk_spectral_oracle(k: f64, ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<f64> {
    ensure_positive("wk_spectral_oracle", "k", k)?;
    if ctx.alpha == 0.0 || ctx.charge_product() == 0.0 {
        return Ok(0.0);
    }
    spectral_oracle(|r| r * wichmann_kroll_regularized(r, ctx).unwrap_or(f64::NAN), k, acc)
}

/// `L(a) = ln((√(1+a²)+a)/(√(1+a²)−a)) = 2 asinh a`.
fn log_ratio(a: f64) -> f64 {
    2.0 * a.asinh()
}

/// Uehling transform in k exactly as published:
/// `(8αQ/3k²)[−5/6 + 2/x − (√(x+4)/√x)(1 − 2/x)L]`, x = α²k².
pub fn uehling_spectral_as_printed(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_spectral_as_printed", "k", k)?;
    let (alpha, q) = (ctx.alpha, ctx.charge_product());
    if alpha == 0.0 || q == 0.0 {
        return Ok(0.0);
    }
    let ak = alpha * k;
    let x = ak * ak;
    let bracket = -5.0 / 6.0 + 2.0 / x - ((x + 4.0).sqrt() / ak) * (1.0 - 2.0 / x) * log_ratio(ak / 2.0);
    Ok(8.0 * alpha * q / (3.0 * k * k) * bracket)
}

/// The same transform in the variable a = kα/2, as published:
/// `(α³Q/3a²)[−5/3 + 1/a² − ½(√(a²+1)/a)(2 − 1/a²)L]`.
pub fn uehling_spectral_as_printed_in_a(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_spectral_as_printed_in_a", "k", k)?;
    let (alpha, q) = (ctx.alpha, ctx.charge_product());
    if alpha == 0.0 || q == 0.0 {
        return Ok(0.0);
    }
    let a = 0.5 * k * alpha;
    let a2 = a * a;
    let bracket = -5.0 / 3.0 + 1.0 / a2 - 0.5 * ((a2 + 1.0).sqrt() / a) * (2.0 - 1.0 / a2) * log_ratio(a);
    Ok(alpha.powi(3) * q / (3.0 * a2) * bracket)
}

/// `I(a) = ∫₁^∞ (1 + 1/2t²)√(t²−1)/(t²(t²+a²)) dt`, with I(0) = 2/5.
pub fn uehling_spectral_kernel(a: f64) -> Result<f64> {
    if a < 0.3 {
        return kernel_series(a);
    }
    let a2 = a * a;
    let bracket = -5.0 / 3.0 + 1.0 / a2 + 0.5 * ((a2 + 1.0).sqrt() / a) * (2.0 - 1.0 / a2) * log_ratio(a);
    Ok(bracket / (2.0 * a2))
}

/// Σ (−a²)ⁿ [J(2n+4) + ½J(2n+6)], J(m) = ∫₁^∞ √(t²−1) t^{−m} dt
/// = ½B(m/2−1, 3/2), generated by J(4) = 1/3, J(m+2) = J(m)(m−2)/(m+1).
fn kernel_series(a: f64) -> Result<f64> {
    let x = -a * a;
    let mut p = 1.0;
    let mut j = 1.0 / 3.0;
    let mut sum = 0.0;
    for n in 0..200 {
        let m = 2.0 * n as f64 + 4.0;
        let j_next = j * (m - 2.0) / (m + 1.0);
        let term = p * (j + 0.5 * j_next);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
        p *= x;
        j = j_next;
    }
    Err(Error::NonConvergence {
        func: "uehling_spectral_kernel",
        iterations: 200,
        estimate: sum,
        error: f64::NAN,
    })
}

/// Re-derived Uehling transform, `u(k) = (2α³Q/3)·I(kα/2)`.
pub fn uehling_spectral_corrected(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_spectral_corrected", "k", k)?;
    let (alpha, q) = (ctx.alpha, ctx.charge_product());
    if alpha == 0.0 || q == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * alpha.powi(3) * q / 3.0 * uehling_spectral_kernel(0.5 * k * alpha)?)
}

/// Ũ(k) = k²u(k)/4π from the oracle-validated transform.
pub fn uehling_field_factor(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    Ok(k * k * uehling_spectral_corrected(k, ctx)? / (4.0 * PI))
}

/// Ũ(k) as published, `(2αQ/3π)[−5/6 + 2/x − (√(x+4)/√x)(1 − 2/x)L]`.
pub fn uehling_field_factor_as_printed(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_field_factor_as_printed", "k", k)?;
    let (alpha, q) = (ctx.alpha, ctx.charge_product());
    if alpha == 0.0 || q == 0.0 {
        return Ok(0.0);
    }
    let ak = alpha * k;
    let x = ak * ak;
    let bracket = -5.0 / 6.0 + 2.0 / x - ((x + 4.0).sqrt() / ak) * (1.0 - 2.0 / x) * log_ratio(ak / 2.0);
    Ok(2.0 * alpha * q / (3.0 * PI) * bracket)
}

/// The constant part of Ũ, −5αQ/9π, read as an effective charge shift
/// Q → Q(1 − 5α/9π).
pub fn screening_constant(ctx: &PhysicalContext) -> f64 {
    -5.0 * ctx.alpha * ctx.charge_product() / (9.0 * PI)
}

pub fn screening_factor(alpha: f64) -> f64 {
    1.0 - 5.0 * alpha / (9.0 * PI)
}

/// Published Wichmann-Kroll transform, `−(2πQ³α⁶/225)e^{−kα}`.
pub fn wk_spectral_closed(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("wk_spectral_closed", "k", k)?;
    let q = ctx.charge_product();
    let a = ctx.alpha;
    Ok(-2.0 * PI * q.powi(3) * a.powi(6) / 225.0 * (-k * a).exp())
}

/// Published field factor, `−(Q³α⁶/450)k²e^{−kα}`.
pub fn wk_field_factor(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("wk_field_factor", "k", k)?;
    let q = ctx.charge_product();
    let a = ctx.alpha;
    Ok(-q.powi(3) * a.powi(6) / 450.0 * k * k * (-k * a).exp())
}

/// `∫₀^∞ sin(kr)/(r²+β²)² dr = g/(4β³) + k·h/(4β²)` with
/// g = e^{−a}Ei(a) − e^{a}Ei(−a), h = e^{−a}Ei(a) + e^{a}Ei(−a), a = kβ.
pub fn sine_lorentzian_squared(k: f64, beta: f64) -> Result<f64> {
    let a = k * beta;
    let ep = ei_scaled(a)?;
    let em = e1_scaled(a)?; // e^{a}Ei(−a) = −em
    let g = ep + em;
    let h = ep - em;
    Ok(g / (4.0 * beta.powi(3)) + k * h / (4.0 * beta * beta))
}

/// Transform of the regularized Wichmann-Kroll potential,
/// `−(4πc/k)∫₀^∞ sin(kr)/(r²+α²)² dr`, c = 2Q³α⁷/225π. Tends to
/// −4Q³α⁵/225 as k → 0.
pub fn wk_spectral_corrected(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("wk_spectral_corrected", "k", k)?;
    let (alpha, q) = (ctx.alpha, ctx.charge_product());
    if alpha == 0.0 || q == 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 * q.powi(3) * alpha.powi(7) / (225.0 * PI);
    Ok(-4.0 * PI * c / k * sine_lorentzian_squared(k, alpha)?)
}

pub fn wk_field_factor_corrected(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    Ok(k * k * wk_spectral_corrected(k, ctx)? / (4.0 * PI))
}

/// One row of each flavour at wave number k.
pub fn spectral_samples(k: f64, ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<[SpectralSample; 3]> {
    let field = |v: f64| k * k * v / (4.0 * PI);
    let printed_u = uehling_spectral_as_printed(k, ctx)?;
    let printed_w = wk_spectral_closed(k, ctx)?;
    let oracle_u = uehling_spectral_oracle(k, ctx, acc)?;
    let oracle_w = wk_spectral_oracle(k, ctx, acc)?;
    let corr_u = uehling_spectral_corrected(k, ctx)?;
    let corr_w = wk_spectral_corrected(k, ctx)?;
    Ok([
        SpectralSample {
            k,
            u_k: printed_u,
            u_tilde_k: field(printed_u),
            w_k: printed_w,
            w_k_field: field(printed_w),
            source: SpectralSource::ClosedForm,
        },
        SpectralSample {
            k,
            u_k: oracle_u,
            u_tilde_k: field(oracle_u),
            w_k: oracle_w,
            w_k_field: field(oracle_w),
            source: SpectralSource::QuadratureOracle,
        },
        SpectralSample {
            k,
            u_k: corr_u,
            u_tilde_k: field(corr_u),
            w_k: corr_w,
            w_k_field: field(corr_w),
            source: SpectralSource::CorrectedClosedForm,
        },
    ])
}
