//! The cubic for the radial field of a point charge with the lowest-order
//! nonlinear (Euler–Heisenberg) correction,
//!     λ y³ + y + Q/r² = 0,   y = dφ/dr,
//! which in monic form reads y³ + p y + q/r² = 0 with p = 1/λ, q = Q/λ.
//!
//! Internally r is measured in units of α and y in units of Q/α², where the
//! cubic becomes η³ + pη + p/s² = 0 with p = 45π/(2Q²α³).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::error::{domain, ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl CubicCoefficients {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        ensure_positive("CubicCoefficients", "p", p)?;
        ensure_positive("CubicCoefficients", "r", r)?;
        if !q.is_finite() {
            return Err(domain("CubicCoefficients", "q must be finite"));
        }
        Ok(Self { p, q, r })
    }

    fn constant(&self) -> f64 {
        self.q / (self.r * self.r)
    }

    /// (q/2r²)² + (p/3)³, positive whenever p > 0.
    pub fn discriminant(&self) -> f64 {
        let c = self.constant();
        0.25 * c * c + (self.p / 3.0).powi(3)
    }

    pub fn residual(&self, y: f64) -> f64 {
        y * y * y + self.p * y + self.constant()
    }
}

/// Formula as printed: ∛(−c/2 + √D) + ∛(−c/2 − √D). Loses all digits once
/// the two cube roots nearly cancel.
pub fn cardano_as_printed(coeffs: &CubicCoefficients) -> f64 {
    let c = coeffs.constant();
    let sd = coeffs.discriminant().sqrt();
    (-0.5 * c + sd).cbrt() + (-0.5 * c - sd).cbrt()
}

/// The real root without cancellation: with A = −sgn(c)∛(|c|/2 + √D), the
/// second cube root is −p/(3A), so y = A − p/(3A). Two Newton steps polish.
pub fn cardano_real_root(coeffs: &CubicCoefficients) -> f64 {
    let c = coeffs.constant();
    if c == 0.0 {
        return 0.0;
    }
    let p = coeffs.p;
    let sd = coeffs.discriminant().sqrt();
    let a = -c.signum() * (0.5 * c.abs() + sd).cbrt();
    let mut y = a - p / (3.0 * a);
    for _ in 0..2 {
        let f = coeffs.residual(y);
        let df = 3.0 * y * y + p;
        let step = f / df;
        if !step.is_finite() || step == 0.0 {
            break;
        }
        y -= step;
    }
    y
}

/// λ = 2α⁷/(45π) in atomic units: the coefficient of y³.
pub fn nonlinear_coefficient(ctx: &PhysicalContext) -> f64 {
    2.0 * ctx.alpha.powi(7) / (45.0 * PI)
}

/// Monic coefficients at r (in units of α), for charge product `ctx`.
pub fn scaled_coefficients(s: f64, ctx: &PhysicalContext) -> Result<CubicCoefficients> {
    ctx.validate()?;
    let q = ctx.charge_product();
    let a = ctx.alpha;
    if q == 0.0 || a == 0.0 {
        return Err(domain("scaled_coefficients", "the cubic degenerates for zero charge or alpha"));
    }
    let p = 45.0 * PI / (2.0 * q * q * a.powi(3));
    CubicCoefficients::new(p, p, s)
}

/// dφ/dr (atomic units) from the cubic.
pub fn field_derivative(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("field_derivative", "r", r)?;
    let q = ctx.charge_product();
    if q == 0.0 {
        return Ok(0.0);
    }
    if ctx.alpha == 0.0 {
        return Ok(-q / (r * r));
    }
    let a = ctx.alpha;
    let coeffs = scaled_coefficients(r / a, ctx)?;
    Ok(cardano_real_root(&coeffs) * q / (a * a))
}

/// y + Q/r², i.e. the nonlinear part of the field. From the cubic this is
/// exactly −λy³, which avoids subtracting two nearly equal numbers.
pub fn nonlinear_field_shift(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    let y = field_derivative(r, ctx)?;
    Ok(-nonlinear_coefficient(ctx) * y * y * y)
}

/// ψ(r) = −λQ³/(5r⁵): the first-order solution, i.e. the unregularized
/// Wichmann-Kroll potential.
pub fn field_correction_psi(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("field_correction_psi", "r", r)?;
    let q = ctx.charge_product();
    Ok(-nonlinear_coefficient(ctx) * q * q * q / (5.0 * r.powi(5)))
}

/// ψ′(r) = λQ³/r⁶.
pub fn field_correction_psi_derivative(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("field_correction_psi_derivative", "r", r)?;
    let q = ctx.charge_product();
    Ok(nonlinear_coefficient(ctx) * q * q * q / r.powi(6))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub regime: Regime,
    pub description: String,
    /// y ≈ coefficient · r^exponent
    pub exponent: f64,
    pub coefficient: f64,
}

/// Leading behavior of the real root.
pub fn appendix_asymptotes(regime: Regime, coeffs: &CubicCoefficients) -> AsymptoteReport {
    match regime {
        Regime::Small => {
            let c = coeffs.q.signum() * coeffs.q.abs().cbrt();
            AsymptoteReport {
                regime,
                description: format!("y ~ -q^(1/3) r^(-2/3), phi ~ -3 q^(1/3) r^(1/3) + c with q^(1/3) = {c:e}"),
                exponent: -2.0 / 3.0,
                coefficient: -c,
            }
        }
        Regime::Large => AsymptoteReport {
            regime,
            description: format!(
                "y ~ -(q/p) r^(-2), phi ~ (q/p)/r + c with q/p = {:e}; the cube roots cancel, there is no linear growth",
                coeffs.q / coeffs.p
            ),
            exponent: -2.0,
            coefficient: -coeffs.q / coeffs.p,
        },
    }
}

/// Least-squares slope of ln|y| against ln r over `points` log-spaced radii.
pub fn log_log_slope(p: f64, q: f64, r_lo: f64, r_hi: f64, points: usize) -> Result<f64> {
    if points < 2 || !(r_hi > r_lo) {
        return Err(domain("log_log_slope", "need at least two points on a non-empty interval"));
    }
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let r = r_lo * (r_hi / r_lo).powf(i as f64 / (points - 1) as f64);
        let y = cardano_real_root(&CubicCoefficients::new(p, q, r)?);
        xs.push(r.ln());
        ys.push(y.abs().ln());
    }
    let n = points as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
