//! K₀ and the Bickley functions Ki₁, Ki₂.
//!
//! K₀ uses three branches: the ψ-series below z = 2, the trapezoidal rule on
//! `∫₀^∞ e^{−z cosh t} dt` for 2 < z < 18, and the Hankel asymptotic series
//! above. The asymptotic series alone is only good to ~1e-2 at z = 2, so the
//! middle branch bridges the gap.
//!
//! Kiₙ is always computed from `∫₀^∞ e^{−z cosh t} sechⁿ t dt`. The integrand
//! is analytic in the strip |Im t| < π/2, so the trapezoidal rule converges
//! geometrically in 1/h and nothing fancier is needed.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::special_functions::EULER_GAMMA;

pub const K0_SERIES_MAX: f64 = 2.0;
pub const K0_ASYMPTOTIC_MIN: f64 = 18.0;

/// K₀(z) for z > 0.
pub fn bessel_k0(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_nan() {
        return Err(domain("bessel_k0", format!("requires z > 0, got {z}")));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z <= K0_SERIES_MAX {
        Ok(k0_series(z))
    } else if z < K0_ASYMPTOTIC_MIN {
        Ok(bickley_scaled(0, z)? * (-z).exp())
    } else {
        Ok(k0_asymptotic_scaled(z)? * (-z).exp())
    }
}

/// e^z·K₀(z), finite for arguments where K₀ itself underflows.
pub fn bessel_k0_scaled(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_nan() {
        return Err(domain("bessel_k0_scaled", format!("requires z > 0, got {z}")));
    }
    if z <= K0_SERIES_MAX {
        Ok(k0_series(z) * z.exp())
    } else if z < K0_ASYMPTOTIC_MIN {
        bickley_scaled(0, z)
    } else {
        k0_asymptotic_scaled(z)
    }
}

/// K₀(z) = −(ln(z/2) + γ)·I₀(z) + Σ_{k≥1} H_k (z²/4)^k/(k!)².
pub fn k0_series(z: f64) -> f64 {
    let t = 0.25 * z * z;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= t / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic <= 1e-17 * tail.abs() && term <= 1e-17 * i0 {
            break;
        }
    }
    -((0.5 * z).ln() + EULER_GAMMA) * i0 + tail
}

/// Optimally truncated Hankel expansion of e^z·K₀(z).
pub fn k0_asymptotic_scaled(z: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..200 {
        let m = (2 * k - 1) as f64;
        let next = term * (-(m * m)) / (8.0 * k as f64 * z);
        if next.abs() >= term.abs() {
            if term.abs() > 1e-15 * sum.abs() {
                return Err(Error::NonConvergence {
                    func: "k0_asymptotic",
                    iterations: k,
                    estimate: sum,
                    error: term.abs(),
                });
            }
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    Ok((PI / (2.0 * z)).sqrt() * sum)
}

/// Kiₙ(z) for n ∈ {1, 2}, z ≥ 0.
pub fn bickley_ki(n: u32, z: f64) -> Result<f64> {
    check_bickley(n, z)?;
    if z == 0.0 {
        return Ok(if n == 1 { FRAC_PI_2 } else { 1.0 });
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    Ok(bickley_scaled(n, z)? * (-z).exp())
}

/// e^z·Kiₙ(z) for n ∈ {0, 1, 2}.
pub fn bickley_ki_scaled(n: u32, z: f64) -> Result<f64> {
    if n == 0 {
        return bessel_k0_scaled(z);
    }
    check_bickley(n, z)?;
    if z == 0.0 {
        return Ok(if n == 1 { FRAC_PI_2 } else { 1.0 });
    }
    bickley_scaled(n, z)
}

fn check_bickley(n: u32, z: f64) -> Result<()> {
    if n != 1 && n != 2 {
        return Err(domain("bickley_ki", format!("order must be 1 or 2, got {n}")));
    }
    if !(z >= 0.0) {
        return Err(domain("bickley_ki", format!("requires z >= 0, got {z}")));
    }
    Ok(())
}

/// Trapezoidal rule for ∫₀^∞ e^{−2z sinh²(t/2)} sechⁿ t dt (= e^z Kiₙ(z)).
fn bickley_scaled(n: u32, z: f64) -> Result<f64> {
    let integrand = |t: f64| {
        let s = (0.5 * t).sinh();
        let e = (-2.0 * z * s * s).exp();
        match n {
            0 => e,
            1 => e / t.cosh(),
            _ => {
                let c = t.cosh();
                e / (c * c)
            }
        }
    };
    // Half-width of the peak is ~1/√z; start the step below it.
    let mut h = 0.5f64.min(0.5 / z.sqrt().max(1e-300));
    let sum_at = |h: f64, start: usize, stride: usize| {
        let mut s = 0.0;
        let mut j = start;
        loop {
            let v = integrand(j as f64 * h);
            s += v;
            if v <= 1e-18 * s || j as f64 * h > 750.0 {
                break;
            }
            j += stride;
        }
        s
    };
    let mut total = 0.5 * integrand(0.0) + sum_at(h, 1, 1);
    let mut estimate = h * total;
    for _ in 0..12 {
        h *= 0.5;
        total += sum_at(h, 1, 2);
        let next = h * total;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= 1e-14 * estimate {
            return Ok(estimate);
        }
    }
    Err(Error::NonConvergence {
        func: "bickley_trapezoid",
        iterations: 12,
        estimate,
        error: f64::NAN,
    })
}
