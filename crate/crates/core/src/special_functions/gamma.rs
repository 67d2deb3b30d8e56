use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

// B_{2k}/(2k) for the ψ asymptotic series and B_{2k}/(2k(2k−1)) for Stirling.
const PSI_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];
const SHIFT: f64 = 16.0;

/// ψ(x) for real x, with reflection below 1/2.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("digamma", "argument is NaN"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole { func: "digamma", x });
    }
    if x < 0.5 {
        // ψ(1−x) − ψ(x) = π cot(πx)
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < SHIFT {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut p = inv2;
    for c in PSI_COEFFS {
        series += c * p;
        p *= inv2;
    }
    Ok(acc + y.ln() - 0.5 / y - series)
}

/// ψ(z) for complex z away from the poles at non-positive integers.
pub fn digamma_complex(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 && z.im == 0.0 && z.re == z.re.floor() {
        return Err(Error::Pole { func: "digamma_complex", x: z.re });
    }
    if z.re < 0.5 {
        // Reflection keeps the recurrence from passing close to a pole.
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma_complex(Complex64::new(1.0, 0.0) - z)? - cot * PI);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < SHIFT {
        acc -= w.inv();
        w += 1.0;
    }
    let inv2 = (w * w).inv();
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in PSI_COEFFS {
        series += p * c;
        p *= inv2;
    }
    Ok(acc + w.ln() - w.inv() * 0.5 - series)
}

/// Principal branch of log Γ(z) for Re z > 0.
///
/// The upward shift is accumulated as a sum of principal logarithms of the
/// individual factors, which tracks the branch of log Γ continuously.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(domain("log_gamma_complex", format!("requires Re z > 0, got {z}")));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING_COEFFS {
        series += p * c;
        p *= inv2;
    }
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    Ok((w - 0.5) * w.ln() - w + half_ln_2pi + series - shift)
}

/// Real log Γ(x), x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    Ok(log_gamma_complex(Complex64::new(x, 0.0))?.re)
}

/// Γ(x) for positive real x of modest size.
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x == x.floor() && x < 171.0 {
        let mut p = 1.0;
        for k in 2..(x as u64) {
            p *= k as f64;
        }
        return Ok(p);
    }
    Ok(ln_gamma(x)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::EULER_GAMMA;
    use approx::assert_relative_eq;

    #[test]
    fn digamma_values() {
        assert_relative_eq!(digamma(1.0).unwrap(), -0.577_215_664_901_532_860_606_512, max_relative = 1e-15);
        assert_relative_eq!(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA, max_relative = 1e-14);
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert_relative_eq!(digamma(0.5).unwrap(), half, max_relative = 1e-15);
        assert_relative_eq!(half, -1.963_510_026_021_423_479_440_976, max_relative = 1e-15);
        assert!((digamma(-0.5).unwrap() - (digamma(0.5).unwrap() + 2.0)).abs() < 1e-14);
        assert!(matches!(digamma(0.0), Err(Error::Pole { .. })));
        assert!(matches!(digamma(-3.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn complex_digamma_values() {
        let a = digamma_complex(Complex64::new(0.0, -2.0)).unwrap();
        assert_relative_eq!(a.re, 0.714_591_515_373_977_526_656_869_9, max_relative = 1e-14);
        assert_relative_eq!(a.im, -1.820_807_282_642_230_228_386_088, max_relative = 1e-14);
        let b = digamma_complex(Complex64::new(0.1, -5.0)).unwrap();
        assert_relative_eq!(b.re, 1.610_981_551_411_187_524_833_111, max_relative = 1e-14);
        assert_relative_eq!(b.im, -1.650_893_332_320_288_003_472_29, max_relative = 1e-14);
        let c = digamma_complex(Complex64::new(2.5, 0.0)).unwrap();
        assert_relative_eq!(c.re, digamma(2.5).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma_complex(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert_relative_eq!(log_gamma_complex(Complex64::new(5.0, 0.0)).unwrap().re, 24f64.ln(), max_relative = 1e-15);
        let v = log_gamma_complex(Complex64::new(3.0, 4.0)).unwrap();
        assert_relative_eq!(v.re, -1.756_626_784_603_784_110_530_604, max_relative = 1e-14);
        assert_relative_eq!(v.im, 4.742_664_438_034_657_928_194_889, max_relative = 1e-14);
        // |Γ(1+iη)|² = πη/sinh(πη)
        let g = log_gamma_complex(Complex64::new(1.0, 1.0)).unwrap();
        assert_relative_eq!((2.0 * g.re).exp(), PI / PI.sinh(), max_relative = 1e-13);
        assert!(log_gamma_complex(Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn gamma_integers() {
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
    }
}
