//! Exponential integrals. Only what the Wichmann-Kroll transform needs:
//! e^{−x}Ei(x) and e^{x}E₁(x) for x > 0, both O(1/x) at large x.

use crate::error::{domain, Error, Result};
use crate::special_functions::EULER_GAMMA;

const ASYMPTOTIC_MIN: f64 = 40.0;

/// e^{−x}·Ei(x), x > 0.
pub fn ei_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("ei_scaled", format!("requires x > 0, got {x}")));
    }
    if x < ASYMPTOTIC_MIN {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..500 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add <= 1e-17 * sum {
                return Ok((EULER_GAMMA + x.ln() + sum) * (-x).exp());
            }
        }
        Err(Error::NonConvergence {
            func: "ei_scaled",
            iterations: 500,
            estimate: sum,
            error: term,
        })
    } else {
        // Σ k!/x^{k+1}, optimally truncated.
        let mut term = 1.0 / x;
        let mut sum = term;
        for k in 1..200 {
            let next = term * k as f64 / x;
            if next >= term || next <= 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        Ok(sum)
    }
}

/// e^{x}·E₁(x), x > 0. Note Ei(−x) = −E₁(x).
pub fn e1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("e1_scaled", format!("requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..100 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok((-EULER_GAMMA - x.ln() + sum) * x.exp());
    }
    // Modified Lentz on E₁(x)e^x = 1/(x+1− 1²/(x+3− 2²/(x+5− …))).
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        func: "e1_scaled",
        iterations: 1000,
        estimate: h,
        error: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        assert_relative_eq!(ei_scaled(1.0).unwrap() * 1f64.exp(), 1.895_117_816_355_936_755_466_521, max_relative = 1e-15);
        assert_relative_eq!(-e1_scaled(1.0).unwrap() * (-1f64).exp(), -0.219_383_934_395_520_273_677_163_8, max_relative = 1e-14);
        assert_relative_eq!(ei_scaled(30.0).unwrap() * 30f64.exp(), 368_973_209_407.274_197_064_006_3, max_relative = 1e-14);
        assert_relative_eq!(ei_scaled(0.01).unwrap() * 0.01f64.exp(), -4.017_929_465_426_669_365_749_451, max_relative = 1e-14);
        assert_relative_eq!(-e1_scaled(30.0).unwrap() * (-30f64).exp(), -3.021_552_010_688_812_544_815_825e-15, max_relative = 1e-14);
    }

    #[test]
    fn branches_are_continuous() {
        let lo = ei_scaled(ASYMPTOTIC_MIN * (1.0 - 1e-15)).unwrap();
        let hi = ei_scaled(ASYMPTOTIC_MIN).unwrap();
        assert_relative_eq!(lo, hi, max_relative = 1e-13);
        assert_relative_eq!(hi, 0.025_658_862_785_975_145_205_813_39, max_relative = 1e-14);
        assert_relative_eq!(ei_scaled(50.0).unwrap(), 0.020_417_045_555_943_987_333_565_99, max_relative = 1e-14);
        let lo = e1_scaled(1.0).unwrap();
        let hi = e1_scaled(1.0 + 1e-12).unwrap();
        assert_relative_eq!(lo, hi, max_relative = 1e-11);
    }
}
