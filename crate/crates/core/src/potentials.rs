//! Uehling and Wichmann-Kroll potentials and the total interaction Φ.
//!
//! Throughout, `z = 2r/α` and the Uehling potential is written
//! `U(r) = (2α·cp/3πr)·I(z)` with
//! `I(z) = ∫₁^∞ e^{−zξ}(1 + 1/2ξ²)√(ξ²−1)/ξ² dξ`, where `cp` is the charge
//! product of the context (Q or q₁q₂).

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{exp_sinh, EvalAccuracy};
use crate::special_functions::{bessel_k0_scaled, bickley_ki_scaled, gamma, EULER_GAMMA};

/// Above this z the bracket of the closed form is replaced by its
/// asymptotic expansion. The closed-form bracket cancels like z³/18 while
/// the asymptotic series is good to ~n³e^{−z}; at z = 50 both are near
/// machine precision.
pub const CLOSED_FORM_ASYMPTOTIC_SWITCH: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub r: f64,
    pub coulomb: f64,
    pub uehling: f64,
    pub wichmann_kroll: f64,
    pub total: f64,
}

fn prefactor(r: f64, ctx: &PhysicalContext) -> f64 {
    2.0 * ctx.alpha * ctx.charge_product() / (3.0 * PI * r)
}

/// The defining integral, evaluated by exp-sinh quadrature. This is the
/// reference against which the closed form is checked.
pub fn uehling_integral(r: f64, ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<f64> {
    ensure_positive("uehling_integral", "r", r)?;
    if ctx.alpha == 0.0 || ctx.charge_product() == 0.0 {
        return Ok(0.0);
    }
    let z = 2.0 * r / ctx.alpha;
    Ok(prefactor(r, ctx) * uehling_kernel_integral(z, acc)?)
}

/// I(z) by quadrature, with ξ = 1 + s and √(ξ²−1) = √(s(2+s)).
pub fn uehling_kernel_integral(z: f64, acc: &EvalAccuracy) -> Result<f64> {
    let integrand = |s: f64| {
        let xi = 1.0 + s;
        let xi2 = xi * xi;
        (-z * s).exp() * (1.0 + 0.5 / xi2) * (s * (2.0 + s)).sqrt() / xi2
    };
    let q = exp_sinh(integrand, acc).map_err(|e| match e {
        Error::Quadrature { achieved, requested, .. } => Error::Quadrature {
            func: "uehling_integral",
            achieved,
            requested,
        },
        other => other,
    })?;
    Ok(q.value * (-z).exp())
}

/// e^z·I(z) from the closed form
/// `(1 + z²/12)K₀(z) − (z/12)Ki₁(z) − (5/6 + z²/12)Ki₂(z)`.
pub fn uehling_bracket_scaled(z: f64) -> Result<f64> {
    let z2 = z * z / 12.0;
    let k0 = bessel_k0_scaled(z)?;
    let ki1 = bickley_ki_scaled(1, z)?;
    let ki2 = bickley_ki_scaled(2, z)?;
    Ok((1.0 + z2) * k0 - (z / 12.0) * ki1 - (5.0 / 6.0 + z2) * ki2)
}

const WATSON_TERMS: usize = 160;

/// Taylor coefficients of h(s) = [(1+s)^{-2} + ½(1+s)^{-4}]·√(2+s), so that
/// e^z·I(z) = ∫₀^∞ e^{−zs} √s h(s) ds.
fn watson_coefficients() -> &'static [f64; WATSON_TERMS] {
    static COEFFS: OnceLock<[f64; WATSON_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut a = [0.0; WATSON_TERMS];
        let mut b = [0.0; WATSON_TERMS];
        let mut binom_half = 1.0;
        for n in 0..WATSON_TERMS {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let c3 = (nf + 1.0) * (nf + 2.0) * (nf + 3.0) / 6.0;
            a[n] = sign * ((nf + 1.0) + 0.5 * c3);
            if n > 0 {
                binom_half *= (0.5 - (nf - 1.0)) / nf;
            }
            b[n] = 2f64.sqrt() * binom_half / 2f64.powi(n as i32);
        }
        let mut c = [0.0; WATSON_TERMS];
        for n in 0..WATSON_TERMS {
            c[n] = (0..=n).map(|j| a[j] * b[n - j]).sum();
        }
        c
    })
}

/// e^z·I(z) from Watson's lemma, optimally truncated. Accurate to roughly
/// n³e^{−z}; intended for z ≥ [`CLOSED_FORM_ASYMPTOTIC_SWITCH`].
pub fn uehling_bracket_asymptotic_scaled(z: f64) -> Result<f64> {
    ensure_positive("uehling_bracket_asymptotic", "z", z)?;
    let c = watson_coefficients();
    let mut g = gamma(1.5)? / (z * z.sqrt());
    let mut sum = c[0] * g;
    let mut prev = sum.abs();
    for (n, &cn) in c.iter().enumerate().skip(1) {
        g *= (n as f64 + 0.5) / z;
        let term = cn * g;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        if n as f64 > z && term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
    }
    Ok(sum)
}

/// Closed form; switches to the asymptotic combination for z ≥ 50.
pub fn uehling_closed(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_closed", "r", r)?;
    if ctx.alpha == 0.0 || ctx.charge_product() == 0.0 {
        return Ok(0.0);
    }
    let z = 2.0 * r / ctx.alpha;
    let scaled = if z >= CLOSED_FORM_ASYMPTOTIC_SWITCH {
        uehling_bracket_asymptotic_scaled(z)?
    } else {
        uehling_bracket_scaled(z)?
    };
    Ok(prefactor(r, ctx) * scaled * (-z).exp())
}

/// Closed form without the large-z switch; for diagnostics.
pub fn uehling_closed_direct(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_closed_direct", "r", r)?;
    if ctx.alpha == 0.0 || ctx.charge_product() == 0.0 {
        return Ok(0.0);
    }
    let z = 2.0 * r / ctx.alpha;
    Ok(prefactor(r, ctx) * uehling_bracket_scaled(z)? * (-z).exp())
}

/// Regrouped form `(cp/9πz)[(q+1)K₀ − zKi₁ − (q−1)Ki₂]`, q = z² + 11.
///
/// Note the α-independence: with z = 2r/α the prefactor 2α/(3πr) is
/// 4/(3πz).
pub fn uehling_tridiagonal(z: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_tridiagonal", "z", z)?;
    let cp = ctx.charge_product();
    if cp == 0.0 {
        return Ok(0.0);
    }
    let q = z * z + 11.0;
    let k0 = bessel_k0_scaled(z)?;
    let ki1 = bickley_ki_scaled(1, z)?;
    let ki2 = bickley_ki_scaled(2, z)?;
    Ok(cp / (9.0 * PI * z) * ((q + 1.0) * k0 - z * ki1 - (q - 1.0) * ki2) * (-z).exp())
}

/// The q-grouped line exactly as typeset, `(q−1)K₀ … (q+1)Ki₂`. It does not
/// equal the closed form; kept so the discrepancy can be quantified.
pub fn uehling_tridiagonal_as_printed(z: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_tridiagonal_as_printed", "z", z)?;
    let cp = ctx.charge_product();
    let q = z * z + 11.0;
    let k0 = bessel_k0_scaled(z)?;
    let ki1 = bickley_ki_scaled(1, z)?;
    let ki2 = bickley_ki_scaled(2, z)?;
    Ok(cp / (9.0 * PI * z) * ((q - 1.0) * k0 - z * ki1 - (q + 1.0) * ki2) * (-z).exp())
}

/// Short-distance form `(cp/r)(α/3π)[−5/3 − 2γ + 2 ln α − 2 ln r]`.
pub fn uehling_asymptote_small_r(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_asymptote_small_r", "r", r)?;
    if ctx.alpha == 0.0 {
        return Ok(0.0);
    }
    let a = ctx.alpha;
    let bracket = -5.0 / 3.0 - 2.0 * EULER_GAMMA + 2.0 * a.ln() - 2.0 * r.ln();
    Ok(ctx.charge_product() / r * (a / (3.0 * PI)) * bracket)
}

/// Leading long-distance form `(cp/r)·α^{5/2}/(4√π r^{3/2})·e^{−2r/α}`.
pub fn uehling_asymptote_large_r(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("uehling_asymptote_large_r", "r", r)?;
    if ctx.alpha == 0.0 {
        return Ok(0.0);
    }
    let a = ctx.alpha;
    Ok(ctx.charge_product() / r * a.powf(2.5) / (4.0 * PI.sqrt() * r.powf(1.5)) * (-2.0 * r / a).exp())
}

/// `−2 cp³ α⁷/(225π r⁵)`, singular at the origin. For comparison only.
pub fn wichmann_kroll_raw(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("wichmann_kroll_raw", "r", r)?;
    let cp = ctx.charge_product();
    Ok(-2.0 * cp.powi(3) * ctx.alpha.powi(7) / (225.0 * PI * r.powi(5)))
}

/// `−2 cp³ α⁷/(225π r (r² + α²)²)`, the form used everywhere else.
pub fn wichmann_kroll_regularized(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("wichmann_kroll_regularized", "r", r)?;
    let cp = ctx.charge_product();
    let a = ctx.alpha;
    let d = r * r + a * a;
    Ok(-2.0 * cp.powi(3) * a.powi(7) / (225.0 * PI * r * d * d))
}

/// Coulomb + Uehling + regularized Wichmann-Kroll.
pub fn total_potential(r: f64, ctx: &PhysicalContext) -> Result<PotentialSample> {
    ensure_positive("total_potential", "r", r)?;
    ctx.validate()?;
    let coulomb = ctx.charge_product() / r;
    let uehling = uehling_closed(r, ctx)?;
    let wichmann_kroll = wichmann_kroll_regularized(r, ctx)?;
    Ok(PotentialSample {
        r,
        coulomb,
        uehling,
        wichmann_kroll,
        total: coulomb + uehling + wichmann_kroll,
    })
}

/// Vacuum-polarization part of Φ only (U + W_K).
pub fn vacuum_polarization(r: f64, ctx: &PhysicalContext) -> Result<f64> {
    Ok(uehling_closed(r, ctx)? + wichmann_kroll_regularized(r, ctx)?)
}

/// Φ on a grid, computed in parallel; output order follows `radii`.
pub fn potential_table(radii: &[f64], ctx: &PhysicalContext) -> Result<Vec<PotentialSample>> {
    radii.par_iter().map(|&r| total_potential(r, ctx)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ctx() -> PhysicalContext {
        PhysicalContext::nuclear(1.0)
    }

    #[test]
    fn zero_charge_gives_zero() {
        let c = PhysicalContext::nuclear(0.0);
        let a = c.alpha;
        assert_eq!(uehling_integral(a, &c, &EvalAccuracy::default()).unwrap(), 0.0);
        assert_eq!(uehling_closed(a, &c).unwrap(), 0.0);
        assert_eq!(uehling_tridiagonal(2.0, &c).unwrap(), 0.0);
        assert_eq!(wichmann_kroll_raw(a, &c).unwrap(), 0.0);
        assert_eq!(wichmann_kroll_regularized(a, &c).unwrap(), 0.0);
        let s = total_potential(1.0, &PhysicalContext::pair(0.0, 3.0)).unwrap();
        assert_eq!((s.coulomb, s.uehling, s.wichmann_kroll, s.total), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn closed_form_matches_high_precision_reference() {
        // 25-digit quadrature of the defining integral at α = 1/137.035999.
        let c = ctx();
        let a = c.alpha;
        let cases = [
            (1.0, 0.007_625_160_673_183_532_086),
            (0.1, 2.363_135_207_405_103_476_4),
            (5.0, 8.580_644_432_285_212_945_1e-8),
            (1e-3, 1_167.043_085_614_198_416_1),
            (15.0, 1.356_118_987_690_612_733_7e-17),
            (30.0, 2.365_137_958_964_469_749_5e-31),
        ];
        for (m, expected) in cases {
            assert_relative_eq!(uehling_closed(m * a, &c).unwrap(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn asymptotic_and_direct_bracket_overlap() {
        for i in 0..=20 {
            let z = 40.0 + i as f64;
            let direct = uehling_bracket_scaled(z).unwrap();
            let asym = uehling_bracket_asymptotic_scaled(z).unwrap();
            assert_relative_eq!(direct, asym, max_relative = 1e-11);
        }
    }

    #[test]
    fn printed_tridiagonal_grouping_differs() {
        let c = ctx();
        let good = uehling_tridiagonal(2.0, &c).unwrap();
        let printed = uehling_tridiagonal_as_printed(2.0, &c).unwrap();
        assert_relative_eq!(good, uehling_closed(c.alpha, &c).unwrap(), max_relative = 1e-13);
        assert!((printed - good).abs() > 1e-3 * good.abs());
    }

    #[test]
    fn wichmann_kroll_properties() {
        let c = PhysicalContext::nuclear(2.0);
        let a = c.alpha;
        let r = 0.37 * a;
        assert_relative_eq!(
            wichmann_kroll_raw(2.0 * r, &c).unwrap(),
            wichmann_kroll_raw(r, &c).unwrap() / 32.0,
            max_relative = 1e-15
        );
        let ratio = wichmann_kroll_regularized(100.0 * a, &c).unwrap() / wichmann_kroll_raw(100.0 * a, &c).unwrap();
        assert!((ratio - 1.0).abs() < 1e-3);
        let at_alpha = wichmann_kroll_regularized(a, &c).unwrap();
        assert_relative_eq!(at_alpha, -8.0 * a * a / (450.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn electron_proton_component_bounds() {
        let c = PhysicalContext::pair(-1.0, 1.0);
        let s = total_potential(1.0, &c).unwrap();
        assert_eq!(s.coulomb, -1.0);
        assert!(s.uehling.abs() < c.alpha);
        assert!(s.wichmann_kroll.abs() < c.alpha.powi(7));
        assert_eq!(s.total, s.coulomb + s.uehling + s.wichmann_kroll);
    }

    #[test]
    fn alpha_zero_switches_corrections_off() {
        let c = ctx().with_alpha(0.0);
        let s = total_potential(0.5, &c).unwrap();
        assert_eq!(s.uehling, 0.0);
        assert_eq!(s.wichmann_kroll, 0.0);
        assert_eq!(s.total, 2.0);
    }

    #[test]
    fn table_preserves_order() {
        let radii: Vec<f64> = (1..50).map(|i| 0.01 * i as f64).collect();
        let t = potential_table(&radii, &ctx()).unwrap();
        for (s, &r) in t.iter().zip(&radii) {
            assert_eq!(s.r, r);
        }
    }

    proptest! {
        #[test]
        fn positivity_and_linearity(logr in -9.0f64..0.5, q in 0.1f64..10.0) {
            let r = logr.exp();
            let c1 = PhysicalContext::nuclear(1.0);
            let cq = PhysicalContext::nuclear(q);
            let u1 = uehling_closed(r, &c1).unwrap();
            let uq = uehling_closed(r, &cq).unwrap();
            prop_assert!(u1 >= 0.0);
            prop_assert!((uq - q * u1).abs() <= 1e-15 * uq.abs());
            let w1 = wichmann_kroll_regularized(r, &c1).unwrap();
            let wq = wichmann_kroll_regularized(r, &cq).unwrap();
            prop_assert!(w1 < 0.0);
            prop_assert!((wq - q.powi(3) * w1).abs() <= 1e-14 * wq.abs());
        }

        #[test]
        fn pair_symmetry(q1 in -5.0f64..5.0, q2 in -5.0f64..5.0, r in 1e-4f64..2.0) {
            let a = total_potential(r, &PhysicalContext::pair(q1, q2)).unwrap();
            let b = total_potential(r, &PhysicalContext::pair(q2, q1)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
