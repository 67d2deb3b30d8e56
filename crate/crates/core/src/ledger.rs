//! Typo ledger: every formula whose printed form was checked numerically
//! against an independent oracle, with the sampled values side by side.
//!
//! Each entry records what is printed, what the crate adopts, and a table of
//! (x, printed, oracle, discrepancy). Where a corrected closed form exists
//! its worst disagreement with the oracle is carried along, so the report
//! doubles as evidence that the correction is right.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::coulomb_waves::{sommerfeld_eta, EtaConvention};
use crate::error::{domain, Result};
use crate::field_equation::{cardano_real_root, scaled_coefficients};
use crate::fourier::{
    uehling_field_factor_as_printed, uehling_spectral_as_printed, uehling_spectral_as_printed_in_a,
    uehling_spectral_corrected, uehling_spectral_oracle, wk_spectral_closed, wk_spectral_corrected,
    wk_spectral_oracle,
};
use crate::o21_algebra::{
    build_generators, hausdorff_residual, hausdorff_residual_as_printed, scaled_radial_operator_residual,
    scaled_radial_operator_residual_as_printed,
};
use crate::potentials::{uehling_asymptote_large_r, uehling_closed, uehling_tridiagonal_as_printed};
use crate::quadrature::EvalAccuracy;
use crate::scattering::differential_cross_section;

pub const LEDGER_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// (printed − oracle)/|oracle|
    Relative,
    /// |printed − oracle|, used where the oracle is itself a residual.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerSample {
    pub x: f64,
    pub printed: f64,
    pub oracle: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub id: String,
    pub variable: String,
    pub printed_form: String,
    pub adopted_form: String,
    pub oracle: String,
    pub measure: Measure,
    pub samples: Vec<LedgerSample>,
    pub max_discrepancy: f64,
    /// Worst relative disagreement between the adopted closed form and the
    /// oracle over the same samples, when there is such a form.
    pub corrected_max_discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypoLedger {
    pub schema_version: u32,
    pub alpha: f64,
    pub charge_product: f64,
    pub entries: Vec<LedgerEntry>,
}

impl TypoLedger {
    pub fn entry(&self, id: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn relative(printed: f64, oracle: f64) -> f64 {
    if oracle == 0.0 {
        (printed - oracle).abs()
    } else {
        (printed - oracle) / oracle.abs()
    }
}

fn worst(samples: &[LedgerSample]) -> f64 {
    samples.iter().map(|s| s.discrepancy.abs()).fold(0.0, f64::max)
}

struct Meta {
    id: &'static str,
    variable: &'static str,
    printed_form: &'static str,
    adopted_form: &'static str,
    oracle: &'static str,
    measure: Measure,
}

fn entry(meta: Meta, samples: Vec<LedgerSample>, corrected: Option<f64>) -> LedgerEntry {
    LedgerEntry {
        id: meta.id.into(),
        variable: meta.variable.into(),
        printed_form: meta.printed_form.into(),
        adopted_form: meta.adopted_form.into(),
        oracle: meta.oracle.into(),
        measure: meta.measure,
        max_discrepancy: worst(&samples),
        samples,
        corrected_max_discrepancy: corrected,
    }
}

/// `count` log-spaced points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Printed Uehling transform (k form and a form) and field factor against
/// the j₀ quadrature of the closed-form potential.
pub fn uehling_spectral_entries(ks: &[f64], ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<Vec<LedgerEntry>> {
    let mut oracle = Vec::with_capacity(ks.len());
    let mut corrected = 0.0f64;
    for &k in ks {
        let o = uehling_spectral_oracle(k, ctx, acc)?;
        corrected = corrected.max(relative(uehling_spectral_corrected(k, ctx)?, o).abs());
        oracle.push(o);
    }
    let rows = |f: &dyn Fn(f64) -> Result<f64>, scale: &dyn Fn(f64) -> f64| -> Result<Vec<LedgerSample>> {
        ks.iter()
            .zip(&oracle)
            .map(|(&k, &o)| {
                let p = f(k)?;
                let o = scale(k) * o;
                Ok(LedgerSample { x: k, printed: p, oracle: o, discrepancy: relative(p, o) })
            })
            .collect()
    };
    let one = |_: f64| 1.0;
    let field = |k: f64| k * k / (4.0 * PI);
    Ok(vec![
        entry(
            Meta {
                id: "uehling_spectral_in_k",
                variable: "k",
                printed_form: "(8 alpha Q / 3k^2)[-5/6 + 2/x - (sqrt(x+4)/sqrt(x))(1 - 2/x) L], x = alpha^2 k^2",
                adopted_form: "(2 alpha^3 Q/3) I(a), I(a) = [-5/3 + 1/a^2 + (sqrt(a^2+1)/2a)(2 - 1/a^2) L]/(2a^2), a = k alpha/2",
                oracle: "4 pi int j0(kr) U(r) r^2 dr by zero-partitioned sine quadrature",
                measure: Measure::Relative,
            },
            rows(&|k| uehling_spectral_as_printed(k, ctx), &one)?,
            Some(corrected),
        ),
        entry(
            Meta {
                id: "uehling_spectral_in_a",
                variable: "k",
                printed_form: "(alpha^3 Q / 3a^2)[-5/3 + 1/a^2 - (sqrt(a^2+1)/2a)(2 - 1/a^2) L]",
                adopted_form: "sign of the logarithm term reversed, overall 1/2",
                oracle: "4 pi int j0(kr) U(r) r^2 dr by zero-partitioned sine quadrature",
                measure: Measure::Relative,
            },
            rows(&|k| uehling_spectral_as_printed_in_a(k, ctx), &one)?,
            Some(corrected),
        ),
        entry(
            Meta {
                id: "uehling_field_factor",
                variable: "k",
                printed_form: "(2 alpha Q / 3 pi)[-5/6 + 2/x - (sqrt(x+4)/sqrt(x))(1 - 2/x) L]",
                adopted_form: "k^2 u(k) / 4 pi with the corrected u(k)",
                oracle: "k^2/(4 pi) times the quadrature transform",
                measure: Measure::Relative,
            },
            rows(&|k| uehling_field_factor_as_printed(k, ctx), &field)?,
            Some(corrected),
        ),
    ])
}

pub fn wk_spectral_entry(ks: &[f64], ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<LedgerEntry> {
    let mut samples = Vec::with_capacity(ks.len());
    let mut corrected = 0.0f64;
    for &k in ks {
        let o = wk_spectral_oracle(k, ctx, acc)?;
        let p = wk_spectral_closed(k, ctx)?;
        corrected = corrected.max(relative(wk_spectral_corrected(k, ctx)?, o).abs());
        samples.push(LedgerSample { x: k, printed: p, oracle: o, discrepancy: relative(p, o) });
    }
    Ok(entry(
        Meta {
            id: "wichmann_kroll_spectral",
            variable: "k",
            printed_form: "-(2 pi Q^3 alpha^6 / 225) exp(-k alpha)",
            adopted_form: "-(4 pi c/k) int sin(kr)/(r^2+alpha^2)^2 dr, c = 2Q^3 alpha^7/(225 pi), via exponential integrals",
            oracle: "4 pi int j0(kr) W_K(r) r^2 dr of the regularized potential; the printed form is the transform of -c/(r^2+alpha^2)^2",
            measure: Measure::Relative,
        },
        samples,
        Some(corrected),
    ))
}

pub fn tridiagonal_entry(zs: &[f64], ctx: &PhysicalContext) -> Result<LedgerEntry> {
    let samples = zs
        .iter()
        .map(|&z| {
            let p = uehling_tridiagonal_as_printed(z, ctx)?;
            let o = uehling_closed(0.5 * z * ctx.alpha, ctx)?;
            Ok(LedgerSample { x: z, printed: p, oracle: o, discrepancy: relative(p, o) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(entry(
        Meta {
            id: "uehling_regrouped_bessel_form",
            variable: "z = 2r/alpha",
            printed_form: "(Q/9 pi z)[(q-1) K0 - z Ki1 - (q+1) Ki2], q = z^2 + 11",
            adopted_form: "(Q/9 pi z)[(q+1) K0 - z Ki1 - (q-1) Ki2]",
            oracle: "closed form (1 + z^2/12) K0 - (z/12) Ki1 - (5/6 + z^2/12) Ki2",
            measure: Measure::Relative,
        },
        samples,
        None,
    ))
}

pub fn large_r_asymptote_entry(multiples: &[f64], ctx: &PhysicalContext) -> Result<LedgerEntry> {
    let samples = multiples
        .iter()
        .map(|&m| {
            let r = m * ctx.alpha;
            let p = uehling_asymptote_large_r(r, ctx)?;
            let o = uehling_closed(r, ctx)?;
            Ok(LedgerSample { x: m, printed: p, oracle: o, discrepancy: relative(p, o) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(entry(
        Meta {
            id: "uehling_long_distance_asymptote",
            variable: "r/alpha",
            printed_form: "(Q/r) alpha^(5/2) / (4 sqrt(pi) r^(3/2)) exp(-2r/alpha)",
            adopted_form: "printed form kept; it is the leading Watson term only, with O(alpha/r) relative corrections",
            oracle: "closed form; the ratio printed/closed approaches 1 like 1 + 29/(8z), z = 2r/alpha",
            measure: Measure::Relative,
        },
        samples,
        None,
    ))
}

pub fn field_large_r_entry(radii: &[f64], ctx: &PhysicalContext) -> Result<LedgerEntry> {
    let samples = radii
        .iter()
        .map(|&s| {
            let c = scaled_coefficients(s, ctx)?;
            let p = 2.0 * (c.p / 3.0).sqrt();
            let o = cardano_real_root(&c);
            Ok(LedgerSample { x: s, printed: p, oracle: o, discrepancy: relative(p, o) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(entry(
        Meta {
            id: "field_equation_large_r",
            variable: "r/alpha",
            printed_form: "phi = 2 (p/3)^(1/2) r + c, i.e. constant slope",
            adopted_form: "y -> -q/(p r^2): the two cube roots cancel to leading order",
            oracle: "stable Cardano root of y^3 + p y + q/r^2 = 0 (units of Q/alpha^2)",
            measure: Measure::Relative,
        },
        samples,
        None,
    ))
}

pub fn cross_section_entry(thetas: &[f64], k: f64, ctx: &PhysicalContext) -> Result<LedgerEntry> {
    let cp = ctx.charge_product();
    let a_c = 1.0 / (ctx.reduced_mass * cp.abs());
    let samples = thetas
        .iter()
        .map(|&t| {
            let pt = differential_cross_section(t, k, 0.0, a_c, ctx)?;
            Ok(LedgerSample { x: t, printed: pt.dsigma, oracle: pt.dsigma_amplitude, discrepancy: pt.relative_discrepancy })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(entry(
        Meta {
            id: "cross_section_prefactor",
            variable: "theta",
            printed_form: "d sigma/d theta = (Q^2/2v^2)[sin^-4(theta/2) - ... ], v = k/mu",
            adopted_form: "d sigma/d Omega = |f(theta)|^2; Rutherford prefactor Q^2/(4 mu^2 v^4) for delta_0 = 0",
            oracle: "|f_C + (e^{2i delta_0} - 1) e^{2i sigma_0}/(2ik)|^2 at delta_0 = 0",
            measure: Measure::Relative,
        },
        samples,
        None,
    ))
}

pub fn sommerfeld_entry(ks: &[f64], ctx: &PhysicalContext) -> Result<LedgerEntry> {
    let cp = ctx.charge_product().abs();
    let samples = ks
        .iter()
        .map(|&k| {
            let p = sommerfeld_eta(cp, ctx.reduced_mass, f64::INFINITY, k, EtaConvention::AsPrinted)?;
            let o = sommerfeld_eta(cp, ctx.reduced_mass, f64::INFINITY, k, EtaConvention::Conventional)?;
            Ok(LedgerSample { x: k, printed: p, oracle: o, discrepancy: relative(p, o) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(entry(
        Meta {
            id: "sommerfeld_parameter",
            variable: "k",
            printed_form: "eta = sqrt(mu q1 q2 / k)",
            adopted_form: "eta = mu q1 q2 / k",
            oracle: "coefficient of -2/rho in the radial Coulomb equation, fixed by F'G - FG' = 1 and the Rutherford limit",
            measure: Measure::Relative,
        },
        samples,
        None,
    ))
}

/// Residuals of the printed operator identities next to the adopted ones;
/// both columns are absolute matrix-element residuals on an interior block.
pub fn algebra_entries(q: f64) -> Result<Vec<LedgerEntry>> {
    let small = build_generators(0, 12)?;
    let mut hausdorff = Vec::new();
    for &beta in &[0.05, 0.1, 0.2] {
        let p = hausdorff_residual_as_printed(&small, beta, 6)?;
        let o = hausdorff_residual(&small, beta, 6)?.plus;
        hausdorff.push(LedgerSample { x: beta, printed: p, oracle: o, discrepancy: (p - o).abs() });
    }
    let big = build_generators(0, 40)?;
    let mut radial = Vec::new();
    for n in 1..=3u32 {
        let e = -q * q / (2.0 * (n * n) as f64);
        let p = scaled_radial_operator_residual_as_printed(&big, q, e, 35)?;
        let o = scaled_radial_operator_residual(&big, q, e, 35)?;
        radial.push(LedgerSample { x: e, printed: p, oracle: o, discrepancy: (p - o).abs() });
    }
    Ok(vec![
        entry(
            Meta {
                id: "hausdorff_scaling",
                variable: "beta",
                printed_form: "exp(-i beta T)(S+U) exp(i beta T) = exp(beta T)(S+U)",
                adopted_form: "= e^beta (S+U), a scalar factor",
                oracle: "matrix exponentials in the truncated discrete-series representation",
                measure: Measure::Absolute,
            },
            hausdorff,
            None,
        ),
        entry(
            Meta {
                id: "radial_operator_form",
                variable: "E",
                printed_form: "r(H - E) = (S+U) - E(S-U) + Q, with r = S + U",
                adopted_form: "r(H - E) = (S+U)/2 - E(S-U) - Q, with r = S - U",
                oracle: "dilation by beta = ln sqrt(-2E) must give the diagonal sqrt(-2E) S - Q",
                measure: Measure::Absolute,
            },
            radial,
            None,
        ),
    ])
}

/// Full ledger for a context with nonzero α and charge.
pub fn build_ledger(ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<TypoLedger> {
    ctx.validate()?;
    acc.validate()?;
    let a = ctx.alpha;
    let cp = ctx.charge_product();
    if a == 0.0 || cp == 0.0 {
        return Err(domain("build_ledger", "the ledger needs alpha > 0 and a nonzero charge product"));
    }
    let mut entries = uehling_spectral_entries(&log_grid(0.1 / a, 10.0 / a, 9), ctx, acc)?;
    entries.push(wk_spectral_entry(&log_grid(0.01 / a, 20.0 / a, 9), ctx, acc)?);
    entries.push(tridiagonal_entry(&[0.1, 0.5, 1.0, 2.0, 5.0, 10.0], ctx)?);
    entries.push(large_r_asymptote_entry(&[5.0, 15.0, 30.0, 60.0], ctx)?);
    entries.push(field_large_r_entry(&[1e2, 1e3, 1e4], ctx)?);
    entries.push(cross_section_entry(&[PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0], 1.0, ctx)?);
    entries.push(sommerfeld_entry(&[0.25, 0.5, 2.0, 4.0], ctx)?);
    entries.extend(algebra_entries(cp.abs())?);
    Ok(TypoLedger {
        schema_version: LEDGER_SCHEMA_VERSION,
        alpha: a,
        charge_product: cp,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_flags_every_printed_form() {
        let ctx = PhysicalContext::nuclear(1.0);
        let ledger = build_ledger(&ctx, &EvalAccuracy::with_rel_tol(1e-11)).unwrap();
        for e in &ledger.entries {
            assert!(!e.samples.is_empty(), "{}", e.id);
            if e.id != "uehling_long_distance_asymptote" {
                assert!(e.max_discrepancy > 1e-3, "{} {}", e.id, e.max_discrepancy);
            }
        }
        let u = ledger.entry("uehling_spectral_in_k").unwrap();
        assert!(u.corrected_max_discrepancy.unwrap() <= 1e-9);
        let w = ledger.entry("wichmann_kroll_spectral").unwrap();
        assert!(w.corrected_max_discrepancy.unwrap() <= 1e-8);
        for s in &ledger.entry("radial_operator_form").unwrap().samples {
            assert!(s.oracle < 1e-9 && s.printed > 0.1);
        }
    }

    #[test]
    fn degenerate_context_is_rejected() {
        let acc = EvalAccuracy::default();
        assert!(build_ledger(&PhysicalContext::nuclear(1.0).with_alpha(0.0), &acc).is_err());
        assert!(build_ledger(&PhysicalContext::nuclear(0.0), &acc).is_err());
    }
}
