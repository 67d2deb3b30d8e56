//! Variable-phase scattering on top of the Coulomb background, and the
//! Coulomb–vacuum-polarization interference cross-section.
//!
//! The phase function obeys
//!     dδ/dr = −(2μU/k)[cos δ·F_ℓ(kr; η) + sin δ·G_ℓ(kr; η)]²,
//! integrated in s = ln r so the short-range structure of U (scale α) and
//! the oscillations at large r share one adaptive step controller.

use std::f64::consts::PI;
use std::ops::ControlFlow;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::coulomb_waves::{coulomb_phase, CoulombWaves, MAX_RHO};
use crate::error::{domain, ensure_positive, Error, Result};
use crate::ode::{dormand_prince, OdeOptions};
use crate::quadrature::{gauss_kronrod, gauss_kronrod_semi_infinite, EvalAccuracy};
use crate::special_functions::digamma_complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Stop once the tail bound is below tail_rel·|δ| + tail_abs.
    pub tail_rel: f64,
    pub tail_abs: f64,
    /// r_start = start_factor / k.
    pub start_factor: f64,
    /// Geometric spacing of tail checks in r.
    pub check_ratio: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-30,
            tail_rel: 1e-8,
            tail_abs: 1e-30,
            start_factor: 1e-6,
            check_ratio: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrajectory {
    pub ell: u32,
    pub k: f64,
    pub eta: f64,
    /// (r, δ_ℓ(r)), strictly increasing in r; the first entry is the Born start.
    pub samples: Vec<(f64, f64)>,
    pub delta_inf: f64,
    pub converged: bool,
    /// Bound on the phase still to be accumulated beyond the last sample.
    pub tail_estimate: f64,
    /// Accumulated local truncation error of the integrator.
    pub error_estimate: f64,
}

/// Sommerfeld parameter of the background: η = μ·q₁q₂/k.
pub fn background_eta(k: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("background_eta", "k", k)?;
    Ok(ctx.reduced_mass * ctx.charge_product() / k)
}

/// Born start: δ(r₀) ≈ −(2μ/k)∫₀^{r₀} U F_ℓ² dr (G is suppressed by δ ≈ 0).
fn born_start<P>(potential: &P, waves: &CoulombWaves, k: f64, mu: f64, r0: f64) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
{
    let acc = EvalAccuracy::with_rel_tol(1e-10);
    let failure = std::cell::Cell::new(None);
    let q = gauss_kronrod(
        |r| match potential(r).and_then(|u| Ok(u * waves.eval(k * r)?.f.powi(2))) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        0.0,
        r0,
        &acc,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(-2.0 * mu / k * q.value)
}

fn tail_bound<P>(potential: &P, r: f64, envelope: f64, k: f64, mu: f64) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
{
    let acc = EvalAccuracy::with_rel_tol(1e-6);
    let failure = std::cell::Cell::new(None);
    let q = gauss_kronrod_semi_infinite(
        |x| match potential(x) {
            Ok(v) => v.abs(),
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        r,
        &acc,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(2.0 * mu / k * envelope * q.value)
}

/// Variable-phase integration of the add-on potential `potential(r)`
/// (interaction energy, atomic units) in the Coulomb field fixed by `ctx`.
pub fn integrate_phase<P>(potential: P, ell: u32, k: f64, ctx: &PhysicalContext, opts: &PhaseOptions) -> Result<PhaseTrajectory>
where
    P: Fn(f64) -> Result<f64>,
{
    ensure_positive("integrate_phase", "k", k)?;
    ctx.validate()?;
    let mu = ctx.reduced_mass;
    let eta = background_eta(k, ctx)?;
    let waves = CoulombWaves::new(ell, eta)?;
    let r_start = opts.start_factor / k;
    let r_max = MAX_RHO / k;

    let delta0 = born_start(&potential, &waves, k, mu, r_start)?;
    let mut samples = vec![(r_start, delta0)];
    let mut next_check = 10.0 * r_start;
    let mut tail_estimate = f64::INFINITY;
    let mut converged = false;
    let mut failure: Option<Error> = None;

    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_init: 1e-2,
        h_min: 1e-12,
        h_max: 0.1,
        max_steps: 2_000_000,
    };
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let r = s.exp();
        let u = potential(r)?;
        if u == 0.0 {
            dy[0] = 0.0;
            return Ok(());
        }
        let v = waves.eval(k * r)?;
        let w = y[0].cos() * v.f + y[0].sin() * v.g;
        dy[0] = -2.0 * mu * u / k * w * w * r;
        Ok(())
    };
    let summary = dormand_prince(rhs, r_start.ln(), &[delta0], r_max.ln(), &ode_opts, |s, y| {
        let r = s.exp();
        samples.push((r, y[0]));
        if r < next_check {
            return ControlFlow::Continue(());
        }
        next_check = r * opts.check_ratio;
        let envelope = match waves.eval(k * r) {
            Ok(v) => 2.0 * (v.f * v.f + v.g * v.g).max(1.0),
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        match tail_bound(&potential, r, envelope, k, mu) {
            Ok(t) => {
                tail_estimate = t;
                if t <= opts.tail_rel * y[0].abs() + opts.tail_abs {
                    converged = true;
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let delta_inf = summary.y[0];
    if !converged {
        let v = waves.eval(k * r_max)?;
        tail_estimate = tail_bound(&potential, r_max, 2.0 * (v.f * v.f + v.g * v.g).max(1.0), k, mu)?;
        converged = tail_estimate <= opts.tail_rel * delta_inf.abs() + opts.tail_abs;
        if !converged && tail_estimate > 1e-2 * delta_inf.abs() + opts.tail_abs {
            return Err(Error::Solver {
                func: "integrate_phase",
                detail: format!(
                    "potential has not decayed by r = {r_max:e} (tail bound {tail_estimate:e} vs phase {delta_inf:e})"
                ),
            });
        }
    }
    Ok(PhaseTrajectory {
        ell,
        k,
        eta,
        samples,
        delta_inf,
        converged,
        tail_estimate,
        error_estimate: summary.error_estimate,
    })
}

/// First-order (Born) phase −(2μ/k)∫₀^∞ U F_ℓ² dr by direct quadrature.
pub fn born_phase<P>(potential: P, ell: u32, k: f64, r_max: f64, ctx: &PhysicalContext, acc: &EvalAccuracy) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
{
    ensure_positive("born_phase", "k", k)?;
    ensure_positive("born_phase", "r_max", r_max)?;
    let eta = background_eta(k, ctx)?;
    let waves = CoulombWaves::new(ell, eta)?;
    let failure = std::cell::Cell::new(None);
    let integrand = |r: f64| match potential(r).and_then(|u| Ok(u * waves.eval(k * r)?.f.powi(2))) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    // split geometrically so the short-range peak is resolved
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = (r_max * 1e-8).max(1e-12);
    while a < r_max {
        total += gauss_kronrod(integrand, a, b, acc)?.value;
        a = b;
        b = (b * 4.0).min(r_max);
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(-2.0 * ctx.reduced_mass / k * total)
}

/// Vacuum-polarization phase shifts for several ℓ, in parallel.
pub fn vacuum_polarization_phases(ells: &[u32], k: f64, ctx: &PhysicalContext, opts: &PhaseOptions) -> Result<Vec<PhaseTrajectory>> {
    ells.par_iter()
        .map(|&l| integrate_phase(|r| crate::potentials::vacuum_polarization(r, ctx), l, k, ctx, opts))
        .collect()
}

fn check_theta(func: &'static str, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(domain(func, format!("theta must lie in (0, pi], got {theta}")));
    }
    Ok(())
}

/// f_C(θ) = −η/(2k sin²(θ/2))·exp(−iη ln sin²(θ/2) + 2iσ₀).
pub fn coulomb_amplitude(theta: f64, k: f64, eta: f64) -> Result<Complex64> {
    check_theta("coulomb_amplitude", theta)?;
    ensure_positive("coulomb_amplitude", "k", k)?;
    let s2 = (0.5 * theta).sin().powi(2);
    let sigma0 = coulomb_phase(0, eta)?;
    Ok(Complex64::from_polar(-eta / (2.0 * k * s2), -eta * s2.ln() + 2.0 * sigma0))
}

/// f(θ) = f_C(θ) + (e^{2iδ₀} − 1)e^{2iδ₀ᶜ}/(2ik).
pub fn total_amplitude(theta: f64, k: f64, delta0: f64, coulomb_phase0: f64, ctx: &PhysicalContext) -> Result<Complex64> {
    let eta = background_eta(k, ctx)?;
    let fc = coulomb_amplitude(theta, k, eta)?;
    let i = Complex64::new(0.0, 1.0);
    let add = ((i * (2.0 * delta0)).exp() - 1.0) * (i * (2.0 * coulomb_phase0)).exp() / (i * (2.0 * k));
    Ok(fc + add)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionComponents {
    pub coulomb: f64,
    pub interference: f64,
    pub vacuum_polarization: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionPoint {
    pub theta: f64,
    /// Interference formula as published (prefactor q²/2v², single minus).
    pub dsigma: f64,
    pub components: CrossSectionComponents,
    /// |f(θ)|² from the amplitude.
    pub dsigma_amplitude: f64,
    /// (dsigma − dsigma_amplitude)/dsigma_amplitude.
    pub relative_discrepancy: f64,
}

/// Both assemblies of the differential cross-section. The published form
/// uses v = k/μ and the charge product q₁q₂ for Q.
pub fn differential_cross_section(theta: f64, k: f64, delta0: f64, a_c: f64, ctx: &PhysicalContext) -> Result<CrossSectionPoint> {
    check_theta("differential_cross_section", theta)?;
    ensure_positive("differential_cross_section", "k", k)?;
    ensure_positive("differential_cross_section", "a_C", a_c)?;
    let v = k / ctx.reduced_mass;
    let q = ctx.charge_product();
    let pref = q * q / (2.0 * v * v);
    let s = (0.5 * theta).sin();
    let ka = k * a_c;
    let coulomb = pref / s.powi(4);
    let interference = -pref * 4.0 * ka / (s * s) * delta0.sin() * (2.0 / ka * s.ln() + delta0).cos();
    let vacuum_polarization = pref * 4.0 * ka * ka * delta0.sin().powi(2);
    let dsigma = coulomb + interference + vacuum_polarization;

    let sigma0 = coulomb_phase(0, background_eta(k, ctx)?)?;
    let dsigma_amplitude = total_amplitude(theta, k, delta0, sigma0, ctx)?.norm_sqr();
    Ok(CrossSectionPoint {
        theta,
        dsigma,
        components: CrossSectionComponents {
            coulomb,
            interference,
            vacuum_polarization,
        },
        dsigma_amplitude,
        relative_discrepancy: (dsigma - dsigma_amplitude) / dsigma_amplitude,
    })
}

/// δ₀ ∈ (0, π) from
/// cot δ₀ = −(1/π)[e^{2π/(ka_C)} − 1][Re ψ(−i/(ka_C)) + ln(ka_C) + κa_C/2].
pub fn cot_delta_relation(k: f64, a_c: f64, kappa: f64) -> Result<f64> {
    ensure_positive("cot_delta_relation", "k", k)?;
    ensure_positive("cot_delta_relation", "a_C", a_c)?;
    if !kappa.is_finite() {
        return Err(domain("cot_delta_relation", "kappa must be finite"));
    }
    let ka = k * a_c;
    let x = 2.0 * PI / ka;
    if x > 700.0 {
        return Err(Error::Range {
            func: "cot_delta_relation",
            detail: format!("exp(2*pi/(k a_C)) overflows for k a_C = {ka:e}"),
        });
    }
    let psi = digamma_complex(Complex64::new(0.0, -1.0 / ka))?.re;
    let cot = -x.exp_m1() / PI * (psi + ka.ln() + 0.5 * kappa * a_c);
    Ok(1f64.atan2(cot))
}
