//! Regular and irregular Coulomb wave functions F_ℓ(ρ; η), G_ℓ(ρ; η).
//!
//! Beyond a matching radius ρ₁ just outside the turning point, Steed's
//! method (CF1 for F′/F, CF2 for H⁺′/H⁺, closed by the Wronskian) gives all
//! four values at once. Inside ρ₁ the functions are carried by Taylor
//! stepping of ρ²u″ = (ℓ(ℓ+1) + 2ηρ − ρ²)u: G inward from ρ₁ and F outward
//! from its power series near the origin. Each direction follows the
//! dominant solution, so neither propagation is unstable, and the Wronskian
//! of the result is a genuine check rather than an identity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::EvalAccuracy;
use crate::special_functions::{hyp1f1, ln_gamma, log_gamma_complex};

pub const MAX_ELL: u32 = 10;
pub const MAX_ABS_ETA: f64 = 20.0;
pub const MAX_RHO: f64 = 200.0;
const CF_MAX_ITER: usize = 200_000;
const G_ANCHOR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EtaConvention {
    /// η = μq₁q₂/k.
    #[default]
    Conventional,
    /// η = √(μq₁q₂/k), as published; undefined for attraction.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationConvention {
    /// C_ℓ(η) carries e^{−πη/2}.
    #[default]
    Conventional,
    /// C_ℓ(η) carries the phase e^{−iη/2}, as published.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombParams {
    pub ell: u32,
    pub eta: f64,
    pub rho: f64,
}

impl CoulombParams {
    pub fn new(ell: u32, eta: f64, rho: f64) -> Result<Self> {
        check_range(ell, eta)?;
        check_rho(rho)?;
        Ok(Self { ell, eta, rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombValues {
    pub f: f64,
    pub fp: f64,
    pub g: f64,
    pub gp: f64,
}

impl CoulombValues {
    pub fn wronskian(&self) -> f64 {
        self.fp * self.g - self.f * self.gp
    }
}

fn check_range(ell: u32, eta: f64) -> Result<()> {
    if ell > MAX_ELL {
        return Err(Error::Range {
            func: "coulomb_waves",
            detail: format!("ell = {ell} exceeds {MAX_ELL}"),
        });
    }
    if !eta.is_finite() || eta.abs() > MAX_ABS_ETA {
        return Err(Error::Range {
            func: "coulomb_waves",
            detail: format!("|eta| = {} exceeds {MAX_ABS_ETA}", eta.abs()),
        });
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) {
        return Err(domain("coulomb_waves", format!("rho must be positive, got {rho}")));
    }
    if rho > MAX_RHO {
        return Err(Error::Range {
            func: "coulomb_waves",
            detail: format!("rho = {rho} exceeds {MAX_RHO}"),
        });
    }
    Ok(())
}

/// Sommerfeld parameter. `m2 = ∞` selects the fixed-nucleus limit μ = m1.
pub fn sommerfeld_eta(q1q2: f64, m1: f64, m2: f64, k: f64, convention: EtaConvention) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(domain("sommerfeld_eta", format!("k must be positive, got {k}")));
    }
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(domain("sommerfeld_eta", "masses must be positive"));
    }
    let mu = if m2.is_infinite() {
        m1
    } else if m1.is_infinite() {
        m2
    } else {
        m1 * m2 / (m1 + m2)
    };
    match convention {
        EtaConvention::Conventional => Ok(mu * q1q2 / k),
        EtaConvention::AsPrinted => {
            let x = mu * q1q2 / k;
            if x < 0.0 {
                return Err(domain(
                    "sommerfeld_eta",
                    "square-root form is undefined for attractive charges (q1*q2 < 0)",
                ));
            }
            Ok(x.sqrt())
        }
    }
}

/// C_ℓ(η) = 2^ℓ e^{−πη/2} |Γ(ℓ+1+iη)| / Γ(2ℓ+2).
pub fn coulomb_normalization(ell: u32, eta: f64) -> Result<f64> {
    let l = ell as f64;
    let lg = log_gamma_complex(Complex64::new(l + 1.0, eta))?.re;
    Ok((l * 2f64.ln() - 0.5 * PI * eta + lg - ln_gamma(2.0 * l + 2.0)?).exp())
}

/// Coulomb phase σ_ℓ = arg Γ(ℓ+1+iη).
pub fn coulomb_phase(ell: u32, eta: f64) -> Result<f64> {
    Ok(log_gamma_complex(Complex64::new(ell as f64 + 1.0, eta))?.im)
}

/// Outer turning point ρ_tp = η + √(η² + ℓ(ℓ+1)).
pub fn turning_point(ell: u32, eta: f64) -> f64 {
    let big_l = (ell * (ell + 1)) as f64;
    let root = (eta * eta + big_l).sqrt();
    if eta >= 0.0 {
        eta + root
    } else {
        // η + √(η²+L) without cancellation
        big_l / (root - eta)
    }
}

/// Steed's method at a single ρ (intended for ρ ≳ ρ_tp).
pub fn steed(ell: u32, eta: f64, rho: f64) -> Result<CoulombValues> {
    let l = ell as f64;
    let tiny = 1e-300;
    let eps = 1e-16;

    // CF1: F′/F = S_{ℓ+1} − R²_{ℓ+1}/(T_{ℓ+1} − R²_{ℓ+2}/(T_{ℓ+2} − …)).
    let s = |k: f64| k / rho + eta / k;
    let r2 = |k: f64| 1.0 + eta * eta / (k * k);
    let mut f = s(l + 1.0);
    if f == 0.0 {
        f = tiny;
    }
    let mut c = f;
    let mut d = 0.0;
    let mut sign = 1.0;
    let mut converged = false;
    for j in 1..CF_MAX_ITER {
        let k = l + j as f64;
        let a = -r2(k);
        let b = s(k) + s(k + 1.0);
        d = b + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = b + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if d < 0.0 {
            sign = -sign;
        }
        if (delta - 1.0).abs() < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            func: "coulomb_cf1",
            iterations: CF_MAX_ITER,
            estimate: f,
            error: f64::NAN,
        });
    }

    // CF2: H⁺′/H⁺ = i(1 − η/ρ) + (i/ρ)·ab/(2(ρ−η+i) + (a+1)(b+1)/(2(ρ−η+2i) + …)).
    let a = Complex64::new(1.0 + l, eta);
    let b = Complex64::new(-l, eta);
    let ctiny = Complex64::new(tiny, 0.0);
    let a_coef = |j: f64| (a + (j - 1.0)) * (b + (j - 1.0));
    let b_coef = |j: f64| Complex64::new(2.0 * (rho - eta), 2.0 * j);
    // Lentz on the tail b₁ + a₂/(b₂ + …); the leading a₁ is divided in afterwards.
    let mut tail = b_coef(1.0);
    if tail.norm() == 0.0 {
        tail = ctiny;
    }
    let mut cc = tail;
    let mut dd = Complex64::new(0.0, 0.0);
    converged = false;
    for j in 2..CF_MAX_ITER {
        let jf = j as f64;
        let aj = a_coef(jf);
        let bj = b_coef(jf);
        dd = bj + aj * dd;
        if dd.norm() == 0.0 {
            dd = ctiny;
        }
        cc = bj + aj / cc;
        if cc.norm() == 0.0 {
            cc = ctiny;
        }
        dd = dd.inv();
        let delta = cc * dd;
        tail *= delta;
        if (delta - 1.0).norm() < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            func: "coulomb_cf2",
            iterations: CF_MAX_ITER,
            estimate: tail.norm(),
            error: f64::NAN,
        });
    }
    let t = a_coef(1.0) / tail;
    let pq = Complex64::new(0.0, 1.0 - eta / rho) + Complex64::new(0.0, 1.0 / rho) * t;
    let (p, q) = (pq.re, pq.im);
    if !(q > 0.0) {
        return Err(Error::Precision {
            func: "coulomb_steed",
            detail: format!("non-positive q = {q} at rho = {rho}; rho is inside the turning point"),
        });
    }
    let gamma = (f - p) / q;
    let big_f = sign / (q * (1.0 + gamma * gamma)).sqrt();
    Ok(CoulombValues {
        f: big_f,
        fp: f * big_f,
        g: gamma * big_f,
        gp: (p * gamma - q) * big_f,
    })
}

/// F_ℓ and F′_ℓ from the power series
/// F = C ρ^{ℓ+1} Σ_{k>ℓ} A_k ρ^{k−ℓ−1}, with A_{ℓ+1} = 1, A_{ℓ+2} = η/(ℓ+1),
/// (k+ℓ)(k−ℓ−1)A_k = 2ηA_{k−1} − A_{k−2}.
fn f_series(ell: u32, eta: f64, rho: f64, c_norm: f64) -> Result<(f64, f64, f64)> {
    let l = ell as f64;
    let mut a_prev2 = 0.0;
    let mut a_prev = 1.0;
    let mut power = 1.0; // ρ^{k−ℓ−1}
    let mut sum = 1.0;
    let mut dsum = l + 1.0; // Σ k A_k ρ^{k−ℓ−1}
    let mut largest: f64 = 1.0;
    let mut quiet = 0;
    for kk in (ell + 2)..(ell + 600) {
        let k = kk as f64;
        let a_k = if kk == ell + 2 {
            eta / (l + 1.0)
        } else {
            (2.0 * eta * a_prev - a_prev2) / ((k + l) * (k - l - 1.0))
        };
        power *= rho;
        let term = a_k * power;
        sum += term;
        dsum += k * term;
        largest = largest.max(term.abs());
        a_prev2 = a_prev;
        a_prev = a_k;
        // Two negligible terms in a row: with η = 0 every other term vanishes.
        quiet = if term.abs() <= 1e-17 * sum.abs() { quiet + 1 } else { 0 };
        if quiet >= 2 {
            let rl = rho.powi(ell as i32);
            let lost = largest / sum.abs();
            return Ok((c_norm * rl * rho * sum, c_norm * rl * dsum, lost));
        }
    }
    Err(Error::NonConvergence {
        func: "coulomb_f_series",
        iterations: 600,
        estimate: sum,
        error: f64::NAN,
    })
}

/// One Taylor step of ρ²u″ = (L + 2ηρ − ρ²)u from ρ₀ to ρ₀ + h.
///
/// The recurrence is run on the scaled terms b_m = a_m h^m, which stay
/// bounded even when ρ₀ is tiny and the raw coefficients would overflow.
fn taylor_step(big_l: f64, eta: f64, rho0: f64, u: f64, up: f64, h: f64) -> Result<(f64, f64)> {
    let x = h / rho0;
    let c0 = (big_l + 2.0 * eta * rho0 - rho0 * rho0) * x * x;
    let c1 = (2.0 * eta - 2.0 * rho0) * rho0 * x * x * x;
    let c2 = rho0 * rho0 * x * x * x * x;
    let (mut bm2, mut bm1, mut bm, mut bp1) = (0.0, 0.0, u, up * h);
    let mut value = bm + bp1;
    let mut dsum = bp1;
    let mut quiet = 0;
    for m in 0..400usize {
        let mf = m as f64;
        let bp2 = (c0 * bm + c1 * bm1 - c2 * bm2 - 2.0 * x * (mf + 1.0) * mf * bp1 - x * x * mf * (mf - 1.0) * bm)
            / ((mf + 2.0) * (mf + 1.0));
        value += bp2;
        dsum += (mf + 2.0) * bp2;
        let small = |t: f64, s: f64| t.abs() <= 1e-17 * s.abs();
        quiet = if small(bp2, value) && small((mf + 2.0) * bp2, dsum) { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok((value, dsum / h));
        }
        bm2 = bm1;
        bm1 = bm;
        bm = bp1;
        bp1 = bp2;
    }
    Err(Error::NonConvergence {
        func: "coulomb_taylor_step",
        iterations: 400,
        estimate: value,
        error: f64::NAN,
    })
}

#[derive(Debug, Clone, Copy)]
struct Anchor {
    rho: f64,
    u: f64,
    up: f64,
}

/// Solver for fixed (ℓ, η) with cached anchor points; evaluate many ρ.
#[derive(Debug, Clone)]
pub struct CoulombWaves {
    ell: u32,
    eta: f64,
    big_l: f64,
    c_norm: f64,
    rho_match: f64,
    rho_series: f64,
    /// Decreasing ρ, starting at ρ₁.
    g_anchors: Vec<Anchor>,
    /// Increasing ρ, starting at the series radius.
    f_anchors: Vec<Anchor>,
}

fn step_limit(rho: f64) -> f64 {
    (0.4 * rho).min(1.0)
}

impl CoulombWaves {
    pub fn new(ell: u32, eta: f64) -> Result<Self> {
        check_range(ell, eta)?;
        let big_l = (ell * (ell + 1)) as f64;
        let c_norm = coulomb_normalization(ell, eta)?;
        let rho_match = (turning_point(ell, eta) + 2.0).max(4.0);
        let rho_series = (1.0 / (1.0 + eta.abs())).min(0.5);

        let at_match = steed(ell, eta, rho_match)?;
        let mut g_anchors = vec![Anchor {
            rho: rho_match,
            u: at_match.g,
            up: at_match.gp,
        }];
        let mut cur = g_anchors[0];
        while cur.rho > G_ANCHOR_FLOOR {
            let h = -step_limit(cur.rho);
            let (u, up) = taylor_step(big_l, eta, cur.rho, cur.u, cur.up, h)?;
            cur = Anchor { rho: cur.rho + h, u, up };
            g_anchors.push(cur);
        }

        let (f0, fp0, _) = f_series(ell, eta, rho_series, c_norm)?;
        let mut f_anchors = vec![Anchor {
            rho: rho_series,
            u: f0,
            up: fp0,
        }];
        let mut cur = f_anchors[0];
        while cur.rho < rho_match {
            let h = step_limit(cur.rho).min(rho_match - cur.rho);
            let (u, up) = taylor_step(big_l, eta, cur.rho, cur.u, cur.up, h)?;
            cur = Anchor { rho: cur.rho + h, u, up };
            f_anchors.push(cur);
        }
        Ok(Self {
            ell,
            eta,
            big_l,
            c_norm,
            rho_match,
            rho_series,
            g_anchors,
            f_anchors,
        })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn normalization(&self) -> f64 {
        self.c_norm
    }

    /// Radius beyond which Steed's method is used directly.
    pub fn matching_radius(&self) -> f64 {
        self.rho_match
    }

    /// F at ρ₁ as carried outward from the series; compare with Steed.
    pub fn f_at_matching_radius_from_series(&self) -> (f64, f64) {
        let last = self.f_anchors.last().expect("at least one anchor");
        (last.u, last.up)
    }

    fn propagate(&self, from: Anchor, to: f64) -> Result<(f64, f64)> {
        let mut cur = from;
        while cur.rho != to {
            let lim = step_limit(cur.rho);
            let h = (to - cur.rho).clamp(-lim, lim);
            let (u, up) = taylor_step(self.big_l, self.eta, cur.rho, cur.u, cur.up, h)?;
            let next = if (to - cur.rho).abs() <= lim { to } else { cur.rho + h };
            cur = Anchor { rho: next, u, up };
        }
        Ok((cur.u, cur.up))
    }

    pub fn eval(&self, rho: f64) -> Result<CoulombValues> {
        check_rho(rho)?;
        if rho >= self.rho_match {
            return steed(self.ell, self.eta, rho);
        }
        // G: nearest anchor at or above ρ, then inward.
        let idx = self.g_anchors.partition_point(|a| a.rho >= rho);
        let g_from = self.g_anchors[idx.saturating_sub(1)];
        let (g, gp) = self.propagate(g_from, rho)?;
        // F: series near the origin, else nearest anchor at or below ρ.
        let (f, fp) = if rho <= self.rho_series {
            let (f, fp, _) = f_series(self.ell, self.eta, rho, self.c_norm)?;
            (f, fp)
        } else {
            let idx = self.f_anchors.partition_point(|a| a.rho <= rho);
            self.propagate(self.f_anchors[idx - 1], rho)?
        };
        Ok(CoulombValues { f, fp, g, gp })
    }
}

/// F, F′, G, G′ at a single point.
pub fn coulomb_fg(params: CoulombParams) -> Result<CoulombValues> {
    check_range(params.ell, params.eta)?;
    check_rho(params.rho)?;
    if params.rho >= (turning_point(params.ell, params.eta) + 2.0).max(4.0) {
        return steed(params.ell, params.eta, params.rho);
    }
    CoulombWaves::new(params.ell, params.eta)?.eval(params.rho)
}

/// (F_ℓ, F′_ℓ).
pub fn coulomb_f(params: CoulombParams) -> Result<(f64, f64)> {
    let v = coulomb_fg(params)?;
    Ok((v.f, v.fp))
}

/// (G_ℓ, G′_ℓ).
pub fn coulomb_g(params: CoulombParams) -> Result<(f64, f64)> {
    let v = coulomb_fg(params)?;
    Ok((v.g, v.gp))
}

/// F_ℓ = C_ℓ(η)ρ^{ℓ+1}e^{−iρ}₁F₁(ℓ+1−iη; 2ℓ+2; 2iρ), kept complex so the
/// imaginary residue can be inspected. With the published normalization the
/// result is genuinely complex.
pub fn coulomb_f_hypergeometric(
    params: CoulombParams,
    convention: NormalizationConvention,
    acc: &EvalAccuracy,
) -> Result<Complex64> {
    let CoulombParams { ell, eta, rho } = params;
    let l = ell as f64;
    let m = hyp1f1(
        Complex64::new(l + 1.0, -eta),
        Complex64::new(2.0 * l + 2.0, 0.0),
        Complex64::new(0.0, 2.0 * rho),
        acc,
    )?;
    let lg = log_gamma_complex(Complex64::new(l + 1.0, eta))?.re;
    let base = l * 2f64.ln() + lg - ln_gamma(2.0 * l + 2.0)?;
    let c = match convention {
        NormalizationConvention::Conventional => Complex64::new((base - 0.5 * PI * eta).exp(), 0.0),
        NormalizationConvention::AsPrinted => Complex64::from_polar(base.exp(), -0.5 * eta),
    };
    Ok(c * rho.powi(ell as i32 + 1) * Complex64::from_polar(1.0, -rho) * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // (ℓ, η, ρ, F, G, F′, G′) from 25-digit reference evaluations.
    #[rustfmt::skip]
    const REFERENCE: &[(u32, f64, f64, f64, f64, f64, f64)] = &[
        (0, 1.0, 5.0, 0.684937412005943968, -0.898414359092020549, -0.723642386255606396, -0.510804758519035011),
        (0, 1.0, 3.0, 1.08405268420293576, 0.627039514889285526, 0.301916785821136559, -0.747829194000704974),
        (0, 1.0, 1.0, 0.227526210510560029, 2.04309716210353807, 0.348734422858357001, -1.26359811331245268),
        (1, -2.0, 0.5, 0.378550582109660373, 0.667057397175370246, 1.04354846482004586, -0.80278116477114148),
        (3, 5.0, 0.1, 2.42916127268900215e-11, 565326888.96516679, 1.00135412711199988e-9, -17862444599.5313195),
        (2, 5.0, 2.0, 0.0000834277523334637447, 2543.76658904759574, 0.000211838579967870936, -5527.32256483766845),
        (0, -5.0, 0.1, 0.32259489671288842, 0.0588381030870879024, 1.23755560168859883, -2.8741452061997233),
        (3, -5.0, 50.0, -0.956397873644784654, -0.00399214794580266485, -0.00512588260663924715, 1.04556854869136135),
        (1, 2.0, 10.0, -0.865737387535917244, -0.746893228412100902, -0.555780527034744116, 0.675598970652258435),
        (0, 5.0, 0.1, 1.34164319098502687e-7, 333191.530718995491, 1.9191106703895766e-6, -2687514.68748566404),
        (10, 20.0, 30.0, 0.00321256501032214476, 231.166842425883409, 0.00225687179487623263, -148.879811577871982),
        (0, 20.0, 45.0, 1.6279706326468776, -0.503237281282685327, -0.234348381189949101, -0.541820067320772379),
        (10, -20.0, 3.0, 0.703773153640769358, 0.351435334737672973, 0.395446861871123895, -1.22344251876202895),
        (2, 0.5, 150.0, -0.0213509128729842577, 1.00151328092422484, 0.998035671577531702, 0.0212646682451023248),
    ];

    #[test]
    fn free_particle_limit() {
        for &rho in &[0.05, 0.7, 3.0, 11.0, 60.0, 199.0] {
            let v = coulomb_fg(CoulombParams::new(0, 0.0, rho).unwrap()).unwrap();
            assert!((v.f - rho.sin()).abs() < 1e-12, "rho={rho}");
            assert!((v.g - rho.cos()).abs() < 1e-12, "rho={rho}");
            assert!((v.fp - rho.cos()).abs() < 1e-12);
            assert!((v.gp + rho.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn spherical_bessel_limit_l1() {
        // F₁(ρ;0) = sin ρ/ρ − cos ρ, G₁(ρ;0) = cos ρ/ρ + sin ρ
        for &rho in &[0.3, 2.0, 9.0, 40.0] {
            let v = coulomb_fg(CoulombParams::new(1, 0.0, rho).unwrap()).unwrap();
            assert!((v.f - (rho.sin() / rho - rho.cos())).abs() < 1e-12);
            assert!((v.g - (rho.cos() / rho + rho.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_values() {
        for &(l, eta, rho, f, g, fp, gp) in REFERENCE {
            let v = coulomb_fg(CoulombParams::new(l, eta, rho).unwrap()).unwrap();
            assert_relative_eq!(v.f, f, max_relative = 1e-10);
            assert_relative_eq!(v.g, g, max_relative = 1e-10);
            assert_relative_eq!(v.fp, fp, max_relative = 1e-10);
            assert_relative_eq!(v.gp, gp, max_relative = 1e-10);
        }
    }

    #[test]
    fn series_and_steed_agree_at_matching_radius() {
        for &(l, eta) in &[(0, 1.0), (0, -5.0), (3, 5.0), (10, 20.0), (2, -20.0), (10, -3.0)] {
            let w = CoulombWaves::new(l, eta).unwrap();
            let (f, fp) = w.f_at_matching_radius_from_series();
            let s = steed(l, eta, w.matching_radius()).unwrap();
            assert_relative_eq!(f, s.f, max_relative = 1e-10);
            assert_relative_eq!(fp, s.fp, max_relative = 1e-10);
        }
    }

    #[test]
    fn wronskian_across_range() {
        for l in 0..=3u32 {
            for &eta in &[-5.0, -1.0, 0.0, 0.5, 2.0, 5.0] {
                let w = CoulombWaves::new(l, eta).unwrap();
                for i in 0..=40 {
                    let rho = 0.1 * (500f64).powf(i as f64 / 40.0);
                    let v = w.eval(rho).unwrap();
                    assert!((v.wronskian() - 1.0).abs() < 1e-9, "l={l} eta={eta} rho={rho}: {}", v.wronskian());
                }
            }
        }
    }

    #[test]
    fn regular_and_irregular_behaviour_at_origin() {
        let w = CoulombWaves::new(0, 1.0).unwrap();
        let a = w.eval(1e-3).unwrap();
        let b = w.eval(1e-6).unwrap();
        assert!(b.f.abs() < a.f.abs() && b.f.abs() < 1e-5);
        assert!(b.g.abs() > a.g.abs());
        let c = w.normalization();
        assert_relative_eq!(b.f / 1e-6, c, max_relative = 1e-5);
    }

    #[test]
    fn hypergeometric_route_matches() {
        let acc = EvalAccuracy::default();
        for &(l, eta, rho) in &[(0u32, 1.0, 1.0), (2, -1.5, 3.0), (1, 0.5, 0.2)] {
            let p = CoulombParams::new(l, eta, rho).unwrap();
            let h = coulomb_f_hypergeometric(p, NormalizationConvention::Conventional, &acc).unwrap();
            let f = coulomb_f(p).unwrap().0;
            assert!(h.im.abs() <= 1e-12 * h.norm());
            assert_relative_eq!(h.re, f, max_relative = 1e-11);
            let printed = coulomb_f_hypergeometric(p, NormalizationConvention::AsPrinted, &acc).unwrap();
            if eta != 0.0 {
                assert!(printed.im.abs() > 1e-3 * printed.norm());
            }
        }
    }

    #[test]
    fn sommerfeld_conventions() {
        assert_eq!(sommerfeld_eta(0.0, 1.0, f64::INFINITY, 2.0, EtaConvention::Conventional).unwrap(), 0.0);
        assert_eq!(sommerfeld_eta(-3.0, 1.0, f64::INFINITY, 2.0, EtaConvention::Conventional).unwrap(), -1.5);
        assert_eq!(sommerfeld_eta(4.0, 1.0, f64::INFINITY, 1.0, EtaConvention::AsPrinted).unwrap(), 2.0);
        assert!(sommerfeld_eta(-1.0, 1.0, f64::INFINITY, 1.0, EtaConvention::AsPrinted).is_err());
        // equal masses m: μ = m/2
        let eta = sommerfeld_eta(-1.0, 3.0, 3.0, 1.0, EtaConvention::Conventional).unwrap();
        assert_eq!(eta, -1.5);
        assert!(sommerfeld_eta(1.0, 1.0, 1.0, 0.0, EtaConvention::Conventional).is_err());
    }

    #[test]
    fn range_guards() {
        assert!(matches!(CoulombParams::new(11, 0.0, 1.0), Err(Error::Range { .. })));
        assert!(matches!(CoulombParams::new(0, 21.0, 1.0), Err(Error::Range { .. })));
        assert!(matches!(CoulombParams::new(0, 1.0, 201.0), Err(Error::Range { .. })));
        assert!(matches!(CoulombParams::new(0, 1.0, 0.0), Err(Error::Domain { .. })));
    }
}
