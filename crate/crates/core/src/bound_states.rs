//! Hydrogenic states, vacuum-polarization level shifts (perturbative and by
//! direct Numerov solution), and electron–nucleus cusp values.
//!
//! Sign convention: the bound particle is an electron (charge −1) in the
//! field of a nucleus of charge +Q, so the Coulomb energy is −Q/r and the
//! contact cusp is −Q.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::error::{domain, ensure_positive, Error, Result};
use crate::potentials::{uehling_closed, wichmann_kroll_regularized};
use crate::quadrature::{exp_sinh, gauss_kronrod, tanh_sinh, EvalAccuracy};
use crate::special_functions::{ln_gamma, EULER_GAMMA};

pub const ELECTRON_ELECTRON_CUSP: f64 = 0.5;
pub const NUMEROV_STEPS_DEFAULT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenicState {
    pub n: u32,
    pub ell: u32,
    pub q: f64,
    pub reduced_mass: f64,
    pub energy: f64,
}

fn laguerre(m: u32, a: f64, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let (mut l0, mut l1) = (1.0, 1.0 + a - x);
    for k in 1..m {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + a - x) * l1 - (kf + a) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

impl HydrogenicState {
    fn scale(&self) -> f64 {
        self.reduced_mass * self.q
    }

    fn norm(&self) -> f64 {
        let (n, l) = (self.n as f64, self.ell as f64);
        let z = self.scale();
        let ln_ratio = ln_gamma(n - l).expect("n > l") - ln_gamma(n + l + 1.0).expect("positive");
        ((2.0 * z / n).powi(3) / (2.0 * n) * ln_ratio.exp()).sqrt()
    }

    /// R_{nℓ}(r), normalized so that ∫ R² r² dr = 1.
    pub fn radial(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let rho = 2.0 * self.scale() * r / n;
        self.norm() * rho.powi(self.ell as i32) * (-0.5 * rho).exp() * laguerre(self.n - self.ell - 1, 2.0 * self.ell as f64 + 1.0, rho)
    }

    /// dR_{nℓ}/dr.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let drho = 2.0 * self.scale() / n;
        let rho = drho * r;
        let m = self.n - self.ell - 1;
        let a = 2.0 * self.ell as f64 + 1.0;
        let lag = laguerre(m, a, rho);
        let dlag = if m == 0 { 0.0 } else { -laguerre(m - 1, a + 1.0, rho) };
        let l = self.ell as i32;
        let pow = rho.powi(l);
        let dpow = if l == 0 { 0.0 } else { l as f64 * rho.powi(l - 1) };
        let e = (-0.5 * rho).exp();
        self.norm() * drho * e * (dpow * lag + pow * (dlag - 0.5 * lag))
    }

    /// Number of sign changes of R on (0, ∞).
    pub fn node_count(&self) -> u32 {
        self.n - self.ell - 1
    }
}

pub fn hydrogenic_state(n: u32, ell: u32, q: f64) -> Result<HydrogenicState> {
    hydrogenic_state_with_mass(n, ell, q, 1.0)
}

pub fn hydrogenic_state_with_mass(n: u32, ell: u32, q: f64, reduced_mass: f64) -> Result<HydrogenicState> {
    if n == 0 || ell >= n {
        return Err(domain("hydrogenic_state", format!("need 1 <= n and 0 <= ell < n, got n = {n}, ell = {ell}")));
    }
    ensure_positive("hydrogenic_state", "Q", q)?;
    ensure_positive("hydrogenic_state", "reduced mass", reduced_mass)?;
    Ok(HydrogenicState {
        n,
        ell,
        q,
        reduced_mass,
        energy: -reduced_mass * q * q / (2.0 * (n * n) as f64),
    })
}

/// Electron (−1) on a nucleus (+Q) with α and μ taken from `ctx`.
pub fn electron_nucleus_context(q: f64, ctx: &PhysicalContext) -> PhysicalContext {
    PhysicalContext::pair(-1.0, q)
        .with_alpha(ctx.alpha)
        .with_reduced_mass(ctx.reduced_mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    Uehling,
    WichmannKroll,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShiftQuadrature {
    /// tanh-sinh on [0, α], exp-sinh on [α, ∞).
    #[default]
    DoubleExponential,
    /// Adaptive Gauss–Kronrod on geometrically growing panels.
    GaussKronrod,
}

fn shift_potential(kind: ShiftKind, r: f64, ctx: &PhysicalContext) -> Result<f64> {
    Ok(match kind {
        ShiftKind::Uehling => uehling_closed(r, ctx)?,
        ShiftKind::WichmannKroll => wichmann_kroll_regularized(r, ctx)?,
        ShiftKind::Both => uehling_closed(r, ctx)? + wichmann_kroll_regularized(r, ctx)?,
    })
}

/// ⟨nℓ|V|nℓ⟩ for V = U, W_K or both (α, μ from `ctx`; charges from the state).
pub fn perturbative_shift(state: &HydrogenicState, kind: ShiftKind, ctx: &PhysicalContext) -> Result<f64> {
    perturbative_shift_with(state, kind, ctx, ShiftQuadrature::default(), &EvalAccuracy::with_rel_tol(1e-12))
}

pub fn perturbative_shift_with(
    state: &HydrogenicState,
    kind: ShiftKind,
    ctx: &PhysicalContext,
    scheme: ShiftQuadrature,
    acc: &EvalAccuracy,
) -> Result<f64> {
    ctx.validate()?;
    let pair = electron_nucleus_context(state.q, ctx);
    let alpha = ctx.alpha;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let failure = std::cell::Cell::new(None);
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        match shift_potential(kind, r, &pair) {
            Ok(v) => {
                let rr = state.radial(r);
                v * rr * rr * r * r
            }
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let value = match scheme {
        ShiftQuadrature::DoubleExponential => {
            let inner = tanh_sinh(integrand, 0.0, alpha, acc)?.value;
            let outer = exp_sinh(|s| integrand(alpha + s), acc)?.value;
            inner + outer
        }
        ShiftQuadrature::GaussKronrod => {
            let mut total = gauss_kronrod(integrand, 0.0, 1e-6 * alpha, acc)?.value;
            let mut a = 1e-6 * alpha;
            let r_end = 80.0 * state.n as f64 * state.n as f64 / (state.q * ctx.reduced_mass);
            while a < r_end {
                let b = (2.0 * a).min(r_end);
                total += gauss_kronrod(integrand, a, b, acc)?.value;
                a = b;
            }
            total
        }
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMode {
    Coulomb,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumerovGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
}

impl NumerovGrid {
    /// r ∈ [10⁻⁶/Q, 60n²/Q] with the default step count.
    pub fn for_level(n: u32, q: f64) -> Self {
        Self {
            r_min: 1e-6 / q,
            r_max: 60.0 * (n * n) as f64 / q,
            steps: NUMEROV_STEPS_DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumerovSolution {
    pub n: u32,
    pub ell: u32,
    pub energy: f64,
    /// (r, u(r)) with u = rR normalized to ∫u² dr = 1.
    pub samples: Vec<(f64, f64)>,
    /// ⟨V⟩ over the solution, for the virial check.
    pub potential_expectation: f64,
    pub bisection_steps: usize,
}

struct Tabulated {
    x0: f64,
    h: f64,
    q: f64,
    /// 2μr² per node
    two_mu_r2: Vec<f64>,
    /// V per node
    v: Vec<f64>,
    shift: f64,
}

impl Tabulated {
    fn g(&self, i: usize, e: f64) -> f64 {
        self.two_mu_r2[i] * (self.v[i] - e) + self.shift
    }

    fn r(&self, i: usize) -> f64 {
        (self.x0 + self.h * i as f64).exp() / self.q
    }

    /// Nodes of the outward solution and, optionally, the solution itself.
    fn shoot(&self, e: f64, keep: bool) -> (u32, Vec<f64>) {
        let n = self.v.len();
        let h2 = self.h * self.h / 12.0;
        let power = self.shift.sqrt();
        let mut w = if keep { vec![0.0; n] } else { Vec::new() };
        let mut w0 = (power * self.x0).exp();
        let mut w1 = (power * (self.x0 + self.h)).exp();
        if keep {
            w[0] = w0;
            w[1] = w1;
        }
        let mut f0 = 1.0 - h2 * self.g(0, e);
        let mut f1 = 1.0 - h2 * self.g(1, e);
        let mut nodes = 0;
        for i in 2..n {
            let f2 = 1.0 - h2 * self.g(i, e);
            let w2 = ((12.0 - 10.0 * f1) * w1 - f0 * w0) / f2;
            if (w2 < 0.0) != (w1 < 0.0) && w2 != 0.0 {
                nodes += 1;
            }
            if keep {
                w[i] = w2;
            }
            w0 = w1;
            w1 = w2;
            f0 = f1;
            f1 = f2;
            if w1.abs() > 1e200 {
                w0 *= 1e-200;
                w1 *= 1e-200;
                if keep {
                    w.iter_mut().take(i + 1).for_each(|x| *x *= 1e-200);
                }
            }
        }
        (nodes, w)
    }
}

/// Bound level (n, ℓ) of −Q/r [+ U + W_K] by Numerov shooting on x = ln(Qr),
/// u = e^{x/2}w, w″ = [2μr²(V − E) + (ℓ+½)²]w, bisecting on the node count.
pub fn numerov_eigensolve(
    n: u32,
    ell: u32,
    q: f64,
    mode: PotentialMode,
    grid: &NumerovGrid,
    ctx: &PhysicalContext,
) -> Result<NumerovSolution> {
    let exact = hydrogenic_state_with_mass(n, ell, q, ctx.reduced_mass)?;
    ctx.validate()?;
    if grid.r_min > 1e-5 / q || grid.r_max < 50.0 * (n * n) as f64 / q || grid.r_min <= 0.0 {
        return Err(domain(
            "numerov_eigensolve",
            format!("grid must span at least [1e-5/Q, 50 n^2/Q], got [{}, {}]", grid.r_min, grid.r_max),
        ));
    }
    if grid.steps < 100 {
        return Err(domain("numerov_eigensolve", "at least 100 steps required"));
    }
    let pair = electron_nucleus_context(q, ctx);
    let mu = ctx.reduced_mass;
    let x0 = (q * grid.r_min).ln();
    let x1 = (q * grid.r_max).ln();
    let h = (x1 - x0) / grid.steps as f64;
    let npts = grid.steps + 1;
    let mut tab = Tabulated {
        x0,
        h,
        q,
        two_mu_r2: Vec::with_capacity(npts),
        v: Vec::with_capacity(npts),
        shift: (ell as f64 + 0.5).powi(2),
    };
    for i in 0..npts {
        let r = tab.r(i);
        let coulomb = -q / r;
        let v = match mode {
            PotentialMode::Coulomb => coulomb,
            PotentialMode::Total => coulomb + uehling_closed(r, &pair)? + wichmann_kroll_regularized(r, &pair)?,
        };
        tab.two_mu_r2.push(2.0 * mu * r * r);
        tab.v.push(v);
    }
    let e_ref = exact.energy;
    let worst = (0..npts).map(|i| tab.g(i, e_ref).abs()).fold(0.0, f64::max);
    if h * h * worst > 0.5 {
        return Err(Error::Solver {
            func: "numerov_eigensolve",
            detail: format!("grid too coarse: h^2 max|g| = {:.3}; increase steps", h * h * worst),
        });
    }

    let target = exact.node_count();
    let nf = n as f64;
    let mut lo = 2.0 * e_ref;
    let mut hi = -mu * q * q / (2.0 * (nf + 0.5).powi(2));
    let (n_lo, _) = tab.shoot(lo, false);
    let (n_hi, _) = tab.shoot(hi, false);
    if n_lo > target || n_hi <= target {
        return Err(Error::Solver {
            func: "numerov_eigensolve",
            detail: format!("no sign change: node counts {n_lo}, {n_hi} do not bracket {target}"),
        });
    }
    let mut steps = 0;
    while hi - lo > 4.0 * f64::EPSILON * lo.abs() && steps < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tab.shoot(mid, false).0 > target {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    let energy = 0.5 * (lo + hi);
    let (_, w) = tab.shoot(energy, true);
    // the outward solution diverges past the last node near r_max; cut it
    // where it stops decaying
    let mut end = npts;
    let mut best = f64::INFINITY;
    for i in (npts / 2..npts).rev() {
        let u = (w[i] * (0.5 * (x0 + h * i as f64)).exp()).abs();
        if u < best {
            best = u;
            end = i + 1;
        } else if i + 1 < end.saturating_sub(10) {
            break;
        }
    }
    let mut norm = 0.0;
    let mut v_exp = 0.0;
    let mut samples = Vec::with_capacity(end);
    for (i, &wi) in w.iter().enumerate().take(end) {
        let r = tab.r(i);
        let u = wi * (0.5 * (x0 + h * i as f64)).exp();
        let weight = if i == 0 || i + 1 == end { 0.5 } else { 1.0 } * h * r;
        norm += weight * u * u;
        v_exp += weight * u * u * tab.v[i];
        samples.push((r, u));
    }
    let scale = norm.sqrt();
    for s in &mut samples {
        s.1 /= scale;
    }
    Ok(NumerovSolution {
        n,
        ell,
        energy,
        samples,
        potential_expectation: v_exp / norm,
        bisection_steps: steps,
    })
}

/// Total-minus-Coulomb level shift from two Numerov solves on one grid.
pub fn direct_shift(n: u32, ell: u32, q: f64, grid: &NumerovGrid, ctx: &PhysicalContext) -> Result<f64> {
    let (c, t) = rayon::join(
        || numerov_eigensolve(n, ell, q, PotentialMode::Coulomb, grid, ctx),
        || numerov_eigensolve(n, ell, q, PotentialMode::Total, grid, ctx),
    );
    Ok(t?.energy - c?.energy)
}

/// R′(0)/R(0): the contact cusp. Equals −μQ for every s state.
pub fn cusp_operator_value(state: &HydrogenicState) -> Result<f64> {
    if state.ell > 0 {
        return Err(domain("cusp_operator_value", "wave function vanishes at contact for ell > 0"));
    }
    Ok(state.radial_derivative(0.0) / state.radial(0.0))
}

/// Shortest resolvable distance Λ_e/Q = α/Q (atomic units).
pub fn minimal_distance(q: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("minimal_distance", "Q", q)?;
    Ok(ctx.alpha / q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspReport {
    pub nu_coulomb: f64,
    pub nu_modified: f64,
    pub c_param: f64,
    pub f_param: f64,
    pub uehling_rel_correction: f64,
    pub wk_abs_correction: f64,
}

/// Default Wichmann-Kroll cusp factor f = 1/(1 + C²).
pub fn default_f_param(c_param: f64) -> f64 {
    1.0 / (1.0 + c_param * c_param)
}

/// ν = −Q{1 − (α/3π)[5/3 + 2γ + 2 ln C]} + f·2Q³α³/(225π).
pub fn modified_cusp(q: f64, c_param: f64, f_param: Option<f64>, ctx: &PhysicalContext) -> Result<CuspReport> {
    ensure_positive("modified_cusp", "Q", q)?;
    ensure_positive("modified_cusp", "C", c_param)?;
    let f = f_param.unwrap_or_else(|| default_f_param(c_param));
    if !f.is_finite() {
        return Err(domain("modified_cusp", "f must be finite"));
    }
    let a = ctx.alpha;
    let rel = a / (3.0 * PI) * (5.0 / 3.0 + 2.0 * EULER_GAMMA + 2.0 * c_param.ln());
    let wk = f * 2.0 * q.powi(3) * a.powi(3) / (225.0 * PI);
    Ok(CuspReport {
        nu_coulomb: -q,
        nu_modified: -q * (1.0 - rel) + wk,
        c_param,
        f_param: f,
        uehling_rel_correction: rel,
        wk_abs_correction: wk,
    })
}

/// The r-dependent form before the cutoff: the bracket holds 2 ln(r/α).
pub fn cusp_r_dependent(r: f64, q: f64, f_param: f64, ctx: &PhysicalContext) -> Result<f64> {
    ensure_positive("cusp_r_dependent", "r", r)?;
    let a = ctx.alpha;
    if a == 0.0 {
        return Ok(-q);
    }
    let rel = a / (3.0 * PI) * (5.0 / 3.0 + 2.0 * EULER_GAMMA - 2.0 * a.ln() + 2.0 * r.ln());
    Ok(-q * (1.0 - rel) + f_param * 2.0 * q.powi(3) * a.powi(3) / (225.0 * PI))
}
