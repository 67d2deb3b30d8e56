//! Truncated discrete-series representation of the radial O(2,1) algebra.
//!
//! Basis |n⟩, n = ℓ+1, …, ℓ+N, with S|n⟩ = n|n⟩ and the ladder
//! K₊|n⟩ = √(n(n+1) − ℓ(ℓ+1))|n+1⟩, K₋ = K₊†. Then U = (K₊+K₋)/2 and
//! T = (K₊−K₋)/(2i) satisfy [S,T] = −iU, [T,U] = iS, [U,S] = −iT, and
//! S² − U² − T² = ℓ(ℓ+1). Truncation only spoils entries that reach past the
//! last basis vector, so all checks are made on interior blocks.
//!
//! In this representation e^{−iβT}(S±U)e^{iβT} = e^{±β}(S±U), so the radial
//! coordinate, which dilation T = r·p_r shrinks by e^{−β}, is r = S − U
//! (as the differential forms of S and U also give), and rp² + L²/r = S + U.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::error::{domain, ensure_positive, Result};
use crate::special_functions::EULER_GAMMA;

type CMat = DMatrix<Complex64>;

pub const MAX_EXPANSION_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraRep {
    pub ell: u32,
    pub n_basis: usize,
    pub s: CMat,
    pub t: CMat,
    pub u: CMat,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn build_generators(ell: u32, n_basis: usize) -> Result<AlgebraRep> {
    if n_basis < 3 {
        return Err(domain("build_generators", format!("basis size must be at least 3, got {n_basis}")));
    }
    let casimir = (ell * (ell + 1)) as f64;
    let mut s = CMat::zeros(n_basis, n_basis);
    let mut kp = CMat::zeros(n_basis, n_basis);
    for i in 0..n_basis {
        let n = (ell + 1) as f64 + i as f64;
        s[(i, i)] = c(n);
        if i + 1 < n_basis {
            kp[(i + 1, i)] = c((n * (n + 1.0) - casimir).sqrt());
        }
    }
    let km = kp.adjoint();
    let u = (&kp + &km) * c(0.5);
    let t = (&kp - &km) * Complex64::new(0.0, -0.5);
    Ok(AlgebraRep { ell, n_basis, s, t, u })
}

impl AlgebraRep {
    /// Largest |entry| of `m` on the leading `size × size` block.
    fn block_max(m: &CMat, size: usize) -> f64 {
        m.view((0, 0), (size, size)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn interior(&self) -> usize {
        self.n_basis - 1
    }

    pub fn casimir(&self) -> CMat {
        &self.s * &self.s - &self.u * &self.u - &self.t * &self.t
    }

    /// ⟨n|r^m|n⟩ = ⟨n|(S−U)^m|n⟩; needs n + m + 2 ≤ ℓ + N so the edge cannot contribute.
    pub fn r_power_expectation(&self, n: u32, m: u32) -> Result<f64> {
        let first = self.ell + 1;
        if n < first || (n - first) as usize + m as usize + 2 > self.n_basis {
            return Err(domain(
                "r_power_expectation",
                format!("n = {n}, m = {m} too close to the truncation edge (N = {})", self.n_basis),
            ));
        }
        let r = &self.s - &self.u;
        let mut p = CMat::identity(self.n_basis, self.n_basis);
        for _ in 0..m {
            p = &p * &r;
        }
        let i = (n - first) as usize;
        Ok(p[(i, i)].re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub ell: u32,
    pub n_basis: usize,
    /// max |[S,T] + iU|
    pub st: f64,
    /// max |[T,U] − iS|
    pub tu: f64,
    /// max |[U,S] + iT|
    pub us: f64,
    /// max |S² − U² − T² − ℓ(ℓ+1)|
    pub casimir: f64,
}

impl CommutatorReport {
    pub fn max_residual(&self) -> f64 {
        self.st.max(self.tu).max(self.us).max(self.casimir)
    }
}

/// Residuals of the defining relations on the interior (N−1)-block.
pub fn verify_commutators(rep: &AlgebraRep) -> CommutatorReport {
    let i = Complex64::new(0.0, 1.0);
    let comm = |a: &CMat, b: &CMat| a * b - b * a;
    let k = rep.interior();
    let id = CMat::identity(rep.n_basis, rep.n_basis);
    CommutatorReport {
        ell: rep.ell,
        n_basis: rep.n_basis,
        st: AlgebraRep::block_max(&(comm(&rep.s, &rep.t) + &rep.u * i), k),
        tu: AlgebraRep::block_max(&(comm(&rep.t, &rep.u) - &rep.s * i), k),
        us: AlgebraRep::block_max(&(comm(&rep.u, &rep.s) + &rep.t * i), k),
        casimir: AlgebraRep::block_max(&(rep.casimir() - id * c((rep.ell * (rep.ell + 1)) as f64)), k),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub beta: f64,
    pub block: usize,
    /// max |e^{−iβT}(S+U)e^{iβT} − e^{β}(S+U)|
    pub plus: f64,
    /// max |e^{−iβT}(S−U)e^{iβT} − e^{−β}(S−U)|
    pub minus: f64,
}

/// Checks e^{−iβT}(S±U)e^{iβT} = e^{±β}(S±U) on a leading block of size
/// N − `margin`, far enough from the edge for the truncated exponential.
pub fn hausdorff_residual(rep: &AlgebraRep, beta: f64, margin: usize) -> Result<HausdorffReport> {
    if margin >= rep.n_basis {
        return Err(domain("hausdorff_residual", "margin swallows the whole basis"));
    }
    let i = Complex64::new(0.0, 1.0);
    let fwd = (&rep.t * (i * beta)).exp();
    let back = (&rep.t * (-i * beta)).exp();
    let block = rep.n_basis - margin;
    let plus = &rep.s + &rep.u;
    let minus = &rep.s - &rep.u;
    let lhs_p = &back * &plus * &fwd;
    let lhs_m = &back * &minus * &fwd;
    Ok(HausdorffReport {
        beta,
        block,
        plus: AlgebraRep::block_max(&(lhs_p - plus * c(beta.exp())), block),
        minus: AlgebraRep::block_max(&(lhs_m - minus * c((-beta).exp())), block),
    })
}

/// E_n from the scaled equation [√(−2E)·S − Q]|n⟩ = 0 with S|n⟩ = n|n⟩.
pub fn hydrogen_spectrum_from_algebra(q: f64, n: u32) -> Result<f64> {
    ensure_positive("hydrogen_spectrum_from_algebra", "Q", q)?;
    if n == 0 {
        return Err(domain("hydrogen_spectrum_from_algebra", "n must be at least 1"));
    }
    let rep = build_generators(0, (n as usize).max(3))?;
    let eig = rep.s[(n as usize - 1, n as usize - 1)].re;
    // √(−2E)·eig = Q
    Ok(-(q * q) / (2.0 * (eig * eig)))
}

/// Residual of r(H − E) = ½(S+U) − E(S−U) − Q after the dilation with
/// β = ln√(−2E), against the diagonal √(−2E)S − Q, on a leading block.
pub fn scaled_radial_operator_residual(rep: &AlgebraRep, q: f64, energy: f64, margin: usize) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(domain("scaled_radial_operator_residual", "energy must be negative"));
    }
    let i = Complex64::new(0.0, 1.0);
    let k = (-2.0 * energy).sqrt();
    let beta = k.ln();
    let id = CMat::identity(rep.n_basis, rep.n_basis);
    let op = (&rep.s + &rep.u) * c(0.5) - (&rep.s - &rep.u) * c(energy) - &id * c(q);
    let fwd = (&rep.t * (i * beta)).exp();
    let back = (&rep.t * (-i * beta)).exp();
    let target = &rep.s * c(k) - id * c(q);
    Ok(AlgebraRep::block_max(&(back * op * fwd - target), rep.n_basis - margin))
}

/// Same comparison for the operator as typeset, (S+U) − E(S−U) + Q: without
/// the ½ and with +Q it is not diagonalized by any dilation.
pub fn scaled_radial_operator_residual_as_printed(rep: &AlgebraRep, q: f64, energy: f64, margin: usize) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(domain("scaled_radial_operator_residual_as_printed", "energy must be negative"));
    }
    let i = Complex64::new(0.0, 1.0);
    let k = (-2.0 * energy).sqrt();
    let beta = k.ln();
    let id = CMat::identity(rep.n_basis, rep.n_basis);
    let op = (&rep.s + &rep.u) - (&rep.s - &rep.u) * c(energy) + &id * c(q);
    let fwd = (&rep.t * (i * beta)).exp();
    let back = (&rep.t * (-i * beta)).exp();
    let target = &rep.s * c(k) - id * c(q);
    Ok(AlgebraRep::block_max(&(back * op * fwd - target), rep.n_basis - margin))
}

/// Residual of the verbatim right-hand side e^{βT}(S+U), an operator
/// product, in place of the scalar e^{β}(S+U).
pub fn hausdorff_residual_as_printed(rep: &AlgebraRep, beta: f64, margin: usize) -> Result<f64> {
    if margin >= rep.n_basis {
        return Err(domain("hausdorff_residual_as_printed", "margin swallows the whole basis"));
    }
    let i = Complex64::new(0.0, 1.0);
    let fwd = (&rep.t * (i * beta)).exp();
    let back = (&rep.t * (-i * beta)).exp();
    let plus = &rep.s + &rep.u;
    let printed = (&rep.t * c(beta)).exp() * &plus;
    Ok(AlgebraRep::block_max(&(back * &plus * fwd - printed), rep.n_basis - margin))
}

/// One term of rU(r) = Σ_m [a_m + b_m ln(r/α)] r^m, with r = S − U.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub power: usize,
    pub coefficient: f64,
    pub log_coefficient: f64,
    pub operator: String,
}

/// Q → Q(1 − 5α/9π): the long-wavelength charge renormalization.
pub fn effective_charge_factor(alpha: f64) -> f64 {
    1.0 - 5.0 * alpha / (9.0 * PI)
}

/// Power series in z with terms z^m [a_m + b_m L], L = ln(z/2).
#[derive(Debug, Clone)]
struct LogSeries {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LogSeries {
    fn zeros(len: usize) -> Self {
        Self { a: vec![0.0; len], b: vec![0.0; len] }
    }

    fn len(&self) -> usize {
        self.a.len()
    }

    /// ∫₀^z of the series (one order is lost at the top).
    fn integrate(&self) -> Self {
        let mut out = Self::zeros(self.len());
        for m in 0..self.len() - 1 {
            let p = (m + 1) as f64;
            // ∫ t^m (a + b ln(t/2)) dt = z^{m+1}/(m+1) (a + b L − b/(m+1))
            out.a[m + 1] = (self.a[m] - self.b[m] / p) / p;
            out.b[m + 1] = self.b[m] / p;
        }
        out
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            a: self.a.iter().map(|x| x * s).collect(),
            b: self.b.iter().map(|x| x * s).collect(),
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&o.b).map(|(x, y)| x + y).collect(),
        }
    }

    /// Multiply by z^p (dropping the overflow).
    fn shift(&self, p: usize) -> Self {
        let mut out = Self::zeros(self.len());
        for m in 0..self.len().saturating_sub(p) {
            out.a[m + p] = self.a[m];
            out.b[m + p] = self.b[m];
        }
        out
    }

    fn constant(len: usize, a0: f64, a1: f64) -> Self {
        let mut out = Self::zeros(len);
        out.a[0] = a0;
        if len > 1 {
            out.a[1] = a1;
        }
        out
    }
}

/// Small-z series of (1+z²/12)K₀ − (z/12)Ki₁ − (5/6+z²/12)Ki₂.
fn uehling_bracket_series(len: usize) -> LogSeries {
    let mut k0 = LogSeries::zeros(len);
    let mut harmonic = 0.0;
    let mut fact = 1.0;
    for k in 0..len.div_ceil(2) {
        if k > 0 {
            harmonic += 1.0 / k as f64;
            fact *= k as f64;
        }
        let w = 1.0 / (4f64.powi(k as i32) * fact * fact);
        if 2 * k < len {
            k0.a[2 * k] = w * (harmonic - EULER_GAMMA);
            k0.b[2 * k] = -w;
        }
    }
    let int_k0 = k0.integrate();
    // Ki₁ = π/2 − ∫₀^z K₀, Ki₂ = 1 − ∫₀^z Ki₁
    let ki1 = LogSeries::constant(len, PI / 2.0, 0.0).add(&int_k0.scale(-1.0));
    let ki2 = LogSeries::constant(len, 1.0, 0.0).add(&ki1.integrate().scale(-1.0));
    k0.add(&k0.shift(2).scale(1.0 / 12.0))
        .add(&ki1.shift(1).scale(-1.0 / 12.0))
        .add(&ki2.scale(-5.0 / 6.0))
        .add(&ki2.shift(2).scale(-1.0 / 12.0))
}

/// Coefficients of rU(r) up to r^order, log term ln(r/α) kept separate.
pub fn uehling_operator_expansion(order: usize, ctx: &PhysicalContext) -> Result<Vec<ExpansionTerm>> {
    if order > MAX_EXPANSION_ORDER {
        return Err(domain(
            "uehling_operator_expansion",
            format!("order {order} unsupported (max {MAX_EXPANSION_ORDER})"),
        ));
    }
    ctx.validate()?;
    let alpha = ctx.alpha;
    let series = uehling_bracket_series(order + 3);
    let pref = 2.0 * alpha * ctx.charge_product() / (3.0 * PI);
    Ok((0..=order)
        .map(|m| {
            // z = 2r/α and ln(z/2) = ln(r/α)
            let (a, b) = if alpha == 0.0 {
                (0.0, 0.0)
            } else {
                let zr = (2.0 / alpha).powi(m as i32);
                (pref * series.a[m] * zr, pref * series.b[m] * zr)
            };
            ExpansionTerm {
                power: m,
                coefficient: a,
                log_coefficient: b,
                operator: match m {
                    0 => "I".to_string(),
                    1 => "(S-U)".to_string(),
                    _ => format!("(S-U)^{m}"),
                },
            }
        })
        .collect())
}

/// Σ terms evaluated at r: the truncated rU(r).
pub fn evaluate_expansion(terms: &[ExpansionTerm], r: f64, alpha: f64) -> f64 {
    let l = (r / alpha).ln();
    terms
        .iter()
        .map(|t| (t.coefficient + t.log_coefficient * l) * r.powi(t.power as i32))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::uehling_closed;
    use approx::assert_relative_eq;

    #[test]
    fn spectrum_and_relations() {
        let rep = build_generators(0, 5).unwrap();
        let diag: Vec<f64> = (0..5).map(|i| rep.s[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        for &(l, n) in &[(0, 8), (1, 10), (2, 12), (2, 10)] {
            let rep = build_generators(l, n).unwrap();
            assert!(verify_commutators(&rep).max_residual() <= 1e-12);
            assert!(rep.u.iter().all(|z| z.im == 0.0 && z.re >= 0.0));
            assert_eq!(rep.u, rep.u.adjoint());
            assert_eq!(rep.t, rep.t.adjoint());
        }
        assert!(build_generators(0, 2).is_err());
    }

    #[test]
    fn corrupted_rep_is_detected() {
        let mut rep = build_generators(1, 8).unwrap();
        rep.u[(2, 3)] += c(1.0);
        assert!(verify_commutators(&rep).max_residual() >= 0.5);
    }

    #[test]
    fn hausdorff_and_scaled_operator() {
        let rep = build_generators(0, 12).unwrap();
        let h = hausdorff_residual(&rep, 0.1, 6).unwrap();
        assert!(h.plus <= 1e-8 && h.minus <= 1e-8, "{h:?}");
        let rep = build_generators(0, 40).unwrap();
        let e = hydrogen_spectrum_from_algebra(1.0, 2).unwrap();
        assert!(scaled_radial_operator_residual(&rep, 1.0, e, 35).unwrap() < 1e-8);
    }

    #[test]
    fn algebraic_spectrum() {
        assert_eq!(hydrogen_spectrum_from_algebra(1.0, 1).unwrap(), -0.5);
        assert_eq!(hydrogen_spectrum_from_algebra(2.0, 3).unwrap(), -4.0 / 18.0);
    }

    #[test]
    fn expansion_matches_closed_form() {
        let ctx = PhysicalContext::nuclear(1.0);
        let terms = uehling_operator_expansion(4, &ctx).unwrap();
        let a = ctx.alpha;
        // leading bracket −ln(z/2) − γ − 5/6, then 3πz/8
        let pref = 2.0 * a / (3.0 * PI);
        assert_relative_eq!(terms[0].coefficient, pref * (-EULER_GAMMA - 5.0 / 6.0), max_relative = 1e-14);
        assert_relative_eq!(terms[0].log_coefficient, -pref, max_relative = 1e-14);
        assert_relative_eq!(terms[1].coefficient, pref * 3.0 * PI / 8.0 * 2.0 / a, max_relative = 1e-14);
        for &x in &[1e-3, 1e-2, 3e-2] {
            let r = x * a;
            let exact = r * uehling_closed(r, &ctx).unwrap();
            let approx = evaluate_expansion(&terms, r, a);
            assert!((approx - exact).abs() <= 10.0 * pref * (2.0 * x).powi(5) * (1.0 - x.ln()), "x = {x}");
        }
        let zero = uehling_operator_expansion(3, &ctx.with_alpha(0.0)).unwrap();
        assert!(zero.iter().all(|t| t.coefficient == 0.0 && t.log_coefficient == 0.0));
        assert!(uehling_operator_expansion(5, &ctx).is_err());
        assert_relative_eq!(effective_charge_factor(a), 1.0 - 5.0 * a / (9.0 * PI));
    }

    #[test]
    fn r_power_expectations() {
        let rep = build_generators(1, 12).unwrap();
        assert_relative_eq!(rep.r_power_expectation(3, 1).unwrap(), 3.0, max_relative = 1e-15);
        assert!(rep.r_power_expectation(11, 3).is_err());
        // ⟨n|(S−U)²|n⟩ = n² + (|K₊|² + |K₋|²)/4 = n² + (n² − ℓ(ℓ+1))/2
        assert_relative_eq!(rep.r_power_expectation(4, 2).unwrap(), 16.0 + (16.0 - 2.0) / 2.0, max_relative = 1e-14);
    }
}
