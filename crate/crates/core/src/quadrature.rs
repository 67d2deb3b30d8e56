//! Numerical integration: double-exponential rules for finite and
//! semi-infinite ranges, adaptive Gauss-Kronrod as an independent second
//! scheme, and a sine-weighted oscillatory integrator for radial transforms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Accuracy request threaded through every quadrature-backed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalAccuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for EvalAccuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_subdivisions: 10_000,
        }
    }
}

impl EvalAccuracy {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let acc = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        acc.validate()?;
        Ok(acc)
    }

    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(domain("EvalAccuracy", format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(domain("EvalAccuracy", format!("abs_tol must be >= 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(domain("EvalAccuracy", "max_subdivisions must be >= 1"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

const DE_MAX_LEVEL: usize = 12;
const DE_MIN_LEVEL: usize = 3;

/// Tanh-sinh rule on the finite interval `[a, b]`.
///
/// Abscissae near the endpoints are generated from the complement
/// `1 - tanh(u)` so that integrable endpoint singularities are sampled
/// without cancellation.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, acc: &EvalAccuracy) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("tanh_sinh", "interval endpoints must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let r = tanh_sinh(f, b, a, acc)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let half = 0.5 * (b - a);
    let t_max = 4.5;
    let mut evals = 0usize;

    // Contribution of the node pair at +t and -t (or the centre when t == 0).
    let mut node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let comp = 2.0 * e / (1.0 + e); // 1 - tanh|u|
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let w = half * FRAC_PI_2 * t.cosh() * sech2;
        if w == 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            evals += 1;
            return w * f(a + half);
        }
        let d = half * comp;
        let mut s = 0.0;
        let xl = a + d;
        let xr = b - d;
        if xl > a && xl < b {
            s += f(xl);
            evals += 1;
        }
        if xr < b && xr > a {
            s += f(xr);
            evals += 1;
        }
        w * s
    };

    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut j = 1;
    while (j as f64) * h <= t_max {
        sum += node(j as f64 * h);
        j += 1;
    }
    let mut estimate = h * sum;
    let mut last_diff = f64::INFINITY;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let mut j = 1usize;
        while (j as f64) * h <= t_max {
            sum += node(j as f64 * h);
            j += 2;
        }
        let next = h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        last_diff = diff;
        if !estimate.is_finite() {
            return Err(Error::Quadrature {
                func: "tanh_sinh",
                achieved: f64::NAN,
                requested: acc.target(1.0),
            });
        }
        if level >= DE_MIN_LEVEL && diff <= acc.target(estimate) {
            return Ok(QuadResult {
                value: estimate,
                error: diff,
                evaluations: evals,
            });
        }
    }
    Err(Error::Quadrature {
        func: "tanh_sinh",
        achieved: last_diff,
        requested: acc.target(estimate),
    })
}

/// Exp-sinh rule on `[0, ∞)`; `f` receives the distance from the lower
/// endpoint, so callers integrating over `[a, ∞)` evaluate at `a + s`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, acc: &EvalAccuracy) -> Result<QuadResult> {
    let t_cap = 6.0;
    let mut evals = 0usize;
    let mut term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let x = u.exp();
        if x == 0.0 || !x.is_finite() {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * x;
        evals += 1;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };

    // Level-0 sweep establishes the truncation window [t_lo, t_hi].
    let mut sum = term(0.0);
    let mut t_hi = 0.0;
    let mut t_lo = 0.0;
    let mut small = 0;
    let mut t = 1.0;
    while t <= t_cap {
        let v = term(t);
        sum += v;
        t_hi = t;
        if v.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        t += 1.0;
    }
    small = 0;
    t = -1.0;
    while t >= -t_cap {
        let v = term(t);
        sum += v;
        t_lo = t;
        if v.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        t -= 1.0;
    }

    let mut h = 1.0;
    let mut estimate = sum;
    let mut last_diff = f64::INFINITY;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let mut k = t_lo + h;
        while k < t_hi {
            sum += term(k);
            k += 2.0 * h;
        }
        let next = h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        last_diff = diff;
        if !estimate.is_finite() {
            break;
        }
        if level >= DE_MIN_LEVEL && diff <= acc.target(estimate) {
            return Ok(QuadResult {
                value: estimate,
                error: diff,
                evaluations: evals,
            });
        }
    }
    Err(Error::Quadrature {
        func: "exp_sinh",
        achieved: last_diff,
        requested: acc.target(estimate),
    })
}

// Gauss-Kronrod 7/15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * hw, ((kronrod - gauss) * hw).abs())
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, acc: &EvalAccuracy) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("gauss_kronrod", "interval endpoints must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut evals = 15;
    let mut splits = 0;
    while total_err > acc.target(total) {
        if splits >= acc.max_subdivisions {
            return Err(Error::Quadrature {
                func: "gauss_kronrod",
                achieved: total_err,
                requested: acc.target(total),
            });
        }
        let worst = heap.pop().expect("non-empty segment heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be bisected in floating point.
            heap.push(Segment { error: 0.0, ..worst });
            total_err = heap.iter().map(|s| s.error).sum();
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evals += 30;
        splits += 1;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        // Re-summing avoids drift from repeated incremental updates.
        total = heap.iter().map(|s| s.value).sum();
        total_err = heap.iter().map(|s| s.error).sum();
    }
    if !total.is_finite() {
        return Err(Error::Quadrature {
            func: "gauss_kronrod",
            achieved: f64::NAN,
            requested: acc.target(1.0),
        });
    }
    Ok(QuadResult {
        value: total,
        error: total_err,
        evaluations: evals,
    })
}

/// Adaptive Gauss-Kronrod on `[a, ∞)` through the map `x = a + t / (1 - t)`.
pub fn gauss_kronrod_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, acc: &EvalAccuracy) -> Result<QuadResult> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = a + t / one_minus;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (one_minus * one_minus)
        }
    };
    gauss_kronrod(g, 0.0, 1.0, acc)
}

/// Result of a sine-weighted integral over `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryResult {
    pub value: f64,
    pub error: f64,
    pub partitions: usize,
}

const MAX_PARTITIONS: usize = 100_000;
const EULER_WINDOW: usize = 24;

/// `∫₀^∞ g(r) sin(k r) dr`, integrated between consecutive zeros of the
/// sine and summed with repeated averaging (Euler transform) of the partial
/// sums. Abel-summable integrals such as `g = 1` converge to their Abel value.
pub fn sine_transform<F: Fn(f64) -> f64>(g: F, k: f64, acc: &EvalAccuracy) -> Result<OscillatoryResult> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(domain("sine_transform", format!("wave number must be positive, got {k}")));
    }
    let period = PI / k;
    let mut partial = Vec::with_capacity(256);
    let mut running = 0.0;
    let mut previous: Option<f64> = None;
    let mut stable = 0;
    let mut scale = 0.0f64;
    for j in 0..MAX_PARTITIONS {
        let a = j as f64 * period;
        let b = (j + 1) as f64 * period;
        let local = EvalAccuracy {
            rel_tol: acc.rel_tol,
            abs_tol: acc.abs_tol.max(1e-3 * acc.rel_tol * scale),
            max_subdivisions: acc.max_subdivisions,
        };
        let piece = gauss_kronrod(|r| g(r) * (k * r).sin(), a, b, &local)?;
        running += piece.value;
        scale = scale.max(running.abs()).max(piece.value.abs());
        partial.push(running);
        if partial.len() < 4 {
            continue;
        }
        let estimate = euler_average(&partial);
        if let Some(prev) = previous {
            let diff = (estimate - prev).abs();
            let tol = acc.abs_tol.max(acc.rel_tol * estimate.abs());
            if diff <= tol && piece.value.abs() <= scale {
                stable += 1;
                if stable >= 3 {
                    return Ok(OscillatoryResult {
                        value: estimate,
                        error: diff,
                        partitions: j + 1,
                    });
                }
            } else {
                stable = 0;
            }
        }
        previous = Some(estimate);
    }
    let estimate = euler_average(&partial);
    Err(Error::NonConvergence {
        func: "sine_transform",
        iterations: MAX_PARTITIONS,
        estimate,
        error: (estimate - previous.unwrap_or(f64::NAN)).abs(),
    })
}

/// Repeated pairwise averaging of the trailing partial sums.
fn euler_average(partial: &[f64]) -> f64 {
    let start = partial.len().saturating_sub(EULER_WINDOW);
    let mut row: Vec<f64> = partial[start..].to_vec();
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
    }
    row[0]
}
