use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::EvalAccuracy;

pub const HYP1F1_MAX_TERMS: usize = 10_000;

/// Compensated (Kahan) accumulator for complex sums.
#[derive(Debug, Default, Clone, Copy)]
struct KahanComplex {
    sum: Complex64,
    carry: Complex64,
}

impl KahanComplex {
    fn add(&mut self, x: Complex64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// ₁F₁(a; b; z) by direct power series.
///
/// The series is entire, but for large |z| with oscillating terms the sum
/// cancels; if the largest term exceeds the result by more than the
/// requested tolerance allows, a precision error is returned instead of a
/// silently degraded value.
pub fn hyp1f1(a: Complex64, b: Complex64, z: Complex64, acc: &EvalAccuracy) -> Result<Complex64> {
    if b.im == 0.0 && b.re <= 0.0 && b.re == b.re.floor() {
        return Err(domain("hyp1f1", format!("b = {b} is a non-positive integer")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut total = KahanComplex::default();
    total.add(term);
    let mut largest = 1.0f64;
    for n in 0..HYP1F1_MAX_TERMS {
        let nf = n as f64;
        term = term * (a + nf) * z / ((b + nf) * (nf + 1.0));
        if term == Complex64::new(0.0, 0.0) {
            return Ok(total.sum);
        }
        total.add(term);
        largest = largest.max(term.norm());
        // Terms only decrease monotonically once n exceeds |z| and |a|.
        let past_peak = nf + 1.0 > z.norm() && nf + 1.0 > a.norm();
        if past_peak && term.norm() <= 0.1 * f64::EPSILON * total.sum.norm() {
            let value = total.sum;
            let lost = largest * f64::EPSILON;
            if lost > acc.rel_tol.max(1e-14) * value.norm() + acc.abs_tol {
                return Err(Error::Precision {
                    func: "hyp1f1",
                    detail: format!(
                        "series cancellation: largest term {largest:e} against result {:e} at z = {z}",
                        value.norm()
                    ),
                });
            }
            return Ok(value);
        }
    }
    Err(Error::NonConvergence {
        func: "hyp1f1",
        iterations: HYP1F1_MAX_TERMS,
        estimate: total.sum.norm(),
        error: term.norm(),
    })
}
