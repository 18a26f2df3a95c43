//! Floating-point evaluation of pFq and Horn-type series.
//!
//! pFq terms follow the exact term-ratio recurrence (no gamma function
//! needed); Horn coefficients are exponentials of log-gamma differences so
//! fractional slopes work too. Both sum until the running term magnitude
//! stays below `rel_tol * |partial sum|` for 3 consecutive terms (one small
//! term alone can be an accident of sign alternation), refusing points
//! outside the guaranteed convergence region.

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::pfq::{layer_indices, HornSpec, PFQSpec};
use num_complex::Complex64;

/// Default cap on the number of accumulated terms.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

const CONSECUTIVE_SMALL: usize = 3;

fn non_convergence(terms: usize, sum: Complex64, last: f64) -> Error {
    Error::NonConvergence {
        terms,
        estimate: (sum.re, sum.im),
        last_term: last,
    }
}

/// Evaluate a pFq at a complex point with a real eps value.
///
/// For p = q + 1 the series only converges on |z| < 1 and the call refuses
/// points outside (no analytic continuation); for p <= q the series is
/// entire.
pub fn eval_pfq(
    f: &PFQSpec,
    z: Complex64,
    eps: f64,
    rel_tol: f64,
    term_cap: usize,
) -> Result<Complex64> {
    f.validate()?;
    if f.p() == f.q() + 1 && z.norm() >= 1.0 {
        return Err(Error::OutsideDomain(format!(
            "|z| = {} but the series for p = q + 1 converges only on |z| < 1",
            z.norm()
        )));
    }
    let upper: Vec<f64> = f.upper.iter().map(|a| a.eval_f64(eps)).collect();
    let lower: Vec<f64> = f.lower.iter().map(|b| b.eval_f64(eps)).collect();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut small_streak = 0usize;
    for m in 0..term_cap {
        let mf = m as f64;
        let mut ratio = Complex64::new(1.0, 0.0);
        for a in &upper {
            ratio *= Complex64::new(a + mf, 0.0);
        }
        for (k, b) in lower.iter().enumerate() {
            let d = b + mf;
            if d == 0.0 {
                return Err(Error::GammaPole {
                    side: "lower",
                    row: k + 1,
                    index: format!("m={}", m + 1),
                });
            }
            ratio /= Complex64::new(d, 0.0);
        }
        ratio /= Complex64::new(mf + 1.0, 0.0);
        term *= ratio * z;
        sum += term;
        if term.norm() <= rel_tol * sum.norm() {
            small_streak += 1;
            if small_streak >= CONSECUTIVE_SMALL {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(non_convergence(term_cap, sum, term.norm()))
}

/// Evaluate a Horn-type series on the conservative polydisk |x_i| < 1/2,
/// summing layer by layer in total degree.
pub fn eval_horn(
    h: &HornSpec,
    x: &[Complex64],
    eps: f64,
    rel_tol: f64,
    term_cap: usize,
) -> Result<Complex64> {
    h.validate()?;
    if x.len() != h.arity {
        return Err(Error::InvalidSpec(format!(
            "got {} evaluation coordinates for arity {}",
            x.len(),
            h.arity
        )));
    }
    for (i, xi) in x.iter().enumerate() {
        if xi.norm() >= 0.5 {
            return Err(Error::OutsideDomain(format!(
                "|x_{}| = {} but the conservative convergence polydisk is |x_i| < 1/2",
                i + 1,
                xi.norm()
            )));
        }
    }
    // Base offsets: the normalization divides by Gamma(offset), so a pole
    // there makes the normalized family ill-defined.
    let mut base = Vec::new();
    for (side, rows) in [("num", &h.num_rows), ("den", &h.den_rows)] {
        for (i, row) in rows.iter().enumerate() {
            let v = row.offset.eval_f64(eps);
            if is_nonpositive_integer_f64(v) {
                return Err(Error::GammaPole {
                    side,
                    row: i + 1,
                    index: format!("m=({})", vec!["0"; h.arity].join(",")),
                });
            }
            base.push(ln_gamma(Complex64::new(v, 0.0)));
        }
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut terms_used = 0usize;
    let mut small_streak = 0usize;
    let mut last_layer_mag = 0.0f64;
    for degree in 0usize.. {
        let mut layer = Complex64::new(0.0, 0.0);
        'index: for m in layer_indices(h.arity, degree) {
            terms_used += 1;
            if terms_used > term_cap {
                return Err(non_convergence(term_cap, sum, last_layer_mag));
            }
            let mut ln_c = Complex64::new(0.0, 0.0);
            let mut bi = 0;
            for (side, rows, sign) in
                [("num", &h.num_rows, 1.0), ("den", &h.den_rows, -1.0)]
            {
                for (i, row) in rows.iter().enumerate() {
                    let mut arg = row.offset.eval_f64(eps);
                    for (s, &mk) in row.slopes.iter().zip(&m) {
                        arg += s.to_f64() * mk as f64;
                    }
                    if is_nonpositive_integer_f64(arg) {
                        if sign < 0.0 {
                            // Pole downstairs: the coefficient is zero.
                            continue 'index;
                        }
                        return Err(Error::GammaPole {
                            side,
                            row: i + 1,
                            index: format!(
                                "m=({})",
                                m.iter()
                                    .map(|v| v.to_string())
                                    .collect::<Vec<_>>()
                                    .join(",")
                            ),
                        });
                    }
                    ln_c += (ln_gamma(Complex64::new(arg, 0.0)) - base[bi]) * sign;
                    bi += 1;
                }
            }
            let mut term = ln_c.exp();
            for (xi, &mk) in x.iter().zip(&m) {
                term *= xi.powi(mk as i32);
            }
            layer += term;
        }
        sum += layer;
        last_layer_mag = layer.norm();
        if last_layer_mag <= rel_tol * sum.norm() {
            small_streak += 1;
            if small_streak >= CONSECUTIVE_SMALL {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    unreachable!("loop exits via return");
}

fn is_nonpositive_integer_f64(v: f64) -> bool {
    v <= 1e-9 && (v - v.round()).abs() < 1e-9
}
