//! The ordinary differential equation annihilating a pFq.
//!
//! With theta = z d/dz, the function w = pFq(a; b; z) satisfies
//! `[theta prod_k (theta + b_k - 1) - z prod_j (theta + a_j)] w = 0`.
//! Expansion to d/dz form uses `theta^n = sum_k S(n,k) z^k D^k` with Stirling
//! numbers of the second kind; the resulting polynomial coefficient list is
//! divided by its common gcd (always at least `z`), which reproduces the
//! textbook forms, e.g. `z(1-z) w'' + [c - (a+b+1)z] w' - ab w` for the Gauss
//! series.

use crate::error::{Error, Result};
use crate::pfq::PFQSpec;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::rational::Rational;
use crate::series::{RSeries, Series};

/// Linear differential operator: index k holds the coefficient of d^k/dz^k.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    coeffs: Vec<RatFun>,
}

impl DiffOperator {
    pub fn new(coeffs: Vec<RatFun>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.last().unwrap().is_zero() {
            return Err(Error::InvalidSpec(
                "operator needs a nonzero highest-order coefficient".into(),
            ));
        }
        Ok(DiffOperator { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RatFun] {
        &self.coeffs
    }

    /// Apply to a truncated series. The result is reliable through
    /// `s.order() - self.order()` and is truncated there. Denominators of the
    /// coefficients must be z-free (they are, for ODE-derived operators).
    pub fn apply(&self, s: &RSeries) -> Result<RSeries> {
        let ord = self.order();
        if s.order() < ord {
            return Err(Error::InvalidSpec(format!(
                "series order {} is below the operator order {}",
                s.order(),
                ord
            )));
        }
        let target = s.order() - ord;
        let mut acc = Series::zero(target);
        let mut deriv = s.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.den().degree_z() > 0 {
                return Err(Error::InvalidSpec(
                    "operator coefficient has a z-dependent denominator".into(),
                ));
            }
            if !c.is_zero() {
                let den = RatFun::from_poly(c.den().clone());
                for (i, ci) in c.num().z_coefficients().into_iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    let scale = RatFun::from_poly(ci).div(&den)?;
                    acc = acc.add(&deriv.shift_up(i).truncate(target).scale(&scale));
                }
            }
            if k < ord {
                deriv = deriv.derivative();
            }
        }
        Ok(acc)
    }
}

/// Stirling numbers of the second kind S(n, k) for 0 <= k <= n <= n_max.
pub(crate) fn stirling2(n_max: usize) -> Vec<Vec<Rational>> {
    let mut s = vec![vec![Rational::zero(); n_max + 1]; n_max + 1];
    s[0][0] = Rational::one();
    for n in 1..=n_max {
        for k in 1..=n {
            // S(n,k) = k S(n-1,k) + S(n-1,k-1)
            let t = &(&s[n - 1][k] * &Rational::from_int(k as i64)) + &s[n - 1][k - 1];
            s[n][k] = t;
        }
    }
    s
}

/// Expand a polynomial-in-theta with eps-polynomial coefficients (little
/// endian in theta) into `sum_k c_k(z) D^k` form; returns the c_k list.
/// `extra_z` multiplies everything by z^extra_z (used for the z B(theta) part).
pub(crate) fn theta_poly_to_d_form(theta_poly: &[Poly], extra_z: u32) -> Vec<Poly> {
    let deg = theta_poly.len() - 1;
    let s2 = stirling2(deg);
    let mut out = vec![Poly::zero(); deg + 1];
    for (n, alpha) in theta_poly.iter().enumerate() {
        if alpha.is_zero() {
            continue;
        }
        for k in 0..=n {
            if s2[n][k].is_zero() {
                continue;
            }
            // alpha * S(n,k) * z^{k+extra_z} D^k
            let term = alpha.scale(&s2[n][k]).mul_z_power(k as u32 + extra_z);
            out[k] = out[k].add(&term);
        }
    }
    out
}

/// Multiply linear factors (theta + t_i) into a theta-polynomial with
/// eps-polynomial coefficients; `with_theta_prefactor` multiplies by theta.
pub(crate) fn theta_product(offsets: &[Poly], with_theta_prefactor: bool) -> Vec<Poly> {
    let mut acc = vec![Poly::one()];
    for t in offsets {
        // acc * (theta + t)
        let mut next = vec![Poly::zero(); acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].add(&c.mul(t));
        }
        acc = next;
    }
    if with_theta_prefactor {
        let mut next = vec![Poly::zero(); acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            next[i + 1] = c.clone();
        }
        acc = next;
    }
    acc
}

/// The canonical annihilating operator of a valid pFq, with polynomial
/// coefficients normalized by their common gcd. Its order is q + 1.
pub fn hypergeometric_ode(f: &PFQSpec) -> Result<DiffOperator> {
    f.validate()?;
    // A(theta) = theta prod_k (theta + b_k - 1)
    let b_offsets: Vec<Poly> = f
        .lower
        .iter()
        .map(|b| Poly::from_linparam(&b.shift(-1)))
        .collect();
    let a_part = theta_product(&b_offsets, true);
    // B(theta) = prod_j (theta + a_j)
    let a_offsets: Vec<Poly> = f.upper.iter().map(Poly::from_linparam).collect();
    let b_part = theta_product(&a_offsets, false);

    let da = theta_poly_to_d_form(&a_part, 0);
    let db = theta_poly_to_d_form(&b_part, 1);
    let len = da.len().max(db.len());
    let mut coeffs = Vec::with_capacity(len);
    for k in 0..len {
        let a = da.get(k).cloned().unwrap_or_else(Poly::zero);
        let b = db.get(k).cloned().unwrap_or_else(Poly::zero);
        coeffs.push(a.sub(&b));
    }
    while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
        coeffs.pop();
    }
    let g = Poly::gcd_list(&coeffs);
    let coeffs = coeffs
        .iter()
        .map(|c| {
            RatFun::from_poly(c.div_exact(&g).expect("gcd divides every coefficient"))
        })
        .collect();
    DiffOperator::new(coeffs)
}

/// Row vector r with F^{(q+1)} = sum_{k<=q} r_k F^{(k)}, from the ODE.
pub fn reduction_row(f: &PFQSpec) -> Result<Vec<RatFun>> {
    let ode = hypergeometric_ode(f)?;
    let top = ode.coeffs().last().unwrap();
    let mut row = Vec::with_capacity(ode.order());
    for c in &ode.coeffs()[..ode.order()] {
        row.push(c.neg().div(top)?);
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pfq(upper: &[&str], lower: &[&str]) -> PFQSpec {
        PFQSpec::new(
            upper.iter().map(|s| s.parse().unwrap()).collect(),
            lower.iter().map(|s| s.parse().unwrap()).collect(),
        )
        .unwrap()
    }

    fn rf(s: &str) -> RatFun {
        s.parse().unwrap()
    }

    #[test]
    fn exponential_equation() {
        // 0F0: w' - w.
        let ode = hypergeometric_ode(&pfq(&[], &[])).unwrap();
        assert_eq!(ode.coeffs(), &[rf("-1"), rf("1")]);
    }

    #[test]
    fn kummer_equation() {
        // 1F1(1;2): z w'' + (2 - z) w' - w.
        let ode = hypergeometric_ode(&pfq(&["1"], &["2"])).unwrap();
        assert_eq!(ode.coeffs(), &[rf("-1"), rf("2 - z"), rf("z")]);
    }

    #[test]
    fn gauss_equation() {
        // 2F1(a,b;c): the pattern z(1-z) w'' + [c - (a+b+1)z] w' - ab w
        // at (a,b,c) = (1/2+eps, 1/3, 3/2). The canonical form clears the
        // rational content, scaling the textbook display by 6.
        let ode = hypergeometric_ode(&pfq(&["1/2+eps", "1/3"], &["3/2"])).unwrap();
        let textbook = [
            rf("-(1/2+eps)(1/3)"),
            rf("3/2 - (11/6 + eps)z"),
            rf("z(1-z)"),
        ];
        for (c, t) in ode.coeffs().iter().zip(&textbook) {
            assert_eq!(c, &t.scale(&Rational::from_int(6)));
        }
        assert_eq!(
            ode.coeffs(),
            &[
                rf("-1 - 2eps"),
                rf("9 - (11 + 6eps)z"),
                rf("6z(1-z)"),
            ]
        );
    }

    #[test]
    fn annihilates_series() {
        for f in [
            pfq(&[], &[]),
            pfq(&["1"], &["2"]),
            pfq(&["1/2+eps", "1/3"], &["3/2"]),
            pfq(&["1/2", "1/3", "1/5"], &["3/2", "7/3"]),
            pfq(&["-3", "1/4"], &["5/4+eps"]),
        ] {
            let n = 24;
            let s = f.truncated_series(n).unwrap();
            let ode = hypergeometric_ode(&f).unwrap();
            let out = ode.apply(&s).unwrap();
            assert!(
                out.is_zero(),
                "ODE failed to annihilate series of {f}: {:?}",
                out.coeffs().iter().position(|c| !c.is_zero())
            );
        }
    }

    #[test]
    fn reduction_row_consistent() {
        let f = pfq(&["1/2+eps", "1/3"], &["3/2"]);
        let ode = hypergeometric_ode(&f).unwrap();
        let row = reduction_row(&f).unwrap();
        // c_top * row_k + c_k = 0.
        let top = ode.coeffs().last().unwrap();
        for (k, r) in row.iter().enumerate() {
            assert!(top.mul(r).add(&ode.coeffs()[k]).is_zero());
        }
    }
}
