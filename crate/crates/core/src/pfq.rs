//! Structural types for one-variable pFq and multivariable Horn-type series,
//! with exact truncated series expansion.
//!
//! A pFq series is normalized so the z^0 coefficient is 1; successive
//! coefficients follow the term ratio
//! `c_{m+1}/c_m = prod_j (a_j + m) / (prod_k (b_k + m) * (m + 1))` exactly.
//! Horn-type coefficients are gamma-function ratios over a multi-index lattice;
//! the exact expansion telescopes those ratios and is therefore restricted to
//! integer slope matrices (fractional slopes would need gamma multiplication
//! formulas). Parameters are linear in the formal variable `eps`, so exact
//! coefficients live in the rational-function field of `eps`.

use crate::error::{Error, Result};
use crate::linparam::LinearParam;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::rational::Rational;
use crate::series::{RSeries, Series};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// One-variable generalized hypergeometric spec: upper parameters a_1..a_p,
/// lower parameters b_1..b_q, each of the form r + s*eps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PFQSpec {
    pub upper: Vec<LinearParam>,
    pub lower: Vec<LinearParam>,
}

impl PFQSpec {
    pub fn new(upper: Vec<LinearParam>, lower: Vec<LinearParam>) -> Result<Self> {
        let spec = PFQSpec { upper, lower };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p() > self.q() + 1 {
            return Err(Error::InvalidSpec(format!(
                "p = {} exceeds q + 1 = {}: the series diverges for all nonzero z",
                self.p(),
                self.q() + 1
            )));
        }
        for (k, b) in self.lower.iter().enumerate() {
            if b.slope.is_zero() && b.constant.is_nonpositive_integer() {
                return Err(Error::InvalidSpec(format!(
                    "lower parameter {} is the non-positive integer {}; series \
                     coefficients are undefined beyond index {}",
                    k + 1,
                    b.constant,
                    -b.constant.to_integer().unwrap()
                )));
            }
        }
        Ok(())
    }

    /// Degree at which the series terminates (smallest n with some upper
    /// parameter equal to -n exactly), if any.
    pub fn termination_degree(&self) -> Option<u64> {
        self.upper
            .iter()
            .filter_map(|a| a.exact_integer())
            .filter(|n| *n <= 0)
            .map(|n| (-n) as u64)
            .min()
    }

    /// c_{m+1}/c_m as a canonical rational function of the index. The series
    /// index occupies the `z` slot of [`RatFun`]; print it with `m` via
    /// `display_with`.
    pub fn term_ratio(&self) -> RatFun {
        let m = Poly::var_z();
        let mut num = Poly::one();
        for a in &self.upper {
            num = num.mul(&Poly::from_linparam(a).add(&m));
        }
        let mut den = m.add(&Poly::one());
        for b in &self.lower {
            den = den.mul(&Poly::from_linparam(b).add(&m));
        }
        RatFun::new(num, den).expect("denominator has positive leading term")
    }

    /// Term ratio at a fixed integer index, as a rational function of eps.
    /// Errors when a lower-parameter factor vanishes identically (a gamma
    /// pole on the lattice).
    pub fn term_ratio_at(&self, m: i64) -> Result<RatFun> {
        let mut num = RatFun::one();
        for a in &self.upper {
            num = num.mul(&RatFun::from_linparam(&a.shift(m)));
        }
        let mut den = RatFun::from_int(m + 1);
        for (k, b) in self.lower.iter().enumerate() {
            let factor = b.shift(m);
            if factor.is_zero() {
                return Err(Error::GammaPole {
                    side: "lower",
                    row: k + 1,
                    index: format!("m={}", m + 1),
                });
            }
            den = den.mul(&RatFun::from_linparam(&factor));
        }
        num.div(&den)
    }

    /// Exact truncated series with rational-function-of-eps coefficients,
    /// orders 0..=n.
    pub fn truncated_series(&self, n: usize) -> Result<RSeries> {
        self.validate()?;
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(RatFun::one());
        for m in 0..n {
            let prev = coeffs[m].clone();
            if prev.is_zero() {
                // Terminated: every later coefficient is zero and the ratio
                // need not be evaluated (it may hit a spurious pole).
                coeffs.push(RatFun::zero());
                continue;
            }
            let ratio = self.term_ratio_at(m as i64)?;
            coeffs.push(prev.mul(&ratio));
        }
        Ok(Series::from_coeffs(coeffs))
    }

    /// Exact truncated series at a fixed rational value of eps.
    pub fn truncated_series_at(&self, eps: &Rational, n: usize) -> Result<Series<Rational>> {
        self.validate()?;
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(Rational::one());
        'outer: for m in 0..n {
            let prev = coeffs[m].clone();
            if prev.is_zero() {
                coeffs.push(Rational::zero());
                continue;
            }
            let mut num = Rational::one();
            for a in &self.upper {
                num = &num * &a.shift(m as i64).eval(eps);
            }
            let mut den = Rational::from_int(m as i64 + 1);
            for (k, b) in self.lower.iter().enumerate() {
                let f = b.shift(m as i64).eval(eps);
                if f.is_zero() {
                    // A numerator zero at the same index keeps the
                    // coefficient finite only in a limiting sense; report
                    // the pole outright.
                    return Err(Error::GammaPole {
                        side: "lower",
                        row: k + 1,
                        index: format!("m={}", m + 1),
                    });
                }
                den = &den * &f;
            }
            let c = &(&prev * &num) / &den;
            coeffs.push(c);
            if num.is_zero() {
                // Terminating series: fill the rest with zeros.
                for _ in m + 2..=n {
                    coeffs.push(Rational::zero());
                }
                break 'outer;
            }
        }
        while coeffs.len() < n + 1 {
            coeffs.push(Rational::zero());
        }
        Ok(Series::from_coeffs(coeffs))
    }

    /// Shift one upper parameter by an integer, returning the new spec.
    pub fn shift_upper(&self, j: usize, by: i64) -> PFQSpec {
        let mut s = self.clone();
        s.upper[j] = s.upper[j].shift(by);
        s
    }

    /// Shift one lower parameter by an integer, returning the new spec.
    pub fn shift_lower(&self, k: usize, by: i64) -> PFQSpec {
        let mut s = self.clone();
        s.lower[k] = s.lower[k].shift(by);
        s
    }
}

impl fmt::Display for PFQSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ups: Vec<String> = self.upper.iter().map(|a| a.to_string()).collect();
        let los: Vec<String> = self.lower.iter().map(|b| b.to_string()).collect();
        write!(
            f,
            "{}F{}({}; {}; z)",
            self.p(),
            self.q(),
            ups.join(","),
            los.join(",")
        )
    }
}

/// One gamma-factor row of a Horn-type spec: slope vector and offset, denoting
/// Gamma(offset + slopes . m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornRow {
    pub slopes: Vec<Rational>,
    pub offset: LinearParam,
}

/// Multivariable Horn-type series spec: the coefficient of x^m is
/// `prod_j Gamma(gamma_j + mu_j . m) / prod_k Gamma(sigma_k + nu_k . m)`,
/// normalized so the coefficient at m = 0 is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornSpec {
    pub num_rows: Vec<HornRow>,
    pub den_rows: Vec<HornRow>,
    pub arity: usize,
}

impl HornSpec {
    pub fn new(num_rows: Vec<HornRow>, den_rows: Vec<HornRow>, arity: usize) -> Result<Self> {
        let spec = HornSpec {
            num_rows,
            den_rows,
            arity,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_rows.is_empty() {
            return Err(Error::InvalidSpec(
                "a Horn spec needs at least one numerator row".into(),
            ));
        }
        for (label, rows) in [("num", &self.num_rows), ("den", &self.den_rows)] {
            for (i, row) in rows.iter().enumerate() {
                if row.slopes.len() != self.arity {
                    return Err(Error::InvalidSpec(format!(
                        "{label} row {} has {} slopes but arity is {}",
                        i + 1,
                        row.slopes.len(),
                        self.arity
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn has_integer_slopes(&self) -> bool {
        self.num_rows
            .iter()
            .chain(&self.den_rows)
            .all(|r| r.slopes.iter().all(|s| s.is_integer()))
    }

    /// Exact coefficient table up to total degree n. Requires integer slopes;
    /// fractional-slope specs only support numeric evaluation.
    pub fn truncated_series(&self, n: usize) -> Result<HornTable> {
        self.validate()?;
        if !self.has_integer_slopes() {
            return Err(Error::InvalidSpec(
                "exact Horn coefficients need integer slope matrices; \
                 use numeric evaluation for fractional slopes"
                    .into(),
            ));
        }
        let mut coeffs = BTreeMap::new();
        for m in multi_indices(self.arity, n) {
            coeffs.insert(m.clone(), self.coefficient(&m)?);
        }
        Ok(HornTable {
            arity: self.arity,
            order: n,
            coeffs,
        })
    }

    /// Normalized coefficient at a multi-index (ratio of gamma products to
    /// their values at m = 0), as a rational function of eps.
    pub fn coefficient(&self, m: &[u32]) -> Result<RatFun> {
        // Collect linear factors of the normalized coefficient with the side
        // they act on, so zeros can be classified: a vanishing factor in the
        // coefficient's denominator is a gamma pole (error, naming the row),
        // one in the numerator is a legitimate zero.
        let mut num_factors: Vec<Poly> = Vec::new();
        let mut den_factors: Vec<(Poly, &'static str, usize)> = Vec::new();
        for (side, rows, inverted) in [
            ("num", &self.num_rows, false),
            ("den", &self.den_rows, true),
        ] {
            for (i, row) in rows.iter().enumerate() {
                let mut shift = Rational::zero();
                for (s, &mk) in row.slopes.iter().zip(m) {
                    shift = &shift + &(s * &Rational::from_int(mk as i64));
                }
                let shift = shift
                    .to_integer()
                    .expect("integer slopes yield integer shifts");
                // Gamma(offset + shift) / Gamma(offset) as linear factors:
                // shift >= 0: prod_{i=0}^{shift-1} (offset + i) upstairs;
                // shift <  0: prod_{i=1}^{-shift} (offset - i) downstairs.
                // `inverted` flips which side of the coefficient they join.
                if shift >= 0 {
                    for d in 0..shift {
                        let f = Poly::from_linparam(&row.offset.shift(d));
                        if inverted {
                            den_factors.push((f, side, i + 1));
                        } else {
                            num_factors.push(f);
                        }
                    }
                } else {
                    for d in 1..=(-shift) {
                        let f = Poly::from_linparam(&row.offset.shift(-d));
                        if inverted {
                            num_factors.push(f);
                        } else {
                            den_factors.push((f, side, i + 1));
                        }
                    }
                }
            }
        }
        let mut den = Poly::one();
        for (f, side, row) in den_factors {
            if f.is_zero() {
                return Err(Error::GammaPole {
                    side,
                    row,
                    index: format!("m=({})", join_index(m)),
                });
            }
            den = den.mul(&f);
        }
        let mut num = Poly::one();
        for f in num_factors {
            if f.is_zero() {
                return Ok(RatFun::zero());
            }
            num = num.mul(&f);
        }
        RatFun::new(num, den)
    }

    /// Interpret an arity-1 spec with unit slopes as a pFq: numerator rows
    /// become upper parameters; one denominator row with offset 1 plays the
    /// factorial; the remaining denominator rows become lower parameters.
    pub fn to_pfq(&self) -> Option<PFQSpec> {
        if self.arity != 1 {
            return None;
        }
        let unit = |r: &HornRow| r.slopes.len() == 1 && r.slopes[0].is_one();
        if !self.num_rows.iter().all(unit) || !self.den_rows.iter().all(unit) {
            return None;
        }
        let one = LinearParam::from_int(1);
        let fact = self.den_rows.iter().position(|r| r.offset == one)?;
        let upper = self.num_rows.iter().map(|r| r.offset.clone()).collect();
        let lower = self
            .den_rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fact)
            .map(|(_, r)| r.offset.clone())
            .collect();
        PFQSpec::new(upper, lower).ok()
    }
}

fn join_index(m: &[u32]) -> String {
    m.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// All multi-indices of the given arity with total degree <= n, in
/// lexicographic order.
pub fn multi_indices(arity: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; arity];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(cur, pos + 1, left - v, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, n as u32, &mut out);
    out.sort();
    out
}

/// Multi-indices of the given arity with total degree exactly n.
pub fn layer_indices(arity: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; arity];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            cur[pos] = 0;
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(cur, pos + 1, left - v, out);
        }
        cur[pos] = 0;
    }
    if arity == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut cur, 0, n as u32, &mut out);
    out
}

/// Exact Horn coefficient table truncated at a total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct HornTable {
    pub arity: usize,
    pub order: usize,
    pub coeffs: BTreeMap<Vec<u32>, RatFun>,
}

impl HornTable {
    pub fn coeff(&self, m: &[u32]) -> RatFun {
        self.coeffs.get(m).cloned().unwrap_or_else(RatFun::zero)
    }
}

/// Either kind of series spec; the JSON form is externally tagged, e.g.
/// `{"pFq": {"upper": ["1/2+eps","1/3"], "lower": ["3/2"]}}` or
/// `{"horn": {"num": [{"mu": ["1","1"], "gamma": "1/2"}], "den": [...],
/// "arity": 2}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnySpec {
    #[serde(rename = "pFq")]
    PFQ(PFQSpec),
    #[serde(rename = "horn")]
    Horn(HornSpec),
}

#[derive(Serialize, Deserialize)]
struct NumRowWire {
    mu: Vec<Rational>,
    gamma: LinearParam,
}

#[derive(Serialize, Deserialize)]
struct DenRowWire {
    nu: Vec<Rational>,
    sigma: LinearParam,
}

#[derive(Serialize, Deserialize)]
struct HornWire {
    num: Vec<NumRowWire>,
    den: Vec<DenRowWire>,
    arity: usize,
}

impl Serialize for HornSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HornWire {
            num: self
                .num_rows
                .iter()
                .map(|r| NumRowWire {
                    mu: r.slopes.clone(),
                    gamma: r.offset.clone(),
                })
                .collect(),
            den: self
                .den_rows
                .iter()
                .map(|r| DenRowWire {
                    nu: r.slopes.clone(),
                    sigma: r.offset.clone(),
                })
                .collect(),
            arity: self.arity,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HornSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = HornWire::deserialize(d)?;
        Ok(HornSpec {
            num_rows: w
                .num
                .into_iter()
                .map(|r| HornRow {
                    slopes: r.mu,
                    offset: r.gamma,
                })
                .collect(),
            den_rows: w
                .den
                .into_iter()
                .map(|r| HornRow {
                    slopes: r.nu,
                    offset: r.sigma,
                })
                .collect(),
            arity: w.arity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LinearParam {
        s.parse().unwrap()
    }

    fn pfq(upper: &[&str], lower: &[&str]) -> PFQSpec {
        PFQSpec::new(
            upper.iter().map(|s| lp(s)).collect(),
            lower.iter().map(|s| lp(s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn term_ratio_symbolic() {
        // 2F1(1,1;2): (m+1)(m+1) / ((m+2)(m+1)) = (m+1)/(m+2).
        let f = pfq(&["1", "1"], &["2"]);
        assert_eq!(f.term_ratio().display_with_index("m"), "(m + 1)/(m + 2)");
        // 0F0: 1/(m+1).
        let f = pfq(&[], &[]);
        assert_eq!(f.term_ratio().display_with_index("m"), "1/(m + 1)");
    }

    #[test]
    fn term_ratio_at_zero() {
        // 2F1(1/2+eps, 1/3; 3/2) at m=0: (1/2+eps)(1/3)/(3/2) = 1/9 + 2/9 eps.
        let f = pfq(&["1/2+eps", "1/3"], &["3/2"]);
        let r = f.term_ratio_at(0).unwrap();
        let expect: RatFun = "1/9 + 2/9*eps".parse().unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn series_log_example() {
        // 2F1(1,1;2;z) coefficients: 1/(m+1) — the -ln(1-z)/z series.
        let f = pfq(&["1", "1"], &["2"]);
        let s = f.truncated_series(4).unwrap();
        for m in 0..=4usize {
            assert_eq!(
                s.coeff(m),
                RatFun::from_rational(Rational::new(1, m as i64 + 1))
            );
        }
    }

    #[test]
    fn series_terminating_binomial() {
        // 1F0(-2;;z) = (1-z)^2 -> [1, -2, 1, 0, 0].
        let f = pfq(&["-2"], &[]);
        let s = f.truncated_series(4).unwrap();
        let expect = [1i64, -2, 1, 0, 0];
        for (m, e) in expect.iter().enumerate() {
            assert_eq!(s.coeff(m), RatFun::from_int(*e));
        }
        assert_eq!(f.termination_degree(), Some(2));
    }

    #[test]
    fn ratio_consistency_invariant() {
        let f = pfq(&["1/2+eps", "-1/3"], &["5/4+2eps", "2"]);
        let s = f.truncated_series(8).unwrap();
        for m in 1..=8usize {
            let lhs = s.coeff(m).div(&s.coeff(m - 1)).unwrap();
            assert_eq!(lhs, f.term_ratio_at(m as i64 - 1).unwrap());
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(PFQSpec::new(
            vec![lp("1"), lp("1"), lp("1")],
            vec![lp("2")],
        )
        .is_err());
        assert!(PFQSpec::new(vec![lp("1")], vec![lp("-1")]).is_err());
        assert!(PFQSpec::new(vec![lp("1")], vec![lp("0")]).is_err());
        // eps slope rescues a non-positive integer constant.
        assert!(PFQSpec::new(vec![lp("1")], vec![lp("-1+eps")]).is_ok());
    }

    #[test]
    fn pole_at_eps_value() {
        // b = -2 + eps is fine symbolically but hits a pole at eps = 0
        // once the recurrence crosses m = 2 -> index 3 coefficient.
        let f = pfq(&["1"], &["-2+eps"]);
        assert!(f.truncated_series(5).is_ok());
        let err = f.truncated_series_at(&Rational::zero(), 5).unwrap_err();
        match err {
            Error::GammaPole { side, row, index } => {
                assert_eq!(side, "lower");
                assert_eq!(row, 1);
                assert_eq!(index, "m=3");
            }
            other => panic!("expected gamma pole, got {other:?}"),
        }
        // At eps = 1/3 there is no pole.
        assert!(f.truncated_series_at(&Rational::new(1, 3), 5).is_ok());
    }

    fn gauss_horn(a: &str, b: &str, c: &str) -> HornSpec {
        // 2F1 as a Horn spec: c(m) = G(a+m)G(b+m)/(G(c+m)G(1+m)) normalized.
        HornSpec::new(
            vec![
                HornRow {
                    slopes: vec![Rational::one()],
                    offset: lp(a),
                },
                HornRow {
                    slopes: vec![Rational::one()],
                    offset: lp(b),
                },
            ],
            vec![
                HornRow {
                    slopes: vec![Rational::one()],
                    offset: lp(c),
                },
                HornRow {
                    slopes: vec![Rational::one()],
                    offset: lp("1"),
                },
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn horn_reproduces_pfq() {
        let h = gauss_horn("1/2+eps", "1/3", "3/2");
        let f = h.to_pfq().unwrap();
        assert_eq!(f, pfq(&["1/2+eps", "1/3"], &["3/2"]));
        let table = h.truncated_series(6).unwrap();
        let series = f.truncated_series(6).unwrap();
        for m in 0..=6u32 {
            assert_eq!(table.coeff(&[m]), series.coeff(m as usize), "index {m}");
        }
    }

    #[test]
    fn horn_negative_slope() {
        // c(m) = Gamma(5 - m)/Gamma(5): c(2) = 1/((5-1)(5-2)) = 1/12.
        let h = HornSpec::new(
            vec![HornRow {
                slopes: vec![Rational::from_int(-1)],
                offset: lp("5"),
            }],
            vec![],
            1,
        )
        .unwrap();
        assert_eq!(
            h.coefficient(&[2]).unwrap(),
            RatFun::from_rational(Rational::new(1, 12))
        );
        // Gamma(2 - m) at m = 3 crosses the pole at zero argument.
        let h = HornSpec::new(
            vec![HornRow {
                slopes: vec![Rational::from_int(-1)],
                offset: lp("2"),
            }],
            vec![],
            1,
        )
        .unwrap();
        match h.coefficient(&[3]).unwrap_err() {
            Error::GammaPole { side, row, index } => {
                assert_eq!((side, row), ("num", 1));
                assert_eq!(index, "m=(3)");
            }
            other => panic!("expected gamma pole, got {other:?}"),
        }
    }

    #[test]
    fn appell_f1_slice_matches_gauss() {
        // F1(a; b1, b2; c; x1, x2): coefficients
        // (a)_{m+n} (b1)_m (b2)_n / ((c)_{m+n} m! n!).
        let a = "1/2";
        let b1 = "1/3";
        let b2 = "-3";
        let c = "5/4";
        let one = Rational::one;
        let f1 = HornSpec::new(
            vec![
                HornRow {
                    slopes: vec![one(), one()],
                    offset: lp(a),
                },
                HornRow {
                    slopes: vec![one(), Rational::zero()],
                    offset: lp(b1),
                },
                HornRow {
                    slopes: vec![Rational::zero(), one()],
                    offset: lp(b2),
                },
            ],
            vec![
                HornRow {
                    slopes: vec![one(), one()],
                    offset: lp(c),
                },
                HornRow {
                    slopes: vec![one(), Rational::zero()],
                    offset: lp("1"),
                },
                HornRow {
                    slopes: vec![Rational::zero(), one()],
                    offset: lp("1"),
                },
            ],
            2,
        )
        .unwrap();
        let table = f1.truncated_series(5).unwrap();
        // x2 = 0 slice: only n = 0 contributes, giving 2F1(a, b1; c; x1).
        let gauss = pfq(&[a, b1], &[c]).truncated_series(5).unwrap();
        for m in 0..=5u32 {
            assert_eq!(table.coeff(&[m, 0]), gauss.coeff(m as usize));
        }
        // Sanity on a mixed coefficient: c(1,1) = a(a+1) b1 b2 / (c(c+1)).
        let expect = RatFun::from_rational(
            &(&(&(&Rational::new(1, 2) * &Rational::new(3, 2)) * &Rational::new(1, 3))
                * &Rational::from_int(-3))
                / &(&Rational::new(5, 4) * &Rational::new(9, 4)),
        );
        assert_eq!(table.coeff(&[1, 1]), expect);
    }

    #[test]
    fn wire_format() {
        let spec = AnySpec::PFQ(pfq(&["1/2+eps", "1/3"], &["3/2"]));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            json,
            r#"{"pFq":{"upper":["1/2+eps","1/3"],"lower":["3/2"]}}"#
        );
        let back: AnySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let horn = AnySpec::Horn(gauss_horn("1/2", "1/3", "3/2"));
        let json = serde_json::to_string(&horn).unwrap();
        assert_eq!(
            json,
            r#"{"horn":{"num":[{"mu":["1"],"gamma":"1/2"},{"mu":["1"],"gamma":"1/3"}],"den":[{"nu":["1"],"sigma":"3/2"},{"nu":["1"],"sigma":"1"}],"arity":1}}"#
        );
        let back: AnySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, horn);
    }

    #[test]
    fn multi_index_enumeration() {
        let idx = multi_indices(2, 2);
        assert_eq!(
            idx,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![2, 0],
            ]
        );
        assert_eq!(multi_indices(3, 4).len(), 35); // C(4+3,3)
    }
}
