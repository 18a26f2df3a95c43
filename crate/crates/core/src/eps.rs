//! Laurent expansion in `eps` of truncated pFq series.
//!
//! Every z-coefficient of a pFq with parameters linear in `eps` is a rational
//! function of `eps`, so it has a Laurent expansion of finite pole order at
//! `eps = 0`.  This module expands each coefficient and regroups the result
//! as one z-series per `eps` power.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::pfq::PFQSpec;
use crate::ratfun::RatFun;
use crate::rational::Rational;

/// A truncated Laurent series in `eps` whose coefficients are truncated
/// z-series with rational coefficients.
///
/// Rows that are identically zero are not stored, so an `eps`-free input
/// yields a single row at power 0.  The row at `min_order` is always nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsLaurent {
    min_order: i64,
    coeff_series: BTreeMap<i64, Vec<Rational>>,
    z_order: usize,
}

impl EpsLaurent {
    /// Most negative `eps` power carried by any examined z-coefficient.
    pub fn min_order(&self) -> i64 {
        self.min_order
    }

    /// Shared z truncation order of every stored row.
    pub fn z_order(&self) -> usize {
        self.z_order
    }

    /// The z-series multiplying `eps^k`, if that row is nonzero.
    pub fn series(&self, k: i64) -> Option<&[Rational]> {
        self.coeff_series.get(&k).map(|v| v.as_slice())
    }

    /// Stored `eps` powers in increasing order.
    pub fn orders(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeff_series.keys().copied()
    }

    /// Numeric value of the truncated expansion at `(z, eps0)`.
    pub fn eval_at(&self, z: f64, eps0: f64) -> f64 {
        let mut total = 0.0;
        for (k, row) in &self.coeff_series {
            let mut horner = 0.0;
            for c in row.iter().rev() {
                horner = horner * z + c.to_f64();
            }
            total += eps0.powi(*k as i32) * horner;
        }
        total
    }
}

impl Serialize for EpsLaurent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.coeff_series.len()))?;
        for (k, row) in &self.coeff_series {
            let strings: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            map.serialize_entry(&k.to_string(), &strings)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for EpsLaurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = EpsLaurent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from eps powers to coefficient lists")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<EpsLaurent, A::Error> {
                let mut coeff_series = BTreeMap::new();
                let mut z_order = 0usize;
                while let Some((key, row)) = access.next_entry::<String, Vec<String>>()? {
                    let k: i64 = key.parse().map_err(serde::de::Error::custom)?;
                    let parsed: std::result::Result<Vec<Rational>, _> =
                        row.iter().map(|s| s.parse::<Rational>()).collect();
                    let parsed = parsed.map_err(serde::de::Error::custom)?;
                    if parsed.is_empty() {
                        return Err(serde::de::Error::custom("empty coefficient row"));
                    }
                    z_order = parsed.len() - 1;
                    coeff_series.insert(k, parsed);
                }
                let min_order = coeff_series.keys().next().copied().unwrap_or(0);
                Ok(EpsLaurent {
                    min_order,
                    coeff_series,
                    z_order,
                })
            }
        }
        d.deserialize_map(V)
    }
}

/// `eps`-valuation of a nonzero z-free polynomial.
fn poly_valuation(dense: &[Rational]) -> i64 {
    dense
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero polynomial") as i64
}

/// Laurent data of a z-free rational function at `eps = 0`: the valuation
/// and the coefficients of `eps^val, eps^(val+1), ..., eps^kmax`.
/// A zero input reports valuation 0 with no coefficients.
fn laurent_ratfun(r: &RatFun, kmax: i64) -> (i64, Vec<Rational>) {
    if r.is_zero() {
        return (0, Vec::new());
    }
    let num = r.num().eps_dense();
    let den = r.den().eps_dense();
    let vn = poly_valuation(&num);
    let vd = poly_valuation(&den);
    let val = vn - vd;
    let want = (kmax - val + 1).max(0) as usize;
    let unit_num = &num[vn as usize..];
    let unit_den = &den[vd as usize..];
    let mut out: Vec<Rational> = Vec::with_capacity(want);
    for j in 0..want {
        let mut acc = if j < unit_num.len() {
            unit_num[j].clone()
        } else {
            Rational::zero()
        };
        for (i, t) in out.iter().enumerate().take(j) {
            let shift = j - i;
            if shift < unit_den.len() {
                acc = &acc - &(t * &unit_den[shift]);
            }
        }
        out.push(&acc / &unit_den[0]);
    }
    (val, out)
}

/// Expand the truncated series of `f` to z-order `z_order` as a Laurent
/// series in `eps` keeping powers up to `highest` inclusive.
///
/// `min_order` reflects the most negative pole among the examined
/// coefficients; rows above `highest` are discarded and identically zero
/// rows are not stored.
pub fn laurent_expand(f: &PFQSpec, highest: i64, z_order: usize) -> Result<EpsLaurent> {
    let series = f.truncated_series(z_order)?;
    let mut per_coeff = Vec::with_capacity(z_order + 1);
    let mut min_order = 0i64; // the constant coefficient 1 has valuation 0
    for n in 0..=z_order {
        let c = series.coeff(n);
        let zero = c.is_zero();
        let (val, lo) = laurent_ratfun(&c, highest);
        if !zero {
            min_order = min_order.min(val);
        }
        per_coeff.push((val, lo, zero));
    }
    let mut coeff_series = BTreeMap::new();
    for k in min_order..=highest {
        let mut row = Vec::with_capacity(z_order + 1);
        let mut any = false;
        for (val, lo, zero) in &per_coeff {
            let c = if *zero {
                Rational::zero()
            } else {
                let idx = k - val;
                if idx < 0 || idx as usize >= lo.len() {
                    Rational::zero()
                } else {
                    lo[idx as usize].clone()
                }
            };
            any |= !c.is_zero();
            row.push(c);
        }
        if any {
            coeff_series.insert(k, row);
        }
    }
    Ok(EpsLaurent {
        min_order,
        coeff_series,
        z_order,
    })
}

/// Smallest series depth guaranteed to expose every pole and zero of the
/// coefficients' `eps`-valuations.
///
/// For parameters linear in `eps`, a factor `c + sigma*eps + m` contributes
/// to the valuation only at the step `m = -c`, so all valuation changes
/// happen at coefficient indices bounded by the parameter constants and a
/// finite probe depth is exact.
fn valuation_horizon(f: &PFQSpec) -> usize {
    let mut horizon = 20usize;
    for p in f.upper.iter().chain(f.lower.iter()) {
        if p.slope.is_zero() {
            continue;
        }
        if let Some(c) = p.constant.to_integer() {
            if c <= 0 {
                horizon = horizon.max((-c) as usize + 1);
            }
        }
    }
    horizon
}

/// Order of the pole of `f` at `eps = 0`, i.e. `-min_order` of
/// [`laurent_expand`] (0 when the function is finite there).
///
/// Probes the first `max(20, ...)` coefficients, where the horizon is
/// enlarged so that every integer parameter constant is covered; for
/// parameters linear in `eps` deeper coefficients cannot change the result.
pub fn pole_order(f: &PFQSpec) -> Result<usize> {
    let n = valuation_horizon(f);
    let series = f.truncated_series(n)?;
    let mut min_val = 0i64;
    for k in 0..=n {
        let c = series.coeff(k);
        if c.is_zero() {
            continue;
        }
        let num = c.num().eps_dense();
        let den = c.den().eps_dense();
        min_val = min_val.min(poly_valuation(&num) - poly_valuation(&den));
    }
    Ok((-min_val).max(0) as usize)
}

// Re-exported for the regrouping checks in tests and acceptance: the exact
// Laurent remainder of one coefficient after removing powers through `kmax`.
#[cfg(test)]
fn laurent_remainder(r: &RatFun, kmax: i64) -> Result<RatFun> {
    let (val, lo) = laurent_ratfun(r, kmax);
    let mut rebuilt = RatFun::zero();
    for (j, c) in lo.iter().enumerate() {
        let k = val + j as i64;
        let pow = crate::poly::Poly::var_eps().pow(k.unsigned_abs() as u32);
        let term = if k >= 0 {
            RatFun::from_poly(pow.scale(c))
        } else {
            RatFun::new(crate::poly::Poly::constant(c.clone()), pow)?
        };
        rebuilt = rebuilt.add(&term);
    }
    Ok(r.sub(&rebuilt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pfq(upper: &[&str], lower: &[&str]) -> PFQSpec {
        PFQSpec::new(
            upper.iter().map(|s| s.parse().unwrap()).collect(),
            lower.iter().map(|s| s.parse().unwrap()).collect(),
        )
        .unwrap()
    }

    fn rats(xs: &[&str]) -> Vec<Rational> {
        xs.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn binomial_gives_logarithm_row() {
        // (1 - z)^(-eps) = 1 - eps*ln(1 - z) + O(eps^2).
        let e = laurent_expand(&pfq(&["eps"], &[]), 1, 3).unwrap();
        assert_eq!(e.min_order(), 0);
        assert_eq!(e.series(0).unwrap(), rats(&["1", "0", "0", "0"]).as_slice());
        assert_eq!(
            e.series(1).unwrap(),
            rats(&["0", "1", "1/2", "1/3"]).as_slice()
        );
    }

    #[test]
    fn eps_free_input_is_single_row() {
        let e = laurent_expand(&pfq(&["1", "1"], &["2"]), 4, 5).unwrap();
        assert_eq!(e.orders().collect::<Vec<_>>(), vec![0]);
        assert_eq!(
            e.series(0).unwrap(),
            rats(&["1", "1/2", "1/3", "1/4", "1/5", "1/6"]).as_slice()
        );
    }

    #[test]
    fn simple_pole_row_of_gauss() {
        // eps * 2F1(1,1;eps;z) -> z/(1-z)^2 as eps -> 0.
        let e = laurent_expand(&pfq(&["1", "1"], &["eps"]), -1, 4).unwrap();
        assert_eq!(e.min_order(), -1);
        assert_eq!(e.orders().collect::<Vec<_>>(), vec![-1]);
        assert_eq!(
            e.series(-1).unwrap(),
            rats(&["0", "1", "2", "3", "4"]).as_slice()
        );
    }

    #[test]
    fn pole_orders() {
        assert_eq!(pole_order(&pfq(&["1", "1"], &["eps"])).unwrap(), 1);
        assert_eq!(pole_order(&pfq(&["eps", "1"], &["1"])).unwrap(), 0);
        assert_eq!(pole_order(&pfq(&["1", "1"], &["2+eps"])).unwrap(), 0);
    }

    #[test]
    fn deep_pole_found_by_enlarged_horizon() {
        // The pole enters only at coefficient 26, past the default probe.
        assert_eq!(pole_order(&pfq(&["1", "1"], &["-25+eps"])).unwrap(), 1);
    }

    #[test]
    fn upper_zero_cancels_lower_pole() {
        // (eps)_m / (-3+eps+...)_m: the numerator eps cancels the pole.
        assert_eq!(pole_order(&pfq(&["eps", "1"], &["-3+eps"])).unwrap(), 0);
    }

    #[test]
    fn regrouping_remainder_has_high_valuation() {
        let f = pfq(&["1/2+eps", "1/3"], &["3/2+2*eps"]);
        let series = f.truncated_series(6).unwrap();
        for n in 0..=6 {
            let rem = laurent_remainder(&series.coeff(n), 6).unwrap();
            if !rem.is_zero() {
                let num = rem.num().eps_dense();
                let den = rem.den().eps_dense();
                assert!(
                    poly_valuation(&num) - poly_valuation(&den) > 6,
                    "remainder of coefficient {n} has low valuation"
                );
            }
        }
    }

    #[test]
    fn pole_remainder_has_high_valuation() {
        let f = pfq(&["1", "1"], &["eps"]);
        let series = f.truncated_series(5).unwrap();
        for n in 0..=5 {
            let rem = laurent_remainder(&series.coeff(n), 3).unwrap();
            if !rem.is_zero() {
                let num = rem.num().eps_dense();
                let den = rem.den().eps_dense();
                assert!(poly_valuation(&num) - poly_valuation(&den) > 3);
            }
        }
    }

    #[test]
    fn wire_format() {
        let e = laurent_expand(&pfq(&["1", "1"], &["eps"]), -1, 4).unwrap();
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"-1":["0","1","2","3","4"]}"#
        );
        let back: EpsLaurent = serde_json::from_str(r#"{"-1":["0","1","2","3","4"]}"#).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn truncation_matches_numeric_evaluation() {
        // Higher eps order must shrink the defect by roughly eps0.
        let f = pfq(&["1", "1"], &["eps"]);
        let z = 0.25;
        let eps0 = 1e-3;
        let exact = crate::eval::eval_pfq(&f, Complex64::new(z, 0.0), eps0, 1e-14, 100_000)
            .unwrap()
            .re;
        let low = laurent_expand(&f, 1, 60).unwrap().eval_at(z, eps0);
        let high = laurent_expand(&f, 2, 60).unwrap().eval_at(z, eps0);
        assert!((exact - low).abs() < 1e-4);
        assert!((exact - high).abs() < 1e-7);
        assert!((exact - high).abs() < (exact - low).abs() * 1e-2);
    }
}
