//! Parameters linear in the regulator: `constant + slope * eps`.

use crate::error::{Error, Result};
use crate::rational::Rational;
use std::fmt;
use std::str::FromStr;

/// A hypergeometric parameter of the form `r + s*eps` with exact rational
/// constant part `r` and slope `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearParam {
    pub constant: Rational,
    pub slope: Rational,
}

impl LinearParam {
    pub fn new(constant: Rational, slope: Rational) -> Self {
        LinearParam { constant, slope }
    }

    pub fn from_int(n: i64) -> Self {
        LinearParam::new(Rational::from_int(n), Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        LinearParam::new(r, Rational::zero())
    }

    pub fn eps() -> Self {
        LinearParam::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.slope.is_zero()
    }

    /// Exact integer value if the parameter carries no eps dependence.
    pub fn exact_integer(&self) -> Option<i64> {
        if self.slope.is_zero() {
            self.constant.to_integer()
        } else {
            None
        }
    }

    /// True when the parameter is exactly an integer n <= 0 (slope must be zero).
    pub fn is_exact_nonpositive_integer(&self) -> bool {
        self.slope.is_zero() && self.constant.is_nonpositive_integer()
    }

    pub fn shift(&self, n: i64) -> Self {
        LinearParam::new(&self.constant + &Rational::from_int(n), self.slope.clone())
    }

    pub fn add(&self, other: &LinearParam) -> Self {
        LinearParam::new(
            &self.constant + &other.constant,
            &self.slope + &other.slope,
        )
    }

    pub fn sub(&self, other: &LinearParam) -> Self {
        LinearParam::new(
            &self.constant - &other.constant,
            &self.slope - &other.slope,
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        LinearParam::new(&self.constant * k, &self.slope * k)
    }

    pub fn neg(&self) -> Self {
        LinearParam::new(-&self.constant, -&self.slope)
    }

    pub fn eval(&self, eps: &Rational) -> Rational {
        &self.constant + &(&self.slope * eps)
    }

    pub fn eval_f64(&self, eps: f64) -> f64 {
        self.constant.to_f64() + self.slope.to_f64() * eps
    }
}

impl fmt::Display for LinearParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slope.is_zero() {
            return write!(f, "{}", self.constant);
        }
        let eps_part = if self.slope.is_one() {
            "eps".to_string()
        } else if self.slope == Rational::from_int(-1) {
            "-eps".to_string()
        } else if self.slope.is_integer() {
            format!("{}eps", self.slope)
        } else {
            format!("{}*eps", self.slope)
        };
        if self.constant.is_zero() {
            write!(f, "{eps_part}")
        } else if eps_part.starts_with('-') {
            write!(f, "{}-{}", self.constant, &eps_part[1..])
        } else {
            write!(f, "{}+{}", self.constant, eps_part)
        }
    }
}

impl FromStr for LinearParam {
    type Err = Error;

    /// Grammar: a signed sum of terms, each term either a rational or an eps
    /// term `[rational ['*']] eps`. Examples: `3`, `-eps`, `1/2+2eps`,
    /// `1/2-1/3*eps`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty parameter".into()));
        }
        let mut constant = Rational::zero();
        let mut slope = Rational::zero();
        let bytes = s.as_bytes();
        let mut i = 0usize;
        let mut sign = 1i64;
        let mut first = true;
        while i < bytes.len() {
            if !first || bytes[i] == b'+' || bytes[i] == b'-' {
                match bytes[i] {
                    b'+' => {
                        sign = 1;
                        i += 1;
                    }
                    b'-' => {
                        sign = -1;
                        i += 1;
                    }
                    _ if first => {}
                    _ => {
                        return Err(Error::Parse(format!(
                            "expected '+' or '-' at byte {i} in parameter {s:?}"
                        )))
                    }
                }
            }
            first = false;
            // Term body: [rational ['*']] 'eps'  |  rational
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
                i += 1;
            }
            let num_str = &s[start..i];
            let coeff = if num_str.is_empty() {
                None
            } else {
                Some(num_str.parse::<Rational>()?)
            };
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            if s[i..].starts_with("eps") {
                i += 3;
                let c = coeff.unwrap_or_else(Rational::one);
                let signed = if sign < 0 { -c } else { c };
                slope = &slope + &signed;
            } else if let Some(c) = coeff {
                let signed = if sign < 0 { -c } else { c };
                constant = &constant + &signed;
            } else {
                return Err(Error::Parse(format!(
                    "expected rational or eps at byte {start} in parameter {s:?}"
                )));
            }
            sign = 1;
        }
        Ok(LinearParam { constant, slope })
    }
}

impl serde::Serialize for LinearParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for LinearParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
