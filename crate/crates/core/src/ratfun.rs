//! Rational functions in `z` and `eps`: quotients of [`Poly`] kept in a
//! canonical form so that equality is plain structural equality.
//!
//! Canonical form: numerator and denominator are coprime, all coefficients are
//! integers, the gcd of all integer coefficients across both parts is 1, and
//! the denominator's leading coefficient (graded-lex) is positive. The zero
//! function is `0/1`. Examples: `(eps^2-1)/(eps-1)` reduces to `eps + 1`,
//! `0/(7 eps)` to `0`, and `2z^2/(4z)` to `z/2`.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rational;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("rational function denominator"));
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFun {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        let (pn, cn) = num.integer_primitive();
        let (pd, cd) = den.integer_primitive();
        // num/den = (cn/cd) * pn/pd with cn/cd = p/q in lowest terms, q > 0.
        let ratio = &cn / &cd;
        let p = Rational::from_bigint(ratio.numer().clone());
        let q = Rational::from_bigint(ratio.denom().clone());
        RatFun {
            num: pn.scale(&p),
            den: pd.scale(&q),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::canonical(p, Poly::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_poly(Poly::constant(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    pub fn from_linparam(p: &crate::linparam::LinearParam) -> Self {
        Self::from_poly(Poly::from_linparam(p))
    }

    pub fn zero() -> Self {
        RatFun {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFun {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn var_z() -> Self {
        Self::from_poly(Poly::var_z())
    }

    pub fn var_eps() -> Self {
        Self::from_poly(Poly::var_eps())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Some(value) when the function is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(&self.num.constant_term() / &self.den.constant_term())
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::canonical(num, den)
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        Self::canonical(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, k: &Rational) -> RatFun {
        Self::canonical(self.num.scale(k), self.den.clone())
    }

    pub fn div(&self, other: &RatFun) -> Result<RatFun> {
        if other.is_zero() {
            return Err(Error::DivisionByZero("rational function division"));
        }
        Ok(Self::canonical(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn recip(&self) -> Result<RatFun> {
        RatFun::one().div(self)
    }

    pub fn pow(&self, n: i32) -> Result<RatFun> {
        if n < 0 {
            return self.recip()?.pow(-n);
        }
        Ok(RatFun {
            num: self.num.pow(n as u32),
            den: self.den.pow(n as u32),
        })
    }

    pub fn derivative_z(&self) -> RatFun {
        let num = self
            .num
            .derivative_z()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative_z()));
        let den = self.den.mul(&self.den);
        Self::canonical(num, den)
    }

    /// Exact evaluation; errors when the point hits the denominator's zero set.
    pub fn eval(&self, z: &Rational, eps: &Rational) -> Result<Rational> {
        let d = self.den.eval(z, eps);
        if d.is_zero() {
            return Err(Error::DivisionByZero("rational function evaluated at a pole"));
        }
        Ok(&self.num.eval(z, eps) / &d)
    }

    /// Substitute a rational value for eps; the result is a function of z only.
    pub fn substitute_eps(&self, eps: &Rational) -> Result<RatFun> {
        let den = self.den.substitute_eps(eps);
        if den.is_zero() {
            return Err(Error::DivisionByZero(
                "denominator vanishes identically at this eps",
            ));
        }
        Ok(Self::canonical(self.num.substitute_eps(eps), den))
    }

    /// Substitute a rational value for z; the result is a function of eps only.
    pub fn substitute_z(&self, z: &Rational) -> Result<RatFun> {
        let den = self.den.substitute_z(z);
        if den.is_zero() {
            return Err(Error::DivisionByZero(
                "denominator vanishes identically at this z",
            ));
        }
        Ok(Self::canonical(self.num.substitute_z(z), den))
    }
}

impl RatFun {
    /// Render with the main variable renamed (e.g. `m` when the slot holds a
    /// series index rather than the expansion variable).
    pub fn display_with_index(&self, main: &str) -> String {
        if self.den.is_one() {
            return self.num.display_with(main, "eps");
        }
        let num_str = if self.num.num_terms() > 1 {
            format!("({})", self.num.display_with(main, "eps"))
        } else {
            self.num.display_with(main, "eps")
        };
        // Parenthesize the denominator unless it is an integer constant or a
        // monic power of a single variable, so the string parses back to the
        // same function (`/` binds left-to-right, `^` tighter than `/`).
        let den_needs_parens = if self.den.num_terms() > 1 {
            true
        } else if self.den.is_constant() {
            !self.den.constant_term().is_integer()
        } else {
            !self.den.leading_coeff().is_one()
                || (self.den.degree_z() > 0 && self.den.degree_eps() > 0)
        };
        let den_str = if den_needs_parens {
            format!("({})", self.den.display_with(main, "eps"))
        } else {
            self.den.display_with(main, "eps")
        };
        format!("{}/{}", num_str, den_str)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with_index("z"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Poly {
        Poly::var_z()
    }

    fn ep() -> Poly {
        Poly::var_eps()
    }

    #[test]
    fn canonical_examples() {
        // (eps^2 - 1)/(eps - 1) -> (eps + 1)/1
        let r = RatFun::new(
            ep().pow(2).sub(&Poly::one()),
            ep().sub(&Poly::one()),
        )
        .unwrap();
        assert_eq!(r.num(), &ep().add(&Poly::one()));
        assert!(r.den().is_one());

        // 0/(7 eps) -> 0/1
        let r = RatFun::new(Poly::zero(), ep().scale(&Rational::from_int(7))).unwrap();
        assert!(r.is_zero());
        assert!(r.den().is_one());

        // 2z^2/(4z) -> z/2
        let r = RatFun::new(
            z().pow(2).scale(&Rational::from_int(2)),
            z().scale(&Rational::from_int(4)),
        )
        .unwrap();
        assert_eq!(r.num(), &z());
        assert_eq!(r.den(), &Poly::from_int(2));
    }

    #[test]
    fn denominator_sign_normalized() {
        // z/(-2+... ) gets a positive-leading denominator.
        let r = RatFun::new(z(), Poly::from_int(-2)).unwrap();
        assert_eq!(r.to_string(), "-z/2");
        let r = RatFun::new(Poly::one(), Poly::one().sub(&z())).unwrap();
        assert_eq!(r.to_string(), "-1/(z - 1)");
    }

    #[test]
    fn arithmetic() {
        let a = RatFun::new(Poly::one(), z()).unwrap();
        let b = RatFun::new(Poly::one(), z().add(&Poly::one())).unwrap();
        // 1/z + 1/(z+1) = (2z+1)/(z(z+1))
        let s = a.add(&b);
        assert_eq!(
            s.num(),
            &z().scale(&Rational::from_int(2)).add(&Poly::one())
        );
        assert_eq!(s.den(), &z().mul(&z().add(&Poly::one())));
        // a * z = 1
        assert!(a.mul(&RatFun::var_z()).is_one());
        // Cancellation through subtraction.
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.div(&b).unwrap().to_string(), "(z + 1)/z");
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dz [1/(1-z)] = 1/(1-z)^2
        let f = RatFun::new(Poly::one(), Poly::one().sub(&z())).unwrap();
        let expect = RatFun::new(Poly::one(), Poly::one().sub(&z()).pow(2)).unwrap();
        assert_eq!(f.derivative_z(), expect);
    }

    #[test]
    fn eval_and_substitute() {
        let f = RatFun::new(ep(), z().sub(&ep())).unwrap();
        assert_eq!(
            f.eval(&Rational::from_int(3), &Rational::from_int(1)).unwrap(),
            Rational::new(1, 2)
        );
        assert!(f.eval(&Rational::one(), &Rational::one()).is_err());
        let g = f.substitute_eps(&Rational::from_int(2)).unwrap();
        assert_eq!(g.to_string(), "2/(z - 2)");
    }

    #[test]
    fn constants() {
        let c = RatFun::new(Poly::from_int(6), Poly::from_int(4)).unwrap();
        assert_eq!(c.as_constant().unwrap(), Rational::new(3, 2));
        assert_eq!(c.to_string(), "3/2");
        assert!(RatFun::var_z().as_constant().is_none());
    }
}
