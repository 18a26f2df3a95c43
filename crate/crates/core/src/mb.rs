//! Mellin-Barnes integrands: pole bookkeeping, residue summation into a
//! prefactor times pFq identification, and a numeric contour-quadrature
//! oracle.
//!
//! An integrand is a ratio of gamma factors `Γ(a·s + c)` times `x^(α·s)`
//! integrated over `s = γ + it`.  For one-dimensional integrands the contour
//! can be closed around one arithmetic progression of simple poles; summing
//! the residues yields a gamma prefactor times a hypergeometric series in
//! `±x^β`.  The quadrature routine evaluates the same integral directly and
//! serves as an independent numeric check.

use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gamma;
use crate::linparam::LinearParam;
use crate::pfq::PFQSpec;
use crate::rational::Rational;

/// One `Γ(slope · s + offset)` factor; `slope` has one entry per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaRow {
    pub slope: Vec<Rational>,
    pub offset: LinearParam,
}

/// The exponent α of one `x^(α·s)` factor, a complex number with rational
/// parts.  Serialized as a bare string when real, `[re, im]` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exponent {
    pub re: Rational,
    pub im: Rational,
}

impl Exponent {
    pub fn real(re: Rational) -> Self {
        Exponent {
            re,
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Exponent::real(Rational::one())
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentWire {
    Real(String),
    Pair([String; 2]),
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.im.is_zero() {
            ExponentWire::Real(self.re.to_string()).serialize(s)
        } else {
            ExponentWire::Pair([self.re.to_string(), self.im.to_string()]).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parse = |t: &str| t.parse::<Rational>().map_err(D::Error::custom);
        match ExponentWire::deserialize(d)? {
            ExponentWire::Real(r) => Ok(Exponent::real(parse(&r)?)),
            ExponentWire::Pair([re, im]) => Ok(Exponent {
                re: parse(&re)?,
                im: parse(&im)?,
            }),
        }
    }
}

/// A Mellin-Barnes integrand
/// `Π Γ(aⱼ·s + cⱼ) / Π Γ(bₖ·s + dₖ) · Π xᵣ^(αᵣ sᵣ)` over the contour
/// `s = γ + i·ℝ^dim`.
///
/// All slope vectors share the length `dim`; multi-dimensional integrands
/// are storable and printable but refuse residue summation and quadrature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MBIntegrand {
    pub dim: usize,
    pub num_gammas: Vec<GammaRow>,
    pub den_gammas: Vec<GammaRow>,
    pub exponents: Vec<Exponent>,
    pub contour: Vec<Rational>,
    pub kinematic_args: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ArgsWire {
    One(String),
    Many(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct MBWire {
    dim: usize,
    num: Vec<GammaRow>,
    den: Vec<GammaRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<Exponent>>,
    contour: Vec<Rational>,
    x: ArgsWire,
}

impl Serialize for MBIntegrand {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = if self.dim == 1 {
            ArgsWire::One(self.kinematic_args[0].clone())
        } else {
            ArgsWire::Many(self.kinematic_args.clone())
        };
        MBWire {
            dim: self.dim,
            num: self.num_gammas.clone(),
            den: self.den_gammas.clone(),
            alpha: Some(self.exponents.clone()),
            contour: self.contour.clone(),
            x,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MBIntegrand {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MBWire::deserialize(d)?;
        let exponents = w
            .alpha
            .unwrap_or_else(|| (0..w.dim).map(|_| Exponent::one()).collect());
        let kinematic_args = match w.x {
            ArgsWire::One(x) => vec![x],
            ArgsWire::Many(xs) => xs,
        };
        let mb = MBIntegrand {
            dim: w.dim,
            num_gammas: w.num,
            den_gammas: w.den,
            exponents,
            contour: w.contour,
            kinematic_args,
        };
        mb.validate().map_err(D::Error::custom)?;
        Ok(mb)
    }
}

impl fmt::Display for MBIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let var = |s: usize| -> String {
            if self.dim == 1 {
                "s".into()
            } else {
                format!("s{}", s + 1)
            }
        };
        let row = |r: &GammaRow| -> String {
            let mut arg = String::new();
            for (s, a) in r.slope.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                if !arg.is_empty() {
                    arg.push_str(" + ");
                }
                if a.is_one() {
                    arg.push_str(&var(s));
                } else {
                    arg.push_str(&format!("{}*{}", a, var(s)));
                }
            }
            let off = r.offset.to_string();
            if arg.is_empty() {
                format!("G({off})")
            } else if off == "0" {
                format!("G({arg})")
            } else {
                format!("G({arg} + {off})")
            }
        };
        let num: Vec<String> = self.num_gammas.iter().map(&row).collect();
        write!(f, "{}", num.join(" "))?;
        if !self.den_gammas.is_empty() {
            let den: Vec<String> = self.den_gammas.iter().map(&row).collect();
            write!(f, " / [{}]", den.join(" "))?;
        }
        for (s, (a, x)) in self.exponents.iter().zip(&self.kinematic_args).enumerate() {
            if a.im.is_zero() {
                write!(f, " {}^({}*{})", x, a.re, var(s))?;
            } else {
                write!(f, " {}^(({},{})*{})", x, a.re, a.im, var(s))?;
            }
        }
        Ok(())
    }
}

impl MBIntegrand {
    pub fn new(
        dim: usize,
        num_gammas: Vec<GammaRow>,
        den_gammas: Vec<GammaRow>,
        exponents: Vec<Exponent>,
        contour: Vec<Rational>,
        kinematic_args: Vec<String>,
    ) -> Result<Self> {
        let mb = MBIntegrand {
            dim,
            num_gammas,
            den_gammas,
            exponents,
            contour,
            kinematic_args,
        };
        mb.validate()?;
        Ok(mb)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("integrand dimension must be >= 1".into()));
        }
        for (what, len) in [
            ("alpha", self.exponents.len()),
            ("contour", self.contour.len()),
            ("x", self.kinematic_args.len()),
        ] {
            if len != self.dim {
                return Err(Error::InvalidSpec(format!(
                    "{} has {} entries but dim = {}",
                    what, len, self.dim
                )));
            }
        }
        for (what, rows) in [("numerator", &self.num_gammas), ("denominator", &self.den_gammas)] {
            for (i, r) in rows.iter().enumerate() {
                if r.slope.len() != self.dim {
                    return Err(Error::InvalidSpec(format!(
                        "{} row {} has a slope vector of length {} but dim = {}",
                        what,
                        i,
                        r.slope.len(),
                        self.dim
                    )));
                }
            }
        }
        // The contour must not sit on a pole of any numerator factor.
        for (i, r) in self.num_gammas.iter().enumerate() {
            let mut arg = r.offset.constant.clone();
            for (a, g) in r.slope.iter().zip(&self.contour) {
                arg = &arg + &(a * g);
            }
            if arg.is_integer() && !arg.is_positive_integer() {
                return Err(Error::GammaPole {
                    side: "numerator",
                    row: i,
                    index: arg.to_string(),
                });
            }
        }
        Ok(())
    }

    fn require_dim_one(&self, what: &str) -> Result<()> {
        if self.dim != 1 {
            return Err(Error::UnsupportedIntegrand(format!(
                "{} supports only one-dimensional integrands, got dim = {}",
                what, self.dim
            )));
        }
        Ok(())
    }
}

/// Which side of the vertical contour a pole family lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleSide {
    Left,
    Right,
}

impl fmt::Display for PoleSide {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            PoleSide::Left => "left",
            PoleSide::Right => "right",
        })
    }
}

/// The arithmetic progression of poles generated by one numerator factor
/// `Γ(slope·s + offset)`: `s_n = -(offset + n)/slope`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleFamily {
    pub row: usize,
    pub side: PoleSide,
    pub slope: Rational,
    pub offset: LinearParam,
}

impl PoleFamily {
    /// Location of the n-th pole of the family, as a function of eps.
    pub fn location(&self, n: u64) -> LinearParam {
        let scale = &Rational::from_int(-1) / &self.slope;
        self.offset.shift(n as i64).scale(&scale)
    }
}

/// Pole families of a one-dimensional integrand on the requested side, each
/// with its first `count` locations, ordered by distance from the contour.
pub fn enumerate_poles(
    mb: &MBIntegrand,
    side: PoleSide,
    count: usize,
) -> Result<Vec<(PoleFamily, Vec<LinearParam>)>> {
    mb.validate()?;
    mb.require_dim_one("pole enumeration")?;
    let gamma0 = &mb.contour[0];
    let mut out = Vec::new();
    for (i, r) in mb.num_gammas.iter().enumerate() {
        let a = &r.slope[0];
        if a.is_zero() {
            continue;
        }
        let fam_side = if a.is_negative() {
            PoleSide::Right
        } else {
            PoleSide::Left
        };
        if fam_side != side {
            continue;
        }
        let fam = PoleFamily {
            row: i,
            side: fam_side,
            slope: a.clone(),
            offset: r.offset.clone(),
        };
        let locations: Vec<LinearParam> = (0..count).map(|n| fam.location(n as u64)).collect();
        out.push((fam, locations));
    }
    // Families closest to the contour first (distance of their leading pole
    // at eps = 0), ties by row order.
    out.sort_by(|(fa, la), (fb, lb)| {
        let da = la.first().map(|l| (&l.eval(&Rational::zero()) - gamma0).abs());
        let db = lb.first().map(|l| (&l.eval(&Rational::zero()) - gamma0).abs());
        da.cmp(&db).then(fa.row.cmp(&fb.row))
    });
    Ok(out)
}

/// The gamma-function prefactor of a residue summation: a rational
/// coefficient, products of `Γ` at eps-linear arguments (numerator and
/// denominator), and a power of the kinematic argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaProducts {
    pub coeff: Rational,
    pub gamma_num: Vec<LinearParam>,
    pub gamma_den: Vec<LinearParam>,
    pub x_power: LinearParam,
}

impl GammaProducts {
    /// Numeric value at a real eps, excluding the `x` power.
    pub fn eval_f64(&self, eps: f64) -> f64 {
        let mut v = Complex64::new(self.coeff.to_f64(), 0.0);
        for g in &self.gamma_num {
            v *= gamma::gamma(Complex64::new(g.eval_f64(eps), 0.0));
        }
        for g in &self.gamma_den {
            v /= gamma::gamma(Complex64::new(g.eval_f64(eps), 0.0));
        }
        v.re
    }
}

/// Result of summing one family of residues: `value = prefactor.coeff ·
/// Π Γ(gamma_num)/Π Γ(gamma_den) · x^(prefactor.x_power) ·
/// f(arg_sign · x^arg_power)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSum {
    pub side: PoleSide,
    pub prefactor: GammaProducts,
    pub f: PFQSpec,
    pub arg_sign: i64,
    pub arg_power: Rational,
    /// True when the series converges for every kinematic argument
    /// (p <= q); otherwise it requires `|x^arg_power| < 1`.
    pub entire: bool,
}

impl ResidueSum {
    /// Numeric value of `prefactor × f` at a positive `x` and real eps,
    /// truncating the series after `terms` terms.
    pub fn eval_partial(&self, x: f64, eps: f64, terms: usize) -> f64 {
        let z = (self.arg_sign as f64) * x.powf(self.arg_power.to_f64());
        let upper: Vec<f64> = self.f.upper.iter().map(|a| a.eval_f64(eps)).collect();
        let lower: Vec<f64> = self.f.lower.iter().map(|b| b.eval_f64(eps)).collect();
        let mut sum = 0.0;
        let mut term = 1.0;
        for m in 0..terms {
            sum += term;
            let mf = m as f64;
            let mut ratio = 1.0;
            for a in &upper {
                ratio *= a + mf;
            }
            for b in &lower {
                ratio /= b + mf;
            }
            term *= ratio / (mf + 1.0) * z;
        }
        self.prefactor.eval_f64(eps) * x.powf(self.prefactor.x_power.eval_f64(eps)) * sum
    }
}

/// Identify the residue series for one closing side.
fn identify_side(mb: &MBIntegrand, side: PoleSide) -> Result<ResidueSum> {
    let u = match side {
        PoleSide::Left => 1i64,
        PoleSide::Right => -1i64,
    };
    let u_rat = Rational::from_int(u);
    let minus_u = Rational::from_int(-u);

    // Locate the generating factor: the unique numerator row with slope
    // matching the closing side.
    let mut generator: Option<usize> = None;
    for (i, r) in mb.num_gammas.iter().enumerate() {
        let a = &r.slope[0];
        if *a == u_rat {
            if let Some(j) = generator {
                let d = r.offset.sub(&mb.num_gammas[j].offset);
                if d.slope.is_zero() && d.constant.is_integer() {
                    return Err(Error::PoleCollision { row_a: j, row_b: i });
                }
                return Err(Error::UnsupportedIntegrand(format!(
                    "numerator rows {} and {} both generate pole families on the {} side",
                    j, i, side
                )));
            }
            generator = Some(i);
        } else if !a.is_zero() && *a != minus_u {
            return Err(Error::UnsupportedIntegrand(format!(
                "numerator row {} has slope {}; only slopes 0 and ±1 sum to a pFq",
                i, a
            )));
        }
    }
    let gen = generator.ok_or_else(|| {
        Error::UnsupportedIntegrand(format!("no pole family on the {} side", side))
    })?;
    let c_g = mb.num_gammas[gen].offset.clone();

    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut gamma_num = Vec::new();
    let mut gamma_den = Vec::new();
    for (i, r) in mb.num_gammas.iter().enumerate() {
        if i == gen {
            continue;
        }
        let a = &r.slope[0];
        if a.is_zero() {
            gamma_num.push(r.offset.clone());
        } else {
            // slope -u: at s_n the argument is offset + c_g + n.
            let par = c_g.add(&r.offset);
            gamma_num.push(par.clone());
            upper.push(par);
        }
    }
    for (i, r) in mb.den_gammas.iter().enumerate() {
        let a = &r.slope[0];
        if a.is_zero() {
            gamma_den.push(r.offset.clone());
        } else if *a == minus_u {
            let par = c_g.add(&r.offset);
            gamma_den.push(par.clone());
            lower.push(par);
        } else if *a == u_rat {
            return Err(Error::UnsupportedIntegrand(format!(
                "denominator row {} decreases along the {} lattice and would need the reflection formula",
                i, side
            )));
        } else {
            return Err(Error::UnsupportedIntegrand(format!(
                "denominator row {} has slope {}; only slopes 0 and ±1 sum to a pFq",
                i, a
            )));
        }
    }

    let alpha = &mb.exponents[0];
    if !alpha.im.is_zero() {
        return Err(Error::UnsupportedIntegrand(
            "complex exponents have no series identification".into(),
        ));
    }
    // x^(alpha·s_n) with s_n = -u(c_g + n): the series runs in x^beta.
    let beta = &alpha.re * &Rational::from_int(-u);
    let x_power = c_g.scale(&beta);

    let f = PFQSpec::new(upper, lower)?;
    let entire = f.p() <= f.q();
    Ok(ResidueSum {
        side,
        prefactor: GammaProducts {
            coeff: Rational::one(),
            gamma_num,
            gamma_den,
            x_power,
        },
        f,
        arg_sign: -1,
        arg_power: beta,
        entire,
    })
}

/// Whether the identified series converges at the (known-rational)
/// kinematic argument.
fn converges_at(rs: &ResidueSum, x: &Option<Rational>) -> bool {
    if rs.entire {
        return true;
    }
    match x {
        Some(xv) => {
            let mag = xv.abs();
            if rs.arg_power.is_negative() {
                mag > Rational::one()
            } else if rs.arg_power.is_zero() {
                false
            } else {
                mag < Rational::one()
            }
        }
        None => false,
    }
}

/// Close the contour of a one-dimensional integrand and sum the residues
/// into a gamma prefactor times a pFq of `arg_sign · x^arg_power`.
///
/// When both sides admit an identification, the side whose series converges
/// at the kinematic argument is chosen (an entire series converges
/// everywhere; a `p = q + 1` series needs `|x^arg_power| < 1`, decidable
/// only for a numeric argument).  Preference falls to the left side when
/// both converge, and the unique identifiable side is returned regardless
/// of regime when the other side is structurally blocked.
pub fn residue_sum(mb: &MBIntegrand) -> Result<ResidueSum> {
    mb.validate()?;
    mb.require_dim_one("residue summation")?;
    let x_value: Option<Rational> = mb.kinematic_args[0].parse().ok();
    let left = identify_side(mb, PoleSide::Left);
    let right = identify_side(mb, PoleSide::Right);
    match (left, right) {
        (Ok(l), Ok(r)) => {
            if converges_at(&l, &x_value) {
                Ok(l)
            } else if converges_at(&r, &x_value) {
                Ok(r)
            } else {
                Err(Error::NoConvergentSide {
                    left_p: l.f.p(),
                    left_q: l.f.q(),
                    right_p: r.f.p(),
                    right_q: r.f.q(),
                })
            }
        }
        (Ok(l), Err(_)) => Ok(l),
        (Err(_), Ok(r)) => Ok(r),
        (Err(le), Err(re)) => {
            // Report the more structural failure.
            if matches!(re, Error::PoleCollision { .. }) && !matches!(le, Error::PoleCollision { .. })
            {
                Err(re)
            } else {
                Err(le)
            }
        }
    }
}

/// Midpoint of the real interval separating the left pole families from the
/// right ones at eps = 0, when such an interval exists; the preferred
/// contour offset for quadrature.
pub fn suggested_contour(mb: &MBIntegrand) -> Option<Rational> {
    if mb.dim != 1 {
        return None;
    }
    let mut left_max: Option<Rational> = None; // rightmost pole among left families
    let mut right_min: Option<Rational> = None;
    for r in &mb.num_gammas {
        let a = &r.slope[0];
        if a.is_zero() {
            continue;
        }
        let first = &(-&r.offset.constant) / a;
        if a.is_negative() {
            right_min = Some(match right_min {
                Some(m) => m.min(first),
                None => first,
            });
        } else {
            left_max = Some(match left_max {
                Some(m) => m.max(first),
                None => first,
            });
        }
    }
    let half = Rational::new(1, 2);
    match (left_max, right_min) {
        (Some(l), Some(r)) => {
            if l < r {
                Some(&(&l + &r) * &half)
            } else {
                None
            }
        }
        (Some(l), None) => Some(&l + &half),
        (None, Some(r)) => Some(&r - &half),
        (None, None) => Some(Rational::zero()),
    }
}

/// Trapezoidal quadrature of the integrand over `s = γ + it`,
/// `t ∈ [-t_max, t_max]`, divided by 2πi.
///
/// Samples are accumulated in a fixed left-to-right order, so the result is
/// bit-stable for fixed inputs.
pub fn contour_quadrature(
    mb: &MBIntegrand,
    x: f64,
    eps_value: f64,
    t_max: f64,
    n_points: usize,
) -> Result<Complex64> {
    mb.validate()?;
    mb.require_dim_one("contour quadrature")?;
    if !(x > 0.0) {
        return Err(Error::OutsideDomain(format!(
            "quadrature requires x > 0, got x = {x}"
        )));
    }
    if n_points < 2 || !(t_max > 0.0) {
        return Err(Error::InvalidSpec(
            "quadrature needs t_max > 0 and at least two sample points".into(),
        ));
    }
    let gamma0 = mb.contour[0].to_f64();
    let alpha = mb.exponents[0].to_complex();
    let ln_x = x.ln();
    let num: Vec<(f64, f64)> = mb
        .num_gammas
        .iter()
        .map(|r| (r.slope[0].to_f64(), r.offset.eval_f64(eps_value)))
        .collect();
    let den: Vec<(f64, f64)> = mb
        .den_gammas
        .iter()
        .map(|r| (r.slope[0].to_f64(), r.offset.eval_f64(eps_value)))
        .collect();
    let dt = 2.0 * t_max / (n_points - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n_points {
        let t = -t_max + dt * k as f64;
        let s = Complex64::new(gamma0, t);
        let mut ln_h = alpha * s * ln_x;
        for (a, c) in &num {
            ln_h += gamma::ln_gamma(s * *a + *c);
        }
        for (b, d) in &den {
            ln_h -= gamma::ln_gamma(s * *b + *d);
        }
        let h = ln_h.exp();
        if !h.re.is_finite() || !h.im.is_finite() {
            return Err(Error::NonFiniteSample { t });
        }
        let w = if k == 0 || k == n_points - 1 { 0.5 } else { 1.0 };
        acc += h * w;
    }
    Ok(acc * Complex64::new(dt / (2.0 * std::f64::consts::PI), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::RatFun;

    fn row(slope: &str, offset: &str) -> GammaRow {
        GammaRow {
            slope: vec![slope.parse().unwrap()],
            offset: offset.parse().unwrap(),
        }
    }

    fn mb1(
        num: Vec<GammaRow>,
        den: Vec<GammaRow>,
        alpha: &str,
        contour: &str,
        x: &str,
    ) -> MBIntegrand {
        MBIntegrand::new(
            1,
            num,
            den,
            vec![Exponent::real(alpha.parse().unwrap())],
            vec![contour.parse().unwrap()],
            vec![x.to_string()],
        )
        .unwrap()
    }

    /// Γ(s)Γ(a-s)/Γ(a) · x^(-s): the binomial integrand for (1+x)^(-a).
    fn binomial(a: &str, contour: &str, x: &str) -> MBIntegrand {
        mb1(
            vec![row("1", "0"), row("-1", a)],
            vec![row("0", a)],
            "-1",
            contour,
            x,
        )
    }

    /// Γ(a+s)Γ(b+s)Γ(-s)/Γ(c+s) · x^s: the Gauss integrand.
    fn gauss(a: &str, b: &str, c: &str, contour: &str, x: &str) -> MBIntegrand {
        mb1(
            vec![row("1", a), row("1", b), row("-1", "0")],
            vec![row("1", c)],
            "1",
            contour,
            x,
        )
    }

    fn lp(s: &str) -> LinearParam {
        s.parse().unwrap()
    }

    #[test]
    fn wire_round_trip() {
        let mb = binomial("1", "1/2", "x");
        let json = serde_json::to_string(&mb).unwrap();
        assert_eq!(
            json,
            r#"{"dim":1,"num":[{"slope":["1"],"offset":"0"},{"slope":["-1"],"offset":"1"}],"den":[{"slope":["0"],"offset":"1"}],"alpha":["-1"],"contour":["1/2"],"x":"x"}"#
        );
        let back: MBIntegrand = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mb);
    }

    #[test]
    fn missing_alpha_defaults_to_one() {
        let mb: MBIntegrand = serde_json::from_str(
            r#"{"dim":1,"num":[{"slope":["-1"],"offset":"0"}],"den":[],"contour":["-1/2"],"x":"x"}"#,
        )
        .unwrap();
        assert_eq!(mb.exponents, vec![Exponent::one()]);
    }

    #[test]
    fn pole_enumeration_examples() {
        // Γ(-s): poles to the right at 0, 1, 2.
        let mb = mb1(vec![row("-1", "0")], vec![], "1", "-1/2", "x");
        let fams = enumerate_poles(&mb, PoleSide::Right, 3).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].1, vec![lp("0"), lp("1"), lp("2")]);
        assert!(enumerate_poles(&mb, PoleSide::Left, 3).unwrap().is_empty());

        // Γ(1/2+s): poles to the left at -1/2, -3/2.
        let mb = mb1(vec![row("1", "1/2")], vec![], "1", "1/4", "x");
        let fams = enumerate_poles(&mb, PoleSide::Left, 2).unwrap();
        assert_eq!(fams[0].1, vec![lp("-1/2"), lp("-3/2")]);

        // Γ(2s+1): poles to the left at -1/2, -1, -3/2.
        let mb = mb1(vec![row("2", "1")], vec![], "1", "1/4", "x");
        let fams = enumerate_poles(&mb, PoleSide::Left, 3).unwrap();
        assert_eq!(fams[0].1, vec![lp("-1/2"), lp("-1"), lp("-3/2")]);
    }

    #[test]
    fn pole_families_sorted_by_distance() {
        // Families at first poles -1/2 (near) and -5 (far).
        let mb = mb1(vec![row("1", "5"), row("1", "1/2")], vec![], "1", "1", "x");
        let fams = enumerate_poles(&mb, PoleSide::Left, 1).unwrap();
        assert_eq!(fams[0].0.row, 1);
        assert_eq!(fams[1].0.row, 0);
    }

    #[test]
    fn contour_on_pole_rejected() {
        let r = MBIntegrand::new(
            1,
            vec![row("-1", "0")],
            vec![],
            vec![Exponent::one()],
            vec![Rational::from_int(2)],
            vec!["x".into()],
        );
        assert!(matches!(r, Err(Error::GammaPole { row: 0, .. })));
    }

    #[test]
    fn binomial_identifies_left() {
        let rs = residue_sum(&binomial("1", "1/2", "1/2")).unwrap();
        assert_eq!(rs.side, PoleSide::Left);
        assert_eq!(rs.f.upper, vec![lp("1")]);
        assert!(rs.f.lower.is_empty());
        assert_eq!(rs.arg_sign, -1);
        assert_eq!(rs.arg_power, Rational::one());
        assert_eq!(rs.prefactor.x_power, lp("0"));
        assert_eq!(rs.prefactor.gamma_num, vec![lp("1")]);
        assert_eq!(rs.prefactor.gamma_den, vec![lp("1")]);
        // (1+x)^(-1) at x = 1/2.
        let v = rs.eval_partial(0.5, 0.0, 200);
        assert!((v - 2.0 / 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn binomial_flips_side_outside_unit_disk() {
        let rs = residue_sum(&binomial("1", "1/2", "2")).unwrap();
        assert_eq!(rs.side, PoleSide::Right);
        assert_eq!(rs.f.upper, vec![lp("1")]);
        assert_eq!(rs.arg_power, Rational::from_int(-1));
        assert_eq!(rs.prefactor.x_power, lp("-1"));
        // x^(-1) · (1 + 1/x)^(-1) = 1/(1+x) = 1/3 at x = 2.
        let v = rs.eval_partial(2.0, 0.0, 200);
        assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn gauss_collides_left_identifies_right() {
        let rs = residue_sum(&gauss("1", "1", "2", "-1/2", "x")).unwrap();
        assert_eq!(rs.side, PoleSide::Right);
        assert_eq!(rs.f.upper, vec![lp("1"), lp("1")]);
        assert_eq!(rs.f.lower, vec![lp("2")]);
        assert_eq!(rs.prefactor.gamma_num, vec![lp("1"), lp("1")]);
        assert_eq!(rs.prefactor.gamma_den, vec![lp("2")]);
        assert_eq!(rs.prefactor.x_power, lp("0"));
        assert_eq!(rs.arg_power, Rational::one());
        // The left side alone reports the collision.
        let err = identify_side(&gauss("1", "1", "2", "-1/2", "x"), PoleSide::Left).unwrap_err();
        assert_eq!(err, Error::PoleCollision { row_a: 0, row_b: 1 });
    }

    #[test]
    fn residue_ratios_match_series_exactly() {
        // Independent oracle: ratios of exact residues along the lattice
        // must reproduce the identified series coefficients, eps included.
        let mb = gauss("1+eps", "1", "2+eps", "-1/2", "x");
        let rs = residue_sum(&mb).unwrap();
        let u = match rs.side {
            PoleSide::Left => 1i64,
            PoleSide::Right => -1i64,
        };
        let gen = mb
            .num_gammas
            .iter()
            .position(|r| r.slope[0] == Rational::from_int(u))
            .unwrap();
        let c_g = &mb.num_gammas[gen].offset;
        let series = rs.f.truncated_series(9).unwrap();
        let mut lattice_ratio = RatFun::one(); // residue_n / residue_0 without the x power
        for n in 0..=9u32 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let expected = series.coeff(n as usize).mul(&RatFun::from_int(sign));
            assert_eq!(lattice_ratio, expected, "lattice point {n}");
            // Advance to n+1: gamma factors step by (arg + n), the
            // generator residue contributes -1/(n+1).
            let mut step = RatFun::from_rational(Rational::new(-1, n as i64 + 1));
            for (i, r) in mb.num_gammas.iter().enumerate() {
                if i != gen && !r.slope[0].is_zero() {
                    let arg = c_g.add(&r.offset).shift(n as i64);
                    step = step.mul(&RatFun::from_linparam(&arg));
                }
            }
            for r in &mb.den_gammas {
                if !r.slope[0].is_zero() {
                    let arg = c_g.add(&r.offset).shift(n as i64);
                    step = step.div(&RatFun::from_linparam(&arg)).unwrap();
                }
            }
            lattice_ratio = lattice_ratio.mul(&step);
        }
    }

    #[test]
    fn no_convergent_side_for_symbolic_argument() {
        // Γ(a+s)Γ(-s)·x^s: both closings give 1F0, conditional on |x|.
        let mb = mb1(vec![row("1", "1/3"), row("-1", "0")], vec![], "1", "-1/6", "x");
        let err = residue_sum(&mb).unwrap_err();
        assert_eq!(
            err,
            Error::NoConvergentSide {
                left_p: 1,
                left_q: 0,
                right_p: 1,
                right_q: 0
            }
        );
    }

    #[test]
    fn reflection_refused() {
        // Denominator Γ(2+s) decreases along the left lattice of Γ(s).
        let mb = mb1(vec![row("1", "0")], vec![row("1", "2")], "-1", "1/2", "1/2");
        let err = residue_sum(&mb).unwrap_err();
        match err {
            Error::UnsupportedIntegrand(msg) => assert!(msg.contains("reflection")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_unit_slope_refused_for_summation() {
        let mb = mb1(vec![row("2", "1")], vec![], "1", "1/4", "1/2");
        assert!(matches!(
            residue_sum(&mb),
            Err(Error::UnsupportedIntegrand(_))
        ));
        // ... but pole enumeration still handles it (tested above).
    }

    #[test]
    fn dim_two_storable_but_refuses() {
        let mb = MBIntegrand::new(
            2,
            vec![GammaRow {
                slope: vec![Rational::one(), Rational::from_int(-1)],
                offset: lp("1/2"),
            }],
            vec![],
            vec![Exponent::one(), Exponent::one()],
            vec![Rational::zero(), Rational::zero()],
            vec!["x1".into(), "x2".into()],
        )
        .unwrap();
        let json = serde_json::to_string(&mb).unwrap();
        let back: MBIntegrand = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mb);
        assert!(!mb.to_string().is_empty());
        assert!(matches!(
            residue_sum(&mb),
            Err(Error::UnsupportedIntegrand(_))
        ));
        assert!(matches!(
            enumerate_poles(&mb, PoleSide::Left, 1),
            Err(Error::UnsupportedIntegrand(_))
        ));
        assert!(matches!(
            contour_quadrature(&mb, 0.5, 0.0, 10.0, 101),
            Err(Error::UnsupportedIntegrand(_))
        ));
    }

    #[test]
    fn suggested_contours() {
        assert_eq!(
            suggested_contour(&binomial("1", "1/2", "x")),
            Some(Rational::new(1, 2))
        );
        assert_eq!(
            suggested_contour(&gauss("1", "1", "2", "-1/2", "x")),
            Some(Rational::new(-1, 2))
        );
    }

    #[test]
    fn quadrature_binomial_value() {
        let q = contour_quadrature(&binomial("1", "1/2", "1/2"), 0.5, 0.0, 40.0, 4001).unwrap();
        assert!((q.re - 2.0 / 3.0).abs() < 1e-8, "{}", q.re);
        assert!(q.im.abs() < 1e-10);
    }

    #[test]
    fn quadrature_gauss_value() {
        let q = contour_quadrature(&gauss("1", "1", "2", "-1/2", "1/4"), 0.25, 0.0, 40.0, 4001)
            .unwrap();
        let exact = 4.0 * (1.25f64).ln();
        assert!((q.re - exact).abs() < 1e-8, "{} vs {exact}", q.re);
        assert!(q.im.abs() < 1e-10);
    }

    #[test]
    fn quadrature_contour_offset_independent() {
        let a = contour_quadrature(&binomial("1", "2/5", "1/2"), 0.5, 0.0, 40.0, 4001).unwrap();
        let b = contour_quadrature(&binomial("1", "3/5", "1/2"), 0.5, 0.0, 40.0, 4001).unwrap();
        assert!((a.re - b.re).abs() < 1e-8);
    }

    #[test]
    fn partial_sums_approach_quadrature_geometrically() {
        let mb = binomial("1", "1/2", "1/4");
        let q = contour_quadrature(&mb, 0.25, 0.0, 40.0, 4001).unwrap().re;
        let rs = residue_sum(&mb).unwrap();
        let d: Vec<f64> = [5, 10, 20]
            .iter()
            .map(|&m| (rs.eval_partial(0.25, 0.0, m) - q).abs())
            .collect();
        assert!(d[0] < 0.25f64.powi(4));
        assert!(d[1] < d[0] * 0.25f64.powi(4));
        assert!(d[2] < d[1] * 0.25f64.powi(9));
    }

    #[test]
    fn quadrature_rejects_nonpositive_x() {
        assert!(matches!(
            contour_quadrature(&binomial("1", "1/2", "x"), -1.0, 0.0, 40.0, 401),
            Err(Error::OutsideDomain(_))
        ));
    }
}
