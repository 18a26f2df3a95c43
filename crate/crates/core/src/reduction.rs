//! Contiguous-shift relations between a hypergeometric series and integer
//! parameter shifts of itself.
//!
//! A unit shift of a single parameter satisfies a first-order differential
//! identity in the series variable.  Composing unit steps and rewriting all
//! derivatives of order > q through the annihilating operator expresses any
//! integer shift as
//!
//! ```text
//!     R(z) * S_shifted  =  sum_k  P_k(z) * d^k/dz^k S
//! ```
//!
//! with polynomial `R` and `P_k` normalized so that gcd(R, P_0, ..., P_q) = 1
//! and `R` has a positive leading coefficient.  Every relation returned by
//! this module is certified coefficient-by-coefficient on truncated series,
//! exactly in the field of eps-rational functions, before it is handed back.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linparam::LinearParam;
use crate::ode::{self, reduction_row};
use crate::parse::parse_poly;
use crate::pfq::PFQSpec;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::rational::Rational;

/// Order through which every returned relation is certified on series.
pub const VERIFIED_ORDER: usize = 50;

/// Which parameter family a step acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSide {
    Upper,
    Lower,
}

/// Whether the targeted parameter moves by +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDirection {
    Up,
    Down,
}

/// A certified relation `R * S_shifted = sum_k P_k * S^(k)`.
///
/// `pcoeffs` always has exactly q + 1 entries (the derivative basis of the
/// base spec); entries beyond the support of the relation are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    prefactor_r: Poly,
    pcoeffs: Vec<Poly>,
    verified_order: usize,
}

impl ReductionResult {
    pub fn prefactor_r(&self) -> &Poly {
        &self.prefactor_r
    }

    pub fn pcoeffs(&self) -> &[Poly] {
        &self.pcoeffs
    }

    pub fn verified_order(&self) -> usize {
        self.verified_order
    }
}

#[derive(Serialize, Deserialize)]
struct ReductionWire {
    #[serde(rename = "R")]
    r: String,
    #[serde(rename = "P")]
    p: Vec<String>,
    verified_order: usize,
}

impl Serialize for ReductionResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReductionWire {
            r: self.prefactor_r.to_string(),
            p: self.pcoeffs.iter().map(|p| p.to_string()).collect(),
            verified_order: self.verified_order,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReductionResult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ReductionWire::deserialize(d)?;
        let prefactor_r = parse_poly(&wire.r).map_err(D::Error::custom)?;
        let pcoeffs = wire
            .p
            .iter()
            .map(|s| parse_poly(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(ReductionResult {
            prefactor_r,
            pcoeffs,
            verified_order: wire.verified_order,
        })
    }
}

/// The spec with every parameter shifted by the given integer vectors.
pub fn shifted_spec(f: &PFQSpec, upper_shifts: &[i64], lower_shifts: &[i64]) -> Result<PFQSpec> {
    check_shift_lengths(f, upper_shifts, lower_shifts)?;
    let mut g = f.clone();
    for (j, &m) in upper_shifts.iter().enumerate() {
        g = g.shift_upper(j, m);
    }
    for (k, &n) in lower_shifts.iter().enumerate() {
        g = g.shift_lower(k, n);
    }
    g.validate()?;
    Ok(g)
}

fn check_shift_lengths(f: &PFQSpec, upper: &[i64], lower: &[i64]) -> Result<()> {
    if upper.len() != f.p() || lower.len() != f.q() {
        return Err(Error::InvalidSpec(format!(
            "shift vectors must have lengths p = {} and q = {}, got {} and {}",
            f.p(),
            f.q(),
            upper.len(),
            lower.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Unit steps: coefficients s with  F_shifted = sum_k s_k d^k/dz^k F
// ---------------------------------------------------------------------------

fn check_target(spec: &PFQSpec, what: &str) -> Result<()> {
    spec.validate()
        .map_err(|e| Error::DegenerateStep(format!("{what}: target is undefined ({e})")))
}

/// Raise an upper parameter: (theta + a) F = a F(a+1), so
/// F(a+1) = F + (z/a) F'.  Degenerate exactly when a = 0.
fn raise_upper(f: &PFQSpec, j: usize) -> Result<(PFQSpec, Vec<RatFun>)> {
    let a = &f.upper[j];
    let what = format!("raising upper parameter #{} = {}", j + 1, a);
    if a.is_zero() {
        return Err(Error::DegenerateStep(format!(
            "{what}: the multiplier a vanishes"
        )));
    }
    let target = f.shift_upper(j, 1);
    check_target(&target, &what)?;
    let s1 = RatFun::new(Poly::var_z(), Poly::from_linparam(a))?;
    Ok((target, vec![RatFun::one(), s1]))
}

/// Lower a lower parameter: (theta + b - 1) F = (b - 1) F(b-1), so
/// F(b-1) = F + (z/(b-1)) F'.  Degenerate exactly when b = 1.
fn lower_lower(f: &PFQSpec, k: usize) -> Result<(PFQSpec, Vec<RatFun>)> {
    let b = &f.lower[k];
    let what = format!("lowering lower parameter #{} = {}", k + 1, b);
    let bm1 = b.shift(-1);
    if bm1.is_zero() {
        return Err(Error::DegenerateStep(format!(
            "{what}: the multiplier b - 1 vanishes"
        )));
    }
    let target = f.shift_lower(k, -1);
    check_target(&target, &what)?;
    let s1 = RatFun::new(Poly::var_z(), Poly::from_linparam(&bm1))?;
    Ok((target, vec![RatFun::one(), s1]))
}

/// theta-coefficient lists (little endian) of the two annihilator parts of
/// `g`: A(theta) = theta prod_k (theta + b_k - 1) and
/// B(theta) = prod_j (theta + a_j).
fn theta_parts(g: &PFQSpec) -> (Vec<Poly>, Vec<Poly>) {
    let b_offsets: Vec<Poly> = g
        .lower
        .iter()
        .map(|b| Poly::from_linparam(&b.shift(-1)))
        .collect();
    let a_offsets: Vec<Poly> = g.upper.iter().map(Poly::from_linparam).collect();
    (
        ode::theta_product(&b_offsets, true),
        ode::theta_product(&a_offsets, false),
    )
}

/// Evaluate a little-endian theta-polynomial at a z-free point.
fn eval_theta_at(list: &[Poly], point: &Poly) -> Poly {
    let mut acc = Poly::zero();
    for c in list.iter().rev() {
        acc = acc.mul(point).add(c);
    }
    acc
}

/// Inverse-direction elimination.  The target `g` (the shifted function) is
/// tied to the base `F` by a first-order theta identity
///
/// ```text
///     (theta + t) g = t F,
/// ```
///
/// with t = a_j - 1 when lowering an upper parameter and t = b_k when
/// raising a lower one.  Iterating theta^n g = A_n(theta) F + (-t)^n g with
/// A_0 = 0, A_{n+1} = theta A_n + t (-t)^n and substituting into g's own
/// annihilator A_g(theta) - z B_g(theta) eliminates g's derivatives:
///
/// ```text
///     [A_g(-t) - z B_g(-t)] g = - sum_n (a_n - z b_n) A_n(theta) F.
/// ```
///
/// The theta-degree of the right side never exceeds q, so the result already
/// lives in the derivative basis {F, ..., F^(q)}.  The step is degenerate
/// exactly when the bracket on the left vanishes identically.
fn eliminate_inverse(g: &PFQSpec, t: &LinearParam, what: &str) -> Result<Vec<RatFun>> {
    let (a_list, b_list) = theta_parts(g);
    let minus_t = Poly::from_linparam(&t.neg());
    let z = Poly::var_z();
    let c_poly = eval_theta_at(&a_list, &minus_t).sub(&z.mul(&eval_theta_at(&b_list, &minus_t)));
    if c_poly.is_zero() {
        return Err(Error::DegenerateStep(format!(
            "{what}: the eliminated multiplier vanishes identically \
             (the parameter is 1 or coincides with one on the other side)"
        )));
    }
    let nmax = a_list.len().max(b_list.len());
    let mut m_theta: Vec<Poly> = vec![Poly::zero(); nmax];
    let lambda = Poly::from_linparam(t);
    let mut a_n: Vec<Poly> = Vec::new(); // theta-coeffs of A_n
    let mut pw = Poly::one(); // (-t)^n
    for n in 0..nmax {
        let an = a_list.get(n).cloned().unwrap_or_else(Poly::zero);
        let bn = b_list.get(n).cloned().unwrap_or_else(Poly::zero);
        let coeff_n = an.sub(&bn.mul(&z));
        if !coeff_n.is_zero() {
            for (i, ai) in a_n.iter().enumerate() {
                if !ai.is_zero() {
                    m_theta[i] = m_theta[i].add(&coeff_n.mul(ai));
                }
            }
        }
        a_n.insert(0, lambda.mul(&pw));
        pw = pw.mul(&minus_t);
    }
    while m_theta.len() > 1 && m_theta.last().unwrap().is_zero() {
        m_theta.pop();
    }
    let u = ode::theta_poly_to_d_form(&m_theta, 0);
    let mut s = Vec::with_capacity(u.len());
    for uk in &u {
        s.push(RatFun::new(uk.neg(), c_poly.clone())?);
    }
    while s.len() > 1 && s.last().unwrap().is_zero() {
        s.pop();
    }
    Ok(s)
}

/// Lower an upper parameter (inverse direction).
fn lower_upper(f: &PFQSpec, j: usize) -> Result<(PFQSpec, Vec<RatFun>)> {
    let what = format!("lowering upper parameter #{} = {}", j + 1, f.upper[j]);
    let target = f.shift_upper(j, -1);
    check_target(&target, &what)?;
    let t = f.upper[j].shift(-1);
    let s = eliminate_inverse(&target, &t, &what)?;
    Ok((target, s))
}

/// Raise a lower parameter (inverse direction).
fn raise_lower(f: &PFQSpec, k: usize) -> Result<(PFQSpec, Vec<RatFun>)> {
    let what = format!("raising lower parameter #{} = {}", k + 1, f.lower[k]);
    let target = f.shift_lower(k, 1);
    check_target(&target, &what)?;
    let t = f.lower[k].clone();
    let s = eliminate_inverse(&target, &t, &what)?;
    Ok((target, s))
}

/// One unit shift of a single parameter.  Returns the shifted spec and the
/// coefficients s with F_shifted = sum_k s_k d^k/dz^k F, taken relative to
/// the *input* spec.
fn unit_step(
    f: &PFQSpec,
    side: StepSide,
    direction: StepDirection,
    index: usize,
) -> Result<(PFQSpec, Vec<RatFun>)> {
    match side {
        StepSide::Upper => {
            if index >= f.p() {
                return Err(Error::InvalidSpec(format!(
                    "upper index {} out of range (p = {})",
                    index + 1,
                    f.p()
                )));
            }
            match direction {
                StepDirection::Up => raise_upper(f, index),
                StepDirection::Down => lower_upper(f, index),
            }
        }
        StepSide::Lower => {
            if index >= f.q() {
                return Err(Error::InvalidSpec(format!(
                    "lower index {} out of range (q = {})",
                    index + 1,
                    f.q()
                )));
            }
            match direction {
                StepDirection::Up => raise_lower(f, index),
                StepDirection::Down => lower_lower(f, index),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Module algebra over the derivative basis of a fixed base spec
// ---------------------------------------------------------------------------

/// The derivative basis {F, F', ..., F^(q)} of a fixed base spec, together
/// with arithmetic on vectors of rational-function coordinates over it.
/// Derivatives of order q + 1 are rewritten through the annihilator.
#[derive(Debug, Clone)]
pub struct DerivativeBasis {
    spec: PFQSpec,
    row: Vec<RatFun>,
}

impl DerivativeBasis {
    pub fn new(f: &PFQSpec) -> Result<Self> {
        f.validate()?;
        Ok(DerivativeBasis {
            spec: f.clone(),
            row: reduction_row(f)?,
        })
    }

    pub fn spec(&self) -> &PFQSpec {
        &self.spec
    }

    /// Basis size q + 1.
    pub fn dim(&self) -> usize {
        self.row.len()
    }

    /// Coordinates of the base function itself.
    pub fn unit(&self) -> Vec<RatFun> {
        let mut v = vec![RatFun::zero(); self.dim()];
        v[0] = RatFun::one();
        v
    }

    /// d/dz of sum_k v_k F^(k), re-expressed over the basis.
    pub fn differentiate(&self, v: &[RatFun]) -> Vec<RatFun> {
        let d = self.dim();
        assert_eq!(v.len(), d, "coordinate vector has wrong length");
        let top = &v[d - 1];
        let mut w = Vec::with_capacity(d);
        for k in 0..d {
            let mut wk = v[k].derivative_z();
            if k > 0 {
                wk = wk.add(&v[k - 1]);
            }
            if !top.is_zero() {
                wk = wk.add(&top.mul(&self.row[k]));
            }
            w.push(wk);
        }
        w
    }

    /// Coordinates of sum_k op_k d^k/dz^k (sum_j v_j F^(j)).  The operator
    /// may be longer than the basis; high derivatives fold back through the
    /// annihilator.
    pub fn apply_operator(&self, op: &[RatFun], v: &[RatFun]) -> Vec<RatFun> {
        let mut acc = vec![RatFun::zero(); self.dim()];
        let mut cur = v.to_vec();
        for (k, c) in op.iter().enumerate() {
            if k > 0 {
                cur = self.differentiate(&cur);
            }
            if c.is_zero() {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(cur.iter()) {
                if !x.is_zero() {
                    *a = a.add(&c.mul(x));
                }
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Assembly and certification
// ---------------------------------------------------------------------------

/// Clear denominators of a coordinate vector into (R, P_0..P_q), jointly
/// primitive with positive leading coefficient on R.
fn assemble(v: &[RatFun]) -> (Poly, Vec<Poly>) {
    let mut r = Poly::one();
    for c in v {
        if !c.is_zero() {
            r = r.lcm(c.den());
        }
    }
    let ps: Vec<Poly> = v
        .iter()
        .map(|c| {
            if c.is_zero() {
                Poly::zero()
            } else {
                let cof = r
                    .div_exact(c.den())
                    .expect("lcm is divisible by every denominator");
                c.num().mul(&cof)
            }
        })
        .collect();
    make_primitive(r, ps)
}

/// Divide the joint content out of an already-cleared (R, P_0..P_q) and fix
/// the sign of R's leading coefficient.
fn make_primitive(mut r: Poly, mut ps: Vec<Poly>) -> (Poly, Vec<Poly>) {
    let mut all = ps.clone();
    all.push(r.clone());
    let g = Poly::gcd_list(&all);
    r = r.div_exact(&g).expect("gcd divides R");
    for p in &mut ps {
        if !p.is_zero() {
            *p = p.div_exact(&g).expect("gcd divides every P_k");
        }
    }
    if r != r.positive_leading() {
        r = r.neg();
        for p in &mut ps {
            *p = p.neg();
        }
    }
    (r, ps)
}


fn fall(m: usize, k: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = &acc * &Rational::from_int((m - i) as i64);
    }
    acc
}

/// Exact certification of R * S_g = sum_k P_k S_f^(k) through z^order, as
/// identities in the field of eps-rational functions.
///
/// When at least one of the two specs is non-terminating, the coefficient
/// identity at z^n is divided through by that spec's n-th series coefficient;
/// all remaining quantities are short windowed products of term ratios, so
/// each check involves only small canonical rational functions.  When both
/// series terminate, the finitely many nonzero coefficients are compared
/// directly.
pub fn certify_relation(
    base: &PFQSpec,
    shifted: &PFQSpec,
    r: &Poly,
    p: &[Poly],
    order: usize,
) -> Result<()> {
    if base.termination_degree().is_none() {
        certify_ratio(base, shifted, r, p, order, true)
    } else if shifted.termination_degree().is_none() {
        certify_ratio(base, shifted, r, p, order, false)
    } else {
        certify_direct(base, shifted, r, p, order)
    }
}

fn certification_failure(n: usize, base: &PFQSpec, shifted: &PFQSpec) -> Error {
    Error::CertificationFailed {
        order: n,
        detail: format!("relation between {shifted} and derivatives of {base} fails"),
    }
}

/// Dense integer polynomials in eps (little-endian), used for the
/// certification hot path: exact BigRational arithmetic spends most of its
/// time reducing fractions, so the window products below run over BigInt
/// after denominators are cleared once per object.
mod ipoly {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::Zero;

    use crate::poly::Poly;

    pub type IPoly = Vec<BigInt>;

    /// lcm of the coefficient denominators.
    pub fn den_lcm(p: &Poly) -> BigInt {
        let mut l = BigInt::from(1);
        for (_, c) in p.terms() {
            l = l.lcm(c.denom());
        }
        l
    }

    /// `p * scale` as a dense integer vector; `scale` must clear every
    /// denominator. Panics in debug builds otherwise.
    pub fn from_poly(p: &Poly, scale: &BigInt) -> IPoly {
        let mut out = vec![BigInt::zero(); p.degree_eps() as usize + 1];
        for (e, c) in p.terms() {
            debug_assert_eq!(e.z, 0, "ipoly input must be z-free");
            let (q, r) = (c.numer() * scale).div_rem(c.denom());
            debug_assert!(r.is_zero(), "scale does not clear denominator");
            out[e.eps as usize] = q;
        }
        trim(&mut out);
        out
    }

    pub fn trim(v: &mut IPoly) {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
    }

    pub fn mul(a: &IPoly, b: &IPoly) -> IPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                out[i + j] += ca * cb;
            }
        }
        out
    }

    /// acc += p * k
    pub fn add_scaled(acc: &mut IPoly, p: &IPoly, k: &BigInt) {
        if acc.len() < p.len() {
            acc.resize(p.len(), BigInt::zero());
        }
        for (a, c) in acc.iter_mut().zip(p) {
            *a += c * k;
        }
    }

    pub fn equal(a: &mut IPoly, b: &mut IPoly) -> bool {
        trim(a);
        trim(b);
        a == b
    }
}

fn certify_ratio(
    base: &PFQSpec,
    shifted: &PFQSpec,
    r: &Poly,
    p: &[Poly],
    order: usize,
    normalize_by_base: bool,
) -> Result<()> {
    use ipoly::IPoly;
    use num_bigint::BigInt;
    use num_integer::Integer;

    let kmax = p.len().saturating_sub(1);
    let rz = r.z_coefficients();
    let pz: Vec<Vec<Poly>> = p.iter().map(|q| q.z_coefficients()).collect();
    let back = rz
        .len()
        .max(pz.iter().map(|c| c.len()).max().unwrap_or(1))
        .saturating_sub(1);

    // One common factor clears every denominator of R and the P_k; it scales
    // both sides of the relation, so equality is unaffected.
    let lam = rz
        .iter()
        .chain(pz.iter().flatten())
        .fold(BigInt::from(1), |l, c| l.lcm(&ipoly::den_lcm(c)));
    let rzi: Vec<IPoly> = rz.iter().map(|c| ipoly::from_poly(c, &lam)).collect();
    let pzi: Vec<Vec<IPoly>> = pz
        .iter()
        .map(|pk| pk.iter().map(|c| ipoly::from_poly(c, &lam)).collect())
        .collect();

    // Term ratios of the normalizing spec N (never identically zero, by the
    // choice of the non-terminating side) and the other spec O, as integer
    // numerator/denominator pairs. Scaling a ratio's numerator and
    // denominator by the same factor leaves the ratio itself unchanged, and
    // the window products below pick up one uniform overall factor per side.
    let (norm, other) = if normalize_by_base {
        (base, shifted)
    } else {
        (shifted, base)
    };
    let top = order + kmax;
    let mut rho_n = Vec::with_capacity(top);
    let mut rho_o = Vec::with_capacity(top);
    let mut rho_n_int: Vec<(IPoly, IPoly)> = Vec::with_capacity(top);
    let mut rho_o_int: Vec<(IPoly, IPoly)> = Vec::with_capacity(top);
    for m in 0..top {
        let rn = norm.term_ratio_at(m as i64)?;
        let ro = other.term_ratio_at(m as i64)?;
        for (rho, out) in [(&rn, &mut rho_n_int), (&ro, &mut rho_o_int)] {
            let a = ipoly::den_lcm(rho.num()).lcm(&ipoly::den_lcm(rho.den()));
            out.push((
                ipoly::from_poly(rho.num(), &a),
                ipoly::from_poly(rho.den(), &a),
            ));
        }
        rho_n.push(rn);
        rho_o.push(ro);
    }

    // Every coefficient identity at z^n is scaled by the nonzero field element
    // s^N_lo, so s^N_m and s^O_m enter only through products of term ratios
    // over the window [lo, hi] and the single global quotient
    // w = s^O_lo / s^N_lo, advanced (and kept reduced) as the window slides.
    let mut w = RatFun::one();
    let mut w_lo = 0usize;

    for n in 0..=order {
        let lo = n.saturating_sub(back);
        let hi = n + kmax;
        while w_lo < lo {
            w = w.mul(&rho_o[w_lo]).div(&rho_n[w_lo])?;
            w_lo += 1;
        }
        // t[m - lo] = (s_m / s_lo) * D as a polynomial, where D is the product
        // of the ratio denominators over [lo, hi): prefix numerators times
        // suffix denominators.
        let window = |rho: &[(IPoly, IPoly)]| -> (Vec<IPoly>, IPoly) {
            let size = hi - lo + 1;
            let mut suf = vec![vec![BigInt::from(1)]; size];
            for m in (0..size - 1).rev() {
                suf[m] = ipoly::mul(&rho[lo + m].1, &suf[m + 1]);
            }
            let dprod = suf[0].clone();
            let mut t = Vec::with_capacity(size);
            let mut pref = vec![BigInt::from(1)];
            for (m, s) in suf.iter().enumerate() {
                t.push(ipoly::mul(&pref, s));
                if m + 1 < size {
                    pref = ipoly::mul(&pref, &rho[lo + m].0);
                }
            }
            (t, dprod)
        };
        let (t_n, d_n) = window(&rho_n_int);
        let (t_o, d_o) = window(&rho_o_int);
        let (t_g, t_f) = if normalize_by_base {
            (&t_o, &t_n)
        } else {
            (&t_n, &t_o)
        };

        let mut gsum: IPoly = Vec::new();
        for (i, ri) in rzi.iter().enumerate() {
            if i > n {
                break;
            }
            if ri.is_empty() {
                continue;
            }
            ipoly::add_scaled(
                &mut gsum,
                &ipoly::mul(ri, &t_g[n - i - lo]),
                &BigInt::from(1),
            );
        }
        let mut fsum: IPoly = Vec::new();
        for (k, pk) in pzi.iter().enumerate() {
            for (i, c) in pk.iter().enumerate() {
                if i > n {
                    break;
                }
                if c.is_empty() {
                    continue;
                }
                let m = n - i + k;
                ipoly::add_scaled(
                    &mut fsum,
                    &ipoly::mul(c, &t_f[m - lo]),
                    fall(m, k).numer(),
                );
            }
        }
        // Cross-multiplied form of  sum_i r_i x^g_{n-i} = sum_{k,i} ... x^f_m:
        // the side holding the O-spec carries w = wn/wd and the O-denominator
        // product, the N side carries the N-denominator product. The same
        // factor clears the denominators of both halves of w, so it cancels
        // between the two sides.
        let mu = ipoly::den_lcm(w.num()).lcm(&ipoly::den_lcm(w.den()));
        let wn = ipoly::from_poly(w.num(), &mu);
        let wd = ipoly::from_poly(w.den(), &mu);
        let left = ipoly::mul(&wn, &d_n);
        let right = ipoly::mul(&wd, &d_o);
        let (mut lhs, mut rhs) = if normalize_by_base {
            (ipoly::mul(&gsum, &left), ipoly::mul(&fsum, &right))
        } else {
            (ipoly::mul(&gsum, &right), ipoly::mul(&fsum, &left))
        };
        if !ipoly::equal(&mut lhs, &mut rhs) {
            return Err(certification_failure(n, base, shifted));
        }
    }
    Ok(())
}

fn certify_direct(
    base: &PFQSpec,
    shifted: &PFQSpec,
    r: &Poly,
    p: &[Poly],
    order: usize,
) -> Result<()> {
    let kmax = p.len().saturating_sub(1);
    let sf = base.truncated_series(order + kmax)?;
    let sg = shifted.truncated_series(order)?;
    let rz = r.z_coefficients();
    let pz: Vec<Vec<Poly>> = p.iter().map(|q| q.z_coefficients()).collect();
    for n in 0..=order {
        let mut lhs = RatFun::zero();
        for (i, ri) in rz.iter().enumerate() {
            if i > n {
                break;
            }
            if ri.is_zero() {
                continue;
            }
            lhs = lhs.add(&RatFun::from_poly(ri.clone()).mul(&sg.coeff(n - i)));
        }
        let mut rhs = RatFun::zero();
        for (k, pk) in pz.iter().enumerate() {
            for (i, c) in pk.iter().enumerate() {
                if i > n {
                    break;
                }
                if c.is_zero() {
                    continue;
                }
                let m = n - i + k;
                let term = RatFun::from_poly(c.clone())
                    .scale(&fall(m, k))
                    .mul(&sf.coeff(m));
                rhs = rhs.add(&term);
            }
        }
        if lhs != rhs {
            return Err(certification_failure(n, base, shifted));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// A single certified unit step, packaged as a full relation.
pub fn step_operator(
    f: &PFQSpec,
    direction: StepDirection,
    side: StepSide,
    index: usize,
) -> Result<ReductionResult> {
    f.validate()?;
    let basis = DerivativeBasis::new(f)?;
    let (target, op) = unit_step(f, side, direction, index)?;
    let v = basis.apply_operator(&op, &basis.unit());
    let (r, ps) = assemble(&v);
    certify_relation(f, &target, &r, &ps, VERIFIED_ORDER)?;
    Ok(ReductionResult {
        prefactor_r: r,
        pcoeffs: ps,
        verified_order: VERIFIED_ORDER,
    })
}

fn step_plan(
    upper: &[i64],
    lower: &[i64],
) -> Vec<(StepSide, StepDirection, usize, &'static str)> {
    let mut plan = Vec::new();
    // Cheap directions first, left to right within each family, then the
    // inverse directions.  Deterministic; any valid path gives the same
    // relation modulo the annihilator.
    for (j, &m) in upper.iter().enumerate() {
        for _ in 0..m.max(0) {
            plan.push((StepSide::Upper, StepDirection::Up, j, "raise upper"));
        }
    }
    for (k, &n) in lower.iter().enumerate() {
        for _ in 0..(-n).max(0) {
            plan.push((StepSide::Lower, StepDirection::Down, k, "lower lower"));
        }
    }
    for (j, &m) in upper.iter().enumerate() {
        for _ in 0..(-m).max(0) {
            plan.push((StepSide::Upper, StepDirection::Down, j, "lower upper"));
        }
    }
    for (k, &n) in lower.iter().enumerate() {
        for _ in 0..n.max(0) {
            plan.push((StepSide::Lower, StepDirection::Up, k, "raise lower"));
        }
    }
    plan
}

/// Compose unit steps along the canonical path into a certified relation
/// between `f` shifted by the given integer vectors and the derivatives of
/// `f` itself.
pub fn reduce(
    f: &PFQSpec,
    upper_shifts: &[i64],
    lower_shifts: &[i64],
) -> Result<ReductionResult> {
    f.validate()?;
    check_shift_lengths(f, upper_shifts, lower_shifts)?;
    let basis = DerivativeBasis::new(f)?;
    if upper_shifts.iter().all(|&m| m == 0) && lower_shifts.iter().all(|&n| n == 0) {
        let mut ps = vec![Poly::zero(); basis.dim()];
        ps[0] = Poly::one();
        return Ok(ReductionResult {
            prefactor_r: Poly::one(),
            pcoeffs: ps,
            verified_order: VERIFIED_ORDER,
        });
    }
    let mut cur = f.clone();
    let mut v = basis.unit();
    for (side, direction, index, name) in step_plan(upper_shifts, lower_shifts) {
        let (next, op) = unit_step(&cur, side, direction, index).map_err(|e| match e {
            Error::DegenerateStep(d) => Error::BlockedPath(format!(
                "canonical path (cheap steps first, left to right) blocked at \
                 '{name} #{}' on intermediate {}: {}",
                index + 1,
                cur,
                d
            )),
            other => other,
        })?;
        v = basis.apply_operator(&op, &v);
        cur = next;
    }
    let (r, ps) = assemble(&v);
    certify_relation(f, &cur, &r, &ps, VERIFIED_ORDER)?;
    Ok(ReductionResult {
        prefactor_r: r,
        pcoeffs: ps,
        verified_order: VERIFIED_ORDER,
    })
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

    fn poly(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn raise_upper_gauss() {
        // F(3/2, 1/3; 3/2) = F + 2z F' for F = F(1/2, 1/3; 3/2).
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = step_operator(&f, StepDirection::Up, StepSide::Upper, 0).unwrap();
        assert_eq!(r.prefactor_r(), &poly("1"));
        assert_eq!(r.pcoeffs(), &[poly("1"), poly("2*z")]);
        assert_eq!(r.verified_order(), 50);
    }

    #[test]
    fn lower_lower_gauss() {
        // F(1/2, 1/3; 1/2) = F + 2z F' as well: 1/(c - 1) = 2.
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = step_operator(&f, StepDirection::Down, StepSide::Lower, 0).unwrap();
        assert_eq!(r.prefactor_r(), &poly("1"));
        assert_eq!(r.pcoeffs(), &[poly("1"), poly("2*z")]);
    }

    #[test]
    fn lower_upper_gauss() {
        // Lowering a = 1/2: 3 F(-1/2, 1/3; 3/2) = (3 - z) F + 3z(1 - z) F'.
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = step_operator(&f, StepDirection::Down, StepSide::Upper, 0).unwrap();
        assert_eq!(r.prefactor_r(), &poly("3"));
        assert_eq!(r.pcoeffs(), &[poly("3 - z"), poly("3*z - 3*z^2")]);
    }

    #[test]
    fn raise_lower_gauss() {
        // Raising c = 3/2: 7 F(1/2, 1/3; 5/2) = 6 F + (9 - 9z) F'.
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = step_operator(&f, StepDirection::Up, StepSide::Lower, 0).unwrap();
        assert_eq!(r.prefactor_r(), &poly("7"));
        assert_eq!(r.pcoeffs(), &[poly("6"), poly("9 - 9*z")]);
    }

    #[test]
    fn zero_shift_is_identity() {
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = reduce(&f, &[0, 0], &[0]).unwrap();
        assert_eq!(r.prefactor_r(), &poly("1"));
        assert_eq!(r.pcoeffs(), &[poly("1"), poly("0")]);
    }

    #[test]
    fn double_raise_folds_through_annihilator() {
        // Raising a twice keeps the relation inside {F, F'}.
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = reduce(&f, &[2, 0], &[0]).unwrap();
        assert_eq!(r.pcoeffs().len(), 2);
        assert!(!r.pcoeffs()[1].is_zero());
    }

    #[test]
    fn three_f_two_raise_spans_basis() {
        let f = pfq(&["1/2", "1/3", "1/5"], &["3/2", "7/3"]);
        let r = reduce(&f, &[1, 0, 0], &[0, 0]).unwrap();
        assert_eq!(r.pcoeffs().len(), 3);
        assert_eq!(r.prefactor_r(), &poly("1"));
        assert_eq!(r.pcoeffs()[0], poly("1"));
        assert_eq!(r.pcoeffs()[1], poly("2*z"));
        assert_eq!(r.pcoeffs()[2], poly("0"));
    }

    #[test]
    fn mixed_shift_certifies() {
        // A composite move with eps-dependent parameters exercises every
        // step kind at once; certification runs inside reduce().
        let f = pfq(&["1/2+eps", "1/3"], &["4/3+2*eps"]);
        let r = reduce(&f, &[1, -1], &[2]).unwrap();
        assert_eq!(r.verified_order(), 50);
        assert_eq!(r.pcoeffs().len(), 2);
    }

    #[test]
    fn round_trip_composes_to_identity() {
        let f = pfq(&["1/2+eps", "1/3"], &["5/3"]);
        let fwd = reduce(&f, &[1, 0], &[1]).unwrap();
        let g = shifted_spec(&f, &[1, 0], &[1]).unwrap();
        let back = reduce(&g, &[-1, 0], &[-1]).unwrap();

        // Coordinates of the shifted function over the base's basis...
        let basis = DerivativeBasis::new(&f).unwrap();
        let r1 = RatFun::from_poly(fwd.prefactor_r().clone());
        let vg: Vec<RatFun> = fwd
            .pcoeffs()
            .iter()
            .map(|p| RatFun::from_poly(p.clone()).div(&r1).unwrap())
            .collect();
        // ...pushed through the reverse relation must land on F itself.
        let r2 = RatFun::from_poly(back.prefactor_r().clone());
        let op: Vec<RatFun> = back
            .pcoeffs()
            .iter()
            .map(|p| RatFun::from_poly(p.clone()).div(&r2).unwrap())
            .collect();
        let v = basis.apply_operator(&op, &vg);
        assert_eq!(v, basis.unit());
    }

    #[test]
    fn blocked_path_reported() {
        // Lowering the upper parameter 1 degenerates: the multiplier
        // (1 - a) vanishes.
        let f = pfq(&["1", "1/3"], &["3/2"]);
        let err = reduce(&f, &[-1, 0], &[0]).unwrap_err();
        match err {
            Error::BlockedPath(msg) => {
                assert!(msg.contains("lower upper #1"), "{msg}");
            }
            other => panic!("expected BlockedPath, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_raise_of_zero_parameter() {
        let f = pfq(&["0", "1/3"], &["3/2"]);
        let err = step_operator(&f, StepDirection::Up, StepSide::Upper, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateStep(_)));
    }

    #[test]
    fn degenerate_inverse_steps_when_parameters_match() {
        // Raising a lower parameter that equals an upper one: the
        // elimination multiplier picks up the factor (a - b) = 0.
        let h = pfq(&["1/2+eps", "1/3"], &["1/2+eps"]);
        let err = step_operator(&h, StepDirection::Up, StepSide::Lower, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateStep(_)));
        // Same for lowering an upper parameter that equals a lower one.
        let err = step_operator(&h, StepDirection::Down, StepSide::Upper, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateStep(_)));
        // The unrelated upper parameter still moves freely.
        assert!(step_operator(&h, StepDirection::Down, StepSide::Upper, 1).is_ok());
    }

    #[test]
    fn terminating_base_certifies_directly() {
        // 2F1(-3, 1/2; 5/2): a polynomial; shifting the terminating
        // parameter up by one crosses termination degrees.
        let f = pfq(&["-3", "1/2"], &["5/2"]);
        let r = reduce(&f, &[1, 0], &[0]).unwrap();
        assert_eq!(r.prefactor_r(), &poly("3"));
        assert_eq!(r.pcoeffs(), &[poly("3"), poly("-z")]);
    }

    #[test]
    fn reduction_result_serde_round_trip() {
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = step_operator(&f, StepDirection::Down, StepSide::Upper, 0).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: ReductionResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn reduction_result_wire_format() {
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let r = step_operator(&f, StepDirection::Up, StepSide::Upper, 0).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"R":"1","P":["1","2*z"],"verified_order":50}"#);
    }

    #[test]
    fn certifier_rejects_wrong_relation() {
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        let g = f.shift_upper(0, 1);
        // Deliberately wrong P_1 (z instead of 2z).
        let err = certify_relation(&f, &g, &poly("1"), &[poly("1"), poly("z")], 20)
            .unwrap_err();
        match err {
            Error::CertificationFailed { order, .. } => assert_eq!(order, 1),
            other => panic!("expected CertificationFailed, got {other:?}"),
        }
    }

    #[test]
    fn shift_length_mismatch_rejected() {
        let f = pfq(&["1/2", "1/3"], &["3/2"]);
        assert!(matches!(
            reduce(&f, &[1], &[0]),
            Err(Error::InvalidSpec(_))
        ));
    }
}
