//! Arithmetic in prime fields of word size, used for randomized exact rank
//! computations on series coefficients.
//!
//! Specializing `eps` to a rational point and reducing modulo a prime can
//! only *lower* the rank of a matrix of rational functions, never raise it.
//! Full rank at a single specialization is therefore a proof of full rank
//! over the rational-function field, while a repeated rank drop across
//! independent primes and points pins down a dependence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::pfq::PFQSpec;
use crate::rational::Rational;

/// The Mersenne prime 2^61 - 1.
pub const PRIME_A: u64 = (1 << 61) - 1;
/// The prime 2^64 - 2^32 + 1.
pub const PRIME_B: u64 = 0xFFFF_FFFF_0000_0001;

/// A prime field of word size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Fp {
        assert!(p > 2, "modulus must be an odd prime");
        Fp { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + (self.p - b % self.p) as u128;
        (s % self.p as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem; `a` must be
    /// nonzero mod p.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, n: i64) -> u64 {
        let r = n.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        let m = n.mod_floor(&BigInt::from(self.p));
        m.to_u64().expect("residue fits in u64")
    }

    /// Residue of an exact rational; `None` when the denominator vanishes
    /// mod p (an unlucky prime for this value).
    pub fn from_rational(&self, r: &Rational) -> Option<u64> {
        let den = self.from_bigint(r.denom());
        if den == 0 {
            return None;
        }
        let num = self.from_bigint(r.numer());
        Some(self.mul(num, self.inv(den)))
    }
}

/// Series coefficients of a pFq at a fixed rational eps, reduced mod p,
/// computed by the exact term-ratio recurrence. Returns `None` when some
/// ratio factor has a denominator divisible by p (retry with another prime).
/// The caller must have checked that no lower-parameter factor vanishes as
/// an exact rational over the range.
pub fn pfq_series_mod_p(
    f: &PFQSpec,
    eps: &Rational,
    fp: Fp,
    order: usize,
) -> Option<Vec<u64>> {
    let mut s = Vec::with_capacity(order + 1);
    s.push(1u64);
    let mut cur = 1u64;
    for m in 0..order {
        let mi = Rational::from_int(m as i64);
        let mut num = 1u64;
        for a in &f.upper {
            let v = &a.eval(eps) + &mi;
            num = fp.mul(num, fp.from_rational(&v)?);
        }
        let mut den = fp.from_i64(m as i64 + 1);
        for b in &f.lower {
            let v = &b.eval(eps) + &mi;
            let r = fp.from_rational(&v)?;
            if r == 0 {
                // Exact-zero lower factors are excluded by the caller; a
                // zero residue here means p divides the value.
                return None;
            }
            den = fp.mul(den, r);
        }
        if den == 0 {
            return None;
        }
        cur = fp.mul(cur, fp.mul(num, fp.inv(den)));
        s.push(cur);
    }
    Some(s)
}

/// In-place Gauss-Jordan elimination mod p; returns the rank.
pub fn row_reduce(fp: Fp, mat: &mut [Vec<u64>]) -> usize {
    let rows = mat.len();
    if rows == 0 {
        return 0;
    }
    let cols = mat[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rank, pivot);
        let inv = fp.inv(mat[rank][col]);
        for c in col..cols {
            mat[rank][c] = fp.mul(mat[rank][c], inv);
        }
        for r in 0..rows {
            if r != rank && mat[r][col] != 0 {
                let factor = mat[r][col];
                for c in col..cols {
                    let t = fp.mul(factor, mat[rank][c]);
                    mat[r][c] = fp.sub(mat[r][c], t);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// A nonzero solution of A x = 0 mod p, or `None` when A has full column
/// rank. The returned vector is normalized to have its first nonzero entry
/// equal to 1.
pub fn kernel_vector(fp: Fp, mat: &[Vec<u64>]) -> Option<Vec<u64>> {
    if mat.is_empty() {
        return None;
    }
    let cols = mat[0].len();
    let mut work: Vec<Vec<u64>> = mat.to_vec();
    row_reduce(fp, &mut work);
    // Identify pivot columns of the reduced matrix.
    let mut pivot_of_col = vec![None; cols];
    let mut free_col = None;
    let mut r = 0;
    for c in 0..cols {
        if r < work.len() && work[r][c] != 0 {
            pivot_of_col[c] = Some(r);
            r += 1;
        } else if free_col.is_none() {
            free_col = Some(c);
        }
    }
    let free = free_col?;
    let mut x = vec![0u64; cols];
    x[free] = 1;
    // Back-substitute: each pivot variable balances the free column.
    for c in 0..cols {
        if let Some(row) = pivot_of_col[c] {
            x[c] = fp.neg(work[row][free]);
        }
    }
    Some(x)
}
