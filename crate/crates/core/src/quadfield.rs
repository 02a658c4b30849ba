//! Elements of real quadratic rings and splitting symbols at degree-1 primes.

use crate::error::{Error, Result};
use crate::modarith::{legendre, reduce, sqrt_2adic, sqrt_mod, Prime};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `x + y*sqrt(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub x: i64,
    pub y: i64,
    pub m: Prime,
}

impl QuadInt {
    pub fn new(x: i64, y: i64, m: Prime) -> Self {
        QuadInt { x, y, m }
    }

    pub fn rational(x: i64, m: Prime) -> Self {
        QuadInt { x, y: 0, m }
    }

    pub fn norm(&self) -> i128 {
        norm(self)
    }

    pub fn conjugate(&self) -> Self {
        QuadInt { y: -self.y, ..*self }
    }

    pub fn checked_mul(&self, other: &QuadInt) -> Result<QuadInt> {
        if self.m != other.m {
            return Err(Error::Domain(format!(
                "cannot multiply elements of Q(sqrt {}) and Q(sqrt {})",
                self.m, other.m
            )));
        }
        let m = self.m.get() as i128;
        let (x1, y1, x2, y2) = (self.x as i128, self.y as i128, other.x as i128, other.y as i128);
        let x = x1
            .checked_mul(x2)
            .zip(y1.checked_mul(y2).and_then(|t| t.checked_mul(m)))
            .and_then(|(a, b)| a.checked_add(b));
        let y = x1.checked_mul(y2).zip(x2.checked_mul(y1)).and_then(|(a, b)| a.checked_add(b));
        match (x.and_then(|v| i64::try_from(v).ok()), y.and_then(|v| i64::try_from(v).ok())) {
            (Some(x), Some(y)) => Ok(QuadInt { x, y, m: self.m }),
            _ => Err(Error::Capacity("quadratic integer product exceeds 64 bits".into())),
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}*sqrt({})", self.x, if self.y < 0 { '-' } else { '+' }, self.y.unsigned_abs(), self.m)
    }
}

pub fn norm(alpha: &QuadInt) -> i128 {
    let (x, y) = (alpha.x as i128, alpha.y as i128);
    x * x - alpha.m.get() as i128 * y * y
}

/// Whether `alpha - 1` lies in `4 O_k` for `k = Q(sqrt m)`, `m` odd.
pub fn congruent_one_mod_4o(alpha: &QuadInt) -> Result<bool> {
    let m = alpha.m.get();
    if m == 2 {
        return Err(Error::Unsupported(
            "the mod 4 congruence is only implemented for odd radicands".into(),
        ));
    }
    let (x, y) = (alpha.x as i128, alpha.y as i128);
    Ok(if m % 4 == 1 {
        y.rem_euclid(2) == 0 && (x - 1 - y).rem_euclid(4) == 0
    } else {
        (x - 1).rem_euclid(4) == 0 && y.rem_euclid(4) == 0
    })
}

/// The degree-1 prime `(q, sqrt(m) - s)` of `Q(sqrt m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitPrime {
    pub q: Prime,
    pub m: Prime,
    pub s: u64,
}

impl SplitPrime {
    pub fn new(q: Prime, m: Prime, s: u64) -> Result<Self> {
        if !q.is_odd() || q == m || legendre(m.get() as i64, q)? != 1 {
            return Err(Error::Domain(format!("{q} does not split in Q(sqrt {m})")));
        }
        let qq = q.get();
        if s == 0 || s >= qq || ((s as u128 * s as u128) % qq as u128) as u64 != m.get() % qq {
            return Err(Error::Domain(format!("{s} is not a square root of {m} mod {q}")));
        }
        Ok(SplitPrime { q, m, s })
    }

    /// Both primes above `q`, smaller root first.
    pub fn above(q: Prime, m: Prime) -> Result<[SplitPrime; 2]> {
        if !q.is_odd() {
            return Err(Error::Domain("degree-1 primes above 2 are handled 2-adically".into()));
        }
        let s = sqrt_mod(m.get() as i64, q)?;
        Ok([SplitPrime::new(q, m, s)?, SplitPrime::new(q, m, q.get() - s)?])
    }

    pub fn conjugate(&self) -> SplitPrime {
        SplitPrime { s: self.q.get() - self.s, ..*self }
    }
}

/// `(alpha | k / p)`: 0 when `alpha` reduces to 0 at `p`, else the Legendre
/// symbol of its residue.
pub fn residue_symbol(alpha: &QuadInt, p: &SplitPrime) -> Result<i8> {
    if p.m != alpha.m {
        return Err(Error::Domain(format!(
            "prime above {} lives in Q(sqrt {}), element in Q(sqrt {})",
            p.q, p.m, alpha.m
        )));
    }
    let r = reduce(alpha.x as i128 + alpha.y as i128 * p.s as i128, p.q.get());
    legendre(r as i64, p.q)
}

/// Splitting symbol at the ramified prime `(sqrt m)` of `Q(sqrt m)`, `m` odd.
///
/// The residue field is `F_m` and `alpha` reduces to `x`.
pub fn residue_symbol_ramified(alpha: &QuadInt) -> Result<i8> {
    legendre(alpha.x, alpha.m)
}

/// Images of `alpha` under the two embeddings into `Z_2`, modulo `2^precision`.
///
/// The first uses the canonical root `sqrt(m) = 1 mod 4`, the second its negative.
pub fn embed_2adic(alpha: &QuadInt, precision: u32) -> Result<[u128; 2]> {
    let s = sqrt_2adic(alpha.m.get() as i64, precision)?;
    let mask = (1u128 << precision) - 1;
    let x = alpha.x as i128 as u128;
    let ys = (alpha.y as i128 as u128).wrapping_mul(s);
    Ok([x.wrapping_add(ys) & mask, x.wrapping_sub(ys) & mask])
}

/// Splitting symbol at the degree-1 prime above 2 selected by the canonical
/// 2-adic root of `m`.
pub fn residue_symbol_2adic(alpha: &QuadInt, precision: u32) -> Result<i8> {
    let [u, _] = embed_2adic(alpha, precision)?;
    match u % 8 {
        1 => Ok(1),
        5 => Ok(-1),
        r if r % 2 == 0 => Err(Error::Domain(format!("{alpha} is not a 2-adic unit"))),
        _ => Err(Error::Domain(format!("{alpha} is 3 mod 4 at the prime above 2"))),
    }
}
