//! Modular arithmetic over word-sized primes.
//!
//! Everything runs on `u64` values with `u128` intermediates. Inputs at or
//! above [`MAX_MODULUS`] are rejected with [`Error::Capacity`].

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Exclusive upper bound on primes accepted by [`Prime::new`].
pub const MAX_MODULUS: u64 = 1 << 61;

/// A prime below [`MAX_MODULUS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(value: u64) -> Result<Self> {
        if value >= MAX_MODULUS {
            return Err(Error::Capacity(format!("{value} is at or above 2^61")));
        }
        if value < 2 || !is_prime(value)? {
            return Err(Error::Domain(format!("{value} is not prime")));
        }
        Ok(Prime(value))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_odd(self) -> bool {
        self.0 != 2
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        Prime::new(v)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into `0..m`.
#[inline]
pub fn reduce(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, valid for every `u64`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain(format!("primality of {n} is undefined")));
    }
    for p in MR_WITNESSES {
        if n % p == 0 {
            return Ok(n == p);
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

fn require_odd(p: Prime, what: &str) -> Result<()> {
    if p.is_odd() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} needs an odd prime, got 2")))
    }
}

/// Legendre symbol `(a/p)` computed by the binary Jacobi reciprocity chain.
pub fn legendre(a: i64, p: Prime) -> Result<i8> {
    require_odd(p, "legendre")?;
    let mut n = p.get();
    let mut a = reduce(a as i128, n);
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// Rational quartic residue symbol `a^((p-1)/4) mod p` as `±1`.
pub fn quartic_symbol(a: i64, p: Prime) -> Result<i8> {
    if p.get() % 4 != 1 {
        return Err(Error::Domain(format!("quartic symbol needs p = 1 mod 4, got {p}")));
    }
    if legendre(a, p)? != 1 {
        return Err(Error::Domain(format!("{a} is not a quadratic residue mod {p}")));
    }
    let r = pow_mod(reduce(a as i128, p.get()), (p.get() - 1) / 4, p.get());
    if r == 1 {
        Ok(1)
    } else if r == p.get() - 1 {
        Ok(-1)
    } else {
        Err(Error::Internal(format!("{a}^((p-1)/4) mod {p} = {r}")))
    }
}

/// Smaller square root of `a` modulo `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: i64, p: Prime) -> Result<u64> {
    if legendre(a, p)? != 1 {
        return Err(Error::Domain(format!("{a} has no nonzero square root mod {p}")));
    }
    let p = p.get();
    let a = reduce(a as i128, p);
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Ok(r.min(p - r))
}

/// Write `p = y^2 + z^2` with `y = 0 mod 4` and `z` odd.
pub fn two_squares(p: Prime) -> Result<(u64, u64)> {
    if p.get() % 8 != 1 {
        return Err(Error::Domain(format!("two_squares needs p = 1 mod 8, got {p}")));
    }
    let p = p.get();
    let t = sqrt_mod(-1, Prime(p))?;
    let mut pair = (p, t);
    while (pair.1 as u128) * (pair.1 as u128) > p as u128 {
        pair = (pair.1, pair.0 % pair.1);
    }
    let r1 = pair.1;
    let rest = p - r1 * r1;
    let other = isqrt(rest as u128) as u64;
    if other * other != rest {
        return Err(Error::Internal(format!("descent for {p} left a non-square")));
    }
    let (y, z) = if r1 % 2 == 0 { (r1, other) } else { (other, r1) };
    debug_assert!(y % 4 == 0 && z % 2 == 1);
    Ok((y, z))
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = ((n as f64).sqrt() as u128).min(u64::MAX as u128);
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Fundamental solution of `u^2 - d v^2 = 1` from the continued fraction of `sqrt(d)`.
pub fn pell_fundamental(d: u64) -> Result<(u64, u64)> {
    if d < 2 {
        return Err(Error::Domain(format!("Pell equation needs d >= 2, got {d}")));
    }
    let a0 = isqrt(d as u128) as u64;
    if a0 * a0 == d {
        return Err(Error::Domain(format!("{d} is a perfect square")));
    }
    let d128 = d as u128;
    let (mut m, mut den, mut a) = (0u128, 1u128, a0 as u128);
    let (mut h_prev, mut h) = (1u128, a0 as u128);
    let (mut k_prev, mut k) = (0u128, 1u128);
    let overflow = || Error::Capacity(format!("fundamental Pell solution for {d} exceeds 64 bits"));
    loop {
        let lhs = h.checked_mul(h).ok_or_else(overflow)?;
        let rhs = k
            .checked_mul(k)
            .and_then(|kk| kk.checked_mul(d128))
            .ok_or_else(overflow)?;
        if lhs == rhs + 1 {
            let u = u64::try_from(h).map_err(|_| overflow())?;
            let v = u64::try_from(k).map_err(|_| overflow())?;
            return Ok((u, v));
        }
        m = den * a - m;
        den = (d128 - m * m) / den;
        a = (a0 as u128 + m) / den;
        let h_next = a.checked_mul(h).and_then(|t| t.checked_add(h_prev)).ok_or_else(overflow)?;
        let k_next = a.checked_mul(k).and_then(|t| t.checked_add(k_prev)).ok_or_else(overflow)?;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
    }
}

/// Largest supported precision for [`sqrt_2adic`].
pub const MAX_2ADIC_PRECISION: u32 = 126;

/// The 2-adic square root of `a` that is `1 mod 4`, reduced mod `2^k`.
///
/// The root is lifted to 127 bits once and then truncated, so results for
/// different `k` are coherent.
pub fn sqrt_2adic(a: i64, k: u32) -> Result<u128> {
    if a.rem_euclid(8) != 1 {
        return Err(Error::Domain(format!("{a} is not 1 mod 8, no 2-adic square root")));
    }
    if !(3..=MAX_2ADIC_PRECISION).contains(&k) {
        return Err(Error::Domain(format!("2-adic precision {k} outside 3..={MAX_2ADIC_PRECISION}")));
    }
    let target = a as i128 as u128;
    let mut s: u128 = 1;
    for j in 3..127u32 {
        let mask = (1u128 << (j + 1)) - 1;
        if s.wrapping_mul(s).wrapping_sub(target) & mask != 0 {
            s += 1u128 << (j - 1);
        }
    }
    if s % 4 == 3 {
        s = s.wrapping_neg();
    }
    Ok(s & ((1u128 << k) - 1))
}

/// Split `n != 0` as `2^v * u` with `u` odd.
pub fn two_valuation(n: u128) -> (u32, u128) {
    let v = n.trailing_zeros();
    (v, n >> v)
}
