//! Solutions of `x^2 - a y^2 - b z^2 = 0` and their normalized certificates.

use crate::error::{Error, Result};
use crate::modarith::{isqrt, pell_fundamental, two_squares, two_valuation, Prime};
use crate::quadfield::{congruent_one_mod_4o, embed_2adic, norm, QuadInt};
use serde::{Deserialize, Serialize};

/// Working precision for 2-adic embeddings of certificate elements.
pub const TWO_ADIC_PRECISION: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DirectSolve,
    TwoSquares,
    ConjugateTraceSwap,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::DirectSolve => "direct-solve",
            Provenance::TwoSquares => "two-squares",
            Provenance::ConjugateTraceSwap => "conjugate-trace-swap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest expansion factor tried by the bounded search (doubling from 1).
    pub bound_cap: u64,
    /// Pell automorph applications tried in each direction during normalization.
    pub orbit_depth: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { bound_cap: 64, orbit_depth: 64 }
    }
}

/// `alpha = x + y sqrt(a)` with `N(alpha) = b z^2`, normalized so that the
/// Rédei field it defines has the required discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlphaCertificate {
    pub a: Prime,
    pub b: Prime,
    pub alpha: QuadInt,
    pub z: i64,
    pub provenance: Provenance,
}

impl AlphaCertificate {
    pub fn triple(&self) -> (i64, i64, i64) {
        (self.alpha.x, self.alpha.y, self.z)
    }

    /// Re-check every invariant of the certificate.
    pub fn validate(&self) -> Result<()> {
        let (x, y, z) = self.triple();
        if self.alpha.m != self.a {
            return Err(Error::Internal(format!("certificate radicand {} != {}", self.alpha.m, self.a)));
        }
        if !solves(x, y, z, self.a, self.b) {
            return Err(Error::Internal(format!("({x}, {y}, {z}) does not solve the equation for ({}, {})", self.a, self.b)));
        }
        if gcd3(x, y, z) != 1 {
            return Err(Error::Internal(format!("({x}, {y}, {z}) is not primitive")));
        }
        if norm(&self.alpha) != self.b.get() as i128 * z as i128 * z as i128 {
            return Err(Error::Internal("norm does not equal b z^2".into()));
        }
        if self.provenance == Provenance::ConjugateTraceSwap {
            return Ok(());
        }
        let ok = if self.b.is_odd() {
            congruent_one_mod_4o(&self.alpha)?
        } else {
            two_adic_normalized(&self.alpha)?
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Internal(format!("{} fails the discriminant normalization", self.alpha)))
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn gcd3(x: i64, y: i64, z: i64) -> u64 {
    gcd(gcd(x.unsigned_abs(), y.unsigned_abs()), z.unsigned_abs())
}

fn solves(x: i64, y: i64, z: i64, a: Prime, b: Prime) -> bool {
    let (x, y, z) = (x as i128, y as i128, z as i128);
    let (a, b) = (a.get() as i128, b.get() as i128);
    match (x.checked_mul(x), y.checked_mul(y).and_then(|t| t.checked_mul(a)), z.checked_mul(z).and_then(|t| t.checked_mul(b))) {
        (Some(xx), Some(ayy), Some(bzz)) => ayy.checked_add(bzz) == Some(xx),
        _ => false,
    }
}

/// For `b = 2`: one 2-adic embedding of `alpha` has odd valuation and the
/// other has even valuation with unit part `1 mod 4`.
pub fn two_adic_normalized(alpha: &QuadInt) -> Result<bool> {
    Ok(match even_embedding_unit(alpha)? {
        Some(u) => u % 4 == 1,
        None => false,
    })
}

/// Unit part of the even-valuation embedding, when exactly one embedding has
/// even valuation.
fn even_embedding_unit(alpha: &QuadInt) -> Result<Option<u128>> {
    let e = embed_2adic(alpha, TWO_ADIC_PRECISION)?;
    let mut parts = [(0u32, 0u128); 2];
    for (slot, u) in parts.iter_mut().zip(e) {
        if u == 0 {
            return Err(Error::Capacity(format!("{alpha} vanishes to 2-adic precision {TWO_ADIC_PRECISION}")));
        }
        *slot = two_valuation(u);
    }
    let [(v1, u1), (v2, u2)] = parts;
    // the unit is only known modulo 2^(precision - v); 2 bits are needed
    if v1.max(v2) + 2 > TWO_ADIC_PRECISION {
        return Err(Error::Capacity(format!("{alpha} needs more than {TWO_ADIC_PRECISION} bits of 2-adic precision")));
    }
    Ok(match (v1 % 2, v2 % 2) {
        (0, 1) => Some(u1),
        (1, 0) => Some(u2),
        _ => None,
    })
}

/// Primitive solutions with `x, y, z > 0`, in order of growing search box.
///
/// The box at expansion factor `c` is `1 <= y <= c*ceil(sqrt b)`,
/// `1 <= z <= c*ceil(sqrt a)`; each box only visits points outside the
/// previous one.
#[derive(Debug, Clone)]
pub struct Solutions {
    a: u64,
    b: u64,
    by0: u64,
    bz0: u64,
    cap: u64,
    c: u64,
    y: u64,
    z: u64,
    overflowed: bool,
}

impl Solutions {
    pub fn new(a: Prime, b: Prime, cap: u64) -> Self {
        let ceil_sqrt = |n: u64| {
            let r = isqrt(n as u128) as u64;
            if r * r == n { r } else { r + 1 }
        };
        Solutions {
            a: a.get(),
            b: b.get(),
            by0: ceil_sqrt(b.get()),
            bz0: ceil_sqrt(a.get()),
            cap: cap.max(1),
            c: 1,
            y: 1,
            z: 1,
            overflowed: false,
        }
    }

    /// True when the search stopped because a candidate left 128-bit range.
    pub fn overflowed(&self) -> bool {
        self.overflowed
    }
}

impl Iterator for Solutions {
    type Item = (i64, i64, i64);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.c > self.cap || self.overflowed {
                return None;
            }
            let (ymax, zmax) = (self.c * self.by0, self.c * self.bz0);
            if self.y > ymax {
                self.c *= 2;
                self.y = 1;
                self.z = 1;
                continue;
            }
            if self.z > zmax {
                self.y += 1;
                self.z = 1;
                continue;
            }
            let (y, z) = (self.y, self.z);
            let half = self.c / 2;
            if half > 0 && y <= half * self.by0 && z <= half * self.bz0 {
                self.z = half * self.bz0 + 1;
                continue;
            }
            self.z += 1;
            let t = (self.a as u128)
                .checked_mul(y as u128 * y as u128)
                .zip((self.b as u128).checked_mul(z as u128 * z as u128))
                .and_then(|(p, q)| p.checked_add(q));
            let Some(t) = t else {
                self.overflowed = true;
                return None;
            };
            let x = isqrt(t);
            if x * x != t {
                continue;
            }
            let Ok(x) = i64::try_from(x) else {
                self.overflowed = true;
                return None;
            };
            if gcd3(x, y as i64, z as i64) == 1 {
                return Some((x, y as i64, z as i64));
            }
        }
    }
}

/// A primitive nontrivial solution of `x^2 = a y^2 + b z^2`.
///
/// Equal primes `l = 1 mod 8` use `l = y^2 + z^2`, giving `(l, y, z)`.
pub fn solve_legendre_eq(a: Prime, b: Prime, cfg: &SolverConfig) -> Result<(i64, i64, i64)> {
    if a == b && a.get() % 8 == 1 {
        let (y, z) = two_squares(a)?;
        return Ok((a.get() as i64, y as i64, z as i64));
    }
    let mut sols = Solutions::new(a, b, cfg.bound_cap);
    match sols.next() {
        Some(s) => Ok(s),
        None if sols.overflowed() => Err(Error::Capacity(format!("search for ({a}, {b}) left 64-bit range"))),
        None => Err(Error::SearchExhausted { a: a.get(), b: b.get(), cap: cfg.bound_cap }),
    }
}

/// Normalize a solution into a certificate.
///
/// For odd `b` the orbit of `sol` under sign changes and Pell automorphs of
/// `Q(sqrt a)` is searched for an element `= 1 mod 4 O_k`. For `b = 2` the
/// sign is fixed by the 2-adic condition of [`two_adic_normalized`].
pub fn normalize(sol: (i64, i64, i64), a: Prime, b: Prime, cfg: &SolverConfig) -> Result<AlphaCertificate> {
    let provenance = if a == b && sol.0.unsigned_abs() == a.get() {
        Provenance::TwoSquares
    } else {
        Provenance::DirectSolve
    };
    normalize_as(sol, a, b, cfg, provenance)
}

fn normalize_as(
    sol: (i64, i64, i64),
    a: Prime,
    b: Prime,
    cfg: &SolverConfig,
    provenance: Provenance,
) -> Result<AlphaCertificate> {
    if !a.is_odd() {
        return Err(Error::Unsupported("normalization needs an odd radicand".into()));
    }
    let (x, y, z) = sol;
    if !solves(x, y, z, a, b) || (y == 0 && z == 0) {
        return Err(Error::Domain(format!("({x}, {y}, {z}) is not a nontrivial solution for ({a}, {b})")));
    }
    if gcd3(x, y, z) != 1 {
        return Err(Error::Domain(format!("({x}, {y}, {z}) is not primitive")));
    }
    let make = |x: i64, y: i64| {
        let cert = AlphaCertificate {
            a,
            b,
            alpha: QuadInt::new(x, y.abs(), a),
            z: z.abs(),
            provenance,
        };
        cert.validate().map(|_| cert)
    };
    if !b.is_odd() {
        let alpha = QuadInt::new(x, y, a);
        return match even_embedding_unit(&alpha)? {
            Some(u) if u % 4 == 1 => make(x, y),
            Some(_) => make(-x, -y),
            None => Err(Error::NormalizationFailed { a: a.get(), b: b.get() }),
        };
    }
    for (cx, cy) in pell_orbit(x, y, a, cfg.orbit_depth) {
        for sx in [cx, -cx] {
            let alpha = QuadInt::new(sx, cy, a);
            if congruent_one_mod_4o(&alpha)? {
                return make(sx, cy);
            }
        }
    }
    Err(Error::NormalizationFailed { a: a.get(), b: b.get() })
}

/// `(x, y)` followed by its automorph images `eps^t (x + y sqrt a)` for
/// `t = 1, -1, 2, -2, ...` up to `depth`, stopping in a direction once
/// coordinates leave 64-bit range.
fn pell_orbit(x: i64, y: i64, a: Prime, depth: u32) -> Vec<(i64, i64)> {
    let mut out = vec![(x, y)];
    let Ok((u, v)) = pell_fundamental(a.get()) else {
        return out;
    };
    let (u, v, d) = (u as i128, v as i128, a.get() as i128);
    let step = |(x, y): (i64, i64), sign: i128| -> Option<(i64, i64)> {
        let (x, y) = (x as i128, y as i128);
        let nx = u.checked_mul(x)?.checked_add(sign.checked_mul(d)?.checked_mul(v)?.checked_mul(y)?)?;
        let ny = (sign * v).checked_mul(x)?.checked_add(u.checked_mul(y)?)?;
        Some((i64::try_from(nx).ok()?, i64::try_from(ny).ok()?))
    };
    let (mut fwd, mut back) = (Some((x, y)), Some((x, y)));
    for _ in 0..depth {
        fwd = fwd.and_then(|p| step(p, 1));
        back = back.and_then(|p| step(p, -1));
        if fwd.is_none() && back.is_none() {
            break;
        }
        out.extend(fwd);
        out.extend(back);
    }
    out
}

/// The first normalized certificate for the pair `(a, b)`.
pub fn certificate(a: Prime, b: Prime, cfg: &SolverConfig) -> Result<AlphaCertificate> {
    let mut found = certificates(a, b, cfg, 1)?;
    Ok(found.remove(0))
}

/// Up to `count` distinct normalized certificates for `(a, b)`, taken from
/// successive primitive solutions.
///
/// Errors only when none is found.
pub fn certificates(a: Prime, b: Prime, cfg: &SolverConfig, count: usize) -> Result<Vec<AlphaCertificate>> {
    let mut out: Vec<AlphaCertificate> = Vec::new();
    if a == b && a.get() % 8 == 1 {
        out.push(normalize(solve_legendre_eq(a, b, cfg)?, a, b, cfg)?);
    }
    let mut sols = Solutions::new(a, b, cfg.bound_cap);
    while out.len() < count {
        let Some(sol) = sols.next() else { break };
        // y odd cannot be repaired by the orbit when b is odd
        if b.is_odd() && sol.1 % 2 != 0 {
            continue;
        }
        match normalize(sol, a, b, cfg) {
            Ok(cert) if !out.iter().any(|c| c.alpha == cert.alpha) => out.push(cert),
            Ok(_) | Err(Error::NormalizationFailed { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        if sols.overflowed() {
            return Err(Error::Capacity(format!("search for ({a}, {b}) left 64-bit range")));
        }
        return Err(Error::SearchExhausted { a: a.get(), b: b.get(), cap: cfg.bound_cap });
    }
    Ok(out)
}

/// Certificate for the swapped pair `(b, a)`.
///
/// `Tr(alpha) + 2 sqrt(N(alpha)) = 2 (x + z sqrt b)`, whose primitive part is
/// `(x, z, y)`.
pub fn conjugate_trace_swap(cert: &AlphaCertificate) -> Result<AlphaCertificate> {
    if !cert.b.is_odd() {
        return Err(Error::Unsupported("swapping into Q(sqrt 2) is not supported".into()));
    }
    let (x, y, z) = cert.triple();
    let swapped = AlphaCertificate {
        a: cert.b,
        b: cert.a,
        alpha: QuadInt::new(x, z.abs(), cert.b),
        z: y.abs(),
        provenance: Provenance::ConjugateTraceSwap,
    };
    swapped.validate()?;
    Ok(swapped)
}
