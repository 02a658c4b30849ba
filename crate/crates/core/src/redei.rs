//! Rédei symbols `[a, b, c]` for entries in `{2} ∪ {p = 1 mod 8}`.

use crate::error::{Error, Result};
use crate::modarith::{legendre, quartic_symbol, Prime};
use crate::quadfield::{residue_symbol, residue_symbol_2adic, residue_symbol_ramified, SplitPrime};
use crate::ternary::{certificates, AlphaCertificate, SolverConfig, TWO_ADIC_PRECISION};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::RwLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub ok: bool,
    pub diagnostic: Option<String>,
}

impl Admissibility {
    fn pass() -> Self {
        Admissibility { ok: true, diagnostic: None }
    }

    fn fail(msg: String) -> Self {
        Admissibility { ok: false, diagnostic: Some(msg) }
    }
}

fn entry_diagnostic(v: u64) -> Option<String> {
    match Prime::new(v) {
        Err(e) => Some(format!("{v}: {e}")),
        Ok(p) if p.is_odd() && v % 8 != 1 => Some(format!("{v} is not 1 mod 8")),
        Ok(_) => None,
    }
}

/// Whether `(a, b, c)` is a valid Rédei symbol query.
///
/// Entries must be 2 or primes `1 mod 8`, distinct odd entries must be
/// quadratic residues of each other, and the three entries must not all be
/// equal.
pub fn admissible(a: u64, b: u64, c: u64) -> Admissibility {
    let entries = [a, b, c];
    for v in entries {
        if let Some(d) = entry_diagnostic(v) {
            return Admissibility::fail(d);
        }
    }
    if a == b && b == c {
        return Admissibility::fail(format!("all three entries equal {a}"));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let (p, q) = (entries[i], entries[j]);
            if p != q && p != 2 && q != 2 {
                let q_prime = Prime::new(q).expect("checked above");
                if legendre(p as i64, q_prime).expect("odd prime") != 1 {
                    return Admissibility::fail(format!("({p}/{q}) = -1"));
                }
            }
        }
    }
    Admissibility::pass()
}

pub(crate) fn admissible_primes(a: u64, b: u64, c: u64) -> Result<[Prime; 3]> {
    let verdict = admissible(a, b, c);
    if !verdict.ok {
        return Err(Error::Inadmissible(verdict.diagnostic.unwrap_or_default()));
    }
    Ok([a, b, c].map(|v| Prime::new(v).expect("admissible entries are prime")))
}

fn check_pair(a: u64, b: u64) -> Result<[Prime; 2]> {
    for v in [a, b] {
        if let Some(d) = entry_diagnostic(v) {
            return Err(Error::Inadmissible(d));
        }
    }
    let (pa, pb) = (Prime::new(a)?, Prime::new(b)?);
    if a != b && pa.is_odd() && pb.is_odd() && legendre(a as i64, pb)? != 1 {
        return Err(Error::Inadmissible(format!("({a}/{b}) = -1")));
    }
    Ok([pa, pb])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realness {
    True,
    False,
    UnknownConstructive,
}

/// How many normalized certificates the constructive test inspects.
const REALNESS_CANDIDATES: usize = 8;

/// Whether the Rédei field of the pair `(a, b)` can be chosen totally real.
pub fn totally_real(a: u64, b: u64, cfg: &SolverConfig) -> Result<Realness> {
    let [pa, pb] = check_pair(a, b)?;
    if a == b {
        return Ok(Realness::True);
    }
    if pa.is_odd() && pb.is_odd() {
        let same = quartic_symbol(a as i64, pb)? == quartic_symbol(b as i64, pa)?;
        return Ok(if same { Realness::True } else { Realness::False });
    }
    let l = if pa.is_odd() { pa } else { pb };
    let found = match certificates(l, Prime::TWO, cfg, REALNESS_CANDIDATES) {
        Ok(certs) => certs.iter().any(|c| c.alpha.x > 0),
        Err(Error::SearchExhausted { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(if found { Realness::True } else { Realness::UnknownConstructive })
}

/// `[l, l, k]` from the quartic residue `(k/l)_4`; shares no code with the
/// certificate route.
pub fn symbol_quartic_oracle(l: u64, k: u64) -> Result<i8> {
    let pl = Prime::new(l)?;
    let pk = Prime::new(k)?;
    if !pl.is_odd() || l % 8 != 1 {
        return Err(Error::Domain(format!("{l} is not a prime 1 mod 8")));
    }
    if pk.is_odd() && legendre(k as i64, pl)? != 1 {
        return Err(Error::Domain(format!("({k}/{l}) != 1")));
    }
    quartic_symbol(k as i64, pl)
}

/// Where a symbol was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Place {
    /// `[2, 2, l]`, read off `l mod 16`.
    ClosedForm,
    /// Degree-1 prime `(q, sqrt(m) - s)` of the radicand's field.
    Split { q: u64, s: u64 },
    /// The ramified prime above the radicand itself.
    Ramified { q: u64 },
    /// The degree-1 prime above 2 (cross-check route only).
    TwoAdic,
}

impl Place {
    pub fn tag(&self) -> &'static str {
        match self {
            Place::ClosedForm => "closed-form",
            Place::Split { .. } => "split-prime",
            Place::Ramified { .. } => "ramified-prime",
            Place::TwoAdic => "two-adic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolEvaluation {
    pub query: [u64; 3],
    /// `(radicand, norm target, evaluation prime)` actually used.
    pub orientation: [u64; 3],
    pub certificate: Option<AlphaCertificate>,
    pub place: Place,
    pub value: i8,
}

/// Orientations usable by the certificate route: odd radicand and odd
/// evaluation prime.
pub fn orientations(a: u64, b: u64, c: u64) -> Vec<[u64; 3]> {
    let perms = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let mut out: Vec<[u64; 3]> = Vec::new();
    for p in perms {
        if p[0] != 2 && p[2] != 2 && !out.contains(&p) {
            out.push(p);
        }
    }
    // prefer an evaluation prime that splits over one that ramifies
    out.sort_by_key(|p| p[0] == p[2]);
    out
}

/// `(alpha | k / p)` for a prime `p` of `Q(sqrt radicand)` above `c`.
///
/// Split primes try the smaller root first and fall back to the other when
/// `alpha` reduces to zero.
pub fn evaluate_certificate(cert: &AlphaCertificate, c: Prime) -> Result<(Place, i8)> {
    if c == cert.a {
        let v = residue_symbol_ramified(&cert.alpha)?;
        if v == 0 {
            return Err(Error::Internal(format!("{} vanishes at the prime above {c}", cert.alpha)));
        }
        return Ok((Place::Ramified { q: c.get() }, v));
    }
    for prime in SplitPrime::above(c, cert.a)? {
        let v = residue_symbol(&cert.alpha, &prime)?;
        if v != 0 {
            return Ok((Place::Split { q: c.get(), s: prime.s }, v));
        }
    }
    Err(Error::Internal(format!("{} vanishes at both primes above {c}", cert.alpha)))
}

/// Evaluate at both primes above `c` (when `c` splits), returning every
/// nonzero value obtained.
pub fn evaluate_both_roots(cert: &AlphaCertificate, c: Prime) -> Result<Vec<i8>> {
    if c == cert.a {
        return Ok(vec![evaluate_certificate(cert, c)?.1]);
    }
    let mut out = Vec::new();
    for prime in SplitPrime::above(c, cert.a)? {
        let v = residue_symbol(&cert.alpha, &prime)?;
        if v != 0 {
            out.push(v);
        }
    }
    Ok(out)
}

/// Evaluate `[a, b, c]` without memoization, reporting how.
pub fn evaluate(a: u64, b: u64, c: u64, cfg: &SolverConfig) -> Result<SymbolEvaluation> {
    admissible_primes(a, b, c)?;
    let query = [a, b, c];
    let twos = query.iter().filter(|&&v| v == 2).count();
    if twos == 2 {
        let l = query.into_iter().find(|&v| v != 2).expect("one odd entry");
        let value = if l % 16 == 1 { 1 } else { -1 };
        return Ok(SymbolEvaluation {
            query,
            orientation: [2, 2, l],
            certificate: None,
            place: Place::ClosedForm,
            value,
        });
    }
    let orientation = orientations(a, b, c)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("no odd orientation for {query:?}")))?;
    evaluate_oriented(query, orientation, cfg)
}

fn evaluate_oriented(query: [u64; 3], orientation: [u64; 3], cfg: &SolverConfig) -> Result<SymbolEvaluation> {
    let [r, n, e] = orientation.map(|v| Prime::new(v).expect("admissible"));
    let cert = certificates(r, n, cfg, 1)?.remove(0);
    let (place, value) = evaluate_certificate(&cert, e)?;
    Ok(SymbolEvaluation { query, orientation, certificate: Some(cert), place, value })
}

/// Evaluate `[a, b, c]` along every orientation the certificate route
/// supports.
pub fn evaluate_all_orientations(a: u64, b: u64, c: u64, cfg: &SolverConfig) -> Result<Vec<SymbolEvaluation>> {
    let first = evaluate(a, b, c, cfg)?;
    if first.place == Place::ClosedForm {
        return Ok(vec![first]);
    }
    orientations(a, b, c)
        .into_iter()
        .map(|o| evaluate_oriented([a, b, c], o, cfg))
        .collect()
}

/// `[a, b, 2]` at the degree-1 prime above 2 of `Q(sqrt a)`, for odd `a`, `b`.
pub fn evaluate_2adic(a: u64, b: u64, cfg: &SolverConfig) -> Result<SymbolEvaluation> {
    let [pa, pb, _] = admissible_primes(a, b, 2)?;
    if !pa.is_odd() || !pb.is_odd() {
        return Err(Error::Unsupported("the 2-adic route needs odd a and b".into()));
    }
    let cert = certificates(pa, pb, cfg, 1)?.remove(0);
    let value = residue_symbol_2adic(&cert.alpha, TWO_ADIC_PRECISION)?;
    Ok(SymbolEvaluation {
        query: [a, b, 2],
        orientation: [a, b, 2],
        certificate: Some(cert),
        place: Place::TwoAdic,
        value,
    })
}

/// Values of `[a, b, c]` in its preferred orientation across up to `reps`
/// certificates and both primes above the evaluation prime.
pub fn choice_values(a: u64, b: u64, c: u64, reps: usize, cfg: &SolverConfig) -> Result<Vec<i8>> {
    let first = evaluate(a, b, c, cfg)?;
    if first.place == Place::ClosedForm {
        return Ok(vec![first.value]);
    }
    let [r, n, e] = first.orientation.map(|v| Prime::new(v).expect("admissible"));
    let mut out = Vec::new();
    for cert in certificates(r, n, cfg, reps)? {
        out.extend(evaluate_both_roots(&cert, e)?);
    }
    Ok(out)
}

pub fn redei_symbol(a: u64, b: u64, c: u64, cfg: &SolverConfig) -> Result<i8> {
    Ok(evaluate(a, b, c, cfg)?.value)
}

/// Sorted memo key; sound because the symbol is symmetric.
pub fn sorted_triple(a: u64, b: u64, c: u64) -> [u64; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Supplier of symbol values and pair verdicts for tensor assembly.
pub trait SymbolSource: Sync {
    fn symbol(&self, a: u64, b: u64, c: u64) -> Result<i8>;
    fn realness(&self, a: u64, b: u64) -> Result<Realness>;
}

/// Memoizing symbol engine.
#[derive(Debug, Default)]
pub struct RedeiEngine {
    cfg: SolverConfig,
    memo: RwLock<HashMap<[u64; 3], i8>>,
    realness: RwLock<HashMap<[u64; 2], Realness>>,
}

impl RedeiEngine {
    pub fn new(cfg: SolverConfig) -> Self {
        RedeiEngine { cfg, ..Default::default() }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Insert a known value, e.g. from a persisted cache.
    pub fn seed(&self, a: u64, b: u64, c: u64, value: i8) -> Result<()> {
        admissible_primes(a, b, c)?;
        if value != 1 && value != -1 {
            return Err(Error::Domain(format!("symbol value {value} is not ±1")));
        }
        self.memo.write().expect("memo lock").insert(sorted_triple(a, b, c), value);
        Ok(())
    }

    /// Memoized values in sorted key order.
    pub fn memo_entries(&self) -> Vec<([u64; 3], i8)> {
        let mut v: Vec<_> = self.memo.read().expect("memo lock").iter().map(|(k, v)| (*k, *v)).collect();
        v.sort_unstable();
        v
    }

    pub fn cached(&self, a: u64, b: u64, c: u64) -> Option<i8> {
        self.memo.read().expect("memo lock").get(&sorted_triple(a, b, c)).copied()
    }

    pub fn evaluate(&self, a: u64, b: u64, c: u64) -> Result<SymbolEvaluation> {
        evaluate(a, b, c, &self.cfg)
    }
}

impl SymbolSource for RedeiEngine {
    fn symbol(&self, a: u64, b: u64, c: u64) -> Result<i8> {
        if let Some(v) = self.cached(a, b, c) {
            return Ok(v);
        }
        let key = sorted_triple(a, b, c);
        let v = redei_symbol(key[0], key[1], key[2], &self.cfg)?;
        self.memo.write().expect("memo lock").insert(key, v);
        Ok(v)
    }

    fn realness(&self, a: u64, b: u64) -> Result<Realness> {
        let key = [a.min(b), a.max(b)];
        if let Some(v) = self.realness.read().expect("realness lock").get(&key) {
            return Ok(*v);
        }
        let v = totally_real(key[0], key[1], &self.cfg)?;
        self.realness.write().expect("realness lock").insert(key, v);
        Ok(v)
    }
}
