//! Triple Massey product trace tensors and the mildness criterion.

use crate::error::{Error, Result};
use crate::gf2::{rank, subspaces, Echelon};
use crate::presentation::{gst_presentation_data, zassenhaus_ge3, GstPresentation, PrimeSet};
use crate::redei::{Realness, SymbolSource};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `entry(m, i, j, k) = tr_{r_m}<chi_i, chi_j, chi_k>` over F_2.
///
/// Relators are labelled `1..=n`; characters are labelled
/// `base..base + gens`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasseyTensor {
    n: usize,
    base: usize,
    gens: usize,
    data: Vec<u8>,
}

impl MasseyTensor {
    pub fn zero(n: usize, base: usize, gens: usize) -> Self {
        MasseyTensor { n, base, gens, data: vec![0; n * gens * gens * gens] }
    }

    /// Relator count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Dimension of the character space.
    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn labels(&self) -> std::ops::Range<usize> {
        self.base..self.base + self.gens
    }

    fn idx(&self, m: usize, i: usize, j: usize, k: usize) -> usize {
        assert!((1..=self.n).contains(&m), "relator {m} out of range 1..={}", self.n);
        for t in [i, j, k] {
            assert!(self.labels().contains(&t), "character {t} out of range {:?}", self.labels());
        }
        let g = self.gens;
        (((m - 1) * g + (i - self.base)) * g + (j - self.base)) * g + (k - self.base)
    }

    /// Panics when an index lies outside the tensor's box.
    pub fn get(&self, m: usize, i: usize, j: usize, k: usize) -> u8 {
        self.data[self.idx(m, i, j, k)]
    }

    pub fn set(&mut self, m: usize, i: usize, j: usize, k: usize, v: u8) {
        let idx = self.idx(m, i, j, k);
        self.data[idx] = v & 1;
    }

    /// Trace vector over relators, bit `m - 1` for `r_m`.
    pub fn trace(&self, i: usize, j: usize, k: usize) -> u32 {
        (1..=self.n).fold(0, |acc, m| acc | (self.get(m, i, j, k) as u32) << (m - 1))
    }

    /// Nonzero `(i, j, k)` for relator `m`, sorted.
    pub fn support(&self, m: usize) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for i in self.labels() {
            for j in self.labels() {
                for k in self.labels() {
                    if self.get(m, i, j, k) == 1 {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }

    /// All nonzero `(m, i, j, k)`, sorted.
    pub fn entries(&self) -> Vec<[usize; 4]> {
        (1..=self.n)
            .flat_map(|m| self.support(m).into_iter().map(move |[i, j, k]| [m, i, j, k]))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// `(m, a, b, c)` where `entry(m,a,b,c) + entry(m,b,a,c) + entry(m,b,c,a) != 0`.
    pub fn shuffle_violations(&self) -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for m in 1..=self.n {
            for a in self.labels() {
                for b in self.labels() {
                    for c in self.labels() {
                        if self.get(m, a, b, c) ^ self.get(m, b, a, c) ^ self.get(m, b, c, a) != 0 {
                            out.push([m, a, b, c]);
                        }
                    }
                }
            }
        }
        out
    }

    fn check_shuffle(&self) -> Result<()> {
        match self.shuffle_violations().first() {
            None => Ok(()),
            Some([m, a, b, c]) => Err(Error::Internal(format!(
                "shuffle identity fails at m = {m}, (a, b, c) = ({a}, {b}, {c})"
            ))),
        }
    }
}

/// How pairs that are not certified totally real are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealnessPolicy {
    /// Refuse to build the tensor.
    #[default]
    Strict,
    /// Build it anyway and list the pairs.
    Annotate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltTensor {
    pub tensor: MasseyTensor,
    /// Every consulted symbol, keyed by the query as consulted.
    pub symbols: BTreeMap<[u64; 3], i8>,
    /// Verdicts for every pair the formulas rely on, keyed `(min, max)`.
    pub realness: BTreeMap<[u64; 2], Realness>,
}

impl BuiltTensor {
    pub fn uncertified_pairs(&self) -> Vec<([u64; 2], Realness)> {
        self.realness.iter().filter(|(_, v)| **v != Realness::True).map(|(k, v)| (*k, *v)).collect()
    }
}

struct Consulter<'a> {
    src: &'a dyn SymbolSource,
    policy: RealnessPolicy,
    symbols: BTreeMap<[u64; 3], i8>,
    realness: BTreeMap<[u64; 2], Realness>,
}

impl Consulter<'_> {
    fn pair(&mut self, a: u64, b: u64) -> Result<()> {
        let key = [a.min(b), a.max(b)];
        if self.realness.contains_key(&key) {
            return Ok(());
        }
        let v = self.src.realness(a, b)?;
        if self.policy == RealnessPolicy::Strict {
            match v {
                Realness::True => {}
                Realness::False => return Err(Error::NotTotallyRealProved(key[0], key[1])),
                Realness::UnknownConstructive => return Err(Error::NotTotallyReal(key[0], key[1])),
            }
        }
        self.realness.insert(key, v);
        Ok(())
    }

    /// `[a, b, c]` as an F_2 exponent, after registering the pairs `(a, b)`
    /// and `(b, c)`.
    fn symbol(&mut self, a: u64, b: u64, c: u64) -> Result<u8> {
        if c == 2 {
            return Err(Error::Internal(format!("consulted [{a}, {b}, 2] with even evaluation slot")));
        }
        self.pair(a, b)?;
        self.pair(b, c)?;
        let v = match self.symbols.get(&[a, b, c]) {
            Some(v) => *v,
            None => {
                let v = self.src.symbol(a, b, c)?;
                self.symbols.insert([a, b, c], v);
                v
            }
        };
        Ok((v == -1) as u8)
    }
}

/// Trace tensor of `G_S(2)` from Rédei symbols.
///
/// `entry(m, i, j, k)` is `[l_i, l_j, l_k]` when `m = k != i`,
/// `[l_j, l_k, l_i]` when `m = i != k`, and 0 otherwise.
pub fn build_tensor(s: &PrimeSet, src: &dyn SymbolSource, policy: RealnessPolicy) -> Result<BuiltTensor> {
    if !zassenhaus_ge3(s) {
        return Err(Error::Inadmissible(
            "every odd prime must be 1 mod 8 with trivial pairwise Legendre symbols".into(),
        ));
    }
    let n = s.n();
    let mut t = MasseyTensor::zero(n, 0, n + 1);
    let mut c = Consulter { src, policy, symbols: BTreeMap::new(), realness: BTreeMap::new() };
    for m in 1..=n {
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let v = if m == k && m != i {
                        c.symbol(s.l(i), s.l(j), s.l(k))?
                    } else if m == i && m != k {
                        c.symbol(s.l(j), s.l(k), s.l(i))?
                    } else {
                        0
                    };
                    t.set(m, i, j, k, v);
                }
            }
        }
    }
    t.check_shuffle()?;
    Ok(BuiltTensor { tensor: t, symbols: c.symbols, realness: c.realness })
}

/// Pull the base tensor back along `χ̄_i -> χ_i` (`i < n`), `χ̄_n -> χ_0 + χ_n`.
pub fn inflate_tensor(t: &MasseyTensor, data: &GstPresentation) -> Result<MasseyTensor> {
    let n = data.n();
    if t.base() != 0 || t.gens() != n + 1 || t.n() != n {
        return Err(Error::Domain("inflation needs the base tensor on characters 0..=n".into()));
    }
    let mut out = MasseyTensor::zero(n, 1, n);
    for m in 1..=n {
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    let mut v = 0;
                    for a in data.inflation(i) {
                        for b in data.inflation(j) {
                            for c in data.inflation(k) {
                                v ^= t.get(m, a, b, c);
                            }
                        }
                    }
                    out.set(m, i, j, k, v);
                }
            }
        }
    }
    out.check_shuffle()?;
    Ok(out)
}

/// A symbol argument in a case-table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    I,
    J,
    K,
    Zero,
    N,
}

#[derive(Debug, Clone, Copy)]
pub struct CaseRow {
    pub condition: &'static str,
    pub applies: fn(usize, usize, usize, usize, usize) -> bool,
    /// Symbols multiplied together; the entry is 1 when the product is -1.
    pub factors: &'static [[Slot; 3]],
}

use Slot::{Zero as Z, I, J, K, N};

/// Rows for `m < n` in their literal form.
pub const LITERAL_ROWS_BELOW_N: [CaseRow; 8] = [
    CaseRow { condition: "m=k, m!=i, i,j!=n", applies: |m, i, j, k, n| m == k && m != i && i != n && j != n, factors: &[[I, J, K]] },
    CaseRow { condition: "m=k, i=n, j!=n", applies: |m, i, j, k, n| m == k && i == n && j != n, factors: &[[I, J, K], [Z, J, K]] },
    CaseRow { condition: "m=k, m!=i, i!=n=j", applies: |m, i, j, k, n| m == k && m != i && i != n && j == n, factors: &[[I, J, K], [Z, J, K]] },
    CaseRow { condition: "m=k, i=j=n", applies: |m, i, j, k, n| m == k && i == n && j == n, factors: &[[I, J, K], [Z, J, K]] },
    CaseRow { condition: "m=k, m!=i, i,j!=n", applies: |m, i, j, k, n| m == k && m != i && i != n && j != n, factors: &[[J, K, I]] },
    CaseRow { condition: "m=i, k=n, j!=n", applies: |m, i, j, k, n| m == i && k == n && j != n, factors: &[[J, K, I], [Z, J, K]] },
    CaseRow { condition: "m=i, m!=k, k!=n=j", applies: |m, i, j, k, n| m == i && m != k && k != n && j == n, factors: &[[J, K, I], [Z, K, I]] },
    CaseRow { condition: "m=i, k=j=n", applies: |m, i, j, k, n| m == i && k == n && j == n, factors: &[[J, K, I], [Z, Z, I]] },
];

/// Rows for `m < n` as they follow from trilinear inflation; rows 3 to 6
/// differ from the literal rows.
pub const CORRECTED_ROWS_BELOW_N: [CaseRow; 8] = [
    LITERAL_ROWS_BELOW_N[0],
    LITERAL_ROWS_BELOW_N[1],
    CaseRow { condition: "m=k, m!=i, i!=n=j", applies: |m, i, j, k, n| m == k && m != i && i != n && j == n, factors: &[[I, J, K], [I, Z, K]] },
    CaseRow { condition: "m=k, i=j=n", applies: |m, i, j, k, n| m == k && i == n && j == n, factors: &[[I, J, K], [Z, Z, K]] },
    CaseRow { condition: "m=i, m!=k, j,k!=n", applies: |m, i, j, k, n| m == i && m != k && j != n && k != n, factors: &[[J, K, I]] },
    CaseRow { condition: "m=i, k=n, j!=n", applies: |m, i, j, k, n| m == i && k == n && j != n, factors: &[[J, K, I], [Z, J, I]] },
    LITERAL_ROWS_BELOW_N[6],
    LITERAL_ROWS_BELOW_N[7],
];

/// Rows for `m = n`.
pub const ROWS_AT_N: [CaseRow; 4] = [
    CaseRow { condition: "k=n, i,j!=n", applies: |_, i, j, k, n| k == n && i != n && j != n, factors: &[[I, J, N]] },
    CaseRow { condition: "k=j=n, i!=n", applies: |_, i, j, k, n| k == n && j == n && i != n, factors: &[[I, J, N], [I, Z, N]] },
    CaseRow { condition: "i=n, k,j!=n", applies: |_, i, j, k, n| i == n && k != n && j != n, factors: &[[J, K, N]] },
    CaseRow { condition: "i=j=n, k!=n", applies: |_, i, j, k, n| i == n && j == n && k != n, factors: &[[J, K, N], [Z, K, N]] },
];

/// Quotient tensor read from case tables (first matching row wins).
pub fn case_table_tensor(
    s: &PrimeSet,
    q: u64,
    src: &dyn SymbolSource,
    policy: RealnessPolicy,
    rows_below_n: &[CaseRow],
) -> Result<BuiltTensor> {
    let data = gst_presentation_data(s, q)?;
    let set = &data.set;
    let n = data.n();
    let mut c = Consulter { src, policy, symbols: BTreeMap::new(), realness: BTreeMap::new() };
    for a in 0..=n {
        for b in 0..=n {
            if a != b {
                c.pair(set.l(a), set.l(b))?;
            }
        }
    }
    let mut t = MasseyTensor::zero(n, 1, n);
    for m in 1..=n {
        let rows: &[CaseRow] = if m < n { rows_below_n } else { &ROWS_AT_N };
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    let Some(row) = rows.iter().find(|r| (r.applies)(m, i, j, k, n)) else {
                        continue;
                    };
                    let mut v = 0;
                    for f in row.factors {
                        let [x, y, z] = f.map(|slot| {
                            set.l(match slot {
                                Slot::I => i,
                                Slot::J => j,
                                Slot::K => k,
                                Slot::Zero => 0,
                                Slot::N => n,
                            })
                        });
                        v ^= c.symbol(x, y, z)?;
                    }
                    t.set(m, i, j, k, v);
                }
            }
        }
    }
    Ok(BuiltTensor { tensor: t, symbols: c.symbols, realness: c.realness })
}

/// Quotient tensor from the corrected case tables.
pub fn gst_case_table_tensor(s: &PrimeSet, q: u64, src: &dyn SymbolSource, policy: RealnessPolicy) -> Result<BuiltTensor> {
    let built = case_table_tensor(s, q, src, policy, &CORRECTED_ROWS_BELOW_N)?;
    built.tensor.check_shuffle()?;
    Ok(built)
}

/// `H^1 = U ⊕ V` with the exponent `e` of the criterion.
///
/// Vectors are bitmasks over the character labels in order (bit 0 is the
/// first label).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub e: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MildVerdict {
    pub condition_a: bool,
    pub condition_b: bool,
    /// Basis triples whose traces span `H^2`, when condition (b) holds.
    pub witness: Vec<[u32; 3]>,
}

impl MildVerdict {
    pub fn holds(&self) -> bool {
        self.condition_a && self.condition_b
    }
}

/// Traces of all triples of vectors, precomputed by trilinearity.
struct TraceCube {
    size: usize,
    cube: Vec<u32>,
}

impl TraceCube {
    fn new(t: &MasseyTensor) -> Self {
        let g = t.gens();
        let size = 1usize << g;
        let label = |b: usize| t.base() + b;
        // w1[i][j][w] = sum over k in w of trace(i, j, k)
        let mut w1 = vec![0u32; g * g * size];
        for i in 0..g {
            for j in 0..g {
                for w in 1..size {
                    let low = w.trailing_zeros() as usize;
                    w1[(i * g + j) * size + w] =
                        w1[(i * g + j) * size + (w & (w - 1))] ^ t.trace(label(i), label(j), label(low));
                }
            }
        }
        let mut w2 = vec![0u32; g * size * size];
        for i in 0..g {
            for v in 1..size {
                let low = v.trailing_zeros() as usize;
                for w in 0..size {
                    w2[(i * size + v) * size + w] = w2[(i * size + (v & (v - 1))) * size + w] ^ w1[(i * g + low) * size + w];
                }
            }
        }
        let mut cube = vec![0u32; size * size * size];
        for u in 1..size {
            let low = u.trailing_zeros() as usize;
            for v in 0..size {
                for w in 0..size {
                    cube[(u * size + v) * size + w] = cube[((u & (u - 1)) * size + v) * size + w] ^ w2[(low * size + v) * size + w];
                }
            }
        }
        TraceCube { size, cube }
    }

    fn get(&self, u: u32, v: u32, w: u32) -> u32 {
        self.cube[(u as usize * self.size + v as usize) * self.size + w as usize]
    }
}

fn check_decomposition(t: &MasseyTensor, d: &Decomposition) -> Result<()> {
    if !(1..=2).contains(&d.e) {
        return Err(Error::Domain(format!("e = {} outside 1..=2", d.e)));
    }
    let g = t.gens();
    if g > 6 {
        return Err(Error::Capacity(format!("character space of dimension {g} exceeds 6")));
    }
    let all: Vec<u32> = d.u.iter().chain(&d.v).copied().collect();
    if all.iter().any(|&x| x >> g != 0) {
        return Err(Error::Domain("decomposition vector outside the character space".into()));
    }
    if all.len() != g || rank(&all) != g {
        return Err(Error::Domain("U and V bases do not form a basis of H^1".into()));
    }
    Ok(())
}

fn certify(cube: &TraceCube, n: usize, d: &Decomposition) -> MildVerdict {
    let e = d.e as usize;
    let tagged: Vec<(u32, bool)> = d.u.iter().map(|&x| (x, false)).chain(d.v.iter().map(|&x| (x, true))).collect();
    let mut condition_a = true;
    'a: for &(x, xv) in &tagged {
        for &(y, yv) in &tagged {
            for &(z, zv) in &tagged {
                let from_v = xv as usize + yv as usize + zv as usize;
                if from_v > 3 - e && cube.get(x, y, z) != 0 {
                    condition_a = false;
                    break 'a;
                }
            }
        }
    }
    let slots: [&[u32]; 3] = match e {
        1 => [&d.u, &d.v, &d.v],
        _ => [&d.u, &d.u, &d.v],
    };
    let mut span = Echelon::new();
    let mut witness = Vec::new();
    'b: for &x in slots[0] {
        for &y in slots[1] {
            for &z in slots[2] {
                if span.insert(cube.get(x, y, z)) {
                    witness.push([x, y, z]);
                    if span.rank() == n {
                        break 'b;
                    }
                }
            }
        }
    }
    let condition_b = span.rank() == n;
    if !condition_b {
        witness.clear();
    }
    MildVerdict { condition_a, condition_b, witness }
}

/// Check the decomposition criterion for triple Massey products.
///
/// (a) traces vanish on basis triples with at least `4 - e` factors from
/// `V`; (b) traces of `U^e ⊗ V^(3-e)` basis triples span `F_2^n`. Basis
/// triples suffice by multilinearity.
pub fn mild_certificate(t: &MasseyTensor, d: &Decomposition) -> Result<MildVerdict> {
    check_decomposition(t, d)?;
    Ok(certify(&TraceCube::new(t), t.n(), d))
}

/// Search all decompositions `U ⊕ V` of the character space and `e ∈ {1, 2}`.
pub fn mild_search(t: &MasseyTensor) -> Result<Option<(Decomposition, MildVerdict)>> {
    let g = t.gens();
    if g > 6 {
        return Err(Error::Capacity(format!("character space of dimension {g} exceeds 6")));
    }
    let n = t.n();
    if t.is_zero() {
        return Ok(None);
    }
    let cube = TraceCube::new(t);
    for e in 1..=2u8 {
        for k in 1..g {
            for u in subspaces(g, k) {
                // complements are graphs of maps from the non-pivot coordinates into U
                let pivots: u32 = u.iter().map(|r| 1 << r.trailing_zeros()).fold(0, |a, b| a | b);
                let free: Vec<u32> = (0..g as u32).filter(|b| pivots >> b & 1 == 0).map(|b| 1 << b).collect();
                let u_span = crate::gf2::span(&u);
                let choices = u_span.len();
                let total = choices.pow(free.len() as u32);
                for code in 0..total {
                    let mut c = code;
                    let v: Vec<u32> = free
                        .iter()
                        .map(|&f| {
                            let shift = u_span[c % choices];
                            c /= choices;
                            f ^ shift
                        })
                        .collect();
                    // (b) cannot hold with fewer than n independent traces available
                    let available = match e {
                        1 => u.len() * v.len() * v.len(),
                        _ => u.len() * u.len() * v.len(),
                    };
                    if available < n {
                        continue;
                    }
                    let d = Decomposition { u: u.clone(), v, e };
                    let verdict = certify(&cube, n, &d);
                    if verdict.holds() {
                        return Ok(Some((d, verdict)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Bit vector over labels `base..base+gens` for a list of labels.
pub fn label_vector(t: &MasseyTensor, labels: &[usize]) -> u32 {
    labels.iter().fold(0, |acc, &l| acc ^ 1 << (l - t.base()))
}
