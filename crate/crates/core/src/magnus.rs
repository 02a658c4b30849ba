//! Truncated mod-2 Magnus expansion of free-group words.
//!
//! A word is sent into `F_2<<X_0, ..., X_{d-1}>>` by `x_i -> 1 + X_i` and the
//! result is kept up to total degree `D`.

use crate::error::{Error, Result};
use crate::massey::MasseyTensor;
use std::fmt;

pub const DEFAULT_DEGREE: usize = 4;

/// Largest number of coefficients allowed in a single degree level.
const MAX_LEVEL_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    d: usize,
    degree: usize,
    /// `levels[len][index]`, where `index` reads the multi-index in base `d`.
    levels: Vec<Vec<bool>>,
}

impl TruncatedSeries {
    pub fn zero(d: usize, degree: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("a series needs at least one indeterminate".into()));
        }
        let mut levels = Vec::with_capacity(degree + 1);
        for len in 0..=degree {
            let size = u32::try_from(len)
                .ok()
                .and_then(|l| d.checked_pow(l))
                .filter(|&s| s <= MAX_LEVEL_SIZE)
                .ok_or_else(|| Error::Capacity(format!("{d} indeterminates at degree {degree}")))?;
            levels.push(vec![false; size]);
        }
        Ok(TruncatedSeries { d, degree, levels })
    }

    pub fn one(d: usize, degree: usize) -> Result<Self> {
        let mut s = Self::zero(d, degree)?;
        s.levels[0][0] = true;
        Ok(s)
    }

    /// `1 + X_i`.
    pub fn generator(i: usize, d: usize, degree: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::Domain(format!("generator {i} out of range for {d} indeterminates")));
        }
        let mut s = Self::one(d, degree)?;
        if degree >= 1 {
            s.levels[1][i] = true;
        }
        Ok(s)
    }

    pub fn indeterminates(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn check_shape(&self, other: &Self) {
        assert_eq!((self.d, self.degree), (other.d, other.degree), "series shapes differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = self.clone();
        for (lo, li) in out.levels.iter_mut().zip(&other.levels) {
            for (a, b) in lo.iter_mut().zip(li) {
                *a ^= *b;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = Self::zero(self.d, self.degree).expect("shape already validated");
        for l1 in 0..=self.degree {
            let left: Vec<usize> = ones(&self.levels[l1]);
            if left.is_empty() {
                continue;
            }
            for l2 in 0..=self.degree - l1 {
                let stride = other.levels[l2].len();
                for j in ones(&other.levels[l2]) {
                    for &i in &left {
                        out.levels[l1 + l2][i * stride + j] ^= true;
                    }
                }
            }
        }
        out
    }

    pub fn constant(&self) -> bool {
        self.levels[0][0]
    }

    /// `self^e` for a series with constant term 1.
    ///
    /// Writing `self = 1 + A`, uses `(1 + A)^e = sum C(e, k) A^k` with binomial
    /// parities from Lucas' theorem; negative exponents use
    /// `C(-n, k) = ±C(n + k - 1, k)`.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if !self.constant() {
            return Err(Error::Domain("only series with constant term 1 can be raised to powers".into()));
        }
        let mut a = self.clone();
        a.levels[0][0] = false;
        let mut out = Self::one(self.d, self.degree)?;
        let mut a_pow = Self::one(self.d, self.degree)?;
        for k in 1..=self.degree as u64 {
            a_pow = a_pow.mul(&a);
            let odd = if e >= 0 {
                binomial_odd(e as u64, k)
            } else {
                let n = e.unsigned_abs();
                binomial_odd(n + k - 1, k)
            };
            if odd {
                out = out.add(&a_pow);
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.pow(-1)
    }

    fn index_of(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() > self.degree {
            return Err(Error::Truncation { len: multi.len(), degree: self.degree });
        }
        let mut idx = 0usize;
        for &i in multi {
            if i >= self.d {
                return Err(Error::Domain(format!("index {i} out of range for {} indeterminates", self.d)));
            }
            idx = idx * self.d + i;
        }
        Ok(idx)
    }

    /// Coefficient of `X_I`.
    pub fn coefficient(&self, multi: &[usize]) -> Result<bool> {
        let idx = self.index_of(multi)?;
        Ok(self.levels[multi.len()][idx])
    }

    pub fn set_coefficient(&mut self, multi: &[usize], value: bool) -> Result<()> {
        let idx = self.index_of(multi)?;
        self.levels[multi.len()][idx] = value;
        Ok(())
    }

    /// Multi-indices of length `len` with coefficient 1, in lexicographic order.
    pub fn support(&self, len: usize) -> Vec<Vec<usize>> {
        if len > self.degree {
            return Vec::new();
        }
        ones(&self.levels[len]).into_iter().map(|idx| decode(idx, self.d, len)).collect()
    }

    /// Least positive degree carrying a nonzero coefficient.
    pub fn lowest_degree(&self) -> Option<usize> {
        (1..=self.degree).find(|&l| self.levels[l].iter().any(|&b| b))
    }

    pub fn is_one(&self) -> bool {
        self.constant() && self.lowest_degree().is_none()
    }
}

fn ones(bits: &[bool]) -> Vec<usize> {
    bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

fn decode(mut idx: usize, d: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

/// Parity of `C(n, k)` by Lucas' theorem.
pub fn binomial_odd(n: u64, k: u64) -> bool {
    k <= n && (k & n) == k
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Gen(usize),
    Comm(GroupWord, GroupWord),
    Group(GroupWord),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub base: Base,
    pub exp: i64,
}

/// A product of powers of generators, commutators and bracketed subwords.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupWord(pub Vec<Factor>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Self::gen_pow(i, 1)
    }

    pub fn gen_pow(i: usize, exp: i64) -> Self {
        Self::factor(Base::Gen(i), exp)
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(u: GroupWord, v: GroupWord) -> Self {
        Self::factor(Base::Comm(u, v), 1)
    }

    pub fn pow(self, exp: i64) -> Self {
        if exp == 1 {
            return self;
        }
        match self.0.as_slice() {
            [single] if exp != 0 => Self::factor(single.base.clone(), single.exp * exp),
            _ => Self::factor(Base::Group(self), exp),
        }
    }

    fn factor(base: Base, exp: i64) -> Self {
        if exp == 0 {
            GroupWord::identity()
        } else {
            GroupWord(vec![Factor { base, exp }])
        }
    }

    pub fn mul(mut self, other: GroupWord) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index mentioned, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0
            .iter()
            .filter_map(|f| match &f.base {
                Base::Gen(i) => Some(*i),
                Base::Comm(u, v) => u.max_generator().max(v.max_generator()),
                Base::Group(w) => w.max_generator(),
            })
            .max()
    }

    /// Replace every generator `i` by `f(i)`.
    pub fn map_generators(&self, f: &impl Fn(usize) -> usize) -> GroupWord {
        GroupWord(
            self.0
                .iter()
                .map(|fac| Factor {
                    base: match &fac.base {
                        Base::Gen(i) => Base::Gen(f(*i)),
                        Base::Comm(u, v) => Base::Comm(u.map_generators(f), v.map_generators(f)),
                        Base::Group(w) => Base::Group(w.map_generators(f)),
                    },
                    exp: fac.exp,
                })
                .collect(),
        )
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, fac) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            match &fac.base {
                Base::Gen(i) => write!(f, "x{i}")?,
                Base::Comm(u, v) => write!(f, "[{u}, {v}]")?,
                Base::Group(w) => write!(f, "({w})")?,
            }
            if fac.exp != 1 {
                write!(f, "^{}", fac.exp)?;
            }
        }
        Ok(())
    }
}

/// Magnus expansion of `w` in `d` indeterminates, truncated at degree `degree`.
pub fn expand(w: &GroupWord, d: usize, degree: usize) -> Result<TruncatedSeries> {
    let mut out = TruncatedSeries::one(d, degree)?;
    for fac in &w.0 {
        let base = match &fac.base {
            Base::Gen(i) => TruncatedSeries::generator(*i, d, degree)?,
            Base::Comm(u, v) => {
                let (su, sv) = (expand(u, d, degree)?, expand(v, d, degree)?);
                su.inverse()?.mul(&sv.inverse()?).mul(&su).mul(&sv)
            }
            Base::Group(inner) => expand(inner, d, degree)?,
        };
        out = out.mul(&base.pow(fac.exp)?);
    }
    Ok(out)
}

/// The coefficient `epsilon_I(w)`.
pub fn epsilon(w: &GroupWord, multi: &[usize], d: usize, degree: usize) -> Result<bool> {
    if multi.len() > degree {
        return Err(Error::Truncation { len: multi.len(), degree });
    }
    expand(w, d, degree)?.coefficient(multi)
}

/// Least `|I|` with `epsilon_I(w) = 1`; `None` means beyond the truncation.
pub fn filtration_degree(w: &GroupWord, d: usize, degree: usize) -> Result<Option<usize>> {
    Ok(expand(w, d, degree)?.lowest_degree())
}

/// The left-normed commutator `[[x_a, x_b], x_c]` with `a < b`, `c <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HallCommutator {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl HallCommutator {
    pub fn word(&self) -> GroupWord {
        GroupWord::commutator(
            GroupWord::commutator(GroupWord::gen(self.a), GroupWord::gen(self.b)),
            GroupWord::gen(self.c),
        )
    }
}

impl fmt::Display for HallCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[x{}, x{}], x{}]", self.a, self.b, self.c)
    }
}

/// Degree-3 basic commutators on `labels`, sorted by `(a, b, c)`.
pub fn hall_basis_3(labels: &[usize]) -> Vec<HallCommutator> {
    let mut out = Vec::new();
    for &a in labels {
        for &b in labels {
            for &c in labels {
                if a < b && c <= b {
                    out.push(HallCommutator { a, b, c });
                }
            }
        }
    }
    out.sort();
    out
}

/// Degree-3 coefficients `epsilon_{(i,j,k)}` over the generators `labels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeThreeTable {
    labels: Vec<usize>,
    d: usize,
    bits: Vec<bool>,
}

impl DegreeThreeTable {
    pub fn new(labels: Vec<usize>) -> Self {
        let d = labels.iter().max().map_or(1, |m| m + 1);
        DegreeThreeTable { labels, d, bits: vec![false; d * d * d] }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.d + j) * self.d + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: bool) {
        let idx = self.idx(i, j, k);
        self.bits[idx] = v;
    }

    /// `epsilon_{(i,j,k)}(r_m) = tr_{r_m}<chi_i, chi_j, chi_k>` (signs vanish mod 2).
    pub fn from_tensor(t: &MasseyTensor, m: usize) -> Self {
        let labels: Vec<usize> = t.labels().collect();
        let mut table = DegreeThreeTable::new(labels.clone());
        for &i in &labels {
            for &j in &labels {
                for &k in &labels {
                    table.set(i, j, k, t.get(m, i, j, k) == 1);
                }
            }
        }
        table
    }

    /// Degree-3 part of a series that lies in the third filtration step.
    pub fn from_series(s: &TruncatedSeries, labels: Vec<usize>) -> Result<Self> {
        if s.degree() < 3 {
            return Err(Error::Truncation { len: 3, degree: s.degree() });
        }
        if matches!(s.lowest_degree(), Some(l) if l < 3) {
            return Err(Error::Domain("series has terms of degree below 3".into()));
        }
        let mut table = DegreeThreeTable::new(labels);
        if s.indeterminates() < table.d {
            return Err(Error::Domain("series has fewer indeterminates than labels".into()));
        }
        for idx in s.support(3) {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            if !(table.labels.contains(&i) && table.labels.contains(&j) && table.labels.contains(&k)) {
                return Err(Error::Domain(format!("coefficient X{i}X{j}X{k} outside the label set")));
            }
            table.set(i, j, k, true);
        }
        Ok(table)
    }

    fn as_vector(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.bits.len().div_ceil(64)];
        for (n, &b) in self.bits.iter().enumerate() {
            if b {
                v[n / 64] |= 1 << (n % 64);
            }
        }
        v
    }
}

/// Express a degree-3 table as a product of basic commutators modulo the
/// fourth filtration step.
pub fn express_mod_f4(table: &DegreeThreeTable) -> Result<Vec<HallCommutator>> {
    let basis = hall_basis_3(&table.labels);
    if basis.len() > 128 {
        return Err(Error::Capacity(format!("{} basic commutators exceed the solver width", basis.len())));
    }
    // rows: (degree-3 coefficient vector, combination of basis elements)
    let mut rows: Vec<(Vec<u64>, u128)> = Vec::new();
    for (n, h) in basis.iter().enumerate() {
        let s = expand(&h.word(), table.d, 3)?;
        let t = DegreeThreeTable::from_series(&s, table.labels.clone())?;
        rows.push((t.as_vector(), 1u128 << n));
    }
    let mut pivots: Vec<(usize, Vec<u64>, u128)> = Vec::new();
    for (mut v, mut combo) in rows {
        for (bit, pv, pc) in &pivots {
            if v[bit / 64] >> (bit % 64) & 1 == 1 {
                xor_into(&mut v, pv);
                combo ^= pc;
            }
        }
        if let Some(bit) = first_bit(&v) {
            for (_, pv, pc) in pivots.iter_mut() {
                if pv[bit / 64] >> (bit % 64) & 1 == 1 {
                    xor_into(pv, &v);
                    *pc ^= combo;
                }
            }
            pivots.push((bit, v, combo));
        } else {
            return Err(Error::Internal("basic commutators are linearly dependent".into()));
        }
    }
    let mut target = table.as_vector();
    let mut combo = 0u128;
    for (bit, pv, pc) in &pivots {
        if target[bit / 64] >> (bit % 64) & 1 == 1 {
            xor_into(&mut target, pv);
            combo ^= pc;
        }
    }
    if let Some(bit) = first_bit(&target) {
        let idx = decode(bit, table.d, 3);
        return Err(Error::Inconsistent(format!(
            "coefficient of X{}X{}X{} is outside the span of basic commutators",
            idx[0], idx[1], idx[2]
        )));
    }
    Ok(basis.into_iter().enumerate().filter(|(n, _)| combo >> n & 1 == 1).map(|(_, h)| h).collect())
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, w)| **w != 0).map(|(n, w)| n * 64 + w.trailing_zeros() as usize)
}

pub fn commutator_product(word: &[HallCommutator]) -> GroupWord {
    word.iter().fold(GroupWord::identity(), |acc, h| acc.mul(h.word()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub word: Vec<HallCommutator>,
    pub matches: bool,
}

/// Read relator `m`'s degree-3 coefficients off the tensor, express them in
/// basic commutators, re-expand, and compare.
pub fn tensor_roundtrip(t: &MasseyTensor, m: usize) -> Result<RoundTrip> {
    let table = DegreeThreeTable::from_tensor(t, m);
    let word = express_mod_f4(&table)?;
    let series = expand(&commutator_product(&word), table.d, 3)?;
    let again = DegreeThreeTable::from_series(&series, table.labels.clone())?;
    Ok(RoundTrip { matches: again == table, word })
}
