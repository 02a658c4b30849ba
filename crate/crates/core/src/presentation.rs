//! Prime sets, linking numbers and the Koch presentation of `G_S(2)`, plus
//! the quotient data used for `G_S^T(2)`.

use crate::error::{Error, Result};
use crate::magnus::GroupWord;
use crate::modarith::{legendre, Prime};
use serde::{Deserialize, Serialize};

/// `S = {2, l_1, ..., l_n}` with an optional decomposition prime `q`.
///
/// Index 0 always denotes 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSet {
    odd: Vec<u64>,
    q: Option<u64>,
}

impl PrimeSet {
    /// Build from the odd primes `l_1, ..., l_n` in order.
    pub fn new(odd: Vec<u64>) -> Result<Self> {
        if odd.is_empty() {
            return Err(Error::Domain("a prime set needs at least one odd prime".into()));
        }
        for (n, &l) in odd.iter().enumerate() {
            let p = Prime::new(l)?;
            if !p.is_odd() {
                return Err(Error::Domain("2 is implicit and cannot be listed among the odd primes".into()));
            }
            if odd[..n].contains(&l) {
                return Err(Error::Domain(format!("{l} is listed twice")));
            }
        }
        Ok(PrimeSet { odd, q: None })
    }

    /// Build from a full list that may include 2.
    pub fn from_list(list: &[u64]) -> Result<Self> {
        let twos = list.iter().filter(|&&v| v == 2).count();
        if twos > 1 {
            return Err(Error::Domain("2 is listed twice".into()));
        }
        Self::new(list.iter().copied().filter(|&v| v != 2).collect())
    }

    /// Attach `q`, reordering so the prime with `(q / l) = -1` comes last.
    pub fn with_q(self, q: u64) -> Result<Self> {
        let verdict = gst_admissible(&self, q)?;
        verdict
            .ordered
            .ok_or_else(|| Error::Inadmissible(verdict.diagnostic.unwrap_or_default()))
    }

    pub fn n(&self) -> usize {
        self.odd.len()
    }

    pub fn q(&self) -> Option<u64> {
        self.q
    }

    /// `l_i` for `0 <= i <= n`.
    pub fn l(&self, i: usize) -> u64 {
        if i == 0 {
            2
        } else {
            self.odd[i - 1]
        }
    }

    pub fn odd_primes(&self) -> &[u64] {
        &self.odd
    }

    /// `[2, l_1, ..., l_n]`.
    pub fn primes(&self) -> Vec<u64> {
        std::iter::once(2).chain(self.odd.iter().copied()).collect()
    }

    fn prime(&self, i: usize) -> Prime {
        Prime::new(self.l(i)).expect("validated on construction")
    }
}

/// Linking numbers over F_2, with index 0 standing for the prime 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingData {
    n: usize,
    /// `a[i][j]` for `1 <= i, j <= n` (diagonal unused).
    a: Vec<Vec<u8>>,
    a0: Vec<u8>,
    atilde0: Vec<u8>,
    /// `aprime[i][j]` for `1 <= i <= n`, `0 <= j <= n`.
    aprime: Vec<Vec<u8>>,
}

impl LinkingData {
    pub fn a(&self, i: usize, j: usize) -> u8 {
        if j == 0 {
            self.a0[i]
        } else {
            self.a[i][j]
        }
    }

    pub fn atilde0(&self, i: usize) -> u8 {
        self.atilde0[i]
    }

    pub fn aprime(&self, i: usize, j: usize) -> u8 {
        self.aprime[i][j]
    }

    pub fn aprime_is_zero(&self) -> bool {
        (1..=self.n).all(|i| (0..=self.n).all(|j| i == j || self.aprime[i][j] == 0))
    }
}

pub fn linking_data(s: &PrimeSet) -> LinkingData {
    let n = s.n();
    let mut a = vec![vec![0u8; n + 1]; n + 1];
    let mut a0 = vec![0u8; n + 1];
    let mut atilde0 = vec![0u8; n + 1];
    for i in 1..=n {
        let li = s.l(i);
        a0[i] = matches!(li % 8, 3 | 5) as u8;
        atilde0[i] = matches!(li % 8, 3 | 7) as u8;
        for j in 1..=n {
            if i != j {
                a[i][j] = (legendre(li as i64, s.prime(j)).expect("odd prime") == -1) as u8;
            }
        }
    }
    let mut aprime = vec![vec![0u8; n + 1]; n + 1];
    for i in 1..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let base = if j == 0 { a0[i] } else { a[i][j] };
            aprime[i][j] = if j > 0 && s.l(j) % 4 == 3 { base ^ atilde0[i] } else { base };
        }
    }
    LinkingData { n, a, a0, atilde0, aprime }
}

/// Koch relators `r_i = x_i^(l_i - 1) prod_{j != i} [x_i, x_j]^(a'_{ij})`
/// modulo the third filtration step, over generators `x_0, ..., x_n`.
pub fn koch_relators(s: &PrimeSet) -> Vec<GroupWord> {
    let link = linking_data(s);
    (1..=s.n())
        .map(|i| {
            let mut w = GroupWord::gen_pow(i, s.l(i) as i64 - 1);
            for j in 0..=s.n() {
                if j != i && link.aprime(i, j) == 1 {
                    w = w.mul(GroupWord::commutator(GroupWord::gen(i), GroupWord::gen(j)));
                }
            }
            w
        })
        .collect()
}

/// Whether every relator lies in the third filtration step.
pub fn zassenhaus_ge3(s: &PrimeSet) -> bool {
    let odd = s.odd_primes();
    odd.iter().all(|&l| l % 8 == 1)
        && odd.iter().enumerate().all(|(n, &li)| {
            odd[n + 1..].iter().all(|&lj| {
                legendre(li as i64, Prime::new(lj).expect("validated")).expect("odd prime") == 1
            })
        })
}

/// The same verdict read off the Koch relators' Magnus expansions.
pub fn zassenhaus_ge3_via_magnus(s: &PrimeSet) -> Result<bool> {
    let d = s.n() + 1;
    for r in koch_relators(s) {
        if let Some(l) = crate::magnus::filtration_degree(&r, d, 2)? {
            if l < 3 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Generator and relation ranks `(n + 1, n)`.
pub fn ranks(s: &PrimeSet) -> (usize, usize) {
    (s.n() + 1, s.n())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GstVerdict {
    pub ok: bool,
    /// The prime with `(q / l) = -1`, which becomes `l_n`.
    pub designated: Option<u64>,
    /// `S` reordered so the designated prime is last; the others keep their order.
    pub ordered: Option<PrimeSet>,
    pub diagnostic: Option<String>,
}

/// Check that `q = 5 mod 8` is inert in exactly one `Q(sqrt l_i)`.
pub fn gst_admissible(s: &PrimeSet, q: u64) -> Result<GstVerdict> {
    let fail = |msg: String| {
        Ok(GstVerdict { ok: false, designated: None, ordered: None, diagnostic: Some(msg) })
    };
    if !zassenhaus_ge3(s) {
        return Err(Error::Inadmissible("S does not satisfy the degree-3 conditions".into()));
    }
    if let Err(e) = Prime::new(q) {
        return fail(format!("q = {q}: {e}"));
    }
    if q == 2 || s.odd_primes().contains(&q) {
        return fail(format!("q = {q} lies in S"));
    }
    if q % 8 != 5 {
        return fail(format!("q = {q} is not 5 mod 8"));
    }
    let inert: Vec<u64> = s
        .odd_primes()
        .iter()
        .copied()
        .filter(|&l| legendre(q as i64, Prime::new(l).expect("validated")).expect("odd") == -1)
        .collect();
    if inert.len() != 1 {
        return fail(format!("(q/l) = -1 for {} primes of S, expected exactly one", inert.len()));
    }
    let designated = inert[0];
    let mut odd: Vec<u64> = s.odd_primes().iter().copied().filter(|&l| l != designated).collect();
    odd.push(designated);
    Ok(GstVerdict {
        ok: true,
        designated: Some(designated),
        ordered: Some(PrimeSet { odd, q: Some(q) }),
        diagnostic: None,
    })
}

/// Quotient presentation data for `G_S^T(2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GstPresentation {
    /// `S` ordered with the designated prime last and `q` attached.
    pub set: PrimeSet,
    pub q: u64,
    /// Generators `x̄_1, ..., x̄_n`.
    pub generators: usize,
    /// Images of the Koch relators with `x_0` replaced by `x̄_n`.
    pub relators: Vec<GroupWord>,
}

impl GstPresentation {
    pub fn n(&self) -> usize {
        self.generators
    }

    /// Base characters whose sum is the inflation of `χ̄_i`.
    pub fn inflation(&self, i: usize) -> Vec<usize> {
        assert!((1..=self.generators).contains(&i), "character index {i} out of range");
        if i == self.generators {
            vec![0, i]
        } else {
            vec![i]
        }
    }
}

pub fn gst_presentation_data(s: &PrimeSet, q: u64) -> Result<GstPresentation> {
    let verdict = gst_admissible(s, q)?;
    let set = verdict
        .ordered
        .ok_or_else(|| Error::Inadmissible(verdict.diagnostic.unwrap_or_default()))?;
    let n = set.n();
    let relators = koch_relators(&set)
        .iter()
        .map(|r| r.map_generators(&|g| if g == 0 { n } else { g }))
        .collect();
    Ok(GstPresentation { set, q, generators: n, relators })
}
