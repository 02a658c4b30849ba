//! Enumeration of admissible prime sets.

use crate::error::{Error, Result};
use crate::modarith::{is_prime, legendre, Prime};
use crate::presentation::{gst_admissible, PrimeSet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchQuery {
    pub count: usize,
    /// Residue of every odd prime mod 16, either 1 or 9.
    pub mod16: u64,
    pub max: u64,
    /// When set (only 5 is meaningful), attach the least companion `q` with
    /// this residue mod 8 that passes the quotient conditions.
    pub decomposed_mod8: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    /// Odd primes, increasing.
    pub primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Odd primes reordered so the prime inert for `q` is last.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<u64>>,
}

fn residue_ok(a: u64, b: u64) -> bool {
    legendre(a as i64, Prime::new(b).expect("candidate is prime")).expect("odd prime") == 1
}

/// Lazily enumerate sets in lexicographic order of their increasing prime lists.
pub struct Search {
    query: SearchQuery,
    candidates: Vec<u64>,
    companions: Vec<u64>,
    /// Indices into `candidates` of the current partial set.
    stack: Vec<usize>,
    next_start: usize,
    done: bool,
}

impl Search {
    pub fn new(query: SearchQuery) -> Result<Self> {
        if query.mod16 != 1 && query.mod16 != 9 {
            return Err(Error::Domain(format!("residue {} mod 16 must be 1 or 9", query.mod16)));
        }
        if query.count == 0 {
            return Err(Error::Domain("count must be at least 1".into()));
        }
        if query.max >= crate::modarith::MAX_MODULUS {
            return Err(Error::Capacity(format!("bound {} is too large", query.max)));
        }
        let primes_to = |r: u64, m: u64| -> Vec<u64> {
            (r..=query.max).step_by(m as usize).filter(|&p| is_prime(p).unwrap_or(false)).collect()
        };
        let candidates = primes_to(query.mod16, 16);
        let companions = match query.decomposed_mod8 {
            None => Vec::new(),
            Some(r) if r < 8 => primes_to(r, 8),
            Some(r) => return Err(Error::Domain(format!("residue {r} mod 8 must be below 8"))),
        };
        Ok(Search { query, candidates, companions, stack: Vec::new(), next_start: 0, done: false })
    }

    fn compatible(&self, c: usize) -> bool {
        let p = self.candidates[c];
        self.stack.iter().all(|&s| residue_ok(self.candidates[s], p))
    }

    /// Advance to the next full set of indices.
    fn advance(&mut self) -> Option<Vec<u64>> {
        while !self.done {
            let mut placed = false;
            for c in self.next_start..self.candidates.len() {
                if self.compatible(c) {
                    self.stack.push(c);
                    self.next_start = c + 1;
                    placed = true;
                    break;
                }
            }
            if placed && self.stack.len() == self.query.count {
                let set = self.stack.iter().map(|&i| self.candidates[i]).collect();
                self.next_start = self.stack.pop().expect("nonempty") + 1;
                return Some(set);
            }
            if !placed {
                match self.stack.pop() {
                    Some(last) => self.next_start = last + 1,
                    None => self.done = true,
                }
            }
        }
        None
    }

    fn companion(&self, primes: &[u64]) -> Option<(u64, Vec<u64>)> {
        let set = PrimeSet::new(primes.to_vec()).ok()?;
        self.companions.iter().find_map(|&q| {
            let v = gst_admissible(&set, q).ok()?;
            v.ordered.map(|o| (q, o.odd_primes().to_vec()))
        })
    }
}

impl Iterator for Search {
    type Item = SearchHit;

    fn next(&mut self) -> Option<SearchHit> {
        loop {
            let primes = self.advance()?;
            if self.query.decomposed_mod8.is_none() {
                return Some(SearchHit { primes, q: None, ordering: None });
            }
            if let Some((q, ordering)) = self.companion(&primes) {
                return Some(SearchHit { primes, q: Some(q), ordering: Some(ordering) });
            }
        }
    }
}

pub fn search(query: SearchQuery) -> Result<Search> {
    Search::new(query)
}
