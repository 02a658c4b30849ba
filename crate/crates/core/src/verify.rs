//! Checks against the reference worked examples.

use crate::error::Result;
use crate::magnus::tensor_roundtrip;
use crate::massey::{build_tensor, gst_case_table_tensor, inflate_tensor, label_vector, mild_certificate, mild_search};
use crate::massey::{Decomposition, MasseyTensor, RealnessPolicy};
use crate::presentation::{gst_presentation_data, GstPresentation, PrimeSet};
use crate::redei::SymbolSource;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const TRIVIAL_LINKING_SET: [u64; 4] = [2, 313, 457, 521];
pub const VANISHING_SET: [u64; 3] = [2, 113, 593];
pub const DECOMPOSED_SET: [u64; 4] = [2, 17, 7489, 15809];
pub const DECOMPOSED_Q: u64 = 5;

/// Index triples `i <= j <= k` over `{2, 313, 457, 521}` whose symbol is -1.
pub const TRIVIAL_LINKING_MINUS_ONE: [[usize; 3]; 10] =
    [[1, 1, 3], [1, 2, 3], [1, 3, 3], [0, 0, 1], [0, 0, 2], [0, 0, 3], [0, 1, 1], [0, 2, 2], [0, 3, 3], [0, 2, 3]];

/// Nonzero `(i, j, k)` for each quotient relator of the decomposed example.
pub const DECOMPOSED_SUPPORT: [&[[usize; 3]]; 3] = [
    &[[1, 1, 3], [1, 2, 3], [1, 3, 2], [1, 3, 3], [2, 3, 1], [3, 1, 1], [3, 2, 1], [3, 3, 1]],
    &[[1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2]],
    &[[1, 1, 3], [1, 2, 3], [2, 1, 3], [3, 1, 1], [3, 1, 2], [3, 2, 1]],
];

/// Basic-commutator forms of the quotient relators modulo degree 4.
pub const DECOMPOSED_RELATORS: [&str; 3] = [
    "[[x1, x3], x1] [[x1, x3], x3] [[x2, x3], x1]",
    "[[x1, x3], x2]",
    "[[x1, x3], x1] [[x1, x3], x2] [[x2, x3], x1]",
];

#[derive(Debug, Clone, Copy)]
pub struct Check {
    pub id: &'static str,
    pub description: &'static str,
    run: fn(&dyn SymbolSource) -> Result<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    pub description: String,
    pub passed: bool,
    /// First divergent datum, or the error that stopped the check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub elapsed_ms: u64,
}

pub const CHECKS: [Check; 6] = [
    Check {
        id: "redei-table",
        description: "symbol table of {2, 313, 457, 521}",
        run: check_symbol_table,
    },
    Check {
        id: "trivial-massey",
        description: "all symbols of {2, 113, 593} are 1 and the tensor vanishes",
        run: check_vanishing,
    },
    Check {
        id: "mild-gs",
        description: "delta pattern and mildness certificate for {2, 313, 457, 521}",
        run: check_trivial_linking_mild,
    },
    Check {
        id: "gst-traces",
        description: "quotient trace supports for {2, 17, 7489, 15809}, q = 5",
        run: check_decomposed_traces,
    },
    Check {
        id: "gst-relators",
        description: "quotient relators in basic commutators modulo degree 4",
        run: check_decomposed_relators,
    },
    Check {
        id: "gst-mild",
        description: "U = <x1>, V = <x2, x3>, e = 1 certifies the quotient",
        run: check_decomposed_mild,
    },
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// Run every check, or only `only`; unknown ids select nothing.
pub fn run_checks(src: &dyn SymbolSource, only: Option<&str>) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .filter(|c| only.map_or(true, |id| id == c.id))
        .map(|c| {
            let start = Instant::now();
            let result = (c.run)(src);
            let (passed, detail) = match result {
                Ok(None) => (true, None),
                Ok(Some(d)) => (false, Some(d)),
                Err(e) => (false, Some(e.to_string())),
            };
            CheckOutcome {
                id: c.id.to_string(),
                description: c.description.to_string(),
                passed,
                detail,
                elapsed_ms: start.elapsed().as_millis() as u64,
            }
        })
        .collect()
}

fn set(list: &[u64]) -> PrimeSet {
    PrimeSet::from_list(list).expect("built-in set is valid")
}

/// Sorted index triples over `0..=n`, excluding the constant ones.
fn index_multisets(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            for k in j..=n {
                if !(i == j && j == k) {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

fn check_symbol_table(src: &dyn SymbolSource) -> Result<Option<String>> {
    let s = set(&TRIVIAL_LINKING_SET);
    for idx in index_multisets(3) {
        let [a, b, c] = idx.map(|i| s.l(i));
        let value = src.symbol(a, b, c)?;
        let expected = if TRIVIAL_LINKING_MINUS_ONE.contains(&idx) { -1 } else { 1 };
        if value != expected {
            return Ok(Some(format!("[{a}, {b}, {c}] = {value}, expected {expected}")));
        }
    }
    Ok(None)
}

fn check_vanishing(src: &dyn SymbolSource) -> Result<Option<String>> {
    let s = set(&VANISHING_SET);
    for idx in index_multisets(2) {
        let [a, b, c] = idx.map(|i| s.l(i));
        let value = src.symbol(a, b, c)?;
        if value != 1 {
            return Ok(Some(format!("[{a}, {b}, {c}] = {value}, expected 1")));
        }
    }
    let t = build_tensor(&s, src, RealnessPolicy::Strict)?.tensor;
    Ok(t.entries().first().map(|[m, i, j, k]| format!("entry ({m}, {i}, {j}, {k}) is nonzero")))
}

fn check_trivial_linking_mild(src: &dyn SymbolSource) -> Result<Option<String>> {
    let t = build_tensor(&set(&TRIVIAL_LINKING_SET), src, RealnessPolicy::Strict)?.tensor;
    for m in 1..=3 {
        for k in 1..=3 {
            let v = t.get(m, 0, 0, k);
            if v != (m == k) as u8 {
                return Ok(Some(format!("entry ({m}, 0, 0, {k}) = {v}")));
            }
        }
    }
    let d = Decomposition { u: vec![label_vector(&t, &[1]), label_vector(&t, &[2]), label_vector(&t, &[3])], v: vec![label_vector(&t, &[0])], e: 1 };
    if !mild_certificate(&t, &d)?.holds() {
        return Ok(Some("U = <x1, x2, x3>, V = <x0>, e = 1 does not certify".into()));
    }
    if mild_search(&t)?.is_none() {
        return Ok(Some("search found no certificate".into()));
    }
    Ok(None)
}

fn decomposed(src: &dyn SymbolSource) -> Result<(GstPresentation, MasseyTensor)> {
    let data = gst_presentation_data(&set(&DECOMPOSED_SET), DECOMPOSED_Q)?;
    let base = build_tensor(&data.set, src, RealnessPolicy::Annotate)?;
    let t = inflate_tensor(&base.tensor, &data)?;
    Ok((data, t))
}

fn check_decomposed_traces(src: &dyn SymbolSource) -> Result<Option<String>> {
    let (data, t) = decomposed(src)?;
    for m in 1..=3 {
        let support = t.support(m);
        if support != DECOMPOSED_SUPPORT[m - 1] {
            return Ok(Some(format!(
                "relator {m} under ordering {:?}: support {support:?}",
                data.set.odd_primes()
            )));
        }
    }
    let table = gst_case_table_tensor(&data.set, DECOMPOSED_Q, src, RealnessPolicy::Annotate)?;
    if table.tensor != t {
        return Ok(Some("case-table tensor differs from the inflated tensor".into()));
    }
    Ok(None)
}

fn check_decomposed_relators(src: &dyn SymbolSource) -> Result<Option<String>> {
    let (_, t) = decomposed(src)?;
    for m in 1..=3 {
        let rt = tensor_roundtrip(&t, m)?;
        let word = rt.word.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" ");
        if !rt.matches || word != DECOMPOSED_RELATORS[m - 1] {
            return Ok(Some(format!("relator {m} is {word}")));
        }
    }
    Ok(None)
}

fn check_decomposed_mild(src: &dyn SymbolSource) -> Result<Option<String>> {
    let (_, t) = decomposed(src)?;
    let d = Decomposition { u: vec![label_vector(&t, &[1])], v: vec![label_vector(&t, &[2]), label_vector(&t, &[3])], e: 1 };
    let verdict = mild_certificate(&t, &d)?;
    Ok(match (verdict.condition_a, verdict.condition_b) {
        (true, true) => None,
        (a, b) => Some(format!("condition (a) {a}, condition (b) {b}")),
    })
}
