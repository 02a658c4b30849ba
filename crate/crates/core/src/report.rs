//! Certification pipeline, its JSON report, and the symbol cache format.

use crate::error::{Error, Result};
use crate::massey::{
    build_tensor, gst_case_table_tensor, inflate_tensor, mild_search, BuiltTensor, Decomposition, MasseyTensor,
    RealnessPolicy,
};
use crate::modarith::Prime;
use crate::presentation::{gst_admissible, gst_presentation_data, zassenhaus_ge3, PrimeSet};
use crate::redei::{
    admissible, choice_values, evaluate, evaluate_all_orientations, symbol_quartic_oracle, Realness, RedeiEngine,
    SymbolEvaluation,
};
use crate::ternary::SolverConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub triple: [u64; 3],
    pub value: i8,
    /// How the value was obtained, e.g. `direct-solve/split` or `closed-form`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TensorEntry {
    pub m: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// Decomposition vectors as bit lists over the character labels in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(rename = "U")]
    pub u: Vec<Vec<u8>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<u8>>,
    pub e: u8,
    /// Labels the bit positions refer to.
    pub labels: Vec<usize>,
}

impl Witness {
    pub fn from_decomposition(t: &MasseyTensor, d: &Decomposition) -> Self {
        let bits = |x: &u32| (0..t.gens()).map(|b| (x >> b & 1) as u8).collect();
        Witness { u: d.u.iter().map(bits).collect(), v: d.v.iter().map(bits).collect(), e: d.e, labels: t.labels().collect() }
    }

    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let pack = |bits: &Vec<u8>| -> Result<u32> {
            if bits.len() > 32 || bits.iter().any(|&b| b > 1) {
                return Err(Error::Parse("witness vectors must be short bit lists".into()));
            }
            Ok(bits.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i))
        };
        Ok(Decomposition {
            u: self.u.iter().map(pack).collect::<Result<_>>()?,
            v: self.v.iter().map(pack).collect::<Result<_>>()?,
            e: self.e,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub pair: [u64; 2],
    pub verdict: Realness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: u32,
    pub set: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub admissible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    /// `[l_0, ..., l_n]` in the order the indices below refer to.
    #[serde(default)]
    pub ordering: Vec<u64>,
    #[serde(default)]
    pub symbols: Vec<SymbolRecord>,
    /// Nonzero entries only, sorted.
    #[serde(default)]
    pub tensor: Vec<TensorEntry>,
    /// Lower bound on the Zassenhaus invariant; exact when `zassenhaus_exact`.
    #[serde(default)]
    pub zassenhaus_bound: u32,
    #[serde(default)]
    pub zassenhaus_exact: bool,
    pub mild: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Pairs used without a total realness certificate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub uncertified_pairs: Vec<PairVerdict>,
    #[serde(default)]
    pub elapsed_ms: u64,
}

impl CertificateReport {
    fn rejected(set: Vec<u64>, q: Option<u64>, diagnostic: String, start: Instant) -> Self {
        CertificateReport {
            schema: SCHEMA_VERSION,
            set,
            q,
            admissible: false,
            diagnostic: Some(diagnostic),
            ordering: Vec::new(),
            symbols: Vec::new(),
            tensor: Vec::new(),
            zassenhaus_bound: 0,
            zassenhaus_exact: false,
            mild: false,
            witness: None,
            uncertified_pairs: Vec::new(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: CertificateReport = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if r.symbols.iter().any(|s| s.value != 1 && s.value != -1) {
            return Err(Error::Parse("symbol values must be ±1".into()));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CertifyOptions {
    pub q: Option<u64>,
    pub policy: RealnessPolicy,
}

fn provenance(ev: &SymbolEvaluation) -> String {
    match &ev.certificate {
        Some(c) => format!("{}/{}", c.provenance.tag(), ev.place.tag()),
        None => ev.place.tag().to_string(),
    }
}

/// Recompute every consulted symbol from scratch and compare with the
/// value the tensor was built from.
fn revalidate(built: &BuiltTensor, cfg: &SolverConfig) -> Result<Vec<SymbolRecord>> {
    built
        .symbols
        .iter()
        .map(|(&[a, b, c], &v)| {
            let ev = evaluate(a, b, c, cfg)?;
            if ev.value != v {
                return Err(Error::Inconsistent(format!(
                    "[{a}, {b}, {c}] was used as {v} but evaluates to {}",
                    ev.value
                )));
            }
            Ok(SymbolRecord { triple: [a, b, c], value: v, provenance: Some(provenance(&ev)) })
        })
        .collect()
}

/// Admissibility, tensor, and mildness search for `list` (which may omit 2).
pub fn certify(list: &[u64], opts: CertifyOptions, engine: &RedeiEngine) -> Result<CertificateReport> {
    let start = Instant::now();
    let s = PrimeSet::from_list(list)?;
    let set = s.primes();
    if !zassenhaus_ge3(&s) {
        let msg = "every odd prime must be 1 mod 8 with all pairwise Legendre symbols 1".to_string();
        return Ok(CertificateReport::rejected(set, opts.q, msg, start));
    }
    let (ordered, built, tensor) = match opts.q {
        None => {
            let built = build_tensor(&s, engine, opts.policy)?;
            let tensor = built.tensor.clone();
            (s, built, tensor)
        }
        Some(q) => {
            let verdict = gst_admissible(&s, q)?;
            if !verdict.ok {
                return Ok(CertificateReport::rejected(set, Some(q), verdict.diagnostic.unwrap_or_default(), start));
            }
            let data = gst_presentation_data(&s, q)?;
            let built = build_tensor(&data.set, engine, opts.policy)?;
            let tensor = inflate_tensor(&built.tensor, &data)?;
            let table = gst_case_table_tensor(&data.set, q, engine, opts.policy)?;
            if table.tensor != tensor {
                return Err(Error::Internal("case-table tensor disagrees with the inflated tensor".into()));
            }
            (data.set, built, tensor)
        }
    };
    let symbols = revalidate(&built, engine.config())?;
    let found = mild_search(&tensor)?;
    let zero = tensor.is_zero();
    Ok(CertificateReport {
        schema: SCHEMA_VERSION,
        set,
        q: opts.q,
        admissible: true,
        diagnostic: None,
        ordering: ordered.primes(),
        symbols,
        tensor: tensor.entries().into_iter().map(|[m, i, j, k]| TensorEntry { m, i, j, k }).collect(),
        zassenhaus_bound: if zero { 4 } else { 3 },
        zassenhaus_exact: !zero,
        mild: found.is_some(),
        witness: found.map(|(d, _)| Witness::from_decomposition(&tensor, &d)),
        uncertified_pairs: built
            .uncertified_pairs()
            .into_iter()
            .map(|(pair, verdict)| PairVerdict { pair, verdict })
            .collect(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub triple: [u64; 3],
    pub value: i8,
    /// `(orientation, value)` for every orientation the certificate route accepts.
    pub orientations: Vec<([u64; 3], i8)>,
    pub permutations_agreeing: usize,
    pub permutations: usize,
    pub choice_values: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quartic_oracle: Option<i8>,
    pub agree: bool,
}

/// Evaluate `[a, b, c]` by every available route.
pub fn cross_check(a: u64, b: u64, c: u64, cfg: &SolverConfig) -> Result<CrossCheck> {
    let value = evaluate(a, b, c, cfg)?.value;
    let perms = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let mut agreeing = 0;
    for [x, y, z] in perms {
        if evaluate(x, y, z, cfg)?.value == value {
            agreeing += 1;
        }
    }
    let orientations: Vec<([u64; 3], i8)> =
        evaluate_all_orientations(a, b, c, cfg)?.into_iter().map(|ev| (ev.orientation, ev.value)).collect();
    let choices = choice_values(a, b, c, 3, cfg)?;
    // [l, l, k] with l odd
    let quartic_oracle = {
        let mut t = [a, b, c];
        t.sort_unstable();
        let pair = if t[0] == t[1] && t[0] != 2 {
            Some((t[0], t[2]))
        } else if t[1] == t[2] && t[1] != 2 {
            Some((t[1], t[0]))
        } else {
            None
        };
        pair.map(|(l, k)| symbol_quartic_oracle(l, k)).transpose()?
    };
    let agree = agreeing == perms.len()
        && orientations.iter().all(|(_, v)| *v == value)
        && choices.iter().all(|v| *v == value)
        && quartic_oracle.map_or(true, |v| v == value);
    Ok(CrossCheck {
        triple: [a, b, c],
        value,
        orientations,
        permutations_agreeing: agreeing,
        permutations: perms.len(),
        choice_values: choices,
        quartic_oracle,
        agree,
    })
}

/// Parse `"2,313,457,521"`; whitespace around items is ignored.
pub fn parse_prime_list(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty prime list".into()));
    }
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let v: u64 = item.parse().map_err(|_| Error::Parse(format!("'{item}' is not a nonnegative integer")))?;
            Prime::new(v)?;
            Ok(v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CacheLine {
    triple: [u64; 3],
    value: i8,
}

/// One cache line, `{"triple": [a, b, c], "value": ±1}`.
pub fn parse_cache_line(line: &str) -> Result<([u64; 3], i8)> {
    let c: CacheLine = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
    if c.value != 1 && c.value != -1 {
        return Err(Error::Parse(format!("cache value {} is not ±1", c.value)));
    }
    let [a, b, cc] = c.triple;
    let adm = admissible(a, b, cc);
    if !adm.ok {
        return Err(Error::Parse(format!("cached triple is inadmissible: {}", adm.diagnostic.unwrap_or_default())));
    }
    Ok((c.triple, c.value))
}

pub fn render_cache_line(triple: [u64; 3], value: i8) -> String {
    serde_json::to_string(&CacheLine { triple, value }).expect("cache line serializes")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CacheLoad {
    pub loaded: usize,
    /// `(1-based line number, reason)`.
    pub skipped: Vec<(usize, String)>,
}

/// Seed `engine` from a cache file. A missing file is an empty cache.
pub fn load_cache(path: &Path, engine: &RedeiEngine) -> Result<CacheLoad> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(CacheLoad::default()),
        Err(e) => return Err(Error::Parse(format!("{}: {e}", path.display()))),
    };
    let mut out = CacheLoad::default();
    let mut seen: BTreeMap<[u64; 3], i8> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_cache_line(line).and_then(|([a, b, c], v)| {
            let mut key = [a, b, c];
            key.sort_unstable();
            if let Some(&old) = seen.get(&key) {
                if old != v {
                    return Err(Error::Parse(format!("{key:?} conflicts with an earlier line")));
                }
            }
            engine.seed(a, b, c, v)?;
            seen.insert(key, v);
            Ok(())
        });
        match parsed {
            Ok(()) => out.loaded += 1,
            Err(e) => out.skipped.push((n + 1, e.to_string())),
        }
    }
    Ok(out)
}

/// Write every memoized symbol, one line each, sorted.
pub fn save_cache(path: &Path, engine: &RedeiEngine) -> Result<()> {
    let mut text = String::new();
    for (t, v) in engine.memo_entries() {
        text.push_str(&render_cache_line(t, v));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_list_parsing() {
        assert_eq!(parse_prime_list("2,313, 457 ,521").unwrap(), vec![2, 313, 457, 521]);
        assert!(matches!(parse_prime_list(""), Err(Error::Parse(_))));
        assert!(matches!(parse_prime_list("2,,3"), Err(Error::Parse(_))));
        assert!(matches!(parse_prime_list("2,-3"), Err(Error::Parse(_))));
        assert!(parse_prime_list("2,15").is_err());
    }

    #[test]
    fn cache_lines_round_trip() {
        let line = render_cache_line([2, 313, 457], -1);
        assert_eq!(line, r#"{"triple":[2,313,457],"value":-1}"#);
        assert_eq!(parse_cache_line(&line).unwrap(), ([2, 313, 457], -1));
        assert!(parse_cache_line(r#"{"triple":[2,313,457],"value":0}"#).is_err());
        assert!(parse_cache_line(r#"{"triple":[5,13,17],"value":1}"#).is_err());
        assert!(parse_cache_line("not json").is_err());
    }

    #[test]
    fn cache_load_skips_bad_lines() {
        let dir = std::env::temp_dir().join(format!("redei-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.jsonl");
        std::fs::write(
            &path,
            "{\"triple\":[2,2,313],\"value\":-1}\ngarbage\n\n{\"triple\":[313,2,2],\"value\":1}\n",
        )
        .unwrap();
        let engine = RedeiEngine::new(SolverConfig::default());
        let load = load_cache(&path, &engine).unwrap();
        assert_eq!(load.loaded, 1);
        assert_eq!(load.skipped.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(engine.cached(2, 313, 2), Some(-1));
        save_cache(&path, &engine).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"triple\":[2,2,313],\"value\":-1}\n");
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(load_cache(&path, &engine).unwrap(), CacheLoad::default());
    }

    #[test]
    fn report_round_trips() {
        let engine = RedeiEngine::new(SolverConfig::default());
        let r = certify(&[2, 313, 457, 521], CertifyOptions::default(), &engine).unwrap();
        assert!(r.admissible && r.mild);
        assert_eq!(CertificateReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn inadmissible_set_is_reported() {
        let engine = RedeiEngine::new(SolverConfig::default());
        let r = certify(&[2, 5, 13], CertifyOptions::default(), &engine).unwrap();
        assert!(!r.admissible);
        assert!(r.diagnostic.is_some());
    }

    #[test]
    fn corrupt_seed_is_caught_on_revalidation() {
        let engine = RedeiEngine::new(SolverConfig::default());
        engine.seed(313, 457, 521, 1).unwrap();
        let err = certify(&[2, 313, 457, 521], CertifyOptions::default(), &engine).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(ref m) if m.contains("313")), "{err}");
    }
}
