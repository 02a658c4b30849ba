//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use redei::magnus::tensor_roundtrip;
use redei::massey::{build_tensor, inflate_tensor, label_vector, mild_certificate, Decomposition, RealnessPolicy};
use redei::presentation::{gst_presentation_data, PrimeSet};
use redei::redei::{RedeiEngine, SymbolSource};
use redei::report::{certify, CertifyOptions};
use redei::search::{search, SearchQuery};
use redei::ternary::SolverConfig;
use std::time::{Duration, Instant};

const LIMIT_SYMBOL_TABLE: Duration = Duration::from_secs(30);
const LIMIT_VANISHING: Duration = Duration::from_secs(10);
const LIMIT_MILD: Duration = Duration::from_secs(30);
const LIMIT_QUOTIENT: Duration = Duration::from_secs(60);
const LIMIT_SUITE: Duration = Duration::from_secs(60);
const MIN_CASES: u32 = 200;

type Outcome = Result<String, String>;
type Criterion = (fn() -> Outcome, Option<Duration>);

const _: () = assert!(common::CASES >= MIN_CASES);

fn engine() -> RedeiEngine {
    RedeiEngine::new(SolverConfig::default())
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let timing = match limit {
        Some(l) => format!("{} ms, limit {} ms", elapsed.as_millis(), l.as_millis()),
        None => format!("{} ms", elapsed.as_millis()),
    };
    match out {
        Ok(msg) if limit.map_or(true, |l| elapsed < l) => Ok(format!("{msg} [{timing}]")),
        Ok(msg) => Err(format!("{msg} but too slow [{timing}]")),
        Err(msg) => Err(format!("{msg} [{timing}]")),
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// Sorted index triples over `0..=n` that are not constant.
fn multisets(n: usize) -> Vec<[usize; 3]> {
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

fn criterion_1() -> Outcome {
    let expected: Vec<[usize; 3]> = {
        let listed = [
            [1, 1, 3], [1, 2, 3], [1, 3, 3], [0, 0, 1], [0, 0, 2], [0, 0, 3],
            [0, 1, 1], [0, 2, 2], [0, 3, 3], [0, 2, 3], [0, 3, 2],
        ];
        let mut v: Vec<[usize; 3]> = listed.iter().map(|t| { let mut s = *t; s.sort(); s }).collect();
        v.sort();
        v.dedup();
        v
    };
    let primes = [2u64, 313, 457, 521];
    let eng = engine();
    let mut minus = Vec::new();
    for idx in multisets(3) {
        let [a, b, c] = idx.map(|i| primes[i]);
        if eng.symbol(a, b, c).map_err(e)? == -1 {
            minus.push(idx);
        }
    }
    if minus == expected {
        Ok(format!("{} triples equal to -1, all others +1", minus.len()))
    } else {
        Err(format!("-1 set {minus:?}, expected {expected:?}"))
    }
}

fn criterion_2() -> Outcome {
    let primes = [2u64, 113, 593];
    let eng = engine();
    let mut minus = Vec::new();
    for idx in multisets(2) {
        let [a, b, c] = idx.map(|i| primes[i]);
        if eng.symbol(a, b, c).map_err(e)? == -1 {
            minus.push([a, b, c]);
        }
    }
    let s = PrimeSet::from_list(&primes).map_err(e)?;
    let t = build_tensor(&s, &eng, RealnessPolicy::Strict).map_err(e)?.tensor;
    let report = certify(&primes, CertifyOptions::default(), &eng).map_err(e)?;
    let z = if report.zassenhaus_exact { "=" } else { ">=" };
    let summary = format!(
        "symbols equal to -1: {minus:?}; nonzero tensor entries: {}; reported z {z} {}",
        t.entries().len(),
        report.zassenhaus_bound
    );
    if minus.is_empty() && t.is_zero() && report.zassenhaus_bound >= 4 && !report.zassenhaus_exact {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_3() -> Outcome {
    let eng = engine();
    let report = certify(&[2, 313, 457, 521], CertifyOptions::default(), &eng).map_err(e)?;
    if !report.mild {
        return Err("no mildness certificate".into());
    }
    let s = PrimeSet::from_list(&[2, 313, 457, 521]).map_err(e)?;
    let t = build_tensor(&s, &eng, RealnessPolicy::Strict).map_err(e)?.tensor;
    for m in 1..=3 {
        for k in 1..=3 {
            if t.get(m, 0, 0, k) != (m == k) as u8 {
                return Err(format!("entry ({m}, 0, 0, {k}) = {}", t.get(m, 0, 0, k)));
            }
        }
    }
    let w = report.witness.expect("mild reports carry a witness");
    Ok(format!("certificate U = {:?}, V = {:?}, e = {}; delta pattern holds", w.u, w.v, w.e))
}

fn quotient_tensor(eng: &RedeiEngine) -> Result<(Vec<u64>, redei::massey::MasseyTensor), String> {
    let s = PrimeSet::from_list(&[2, 17, 7489, 15809]).map_err(e)?;
    let data = gst_presentation_data(&s, 5).map_err(e)?;
    let base = build_tensor(&data.set, eng, RealnessPolicy::Annotate).map_err(e)?;
    let t = inflate_tensor(&base.tensor, &data).map_err(e)?;
    Ok((data.set.odd_primes().to_vec(), t))
}

fn criterion_4() -> Outcome {
    let expected: [&[[usize; 3]]; 3] = [
        &[[1, 1, 3], [1, 2, 3], [1, 3, 2], [1, 3, 3], [2, 3, 1], [3, 1, 1], [3, 2, 1], [3, 3, 1]],
        &[[1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2]],
        &[[1, 1, 3], [1, 2, 3], [2, 1, 3], [3, 1, 1], [3, 1, 2], [3, 2, 1]],
    ];
    let (ordering, t) = quotient_tensor(&engine())?;
    for m in 1..=3 {
        let got = t.support(m);
        if got != expected[m - 1] {
            return Err(format!("relator {m} support {got:?} under ordering {ordering:?}"));
        }
    }
    Ok(format!("all three support sets match under ordering l_1, l_2, l_3 = {ordering:?}"))
}

fn criterion_5() -> Outcome {
    let expected = [
        "[[x1, x3], x1] [[x1, x3], x3] [[x2, x3], x1]",
        "[[x1, x3], x2]",
        "[[x1, x3], x1] [[x1, x3], x2] [[x2, x3], x1]",
    ];
    let (_, t) = quotient_tensor(&engine())?;
    let mut got = Vec::new();
    for m in 1..=3 {
        let rt = tensor_roundtrip(&t, m).map_err(e)?;
        if !rt.matches {
            return Err(format!("relator {m} does not re-expand to its tensor"));
        }
        got.push(rt.word.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" "));
    }
    if got == expected {
        Ok(format!("r2 = {}", got[1]))
    } else {
        Err(format!("relators {got:?}"))
    }
}

fn criterion_6() -> Outcome {
    let (_, t) = quotient_tensor(&engine())?;
    let d = Decomposition {
        u: vec![label_vector(&t, &[1])],
        v: vec![label_vector(&t, &[2]), label_vector(&t, &[3])],
        e: 1,
    };
    let v = mild_certificate(&t, &d).map_err(e)?;
    if v.holds() {
        Ok(format!("witness triples {:?}", v.witness))
    } else {
        Err(format!("condition (a) {}, condition (b) {}", v.condition_a, v.condition_b))
    }
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for suite in &common::SUITES {
        let r = timed(Some(LIMIT_SUITE), || (suite.run)(common::CASES).map(|_| format!("{} cases", common::CASES)));
        ok &= r.is_ok();
        lines.push(match r {
            Ok(m) => format!("{}: ok {m}", suite.name),
            Err(m) => format!("{}: FAILED {m}", suite.name),
        });
    }
    let seen = common::GST_SEEN.lock().unwrap().len();
    lines.push(format!("{seen} distinct (S, q) instances"));
    if ok {
        Ok(lines.join("; "))
    } else {
        Err(lines.join("; "))
    }
}

fn criterion_8() -> Outcome {
    let has = |count, mod16, want: &[u64]| -> Result<bool, String> {
        let q = SearchQuery { count, mod16, max: 600, decomposed_mod8: None };
        Ok(search(q).map_err(e)?.any(|h| h.primes == want))
    };
    let a = has(3, 9, &[313, 457, 521])?;
    let b = has(2, 1, &[113, 593])?;
    if a && b {
        Ok("{313, 457, 521} and {113, 593} emitted".into())
    } else {
        Err(format!("{{313, 457, 521}} found: {a}; {{113, 593}} found: {b}"))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        (criterion_1, Some(LIMIT_SYMBOL_TABLE)),
        (criterion_2, Some(LIMIT_VANISHING)),
        (criterion_3, Some(LIMIT_MILD)),
        (criterion_4, Some(LIMIT_QUOTIENT)),
        (criterion_5, None),
        (criterion_6, None),
        (criterion_7, None),
        (criterion_8, None),
    ];
    let mut failed = 0;
    for (n, (f, limit)) in criteria.into_iter().enumerate() {
        match timed(limit, f) {
            Ok(msg) => println!("criterion {}: PASS {msg}", n + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {msg}", n + 1);
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
