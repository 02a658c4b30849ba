use clap::{Args, Parser, Subcommand};
use redei::massey::RealnessPolicy;
use redei::redei::{admissible, RedeiEngine};
use redei::report::{certify, cross_check, load_cache, parse_prime_list, save_cache, CertificateReport, CertifyOptions};
use redei::search::{search, SearchQuery};
use redei::ternary::SolverConfig;
use redei::verify::{check_ids, run_checks};
use redei::{Error, Result};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "redei", version, about = "Rédei symbols, triple Massey products and mildness certificates")]
struct Cli {
    /// JSON-lines symbol cache, read before and written after the command.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    /// Box limit for the ternary solver.
    #[arg(long, global = true, value_name = "N")]
    bound_cap: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one Rédei symbol.
    Symbol {
        a: u64,
        b: u64,
        c: u64,
        /// Compare all permutations, several certificates and the quartic oracle.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Build the Massey tensor of a prime set and search for a mildness certificate.
    Certify {
        /// Comma-separated primes, e.g. 2,313,457,521.
        list: String,
        /// Work in the quotient cut out by this prime (5 mod 8).
        #[arg(long, value_name = "Q")]
        decomposed: Option<u64>,
        /// Refuse pairs that are not certified totally real.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Enumerate admissible prime sets as JSON lines.
    Search {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        mod16: u64,
        #[arg(long)]
        max: u64,
        /// Also attach a companion prime with this residue mod 8.
        #[arg(long, value_name = "R")]
        decomposed_mod8: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Recompute the reference worked examples.
    #[command(alias = "verify-paper")]
    VerifyExamples {
        /// Run a single check by id.
        #[arg(long, value_name = "ID")]
        only: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let mut cfg = SolverConfig::default();
    if let Some(cap) = cli.bound_cap {
        if cap == 0 {
            return Err(Error::Domain("--bound-cap must be positive".into()));
        }
        cfg.bound_cap = cap;
    }
    let engine = RedeiEngine::new(cfg);
    if let Some(path) = &cli.cache {
        let load = load_cache(path, &engine)?;
        for (line, reason) in &load.skipped {
            eprintln!("warning: {}:{line}: skipped ({reason})", path.display());
        }
    }
    let code = match cli.command {
        Command::Symbol { a, b, c, cross_check: cc, out } => cmd_symbol(&engine, [a, b, c], cc, out.json)?,
        Command::Certify { list, decomposed, strict, out } => cmd_certify(&engine, &list, decomposed, strict, out.json)?,
        Command::Search { count, mod16, max, decomposed_mod8, out: _ } => {
            cmd_search(SearchQuery { count, mod16, max, decomposed_mod8 })?
        }
        Command::VerifyExamples { only, out } => cmd_verify(&engine, only.as_deref(), out.json)?,
    };
    if let Some(path) = &cli.cache {
        save_cache(path, &engine)?;
    }
    Ok(code)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("output serializes"));
}

fn cmd_symbol(engine: &RedeiEngine, [a, b, c]: [u64; 3], cc: bool, json: bool) -> Result<u8> {
    let adm = admissible(a, b, c);
    if !adm.ok {
        return Err(Error::Inadmissible(adm.diagnostic.unwrap_or_default()));
    }
    if cc {
        let report = cross_check(a, b, c, engine.config())?;
        if json {
            print_json(&report);
        } else {
            println!("[{a}, {b}, {c}] = {}", report.value);
            println!("permutations: {}/{} agree", report.permutations_agreeing, report.permutations);
            for (o, v) in &report.orientations {
                println!("orientation {o:?}: {v}");
            }
            println!("certificate choices: {:?}", report.choice_values);
            if let Some(q) = report.quartic_oracle {
                println!("quartic oracle: {q}");
            }
            println!("{}", if report.agree { "all routes agree" } else { "ROUTES DISAGREE" });
        }
        return Ok(if report.agree { 0 } else { 1 });
    }
    let ev = engine.evaluate(a, b, c)?;
    engine.seed(a, b, c, ev.value)?;
    if json {
        print_json(&ev);
    } else {
        println!("{}", ev.value);
    }
    Ok(0)
}

fn cmd_certify(engine: &RedeiEngine, list: &str, q: Option<u64>, strict: bool, json: bool) -> Result<u8> {
    let primes = parse_prime_list(list)?;
    let policy = if strict { RealnessPolicy::Strict } else { RealnessPolicy::Annotate };
    let report = certify(&primes, CertifyOptions { q, policy }, engine)?;
    if json {
        println!("{}", report.to_json());
    } else {
        print_report(&report);
    }
    Ok(if !report.admissible {
        2
    } else if report.mild {
        0
    } else {
        1
    })
}

fn print_report(r: &CertificateReport) {
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    println!("set: {{{}}}", join(&r.set));
    if let Some(q) = r.q {
        println!("q: {q}");
    }
    if !r.admissible {
        println!("admissible: no ({})", r.diagnostic.as_deref().unwrap_or(""));
        return;
    }
    println!("ordering: {}", join(&r.ordering));
    println!("symbols equal to -1:");
    for s in r.symbols.iter().filter(|s| s.value == -1) {
        println!("  {:?}  {}", s.triple, s.provenance.as_deref().unwrap_or(""));
    }
    println!("nonzero trace entries (m: i j k):");
    for e in &r.tensor {
        println!("  {}: {} {} {}", e.m, e.i, e.j, e.k);
    }
    let op = if r.zassenhaus_exact { "=" } else { ">=" };
    println!("zassenhaus invariant: z {op} {}", r.zassenhaus_bound);
    let caveat = if r.uncertified_pairs.is_empty() { "" } else { ", conditional on the pairs below" };
    match &r.witness {
        Some(w) => println!("mild: yes (U = {:?}, V = {:?}, e = {}, labels {:?}{caveat})", w.u, w.v, w.e, w.labels),
        None => println!("mild: no certificate found at order 3{caveat}"),
    }
    for p in &r.uncertified_pairs {
        println!("warning: pair {:?} not certified totally real ({:?})", p.pair, p.verdict);
    }
}

fn cmd_search(query: SearchQuery) -> Result<u8> {
    let mut out = std::io::stdout().lock();
    for hit in search(query)? {
        // a closed pipe ends the stream quietly
        if writeln!(out, "{}", serde_json::to_string(&hit).expect("hit serializes")).is_err() {
            break;
        }
    }
    Ok(0)
}

fn cmd_verify(engine: &RedeiEngine, only: Option<&str>, json: bool) -> Result<u8> {
    if let Some(id) = only {
        if !check_ids().contains(&id) {
            return Err(Error::Domain(format!("unknown check '{id}'; known: {}", check_ids().join(", "))));
        }
    }
    let outcomes = run_checks(engine, only);
    if json {
        print_json(&outcomes);
    } else {
        for o in &outcomes {
            let status = if o.passed { "PASS" } else { "FAIL" };
            match &o.detail {
                Some(d) => println!("{status} {} ({}): {d}", o.id, o.description),
                None => println!("{status} {} ({})", o.id, o.description),
            }
        }
    }
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
}
