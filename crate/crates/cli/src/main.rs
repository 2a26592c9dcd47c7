//! Command-line front end for `permuchi`.
//!
//! Exit codes: 0 on success, 1 when a computation fails or methods
//! disagree, 2 on invalid arguments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permuchi::algebra::coeff_to_json;
use permuchi::localization::chi_general;
use permuchi::recursion::{MemoStore, Recursion};
use permuchi::verify::{Engine, Method, SuiteOptions};
use permuchi::{Error, LaurentPoly};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "permuchi", version, about = "Equivariant Euler characteristics on permutohedral varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,

    /// Memo cache file for the recursion; PERMUCHI_CACHE takes precedence.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// chi_T(A_{n,i}^a ⊗ B_{n,j}^{n-a}) for one (i, j, a, n).
    Compute {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// chi_T(A_n^a ⊗ B_n^{n-a}) with the untwisted linearization.
    General {
        #[command(flatten)]
        dim: DimArgs,
    },
    /// Cross-method agreement and invariant suite; exits 1 on any failure.
    Verify {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Every (a, i, j) at dimension n.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
}

#[derive(Args, Debug)]
struct DimArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    a: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Lattice,
    Localization,
    Recursion,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Lattice => vec![Method::Lattice],
            MethodArg::Localization => vec![Method::Localization],
            MethodArg::Recursion => vec![Method::Recursion],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }

    fn check_dim(self, n: usize) -> Result<(), Failure> {
        for m in self.methods() {
            let max = match m {
                Method::Lattice => permuchi::lattice::MAX_DIM,
                Method::Localization => permuchi::localization::MAX_DIM,
                Method::Recursion => permuchi::recursion::MAX_DIM,
            };
            if n > max {
                return Err(Failure::Usage(format!("--n {n} exceeds the {m} maximum {max}")));
            }
        }
        Ok(())
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::All => "all",
            m => m.methods()[0].name(),
        }
    }
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(msg) => Failure::Usage(msg),
            other => Failure::Compute(other.to_string()),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global() {
            eprintln!("permuchi: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("permuchi: {msg}");
            eprintln!("Try 'permuchi --help' for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("permuchi: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cache_path(cli: &Cli) -> Option<PathBuf> {
    std::env::var_os("PERMUCHI_CACHE")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| cli.cache.clone())
}

fn run(cli: &Cli) -> CmdResult {
    let cache = cache_path(cli);
    let store = match &cache {
        Some(path) if path.exists() => MemoStore::load(path)?,
        _ => MemoStore::new(),
    };
    let engine = Engine::new().with_recursion(Recursion::with_store(store));

    let out = match &cli.command {
        Command::Compute { dim, i, j, method } => compute(&engine, cli.format, dim, *i, *j, *method),
        Command::General { dim } => general(cli.format, dim),
        Command::Verify { max_n, inject_fault } => verify(&engine, cli.format, *max_n, *inject_fault),
        Command::Table { n, method } => table(&engine, cli.format, *n, *method),
    }?;

    if let Some(path) = &cache {
        if !engine.recursion().store().is_empty() {
            engine.recursion().store().save(path)?;
        }
    }
    Ok(out)
}

fn check_indices(n: usize, a: usize, i: usize, j: usize) -> Result<(), Failure> {
    if a > n {
        return Err(Failure::Usage(format!("--a {a} exceeds --n {n}")));
    }
    for (name, v) in [("i", i), ("j", j)] {
        if v == 0 || v > n + 1 {
            return Err(Failure::Usage(format!("--{name} {v} outside 1..={}", n + 1)));
        }
    }
    Ok(())
}

fn record(n: usize, a: usize, ij: Option<(usize, usize)>, method: &str, p: &LaurentPoly) -> Value {
    let mut v = json!({ "n": n, "a": a });
    if let Some((i, j)) = ij {
        v["i"] = json!(i);
        v["j"] = json!(j);
    }
    v["method"] = json!(method);
    v["terms"] = serde_json::to_value(p.to_json_terms()).expect("terms serialize");
    v["eval_at_ones"] = coeff_to_json(&p.eval_ones());
    v
}

/// Runs the selected methods and insists they agree.
fn evaluate(engine: &Engine, n: usize, a: usize, i: usize, j: usize, method: MethodArg) -> Result<LaurentPoly, Failure> {
    let report = engine.cross_check(i, j, a, n, &method.methods());
    match report.polynomial() {
        Some(p) => Ok(p.clone()),
        None => {
            let mut msg = format!("n={n} a={a} i={i} j={j}:");
            for o in &report.outcomes {
                match &o.result {
                    Ok(p) => msg.push_str(&format!("\n  {}: {p}", o.method)),
                    Err(e) => msg.push_str(&format!("\n  {}: error: {e}", o.method)),
                }
            }
            if report.outcomes.iter().all(|o| o.result.is_ok()) {
                msg.insert_str(0, "methods disagree at ");
            }
            Err(Failure::Compute(msg))
        }
    }
}

fn compute(engine: &Engine, format: Format, dim: &DimArgs, i: usize, j: usize, method: MethodArg) -> CmdResult {
    check_indices(dim.n, dim.a, i, j)?;
    method.check_dim(dim.n)?;
    let p = evaluate(engine, dim.n, dim.a, i, j, method)?;
    Ok(match format {
        Format::Text => p.to_string(),
        Format::Json => record(dim.n, dim.a, Some((i, j)), method.name(), &p).to_string(),
    })
}

fn general(format: Format, dim: &DimArgs) -> CmdResult {
    if dim.a > dim.n {
        return Err(Failure::Usage(format!("--a {} exceeds --n {}", dim.a, dim.n)));
    }
    let p = chi_general(dim.n, dim.a)?;
    Ok(match format {
        Format::Text => p.to_string(),
        Format::Json => record(dim.n, dim.a, None, "localization", &p).to_string(),
    })
}

fn verify(engine: &Engine, format: Format, max_n: usize, inject_fault: bool) -> CmdResult {
    let mut opts = SuiteOptions::new(max_n);
    opts.inject_fault = inject_fault;
    let report = engine.invariant_suite(&opts);
    let out = match format {
        Format::Json => report.to_json(),
        Format::Text => {
            let mut lines = Vec::new();
            for c in &report.cases {
                for f in &c.failures {
                    lines.push(format!("FAIL n={} a={} i={} j={}: {f}", c.n, c.a, c.i, c.j));
                }
            }
            for c in &report.checks {
                for f in &c.failures {
                    lines.push(format!("FAIL {} n={}: {f}", c.name, c.n));
                }
            }
            lines.push(format!(
                "{} cases, {} checks, {} failed",
                report.cases.len(),
                report.checks.len(),
                report.summary.failed
            ));
            lines.join("\n")
        }
    };
    if report.passed() {
        Ok(out)
    } else {
        println!("{out}");
        Err(Failure::Compute(format!("{} failures", report.summary.failed)))
    }
}

fn table(engine: &Engine, format: Format, n: usize, method: MethodArg) -> CmdResult {
    method.check_dim(n)?;
    let mut rows = Vec::new();
    for a in 0..=n {
        for i in 1..=n + 1 {
            for j in 1..=n + 1 {
                rows.push((a, i, j, evaluate(engine, n, a, i, j, method)?));
            }
        }
    }
    Ok(match format {
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|(a, i, j, p)| record(n, *a, Some((*i, *j)), method.name(), p))
                .collect();
            Value::Array(arr).to_string()
        }
        Format::Text => {
            let w = (n + 1).to_string().len().max(1);
            let mut lines = vec![format!("{:>w$}  {:>w$}  {:>w$}  chi", "a", "i", "j")];
            for (a, i, j, p) in &rows {
                lines.push(format!("{a:>w$}  {i:>w$}  {j:>w$}  {p}"));
            }
            lines.join("\n")
        }
    })
}
