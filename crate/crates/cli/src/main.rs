//! `cayley-codes`: build Γ_{m,l,h} and Cayley digraphs, search perfect
//! codes, and run the classification sweeps.
//!
//! Exit status: 0 success, 1 discrepancies found, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cayley_codes::classify::{DiscrepancyKind, SweepOptions, SweepReport};
use cayley_codes::codes::{enumerate_codes, SearchOptions, DEFAULT_SIZE_CAP};
use cayley_codes::digraph::{verify_isomorphism, Digraph};
use cayley_codes::gamma::{build_gamma, canonical_code, check_conditions, realize_as_cayley, GammaParams, Realization};
use cayley_codes::numth::gcd;
use cayley_codes::{build_cayley, verify_code, AbelianGroup};

const JOBS_ENV: &str = "CAYLEY_CODES_JOBS";

#[derive(Parser)]
#[command(name = "cayley-codes", version, about = "Perfect codes in 2-valent Cayley digraphs on abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The Γ_{m,l,h} family.
    #[command(subcommand)]
    Gamma(GammaCmd),
    /// Cayley digraphs given by a group and a generating pair.
    #[command(subcommand)]
    Cayley(CayleyCmd),
    /// Perfect-code search.
    #[command(subcommand)]
    Codes(CodesCmd),
    /// Exhaustive verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args, Clone, Copy)]
struct Triple {
    #[arg(short = 'm')]
    m: u64,
    #[arg(short = 'l')]
    l: u64,
    #[arg(short = 'H')]
    h: u64,
}

impl Triple {
    fn params(self) -> Result<GammaParams> {
        Ok(GammaParams::new(self.m, self.l, self.h)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum GammaCmd {
    /// Emit Γ_{m,l,h} as DOT or JSON.
    Build {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print the divisibility and σ conditions.
    Check {
        #[command(flatten)]
        triple: Triple,
    },
    /// Print the canonical perfect code and its verdict.
    Code {
        #[command(flatten)]
        triple: Triple,
    },
    /// Realize Γ_{m,l,h} as a Cayley digraph on Z²/⟨(m,0),(h,l)⟩.
    Realize {
        #[command(flatten)]
        triple: Triple,
    },
}

#[derive(Subcommand)]
enum CayleyCmd {
    /// Structural parameters (m,l,h) and conditions for both assignments.
    Params {
        #[arg(long)]
        group: String,
        #[arg(long)]
        gens: String,
    },
}

#[derive(Args)]
struct CodeSource {
    /// Invariant factors, e.g. `3,6`.
    #[arg(long, requires = "gens", conflicts_with_all = ["gamma", "input"])]
    group: Option<String>,
    /// Generator pair, e.g. `(1,0);(0,1)`.
    #[arg(long, requires = "group")]
    gens: Option<String>,
    /// Γ parameters `M,L,H`.
    #[arg(long, conflicts_with = "input")]
    gamma: Option<String>,
    /// Digraph JSON as written by `gamma build --format json`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Only codes containing this vertex label.
    #[arg(long)]
    containing: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
}

#[derive(Subcommand)]
enum CodesCmd {
    /// One perfect code, or `null`.
    Find(CodeSource),
    /// All perfect codes.
    Enum(CodeSource),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 36)]
    max_order: u64,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Existence-only search where the predicate is false.
    #[arg(long)]
    early_exit: bool,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Arithmetic predicate against the exact-cover oracle.
    Thm1(SweepArgs),
    /// Identity-containing codes against the two-generator family.
    Thm2(SweepArgs),
    /// Canonical codes of Γ_{m,l,h} over a parameter grid.
    Prop24 {
        #[arg(long, default_value_t = 30)]
        max_m: u64,
        #[arg(long, default_value_t = 10)]
        max_l: u64,
    },
    /// Natural realizations of Γ_{m,l,h} for m·l up to a bound.
    Prop23 {
        #[arg(long, default_value_t = 144)]
        max_ml: u64,
    },
    /// Lemma checks on every oracle code.
    Lemmas(SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Gamma(g) => gamma(g),
        Command::Cayley(CayleyCmd::Params { group, gens }) => cayley_params(&group, &gens),
        Command::Codes(CodesCmd::Find(src)) => codes(&src, true),
        Command::Codes(CodesCmd::Enum(src)) => codes(&src, false),
        Command::Verify(v) => verify(v),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value"));
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gamma(cmd: GammaCmd) -> Result<ExitCode> {
    match cmd {
        GammaCmd::Build { triple, format, output } => {
            let g = build_gamma(triple.params()?)?;
            let text = match format {
                GraphFormat::Dot => g.digraph().to_dot(),
                GraphFormat::Json => g.digraph().to_json(),
            };
            write_output(output.as_deref(), &text)?;
        }
        GammaCmd::Check { triple } => {
            let p = triple.params()?;
            let mut v = serde_json::to_value(p)?;
            v["conditions"] = serde_json::to_value(check_conditions(p))?;
            print_json(&v);
        }
        GammaCmd::Code { triple } => {
            let p = triple.params()?;
            let g = build_gamma(p)?;
            let c = canonical_code(p)?;
            let verified = verify_code(g.digraph(), c.code.vertices())?;
            print_json(&verified.to_json_value(g.digraph()));
            if !verified.is_perfect() {
                return Ok(ExitCode::from(1));
            }
        }
        GammaCmd::Realize { triple } => {
            let p = triple.params()?;
            match realize_as_cayley(p)? {
                Realization::Proper { cayley, map } => {
                    let mapping: serde_json::Map<String, Value> = map
                        .iter()
                        .enumerate()
                        .map(|(v, &w)| (p.label(v), Value::from(cayley.digraph().label(w))))
                        .collect();
                    print_json(&json!({
                        "status": "proper",
                        "group": cayley.group().to_string(),
                        "s": cayley.gens().s.to_string(),
                        "s_prime": cayley.gens().s_prime.to_string(),
                        "isomorphism": "verified",
                        "map": mapping,
                    }));
                }
                Realization::Improper {
                    group,
                    s,
                    s_prime,
                    reason,
                } => {
                    print_json(&json!({
                        "status": "improper",
                        "group": group.to_string(),
                        "s": s.to_string(),
                        "s_prime": s_prime.to_string(),
                        "reason": reason,
                    }));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cayley_params(group: &str, gens: &str) -> Result<ExitCode> {
    let g: AbelianGroup = group.parse()?;
    let pair = g.parse_genpair(gens)?;
    let c = build_cayley(&g, &pair)?;
    let mut out = Vec::new();
    for a in c.assignments() {
        let p = c.extract_params(&a)?;
        let conditions = check_conditions(GammaParams::new(p.m, p.l, p.h)?);
        out.push(json!({
            "s": a.s.to_string(),
            "s_prime": a.s_prime.to_string(),
            "m": p.m,
            "l": p.l,
            "h": p.h,
            "conditions": conditions,
        }));
    }
    print_json(&Value::Array(out));
    Ok(ExitCode::SUCCESS)
}

fn parse_gamma_spec(spec: &str) -> Result<GammaParams> {
    let parts: Vec<u64> = spec
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("cannot parse Γ parameters from {spec:?}"))?;
    let [m, l, h] = parts[..] else {
        bail!("expected M,L,H, got {spec:?}");
    };
    Ok(GammaParams::new(m, l, h)?)
}

fn load_digraph(src: &CodeSource) -> Result<Digraph> {
    if let (Some(group), Some(gens)) = (&src.group, &src.gens) {
        let g: AbelianGroup = group.parse()?;
        let pair = g.parse_genpair(gens)?;
        return Ok(build_cayley(&g, &pair)?.digraph().clone());
    }
    if let Some(spec) = &src.gamma {
        return Ok(build_gamma(parse_gamma_spec(spec)?)?.digraph().clone());
    }
    if let Some(path) = &src.input {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(Digraph::from_json(&text)?);
    }
    bail!("one of --group/--gens, --gamma or --input is required")
}

fn codes(src: &CodeSource, first_only: bool) -> Result<ExitCode> {
    let d = load_digraph(src)?;
    let required = match &src.containing {
        Some(label) => Some(
            d.vertex_by_label(label)
                .ok_or_else(|| anyhow!("no vertex labelled {label:?}"))?,
        ),
        None => None,
    };
    let opts = SearchOptions {
        size_cap: src.size_cap,
        first_only,
    };
    let found = enumerate_codes(&d, required, opts)?;
    let values: Vec<Value> = found.codes.iter().map(|c| c.to_json_value(&d)).collect();
    if first_only {
        print_json(values.first().unwrap_or(&Value::Null));
    } else {
        print_json(&Value::Array(values));
    }
    Ok(ExitCode::SUCCESS)
}

fn jobs() -> Result<usize> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{JOBS_ENV}={v:?}")),
        Err(_) => Ok(0),
    }
}

fn run_sweep(name: &str, args: &SweepArgs, kinds: &[DiscrepancyKind]) -> Result<ExitCode> {
    let opts = SweepOptions {
        early_exit: args.early_exit,
        jobs: jobs()?,
        size_cap: args.size_cap,
    };
    let start = Instant::now();
    let report: SweepReport = cayley_codes::sweep(args.max_order, opts)?.restricted_to(kinds);
    eprintln!("{name}: swept in {:.2?}", start.elapsed());
    if let Some(path) = &args.report {
        let text = match args.format {
            ReportFormat::Json => report.to_json(),
            ReportFormat::Csv => report.to_csv(),
        };
        write_output(Some(path), &text)?;
    }
    println!(
        "{name} max-order {}: {} groups, {} instances, {} positive, {} discrepancies",
        report.max_order,
        report.stats.groups,
        report.instance_count,
        report.stats.positive_instances,
        report.discrepancies.len()
    );
    for d in &report.discrepancies {
        println!("  {:?} {} {};{}: {}", d.kind, d.group, d.s, d.s_prime, d.detail);
    }
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify_prop24(max_m: u64, max_l: u64) -> Result<ExitCode> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in (3..=max_m).step_by(3) {
        for l in 1..=max_l {
            for h in (0..m).filter(|&h| (l as i64 - h as i64) % 3 == 0) {
                let p = GammaParams::new(m, l, h)?;
                let g = build_gamma(p)?;
                let c = canonical_code(p)?;
                let b = gcd(l as i64 - h as i64, m as i64) as usize;
                let ml = (m * l) as usize;
                let perfect = verify_code(g.digraph(), c.code.vertices())?.is_perfect();
                let sizes = c.code.len() * 3 == ml && c.classes.iter().all(|cr| cr.len() * b == ml);
                let disjoint = c.classes.iter().map(|cr| cr.len()).sum::<usize>() == c.code.len();
                checked += 1;
                if !(perfect && sizes && disjoint) {
                    failures.push(format!("{p}: perfect={perfect} sizes={sizes} disjoint={disjoint}"));
                }
            }
        }
    }
    println!(
        "prop24 max-m {max_m} max-l {max_l}: {checked} triples, {} failures",
        failures.len()
    );
    for f in &failures {
        println!("  {f}");
    }
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify_prop23(max_ml: u64) -> Result<ExitCode> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in 2..=max_ml {
        for l in 1..=max_ml / m {
            for h in 0..m {
                let p = GammaParams::new(m, l, h)?;
                if p.is_degenerate() || !check_conditions(p).sigma_ok {
                    continue;
                }
                checked += 1;
                match realize_as_cayley(p)? {
                    Realization::Proper { cayley, map } => {
                        let g = build_gamma(p)?;
                        if !verify_isomorphism(g.digraph(), cayley.digraph(), &map) {
                            failures.push(format!("{p}: map fails arc check"));
                        }
                    }
                    Realization::Improper { reason, .. } => failures.push(format!("{p}: improper ({reason})")),
                }
            }
        }
    }
    println!("prop23 max-ml {max_ml}: {checked} triples, {} failures", failures.len());
    for f in &failures {
        println!("  {f}");
    }
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify(cmd: VerifyCmd) -> Result<ExitCode> {
    match cmd {
        VerifyCmd::Thm1(a) => run_sweep("thm1", &a, DiscrepancyKind::THM1),
        VerifyCmd::Thm2(a) => run_sweep("thm2", &a, DiscrepancyKind::THM2),
        VerifyCmd::Lemmas(a) => run_sweep("lemmas", &a, DiscrepancyKind::LEMMAS),
        VerifyCmd::Prop24 { max_m, max_l } => verify_prop24(max_m, max_l),
        VerifyCmd::Prop23 { max_ml } => verify_prop23(max_ml),
    }
}
