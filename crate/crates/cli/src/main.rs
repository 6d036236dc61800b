use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use kernelsched::bench::{run_bench, write_report, BenchConfig, Grid};
use kernelsched::gen::{generate, Family, GenParams};
use kernelsched::iea::{solve_exact, type_names, Certificate, SolveOptions};
use kernelsched::model::validate;
use kernelsched::oracle::{brute_force, preemptive_ldt_bound, DEFAULT_CAP};
use kernelsched::ptas::{solve_approx, PtasOptions};
use kernelsched::{Instance, Schedule};

const SCHEMA: &str = "kernelsched/1";

#[derive(Parser)]
#[command(name = "kernelsched", version, about = "Single-machine scheduling with release and delivery times")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        rmax: i64,
        #[arg(long, default_value_t = 20)]
        pmax: i64,
        #[arg(long, default_value_t = 20)]
        qmax: i64,
        #[arg(long, default_value = "uniform")]
        family: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance file (`-` for stdin) and print a JSON report.
    Solve(SolveArgs),
    /// Run all solvers over a grid of generated instances.
    Bench {
        /// For example `n=6,8;family=tight-transit;pmax=10`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 10)]
        reps: u64,
        /// Comma-separated accuracy parameters.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        k: Vec<u64>,
        #[arg(long, default_value_t = 9)]
        oracle_cap: usize,
        #[arg(long, default_value_t = 50)]
        solve_cap: usize,
        #[arg(long, default_value_t = 20_000)]
        iea_budget: u64,
        #[arg(long, default_value_t = 200_000)]
        exhaustive_budget: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "method")]
struct Method {
    #[arg(long)]
    exact: bool,
    #[arg(long, value_name = "K")]
    ptas: Option<u64>,
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    method: Method,
    /// Instance file or `-`.
    input: String,
    /// Include the job typing and kernels in the report.
    #[arg(long)]
    explain: bool,
    /// Keep permutations the dominance test would discard.
    #[arg(long)]
    no_dominance: bool,
    /// Also write the schedule as `job start` lines.
    #[arg(long)]
    schedule_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    oracle_cap: usize,
    /// Return the scheme's own schedule even when the factor is unconfirmed.
    #[arg(long)]
    no_fallback: bool,
    /// Add wall-clock time under `timing`.
    #[arg(long)]
    timing: bool,
}

/// Errors that map to exit code 3.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Debug)]
struct InvariantError(String);

impl std::fmt::Display for InvariantError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvariantError {}

fn input_err(e: impl Into<anyhow::Error>) -> anyhow::Error {
    InputError(e.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InvariantError>().is_some() {
                ExitCode::from(4)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen { n, seed, rmax, pmax, qmax, family, output } => {
            let family: Family = family.parse().map_err(input_err)?;
            let inst = generate(&GenParams { n, rmax, pmax, qmax, family }, seed).map_err(input_err)?;
            emit(output.as_ref(), &inst.to_text())
        }
        Cmd::Solve(args) => solve(args),
        Cmd::Bench { grid, reps, k, oracle_cap, solve_cap, iea_budget, exhaustive_budget, output } => {
            let grid = Grid::parse(&grid).map_err(input_err)?;
            let cfg = BenchConfig { grid, reps, ks: k, oracle_cap, solve_cap, iea_budget, exhaustive_budget };
            let (report, timing) = run_bench(&cfg).map_err(input_err)?;
            write_report(&output, &report, &timing)?;
            for s in &report.summary {
                println!("n={} instances={} mean_permuted_share={:.4}", s.n, s.instances, s.mean_permuted_share);
            }
            Ok(())
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_instance(input: &str) -> Result<Instance> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin").map_err(input_err)?;
        s
    } else {
        fs::read_to_string(input).with_context(|| format!("reading {input}")).map_err(input_err)?
    };
    Instance::parse(&text).with_context(|| format!("parsing {input}")).map_err(input_err)
}

fn schedule_json(s: &Schedule) -> Value {
    Value::Array(s.entries.iter().map(|e| json!({"job": e.job, "start": e.start})).collect())
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = read_instance(&args.input)?;
    let started = Instant::now();
    let mut out = json!({
        "schema": SCHEMA,
        "n": inst.len(),
        "lower_bound": inst.lower_bound(),
        "preemptive_bound": preemptive_ldt_bound(&inst),
    });
    let opts = SolveOptions { dominance: !args.no_dominance, ..SolveOptions::default() };
    let schedule = if args.method.exact {
        let r = solve_exact(&inst, &opts);
        out["method"] = json!("exact");
        out["makespan"] = json!(r.makespan);
        match &r.certificate {
            Certificate::Optimal { by } => {
                out["certificate"] = json!("optimal");
                out["certified_by"] = json!(by);
            }
            Certificate::Incumbent { .. } => out["certificate"] = json!("incumbent"),
        }
        out["permuted_count"] = json!(r.stats.permuted_final);
        out["permutations"] = json!(r.stats.permutations);
        out["stats"] = serde_json::to_value(&r.stats)?;
        if args.explain {
            out["types"] = json!(type_names(&r.config));
            out["configuration"] = serde_json::to_value(&r.config)?;
        }
        r.schedule
    } else if let Some(k) = args.method.ptas {
        let fallback = if args.no_fallback { None } else { Some(opts) };
        let popts = PtasOptions { k, dominance: !args.no_dominance, fallback };
        let r = solve_approx(&inst, &popts).map_err(input_err)?;
        out["method"] = json!("ptas");
        out["k"] = json!(k);
        out["makespan"] = json!(r.makespan);
        out["certificate"] = serde_json::to_value(&r.certificate)?;
        out["confirmed"] = json!(r.stats.confirmed);
        out["permuted_long"] = json!(r.stats.permuted_long);
        out["permutations"] = json!(r.stats.permutations);
        out["stats"] = serde_json::to_value(&r.stats)?;
        r.schedule
    } else {
        let (s, v) = brute_force(&inst, args.oracle_cap, true).map_err(input_err)?;
        out["method"] = json!("oracle");
        out["makespan"] = json!(v);
        out["certificate"] = json!("optimal");
        s
    };
    let violations = validate(&inst, &schedule, true);
    if !violations.is_empty() {
        return Err(InvariantError(format!("infeasible schedule: {violations:?}")).into());
    }
    out["schedule"] = schedule_json(&schedule);
    if args.timing {
        out["timing"] = json!({"micros": started.elapsed().as_micros() as u64});
    }
    if let Some(path) = &args.schedule_out {
        let text: String = schedule.entries.iter().map(|e| format!("{} {}\n", e.job, e.start)).collect();
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}
