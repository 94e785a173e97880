//! `plic`: generate, encode, verify, and benchmark pliable index codes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 infeasible oracle search.

mod bench;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pliable::decode;
use pliable::gf::Matrix;
use pliable::greedy::{encode_with_options, round_log_json};
use pliable::greedy_t::encode_t_with_options;
use pliable::instance::{generate, GenSpec, Instance, Severity};
use pliable::oracle;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "plic", about = "linear pliable index coding toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem instance and write it as JSON.
    Gen(GenArgs),
    /// Run a greedy encoder on an instance; writes the reduced coding matrix.
    Encode(EncodeArgs),
    /// Check which clients a coding matrix satisfies.
    Verify(VerifyArgs),
    /// Exhaustively search for the optimal code length.
    Opt(OptArgs),
    /// Minimum rank over all fitting matrices (t = 1 instances).
    Minrank(MinrankArgs),
    /// Random-graph lower bound and constructive-code parameters.
    Bounds(BoundsArgs),
    /// Run an experiment suite and write a CSV of results.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Kind {
    Random,
    Complete,
    CompleteT,
    Heterogeneous,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated block probabilities for the heterogeneous kind.
    #[arg(long, value_delimiter = ',')]
    group_probs: Vec<f64>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Alg {
    Bingreedy,
    BingreedyT,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, value_enum)]
    alg: Alg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the per-round log as JSON.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Once a client drops out of the satisfied set during a group, keep
    /// her out for the rest of that group.
    #[arg(long)]
    relaxed_unsat: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    max_k: usize,
}

#[derive(Args)]
struct MinrankArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    q: u32,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    /// When given, also report whether the constructive code fits.
    #[arg(long)]
    m: Option<usize>,
}

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err);
            let code = match err.downcast_ref::<pliable::Error>() {
                Some(pliable::Error::InfeasibleSearch(_))
                | Some(pliable::Error::NoCodeWithinLimit { .. }) => EXIT_INFEASIBLE,
                _ => EXIT_INVALID_INPUT,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Opt(args) => cmd_opt(args),
        Command::Minrank(args) => cmd_minrank(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Bench(args) => bench::run(args),
    }
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance {}", path.display()))?;
    let inst: Instance =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(inst)
}

pub(crate) fn load_valid_instance(path: &Path) -> anyhow::Result<Instance> {
    let inst = load_instance(path)?;
    let violations = inst.validate();
    let mut errors = 0;
    for v in &violations {
        match v.severity() {
            Severity::Error => {
                errors += 1;
                eprintln!("error: {}", v);
            }
            Severity::Warning => eprintln!("warning: {}", v),
        }
    }
    if errors > 0 {
        anyhow::bail!("instance fails validation with {} error(s)", errors);
    }
    Ok(inst)
}

fn load_matrix(path: &Path) -> anyhow::Result<Matrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading matrix {}", path.display()))?;
    let m: Matrix =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(m)
}

fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let need = |opt: Option<usize>, name: &str| {
        opt.ok_or_else(|| anyhow::anyhow!("--{} is required for this kind", name))
    };
    let spec = match args.kind {
        Kind::Complete => GenSpec::Complete { m: args.m },
        Kind::CompleteT => GenSpec::CompleteT {
            m: args.m,
            t: args.t,
        },
        Kind::Random => GenSpec::Random {
            m: args.m,
            n: need(args.n, "n")?,
            p: args
                .p
                .ok_or_else(|| anyhow::anyhow!("--p is required for random instances"))?,
            t: args.t,
            seed: args.seed,
        },
        Kind::Heterogeneous => GenSpec::Heterogeneous {
            m: args.m,
            n: need(args.n, "n")?,
            group_probs: args.group_probs.clone(),
            t: args.t,
            seed: args.seed,
        },
    };
    let inst = generate(&spec)?;
    write_json(&args.out, &inst)?;
    println!(
        "wrote instance with m = {}, n = {}, t = {} to {}",
        inst.m(),
        inst.n(),
        inst.t(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_encode(args: EncodeArgs) -> anyhow::Result<ExitCode> {
    let inst = load_valid_instance(&args.input)?;
    let (res, name) = match args.alg {
        Alg::Bingreedy => (encode_with_options(&inst, args.relaxed_unsat)?, "bingreedy"),
        Alg::BingreedyT => (
            encode_t_with_options(&inst, args.relaxed_unsat)?,
            "bingreedy-t",
        ),
    };
    write_json(&args.out, &res.reduced)?;
    if let Some(log) = &args.log {
        write_json(log, &round_log_json(&res, name))?;
    }
    println!(
        "{}: {} rounds, raw length {}, reduced length {} -> {}",
        name,
        res.rounds.len(),
        res.raw_len,
        res.reduced_len,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let inst = load_valid_instance(&args.input)?;
    let matrix = load_matrix(&args.matrix)?;
    let report = decode::verify(&matrix, &inst)?;
    println!(
        "{} of {} clients satisfied (t = {})",
        report.satisfied_count,
        inst.n(),
        inst.t()
    );
    for (i, (d, ok)) in report
        .decodable
        .iter()
        .zip(&report.satisfied)
        .enumerate()
    {
        if !ok {
            let decodable: Vec<usize> = d.iter().map(|&j| j + 1).collect();
            println!("client {} unsatisfied, decodes only {:?}", i + 1, decodable);
        }
    }
    if report.all_satisfied() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFY_FAILED))
    }
}

fn cmd_opt(args: OptArgs) -> anyhow::Result<ExitCode> {
    let inst = load_valid_instance(&args.input)?;
    let res = oracle::optimal_code_length(&inst, args.q, args.max_k)?;
    let out = serde_json::json!({
        "optimal_len": res.optimal_len,
        "matrices_examined": res.matrices_examined,
        "witness": serde_json::to_value(&res.witness)?,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_minrank(args: MinrankArgs) -> anyhow::Result<ExitCode> {
    let inst = load_valid_instance(&args.input)?;
    let rank = oracle::minrank_fit(&inst, args.q)?;
    println!("{}", serde_json::json!({ "minrank": rank }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(args: BoundsArgs) -> anyhow::Result<ExitCode> {
    let report = pliable::bounds::bound_report(args.n, args.p)?;
    let mut out = serde_json::to_value(&report)?;
    if let Some(m) = args.m {
        out["m"] = serde_json::json!(m);
        out["constructive_feasible"] = serde_json::json!(m >= report.min_messages);
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}
