//! Experiment suites with reproducible CSV output.
//!
//! Every row derives its own seed from the master seed and the row index
//! (`splitmix64(master ^ row·0x9E3779B97F4A7C15)`), so a suite is fully
//! determined by its parameters. The `ms` column is 0 unless `--timing` is
//! given; wall-clock timings would break byte-for-byte reproducibility.

use crate::Alg;
use anyhow::Context;
use clap::{Args, ValueEnum};
use pliable::bounds;
use pliable::decode;
use pliable::greedy::{encode, EncodeResult};
use pliable::greedy_t::encode_t;
use pliable::instance::{generate, GenSpec, Instance};
use pliable::oracle;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Scaling,
    Gap,
    Trequests,
    Bounds,
    Custom,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long)]
    out: PathBuf,
    /// Client counts (scaling, trequests).
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    /// Message counts (gap).
    #[arg(long, value_delimiter = ',')]
    m_list: Vec<usize>,
    /// Request counts (trequests).
    #[arg(long, value_delimiter = ',')]
    t_list: Vec<usize>,
    /// Edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Add the n = 18 sweep to the gap suite (the exhaustive oracle may
    /// refuse the larger searches).
    #[arg(long)]
    include_n18: bool,
    /// Oracle field size (gap, custom).
    #[arg(long, default_value_t = 2)]
    opt_q: u32,
    /// Oracle length ceiling; defaults to m.
    #[arg(long)]
    max_k: Option<usize>,
    /// Clients for the bounds suite.
    #[arg(long)]
    n: Option<usize>,
    /// Messages for the bounds suite.
    #[arg(long)]
    m: Option<usize>,
    /// Heterogeneous block probabilities for the scaling suite; leaves the
    /// homogeneous p unused.
    #[arg(long, value_delimiter = ',')]
    group_probs: Vec<f64>,
    /// Instance file (custom).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Encoder for the custom suite; defaults by the instance's t.
    #[arg(long, value_enum)]
    alg: Option<Alg>,
    /// Record wall-clock milliseconds (breaks byte reproducibility).
    #[arg(long)]
    timing: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn row_seed(master: u64, row: u64) -> u64 {
    splitmix64(master ^ row.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct BenchRow {
    suite: &'static str,
    n: usize,
    m: usize,
    p: Option<f64>,
    t: usize,
    seed: Option<u64>,
    alg: &'static str,
    raw_len: usize,
    reduced_len: usize,
    opt_len: Option<usize>,
    gap: Option<i64>,
    ms: u128,
}

pub const CSV_HEADER: &str = "suite,n,m,p,t,seed,alg,raw_len,reduced_len,opt_len,gap,ms";

impl BenchRow {
    fn csv(&self) -> String {
        let opt = |x: &Option<usize>| x.map_or(String::new(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.suite,
            self.n,
            self.m,
            self.p.map_or(String::new(), |v| v.to_string()),
            self.t,
            self.seed.map_or(String::new(), |v| v.to_string()),
            self.alg,
            self.raw_len,
            self.reduced_len,
            opt(&self.opt_len),
            self.gap.map_or(String::new(), |v| v.to_string()),
            self.ms
        )
    }
}

fn m_for(n: usize) -> usize {
    (n as f64).powf(0.75).ceil() as usize
}

struct Timer {
    enabled: bool,
    start: Instant,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Self {
            enabled,
            start: Instant::now(),
        }
    }

    fn ms(&self) -> u128 {
        if self.enabled {
            self.start.elapsed().as_millis()
        } else {
            0
        }
    }
}

/// Encode + verify; a code that fails its own verification is a bug, not a
/// data point.
fn encode_checked(inst: &Instance) -> anyhow::Result<EncodeResult> {
    let res = if inst.t() == 1 {
        encode(inst)?
    } else {
        encode_t(inst)?
    };
    let report = decode::verify(&res.code, inst)?;
    anyhow::ensure!(
        report.all_satisfied(),
        "emitted code fails verification; refusing to record the row"
    );
    Ok(res)
}

pub fn run(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let mut rows: Vec<BenchRow> = Vec::new();
    match args.suite {
        Suite::Scaling => run_scaling(&args, &mut rows)?,
        Suite::Gap => run_gap(&args, &mut rows)?,
        Suite::Trequests => run_trequests(&args, &mut rows)?,
        Suite::Bounds => run_bounds(&args, &mut rows)?,
        Suite::Custom => run_custom(&args, &mut rows)?,
    }
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv());
        text.push('\n');
    }
    std::fs::write(&args.out, text)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn run_scaling(args: &BenchArgs, rows: &mut Vec<BenchRow>) -> anyhow::Result<()> {
    let ns = if args.n_list.is_empty() {
        vec![64, 128, 256, 512]
    } else {
        args.n_list.clone()
    };
    let p = args.p.unwrap_or(0.3);
    let mut row_index = 0u64;
    for &n in &ns {
        let m = m_for(n);
        for _ in 0..args.trials {
            let seed = row_seed(args.seed, row_index);
            row_index += 1;
            let inst = if args.group_probs.is_empty() {
                generate(&GenSpec::Random { m, n, p, t: 1, seed })?
            } else {
                generate(&GenSpec::Heterogeneous {
                    m,
                    n,
                    group_probs: args.group_probs.clone(),
                    t: 1,
                    seed,
                })?
            };
            let timer = Timer::new(args.timing);
            let res = encode_checked(&inst)?;
            let log2n = (n as f64).log2();
            anyhow::ensure!(
                (res.raw_len as f64) <= 2.0 / 1.5f64.log2() * log2n * log2n + 1e-9,
                "raw length {} beyond the worst-case bound at n = {}",
                res.raw_len,
                n
            );
            rows.push(BenchRow {
                suite: "scaling",
                n,
                m,
                p: if args.group_probs.is_empty() {
                    Some(p)
                } else {
                    None
                },
                t: 1,
                seed: Some(seed),
                alg: "bingreedy",
                raw_len: res.raw_len,
                reduced_len: res.reduced_len,
                opt_len: None,
                gap: None,
                ms: timer.ms(),
            });
        }
    }
    Ok(())
}

fn run_gap(args: &BenchArgs, rows: &mut Vec<BenchRow>) -> anyhow::Result<()> {
    let mut ns = vec![12usize];
    if args.include_n18 {
        eprintln!(
            "note: n = 18 may push the exhaustive oracle past its feasibility \
             budget; such rows get an empty opt_len"
        );
        ns.push(18);
    }
    let ms = if args.m_list.is_empty() {
        vec![4, 5, 6]
    } else {
        args.m_list.clone()
    };
    let p = args.p.unwrap_or(0.3);
    let mut row_index = 0u64;
    for &n in &ns {
        for &m in &ms {
            for _ in 0..args.trials {
                let seed = row_seed(args.seed, row_index);
                row_index += 1;
                let inst = generate(&GenSpec::Random { m, n, p, t: 1, seed })?;
                let timer = Timer::new(args.timing);
                let res = encode_checked(&inst)?;
                let k_max = args.max_k.unwrap_or(m);
                let opt_len = match oracle::optimal_code_length(&inst, args.opt_q, k_max) {
                    Ok(o) => Some(o.optimal_len),
                    Err(pliable::Error::InfeasibleSearch(msg)) => {
                        eprintln!("oracle skipped (n = {}, m = {}, seed = {}): {}", n, m, seed, msg);
                        None
                    }
                    Err(e) => return Err(e.into()),
                };
                let gap = opt_len.map(|k| res.reduced_len as i64 - k as i64);
                if let Some(g) = gap {
                    anyhow::ensure!(g >= 0, "greedy beat the exhaustive optimum");
                }
                rows.push(BenchRow {
                    suite: "gap",
                    n,
                    m,
                    p: Some(p),
                    t: 1,
                    seed: Some(seed),
                    alg: "bingreedy",
                    raw_len: res.raw_len,
                    reduced_len: res.reduced_len,
                    opt_len,
                    gap,
                    ms: timer.ms(),
                });
            }
        }
    }
    Ok(())
}

fn run_trequests(args: &BenchArgs, rows: &mut Vec<BenchRow>) -> anyhow::Result<()> {
    let ns = if args.n_list.is_empty() {
        vec![64, 128, 256]
    } else {
        args.n_list.clone()
    };
    let ts = if args.t_list.is_empty() {
        vec![2, 5]
    } else {
        args.t_list.clone()
    };
    let p = args.p.unwrap_or(0.3);
    let mut row_index = 0u64;
    for &n in &ns {
        let m = m_for(n);
        for &t in &ts {
            for _ in 0..args.trials {
                let seed = row_seed(args.seed, row_index);
                row_index += 1;
                let inst = generate(&GenSpec::Random { m, n, p, t, seed })?;
                let timer = Timer::new(args.timing);
                let res = encode_checked(&inst)?;
                let log2n = (n as f64).log2();
                let bound =
                    2.0 * log2n.ceil() * ((t as f64 + log2n) / (12f64 / 11.0).log2()).ceil();
                anyhow::ensure!(
                    (res.raw_len as f64) <= bound + 1e-9,
                    "raw length {} beyond the t-requests bound at n = {}, t = {}",
                    res.raw_len,
                    n,
                    t
                );
                rows.push(BenchRow {
                    suite: "trequests",
                    n,
                    m,
                    p: Some(p),
                    t,
                    seed: Some(seed),
                    alg: if t == 1 { "bingreedy" } else { "bingreedy-t" },
                    raw_len: res.raw_len,
                    reduced_len: res.reduced_len,
                    opt_len: None,
                    gap: None,
                    ms: timer.ms(),
                });
            }
        }
    }
    Ok(())
}

fn run_bounds(args: &BenchArgs, rows: &mut Vec<BenchRow>) -> anyhow::Result<()> {
    let n = args.n.unwrap_or(256);
    let p = args.p.unwrap_or(0.5);
    let report = bounds::bound_report(n, p)?;
    let m = args.m.unwrap_or(report.min_messages.max(m_for(n)));
    let code = bounds::constant_weight_code(m, n, p)?;
    let mut constweight_ok = 0usize;
    let mut greedy_above_bound = 0usize;
    let ceil_bound = report.lower_bound.ceil() as usize;
    for row_index in 0..args.trials as u64 {
        let seed = row_seed(args.seed, row_index);
        let inst = generate(&GenSpec::Random { m, n, p, t: 1, seed })?;
        let timer = Timer::new(args.timing);
        let res = encode_checked(&inst)?;
        if decode::verify(&code, &inst)?.all_satisfied() {
            constweight_ok += 1;
        }
        if res.reduced_len >= ceil_bound {
            greedy_above_bound += 1;
        }
        rows.push(BenchRow {
            suite: "bounds",
            n,
            m,
            p: Some(p),
            t: 1,
            seed: Some(seed),
            alg: "bingreedy",
            raw_len: res.raw_len,
            reduced_len: res.reduced_len,
            opt_len: None,
            gap: None,
            ms: timer.ms(),
        });
    }
    let summary = serde_json::json!({
        "bound_report": serde_json::to_value(&report)?,
        "m": m,
        "trials": args.trials,
        "constant_weight_rows": code.rows(),
        "constant_weight_satisfied_trials": constweight_ok,
        "greedy_at_least_ceil_bound_trials": greedy_above_bound,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn run_custom(args: &BenchArgs, rows: &mut Vec<BenchRow>) -> anyhow::Result<()> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("--in is required for the custom suite"))?;
    let inst = crate::load_valid_instance(path)?;
    let alg = match args.alg {
        Some(Alg::Bingreedy) => Alg::Bingreedy,
        Some(Alg::BingreedyT) => Alg::BingreedyT,
        None if inst.t() == 1 => Alg::Bingreedy,
        None => Alg::BingreedyT,
    };
    let timer = Timer::new(args.timing);
    let res = match alg {
        Alg::Bingreedy => encode(&inst)?,
        Alg::BingreedyT => encode_t(&inst)?,
    };
    let report = decode::verify(&res.code, &inst)?;
    anyhow::ensure!(report.all_satisfied(), "emitted code fails verification");
    let opt_len = match args.max_k {
        Some(k_max) => Some(oracle::optimal_code_length(&inst, args.opt_q, k_max)?.optimal_len),
        None => None,
    };
    rows.push(BenchRow {
        suite: "custom",
        n: inst.n(),
        m: inst.m(),
        p: None,
        t: inst.t(),
        seed: None,
        alg: match alg {
            Alg::Bingreedy => "bingreedy",
            Alg::BingreedyT => "bingreedy-t",
        },
        raw_len: res.raw_len,
        reduced_len: res.reduced_len,
        opt_len,
        gap: opt_len.map(|k| res.reduced_len as i64 - k as i64),
        ms: timer.ms(),
    });
    Ok(())
}
