use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qldpc_feedback::feedback::{default_n_a, FeedbackConfig, Strategy};
use qldpc_feedback::sim::codes::{circulant_row, code_from_matrix, load_code};
use qldpc_feedback::sim::{
    run_experiment, trace_instance, write_block_log, write_csv, write_trajectory, ExperimentSpec,
    TracePlan, TraceSpec,
};
use qldpc_feedback::stabilizer::{
    construction_b, construction_b_matrix, emit_alist, emit_stabilizer_text, parse_alist,
    PauliString, SparseMatrix, StabilizerCode, Syndrome,
};

#[derive(Parser)]
#[command(
    name = "qldpc-feedback",
    version,
    about = "GF(4) belief propagation with feedback for sparse quantum codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo block error rate and iteration count estimates
    Simulate(SimulateArgs),
    /// Per-iteration beliefs of a single decoding instance
    Trace(TraceArgs),
    /// Write a code to a file
    BuildCode(BuildArgs),
}

#[derive(Args, Default)]
struct SimulateArgs {
    /// key=value file with defaults for any of the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in code name or code file
    #[arg(long)]
    code: Option<String>,
    /// Comma-separated channel parameters
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated list of standard, pc08, enhanced
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    t_pert: Option<usize>,
    /// Adjustment budget, or AUTO for the length-dependent default
    #[arg(long)]
    n_a: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Decode this fixed error in every block
    #[arg(long)]
    inject: Option<String>,
    /// CSV output (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON-lines log with one record per block
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args, Default)]
struct TraceArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// Measured syndrome, e.g. "(-1,+1,+1,+1)" or "-+++"
    #[arg(long, allow_hyphen_values = true)]
    syndrome: Option<String>,
    /// Error whose syndrome is decoded
    #[arg(long)]
    error: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    t_pert: Option<usize>,
    #[arg(long)]
    n_a: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Output to read frustrated checks from instead of the initial run's
    #[arg(long)]
    reference: Option<String>,
    /// Adjust through this check (0-based) instead of the random loop
    #[arg(long)]
    check: Option<usize>,
    /// Qubit (0-based) reset by the enhanced strategy
    #[arg(long)]
    qubit: Option<usize>,
    /// Perturbation rounds on --check for pc08 (default: n_a)
    #[arg(long)]
    rounds: Option<usize>,
    /// Trajectory output (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(subcommand)]
    kind: BuildKind,
}

#[derive(Subcommand)]
enum BuildKind {
    /// CSS code from the circulant matrix [C, C^T]
    ConstructionB {
        /// Circulant size
        #[arg(long)]
        size: usize,
        /// Comma-separated positions of the ones in the first row of C
        #[arg(long)]
        offsets: String,
        /// Comma-separated rows of [C, C^T] to keep (default: all)
        #[arg(long)]
        rows: Option<String>,
        /// Stabilizer text output
        #[arg(long)]
        out: PathBuf,
        /// Also write the binary check matrix as alist
        #[arg(long)]
        alist: Option<PathBuf>,
    },
    /// Entanglement-assisted code from a binary or GF(4) alist check matrix
    Ea {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-emit a built-in or file code as stabilizer text
    Export {
        #[arg(long)]
        code: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_config(path: &Path, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
        let key = k.trim().replace('_', "-");
        if !allowed.contains(&key.as_str()) {
            bail!("{}:{}: unknown key {key:?}", path.display(), i + 1);
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn fill<T: FromStr>(slot: &mut Option<T>, map: &BTreeMap<String, String>, key: &str) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        if let Some(v) = map.get(key) {
            *slot = Some(v.parse().map_err(|e| anyhow!("config key {key}: {e}"))?);
        }
    }
    Ok(())
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| anyhow!("bad {what} {t:?}: {e}"))
        })
        .collect()
}

fn parse_n_a(s: Option<&str>) -> Result<Option<usize>> {
    match s {
        None => Ok(None),
        Some(v) if v.eq_ignore_ascii_case("auto") => Ok(None),
        Some(v) => {
            Ok(Some(v.parse().map_err(|_| {
                anyhow!("n-a must be AUTO or an integer, got {v:?}")
            })?))
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn describe(code: &StabilizerCode) -> String {
    format!(
        "n={} k={} c={} checks={} net_rate={:.4}",
        code.n_sent(),
        code.logical_k(),
        code.n_ebits(),
        code.num_checks(),
        code.net_rate()
    )
}

fn simulate(mut a: SimulateArgs) -> Result<()> {
    if let Some(path) = a.config.clone() {
        let map = read_config(
            &path,
            &[
                "code", "p", "strategy", "blocks", "seed", "max-iter", "t-pert", "n-a", "delta",
                "threads", "inject", "out", "log",
            ],
        )?;
        fill(&mut a.code, &map, "code")?;
        fill(&mut a.p, &map, "p")?;
        fill(&mut a.strategy, &map, "strategy")?;
        fill(&mut a.blocks, &map, "blocks")?;
        fill(&mut a.seed, &map, "seed")?;
        fill(&mut a.max_iter, &map, "max-iter")?;
        fill(&mut a.t_pert, &map, "t-pert")?;
        fill(&mut a.n_a, &map, "n-a")?;
        fill(&mut a.delta, &map, "delta")?;
        fill(&mut a.threads, &map, "threads")?;
        fill(&mut a.inject, &map, "inject")?;
        fill(&mut a.out, &map, "out")?;
        fill(&mut a.log, &map, "log")?;
    }
    let code_name = a.code.ok_or_else(|| anyhow!("--code is required"))?;
    let code = load_code(&code_name)?;
    let spec = ExperimentSpec {
        ps: parse_list(&a.p.ok_or_else(|| anyhow!("--p is required"))?, "p")?,
        strategies: parse_list(a.strategy.as_deref().unwrap_or("standard"), "strategy")?,
        max_iter: a.max_iter.unwrap_or(FeedbackConfig::DEFAULT_MAX_ITER),
        t_pert: a.t_pert.unwrap_or(FeedbackConfig::DEFAULT_T_PERT),
        n_a: parse_n_a(a.n_a.as_deref())?,
        delta: a.delta.unwrap_or(FeedbackConfig::DEFAULT_DELTA),
        blocks: a.blocks.unwrap_or(1000),
        seed: a.seed.unwrap_or(1),
        threads: a.threads,
        injected_error: a.inject.as_deref().map(PauliString::from_str).transpose()?,
        keep_blocks: a.log.is_some(),
    };
    eprintln!(
        "{code_name}: {}, n_a={}",
        describe(&code),
        spec.n_a.unwrap_or_else(|| default_n_a(code.n_sent()))
    );
    let result = run_experiment(&code, &spec)?;
    let mut w = output(a.out.as_deref())?;
    write_csv(&mut w, &result.stats)?;
    w.flush()?;
    if let Some(log) = a.log.as_deref() {
        let mut w = output(Some(log))?;
        write_block_log(&mut w, &result.blocks)?;
        w.flush()?;
    }
    Ok(())
}

fn trace(mut a: TraceArgs) -> Result<()> {
    if let Some(path) = a.config.clone() {
        let map = read_config(
            &path,
            &[
                "code",
                "p",
                "syndrome",
                "error",
                "strategy",
                "seed",
                "max-iter",
                "t-pert",
                "n-a",
                "delta",
                "reference",
                "check",
                "qubit",
                "rounds",
                "out",
            ],
        )?;
        fill(&mut a.code, &map, "code")?;
        fill(&mut a.p, &map, "p")?;
        fill(&mut a.syndrome, &map, "syndrome")?;
        fill(&mut a.error, &map, "error")?;
        fill(&mut a.strategy, &map, "strategy")?;
        fill(&mut a.seed, &map, "seed")?;
        fill(&mut a.max_iter, &map, "max-iter")?;
        fill(&mut a.t_pert, &map, "t-pert")?;
        fill(&mut a.n_a, &map, "n-a")?;
        fill(&mut a.delta, &map, "delta")?;
        fill(&mut a.reference, &map, "reference")?;
        fill(&mut a.check, &map, "check")?;
        fill(&mut a.qubit, &map, "qubit")?;
        fill(&mut a.rounds, &map, "rounds")?;
        fill(&mut a.out, &map, "out")?;
    }
    let code = load_code(
        a.code
            .as_deref()
            .ok_or_else(|| anyhow!("--code is required"))?,
    )?;
    let p: f64 = a.p.as_deref().unwrap_or("0.1").parse().context("bad --p")?;
    let syndrome = match (&a.syndrome, &a.error) {
        (Some(s), None) => s.parse::<Syndrome>()?,
        (None, Some(e)) => code.syndrome(&e.parse()?)?,
        _ => bail!("give exactly one of --syndrome and --error"),
    };
    let strategy: Strategy = a.strategy.as_deref().unwrap_or("standard").parse()?;
    let n_a = parse_n_a(a.n_a.as_deref())?.unwrap_or_else(|| default_n_a(code.n_sent()));
    let config = FeedbackConfig {
        strategy,
        max_iter: a.max_iter.unwrap_or(FeedbackConfig::DEFAULT_MAX_ITER),
        t_pert: a.t_pert.unwrap_or(FeedbackConfig::DEFAULT_T_PERT),
        n_a,
        delta: a.delta.unwrap_or(FeedbackConfig::DEFAULT_DELTA),
    };
    let plan = match (strategy, a.check, a.qubit) {
        (_, None, None) => TracePlan::Loop,
        (Strategy::Enhanced, Some(check), Some(qubit)) => TracePlan::Enhanced { check, qubit },
        (Strategy::Pc08, Some(check), None) => TracePlan::Pc08 {
            check,
            rounds: a.rounds.unwrap_or(n_a),
        },
        _ => bail!(
            "--check with --qubit needs --strategy enhanced; --check alone needs --strategy pc08"
        ),
    };
    let spec = TraceSpec {
        p,
        syndrome,
        config,
        seed: a.seed.unwrap_or(1),
        reference: a
            .reference
            .as_deref()
            .map(PauliString::from_str)
            .transpose()?,
        plan,
    };
    let result = trace_instance(&code, &spec)?;
    let mut w = output(a.out.as_deref())?;
    write_trajectory(&mut w, &result)?;
    w.flush()?;
    let out = &result.outcome;
    eprintln!(
        "initial output {}; final output {} with syndrome {}; converged={} iterations={} adjustments={}",
        result.initial_output,
        out.e_out,
        code.syndrome(&out.e_out)?,
        out.converged,
        out.iterations,
        result.adjustments
    );
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn build_code(a: BuildArgs) -> Result<()> {
    let code = match a.kind {
        BuildKind::ConstructionB {
            size,
            offsets,
            rows,
            out,
            alist,
        } => {
            if size == 0 {
                bail!("--size must be positive");
            }
            let first_row = circulant_row(size, &parse_list(&offsets, "offset")?);
            let rows = rows.as_deref().map(|r| parse_list(r, "row")).transpose()?;
            let code = construction_b(&first_row, rows.as_deref())?;
            if let Some(path) = alist {
                let h = construction_b_matrix(&first_row, rows.as_deref())?;
                let dense: Vec<Vec<_>> = h
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|&b| {
                                if b {
                                    qldpc_feedback::gf4::Gf4::ONE
                                } else {
                                    qldpc_feedback::gf4::Gf4::ZERO
                                }
                            })
                            .collect()
                    })
                    .collect();
                write_file(&path, &emit_alist(&SparseMatrix::from_dense(&dense)))?;
            }
            write_file(&out, &emit_stabilizer_text(&code))?;
            code
        }
        BuildKind::Ea { input, out } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let code = code_from_matrix(&parse_alist(&text)?)?;
            write_file(&out, &emit_stabilizer_text(&code))?;
            code
        }
        BuildKind::Export { code, out } => {
            let code = load_code(&code)?;
            write_file(&out, &emit_stabilizer_text(&code))?;
            code
        }
    };
    eprintln!("{}", describe(&code));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Trace(a) => trace(a),
        Command::BuildCode(a) => build_code(a),
    }
}
