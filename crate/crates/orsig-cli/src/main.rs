//! `orsig` — batch front end for the signature coding toolkit.
//!
//! Subcommands: `gen` writes a random code file, `check` verifies the
//! zero-false-drop property, `simulate` runs seeded experiments against the
//! analytic bounds, and `bounds` tabulates the bounds themselves, optionally
//! sweeping one parameter. Output is machine-first (CSV or JSON); `--pretty`
//! renders an aligned table instead.
//!
//! Exit codes: 0 success (and ZFD true), 1 ZFD false, 2 usage error,
//! 3 subset budget exceeded, 4 I/O error.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use orsig::analysis::{
    asymptotic_length, bounds_row, optimal_one_prob, BoundParams, BoundsRow, BOUNDS_CSV_HEADER,
};
use orsig::montecarlo::{
    run_async, run_event_f, run_sync_zfd, ExperimentError, ExperimentMode, ExperimentResult,
    ExperimentSpec, RESULT_CSV_HEADER,
};
use orsig::zfd::{check_zfd_with_budget, ZfdError, DEFAULT_SUBSET_BUDGET};
use orsig::{generate_code, Code, CodeGenParams};

const EXIT_NOT_ZFD: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IO: u8 = 4;

/// Seed fallback when `--seed` is absent.
const SEED_ENV: &str = "ORSIG_SEED";

#[derive(Parser)]
#[command(
    name = "orsig",
    version,
    about = "Signature coding for the multiple-access OR channel",
    long_about = "Generates random signature codes, verifies the zero-false-drop property, \
simulates synchronous and asynchronous access, and evaluates the analytic error bounds. \
All randomness is seeded: identical flags give byte-identical output. Seeds resolve from \
--seed, then the ORSIG_SEED environment variable, then 0."
)]
struct Cli {
    /// Cap the number of worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random code and write it to a file.
    Gen(GenArgs),
    /// Check the zero-false-drop property of a stored code.
    Check(CheckArgs),
    /// Run a seeded experiment and compare rates against the bounds.
    Simulate(SimulateArgs),
    /// Evaluate the analytic bounds, optionally sweeping one parameter.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CodeFormat {
    /// JSON object {"T", "n", "words"}.
    Json,
    /// Packed binary: T and n as little-endian u32, then row-major bits.
    Bin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    /// User count T.
    #[arg(long = "T")]
    users: usize,
    /// Activity bound M; drives the default n and p.
    #[arg(long = "M")]
    max_active: Option<usize>,
    /// Length slack for auto-sizing n.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Code length n in slots; overrides auto-sizing.
    #[arg(long)]
    n: Option<usize>,
    /// Per-bit one-probability p; overrides the 1/(M+1) default.
    #[arg(long)]
    p: Option<f64>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = CodeFormat::Json)]
    format: CodeFormat,
}

#[derive(Args)]
struct CheckArgs {
    /// Code file, JSON or packed binary (auto-detected).
    #[arg(long)]
    code: PathBuf,
    /// Activity bound M.
    #[arg(long = "M")]
    max_active: usize,
    /// Subset budget for the check.
    #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment kind.
    #[arg(long, value_enum)]
    mode: SimMode,
    /// User count T.
    #[arg(long = "T")]
    users: usize,
    /// Activity bound M.
    #[arg(long = "M")]
    max_active: usize,
    /// Length slack for auto-sizing n.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Code length n; overrides auto-sizing.
    #[arg(long)]
    n: Option<usize>,
    /// Per-bit one-probability p; overrides the 1/(M+1) default.
    #[arg(long)]
    p: Option<f64>,
    /// Number of trials (codes, streams, or event draws).
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Stream length in slots for async modes; defaults to 200 * n.
    #[arg(long)]
    horizon: Option<usize>,
    /// Class size for event-f mode.
    #[arg(long)]
    k: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Subset budget for the ZFD check in sync-zfd mode.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Render an aligned table instead of CSV/JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    SyncZfd,
    AsyncIdent,
    AsyncSync,
    EventF,
}

#[derive(Args)]
struct BoundsArgs {
    /// User count T.
    #[arg(long = "T")]
    users: usize,
    /// Activity bound M.
    #[arg(long = "M")]
    max_active: usize,
    /// Length slack.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Code length n; overrides auto-sizing.
    #[arg(long)]
    n: Option<usize>,
    /// Per-bit one-probability p; overrides the 1/(M+1) default.
    #[arg(long)]
    p: Option<f64>,
    /// Sweep one variable: var=start:end:step with var in {T, M, n, p, delta}.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Render an aligned table instead of CSV/JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Budget(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(err: ExperimentError) -> Self {
        match err {
            ExperimentError::Zfd(ZfdError::BudgetExceeded { .. }) => {
                CliError::Budget(err.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => cmd_check(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bounds(args) => cmd_bounds(args),
    }
}

/// `--seed`, then `ORSIG_SEED`, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text.parse().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV} must be a 64-bit integer, got {text:?}"))
        }),
        Err(_) => Ok(0),
    }
}

/// Applies the recommended sizing: n from the length formula, p = 1/(M+1).
/// Explicit flags win.
fn resolve_sizing(
    users: usize,
    max_active: Option<usize>,
    delta: f64,
    n: Option<usize>,
    p: Option<f64>,
) -> Result<(usize, f64), CliError> {
    let n = match n {
        Some(n) => n,
        None => {
            let m = max_active.ok_or_else(|| {
                CliError::Usage("need --M (with optional --delta) or an explicit --n".into())
            })?;
            if users < 2 {
                return Err(CliError::Usage("auto-sizing needs at least 2 users".into()));
            }
            if delta < 0.0 {
                return Err(CliError::Usage("--delta must be nonnegative".into()));
            }
            asymptotic_length(users, m, delta)
        }
    };
    let p = match p {
        Some(p) => p,
        None => {
            let m =
                max_active.ok_or_else(|| CliError::Usage("need --M or an explicit --p".into()))?;
            optimal_one_prob(m)
        }
    };
    Ok((n, p))
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|err| CliError::Io(format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<u8, CliError> {
    let (code_len, one_prob) =
        resolve_sizing(args.users, args.max_active, args.delta, args.n, args.p)?;
    let params = CodeGenParams {
        users: args.users,
        code_len,
        one_prob,
        seed: resolve_seed(args.seed)?,
    };
    let code = generate_code(&params).map_err(|err| CliError::Usage(err.to_string()))?;
    let bytes = match args.format {
        CodeFormat::Json => {
            let mut text =
                serde_json::to_string(&code).map_err(|err| CliError::Io(err.to_string()))?;
            text.push('\n');
            text.into_bytes()
        }
        CodeFormat::Bin => code.to_packed_bytes(),
    };
    fs::write(&args.out, bytes)
        .map_err(|err| CliError::Io(format!("cannot write {}: {err}", args.out.display())))?;
    eprintln!(
        "wrote {} ({} users, {} slots, p = {}, seed = {})",
        args.out.display(),
        params.users,
        params.code_len,
        params.one_prob,
        params.seed
    );
    Ok(0)
}

fn read_code(path: &PathBuf) -> Result<Code, CliError> {
    let bytes = fs::read(path)
        .map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))?;
    if let Ok(code) = serde_json::from_slice::<Code>(&bytes) {
        return Ok(code);
    }
    Code::from_packed_bytes(&bytes).map_err(|err| {
        CliError::Io(format!(
            "{} is neither a JSON nor a packed code file: {err}",
            path.display()
        ))
    })
}

fn cmd_check(args: CheckArgs) -> Result<u8, CliError> {
    let code = read_code(&args.code)?;
    let report =
        check_zfd_with_budget(&code, args.max_active, args.budget).map_err(|err| match err {
            ZfdError::BudgetExceeded { .. } => CliError::Budget(err.to_string()),
            ZfdError::ActivityBound { .. } => CliError::Usage(err.to_string()),
        })?;
    let json = serde_json::to_string(&report).map_err(|err| CliError::Io(err.to_string()))?;
    println!("{json}");
    Ok(if report.is_zfd { 0 } else { EXIT_NOT_ZFD })
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let (code_len, one_prob) = resolve_sizing(
        args.users,
        Some(args.max_active),
        args.delta,
        args.n,
        args.p,
    )?;
    let params = BoundParams::new(args.users, args.max_active, code_len, one_prob, args.delta)
        .map_err(|err| CliError::Usage(err.to_string()))?;
    let mode = match args.mode {
        SimMode::SyncZfd => ExperimentMode::SyncZfd,
        SimMode::AsyncIdent => ExperimentMode::AsyncIdent,
        SimMode::AsyncSync => ExperimentMode::AsyncSync,
        SimMode::EventF => ExperimentMode::EventF,
    };
    let spec = ExperimentSpec {
        params,
        trials: args.trials,
        horizon: args.horizon.unwrap_or(200 * code_len),
        mode,
        seed: resolve_seed(args.seed)?,
        zfd_budget: args.budget,
    };
    let results: Vec<ExperimentResult> = match mode {
        ExperimentMode::SyncZfd => vec![run_sync_zfd(&spec)?],
        ExperimentMode::AsyncIdent => vec![run_async(&spec)?.ident],
        ExperimentMode::AsyncSync => vec![run_async(&spec)?.sync],
        ExperimentMode::EventF => {
            let k = args
                .k
                .ok_or_else(|| CliError::Usage("event-f mode needs --k".into()))?;
            vec![run_event_f(&spec, k)?]
        }
    };
    let content = if args.pretty {
        result_table(&results)
    } else {
        match args.format {
            OutputFormat::Csv => {
                let mut text = String::from(RESULT_CSV_HEADER);
                for r in &results {
                    text.push('\n');
                    text.push_str(&r.to_csv());
                }
                text.push('\n');
                text
            }
            OutputFormat::Json => {
                let mut text = serde_json::to_string_pretty(&results)
                    .map_err(|err| CliError::Io(err.to_string()))?;
                text.push('\n');
                text
            }
        }
    };
    write_output(args.out.as_ref(), &content)?;
    Ok(0)
}

/// One swept variable: name and values.
enum Sweep {
    Users(Vec<usize>),
    MaxActive(Vec<usize>),
    CodeLen(Vec<usize>),
    OneProb(Vec<f64>),
    Slack(Vec<f64>),
}

fn parse_sweep(text: &str) -> Result<Sweep, CliError> {
    let usage = || {
        CliError::Usage(format!(
            "--sweep takes var=start:end:step with var in {{T, M, n, p, delta}}, got {text:?}"
        ))
    };
    let (var, range) = text.split_once('=').ok_or_else(usage)?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(usage());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| usage()))
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 || end < start {
        return Err(CliError::Usage(format!(
            "sweep range must have start <= end and step > 0, got {range:?}"
        )));
    }
    let mut values = Vec::new();
    let mut x = start;
    // A half-step tolerance absorbs float drift in the endpoint.
    while x <= end + step * 0.5 {
        values.push(x);
        x += step;
    }
    let as_usize = |values: &[f64]| -> Result<Vec<usize>, CliError> {
        values
            .iter()
            .map(|&v| {
                if v.fract() == 0.0 && v >= 0.0 {
                    Ok(v as usize)
                } else {
                    Err(CliError::Usage(format!(
                        "sweep over {var} needs whole nonnegative values, got {v}"
                    )))
                }
            })
            .collect()
    };
    match var {
        "T" => Ok(Sweep::Users(as_usize(&values)?)),
        "M" => Ok(Sweep::MaxActive(as_usize(&values)?)),
        "n" => Ok(Sweep::CodeLen(as_usize(&values)?)),
        "p" => Ok(Sweep::OneProb(values)),
        "delta" => Ok(Sweep::Slack(values)),
        _ => Err(usage()),
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<u8, CliError> {
    // Each sweep point resolves its own sizing, so auto n and p follow the
    // swept variable unless pinned by explicit flags.
    let point = |users: usize,
                 max_active: usize,
                 delta: f64,
                 n: Option<usize>,
                 p: Option<f64>|
     -> Result<BoundsRow, CliError> {
        let (code_len, one_prob) = resolve_sizing(users, Some(max_active), delta, n, p)?;
        let params = BoundParams::new(users, max_active, code_len, one_prob, delta)
            .map_err(|err| CliError::Usage(err.to_string()))?;
        Ok(bounds_row(&params))
    };
    let rows: Vec<BoundsRow> = match args.sweep.as_deref().map(parse_sweep).transpose()? {
        None => vec![point(
            args.users,
            args.max_active,
            args.delta,
            args.n,
            args.p,
        )?],
        Some(Sweep::Users(values)) => values
            .into_iter()
            .map(|users| point(users, args.max_active, args.delta, args.n, args.p))
            .collect::<Result<_, _>>()?,
        Some(Sweep::MaxActive(values)) => values
            .into_iter()
            .map(|m| point(args.users, m, args.delta, args.n, args.p))
            .collect::<Result<_, _>>()?,
        Some(Sweep::CodeLen(values)) => values
            .into_iter()
            .map(|n| point(args.users, args.max_active, args.delta, Some(n), args.p))
            .collect::<Result<_, _>>()?,
        Some(Sweep::OneProb(values)) => values
            .into_iter()
            .map(|p| point(args.users, args.max_active, args.delta, args.n, Some(p)))
            .collect::<Result<_, _>>()?,
        Some(Sweep::Slack(values)) => values
            .into_iter()
            .map(|delta| point(args.users, args.max_active, delta, args.n, args.p))
            .collect::<Result<_, _>>()?,
    };
    let content = if args.pretty {
        bounds_table(&rows)
    } else {
        match args.format {
            OutputFormat::Csv => {
                let mut text = String::from(BOUNDS_CSV_HEADER);
                for row in &rows {
                    text.push('\n');
                    text.push_str(&row.to_csv());
                }
                text.push('\n');
                text
            }
            OutputFormat::Json => {
                let mut text = serde_json::to_string_pretty(&rows)
                    .map_err(|err| CliError::Io(err.to_string()))?;
                text.push('\n');
                text
            }
        }
    };
    write_output(args.out.as_ref(), &content)?;
    Ok(0)
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: Vec<String>| {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(&line.join("  "));
        out.push('\n');
    };
    emit(&mut out, header.iter().map(|s| s.to_string()).collect());
    for row in rows {
        emit(&mut out, row.clone());
    }
    out
}

fn bounds_table(rows: &[BoundsRow]) -> String {
    let header: Vec<&str> = BOUNDS_CSV_HEADER.split(',').collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.to_csv().split(',').map(|s| s.to_string()).collect())
        .collect();
    render_table(&header, &cells)
}

fn result_table(results: &[ExperimentResult]) -> String {
    let header: Vec<&str> = RESULT_CSV_HEADER.split(',').collect();
    let cells: Vec<Vec<String>> = results
        .iter()
        .map(|r| r.to_csv().split(',').map(|s| s.to_string()).collect())
        .collect();
    render_table(&header, &cells)
}
