//! Command-line front end for `grover-db`.
//!
//! [`run`] parses arguments and writes to caller-supplied streams, so the
//! binary and the tests share one code path.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use grover_db::analytic::{dense_operator_oracle, DENSE_MAX_TOTAL_BITS};
use grover_db::nmr::NmrParams;
use grover_db::trace::{self, TraceOp, TraceReport};
use grover_db::{
    grover_operator, predicted_success, prepare_initial, search_with_state, success_weight, Error,
    FunctionTable, SearchOptions, TwoRegisterState,
};

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const UNVERIFIED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NO_SOLUTION: i32 = 3;
    pub const RESOURCE: i32 = 4;
    pub const TRACE_MISMATCH: i32 = 5;
    pub const IO: i32 = 6;
    pub const ORACLE_MISMATCH: i32 = 7;
}

/// Deviation allowed between the fast kernels and the dense matrices.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "grover-db", version, about = "Grover search over an encoded function table")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for an argument I with f(I) = F0 and measure both registers.
    Search(SearchArgs),
    /// Replay the two-qubit example f(I) = 3 - I, F0 = 2, step by step.
    TraceExample(TraceArgs),
    /// Solution probability after k = 0..k_max steps, simulated and closed form.
    Sweep(SweepArgs),
    /// Compare the fast kernels with explicit dense matrices on random states.
    OracleCheck(OracleArgs),
    /// Resonance frequencies of the auxiliary spin for every target value.
    NmrFreqs(NmrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// f(I) = 3 - I on two-qubit registers.
    PaperExample,
    /// f(I) = I.
    Identity,
    /// Random bijection seeded by --seed.
    RandomPermutation,
    /// Independent random values seeded by --seed.
    RandomFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Table file: header `lc lt`, then one `I F` line per argument.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    #[arg(long)]
    pub control_bits: Option<u32>,
    #[arg(long)]
    pub target_bits: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub source: TableArgs,
    #[arg(long)]
    pub f0: u64,
    /// Number of search steps; defaults to the optimal count.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Also draw this many samples from the final state and report counts.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Run even when F0 has no preimage.
    #[arg(long)]
    pub oblivious: bool,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,
    /// Write `psi0.txt` .. `psi7.txt` state dumps into this directory.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: TableArgs,
    #[arg(long)]
    pub f0: u64,
    /// Last step count to report; defaults to twice the optimal count.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: TableArgs,
    /// Marked target value; defaults to f(0).
    #[arg(long)]
    pub f0: Option<u64>,
    /// Number of random input states.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct NmrArgs {
    /// Target register width; defaults to the number of couplings, or 2.
    #[arg(long)]
    pub target_bits: Option<u32>,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub mu_b: f64,
    /// Comma-separated couplings, least significant target bit first.
    /// Defaults to 1, 2, 4, ...
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// A command failure: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::NoSolution { .. } => exit::NO_SOLUTION,
            Error::Resource(_) => exit::RESOURCE,
            Error::Io(_) => exit::IO,
            Error::StateCorruption { .. } => exit::UNVERIFIED,
            Error::Config(_)
            | Error::Domain(_)
            | Error::Validation { .. }
            | Error::Parse { .. }
            | Error::UnresolvablePulse { .. } => exit::USAGE,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure {
            code: exit::IO,
            message: format!("i/o error: {err}"),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(err: serde_json::Error) -> Self {
        Failure {
            code: exit::IO,
            message: format!("json error: {err}"),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: exit::USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Search(a) => search_cmd(&a, out),
        Command::TraceExample(a) => trace_example(&a, out),
        Command::Sweep(a) => sweep_cmd(&a, out),
        Command::OracleCheck(a) => oracle_check_cmd(&a, out),
        Command::NmrFreqs(a) => nmr_freqs_cmd(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "grover-db: {}", failure.message);
            failure.code
        }
    }
}

fn resolve_table(src: &TableArgs) -> Result<FunctionTable, Failure> {
    let table = match (&src.table, src.builtin) {
        (Some(path), None) => FunctionTable::load(path)?,
        (None, Some(Builtin::PaperExample)) => FunctionTable::paper_example(),
        (None, Some(Builtin::Identity)) => {
            let lc = src.control_bits.or(src.target_bits).ok_or_else(|| {
                usage("--builtin identity needs --control-bits")
            })?;
            FunctionTable::identity(lc)?
        }
        (None, Some(Builtin::RandomPermutation)) => {
            let lc = src.control_bits.or(src.target_bits).ok_or_else(|| {
                usage("--builtin random-permutation needs --control-bits")
            })?;
            FunctionTable::random_permutation(lc, src.seed)?
        }
        (None, Some(Builtin::RandomFunction)) => {
            let lc = src
                .control_bits
                .ok_or_else(|| usage("--builtin random-function needs --control-bits"))?;
            FunctionTable::random_function(lc, src.target_bits.unwrap_or(lc), src.seed)?
        }
        _ => return Err(usage("give exactly one of --table or --builtin")),
    };
    if let Some(lc) = src.control_bits {
        if lc != table.control_bits() {
            return Err(usage(format!(
                "--control-bits {lc} does not match the table ({} bits)",
                table.control_bits()
            )));
        }
    }
    if let Some(lt) = src.target_bits {
        if lt != table.target_bits() {
            return Err(usage(format!(
                "--target-bits {lt} does not match the table ({} bits)",
                table.target_bits()
            )));
        }
    }
    Ok(table)
}

fn check_f0(table: &FunctionTable, f0: u64) -> Result<(), Failure> {
    let dim = 1u64 << table.target_bits();
    if f0 >= dim {
        return Err(usage(format!("--f0 {f0} outside the target range 0..{dim}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SampleCount {
    i: u64,
    f: u64,
    count: usize,
}

#[derive(Debug, Serialize)]
struct SearchReport<'a> {
    #[serde(flatten)]
    outcome: &'a grover_db::SearchOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<SampleCount>>,
}

pub fn search_cmd(args: &SearchArgs, out: &mut dyn Write) -> CmdResult {
    let table = resolve_table(&args.source)?;
    check_f0(&table, args.f0)?;
    let options = SearchOptions {
        iterations: args.iterations,
        oblivious: args.oblivious,
    };
    let (outcome, state) = search_with_state(&table, args.f0, args.source.seed, &options)?;

    let samples = match args.samples {
        Some(shots) => {
            let mut counts = std::collections::BTreeMap::new();
            for pair in state.sample(shots, args.source.seed.wrapping_add(1))? {
                *counts.entry(pair).or_insert(0usize) += 1;
            }
            Some(
                counts
                    .into_iter()
                    .map(|((i, f), count)| SampleCount { i, f, count })
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };

    match args.format {
        Format::Plain => {
            let mark = if outcome.verified { "verified" } else { "NOT verified" };
            writeln!(out, "I={} F={} {mark}", outcome.measured_i, outcome.measured_f)?;
            writeln!(
                out,
                "iterations={} g={} nu={} sign={}",
                outcome.iterations, outcome.multiplicity, outcome.nu, outcome.global_sign
            )?;
            writeln!(
                out,
                "success_probability={} predicted={}",
                outcome.success_probability, outcome.predicted_success
            )?;
            if let Some(samples) = &samples {
                let shots: usize = samples.iter().map(|s| s.count).sum();
                writeln!(out, "samples={shots}")?;
                for s in samples {
                    writeln!(
                        out,
                        "  I={} F={} count={} freq={}",
                        s.i,
                        s.f,
                        s.count,
                        s.count as f64 / shots as f64
                    )?;
                }
            }
        }
        Format::Csv => {
            writeln!(
                out,
                "measured_i,measured_f,verified,iterations,multiplicity,nu,success_probability,predicted_success,global_sign"
            )?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                outcome.measured_i,
                outcome.measured_f,
                outcome.verified,
                outcome.iterations,
                outcome.multiplicity,
                outcome.nu,
                outcome.success_probability,
                outcome.predicted_success,
                outcome.global_sign
            )?;
            if let Some(samples) = &samples {
                writeln!(out)?;
                writeln!(out, "i,f,count")?;
                for s in samples {
                    writeln!(out, "{},{},{}", s.i, s.f, s.count)?;
                }
            }
        }
        Format::Json => {
            let report = SearchReport {
                outcome: &outcome,
                samples,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
    }
    Ok(if outcome.verified {
        exit::SUCCESS
    } else {
        exit::UNVERIFIED
    })
}

fn ket(i: usize, k: usize) -> String {
    format!("|{i}>|{k}>")
}

#[derive(Debug, Serialize)]
struct TraceJson {
    step: usize,
    label: String,
    op: String,
    max_deviation: f64,
    matches: bool,
    amplitudes: Vec<[f64; 2]>,
}

pub fn trace_example(args: &TraceArgs, out: &mut dyn Write) -> CmdResult {
    let table = FunctionTable::paper_example();
    trace_example_with(args, out, |op, state| op.apply(state, &table))
}

/// Runs the trace with a caller-supplied operator implementation.
pub fn trace_example_with<F>(args: &TraceArgs, out: &mut dyn Write, apply: F) -> CmdResult
where
    F: FnMut(TraceOp, &mut TwoRegisterState) -> grover_db::Result<()>,
{
    let report = trace::run_trace_with(apply)?;
    if let Some(dir) = &args.dump {
        std::fs::create_dir_all(dir)?;
        for r in &report.records {
            let state = TwoRegisterState::from_amplitudes(2, 2, r.amplitudes.clone())?;
            let file = std::fs::File::create(dir.join(format!("psi{}.txt", r.step)))?;
            state.write_dump(std::io::BufWriter::new(file))?;
        }
    }
    match args.format {
        Format::Json => {
            let records: Vec<TraceJson> = report
                .records
                .iter()
                .map(|r| TraceJson {
                    step: r.step,
                    label: r.label(),
                    op: r.op.symbol(),
                    max_deviation: r.max_deviation,
                    matches: r.matches(),
                    amplitudes: r.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&records)?)?;
        }
        Format::Csv => {
            writeln!(out, "step,index,i,k,re,im")?;
            for r in &report.records {
                for (j, a) in r.amplitudes.iter().enumerate() {
                    writeln!(out, "{},{j},{},{},{},{}", r.step, j >> 2, j & 3, a.re, a.im)?;
                }
            }
        }
        Format::Plain => write_trace_plain(&report, out)?,
    }
    Ok(match report.first_divergence() {
        None => exit::SUCCESS,
        Some(bad) => {
            writeln!(
                out,
                "MISMATCH: first divergence at {} ({}), max deviation {:e}",
                bad.label(),
                bad.op.symbol(),
                bad.max_deviation
            )?;
            exit::TRACE_MISMATCH
        }
    })
}

fn write_trace_plain(report: &TraceReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "f(I) = 3 - I, F0 = {}, start |0>|0>", trace::TRACE_F0)?;
    for r in &report.records {
        let status = if r.matches() { "ok" } else { "MISMATCH" };
        writeln!(
            out,
            "{} = {} applied -- max deviation {:e} {status}",
            r.label(),
            r.op.symbol(),
            r.max_deviation
        )?;
        for (j, a) in r.amplitudes.iter().enumerate() {
            if a.norm() > 1e-15 {
                writeln!(out, "    {}  {:+.6} {:+.6}i", ket(j >> 2, j & 3), a.re, a.im)?;
            }
        }
    }
    let last = report.records.last().expect("trace has eight steps");
    let mut terms = String::new();
    for (j, a) in last.amplitudes.iter().enumerate() {
        if a.norm() > 1e-12 {
            let _ = write!(terms, "{:+}{}", a.re, ket(j >> 2, j & 3));
        }
    }
    writeln!(out, "final state {} = {terms}", last.label())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    iter: usize,
    p_full_sim: f64,
    p_analytic: f64,
    abs_diff: f64,
}

pub fn sweep_cmd(args: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let table = resolve_table(&args.source)?;
    check_f0(&table, args.f0)?;
    let lc = table.control_bits();
    let g = table.multiplicity(args.f0).g;
    let (n, _) = grover_db::iteration_count(lc, g).map_err(|e| match e {
        Error::NoSolution { .. } => Failure::from(Error::NoSolution { f0: Some(args.f0) }),
        other => other.into(),
    })?;
    let k_max = args.k_max.unwrap_or(2 * n);

    let mut rows = Vec::with_capacity(k_max + 1);
    let mut state = prepare_initial(&table)?;
    for k in 0..=k_max {
        if k > 0 {
            grover_operator(&mut state, &table, args.f0)?;
        }
        let p_full_sim = success_weight(&state, &table, args.f0)?;
        let p_analytic = predicted_success(lc, g, k)?;
        rows.push(SweepRow {
            iter: k,
            p_full_sim,
            p_analytic,
            abs_diff: (p_full_sim - p_analytic).abs(),
        });
    }

    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
        Format::Csv | Format::Plain => {
            writeln!(out, "iter,p_full_sim,p_analytic,abs_diff")?;
            for r in &rows {
                writeln!(out, "{},{},{},{:e}", r.iter, r.p_full_sim, r.p_analytic, r.abs_diff)?;
            }
        }
    }
    Ok(exit::SUCCESS)
}

#[derive(Debug, Serialize)]
struct OracleRow {
    operator: &'static str,
    max_deviation: f64,
}

pub fn oracle_check_cmd(args: &OracleArgs, out: &mut dyn Write) -> CmdResult {
    let table = resolve_table(&args.source)?;
    let total = table.control_bits() + table.target_bits();
    if total > DENSE_MAX_TOTAL_BITS {
        return Err(Error::Resource(format!(
            "oracle check needs a {total}-qubit dense matrix, cap is {DENSE_MAX_TOTAL_BITS} qubits"
        ))
        .into());
    }
    let f0 = args.f0.unwrap_or(table.values()[0]);
    check_f0(&table, f0)?;
    let ops = dense_operator_oracle(&table, f0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(args.source.seed);
    let (lc, lt) = (table.control_bits(), table.target_bits());
    let dense = [
        &ops.hadamard_control,
        &ops.uf,
        &ops.phase_control_zero,
        &ops.phase_target,
        &ops.grover,
    ];
    let mut worst = [0.0f64; 5];
    for _ in 0..args.samples {
        let input = TwoRegisterState::random(lc, lt, &mut rng)?;
        for (which, (slot, matrix)) in worst.iter_mut().zip(dense).enumerate() {
            let mut fast = input.clone();
            match which {
                0 => fast.apply_hadamard_control(),
                1 => fast.apply_uf(&table)?,
                2 => fast.apply_phase_control(0)?,
                3 => fast.apply_phase_target(f0)?,
                _ => grover_operator(&mut fast, &table, f0)?,
            }
            let reference = matrix.matvec(input.amplitudes());
            let dev = fast
                .amplitudes()
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            *slot = slot.max(dev);
        }
    }
    let names = ["hadamard_control", "uf", "phase_control_zero", "phase_target", "grover"];
    let rows: Vec<OracleRow> = names
        .iter()
        .zip(worst)
        .map(|(&operator, max_deviation)| OracleRow {
            operator,
            max_deviation,
        })
        .collect();
    let overall = worst.iter().copied().fold(0.0, f64::max);
    let pass = overall <= ORACLE_TOLERANCE;

    match args.format {
        Format::Plain => {
            writeln!(
                out,
                "lc={lc} lt={lt} f0={f0} states={} tolerance={ORACLE_TOLERANCE:e}",
                args.samples
            )?;
            for r in &rows {
                writeln!(out, "{:<20} max_dev={:e}", r.operator, r.max_deviation)?;
            }
            writeln!(
                out,
                "max deviation {overall:e} {}",
                if pass { "ok" } else { "EXCEEDS TOLERANCE" }
            )?;
        }
        Format::Csv => {
            writeln!(out, "operator,max_deviation")?;
            for r in &rows {
                writeln!(out, "{},{:e}", r.operator, r.max_deviation)?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
    }
    Ok(if pass {
        exit::SUCCESS
    } else {
        exit::ORACLE_MISMATCH
    })
}

pub fn nmr_freqs_cmd(args: &NmrArgs, out: &mut dyn Write) -> CmdResult {
    let params = match &args.lambdas {
        Some(lambdas) => {
            if let Some(lt) = args.target_bits {
                if lt as usize != lambdas.len() {
                    return Err(usage(format!(
                        "{} couplings given for --target-bits {lt}",
                        lambdas.len()
                    )));
                }
            }
            NmrParams::new(args.mu_b, lambdas.clone())?
        }
        None => NmrParams::with_default_couplings(args.target_bits.unwrap_or(2), args.mu_b)?,
    };
    let table = params.frequency_table();
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&table.entries)?)?,
        Format::Csv | Format::Plain => {
            writeln!(out, "F,omega_res,min_gap")?;
            for e in &table.entries {
                writeln!(out, "{},{},{}", e.f, e.omega, e.nearest_gap)?;
            }
        }
    }
    Ok(exit::SUCCESS)
}
