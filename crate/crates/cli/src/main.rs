//! `ptm`: convert channel representations to Pauli transfer matrices, dump
//! the one-qubit tables, check the fast algorithms against the oracle and
//! time them.
//!
//! Exit codes: 0 on success, 1 on validation or runtime failure, 2 on usage
//! errors.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ptm_core::bench::{run_bench, Algorithm, BenchConfig, DEFAULT_MEMORY_BUDGET};
use ptm_core::channel::ChannelRep;
use ptm_core::instance::{gen_instance, gen_kraus, gen_superop, InstanceKind};
use ptm_core::io::{
    append_timings_file, read_bundle_file, write_bundle, write_bundle_file, write_timings,
    BundleKind, RepBundle,
};
use ptm_core::tables::{table_entries, TableKind};
use ptm_core::verify::oracle_suite;
use ptm_core::{PtmEngine, RepKind, TABLES};

const VERIFY_TOLERANCE: f64 = 1e-10;
const MAX_VERIFY_QUBITS: usize = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ptm",
    version,
    about = "Pauli transfer matrix construction and benchmarks"
)]
struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a channel bundle to its PTM bundle.
    Convert(ConvertArgs),
    /// Time the PTM algorithms on seeded random instances.
    Bench(BenchArgs),
    /// Print the one-qubit elementary tables as PTM bundles, one per line.
    Tables(TablesArgs),
    /// Compare every fast algorithm with the definitional oracle.
    Verify(VerifyArgs),
    /// Write a seeded random instance as a bundle.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RepArg {
    Can,
    Choi,
    Chi,
    Ptm,
    Kraus,
}

impl From<RepArg> for RepKind {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::Can => RepKind::Can,
            RepArg::Choi => RepKind::Choi,
            RepArg::Chi => RepKind::Chi,
            RepArg::Ptm => RepKind::Ptm,
            RepArg::Kraus => RepKind::Kraus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Ptm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Dense,
    Diagonal,
}

impl From<KindArg> for InstanceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Dense => InstanceKind::Dense,
            KindArg::Diagonal => InstanceKind::Diagonal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableArg {
    Left,
    Right,
    Comm,
    Acomm,
    Sandwich,
}

impl From<TableArg> for TableKind {
    fn from(t: TableArg) -> Self {
        match t {
            TableArg::Left => TableKind::Left,
            TableArg::Right => TableKind::Right,
            TableArg::Comm => TableKind::Comm,
            TableArg::Acomm => TableKind::Acomm,
            TableArg::Sandwich => TableKind::Sandwich,
        }
    }
}

/// Inclusive qubit range written as `N` or `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct QubitRange {
    min: usize,
    max: usize,
}

impl FromStr for QubitRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a qubit count"))
        };
        let (min, max) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if min == 0 || min > max {
            return Err(format!("`{s}` is not a range of at least one qubit"));
        }
        Ok(Self { min, max })
    }
}

impl fmt::Display for QubitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

#[derive(Args, Debug)]
struct ConvertArgs {
    /// Representation stored in the input bundle.
    #[arg(long, value_enum)]
    from: RepArg,
    /// Target representation.
    #[arg(long, value_enum, default_value = "ptm")]
    to: TargetArg,
    #[arg(long)]
    input: PathBuf,
    /// Output path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated algorithm names (default: all nine).
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value = "1..4")]
    qubits: QubitRange,
    #[arg(long, value_enum, default_value = "dense")]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Kraus operators per instance for kraus-ptm (default: one per qubit).
    #[arg(long)]
    kraus_count: Option<usize>,
    /// Run each algorithm once untimed before measuring.
    #[arg(long)]
    warmup: bool,
    /// Use the multi-threaded conversion kernels where available.
    #[arg(long)]
    parallel: bool,
    /// Refuse sizes whose estimated peak memory exceeds this many MiB.
    #[arg(long, default_value_t = (DEFAULT_MEMORY_BUDGET >> 20) as u64)]
    memory_budget_mib: u64,
    /// Append records to this CSV file, replacing rows with the same key.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long, value_enum)]
    which: TableArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "1..2")]
    qubits: QubitRange,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random instances per algorithm and qubit count.
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 4)]
    kraus_count: usize,
    /// Flip the sign of one left-multiplication table entry.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "dense")]
    kind: KindArg,
    #[arg(long)]
    qubits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit a random channel representation instead of a plain matrix.
    #[arg(long, value_enum)]
    rep: Option<RepArg>,
    /// Kraus operators when `--rep kraus` (default: one per qubit).
    #[arg(long)]
    kraus_count: Option<usize>,
    /// Output path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: ptm_core::PtmError| e.to_string())
}

fn emit(bundle: &RepBundle, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            write_bundle_file(path, bundle).with_context(|| format!("writing {}", path.display()))
        }
        None => Ok(std::io::stdout().write_all(write_bundle(bundle).as_bytes())?),
    }
}

fn convert(args: ConvertArgs) -> anyhow::Result<()> {
    let TargetArg::Ptm = args.to;
    let bundle = read_bundle_file(&args.input)?;
    let expected = BundleKind::from(RepKind::from(args.from));
    if bundle.kind != expected {
        bail!(
            "{} holds a `{}` bundle, not `{expected}`",
            args.input.display(),
            bundle.kind
        );
    }
    let rep = bundle.to_rep()?;
    let ptm = ChannelRep::ptm(rep.to_ptm()?)?;
    emit(&RepBundle::from_rep(&ptm), args.output.as_deref())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let config = BenchConfig {
        algorithms: if args.algorithms.is_empty() {
            Algorithm::ALL.to_vec()
        } else {
            args.algorithms
        },
        min_qubits: args.qubits.min,
        max_qubits: args.qubits.max,
        instance_kind: args.kind.into(),
        seed: args.seed,
        repetitions: args.reps,
        kraus_count: args.kraus_count,
        warmup: args.warmup,
        parallel: args.parallel,
        memory_budget_bytes: u128::from(args.memory_budget_mib) << 20,
    };
    let records = run_bench(&config, |r| {
        eprintln!(
            "{} n={} {}: {:.3e} s ± {:.1e}",
            r.algorithm, r.n, r.instance_kind, r.mean_seconds, r.std_seconds
        );
    })?;
    if let Some(path) = &args.csv {
        append_timings_file(path, &records)
            .with_context(|| format!("appending to {}", path.display()))?;
    }
    std::io::stdout().write_all(write_timings(&records)?.as_bytes())?;
    Ok(())
}

fn tables(args: TablesArgs) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    for (label, m) in table_entries(args.which.into()) {
        eprintln!("{label}");
        out.write_all(write_bundle(&RepBundle::from_rep(&ChannelRep::ptm(m)?)).as_bytes())?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    if args.qubits.max > MAX_VERIFY_QUBITS {
        bail!(
            "verify is limited to {MAX_VERIFY_QUBITS} qubits, got {}",
            args.qubits
        );
    }
    if args.count == 0 || args.kraus_count == 0 {
        bail!("--count and --kraus-count must be at least 1");
    }
    let mut tables = TABLES.clone();
    if args.inject_fault {
        tables.left[1][0][1] = -tables.left[1][0][1];
    }
    let engine = PtmEngine::with_tables(&tables);
    let mut failing = Vec::new();
    for n in args.qubits.min..=args.qubits.max {
        for r in oracle_suite(&engine, n, args.seed, args.count, args.kraus_count)? {
            let ok = r.passed(VERIFY_TOLERANCE);
            println!(
                "{} n={n} max_abs_dev={:.3e} {}",
                r.algorithm,
                r.max_abs_dev,
                if ok { "ok" } else { "FAIL" }
            );
            if !ok {
                failing.push(format!("{} n={n}", r.algorithm));
            }
        }
    }
    if failing.is_empty() {
        return Ok(true);
    }
    eprintln!("failing checks: {}", failing.join(", "));
    Ok(false)
}

fn gen(args: GenArgs) -> anyhow::Result<()> {
    let (kind, n) = (InstanceKind::from(args.kind), args.qubits);
    if n == 0 {
        bail!("--qubits must be at least 1");
    }
    let bundle = match args.rep {
        None => RepBundle::matrix(gen_instance(kind, n, args.seed))?,
        Some(RepArg::Kraus) => {
            let m = args.kraus_count.unwrap_or(n);
            if m == 0 {
                bail!("--kraus-count must be at least 1");
            }
            RepBundle::from_rep(&ChannelRep::kraus(gen_kraus(kind, n, m, args.seed))?)
        }
        Some(rep) => RepBundle::from_rep(&ChannelRep::from_matrix(
            rep.into(),
            gen_superop(kind, n, args.seed),
        )?),
    };
    emit(&bundle, args.output.as_deref())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Convert(a) => convert(a).map(|_| true),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Tables(a) => tables(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
