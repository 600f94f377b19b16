use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modrec_bench::config::{Algorithm, ExperimentConfig, ExperimentKind};
use modrec_bench::experiments::{bound_table_csv, effective_jobs, run_experiment};
use modrec_bench::fingerprint::environment_fingerprint;
use modrec_bench::results::{summarize, write_csv, write_summary};
use modrec_bench::{ConfigError, RunError};
use modrec_core::io::{read_folded, read_signal, write_folded, write_signal};
use modrec_core::modulo::{add_noise, fold_signal, pack_with_folding_bit, quantize_saturating, QuantizerSpec};
use modrec_core::recovery::{hod_unfold, lasso_b2r2, ls_onebit, nmse, nmse_db, DEFAULT_HOD_ORDER};
use modrec_core::signal::generate_bandlimited;
use modrec_core::{Error, FoldedRecord, IstaConfig, LassoConfig, MeasurementSource, OnebitConfig, SampledSignal};

#[derive(Parser)]
#[command(name = "modrec", version, about = "Modulo-ADC simulation and unfolding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bandlimited test signal
    Gen(GenArgs),
    /// Fold (and optionally quantize) a signal file
    Fold(FoldArgs),
    /// Recover a signal from a folded record
    Recover(RecoverArgs),
    /// Run a seeded experiment and write per-trial CSV
    Bench(BenchArgs),
    /// Print the jump-count bound grid as CSV
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long)]
    of: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Envelope span as a fraction of N
    #[arg(long, default_value_t = 0.5)]
    width: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FoldArgs {
    /// Signal file
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    lambda: f64,
    /// ADC word length; omit for unquantized samples
    #[arg(long)]
    bits: Option<u32>,
    /// Reserve one bit of the word for the folding flag and store the flags
    #[arg(long)]
    onebit: bool,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    noise_seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    /// Folded-record file
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    of: f64,
    #[arg(long, default_value = "lasso_b2r2")]
    algorithm: String,
    /// Original signal file; prints NMSE when given
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HOD_ORDER)]
    hod_order: usize,
    #[arg(long, default_value_t = 0)]
    dilation: usize,
    #[arg(long)]
    gamma_scale: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    experiment: Option<String>,
    /// Flat `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the full trial counts (250 per sweep cell, 100 per grid cell)
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    of: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    bits: Option<String>,
    #[arg(long)]
    algorithms: Option<String>,
    /// Any other config key, as `key=value`; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Skip the summary table on stderr
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value = "0.75,0.5,0.25,0.05")]
    lambda: String,
    #[arg(long, default_value = "4,6,8")]
    of: String,
    #[arg(long, default_value_t = 1.0)]
    peak: f64,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Runtime(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Fold(a) => fold(a),
        Command::Recover(a) => recover(a),
        Command::Bench(a) => bench(a),
        Command::Bounds(a) => bounds(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let signal = generate_bandlimited::<f64>(a.seed, a.n, a.of, a.width)?;
    write_signal(output(a.out.as_deref())?, &signal)?;
    Ok(())
}

fn fold(a: FoldArgs) -> Result<(), Failure> {
    let signal: SampledSignal<f64> = read_signal(open(&a.input)?)?;
    let record = fold_signal(&signal.samples, a.lambda)?;
    let flags = record.folding_bits.clone().unwrap_or_default();
    let samples = match a.snr_db {
        Some(snr) => add_noise(&record.folded, snr, a.noise_seed)?,
        None => record.folded.clone(),
    };
    let out = match (a.bits, a.onebit) {
        (Some(bits), true) => {
            let clamped: Vec<f64> = samples.iter().map(|x| x.clamp(-a.lambda, a.lambda)).collect();
            let (q, b) = pack_with_folding_bit(&clamped, a.lambda, bits, &flags)?;
            FoldedRecord { folded: q, lambda: a.lambda, bits: Some(bits - 1), folding_bits: Some(b), residual: None }
        }
        (Some(bits), false) => {
            let q = quantize_saturating(&samples, &QuantizerSpec::new(a.lambda, bits)?)?;
            FoldedRecord { folded: q, lambda: a.lambda, bits: Some(bits), folding_bits: None, residual: None }
        }
        (None, onebit) => FoldedRecord {
            folded: samples,
            lambda: a.lambda,
            bits: None,
            folding_bits: onebit.then_some(flags),
            residual: None,
        },
    };
    write_folded(output(a.out.as_deref())?, &out)?;
    Ok(())
}

fn recover(a: RecoverArgs) -> Result<(), Failure> {
    let record: FoldedRecord<f64> = read_folded(open(&a.input)?)?;
    let algorithm: Algorithm = a.algorithm.parse()?;
    let source = if record.bits.is_some() { MeasurementSource::Quantized } else { MeasurementSource::Exact };
    let signal = match algorithm {
        Algorithm::LassoB2r2 => {
            let mut ista = IstaConfig::default();
            if let Some(g) = a.gamma_scale {
                ista.gamma_scale = g;
            }
            if let Some(m) = a.max_iterations {
                ista.max_iterations = m;
            }
            if let Some(t) = a.tolerance {
                ista.tolerance = t;
            }
            let cfg = LassoConfig { ista, seed: a.seed, source, ..LassoConfig::default() };
            lasso_b2r2(&record.folded, record.lambda, a.of, &cfg)?.signal
        }
        Algorithm::LsOnebit => {
            let flags = record
                .folding_bits
                .as_ref()
                .ok_or_else(|| Failure::Config("ls_onebit needs a record with folding bits".into()))?;
            let cfg = OnebitConfig { dilation: a.dilation, source, ..OnebitConfig::default() };
            ls_onebit(&record.folded, flags, record.lambda, a.of, &cfg)?.signal
        }
        Algorithm::Hod => hod_unfold(&record.folded, record.lambda, a.hod_order)?,
    };
    let mut seed = None;
    if let Some(path) = &a.reference {
        let reference: SampledSignal<f64> = read_signal(open(path)?)?;
        eprintln!(
            "nmse={:e} nmse_db={:.3}",
            nmse(&reference.samples, &signal)?,
            nmse_db(&reference.samples, &signal)?
        );
        seed = reference.seed;
    }
    let mut out = SampledSignal::new(signal, a.of)?;
    out.seed = seed;
    write_signal(output(a.out.as_deref())?, &out)?;
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let kind = a.experiment.as_deref().map(str::parse::<ExperimentKind>).transpose()?;
    let text = match &a.config {
        Some(p) => Some(
            fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        ),
        None => None,
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    let flags = [
        ("trials", &a.trials),
        ("n", &a.n),
        ("lambda", &a.lambda),
        ("of", &a.of),
        ("snr_db", &a.snr_db),
        ("bits", &a.bits),
        ("algorithms", &a.algorithms),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            overrides.push((k.to_string(), v.clone()));
        }
    }
    for s in &a.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{s}`")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = a.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(out) = &a.out {
        overrides.push(("out".into(), out.display().to_string()));
    }
    let cfg = ExperimentConfig::load(kind, text.as_deref(), &overrides, a.paper_scale)?;

    if cfg.kind == ExperimentKind::BoundTable {
        let table = bound_table_csv(cfg.n, &cfg.lambdas, &cfg.ofs, cfg.peak)?;
        output(cfg.out.as_deref())?.write_all(table.as_bytes())?;
        return Ok(());
    }
    if a.jobs == Some(0) {
        return Err(Failure::Config("--jobs must be at least 1".into()));
    }
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let jobs = effective_jobs(&cfg, jobs);
    log::info!("{}: {} trials per cell, {jobs} worker(s)", cfg.kind, cfg.trials);
    let rows = run_experiment(&cfg, jobs)?;
    let comments = if cfg.kind == ExperimentKind::Timing { environment_fingerprint() } else { Vec::new() };
    let mut w = output(cfg.out.as_deref())?;
    write_csv(&mut w, &rows, &comments)?;
    w.flush()?;
    if !a.quiet {
        write_summary(io::stderr().lock(), &summarize(&rows))?;
    }
    Ok(())
}

fn parse_list(name: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::Config(format!("invalid {name} value `{s}`"))))
        .collect()
}

fn bounds(a: BoundsArgs) -> Result<(), Failure> {
    let lambdas = parse_list("lambda", &a.lambda)?;
    let ofs = parse_list("of", &a.of)?;
    let table = bound_table_csv(a.n, &lambdas, &ofs, a.peak)?;
    let mut w = output(None)?;
    w.write_all(table.as_bytes())?;
    w.flush()?;
    Ok(())
}
