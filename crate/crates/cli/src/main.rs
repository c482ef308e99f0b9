//! `dfex` command line: feature extraction, verification suites, feature
//! dimensions, and cartoon-signal generation from JSON sequence configs.
//!
//! Exit codes: 0 success, 2 configuration/parse error, 3 shape or
//! precondition error, 4 inadmissible sequence, 5 verification violations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dfex::network::{FeatureSidecar, ModuleSequence, PathPruning, SequenceConfig};
use dfex::signal::io as signal_io;
use dfex::verify::{self, VerificationReport};
use dfex::{cartoon, Error};

/// Default seed used whenever `--seed` is not given, so repeated runs are
/// reproducible by default.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "dfex", version, about = "Deep convolutional feature extraction with verified operator bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract features from a signal file into the binary container.
    Extract(ExtractArgs),
    /// Run the randomized verification suites and write JSON reports.
    Verify(VerifyArgs),
    /// Print the feature dimension of a sequence config.
    Dims(DimsArgs),
    /// Generate a random sampled cartoon signal plus its JSON spec.
    GenCartoon(GenCartoonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PruningArg {
    Full,
    #[value(name = "freq-dec")]
    FreqDec,
    #[value(name = "freq-dec-strict")]
    FreqDecStrict,
}

impl From<PruningArg> for PathPruning {
    fn from(p: PruningArg) -> Self {
        match p {
            PruningArg::Full => PathPruning::Full,
            PruningArg::FreqDec => PathPruning::FrequencyDecreasing,
            PruningArg::FreqDecStrict => PathPruning::FrequencyDecreasingStrict,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Global,
    Deformation,
    Local,
    Covariance,
    All,
}

#[derive(Args)]
struct ExtractArgs {
    /// Module-sequence JSON config.
    #[arg(long)]
    config: PathBuf,
    /// Input signal (.csv, or the binary signal format otherwise).
    #[arg(long)]
    input: PathBuf,
    /// Output feature container; a JSON sidecar lands next to it.
    #[arg(long)]
    output: PathBuf,
    /// Path enumeration mode (overrides the config).
    #[arg(long, value_enum)]
    pruning: Option<PruningArg>,
    /// Normalize every layer for admissibility before extracting.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Where to write the JSON report array.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum)]
    pruning: Option<PruningArg>,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    pruning: Option<PruningArg>,
}

#[derive(Args)]
struct GenCartoonArgs {
    /// Sample count N.
    #[arg(long, default_value_t = 128)]
    length: usize,
    /// Variation bound K of the cartoon class.
    #[arg(long, default_value_t = 1.0)]
    variation: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Signal file to write; the spec JSON lands at `<output>.json`.
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

// DFEX_THREADS caps worker parallelism; unset means rayon's default.
fn init_thread_pool() -> Result<(), String> {
    match std::env::var("DFEX_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| format!("DFEX_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("DFEX_THREADS must be >= 1".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Format(_) | Error::Io(_) => 2,
        Error::ShapeMismatch(_)
        | Error::NotDivisible { .. }
        | Error::UnknownLabel(_)
        | Error::FilterSupport { .. }
        | Error::NonContributingLayer(_)
        | Error::EndpointOnGrid(_)
        | Error::InvalidParameter(_) => 3,
        Error::Inadmissible(_) => 4,
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Extract(args) => extract(args),
        Command::Verify(args) => verify_cmd(args),
        Command::Dims(args) => dims(args),
        Command::GenCartoon(args) => gen_cartoon(args),
    }
}

fn load_config(path: &Path) -> Result<SequenceConfig, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    SequenceConfig::from_json(&text)
}

fn build_sequence(
    cfg: &SequenceConfig,
    normalize: bool,
) -> Result<(ModuleSequence, PathPruning), Error> {
    let seq = cfg.build(normalize)?;
    for d in 0..seq.depth() {
        let (a, _) = seq.augmented_frame_bounds(d);
        if a <= 1e-12 {
            eprintln!(
                "warning: layer {d} has frame lower bound A = 0; \
                 the translated atoms are not complete"
            );
        }
    }
    Ok((seq, cfg.pruning))
}

fn extract(args: ExtractArgs) -> Result<ExitCode, Error> {
    let cfg = load_config(&args.config)?;
    let (seq, cfg_pruning) = build_sequence(&cfg, args.normalize)?;
    let pruning = args.pruning.map(PathPruning::from).unwrap_or(cfg_pruning);
    let signal = signal_io::load(&args.input)?;
    let features = seq.extract(&signal, pruning)?;

    write_atomic(&args.output, |w| dfex::network::write_features(&features, w))?;
    let sidecar = FeatureSidecar::describe(&features);
    let sidecar_path = sidecar_path(&args.output);
    write_atomic(&sidecar_path, |w| {
        w.write_all(serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    println!(
        "extracted {} scalars across {} layers (norm {:.6}) -> {} (+ {})",
        sidecar.dimension,
        features.layers().len(),
        sidecar.feature_norm,
        args.output.display(),
        sidecar_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut os = output.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

fn verify_cmd(args: VerifyArgs) -> Result<ExitCode, Error> {
    let cfg = load_config(&args.config)?;
    let (seq, cfg_pruning) = build_sequence(&cfg, args.normalize)?;
    let pruning = args.pruning.map(PathPruning::from).unwrap_or(cfg_pruning);
    let one_d = seq.input_shape().dims() == 1;

    let mut reports: Vec<VerificationReport> = Vec::new();
    let run_global = matches!(args.suite, SuiteArg::Global | SuiteArg::All);
    let run_deformation = matches!(args.suite, SuiteArg::Deformation | SuiteArg::All);
    let run_local = matches!(args.suite, SuiteArg::Local | SuiteArg::All);
    let run_covariance = matches!(args.suite, SuiteArg::Covariance | SuiteArg::All);

    if run_global {
        reports.push(verify::check_global(&seq, pruning, args.trials, args.seed)?);
    }
    if run_deformation {
        if one_d {
            reports.push(verify::check_deformation(&seq, pruning, args.trials, args.seed)?);
        } else if matches!(args.suite, SuiteArg::Deformation) {
            return Err(Error::ShapeMismatch(
                "the deformation suite needs a 1-D sequence".into(),
            ));
        } else {
            eprintln!("warning: skipping the deformation suite on a 2-D sequence");
        }
    }
    if run_local {
        for d in 0..seq.depth() {
            if seq.contributes(d) {
                reports.push(verify::check_local(&seq, d, pruning, args.trials, args.seed)?);
            }
        }
    }
    if run_covariance {
        reports.push(verify::check_translation_covariance(
            &seq, pruning, args.trials, args.seed,
        )?);
    }

    let mut any_violation = false;
    for rep in &reports {
        let status = if rep.passed() { "PASS" } else { "FAIL" };
        println!(
            "suite {}: {status} ({} trials, {} violations, tightest lhs/rhs {:.6})",
            rep.suite,
            rep.trials,
            rep.violations.len(),
            rep.tightest_ratio
        );
        any_violation |= !rep.passed();
    }
    if let Some(output) = &args.output {
        write_atomic(output, |w| {
            w.write_all(serde_json::to_string_pretty(&reports)?.as_bytes())?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
        println!("reports -> {}", output.display());
    }
    Ok(if any_violation { ExitCode::from(5) } else { ExitCode::SUCCESS })
}

fn dims(args: DimsArgs) -> Result<ExitCode, Error> {
    let cfg = load_config(&args.config)?;
    let (seq, cfg_pruning) = build_sequence(&cfg, false)?;
    let pruning = args.pruning.map(PathPruning::from).unwrap_or(cfg_pruning);
    println!("{}", seq.feature_dimension(pruning));
    Ok(ExitCode::SUCCESS)
}

fn gen_cartoon(args: GenCartoonArgs) -> Result<ExitCode, Error> {
    if args.variation <= 0.0 {
        return Err(Error::InvalidParameter("variation K must be positive".into()));
    }
    let mut rng = verify::seeded_rng(args.seed, 0);
    let spec = cartoon::random_spec(args.variation, args.length, &mut rng);
    let sampled = cartoon::sample_cartoon(&spec, args.length)?;

    write_atomic(&args.output, |w| {
        if args.output.extension().map(|e| e == "csv").unwrap_or(false) {
            signal_io::write_csv(sampled.signal(), w)
        } else {
            signal_io::write_binary(sampled.signal(), w)
        }
    })?;
    let spec_path = sidecar_path(&args.output);
    write_atomic(&spec_path, |w| {
        w.write_all(serde_json::to_string_pretty(&spec)?.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    println!(
        "cartoon of variation {} sampled at {} points -> {} (+ {})",
        args.variation,
        args.length,
        args.output.display(),
        spec_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

// Temp file in the target directory, then rename.
fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> Result<(), Error>,
) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    body(&mut tmp)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
