mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clause_core::corpus::tsv::{read_annotations, read_answers, read_in, read_reference, write_answers, write_in};
use clause_core::corpus::{generate_episodes, AnswerLine, EpisodeOptions, RangeConvention};
use clause_core::eval::evaluate;
use clause_core::retrieve::{parse_override, Engine, FittedModels, PipelineConfig, ProjectorKind, Resources};
use clause_core::{Error, Result, Scalar};
use log::info;

use manifest::{manifest_path_for, sha256_hex, ConfigRecord, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "clause", version, about = "Few-shot clause span retrieval and Soft F1 evaluation")]
struct Cli {
    /// How `start-end` range fields are read and written.
    #[arg(long, global = true, default_value = "inclusive")]
    range_convention: RangeConvention,

    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw k-shot episodes from clause annotations.
    Subsample(SubsampleArgs),
    /// Answer every episode of an in.tsv file.
    Run(RunArgs),
    /// Score an out.tsv against expected.tsv.
    Evaluate(EvaluateArgs),
    /// Fit TF-IDF, common-component and projector models and save them.
    Fit(FitArgs),
    /// List built-in presets, or print one.
    Preset { name: Option<String> },
}

#[derive(Args, Debug)]
struct SubsampleArgs {
    /// Annotation file: doc_id, clause label, ranges.
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long, default_value_t = 2)]
    k_min: usize,
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// Episodes per clause and k.
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Output prefix; writes `<prefix>in.tsv` and `<prefix>expected.tsv`.
    #[arg(long)]
    out_prefix: String,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Pipeline configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Override a configuration key, e.g. `--set projector.rank=100`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for randomized fitting; overrides `projector.seed`.
    #[arg(long)]
    rng_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Reuse models saved by `fit` instead of fitting.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long = "in")]
    input: PathBuf,
    /// Reference corpus: doc_id, text.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    expected: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Print per-line precision, recall and F1 before the summary.
    #[arg(long)]
    per_line: bool,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    model_out: PathBuf,
}

fn text_of(bytes: Vec<u8>, path: &Path) -> Result<String> {
    String::from_utf8(bytes).map_err(|_| Error::Invalid(format!("{} is not valid UTF-8", path.display())))
}

fn read_input(m: &mut RunManifest, role: &str, path: &Path) -> Result<String> {
    let bytes = m.input(role, path)?;
    text_of(bytes, path)
}

/// Resolves the pipeline configuration. A model bundle supplies its own
/// configuration unless `--config` or `--preset` is given.
fn resolve_config(args: &ConfigArgs, bundled: Option<(&Path, &str)>, m: &mut RunManifest) -> Result<PipelineConfig> {
    let mut overrides = args
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(seed) = args.rng_seed {
        overrides.push(("projector.seed".into(), seed.to_string()));
    }
    let (config, source) = match (&args.config, &args.preset, bundled) {
        (Some(path), _, _) => {
            m.input("config", path)?;
            (PipelineConfig::load(path, &overrides)?, path.display().to_string())
        }
        (None, Some(name), _) => (PipelineConfig::preset(name, &overrides)?, format!("preset:{name}")),
        (None, None, Some((path, text))) => {
            let source = format!("model:{}", path.display());
            (PipelineConfig::parse(text, &source, None, &overrides)?, source)
        }
        (None, None, None) => return Err(Error::Config("one of --config or --preset is required".into())),
    };
    if config.projector.kind != ProjectorKind::None {
        m.rng_seed = Some(config.projector.seed);
    }
    m.config = Some(ConfigRecord {
        source,
        overrides: args.overrides.clone(),
        sha256: sha256_hex(config.canonical().as_bytes()),
    });
    for (role, path) in [
        ("lexicon", &config.vectorizer.lexicon),
        ("sidecar", &config.vectorizer.sidecar),
        ("frequencies", &config.aggregator.frequencies),
        ("abbreviations", &config.segmenter.abbreviations),
    ] {
        if let Some(p) = path {
            m.input(role, p)?;
        }
    }
    Ok(config)
}

fn cmd_subsample(args: &SubsampleArgs, m: &mut RunManifest) -> Result<PathBuf> {
    let text = read_input(m, "annotations", &args.annotations)?;
    let conv = parse_convention(&m.range_convention);
    let annotations = read_annotations(&text, &args.annotations.display().to_string(), conv)?;
    let opts = EpisodeOptions {
        k_min: args.k_min,
        k_max: args.k_max,
        per_clause_count: args.episodes,
        rng_seed: args.rng_seed,
    };
    m.rng_seed = Some(args.rng_seed);
    let labeled = generate_episodes(&annotations, &opts)?;
    let episodes: Vec<_> = labeled.iter().map(|l| l.episode.clone()).collect();
    let expected: Vec<AnswerLine> = labeled
        .iter()
        .map(|l| AnswerLine {
            line_no: l.episode.line_no,
            clause: l.episode.clause_label.clone(),
            span: l.expected.clone(),
        })
        .collect();
    info!("drew {} episodes", episodes.len());
    let in_path = PathBuf::from(format!("{}in.tsv", args.out_prefix));
    let exp_path = PathBuf::from(format!("{}expected.tsv", args.out_prefix));
    m.output("in", &in_path, write_in(&episodes, conv)?.as_bytes())?;
    m.output("expected", &exp_path, write_answers(&expected, conv)?.as_bytes())?;
    Ok(PathBuf::from(format!("{}manifest.json", args.out_prefix)))
}

fn cmd_run(args: &RunArgs, m: &mut RunManifest) -> Result<PathBuf> {
    let conv = parse_convention(&m.range_convention);
    let bundle = match &args.model {
        Some(path) => {
            let bytes = m.input("model", path)?;
            Some(FittedModels::<Scalar>::from_bytes(&bytes)?)
        }
        None => None,
    };
    let config = resolve_config(
        &args.config,
        bundle.as_ref().zip(args.model.as_deref()).map(|((text, _), p)| (p, text.as_str())),
        m,
    )?;
    let reference = read_input(m, "reference", &args.reference)?;
    let corpus = read_reference(&reference, &args.reference.display().to_string())?;
    let input = read_input(m, "in", &args.input)?;
    let episodes = read_in(&input, &args.input.display().to_string(), conv, Some(&corpus))?;
    let resources = Resources::<Scalar>::load(&config)?;
    let engine = match bundle {
        Some((_, models)) => Engine::with_models(config, &corpus, &resources, models)?,
        None => Engine::fit(config, &corpus, &resources)?,
    };
    info!("answering {} episodes", episodes.len());
    let answers = engine.run_file(&episodes)?;
    m.output("out", &args.out, write_answers(&answers, conv)?.as_bytes())?;
    Ok(manifest_path_for(&args.out))
}

fn cmd_fit(args: &FitArgs, m: &mut RunManifest) -> Result<PathBuf> {
    let config = resolve_config(&args.config, None, m)?;
    let reference = read_input(m, "reference", &args.reference)?;
    let corpus = read_reference(&reference, &args.reference.display().to_string())?;
    let resources = Resources::<Scalar>::load(&config)?;
    let canonical = config.canonical();
    let engine = Engine::fit(config, &corpus, &resources)?;
    let bytes = engine.models().to_bytes(&canonical);
    m.output("model", &args.model_out, &bytes)?;
    Ok(manifest_path_for(&args.model_out))
}

fn cmd_evaluate(args: &EvaluateArgs, conv: RangeConvention) -> Result<()> {
    let load = |path: &Path| -> Result<Vec<AnswerLine>> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        read_answers(&text_of(bytes, path)?, &path.display().to_string(), conv)
    };
    let expected = load(&args.expected)?;
    let returned = load(&args.out)?;
    let report = evaluate(&expected, &returned)?;
    if args.per_line {
        print!("{}", report.per_line_tsv());
    }
    println!("{}", report.summary_line());
    Ok(())
}

fn cmd_preset(name: Option<&str>) -> Result<()> {
    match name {
        None => {
            for n in PipelineConfig::preset_names() {
                println!("{n}");
            }
        }
        Some(n) => {
            let text = PipelineConfig::preset_text(n).ok_or_else(|| Error::Config(format!("unknown preset {n:?}")))?;
            print!("{text}");
        }
    }
    Ok(())
}

fn parse_convention(s: &str) -> RangeConvention {
    s.parse().expect("convention was parsed by clap")
}

fn dispatch(cli: &Cli, threads: usize) -> Result<()> {
    let conv = cli.range_convention;
    let mut m = RunManifest::start(command_name(&cli.command), conv.to_string(), threads);
    let manifest = match &cli.command {
        Command::Subsample(a) => cmd_subsample(a, &mut m)?,
        Command::Run(a) => cmd_run(a, &mut m)?,
        Command::Fit(a) => cmd_fit(a, &mut m)?,
        Command::Evaluate(a) => return cmd_evaluate(a, conv),
        Command::Preset { name } => return cmd_preset(name.as_deref()),
    };
    m.finish(&manifest)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Subsample(_) => "subsample",
        Command::Run(_) => "run",
        Command::Evaluate(_) => "evaluate",
        Command::Fit(_) => "fit",
        Command::Preset { .. } => "preset",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }

    match dispatch(&cli, threads) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 1 } else { 2 })
        }
    }
}
