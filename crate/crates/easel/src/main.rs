use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use easel::config::EaselConfig;
use easel::core::eval::{aggregate_annotations, child_activity_schema, parent_starter_schema, Embedder, HashEmbedder};
use easel::core::retelling::{compare_conditions_with, ZeroHandling};
use easel::core::Transcript;
use easel::embedding::HttpEmbedder;
use easel::evaluate::{agreement, evaluate_detection};
use easel::formats::lexicon::{default_lexicon, load_lexicon_file};
use easel::formats::tables::{read_annotations, read_labels, read_ratings, read_retellings};
use easel::pipeline::Pipeline;
use easel::provider::{ChatProvider, MockProvider, MockScript};
use easel::service::{router, serve, AppState};
use easel::sessions::SessionService;
use easel::store::Store;

#[derive(Parser)]
#[command(name = "easel", version, about = "SEL moment detection, activity generation, and evaluation")]
struct Cli {
    /// Config file. Defaults to ./easel.toml when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service over a content root.
    Serve {
        #[arg(long)]
        root: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Detect SEL skills in a transcript and print the detection report.
    Detect {
        #[command(flatten)]
        input: PipelineArgs,
    },
    /// Run the full pipeline on a transcript and print its output.
    Generate {
        #[command(flatten)]
        input: PipelineArgs,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score predictions against gold labels.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = EmbedderKind::Hash)]
        embedder: EmbedderKind,
        /// Embeddings endpoint for `--embedder http`.
        #[arg(long)]
        embedder_endpoint: Option<String>,
        #[arg(long, default_value = "text-embedding-3-small")]
        embedder_model: String,
        #[arg(long, default_value_t = 16)]
        embedder_dimension: usize,
        /// Human quality annotations to aggregate.
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SchemaKind::ChildActivity)]
        schema: SchemaKind,
        /// Long-format ratings (item_id, rater_id, value) for agreement.
        #[arg(long)]
        ratings: Option<PathBuf>,
    },
    /// Compare emotion-word use in retellings between conditions.
    RetellStats {
        /// Lexicon file; the bundled open lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        /// How zero paired differences enter the signed-rank test: discard or pratt.
        #[arg(long, default_value_t = ZeroHandling::Discard)]
        zeros: ZeroHandling,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct PipelineArgs {
    /// Transcript as JSON, or plain text named after its episode id.
    #[arg(long)]
    transcript: PathBuf,
    /// Mock provider script; overrides the configured provider.
    #[arg(long)]
    mock: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedderKind {
    Hash,
    Http,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    ChildActivity,
    ParentStarter,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<EaselConfig> {
    match path {
        Some(p) => EaselConfig::load(p),
        None if Path::new("easel.toml").exists() => EaselConfig::load(Path::new("easel.toml")),
        None => Ok(EaselConfig::default()),
    }
}

fn read_transcript(path: &Path) -> anyhow::Result<Transcript> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Transcript { episode_id: stem.clone(), title: stem, body: text, duration_minutes: None, source_note: None })
}

fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn provider_for(config: &EaselConfig, mock: Option<&Path>) -> anyhow::Result<Arc<dyn ChatProvider>> {
    match mock {
        Some(path) => Ok(Arc::new(MockProvider::new(MockScript::from_file(path)?))),
        None => config.provider(),
    }
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "easel=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Serve { root, port, host } => {
            let store = Arc::new(Store::open(&root)?);
            let sessions = SessionService::new(
                store,
                config.taxonomy()?,
                config.templates()?,
                config.provider()?,
                config.pipeline.clone(),
                config.service.explanation_required.clone(),
            )?;
            let videos = root.join(&config.service.videos_dir);
            let state = AppState { sessions: Arc::new(sessions), parent_secret: config.service.parent_secret.clone() };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(router(state, videos), SocketAddr::new(host, port)))?;
        }
        Command::Detect { input } => {
            let (taxonomy, templates) = (config.taxonomy()?, config.templates()?);
            let provider = provider_for(&config, input.mock.as_deref())?;
            let pipeline = Pipeline::new(&taxonomy, &templates, provider.as_ref(), &config.pipeline)?;
            let report = pipeline.detect_skills(&read_transcript(&input.transcript)?)?;
            emit(&report, input.out.as_deref())?;
        }
        Command::Generate { input, seed } => {
            if let Some(seed) = seed {
                config.pipeline.seed = seed;
            }
            let (taxonomy, templates) = (config.taxonomy()?, config.templates()?);
            let provider = provider_for(&config, input.mock.as_deref())?;
            let pipeline = Pipeline::new(&taxonomy, &templates, provider.as_ref(), &config.pipeline)?;
            let output = pipeline.run(&read_transcript(&input.transcript)?)?;
            emit(&output, input.out.as_deref())?;
        }
        Command::Eval {
            gold,
            pred,
            out,
            embedder,
            embedder_endpoint,
            embedder_model,
            embedder_dimension,
            annotations,
            schema,
            ratings,
        } => {
            let embedder: Box<dyn Embedder> = match embedder {
                EmbedderKind::Hash => Box::new(HashEmbedder::new(embedder_dimension)),
                EmbedderKind::Http => {
                    let Some(endpoint) = embedder_endpoint else {
                        bail!("--embedder http needs --embedder-endpoint");
                    };
                    Box::new(HttpEmbedder::new(&endpoint, &embedder_model, embedder_dimension)?)
                }
            };
            let mut report = evaluate_detection(&read_labels(&gold)?, &read_labels(&pred)?, embedder.as_ref())?;
            if let Some(path) = ratings {
                report.rater_agreement = Some(agreement(&read_ratings(&path)?)?);
            }
            if let Some(path) = annotations {
                let schema = match schema {
                    SchemaKind::ChildActivity => child_activity_schema(),
                    SchemaKind::ParentStarter => parent_starter_schema(),
                };
                report.annotations = Some(aggregate_annotations(&read_annotations(&path, &schema)?, &schema)?);
            }
            emit(&report, Some(&out))?;
        }
        Command::RetellStats { lexicon, data, zeros, out } => {
            let lexicon = match lexicon {
                Some(path) => load_lexicon_file(&path)?,
                None => default_lexicon(),
            };
            let report = compare_conditions_with(&read_retellings(&data)?, &lexicon, zeros)?;
            emit(&report, out.as_deref())?;
        }
    }
    Ok(())
}
