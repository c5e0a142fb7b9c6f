use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sketch_concepts::api::{complete_output, parse_output, sketch_from_json};
use sketch_concepts::completion::CompletionOptions;
use sketch_concepts::concept::ConceptLibrary;
use sketch_concepts::eval::{curves_csv, evaluate_corpus, library_stats, EvalOptions};
use sketch_concepts::induction::parse::parse_sketch;
use sketch_concepts::induction::select::{induce_library, InduceOptions};
use sketch_concepts::service::{serve, ServiceConfig};
use sketch_concepts::sketch::corpus::{ingest_corpus, read_sketches, IngestOptions, SCHEMA_VERSION};
use sketch_concepts::sketch::QuantizationSpec;
use sketch_concepts::Result;

#[derive(Parser)]
#[command(name = "sketchcon", version, about = "Concept induction, parsing and completion for CAD sketches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize, filter, deduplicate and augment a raw corpus.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        size_min: usize,
        #[arg(long, default_value_t = 50)]
        size_max: usize,
        #[arg(long)]
        no_augment: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Induce a concept library from an ingested corpus.
    Induce {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lib: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_size: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda_bias: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumeration budget per sketch.
        #[arg(long, default_value_t = InduceOptions::default().budget)]
        budget: usize,
    },
    /// Parse one sketch into concept instances.
    Parse {
        #[arg(long, env = "CONCEPT_LIB")]
        lib: PathBuf,
        #[arg(long)]
        sketch: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Complete a partial sketch.
    Complete {
        #[arg(long, env = "CONCEPT_LIB")]
        lib: PathBuf,
        #[arg(long)]
        sketch: PathBuf,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruction, modularity and completion metrics over a corpus.
    Eval {
        #[arg(long, env = "CONCEPT_LIB")]
        lib: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Also report the induction losses of every parse.
        #[arg(long)]
        losses: bool,
        /// Suffix ratios for completion curves.
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<f64>,
        #[arg(long)]
        curves: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Library usage and complexity statistics.
    Stats {
        #[arg(long, env = "CONCEPT_LIB")]
        lib: PathBuf,
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "CONCEPT_LIB")]
        lib: PathBuf,
        #[arg(long, env = "BIND_ADDR", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 2 << 20)]
        max_body_bytes: usize,
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(body: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(body)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let quant = QuantizationSpec::default();
    match cli.command {
        Command::Ingest { input, out, size_min, size_max, no_augment, seed } => {
            let opts = IngestOptions { size_min, size_max, augment: !no_augment, seed, quant };
            let ingested = ingest_corpus(&input, &opts)?;
            ingested.corpus_file().write(&out)?;
            emit(&Versioned { schema_version: SCHEMA_VERSION, body: &ingested.report }, None)
        }
        Command::Induce { corpus, lib, max_size, lambda_bias, seed, budget } => {
            let sketches = read_sketches(&corpus, &quant)?;
            let opts = InduceOptions { max_size, lambda_bias, seed, budget, ..Default::default() };
            let (library, report) = induce_library(&sketches, &opts)?;
            library.save(&lib)?;
            eprintln!("{} concepts induced from {} candidates", report.selected.len(), report.candidates);
            emit(&Versioned { schema_version: SCHEMA_VERSION, body: &report }, None)
        }
        Command::Parse { lib, sketch, out, svg } => {
            let library = ConceptLibrary::load(&lib)?;
            let text = std::fs::read_to_string(&sketch)?;
            let s = sketch_from_json(&text, &sketch.display().to_string(), &quant)?;
            let mut output = parse_output(&s, &library, &quant, svg.is_some())?;
            if let (Some(path), Some(doc)) = (&svg, output.svg.take()) {
                std::fs::write(path, doc)?;
            }
            if !output.roundtrip {
                log::warn!("assembled decomposition differs from the input sketch");
            }
            emit(&output, out.as_deref())
        }
        Command::Complete { lib, sketch, top_k, out } => {
            let library = ConceptLibrary::load(&lib)?;
            let text = std::fs::read_to_string(&sketch)?;
            let s = sketch_from_json(&text, &sketch.display().to_string(), &quant)?;
            let output = complete_output(&s, &library, &CompletionOptions { top_k, quant })?;
            emit(&output, out.as_deref())
        }
        Command::Eval { lib, corpus, losses, ratios, curves, out } => {
            let library = ConceptLibrary::load(&lib)?;
            let sketches = read_sketches(&corpus, &quant)?;
            let report = evaluate_corpus(&library, &sketches, &EvalOptions { losses, ratios, quant })?;
            if let Some(path) = curves {
                std::fs::write(path, curves_csv(&report.completion))?;
            }
            emit(&Versioned { schema_version: SCHEMA_VERSION, body: &report }, out.as_deref())
        }
        Command::Stats { lib, corpus } => {
            let library = ConceptLibrary::load(&lib)?;
            let sketches = match corpus {
                Some(p) => read_sketches(&p, &quant)?,
                None => Vec::new(),
            };
            let parses = sketches.iter().map(|s| parse_sketch(s, &library)).collect::<Result<Vec<_>>>()?;
            let decomps: Vec<_> = parses.iter().map(|p| &p.decomposition).collect();
            let stats = library_stats(&library, &decomps);
            emit(&Versioned { schema_version: SCHEMA_VERSION, body: &stats }, None)
        }
        Command::Serve { lib, bind, corpus, max_body_bytes, cors_origin } => {
            let config = ServiceConfig { bind, library_path: lib, corpus_path: corpus, max_body_bytes, cors_origin };
            tokio::runtime::Runtime::new()?.block_on(serve(config))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
