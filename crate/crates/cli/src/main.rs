use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use reqcomp::commands::{
    cmd_baseline, cmd_evaluate, cmd_mine, cmd_recommend, cmd_train, BaselineOptions, CommandError, EvaluateOptions,
    ProviderSource, RunConfig, TrainOptions,
};
use reqcomp::ml::{Algorithm, Preset};

/// Suggests terminology a requirements document may be missing.
///
/// Every option can also be set through an environment variable named
/// REQCOMP_<OPTION>, e.g. REQCOMP_PROVIDER_URL.
#[derive(Parser)]
#[command(name = "reqcomp", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Plain-text requirements document, one per file (repeatable).
    #[arg(long, global = true, env = "REQCOMP_INPUT", value_delimiter = ',')]
    input: Vec<PathBuf>,
    /// Predictions per masked word.
    #[arg(long, global = true, env = "REQCOMP_K", default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..=50))]
    k: u64,
    /// Filter preset: none, strict, moderate or lenient.
    #[arg(long, global = true, env = "REQCOMP_PRESET", default_value = "none", value_parser = parse_preset)]
    preset: PresetArg,
    /// Base URL of a fill-mask service.
    #[arg(long, global = true, env = "REQCOMP_PROVIDER_URL", conflicts_with = "fixture")]
    provider_url: Option<String>,
    /// Recorded predictions: a fixture file or a directory of them.
    #[arg(long, global = true, env = "REQCOMP_FIXTURE")]
    fixture: Option<PathBuf>,
    /// Saved domain corpus (output of `mine`).
    #[arg(long, global = true, env = "REQCOMP_CORPUS_DIR")]
    corpus_dir: Option<PathBuf>,
    /// MediaWiki API endpoint to mine corpora from.
    #[arg(long, global = true, env = "REQCOMP_WIKI_URL")]
    wiki_url: Option<String>,
    /// Cache for MediaWiki responses.
    #[arg(long, global = true, env = "REQCOMP_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Requests per second toward the MediaWiki endpoint (0 = unthrottled).
    #[arg(long, global = true, env = "REQCOMP_WIKI_RATE", default_value_t = 10.0)]
    wiki_rate: f64,
    /// Category levels to follow beyond direct article matches.
    #[arg(long, global = true, env = "REQCOMP_DEPTH", default_value_t = 0)]
    depth: usize,
    /// Word vectors in text format (word followed by its components).
    #[arg(long, global = true, env = "REQCOMP_EMBEDDINGS")]
    embeddings: Option<PathBuf>,
    /// Trained filter model (written by `train`, read elsewhere).
    #[arg(long, global = true, env = "REQCOMP_MODEL")]
    model: Option<PathBuf>,
    #[arg(long, global = true, env = "REQCOMP_SEED", default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, env = "REQCOMP_OUT")]
    out: Option<PathBuf>,
    /// Common English words, most frequent first, one per line.
    #[arg(long, global = true, env = "REQCOMP_COMMON_WORDS")]
    common_words: Option<PathBuf>,
    #[arg(long, global = true, env = "REQCOMP_STOP_WORDS")]
    stop_words: Option<PathBuf>,
    /// WordNet database file or directory, for the synonym baseline.
    #[arg(long, global = true, env = "REQCOMP_SYNONYMS")]
    synonyms: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Recommend terms for each full input document.
    Recommend,
    /// Mine a domain corpus for each input.
    Mine,
    /// Train a filter on labeled splits of the inputs.
    Train {
        /// Learner to use when no preset is given: lr, dt, rf, svm or nn.
        #[arg(long, env = "REQCOMP_ALGORITHM")]
        algorithm: Option<Algorithm>,
    },
    /// Withhold half of each input and score the recommendations.
    Evaluate {
        #[arg(long, env = "REQCOMP_REPETITIONS", default_value_t = 1)]
        repetitions: usize,
        /// Also run the baselines on every split.
        #[arg(long, env = "REQCOMP_BASELINES")]
        baselines: bool,
        /// Corpus terms taken by the TF-IDF baseline.
        #[arg(long, env = "REQCOMP_K_TOP", default_value_t = 1000)]
        k_top: usize,
    },
    /// Run the baselines on one split of each input.
    Baseline {
        /// 1, 2 or 3 (repeatable). Defaults to 1 and 2, plus 3 when a
        /// synonym lexicon is given.
        #[arg(long = "baseline", value_parser = clap::value_parser!(u8).range(1..=3))]
        which: Vec<u8>,
        #[arg(long, env = "REQCOMP_K_TOP", default_value_t = 1000)]
        k_top: usize,
    },
}

/// `none` or a preset. Clap reads a bare `Option` as "flag may be absent".
#[derive(Clone)]
struct PresetArg(Option<Preset>);

fn parse_preset(s: &str) -> Result<PresetArg, String> {
    if s.eq_ignore_ascii_case("none") {
        Ok(PresetArg(None))
    } else {
        s.parse().map(|p| PresetArg(Some(p))).map_err(|e| e.to_string())
    }
}

impl Common {
    fn run_config(self) -> RunConfig {
        let provider = match (self.provider_url, self.fixture) {
            (Some(url), _) => Some(ProviderSource::Url(url)),
            (None, Some(path)) => Some(ProviderSource::Fixture(path)),
            (None, None) => None,
        };
        RunConfig {
            inputs: self.input,
            provider,
            k: self.k as usize,
            preset: self.preset.0,
            corpus_dir: self.corpus_dir,
            wiki_url: self.wiki_url,
            cache_dir: self.cache_dir,
            wiki_rate: self.wiki_rate,
            depth: self.depth,
            embeddings: self.embeddings,
            model: self.model,
            common_words: self.common_words,
            stop_words: self.stop_words,
            synonyms: self.synonyms,
            seed: self.seed,
            out: self.out,
        }
    }
}

fn print<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: Cli) -> Result<(), CommandError> {
    let config = cli.common.run_config();
    match cli.command {
        Command::Recommend => print(&cmd_recommend(&config)?),
        Command::Mine => print(&cmd_mine(&config)?),
        Command::Train { algorithm } => print(&cmd_train(
            &config,
            &TrainOptions {
                algorithm,
                params: None,
            },
        )?),
        Command::Evaluate {
            repetitions,
            baselines,
            k_top,
        } => {
            let report = cmd_evaluate(
                &config,
                &EvaluateOptions {
                    repetitions,
                    baselines,
                    k_top,
                },
            )?;
            print(&report.summaries);
            for f in &report.failures {
                log::warn!("{} repetition {}: {}", f.doc_id, f.repetition, f.error);
            }
        }
        Command::Baseline { which, k_top } => {
            let which: BTreeSet<u8> = match (which.is_empty(), config.synonyms.is_some()) {
                (false, _) => which.into_iter().collect(),
                (true, true) => [1, 2, 3].into(),
                (true, false) => [1, 2].into(),
            };
            print(&cmd_baseline(&config, &BaselineOptions { which, k_top })?)
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reqcomp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
