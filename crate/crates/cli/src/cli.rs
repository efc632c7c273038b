use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "viewsnip",
    version,
    about = "Viewpoint-focused snippet extraction for health search results"
)]
pub struct Cli {
    /// TOML configuration file; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output on stderr (-v info, -vv debug, -vvv trace)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Worker threads for batch work (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Seed for training, caption order and synthetic data
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and rewrite it in normalized JSONL form
    Ingest(IngestArgs),
    /// Train the bag-of-words baseline classifier
    Train(TrainArgs),
    /// Extract one snippet per document
    Extract(ExtractArgs),
    /// Compute reliability tables from annotations
    Evaluate(EvaluateArgs),
    /// Render static results pages from extracted snippets
    Serp(SerpArgs),
    /// Generate synthetic corpora, training sets and annotations
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Corpus JSONL
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Where to write the normalized corpus (default: stdout)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training JSONL with `text` and `viewpoint` fields
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Model file to write
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    /// Drop terms seen in fewer than this many examples
    #[arg(long)]
    pub min_df: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Corpus JSONL
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Snippet JSONL to write
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Per-document failures (default: <out>.errors.jsonl)
    #[arg(long, value_name = "FILE")]
    pub errors: Option<PathBuf>,
    /// Baseline model file
    #[arg(long, value_name = "FILE", conflicts_with = "endpoint")]
    pub model: Option<PathBuf>,
    /// Remote classifier URL; also read from VIEWSNIP_ENDPOINT
    #[arg(long, value_name = "URL")]
    pub endpoint: Option<String>,
    /// Remote request timeout
    #[arg(long, value_name = "SECS")]
    pub timeout_secs: Option<u64>,
    #[arg(long, value_name = "K1")]
    pub bm25_k1: Option<f64>,
    #[arg(long, value_name = "B")]
    pub bm25_b: Option<f64>,
    /// Token budget of each classifier window
    #[arg(long, value_name = "N")]
    pub window_words: Option<usize>,
    /// Fail a document instead of falling back when no window names both terms
    #[arg(long)]
    pub no_fallback: bool,
    /// Maximum snippet length in characters
    #[arg(long, value_name = "N")]
    pub crop_limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Annotation JSONL
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    /// Methods to report on, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<String>,
    /// Method pair to compare, as A:B; repeatable
    #[arg(long, value_name = "A:B")]
    pub chi2: Vec<String>,
    /// Continuity correction on 2x2 tables
    #[arg(long)]
    pub yates: bool,
    /// Output directory for report.json and report.txt
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SerpArgs {
    /// Snippet JSONL produced by `extract`
    #[arg(long, value_name = "FILE")]
    pub snippets: PathBuf,
    /// Corpus the snippets were extracted from
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Render only this query (default: every query in the snippets)
    #[arg(long, value_name = "ID")]
    pub query_id: Option<String>,
    /// Tag recorded in the page, e.g. the extraction method
    #[arg(long, value_name = "TAG")]
    pub method: String,
    /// Query box text, with {intervention} and {condition} placeholders
    #[arg(long)]
    pub template: Option<String>,
    /// Output directory; one <query-id>.html per query
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Random documents cycling through the built-in pairs
    Corpus {
        #[arg(long, default_value_t = 42)]
        documents: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Separable training texts for the baseline
    Training {
        #[arg(long, default_value_t = 30)]
        per_class: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Annotation records, random or from the reference counts
    Annotations {
        /// Emit the three-method reference counts instead of random labels
        #[arg(long, conflicts_with_all = ["method", "snippets", "per_snippet"])]
        reference: bool,
        #[arg(long, default_value = "random")]
        method: String,
        #[arg(long, default_value_t = 42)]
        snippets: usize,
        #[arg(long, default_value_t = 10)]
        per_snippet: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}
