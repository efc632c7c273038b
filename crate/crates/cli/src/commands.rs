use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use viewsnip_core::corpus::{ingest_corpus, write_corpus, Document};
use viewsnip_core::evaluate::{build_report, read_annotations, render_text};
use viewsnip_core::extract::{extract_batch, ExtractError, ExtractOptions, SnippetRecord};
use viewsnip_core::preprocess::PreprocessOptions;
use viewsnip_core::relevance::Bm25Params;
use viewsnip_core::serpgen::{display_query, render, SerpPage, DEFAULT_QUERY_TEMPLATE};
use viewsnip_core::synth;
use viewsnip_core::viewpoint::{train_baseline, BaselineModel, RemoteClassifier, TrainParams};
use viewsnip_core::{Caption, InterventionCondition, Viewpoint, ViewpointClassifier};

use crate::cli::{EvaluateArgs, ExtractArgs, IngestArgs, SerpArgs, SynthCommand, TrainArgs};
use crate::config::Config;
use crate::failure::{io_failure, Failure};

pub const ENDPOINT_ENV: &str = "VIEWSNIP_ENDPOINT";
const DEFAULT_TIMEOUT_SECS: u64 = 30;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure("create directory", dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_failure("create", path, e))
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), Failure> {
    write_rows(create(path)?, path, rows)
}

fn write_rows<T: Serialize>(mut w: impl Write, path: &Path, rows: &[T]) -> Result<(), Failure> {
    for row in rows {
        let line = serde_json::to_string(row).map_err(Failure::data)?;
        writeln!(w, "{line}").map_err(|e| io_failure("write", path, e))?;
    }
    w.flush().map_err(|e| io_failure("write", path, e))
}

fn load_corpus(path: &Path) -> Result<Vec<Document>, Failure> {
    ingest_corpus(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

pub fn ingest(args: &IngestArgs) -> Result<(), Failure> {
    let docs = load_corpus(&args.input)?;
    let mut pairs: BTreeMap<String, usize> = BTreeMap::new();
    for d in &docs {
        *pairs.entry(d.ic.query_id()).or_default() += 1;
    }
    log::info!("{} documents over {} pairs", docs.len(), pairs.len());
    for (q, n) in &pairs {
        log::debug!("{q}: {n}");
    }
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_corpus(&mut w, &docs)
                .and_then(|_| w.flush())
                .map_err(|e| io_failure("write", path, e))
        }
        None => {
            let stdout = io::stdout();
            write_corpus(stdout.lock(), &docs).map_err(|e| Failure::Data(e.to_string()))
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainingExample {
    text: String,
    viewpoint: Viewpoint,
}

fn read_training(path: &Path) -> Result<Vec<(String, Viewpoint)>, Failure> {
    let file = File::open(path).map_err(|e| io_failure("read", path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_failure("read", path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let ex: TrainingExample = serde_json::from_str(&line).map_err(|e| {
            Failure::Data(format!("{}: malformed line {}: {e}", path.display(), i + 1))
        })?;
        out.push((ex.text, ex.viewpoint));
    }
    Ok(out)
}

pub fn train(args: &TrainArgs, config: &Config, seed: Option<u64>) -> Result<(), Failure> {
    let data = read_training(&args.data)?;
    let defaults = TrainParams::default();
    let params = TrainParams {
        epochs: args.epochs.unwrap_or(defaults.epochs),
        learning_rate: args.learning_rate.unwrap_or(defaults.learning_rate),
        l2: args.l2.unwrap_or(defaults.l2),
        min_df: args.min_df.unwrap_or(defaults.min_df),
    };
    let seed = seed.or(config.seed).unwrap_or(0);
    let model = train_baseline(&data, &params, seed).map_err(Failure::data)?;
    // the baseline ignores the pair, so any valid one will do
    let ic = InterventionCondition::new("x", "y").expect("static pair");
    let correct = data
        .iter()
        .filter(|(text, v)| model.classify(text, &ic).is_ok_and(|d| d.predicted() == *v))
        .count();
    log::info!(
        "trained on {} examples, vocabulary {}, training accuracy {:.2}%",
        data.len(),
        model.vocabulary().len(),
        100.0 * correct as f64 / data.len().max(1) as f64
    );
    model.save(&args.out).map_err(Failure::data)
}

enum ModelSource {
    File(PathBuf),
    Remote(String),
}

fn model_source(args: &ExtractArgs, config: &Config) -> Result<ModelSource, Failure> {
    if let Some(p) = &args.model {
        return Ok(ModelSource::File(p.clone()));
    }
    if let Some(url) = &args.endpoint {
        return Ok(ModelSource::Remote(url.clone()));
    }
    if let Some(url) = std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty()) {
        return Ok(ModelSource::Remote(url));
    }
    match (&config.model, &config.endpoint) {
        (Some(_), Some(_)) => Err(Failure::Usage(
            "config sets both `model` and `endpoint`; keep one".into(),
        )),
        (Some(p), None) => Ok(ModelSource::File(p.clone())),
        (None, Some(url)) => Ok(ModelSource::Remote(url.clone())),
        (None, None) => Err(Failure::Usage(format!(
            "no classifier: pass --model FILE or --endpoint URL (or set {ENDPOINT_ENV})"
        ))),
    }
}

fn extract_options(args: &ExtractArgs, config: &Config) -> ExtractOptions {
    let defaults = ExtractOptions::default();
    ExtractOptions {
        preprocess: PreprocessOptions {
            bm25: Bm25Params {
                k1: args
                    .bm25_k1
                    .or(config.bm25.k1)
                    .unwrap_or(defaults.preprocess.bm25.k1),
                b: args
                    .bm25_b
                    .or(config.bm25.b)
                    .unwrap_or(defaults.preprocess.bm25.b),
            },
            window_words: args
                .window_words
                .or(config.preprocess.window_words)
                .unwrap_or(defaults.preprocess.window_words),
            allow_fallback: !args.no_fallback
                && config
                    .preprocess
                    .fallback
                    .unwrap_or(defaults.preprocess.allow_fallback),
        },
        crop_limit: args
            .crop_limit
            .or(config.extract.crop_limit)
            .unwrap_or(defaults.crop_limit),
    }
}

#[derive(Debug, Serialize)]
struct ErrorRecord<'a> {
    doc_id: &'a str,
    error: String,
    remote: bool,
}

pub fn extract(args: &ExtractArgs, config: &Config) -> Result<(), Failure> {
    let opts = extract_options(args, config);
    opts.preprocess
        .bm25
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if opts.preprocess.window_words == 0 {
        return Err(Failure::Usage("--window-words must be at least 1".into()));
    }
    if opts.crop_limit < 4 {
        return Err(Failure::Usage("--crop-limit must be at least 4".into()));
    }
    let model: Box<dyn ViewpointClassifier> = match model_source(args, config)? {
        ModelSource::File(p) => Box::new(BaselineModel::load(&p).map_err(Failure::data)?),
        ModelSource::Remote(url) => {
            let timeout = args
                .timeout_secs
                .or(config.timeout_secs)
                .unwrap_or(DEFAULT_TIMEOUT_SECS);
            let remote = RemoteClassifier::new(&url, Duration::from_secs(timeout))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            Box::new(remote)
        }
    };
    log::info!("classifier: {}", model.identity());
    let docs = load_corpus(&args.corpus)?;
    // open outputs before the expensive part so bad paths fail fast
    let errors_path = args.errors.clone().unwrap_or_else(|| sidecar(&args.out));
    let out = create(&args.out)?;
    let errors_out = create(&errors_path)?;
    let results = extract_batch(model.as_ref(), &docs, &opts);

    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (doc, r) in docs.iter().zip(&results) {
        match r {
            Ok(s) => records.push(s.to_record()),
            Err(e) => {
                log::warn!("{e}");
                errors.push(ErrorRecord {
                    doc_id: &doc.id,
                    error: e.to_string(),
                    remote: is_remote(e),
                });
            }
        }
    }
    write_rows(out, &args.out, &records)?;
    write_rows(errors_out, &errors_path, &errors)?;
    log::info!("{} snippets, {} failures", records.len(), errors.len());

    if errors.is_empty() {
        return Ok(());
    }
    let summary = format!(
        "{} of {} documents failed; see {}",
        errors.len(),
        docs.len(),
        errors_path.display()
    );
    if errors.iter().any(|e| e.remote) {
        Err(Failure::Remote(summary))
    } else {
        Err(Failure::Data(summary))
    }
}

fn is_remote(e: &ExtractError) -> bool {
    e.classify_error().is_some_and(|c| c.is_remote())
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".errors.jsonl");
    out.with_file_name(name)
}

fn parse_pair(s: &str) -> Result<(String, String), Failure> {
    match s.split_once(':') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(Failure::Usage(format!("--chi2 expects A:B, got '{s}'"))),
    }
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let pairs = args
        .chi2
        .iter()
        .map(|s| parse_pair(s))
        .collect::<Result<Vec<_>, _>>()?;
    let records = read_annotations(&args.annotations).map_err(Failure::data)?;
    let report =
        build_report(&records, &args.methods, &pairs, args.yates).map_err(Failure::data)?;
    let text = render_text(&report);
    fs::create_dir_all(&args.out).map_err(|e| io_failure("create directory", &args.out, e))?;
    let json = serde_json::to_string_pretty(&report).map_err(Failure::data)? + "\n";
    let json_path = args.out.join("report.json");
    fs::write(&json_path, json).map_err(|e| io_failure("write", &json_path, e))?;
    let txt_path = args.out.join("report.txt");
    fs::write(&txt_path, &text).map_err(|e| io_failure("write", &txt_path, e))?;
    print!("{text}");
    Ok(())
}

fn read_snippets(path: &Path) -> Result<Vec<SnippetRecord>, Failure> {
    let file = File::open(path).map_err(|e| io_failure("read", path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_failure("read", path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| {
            Failure::Data(format!("{}: malformed line {}: {e}", path.display(), i + 1))
        })?);
    }
    Ok(out)
}

pub fn serp(args: &SerpArgs, config: &Config, seed: Option<u64>) -> Result<(), Failure> {
    let snippets = read_snippets(&args.snippets)?;
    let docs = load_corpus(&args.corpus)?;
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let template = args
        .template
        .as_deref()
        .or(config.serp.template.as_deref())
        .unwrap_or(DEFAULT_QUERY_TEMPLATE);
    let seed = seed.or(config.seed).unwrap_or(0);

    // query id -> (first document, captions in snippet-file order)
    let mut queries: BTreeMap<String, (&Document, Vec<Caption>)> = BTreeMap::new();
    for s in &snippets {
        let doc = by_id
            .get(s.doc_id.as_str())
            .ok_or_else(|| Failure::Data(format!("snippet for unknown document '{}'", s.doc_id)))?;
        queries
            .entry(doc.ic.query_id())
            .or_insert_with(|| (doc, Vec::new()))
            .1
            .push(Caption::new(doc, s.snippet.clone()));
    }
    if let Some(q) = &args.query_id {
        queries.retain(|k, _| k == q);
        if queries.is_empty() {
            return Err(Failure::Data(format!("no snippets for query '{q}'")));
        }
    }
    fs::create_dir_all(&args.out).map_err(|e| io_failure("create directory", &args.out, e))?;
    for (qid, (doc, captions)) in &queries {
        let page = SerpPage::new(
            display_query(template, &doc.ic),
            qid.clone(),
            captions,
            seed,
            &args.method,
        );
        let html = render(&page).map_err(Failure::data)?;
        let path = args.out.join(format!("{qid}.html"));
        fs::write(&path, html).map_err(|e| io_failure("write", &path, e))?;
        log::info!("{}: {} captions", path.display(), captions.len());
    }
    Ok(())
}

pub fn synth(cmd: &SynthCommand, seed: Option<u64>) -> Result<(), Failure> {
    let seed = seed.unwrap_or(0);
    match cmd {
        SynthCommand::Corpus { documents, out } => {
            let docs = synth::fixture_corpus(*documents, seed);
            let mut w = create(out)?;
            write_corpus(&mut w, &docs)
                .and_then(|_| w.flush())
                .map_err(|e| io_failure("write", out, e))
        }
        SynthCommand::Training { per_class, out } => {
            let rows: Vec<TrainingExample> = synth::separable_corpus(*per_class, seed)
                .into_iter()
                .map(|(text, viewpoint)| TrainingExample { text, viewpoint })
                .collect();
            write_jsonl(out, &rows)
        }
        SynthCommand::Annotations {
            reference,
            method,
            snippets,
            per_snippet,
            out,
        } => {
            let rows = if *reference {
                synth::reference_counts()
                    .into_iter()
                    .flat_map(|(m, groups)| synth::annotations_from_counts(m, &groups))
                    .collect()
            } else {
                synth::random_annotations(seed, method, *snippets, *per_snippet)
            };
            write_jsonl(out, &rows)
        }
    }
}
