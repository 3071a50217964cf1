mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use wordset::corpus::{write_directory, SplitRounding};
use wordset::rational::format_decimal;
use wordset::synthetic::SyntheticSpec;
use wordset::{
    classify_text, evaluate, learning_curve, load_corpus, train, ClassificationResult,
    CorpusFormat, ProbabilityTable, SmoothingMode, Transaction,
};

use config::{ReportFormat, RunConfig};

/// Text classification with maximal frequent word sets.
#[derive(Debug, Parser)]
#[command(name = "wordset", version)]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine word sets from a labeled corpus and write a model file.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        text: TextArgs,
        #[command(flatten)]
        mining: MiningArgs,
    },
    /// Classify text files with a trained model.
    Classify {
        #[arg(long)]
        model: PathBuf,
        /// Text files to classify.
        #[arg(long = "in", value_name = "FILE", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        /// Print keywords, matched sets and the per-class score breakdown.
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        text: TextArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Classify a labeled corpus and report accuracy and the confusion matrix.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Training document ids, one per line, checked for overlap with the test set.
        #[arg(long, value_name = "FILE")]
        train_ids: Option<PathBuf>,
        #[command(flatten)]
        text: TextArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Accuracy over several training fractions and seeds.
    Curve {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated training fractions, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
        /// Comma-separated split seeds; overrides --seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        seed: Option<u64>,
        /// How per-class training sizes are rounded: nearest or tenths-then-nearest.
        #[arg(long, value_parser = parse_rounding)]
        rounding: Option<SplitRounding>,
        #[command(flatten)]
        text: TextArgs,
        #[command(flatten)]
        mining: MiningArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Print the counts, probabilities and class summary of a model.
    Inspect {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Write the planted-pattern synthetic corpus as one directory per class.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long)]
        docs_per_class: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct TextArgs {
    /// Stopword file replacing the built-in list.
    #[arg(long, env = "WORDSET_STOPWORDS", value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Minimum occurrences of a word within a document for it to be a keyword.
    #[arg(long)]
    min_doc_freq: Option<usize>,
}

#[derive(Debug, Args)]
struct MiningArgs {
    /// Minimum number of transactions containing a set.
    #[arg(long, conflicts_with = "support_fraction")]
    support_count: Option<usize>,
    /// Minimum share of transactions containing a set, in (0, 1].
    #[arg(long)]
    support_fraction: Option<f64>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    max_set_size: Option<usize>,
    /// paper-table or per-class.
    #[arg(long, value_parser = parse_smoothing)]
    smoothing: Option<SmoothingMode>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_smoothing(s: &str) -> Result<SmoothingMode, String> {
    s.parse().map_err(|e: wordset::Error| e.to_string())
}

fn parse_rounding(s: &str) -> Result<SplitRounding, String> {
    match s {
        "nearest" => Ok(SplitRounding::Nearest),
        "tenths-then-nearest" => Ok(SplitRounding::TenthsThenNearest),
        other => Err(format!(
            "unknown rounding `{other}` (expected nearest or tenths-then-nearest)"
        )),
    }
}

impl TextArgs {
    fn settings(self) -> RunConfig {
        RunConfig {
            stopwords: self.stopwords,
            min_doc_freq: self.min_doc_freq,
            ..RunConfig::default()
        }
    }
}

impl MiningArgs {
    fn apply(self, base: RunConfig) -> RunConfig {
        RunConfig {
            support_count: self.support_count,
            support_fraction: self.support_fraction,
            confidence: self.confidence,
            max_set_size: self.max_set_size,
            smoothing: self.smoothing,
            ..base
        }
    }
}

impl ReportArgs {
    fn apply(&self, base: RunConfig) -> RunConfig {
        RunConfig {
            format: self.format,
            ..base
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("wordset: error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let file = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Train {
            corpus,
            out,
            text,
            mining,
        } => {
            let settings = file.overlay(mining.apply(text.settings()));
            let config = settings.train()?;
            let corpus = load(&corpus)?;
            let table = train(&corpus, &config).map_err(|e| e.to_string())?;
            table.save(&out).map_err(|e| e.to_string())?;
            println!(
                "wrote {} word sets over {} classes to {}",
                table.total_sets(),
                table.classes().len(),
                out.display()
            );
            Ok(())
        }
        Command::Classify {
            model,
            inputs,
            explain,
            text,
            report,
        } => {
            let settings = file.overlay(report.apply(text.settings()));
            let preprocess = settings.preprocess()?;
            let table = ProbabilityTable::load(&model).map_err(|e| e.to_string())?;
            let mut results = Vec::with_capacity(inputs.len());
            for path in &inputs {
                let body = read(path)?;
                let id = path.display().to_string();
                results.push((id.clone(), classify_text(&table, &id, &body, &preprocess)));
            }
            let output = match settings.format() {
                ReportFormat::Csv => classification_text(&table, &results, explain),
                ReportFormat::Json => pretty(&classification_json(&table, &results, explain)),
            };
            emit(report.out.as_deref(), &output)
        }
        Command::Evaluate {
            model,
            corpus,
            train_ids,
            text,
            report,
        } => {
            let settings = file.overlay(report.apply(text.settings()));
            let preprocess = settings.preprocess()?;
            let table = ProbabilityTable::load(&model).map_err(|e| e.to_string())?;
            let test = load(&corpus)?;
            let train_ids = match &train_ids {
                Some(path) => Some(
                    read(path)?
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty())
                        .map(String::from)
                        .collect::<Vec<_>>(),
                ),
                None => None,
            };
            let result = evaluate(&table, &test, &preprocess, train_ids.as_deref())
                .map_err(|e| e.to_string())?;
            if !result.leaked_ids.is_empty() {
                eprintln!(
                    "wordset: warning: {} test documents also appear in the training ids",
                    result.leaked_ids.len()
                );
            }
            let output = match settings.format() {
                ReportFormat::Csv => result.to_csv(),
                ReportFormat::Json => {
                    pretty(&serde_json::to_value(&result).expect("report serializes"))
                }
            };
            emit(report.out.as_deref(), &output)
        }
        Command::Curve {
            corpus,
            fractions,
            seeds,
            seed,
            rounding,
            text,
            mining,
            report,
        } => {
            let flags = RunConfig {
                fractions,
                seeds: seeds.or(seed.map(|s| vec![s])),
                seed,
                rounding,
                ..report.apply(mining.apply(text.settings()))
            };
            let settings = file.overlay(flags);
            let config = settings.train()?;
            let corpus = load(&corpus)?;
            let curve = learning_curve(
                &corpus,
                &settings.fractions()?,
                &settings.seeds(),
                &config,
                settings.rounding.unwrap_or_default(),
            )
            .map_err(|e| e.to_string())?;
            let output = match settings.format() {
                ReportFormat::Csv => curve.to_csv(),
                ReportFormat::Json => {
                    pretty(&serde_json::to_value(&curve).expect("curve serializes"))
                }
            };
            emit(report.out.as_deref(), &output)
        }
        Command::Inspect { model, report } => {
            let settings = file.overlay(report.apply(RunConfig::default()));
            let table = ProbabilityTable::load(&model).map_err(|e| e.to_string())?;
            let output = match settings.format() {
                ReportFormat::Csv => format!(
                    "{}\n{}\n{}",
                    table.render_counts(),
                    table.render_probabilities(),
                    table.render_summary()
                ),
                ReportFormat::Json => table.to_json(),
            };
            emit(report.out.as_deref(), &output)
        }
        Command::Synth {
            out,
            seed,
            classes,
            docs_per_class,
        } => {
            let defaults = SyntheticSpec::default();
            let spec = SyntheticSpec {
                seed: seed.or(file.seed).unwrap_or(defaults.seed),
                classes: classes.unwrap_or(defaults.classes),
                docs_per_class: docs_per_class.unwrap_or(defaults.docs_per_class),
                ..defaults
            };
            if spec.classes == 0 || spec.docs_per_class == 0 {
                return Err(
                    "synthetic corpus needs at least one class and one document per class".into(),
                );
            }
            let corpus = spec.generate().map_err(|e| e.to_string())?;
            write_directory(&corpus, &out).map_err(|e| e.to_string())?;
            println!(
                "wrote {} documents in {} classes to {}",
                corpus.len(),
                spec.classes,
                out.display()
            );
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<wordset::LabeledCorpus, String> {
    load_corpus(path, CorpusFormat::detect(path)).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

type Classified = (String, (Transaction, ClassificationResult));

fn class_names(table: &ProbabilityTable, indices: &[usize]) -> Vec<String> {
    indices
        .iter()
        .map(|&i| table.classes()[i].clone())
        .collect()
}

fn classification_text(table: &ProbabilityTable, results: &[Classified], explain: bool) -> String {
    let mut out = String::new();
    for (i, (id, (keywords, result))) in results.iter().enumerate() {
        let winner = &result.breakdowns[result.winner];
        write!(
            out,
            "{id}: {} (total {})",
            winner.class_name,
            winner.total_display()
        )
        .unwrap();
        if result.is_tie() {
            write!(
                out,
                " [tie: {}]",
                class_names(table, &result.tied).join(", ")
            )
            .unwrap();
        }
        if result.low_evidence {
            out.push_str(" [no keywords]");
        }
        out.push('\n');
        if explain {
            let words: Vec<&str> = keywords.items.iter().map(|k| k.as_str()).collect();
            writeln!(out, "keywords: {}", words.join(" ")).unwrap();
            let matched: Vec<String> = result
                .matched_sets
                .iter()
                .map(|&s| format!("{{{}}}", table.entries()[s].itemset.label()))
                .collect();
            writeln!(out, "matched sets: {}", matched.join(" ")).unwrap();
            out.push_str(&result.breakdown_csv());
            if i + 1 < results.len() {
                out.push('\n');
            }
        }
    }
    out
}

fn classification_json(table: &ProbabilityTable, results: &[Classified], explain: bool) -> Value {
    let docs: Vec<Value> = results
        .iter()
        .map(|(id, (keywords, result))| {
            let winner = &result.breakdowns[result.winner];
            let mut doc = json!({
                "document": id,
                "winner": winner.class_name,
                "total": winner.total_display(),
                "tied": class_names(table, &result.tied),
                "low_evidence": result.low_evidence,
            });
            if explain {
                doc["keywords"] = json!(keywords
                    .items
                    .iter()
                    .map(|k| k.as_str())
                    .collect::<Vec<_>>());
                doc["matched_sets"] = json!(result
                    .matched_sets
                    .iter()
                    .map(|&s| table.entries()[s]
                        .itemset
                        .items()
                        .iter()
                        .map(|k| k.as_str())
                        .collect::<Vec<_>>())
                    .collect::<Vec<_>>());
                doc["breakdown"] = json!(result
                    .breakdowns
                    .iter()
                    .map(|b| json!({
                        "class": b.class_name,
                        "pval": b.pval,
                        "nval": b.nval,
                        "p": b.p,
                        "n": b.n,
                        "positive_pct": format_decimal(b.positive_pct, 2),
                        "negative_pct": format_decimal(b.negative_pct, 2),
                        "prior": format_decimal(b.prior, 2),
                        "total": b.total_display(),
                    }))
                    .collect::<Vec<_>>());
            }
            doc
        })
        .collect();
    Value::Array(docs)
}
