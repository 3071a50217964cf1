//! Held-out accuracy, confusion matrices and learning curves.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::classify;
use crate::corpus::{split, LabeledCorpus, SplitRounding, SplitSpec};
use crate::error::{Error, Result};
use crate::model::ProbabilityTable;
use crate::pipeline::{train, TrainConfig};
use crate::preprocess::{extract_keywords, PreprocessConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub n_test: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Recall per class; `None` for classes absent from the test set.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<usize>>,
    /// Documents whose winner was chosen among tied totals.
    pub ties: usize,
    /// Documents with no keywords.
    pub low_evidence: usize,
    pub test_ids: Vec<String>,
    pub train_ids: Vec<String>,
    /// Test ids that also appear in the recorded training ids.
    pub leaked_ids: Vec<String>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        writeln!(out, "n_test,{}", self.n_test).unwrap();
        writeln!(out, "correct,{}", self.correct).unwrap();
        writeln!(out, "accuracy,{:.6}", self.accuracy).unwrap();
        writeln!(out, "ties,{}", self.ties).unwrap();
        writeln!(out, "low_evidence,{}", self.low_evidence).unwrap();
        writeln!(out, "leaked,{}", self.leaked_ids.len()).unwrap();
        out.push_str("\nclass,accuracy\n");
        for (class, acc) in self.classes.iter().zip(&self.per_class_accuracy) {
            match acc {
                Some(a) => writeln!(out, "{class},{a:.6}").unwrap(),
                None => writeln!(out, "{class},").unwrap(),
            }
        }
        out.push('\n');
        out.push_str(&confusion_block(&self.classes, &self.confusion));
        out
    }
}

pub fn confusion_block(classes: &[String], confusion: &[Vec<usize>]) -> String {
    let mut out = format!("actual\\predicted,{}\n", classes.join(","));
    for (class, row) in classes.iter().zip(confusion) {
        let cells: Vec<String> = row.iter().map(usize::to_string).collect();
        writeln!(out, "{class},{}", cells.join(",")).unwrap();
    }
    out
}

/// Classifies every test document. `train_ids`, when given, is recorded and
/// checked for overlap with the test ids.
pub fn evaluate(
    table: &ProbabilityTable,
    test: &LabeledCorpus,
    preprocess: &PreprocessConfig,
    train_ids: Option<&[String]>,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    test.require_labeled(0)?;
    // Labels unknown to the model get extra confusion rows; they can never
    // be predicted.
    let mut classes = table.classes().to_vec();
    let truth: Vec<usize> = test
        .documents()
        .iter()
        .map(|d| {
            let label = d.label.as_deref().unwrap_or_default();
            match classes.iter().position(|c| c == label) {
                Some(i) => i,
                None => {
                    classes.push(label.to_string());
                    classes.len() - 1
                }
            }
        })
        .collect();

    let outcomes: Vec<(usize, bool, bool)> = test
        .documents()
        .par_iter()
        .map(|doc| {
            let keywords = extract_keywords(doc, preprocess);
            let r = classify(table, &keywords.items);
            (r.winner, r.is_tie(), r.low_evidence)
        })
        .collect();

    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&actual, &(predicted, _, _)) in truth.iter().zip(&outcomes) {
        confusion[actual][predicted] += 1;
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class_accuracy = confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let total: usize = row.iter().sum();
            (total > 0).then(|| row[c] as f64 / total as f64)
        })
        .collect();

    let test_ids = test.ids();
    let train_ids: Vec<String> = train_ids.map(<[String]>::to_vec).unwrap_or_default();
    let train_set: HashSet<&str> = train_ids.iter().map(String::as_str).collect();
    let leaked_ids = test_ids
        .iter()
        .filter(|id| train_set.contains(id.as_str()))
        .cloned()
        .collect();

    Ok(EvalReport {
        classes,
        n_test: test.len(),
        correct,
        accuracy: correct as f64 / test.len() as f64,
        per_class_accuracy,
        confusion,
        ties: outcomes.iter().filter(|o| o.1).count(),
        low_evidence: outcomes.iter().filter(|o| o.2).count(),
        test_ids,
        train_ids,
        leaked_ids,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub seed: u64,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub total_sets: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionSummary {
    pub fraction: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningCurve {
    /// Ordered by fraction, then by seed in the order given.
    pub points: Vec<CurvePoint>,
    pub summary: Vec<FractionSummary>,
}

impl LearningCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fraction,seed,accuracy,n_train,n_test,total_sets\n");
        for p in &self.points {
            writeln!(
                out,
                "{},{},{:.6},{},{},{}",
                p.fraction, p.seed, p.accuracy, p.n_train, p.n_test, p.total_sets
            )
            .unwrap();
        }
        out.push_str("\nfraction,mean_accuracy,min_accuracy,max_accuracy,runs\n");
        for s in &self.summary {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{}",
                s.fraction, s.mean, s.min, s.max, s.runs
            )
            .unwrap();
        }
        out
    }
}

/// One split/train/evaluate run per `(fraction, seed)` pair.
pub fn learning_curve(
    corpus: &LabeledCorpus,
    fractions: &[f64],
    seeds: &[u64],
    config: &TrainConfig,
    rounding: SplitRounding,
) -> Result<LearningCurve> {
    if fractions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnorderedFractions);
    }
    if seeds.is_empty() || fractions.is_empty() {
        return Err(Error::InvalidConfig(
            "a learning curve needs fractions and seeds".into(),
        ));
    }
    let runs: Vec<(f64, u64)> = fractions
        .iter()
        .flat_map(|&f| seeds.iter().map(move |&s| (f, s)))
        .collect();
    let points: Vec<CurvePoint> = runs
        .par_iter()
        .map(|&(fraction, seed)| {
            let spec = SplitSpec::new(fraction, seed)?.with_rounding(rounding);
            let (train_part, test_part) = split(corpus, &spec)?;
            let table = train(&train_part, config)?;
            let report = evaluate(
                &table,
                &test_part,
                &config.preprocess,
                Some(&train_part.ids()),
            )?;
            Ok(CurvePoint {
                fraction,
                seed,
                accuracy: report.accuracy,
                n_train: train_part.len(),
                n_test: test_part.len(),
                total_sets: table.total_sets(),
            })
        })
        .collect::<Result<_>>()?;

    let summary = fractions
        .iter()
        .map(|&fraction| {
            let accs: Vec<f64> = points
                .iter()
                .filter(|p| p.fraction == fraction)
                .map(|p| p.accuracy)
                .collect();
            FractionSummary {
                fraction,
                mean: accs.iter().sum::<f64>() / accs.len() as f64,
                min: accs.iter().copied().fold(f64::INFINITY, f64::min),
                max: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                runs: accs.len(),
            }
        })
        .collect();
    Ok(LearningCurve { points, summary })
}
