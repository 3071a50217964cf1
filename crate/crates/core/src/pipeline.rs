//! Training and classification from raw documents.

use crate::classifier::{classify, ClassificationResult};
use crate::corpus::LabeledCorpus;
use crate::error::Result;
use crate::mining::{mine_per_class, ClassTransactions, MiningConfig};
use crate::model::{ProbabilityTable, SmoothingMode};
use crate::preprocess::{extract_from_text, PreprocessConfig, Transaction};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainConfig {
    pub preprocess: PreprocessConfig,
    pub mining: MiningConfig,
    pub mode: SmoothingMode,
}

/// Preprocess, mine per class, attribute and smooth.
pub fn train(corpus: &LabeledCorpus, config: &TrainConfig) -> Result<ProbabilityTable> {
    corpus.require_labeled(1)?;
    let data = ClassTransactions::from_corpus(corpus, &config.preprocess)?;
    let sets = mine_per_class(&data, &config.mining)?;
    ProbabilityTable::from_itemsets(&data.classes, sets, config.mode)
}

pub fn classify_text(
    table: &ProbabilityTable,
    doc_id: &str,
    text: &str,
    preprocess: &PreprocessConfig,
) -> (Transaction, ClassificationResult) {
    let keywords = extract_from_text(doc_id, text, preprocess);
    let result = classify(table, &keywords.items);
    (keywords, result)
}
