//! Text classification with maximal frequent word sets.
//!
//! Training mines maximal frequent keyword sets per class with Apriori,
//! assigns each set to the class where it occurs most, and smooths per-class
//! occurrence counts into a probability table. Classification scores each
//! class by the share of its own sets a document matches, the share of other
//! classes' sets it does not match, and the class prior.
//!
//! ```
//! use wordset::{synthetic::SyntheticSpec, train, classify_text, TrainConfig};
//!
//! let corpus = SyntheticSpec::default().generate().unwrap();
//! let config = TrainConfig::default();
//! let table = train(&corpus, &config).unwrap();
//! let doc = &corpus.documents()[0];
//! let (_, result) = classify_text(&table, &doc.id, &doc.text, &config.preprocess);
//! assert_eq!(Some(result.winner_name()), doc.label.as_deref());
//! ```

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod mining;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod rational;
pub mod synthetic;

pub use classifier::{classify, match_fraction, score_class, ClassificationResult, ScoreBreakdown};
pub use corpus::{
    load_corpus, split, CorpusFormat, Document, LabeledCorpus, SplitRounding, SplitSpec,
};
pub use error::{Error, Result};
pub use evaluation::{evaluate, learning_curve, EvalReport, LearningCurve};
pub use mining::{apriori, maximal_itemsets, mine_per_class, ItemSet, MiningConfig, Support};
pub use model::{attribute_sets, build_table, ProbabilityTable, SetStats, SmoothingMode};
pub use pipeline::{classify_text, train, TrainConfig};
pub use preprocess::{
    extract_keywords, normalize_plural, tokenize, Keyword, PreprocessConfig, StopwordList,
    Transaction,
};
