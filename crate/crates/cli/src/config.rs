//! Run settings merged from defaults, an optional TOML file and flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wordset::corpus::SplitRounding;
use wordset::mining::{MiningConfig, Support, DEFAULT_MIN_CONFIDENCE, DEFAULT_SUPPORT_COUNT};
use wordset::preprocess::{PreprocessConfig, StopwordList, DEFAULT_MIN_DOC_FREQ};
use wordset::{SmoothingMode, TrainConfig};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_FRACTIONS: [f64; 10] =
    [0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

/// Every field is optional so that a file and the flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub stopwords: Option<PathBuf>,
    pub min_doc_freq: Option<usize>,
    pub support_count: Option<usize>,
    pub support_fraction: Option<f64>,
    pub confidence: Option<f64>,
    pub max_set_size: Option<usize>,
    pub smoothing: Option<SmoothingMode>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub fractions: Option<Vec<f64>>,
    pub rounding: Option<SplitRounding>,
    pub format: Option<ReportFormat>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| {
            let msg = e.message().trim().to_string();
            format!("invalid config {}: {msg}", path.display())
        })
    }

    /// Fields set in `over` replace those in `self`. Support is one setting,
    /// so either form in `over` clears both forms here.
    pub fn overlay(mut self, over: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        if over.support_count.is_some() || over.support_fraction.is_some() {
            self.support_count = over.support_count;
            self.support_fraction = over.support_fraction;
        }
        take!(
            stopwords,
            min_doc_freq,
            confidence,
            max_set_size,
            smoothing,
            seed,
            seeds,
            fractions,
            rounding,
            format
        );
        self
    }

    pub fn preprocess(&self) -> Result<PreprocessConfig, String> {
        let stopwords = match &self.stopwords {
            Some(path) => StopwordList::from_file(path).map_err(|e| e.to_string())?,
            None => StopwordList::default(),
        };
        PreprocessConfig::new(stopwords, self.min_doc_freq.unwrap_or(DEFAULT_MIN_DOC_FREQ))
            .map_err(|e| e.to_string())
    }

    pub fn support(&self) -> Result<Support, String> {
        match (self.support_count, self.support_fraction) {
            (Some(_), Some(_)) => {
                Err("support-count and support-fraction are mutually exclusive".into())
            }
            (Some(n), None) => Ok(Support::Count(n)),
            (None, Some(f)) => Ok(Support::Fraction(f)),
            (None, None) => Ok(Support::Count(DEFAULT_SUPPORT_COUNT)),
        }
    }

    pub fn mining(&self) -> Result<MiningConfig, String> {
        MiningConfig::new(
            self.support()?,
            self.confidence.unwrap_or(DEFAULT_MIN_CONFIDENCE),
            self.max_set_size,
        )
        .map_err(|e| e.to_string())
    }

    pub fn train(&self) -> Result<TrainConfig, String> {
        Ok(TrainConfig {
            preprocess: self.preprocess()?,
            mining: self.mining()?,
            mode: self.smoothing.unwrap_or_default(),
        })
    }

    pub fn seeds(&self) -> Vec<u64> {
        match (&self.seeds, self.seed) {
            (Some(list), _) => list.clone(),
            (None, Some(s)) => vec![s],
            (None, None) => vec![DEFAULT_SEED],
        }
    }

    pub fn fractions(&self) -> Result<Vec<f64>, String> {
        let fractions = self
            .fractions
            .clone()
            .unwrap_or_else(|| DEFAULT_FRACTIONS.to_vec());
        if let Some(bad) = fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
            return Err(format!("training fractions must lie in (0, 1), got {bad}"));
        }
        Ok(fractions)
    }

    pub fn format(&self) -> ReportFormat {
        self.format.unwrap_or_default()
    }
}
