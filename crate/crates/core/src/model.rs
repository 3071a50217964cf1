//! The word-set probability table: set ownership, class priors,
//! Laplace-smoothed per-class probabilities and the versioned model file.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mining::ItemSet;
use crate::preprocess::Keyword;
use crate::rational::{format_decimal, Exact};

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Which class's set count enters the smoothing denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingMode {
    /// `(count_c + 1) / (N_owner + |S|)`: one denominator per row, taken
    /// from the class that owns the set.
    #[default]
    #[serde(rename = "paper-table")]
    OwnerDenominator,
    /// `(count_c + 1) / (N_c + |S|)`: each class uses its own set count.
    PerClass,
}

impl SmoothingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SmoothingMode::OwnerDenominator => "paper-table",
            SmoothingMode::PerClass => "per-class",
        }
    }
}

impl fmt::Display for SmoothingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SmoothingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-table" => Ok(SmoothingMode::OwnerDenominator),
            "per-class" => Ok(SmoothingMode::PerClass),
            other => Err(Error::InvalidConfig(format!(
                "unknown smoothing mode `{other}` (expected paper-table or per-class)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassStats {
    pub class_name: String,
    /// Number of word sets owned by the class.
    pub set_count: u64,
    pub prior: Exact,
}

/// Per-class set counts and the total number of sets `|S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetStats {
    classes: Vec<ClassStats>,
    total_sets: u64,
}

impl SetStats {
    /// Stats derived from owned-set counts; `|S|` is their sum.
    pub fn from_set_counts(classes: &[String], set_counts: &[u64]) -> Result<Self> {
        Self::explicit(classes, set_counts, set_counts.iter().sum())
    }

    /// Stats with a stated total that may exceed the sum of the per-class
    /// counts (for replaying externally reported figures). Priors are
    /// `N_c / total`.
    pub fn explicit(classes: &[String], set_counts: &[u64], total_sets: u64) -> Result<Self> {
        if classes.len() != set_counts.len() {
            return Err(Error::InvalidConfig(format!(
                "{} classes but {} set counts",
                classes.len(),
                set_counts.len()
            )));
        }
        if total_sets == 0 {
            return Err(Error::NoWordSets);
        }
        let sum: u64 = set_counts.iter().sum();
        if sum > total_sets {
            return Err(Error::InvalidConfig(format!(
                "per-class set counts sum to {sum}, above the total {total_sets}"
            )));
        }
        let classes = classes
            .iter()
            .zip(set_counts)
            .map(|(name, &n)| ClassStats {
                class_name: name.clone(),
                set_count: n,
                prior: Ratio::new(n, total_sets),
            })
            .collect();
        Ok(SetStats {
            classes,
            total_sets,
        })
    }

    pub fn classes(&self) -> &[ClassStats] {
        &self.classes
    }

    pub fn total_sets(&self) -> u64 {
        self.total_sets
    }

    pub fn set_count(&self, class: usize) -> u64 {
        self.classes[class].set_count
    }

    pub fn prior(&self, class: usize) -> Exact {
        self.classes[class].prior
    }
}

/// Index of the largest count, earliest class on ties; `None` if all are zero.
pub fn owner_of(counts: &[u64]) -> Option<usize> {
    let (best, &max) =
        counts
            .iter()
            .enumerate()
            .fold(None, |acc: Option<(usize, &u64)>, (i, c)| match acc {
                Some((_, m)) if m >= c => acc,
                _ => Some((i, c)),
            })?;
    (max > 0).then_some(best)
}

fn argmax_first<T: PartialOrd>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Owner of every set plus the resulting per-class statistics.
pub fn attribute_sets(classes: &[String], itemsets: &[ItemSet]) -> Result<(Vec<usize>, SetStats)> {
    let mut owners = Vec::with_capacity(itemsets.len());
    let mut set_counts = vec![0u64; classes.len()];
    for set in itemsets {
        check_width(classes, set)?;
        let owner =
            owner_of(&set.class_counts).ok_or_else(|| Error::Unattributable(set.label()))?;
        set_counts[owner] += 1;
        owners.push(owner);
    }
    let stats = SetStats::from_set_counts(classes, &set_counts)?;
    Ok((owners, stats))
}

fn check_width(classes: &[String], set: &ItemSet) -> Result<()> {
    if set.class_counts.len() != classes.len() {
        return Err(Error::InvalidConfig(format!(
            "word set {{{}}} has {} counts for {} classes",
            set.label(),
            set.class_counts.len(),
            classes.len()
        )));
    }
    if set.is_empty() {
        return Err(Error::InvalidConfig("empty word set".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub itemset: ItemSet,
    pub owner: usize,
    pub probs: Vec<Exact>,
}

impl TableEntry {
    /// The class with the largest smoothed probability, earliest on ties.
    pub fn best_class(&self) -> usize {
        argmax_first(&self.probs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityTable {
    classes: Vec<String>,
    entries: Vec<TableEntry>,
    stats: SetStats,
    mode: SmoothingMode,
}

/// Smoothed probabilities for every set under the given statistics.
pub fn build_table(
    classes: &[String],
    itemsets: Vec<ItemSet>,
    stats: SetStats,
    mode: SmoothingMode,
) -> Result<ProbabilityTable> {
    if stats.classes.len() != classes.len()
        || stats
            .classes
            .iter()
            .zip(classes)
            .any(|(s, c)| &s.class_name != c)
    {
        return Err(Error::InvalidConfig(
            "statistics do not match the class list".into(),
        ));
    }
    if itemsets.is_empty() {
        return Err(Error::NoWordSets);
    }
    let total = stats.total_sets;
    let mut entries = Vec::with_capacity(itemsets.len());
    for itemset in itemsets {
        check_width(classes, &itemset)?;
        let owner = owner_of(&itemset.class_counts)
            .ok_or_else(|| Error::Unattributable(itemset.label()))?;
        let probs = itemset
            .class_counts
            .iter()
            .enumerate()
            .map(|(c, &count)| {
                let base = match mode {
                    SmoothingMode::OwnerDenominator => stats.set_count(owner),
                    SmoothingMode::PerClass => stats.set_count(c),
                };
                Ratio::new(count + 1, base + total)
            })
            .collect();
        entries.push(TableEntry {
            itemset,
            owner,
            probs,
        });
    }
    Ok(ProbabilityTable {
        classes: classes.to_vec(),
        entries,
        stats,
        mode,
    })
}

impl ProbabilityTable {
    /// Attributes the mined sets and builds the table from the derived stats.
    pub fn from_itemsets(
        classes: &[String],
        itemsets: Vec<ItemSet>,
        mode: SmoothingMode,
    ) -> Result<Self> {
        let (_, stats) = attribute_sets(classes, &itemsets)?;
        build_table(classes, itemsets, stats, mode)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn stats(&self) -> &SetStats {
        &self.stats
    }

    pub fn mode(&self) -> SmoothingMode {
        self.mode
    }

    pub fn total_sets(&self) -> u64 {
        self.stats.total_sets
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_table(self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        load_table(path)
    }

    pub fn to_json(&self) -> String {
        let body = ModelBody::from_table(self);
        let file = ModelFile {
            checksum: body.checksum(),
            body,
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| malformed(text, &e))?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(MODEL_FORMAT_VERSION) => {}
            Some(found) => {
                return Err(Error::UnsupportedVersion {
                    found,
                    supported: MODEL_FORMAT_VERSION,
                })
            }
            None => {
                return Err(Error::MalformedModel {
                    offset: 0,
                    message: "missing or non-integer `version` field".into(),
                })
            }
        }
        let file: ModelFile = serde_json::from_str(text).map_err(|e| malformed(text, &e))?;
        let computed = file.body.checksum();
        if computed != file.checksum {
            return Err(Error::ChecksumMismatch {
                recorded: file.checksum,
                computed,
            });
        }
        file.body.into_table()
    }

    /// Occurrence counts per set and class, one row per set.
    pub fn render_counts(&self) -> String {
        let header: Vec<&str> = std::iter::once("word set")
            .chain(self.classes.iter().map(String::as_str))
            .collect();
        let rows = self.entries.iter().map(|e| {
            std::iter::once(e.itemset.label())
                .chain(e.itemset.class_counts.iter().map(u64::to_string))
                .collect::<Vec<_>>()
        });
        render_grid(&header, rows)
    }

    /// Smoothed probabilities with six decimals, one row per set.
    pub fn render_probabilities(&self) -> String {
        let header: Vec<&str> = std::iter::once("word set")
            .chain(self.classes.iter().map(String::as_str))
            .collect();
        let rows = self.entries.iter().map(|e| {
            std::iter::once(e.itemset.label())
                .chain(e.probs.iter().map(|&p| format_decimal(p, 6)))
                .collect::<Vec<_>>()
        });
        render_grid(&header, rows)
    }

    /// Set counts and priors per class.
    pub fn render_summary(&self) -> String {
        let mut out = String::new();
        writeln!(out, "mode: {}", self.mode).unwrap();
        writeln!(out, "total word sets: {}", self.stats.total_sets).unwrap();
        for s in &self.stats.classes {
            writeln!(
                out,
                "{}: {} sets, prior {}/{} = {}",
                s.class_name,
                s.set_count,
                s.set_count,
                self.stats.total_sets,
                format_decimal(s.prior, 6)
            )
            .unwrap();
        }
        out
    }
}

fn render_grid(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let rows: Vec<Vec<String>> = rows.collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header);
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&cells);
    }
    out
}

pub fn save_table(table: &ProbabilityTable, path: &Path) -> Result<()> {
    fs::write(path, table.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_table(path: &Path) -> Result<ProbabilityTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ProbabilityTable::from_json(&text)
}

fn malformed(text: &str, err: &serde_json::Error) -> Error {
    // serde_json reports 1-based lines and columns; convert to a byte offset.
    let offset = if err.line() == 0 {
        0
    } else {
        let line_start: usize = text
            .split_inclusive('\n')
            .take(err.line() - 1)
            .map(str::len)
            .sum();
        (line_start + err.column()).min(text.len())
    };
    Error::MalformedModel {
        offset,
        message: err.to_string(),
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    #[serde(flatten)]
    body: ModelBody,
    checksum: String,
}

#[derive(Serialize, Deserialize)]
struct ModelBody {
    version: u64,
    mode: SmoothingMode,
    classes: Vec<String>,
    total_sets: u64,
    entries: Vec<EntryRecord>,
    /// `N_c/|S|`, unreduced.
    priors: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    items: Vec<Keyword>,
    counts: BTreeMap<String, u64>,
    owner: String,
}

impl ModelBody {
    fn from_table(table: &ProbabilityTable) -> Self {
        let entries = table
            .entries
            .iter()
            .map(|e| EntryRecord {
                items: e.itemset.items().to_vec(),
                counts: table
                    .classes
                    .iter()
                    .cloned()
                    .zip(e.itemset.class_counts.iter().copied())
                    .collect(),
                owner: table.classes[e.owner].clone(),
            })
            .collect();
        let priors = table
            .stats
            .classes
            .iter()
            .map(|s| {
                (
                    s.class_name.clone(),
                    format!("{}/{}", s.set_count, table.stats.total_sets),
                )
            })
            .collect();
        ModelBody {
            version: MODEL_FORMAT_VERSION,
            mode: table.mode,
            classes: table.classes.clone(),
            total_sets: table.stats.total_sets,
            entries,
            priors,
        }
    }

    fn checksum(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("model serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    fn into_table(self) -> Result<ProbabilityTable> {
        let invalid = |msg: String| Error::InvalidModel(msg);
        let mut set_counts = Vec::with_capacity(self.classes.len());
        for class in &self.classes {
            let prior = self
                .priors
                .get(class)
                .ok_or_else(|| invalid(format!("no prior for class `{class}`")))?;
            let (n, d) = prior
                .split_once('/')
                .and_then(|(n, d)| {
                    Some((n.trim().parse::<u64>().ok()?, d.trim().parse::<u64>().ok()?))
                })
                .ok_or_else(|| invalid(format!("prior `{prior}` is not of the form N/|S|")))?;
            if d != self.total_sets {
                return Err(invalid(format!(
                    "prior `{prior}` for `{class}` does not use total_sets {}",
                    self.total_sets
                )));
            }
            set_counts.push(n);
        }
        if self.priors.len() != self.classes.len() {
            return Err(invalid(
                "priors name classes absent from the class list".into(),
            ));
        }
        let stats = SetStats::explicit(&self.classes, &set_counts, self.total_sets)?;

        let mut itemsets = Vec::with_capacity(self.entries.len());
        for entry in self.entries {
            if entry.counts.len() != self.classes.len() {
                return Err(invalid(format!(
                    "entry {:?} does not have exactly one count per class",
                    entry.items
                )));
            }
            let counts = self
                .classes
                .iter()
                .map(|c| {
                    entry.counts.get(c).copied().ok_or_else(|| {
                        invalid(format!("entry {:?} lacks a count for `{c}`", entry.items))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let itemset = ItemSet::new(entry.items, counts);
            let owner = owner_of(&itemset.class_counts)
                .ok_or_else(|| Error::Unattributable(itemset.label()))?;
            if self.classes[owner] != entry.owner {
                return Err(invalid(format!(
                    "entry {{{}}} records owner `{}` but its counts give `{}`",
                    itemset.label(),
                    entry.owner,
                    self.classes[owner]
                )));
            }
            itemsets.push(itemset);
        }
        build_table(&self.classes, itemsets, stats, self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn set(words: &[&str], counts: &[u64]) -> ItemSet {
        ItemSet::new(
            words.iter().map(|w| Keyword::new(*w).unwrap()),
            counts.to_vec(),
        )
    }

    #[test]
    fn owner_is_max_count_with_class_order_ties() {
        assert_eq!(owner_of(&[0, 3, 0, 0, 0]), Some(1));
        assert_eq!(owner_of(&[2, 2, 1]), Some(0));
        assert_eq!(owner_of(&[0, 0]), None);
    }

    #[test]
    fn attribution_counts_and_priors() {
        let cls = classes(&["A", "B"]);
        let sets = vec![
            set(&["x"], &[2, 0]),
            set(&["y"], &[0, 3]),
            set(&["z"], &[4, 1]),
        ];
        let (owners, stats) = attribute_sets(&cls, &sets).unwrap();
        assert_eq!(owners, vec![0, 1, 0]);
        assert_eq!(stats.set_count(0), 2);
        assert_eq!(stats.total_sets(), 3);
        assert_eq!(stats.prior(0) + stats.prior(1), Ratio::from_integer(1));
    }

    #[test]
    fn single_owner_gets_prior_one() {
        let cls = classes(&["A", "B"]);
        let (_, stats) =
            attribute_sets(&cls, &[set(&["x"], &[1, 0]), set(&["y"], &[5, 2])]).unwrap();
        assert_eq!(stats.prior(0), Ratio::from_integer(1));
        assert_eq!(stats.set_count(1), 0);
    }

    #[test]
    fn zero_counts_cannot_be_attributed() {
        let cls = classes(&["A", "B"]);
        assert!(matches!(
            attribute_sets(&cls, &[set(&["x"], &[0, 0])]),
            Err(Error::Unattributable(_))
        ));
    }

    #[test]
    fn smoothing_never_yields_zero() {
        let cls = classes(&["A", "B", "C"]);
        let table = ProbabilityTable::from_itemsets(
            &cls,
            vec![set(&["x"], &[3, 0, 0])],
            SmoothingMode::OwnerDenominator,
        )
        .unwrap();
        assert!(table.entries()[0].probs.iter().all(|p| *p.numer() > 0));
        assert_eq!(table.entries()[0].probs[1], Ratio::new(1, 2));
    }

    #[test]
    fn per_class_mode_uses_own_denominator() {
        let cls = classes(&["A", "B"]);
        let sets = vec![
            set(&["x"], &[2, 0]),
            set(&["y"], &[0, 1]),
            set(&["w"], &[0, 1]),
        ];
        let table = ProbabilityTable::from_itemsets(&cls, sets, SmoothingMode::PerClass).unwrap();
        // N = (1, 2), |S| = 3
        assert_eq!(
            table.entries()[0].probs,
            vec![Ratio::new(3, 4), Ratio::new(1, 5)]
        );
    }

    #[test]
    fn json_round_trip_and_errors() {
        let cls = classes(&["PH", "CH"]);
        let table = ProbabilityTable::from_itemsets(
            &cls,
            vec![
                set(&["dirac", "fock"], &[0, 2]),
                set(&["cold", "dark"], &[2, 0]),
            ],
            SmoothingMode::OwnerDenominator,
        )
        .unwrap();
        let text = table.to_json();
        assert_eq!(ProbabilityTable::from_json(&text).unwrap(), table);

        let future = text.replacen("\"version\": 1", "\"version\": 7", 1);
        assert!(matches!(
            ProbabilityTable::from_json(&future),
            Err(Error::UnsupportedVersion { found: 7, .. })
        ));

        let truncated = &text[..text.len() / 2];
        match ProbabilityTable::from_json(truncated) {
            Err(Error::MalformedModel { offset, .. }) => assert_eq!(offset, truncated.len()),
            other => panic!("expected parse error, got {other:?}"),
        }

        let tampered = text.replacen("\"PH\": 2", "\"PH\": 3", 1);
        assert_ne!(tampered, text);
        assert!(matches!(
            ProbabilityTable::from_json(&tampered),
            Err(Error::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn smoothing_mode_parsing() {
        assert_eq!(
            "per-class".parse::<SmoothingMode>().unwrap(),
            SmoothingMode::PerClass
        );
        assert!("laplace".parse::<SmoothingMode>().is_err());
        for mode in [SmoothingMode::OwnerDenominator, SmoothingMode::PerClass] {
            let json = serde_json::to_string(&mode).unwrap();
            assert_eq!(json, format!("\"{mode}\""));
            assert_eq!(mode.as_str().parse::<SmoothingMode>().unwrap(), mode);
        }
    }
}
