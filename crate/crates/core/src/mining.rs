//! Level-wise Apriori mining of frequent keyword sets, reduction to maximal
//! sets, and per-class mining with cross-class occurrence counts.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::preprocess::{extract_keywords, Keyword, PreprocessConfig, Transaction};

/// Minimum support, either relative to the number of transactions or absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    Fraction(f64),
    Count(usize),
}

impl Support {
    /// Absolute threshold for `n` transactions; fractions round up.
    pub fn effective(self, n: usize) -> Result<usize> {
        let count = match self {
            Support::Count(c) => c,
            Support::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "support fraction must lie in (0, 1], got {f}"
                    )));
                }
                (f * n as f64 - 1e-9).ceil().max(0.0) as usize
            }
        };
        if count < 1 {
            return Err(Error::SupportBelowOne);
        }
        Ok(count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub min_support: Support,
    /// Only consulted by [`association_rules`].
    pub min_confidence: f64,
    pub max_itemset_size: Option<usize>,
}

pub const DEFAULT_SUPPORT_COUNT: usize = 2;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.75;

impl MiningConfig {
    pub fn new(
        min_support: Support,
        min_confidence: f64,
        max_itemset_size: Option<usize>,
    ) -> Result<Self> {
        match min_support {
            Support::Count(0) => return Err(Error::SupportBelowOne),
            Support::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                return Err(Error::InvalidConfig(format!(
                    "support fraction must lie in (0, 1], got {f}"
                )))
            }
            _ => {}
        }
        if !(min_confidence > 0.0 && min_confidence <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "confidence must lie in (0, 1], got {min_confidence}"
            )));
        }
        if max_itemset_size == Some(0) {
            return Err(Error::InvalidConfig(
                "max itemset size must be positive".into(),
            ));
        }
        Ok(MiningConfig {
            min_support,
            min_confidence,
            max_itemset_size,
        })
    }

    pub fn with_support(min_support: Support) -> Result<Self> {
        Self::new(min_support, DEFAULT_MIN_CONFIDENCE, None)
    }
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            min_support: Support::Count(DEFAULT_SUPPORT_COUNT),
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            max_itemset_size: None,
        }
    }
}

/// A frequent keyword set with its containment count.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequentItemset {
    /// Sorted ascending.
    pub items: Vec<Keyword>,
    pub support: usize,
}

/// A mined word set with occurrence counts for every class, aligned with the
/// class list it was mined against.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ItemSet {
    items: Vec<Keyword>,
    pub class_counts: Vec<u64>,
}

impl ItemSet {
    /// Items are sorted and deduplicated.
    pub fn new(items: impl IntoIterator<Item = Keyword>, class_counts: Vec<u64>) -> Self {
        let items: BTreeSet<Keyword> = items.into_iter().collect();
        ItemSet {
            items: items.into_iter().collect(),
            class_counts,
        }
    }

    pub fn items(&self) -> &[Keyword] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn label(&self) -> String {
        self.items
            .iter()
            .map(Keyword::as_str)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Transactions grouped by class, in class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTransactions {
    pub classes: Vec<String>,
    pub groups: Vec<Vec<Transaction>>,
}

impl ClassTransactions {
    pub fn new(classes: Vec<String>, groups: Vec<Vec<Transaction>>) -> Result<Self> {
        if classes.len() != groups.len() {
            return Err(Error::InvalidConfig(format!(
                "{} classes but {} transaction groups",
                classes.len(),
                groups.len()
            )));
        }
        Ok(ClassTransactions { classes, groups })
    }

    /// Preprocesses every labeled document of `corpus`.
    pub fn from_corpus(corpus: &LabeledCorpus, config: &PreprocessConfig) -> Result<Self> {
        corpus.require_labeled(1)?;
        let extracted: Vec<(usize, Transaction)> = corpus
            .documents()
            .par_iter()
            .map(|doc| {
                let label = doc.label.as_deref().unwrap_or_default();
                let class = corpus
                    .class_index(label)
                    .ok_or_else(|| Error::UnknownClass(label.to_string()))?;
                Ok((class, extract_keywords(doc, config)))
            })
            .collect::<Result<_>>()?;
        let mut groups = vec![Vec::new(); corpus.classes().len()];
        for (class, t) in extracted {
            groups[class].push(t);
        }
        Ok(ClassTransactions {
            classes: corpus.classes().to_vec(),
            groups,
        })
    }

    /// Number of transactions in `class` containing every item.
    pub fn count_containing(&self, class: usize, items: &[Keyword]) -> u64 {
        self.groups[class]
            .iter()
            .filter(|t| t.contains_all(items))
            .count() as u64
    }
}

/// Item ids are assigned in lexicographic keyword order so that sorted id
/// vectors are also sorted keyword vectors.
struct Encoded {
    vocab: Vec<Keyword>,
    rows: Vec<Vec<u32>>,
    bits: Vec<Vec<u64>>,
}

impl Encoded {
    fn new(transactions: &[Transaction]) -> Self {
        let vocab: Vec<Keyword> = transactions
            .iter()
            .flat_map(|t| t.items.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&Keyword, u32> = vocab
            .iter()
            .enumerate()
            .map(|(i, k)| (k, i as u32))
            .collect();
        let words = vocab.len().div_ceil(64);
        let mut rows = Vec::with_capacity(transactions.len());
        let mut bits = Vec::with_capacity(transactions.len());
        for t in transactions {
            let row: Vec<u32> = t.items.iter().map(|k| index[k]).collect();
            let mut mask = vec![0u64; words];
            for &id in &row {
                mask[id as usize / 64] |= 1 << (id % 64);
            }
            rows.push(row);
            bits.push(mask);
        }
        Encoded { vocab, rows, bits }
    }

    fn support(&self, candidate: &[u32]) -> usize {
        self.bits
            .iter()
            .zip(&self.rows)
            .filter(|(mask, row)| {
                row.len() >= candidate.len()
                    && candidate
                        .iter()
                        .all(|&id| mask[id as usize / 64] & (1 << (id % 64)) != 0)
            })
            .count()
    }

    fn decode(&self, ids: &[u32]) -> Vec<Keyword> {
        ids.iter()
            .map(|&i| self.vocab[i as usize].clone())
            .collect()
    }
}

/// Joins sorted (k-1)-sets sharing their first k-2 items and drops any
/// candidate with an infrequent (k-1)-subset.
fn candidates(level: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let known: HashSet<&[u32]> = level.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for (i, a) in level.iter().enumerate() {
        let prefix = &a[..a.len() - 1];
        for b in &level[i + 1..] {
            if &b[..b.len() - 1] != prefix {
                break;
            }
            let mut joined = a.clone();
            joined.push(*b.last().expect("non-empty"));
            let all_subsets_frequent = (0..joined.len() - 2).all(|skip| {
                let subset: Vec<u32> = joined
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                known.contains(subset.as_slice())
            });
            if all_subsets_frequent {
                out.push(joined);
            }
        }
    }
    out
}

/// Every itemset contained in at least the effective support of transactions,
/// ordered by size and then lexicographically.
pub fn apriori(
    transactions: &[Transaction],
    config: &MiningConfig,
) -> Result<Vec<FrequentItemset>> {
    if transactions.is_empty() {
        return Err(Error::EmptyTransactions);
    }
    let threshold = config.min_support.effective(transactions.len())?;
    let max_size = config.max_itemset_size.unwrap_or(usize::MAX);
    let encoded = Encoded::new(transactions);

    let mut singles = vec![0usize; encoded.vocab.len()];
    for row in &encoded.rows {
        for &id in row {
            singles[id as usize] += 1;
        }
    }
    let mut level: Vec<(Vec<u32>, usize)> = singles
        .iter()
        .enumerate()
        .filter(|&(_, &n)| n >= threshold)
        .map(|(id, &n)| (vec![id as u32], n))
        .collect();

    let mut frequent = Vec::new();
    let mut size = 1;
    while !level.is_empty() {
        frequent.extend(level.iter().map(|(ids, n)| FrequentItemset {
            items: encoded.decode(ids),
            support: *n,
        }));
        if size >= max_size {
            break;
        }
        let sets: Vec<Vec<u32>> = level.into_iter().map(|(ids, _)| ids).collect();
        level = candidates(&sets)
            .into_iter()
            .filter_map(|c| {
                let n = encoded.support(&c);
                (n >= threshold).then_some((c, n))
            })
            .collect();
        size += 1;
    }
    Ok(frequent)
}

/// Sets from a downward-closed collection that are a proper subset of no
/// other set in it.
pub fn maximal_itemsets(frequent: &[FrequentItemset]) -> Vec<FrequentItemset> {
    // Under downward closure a set is non-maximal iff it is an immediate
    // subset of some set one item larger.
    let mut covered: HashSet<Vec<Keyword>> = HashSet::new();
    for set in frequent.iter().filter(|s| s.items.len() >= 2) {
        for skip in 0..set.items.len() {
            let mut subset = set.items.clone();
            subset.remove(skip);
            covered.insert(subset);
        }
    }
    let mut out: Vec<FrequentItemset> = frequent
        .iter()
        .filter(|s| !covered.contains(&s.items))
        .cloned()
        .collect();
    out.sort_by(|a, b| a.items.cmp(&b.items));
    out
}

/// Runs Apriori within each class, keeps the maximal sets, merges sets found
/// in several classes, and then counts every set in every class.
///
/// Sets are ordered by the first class that produced them, then
/// lexicographically.
pub fn mine_per_class(data: &ClassTransactions, config: &MiningConfig) -> Result<Vec<ItemSet>> {
    for (class, group) in data.classes.iter().zip(&data.groups) {
        if group.is_empty() {
            return Err(Error::ClassWithoutTransactions(class.clone()));
        }
    }
    let per_class: Vec<Vec<FrequentItemset>> = data
        .groups
        .par_iter()
        .map(|group| apriori(group, config).map(|f| maximal_itemsets(&f)))
        .collect::<Result<_>>()?;

    let mut seen = HashSet::new();
    let mut merged = Vec::new();
    for sets in per_class {
        for set in sets {
            if seen.insert(set.items.clone()) {
                merged.push(set.items);
            }
        }
    }

    Ok(merged
        .into_par_iter()
        .map(|items| {
            let counts = (0..data.classes.len())
                .map(|c| data.count_containing(c, &items))
                .collect();
            ItemSet {
                items,
                class_counts: counts,
            }
        })
        .collect())
}

/// `antecedent -> consequent` with its support count and confidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationRule {
    pub antecedent: Vec<Keyword>,
    pub consequent: Vec<Keyword>,
    pub support: usize,
    pub confidence: Ratio<u64>,
}

/// Rules `A -> S \ A` for every frequent set `S` of two or more items and every
/// non-empty proper subset `A`, kept when `support(S) / support(A)` reaches
/// `min_confidence`. Needs the full (downward-closed) Apriori output.
pub fn association_rules(
    frequent: &[FrequentItemset],
    min_confidence: f64,
) -> Vec<AssociationRule> {
    let support: HashMap<&[Keyword], usize> = frequent
        .iter()
        .map(|f| (f.items.as_slice(), f.support))
        .collect();
    let mut rules = Vec::new();
    for set in frequent.iter().filter(|f| f.items.len() >= 2) {
        let n = set.items.len();
        for mask in 1..(1u64 << n) - 1 {
            let (antecedent, consequent): (Vec<_>, Vec<_>) = set
                .items
                .iter()
                .enumerate()
                .partition(|&(i, _)| mask & (1 << i) != 0);
            let antecedent: Vec<Keyword> = antecedent.into_iter().map(|(_, k)| k.clone()).collect();
            let Some(&base) = support.get(antecedent.as_slice()) else {
                continue;
            };
            let confidence = Ratio::new(set.support as u64, base as u64);
            if crate::rational::to_f64(confidence) + 1e-12 >= min_confidence {
                rules.push(AssociationRule {
                    antecedent,
                    consequent: consequent.into_iter().map(|(_, k)| k.clone()).collect(),
                    support: set.support,
                    confidence,
                });
            }
        }
    }
    rules
}

/// One transaction per line, items separated by single spaces.
pub fn write_transactions<W: Write>(
    mut out: W,
    transactions: &[Transaction],
) -> std::io::Result<()> {
    for t in transactions {
        let line: Vec<&str> = t.items.iter().map(Keyword::as_str).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads the line format of [`write_transactions`]; ids are 1-based line numbers.
pub fn read_transactions<R: BufRead>(input: R) -> Result<Vec<Transaction>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<transactions>", e))?;
        let items = line
            .split_whitespace()
            .map(Keyword::new)
            .collect::<Result<Vec<_>>>()?;
        out.push(Transaction::new((i + 1).to_string(), items));
    }
    Ok(out)
}
