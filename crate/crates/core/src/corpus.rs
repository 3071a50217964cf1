//! Labeled document collections: loading from disk and stratified splitting.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_decimal, round_half_up};

/// One abstract-sized document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub label: Option<String>,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, label: Option<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            label,
            text: text.into(),
        }
    }

    pub fn labeled(
        id: impl Into<String>,
        label: impl Into<String>,
        text: impl Into<String>,
    ) -> Self {
        Self::new(id, Some(label.into()), text)
    }
}

/// Documents ordered by id, plus the ordered list of class names.
///
/// The class order is significant: it breaks ties between classes everywhere
/// downstream (set ownership and final class selection).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    classes: Vec<String>,
}

impl LabeledCorpus {
    /// Builds a corpus whose class list is the sorted set of labels present.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let classes: BTreeSet<String> = documents.iter().filter_map(|d| d.label.clone()).collect();
        Self::with_classes(documents, classes.into_iter().collect())
    }

    /// Builds a corpus with an explicit class order. Every label must be listed.
    pub fn with_classes(mut documents: Vec<Document>, classes: Vec<String>) -> Result<Self> {
        let mut seen_classes = HashSet::new();
        for class in &classes {
            if !seen_classes.insert(class.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "class `{class}` listed twice"
                )));
            }
        }
        let mut ids = HashSet::new();
        for doc in &documents {
            if !ids.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: doc.id.clone(),
                    path: PathBuf::new(),
                });
            }
            if doc.text.trim().is_empty() {
                return Err(Error::EmptyDocument {
                    id: doc.id.clone(),
                    path: PathBuf::new(),
                });
            }
            if let Some(label) = &doc.label {
                if !seen_classes.contains(label.as_str()) {
                    return Err(Error::UnknownClass(label.clone()));
                }
            }
        }
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(LabeledCorpus { documents, classes })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    /// Number of documents per class, in class order.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for doc in &self.documents {
            if let Some(i) = doc.label.as_deref().and_then(|l| self.class_index(l)) {
                counts[i] += 1;
            }
        }
        counts
    }

    pub fn ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.id.clone()).collect()
    }

    /// Fails unless every document is labeled and at least `min_classes` classes exist.
    pub fn require_labeled(&self, min_classes: usize) -> Result<()> {
        if let Some(doc) = self.documents.iter().find(|d| d.label.is_none()) {
            return Err(Error::Unlabeled(doc.id.clone()));
        }
        if self.classes.len() < min_classes {
            return Err(Error::TooFewClasses {
                needed: min_classes,
                found: self.classes.len(),
            });
        }
        Ok(())
    }

    fn subset(&self, keep: impl Fn(&Document) -> bool) -> LabeledCorpus {
        LabeledCorpus {
            documents: self.documents.iter().filter(|d| keep(d)).cloned().collect(),
            classes: self.classes.clone(),
        }
    }
}

/// On-disk corpus layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// `<root>/<class_name>/<doc_id>.txt`
    DirectoryPerClass,
    /// CSV with header `id,label,text`.
    Delimited,
}

impl CorpusFormat {
    /// Directories are read as directory-per-class, files as delimited.
    pub fn detect(path: &Path) -> CorpusFormat {
        if path.is_dir() {
            CorpusFormat::DirectoryPerClass
        } else {
            CorpusFormat::Delimited
        }
    }
}

pub fn load_corpus(root: &Path, format: CorpusFormat) -> Result<LabeledCorpus> {
    if !root.exists() {
        return Err(Error::MissingPath(root.to_path_buf()));
    }
    let documents = match format {
        CorpusFormat::DirectoryPerClass => load_directory(root)?,
        CorpusFormat::Delimited => load_delimited(root)?,
    };
    if documents.is_empty() {
        return Err(Error::NoDocuments(root.to_path_buf()));
    }
    LabeledCorpus::new(documents)
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        if name.to_string_lossy().starts_with('.') {
            continue;
        }
        paths.push(entry.path());
    }
    paths.sort();
    Ok(paths)
}

fn load_directory(root: &Path) -> Result<Vec<Document>> {
    let mut documents = Vec::new();
    for class_dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        let class = class_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        for file in sorted_entries(&class_dir)? {
            if !file.is_file() || file.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let stem = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let id = format!("{class}/{stem}");
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            if text.trim().is_empty() {
                return Err(Error::EmptyDocument { id, path: file });
            }
            documents.push(Document::labeled(id, class.clone(), text));
        }
    }
    Ok(documents)
}

#[derive(Deserialize)]
struct DelimitedRow {
    id: Option<String>,
    label: Option<String>,
    text: String,
}

fn load_delimited(path: &Path) -> Result<Vec<Document>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| delimited_error(path, e))?;
    {
        let headers = reader.headers().map_err(|e| delimited_error(path, e))?;
        let names: Vec<&str> = headers.iter().collect();
        if names != ["id", "label", "text"] {
            return Err(Error::Delimited {
                path: path.to_path_buf(),
                message: format!(
                    "expected header `id,label,text`, found `{}`",
                    names.join(",")
                ),
            });
        }
    }
    let mut documents = Vec::new();
    let mut ids = HashSet::new();
    for (row, record) in reader.deserialize::<DelimitedRow>().enumerate() {
        let record = record.map_err(|e| delimited_error(path, e))?;
        let id = match record.id.filter(|s| !s.trim().is_empty()) {
            Some(id) => id,
            None => (row + 1).to_string(),
        };
        if !ids.insert(id.clone()) {
            return Err(Error::DuplicateId {
                id,
                path: path.to_path_buf(),
            });
        }
        if record.text.trim().is_empty() {
            return Err(Error::EmptyDocument {
                id,
                path: path.to_path_buf(),
            });
        }
        let label = record.label.filter(|s| !s.trim().is_empty());
        documents.push(Document::new(id, label, record.text));
    }
    Ok(documents)
}

fn delimited_error(path: &Path, err: csv::Error) -> Error {
    match err.kind() {
        csv::ErrorKind::Io(_) => match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        },
        _ => Error::Delimited {
            path: path.to_path_buf(),
            message: err.to_string(),
        },
    }
}

/// Writes a corpus in directory-per-class layout. Document ids of the form
/// `<class>/<stem>` keep their stem; other ids are used verbatim as the stem.
pub fn write_directory(corpus: &LabeledCorpus, root: &Path) -> Result<()> {
    for doc in corpus.documents() {
        let label = doc
            .label
            .as_deref()
            .ok_or_else(|| Error::Unlabeled(doc.id.clone()))?;
        let stem = doc
            .id
            .strip_prefix(label)
            .and_then(|s| s.strip_prefix('/'))
            .unwrap_or(&doc.id);
        let dir = root.join(label);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let file = dir.join(format!("{stem}.txt"));
        fs::write(&file, &doc.text).map_err(|e| Error::io(&file, e))?;
    }
    Ok(())
}

/// How the per-class training share `fraction × count` becomes an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRounding {
    /// Round to the nearest integer, halves away from zero.
    #[default]
    Nearest,
    /// Round to one decimal place first, then to the nearest integer
    /// (halves away from zero at both steps). Reproduces percentages that
    /// were computed with one-decimal intermediate values.
    TenthsThenNearest,
}

impl SplitRounding {
    pub fn apply(self, exact: Ratio<u64>) -> u64 {
        match self {
            SplitRounding::Nearest => round_half_up(exact),
            SplitRounding::TenthsThenNearest => {
                let tenths = round_half_up(exact * Ratio::from_integer(10));
                round_half_up(Ratio::new(tenths, 10))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    training_fraction: Ratio<u64>,
    pub seed: u64,
    pub rounding: SplitRounding,
}

impl SplitSpec {
    /// `fraction` is taken at its shortest decimal representation, so `0.35`
    /// means exactly 35/100.
    pub fn new(fraction: f64, seed: u64) -> Result<Self> {
        let exact = fraction_from_f64(fraction)?;
        Ok(SplitSpec {
            training_fraction: exact,
            seed,
            rounding: SplitRounding::Nearest,
        })
    }

    pub fn from_ratio(fraction: Ratio<u64>, seed: u64) -> Result<Self> {
        if *fraction.numer() == 0 || fraction >= Ratio::from_integer(1) {
            return Err(Error::InvalidFraction(
                fraction.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(SplitSpec {
            training_fraction: fraction,
            seed,
            rounding: SplitRounding::Nearest,
        })
    }

    pub fn with_rounding(mut self, rounding: SplitRounding) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn training_fraction(&self) -> Ratio<u64> {
        self.training_fraction
    }

    /// Training documents allotted to a class of `class_size` documents.
    pub fn train_count(&self, class_size: usize) -> usize {
        self.rounding
            .apply(self.training_fraction * Ratio::from_integer(class_size as u64)) as usize
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (seed {})", self.training_fraction, self.seed)
    }
}

pub(crate) fn fraction_from_f64(fraction: f64) -> Result<Ratio<u64>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    parse_decimal(&format!("{fraction}")).ok_or(Error::InvalidFraction(fraction))
}

/// Stratified, seeded split. Per class, the first `train_count` documents of
/// a seeded shuffle go to training and the rest to testing.
pub fn split(corpus: &LabeledCorpus, spec: &SplitSpec) -> Result<(LabeledCorpus, LabeledCorpus)> {
    corpus.require_labeled(1)?;
    let mut by_class: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for doc in corpus.documents() {
        let label = doc.label.as_deref().expect("checked labeled");
        let class = corpus
            .class_index(label)
            .ok_or_else(|| Error::UnknownClass(label.to_string()))?;
        by_class.entry(class).or_default().push(doc.id.as_str());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train_ids = HashSet::new();
    for (class, name) in corpus.classes().iter().enumerate() {
        let Some(ids) = by_class.get_mut(&class) else {
            return Err(Error::EmptyTrainingClass(name.clone()));
        };
        let take = spec.train_count(ids.len());
        if take == 0 {
            return Err(Error::EmptyTrainingClass(name.clone()));
        }
        ids.shuffle(&mut rng);
        train_ids.extend(ids[..take.min(ids.len())].iter().map(|s| s.to_string()));
    }

    let train = corpus.subset(|d| train_ids.contains(&d.id));
    let test = corpus.subset(|d| !train_ids.contains(&d.id));
    Ok((train, test))
}
