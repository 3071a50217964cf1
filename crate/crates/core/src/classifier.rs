//! Class scoring by positive/negative word-set matching.
//!
//! For a class `c`, every table set is either positive (its most probable
//! class is `c`) or negative. The score adds the percentage of positive sets
//! the document matches, the percentage of negative sets it does not match,
//! and the class prior. A set is matched when at least half of its words are
//! among the document keywords.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;

use crate::model::ProbabilityTable;
use crate::preprocess::Keyword;
use crate::rational::{format_decimal, Exact};

/// Share of `items` present in `keywords`.
pub fn match_fraction(items: &[Keyword], keywords: &BTreeSet<Keyword>) -> Exact {
    assert!(!items.is_empty(), "word sets are never empty");
    let hits = items.iter().filter(|k| keywords.contains(*k)).count();
    Ratio::new(hits as u64, items.len() as u64)
}

pub fn is_matched(items: &[Keyword], keywords: &BTreeSet<Keyword>) -> bool {
    match_fraction(items, keywords) >= Ratio::new(1, 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreBreakdown {
    pub class_name: String,
    /// Sets whose most probable class is this one.
    pub pval: u64,
    /// All other sets.
    pub nval: u64,
    /// Positive sets the document matches.
    pub p: u64,
    /// Negative sets the document does not match.
    pub n: u64,
    pub positive_pct: Exact,
    pub negative_pct: Exact,
    pub prior: Exact,
    pub total: Exact,
}

impl ScoreBreakdown {
    /// A percentage over an empty group is 0.
    pub fn new(
        class_name: impl Into<String>,
        pval: u64,
        nval: u64,
        p: u64,
        n: u64,
        prior: Exact,
    ) -> Self {
        let pct = |hits: u64, of: u64| {
            if of == 0 {
                Ratio::from_integer(0)
            } else {
                Ratio::new(hits * 100, of)
            }
        };
        let positive_pct = pct(p, pval);
        let negative_pct = pct(n, nval);
        ScoreBreakdown {
            class_name: class_name.into(),
            pval,
            nval,
            p,
            n,
            positive_pct,
            negative_pct,
            prior,
            total: positive_pct + negative_pct + prior,
        }
    }

    pub fn total_display(&self) -> String {
        format_decimal(self.total, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    pub breakdowns: Vec<ScoreBreakdown>,
    /// Index into the table's classes.
    pub winner: usize,
    /// Classes sharing the maximal total, in class order; more than one
    /// entry means the winner was picked by class order.
    pub tied: Vec<usize>,
    /// Indices of table entries that met the 50% rule.
    pub matched_sets: Vec<usize>,
    /// Set when the document had no keywords at all.
    pub low_evidence: bool,
}

impl ClassificationResult {
    pub fn winner_name(&self) -> &str {
        &self.breakdowns[self.winner].class_name
    }

    pub fn is_tie(&self) -> bool {
        self.tied.len() > 1
    }

    /// `class,pval,nval,p,n,positive_pct,negative_pct,prior,total` with two
    /// decimals for the rational columns.
    pub fn breakdown_csv(&self) -> String {
        let mut out = String::from("class,pval,nval,p,n,positive_pct,negative_pct,prior,total\n");
        for b in &self.breakdowns {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                b.class_name,
                b.pval,
                b.nval,
                b.p,
                b.n,
                format_decimal(b.positive_pct, 2),
                format_decimal(b.negative_pct, 2),
                format_decimal(b.prior, 2),
                format_decimal(b.total, 2)
            )
            .unwrap();
        }
        out
    }
}

fn tally(table: &ProbabilityTable, matched: &[bool], class: usize) -> ScoreBreakdown {
    let (mut pval, mut nval, mut p, mut n) = (0, 0, 0, 0);
    for (entry, &hit) in table.entries().iter().zip(matched) {
        if entry.best_class() == class {
            pval += 1;
            if hit {
                p += 1;
            }
        } else {
            nval += 1;
            if !hit {
                n += 1;
            }
        }
    }
    ScoreBreakdown::new(
        table.classes()[class].clone(),
        pval,
        nval,
        p,
        n,
        table.stats().prior(class),
    )
}

fn matches(table: &ProbabilityTable, keywords: &BTreeSet<Keyword>) -> Vec<bool> {
    table
        .entries()
        .iter()
        .map(|e| is_matched(e.itemset.items(), keywords))
        .collect()
}

pub fn score_class(
    table: &ProbabilityTable,
    keywords: &BTreeSet<Keyword>,
    class: usize,
) -> ScoreBreakdown {
    tally(table, &matches(table, keywords), class)
}

pub fn classify(table: &ProbabilityTable, keywords: &BTreeSet<Keyword>) -> ClassificationResult {
    let matched = matches(table, keywords);
    let breakdowns: Vec<ScoreBreakdown> = (0..table.classes().len())
        .map(|c| tally(table, &matched, c))
        .collect();
    let best = breakdowns
        .iter()
        .map(|b| b.total)
        .max()
        .expect("tables have at least one class");
    let tied: Vec<usize> = breakdowns
        .iter()
        .enumerate()
        .filter(|(_, b)| b.total == best)
        .map(|(i, _)| i)
        .collect();
    ClassificationResult {
        winner: tied[0],
        tied,
        breakdowns,
        matched_sets: matched
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i)
            .collect(),
        low_evidence: keywords.is_empty(),
    }
}
