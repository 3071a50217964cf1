//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

/// Every non-empty subset of the vocabulary with its exact containment count,
/// kept when the count reaches `support`. Exhaustive over `2^|vocab|` subsets.
pub fn brute_force_frequent(
    transactions: &[BTreeSet<String>],
    support: usize,
) -> BTreeMap<Vec<String>, usize> {
    let vocab: Vec<String> = transactions
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(vocab.len() <= 16, "oracle is exponential");
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << vocab.len()) {
        let subset: Vec<String> = (0..vocab.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| vocab[i].clone())
            .collect();
        let count = transactions
            .iter()
            .filter(|t| subset.iter().all(|w| t.contains(w)))
            .count();
        if count >= support {
            out.insert(subset, count);
        }
    }
    out
}

/// Frequent sets that are a proper subset of no other frequent set, by
/// pairwise comparison.
pub fn brute_force_maximal(
    frequent: &BTreeMap<Vec<String>, usize>,
) -> BTreeMap<Vec<String>, usize> {
    frequent
        .iter()
        .filter(|(a, _)| {
            !frequent
                .keys()
                .any(|b| b.len() > a.len() && a.iter().all(|w| b.contains(w)))
        })
        .map(|(k, v)| (k.clone(), *v))
        .collect()
}

/// One table row for the straight-line scorer: words and per-class counts.
pub struct Row {
    pub words: Vec<String>,
    pub counts: Vec<u64>,
}

/// Straight-line scoring over raw counts. Owner = first class with the
/// largest count; sets per class and |S| are recounted from the rows;
/// smoothing uses the owner's set count in every column. Returns
/// (pval, nval, p, n, total) per class.
pub fn straight_line_scores(
    rows: &[Row],
    n_classes: usize,
    keywords: &BTreeSet<String>,
) -> Vec<(u64, u64, u64, u64, Ratio<u64>)> {
    let owner = |counts: &[u64]| {
        let mut best = 0;
        for i in 1..counts.len() {
            if counts[i] > counts[best] {
                best = i;
            }
        }
        best
    };
    let total_sets = rows.len() as u64;
    let mut owned = vec![0u64; n_classes];
    for r in rows {
        owned[owner(&r.counts)] += 1;
    }
    let mut result = Vec::new();
    for class in 0..n_classes {
        let (mut pval, mut nval, mut p, mut n) = (0u64, 0u64, 0u64, 0u64);
        for r in rows {
            let o = owner(&r.counts);
            // smoothed probabilities, then argmax
            let probs: Vec<Ratio<u64>> = r
                .counts
                .iter()
                .map(|&c| Ratio::new(c + 1, owned[o] + total_sets))
                .collect();
            let mut best = 0;
            for i in 1..probs.len() {
                if probs[i] > probs[best] {
                    best = i;
                }
            }
            if best == class {
                pval += 1;
            } else {
                nval += 1;
            }
            let hits = r.words.iter().filter(|w| keywords.contains(*w)).count();
            let matched = 2 * hits >= r.words.len();
            if matched && best == class {
                p += 1;
            }
            if !matched && best != class {
                n += 1;
            }
        }
        let mut total = Ratio::new(owned[class], total_sets);
        if pval > 0 {
            total += Ratio::new(p * 100, pval);
        }
        if nval > 0 {
            total += Ratio::new(n * 100, nval);
        }
        result.push((pval, nval, p, n, total));
    }
    result
}

/// Whitespace/punctuation scan of raw text, independent of the tokenizer.
pub fn raw_words(text: &str) -> BTreeSet<String> {
    text.split(|c: char| c.is_whitespace() || c == '.')
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}
