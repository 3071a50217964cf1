//! Seeded generator for corpora with disjoint class vocabularies.
//!
//! Each class owns a set of planted word pairs. A document repeats every word
//! of the pairs it carries twice (so they pass a two-occurrence keyword
//! filter) and pads with class-specific filler words used once plus common
//! stopwords.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, LabeledCorpus};
use crate::error::Result;

const FUNCTION_WORDS: [&str; 8] = ["the", "of", "and", "with", "is", "to", "from", "are"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub docs_per_class: usize,
    pub patterns_per_class: usize,
    pub patterns_per_doc: usize,
    pub filler_vocabulary: usize,
    pub filler_per_doc: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            classes: 5,
            docs_per_class: 20,
            patterns_per_class: 8,
            patterns_per_doc: 3,
            filler_vocabulary: 40,
            filler_per_doc: 8,
            seed: 7,
        }
    }
}

impl SyntheticSpec {
    pub fn class_name(&self, class: usize) -> String {
        format!("class{}", class + 1)
    }

    /// The planted word pairs of a class.
    pub fn patterns(&self, class: usize) -> Vec<[String; 2]> {
        (0..self.patterns_per_class)
            .map(|p| [planted_word(class, p, 'a'), planted_word(class, p, 'b')])
            .collect()
    }

    pub fn generate(&self) -> Result<LabeledCorpus> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut docs = Vec::with_capacity(self.classes * self.docs_per_class);
        for class in 0..self.classes {
            let patterns = self.patterns(class);
            let label = self.class_name(class);
            for d in 0..self.docs_per_class {
                let mut tokens: Vec<String> = Vec::new();
                let chosen: Vec<&[String; 2]> = patterns
                    .choose_multiple(&mut rng, self.patterns_per_doc.min(patterns.len()))
                    .collect();
                for pair in chosen {
                    for word in pair {
                        tokens.push(word.clone());
                        tokens.push(word.clone());
                    }
                }
                let mut fillers: Vec<usize> = (0..self.filler_vocabulary).collect();
                fillers.shuffle(&mut rng);
                for &f in fillers.iter().take(self.filler_per_doc) {
                    tokens.push(format!("k{}f{}", class + 1, f));
                }
                for _ in 0..tokens.len() / 2 {
                    tokens.push(FUNCTION_WORDS[rng.gen_range(0..FUNCTION_WORDS.len())].to_string());
                }
                tokens.shuffle(&mut rng);
                let text = format!("{}.", tokens.join(" "));
                docs.push(Document::labeled(
                    format!("{label}/doc{d:03}"),
                    label.clone(),
                    text,
                ));
            }
        }
        LabeledCorpus::new(docs)
    }
}

fn planted_word(class: usize, pattern: usize, side: char) -> String {
    format!("k{}p{}{}", class + 1, pattern + 1, side)
}
