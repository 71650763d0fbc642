//! Synthetic corpus where each clause is a fixed sentence copied into every
//! document, with optional token noise, among unrelated filler sentences.

use std::collections::HashSet;

use clause_core::corpus::{ClauseAnnotation, Corpus, Document, Interval, SpanSet};
use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub struct PlantedSpec {
    pub documents: usize,
    pub clauses: usize,
    pub clause_len: usize,
    pub filler_sentences: usize,
    pub filler_vocabulary: usize,
    /// Probability that a clause token is replaced by a filler word.
    pub noise: f64,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            documents: 50,
            clauses: 5,
            clause_len: 14,
            filler_sentences: 15,
            filler_vocabulary: 3000,
            noise: 0.1,
            seed: 7,
        }
    }
}

pub struct Planted {
    pub corpus: Corpus,
    pub annotations: Vec<ClauseAnnotation>,
}

const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "st"];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];

fn word(rng: &mut Xoshiro256PlusPlus) -> String {
    let syllables = rng.random_range(2..=4);
    (0..syllables)
        .map(|_| format!("{}{}", ONSETS[rng.random_range(0..ONSETS.len())], VOWELS[rng.random_range(0..VOWELS.len())]))
        .collect()
}

fn vocabulary(rng: &mut Xoshiro256PlusPlus, n: usize, taken: &mut HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = word(rng);
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn sentence(words: &[String]) -> String {
    let mut s = words.join(" ");
    s[..1].make_ascii_uppercase();
    s.push('.');
    s
}

pub fn clause_label(c: usize) -> String {
    format!("clause-{c}")
}

pub fn generate(spec: &PlantedSpec) -> Planted {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let mut taken = HashSet::new();
    let filler = vocabulary(&mut rng, spec.filler_vocabulary, &mut taken);
    let templates: Vec<Vec<String>> = (0..spec.clauses)
        .map(|_| vocabulary(&mut rng, spec.clause_len, &mut taken))
        .collect();

    let mut docs = Vec::new();
    let mut annotations = Vec::new();
    for d in 0..spec.documents {
        let id = format!("doc{d:03}");
        // None = filler, Some(c) = clause c
        let mut slots: Vec<Option<usize>> = vec![None; spec.filler_sentences];
        for c in 0..spec.clauses {
            let at = rng.random_range(0..=slots.len());
            slots.insert(at, Some(c));
        }
        let mut text = String::new();
        for slot in slots {
            if !text.is_empty() {
                text.push(' ');
            }
            let words: Vec<String> = match slot {
                None => {
                    let len = rng.random_range(8..=14);
                    (0..len).map(|_| filler[rng.random_range(0..filler.len())].clone()).collect()
                }
                Some(c) => templates[c]
                    .iter()
                    .map(|w| {
                        if rng.random::<f64>() < spec.noise {
                            filler[rng.random_range(0..filler.len())].clone()
                        } else {
                            w.clone()
                        }
                    })
                    .collect(),
            };
            let s = sentence(&words);
            let start = text.len();
            text.push_str(&s);
            if let Some(c) = slot {
                annotations.push(ClauseAnnotation {
                    doc_id: id.clone(),
                    clause_label: clause_label(c),
                    span: SpanSet::single(Interval::new(start, text.len())),
                });
            }
        }
        docs.push(Document::new(id, text));
    }
    Planted {
        corpus: Corpus::from_documents(docs).unwrap(),
        annotations,
    }
}

/// Renders the corpus as a reference TSV.
pub fn reference_tsv(corpus: &Corpus) -> String {
    corpus.documents().iter().map(|d| format!("{}\t{}\n", d.id(), d.text())).collect()
}

