use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::sparse::SparseVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Joins the tokens of an n-gram into a vocabulary key.
pub const NGRAM_JOINER: char = '_';

/// All n-grams with `lo <= n <= hi`, keyed with [`NGRAM_JOINER`].
pub fn ngrams<S: AsRef<str>>(tokens: &[S], lo: usize, hi: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in lo..=hi {
        if n == 0 || n > tokens.len() {
            continue;
        }
        for window in tokens.windows(n) {
            let mut key = String::from(window[0].as_ref());
            for t in &window[1..] {
                key.push(NGRAM_JOINER);
                key.push_str(t.as_ref());
            }
            out.push(key);
        }
    }
    out
}

/// Fitted TF-IDF vocabulary with smoothed inverse document frequencies
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel<T> {
    vocabulary: HashMap<String, usize>,
    terms: Vec<String>,
    idf: Vec<T>,
    ngram_range: (usize, usize),
    binary_tf: bool,
}

impl<T: Real> TfidfModel<T> {
    pub fn fit<S: AsRef<str>>(
        segments: &[Vec<S>],
        ngram_range: (usize, usize),
        binary_tf: bool,
    ) -> Result<Self> {
        let (lo, hi) = ngram_range;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!(
                "invalid n-gram range ({lo}, {hi})"
            )));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for seg in segments {
            let uniq: BTreeSet<String> = ngrams(seg, lo, hi).into_iter().collect();
            for term in uniq {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        if df.is_empty() {
            return Err(Error::Invalid(
                "cannot fit TF-IDF on a corpus without tokens".into(),
            ));
        }
        let n = segments.len() as f64;
        let mut terms = Vec::with_capacity(df.len());
        let mut idf = Vec::with_capacity(df.len());
        for (term, count) in df {
            idf.push(T::cast(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0));
            terms.push(term);
        }
        Ok(Self::from_parts(terms, idf, ngram_range, binary_tf))
    }

    /// Rebuilds a model from its sorted term list and weights.
    pub fn from_parts(
        terms: Vec<String>,
        idf: Vec<T>,
        ngram_range: (usize, usize),
        binary_tf: bool,
    ) -> Self {
        assert_eq!(terms.len(), idf.len());
        let vocabulary = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        TfidfModel {
            vocabulary,
            terms,
            idf,
            ngram_range,
            binary_tf,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[T] {
        &self.idf
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).copied()
    }

    pub fn ngram_range(&self) -> (usize, usize) {
        self.ngram_range
    }

    pub fn binary_tf(&self) -> bool {
        self.binary_tf
    }

    /// L2-normalized TF-IDF vector. Unknown n-grams are dropped; an all-OOV
    /// segment gives the zero vector.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector<T> {
        let (lo, hi) = self.ngram_range;
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for g in ngrams(tokens, lo, hi) {
            if let Some(&i) = self.vocabulary.get(&g) {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        let pairs = counts.into_iter().map(|(i, c)| {
            let tf = if self.binary_tf { T::one() } else { T::cast(c as f64) };
            (i, tf * self.idf[i])
        });
        SparseVector::from_sorted(self.terms.len(), pairs).normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn seg(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn ngram_vocabulary() {
        let m: TfidfModel<f64> = TfidfModel::fit(&[seg("a b")], (1, 2), false).unwrap();
        assert_eq!(m.terms(), ["a", "a_b", "b"]);
    }

    #[test]
    fn idf_values() {
        let m: TfidfModel<f64> = TfidfModel::fit(&[seg("tax law"), seg("tax")], (1, 1), false).unwrap();
        assert_relative_eq!(m.idf()[m.index_of("tax").unwrap()], 1.0);
        assert_relative_eq!(m.idf()[m.index_of("law").unwrap()], (1.5f64).ln() + 1.0);
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(TfidfModel::<f64>::fit::<String>(&[], (1, 1), false).is_err());
        assert!(TfidfModel::<f64>::fit(&[seg("")], (1, 1), false).is_err());
        assert!(TfidfModel::<f64>::fit(&[seg("a")], (2, 1), false).is_err());
    }

    #[test]
    fn full_vector_matches_hand_computation() {
        // corpus: "a b a" and "b c"; N = 2
        // df: a=1 b=2 c=1 -> idf a = ln(3/2)+1, b = 1, c = ln(3/2)+1
        let corpus = [seg("a b a"), seg("b c")];
        let m: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 1), false).unwrap();
        let v = m.encode(&corpus[0]).to_dense();
        let ia = (1.5f64).ln() + 1.0;
        let raw = [2.0 * ia, 1.0, 0.0];
        let norm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        for (got, want) in v.iter().zip(raw.iter()) {
            assert_relative_eq!(*got, want / norm, epsilon = 1e-12);
        }
        let mb: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 1), true).unwrap();
        let vb = mb.encode(&corpus[0]).to_dense();
        let nb = (ia * ia + 1.0).sqrt();
        assert_relative_eq!(vb[0], ia / nb, epsilon = 1e-12);
        assert_relative_eq!(vb[1], 1.0 / nb, epsilon = 1e-12);
    }

    #[test]
    fn binary_tf_collapses_repeats() {
        let corpus = [seg("tax tax tax"), seg("tax law")];
        let m: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 2), true).unwrap();
        // unigram-only query so the bigram tax_tax does not appear
        let m1: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 1), true).unwrap();
        assert_eq!(m1.encode(&seg("tax tax tax")), m1.encode(&seg("tax")));
        let v = m.encode(&seg("tax law"));
        assert_relative_eq!(v.dot(&v), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn oov_gives_zero_vector() {
        let m: TfidfModel<f64> = TfidfModel::fit(&[seg("a b")], (1, 2), false).unwrap();
        assert!(m.encode(&seg("zzz yyy")).is_zero());
    }

    fn words() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 1..12)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn unigram_encoding_order_invariant(corpus in prop::collection::vec(words(), 1..6), mut q in words(), binary in any::<bool>()) {
            let m: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 1), binary).unwrap();
            let a = m.encode(&q);
            q.reverse();
            let b = m.encode(&q);
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert_eq!(a.indices(), b.indices());
        }

        #[test]
        fn binary_equals_deduped(corpus in prop::collection::vec(words(), 1..6), q in words()) {
            let m: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 1), true).unwrap();
            let mut dedup = q.clone();
            dedup.sort();
            dedup.dedup();
            prop_assert_eq!(m.encode(&q), m.encode(&dedup));
        }

        #[test]
        fn idf_non_increasing_in_df(corpus in prop::collection::vec(words(), 1..8)) {
            let m: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 1), false).unwrap();
            let mut pairs: Vec<(usize, f64)> = m.terms().iter().enumerate().map(|(i, t)| {
                let df = corpus.iter().filter(|s| s.contains(t)).count();
                (df, m.idf()[i])
            }).collect();
            pairs.sort_by(|a, b| a.0.cmp(&b.0));
            for w in pairs.windows(2) {
                prop_assert!(w[1].1 <= w[0].1 + 1e-15);
                prop_assert!(w[0].1 > 0.0);
            }
        }

        #[test]
        fn self_cosine_is_one(corpus in prop::collection::vec(words(), 1..6), pick in 0usize..6) {
            let m: TfidfModel<f64> = TfidfModel::fit(&corpus, (1, 2), false).unwrap();
            let v = m.encode(&corpus[pick % corpus.len()]);
            prop_assert!((v.dot(&v) - 1.0).abs() < 1e-12);
        }
    }
}
