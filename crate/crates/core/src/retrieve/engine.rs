use std::collections::HashMap;

use log::{info, warn};
use ndarray::{Array1, Array2};
use rayon::prelude::*;

use super::config::{
    AggregatorKind, ChooserKind, PipelineConfig, ProjectorKind, VectorizerKind, WmdMode,
};
use super::models::FittedModels;
use crate::corpus::{AnswerLine, Corpus, Document, QueryEpisode, SpanSet};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseOperator};
use crate::scalar::Real;
use crate::score::{cosine, pool_over_seeds, wmd_exact, wmd_relaxed, Embedding, NbowSignature};
use crate::segment::{generate_candidates, CandidateSegment, Segmenter};
use crate::transform::{
    dct_aggregate, fit_fica, fit_tsvd, max_aggregate, mean_aggregate, sif_aggregate, CommonComponent, FicaOptions,
    Projector, TsvdOptions,
};
use crate::vectorize::{
    load_sidecar_set, tokenize, EmbeddingLexicon, FrequencyTable, SparseVector, TfidfModel, TokenEmbeddingsDoc,
    TokenSequence,
};

/// External data a pipeline reads besides the reference corpus.
#[derive(Debug, Clone, Default)]
pub struct Resources<T> {
    pub segmenter: Segmenter,
    pub lexicon: Option<EmbeddingLexicon<T>>,
    pub sidecar: Option<HashMap<String, TokenEmbeddingsDoc<T>>>,
    pub frequencies: Option<FrequencyTable>,
}

impl<T: Real> Resources<T> {
    /// Loads every file named by `config`.
    pub fn load(config: &PipelineConfig) -> Result<Self> {
        let segmenter = match &config.segmenter.abbreviations {
            Some(p) => Segmenter::from_file(p)?,
            None => Segmenter::default(),
        };
        let lexicon = match (&config.vectorizer.kind, &config.vectorizer.lexicon) {
            (VectorizerKind::Static, Some(p)) => Some(EmbeddingLexicon::load(p)?),
            _ => None,
        };
        let sidecar = match (&config.vectorizer.kind, &config.vectorizer.sidecar) {
            (VectorizerKind::Contextual, Some(p)) => Some(load_sidecar_set(p)?.1),
            _ => None,
        };
        let frequencies = config.aggregator.frequencies.as_deref().map(FrequencyTable::load).transpose()?;
        Ok(Resources {
            segmenter,
            lexicon,
            sidecar,
            frequencies,
        })
    }
}

#[derive(Debug, Clone)]
enum DocTokens<T> {
    /// TF-IDF reads the text directly.
    Text,
    Vectors(TokenSequence<T>),
}

#[derive(Debug, Clone)]
struct PreparedDoc<T> {
    candidates: Vec<CandidateSegment>,
    tokens: DocTokens<T>,
}

/// An encoded seed span or candidate.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoding<T> {
    Vector(Embedding<T>),
    Bag(NbowSignature<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCandidate {
    pub candidate: CandidateSegment,
    /// Pooled similarity; `-inf` for unencodable candidates.
    pub score: f64,
}

/// A configured pipeline bound to a reference corpus.
pub struct Engine<'c, T> {
    config: PipelineConfig,
    corpus: &'c Corpus,
    docs: Vec<PreparedDoc<T>>,
    frequencies: Option<FrequencyTable>,
    models: FittedModels<T>,
}

fn prepare_docs<T: Real>(config: &PipelineConfig, corpus: &Corpus, res: &Resources<T>) -> Result<Vec<PreparedDoc<T>>> {
    corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let sentences = res.segmenter.split_sentences(doc.text());
            let candidates = generate_candidates(&sentences, config.segmenter.max_ngram)?;
            let tokens = match config.vectorizer.kind {
                VectorizerKind::Tfidf => DocTokens::Text,
                VectorizerKind::Static => {
                    let lex = res
                        .lexicon
                        .as_ref()
                        .ok_or_else(|| Error::Config("static vectors need a lexicon".into()))?;
                    DocTokens::Vectors(TokenSequence::from_lexicon(doc, lex))
                }
                VectorizerKind::Contextual => {
                    let side = res
                        .sidecar
                        .as_ref()
                        .ok_or_else(|| Error::Config("contextual vectors need a sidecar manifest".into()))?;
                    let emb = side
                        .get(doc.id())
                        .ok_or_else(|| Error::Model(format!("sidecar has no entry for document {:?}", doc.id())))?;
                    DocTokens::Vectors(TokenSequence::from_sidecar(doc, emb)?)
                }
            };
            Ok(PreparedDoc { candidates, tokens })
        })
        .collect()
}

/// Tokens of every interval of `span`, concatenated in order.
fn span_words(doc: &Document, span: &SpanSet) -> Vec<String> {
    span.iter()
        .filter_map(|iv| doc.slice(*iv))
        .flat_map(|piece| tokenize(piece).into_iter().map(|t| t.text))
        .collect()
}

fn is_zero<T: Real>(v: &Array1<T>) -> bool {
    v.iter().all(|x| x.is_zero())
}

impl<'c, T: Real> Engine<'c, T> {
    /// Fits every model the configuration needs on all candidates of the
    /// reference corpus.
    pub fn fit(config: PipelineConfig, corpus: &'c Corpus, resources: &Resources<T>) -> Result<Self> {
        config.validate()?;
        let docs = prepare_docs(&config, corpus, resources)?;
        let mut engine = Engine {
            frequencies: Self::frequency_table(&config, &docs, resources),
            config,
            corpus,
            docs,
            models: FittedModels::default(),
        };
        if engine.config.vectorizer.kind == VectorizerKind::Tfidf {
            let segments: Vec<Vec<String>> = engine
                .all_candidates()
                .map(|(d, c)| span_words(&corpus.documents()[d], &SpanSet::single(c.interval)))
                .collect();
            let v = &engine.config.vectorizer;
            engine.models.tfidf = Some(TfidfModel::fit(&segments, v.ngram_range, v.binary_tf)?);
            info!("TF-IDF vocabulary of {} terms over {} segments", engine.models.tfidf.as_ref().unwrap().len(), segments.len());
        }
        let needs_cc = engine.config.aggregator.remove_common_component;
        let projector = engine.config.projector.kind;
        if needs_cc || projector != ProjectorKind::None {
            let mut vectors: Vec<Embedding<T>> = engine.all_encoded_raw()?;
            if needs_cc {
                let dense = stack_dense(&vectors)?;
                let cc = CommonComponent::fit(dense.view())?;
                for v in &mut vectors {
                    if let Embedding::Dense(d) = v {
                        *d = cc.remove(d.view());
                    }
                }
                vectors.retain(|v| !v.is_zero());
                engine.models.common_component = Some(cc);
            }
            let p = &engine.config.projector;
            engine.models.projector = match p.kind {
                ProjectorKind::None => None,
                ProjectorKind::Tsvd => {
                    let opts = TsvdOptions {
                        seed: p.seed,
                        ..TsvdOptions::default()
                    };
                    let fitted = match vectors.first() {
                        Some(Embedding::Sparse(first)) => {
                            let dim = first.dim();
                            let rows: Vec<&SparseVector<T>> = vectors
                                .iter()
                                .map(|v| match v {
                                    Embedding::Sparse(s) => s,
                                    Embedding::Dense(_) => unreachable!("mixed encodings"),
                                })
                                .collect();
                            fit_tsvd(&CsrMatrix::from_rows(dim, rows), p.rank, &opts)?
                        }
                        _ => {
                            let dense = stack_dense(&vectors)?;
                            fit_tsvd(&DenseOperator::new(dense.view()), p.rank, &opts)?
                        }
                    };
                    Some(Projector::Tsvd(fitted))
                }
                ProjectorKind::Fica => {
                    let dense = stack_dense(&vectors)?;
                    let opts = FicaOptions {
                        tol: p.tol,
                        max_iter: p.max_iter,
                        seed: p.seed,
                    };
                    Some(Projector::Fica(fit_fica(dense.view(), p.rank, &opts)?))
                }
            };
        }
        Ok(engine)
    }

    /// Uses previously fitted models instead of fitting.
    pub fn with_models(
        config: PipelineConfig,
        corpus: &'c Corpus,
        resources: &Resources<T>,
        models: FittedModels<T>,
    ) -> Result<Self> {
        config.validate()?;
        let mismatch = |what: &str| Err(Error::Model(format!("model bundle does not match the configuration: {what}")));
        if models.tfidf.is_some() != (config.vectorizer.kind == VectorizerKind::Tfidf) {
            return mismatch("TF-IDF model");
        }
        if models.common_component.is_some() != config.aggregator.remove_common_component {
            return mismatch("common component");
        }
        match (&models.projector, config.projector.kind) {
            (None, ProjectorKind::None) | (Some(Projector::Tsvd(_)), ProjectorKind::Tsvd) | (Some(Projector::Fica(_)), ProjectorKind::Fica) => {}
            _ => return mismatch("projector kind"),
        }
        if let Some(p) = &models.projector {
            if p.output_dim() != config.projector.rank {
                return mismatch("projector rank");
            }
        }
        let docs = prepare_docs(&config, corpus, resources)?;
        Ok(Engine {
            frequencies: Self::frequency_table(&config, &docs, resources),
            config,
            corpus,
            docs,
            models,
        })
    }

    fn frequency_table(config: &PipelineConfig, docs: &[PreparedDoc<T>], res: &Resources<T>) -> Option<FrequencyTable> {
        if config.aggregator.kind != AggregatorKind::Sif {
            return None;
        }
        if let Some(f) = &res.frequencies {
            return Some(f.clone());
        }
        let mut table = FrequencyTable::default();
        for d in docs {
            if let DocTokens::Vectors(seq) = &d.tokens {
                for k in seq.keys() {
                    table.add(k, 1);
                }
            }
        }
        Some(table)
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn models(&self) -> &FittedModels<T> {
        &self.models
    }

    pub fn into_models(self) -> FittedModels<T> {
        self.models
    }

    pub fn corpus(&self) -> &Corpus {
        self.corpus
    }

    /// Candidate segments of a reference document.
    pub fn candidates(&self, doc_id: &str) -> Option<&[CandidateSegment]> {
        self.corpus.position(doc_id).map(|i| self.docs[i].candidates.as_slice())
    }

    fn all_candidates(&self) -> impl Iterator<Item = (usize, CandidateSegment)> + '_ {
        self.docs
            .iter()
            .enumerate()
            .flat_map(|(d, p)| p.candidates.iter().map(move |c| (d, *c)))
    }

    fn all_encoded_raw(&self) -> Result<Vec<Embedding<T>>> {
        let jobs: Vec<(usize, CandidateSegment)> = self.all_candidates().collect();
        let encoded: Vec<Option<Encoding<T>>> = jobs
            .par_iter()
            .map(|(d, c)| self.encode_raw(*d, &SpanSet::single(c.interval)))
            .collect::<Result<_>>()?;
        let vectors: Vec<Embedding<T>> = encoded
            .into_iter()
            .filter_map(|e| match e {
                Some(Encoding::Vector(v)) if !v.is_zero() => Some(v),
                _ => None,
            })
            .collect();
        if vectors.is_empty() {
            return Err(Error::Invalid("no encodable candidate in the reference corpus".into()));
        }
        Ok(vectors)
    }

    /// Vectorizes and aggregates, before common-component removal and
    /// projection. `None` when the span has no usable tokens.
    fn encode_raw(&self, doc_idx: usize, span: &SpanSet) -> Result<Option<Encoding<T>>> {
        let doc = &self.corpus.documents()[doc_idx];
        match &self.docs[doc_idx].tokens {
            DocTokens::Text => {
                let model = self.models.tfidf.as_ref().expect("TF-IDF fitted before encoding");
                let v = model.encode(&span_words(doc, span));
                Ok((!v.is_zero()).then_some(Encoding::Vector(Embedding::Sparse(v))))
            }
            DocTokens::Vectors(seq) => {
                let idx = seq.token_indices(span);
                if idx.is_empty() {
                    return Ok(None);
                }
                let m = seq.matrix(&idx);
                let a = &self.config.aggregator;
                let v = match a.kind {
                    AggregatorKind::Mean => mean_aggregate(m.view())?,
                    AggregatorKind::Max => max_aggregate(m.view())?,
                    AggregatorKind::Dct => dct_aggregate(m.view(), a.dct_k)?,
                    AggregatorKind::Sif => {
                        let table = self.frequencies.as_ref().expect("frequency table prepared");
                        let f: Vec<f64> = idx.iter().map(|&i| table.relative(&seq.keys()[i])).collect();
                        sif_aggregate(m.view(), &f, a.sif_a)?
                    }
                    AggregatorKind::None => {
                        let sig = match self.config.vectorizer.kind {
                            VectorizerKind::Static => {
                                let keys: Vec<&str> = idx.iter().map(|&i| seq.keys()[i].as_str()).collect();
                                NbowSignature::from_bag(&keys, m.view())?
                            }
                            _ => NbowSignature::from_points(m.view())?,
                        };
                        return Ok(Some(Encoding::Bag(sig)));
                    }
                };
                Ok((!is_zero(&v)).then_some(Encoding::Vector(Embedding::Dense(v))))
            }
        }
    }

    fn finish(&self, enc: Encoding<T>) -> Option<Encoding<T>> {
        let Encoding::Vector(mut v) = enc else {
            return Some(enc);
        };
        if let (Some(cc), Embedding::Dense(d)) = (&self.models.common_component, &v) {
            v = Embedding::Dense(cc.remove(d.view()));
        }
        if let Some(p) = &self.models.projector {
            v = Embedding::Dense(match &v {
                Embedding::Dense(d) => p.project_dense(d.as_slice().expect("contiguous")),
                Embedding::Sparse(s) => p.project_sparse(s),
            });
        }
        (!v.is_zero()).then_some(Encoding::Vector(v))
    }

    /// Encodes a span of a reference document through the full pipeline.
    /// `None` when nothing encodable remains.
    pub fn encode(&self, doc_id: &str, span: &SpanSet) -> Result<Option<Encoding<T>>> {
        let idx = self
            .corpus
            .position(doc_id)
            .ok_or_else(|| Error::Invalid(format!("unknown document {doc_id:?}")))?;
        Ok(self.encode_raw(idx, span)?.and_then(|e| self.finish(e)))
    }

    /// Like [`Engine::encode`] but treats an empty or unencodable span as an
    /// error.
    pub fn encode_span(&self, doc_id: &str, span: &SpanSet) -> Result<Encoding<T>> {
        if span.is_empty() {
            return Err(Error::UnencodableSeed(format!("empty span in document {doc_id:?}")));
        }
        self.encode(doc_id, span)?.ok_or_else(|| {
            Error::UnencodableSeed(format!("span {:?} of document {doc_id:?} has no usable tokens", span.items()))
        })
    }

    fn similarity(&self, seed: &Encoding<T>, cand: &Encoding<T>) -> Result<f64> {
        match (seed, cand) {
            (Encoding::Vector(a), Encoding::Vector(b)) => cosine(a, b),
            (Encoding::Bag(a), Encoding::Bag(b)) => Ok(-match self.config.scorer.wmd {
                WmdMode::Exact => wmd_exact(a, b)?,
                WmdMode::Relaxed => wmd_relaxed(a, b)?,
            }),
            _ => Err(Error::Invalid("seed and candidate encodings differ in kind".into())),
        }
    }

    /// Every candidate of the target with its pooled score, in candidate
    /// order.
    pub fn score_candidates(&self, episode: &QueryEpisode) -> Result<Vec<ScoredCandidate>> {
        let target = self
            .corpus
            .position(&episode.target_doc_id)
            .ok_or_else(|| Error::Invalid(format!("unknown target document {:?}", episode.target_doc_id)))?;
        let mut seeds = Vec::with_capacity(episode.seeds.len());
        for s in &episode.seeds {
            match self.encode_span(&s.doc_id, &s.span) {
                Ok(e) => seeds.push(e),
                Err(Error::UnencodableSeed(msg)) => warn!("skipping seed: {msg}"),
                Err(e) => return Err(e),
            }
        }
        if seeds.is_empty() {
            return Err(Error::UnencodableSeed(format!(
                "none of the {} seeds for {:?} could be encoded",
                episode.seeds.len(),
                episode.clause_label
            )));
        }
        let pooling = self.config.scorer.pooling;
        self.docs[target]
            .candidates
            .par_iter()
            .map(|c| {
                let score = match self.encode_raw(target, &SpanSet::single(c.interval))?.and_then(|e| self.finish(e)) {
                    None => f64::NEG_INFINITY,
                    Some(enc) => {
                        let per_seed = seeds.iter().map(|s| self.similarity(s, &enc)).collect::<Result<Vec<_>>>()?;
                        pool_over_seeds(&per_seed, pooling)?
                    }
                };
                Ok(ScoredCandidate { candidate: *c, score })
            })
            .collect()
    }

    /// Answer span for one episode.
    pub fn run_episode(&self, episode: &QueryEpisode) -> Result<SpanSet> {
        let scored = self.score_candidates(episode)?;
        if scored.is_empty() {
            warn!("target document {:?} has no candidate segments", episode.target_doc_id);
            return Ok(SpanSet::empty());
        }
        let best = top1(&scored).ok_or_else(|| {
            Error::Invalid(format!(
                "no candidate of target document {:?} could be encoded",
                episode.target_doc_id
            ))
        })?;
        Ok(match self.config.chooser.kind {
            ChooserKind::Top1 => SpanSet::single(best.candidate.interval),
            ChooserKind::Threshold => {
                let theta = self.config.chooser.threshold.expect("validated threshold");
                let picked: Vec<_> = scored.iter().filter(|s| s.score >= theta).map(|s| s.candidate.interval).collect();
                if picked.is_empty() {
                    SpanSet::single(best.candidate.interval)
                } else {
                    SpanSet::new(picked)
                }
            }
        })
    }

    /// Answers for every episode, in input order. The first failing line
    /// aborts the run.
    pub fn run_file(&self, episodes: &[QueryEpisode]) -> Result<Vec<AnswerLine>> {
        let results: Vec<Result<SpanSet>> = episodes.par_iter().map(|ep| self.run_episode(ep)).collect();
        episodes
            .iter()
            .zip(results)
            .map(|(ep, r)| {
                r.map(|span| AnswerLine {
                    line_no: ep.line_no,
                    clause: ep.clause_label.clone(),
                    span,
                })
                .map_err(|e| Error::Line {
                    line: ep.line_no,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

/// Highest finite score; ties go to the earlier candidate, which starts
/// earlier or, at the same start, is shorter.
fn top1(scored: &[ScoredCandidate]) -> Option<&ScoredCandidate> {
    let mut best: Option<&ScoredCandidate> = None;
    for s in scored {
        if s.score == f64::NEG_INFINITY || s.score.is_nan() {
            continue;
        }
        if best.is_none_or(|b| s.score > b.score) {
            best = Some(s);
        }
    }
    best
}

fn stack_dense<T: Real>(vectors: &[Embedding<T>]) -> Result<Array2<T>> {
    let dim = vectors.first().map(Embedding::dim).unwrap_or(0);
    let mut m = Array2::zeros((vectors.len(), dim));
    for (i, v) in vectors.iter().enumerate() {
        match v {
            Embedding::Dense(d) => m.row_mut(i).assign(d),
            Embedding::Sparse(s) => {
                for (j, x) in s.iter() {
                    m[[i, j]] = x;
                }
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Interval, Seed};

    fn corpus() -> Corpus {
        Corpus::from_documents([
            Document::new("a", "The lease is governed by the laws of Delaware. Rent is due monthly. Notices go by mail."),
            Document::new("b", "Payment is due on the first day. This agreement is governed by the laws of New York. Terms survive."),
            Document::new("c", "Nothing here matches at all. Still nothing relevant."),
            Document::new("d", ""),
        ])
        .unwrap()
    }

    fn tfidf(extra: &str) -> PipelineConfig {
        PipelineConfig::parse(&format!("vectorizer.kind = tfidf\nvectorizer.ngram_max = 2\n{extra}"), "t", None, &[]).unwrap()
    }

    fn episode(target: &str, seeds: &[(&str, Interval)]) -> QueryEpisode {
        QueryEpisode {
            line_no: 1,
            target_doc_id: target.into(),
            clause_label: "governing-law".into(),
            seeds: seeds
                .iter()
                .map(|(d, iv)| Seed {
                    doc_id: d.to_string(),
                    span: SpanSet::single(*iv),
                })
                .collect(),
        }
    }

    fn first_sentence_of(engine: &Engine<'_, f64>, doc: &str, n: usize) -> Interval {
        engine.candidates(doc).unwrap()[n].interval
    }

    #[test]
    fn retrieves_analogous_sentence() {
        let c = corpus();
        let e = Engine::<f64>::fit(tfidf(""), &c, &Resources::default()).unwrap();
        let seed = first_sentence_of(&e, "a", 0);
        let ans = e.run_episode(&episode("b", &[("a", seed)])).unwrap();
        assert_eq!(ans.items(), &[first_sentence_of(&e, "b", 1)]);
    }

    #[test]
    fn duplicate_seeds_do_not_change_answer() {
        let c = corpus();
        let e = Engine::<f64>::fit(tfidf(""), &c, &Resources::default()).unwrap();
        let seed = first_sentence_of(&e, "a", 0);
        let one = e.run_episode(&episode("b", &[("a", seed)])).unwrap();
        let two = e.run_episode(&episode("b", &[("a", seed), ("a", seed)])).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn candidate_span_encodes_like_candidate() {
        let c = corpus();
        let e = Engine::<f64>::fit(tfidf(""), &c, &Resources::default()).unwrap();
        let cand = e.candidates("b").unwrap()[1];
        let s = e.encode_span("b", &SpanSet::single(cand.interval)).unwrap();
        let scored = e.score_candidates(&episode("b", &[("b", cand.interval)])).unwrap();
        assert!((scored[1].score - 1.0).abs() < 1e-12);
        assert!(matches!(s, Encoding::Vector(Embedding::Sparse(_))));
    }

    #[test]
    fn empty_target_and_unencodable_seed() {
        let c = corpus();
        let e = Engine::<f64>::fit(tfidf(""), &c, &Resources::default()).unwrap();
        let seed = first_sentence_of(&e, "a", 0);
        assert!(e.run_episode(&episode("d", &[("a", seed)])).unwrap().is_empty());
        // a span of punctuation only
        let dot = Interval::new(45, 46);
        assert!(matches!(e.run_episode(&episode("b", &[("a", dot)])), Err(Error::UnencodableSeed(_))));
        assert!(e.encode_span("a", &SpanSet::empty()).is_err());
    }

    #[test]
    fn threshold_chooser_falls_back_to_top1() {
        let c = corpus();
        let e = Engine::<f64>::fit(tfidf("chooser.kind = threshold\nchooser.threshold = 2.0\n"), &c, &Resources::default()).unwrap();
        let seed = first_sentence_of(&e, "a", 0);
        let ans = e.run_episode(&episode("b", &[("a", seed)])).unwrap();
        assert_eq!(ans.len(), 1);
        let e = Engine::<f64>::fit(tfidf("chooser.kind = threshold\nchooser.threshold = -1.0\n"), &c, &Resources::default()).unwrap();
        let ans = e.run_episode(&episode("b", &[("a", seed)])).unwrap();
        // all three sentences merge into one covering span with gaps kept
        assert_eq!(ans.len(), 3);
    }

    #[test]
    fn ties_prefer_earliest_then_shortest() {
        let mk = |s: usize, e: usize, score: f64| ScoredCandidate {
            candidate: CandidateSegment {
                interval: Interval::new(s, e),
                first: 0,
                last: 0,
            },
            score,
        };
        let scored = [mk(0, 5, f64::NEG_INFINITY), mk(6, 10, 0.5), mk(6, 20, 0.5), mk(11, 20, 0.5)];
        assert_eq!(top1(&scored).unwrap().candidate.interval, Interval::new(6, 10));
        assert!(top1(&scored[..1]).is_none());
    }

    #[test]
    fn run_file_preserves_order_and_tags_failures() {
        let c = corpus();
        let e = Engine::<f64>::fit(tfidf(""), &c, &Resources::default()).unwrap();
        let seed = first_sentence_of(&e, "a", 0);
        let mut eps = vec![episode("b", &[("a", seed)]), episode("c", &[("a", seed)]), episode("d", &[("a", seed)])];
        for (i, ep) in eps.iter_mut().enumerate() {
            ep.line_no = i + 1;
        }
        let out = e.run_file(&eps).unwrap();
        assert_eq!(out.iter().map(|l| l.line_no).collect::<Vec<_>>(), vec![1, 2, 3]);
        eps[1].target_doc_id = "zzz".into();
        let err = e.run_file(&eps).unwrap_err().to_string();
        assert!(err.starts_with("input line 2"), "{err}");
    }
}
