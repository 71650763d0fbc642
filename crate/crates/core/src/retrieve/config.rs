//! Pipeline configuration.
//!
//! The file format is one `section.key = value` assignment per line. Blank
//! lines and lines starting with `#` are ignored. Unknown keys are errors.
//! Relative paths resolve against the directory of the configuration file.
//!
//! | key | values | default |
//! |-----|--------|---------|
//! | `segmenter.max_ngram` | integer ≥ 1 | 1 |
//! | `segmenter.abbreviations` | path | packaged list |
//! | `vectorizer.kind` | `tfidf`, `static`, `contextual` | required |
//! | `vectorizer.ngram_min`, `vectorizer.ngram_max` | integers | 1, 1 |
//! | `vectorizer.binary_tf` | bool | false |
//! | `vectorizer.lexicon` | word-vector text file | required for `static` |
//! | `vectorizer.sidecar` | sidecar manifest | required for `contextual` |
//! | `projector.kind` | `none`, `tsvd`, `fica` | none |
//! | `projector.rank` | integer ≥ 1 | required with a projector |
//! | `projector.tol`, `projector.max_iter` | fICA stopping rule | 1e-4, 200 |
//! | `projector.seed` | integer | 0 |
//! | `aggregator.kind` | `none`, `mean`, `max`, `sif`, `dct` | none for tfidf or wmd, else mean |
//! | `aggregator.sif_a` | positive float | 1e-3 |
//! | `aggregator.frequencies` | `token<TAB>count` file | reference corpus |
//! | `aggregator.remove_common_component` | bool | false |
//! | `aggregator.dct_k` | integer ≥ 0 | 0 |
//! | `scorer.kind` | `cosine`, `wmd` | cosine |
//! | `scorer.pooling` | `mean`, `max` | mean |
//! | `scorer.wmd` | `exact`, `relaxed` | exact |
//! | `chooser.kind` | `top1`, `threshold` | top1 |
//! | `chooser.threshold` | float | required for `threshold` |

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::score::SeedPoolingPolicy;
use crate::transform::DEFAULT_SIF_A;

const KEYS: &[&str] = &[
    "segmenter.max_ngram",
    "segmenter.abbreviations",
    "vectorizer.kind",
    "vectorizer.ngram_min",
    "vectorizer.ngram_max",
    "vectorizer.binary_tf",
    "vectorizer.lexicon",
    "vectorizer.sidecar",
    "projector.kind",
    "projector.rank",
    "projector.tol",
    "projector.max_iter",
    "projector.seed",
    "aggregator.kind",
    "aggregator.sif_a",
    "aggregator.frequencies",
    "aggregator.remove_common_component",
    "aggregator.dct_k",
    "scorer.kind",
    "scorer.pooling",
    "scorer.wmd",
    "chooser.kind",
    "chooser.threshold",
];

const PRESETS: &[(&str, &str)] = &[
    ("tfidf-lsa", include_str!("../../presets/tfidf-lsa.conf")),
    ("glove-sif", include_str!("../../presets/glove-sif.conf")),
    ("glove-wmd", include_str!("../../presets/glove-wmd.conf")),
    ("contextual-mean", include_str!("../../presets/contextual-mean.conf")),
    ("contextual-fica-3gram", include_str!("../../presets/contextual-fica-3gram.conf")),
    ("dct", include_str!("../../presets/dct.conf")),
];

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $($name::$variant => $text),+
                })
            }
        }
    };
}

keyword_enum!(VectorizerKind { Tfidf => "tfidf", Static => "static", Contextual => "contextual" });
keyword_enum!(ProjectorKind { None => "none", Tsvd => "tsvd", Fica => "fica" });
keyword_enum!(AggregatorKind { None => "none", Mean => "mean", Max => "max", Sif => "sif", Dct => "dct" });
keyword_enum!(ScorerKind { Cosine => "cosine", Wmd => "wmd" });
keyword_enum!(WmdMode { Exact => "exact", Relaxed => "relaxed" });
keyword_enum!(ChooserKind { Top1 => "top1", Threshold => "threshold" });

#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterConfig {
    pub max_ngram: usize,
    pub abbreviations: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorizerConfig {
    pub kind: VectorizerKind,
    pub ngram_range: (usize, usize),
    pub binary_tf: bool,
    pub lexicon: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorConfig {
    pub kind: ProjectorKind,
    pub rank: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatorConfig {
    pub kind: AggregatorKind,
    pub sif_a: f64,
    pub frequencies: Option<PathBuf>,
    pub remove_common_component: bool,
    pub dct_k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    pub pooling: SeedPoolingPolicy,
    pub wmd: WmdMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChooserConfig {
    pub kind: ChooserKind,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub segmenter: SegmenterConfig,
    pub vectorizer: VectorizerConfig,
    pub projector: ProjectorConfig,
    pub aggregator: AggregatorConfig,
    pub scorer: ScorerConfig,
    pub chooser: ChooserConfig,
}

struct Entry {
    value: String,
    origin: String,
    // override values are taken relative to the working directory
    from_override: bool,
}

struct Entries<'a> {
    map: BTreeMap<&'static str, Entry>,
    base: Option<&'a Path>,
}

impl Entries<'_> {
    fn take<V: FromStr>(&mut self, key: &str) -> Result<Option<V>>
    where
        V::Err: fmt::Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|err| {
                Error::Config(format!("{}: {key} = {:?}: {err}", e.origin, e.value))
            }),
        }
    }

    fn path(&mut self, key: &str) -> Option<PathBuf> {
        self.map.remove(key).map(|e| {
            let p = PathBuf::from(e.value);
            match self.base {
                Some(base) if p.is_relative() && !e.from_override => base.join(p),
                _ => p,
            }
        })
    }
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|k| **k == key).copied()
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err("expected true or false".into()),
    }
}

struct Flag(bool);

impl FromStr for Flag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_bool(s).map(Flag)
    }
}

impl PipelineConfig {
    /// Parses configuration text. `overrides` are applied after the file,
    /// in order, and use the same `section.key` names.
    pub fn parse(text: &str, source_name: &str, base: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut entries = Entries {
            map: BTreeMap::new(),
            base,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(source_name, i + 1, "expected `section.key = value`"));
            };
            let key = key.trim();
            let Some(key) = known_key(key) else {
                return Err(Error::parse(source_name, i + 1, format!("unknown key {key:?}")));
            };
            let entry = Entry {
                value: value.trim().to_string(),
                origin: format!("{source_name}:{}", i + 1),
                from_override: false,
            };
            if entries.map.insert(key, entry).is_some() {
                return Err(Error::parse(source_name, i + 1, format!("{key} set twice")));
            }
        }
        for (key, value) in overrides {
            let key = known_key(key).ok_or_else(|| Error::Config(format!("unknown override key {key:?}")))?;
            let entry = Entry {
                value: value.clone(),
                origin: format!("override {key}"),
                from_override: true,
            };
            entries.map.insert(key, entry);
        }
        let config = Self::build(&mut entries)?;
        config.validate()?;
        Ok(config)
    }

    fn build(e: &mut Entries<'_>) -> Result<Self> {
        let kind: VectorizerKind = e
            .take("vectorizer.kind")?
            .ok_or_else(|| Error::Config("vectorizer.kind is required".into()))?;
        let scorer_kind: ScorerKind = e.take("scorer.kind")?.unwrap_or(ScorerKind::Cosine);
        let default_aggregator = if kind == VectorizerKind::Tfidf || scorer_kind == ScorerKind::Wmd {
            AggregatorKind::None
        } else {
            AggregatorKind::Mean
        };
        let projector_kind: ProjectorKind = e.take("projector.kind")?.unwrap_or(ProjectorKind::None);
        let chooser_kind: ChooserKind = e.take("chooser.kind")?.unwrap_or(ChooserKind::Top1);
        let config = PipelineConfig {
            segmenter: SegmenterConfig {
                max_ngram: e.take("segmenter.max_ngram")?.unwrap_or(1),
                abbreviations: e.path("segmenter.abbreviations"),
            },
            vectorizer: VectorizerConfig {
                kind,
                ngram_range: (
                    e.take("vectorizer.ngram_min")?.unwrap_or(1),
                    e.take("vectorizer.ngram_max")?.unwrap_or(1),
                ),
                binary_tf: e.take::<Flag>("vectorizer.binary_tf")?.is_some_and(|f| f.0),
                lexicon: e.path("vectorizer.lexicon"),
                sidecar: e.path("vectorizer.sidecar"),
            },
            projector: ProjectorConfig {
                kind: projector_kind,
                rank: match e.take("projector.rank")? {
                    Some(r) => r,
                    None if projector_kind != ProjectorKind::None => {
                        return Err(Error::Config(format!("projector.rank is required for {projector_kind}")))
                    }
                    None => 0,
                },
                tol: e.take("projector.tol")?.unwrap_or(1e-4),
                max_iter: e.take("projector.max_iter")?.unwrap_or(200),
                seed: e.take("projector.seed")?.unwrap_or(0),
            },
            aggregator: AggregatorConfig {
                kind: e.take("aggregator.kind")?.unwrap_or(default_aggregator),
                sif_a: e.take("aggregator.sif_a")?.unwrap_or(DEFAULT_SIF_A),
                frequencies: e.path("aggregator.frequencies"),
                remove_common_component: e
                    .take::<Flag>("aggregator.remove_common_component")?
                    .is_some_and(|f| f.0),
                dct_k: e.take("aggregator.dct_k")?.unwrap_or(0),
            },
            scorer: ScorerConfig {
                kind: scorer_kind,
                pooling: e.take("scorer.pooling")?.unwrap_or_default(),
                wmd: e.take("scorer.wmd")?.unwrap_or(WmdMode::Exact),
            },
            chooser: ChooserConfig {
                kind: chooser_kind,
                threshold: e.take::<f64>("chooser.threshold")?,
            },
        };
        debug_assert!(e.map.is_empty(), "unconsumed keys {:?}", e.map.keys());
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string(), path.parent(), overrides)
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(n, _)| *n)
    }

    pub fn preset_text(name: &str) -> Option<&'static str> {
        PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }

    /// A packaged preset. Presets name no data files; supply them through
    /// `overrides`.
    pub fn preset(name: &str, overrides: &[(String, String)]) -> Result<Self> {
        let text = Self::preset_text(name)
            .ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
        Self::parse(text, name, None, overrides)
    }

    /// Checks the cross-section constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let v = &self.vectorizer;
        let a = &self.aggregator;
        if self.segmenter.max_ngram == 0 {
            return bad("segmenter.max_ngram must be at least 1".into());
        }
        let (lo, hi) = v.ngram_range;
        if lo == 0 || lo > hi {
            return bad(format!("invalid n-gram range {lo}..{hi}"));
        }
        match v.kind {
            VectorizerKind::Static if v.lexicon.is_none() => {
                return bad("vectorizer.lexicon is required for static vectors".into())
            }
            VectorizerKind::Contextual if v.sidecar.is_none() => {
                return bad("vectorizer.sidecar is required for contextual vectors".into())
            }
            _ => {}
        }
        let token_level = v.kind != VectorizerKind::Tfidf;
        if !token_level {
            if a.kind != AggregatorKind::None {
                return bad(format!("tfidf vectors are segment-level; aggregator.kind must be none, not {}", a.kind));
            }
            if a.remove_common_component {
                return bad("common-component removal needs dense aggregated vectors, not tfidf".into());
            }
        }
        if self.scorer.kind == ScorerKind::Wmd {
            if !token_level {
                return bad("the wmd scorer needs token vectors (static or contextual), not tfidf".into());
            }
            if a.kind != AggregatorKind::None || self.projector.kind != ProjectorKind::None || a.remove_common_component {
                return bad("the wmd scorer works on raw token vectors; use aggregator none and projector none".into());
            }
        } else if token_level && a.kind == AggregatorKind::None {
            return bad(format!("{} vectors need an aggregator for cosine scoring", v.kind));
        }
        if a.frequencies.is_some() && a.kind != AggregatorKind::Sif {
            return bad("aggregator.frequencies only applies to the sif aggregator".into());
        }
        if !(a.sif_a > 0.0 && a.sif_a.is_finite()) {
            return bad(format!("aggregator.sif_a must be positive, got {}", a.sif_a));
        }
        if self.projector.kind != ProjectorKind::None && self.projector.rank == 0 {
            return bad("projector.rank must be at least 1".into());
        }
        match self.chooser.threshold {
            None if self.chooser.kind == ChooserKind::Threshold => {
                return bad("chooser.threshold is required for the threshold chooser".into());
            }
            Some(t) if !t.is_finite() => return bad("chooser.threshold must be a finite number".into()),
            _ => {}
        }
        Ok(())
    }

    /// Every key with its effective value, one per line, in a fixed order.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: &dyn fmt::Display| writeln!(out, "{k} = {v}").unwrap();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        put("segmenter.max_ngram", &self.segmenter.max_ngram);
        if let Some(p) = path(&self.segmenter.abbreviations) {
            put("segmenter.abbreviations", &p);
        }
        put("vectorizer.kind", &self.vectorizer.kind);
        put("vectorizer.ngram_min", &self.vectorizer.ngram_range.0);
        put("vectorizer.ngram_max", &self.vectorizer.ngram_range.1);
        put("vectorizer.binary_tf", &self.vectorizer.binary_tf);
        if let Some(p) = path(&self.vectorizer.lexicon) {
            put("vectorizer.lexicon", &p);
        }
        if let Some(p) = path(&self.vectorizer.sidecar) {
            put("vectorizer.sidecar", &p);
        }
        put("projector.kind", &self.projector.kind);
        put("projector.rank", &self.projector.rank);
        put("projector.tol", &self.projector.tol);
        put("projector.max_iter", &self.projector.max_iter);
        put("projector.seed", &self.projector.seed);
        put("aggregator.kind", &self.aggregator.kind);
        put("aggregator.sif_a", &self.aggregator.sif_a);
        if let Some(p) = path(&self.aggregator.frequencies) {
            put("aggregator.frequencies", &p);
        }
        put("aggregator.remove_common_component", &self.aggregator.remove_common_component);
        put("aggregator.dct_k", &self.aggregator.dct_k);
        put("scorer.kind", &self.scorer.kind);
        put("scorer.pooling", &self.scorer.pooling);
        put("scorer.wmd", &self.scorer.wmd);
        put("chooser.kind", &self.chooser.kind);
        if let Some(t) = &self.chooser.threshold {
            put("chooser.threshold", t);
        }
        out
    }
}

/// Splits `section.key=value` into its parts.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {s:?} is not key=value")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
