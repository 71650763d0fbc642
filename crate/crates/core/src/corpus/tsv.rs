//! Readers and writers for the shared-task TSV files.
//!
//! * `reference.tsv`: `doc_id \t content`
//! * `in.tsv`: `target_id \t clause \t example_1 \t ... \t example_N`, where an
//!   example is `doc_id SPACE spanfield`
//! * `expected.tsv` / `out.tsv`: `clause \t spanfield`, one line per `in.tsv`
//!   line. An empty span field means "no answer".
//! * annotations: `doc_id \t clause \t spanfield`, one line per clause instance
//!
//! All files are UTF-8 with LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::document::{Corpus, Document};
use super::span::{RangeConvention, SpanSet};
use crate::error::{Error, Result};

/// One example clause in a seed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub doc_id: String,
    pub span: SpanSet,
}

/// One retrieval problem: find the `clause_label` span in `target_doc_id`
/// given the seed examples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEpisode {
    /// 1-based line in the source file, 0 for generated episodes.
    pub line_no: usize,
    pub target_doc_id: String,
    pub clause_label: String,
    pub seeds: Vec<Seed>,
}

/// A line of `expected.tsv` or `out.tsv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerLine {
    pub line_no: usize,
    pub clause: String,
    pub span: SpanSet,
}

/// One annotated clause instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseAnnotation {
    pub doc_id: String,
    pub clause_label: String,
    pub span: SpanSet,
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Splits on LF, numbering lines from 1; a single trailing LF does not
/// produce an extra empty line.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let empty = text.is_empty();
    body.split('\n')
        .enumerate()
        .filter(move |_| !empty)
        .map(|(i, l)| (i + 1, l))
}

pub fn read_reference(text: &str, source_name: &str) -> Result<Corpus> {
    let mut corpus = Corpus::new();
    for (line_no, line) in numbered_lines(text) {
        let (id, content) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source_name, line_no, "expected doc_id<TAB>content"))?;
        if id.is_empty() {
            return Err(Error::parse(source_name, line_no, "empty document id"));
        }
        corpus
            .push(Document::new(id, content))
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
    }
    Ok(corpus)
}

pub fn load_reference_tsv(path: &Path) -> Result<Corpus> {
    read_reference(&read_file(path)?, &path.display().to_string())
}

fn check_span(
    corpus: Option<&Corpus>,
    doc_id: &str,
    span: &SpanSet,
    source_name: &str,
    line_no: usize,
) -> Result<()> {
    let Some(corpus) = corpus else {
        return Ok(());
    };
    let doc = corpus.get(doc_id).ok_or_else(|| {
        Error::parse(source_name, line_no, format!("unknown document id {doc_id:?}"))
    })?;
    if let Some(last) = span.items().last() {
        if last.end > doc.char_len() {
            return Err(Error::parse(
                source_name,
                line_no,
                format!(
                    "range ends at {} but document {doc_id:?} has {} characters",
                    last.end,
                    doc.char_len()
                ),
            ));
        }
    }
    Ok(())
}

/// Parses `in.tsv`. When `corpus` is given, every referenced document must
/// exist and every range must fit inside it.
pub fn read_in(
    text: &str,
    source_name: &str,
    convention: RangeConvention,
    corpus: Option<&Corpus>,
) -> Result<Vec<QueryEpisode>> {
    let mut episodes = Vec::new();
    for (line_no, line) in numbered_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected at least 3 fields, found {}", fields.len()),
            ));
        }
        let target = fields[0];
        if target.is_empty() {
            return Err(Error::parse(source_name, line_no, "empty target id"));
        }
        if let Some(corpus) = corpus {
            if corpus.get(target).is_none() {
                return Err(Error::parse(
                    source_name,
                    line_no,
                    format!("unknown document id {target:?}"),
                ));
            }
        }
        let mut seeds = Vec::with_capacity(fields.len() - 2);
        for example in &fields[2..] {
            let (doc_id, field) = example.split_once(' ').ok_or_else(|| {
                Error::parse(
                    source_name,
                    line_no,
                    format!("example {example:?} is not 'doc_id range'"),
                )
            })?;
            if doc_id == target {
                return Err(Error::parse(
                    source_name,
                    line_no,
                    format!("seed document {doc_id:?} is also the target"),
                ));
            }
            let span = SpanSet::parse(field, convention)
                .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
            check_span(corpus, doc_id, &span, source_name, line_no)?;
            seeds.push(Seed {
                doc_id: doc_id.to_string(),
                span,
            });
        }
        episodes.push(QueryEpisode {
            line_no,
            target_doc_id: target.to_string(),
            clause_label: fields[1].to_string(),
            seeds,
        });
    }
    Ok(episodes)
}

pub fn load_in_tsv(
    path: &Path,
    convention: RangeConvention,
    corpus: Option<&Corpus>,
) -> Result<Vec<QueryEpisode>> {
    read_in(
        &read_file(path)?,
        &path.display().to_string(),
        convention,
        corpus,
    )
}

/// Parses `expected.tsv` or `out.tsv`.
pub fn read_answers(
    text: &str,
    source_name: &str,
    convention: RangeConvention,
) -> Result<Vec<AnswerLine>> {
    let mut lines = Vec::new();
    for (line_no, line) in numbered_lines(text) {
        let (clause, field) = match line.split_once('\t') {
            Some((c, f)) => (c, f),
            None => (line, ""),
        };
        if field.contains('\t') {
            return Err(Error::parse(
                source_name,
                line_no,
                "expected clause<TAB>range with a single range field",
            ));
        }
        let span = if field.is_empty() {
            SpanSet::empty()
        } else {
            SpanSet::parse(field, convention)
                .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?
        };
        lines.push(AnswerLine {
            line_no,
            clause: clause.to_string(),
            span,
        });
    }
    Ok(lines)
}

pub fn load_expected_tsv(path: &Path, convention: RangeConvention) -> Result<Vec<AnswerLine>> {
    read_answers(&read_file(path)?, &path.display().to_string(), convention)
}

/// Renders answer lines; an empty span becomes an empty range field.
pub fn write_answers(lines: &[AnswerLine], convention: RangeConvention) -> Result<String> {
    let mut out = String::new();
    for line in lines {
        let field = if line.span.is_empty() {
            String::new()
        } else {
            line.span.format(convention)?
        };
        writeln!(out, "{}\t{}", line.clause, field).expect("write to String");
    }
    Ok(out)
}

/// Renders episodes as `in.tsv`.
pub fn write_in(episodes: &[QueryEpisode], convention: RangeConvention) -> Result<String> {
    let mut out = String::new();
    for ep in episodes {
        out.push_str(&ep.target_doc_id);
        out.push('\t');
        out.push_str(&ep.clause_label);
        for seed in &ep.seeds {
            write!(out, "\t{} {}", seed.doc_id, seed.span.format(convention)?)
                .expect("write to String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn read_annotations(
    text: &str,
    source_name: &str,
    convention: RangeConvention,
) -> Result<Vec<ClauseAnnotation>> {
    let mut anns = Vec::new();
    for (line_no, line) in numbered_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::parse(source_name, line_no, "empty doc id or clause"));
        }
        let span = SpanSet::parse(fields[2], convention)
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        anns.push(ClauseAnnotation {
            doc_id: fields[0].to_string(),
            clause_label: fields[1].to_string(),
            span,
        });
    }
    Ok(anns)
}

pub fn load_annotations(path: &Path, convention: RangeConvention) -> Result<Vec<ClauseAnnotation>> {
    read_annotations(&read_file(path)?, &path.display().to_string(), convention)
}

pub fn write_annotations(anns: &[ClauseAnnotation], convention: RangeConvention) -> Result<String> {
    let mut out = String::new();
    for a in anns {
        writeln!(
            out,
            "{}\t{}\t{}",
            a.doc_id,
            a.clause_label,
            a.span.format(convention)?
        )
        .expect("write to String");
    }
    Ok(out)
}
