use std::fmt::Write as _;

use super::hungarian::hungarian_max;
use crate::corpus::{AnswerLine, Interval};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftF1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SoftF1 {
    fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        SoftF1 { precision, recall, f1 }
    }
}

/// Character-level F1 with a one-to-one assignment of expected to returned
/// items maximizing the total overlap.
pub fn soft_f1(expected: &[Interval], returned: &[Interval]) -> SoftF1 {
    match (expected.is_empty(), returned.is_empty()) {
        (true, true) => return SoftF1::from_pr(1.0, 1.0),
        (true, false) | (false, true) => return SoftF1::from_pr(0.0, 0.0),
        _ => {}
    }
    let mut profit = Vec::with_capacity(expected.len() * returned.len());
    for e in expected {
        for r in returned {
            profit.push(e.overlap(r) as i64);
        }
    }
    let matched = hungarian_max(&profit, expected.len(), returned.len()).total as f64;
    let returned_len: usize = returned.iter().map(Interval::len).sum();
    let expected_len: usize = expected.iter().map(Interval::len).sum();
    let ratio = |total: usize| if total == 0 { 0.0 } else { matched / total as f64 };
    SoftF1::from_pr(ratio(returned_len), ratio(expected_len))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineMetric {
    pub line_no: usize,
    pub clause: String,
    pub score: SoftF1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub per_query: Vec<LineMetric>,
    pub macro_f1: f64,
}

impl MetricReport {
    /// Per-line TSV `line_no  clause  p  r  f1`.
    pub fn per_line_tsv(&self) -> String {
        let mut out = String::new();
        for m in &self.per_query {
            writeln!(
                out,
                "{}\t{}\t{:.6}\t{:.6}\t{:.6}",
                m.line_no, m.clause, m.score.precision, m.score.recall, m.score.f1
            )
            .unwrap();
        }
        out
    }

    pub fn summary_line(&self) -> String {
        format!("macro-soft-f1\t{:.6}", self.macro_f1)
    }

    /// Human-readable per-clause summary.
    pub fn table(&self) -> String {
        let mut groups: std::collections::BTreeMap<&str, (usize, f64, f64, f64)> = Default::default();
        for m in &self.per_query {
            let g = groups.entry(&m.clause).or_default();
            g.0 += 1;
            g.1 += m.score.precision;
            g.2 += m.score.recall;
            g.3 += m.score.f1;
        }
        let width = groups.keys().map(|k| k.chars().count()).max().unwrap_or(0).max(6);
        let mut out = format!("{:width$}  {:>5}  {:>9}  {:>6}  {:>6}\n", "clause", "lines", "precision", "recall", "f1");
        for (clause, (n, p, r, f)) in &groups {
            let k = *n as f64;
            writeln!(out, "{clause:width$}  {n:>5}  {:>9.4}  {:>6.4}  {:>6.4}", p / k, r / k, f / k).unwrap();
        }
        writeln!(out, "{:width$}  {:>5}  {:>9}  {:>6}  {:>6.4}", "all", self.per_query.len(), "", "", self.macro_f1).unwrap();
        out
    }
}

/// Scores `returned` against `expected` line by line and macro-averages.
pub fn evaluate(expected: &[AnswerLine], returned: &[AnswerLine]) -> Result<MetricReport> {
    if expected.len() != returned.len() {
        let first = expected.len().min(returned.len()) + 1;
        return Err(Error::Invalid(format!(
            "expected has {} lines but output has {}; first unmatched line {first}",
            expected.len(),
            returned.len()
        )));
    }
    let mut per_query = Vec::with_capacity(expected.len());
    for (i, (e, r)) in expected.iter().zip(returned).enumerate() {
        if e.clause != r.clause {
            return Err(Error::Invalid(format!(
                "line {}: expected clause {:?} but output has {:?}",
                i + 1,
                e.clause,
                r.clause
            )));
        }
        per_query.push(LineMetric {
            line_no: i + 1,
            clause: e.clause.clone(),
            score: soft_f1(e.span.items(), r.span.items()),
        });
    }
    let macro_f1 = if per_query.is_empty() {
        0.0
    } else {
        per_query.iter().map(|m| m.score.f1).sum::<f64>() / per_query.len() as f64
    };
    Ok(MetricReport { per_query, macro_f1 })
}
