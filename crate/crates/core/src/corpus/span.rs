use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How the two integers of a `start-end` range are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeConvention {
    /// `start-end` covers both endpoints, so `1-4` is four characters.
    #[default]
    Inclusive,
    /// `start-end` excludes `end`, so `1-4` is three characters.
    HalfOpen,
}

impl FromStr for RangeConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inclusive" => Ok(RangeConvention::Inclusive),
            "half-open" => Ok(RangeConvention::HalfOpen),
            other => Err(Error::Config(format!(
                "unknown range convention {other:?} (expected inclusive or half-open)"
            ))),
        }
    }
}

impl fmt::Display for RangeConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RangeConvention::Inclusive => "inclusive",
            RangeConvention::HalfOpen => "half-open",
        })
    }
}

/// Half-open interval `[start, end)` of character (Unicode scalar value)
/// positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "interval start {start} exceeds end {end}");
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Number of characters shared with `other`.
    pub fn overlap(&self, other: &Interval) -> usize {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        end.saturating_sub(start)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.overlap(other) > 0
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Character overlap `|a ∩ b|`.
pub fn overlap_chars(a: &Interval, b: &Interval) -> usize {
    a.overlap(b)
}

/// A set of character intervals within one document, kept sorted by start
/// with no two intervals overlapping. Touching intervals stay separate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct SpanSet {
    items: Vec<Interval>,
}

impl SpanSet {
    /// Builds a normalized span set from raw intervals in any order.
    pub fn new(items: impl IntoIterator<Item = Interval>) -> Self {
        SpanSet {
            items: normalize(items.into_iter().collect()),
        }
    }

    pub fn empty() -> Self {
        SpanSet::default()
    }

    pub fn single(interval: Interval) -> Self {
        SpanSet::new([interval])
    }

    pub fn items(&self) -> &[Interval] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.items.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Sum of interval lengths.
    pub fn total_length(&self) -> usize {
        self.items.iter().map(Interval::len).sum()
    }

    /// Union with another span set.
    pub fn union(&self, other: &SpanSet) -> SpanSet {
        SpanSet::new(self.items.iter().chain(other.items.iter()).copied())
    }

    /// Parses `start-end(,start-end)*`.
    pub fn parse(field: &str, convention: RangeConvention) -> Result<Self> {
        if field.is_empty() {
            return Err(Error::Span("empty range field".into()));
        }
        let items = field
            .split(',')
            .map(|piece| parse_piece(piece, convention))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpanSet::new(items))
    }

    /// Formats as comma-joined `start-end` pieces with no spaces.
    pub fn format(&self, convention: RangeConvention) -> Result<String> {
        if self.items.is_empty() {
            return Err(Error::Span("cannot format an empty span set".into()));
        }
        let pieces: Vec<String> = self
            .items
            .iter()
            .map(|iv| match convention {
                RangeConvention::Inclusive => format!("{}-{}", iv.start, iv.end - 1),
                RangeConvention::HalfOpen => format!("{}-{}", iv.start, iv.end),
            })
            .collect();
        Ok(pieces.join(","))
    }
}

impl<'a> IntoIterator for &'a SpanSet {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Parses a span field. Free-function form of [`SpanSet::parse`].
pub fn parse_span_field(field: &str, convention: RangeConvention) -> Result<SpanSet> {
    SpanSet::parse(field, convention)
}

/// Formats a span field. Free-function form of [`SpanSet::format`].
pub fn format_span_field(span: &SpanSet, convention: RangeConvention) -> Result<String> {
    span.format(convention)
}

fn parse_piece(piece: &str, convention: RangeConvention) -> Result<Interval> {
    let bad = |why: &str| Error::Span(format!("{why} in range piece {piece:?}"));
    let (a, b) = piece.split_once('-').ok_or_else(|| bad("missing '-'"))?;
    let parse_num = |s: &str| -> Result<usize> {
        if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad("malformed integer"));
        }
        s.parse::<usize>().map_err(|_| bad("integer out of range"))
    };
    let start = parse_num(a)?;
    let end = parse_num(b)?;
    match convention {
        RangeConvention::Inclusive => {
            if start > end {
                return Err(bad("start exceeds end"));
            }
            Ok(Interval::new(start, end + 1))
        }
        RangeConvention::HalfOpen => {
            if start >= end {
                return Err(bad("empty or inverted range"));
            }
            Ok(Interval::new(start, end))
        }
    }
}

/// Sorts and merges strictly overlapping intervals; drops empty ones.
fn normalize(mut items: Vec<Interval>) -> Vec<Interval> {
    items.retain(|iv| !iv.is_empty());
    items.sort_unstable();
    let mut out: Vec<Interval> = Vec::with_capacity(items.len());
    for iv in items {
        match out.last_mut() {
            Some(last) if iv.start < last.end => last.end = last.end.max(iv.end),
            _ => out.push(iv),
        }
    }
    out
}
