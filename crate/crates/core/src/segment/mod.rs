//! Rule-based sentence splitting and sentence n-gram candidates.
//!
//! A sentence ends at a run of `.`, `!` or `?` (optionally followed by
//! closing quotes or brackets) that is followed by whitespace or the end of
//! the text, and at blank lines. A period does not end a sentence when the
//! word it closes is a listed abbreviation or when it sits between two
//! digits. Pieces with fewer than two non-whitespace characters are merged
//! into the following sentence (or the preceding one at the end of the text).

use std::collections::HashSet;
use std::path::Path;

use crate::corpus::Interval;
use crate::error::{Error, Result};

const DEFAULT_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

const MIN_SENTENCE_CHARS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sentence {
    pub interval: Interval,
}

/// A contiguous run of sentences `first..=last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateSegment {
    pub interval: Interval,
    pub first: usize,
    pub last: usize,
}

impl CandidateSegment {
    pub fn sentence_count(&self) -> usize {
        self.last - self.first + 1
    }
}

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::from_list(DEFAULT_ABBREVIATIONS)
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '”' | '’' | '»')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '“' | '‘' | '«')
}

impl Segmenter {
    /// Builds a segmenter from a newline-separated abbreviation list. Entries
    /// are matched case-insensitively and include their final period.
    pub fn from_list(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        Segmenter { abbreviations }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Segmenter::from_list(&text))
    }

    pub fn is_abbreviation(&self, token: &str) -> bool {
        self.abbreviations.contains(&token.to_lowercase())
    }

    /// Splits `text` into sentences with character offsets into `text`.
    pub fn split_sentences(&self, text: &str) -> Vec<Sentence> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let mut raw: Vec<Interval> = Vec::new();
        let mut start: Option<usize> = None;
        let mut last_non_ws = 0;
        let mut i = 0;
        while i < n {
            let c = chars[i];
            if c.is_whitespace() {
                if c == '\n' && start.is_some() && self.blank_line_at(&chars, i) {
                    raw.push(Interval::new(start.take().unwrap(), last_non_ws + 1));
                }
                i += 1;
                continue;
            }
            if start.is_none() {
                start = Some(i);
            }
            last_non_ws = i;
            if is_terminator(c) {
                let mut j = i + 1;
                while j < n && is_terminator(chars[j]) {
                    j += 1;
                }
                while j < n && is_closer(chars[j]) {
                    j += 1;
                }
                let at_boundary = j == n || chars[j].is_whitespace();
                let single_period = c == '.' && (i + 1 == n || chars[i + 1] != '.');
                let blocked = single_period && self.period_blocked(&chars, i);
                if at_boundary && !blocked {
                    raw.push(Interval::new(start.take().unwrap(), j));
                }
                last_non_ws = j - 1;
                i = j;
                continue;
            }
            i += 1;
        }
        if let Some(s) = start {
            raw.push(Interval::new(s, last_non_ws + 1));
        }
        merge_fragments(&chars, raw)
            .into_iter()
            .map(|interval| Sentence { interval })
            .collect()
    }

    // `\n` followed by optional horizontal whitespace and another `\n`.
    fn blank_line_at(&self, chars: &[char], i: usize) -> bool {
        let mut j = i + 1;
        while j < chars.len() && chars[j].is_whitespace() {
            if chars[j] == '\n' {
                return true;
            }
            j += 1;
        }
        false
    }

    fn period_blocked(&self, chars: &[char], i: usize) -> bool {
        if i > 0
            && i + 1 < chars.len()
            && chars[i - 1].is_ascii_digit()
            && chars[i + 1].is_ascii_digit()
        {
            return true;
        }
        let mut s = i;
        while s > 0 && !chars[s - 1].is_whitespace() {
            s -= 1;
        }
        while s < i && is_opener(chars[s]) {
            s += 1;
        }
        let word: String = chars[s..=i].iter().collect();
        self.is_abbreviation(&word)
    }
}

fn merge_fragments(chars: &[char], raw: Vec<Interval>) -> Vec<Interval> {
    let weight = |iv: &Interval| {
        chars[iv.start..iv.end]
            .iter()
            .filter(|c| !c.is_whitespace())
            .count()
    };
    let mut out: Vec<Interval> = Vec::with_capacity(raw.len());
    let mut pending: Option<usize> = None;
    for iv in raw {
        let iv = match pending.take() {
            Some(s) => Interval::new(s, iv.end),
            None => iv,
        };
        if weight(&iv) < MIN_SENTENCE_CHARS {
            pending = Some(iv.start);
        } else {
            out.push(iv);
        }
    }
    if let Some(s) = pending {
        // trailing fragment: attach to the previous sentence if any
        let end = chars.len()
            - chars
                .iter()
                .rev()
                .take_while(|c| c.is_whitespace())
                .count();
        match out.last_mut() {
            Some(last) => last.end = end,
            None => out.push(Interval::new(s, end)),
        }
    }
    out
}

/// Splits with the packaged abbreviation list.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    Segmenter::default().split_sentences(text)
}

/// All contiguous runs of 1..=`max_ngram` sentences, ordered by first
/// sentence and then by length.
pub fn generate_candidates(sentences: &[Sentence], max_ngram: usize) -> Result<Vec<CandidateSegment>> {
    if max_ngram == 0 {
        return Err(Error::Config("segmenter.max_ngram must be at least 1".into()));
    }
    let mut out = Vec::new();
    for first in 0..sentences.len() {
        for last in first..sentences.len().min(first + max_ngram) {
            out.push(CandidateSegment {
                interval: Interval::new(sentences[first].interval.start, sentences[last].interval.end),
                first,
                last,
            });
        }
    }
    Ok(out)
}
