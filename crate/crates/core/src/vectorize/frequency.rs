use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Token counts for relative-frequency lookups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn build<S: AsRef<str>>(token_lists: &[Vec<S>]) -> Result<Self> {
        let mut table = FrequencyTable::default();
        for list in token_lists {
            for t in list {
                table.add(t.as_ref(), 1);
            }
        }
        if table.total == 0 {
            return Err(Error::Invalid("frequency table needs at least one token".into()));
        }
        Ok(table)
    }

    /// Reads `token \t count` lines; repeated tokens accumulate.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut table = FrequencyTable::default();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (tok, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected token<TAB>count"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(source_name, i + 1, format!("bad count {count:?}")))?;
            table.add(&tok.to_lowercase(), count);
        }
        if table.total == 0 {
            return Err(Error::Invalid(format!("{source_name}: no token counts")));
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn add(&mut self, token: &str, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(token.to_string()).or_insert(0) += count;
        self.total += count;
    }

    pub fn merge(&mut self, other: &FrequencyTable) {
        for (t, &c) in &other.counts {
            self.add(t, c);
        }
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `count / total`; 0 for unseen tokens.
    pub fn relative(&self, token: &str) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(token) as f64 / self.total as f64
    }
}
