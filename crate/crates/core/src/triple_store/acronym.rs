use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tsv;

/// Longest short form the table accepts.
pub const MAX_ACRONYM_LEN: usize = 5;

/// Short form -> long forms. File lines: `short<TAB>long`; a short form may
/// appear on several lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AcronymTable {
    long_forms: BTreeMap<String, Vec<String>>,
}

impl AcronymTable {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut table = AcronymTable::default();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [short, long] = cells.as_slice() else {
                return Err(Error::parse(origin, line_no, format!("expected 2 columns: `{line}`")));
            };
            table
                .insert(short, long)
                .map_err(|m| Error::parse(origin, line_no, m))?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, short: &str, long: &str) -> Result<(), String> {
        let n = short.chars().count();
        if n == 0 || n > MAX_ACRONYM_LEN {
            return Err(format!(
                "short form `{short}` must have 1 to {MAX_ACRONYM_LEN} characters"
            ));
        }
        if long.trim().is_empty() {
            return Err(format!("short form `{short}` has an empty long form"));
        }
        let forms = self.long_forms.entry(short.to_uppercase()).or_default();
        let long = long.trim().to_string();
        if !forms.contains(&long) {
            forms.push(long);
        }
        Ok(())
    }

    /// Long forms of `short`, case-insensitive. Empty for strings longer than
    /// the acronym limit.
    pub fn long_forms(&self, short: &str) -> &[String] {
        if short.chars().count() > MAX_ACRONYM_LEN {
            return &[];
        }
        self.long_forms
            .get(&short.to_uppercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Lowercase long form replacing `key`. With several long forms, the one
    /// among `present` (lowercase keys seen in the same document) wins; no
    /// winner or a tie means no replacement.
    pub fn resolve(&self, key: &str, present: &BTreeSet<String>) -> Option<String> {
        match self.long_forms(key) {
            [] => None,
            [only] => Some(only.to_lowercase()),
            several => {
                let mut hits = several.iter().map(|l| l.to_lowercase()).filter(|l| present.contains(l));
                match (hits.next(), hits.next()) {
                    (Some(hit), None) => Some(hit),
                    _ => None,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.long_forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.long_forms.is_empty()
    }
}
