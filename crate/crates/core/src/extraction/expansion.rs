use std::collections::{BTreeMap, HashMap, HashSet};

use super::lexicon::ConceptMention;
use crate::error::{Error, Result};
use crate::tsv;

/// `alias -> [(related alias, similarity weight)]`, weights in (0, 1].
///
/// File lines: `alias<TAB>related<TAB>weight`. Lookups are case-insensitive.
#[derive(Debug, Clone, Default)]
pub struct ExpansionTable {
    related: HashMap<String, Vec<(String, f64)>>,
}

impl ExpansionTable {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut table = ExpansionTable::default();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [alias, related, weight] = cells.as_slice() else {
                return Err(Error::parse(origin, line_no, format!("expected 3 columns: `{line}`")));
            };
            let weight: f64 = weight
                .parse()
                .map_err(|_| Error::parse(origin, line_no, format!("bad weight `{weight}`")))?;
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(Error::parse(origin, line_no, format!("weight {weight} outside (0, 1]")));
            }
            table.insert(alias, related, weight);
        }
        Ok(table)
    }

    pub fn insert(&mut self, alias: &str, related: &str, weight: f64) {
        self.related
            .entry(alias.to_lowercase())
            .or_default()
            .push((related.to_lowercase(), weight));
    }

    pub fn related(&self, alias: &str) -> &[(String, f64)] {
        self.related
            .get(&alias.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// One weighted expansion occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub alias: String,
    pub weight: f64,
}

/// Related concepts for every concept mention.
///
/// Each occurrence keeps its own weight (never above 1); repeated expansions
/// of the same alias accumulate additively through [`accumulate`]. Aliases
/// that are themselves mentioned in the text are not repeated as expansions.
pub fn expand_concepts(mentions: &[ConceptMention], table: &ExpansionTable) -> Vec<Expansion> {
    let present: HashSet<String> = mentions
        .iter()
        .filter(|m| m.category.is_concept())
        .map(|m| m.alias.to_lowercase())
        .collect();
    mentions
        .iter()
        .filter(|m| m.category.is_concept())
        .flat_map(|m| table.related(&m.alias))
        .filter(|(related, _)| !present.contains(related))
        .map(|(alias, weight)| Expansion {
            alias: alias.clone(),
            weight: *weight,
        })
        .collect()
}

/// Total weight per expanded alias.
pub fn accumulate(expansions: &[Expansion]) -> BTreeMap<String, f64> {
    let mut totals = BTreeMap::new();
    for e in expansions {
        *totals.entry(e.alias.clone()).or_insert(0.0) += e.weight;
    }
    totals
}
