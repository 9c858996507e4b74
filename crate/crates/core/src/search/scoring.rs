use std::cmp::Ordering;
use std::collections::HashMap;

use super::{Query, SearchIndex, WeightVector};
use crate::error::{Error, Result};
use crate::extraction::Field;
use crate::num::Real;
use crate::tsv;

/// Documents kept per field by [`compute_score_parts`].
pub const DEFAULT_RETAIN: usize = 1000;

/// Query terms of a field that occur in the corpus, with value and idf.
fn live_terms<'q, T: Real>(query: &'q Query<T>, index: &SearchIndex<T>, field: Field) -> Vec<(&'q str, T, T)> {
    query
        .terms(field)
        .iter()
        .filter_map(|(t, v)| index.idf(field, t).map(|idf| (t.as_str(), *v, idf)))
        .collect()
}

fn denominator<T: Real>(live: &[(&str, T, T)]) -> T {
    live.iter().map(|(_, v, idf)| (*v * *idf).powi(2)).sum()
}

/// `coord * fieldNorm * sum(value * tf * idf^2)` for one document, by direct lookup.
fn field_numerator<T: Real>(live: &[(&str, T, T)], index: &SearchIndex<T>, field: Field, doc_id: &str, d: u32) -> T {
    if live.is_empty() {
        return T::zero();
    }
    let mut matched = 0;
    let mut sum = T::zero();
    for (term, value, idf) in live {
        let tf = index.tf(field, term, doc_id);
        if tf > T::zero() {
            matched += 1;
            sum = sum + *value * tf * *idf * *idf;
        }
    }
    let coord = T::from_count(matched) / T::from_count(live.len());
    coord * index.field_norm(field, d) * sum
}

/// `sum_f w_f * num_f / sqrt(sum_f w_f^2 * den_f)`; zero when the denominator vanishes.
pub fn combine_parts<T: Real>(numerators: [T; 5], denominators: [T; 5], weights: &WeightVector<T>) -> T {
    let mut num = T::zero();
    let mut den = T::zero();
    for f in Field::ALL {
        let w = weights.get(f);
        num = num + w * numerators[f.index()];
        den = den + w * w * denominators[f.index()];
    }
    if den > T::zero() {
        num / den.sqrt()
    } else {
        T::zero()
    }
}

/// Practical scoring function of one document against a query.
pub fn score<T: Real>(query: &Query<T>, doc_id: &str, weights: &WeightVector<T>, index: &SearchIndex<T>) -> Result<T> {
    let d = index
        .doc_index(doc_id)
        .ok_or_else(|| Error::UnknownDoc(doc_id.to_string()))?;
    let mut numerators = [T::zero(); 5];
    let mut denominators = [T::zero(); 5];
    for f in Field::ALL {
        let live = live_terms(query, index, f);
        numerators[f.index()] = field_numerator(&live, index, f, doc_id, d);
        denominators[f.index()] = denominator(&live);
    }
    Ok(combine_parts(numerators, denominators, weights))
}

/// Retained numerators of one field, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldParts<T> {
    pub retained: Vec<(String, T)>,
    pub denominator: T,
    /// Whether the corpus held more documents than were retained.
    pub truncated: bool,
}

impl<T: Real> FieldParts<T> {
    /// Smallest retained numerator; stands in for documents outside the list.
    pub fn fill(&self) -> T {
        self.retained.last().map_or(T::zero(), |(_, n)| *n)
    }
}

/// Weight-independent pieces of every score for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreParts<T> {
    pub measure_id: String,
    pub fields: [FieldParts<T>; 5],
}

impl<T: Real> ScoreParts<T> {
    pub fn field(&self, field: Field) -> &FieldParts<T> {
        &self.fields[field.index()]
    }

    pub fn denominators(&self) -> [T; 5] {
        Field::ALL.map(|f| self.field(f).denominator)
    }

    pub fn numerator(&self, doc_id: &str, field: Field) -> Option<T> {
        self.field(field)
            .retained
            .iter()
            .find(|(d, _)| d == doc_id)
            .map(|(_, n)| *n)
    }

    /// Documents retained in at least one field, sorted by id, with all five
    /// numerators (missing ones replaced by the field fill value).
    pub fn filled_table(&self) -> Vec<(String, [T; 5])> {
        let fills = Field::ALL.map(|f| self.field(f).fill());
        let mut rows: HashMap<&str, [T; 5]> = HashMap::new();
        for f in Field::ALL {
            for (doc, n) in &self.field(f).retained {
                rows.entry(doc.as_str()).or_insert(fills)[f.index()] = *n;
            }
        }
        let mut table: Vec<(String, [T; 5])> = rows.into_iter().map(|(d, r)| (d.to_string(), r)).collect();
        table.sort_by(|a, b| a.0.cmp(&b.0));
        table
    }
}

/// Descending by value, then ascending by id.
fn rank_order<T: Real>(a: &(String, T), b: &(String, T)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

/// Per-field numerators and denominators, keeping the top
/// [`DEFAULT_RETAIN`] documents per field.
pub fn compute_score_parts<T: Real>(query: &Query<T>, index: &SearchIndex<T>) -> ScoreParts<T> {
    compute_score_parts_with(query, index, DEFAULT_RETAIN)
}

/// As [`compute_score_parts`] with an explicit per-field cap (at least 1).
pub fn compute_score_parts_with<T: Real>(query: &Query<T>, index: &SearchIndex<T>, retain: usize) -> ScoreParts<T> {
    let retain = retain.max(1);
    let fields = Field::ALL.map(|f| {
        let live = live_terms(query, index, f);
        // walk postings: matched-term count and weighted sum per document
        let mut acc: HashMap<u32, (usize, T)> = HashMap::new();
        for (term, value, idf) in &live {
            for (d, tf) in index.postings(f, term) {
                let e = acc.entry(*d).or_insert((0, T::zero()));
                e.0 += 1;
                e.1 = e.1 + *value * *tf * *idf * *idf;
            }
        }
        let n_live = T::from_count(live.len());
        let mut scored: Vec<(String, T)> = acc
            .into_iter()
            .map(|(d, (matched, sum))| {
                let coord = T::from_count(matched) / n_live;
                (index.doc_id(d).to_string(), coord * index.field_norm(f, d) * sum)
            })
            .collect();
        if scored.len() < retain {
            let touched: std::collections::HashSet<String> = scored.iter().map(|(d, _)| d.clone()).collect();
            scored.extend(
                index
                    .doc_ids()
                    .iter()
                    .filter(|d| !touched.contains(*d))
                    .map(|d| (d.clone(), T::zero())),
            );
        }
        scored.sort_by(rank_order);
        let truncated = index.n_docs() > retain;
        scored.truncate(retain);
        FieldParts {
            retained: scored,
            denominator: denominator(&live),
            truncated,
        }
    });
    ScoreParts {
        measure_id: query.measure_id.clone(),
        fields,
    }
}

/// A ranked document.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranked<T> {
    pub doc_id: String,
    pub score: T,
}

/// Scores every retained document under `weights`, best first, ties by id.
pub fn recombine<T: Real>(parts: &ScoreParts<T>, weights: &WeightVector<T>) -> Vec<Ranked<T>> {
    let dens = parts.denominators();
    let mut scored: Vec<(String, T)> = parts
        .filled_table()
        .into_iter()
        .map(|(doc, nums)| (doc, combine_parts(nums, dens, weights)))
        .collect();
    scored.sort_by(rank_order);
    scored
        .into_iter()
        .map(|(doc_id, score)| Ranked { doc_id, score })
        .collect()
}

/// The `k` best documents for a query.
pub fn scan<T: Real>(
    query: &Query<T>,
    weights: &WeightVector<T>,
    k: usize,
    index: &SearchIndex<T>,
) -> Result<Vec<Ranked<T>>> {
    if index.is_empty() {
        return Err(Error::MissingIndex("index has no documents".into()));
    }
    if k == 0 {
        return Err(Error::InvalidQuery("k must be at least 1".into()));
    }
    let mut ranked = recombine(&compute_score_parts(query, index), weights);
    ranked.truncate(k);
    Ok(ranked)
}

pub const RANKING_HEADER: &str = "rank\tdoc_id\tscore";

pub fn ranking_to_tsv<T: Real>(ranked: &[Ranked<T>]) -> String {
    let mut out = String::from(RANKING_HEADER);
    out.push('\n');
    for (i, r) in ranked.iter().enumerate() {
        out.push_str(&format!("{}\t{}\t{}\n", i + 1, tsv::escape(&r.doc_id), r.score));
    }
    out
}

pub fn parse_ranking<T: Real>(text: &str, origin: &str) -> Result<Vec<Ranked<T>>> {
    let mut out = Vec::new();
    for (line_no, line) in tsv::data_lines(text) {
        if line == RANKING_HEADER {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let [_, doc, score] = cells.as_slice() else {
            return Err(Error::parse(origin, line_no, "expected rank, doc_id, score"));
        };
        let score = score
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad score `{score}`")))?;
        out.push(Ranked {
            doc_id: tsv::unescape(doc),
            score,
        });
    }
    Ok(out)
}
