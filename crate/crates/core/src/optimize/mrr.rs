use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tsv;

/// Cited documents per measure. File rows: `measure_id<TAB>doc_id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CitationGold {
    cited: BTreeMap<String, BTreeSet<String>>,
}

impl CitationGold {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut gold = CitationGold::default();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [measure, doc] = cells.as_slice() else {
                return Err(Error::parse(origin, line_no, "expected measure_id, doc_id"));
            };
            if (line_no == 1 && *measure == "measure_id") || measure.is_empty() || doc.is_empty() {
                continue;
            }
            gold.insert(measure, doc);
        }
        Ok(gold)
    }

    pub fn insert(&mut self, measure_id: &str, doc_id: &str) {
        self.cited
            .entry(measure_id.to_string())
            .or_default()
            .insert(doc_id.to_string());
    }

    /// Cited documents of a measure; empty if none.
    pub fn cited(&self, measure_id: &str) -> Option<&BTreeSet<String>> {
        self.cited.get(measure_id).filter(|s| !s.is_empty())
    }

    /// Measures with at least one citation.
    pub fn measures(&self) -> impl Iterator<Item = &str> {
        self.cited
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(m, _)| m.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.measures().next().is_none()
    }
}

/// Reciprocal-rank summary of one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MrrResult {
    pub measure_id: String,
    pub v: f64,
    /// Cited documents present in the ranking.
    pub m: usize,
    /// Total cited documents.
    pub total: usize,
    /// 1-based positions of the cited documents, ascending.
    pub ranks: Vec<usize>,
}

/// `(1/M) * sum_j 1 / (rank_j - j + 1)` over ascending 1-based ranks.
///
/// Subtracting `j - 1` forgives the cited documents ranked ahead, so a
/// ranking with all cited documents on top scores exactly 1.
pub fn mrr_from_ranks(ranks: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    debug_assert!(ranks.windows(2).all(|w| w[0] < w[1]), "ranks ascend");
    debug_assert!(ranks.len() <= total);
    let sum: f64 = ranks.iter().enumerate().map(|(j, rank)| 1.0 / (rank - j) as f64).sum();
    sum / total as f64
}

/// Modified reciprocal rank of `gold` within `ranked` (best first).
pub fn modified_mrr<S: AsRef<str>>(measure_id: &str, ranked: &[S], gold: &BTreeSet<String>) -> MrrResult {
    let ranks: Vec<usize> = ranked
        .iter()
        .enumerate()
        .filter(|(_, d)| gold.contains(d.as_ref()))
        .map(|(i, _)| i + 1)
        .collect();
    MrrResult {
        measure_id: measure_id.to_string(),
        v: mrr_from_ranks(&ranks, gold.len()),
        m: ranks.len(),
        total: gold.len(),
        ranks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_ranking_is_one() {
        assert_eq!(mrr_from_ranks(&[1, 2], 2), 1.0);
        let r = modified_mrr("m", &["a", "b", "c"], &set(&["a", "b"]));
        assert_eq!((r.v, r.m, r.ranks.clone()), (1.0, 2, vec![1, 2]));
    }

    #[test]
    fn ranks_three_and_five() {
        // (1/2)(1/3 + 1/4)
        assert!((mrr_from_ranks(&[3, 5], 2) - 7.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn nothing_returned_is_zero() {
        assert_eq!(mrr_from_ranks(&[], 3), 0.0);
        let r = modified_mrr("m", &["x", "y"], &set(&["a"]));
        assert_eq!((r.v, r.m, r.total), (0.0, 0, 1));
    }

    #[test]
    fn gold_file() {
        let g = CitationGold::parse("measure_id\tdoc_id\nCMIT-4\td1\nCMIT-4\td2\nCMIT-9\td3\n", "t").unwrap();
        assert_eq!(g.cited("CMIT-4").unwrap().len(), 2);
        assert_eq!(g.measures().collect::<Vec<_>>(), ["CMIT-4", "CMIT-9"]);
        assert!(g.cited("none").is_none());
        assert!(CitationGold::parse("", "t").unwrap().is_empty());
        assert!(CitationGold::parse("a\tb\tc\n", "t").is_err());
    }

    proptest! {
        #[test]
        fn mrr_bounds(n in 1usize..40, picks in prop::collection::btree_set(0usize..40, 1..10), extra in 0usize..4) {
            let ranked: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
            let mut gold: BTreeSet<String> = picks.iter().map(|i| format!("d{i}")).collect();
            for e in 0..extra {
                gold.insert(format!("missing{e}"));
            }
            let r = modified_mrr("m", &ranked, &gold);
            prop_assert!((0.0..=1.0).contains(&r.v));
            prop_assert!(r.m <= r.total);
            let top = (1..=r.total).collect::<Vec<_>>();
            // v = 1 exactly when every cited document fills the top M slots
            prop_assert_eq!(r.v == 1.0, r.ranks == top);
        }
    }
}
