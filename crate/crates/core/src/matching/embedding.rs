use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::tsv;

/// Token vectors of one fixed dimension.
///
/// Text format: a header line `count dim`, then one line per token holding
/// the token and `dim` numbers, whitespace separated. Tokens are stored
/// lowercase.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    dim: usize,
    vectors: HashMap<String, Vec<T>>,
}

/// Lowercase alphanumeric runs of a text.
pub fn embedding_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

impl<T: Real> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, token: &str, vector: Vec<T>) -> std::result::Result<(), String> {
        if vector.len() != self.dim {
            return Err(format!(
                "`{token}` has {} components, expected {}",
                vector.len(),
                self.dim
            ));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(format!("`{token}` has a non-finite component"));
        }
        self.vectors.insert(token.to_lowercase(), vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[T]> {
        self.vectors.get(&token.to_lowercase()).map(Vec::as_slice)
    }

    /// Mean vector of the in-vocabulary tokens of `text`.
    pub fn embed(&self, text: &str) -> Option<Vec<T>> {
        let mut sum = vec![T::zero(); self.dim];
        let mut n = 0;
        for token in embedding_tokens(text) {
            if let Some(v) = self.vectors.get(&token) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s = *s + *x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        let n = T::from_count(n);
        Some(sum.into_iter().map(|s| s / n).collect())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lines = tsv::data_lines(text);
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 1, "empty embedding file"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::parse(origin, line_no, "header must be `count dim`"))
            })
            .collect::<Result<_>>()?;
        let [count, dim] = head[..] else {
            return Err(Error::parse(origin, line_no, "header must be `count dim`"));
        };
        let mut table = EmbeddingTable::new(dim);
        for (line_no, line) in lines {
            let mut cells = line.split_whitespace();
            let Some(token) = cells.next() else { continue };
            let vector: Vec<T> = cells
                .map(|x| {
                    x.parse()
                        .map_err(|_| Error::parse(origin, line_no, format!("bad number `{x}`")))
                })
                .collect::<Result<_>>()?;
            if table.get(token).is_some() {
                return Err(Error::parse(origin, line_no, format!("duplicate token `{token}`")));
            }
            table
                .insert(token, vector)
                .map_err(|m| Error::parse(origin, line_no, m))?;
        }
        if table.len() != count {
            return Err(Error::parse(
                origin,
                1,
                format!("header announces {count} vectors, found {}", table.len()),
            ));
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?, &path.display().to_string())
    }

    /// Text form with tokens sorted.
    pub fn to_text(&self) -> String {
        let mut tokens: Vec<&String> = self.vectors.keys().collect();
        tokens.sort();
        let mut out = format!("{} {}\n", tokens.len(), self.dim);
        for t in tokens {
            let nums: Vec<String> = self.vectors[t].iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{t} {}\n", nums.join(" ")));
        }
        out
    }
}

/// `1 - cos(a, b)`; a zero vector counts as orthogonal to everything.
pub fn cosine_distance<T: Real>(a: &[T], b: &[T]) -> T {
    let dot: T = a.iter().zip(b).map(|(x, y)| *x * *y).sum();
    let na: T = a.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let nb: T = b.iter().map(|x| *x * *x).sum::<T>().sqrt();
    if na == T::zero() || nb == T::zero() {
        return T::one();
    }
    T::one() - dot / (na * nb)
}

/// Default distance cut-off for the embedding fallback.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Case-insensitive equality, falling back to embedding distance at most
/// `threshold`. Phrases embed as the mean of their known token vectors.
///
/// Fails with [`Error::OutOfVocabulary`] when the strings differ and one of
/// them has no known token.
pub fn node_match<T: Real>(
    doc_text: &str,
    gold_text: &str,
    embeddings: &EmbeddingTable<T>,
    threshold: T,
) -> Result<bool> {
    let (a, b) = (doc_text.trim(), gold_text.trim());
    if a.to_lowercase() == b.to_lowercase() {
        return Ok(true);
    }
    let embed = |text: &str| {
        embeddings
            .embed(text)
            .ok_or_else(|| Error::OutOfVocabulary(text.to_string()))
    };
    let (va, vb) = (embed(a)?, embed(b)?);
    Ok(cosine_distance(&va, &vb) <= threshold)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const TOY: &str = "\
6 3
aspirin 1.0 0.2 0.0
antiplatelet 0.9 0.3 0.1
therapy 0.8 0.1 0.2
mortality 0.0 1.0 0.1
death 0.1 0.9 0.0
hospital 0.0 0.0 1.0
";

    fn toy() -> EmbeddingTable<f64> {
        EmbeddingTable::parse(TOY, "toy").unwrap()
    }

    fn oracle_distance(a: &[f64], b: &[f64]) -> f64 {
        let mut dot = 0.0;
        let mut na = 0.0;
        let mut nb = 0.0;
        for i in 0..a.len() {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        1.0 - dot / (na.sqrt() * nb.sqrt())
    }

    #[test]
    fn exact_match_ignores_case() {
        let t = toy();
        assert!(node_match("Acute Myocardial Infarction", "acute myocardial infarction", &t, 0.6).unwrap());
    }

    #[test]
    fn identical_vectors_are_at_distance_zero() {
        assert_eq!(cosine_distance(&[0.3f64, 0.4], &[0.3, 0.4]), 0.0);
        let t = toy();
        assert!(node_match("death", "Death", &t, 0.0).unwrap());
    }

    #[test]
    fn antiplatelet_therapy_is_close_to_aspirin() {
        let t = toy();
        let phrase = [(0.9 + 0.8) / 2.0, (0.3 + 0.1) / 2.0, (0.1 + 0.2) / 2.0];
        let d = oracle_distance(&phrase, &[1.0, 0.2, 0.0]);
        assert!(d < 0.6);
        let got = cosine_distance(&t.embed("antiplatelet therapy").unwrap(), t.get("aspirin").unwrap());
        assert!((got - d).abs() < 1e-12);
        assert!(node_match("antiplatelet therapy", "aspirin", &t, 0.6).unwrap());
        assert!(!node_match("hospital", "aspirin", &t, 0.6).unwrap());
    }

    #[test]
    fn unknown_words_are_reported() {
        let t = toy();
        assert!(
            matches!(node_match("warfarin", "aspirin", &t, 0.6), Err(Error::OutOfVocabulary(w)) if w == "warfarin")
        );
        // partially known phrases use the known tokens
        assert!(node_match("low dose aspirin", "aspirin", &t, 0.01).unwrap());
        // exact matches never need vectors
        assert!(node_match("warfarin", "WARFARIN", &t, 0.6).unwrap());
    }

    #[test]
    fn malformed_tables_are_rejected() {
        for bad in [
            "",
            "2 3\na 1 2 3\n",
            "1 3\na 1 2\n",
            "1 2\na 1 x\n",
            "2 1\na 1\nA 2\n",
            "1 1\na inf\n",
        ] {
            assert!(EmbeddingTable::<f64>::parse(bad, "t").is_err(), "{bad:?}");
        }
        let t = toy();
        assert_eq!(EmbeddingTable::<f64>::parse(&t.to_text(), "t").unwrap(), t);
        assert_eq!(t.dim(), 3);
    }

    fn word() -> impl Strategy<Value = String> {
        prop::sample::select(vec![
            "aspirin",
            "antiplatelet",
            "therapy",
            "mortality",
            "death",
            "hospital",
        ])
        .prop_map(str::to_string)
    }

    fn phrase() -> impl Strategy<Value = String> {
        prop::collection::vec(word(), 1..4).prop_map(|w| w.join(" "))
    }

    proptest! {
        #[test]
        fn symmetric(a in phrase(), b in phrase(), th in 0.0f64..2.0) {
            let t = toy();
            prop_assert_eq!(node_match(&a, &b, &t, th).unwrap(), node_match(&b, &a, &t, th).unwrap());
        }

        #[test]
        fn monotone_in_threshold(a in phrase(), b in phrase(), lo in 0.0f64..2.0, step in 0.0f64..1.0) {
            let t = toy();
            if node_match(&a, &b, &t, lo).unwrap() {
                prop_assert!(node_match(&a, &b, &t, lo + step).unwrap());
            }
        }

        #[test]
        fn distance_matches_oracle(a in phrase(), b in phrase()) {
            let t = toy();
            let (va, vb) = (t.embed(&a).unwrap(), t.embed(&b).unwrap());
            prop_assert!((cosine_distance(&va, &vb) - oracle_distance(&va, &vb)).abs() < 1e-12);
        }
    }
}
