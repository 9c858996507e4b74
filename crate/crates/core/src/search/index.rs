use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::extraction::{Field, FieldedDocument};
use crate::num::Real;
use crate::tsv;

/// Postings of one field. `tf` is the summed occurrence weight, so it is an
/// integer count everywhere except the expansion field.
#[derive(Debug, Clone)]
struct FieldIndex<T> {
    postings: HashMap<String, Vec<(u32, T)>>,
    /// Occurrences per document (the field length).
    lengths: Vec<u32>,
}

impl<T> Default for FieldIndex<T> {
    fn default() -> Self {
        FieldIndex {
            postings: HashMap::new(),
            lengths: Vec::new(),
        }
    }
}

/// Inverted index over the five fields of a corpus. Immutable once built.
#[derive(Debug, Clone)]
pub struct SearchIndex<T> {
    doc_ids: Vec<String>,
    lookup: HashMap<String, u32>,
    fields: [FieldIndex<T>; 5],
}

impl<T: Real> SearchIndex<T> {
    /// Builds the index; document ids must be unique.
    pub fn build(docs: &[FieldedDocument]) -> Result<Self> {
        let mut index = SearchIndex {
            doc_ids: Vec::with_capacity(docs.len()),
            lookup: HashMap::with_capacity(docs.len()),
            fields: Default::default(),
        };
        for doc in docs {
            index.push_doc(&doc.doc_id)?;
            let d = (index.doc_ids.len() - 1) as u32;
            for field in Field::ALL {
                let fi = &mut index.fields[field.index()];
                fi.lengths.push(doc.field_len(field) as u32);
                for (term, tf) in doc.term_counts(field) {
                    fi.postings.entry(term).or_default().push((d, T::from_f64_lossy(tf)));
                }
            }
        }
        Ok(index)
    }

    fn push_doc(&mut self, doc_id: &str) -> Result<()> {
        if self.lookup.contains_key(doc_id) {
            return Err(Error::DuplicateDoc(doc_id.to_string()));
        }
        self.lookup.insert(doc_id.to_string(), self.doc_ids.len() as u32);
        self.doc_ids.push(doc_id.to_string());
        Ok(())
    }

    /// Corpus size `N`.
    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_index(&self, doc_id: &str) -> Option<u32> {
        self.lookup.get(doc_id).copied()
    }

    pub(crate) fn doc_id(&self, d: u32) -> &str {
        &self.doc_ids[d as usize]
    }

    pub(crate) fn postings(&self, field: Field, term: &str) -> &[(u32, T)] {
        self.fields[field.index()]
            .postings
            .get(term)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Number of documents containing `term` in `field`.
    pub fn df(&self, field: Field, term: &str) -> usize {
        self.postings(field, term).len()
    }

    pub fn tf(&self, field: Field, term: &str, doc_id: &str) -> T {
        let Some(d) = self.doc_index(doc_id) else {
            return T::zero();
        };
        let list = self.postings(field, term);
        list.binary_search_by_key(&d, |(doc, _)| *doc)
            .map(|i| list[i].1)
            .unwrap_or_else(|_| T::zero())
    }

    /// `ln(N / df)`; `None` for terms absent from the field.
    pub fn idf(&self, field: Field, term: &str) -> Option<T> {
        match self.df(field, term) {
            0 => None,
            df => Some((T::from_count(self.n_docs()) / T::from_count(df)).ln()),
        }
    }

    pub fn field_len(&self, field: Field, d: u32) -> usize {
        self.fields[field.index()].lengths[d as usize] as usize
    }

    /// `1 / sqrt(field length)`; zero for an empty field.
    pub fn field_norm(&self, field: Field, d: u32) -> T {
        match self.field_len(field, d) {
            0 => T::zero(),
            n => T::one() / T::from_count(n).sqrt(),
        }
    }

    /// Distinct terms of a field, sorted.
    pub fn terms(&self, field: Field) -> Vec<&str> {
        let mut terms: Vec<&str> = self.fields[field.index()].postings.keys().map(String::as_str).collect();
        terms.sort_unstable();
        terms
    }

    /// Text snapshot: a `doc` row per document with its five field lengths,
    /// then a `post` row per posting, sorted by field, term and document.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(SNAPSHOT_HEADER);
        out.push('\n');
        for (d, id) in self.doc_ids.iter().enumerate() {
            let lens: Vec<String> = self.fields.iter().map(|f| f.lengths[d].to_string()).collect();
            out.push_str(&format!("doc\t{}\t{}\n", tsv::escape(id), lens.join("\t")));
        }
        for field in Field::ALL {
            for term in self.terms(field) {
                for (d, tf) in self.postings(field, term) {
                    out.push_str(&format!(
                        "post\t{field}\t{}\t{}\t{tf}\n",
                        tsv::escape(term),
                        tsv::escape(self.doc_id(*d))
                    ));
                }
            }
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut index = SearchIndex {
            doc_ids: Vec::new(),
            lookup: HashMap::new(),
            fields: Default::default(),
        };
        let mut lines = tsv::data_lines(text);
        match lines.next() {
            Some((_, SNAPSHOT_HEADER)) => {}
            _ => return Err(Error::parse(origin, 1, "not an index snapshot")),
        }
        for (line_no, line) in lines {
            let cells: Vec<&str> = line.split('\t').collect();
            let bad = |m: &str| Error::parse(origin, line_no, m.to_string());
            match cells.as_slice() {
                ["doc", id, lens @ ..] if lens.len() == 5 => {
                    index.push_doc(&tsv::unescape(id))?;
                    for (fi, len) in index.fields.iter_mut().zip(lens) {
                        fi.lengths.push(len.parse().map_err(|_| bad("bad field length"))?);
                    }
                }
                ["post", field, term, id, tf] => {
                    let field: Field = field.parse().map_err(|m: String| bad(&m))?;
                    let d = index
                        .doc_index(&tsv::unescape(id))
                        .ok_or_else(|| Error::UnknownDoc(tsv::unescape(id)))?;
                    let tf: T = tf.parse().map_err(|_| bad("bad tf"))?;
                    if !tf.is_finite() || tf <= T::zero() {
                        return Err(bad("tf must be positive"));
                    }
                    let list = index.fields[field.index()]
                        .postings
                        .entry(tsv::unescape(term))
                        .or_default();
                    if list.last().is_some_and(|(prev, _)| *prev >= d) {
                        return Err(bad("postings out of order"));
                    }
                    list.push((d, tf));
                }
                _ => return Err(bad("unrecognised row")),
            }
        }
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        tsv::write_string(path, &self.to_tsv())
    }

    /// Loads a snapshot; a missing or empty index is an error.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingIndex(path.display().to_string()));
        }
        let index = Self::parse(&tsv::read_to_string(path)?, &path.display().to_string())?;
        if index.is_empty() {
            return Err(Error::MissingIndex(format!("{} has no documents", path.display())));
        }
        Ok(index)
    }
}

const SNAPSHOT_HEADER: &str = "# cqmscan index v1";

/// [`SearchIndex::build`] under its pipeline name.
pub fn index_corpus<T: Real>(docs: &[FieldedDocument]) -> Result<SearchIndex<T>> {
    SearchIndex::build(docs)
}
