use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::extraction::CqmRelationMention;
use crate::ontology::{validate_triple_typing, ConceptType, CqmRelationType};
use crate::tsv;

/// One stored measure-model relation with its source document.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub doc_id: String,
    pub subject_type: ConceptType,
    pub subject_text: String,
    pub subject_alias: String,
    pub relation: CqmRelationType,
    pub object_type: ConceptType,
    pub object_text: String,
    pub object_alias: String,
    pub confidence: f64,
}

impl Triple {
    /// Checks typing, nonempty texts and the confidence range.
    pub fn validate(&self) -> Result<()> {
        if !validate_triple_typing(self.subject_type, self.relation, self.object_type) {
            return Err(Error::Typing {
                subject: self.subject_type,
                relation: self.relation,
                object: self.object_type,
            });
        }
        let texts = [
            &self.doc_id,
            &self.subject_text,
            &self.subject_alias,
            &self.object_text,
            &self.object_alias,
        ];
        if texts.iter().any(|t| t.trim().is_empty()) {
            return Err(Error::parse(&self.doc_id, 0, "triple has an empty text field"));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::parse(
                &self.doc_id,
                0,
                format!("confidence {} outside [0, 1]", self.confidence),
            ));
        }
        Ok(())
    }

    pub fn from_relation(doc_id: &str, rel: &CqmRelationMention) -> Triple {
        Triple {
            doc_id: doc_id.to_string(),
            subject_type: rel.subject_type(),
            subject_text: rel.subject.text.clone(),
            subject_alias: rel.subject.alias.clone(),
            relation: rel.relation,
            object_type: rel.object_type(),
            object_text: rel.object.text.clone(),
            object_alias: rel.object.alias.clone(),
            confidence: rel.confidence,
        }
    }

    fn to_row(&self) -> String {
        [
            tsv::escape(&self.doc_id),
            self.subject_type.to_string(),
            tsv::escape(&self.subject_text),
            tsv::escape(&self.subject_alias),
            self.relation.to_string(),
            self.object_type.to_string(),
            tsv::escape(&self.object_text),
            tsv::escape(&self.object_alias),
            self.confidence.to_string(),
        ]
        .join("\t")
    }

    fn from_row(line: &str, origin: &str, line_no: usize) -> Result<Triple> {
        let cells: Vec<&str> = line.split('\t').collect();
        let [doc, st, stext, salias, rel, ot, otext, oalias, conf] = cells.as_slice() else {
            return Err(Error::parse(
                origin,
                line_no,
                format!("expected 9 columns, found {}", cells.len()),
            ));
        };
        let wrap = |m: String| Error::parse(origin, line_no, m);
        let triple = Triple {
            doc_id: tsv::unescape(doc),
            subject_type: st.parse().map_err(wrap)?,
            subject_text: tsv::unescape(stext),
            subject_alias: tsv::unescape(salias),
            relation: rel.parse().map_err(wrap)?,
            object_type: ot.parse().map_err(wrap)?,
            object_text: tsv::unescape(otext),
            object_alias: tsv::unescape(oalias),
            confidence: conf
                .parse()
                .map_err(|_| Error::parse(origin, line_no, format!("bad confidence `{conf}`")))?,
        };
        match triple.validate() {
            Err(Error::Parse { message, .. }) => Err(Error::parse(origin, line_no, message)),
            other => other.map(|_| triple),
        }
    }
}

pub const TRIPLE_HEADER: &str =
    "doc_id\tsubject_type\tsubject_text\tsubject_alias\trelation\tobject_type\tobject_text\tobject_alias\tconfidence";

/// Triples of a corpus, kept in insertion order with a per-document index.
///
/// The on-disk form is one TSV file with a header row. Appends go to the end
/// of the file; [`TripleStore::replace_doc`] followed by [`TripleStore::save`]
/// rewrites it.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    triples: Vec<Triple>,
    by_doc: BTreeMap<String, Vec<usize>>,
}

impl TripleStore {
    pub fn new() -> Self {
        TripleStore::default()
    }

    /// Adds triples after validating every one; nothing is added on error.
    pub fn extend(&mut self, triples: impl IntoIterator<Item = Triple>) -> Result<()> {
        let triples: Vec<Triple> = triples.into_iter().collect();
        for t in &triples {
            t.validate()?;
        }
        for t in triples {
            self.by_doc
                .entry(t.doc_id.clone())
                .or_default()
                .push(self.triples.len());
            self.triples.push(t);
        }
        Ok(())
    }

    /// Drops every triple of `doc_id`, then adds `triples` for it.
    pub fn replace_doc(&mut self, doc_id: &str, triples: Vec<Triple>) -> Result<()> {
        for t in &triples {
            t.validate()?;
            if t.doc_id != doc_id {
                return Err(Error::parse(doc_id, 0, format!("triple belongs to `{}`", t.doc_id)));
            }
        }
        if self.by_doc.contains_key(doc_id) {
            let kept: Vec<Triple> = self.triples.drain(..).filter(|t| t.doc_id != doc_id).collect();
            *self = TripleStore::new();
            self.extend(kept)?;
        }
        self.extend(triples)
    }

    /// Triples of one document in insertion order; empty for unknown ids.
    pub fn load(&self, doc_id: &str) -> Vec<Triple> {
        self.by_doc
            .get(doc_id)
            .map(|ix| ix.iter().map(|i| self.triples[*i].clone()).collect())
            .unwrap_or_default()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.by_doc.keys().map(String::as_str)
    }

    pub fn all(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(TRIPLE_HEADER);
        out.push('\n');
        for t in &self.triples {
            out.push_str(&t.to_row());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut store = TripleStore::new();
        let mut rows = Vec::new();
        for (line_no, line) in tsv::data_lines(text) {
            if line == TRIPLE_HEADER {
                continue;
            }
            rows.push(Triple::from_row(line, origin, line_no)?);
        }
        store.extend(rows)?;
        Ok(store)
    }

    /// Reads a store file; a missing file is an empty store.
    pub fn open(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(TripleStore::new());
        }
        TripleStore::parse(&tsv::read_to_string(path)?, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        tsv::write_string(path, &self.to_tsv())
    }

    /// Appends rows to a store file, writing the header if the file is new.
    pub fn append_to(path: &Path, triples: &[Triple]) -> Result<()> {
        use std::io::Write;
        for t in triples {
            t.validate()?;
        }
        let fresh = !path.exists();
        if fresh {
            tsv::write_string(path, &format!("{TRIPLE_HEADER}\n"))?;
        }
        let mut file = std::fs::OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut chunk = String::new();
        for t in triples {
            chunk.push_str(&t.to_row());
            chunk.push('\n');
        }
        file.write_all(chunk.as_bytes()).map_err(|e| Error::io(path, e))
    }
}
