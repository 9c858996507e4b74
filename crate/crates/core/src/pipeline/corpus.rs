use std::collections::HashSet;

use crate::tsv;

pub const CORPUS_HEADER: &str = "doc_id\ttitle\tbody";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub doc_id: String,
    pub title: String,
    pub body: String,
}

impl CorpusRecord {
    /// Title and body as one text.
    pub fn text(&self) -> String {
        match (self.title.trim(), self.body.trim()) {
            ("", body) => body.to_string(),
            (title, "") => title.to_string(),
            (title, body) if title.ends_with(['.', '?', '!']) => format!("{title} {body}"),
            (title, body) => format!("{title}. {body}"),
        }
    }
}

/// A line that could not be read as a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub records: Vec<CorpusRecord>,
    pub rejected: Vec<Rejected>,
}

/// Reads `doc_id<TAB>title<TAB>body` lines. Bad lines (wrong column count,
/// empty id, repeated id) are collected in `rejected` and skipped.
pub fn parse_corpus(text: &str) -> Corpus {
    let mut corpus = Corpus::default();
    let mut seen = HashSet::new();
    for (line, row) in tsv::data_lines(text) {
        if row == CORPUS_HEADER {
            continue;
        }
        let cells: Vec<&str> = row.split('\t').collect();
        let reject = |reason: String| Rejected { line, reason };
        let [id, title, body] = cells.as_slice() else {
            corpus
                .rejected
                .push(reject(format!("expected 3 columns, found {}", cells.len())));
            continue;
        };
        let doc_id = tsv::unescape(id).trim().to_string();
        if doc_id.is_empty() {
            corpus.rejected.push(reject("empty doc_id".into()));
            continue;
        }
        if !seen.insert(doc_id.clone()) {
            corpus.rejected.push(reject(format!("repeated doc_id `{doc_id}`")));
            continue;
        }
        corpus.records.push(CorpusRecord {
            doc_id,
            title: tsv::unescape(title),
            body: tsv::unescape(body),
        });
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn good_and_bad_lines() {
        let text = "doc_id\ttitle\tbody\na\tT\tB\n\nbroken line\n\tx\ty\na\tagain\tz\nb\t\tonly body\n";
        let c = parse_corpus(text);
        assert_eq!(c.records.len(), 2);
        assert_eq!(c.records[1].text(), "only body");
        assert_eq!(c.records[0].text(), "T. B");
        assert_eq!(c.rejected.iter().map(|r| r.line).collect::<Vec<_>>(), vec![4, 5, 6]);
    }
}
