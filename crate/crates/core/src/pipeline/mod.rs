//! File-level pipeline stages: ingest, index, scan, optimise, match, evaluate.
//!
//! Each stage reads and writes plain TSV so the stages compose through files.

mod corpus;
mod evaluate;
mod measures;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

pub use corpus::{parse_corpus, Corpus, CorpusRecord, Rejected, CORPUS_HEADER};
pub use evaluate::{evaluate, Confusion, EvalReport, ManualJudgements, MeasureEval, EVAL_HEADER};
pub use measures::{parse_measures, MeasureRecord};

use crate::error::{Error, Result};
use crate::extraction::{
    build_fielded_document, extract, fielded_to_tsv, parse_fielded_tsv, FieldedDocument, Resources,
};
use crate::matching::{judge_all, EmbeddingTable, MatchVerdict};
use crate::num::Real;
use crate::ontology::instantiate_measure_graphs;
use crate::search::{compute_score_parts, scan, Query, Ranked, ScoreParts, SearchIndex, Target, WeightVector};
use crate::triple_store::{build_document_graph, AcronymTable, DocumentGraph, Triple, TripleStore};
use crate::tsv;

pub const FIELDED_FILE: &str = "fielded.tsv";
pub const TRIPLES_FILE: &str = "triples.tsv";

/// Output of extraction over a corpus.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub docs: Vec<FieldedDocument>,
    pub store: TripleStore,
    pub rejected: Vec<Rejected>,
}

/// Extracts fielded documents and triples from every readable record.
pub fn ingest(corpus: &Corpus, resources: &Resources) -> Result<Ingested> {
    let extracted: Vec<(FieldedDocument, Vec<Triple>)> = corpus
        .records
        .par_iter()
        .map(|r| {
            let ex = extract(&r.doc_id, &r.text(), resources);
            let triples = ex
                .cqm_relations
                .iter()
                .map(|m| Triple::from_relation(&r.doc_id, m))
                .collect();
            (ex.fielded, triples)
        })
        .collect();
    let mut store = TripleStore::new();
    let mut docs = Vec::with_capacity(extracted.len());
    for (doc, triples) in extracted {
        store.extend(triples)?;
        docs.push(doc);
    }
    Ok(Ingested {
        docs,
        store,
        rejected: corpus.rejected.clone(),
    })
}

/// Reads a corpus file and writes [`FIELDED_FILE`] and [`TRIPLES_FILE`]
/// into `out_dir`, replacing earlier output. Fails only when no record
/// could be read.
pub fn ingest_files(corpus_path: &Path, resources: &Resources, out_dir: &Path) -> Result<Ingested> {
    let corpus = parse_corpus(&tsv::read_to_string(corpus_path)?);
    for r in &corpus.rejected {
        log::warn!("{}:{}: skipped: {}", corpus_path.display(), r.line, r.reason);
    }
    if corpus.records.is_empty() {
        let line = corpus.rejected.first().map_or(0, |r| r.line);
        return Err(Error::parse(
            corpus_path.display().to_string(),
            line,
            "no readable records",
        ));
    }
    let ingested = ingest(&corpus, resources)?;
    tsv::write_string(&out_dir.join(FIELDED_FILE), &fielded_to_tsv(&ingested.docs))?;
    ingested.store.save(&out_dir.join(TRIPLES_FILE))?;
    Ok(ingested)
}

/// Builds an index from a fielded-document file and saves its snapshot.
pub fn index_files<T: Real>(fielded_path: &Path, index_path: &Path) -> Result<SearchIndex<T>> {
    let docs = parse_fielded_tsv(&tsv::read_to_string(fielded_path)?, &fielded_path.display().to_string())?;
    let index = SearchIndex::build(&docs)?;
    index.save(index_path)?;
    Ok(index)
}

pub fn load_measures(path: &Path) -> Result<Vec<MeasureRecord>> {
    parse_measures(&tsv::read_to_string(path)?, &path.display().to_string())
}

/// The query a measure description produces.
pub fn measure_query<T: Real>(measure: &MeasureRecord, resources: &Resources, target: Target) -> Result<Query<T>> {
    Query::from_fielded(
        &build_fielded_document(&measure.id, &measure.description, resources),
        target,
    )
}

/// The top `k` documents of one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRanking<T> {
    pub measure_id: String,
    pub ranked: Vec<Ranked<T>>,
}

pub fn scan_measures<T: Real>(
    index: &SearchIndex<T>,
    measures: &[MeasureRecord],
    resources: &Resources,
    weights: &WeightVector<T>,
    k: usize,
    target: Target,
) -> Result<Vec<MeasureRanking<T>>> {
    measures
        .iter()
        .map(|m| {
            let query = measure_query(m, resources, target)?;
            Ok(MeasureRanking {
                measure_id: m.id.clone(),
                ranked: scan(&query, weights, k, index)?,
            })
        })
        .collect()
}

/// Weight-independent score parts of every measure.
pub fn measure_score_parts<T: Real>(
    index: &SearchIndex<T>,
    measures: &[MeasureRecord],
    resources: &Resources,
    target: Target,
) -> Result<Vec<ScoreParts<T>>> {
    if index.is_empty() {
        return Err(Error::MissingIndex("index has no documents".into()));
    }
    measures
        .iter()
        .map(|m| Ok(compute_score_parts(&measure_query(m, resources, target)?, index)))
        .collect()
}

pub const RANKINGS_HEADER: &str = "measure_id\trank\tdoc_id\tscore";

pub fn rankings_to_tsv<T: Real>(rankings: &[MeasureRanking<T>]) -> String {
    let mut out = String::from(RANKINGS_HEADER);
    out.push('\n');
    for r in rankings {
        for (i, item) in r.ranked.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                tsv::escape(&r.measure_id),
                i + 1,
                tsv::escape(&item.doc_id),
                item.score
            ));
        }
    }
    out
}

pub fn parse_rankings<T: Real>(text: &str, origin: &str) -> Result<Vec<MeasureRanking<T>>> {
    let mut out: Vec<MeasureRanking<T>> = Vec::new();
    for (line_no, line) in tsv::data_lines(text) {
        if line == RANKINGS_HEADER {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let [measure, _, doc, score] = cells.as_slice() else {
            return Err(Error::parse(
                origin,
                line_no,
                "expected measure_id, rank, doc_id, score",
            ));
        };
        let score: T = score
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad score `{score}`")))?;
        let measure = tsv::unescape(measure);
        if out.last().is_none_or(|r| r.measure_id != measure) {
            out.push(MeasureRanking {
                measure_id: measure,
                ranked: Vec::new(),
            });
        }
        out.last_mut().expect("just pushed").ranked.push(Ranked {
            doc_id: tsv::unescape(doc),
            score,
        });
    }
    Ok(out)
}

/// Settings of the relevancy stage.
#[derive(Debug, Clone)]
pub struct MatchSettings<'a, T> {
    pub acronyms: &'a AcronymTable,
    pub embeddings: &'a EmbeddingTable<T>,
    pub threshold: T,
    pub confidence_min: f64,
}

/// Relevancy verdicts per annotated measure.
///
/// With rankings, each measure is judged on its ranked documents in rank
/// order; otherwise on every document of the store in id order. Measures
/// without a concept instance are skipped.
pub fn match_measures<T: Real>(
    store: &TripleStore,
    measures: &[MeasureRecord],
    rankings: Option<&[MeasureRanking<T>]>,
    settings: &MatchSettings<'_, T>,
) -> Result<Vec<MatchVerdict>> {
    let by_measure: Option<BTreeMap<&str, &MeasureRanking<T>>> =
        rankings.map(|rs| rs.iter().map(|r| (r.measure_id.as_str(), r)).collect());
    let graph_of = |doc_id: &str| {
        let mut g = build_document_graph(&store.load(doc_id), settings.acronyms, settings.confidence_min);
        g.doc_id = doc_id.to_string();
        g
    };
    let mut verdicts = Vec::new();
    for m in measures {
        let Some(instance) = &m.instance else {
            log::warn!("measure {} has no concept annotation; skipped", m.id);
            continue;
        };
        let gold = instantiate_measure_graphs(instance)?;
        let docs: Vec<String> = match &by_measure {
            Some(map) => map
                .get(m.id.as_str())
                .map(|r| r.ranked.iter().map(|x| x.doc_id.clone()).collect())
                .unwrap_or_default(),
            None => store.doc_ids().map(str::to_string).collect(),
        };
        let graphs: Vec<DocumentGraph> = docs.iter().map(|d| graph_of(d)).collect();
        verdicts.extend(judge_all(&graphs, &gold, settings.embeddings, settings.threshold));
    }
    Ok(verdicts)
}
