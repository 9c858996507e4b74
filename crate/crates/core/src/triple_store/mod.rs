//! Triple persistence and per-document concept graphs.

mod acronym;
mod graph;
mod store;

pub use acronym::{AcronymTable, MAX_ACRONYM_LEN};
pub use graph::{build_document_graph, implied_triples, DocumentGraph, NodeKey, OUTPUT_KEY, POPULATION_KEY};
pub use store::{Triple, TripleStore, TRIPLE_HEADER};
