//! Literature scanning for clinical quality measures.
//!
//! The pipeline turns text into five fielded knowledge structures, ranks
//! documents against a measure with a weighted tf-idf score, tunes the field
//! weights against cited articles, and checks relevancy by locating the
//! measure's component graphs inside each document's concept graph.

pub mod error;
pub mod extraction;
pub mod matching;
pub mod num;
pub mod ontology;
pub mod optimize;
pub mod pipeline;
pub mod search;
pub mod triple_store;
pub mod tsv;

pub use error::{Error, Result};
pub use num::Real;

/// Weight vector over `f64`, the default scalar.
pub type Weights = search::WeightVector<f64>;
pub type Index = search::SearchIndex<f64>;
pub type Parts = search::ScoreParts<f64>;
pub type Embeddings = matching::EmbeddingTable<f64>;

pub type Weights32 = search::WeightVector<f32>;
pub type Index32 = search::SearchIndex<f32>;
pub type Parts32 = search::ScoreParts<f32>;
pub type Embeddings32 = matching::EmbeddingTable<f32>;
