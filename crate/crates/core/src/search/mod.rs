//! Fielded inverted index and the practical scoring function, with the
//! weight-independent decomposition used for re-weighting.

mod index;
mod query;
mod scoring;
mod weights;


pub use crate::extraction::Field;
pub use index::{index_corpus, SearchIndex};
pub use query::{Query, Target};
pub use scoring::{
    combine_parts, compute_score_parts, compute_score_parts_with, parse_ranking, ranking_to_tsv, recombine, scan,
    score, FieldParts, Ranked, ScoreParts, DEFAULT_RETAIN, RANKING_HEADER,
};
pub use weights::WeightVector;
