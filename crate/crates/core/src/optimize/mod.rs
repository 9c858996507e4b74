//! Field-weight tuning by exhaustive grid search on the modified mean
//! reciprocal rank.

mod grid;
mod mrr;

pub use grid::{
    evaluate_weights, grid_search, grid_search_with, grid_size, grid_weights, surface_to_tsv, GridPoint, GridResult,
    DIVISIONS, SURFACE_HEADER,
};
pub use mrr::{modified_mrr, mrr_from_ranks, CitationGold, MrrResult};
