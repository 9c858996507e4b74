//! Template graphs inside document graphs, and node-level relevancy checks.

mod embedding;
mod relevancy;
mod vf2;

pub use embedding::{cosine_distance, embedding_tokens, node_match, EmbeddingTable, DEFAULT_THRESHOLD};
pub use relevancy::{
    judge_all, judge_relevancy, parse_verdicts, verdicts_to_tsv, MatchVerdict, PatternOutcome, VerdictRow,
    VERDICT_HEADER,
};
pub use vf2::{find_pattern_subgraphs, Binding};
