use std::path::PathBuf;

use thiserror::Error;

use crate::ontology::{ConceptType, CqmRelationType};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("measure {measure_id}: required concept `{field}` is empty")]
    MissingConcept { measure_id: String, field: &'static str },

    #[error("illegal triple typing: {subject} -{relation}-> {object}")]
    Typing {
        subject: ConceptType,
        relation: CqmRelationType,
        object: ConceptType,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateDoc(String),

    #[error("unknown document id `{0}`")]
    UnknownDoc(String),

    #[error("no measure has any cited document")]
    EmptyGold,

    #[error("no token of `{0}` is in the embedding vocabulary")]
    OutOfVocabulary(String),

    #[error("index is missing or empty: {0}")]
    MissingIndex(String),

    #[error("manual adjudication file has no entries")]
    EmptyManual,

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("attribute `{key}` is not allowed on {concept}")]
    IllegalAttribute { concept: ConceptType, key: String },

    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(origin: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.into(),
            line,
            message: message.into(),
        }
    }
}
