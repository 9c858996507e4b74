use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extraction::{Field, FieldedDocument};
use crate::num::Real;

/// Which part of an article a corpus holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Target {
    #[default]
    Abstracts,
    Articles,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Abstracts => "abstracts",
            Target::Articles => "articles",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abstracts" => Ok(Target::Abstracts),
            "articles" => Ok(Target::Articles),
            _ => Err(format!("unknown target `{s}`")),
        }
    }
}

/// A measure query: distinct terms per field with their values.
#[derive(Debug, Clone, PartialEq)]
pub struct Query<T> {
    pub measure_id: String,
    /// `(term, value)` sorted by term, per field.
    pub fields: [Vec<(String, T)>; 5],
    pub target: Target,
}

impl<T: Real> Query<T> {
    /// Query from a measure description processed like any document. A
    /// term's value is its occurrence count (summed weight for expansions).
    pub fn from_fielded(doc: &FieldedDocument, target: Target) -> Result<Self> {
        let fields = Field::ALL.map(|f| {
            doc.term_counts(f)
                .into_iter()
                .map(|(t, v)| (t, T::from_f64_lossy(v)))
                .collect()
        });
        Self::new(doc.doc_id.clone(), fields, target)
    }

    pub fn new(measure_id: String, fields: [Vec<(String, T)>; 5], target: Target) -> Result<Self> {
        if fields.iter().all(Vec::is_empty) {
            return Err(Error::InvalidQuery(format!("query for `{measure_id}` has no terms")));
        }
        if fields.iter().flatten().any(|(_, v)| !v.is_finite() || *v <= T::zero()) {
            return Err(Error::InvalidQuery(format!(
                "query for `{measure_id}` has a non-positive value"
            )));
        }
        Ok(Query {
            measure_id,
            fields,
            target,
        })
    }

    pub fn terms(&self, field: Field) -> &[(String, T)] {
        &self.fields[field.index()]
    }
}
