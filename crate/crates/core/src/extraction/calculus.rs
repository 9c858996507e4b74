//! Semantic calculus: `R1(c1, c3) & R2(c3, c2) -> R0(c1, c2)`.
//!
//! Axioms compose two base relations that share a middle argument into one
//! measure-ontology relation. A premise may be written `CODE^-1` to read the
//! base relation backwards. One pass over base relations; derived relations
//! are not fed back in.

use std::collections::HashSet;
use std::fmt;

use super::lexicon::{ConceptMention, MentionCategory};
use super::relations::BaseRelationMention;
use crate::error::{Error, Result};
use crate::ontology::{validate_triple_typing, BaseRelationType, ConceptType, CqmRelationType};
use crate::tsv;

/// A premise relation, possibly read in reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Premise {
    pub code: BaseRelationType,
    pub inverse: bool,
}

impl Premise {
    pub fn forward(code: BaseRelationType) -> Self {
        Premise { code, inverse: false }
    }

    pub fn inverse(code: BaseRelationType) -> Self {
        Premise { code, inverse: true }
    }

    /// `(from, to)` when `rel` instantiates this premise.
    fn read<'r>(&self, rel: &'r BaseRelationMention) -> Option<(&'r ConceptMention, &'r ConceptMention)> {
        let pair = if self.inverse {
            (&rel.arg2, &rel.arg1)
        } else {
            (&rel.arg1, &rel.arg2)
        };
        (rel.code == self.code).then_some(pair)
    }
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.code)
        } else {
            write!(f, "{}", self.code)
        }
    }
}

impl std::str::FromStr for Premise {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_suffix("^-1") {
            Some(code) => Ok(Premise::inverse(code.parse()?)),
            None => Ok(Premise::forward(s.parse()?)),
        }
    }
}

/// Restriction on the shared middle concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bridge {
    Any,
    Cqm(ConceptType),
    /// Event mention of this lexical class, e.g. `experiencing`.
    Class(String),
}

impl Bridge {
    fn accepts(&self, mention: &ConceptMention) -> bool {
        match (self, &mention.category) {
            (Bridge::Any, _) => true,
            (Bridge::Cqm(want), MentionCategory::Cqm(got)) => want == got,
            (Bridge::Class(want), MentionCategory::Event(got)) => want == got,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticAxiom {
    pub r1: Premise,
    pub r2: Premise,
    pub r0: CqmRelationType,
    pub c1_type: ConceptType,
    pub c2_type: ConceptType,
    pub bridge: Bridge,
}

impl SemanticAxiom {
    /// Fails when `(c1_type, c2_type)` is not a legal pair for `r0`.
    pub fn new(
        r1: Premise,
        r2: Premise,
        r0: CqmRelationType,
        c1_type: ConceptType,
        c2_type: ConceptType,
        bridge: Bridge,
    ) -> Result<Self> {
        if !validate_triple_typing(c1_type, r0, c2_type) {
            return Err(Error::Typing {
                subject: c1_type,
                relation: r0,
                object: c2_type,
            });
        }
        Ok(SemanticAxiom {
            r1,
            r2,
            r0,
            c1_type,
            c2_type,
            bridge,
        })
    }
}

/// Axiom list. File lines:
/// `r1<TAB>r2<TAB>r0<TAB>c1type<TAB>c2type<TAB>bridge`, where bridge is `-`,
/// a concept type name, or a lexical class.
#[derive(Debug, Clone, Default)]
pub struct Axioms {
    axioms: Vec<SemanticAxiom>,
}

impl Axioms {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut axioms = Vec::new();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [r1, r2, r0, c1, c2, bridge] = cells.as_slice() else {
                return Err(Error::parse(origin, line_no, format!("expected 6 columns: `{line}`")));
            };
            let wrap = |m: String| Error::parse(origin, line_no, m);
            let bridge = match *bridge {
                "-" | "" => Bridge::Any,
                b => match b.parse::<ConceptType>() {
                    Ok(c) => Bridge::Cqm(c),
                    Err(_) => Bridge::Class(b.to_string()),
                },
            };
            let axiom = SemanticAxiom::new(
                r1.parse().map_err(wrap)?,
                r2.parse().map_err(wrap)?,
                r0.parse().map_err(wrap)?,
                c1.parse().map_err(wrap)?,
                c2.parse().map_err(wrap)?,
                bridge,
            )
            .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
            axioms.push(axiom);
        }
        Ok(Axioms { axioms })
    }

    pub fn from_axioms(axioms: Vec<SemanticAxiom>) -> Self {
        Axioms { axioms }
    }

    pub fn iter(&self) -> impl Iterator<Item = &SemanticAxiom> {
        self.axioms.iter()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }
}

/// A derived measure-ontology relation. `subject` and `object` always carry
/// concept types legal for `relation`.
#[derive(Debug, Clone, PartialEq)]
pub struct CqmRelationMention {
    pub subject: ConceptMention,
    pub relation: CqmRelationType,
    pub object: ConceptMention,
    /// Product of the two premise confidences.
    pub confidence: f64,
}

impl CqmRelationMention {
    pub fn subject_type(&self) -> ConceptType {
        self.subject.concept_type().expect("derived relations are typed")
    }

    pub fn object_type(&self) -> ConceptType {
        self.object.concept_type().expect("derived relations are typed")
    }

    /// Index term `alias1|Relation|alias2`.
    pub fn term(&self) -> String {
        format!(
            "{}|{}|{}",
            self.subject.alias.to_lowercase(),
            self.relation,
            self.object.alias.to_lowercase()
        )
    }
}

/// Derives measure relations from pairs of base relations sharing a middle
/// argument (same span). Results are deduplicated on
/// `(subject alias, relation, object alias)`, keeping the first derivation
/// in axiom order, then base-relation order.
pub fn apply_semantic_calculus(base: &[BaseRelationMention], axioms: &Axioms) -> Vec<CqmRelationMention> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for axiom in axioms.iter() {
        for first in base {
            let Some((c1, c3)) = axiom.r1.read(first) else {
                continue;
            };
            if c1.concept_type() != Some(axiom.c1_type) || !axiom.bridge.accepts(c3) {
                continue;
            }
            for second in base {
                let Some((middle, c2)) = axiom.r2.read(second) else {
                    continue;
                };
                if middle.span != c3.span || c2.span == c1.span || c2.concept_type() != Some(axiom.c2_type) {
                    continue;
                }
                assert!(
                    validate_triple_typing(axiom.c1_type, axiom.r0, axiom.c2_type),
                    "axiom typing is checked on construction"
                );
                let key = (c1.alias.to_lowercase(), axiom.r0, c2.alias.to_lowercase());
                if seen.insert(key) {
                    out.push(CqmRelationMention {
                        subject: c1.clone(),
                        relation: axiom.r0,
                        object: c2.clone(),
                        confidence: first.confidence * second.confidence,
                    });
                }
            }
        }
    }
    out
}
