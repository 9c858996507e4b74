use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{AcronymTable, Triple, MAX_ACRONYM_LEN};
use crate::ontology::{ConceptType, CqmRelationType};

/// Key of the generic node every Population mention collapses into.
pub const POPULATION_KEY: &str = "Population";
/// Key of the generic node every Output mention collapses into.
pub const OUTPUT_KEY: &str = "Output";

/// Node identity: canonical text plus concept type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeKey {
    pub key: String,
    pub concept: ConceptType,
}

impl NodeKey {
    pub fn new(key: impl Into<String>, concept: ConceptType) -> Self {
        NodeKey {
            key: key.into(),
            concept,
        }
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.concept, self.key)
    }
}

/// A document's merged concept graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentGraph {
    pub doc_id: String,
    /// Node -> surface and alias texts seen before merging.
    nodes: BTreeMap<NodeKey, BTreeSet<String>>,
    edges: BTreeSet<(NodeKey, CqmRelationType, NodeKey)>,
}

impl DocumentGraph {
    pub fn new(doc_id: impl Into<String>) -> Self {
        DocumentGraph {
            doc_id: doc_id.into(),
            ..Default::default()
        }
    }

    pub fn add_node(&mut self, node: NodeKey) {
        self.nodes.entry(node).or_default();
    }

    /// Adds an edge, creating missing endpoints.
    pub fn add_edge(&mut self, from: NodeKey, relation: CqmRelationType, to: NodeKey) {
        self.add_node(from.clone());
        self.add_node(to.clone());
        self.edges.insert((from, relation, to));
    }

    pub fn add_provenance(&mut self, node: &NodeKey, text: &str) {
        let text = text.trim();
        if !text.is_empty() {
            self.nodes.entry(node.clone()).or_default().insert(text.to_string());
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeKey> {
        self.nodes.keys()
    }

    pub fn edges(&self) -> impl Iterator<Item = &(NodeKey, CqmRelationType, NodeKey)> {
        self.edges.iter()
    }

    pub fn provenance(&self, node: &NodeKey) -> impl Iterator<Item = &str> {
        self.nodes.get(node).into_iter().flatten().map(String::as_str)
    }

    pub fn contains_node(&self, node: &NodeKey) -> bool {
        self.nodes.contains_key(node)
    }

    pub fn has_edge(&self, from: &NodeKey, relation: CqmRelationType, to: &NodeKey) -> bool {
        self.edges.contains(&(from.clone(), relation, to.clone()))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and edges without provenance.
    pub fn same_structure(&self, other: &DocumentGraph) -> bool {
        self.nodes.keys().eq(other.nodes.keys()) && self.edges == other.edges
    }
}

fn raw_key(concept: ConceptType, alias: &str) -> String {
    match concept {
        ConceptType::Population => POPULATION_KEY.to_string(),
        ConceptType::Output => OUTPUT_KEY.to_string(),
        _ => alias.trim().to_lowercase(),
    }
}

/// Builds the merged graph of one document.
///
/// Node keys are lowercase aliases. Short keys (at most five characters)
/// found in the acronym table become their long form; Population and Output
/// nodes collapse to the generic keys. Triples below `confidence_min` are
/// ignored. Original texts are kept as node provenance.
pub fn build_document_graph(triples: &[Triple], acronyms: &AcronymTable, confidence_min: f64) -> DocumentGraph {
    let mut graph = DocumentGraph::new(triples.first().map(|t| t.doc_id.clone()).unwrap_or_default());
    let kept: Vec<&Triple> = triples.iter().filter(|t| t.confidence >= confidence_min).collect();
    debug_assert!(kept.iter().all(|t| t.doc_id == graph.doc_id), "one document per graph");

    let present: BTreeSet<String> = kept
        .iter()
        .flat_map(|t| [(t.subject_type, &t.subject_alias), (t.object_type, &t.object_alias)])
        .filter(|(c, _)| !c.is_generic())
        .map(|(c, a)| raw_key(c, a))
        .collect();
    let node = |concept: ConceptType, alias: &str| {
        let key = raw_key(concept, alias);
        let key = if concept.is_generic() || key.chars().count() > MAX_ACRONYM_LEN {
            key
        } else {
            acronyms.resolve(&key, &present).unwrap_or(key)
        };
        NodeKey::new(key, concept)
    };

    for t in kept {
        let s = node(t.subject_type, &t.subject_alias);
        let o = node(t.object_type, &t.object_alias);
        graph.add_edge(s.clone(), t.relation, o.clone());
        for text in [&t.subject_text, &t.subject_alias] {
            graph.add_provenance(&s, text);
        }
        for text in [&t.object_text, &t.object_alias] {
            graph.add_provenance(&o, text);
        }
    }
    graph
}

/// One triple per edge, with node keys as texts.
pub fn implied_triples(graph: &DocumentGraph) -> Vec<Triple> {
    graph
        .edges()
        .map(|(s, r, o)| Triple {
            doc_id: graph.doc_id.clone(),
            subject_type: s.concept,
            subject_text: s.key.clone(),
            subject_alias: s.key.clone(),
            relation: *r,
            object_type: o.concept,
            object_text: o.key.clone(),
            object_alias: o.key.clone(),
            confidence: 1.0,
        })
        .collect()
}
