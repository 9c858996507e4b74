//! Measure ontology: concept and relation vocabularies, domain/range rules
//! and the measure component graph templates.
//!
//! Everything that is data (legal relation pairs, template wiring) is read
//! from a versioned schema file. The bundled copy is parsed once on first use.

mod measure;
mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub use measure::{instantiate_measure_graphs, GoldGraph, GoldNode, MeasureConceptInstance, Role};
pub use types::{AttributeKey, BaseRelationType, ConceptAttributes, ConceptType, CqmRelationType};

use crate::error::{Error, Result};
use crate::tsv;

const BUNDLED_SCHEMA: &str = include_str!("../../resources/ontology.schema");
const SCHEMA_NAME: &str = "cqm-ontology";
const SCHEMA_VERSION: u32 = 1;

/// Measure component graphs that take part in matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternName {
    Numerator,
    Denominator,
    Opportunity,
}

impl PatternName {
    pub const ALL: [PatternName; 3] = [
        PatternName::Numerator,
        PatternName::Denominator,
        PatternName::Opportunity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternName::Numerator => "Numerator",
            PatternName::Denominator => "Denominator",
            PatternName::Opportunity => "Opportunity",
        }
    }
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown pattern `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNode {
    pub id: String,
    pub concept: ConceptType,
    /// Care-setting style node, kept only when a measure binds it.
    pub optional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternEdge {
    pub from: usize,
    pub relation: CqmRelationType,
    pub to: usize,
}

/// A typed template graph. Edges refer to positions in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    pub name: PatternName,
    pub nodes: Vec<PatternNode>,
    pub edges: Vec<PatternEdge>,
    pub not_edges: Vec<PatternEdge>,
}

impl PatternGraph {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn node(&self, id: &str) -> Option<&PatternNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Copy keeping only nodes for which `keep` holds, with edges remapped.
    pub fn restricted(&self, mut keep: impl FnMut(&PatternNode) -> bool) -> PatternGraph {
        let mut remap = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if keep(node) {
                remap[i] = Some(nodes.len());
                nodes.push(node.clone());
            }
        }
        let map_edges = |edges: &[PatternEdge]| {
            edges
                .iter()
                .filter_map(|e| {
                    Some(PatternEdge {
                        from: remap[e.from]?,
                        relation: e.relation,
                        to: remap[e.to]?,
                    })
                })
                .collect()
        };
        PatternGraph {
            name: self.name,
            edges: map_edges(&self.edges),
            not_edges: map_edges(&self.not_edges),
            nodes,
        }
    }

    /// The template without its optional nodes.
    pub fn required_only(&self) -> PatternGraph {
        self.restricted(|n| !n.optional)
    }

    /// True when every node is reachable from every other, edge direction and
    /// `not_edges` ignored.
    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for e in &self.edges {
                let next = if e.from == n {
                    e.to
                } else if e.to == n {
                    e.from
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Parsed schema: legal relation pairs plus the component templates.
#[derive(Debug, Clone)]
pub struct Ontology {
    legal: BTreeMap<CqmRelationType, Vec<(ConceptType, ConceptType)>>,
    patterns: Vec<PatternGraph>,
}

impl Ontology {
    /// The schema shipped with the crate.
    pub fn bundled() -> &'static Ontology {
        static BUNDLED: OnceLock<Ontology> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Ontology::parse(BUNDLED_SCHEMA, "ontology.schema").expect("bundled ontology schema is valid")
        })
    }

    pub fn bundled_schema_text() -> &'static str {
        BUNDLED_SCHEMA
    }

    pub fn legal_pairs(&self, relation: CqmRelationType) -> &[(ConceptType, ConceptType)] {
        self.legal.get(&relation).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn validate(&self, subject: ConceptType, relation: CqmRelationType, object: ConceptType) -> bool {
        self.legal_pairs(relation).contains(&(subject, object))
    }

    /// Numerator, Denominator and Opportunity templates, in that order.
    pub fn patterns(&self) -> &[PatternGraph] {
        &self.patterns
    }

    pub fn pattern(&self, name: PatternName) -> &PatternGraph {
        self.patterns
            .iter()
            .find(|p| p.name == name)
            .expect("schema defines every pattern")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Ontology> {
        let err = |line: usize, msg: String| Error::parse(origin, line, msg);
        let mut legal: BTreeMap<CqmRelationType, Vec<(ConceptType, ConceptType)>> = BTreeMap::new();
        let mut patterns = Vec::new();
        let mut header_seen = false;
        let mut current: Option<(usize, PatternGraph, BTreeMap<String, usize>)> = None;

        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let parse_concept = |s: &str| s.parse::<ConceptType>().map_err(|m| err(line_no, m));
            let parse_relation = |s: &str| s.parse::<CqmRelationType>().map_err(|m| err(line_no, m));
            match (cells[0], cells.len()) {
                ("schema", 3) => {
                    let version: u32 = cells[2]
                        .parse()
                        .map_err(|_| err(line_no, format!("bad schema version `{}`", cells[2])))?;
                    if cells[1] != SCHEMA_NAME || version != SCHEMA_VERSION {
                        return Err(err(line_no, format!("unsupported schema {} v{version}", cells[1])));
                    }
                    header_seen = true;
                }
                _ if !header_seen => return Err(err(line_no, "missing `schema` header".into())),
                ("relation", 4) => {
                    let relation = parse_relation(cells[1])?;
                    let pair = (parse_concept(cells[2])?, parse_concept(cells[3])?);
                    let pairs = legal.entry(relation).or_default();
                    if !pairs.contains(&pair) {
                        pairs.push(pair);
                    }
                }
                ("pattern", 2) => {
                    if current.is_some() {
                        return Err(err(line_no, "nested pattern block".into()));
                    }
                    let name = cells[1].parse::<PatternName>().map_err(|m| err(line_no, m))?;
                    let graph = PatternGraph {
                        name,
                        nodes: Vec::new(),
                        edges: Vec::new(),
                        not_edges: Vec::new(),
                    };
                    current = Some((line_no, graph, BTreeMap::new()));
                }
                (kind @ ("node" | "optional"), 3) => {
                    let (_, graph, ids) = current
                        .as_mut()
                        .ok_or_else(|| err(line_no, format!("`{kind}` outside a pattern block")))?;
                    if ids.contains_key(cells[1]) {
                        return Err(err(line_no, format!("duplicate node `{}`", cells[1])));
                    }
                    ids.insert(cells[1].to_string(), graph.nodes.len());
                    graph.nodes.push(PatternNode {
                        id: cells[1].to_string(),
                        concept: parse_concept(cells[2])?,
                        optional: kind == "optional",
                    });
                }
                (kind @ ("edge" | "not"), 4) => {
                    let (_, graph, ids) = current
                        .as_mut()
                        .ok_or_else(|| err(line_no, format!("`{kind}` outside a pattern block")))?;
                    let endpoint = |id: &str| {
                        ids.get(id)
                            .copied()
                            .ok_or_else(|| err(line_no, format!("unknown node `{id}`")))
                    };
                    let edge = PatternEdge {
                        from: endpoint(cells[1])?,
                        relation: parse_relation(cells[2])?,
                        to: endpoint(cells[3])?,
                    };
                    if kind == "edge" {
                        graph.edges.push(edge);
                    } else {
                        graph.not_edges.push(edge);
                    }
                }
                ("end", 1) => {
                    let (start, graph, _) = current
                        .take()
                        .ok_or_else(|| err(line_no, "`end` without pattern".into()))?;
                    patterns.push((start, graph));
                }
                _ => return Err(err(line_no, format!("unrecognised line `{line}`"))),
            }
        }
        if let Some((start, _, _)) = current {
            return Err(err(start, "pattern block is not closed".into()));
        }

        let ontology = Ontology {
            legal,
            patterns: Vec::new(),
        };
        let mut ordered = Vec::new();
        for name in PatternName::ALL {
            let mut found = patterns.iter().filter(|(_, p)| p.name == name);
            let (start, graph) = found
                .next()
                .ok_or_else(|| err(0, format!("pattern {name} is not defined")))?;
            if found.next().is_some() {
                return Err(err(*start, format!("pattern {name} is defined twice")));
            }
            ontology.check_pattern(graph).map_err(|m| err(*start, m))?;
            ordered.push(graph.clone());
        }
        Ok(Ontology {
            patterns: ordered,
            ..ontology
        })
    }

    fn check_pattern(&self, graph: &PatternGraph) -> Result<(), String> {
        for edge in graph.edges.iter().chain(&graph.not_edges) {
            let (from, to) = (&graph.nodes[edge.from], &graph.nodes[edge.to]);
            if !self.validate(from.concept, edge.relation, to.concept) {
                return Err(format!(
                    "{}: edge {} -{}-> {} violates domain/range",
                    graph.name, from.id, edge.relation, to.id
                ));
            }
        }
        let edges: BTreeSet<_> = graph.edges.iter().collect();
        if graph.not_edges.iter().any(|e| edges.contains(e)) {
            return Err(format!("{}: an edge is both required and forbidden", graph.name));
        }
        for concept in [ConceptType::Population, ConceptType::ChangeConcept, ConceptType::Output] {
            if !graph.nodes.iter().any(|n| n.concept == concept && !n.optional) {
                return Err(format!("{}: missing required {concept} node", graph.name));
            }
        }
        if !graph.is_connected() || !graph.required_only().is_connected() {
            return Err(format!("{}: template is not connected", graph.name));
        }
        Ok(())
    }
}

/// True iff `(subject, object)` is a legal domain/range pair for `relation`.
pub fn validate_triple_typing(subject: ConceptType, relation: CqmRelationType, object: ConceptType) -> bool {
    Ontology::bundled().validate(subject, relation, object)
}

/// The three matchable component templates (Rationale is not matched).
pub fn pattern_graphs() -> Vec<PatternGraph> {
    Ontology::bundled().patterns().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConceptType::*;
    use CqmRelationType::*;

    #[test]
    fn experiences_population_to_change_concept() {
        assert!(validate_triple_typing(Population, Experiences, ChangeConcept));
        assert!(!validate_triple_typing(ChangeConcept, Experiences, Population));
    }

    #[test]
    fn exactly_eight_legal_combinations() {
        let mut legal = 0;
        for s in ConceptType::ALL {
            for r in CqmRelationType::ALL {
                for o in ConceptType::ALL {
                    legal += validate_triple_typing(s, r, o) as usize;
                }
            }
        }
        assert_eq!(legal, 8);
    }

    #[test]
    fn legal_pairs_match_table() {
        let expected: &[(CqmRelationType, &[(ConceptType, ConceptType)])] = &[
            (Experiences, &[(Population, ChangeConcept)]),
            (HasFocus, &[(ChangeConcept, HealthStatus)]),
            (
                IsAPartOf,
                &[
                    (HealthStatus, Output),
                    (Utilization, Output),
                    (Utilization, ChangeConcept),
                ],
            ),
            (IsMadeUpOf, &[(Population, HealthStatus), (Population, Utilization)]),
            (ResultsIn, &[(ChangeConcept, Output)]),
        ];
        for (relation, pairs) in expected {
            let got: BTreeSet<_> = relation.legal_pairs().iter().copied().collect();
            let want: BTreeSet<_> = pairs.iter().copied().collect();
            assert_eq!(got, want, "{relation}");
        }
    }

    #[test]
    fn three_templates_with_shared_skeleton() {
        let patterns = pattern_graphs();
        let names: Vec<_> = patterns.iter().map(|p| p.name).collect();
        assert_eq!(names, PatternName::ALL);
        for p in &patterns {
            for concept in [Population, ChangeConcept, Output] {
                assert!(
                    p.nodes.iter().any(|n| n.concept == concept),
                    "{} lacks {concept}",
                    p.name
                );
            }
            for e in p.edges.iter().chain(&p.not_edges) {
                assert!(validate_triple_typing(
                    p.nodes[e.from].concept,
                    e.relation,
                    p.nodes[e.to].concept
                ));
            }
            assert!(p.is_connected());
            assert!(p.required_only().is_connected());
            let edges: BTreeSet<_> = p.edges.iter().collect();
            assert!(p.not_edges.iter().all(|e| !edges.contains(e)));
        }
    }

    fn labelled_edges(p: &PatternGraph, skip_role: &str) -> BTreeSet<(String, CqmRelationType, String)> {
        p.edges
            .iter()
            .filter(|e| p.nodes[e.from].id != skip_role && p.nodes[e.to].id != skip_role)
            .map(|e| (p.nodes[e.from].id.clone(), e.relation, p.nodes[e.to].id.clone()))
            .collect()
    }

    #[test]
    fn numerator_and_denominator_differ_only_in_health_status_role() {
        let ontology = Ontology::bundled();
        let num = ontology.pattern(PatternName::Numerator);
        let den = ontology.pattern(PatternName::Denominator);
        let roles = |p: &PatternGraph| p.nodes.iter().map(|n| n.id.clone()).collect::<BTreeSet<_>>();
        let only_num: Vec<_> = roles(num).difference(&roles(den)).cloned().collect();
        let only_den: Vec<_> = roles(den).difference(&roles(num)).cloned().collect();
        assert_eq!(only_num, vec!["numerator_health_status".to_string()]);
        assert_eq!(only_den, vec!["denominator_health_status".to_string()]);
        assert_eq!(num.node("numerator_health_status").unwrap().concept, HealthStatus);
        assert_eq!(den.node("denominator_health_status").unwrap().concept, HealthStatus);
        assert_eq!(
            labelled_edges(num, "numerator_health_status"),
            labelled_edges(den, "denominator_health_status")
        );
    }

    #[test]
    fn opportunity_carries_no_numerator_health_status() {
        let opp = Ontology::bundled().pattern(PatternName::Opportunity);
        assert!(opp.node("numerator_health_status").is_none());
        assert!(!opp.not_edges.is_empty());
    }

    #[test]
    fn schema_rejects_illegal_edge() {
        let text = Ontology::bundled_schema_text().replace(
            "edge\tpopulation\tExperiences\tchange_concept\nedge\tchange_concept\tResultsIn\toutput\nedge\tnumerator_health_status",
            "edge\tchange_concept\tExperiences\tpopulation\nedge\tchange_concept\tResultsIn\toutput\nedge\tnumerator_health_status",
        );
        assert_ne!(text, Ontology::bundled_schema_text());
        let err = Ontology::parse(&text, "bad.schema").unwrap_err();
        assert!(err.to_string().contains("domain/range"), "{err}");
    }

    #[test]
    fn schema_requires_header_and_closed_blocks() {
        assert!(Ontology::parse("relation\tHasFocus\tChangeConcept\tHealthStatus\n", "x").is_err());
        let unclosed = "schema\tcqm-ontology\t1\npattern\tNumerator\nnode\tpopulation\tPopulation\n";
        assert!(Ontology::parse(unclosed, "x").is_err());
        assert!(Ontology::parse("schema\tcqm-ontology\t2\n", "x").is_err());
    }
}
