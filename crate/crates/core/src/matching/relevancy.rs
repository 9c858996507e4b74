use std::collections::BTreeMap;

use rayon::prelude::*;

use super::embedding::{node_match, EmbeddingTable};
use super::vf2::{find_pattern_subgraphs, Binding};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::ontology::{ConceptType, GoldGraph, PatternName, Role};
use crate::triple_store::{DocumentGraph, NodeKey};
use crate::tsv;

/// Structural bindings of one template and the ones whose nodes also match
/// the gold texts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatternOutcome {
    pub found: Vec<Binding>,
    pub accepted: Vec<Binding>,
}

impl PatternOutcome {
    pub fn matched(&self) -> bool {
        !self.accepted.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchVerdict {
    pub measure_id: String,
    pub doc_id: String,
    pub patterns: BTreeMap<PatternName, PatternOutcome>,
    pub relevant: bool,
    pub stringent_relevant: bool,
    /// The gold Output text when it appears among the texts merged into the
    /// document's Output node.
    pub output_text: Option<String>,
}

impl MatchVerdict {
    pub fn matched(&self, name: PatternName) -> bool {
        self.patterns.get(&name).is_some_and(PatternOutcome::matched)
    }
}

/// Texts a document node can be compared by: its key and provenance.
fn candidate_texts<'g>(graph: &'g DocumentGraph, node: &'g NodeKey) -> Vec<&'g str> {
    let mut texts = vec![node.key.as_str()];
    texts.extend(graph.provenance(node).filter(|t| *t != node.key));
    texts
}

fn node_accepts<T: Real>(
    graph: &DocumentGraph,
    node: &NodeKey,
    gold_text: &str,
    embeddings: &EmbeddingTable<T>,
    threshold: T,
) -> bool {
    if node.concept.is_generic() {
        return true;
    }
    candidate_texts(graph, node)
        .into_iter()
        .any(|text| match node_match(text, gold_text, embeddings, threshold) {
            Ok(hit) => hit,
            Err(Error::OutOfVocabulary(word)) => {
                log::warn!(
                    "{}: no vector for `{word}`, treating `{text}` as no match",
                    graph.doc_id
                );
                false
            }
            Err(e) => {
                log::warn!("{}: {e}", graph.doc_id);
                false
            }
        })
}

/// Locates each gold template in the document graph and checks the bound
/// nodes against the gold texts.
///
/// A template matches when any structural binding passes on every node
/// (Population and Output nodes always pass). Relevant means at least one
/// template matched; stringent relevant means all of them did.
pub fn judge_relevancy<T: Real>(
    graph: &DocumentGraph,
    gold: &BTreeMap<PatternName, GoldGraph>,
    embeddings: &EmbeddingTable<T>,
    threshold: T,
) -> MatchVerdict {
    let mut patterns = BTreeMap::new();
    for (name, g) in gold {
        let found = find_pattern_subgraphs(graph, &g.pattern);
        let accepted = found
            .iter()
            .filter(|binding| {
                binding
                    .iter()
                    .enumerate()
                    .all(|(i, node)| node_accepts(graph, node, &g.texts[i], embeddings, threshold))
            })
            .cloned()
            .collect();
        patterns.insert(*name, PatternOutcome { found, accepted });
    }
    let relevant = patterns.values().any(PatternOutcome::matched);
    let stringent_relevant = !patterns.is_empty() && patterns.values().all(PatternOutcome::matched);
    let output_text = gold.values().find_map(|g| g.text_of(Role::Output)).and_then(|wanted| {
        graph
            .nodes()
            .filter(|n| n.concept == ConceptType::Output)
            .flat_map(|n| graph.provenance(n))
            .find(|t| t.to_lowercase() == wanted.to_lowercase())
            .map(|_| wanted.to_string())
    });
    MatchVerdict {
        measure_id: gold.values().next().map(|g| g.measure_id.clone()).unwrap_or_default(),
        doc_id: graph.doc_id.clone(),
        patterns,
        relevant,
        stringent_relevant,
        output_text,
    }
}

/// [`judge_relevancy`] over many documents in parallel; output keeps input order.
pub fn judge_all<T: Real>(
    graphs: &[DocumentGraph],
    gold: &BTreeMap<PatternName, GoldGraph>,
    embeddings: &EmbeddingTable<T>,
    threshold: T,
) -> Vec<MatchVerdict> {
    graphs
        .par_iter()
        .map(|g| judge_relevancy(g, gold, embeddings, threshold))
        .collect()
}

pub const VERDICT_HEADER: &str =
    "measure_id\tdoc_id\tnumerator_matched\tdenominator_matched\topportunity_matched\trelevant\tstringent_relevant";

pub fn verdicts_to_tsv(verdicts: &[MatchVerdict]) -> String {
    let mut out = String::from(VERDICT_HEADER);
    out.push('\n');
    for v in verdicts {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            tsv::escape(&v.measure_id),
            tsv::escape(&v.doc_id),
            tsv::yes_no(v.matched(PatternName::Numerator)),
            tsv::yes_no(v.matched(PatternName::Denominator)),
            tsv::yes_no(v.matched(PatternName::Opportunity)),
            tsv::yes_no(v.relevant),
            tsv::yes_no(v.stringent_relevant),
        ));
    }
    out
}

/// One row of a verdict report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictRow {
    pub measure_id: String,
    pub doc_id: String,
    pub numerator: bool,
    pub denominator: bool,
    pub opportunity: bool,
    pub relevant: bool,
    pub stringent_relevant: bool,
}

impl From<&MatchVerdict> for VerdictRow {
    fn from(v: &MatchVerdict) -> Self {
        VerdictRow {
            measure_id: v.measure_id.clone(),
            doc_id: v.doc_id.clone(),
            numerator: v.matched(PatternName::Numerator),
            denominator: v.matched(PatternName::Denominator),
            opportunity: v.matched(PatternName::Opportunity),
            relevant: v.relevant,
            stringent_relevant: v.stringent_relevant,
        }
    }
}

pub fn parse_verdicts(text: &str, origin: &str) -> Result<Vec<VerdictRow>> {
    let mut rows = Vec::new();
    for (line_no, line) in tsv::content_lines(text) {
        if line == VERDICT_HEADER {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let [measure, doc, flags @ ..] = cells.as_slice() else {
            return Err(Error::parse(origin, line_no, "expected seven columns"));
        };
        if flags.len() != 5 {
            return Err(Error::parse(origin, line_no, "expected seven columns"));
        }
        let flag = |i: usize| {
            tsv::parse_bool(flags[i]).ok_or_else(|| Error::parse(origin, line_no, format!("bad flag `{}`", flags[i])))
        };
        let row = VerdictRow {
            measure_id: tsv::unescape(measure),
            doc_id: tsv::unescape(doc),
            numerator: flag(0)?,
            denominator: flag(1)?,
            opportunity: flag(2)?,
            relevant: flag(3)?,
            stringent_relevant: flag(4)?,
        };
        if row.stringent_relevant && !row.relevant {
            return Err(Error::parse(origin, line_no, "stringent relevant row is not relevant"));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::embedding::tests::TOY;
    use crate::ontology::{instantiate_measure_graphs, CqmRelationType, MeasureConceptInstance};
    use crate::triple_store::{OUTPUT_KEY, POPULATION_KEY};
    use proptest::prelude::*;

    fn cmit4() -> BTreeMap<PatternName, GoldGraph> {
        instantiate_measure_graphs(&MeasureConceptInstance {
            measure_id: "CMIT-4".into(),
            population: "Patients".into(),
            denominator_health_status: "Acute myocardial infarction".into(),
            change_concept: "Aspirin".into(),
            numerator_health_status: "Mortality".into(),
            output: "Reduce".into(),
            ..Default::default()
        })
        .unwrap()
    }

    fn toy() -> EmbeddingTable<f64> {
        EmbeddingTable::parse(TOY, "toy").unwrap()
    }

    fn graph(change: &str, with_population: bool) -> DocumentGraph {
        use ConceptType::*;
        use CqmRelationType::*;
        let mut g = DocumentGraph::new("doc");
        let pop = NodeKey::new(POPULATION_KEY, Population);
        let out = NodeKey::new(OUTPUT_KEY, Output);
        let ami = NodeKey::new("acute myocardial infarction", HealthStatus);
        let death = NodeKey::new("mortality", HealthStatus);
        let cc = NodeKey::new(change, ChangeConcept);
        if with_population {
            g.add_edge(pop.clone(), IsMadeUpOf, ami.clone());
            g.add_edge(pop.clone(), Experiences, cc.clone());
        }
        g.add_edge(cc.clone(), ResultsIn, out.clone());
        g.add_edge(death, IsAPartOf, out.clone());
        g.add_edge(ami, IsAPartOf, out.clone());
        g.add_provenance(&out, "reduces");
        g.add_provenance(&out, "Reduce");
        g
    }

    #[test]
    fn close_change_concept_is_relevant() {
        let v = judge_relevancy(&graph("antiplatelet therapy", true), &cmit4(), &toy(), 0.6);
        assert!(v.relevant);
        assert!(v.stringent_relevant);
        assert_eq!(v.output_text.as_deref(), Some("Reduce"));
        assert_eq!(v.patterns[&PatternName::Numerator].accepted.len(), 1);
    }

    #[test]
    fn missing_population_is_not_relevant() {
        let v = judge_relevancy(&graph("aspirin", false), &cmit4(), &toy(), 0.6);
        assert!(!v.relevant);
        assert!(v.patterns.values().all(|p| p.found.is_empty()));
    }

    #[test]
    fn unknown_change_concept_is_a_logged_non_match() {
        let v = judge_relevancy(&graph("warfarin", true), &cmit4(), &toy(), 0.6);
        assert!(!v.relevant);
        assert!(!v.patterns[&PatternName::Numerator].found.is_empty());
    }

    #[test]
    fn provenance_text_can_match() {
        let mut g = graph("asa", true);
        g.add_provenance(&NodeKey::new("asa", ConceptType::ChangeConcept), "Aspirin");
        assert!(judge_relevancy(&g, &cmit4(), &toy(), 0.0).relevant);
    }

    #[test]
    fn verdict_tsv_round_trip() {
        let gold = cmit4();
        let verdicts = vec![
            judge_relevancy(&graph("aspirin", true), &gold, &toy(), 0.6),
            judge_relevancy(&graph("hospital", false), &gold, &toy(), 0.6),
        ];
        let text = verdicts_to_tsv(&verdicts);
        let rows = parse_verdicts(&text, "v").unwrap();
        let expected: Vec<VerdictRow> = verdicts.iter().map(VerdictRow::from).collect();
        assert_eq!(rows, expected);
        assert!(rows[0].stringent_relevant && !rows[1].relevant);
    }

    proptest! {
        #[test]
        fn stringent_implies_relevant(seed in any::<u64>(), th in 0.0f64..1.0) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = crate::matching::vf2::tests::random_graph(&mut rng, 9);
            // give random nodes texts from the toy vocabulary
            let words = ["aspirin", "mortality", "death", "hospital", "therapy"];
            let nodes: Vec<NodeKey> = g.nodes().cloned().collect();
            for (i, n) in nodes.iter().enumerate() {
                g.add_provenance(n, words[(i + seed as usize) % words.len()]);
            }
            let v = judge_relevancy(&g, &cmit4(), &toy(), th);
            prop_assert!(!v.stringent_relevant || v.relevant);
            for outcome in v.patterns.values() {
                prop_assert!(outcome.accepted.iter().all(|b| outcome.found.contains(b)));
            }
        }
    }
}
