use std::collections::{BTreeSet, HashMap, HashSet};

use crate::ontology::{ConceptType, CqmRelationType, PatternEdge, PatternGraph};
use crate::triple_store::{DocumentGraph, NodeKey};

/// Document nodes bound to pattern nodes, position for position.
pub type Binding = Vec<NodeKey>;

/// Indexed view of a document graph.
struct Target<'g> {
    nodes: Vec<&'g NodeKey>,
    out: Vec<Vec<(CqmRelationType, usize)>>,
    inc: Vec<Vec<(CqmRelationType, usize)>>,
    edges: HashSet<(usize, CqmRelationType, usize)>,
    by_type: HashMap<ConceptType, Vec<usize>>,
}

impl<'g> Target<'g> {
    fn new(graph: &'g DocumentGraph) -> Self {
        let nodes: Vec<&NodeKey> = graph.nodes().collect();
        let index: HashMap<&NodeKey, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut out = vec![Vec::new(); nodes.len()];
        let mut inc = vec![Vec::new(); nodes.len()];
        let mut edges = HashSet::new();
        for (s, r, o) in graph.edges() {
            let (s, o) = (index[s], index[o]);
            out[s].push((*r, o));
            inc[o].push((*r, s));
            edges.insert((s, *r, o));
        }
        let mut by_type: HashMap<ConceptType, Vec<usize>> = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            by_type.entry(n.concept).or_default().push(i);
        }
        Target {
            nodes,
            out,
            inc,
            edges,
            by_type,
        }
    }

    fn of_type(&self, concept: ConceptType) -> &[usize] {
        self.by_type.get(&concept).map(Vec::as_slice).unwrap_or(&[])
    }

    fn degree(&self, t: usize, rel: CqmRelationType, outgoing: bool) -> usize {
        let list = if outgoing { &self.out[t] } else { &self.inc[t] };
        list.iter().filter(|(r, _)| *r == rel).count()
    }
}

/// How the search reaches a pattern node: through an edge to an earlier
/// node, or by scanning all document nodes of its type.
#[derive(Clone, Copy)]
enum Source {
    Scan,
    /// `earlier --rel--> node`
    From(usize, CqmRelationType),
    /// `node --rel--> earlier`
    To(usize, CqmRelationType),
}

struct Plan {
    order: Vec<usize>,
    source: Vec<Source>,
    /// Per pattern node: edges and non-edges to nodes placed no later.
    edges: Vec<Vec<PatternEdge>>,
    not_edges: Vec<Vec<PatternEdge>>,
    /// Per pattern node: (relation, outgoing, distinct neighbours) for the
    /// degree look-ahead.
    degrees: Vec<Vec<(CqmRelationType, bool, usize)>>,
}

impl Plan {
    /// Rarest concept type first, then the node most connected to the nodes
    /// already placed.
    fn new(pattern: &PatternGraph, target: &Target) -> Plan {
        let n = pattern.nodes.len();
        let edges: BTreeSet<PatternEdge> = pattern.edges.iter().copied().collect();
        let rarity = |i: usize| target.of_type(pattern.nodes[i].concept).len();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut source = vec![Source::Scan; n];
        while order.len() < n {
            let links = |i: usize| {
                edges
                    .iter()
                    .filter(|e| (e.from == i && placed[e.to]) || (e.to == i && placed[e.from]))
                    .count()
            };
            let next = (0..n)
                .filter(|i| !placed[*i])
                .min_by_key(|i| (std::cmp::Reverse(links(*i)), rarity(*i), *i))
                .expect("unplaced node remains");
            source[next] = edges
                .iter()
                .find_map(|e| {
                    if e.to == next && e.from != next && placed[e.from] {
                        Some(Source::From(e.from, e.relation))
                    } else if e.from == next && e.to != next && placed[e.to] {
                        Some(Source::To(e.to, e.relation))
                    } else {
                        None
                    }
                })
                .unwrap_or(Source::Scan);
            placed[next] = true;
            order.push(next);
        }

        let mut position = vec![0; n];
        for (k, i) in order.iter().enumerate() {
            position[*i] = k;
        }
        // attach each edge to whichever endpoint is placed last
        let attach = |list: &mut Vec<Vec<PatternEdge>>, e: &PatternEdge| {
            let owner = if position[e.from] >= position[e.to] {
                e.from
            } else {
                e.to
            };
            list[owner].push(*e);
        };
        let mut by_node = vec![Vec::new(); n];
        for e in &edges {
            attach(&mut by_node, e);
        }
        let mut not_by_node = vec![Vec::new(); n];
        for e in pattern.not_edges.iter().collect::<BTreeSet<_>>() {
            attach(&mut not_by_node, e);
        }
        let mut degrees = vec![Vec::new(); n];
        for (i, d) in degrees.iter_mut().enumerate() {
            for rel in CqmRelationType::ALL {
                for outgoing in [true, false] {
                    let count = edges
                        .iter()
                        .filter(|e| e.relation == rel && if outgoing { e.from == i } else { e.to == i })
                        .count();
                    if count > 0 {
                        d.push((rel, outgoing, count));
                    }
                }
            }
        }
        Plan {
            order,
            source,
            edges: by_node,
            not_edges: not_by_node,
            degrees,
        }
    }
}

struct Search<'a, 'g> {
    pattern: &'a PatternGraph,
    target: &'a Target<'g>,
    plan: &'a Plan,
    core: Vec<Option<usize>>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
}

impl Search<'_, '_> {
    fn candidates(&self, p: usize) -> Vec<usize> {
        match self.plan.source[p] {
            Source::Scan => self.target.of_type(self.pattern.nodes[p].concept).to_vec(),
            Source::From(q, rel) => {
                let tq = self.core[q].expect("source node is mapped");
                self.target.out[tq]
                    .iter()
                    .filter(|(r, _)| *r == rel)
                    .map(|(_, t)| *t)
                    .collect()
            }
            Source::To(q, rel) => {
                let tq = self.core[q].expect("source node is mapped");
                self.target.inc[tq]
                    .iter()
                    .filter(|(r, _)| *r == rel)
                    .map(|(_, t)| *t)
                    .collect()
            }
        }
    }

    fn mapped(&self, p: usize, t: usize, i: usize) -> usize {
        if i == p {
            t
        } else {
            self.core[i].expect("attached edges end at mapped nodes")
        }
    }

    fn feasible(&self, p: usize, t: usize) -> bool {
        if self.used[t] || self.target.nodes[t].concept != self.pattern.nodes[p].concept {
            return false;
        }
        let present = |e: &PatternEdge| {
            self.target
                .edges
                .contains(&(self.mapped(p, t, e.from), e.relation, self.mapped(p, t, e.to)))
        };
        self.plan.degrees[p]
            .iter()
            .all(|(rel, outgoing, count)| self.target.degree(t, *rel, *outgoing) >= *count)
            && self.plan.edges[p].iter().all(present)
            && !self.plan.not_edges[p].iter().any(present)
    }

    fn extend(&mut self, depth: usize) {
        if depth == self.plan.order.len() {
            self.found
                .push(self.core.iter().map(|t| t.expect("complete mapping")).collect());
            return;
        }
        let p = self.plan.order[depth];
        for t in self.candidates(p) {
            if self.feasible(p, t) {
                self.core[p] = Some(t);
                self.used[t] = true;
                self.extend(depth + 1);
                self.used[t] = false;
                self.core[p] = None;
            }
        }
    }
}

/// All injective, type-preserving embeddings of `pattern` in `graph`.
///
/// Every pattern edge must be present with its relation and no `not_edges`
/// edge may be. Extra document edges are allowed. Each binding lists the
/// document node of every pattern node, in pattern order; bindings are
/// sorted and distinct.
pub fn find_pattern_subgraphs(graph: &DocumentGraph, pattern: &PatternGraph) -> Vec<Binding> {
    if pattern.nodes.is_empty() {
        return Vec::new();
    }
    let target = Target::new(graph);
    let plan = Plan::new(pattern, &target);
    let mut search = Search {
        pattern,
        target: &target,
        plan: &plan,
        core: vec![None; pattern.nodes.len()],
        used: vec![false; target.nodes.len()],
        found: Vec::new(),
    };
    search.extend(0);
    let mut bindings: Vec<Binding> = search
        .found
        .into_iter()
        .map(|m| m.into_iter().map(|t| target.nodes[t].clone()).collect())
        .collect();
    bindings.sort();
    bindings
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ontology::{pattern_graphs, PatternName, PatternNode};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive oracle: every injection whose images carry the right types,
    /// checked edge by edge.
    pub(crate) fn brute_force(graph: &DocumentGraph, pattern: &PatternGraph) -> Vec<Binding> {
        fn walk(
            k: usize,
            pattern: &PatternGraph,
            nodes: &[NodeKey],
            graph: &DocumentGraph,
            current: &mut Vec<NodeKey>,
            out: &mut Vec<Binding>,
        ) {
            if k == pattern.nodes.len() {
                let ok = pattern
                    .edges
                    .iter()
                    .all(|e| graph.has_edge(&current[e.from], e.relation, &current[e.to]))
                    && pattern
                        .not_edges
                        .iter()
                        .all(|e| !graph.has_edge(&current[e.from], e.relation, &current[e.to]));
                if ok {
                    out.push(current.clone());
                }
                return;
            }
            for n in nodes {
                if n.concept == pattern.nodes[k].concept && !current.contains(n) {
                    current.push(n.clone());
                    walk(k + 1, pattern, nodes, graph, current, out);
                    current.pop();
                }
            }
        }
        if pattern.nodes.is_empty() {
            return Vec::new();
        }
        let nodes: Vec<NodeKey> = graph.nodes().cloned().collect();
        let mut out = Vec::new();
        walk(0, pattern, &nodes, graph, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Random document graph with up to `max_nodes` nodes. Most edges carry a
    /// relation legal for their endpoint types so the templates can match.
    pub(crate) fn random_graph(rng: &mut impl Rng, max_nodes: usize) -> DocumentGraph {
        let mut g = DocumentGraph::new("g");
        let n = rng.gen_range(0..=max_nodes);
        let nodes: Vec<NodeKey> = (0..n)
            .map(|i| NodeKey::new(format!("n{i}"), ConceptType::ALL[rng.gen_range(0..5)]))
            .collect();
        for node in &nodes {
            g.add_node(node.clone());
        }
        let density = rng.gen_range(0.1..0.6);
        for a in &nodes {
            for b in &nodes {
                if !rng.gen_bool(density) {
                    continue;
                }
                let legal: Vec<CqmRelationType> = CqmRelationType::ALL
                    .into_iter()
                    .filter(|r| r.legal_pairs().contains(&(a.concept, b.concept)))
                    .collect();
                let rel = if !legal.is_empty() && rng.gen_bool(0.85) {
                    legal[rng.gen_range(0..legal.len())]
                } else {
                    CqmRelationType::ALL[rng.gen_range(0..5)]
                };
                g.add_edge(a.clone(), rel, b.clone());
            }
        }
        g
    }

    fn random_edge(rng: &mut impl Rng, n: usize) -> PatternEdge {
        PatternEdge {
            from: rng.gen_range(0..n),
            relation: CqmRelationType::ALL[rng.gen_range(0..5)],
            to: rng.gen_range(0..n),
        }
    }

    /// Random graph that, half the time, also contains a copy of one template
    /// wired onto existing nodes where types allow.
    pub(crate) fn planted_graph(rng: &mut impl Rng, max_nodes: usize) -> DocumentGraph {
        let mut g = random_graph(rng, max_nodes.saturating_sub(5));
        if rng.gen_bool(0.5) {
            let templates = pattern_graphs();
            let t = &templates[rng.gen_range(0..templates.len())];
            let existing: Vec<NodeKey> = g.nodes().cloned().collect();
            let mut keys: Vec<NodeKey> = Vec::new();
            for (i, n) in t.nodes.iter().enumerate() {
                let reuse: Vec<&NodeKey> = existing
                    .iter()
                    .filter(|k| k.concept == n.concept && !keys.contains(k))
                    .collect();
                let key = if !reuse.is_empty() && rng.gen_bool(0.5) {
                    reuse[rng.gen_range(0..reuse.len())].clone()
                } else {
                    NodeKey::new(format!("t{i}"), n.concept)
                };
                keys.push(key);
            }
            for k in &keys {
                g.add_node(k.clone());
            }
            for e in &t.edges {
                g.add_edge(keys[e.from].clone(), e.relation, keys[e.to].clone());
            }
        }
        g
    }

    pub(crate) fn random_pattern(rng: &mut impl Rng) -> PatternGraph {
        let n = rng.gen_range(1..=4);
        let nodes = (0..n)
            .map(|i| PatternNode {
                id: format!("p{i}"),
                concept: ConceptType::ALL[rng.gen_range(0..5)],
                optional: false,
            })
            .collect();
        let edges = (0..rng.gen_range(0..5)).map(|_| random_edge(rng, n)).collect();
        let not_edges = (0..rng.gen_range(0..2)).map(|_| random_edge(rng, n)).collect();
        PatternGraph {
            name: PatternName::Numerator,
            nodes,
            edges,
            not_edges,
        }
    }

    fn instantiated(pattern: &PatternGraph) -> DocumentGraph {
        let mut g = DocumentGraph::new("d");
        let keys: Vec<NodeKey> = pattern.nodes.iter().map(|n| NodeKey::new(&n.id, n.concept)).collect();
        for k in &keys {
            g.add_node(k.clone());
        }
        for e in &pattern.edges {
            g.add_edge(keys[e.from].clone(), e.relation, keys[e.to].clone());
        }
        g
    }

    #[test]
    fn template_finds_itself_once() {
        for pattern in pattern_graphs() {
            let g = instantiated(&pattern);
            let found = find_pattern_subgraphs(&g, &pattern);
            let identity: Binding = pattern.nodes.iter().map(|n| NodeKey::new(&n.id, n.concept)).collect();
            assert_eq!(found, vec![identity], "{}", pattern.name);
        }
    }

    #[test]
    fn empty_graph_has_no_bindings() {
        for pattern in pattern_graphs() {
            assert!(find_pattern_subgraphs(&DocumentGraph::new("e"), &pattern).is_empty());
        }
    }

    #[test]
    fn forbidden_edge_blocks_opportunity() {
        let pattern = pattern_graphs()
            .into_iter()
            .find(|p| p.name == PatternName::Opportunity)
            .unwrap()
            .required_only();
        let mut g = instantiated(&pattern);
        assert_eq!(find_pattern_subgraphs(&g, &pattern).len(), 1);
        let e = pattern.not_edges[0];
        let key = |i: usize| NodeKey::new(&pattern.nodes[i].id, pattern.nodes[i].concept);
        g.add_edge(key(e.from), e.relation, key(e.to));
        assert!(find_pattern_subgraphs(&g, &pattern).is_empty());
    }

    #[test]
    fn two_candidates_give_two_bindings() {
        let pattern = pattern_graphs()
            .into_iter()
            .find(|p| p.name == PatternName::Numerator)
            .unwrap()
            .required_only();
        let mut g = instantiated(&pattern);
        // a second change concept wired the same way
        let cc = pattern.node_index("change_concept").unwrap();
        let extra = NodeKey::new("other", ConceptType::ChangeConcept);
        for e in pattern.edges.iter().filter(|e| e.from == cc || e.to == cc) {
            let key = |i: usize| {
                if i == cc {
                    extra.clone()
                } else {
                    NodeKey::new(&pattern.nodes[i].id, pattern.nodes[i].concept)
                }
            };
            g.add_edge(key(e.from), e.relation, key(e.to));
        }
        let found = find_pattern_subgraphs(&g, &pattern);
        assert_eq!(found.len(), 2);
        assert_eq!(found, brute_force(&g, &pattern));
    }

    #[test]
    fn seeded_templates_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut nonempty = 0;
        for _ in 0..300 {
            let g = planted_graph(&mut rng, 10);
            assert!(g.node_count() <= 10);
            for pattern in pattern_graphs() {
                let found = find_pattern_subgraphs(&g, &pattern);
                assert_eq!(found, brute_force(&g, &pattern));
                nonempty += usize::from(!found.is_empty());
            }
        }
        assert!(nonempty > 100, "only {nonempty} graphs had bindings");
    }

    proptest! {
        #[test]
        fn random_patterns_match_oracle(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, 8);
            let pattern = random_pattern(&mut rng);
            let found = find_pattern_subgraphs(&g, &pattern);
            prop_assert_eq!(&found, &brute_force(&g, &pattern));
            let distinct: BTreeSet<&Binding> = found.iter().collect();
            prop_assert_eq!(distinct.len(), found.len());
        }
    }
}
