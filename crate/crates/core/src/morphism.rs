//! Graph morphisms: validation, composition, and brute-force hom-set search.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{EdgeId, Elem, Graph, NodeId};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum MorphismError {
    #[error("missing mapping for source {0}")]
    MissingMapping(Elem),
    #[error("mapping given for {0}, which is not in the source graph")]
    ExtraneousMapping(Elem),
    #[error("{from} is mapped to `{to}`, which is not in the target graph")]
    UnknownTarget { from: Elem, to: String },
    #[error("incidence violation on edge `{edge}`: {detail}")]
    IncidenceViolation { edge: EdgeId, detail: String },
    #[error("endpoint mismatch: target of the first morphism is not the source of the second")]
    EndpointMismatch,
}

/// Size guard for the exhaustive hom-set oracles.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EnumBound {
    /// Upper bound on `|nodes(g)| * |nodes(h)|`.
    pub node_pairs: usize,
    /// Upper bound on `|edges(g)| * |edges(h)|`.
    pub edge_pairs: usize,
}

impl Default for EnumBound {
    /// Four nodes and four edges on each side.
    fn default() -> Self {
        Self {
            node_pairs: 16,
            edge_pairs: 16,
        }
    }
}

impl EnumBound {
    pub const fn new(node_pairs: usize, edge_pairs: usize) -> Self {
        Self { node_pairs, edge_pairs }
    }

    /// A bound for oracle checks on the outputs of constructions, which grow
    /// well beyond their inputs when cloning.
    pub const fn oracle() -> Self {
        Self::new(4096, 16384)
    }

    pub fn check(&self, g: &Graph, h: &Graph) -> Result<(), EnumError> {
        let np = g.node_count().saturating_mul(h.node_count());
        let ep = g.edge_count().saturating_mul(h.edge_count());
        if np > self.node_pairs || ep > self.edge_pairs {
            Err(EnumError::BoundExceeded {
                node_pairs: np,
                edge_pairs: ep,
                bound: *self,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum EnumError {
    #[error("enumeration bound exceeded: {node_pairs} node pairs, {edge_pairs} edge pairs (bound {bound:?})")]
    BoundExceeded {
        node_pairs: usize,
        edge_pairs: usize,
        bound: EnumBound,
    },
}

/// A morphism of directed multigraphs. Always total and incidence-preserving.
#[derive(Clone)]
pub struct GraphMorphism {
    source: Arc<Graph>,
    target: Arc<Graph>,
    nodes: BTreeMap<NodeId, NodeId>,
    edges: BTreeMap<EdgeId, EdgeId>,
}

impl PartialEq for GraphMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.edges == other.edges
            && same_graph(&self.source, &other.source)
            && same_graph(&self.target, &other.target)
    }
}

impl Eq for GraphMorphism {}

impl std::fmt::Debug for GraphMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphMorphism")
            .field("nodes", &self.nodes)
            .field("edges", &self.edges)
            .finish()
    }
}

fn same_graph(a: &Arc<Graph>, b: &Arc<Graph>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Checks totality, target membership, and incidence preservation of raw maps.
pub fn validate_morphism(
    source: &Graph,
    target: &Graph,
    nodes: &BTreeMap<NodeId, NodeId>,
    edges: &BTreeMap<EdgeId, EdgeId>,
) -> Result<(), Vec<MorphismError>> {
    let mut errors = Vec::new();
    for n in source.nodes() {
        match nodes.get(n) {
            None => errors.push(MorphismError::MissingMapping(Elem::Node(n.clone()))),
            Some(t) if !target.has_node(t) => errors.push(MorphismError::UnknownTarget {
                from: Elem::Node(n.clone()),
                to: t.to_string(),
            }),
            Some(_) => {}
        }
    }
    for n in nodes.keys() {
        if !source.has_node(n) {
            errors.push(MorphismError::ExtraneousMapping(Elem::Node(n.clone())));
        }
    }
    for e in edges.keys() {
        if !source.has_edge(e) {
            errors.push(MorphismError::ExtraneousMapping(Elem::Edge(e.clone())));
        }
    }
    for (id, e) in source.edges() {
        let Some(image) = edges.get(id) else {
            errors.push(MorphismError::MissingMapping(Elem::Edge(id.clone())));
            continue;
        };
        let Some(te) = target.edge(image) else {
            errors.push(MorphismError::UnknownTarget {
                from: Elem::Edge(id.clone()),
                to: image.to_string(),
            });
            continue;
        };
        if let Some(s) = nodes.get(&e.src) {
            if s != &te.src {
                errors.push(MorphismError::IncidenceViolation {
                    edge: id.clone(),
                    detail: format!("source maps to `{s}` but image edge `{image}` starts at `{}`", te.src),
                });
            }
        }
        if let Some(t) = nodes.get(&e.tgt) {
            if t != &te.tgt {
                errors.push(MorphismError::IncidenceViolation {
                    edge: id.clone(),
                    detail: format!("target maps to `{t}` but image edge `{image}` ends at `{}`", te.tgt),
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

impl GraphMorphism {
    pub fn new(
        source: Arc<Graph>,
        target: Arc<Graph>,
        nodes: BTreeMap<NodeId, NodeId>,
        edges: BTreeMap<EdgeId, EdgeId>,
    ) -> Result<Self, Vec<MorphismError>> {
        validate_morphism(&source, &target, &nodes, &edges)?;
        Ok(Self {
            source,
            target,
            nodes,
            edges,
        })
    }

    /// Builds from string pairs; panics on invalid input. For fixtures.
    pub fn from_pairs(
        source: &Arc<Graph>,
        target: &Arc<Graph>,
        nodes: &[(&str, &str)],
        edges: &[(&str, &str)],
    ) -> Self {
        Self::new(
            source.clone(),
            target.clone(),
            nodes.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect(),
            edges.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect(),
        )
        .unwrap_or_else(|errs| panic!("invalid fixture morphism: {errs:?}"))
    }

    pub(crate) fn new_unchecked(
        source: Arc<Graph>,
        target: Arc<Graph>,
        nodes: BTreeMap<NodeId, NodeId>,
        edges: BTreeMap<EdgeId, EdgeId>,
    ) -> Self {
        debug_assert!(
            validate_morphism(&source, &target, &nodes, &edges).is_ok(),
            "construction produced an invalid morphism"
        );
        Self {
            source,
            target,
            nodes,
            edges,
        }
    }

    pub fn identity(g: &Arc<Graph>) -> Self {
        Self {
            source: g.clone(),
            target: g.clone(),
            nodes: g.nodes().map(|n| (n.clone(), n.clone())).collect(),
            edges: g.edges().map(|(e, _)| (e.clone(), e.clone())).collect(),
        }
    }

    pub fn source(&self) -> &Arc<Graph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.target
    }

    pub fn node_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.nodes
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, EdgeId> {
        &self.edges
    }

    pub fn node(&self, n: &NodeId) -> &NodeId {
        &self.nodes[n]
    }

    pub fn edge(&self, e: &EdgeId) -> &EdgeId {
        &self.edges[e]
    }

    /// The `S`-image of the morphism on one element.
    pub fn apply(&self, x: &Elem) -> Elem {
        match x {
            Elem::Node(n) => Elem::Node(self.nodes[n].clone()),
            Elem::Edge(e) => Elem::Edge(self.edges[e].clone()),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GraphMorphism) -> Result<GraphMorphism, MorphismError> {
        compose(self, next)
    }

    pub fn is_injective(&self) -> bool {
        is_injective(self)
    }

    /// Preimage of a target node, in source identifier order.
    pub fn node_preimage<'a>(&'a self, n: &'a NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.nodes.iter().filter(move |(_, t)| *t == n).map(|(s, _)| s)
    }

    pub fn edge_preimage<'a>(&'a self, e: &'a EdgeId) -> impl Iterator<Item = &'a EdgeId> + 'a {
        self.edges.iter().filter(move |(_, t)| *t == e).map(|(s, _)| s)
    }

    pub fn elem_preimage(&self, x: &Elem) -> Vec<Elem> {
        match x {
            Elem::Node(n) => self.node_preimage(n).cloned().map(Elem::Node).collect(),
            Elem::Edge(e) => self.edge_preimage(e).cloned().map(Elem::Edge).collect(),
        }
    }

    pub fn with_source(&self, source: Arc<Graph>) -> Self {
        debug_assert!(*source == *self.source);
        Self { source, ..self.clone() }
    }

    pub fn with_target(&self, target: Arc<Graph>) -> Self {
        debug_assert!(*target == *self.target);
        Self { target, ..self.clone() }
    }
}

/// Function composition `g ∘ f`: apply `f` first.
pub fn compose(f: &GraphMorphism, g: &GraphMorphism) -> Result<GraphMorphism, MorphismError> {
    if !same_graph(&f.target, &g.source) {
        return Err(MorphismError::EndpointMismatch);
    }
    Ok(GraphMorphism {
        source: f.source.clone(),
        target: g.target.clone(),
        nodes: f.nodes.iter().map(|(s, t)| (s.clone(), g.nodes[t].clone())).collect(),
        edges: f.edges.iter().map(|(s, t)| (s.clone(), g.edges[t].clone())).collect(),
    })
}

/// True iff the node map and the edge map are both injective.
pub fn is_injective(f: &GraphMorphism) -> bool {
    let mut seen_nodes = std::collections::BTreeSet::new();
    let mut seen_edges = std::collections::BTreeSet::new();
    f.nodes.values().all(|t| seen_nodes.insert(t)) && f.edges.values().all(|t| seen_edges.insert(t))
}

type NodeFilter<'a> = &'a dyn Fn(&NodeId, &NodeId) -> bool;
type EdgeFilter<'a> = &'a dyn Fn(&EdgeId, &EdgeId) -> bool;

/// Backtracking search over graph morphisms `source -> target`.
///
/// Candidates are tried in identifier order, so results come out
/// lexicographically ordered by the images of the source nodes (in source
/// order) followed by the images of the source edges.
pub struct HomSearch<'a> {
    source: &'a Graph,
    target: &'a Graph,
    injective: bool,
    bijective: bool,
    node_ok: Option<NodeFilter<'a>>,
    edge_ok: Option<EdgeFilter<'a>>,
}

impl<'a> HomSearch<'a> {
    pub fn new(source: &'a Graph, target: &'a Graph) -> Self {
        Self {
            source,
            target,
            injective: false,
            bijective: false,
            node_ok: None,
            edge_ok: None,
        }
    }

    pub fn injective(mut self, yes: bool) -> Self {
        self.injective = yes;
        self
    }

    /// Restrict to bijections; implies injectivity and prunes on edge
    /// multiplicities between already mapped node pairs.
    pub fn bijective(mut self, yes: bool) -> Self {
        self.bijective = yes;
        if yes {
            self.injective = true;
        }
        self
    }

    pub fn nodes_where(mut self, f: &'a dyn Fn(&NodeId, &NodeId) -> bool) -> Self {
        self.node_ok = Some(f);
        self
    }

    pub fn edges_where(mut self, f: &'a dyn Fn(&EdgeId, &EdgeId) -> bool) -> Self {
        self.edge_ok = Some(f);
        self
    }

    /// Visits every morphism; the visitor may stop the search early.
    pub fn for_each<F>(&self, mut visit: F)
    where
        F: FnMut(&BTreeMap<NodeId, NodeId>, &BTreeMap<EdgeId, EdgeId>) -> ControlFlow<()>,
    {
        let target_nodes: Vec<&NodeId> = self.target.nodes().collect();
        let target_edges: Vec<&EdgeId> = self.target.edges().map(|(e, _)| e).collect();
        self.for_each_indexed(|node_img, edge_img| {
            let nodes = node_img
                .iter()
                .zip(self.source.nodes())
                .map(|(&t, s)| (s.clone(), target_nodes[t].clone()))
                .collect();
            let edges = edge_img
                .iter()
                .zip(self.source.edges())
                .map(|(&t, (s, _))| (s.clone(), target_edges[t].clone()))
                .collect();
            visit(&nodes, &edges)
        });
    }

    /// Like [`HomSearch::for_each`], with images given as positions in the
    /// iteration order of the target's nodes and edges, indexed by the
    /// positions of the source's.
    pub fn for_each_indexed<F>(&self, mut visit: F)
    where
        F: FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    {
        if self.bijective
            && (self.source.node_count() != self.target.node_count()
                || self.source.edge_count() != self.target.edge_count())
        {
            return;
        }
        let plan = SearchPlan::new(self);
        let mut state = SearchState {
            node_img: vec![usize::MAX; plan.sn.len()],
            edge_img: vec![usize::MAX; plan.se.len()],
            node_used: vec![false; plan.tn.len()],
            edge_used: vec![false; plan.te.len()],
        };
        let _ = plan.assign_node(0, &mut state, &mut |st: &SearchState| visit(&st.node_img, &st.edge_img));
    }

    pub fn collect(&self, source: &Arc<Graph>, target: &Arc<Graph>) -> Vec<GraphMorphism> {
        let mut out = Vec::new();
        self.for_each(|n, e| {
            out.push(GraphMorphism {
                source: source.clone(),
                target: target.clone(),
                nodes: n.clone(),
                edges: e.clone(),
            });
            ControlFlow::Continue(())
        });
        out
    }

    pub fn count(&self) -> usize {
        let mut c = 0usize;
        self.for_each(|_, _| {
            c += 1;
            ControlFlow::Continue(())
        });
        c
    }

    pub fn first(&self, source: &Arc<Graph>, target: &Arc<Graph>) -> Option<GraphMorphism> {
        let mut found = None;
        self.for_each(|n, e| {
            found = Some(GraphMorphism {
                source: source.clone(),
                target: target.clone(),
                nodes: n.clone(),
                edges: e.clone(),
            });
            ControlFlow::Break(())
        });
        found
    }
}

struct SearchPlan<'a> {
    sn: Vec<NodeId>,
    tn: Vec<NodeId>,
    /// (id, src index, tgt index)
    se: Vec<(EdgeId, usize, usize)>,
    te: Vec<(EdgeId, usize, usize)>,
    node_cands: Vec<Vec<usize>>,
    /// Target edges grouped by endpoint pair, each group in id order.
    te_by_ends: BTreeMap<(usize, usize), Vec<usize>>,
    /// Source edges whose later endpoint is node `i`.
    edges_closing_at: Vec<Vec<usize>>,
    source_mult: BTreeMap<(usize, usize), usize>,
    injective: bool,
    bijective: bool,
    edge_ok: Option<EdgeFilter<'a>>,
}

struct SearchState {
    node_img: Vec<usize>,
    edge_img: Vec<usize>,
    node_used: Vec<bool>,
    edge_used: Vec<bool>,
}

impl<'a> SearchPlan<'a> {
    fn new(search: &HomSearch<'a>) -> Self {
        let sn: Vec<NodeId> = search.source.nodes().cloned().collect();
        let tn: Vec<NodeId> = search.target.nodes().cloned().collect();
        let sidx: BTreeMap<&NodeId, usize> = sn.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let tidx: BTreeMap<&NodeId, usize> = tn.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let se: Vec<(EdgeId, usize, usize)> = search
            .source
            .edges()
            .map(|(id, e)| (id.clone(), sidx[&e.src], sidx[&e.tgt]))
            .collect();
        let te: Vec<(EdgeId, usize, usize)> = search
            .target
            .edges()
            .map(|(id, e)| (id.clone(), tidx[&e.src], tidx[&e.tgt]))
            .collect();
        let mut te_by_ends: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, (_, s, t)) in te.iter().enumerate() {
            te_by_ends.entry((*s, *t)).or_default().push(i);
        }
        let mut edges_closing_at = vec![Vec::new(); sn.len()];
        let mut source_mult = BTreeMap::new();
        for (i, (_, s, t)) in se.iter().enumerate() {
            edges_closing_at[(*s).max(*t)].push(i);
            *source_mult.entry((*s, *t)).or_insert(0usize) += 1;
        }
        let node_cands = sn
            .iter()
            .map(|s| {
                (0..tn.len())
                    .filter(|&t| search.node_ok.is_none_or(|f| f(s, &tn[t])))
                    .collect()
            })
            .collect();
        Self {
            sn,
            tn,
            se,
            te,
            node_cands,
            te_by_ends,
            edges_closing_at,
            source_mult,
            injective: search.injective,
            bijective: search.bijective,
            edge_ok: search.edge_ok,
        }
    }

    fn edge_candidates(&self, e: usize, st: &SearchState) -> &[usize] {
        let (_, s, t) = self.se[e];
        self.te_by_ends
            .get(&(st.node_img[s], st.node_img[t]))
            .map_or(&[], |v| v.as_slice())
    }

    fn edge_allowed(&self, e: usize, cand: usize) -> bool {
        self.edge_ok.is_none_or(|f| f(&self.se[e].0, &self.te[cand].0))
    }

    /// Cheap feasibility check once both endpoints of some source edges are fixed.
    fn closing_edges_feasible(&self, node: usize, st: &SearchState) -> bool {
        for &e in &self.edges_closing_at[node] {
            let cands = self.edge_candidates(e, st);
            if !cands.iter().any(|&c| self.edge_allowed(e, c)) {
                return false;
            }
        }
        if self.bijective {
            // multiplicities between mapped pairs must agree exactly
            for j in 0..=node {
                for (a, b) in [(node, j), (j, node)] {
                    let ms = self.source_mult.get(&(a, b)).copied().unwrap_or(0);
                    let mt = self
                        .te_by_ends
                        .get(&(st.node_img[a], st.node_img[b]))
                        .map_or(0, |v| v.len());
                    if ms != mt {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn assign_node(
        &self,
        i: usize,
        st: &mut SearchState,
        visit: &mut dyn FnMut(&SearchState) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == self.sn.len() {
            return self.assign_edge(0, st, visit);
        }
        for &cand in &self.node_cands[i] {
            if self.injective && st.node_used[cand] {
                continue;
            }
            st.node_img[i] = cand;
            st.node_used[cand] = true;
            let feasible = self.closing_edges_feasible(i, st);
            let flow = if feasible {
                self.assign_node(i + 1, st, visit)
            } else {
                ControlFlow::Continue(())
            };
            st.node_used[cand] = false;
            st.node_img[i] = usize::MAX;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn assign_edge(
        &self,
        i: usize,
        st: &mut SearchState,
        visit: &mut dyn FnMut(&SearchState) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == self.se.len() {
            return visit(st);
        }
        let cands: Vec<usize> = self.edge_candidates(i, st).to_vec();
        for cand in cands {
            if self.injective && st.edge_used[cand] {
                continue;
            }
            if !self.edge_allowed(i, cand) {
                continue;
            }
            st.edge_img[i] = cand;
            st.edge_used[cand] = true;
            let flow = self.assign_edge(i + 1, st, visit);
            st.edge_used[cand] = false;
            st.edge_img[i] = usize::MAX;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Every morphism `g -> h`, lexicographically ordered by identifier images.
pub fn enumerate_morphisms(g: &Arc<Graph>, h: &Arc<Graph>, bound: EnumBound) -> Result<Vec<GraphMorphism>, EnumError> {
    bound.check(g, h)?;
    Ok(HomSearch::new(g, h).collect(g, h))
}

/// A bijective morphism `g -> h` if one exists. The inverse of a bijective
/// graph morphism is again a morphism, so this witnesses an isomorphism.
pub fn is_isomorphic(g: &Arc<Graph>, h: &Arc<Graph>, bound: EnumBound) -> Result<Option<GraphMorphism>, EnumError> {
    bound.check(g, h)?;
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let sig_g = degree_signatures(g);
    let sig_h = degree_signatures(h);
    let node_ok = |a: &NodeId, b: &NodeId| sig_g[a] == sig_h[b];
    Ok(HomSearch::new(g, h).bijective(true).nodes_where(&node_ok).first(g, h))
}

/// (in-degree, out-degree, loops) per node.
pub(crate) fn degree_signatures(g: &Graph) -> BTreeMap<NodeId, (usize, usize, usize)> {
    let mut sig: BTreeMap<NodeId, (usize, usize, usize)> = g.nodes().map(|n| (n.clone(), (0, 0, 0))).collect();
    for (_, e) in g.edges() {
        sig.get_mut(&e.src).unwrap().1 += 1;
        sig.get_mut(&e.tgt).unwrap().0 += 1;
        if e.src == e.tgt {
            sig.get_mut(&e.src).unwrap().2 += 1;
        }
    }
    sig
}

/// The inverse of a bijective morphism.
pub fn inverse(f: &GraphMorphism) -> Option<GraphMorphism> {
    if !is_injective(f) || f.nodes.len() != f.target.node_count() || f.edges.len() != f.target.edge_count() {
        return None;
    }
    Some(GraphMorphism {
        source: f.target.clone(),
        target: f.source.clone(),
        nodes: f.nodes.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        edges: f.edges.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_g() -> Arc<Graph> {
        Arc::new(Graph::from_lists(
            &["m", "n", "p"],
            &[("np", "n", "p"), ("mn", "m", "n"), ("pm", "p", "m")],
        ))
    }

    fn rule_k() -> Arc<Graph> {
        Arc::new(Graph::from_lists(&["m", "m'", "n", "p"], &[]))
    }

    fn rule_l() -> Arc<Graph> {
        Arc::new(Graph::from_lists(&["m", "n", "p"], &[("np", "n", "p")]))
    }

    fn left_leg() -> GraphMorphism {
        GraphMorphism::from_pairs(
            &rule_k(),
            &rule_l(),
            &[("n", "n"), ("m", "m"), ("m'", "m"), ("p", "p")],
            &[],
        )
    }

    #[test]
    fn identity_is_valid_and_injective() {
        let g = lambda_g();
        let id = GraphMorphism::identity(&g);
        assert!(validate_morphism(&g, &g, id.node_map(), id.edge_map()).is_ok());
        assert!(id.is_injective());
    }

    #[test]
    fn left_leg_folds_clone() {
        let l = left_leg();
        assert!(!l.is_injective());
        assert_eq!(l.node_preimage(&"m".into()).count(), 2);
    }

    #[test]
    fn incidence_violation_is_reported() {
        let l = rule_l();
        let g = lambda_g();
        let nodes = [("n", "m"), ("m", "m"), ("p", "p")]
            .iter()
            .map(|(a, b)| ((*a).into(), (*b).into()))
            .collect();
        let edges = [("np", "np")].iter().map(|(a, b)| ((*a).into(), (*b).into())).collect();
        let errs = validate_morphism(&l, &g, &nodes, &edges).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, MorphismError::IncidenceViolation { .. })));
    }

    #[test]
    fn missing_mapping_is_reported() {
        let errs = validate_morphism(&rule_l(), &lambda_g(), &BTreeMap::new(), &BTreeMap::new()).unwrap_err();
        assert_eq!(errs.len(), 4);
    }

    #[test]
    fn compose_with_identity() {
        let l = left_leg();
        let id = GraphMorphism::identity(&rule_k());
        assert_eq!(compose(&id, &l).unwrap(), l);
        let id_l = GraphMorphism::identity(&rule_l());
        assert_eq!(compose(&l, &id_l).unwrap(), l);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let l = left_leg();
        assert_eq!(compose(&l, &l), Err(MorphismError::EndpointMismatch));
    }

    #[test]
    fn diagonal_of_the_lambda_step() {
        let m = GraphMorphism::from_pairs(
            &rule_l(),
            &lambda_g(),
            &[("n", "n"), ("m", "m"), ("p", "p")],
            &[("np", "np")],
        );
        assert!(m.is_injective());
        let diag = compose(&left_leg(), &m).unwrap();
        assert_eq!(diag.node(&"m'".into()).as_str(), "m");
        assert_eq!(diag.source().node_count(), 4);
    }

    #[test]
    fn enumerate_small_cases() {
        let one = Arc::new(Graph::from_lists(&["a"], &[]));
        let two = Arc::new(Graph::from_lists(&["x", "y"], &[]));
        assert_eq!(enumerate_morphisms(&one, &two, EnumBound::default()).unwrap().len(), 2);

        let lp = Arc::new(Graph::from_lists(&["v"], &[("e", "v", "v")]));
        assert!(enumerate_morphisms(&lp, &lambda_g(), EnumBound::default())
            .unwrap()
            .is_empty());
        let homs = enumerate_morphisms(&lp, &lp, EnumBound::default()).unwrap();
        assert_eq!(homs, vec![GraphMorphism::identity(&lp)]);
    }

    #[test]
    fn enumerate_respects_bound() {
        let big = Arc::new(Graph::from_lists(&["a", "b", "c", "d", "e"], &[]));
        assert!(matches!(
            enumerate_morphisms(&big, &big, EnumBound::default()),
            Err(EnumError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let one = Arc::new(Graph::from_lists(&["a", "b"], &[]));
        let two = Arc::new(Graph::from_lists(&["x", "y"], &[]));
        let homs = enumerate_morphisms(&one, &two, EnumBound::default()).unwrap();
        let images: Vec<(String, String)> = homs
            .iter()
            .map(|h| (h.node(&"a".into()).to_string(), h.node(&"b".into()).to_string()))
            .collect();
        let mut sorted = images.clone();
        sorted.sort();
        assert_eq!(images, sorted);
    }

    #[test]
    fn iso_detection() {
        let g = lambda_g();
        assert!(is_isomorphic(&g, &g, EnumBound::default()).unwrap().is_some());
        let renamed = Arc::new(Graph::from_lists(
            &["a", "b", "c"],
            &[("x", "a", "c"), ("y", "b", "a"), ("z", "c", "b")],
        ));
        let iso = is_isomorphic(&g, &renamed, EnumBound::default()).unwrap().unwrap();
        assert!(inverse(&iso).is_some());
        let four = Arc::new(Graph::from_lists(
            &["m", "m'", "n", "p"],
            &[("a", "m", "n"), ("b", "m'", "n"), ("c", "p", "m"), ("d", "p", "m'")],
        ));
        assert!(is_isomorphic(&g, &four, EnumBound::oracle()).unwrap().is_none());
    }
}
