//! Exhaustive and random instances: graphs, rule legs, matches, and
//! attributed rules and hosts for both attribute domains.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{AlgTerm, NAT};
use crate::attr::{AttrDomain, AttrGraph};
use crate::engine::{AlgObject, AlgebraDomain, Host, LambdaDomain, RewriteDomain, Rule};
use crate::graph::{EdgeId, Elem, Graph, NodeId};
use crate::lambda::{Term, Type, TypeContext};
use crate::morphism::{GraphMorphism, HomSearch};

fn node_name(i: usize) -> String {
    format!("n{i}")
}

/// Every graph on nodes `n0..n{k}` (`k < max_nodes`) with at most
/// `max_edges` edges, one per multiset of endpoint pairs.
pub fn all_graphs(max_nodes: usize, max_edges: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 0..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        let mut chosen = Vec::new();
        multisets(&pairs, 0, max_edges, &mut chosen, &mut |edges| {
            let mut g = Graph::new();
            for i in 0..n {
                g.add_node(NodeId(node_name(i))).expect("fresh node");
            }
            for (j, (s, t)) in edges.iter().enumerate() {
                g.add_edge(EdgeId(format!("e{j}")), NodeId(node_name(*s)), NodeId(node_name(*t)))
                    .expect("fresh edge");
            }
            out.push(g);
        });
    }
    out
}

fn multisets<T: Clone>(items: &[T], from: usize, left: usize, acc: &mut Vec<T>, emit: &mut dyn FnMut(&[T])) {
    emit(acc);
    if left == 0 {
        return;
    }
    for i in from..items.len() {
        acc.push(items[i].clone());
        multisets(items, i, left - 1, acc, emit);
        acc.pop();
    }
}

pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> Graph {
    let n = rng.gen_range(0..=max_nodes);
    let mut g = Graph::new();
    for i in 0..n {
        g.add_node(NodeId(node_name(i))).expect("fresh node");
    }
    if n > 0 {
        for j in 0..rng.gen_range(0..=max_edges) {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            g.add_edge(EdgeId(format!("e{j}")), NodeId(node_name(s)), NodeId(node_name(t)))
                .expect("fresh edge");
        }
    }
    g
}

/// A left leg `K -> L` with `copies(n)` preimages `n.0, n.1, ..` of each
/// node; an edge of `L` gets one preimage between a pair of endpoint copies
/// when `keep` says so.
pub fn left_leg(
    l: &Arc<Graph>,
    copies: impl Fn(&NodeId) -> usize,
    mut keep: impl FnMut(&EdgeId, &NodeId, &NodeId) -> bool,
) -> GraphMorphism {
    let mut k = Graph::new();
    let mut nodes = BTreeMap::new();
    let mut fibers: BTreeMap<&NodeId, Vec<NodeId>> = BTreeMap::new();
    for ln in l.nodes() {
        let ks: Vec<NodeId> = (0..copies(ln)).map(|i| NodeId(format!("{ln}.{i}"))).collect();
        for kn in &ks {
            k.add_node(kn.clone()).expect("fresh node");
            nodes.insert(kn.clone(), ln.clone());
        }
        fibers.insert(ln, ks);
    }
    let mut edges = BTreeMap::new();
    for (le, e) in l.edges() {
        for ks in &fibers[&e.src] {
            for kt in &fibers[&e.tgt] {
                if keep(le, ks, kt) {
                    let id = EdgeId(format!("{le}.{ks}.{kt}"));
                    k.add_edge(id.clone(), ks.clone(), kt.clone()).expect("fresh edge");
                    edges.insert(id, le.clone());
                }
            }
        }
    }
    GraphMorphism::new(Arc::new(k), l.clone(), nodes, edges).expect("leg is a morphism")
}

/// Each node of `L` gets 0 to `max_copies` preimages (deleted, kept,
/// cloned) and each edge a random subset of its possible preimages.
pub fn random_left_leg<R: Rng>(rng: &mut R, l: &Arc<Graph>, max_copies: usize) -> GraphMorphism {
    let copies: BTreeMap<NodeId, usize> = l.nodes().map(|n| (n.clone(), rng.gen_range(0..=max_copies))).collect();
    left_leg(l, |n| copies[n], |_, _, _| rng.gen_bool(0.5))
}

/// A right leg `K -> R` sending node `n` to `class(n)`, keeping every edge
/// apart, and adding `created` nodes plus one edge from each class into each
/// created node.
pub fn merge_leg(k: &Arc<Graph>, class: impl Fn(&NodeId) -> String, created: usize) -> GraphMorphism {
    let mut rg = Graph::new();
    let nodes: BTreeMap<NodeId, NodeId> = k.nodes().map(|n| (n.clone(), NodeId(class(n)))).collect();
    let classes: BTreeSet<&NodeId> = nodes.values().collect();
    for c in &classes {
        rg.add_node((*c).clone()).expect("fresh node");
    }
    let mut edges = BTreeMap::new();
    for (e, edge) in k.edges() {
        rg.add_edge(e.clone(), nodes[&edge.src].clone(), nodes[&edge.tgt].clone())
            .expect("fresh edge");
        edges.insert(e.clone(), e.clone());
    }
    for i in 0..created {
        let new = NodeId(format!("new{i}"));
        rg.add_node(new.clone()).expect("fresh node");
        for c in &classes {
            rg.add_edge(EdgeId(format!("to{i}.{c}")), (*c).clone(), new.clone())
                .expect("fresh edge");
        }
    }
    GraphMorphism::new(k.clone(), Arc::new(rg), nodes, edges).expect("leg is a morphism")
}

/// A fixed catalogue of spans over `L` covering each kind of step:
/// identity, deletion of everything, full cloning, cloning with edge loss
/// followed by merging, and edge deletion with node creation.
pub fn span_catalogue(l: &Arc<Graph>) -> Vec<(GraphMorphism, GraphMorphism)> {
    let mut out = Vec::new();
    let ident = left_leg(l, |_| 1, |_, _, _| true);
    let id_r = merge_leg(ident.source(), |n| n.to_string(), 0);
    out.push((ident.clone(), id_r));
    let gone = left_leg(l, |_| 0, |_, _, _| true);
    let r = merge_leg(gone.source(), |n| n.to_string(), 0);
    out.push((gone, r));
    let clone = left_leg(l, |_| 2, |_, _, _| true);
    let r = merge_leg(clone.source(), |n| n.to_string(), 0);
    out.push((clone, r));
    let partial = left_leg(l, |_| 2, |_, s, t| s.0.ends_with(".0") && t.0.ends_with(".0"));
    let r = merge_leg(partial.source(), |_| "one".to_string(), 0);
    out.push((partial, r));
    let bare = left_leg(l, |_| 1, |_, _, _| false);
    let r = merge_leg(bare.source(), |n| n.to_string(), 1);
    out.push((bare, r));
    out
}

/// A right leg `K -> R`: random merging of nodes and of parallel edges,
/// plus up to `extra` created nodes and edges.
pub fn random_right_leg<R: Rng>(rng: &mut R, k: &Arc<Graph>, extra: usize) -> GraphMorphism {
    let mut rg = Graph::new();
    let mut nodes = BTreeMap::new();
    let mut classes: Vec<NodeId> = Vec::new();
    for (i, kn) in k.nodes().enumerate() {
        let target = if !classes.is_empty() && rng.gen_bool(0.3) {
            classes.choose(rng).expect("nonempty").clone()
        } else {
            let id = NodeId(format!("r{i}"));
            rg.add_node(id.clone()).expect("fresh node");
            classes.push(id.clone());
            id
        };
        nodes.insert(kn.clone(), target);
    }
    for i in 0..rng.gen_range(0..=extra) {
        let id = NodeId(format!("new{i}"));
        rg.add_node(id.clone()).expect("fresh node");
        classes.push(id);
    }
    let mut edges = BTreeMap::new();
    let mut made: Vec<(EdgeId, NodeId, NodeId)> = Vec::new();
    for (i, (ke, e)) in k.edges().enumerate() {
        let (s, t) = (nodes[&e.src].clone(), nodes[&e.tgt].clone());
        let parallel: Vec<&(EdgeId, NodeId, NodeId)> = made.iter().filter(|(_, a, b)| *a == s && *b == t).collect();
        let target = if !parallel.is_empty() && rng.gen_bool(0.3) {
            parallel.choose(rng).expect("nonempty").0.clone()
        } else {
            let id = EdgeId(format!("f{i}"));
            rg.add_edge(id.clone(), s.clone(), t.clone()).expect("fresh edge");
            made.push((id.clone(), s, t));
            id
        };
        edges.insert(ke.clone(), target);
    }
    if !classes.is_empty() {
        for i in 0..rng.gen_range(0..=extra) {
            let s = classes.choose(rng).expect("nonempty").clone();
            let t = classes.choose(rng).expect("nonempty").clone();
            rg.add_edge(EdgeId(format!("newf{i}")), s, t).expect("fresh edge");
        }
    }
    GraphMorphism::new(k.clone(), Arc::new(rg), nodes, edges).expect("leg is a morphism")
}

/// Every injective morphism `L -> G`.
pub fn injections(l: &Arc<Graph>, g: &Arc<Graph>) -> Vec<GraphMorphism> {
    HomSearch::new(l, g).injective(true).collect(l, g)
}

pub fn random_injection<R: Rng>(rng: &mut R, l: &Arc<Graph>, g: &Arc<Graph>) -> Option<GraphMorphism> {
    injections(l, g).choose(rng).cloned()
}

/// Induced subgraph of `g` on a random nonempty set of at most `max` nodes,
/// keeping a random subset of the edges.
pub fn random_subgraph<R: Rng>(rng: &mut R, g: &Graph, max: usize) -> Graph {
    let mut ns: Vec<&NodeId> = g.nodes().collect();
    ns.shuffle(rng);
    ns.truncate(rng.gen_range(1..=max.max(1)).min(ns.len()));
    let keep: BTreeSet<&NodeId> = ns.into_iter().collect();
    let mut out = Graph::new();
    for n in &keep {
        out.add_node((*n).clone()).expect("fresh node");
    }
    for (e, edge) in g.edges() {
        if keep.contains(&edge.src) && keep.contains(&edge.tgt) && rng.gen_bool(0.7) {
            out.add_edge(e.clone(), edge.src.clone(), edge.tgt.clone())
                .expect("fresh edge");
        }
    }
    out
}

/// Plain legs for one random step together with a host and a match; the
/// left-hand side is a subgraph of the host, so a match exists.
pub struct PlainStep {
    pub l: GraphMorphism,
    pub r: GraphMorphism,
    pub m: GraphMorphism,
}

pub fn random_plain_step<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> PlainStep {
    loop {
        let g = Arc::new(random_graph(rng, max_nodes, max_edges));
        if g.node_count() == 0 {
            continue;
        }
        let lhs = Arc::new(random_subgraph(rng, &g, 3));
        let l = random_left_leg(rng, &lhs, 2);
        let r = random_right_leg(rng, l.source(), 1);
        if let Some(m) = random_injection(rng, &lhs, &g) {
            return PlainStep { l, r, m };
        }
    }
}

/// K elements that may keep an attribute: the sole `r`-preimage of their
/// image.
fn sole_preimages(r: &GraphMorphism) -> BTreeSet<Elem> {
    let k = r.source();
    k.elems().filter(|x| r.elem_preimage(&r.apply(x)).len() == 1).collect()
}

/// Builds attributions of `L`, `K` and `R`, keeping legs preserving.
/// `lhs_attr` attributes each left-hand element; `fresh` builds right-hand
/// attributes for elements whose interface preimages are all `⊥`.
fn attribute_span<V: Clone, R: Rng>(
    rng: &mut R,
    l: &GraphMorphism,
    r: &GraphMorphism,
    attributable: &dyn Fn(&Elem) -> bool,
    lhs_attr: &mut dyn FnMut(&mut R, &Elem) -> V,
    fresh: &mut dyn FnMut(&mut R, &Elem) -> V,
) -> (AttrGraph<V>, AttrGraph<V>, AttrGraph<V>) {
    let lg = l.target();
    let kg = l.source();
    let rg = r.target();
    let mut la = BTreeMap::new();
    for x in lg.elems().filter(|x| attributable(x)) {
        let v = lhs_attr(rng, &x);
        la.insert(x, v);
    }
    let sole = sole_preimages(r);
    let mut ka = BTreeMap::new();
    let mut ra = BTreeMap::new();
    for x in kg.elems().filter(|x| attributable(x)) {
        if sole.contains(&x) && rng.gen_bool(0.5) {
            let v: V = la[&l.apply(&x)].clone();
            ra.insert(r.apply(&x), v.clone());
            ka.insert(x, v);
        }
    }
    for x in rg.elems().filter(|x| attributable(x)) {
        if let std::collections::btree_map::Entry::Vacant(slot) = ra.entry(x) {
            let v = fresh(rng, slot.key());
            slot.insert(v);
        }
    }
    (
        AttrGraph::new(lg.clone(), la).expect("elements of L"),
        AttrGraph::new(kg.clone(), ka).expect("elements of K"),
        AttrGraph::new(rg.clone(), ra).expect("elements of R"),
    )
}

/// Random λ-host: nodes carry one of the base constants `w0..w2`, or the
/// identity on the base type.
pub fn lambda_host<R: Rng>(rng: &mut R, g: &Arc<Graph>) -> Host<LambdaDomain> {
    let object: TypeContext = (0..3).map(|i| (format!("w{i}"), Type::Base)).collect();
    let id = Term::lam("z", Type::Base, Term::var("z"));
    let att = g
        .nodes()
        .map(|n| {
            let v = if rng.gen_bool(0.85) {
                Term::var(format!("w{}", rng.gen_range(0..3)))
            } else {
                id.clone()
            };
            (Elem::Node(n.clone()), v)
        })
        .collect();
    Host {
        object,
        graph: AttrGraph::new(g.clone(), att).expect("host nodes"),
    }
}

/// Random λ-rule over plain legs: every left-hand node binds its own base
/// variable; created attributes apply combinators to those variables.
pub fn lambda_rule<R: Rng>(rng: &mut R, name: &str, l: &GraphMorphism, r: &GraphMorphism) -> Rule<LambdaDomain> {
    let lg = l.target();
    let vars: Vec<String> = lg.nodes().map(|n| format!("x_{n}")).collect();
    let object: TypeContext = vars.iter().map(|v| (v.clone(), Type::Base)).collect();
    let k_comb = Term::lam("a", Type::Base, Term::lam("b", Type::Base, Term::var("a")));
    let id = Term::lam("z", Type::Base, Term::var("z"));
    let domain = LambdaDomain::default();
    let attributable = |x: &Elem| domain.attributable(x);
    let (lhs, interface, rhs) = attribute_span(
        rng,
        l,
        r,
        &attributable,
        &mut |_, x| match x {
            Elem::Node(n) => Term::var(format!("x_{n}")),
            Elem::Edge(_) => unreachable!("edges are unattributed"),
        },
        &mut |rng, _| {
            if vars.is_empty() {
                return id.clone();
            }
            let a = Term::var(vars.choose(rng).expect("nonempty").clone());
            match rng.gen_range(0..3) {
                0 => a,
                1 => Term::app(id.clone(), a),
                _ => {
                    let b = Term::var(vars.choose(rng).expect("nonempty").clone());
                    Term::apps(k_comb.clone(), [a, b])
                }
            }
        },
    );
    Rule {
        name: name.to_string(),
        object,
        lhs,
        interface,
        rhs,
        l: l.clone(),
        r: r.clone(),
        guards: Vec::new(),
    }
}

const EDGE_LABELS: [&str; 2] = ["knows", "stores"];

/// Random algebra host: naturals `0..4` on nodes, edge-label constants on
/// edges.
pub fn algebra_host<R: Rng>(rng: &mut R, g: &Arc<Graph>) -> Host<AlgebraDomain> {
    let mut att = BTreeMap::new();
    for n in g.nodes() {
        att.insert(Elem::Node(n.clone()), AlgTerm::nat(rng.gen_range(0..4)));
    }
    for (e, _) in g.edges() {
        att.insert(
            Elem::Edge(e.clone()),
            AlgTerm::constant(EDGE_LABELS.choose(rng).expect("nonempty")),
        );
    }
    Host {
        object: AlgObject::default(),
        graph: AttrGraph::new(g.clone(), att).expect("host elements"),
    }
}

/// Random algebra rule: node patterns are variables or literals, edge
/// patterns variables of sort `E` or label constants; created attributes
/// are arithmetic over the variables; sometimes a guard.
pub fn algebra_rule<R: Rng>(rng: &mut R, name: &str, l: &GraphMorphism, r: &GraphMorphism) -> Rule<AlgebraDomain> {
    let mut vars: BTreeMap<String, String> = BTreeMap::new();
    let mut nat_vars: Vec<String> = Vec::new();
    let lg = l.target().clone();
    let mut lhs_attr = |rng: &mut R, x: &Elem| -> AlgTerm {
        match x {
            Elem::Node(n) => {
                if rng.gen_bool(0.8) {
                    let v = format!("x_{n}");
                    vars.insert(v.clone(), NAT.to_string());
                    nat_vars.push(v.clone());
                    AlgTerm::Var(v, NAT.to_string())
                } else {
                    AlgTerm::nat(rng.gen_range(0..4))
                }
            }
            Elem::Edge(e) => {
                if rng.gen_bool(0.5) {
                    let v = format!("y_{e}");
                    vars.insert(v.clone(), "E".to_string());
                    AlgTerm::Var(v, "E".to_string())
                } else {
                    AlgTerm::constant(EDGE_LABELS.choose(rng).expect("nonempty"))
                }
            }
        }
    };
    let mut la = BTreeMap::new();
    for x in lg.elems() {
        let v = lhs_attr(rng, &x);
        la.insert(x, v);
    }
    let pick = |rng: &mut R| -> AlgTerm {
        match nat_vars.choose(rng) {
            Some(v) => AlgTerm::Var(v.clone(), NAT.to_string()),
            None => AlgTerm::nat(rng.gen_range(0..4)),
        }
    };
    let mut fresh = |rng: &mut R, x: &Elem| -> AlgTerm {
        match x {
            Elem::Node(_) => match rng.gen_range(0..3) {
                0 => pick(rng),
                1 => AlgTerm::app("add", vec![pick(rng), AlgTerm::nat(1)]),
                _ => AlgTerm::app("sub", vec![pick(rng), pick(rng)]),
            },
            Elem::Edge(_) => AlgTerm::constant(EDGE_LABELS.choose(rng).expect("nonempty")),
        }
    };
    let (lhs, interface, rhs) = attribute_span(rng, l, r, &|_| true, &mut |_, x| la[x].clone(), &mut fresh);
    let guards = if rng.gen_bool(0.3) {
        vec![AlgTerm::app("leq", vec![pick(rng), AlgTerm::nat(2)])]
    } else {
        Vec::new()
    };
    Rule {
        name: name.to_string(),
        object: AlgObject { vars },
        lhs,
        interface,
        rhs,
        l: l.clone(),
        r: r.clone(),
        guards,
    }
}

/// Attributed random step for domain `D`: a host, a rule, and a host whose
/// attributes were chosen so that the rule's match is likely to survive
/// attribute matching.
pub struct AttrStep<D: RewriteDomain> {
    pub host: Host<D>,
    pub rule: Rule<D>,
}

pub fn random_lambda_step<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> AttrStep<LambdaDomain> {
    let p = random_plain_step(rng, max_nodes, max_edges);
    let host = lambda_host(rng, p.m.target());
    let rule = lambda_rule(rng, "random", &p.l, &p.r);
    AttrStep { host, rule }
}

pub fn random_algebra_step<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> AttrStep<AlgebraDomain> {
    let p = random_plain_step(rng, max_nodes, max_edges);
    let host = algebra_host(rng, p.m.target());
    let rule = algebra_rule(rng, "random", &p.l, &p.r);
    AttrStep { host, rule }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_graph_counts() {
        // multisets of size <= 1 over n^2 pairs
        let gs = all_graphs(2, 1);
        assert_eq!(gs.len(), 1 + (1 + 1) + (1 + 4));
        assert_eq!(all_graphs(1, 2).len(), 1 + 3);
    }

    #[test]
    fn generated_rules_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_lambda_step(&mut rng, 4, 4);
            crate::engine::validate_rule(&LambdaDomain::default(), &s.rule).unwrap();
            crate::engine::validate_host(&LambdaDomain::default(), &s.host).unwrap();
            let s = random_algebra_step(&mut rng, 4, 4);
            crate::engine::validate_rule(&AlgebraDomain::cloud(), &s.rule).unwrap();
            crate::engine::validate_host(&AlgebraDomain::cloud(), &s.host).unwrap();
        }
    }
}
