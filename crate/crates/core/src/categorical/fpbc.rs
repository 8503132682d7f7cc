use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{arc, ConstructionError};
use crate::graph::{EdgeId, Graph, NameSupply, NodeId};
use crate::morphism::{is_injective, GraphMorphism};

/// Final pullback complement of an injective `m_L: L -> G` along `l: K -> L`.
#[derive(Clone, Debug)]
pub struct Fpbc {
    pub d: Arc<Graph>,
    /// `K -> D`, injective.
    pub m_k: GraphMorphism,
    /// `D -> G`.
    pub l1: GraphMorphism,
}

/// Builds the complement `D` of the match.
///
/// `D` contains a copy of `K`, every node of `G` outside the match, and for
/// each edge of `G` outside the match one copy per choice of preimages of its
/// endpoints. An endpoint outside the match has itself as its only preimage,
/// an endpoint inside it has its `l`-fiber; an empty fiber removes the edge.
///
/// Naming: context elements keep their identifiers. A `K` element that is
/// the only preimage of its `L` element takes the host identifier; in a
/// larger fiber only the element whose identifier equals the `L` element's
/// does, the other clones get fresh names derived from their `K` identifiers.
/// Cloned linking edges are named `e[src>tgt]` unless both endpoints are
/// host-named, in which case the edge keeps `e`.
pub fn fpbc_graphs(m_l: &GraphMorphism, l: &GraphMorphism) -> Result<Fpbc, ConstructionError> {
    if !is_injective(m_l) {
        return Err(ConstructionError::NotInjective);
    }
    if **l.target() != **m_l.source() {
        return Err(crate::morphism::MorphismError::EndpointMismatch.into());
    }
    let g = m_l.target();
    let k = l.source();

    let matched_nodes: BTreeMap<&NodeId, &NodeId> = m_l.node_map().iter().map(|(u, v)| (v, u)).collect();
    let matched_edges: BTreeSet<&EdgeId> = m_l.edge_map().values().collect();

    let mut node_names = NameSupply::new();
    let mut edge_names = NameSupply::new();
    for n in g.nodes() {
        node_names.reserve(n.as_str());
    }
    for (e, _) in g.edges() {
        edge_names.reserve(e.as_str());
    }

    // K elements: host-named ones first so fresh names never shadow them.
    let mut k_node_name: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut pending = Vec::new();
    for kn in k.nodes() {
        let u = l.node(kn);
        let fiber = l.node_preimage(u).count();
        if fiber == 1 || kn == u {
            k_node_name.insert(kn.clone(), m_l.node(u).clone());
        } else {
            pending.push(kn.clone());
        }
    }
    for kn in pending {
        k_node_name.insert(kn.clone(), NodeId(node_names.fresh(kn.as_str())));
    }
    let host_named = |kn: &NodeId| -> bool { k_node_name[kn] == *m_l.node(l.node(kn)) };

    let mut k_edge_name: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    let mut pending = Vec::new();
    for (ke, _) in k.edges() {
        let u = l.edge(ke);
        let fiber = l.edge_preimage(u).count();
        if fiber == 1 || ke == u {
            k_edge_name.insert(ke.clone(), m_l.edge(u).clone());
        } else {
            pending.push(ke.clone());
        }
    }
    for ke in pending {
        k_edge_name.insert(ke.clone(), EdgeId(edge_names.fresh(ke.as_str())));
    }

    let mut d = Graph::new();
    let mut l1_nodes = BTreeMap::new();
    let mut l1_edges = BTreeMap::new();

    for kn in k.nodes() {
        let name = k_node_name[kn].clone();
        d.add_node(name.clone()).expect("fresh node name");
        l1_nodes.insert(name, m_l.node(l.node(kn)).clone());
    }
    for gn in g.nodes() {
        if !matched_nodes.contains_key(gn) {
            d.add_node(gn.clone()).expect("context node name");
            l1_nodes.insert(gn.clone(), gn.clone());
        }
    }
    for (ke, e) in k.edges() {
        let name = k_edge_name[ke].clone();
        d.add_edge(name.clone(), k_node_name[&e.src].clone(), k_node_name[&e.tgt].clone())
            .expect("K edge endpoints are present");
        l1_edges.insert(name, m_l.edge(l.edge(ke)).clone());
    }

    // D-side preimages of a host node: the clones of its L-preimage, or the
    // node itself when it lies in the context.
    let preimages = |v: &NodeId| -> Vec<(NodeId, bool)> {
        match matched_nodes.get(v) {
            Some(u) => l
                .node_preimage(u)
                .map(|kn| (k_node_name[kn].clone(), host_named(kn)))
                .collect(),
            None => vec![(v.clone(), true)],
        }
    };
    for (ge, e) in g.edges() {
        if matched_edges.contains(ge) {
            continue;
        }
        let srcs = preimages(&e.src);
        let tgts = preimages(&e.tgt);
        for (s, s_host) in &srcs {
            for (t, t_host) in &tgts {
                let name = if *s_host && *t_host {
                    ge.clone()
                } else {
                    EdgeId(edge_names.fresh(&format!("{ge}[{s}>{t}]")))
                };
                d.add_edge(name.clone(), s.clone(), t.clone())
                    .expect("clone endpoints are present");
                l1_edges.insert(name, ge.clone());
            }
        }
    }

    let d = arc(d);
    let m_k = GraphMorphism::new_unchecked(k.clone(), d.clone(), k_node_name, k_edge_name);
    let l1 = GraphMorphism::new_unchecked(d.clone(), g.clone(), l1_nodes, l1_edges);
    Ok(Fpbc { d, m_k, l1 })
}
