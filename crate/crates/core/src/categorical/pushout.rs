use std::collections::BTreeMap;
use std::sync::Arc;

use super::{arc, ConstructionError};
use crate::graph::{EdgeId, Graph, NameSupply, NodeId};
use crate::morphism::{is_injective, GraphMorphism, MorphismError};

/// Pushout of an injective `m_K: K -> D` along `r: K -> R`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub h: Arc<Graph>,
    /// `R -> H`, injective.
    pub m_r: GraphMorphism,
    /// `D -> H`.
    pub r1: GraphMorphism,
}

/// Glues `R` onto the context of `D`.
///
/// `H` is `R` plus every element of `D` outside the image of `m_K`; a
/// retained edge whose endpoint is `m_K(k)` is redirected to `r(k)`.
///
/// Naming: context elements keep their `D` identifiers. An `R` element with
/// preimages takes the `D` name of the preimage whose identifier equals its
/// own, else a preimage `D` name equal to its own, else the smallest such
/// name. Elements created by the rule get
/// fresh names derived from their `R` identifiers.
pub fn pushout_graphs(m_k: &GraphMorphism, r: &GraphMorphism) -> Result<Pushout, ConstructionError> {
    if !is_injective(m_k) {
        return Err(ConstructionError::NotInjective);
    }
    if **m_k.source() != **r.source() {
        return Err(MorphismError::EndpointMismatch.into());
    }
    let d = m_k.target();
    let rg = r.target();

    let k_of_d_node: BTreeMap<&NodeId, &NodeId> = m_k.node_map().iter().map(|(k, v)| (v, k)).collect();
    let k_of_d_edge: BTreeMap<&EdgeId, &EdgeId> = m_k.edge_map().iter().map(|(k, v)| (v, k)).collect();

    let mut node_names = NameSupply::new();
    let mut edge_names = NameSupply::new();
    for n in d.nodes() {
        node_names.reserve(n.as_str());
    }
    for (e, _) in d.edges() {
        edge_names.reserve(e.as_str());
    }

    let mut r_node_name: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut created = Vec::new();
    for rn in rg.nodes() {
        let pre: Vec<&NodeId> = r.node_preimage(rn).collect();
        if pre.is_empty() {
            created.push(rn.clone());
            continue;
        }
        let chosen = pre
            .iter()
            .find(|k| **k == rn)
            .map(|k| m_k.node(k))
            .or_else(|| pre.iter().map(|k| m_k.node(k)).find(|d| *d == rn))
            .unwrap_or_else(|| pre.iter().map(|k| m_k.node(k)).min().unwrap())
            .clone();
        r_node_name.insert(rn.clone(), chosen);
    }
    for rn in created {
        r_node_name.insert(rn.clone(), NodeId(node_names.fresh(rn.as_str())));
    }

    let mut r_edge_name: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    let mut created = Vec::new();
    for (re, _) in rg.edges() {
        let pre: Vec<&EdgeId> = r.edge_preimage(re).collect();
        if pre.is_empty() {
            created.push(re.clone());
            continue;
        }
        let chosen = pre
            .iter()
            .find(|k| **k == re)
            .map(|k| m_k.edge(k))
            .or_else(|| pre.iter().map(|k| m_k.edge(k)).find(|d| *d == re))
            .unwrap_or_else(|| pre.iter().map(|k| m_k.edge(k)).min().unwrap())
            .clone();
        r_edge_name.insert(re.clone(), chosen);
    }
    for re in created {
        r_edge_name.insert(re.clone(), EdgeId(edge_names.fresh(re.as_str())));
    }

    let glue = |v: &NodeId| -> NodeId {
        match k_of_d_node.get(v) {
            Some(k) => r_node_name[r.node(k)].clone(),
            None => v.clone(),
        }
    };

    let mut h = Graph::new();
    let mut r1_nodes = BTreeMap::new();
    let mut r1_edges = BTreeMap::new();
    for rn in rg.nodes() {
        h.add_node(r_node_name[rn].clone()).expect("distinct R names");
    }
    for dn in d.nodes() {
        if !k_of_d_node.contains_key(dn) {
            h.add_node(dn.clone()).expect("context name is free");
        }
        r1_nodes.insert(dn.clone(), glue(dn));
    }
    for (re, e) in rg.edges() {
        h.add_edge(
            r_edge_name[re].clone(),
            r_node_name[&e.src].clone(),
            r_node_name[&e.tgt].clone(),
        )
        .expect("R edge endpoints are present");
    }
    for (de, e) in d.edges() {
        match k_of_d_edge.get(de) {
            Some(k) => {
                r1_edges.insert(de.clone(), r_edge_name[r.edge(k)].clone());
            }
            None => {
                h.add_edge(de.clone(), glue(&e.src), glue(&e.tgt))
                    .expect("context edge endpoints are present");
                r1_edges.insert(de.clone(), de.clone());
            }
        }
    }

    let h = arc(h);
    let m_r = GraphMorphism::new_unchecked(rg.clone(), h.clone(), r_node_name, r_edge_name);
    let r1 = GraphMorphism::new_unchecked(d.clone(), h.clone(), r1_nodes, r1_edges);
    Ok(Pushout { h, m_r, r1 })
}
