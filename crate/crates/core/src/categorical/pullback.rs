use std::collections::BTreeMap;
use std::sync::Arc;

use super::{arc, ConstructionError};
use crate::graph::{EdgeId, Graph, NameSupply, NodeId};
use crate::morphism::{GraphMorphism, MorphismError};

/// A span `X <- apex -> Y`.
#[derive(Clone, Debug)]
pub struct SpanResult {
    pub apex: Arc<Graph>,
    pub left_leg: GraphMorphism,
    pub right_leg: GraphMorphism,
}

/// Componentwise fibered product of `f: X -> Z` and `g: Y -> Z`.
///
/// Apex elements are named `(x,y)`.
pub fn pullback_graphs(f: &GraphMorphism, g: &GraphMorphism) -> Result<SpanResult, ConstructionError> {
    if **f.target() != **g.target() {
        return Err(MorphismError::EndpointMismatch.into());
    }
    let mut y_nodes_over: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (y, z) in g.node_map() {
        y_nodes_over.entry(z).or_default().push(y);
    }
    let mut y_edges_over: BTreeMap<&EdgeId, Vec<&EdgeId>> = BTreeMap::new();
    for (y, z) in g.edge_map() {
        y_edges_over.entry(z).or_default().push(y);
    }

    let mut names = NameSupply::new();
    let mut node_of_pair: BTreeMap<(NodeId, NodeId), NodeId> = BTreeMap::new();
    let mut p = Graph::new();
    let mut left_nodes = BTreeMap::new();
    let mut right_nodes = BTreeMap::new();
    for (x, z) in f.node_map() {
        for y in y_nodes_over.get(z).into_iter().flatten() {
            let id = NodeId(names.fresh(&format!("({x},{y})")));
            p.add_node(id.clone()).expect("fresh");
            left_nodes.insert(id.clone(), x.clone());
            right_nodes.insert(id.clone(), (*y).clone());
            node_of_pair.insert((x.clone(), (*y).clone()), id);
        }
    }

    let mut edge_names = NameSupply::new();
    let mut left_edges = BTreeMap::new();
    let mut right_edges = BTreeMap::new();
    let xg = f.source();
    let yg = g.source();
    for (x, z) in f.edge_map() {
        let xe = xg.edge(x).unwrap();
        for y in y_edges_over.get(z).into_iter().flatten() {
            let ye = yg.edge(y).unwrap();
            let id = EdgeId(edge_names.fresh(&format!("({x},{y})")));
            let src = node_of_pair[&(xe.src.clone(), ye.src.clone())].clone();
            let tgt = node_of_pair[&(xe.tgt.clone(), ye.tgt.clone())].clone();
            p.add_edge(id.clone(), src, tgt).expect("endpoints are pairs");
            left_edges.insert(id.clone(), x.clone());
            right_edges.insert(id, (*y).clone());
        }
    }

    let apex = arc(p);
    Ok(SpanResult {
        left_leg: GraphMorphism::new_unchecked(apex.clone(), xg.clone(), left_nodes, left_edges),
        right_leg: GraphMorphism::new_unchecked(apex.clone(), yg.clone(), right_nodes, right_edges),
        apex,
    })
}
