//! Directed multigraphs with opaque string identifiers.
//!
//! Nodes and edges live in separate namespaces. Loops and parallel edges are
//! allowed. All iteration is in lexicographic identifier order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

macro_rules! string_id {
    ($name:ident) => {
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(NodeId);
string_id!(EdgeId);

/// An element of `S(G)`: the disjoint union of nodes and edges.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Elem {
    Node(NodeId),
    Edge(EdgeId),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Node(n) => write!(f, "node {n}"),
            Elem::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub src: NodeId,
    pub tgt: NodeId,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum GraphError {
    #[error("duplicate node identifier `{0}`")]
    DuplicateNode(NodeId),
    #[error("duplicate edge identifier `{0}`")]
    DuplicateEdge(EdgeId),
    #[error("dangling endpoint: edge `{edge}` refers to unknown node `{node}`")]
    DanglingEndpoint { edge: EdgeId, node: NodeId },
}

/// A finite directed multigraph. Construction enforces the invariants, so every
/// `Graph` value is valid.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Graph {
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<EdgeId, Edge>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|(id, e)| format!("{id}:{}->{}", e.src, e.tgt))
            .collect();
        f.debug_struct("Graph")
            .field("nodes", &self.nodes)
            .field("edges", &edges)
            .finish()
    }
}

/// Checks raw node and edge lists against the graph invariants and reports
/// every violation.
pub fn validate_graph<N, E>(nodes: N, edges: E) -> Result<Graph, Vec<GraphError>>
where
    N: IntoIterator<Item = NodeId>,
    E: IntoIterator<Item = (EdgeId, NodeId, NodeId)>,
{
    let mut errors = Vec::new();
    let mut node_set = BTreeSet::new();
    for n in nodes {
        if !node_set.insert(n.clone()) {
            errors.push(GraphError::DuplicateNode(n));
        }
    }
    let mut edge_map = BTreeMap::new();
    for (id, src, tgt) in edges {
        for end in [&src, &tgt] {
            if !node_set.contains(end) {
                errors.push(GraphError::DanglingEndpoint {
                    edge: id.clone(),
                    node: end.clone(),
                });
            }
        }
        match edge_map.entry(id) {
            std::collections::btree_map::Entry::Occupied(slot) => {
                errors.push(GraphError::DuplicateEdge(slot.key().clone()))
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(Edge { src, tgt });
            }
        }
    }
    if errors.is_empty() {
        Ok(Graph {
            nodes: node_set,
            edges: edge_map,
        })
    } else {
        Err(errors)
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Convenience constructor from string slices; panics on invalid input.
    /// Intended for fixtures and tests.
    pub fn from_lists(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Self {
        validate_graph(
            nodes.iter().map(|n| NodeId::from(*n)),
            edges
                .iter()
                .map(|(e, s, t)| (EdgeId::from(*e), NodeId::from(*s), NodeId::from(*t))),
        )
        .unwrap_or_else(|errs| panic!("invalid fixture graph: {errs:?}"))
    }

    pub fn add_node(&mut self, id: NodeId) -> Result<(), GraphError> {
        if self.nodes.insert(id.clone()) {
            Ok(())
        } else {
            Err(GraphError::DuplicateNode(id))
        }
    }

    pub fn add_edge(&mut self, id: EdgeId, src: NodeId, tgt: NodeId) -> Result<(), GraphError> {
        for end in [&src, &tgt] {
            if !self.nodes.contains(end) {
                return Err(GraphError::DanglingEndpoint {
                    edge: id,
                    node: end.clone(),
                });
            }
        }
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        self.edges.insert(id, Edge { src, tgt });
        Ok(())
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &NodeId> + Clone {
        self.nodes.iter()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (&EdgeId, &Edge)> + Clone {
        self.edges.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_node(&self, id: &NodeId) -> bool {
        self.nodes.contains(id)
    }

    pub fn has_edge(&self, id: &EdgeId) -> bool {
        self.edges.contains_key(id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn has_elem(&self, x: &Elem) -> bool {
        match x {
            Elem::Node(n) => self.has_node(n),
            Elem::Edge(e) => self.has_edge(e),
        }
    }

    /// All elements of `S(G)`, nodes first.
    pub fn elems(&self) -> impl Iterator<Item = Elem> + '_ {
        self.nodes
            .iter()
            .cloned()
            .map(Elem::Node)
            .chain(self.edges.keys().cloned().map(Elem::Edge))
    }

    /// Edges with `n` as an endpoint; loops are reported once.
    pub fn incident_edges<'a>(&'a self, n: &'a NodeId) -> impl Iterator<Item = &'a EdgeId> + 'a {
        self.edges
            .iter()
            .filter(move |(_, e)| &e.src == n || &e.tgt == n)
            .map(|(id, _)| id)
    }

    pub fn in_degree(&self, n: &NodeId) -> usize {
        self.edges.values().filter(|e| &e.tgt == n).count()
    }

    pub fn out_degree(&self, n: &NodeId) -> usize {
        self.edges.values().filter(|e| &e.src == n).count()
    }

    /// Disjoint union with identifiers prefixed by `left` / `right`.
    pub fn disjoint_union(&self, other: &Graph, left: &str, right: &str) -> Graph {
        let mut g = Graph::new();
        for (prefix, part) in [(left, self), (right, other)] {
            for n in part.nodes() {
                g.nodes.insert(NodeId(format!("{prefix}{n}")));
            }
            for (id, e) in part.edges() {
                g.edges.insert(
                    EdgeId(format!("{prefix}{id}")),
                    Edge {
                        src: NodeId(format!("{prefix}{}", e.src)),
                        tgt: NodeId(format!("{prefix}{}", e.tgt)),
                    },
                );
            }
        }
        g
    }
}

/// Deterministic supply of identifiers that avoids a given set of names.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<String>,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reserve(&mut self, name: &str) -> bool {
        self.used.insert(name.to_owned())
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    /// Returns `base` if unused, otherwise the first free `base_1`, `base_2`, ...
    pub fn fresh(&mut self, base: &str) -> String {
        if self.used.insert(base.to_owned()) {
            return base.to_owned();
        }
        let mut i = 1usize;
        loop {
            let candidate = format!("{base}_{i}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
            i += 1;
        }
    }
}
