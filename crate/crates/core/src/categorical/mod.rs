//! Limits and colimits of plain graphs used by a rewriting step, together
//! with executable checks of their universal properties.

mod fpbc;
mod pullback;
mod pushout;
mod verify;

use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::morphism::{EnumError, GraphMorphism, MorphismError};

pub use fpbc::{fpbc_graphs, Fpbc};
pub use pullback::{pullback_graphs, SpanResult};
pub use pushout::{pushout_graphs, Pushout};
pub use verify::{
    canonical_pushout_iso, verify_fpbc, verify_fpbc_against, verify_pullback, verify_pushout, verify_pushout_report,
    FpbcSquare, PushoutReport, PushoutSquare, COGENERATOR_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("match is not injective")]
    NotInjective,
    #[error("morphisms do not compose: {0}")]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

/// A compatible triple of nodes across a rule span: `n_L = l(n_K)` and
/// `n_R = r(n_K)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TriNode {
    pub n_l: NodeId,
    pub n_k: NodeId,
    pub n_r: NodeId,
}

/// All tri-nodes of the span `l: K -> L`, `r: K -> R`, ordered by `n_K`.
pub fn tri_nodes(l: &GraphMorphism, r: &GraphMorphism) -> Vec<TriNode> {
    l.node_map()
        .iter()
        .map(|(k, nl)| TriNode {
            n_l: nl.clone(),
            n_k: k.clone(),
            n_r: r.node(k).clone(),
        })
        .collect()
}

pub(crate) fn arc(g: Graph) -> Arc<Graph> {
    Arc::new(g)
}
