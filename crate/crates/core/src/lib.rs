//! Sesqui-pushout rewriting of attributed directed multigraphs.

pub mod algebra;
pub mod attr;
pub mod categorical;
pub mod engine;
pub mod gen;
pub mod graph;
pub mod lambda;
pub mod morphism;

pub use graph::{Edge, EdgeId, Elem, Graph, GraphError, NameSupply, NodeId};
pub use morphism::{compose, EnumBound, EnumError, GraphMorphism, MorphismError};
