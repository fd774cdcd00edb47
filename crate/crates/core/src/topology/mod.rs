//! Pure combinatorics on unlabeled trees: representation, leaf-peeling
//! layers, the subtree order and its enumeration, edge-symmetry detection and
//! balanced-parentheses advice strings.

mod layering;
mod parens;
mod subtree;
mod symmetry;
mod tree;

pub use layering::{layer_decomposition, Layering};
pub use parens::{decode_parens, encode_parens, encode_subtree};
pub use subtree::{
    compare_subtrees, enumerate_subtrees, SubtreeComparator, SubtreeIndex, SubtreeKey,
};
pub use symmetry::{is_edge_symmetric, SymmetryReport};
pub use tree::{parse_edge_list, Port, TreeTopology, Vertex};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("token {index} ({token:?}) is not a non-negative integer")]
    InvalidToken { token: String, index: usize },
    #[error("odd number of labels; the last vertex has no partner")]
    DanglingLabel,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: Vertex },
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: Vertex, v: Vertex },
    #[error("edge {{{u}, {v}}} closes a cycle")]
    Cycle { u: Vertex, v: Vertex },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("parenthesis string is empty")]
    EmptyEncoding,
    #[error("parenthesis string is unbalanced at byte {position}")]
    Unbalanced { position: usize },
    #[error("unexpected character {found:?} at byte {position}")]
    InvalidCharacter { found: char, position: usize },
}
