use serde::Serialize;

use super::parens::rooted_encoding;
use super::tree::{TreeTopology, Vertex};

/// Whether the tree is symmetric about some edge `{u, v}`: deleting the edge
/// leaves two components with an isomorphism that maps `u` to `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    pub witness_edge: Option<(Vertex, Vertex)>,
}

/// Scans edges in sorted `(min, max)` order and reports the first one whose
/// two sides have identical canonical encodings rooted at its endpoints.
pub fn is_edge_symmetric(tree: &TreeTopology) -> SymmetryReport {
    let n = tree.len();
    if n % 2 == 1 {
        return SymmetryReport {
            symmetric: false,
            witness_edge: None,
        };
    }
    for (u, v) in tree.edges() {
        if tree.component_without_edge(u, v).len() != n / 2 {
            continue;
        }
        if rooted_encoding(tree, u, Some(v)) == rooted_encoding(tree, v, Some(u)) {
            return SymmetryReport {
                symmetric: true,
                witness_edge: Some((u, v)),
            };
        }
    }
    SymmetryReport {
        symmetric: false,
        witness_edge: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_edge_list;

    #[test]
    fn two_path_is_symmetric() {
        let r = is_edge_symmetric(&parse_edge_list("0 1").unwrap());
        assert_eq!(r.witness_edge, Some((0, 1)));
        assert!(r.symmetric);
    }

    #[test]
    fn four_path_mirrors_about_middle_edge() {
        let r = is_edge_symmetric(&parse_edge_list("0 1\n1 2\n2 3").unwrap());
        assert_eq!(r.witness_edge, Some((1, 2)));
    }

    #[test]
    fn odd_trees_are_never_symmetric() {
        assert!(!is_edge_symmetric(&parse_edge_list("0 1\n1 2").unwrap()).symmetric);
        assert!(!is_edge_symmetric(&TreeTopology::single()).symmetric);
    }

    #[test]
    fn equal_halves_with_different_roots_are_not_symmetric() {
        // Both halves are 3-paths, but one is attached at its end and the
        // other at its middle.
        let t = parse_edge_list("0 1\n1 2\n0 3\n3 4\n3 5").unwrap();
        assert!(!is_edge_symmetric(&t).symmetric);
    }
}
