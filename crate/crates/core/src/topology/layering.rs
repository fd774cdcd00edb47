use serde::Serialize;

use super::subtree::rank_subtrees;
use super::tree::{TreeTopology, Vertex};

/// Result of iterated leaf removal.
///
/// `layers[i]` holds the leaves of the tree left after removing
/// `layers[0..i]`. Every vertex outside the top layer has exactly one
/// neighbor in a higher layer, its parent. When the top layer holds two
/// vertices (odd diameter) the one whose subtree ranks higher becomes the
/// root and the other, the co-root, is attached to it as a child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layering {
    layers: Vec<Vec<Vertex>>,
    layer_of: Vec<usize>,
    parent_of: Vec<Option<Vertex>>,
    children_of: Vec<Vec<Vertex>>,
    root: Vertex,
    co_root: Option<Vertex>,
    diameter: usize,
    radius: usize,
    root_is_arbitrary: bool,
}

/// Peels leaves until nothing is left and derives parents, children, root and
/// (for odd diameter) co-root.
///
/// For a symmetric odd-diameter tree the two top-layer subtrees are
/// isomorphic; the lower-indexed vertex is then taken as root and
/// [`Layering::root_is_arbitrary`] is set.
pub fn layer_decomposition(tree: &TreeTopology) -> Layering {
    let n = tree.len();
    let (layers, layer_of) = peel(tree);
    let radius = layers.len() - 1;
    let top = &layers[radius];

    let mut parent_of = vec![None; n];
    let mut children_of = vec![Vec::new(); n];
    for v in tree.vertices() {
        for &u in tree.neighbors(v) {
            if layer_of[u] > layer_of[v] {
                parent_of[v] = Some(u);
            } else if layer_of[u] < layer_of[v] {
                children_of[v].push(u);
            }
        }
    }

    let (root, co_root, diameter, root_is_arbitrary) = match top.as_slice() {
        [only] => (*only, None, 2 * radius, false),
        [a, b] => {
            let ranks = rank_subtrees(tree, &layers, &layer_of);
            let (lo, hi) = (*a.min(b), *a.max(b));
            let (root, co_root, arbitrary) = match ranks.tau[lo].cmp(&ranks.tau[hi]) {
                std::cmp::Ordering::Less => (hi, lo, false),
                std::cmp::Ordering::Greater => (lo, hi, false),
                std::cmp::Ordering::Equal => (lo, hi, true),
            };
            parent_of[co_root] = Some(root);
            children_of[root].push(co_root);
            (root, Some(co_root), 2 * radius + 1, arbitrary)
        }
        _ => unreachable!("leaf peeling of a tree ends with one or two vertices"),
    };

    Layering {
        layers,
        layer_of,
        parent_of,
        children_of,
        root,
        co_root,
        diameter,
        radius,
        root_is_arbitrary,
    }
}

/// Layers by iterated leaf removal. A vertex is a leaf of the remaining
/// graph when at most one of its neighbors is still present.
pub(crate) fn peel(tree: &TreeTopology) -> (Vec<Vec<Vertex>>, Vec<usize>) {
    let n = tree.len();
    let mut remaining_degree: Vec<usize> = tree.vertices().map(|v| tree.degree(v)).collect();
    let mut layer_of = vec![usize::MAX; n];
    let mut layers = Vec::new();
    let mut current: Vec<Vertex> = tree
        .vertices()
        .filter(|&v| remaining_degree[v] <= 1)
        .collect();
    while !current.is_empty() {
        let depth = layers.len();
        for &v in &current {
            layer_of[v] = depth;
        }
        let mut next = Vec::new();
        for &v in &current {
            for &u in tree.neighbors(v) {
                if layer_of[u] == usize::MAX {
                    remaining_degree[u] -= 1;
                    if remaining_degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        // degrees drop one at a time, so every new leaf passes through 1 exactly once
        next.sort_unstable();
        layers.push(std::mem::take(&mut current));
        current = next;
    }
    for layer in &mut layers {
        layer.sort_unstable();
    }
    (layers, layer_of)
}

impl Layering {
    pub fn layers(&self) -> &[Vec<Vertex>] {
        &self.layers
    }

    pub fn layer_of(&self, v: Vertex) -> usize {
        self.layer_of[v]
    }

    pub fn layer_indices(&self) -> &[usize] {
        &self.layer_of
    }

    /// Higher-layer neighbor; the co-root's parent is the root.
    pub fn parent_of(&self, v: Vertex) -> Option<Vertex> {
        self.parent_of[v]
    }

    /// Lower-layer neighbors, plus the co-root under the root.
    pub fn children_of(&self, v: Vertex) -> &[Vertex] {
        &self.children_of[v]
    }

    /// Children inside the rooted subtree `T^v`: strictly lower-layer neighbors.
    /// Differs from [`children_of`](Self::children_of) only at the root of an
    /// odd-diameter tree.
    pub fn subtree_children(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.children_of[v]
            .iter()
            .copied()
            .filter(move |&c| self.layer_of[c] < self.layer_of[v])
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn co_root(&self) -> Option<Vertex> {
        self.co_root
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn is_odd(&self) -> bool {
        self.co_root.is_some()
    }

    /// True when the two top-layer subtrees are isomorphic and the root was
    /// picked by vertex index alone.
    pub fn root_is_arbitrary(&self) -> bool {
        self.root_is_arbitrary
    }
}
