use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::layering::Layering;
use super::parens::encode_below;
use super::tree::{TreeTopology, Vertex};

/// Shape of a rooted subtree `T^v`, expressed through the enumeration indices
/// of its root's children. Two subtrees are isomorphic iff their keys match.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SubtreeKey {
    pub layer: usize,
    /// Enumeration indices (1-based) of the root's children, ascending.
    pub children: Vec<usize>,
}

impl SubtreeKey {
    fn order_key(&self) -> (usize, usize, &[usize]) {
        (self.layer, self.children.len(), &self.children)
    }
}

pub(crate) struct Ranks {
    pub tau: Vec<usize>,
    pub canon: Vec<SubtreeKey>,
    pub representative: Vec<Vertex>,
}

/// Bottom-up ranking: a vertex's key is (layer, child count, sorted child
/// ranks); keys are ordered lexicographically and deduplicated layer by layer.
pub(crate) fn rank_subtrees(
    tree: &TreeTopology,
    layers: &[Vec<Vertex>],
    layer_of: &[usize],
) -> Ranks {
    let mut tau = vec![0usize; tree.len()];
    let mut canon = Vec::new();
    let mut representative = Vec::new();
    for (depth, layer) in layers.iter().enumerate() {
        let keyed: Vec<(Vertex, SubtreeKey)> = layer
            .iter()
            .map(|&v| {
                let mut children: Vec<usize> = tree
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| layer_of[u] < depth)
                    .map(|&u| tau[u])
                    .collect();
                children.sort_unstable();
                (
                    v,
                    SubtreeKey {
                        layer: depth,
                        children,
                    },
                )
            })
            .collect();
        let mut distinct: Vec<&SubtreeKey> = keyed
            .iter()
            .map(|(_, k)| k)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        distinct.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        let base = canon.len();
        for (v, key) in &keyed {
            let offset = distinct
                .binary_search_by(|probe| probe.order_key().cmp(&key.order_key()))
                .expect("key was inserted above");
            tau[*v] = base + offset + 1;
        }
        for key in distinct {
            let first = keyed
                .iter()
                .find(|(_, k)| k == key)
                .map(|(v, _)| *v)
                .unwrap();
            canon.push(key.clone());
            representative.push(first);
        }
    }
    Ranks {
        tau,
        canon,
        representative,
    }
}

/// The enumeration `T_1 < T_2 < ... < T_k` of distinct rooted subtrees and
/// the map `tau` from each vertex to the index of its own subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubtreeIndex {
    canon: Vec<SubtreeKey>,
    tau: Vec<usize>,
    representative: Vec<Vertex>,
}

pub fn enumerate_subtrees(tree: &TreeTopology, layering: &Layering) -> SubtreeIndex {
    let ranks = rank_subtrees(tree, layering.layers(), layering.layer_indices());
    SubtreeIndex {
        canon: ranks.canon,
        tau: ranks.tau,
        representative: ranks.representative,
    }
}

impl SubtreeIndex {
    /// Number of distinct subtrees, `k`.
    pub fn k(&self) -> usize {
        self.canon.len()
    }

    /// Keys of `T_1..T_k` in enumeration order.
    pub fn canon(&self) -> &[SubtreeKey] {
        &self.canon
    }

    /// Key of `T_i`, 1-based.
    pub fn key(&self, i: usize) -> &SubtreeKey {
        &self.canon[i - 1]
    }

    /// Some vertex `v` with `T^v` isomorphic to `T_i`.
    pub fn representative(&self, i: usize) -> Vertex {
        self.representative[i - 1]
    }

    /// 1-based index of `T^v` in the enumeration.
    pub fn tau(&self, v: Vertex) -> usize {
        self.tau[v]
    }

    pub fn taus(&self) -> &[usize] {
        &self.tau
    }

    /// `k - i`.
    pub fn lambda(&self, i: usize) -> u32 {
        (self.k() - i) as u32
    }

    /// `lambda(tau(v))`, the pulse quota that encodes the shape of `T^v`.
    pub fn lambda_tau(&self, v: Vertex) -> u32 {
        self.lambda(self.tau[v])
    }

    /// Order of `T^a` and `T^b` read off the enumeration.
    pub fn compare(&self, a: Vertex, b: Vertex) -> Ordering {
        self.tau[a].cmp(&self.tau[b])
    }
}

/// Compares `T^a` and `T^b` by the three rules, in priority order: lower
/// layer first, then fewer children first, then the first differing child
/// when both child lists are sorted by this same order. `Equal` means the
/// two rooted subtrees are isomorphic.
pub fn compare_subtrees(
    tree: &TreeTopology,
    layering: &Layering,
    a: Vertex,
    b: Vertex,
) -> Ordering {
    SubtreeComparator::new(tree, layering.layer_indices()).compare(a, b)
}

/// Memoizing evaluator of the recursive subtree order. Works from layer
/// indices alone so it can run before a [`Layering`] is finished.
pub struct SubtreeComparator<'a> {
    tree: &'a TreeTopology,
    layer_of: &'a [usize],
    memo: RefCell<HashMap<(Vertex, Vertex), Ordering>>,
}

impl<'a> SubtreeComparator<'a> {
    pub fn new(tree: &'a TreeTopology, layer_of: &'a [usize]) -> Self {
        Self {
            tree,
            layer_of,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn children(&self, v: Vertex) -> Vec<Vertex> {
        let layer = self.layer_of[v];
        self.tree
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.layer_of[u] < layer)
            .collect()
    }

    pub fn compare(&self, a: Vertex, b: Vertex) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        if let Some(&o) = self.memo.borrow().get(&(a, b)) {
            return o;
        }
        let result = self.compare_uncached(a, b);
        let mut memo = self.memo.borrow_mut();
        memo.insert((a, b), result);
        memo.insert((b, a), result.reverse());
        result
    }

    fn compare_uncached(&self, a: Vertex, b: Vertex) -> Ordering {
        let by_layer = self.layer_of[a].cmp(&self.layer_of[b]);
        if by_layer != Ordering::Equal {
            return by_layer;
        }
        let mut ca = self.children(a);
        let mut cb = self.children(b);
        let by_count = ca.len().cmp(&cb.len());
        if by_count != Ordering::Equal {
            return by_count;
        }
        ca.sort_by(|&x, &y| self.compare(x, y));
        cb.sort_by(|&x, &y| self.compare(x, y));
        ca.iter()
            .zip(&cb)
            .map(|(&x, &y)| self.compare(x, y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }

    /// Canonical bracket string of `T^v`.
    pub fn encoding(&self, v: Vertex) -> String {
        encode_below(self.tree, self.layer_of, v)
    }
}
