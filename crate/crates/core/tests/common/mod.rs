//! Reference implementations used only as test oracles. Each one is written
//! the slow, obvious way and shares no code with the library algorithms.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use pulseforge::topology::TreeTopology;

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

pub fn adjacency_of(t: &TreeTopology) -> Vec<Vec<usize>> {
    adjacency(t.len(), &t.edges())
}

/// Simultaneous leaf removal, one round at a time.
pub fn peel(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut layer = vec![usize::MAX; n];
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut round = 0;
    while !alive.is_empty() {
        let leaves: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&v| adj[v].iter().filter(|u| alive.contains(u)).count() <= 1)
            .collect();
        for v in leaves {
            layer[v] = round;
            alive.remove(&v);
        }
        round += 1;
    }
    layer
}

fn dist_from(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &u in &adj[v] {
            if d[u] == usize::MAX {
                d[u] = d[v] + 1;
                q.push_back(u);
            }
        }
    }
    d
}

/// Vertices of minimum eccentricity, by all-pairs BFS.
pub fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let ecc: Vec<usize> = (0..adj.len())
        .map(|v| *dist_from(adj, v).iter().max().unwrap())
        .collect();
    let best = *ecc.iter().min().unwrap();
    (0..adj.len()).filter(|&v| ecc[v] == best).collect()
}

pub fn diameter(adj: &[Vec<usize>]) -> usize {
    (0..adj.len())
        .map(|v| *dist_from(adj, v).iter().max().unwrap())
        .max()
        .unwrap()
}

fn lower_children(adj: &[Vec<usize>], layer: &[usize], v: usize) -> Vec<usize> {
    adj[v]
        .iter()
        .copied()
        .filter(|&u| layer[u] < layer[v])
        .collect()
}

/// The three ordering rules, evaluated recursively with no caching.
pub fn naive_cmp(adj: &[Vec<usize>], layer: &[usize], a: usize, b: usize) -> Ordering {
    let by_layer = layer[a].cmp(&layer[b]);
    if by_layer != Ordering::Equal {
        return by_layer;
    }
    let mut ca = lower_children(adj, layer, a);
    let mut cb = lower_children(adj, layer, b);
    let by_count = ca.len().cmp(&cb.len());
    if by_count != Ordering::Equal {
        return by_count;
    }
    ca.sort_by(|&x, &y| naive_cmp(adj, layer, x, y));
    cb.sort_by(|&x, &y| naive_cmp(adj, layer, x, y));
    for (x, y) in ca.into_iter().zip(cb) {
        let o = naive_cmp(adj, layer, x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// (root, tau, k) by sorting vertices with the naive comparator.
pub fn naive_enumeration(adj: &[Vec<usize>]) -> (usize, Vec<usize>, usize) {
    let layer = peel(adj);
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| naive_cmp(adj, &layer, a, b));
    let mut tau = vec![0; n];
    let mut class = 0;
    for (i, &v) in order.iter().enumerate() {
        if i == 0 || naive_cmp(adj, &layer, order[i - 1], v) != Ordering::Equal {
            class += 1;
        }
        tau[v] = class;
    }
    let c = centers(adj);
    let root = if c.len() == 1 || naive_cmp(adj, &layer, c[0], c[1]) == Ordering::Greater {
        c[0]
    } else {
        c[1]
    };
    (root, tau, class)
}

/// Expected total for the general algorithm: sum of `k - tau` over
/// non-root vertices plus one downstream pulse per non-root vertex.
pub fn general_total_oracle(adj: &[Vec<usize>]) -> u64 {
    let (root, tau, k) = naive_enumeration(adj);
    let n = adj.len() as u64;
    (0..adj.len())
        .filter(|&v| v != root)
        .map(|v| (k - tau[v]) as u64)
        .sum::<u64>()
        + n
        - 1
}

/// Expected total for the even algorithm: sum of `r - layer` over non-root
/// vertices plus one downstream pulse per non-root vertex.
pub fn even_total_oracle(adj: &[Vec<usize>]) -> u64 {
    let layer = peel(adj);
    let r = *layer.iter().max().unwrap();
    let root = centers(adj)[0];
    let n = adj.len() as u64;
    (0..adj.len())
        .filter(|&v| v != root)
        .map(|v| (r - layer[v]) as u64)
        .sum::<u64>()
        + n
        - 1
}

/// Parent map: the neighbor in a higher layer; the lower-ranked center of
/// an odd-diameter tree hangs under the other one.
pub fn parents(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let layer = peel(adj);
    let (root, _, _) = naive_enumeration(adj);
    (0..adj.len())
        .map(|v| {
            if v == root {
                return None;
            }
            adj[v]
                .iter()
                .copied()
                .find(|&u| layer[u] > layer[v])
                .or_else(|| adj[v].iter().copied().find(|&u| u == root))
        })
        .collect()
}

/// Vertices reachable from `start` without crossing `blocked`.
fn side(adj: &[Vec<usize>], start: usize, blocked: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    seen[blocked] = true;
    let mut stack = vec![start];
    let mut out = vec![start];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                out.push(u);
                stack.push(u);
            }
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Edge symmetry by trying every bijection between the two sides.
pub fn brute_force_symmetric(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    for u in 0..n {
        for &v in &adj[u] {
            if u > v {
                continue;
            }
            let a = side(adj, u, v);
            let b = side(adj, v, u);
            if a.len() != b.len() {
                continue;
            }
            let a_set: BTreeSet<usize> = a.iter().copied().collect();
            let b_set: BTreeSet<usize> = b.iter().copied().collect();
            let edge_in = |set: &BTreeSet<usize>, x: usize, y: usize| {
                set.contains(&x) && set.contains(&y) && adj[x].contains(&y)
            };
            for image in permutations(&b) {
                let map = |x: usize| image[a.iter().position(|&w| w == x).unwrap()];
                if map(u) != v {
                    continue;
                }
                let preserves = a.iter().all(|&x| {
                    a.iter()
                        .all(|&y| edge_in(&a_set, x, y) == edge_in(&b_set, map(x), map(y)))
                });
                if preserves {
                    return true;
                }
            }
        }
    }
    false
}

/// AHU-style string for the tree rooted at `v`, ignoring `parent`.
fn ahu(adj: &[Vec<usize>], v: usize, parent: Option<usize>) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .copied()
        .filter(|&u| Some(u) != parent)
        .map(|u| ahu(adj, u, Some(v)))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Unlabeled canonical form: smallest AHU string over the centers.
pub fn unrooted_canon(adj: &[Vec<usize>]) -> String {
    centers(adj)
        .into_iter()
        .map(|c| ahu(adj, c, None))
        .min()
        .unwrap()
}

/// One representative edge list of every unlabeled tree on `n` vertices,
/// grown leaf by leaf and deduplicated by canonical form.
pub fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for edges in &level {
            for attach in 0..size - 1 {
                let mut grown = edges.clone();
                grown.push((attach, size - 1));
                if seen.insert(unrooted_canon(&adjacency(size, &grown))) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    if n == 0 {
        Vec::new()
    } else {
        level
    }
}

pub fn topology(n: usize, edges: &[(usize, usize)]) -> TreeTopology {
    TreeTopology::from_edges(n, edges).unwrap()
}
