use std::cmp::Ordering;
use std::collections::VecDeque;

use super::HarnessError;
use crate::topology::{SubtreeComparator, TreeTopology, Vertex};

fn bfs(tree: &TreeTopology, start: Vertex) -> (Vec<usize>, Vec<Option<Vertex>>) {
    let mut dist = vec![usize::MAX; tree.len()];
    let mut prev = vec![None; tree.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in tree.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                prev[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    (dist, prev)
}

fn farthest(dist: &[usize]) -> Vertex {
    (0..dist.len())
        .max_by_key(|&v| (dist[v], std::cmp::Reverse(v)))
        .expect("nonempty tree")
}

/// The middle one or two vertices of a longest path.
pub fn centers(tree: &TreeTopology) -> Vec<Vertex> {
    let (d0, _) = bfs(tree, 0);
    let a = farthest(&d0);
    let (da, prev) = bfs(tree, a);
    let b = farthest(&da);
    let mut path = vec![b];
    while let Some(p) = prev[*path.last().unwrap()] {
        path.push(p);
    }
    let len = path.len();
    let mut mid = if len % 2 == 1 {
        vec![path[len / 2]]
    } else {
        vec![path[len / 2 - 1], path[len / 2]]
    };
    mid.sort_unstable();
    mid
}

/// Rounds of simultaneous leaf removal survived by each vertex.
fn peel_layers(tree: &TreeTopology) -> Vec<usize> {
    let n = tree.len();
    let mut layer = vec![usize::MAX; n];
    let mut degree: Vec<usize> = tree.vertices().map(|v| tree.degree(v)).collect();
    let mut removed = 0;
    let mut round = 0;
    while removed < n {
        let leaves: Vec<Vertex> = (0..n)
            .filter(|&v| layer[v] == usize::MAX && degree[v] <= 1)
            .collect();
        for &v in &leaves {
            layer[v] = round;
            for &u in tree.neighbors(v) {
                degree[u] = degree[u].saturating_sub(1);
            }
        }
        removed += leaves.len();
        round += 1;
    }
    layer
}

/// The vertex every correct terminating run must elect: the unique center,
/// or for two centers the one heading the larger subtree.
pub fn oracle_expected_leader(tree: &TreeTopology) -> Result<Vertex, HarnessError> {
    let c = centers(tree);
    if c.len() == 1 {
        return Ok(c[0]);
    }
    let layers = peel_layers(tree);
    match SubtreeComparator::new(tree, &layers).compare(c[0], c[1]) {
        Ordering::Greater => Ok(c[0]),
        Ordering::Less => Ok(c[1]),
        Ordering::Equal => Err(HarnessError::SymmetricTree {
            witness: (c[0], c[1]),
        }),
    }
}
