use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TopologyError;

/// Dense vertex handle, `0..n`.
pub type Vertex = usize;
/// Local port index at a vertex, `0..deg(v)`.
pub type Port = usize;

/// An immutable undirected tree with a port numbering at every vertex.
///
/// Port `p` of vertex `v` leads to `neighbor(v, p)`. Ports are assigned in the
/// order edges are first seen, so the same edge list always yields the same
/// numbering.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeTopology {
    adjacency: Vec<Vec<Vertex>>,
    // back_port[v][p] is the port at neighbor(v, p) that leads back to v.
    back_port: Vec<Vec<Port>>,
    // first directed-edge slot owned by each vertex
    slot_offset: Vec<usize>,
}

impl TreeTopology {
    /// The one-vertex tree.
    pub fn single() -> Self {
        Self::from_edges(1, &[]).expect("single vertex is a tree")
    }

    /// Builds a tree on `n` vertices from an edge list, validating that the
    /// edges form a spanning tree.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut back_port = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        let mut components = DisjointSets::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(TopologyError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(TopologyError::SelfLoop { vertex: u });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(TopologyError::DuplicateEdge { u, v });
            }
            if !components.union(u, v) {
                return Err(TopologyError::Cycle { u, v });
            }
            let pu = adjacency[u].len();
            let pv = adjacency[v].len();
            adjacency[u].push(v);
            adjacency[v].push(u);
            back_port[u].push(pv);
            back_port[v].push(pu);
        }
        if edges.len() != n - 1 {
            return Err(TopologyError::Disconnected {
                components: n - edges.len(),
            });
        }
        let mut slot_offset = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for adj in &adjacency {
            slot_offset.push(acc);
            acc += adj.len();
        }
        slot_offset.push(acc);
        Ok(Self {
            adjacency,
            back_port,
            slot_offset,
        })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// Always false; a tree has at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.len()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    /// Neighbors of `v` in port order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn neighbor(&self, v: Vertex, port: Port) -> Vertex {
        self.adjacency[v][port]
    }

    /// The port at `neighbor(v, port)` whose edge leads back to `v`.
    pub fn back_port(&self, v: Vertex, port: Port) -> Port {
        self.back_port[v][port]
    }

    /// The port at `v` leading to `u`, if they are adjacent.
    pub fn port_towards(&self, v: Vertex, u: Vertex) -> Option<Port> {
        self.adjacency[v].iter().position(|&w| w == u)
    }

    /// Undirected edges as `(min, max)` pairs, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<_> = self
            .vertices()
            .flat_map(|v| {
                self.adjacency[v]
                    .iter()
                    .filter(move |&&u| v < u)
                    .map(move |&u| (v, u))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Number of directed edges, `2(n-1)`.
    pub fn directed_edge_count(&self) -> usize {
        self.slot_offset[self.len()]
    }

    /// Dense index of the directed edge leaving `v` through `port`.
    pub fn slot(&self, v: Vertex, port: Port) -> usize {
        self.slot_offset[v] + port
    }

    /// Inverse of [`slot`](Self::slot).
    pub fn slot_endpoints(&self, slot: usize) -> (Vertex, Port) {
        let v = self.slot_offset.partition_point(|&off| off <= slot) - 1;
        (v, slot - self.slot_offset[v])
    }

    /// Vertices reachable from `start` without crossing the edge `{start, blocked}`.
    pub fn component_without_edge(&self, start: Vertex, blocked: Vertex) -> Vec<Vertex> {
        let mut out = vec![start];
        let mut stack = vec![(start, blocked)];
        while let Some((v, from)) = stack.pop() {
            for &u in &self.adjacency[v] {
                if u != from {
                    out.push(u);
                    stack.push((u, v));
                }
            }
        }
        out
    }

    /// Eccentricity-based diameter via two sweeps.
    pub fn diameter(&self) -> usize {
        let (far, _) = self.farthest_from(0);
        self.farthest_from(far).1
    }

    fn farthest_from(&self, start: Vertex) -> (Vertex, usize) {
        let mut dist = vec![usize::MAX; self.len()];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        let mut best = (start, 0);
        while let Some(v) = queue.pop_front() {
            if dist[v] > best.1 {
                best = (v, dist[v]);
            }
            for &u in &self.adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        best
    }

    /// Applies the vertex relabeling `perm` (old -> new), keeping each vertex's
    /// port order aligned with the original.
    pub fn relabeled(&self, perm: &[Vertex]) -> Self {
        let n = self.len();
        assert_eq!(perm.len(), n, "relabeling must cover every vertex");
        let mut adjacency = vec![Vec::new(); n];
        let mut back_port = vec![Vec::new(); n];
        for v in self.vertices() {
            adjacency[perm[v]] = self.adjacency[v].iter().map(|&u| perm[u]).collect();
            back_port[perm[v]] = self.back_port[v].clone();
        }
        let mut slot_offset = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for adj in &adjacency {
            slot_offset.push(acc);
            acc += adj.len();
        }
        slot_offset.push(acc);
        Self {
            adjacency,
            back_port,
            slot_offset,
        }
    }

    /// One `u v` line per edge, in sorted order.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl fmt::Debug for TreeTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeTopology")
            .field("n", &self.len())
            .field("edges", &self.edges())
            .finish()
    }
}

/// Parses whitespace-separated `u v` pairs; `#` starts a comment that runs to
/// the end of the line. The vertex count is one more than the largest label;
/// empty input is the single-vertex tree.
pub fn parse_edge_list(text: &str) -> Result<TreeTopology, TopologyError> {
    let mut labels = Vec::new();
    let tokens = text
        .lines()
        .flat_map(|line| line.split('#').next().unwrap_or("").split_whitespace());
    for (index, token) in tokens.enumerate() {
        let label = token
            .parse::<usize>()
            .map_err(|_| TopologyError::InvalidToken {
                token: token.to_string(),
                index,
            })?;
        labels.push(label);
    }
    if labels.len() % 2 != 0 {
        return Err(TopologyError::DanglingLabel);
    }
    if labels.is_empty() {
        return Ok(TreeTopology::single());
    }
    let edges: Vec<_> = labels.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let n = labels.iter().max().copied().unwrap_or(0) + 1;
    TreeTopology::from_edges(n, &edges)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
