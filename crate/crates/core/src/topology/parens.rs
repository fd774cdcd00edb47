use super::layering::Layering;
use super::tree::{TreeTopology, Vertex};
use super::TopologyError;

/// Canonical balanced-parentheses string of `tree` rooted at `root`: each
/// vertex is `(` + its children's strings sorted ascending (byte order, so
/// `(` sorts before `)`) + `)`.
pub fn encode_parens(tree: &TreeTopology, root: Vertex) -> String {
    rooted_encoding(tree, root, None)
}

/// Canonical string of the rooted subtree `T^v`, i.e. `v` together with
/// everything reachable through strictly lower layers.
pub fn encode_subtree(tree: &TreeTopology, layering: &Layering, v: Vertex) -> String {
    encode_below(tree, layering.layer_indices(), v)
}

pub(crate) fn encode_below(tree: &TreeTopology, layer_of: &[usize], v: Vertex) -> String {
    encode_with(v, |x| {
        tree.neighbors(x)
            .iter()
            .copied()
            .filter(|&c| layer_of[c] < layer_of[x])
            .collect()
    })
}

/// Encoding of the component containing `root` after deleting the edge
/// `{root, blocked}` (or of the whole tree when `blocked` is `None`).
pub(crate) fn rooted_encoding(
    tree: &TreeTopology,
    root: Vertex,
    blocked: Option<Vertex>,
) -> String {
    let mut parent = vec![usize::MAX; tree.len()];
    parent[root] = blocked.unwrap_or(usize::MAX);
    let mut queue = vec![root];
    while let Some(x) = queue.pop() {
        for &u in tree.neighbors(x) {
            if u != parent[x] {
                parent[u] = x;
                queue.push(u);
            }
        }
    }
    encode_with(root, |x| {
        tree.neighbors(x)
            .iter()
            .copied()
            .filter(|&u| u != parent[x])
            .collect()
    })
}

/// Iterative post-order bracket builder over an arbitrary child relation.
fn encode_with(root: Vertex, children: impl Fn(Vertex) -> Vec<Vertex>) -> String {
    let mut done: std::collections::HashMap<Vertex, String> = std::collections::HashMap::new();
    let mut stack: Vec<(Vertex, Option<Vec<Vertex>>)> = vec![(root, None)];
    while let Some((v, kids)) = stack.pop() {
        match kids {
            None => {
                let kids = children(v);
                let pending: Vec<Vertex> = kids.clone();
                stack.push((v, Some(kids)));
                for c in pending {
                    stack.push((c, None));
                }
            }
            Some(kids) => {
                let mut parts: Vec<String> = kids
                    .iter()
                    .map(|c| done.remove(c).expect("children finish before parent"))
                    .collect();
                parts.sort_unstable();
                let mut s = String::with_capacity(2 + parts.iter().map(String::len).sum::<usize>());
                s.push('(');
                for p in parts {
                    s.push_str(&p);
                }
                s.push(')');
                done.insert(v, s);
            }
        }
    }
    done.remove(&root).expect("root is finished last")
}

/// Inverse of [`encode_parens`] up to relabeling: vertices are numbered in
/// opening-bracket order, so the root is vertex 0.
pub fn decode_parens(text: &str) -> Result<TreeTopology, TopologyError> {
    let bytes = text.trim().as_bytes();
    if bytes.is_empty() {
        return Err(TopologyError::EmptyEncoding);
    }
    let mut edges = Vec::new();
    let mut open: Vec<Vertex> = Vec::new();
    let mut next = 0;
    let mut closed_root = false;
    for (position, &b) in bytes.iter().enumerate() {
        if closed_root {
            return Err(TopologyError::Unbalanced { position });
        }
        match b {
            b'(' => {
                if let Some(&parent) = open.last() {
                    edges.push((parent, next));
                }
                open.push(next);
                next += 1;
            }
            b')' => {
                if open.pop().is_none() {
                    return Err(TopologyError::Unbalanced { position });
                }
                closed_root = open.is_empty();
            }
            other => {
                return Err(TopologyError::InvalidCharacter {
                    found: other as char,
                    position,
                })
            }
        }
    }
    if !open.is_empty() {
        return Err(TopologyError::Unbalanced {
            position: bytes.len(),
        });
    }
    TreeTopology::from_edges(next, &edges)
}
