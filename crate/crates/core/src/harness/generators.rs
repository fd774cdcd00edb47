use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::topology::{is_edge_symmetric, TreeTopology, Vertex};

/// A reproducible recipe for a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GeneratorSpec {
    /// `n` vertices in a line, numbered along it.
    Path { n: usize },
    /// Vertex 0 joined to `n - 1` leaves.
    Star { n: usize },
    /// Heap-numbered: the children of `i` are `2i + 1` and `2i + 2`.
    CompleteBinary { radius: usize },
    /// Uniform over labeled trees on `n` vertices.
    RandomTree { n: usize, seed: u64 },
    /// Uniform labeled trees, redrawn until not edge-symmetric.
    RandomAsymmetricTree {
        n: usize,
        seed: u64,
        max_retries: u32,
    },
    /// A random tree on `half` vertices glued to a copy of itself by an
    /// edge between the two copies of one vertex, then relabeled at random.
    MirroredSymmetric { half: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn description(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorSpec::Path { n } => write!(f, "path(n={n})"),
            GeneratorSpec::Star { n } => write!(f, "star(n={n})"),
            GeneratorSpec::CompleteBinary { radius } => write!(f, "complete-binary(r={radius})"),
            GeneratorSpec::RandomTree { n, seed } => write!(f, "random-tree(n={n} seed={seed})"),
            GeneratorSpec::RandomAsymmetricTree { n, seed, .. } => {
                write!(f, "random-asymmetric(n={n} seed={seed})")
            }
            GeneratorSpec::MirroredSymmetric { half, seed } => {
                write!(f, "mirrored(half={half} seed={seed})")
            }
        }
    }
}

pub fn generate(spec: GeneratorSpec) -> Result<TreeTopology, HarnessError> {
    let invalid = |msg: &str| HarnessError::InvalidSpec(format!("{spec}: {msg}"));
    match spec {
        GeneratorSpec::Path { n }
        | GeneratorSpec::Star { n }
        | GeneratorSpec::RandomTree { n, .. }
            if n == 0 =>
        {
            Err(invalid("need at least one vertex"))
        }
        GeneratorSpec::Path { n } => {
            let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            Ok(TreeTopology::from_edges(n, &edges)?)
        }
        GeneratorSpec::Star { n } => {
            let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
            Ok(TreeTopology::from_edges(n, &edges)?)
        }
        GeneratorSpec::CompleteBinary { radius } => {
            if radius >= 20 {
                return Err(invalid("radius too large"));
            }
            let n = (1usize << (radius + 1)) - 1;
            let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
            Ok(TreeTopology::from_edges(n, &edges)?)
        }
        GeneratorSpec::RandomTree { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(random_tree(n, &mut rng))
        }
        GeneratorSpec::RandomAsymmetricTree {
            n,
            seed,
            max_retries,
        } => {
            if n == 0 {
                return Err(invalid("need at least one vertex"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..=max_retries {
                let tree = random_tree(n, &mut rng);
                if !is_edge_symmetric(&tree).symmetric {
                    return Ok(tree);
                }
            }
            Err(HarnessError::RetriesExhausted {
                n,
                retries: max_retries,
            })
        }
        GeneratorSpec::MirroredSymmetric { half, seed } => {
            if half == 0 {
                return Err(invalid("need at least one vertex per side"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let side = random_tree(half, &mut rng);
            let anchor = rng.gen_range(0..half);
            let mut edges = side.edges();
            edges.extend(side.edges().into_iter().map(|(u, v)| (u + half, v + half)));
            edges.push((anchor, anchor + half));
            let glued = TreeTopology::from_edges(2 * half, &edges)?;
            let mut perm: Vec<Vertex> = (0..2 * half).collect();
            perm.shuffle(&mut rng);
            Ok(glued.relabeled(&perm))
        }
    }
}

/// Decodes a uniformly random Prüfer sequence.
fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> TreeTopology {
    if n <= 2 {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        return TreeTopology::from_edges(n, &edges).expect("tiny tree");
    }
    let seq: Vec<Vertex> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<Vertex> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = leaves.pop_first().expect("a Prüfer step always has a leaf");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let last: Vec<_> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    TreeTopology::from_edges(n, &edges).expect("Prüfer decoding yields a tree")
}
