//! Exhaustive enumeration and uniform random sampling of rooted labelled
//! trees, via the Prüfer bijection between length-(n−2) label sequences and
//! labelled trees on n vertices.
//!
//! Every undirected tree is rooted at each of its n vertices in turn
//! (exhaustive) or at a uniformly random vertex (sampling), and vertex
//! labels become positions in the linear arrangement. A random code plus a
//! random root hits each of the n^(n−1) directed trees with probability
//! exactly n^−(n−1).
//!
//! Determinism: the sample stream for (n, S, seed) is fixed. It is cut into
//! chunks of [`SAMPLE_CHUNK`] draws; chunk `i` draws from an independent
//! ChaCha8 stream derived from (seed, n, i), so results do not depend on
//! worker count or schedule.

use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::ops::Range;

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tree::DepStructure;

/// Largest length accepted by [`enumerate_all`] (n^(n−1) = 10⁹ structures).
pub const EXHAUSTIVE_MAX_N: usize = 10;

/// Fixed number of draws per sampling chunk; part of the reproducibility
/// contract (changing it changes every sampled stream).
pub const SAMPLE_CHUNK: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("length must be at least 2, got {0}")]
    LengthTooSmall(usize),
    #[error(
        "exhaustive enumeration for n={n} would emit n^(n-1) structures; \
         refusing beyond n={max}"
    )]
    ExhaustiveTooLarge { n: usize, max: usize },
    #[error("prüfer code entry {label} out of range 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("code has {len} entries, n={n} requires {expected}")]
    CodeLength { len: usize, n: usize, expected: usize },
    #[error("edge list does not form a tree on {0} vertices")]
    NotATree(usize),
    #[error("invalid generation config: {0}")]
    Config(String),
}

/// A Prüfer sequence: n−2 labels in 1..=n (empty when n = 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruferCode {
    n: usize,
    code: Vec<usize>,
}

impl PruferCode {
    pub fn new(n: usize, code: Vec<usize>) -> Result<Self, GenError> {
        if n < 2 {
            return Err(GenError::LengthTooSmall(n));
        }
        if code.len() != n - 2 {
            return Err(GenError::CodeLength { len: code.len(), n, expected: n - 2 });
        }
        if let Some(&label) = code.iter().find(|&&l| l == 0 || l > n) {
            return Err(GenError::LabelOutOfRange { label, n });
        }
        Ok(Self { n, code })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[usize] {
        &self.code
    }
}

/// A labelled undirected tree on vertices 1..=n, stored as a normalized
/// (sorted, min-first) edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedTree {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl UndirectedTree {
    /// Validates that the edge list forms a tree on 1..=n.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GenError> {
        if n < 2 {
            return Err(GenError::LengthTooSmall(n));
        }
        if edges.len() != n - 1 {
            return Err(GenError::NotATree(n));
        }
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for &(u, v) in &edges {
            if u == 0 || u > n || v == 0 || v > n || u == v {
                return Err(GenError::NotATree(n));
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(GenError::NotATree(n)); // cycle
            }
            parent[ru] = rv;
        }
        Ok(Self::normalized(n, edges))
    }

    fn normalized(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> =
            edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sum of |u − v| over the edges; equals D of every rooting.
    pub fn distance_sum(&self) -> u64 {
        self.edges.iter().map(|&(u, v)| (v - u) as u64).sum()
    }
}

/// Decodes a Prüfer sequence into the unique corresponding tree.
pub fn prufer_decode(code: &PruferCode) -> UndirectedTree {
    let n = code.n;
    let mut degree = vec![1u32; n + 1];
    for &c in &code.code {
        degree[c] += 1;
    }
    // Min-heap of current leaves; the smallest leaf joins the next code entry.
    let mut leaves: BinaryHeap<std::cmp::Reverse<usize>> = (1..=n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code.code {
        let std::cmp::Reverse(u) = leaves.pop().expect("leaf available");
        edges.push((u, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(u) = leaves.pop().expect("two leaves remain");
    let std::cmp::Reverse(v) = leaves.pop().expect("two leaves remain");
    edges.push((u, v));
    debug_assert!(leaves.is_empty());
    UndirectedTree::normalized(n, edges)
}

/// Encodes a tree as its Prüfer sequence: repeatedly strip the smallest
/// leaf, recording its neighbour. Inverse of [`prufer_decode`].
pub fn prufer_encode(tree: &UndirectedTree) -> PruferCode {
    let n = tree.n;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &(u, v) in &tree.edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut removed = vec![false; n + 1];
    let mut leaves: BinaryHeap<std::cmp::Reverse<usize>> = (1..=n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut code = Vec::with_capacity(n.saturating_sub(2));
    for _ in 0..n.saturating_sub(2) {
        let std::cmp::Reverse(u) = leaves.pop().expect("leaf available");
        removed[u] = true;
        let neighbour = *adjacency[u]
            .iter()
            .find(|&&v| !removed[v])
            .expect("leaf has a live neighbour");
        code.push(neighbour);
        degree[neighbour] -= 1;
        if degree[neighbour] == 1 {
            leaves.push(std::cmp::Reverse(neighbour));
        }
    }
    PruferCode { n, code }
}

/// Cayley's count of labelled trees, T(n) = n^(n−2).
pub fn count_labelled_trees(n: usize) -> BigUint {
    assert!(n >= 2, "count_labelled_trees requires n >= 2");
    BigUint::from(n).pow(n as u32 - 2)
}

/// T(n) as u64, or `None` when it does not fit.
pub fn count_labelled_trees_u64(n: usize) -> Option<u64> {
    assert!(n >= 2);
    (n as u64).checked_pow(n as u32 - 2)
}

/// Number of rooted structures, nT(n) = n^(n−1), as u64.
pub fn count_structures_u64(n: usize) -> Option<u64> {
    assert!(n >= 2);
    (n as u64).checked_pow(n as u32 - 1)
}

/// Roots the tree at `root`: every other vertex's head is its neighbour on
/// the unique path towards the root, and labels become linear positions.
pub fn root_tree(tree: &UndirectedTree, root: usize) -> DepStructure {
    let n = tree.n;
    assert!(root >= 1 && root <= n, "root {root} out of range 1..={n}");
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &(u, v) in &tree.edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut heads: Vec<Option<NonZeroUsize>> = vec![None; n];
    let mut visited = vec![false; n + 1];
    let mut stack = vec![root];
    visited[root] = true;
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !visited[v] {
                visited[v] = true;
                heads[v - 1] = NonZeroUsize::new(u);
                stack.push(v);
            }
        }
    }
    DepStructure::from_heads_unchecked(heads)
}

/// The `index`-th tree in lexicographic Prüfer-code order (codes read as
/// base-n numerals, digits 1..=n).
pub fn tree_from_index(n: usize, index: u64) -> UndirectedTree {
    let m = n.saturating_sub(2);
    let mut code = vec![1usize; m];
    let mut rest = index;
    for slot in code.iter_mut().rev() {
        *slot = (rest % n as u64) as usize + 1;
        rest /= n as u64;
    }
    debug_assert_eq!(rest, 0, "tree index out of range");
    prufer_decode(&PruferCode { n, code })
}

/// Streams every rooted structure of length n exactly once, in a canonical
/// deterministic order: lexicographic Prüfer code, then ascending root.
///
/// Refuses n > [`EXHAUSTIVE_MAX_N`]; that is a refusal, not silent sampling.
pub fn enumerate_all(n: usize) -> Result<ExhaustiveIter, GenError> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(GenError::ExhaustiveTooLarge { n, max: EXHAUSTIVE_MAX_N });
    }
    enumerate_all_unbounded(n)
}

/// [`enumerate_all`] without the practicality guard (still bounded by the
/// tree count fitting in u64). For forced runs only.
pub fn enumerate_all_unbounded(n: usize) -> Result<ExhaustiveIter, GenError> {
    if n < 2 {
        return Err(GenError::LengthTooSmall(n));
    }
    let trees = count_labelled_trees_u64(n)
        .ok_or(GenError::ExhaustiveTooLarge { n, max: EXHAUSTIVE_MAX_N })?;
    Ok(ExhaustiveIter::over_tree_range(n, 0..trees))
}

/// Iterator over the rootings of a lexicographic range of trees.
#[derive(Debug)]
pub struct ExhaustiveIter {
    n: usize,
    next_tree: u64,
    tree_end: u64,
    current: Option<(UndirectedTree, usize)>,
}

impl ExhaustiveIter {
    /// Enumerate only the trees with lexicographic indices in `trees`
    /// (used to partition exhaustive surveys into parallel chunks).
    pub fn over_tree_range(n: usize, trees: Range<u64>) -> Self {
        Self { n, next_tree: trees.start, tree_end: trees.end, current: None }
    }
}

impl Iterator for ExhaustiveIter {
    type Item = DepStructure;

    fn next(&mut self) -> Option<DepStructure> {
        loop {
            if let Some((tree, root)) = &mut self.current {
                if *root <= self.n {
                    let s = root_tree(tree, *root);
                    *root += 1;
                    return Some(s);
                }
                self.current = None;
            }
            if self.next_tree >= self.tree_end {
                return None;
            }
            self.current = Some((tree_from_index(self.n, self.next_tree), 1));
            self.next_tree += 1;
        }
    }
}

fn stream_id(n: usize, chunk: u64) -> u64 {
    debug_assert!(chunk < 1 << 32, "chunk index exceeds stream space");
    ((n as u64) << 32) ^ chunk
}

/// The chunk partition of a sample run: (chunk index, draws in chunk).
pub fn sample_chunks(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = samples / SAMPLE_CHUNK;
    let rem = samples % SAMPLE_CHUNK;
    (0..full)
        .map(|i| (i, SAMPLE_CHUNK))
        .chain((rem > 0).then_some((full, rem)))
}

/// One chunk of the deterministic sample stream for (n, seed).
pub fn sample_chunk(n: usize, seed: u64, chunk: u64, len: u64) -> SampleChunkIter {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(n, chunk));
    SampleChunkIter { n, rng, remaining: len }
}

pub struct SampleChunkIter {
    n: usize,
    rng: ChaCha8Rng,
    remaining: u64,
}

impl Iterator for SampleChunkIter {
    type Item = DepStructure;

    fn next(&mut self) -> Option<DepStructure> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let n = self.n;
        // Draw order is fixed: the n−2 code labels, then the root.
        let code: Vec<usize> =
            (0..n - 2).map(|_| self.rng.random_range(1..=n)).collect();
        let tree = prufer_decode(&PruferCode { n, code });
        let root = self.rng.random_range(1..=n);
        Some(root_tree(&tree, root))
    }
}

/// S independent draws from the uniform distribution over all n^(n−1)
/// rooted structures (with replacement). Identical (n, S, seed) yields an
/// identical stream.
pub fn sample_uniform(n: usize, samples: u64, seed: u64) -> Result<SampleIter, GenError> {
    if n < 2 {
        return Err(GenError::LengthTooSmall(n));
    }
    if samples == 0 {
        return Err(GenError::Config("samples must be at least 1".into()));
    }
    Ok(SampleIter {
        n,
        seed,
        chunks: sample_chunks(samples).collect(),
        next_chunk: 0,
        current: None,
    })
}

pub struct SampleIter {
    n: usize,
    seed: u64,
    chunks: Vec<(u64, u64)>,
    next_chunk: usize,
    current: Option<SampleChunkIter>,
}

impl Iterator for SampleIter {
    type Item = DepStructure;

    fn next(&mut self) -> Option<DepStructure> {
        loop {
            if let Some(chunk) = &mut self.current {
                if let Some(s) = chunk.next() {
                    return Some(s);
                }
                self.current = None;
            }
            let &(idx, len) = self.chunks.get(self.next_chunk)?;
            self.next_chunk += 1;
            self.current = Some(sample_chunk(self.n, self.seed, idx, len));
        }
    }
}

/// Generation parameters for a survey run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    /// Smallest length surveyed (≥ 3; shorter sentences are statistically
    /// trivial).
    pub n_min: usize,
    /// Largest length surveyed.
    pub n_max: usize,
    /// Largest length handled exhaustively; lengths above it are sampled.
    pub n_star: usize,
    /// Draws per sampled length.
    pub samples: u64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self { n_min: 3, n_max: 25, n_star: 10, samples: 1_000_000, seed: 0 }
    }
}

impl GenConfig {
    /// The configuration of the original full-scale study
    /// (U ≈ 1.6·10^10 structures).
    pub fn paper() -> Self {
        Self { samples: 1_000_000_000, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_min < 3 {
            return Err(GenError::Config(format!(
                "n_min must be at least 3, got {}",
                self.n_min
            )));
        }
        if !(self.n_min <= self.n_star && self.n_star <= self.n_max) {
            return Err(GenError::Config(format!(
                "need n_min <= n_star <= n_max, got {} / {} / {}",
                self.n_min, self.n_star, self.n_max
            )));
        }
        if self.samples == 0 {
            return Err(GenError::Config("samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Total number of structures a run will generate:
/// (n_max − n*)·S + Σ_{n=n_min..n*} n^(n−1).
pub fn estimate_workload(cfg: &GenConfig) -> BigUint {
    let sampled_lengths = cfg.n_max.saturating_sub(cfg.n_star) as u64;
    let mut total = BigUint::from(sampled_lengths) * BigUint::from(cfg.samples);
    for n in cfg.n_min..=cfg.n_star {
        total += BigUint::from(n).pow(n as u32 - 1);
    }
    total
}
