//! Dependency structures, edges, distances, yields, and the geometric
//! primitives (covering, crossing) everything else builds on.
//!
//! A structure is a rooted tree over sentence positions 1..n; the linear
//! arrangement is the position labels themselves. Distances are measured in
//! words: adjacent words are at distance 1.

use std::num::NonZeroUsize;

use thiserror::Error;

use crate::rational::{ratio, Rational};

/// Validation failure for a head vector.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("structure needs at least 2 words, got {0}")]
    TooShort(usize),
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("position {pos}: head {head} out of range 1..={n}")]
    HeadOutOfRange { pos: usize, head: usize, n: usize },
    #[error("position {0} is its own head")]
    SelfHead(usize),
    #[error("cycle through position {0}")]
    Cycle(usize),
}

/// A rooted dependency tree on positions 1..n. `heads[i]` holds the head of
/// position i+1; `None` marks the root. Positions double as
/// linear-arrangement slots: position i is the i-th word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepStructure {
    heads: Vec<Option<NonZeroUsize>>,
    root: usize,
}

impl DepStructure {
    /// Builds a structure from a numeric head vector where 0 denotes the
    /// root (the on-disk convention). Validates all invariants: exactly one
    /// root, heads in range, no self-heads, no cycles.
    pub fn from_heads(heads: &[usize]) -> Result<Self, StructureError> {
        let n = heads.len();
        if n < 2 {
            return Err(StructureError::TooShort(n));
        }
        let mut root = None;
        for (i, &h) in heads.iter().enumerate() {
            let pos = i + 1;
            if h == 0 {
                if root.replace(pos).is_some() {
                    return Err(StructureError::RootCount(2));
                }
            } else if h > n {
                return Err(StructureError::HeadOutOfRange { pos, head: h, n });
            } else if h == pos {
                return Err(StructureError::SelfHead(pos));
            }
        }
        let root = root.ok_or(StructureError::RootCount(0))?;
        // Every position must reach the root in at most n−1 steps.
        for start in 1..=n {
            let mut cur = start;
            let mut steps = 0;
            while heads[cur - 1] != 0 {
                cur = heads[cur - 1];
                steps += 1;
                if steps >= n {
                    return Err(StructureError::Cycle(start));
                }
            }
        }
        let heads = heads.iter().map(|&h| NonZeroUsize::new(h)).collect();
        Ok(Self { heads, root })
    }

    /// Internal constructor for generators that produce valid trees by
    /// construction.
    pub(crate) fn from_heads_unchecked(heads: Vec<Option<NonZeroUsize>>) -> Self {
        let root = heads
            .iter()
            .position(Option::is_none)
            .expect("rooted tree has a root")
            + 1;
        let s = Self { heads, root };
        debug_assert!(
            DepStructure::from_heads(&s.numeric_heads()).as_ref() == Ok(&s),
            "generator produced an invalid structure"
        );
        s
    }

    /// Word count.
    pub fn n(&self) -> usize {
        self.heads.len()
    }

    /// The root position.
    pub fn root(&self) -> usize {
        self.root
    }

    /// Head of `pos`, or `None` for the root. Panics if `pos` is out of
    /// range.
    pub fn head(&self, pos: usize) -> Option<usize> {
        self.heads[pos - 1].map(NonZeroUsize::get)
    }

    /// The numeric head vector with 0 for the root.
    pub fn numeric_heads(&self) -> Vec<usize> {
        self.heads.iter().map(|h| h.map_or(0, NonZeroUsize::get)).collect()
    }

    /// The n−1 edges, ordered by dependent position.
    pub fn edges(&self) -> Vec<Edge> {
        (1..=self.n())
            .filter_map(|dep| self.head(dep).map(|head| Edge { head, dep }))
            .collect()
    }

    /// Sum of dependency distances D and the exact mean ⟨d⟩ = D/(n−1).
    pub fn distance_summary(&self) -> DistanceSummary {
        let n = self.n();
        let sum: u64 = self.edges().iter().map(|e| e.distance() as u64).sum();
        DistanceSummary {
            n,
            sum,
            mean: ratio(sum as i128, (n - 1) as i128),
        }
    }

    /// The yield of `v`: `v` plus all of its descendants, as a sorted list
    /// of positions.
    pub fn yield_of(&self, v: usize) -> Vec<usize> {
        assert!(v >= 1 && v <= self.n(), "position {v} out of range");
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.n() + 1];
        for dep in 1..=self.n() {
            if let Some(h) = self.head(dep) {
                children[h].push(dep);
            }
        }
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(&children[u]);
        }
        out.sort_unstable();
        out
    }
}

/// A dependency arc from a head to its dependent, both sentence positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub head: usize,
    pub dep: usize,
}

impl Edge {
    /// Dependency distance in words; adjacent words are at distance 1.
    pub fn distance(&self) -> usize {
        self.head.abs_diff(self.dep)
    }

    /// Span endpoints as (min, max).
    pub fn span(&self) -> (usize, usize) {
        (self.head.min(self.dep), self.head.max(self.dep))
    }

    /// True iff `p` lies strictly inside the span. Endpoints are never
    /// covered.
    pub fn covers(&self, p: usize) -> bool {
        let (lo, hi) = self.span();
        lo < p && p < hi
    }

    /// True iff the two arcs cross when drawn above the words: spans
    /// interleave and no endpoint is shared.
    pub fn crosses(&self, other: &Edge) -> bool {
        if self.head == other.head
            || self.head == other.dep
            || self.dep == other.head
            || self.dep == other.dep
        {
            return false;
        }
        let (a, b) = self.span();
        let (c, d) = other.span();
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }
}

/// D and ⟨d⟩ for one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSummary {
    pub n: usize,
    /// D, the sum of edge distances.
    pub sum: u64,
    /// ⟨d⟩ = D/(n−1), exact.
    pub mean: Rational,
}

/// Expected ⟨d⟩ under a uniformly random linear arrangement: (n+1)/3.
///
/// Panics if `n < 2`.
pub fn baseline_rla(n: usize) -> Rational {
    assert!(n >= 2, "baseline_rla requires n >= 2, got {n}");
    ratio((n + 1) as i128, 3)
}
