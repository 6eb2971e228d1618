//! Membership of dependency structures in formal grammar classes: planar,
//! projective, well-nested with gap degree ≤ 1 (WG1), and 1-Endpoint-Crossing
//! (1EC). The [`oracle`] submodule carries slow, definition-literal
//! re-implementations used as independent test oracles.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tree::{DepStructure, Edge};

/// Stable identifiers for the surveyable classes. `All` is the universal
/// class (no constraint).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    All,
    Planar,
    Projective,
    Wg1,
    Ec1,
}

impl ClassId {
    /// All supported classes, in lattice order.
    pub const ALL: [ClassId; 5] = [
        ClassId::All,
        ClassId::Planar,
        ClassId::Projective,
        ClassId::Wg1,
        ClassId::Ec1,
    ];

    /// The stable lowercase identifier used in CLI flags and CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            ClassId::All => "all",
            ClassId::Planar => "planar",
            ClassId::Projective => "projective",
            ClassId::Wg1 => "wg1",
            ClassId::Ec1 => "1ec",
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failure to resolve a class identifier.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassParseError {
    /// Recognized family (MH_k) with no membership predicate implemented;
    /// the registry slot exists for schema compatibility only.
    #[error("unsupported class \"{0}\": MH_k membership is not implemented")]
    Unsupported(String),
    #[error("unknown class \"{0}\" (expected one of: all, planar, projective, wg1, 1ec)")]
    Unknown(String),
}

impl FromStr for ClassId {
    type Err = ClassParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(ClassId::All),
            "planar" => Ok(ClassId::Planar),
            "projective" => Ok(ClassId::Projective),
            "wg1" => Ok(ClassId::Wg1),
            "1ec" => Ok(ClassId::Ec1),
            other => {
                let rest = other.strip_prefix("mh").unwrap_or("");
                if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                    Err(ClassParseError::Unsupported(other.to_string()))
                } else {
                    Err(ClassParseError::Unknown(other.to_string()))
                }
            }
        }
    }
}

/// Per-structure membership flags. The universal class is implicitly true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassMask {
    pub planar: bool,
    pub projective: bool,
    pub wg1: bool,
    pub ec1: bool,
}

impl ClassMask {
    pub fn contains(&self, class: ClassId) -> bool {
        match class {
            ClassId::All => true,
            ClassId::Planar => self.planar,
            ClassId::Projective => self.projective,
            ClassId::Wg1 => self.wg1,
            ClassId::Ec1 => self.ec1,
        }
    }
}

/// True iff no pair of arcs crosses.
pub fn is_planar(s: &DepStructure) -> bool {
    let edges = s.edges();
    no_crossings(&edges)
}

fn no_crossings(edges: &[Edge]) -> bool {
    for (i, a) in edges.iter().enumerate() {
        for b in &edges[i + 1..] {
            if a.crosses(b) {
                return false;
            }
        }
    }
    true
}

/// True iff the structure is planar and no arc covers the root position.
pub fn is_projective(s: &DepStructure) -> bool {
    let edges = s.edges();
    let root = s.root();
    no_crossings(&edges) && !edges.iter().any(|e| e.covers(root))
}

/// Maximum number of discontinuities over all yields (blocks − 1).
pub fn gap_degree(s: &DepStructure) -> usize {
    let yields = YieldMasks::of(s);
    (1..=s.n())
        .map(|v| yields.runs(v).saturating_sub(1))
        .max()
        .unwrap_or(0)
}

/// True iff no two disjoint yields interleave (pattern a < b < a' < b').
pub fn is_well_nested(s: &DepStructure) -> bool {
    let yields = YieldMasks::of(s);
    well_nested(&yields, s.n())
}

fn well_nested(yields: &YieldMasks, n: usize) -> bool {
    // Interleaving requires both yields to be discontiguous, so only
    // multi-block nodes can participate.
    let gappy: Vec<usize> = (1..=n).filter(|&v| yields.runs(v) >= 2).collect();
    for (i, &u) in gappy.iter().enumerate() {
        for &v in &gappy[i + 1..] {
            let a = yields.row(u);
            let b = yields.row(v);
            if disjoint(a, b) && interleaved(a, b) {
                return false;
            }
        }
    }
    true
}

/// True iff the structure is well-nested with gap degree at most 1.
pub fn is_wg1(s: &DepStructure) -> bool {
    gap_degree(s) <= 1 && is_well_nested(s)
}

/// True iff for every arc, all arcs crossing it are incident to a common
/// node (computed as the intersection of their endpoint sets).
pub fn is_1ec(s: &DepStructure) -> bool {
    let edges = s.edges();
    one_endpoint_crossing(&edges)
}

fn one_endpoint_crossing(edges: &[Edge]) -> bool {
    for e in edges {
        let mut common: Option<(usize, Option<usize>)> = None;
        for f in edges {
            if !e.crosses(f) {
                continue;
            }
            common = match common {
                // First crosser: both endpoints still eligible.
                None => Some((f.head, Some(f.dep))),
                Some((u, v)) => {
                    let keep_u = u == f.head || u == f.dep;
                    let keep_v = v.is_some_and(|v| v == f.head || v == f.dep);
                    match (keep_u, keep_v) {
                        (true, true) => Some((u, v)),
                        (true, false) => Some((u, None)),
                        (false, true) => Some((v.unwrap(), None)),
                        (false, false) => return false,
                    }
                }
            };
        }
    }
    true
}

/// Computes all four flags in one pass over shared intermediates.
pub fn classify(s: &DepStructure) -> ClassMask {
    let edges = s.edges();
    let planar = no_crossings(&edges);
    let projective = planar && !edges.iter().any(|e| e.covers(s.root()));
    let ec1 = planar || one_endpoint_crossing(&edges);
    let yields = YieldMasks::of(s);
    let gap = (1..=s.n())
        .map(|v| yields.runs(v).saturating_sub(1))
        .max()
        .unwrap_or(0);
    let wg1 = gap <= 1 && well_nested(&yields, s.n());
    ClassMask { planar, projective, wg1, ec1 }
}

/// Yield bitmasks for every node, one row of `words` u64 words per node.
/// Built bottom-up by processing nodes in decreasing depth order.
struct YieldMasks {
    words: usize,
    bits: Vec<u64>,
}

impl YieldMasks {
    fn of(s: &DepStructure) -> Self {
        let n = s.n();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for v in 1..=n {
            bits[(v - 1) * words + (v - 1) / 64] |= 1 << ((v - 1) % 64);
        }
        // Depth of every node, memoized along head chains.
        let mut depth = vec![usize::MAX; n + 1];
        depth[s.root()] = 0;
        let mut path = Vec::new();
        for v in 1..=n {
            let mut cur = v;
            while depth[cur] == usize::MAX {
                path.push(cur);
                cur = s.head(cur).expect("non-root has a head");
            }
            let mut d = depth[cur];
            while let Some(p) = path.pop() {
                d += 1;
                depth[p] = d;
            }
        }
        let mut order: Vec<usize> = (1..=n).collect();
        order.sort_unstable_by_key(|&v| std::cmp::Reverse(depth[v]));
        for v in order {
            if let Some(h) = s.head(v) {
                for w in 0..words {
                    let child_word = bits[(v - 1) * words + w];
                    bits[(h - 1) * words + w] |= child_word;
                }
            }
        }
        Self { words, bits }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[(v - 1) * self.words..v * self.words]
    }

    /// Number of maximal contiguous blocks in the yield of `v`.
    fn runs(&self, v: usize) -> usize {
        let mut runs = 0usize;
        let mut carry = 0u64; // top bit of the previous word
        for &w in self.row(v) {
            // A run starts wherever a bit is set and its predecessor is not.
            runs += (w & !((w << 1) | carry)).count_ones() as usize;
            carry = w >> 63;
        }
        runs
    }
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

/// For two disjoint sets, true iff ownership alternates at least three times
/// when scanning the union in position order — equivalent to the existence
/// of a < b < a' < b' with a, a' in one set and b, b' in the other.
fn interleaved(a: &[u64], b: &[u64]) -> bool {
    let mut last: Option<bool> = None;
    let mut switches = 0;
    for (&x, &y) in a.iter().zip(b) {
        let mut union = x | y;
        while union != 0 {
            let bit = union.trailing_zeros() as usize;
            let in_a = (x >> bit) & 1 == 1;
            if last.is_some_and(|l| l != in_a) {
                switches += 1;
                if switches >= 3 {
                    return true;
                }
            }
            last = Some(in_a);
            union &= union - 1;
        }
    }
    false
}

/// Definition-literal membership checks. Slow, allocation-happy, and kept
/// deliberately independent of the optimized predicates above: these are the
/// oracles the test suites compare against.
pub mod oracle {
    use std::collections::BTreeSet;

    use crate::classes::ClassMask;
    use crate::tree::{DepStructure, Edge};

    /// Crossing via the "exactly one endpoint strictly inside" formulation.
    pub fn crossing(e1: &Edge, e2: &Edge) -> bool {
        let shared = e1.head == e2.head
            || e1.head == e2.dep
            || e1.dep == e2.head
            || e1.dep == e2.dep;
        if shared {
            return false;
        }
        let (lo, hi) = e1.span();
        let inside = |p: usize| lo < p && p < hi;
        (inside(e2.head) as u8 + inside(e2.dep) as u8) == 1
    }

    pub fn is_planar(s: &DepStructure) -> bool {
        let es = s.edges();
        for i in 0..es.len() {
            for j in i + 1..es.len() {
                if crossing(&es[i], &es[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_projective(s: &DepStructure) -> bool {
        if !is_planar(s) {
            return false;
        }
        let root = s.root();
        for e in s.edges() {
            let (lo, hi) = e.span();
            if (lo + 1..hi).any(|p| p == root) {
                return false;
            }
        }
        true
    }

    /// Yield as a closure fixpoint over the child relation.
    pub fn yield_set(s: &DepStructure, v: usize) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([v]);
        loop {
            let mut grew = false;
            for dep in 1..=s.n() {
                if let Some(h) = s.head(dep) {
                    if set.contains(&h) && set.insert(dep) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    }

    fn all_yields(s: &DepStructure) -> Vec<BTreeSet<usize>> {
        (1..=s.n()).map(|v| yield_set(s, v)).collect()
    }

    fn gap_of(yields: &[BTreeSet<usize>], n: usize) -> usize {
        let mut worst = 0;
        for y in yields {
            let mut blocks = 0;
            let mut prev = false;
            for p in 1..=n {
                let cur = y.contains(&p);
                if cur && !prev {
                    blocks += 1;
                }
                prev = cur;
            }
            worst = worst.max(blocks - 1);
        }
        worst
    }

    pub fn gap_degree(s: &DepStructure) -> usize {
        gap_of(&all_yields(s), s.n())
    }

    /// Greedy minimal chain a < b < a' < b' over two sorted, disjoint sets.
    fn chain_exists(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
        let Some(&first_a) = a.iter().next() else { return false };
        let Some(&first_b) = b.range(first_a + 1..).next() else { return false };
        let Some(&second_a) = a.range(first_b + 1..).next() else { return false };
        b.range(second_a + 1..).next().is_some()
    }

    fn well_nested_of(yields: &[BTreeSet<usize>]) -> bool {
        for i in 0..yields.len() {
            for j in i + 1..yields.len() {
                let (a, b) = (&yields[i], &yields[j]);
                if a.intersection(b).next().is_none()
                    && (chain_exists(a, b) || chain_exists(b, a))
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_well_nested(s: &DepStructure) -> bool {
        well_nested_of(&all_yields(s))
    }

    pub fn is_wg1(s: &DepStructure) -> bool {
        let yields = all_yields(s);
        well_nested_of(&yields) && gap_of(&yields, s.n()) <= 1
    }

    /// Literal common-node search: some position must be incident to every
    /// arc that crosses the given one.
    pub fn is_1ec(s: &DepStructure) -> bool {
        let es = s.edges();
        for e in &es {
            let crossers: Vec<&Edge> = es.iter().filter(|f| crossing(e, f)).collect();
            if crossers.len() < 2 {
                continue;
            }
            let common = (1..=s.n())
                .any(|p| crossers.iter().all(|f| f.head == p || f.dep == p));
            if !common {
                return false;
            }
        }
        true
    }

    pub fn classify(s: &DepStructure) -> ClassMask {
        let planar = is_planar(s);
        let yields = all_yields(s);
        ClassMask {
            planar,
            projective: planar && is_projective(s),
            wg1: well_nested_of(&yields) && gap_of(&yields, s.n()) <= 1,
            ec1: is_1ec(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prufer;

    fn s(heads: &[usize]) -> DepStructure {
        DepStructure::from_heads(heads).unwrap()
    }

    #[test]
    fn planar_cases() {
        assert!(is_planar(&s(&[0, 1, 2, 3])));
        // Edges (1,3),(3,4),(4,2); the pair (1,3)×(2,4) crosses.
        assert!(!is_planar(&s(&[0, 4, 1, 3])));
        for heads in [[0usize, 1, 2], [2, 0, 1], [3, 3, 0]] {
            assert!(is_planar(&s(&heads)));
        }
    }

    #[test]
    fn projective_cases() {
        assert!(is_projective(&s(&[0, 1, 1])));
        // Root 2 is covered by the arc (1,3).
        assert!(!is_projective(&s(&[2, 0, 1])));
        assert!(is_projective(&s(&[0, 1, 2, 3, 4])));
    }

    #[test]
    fn gap_degree_cases() {
        assert_eq!(gap_degree(&s(&[0, 1, 2, 3])), 0);
        // Yield of 2 is {2,4}: two blocks.
        assert_eq!(gap_degree(&s(&[3, 3, 0, 2, 3])), 1);
        // Yield of 2 is {2,4,6}: three blocks.
        assert_eq!(gap_degree(&s(&[0, 1, 1, 2, 1, 4])), 2);
    }

    #[test]
    fn well_nested_cases() {
        assert!(is_well_nested(&s(&[0, 1, 1]))); // projective
        // Yields {2,4} and {3,5} interleave: 2 < 3 < 4 < 5.
        assert!(!is_well_nested(&s(&[0, 1, 1, 2, 3])));
        assert!(is_well_nested(&s(&[3, 3, 0, 2, 3])));
    }

    #[test]
    fn wg1_cases() {
        assert!(is_wg1(&s(&[0, 1, 1, 3])));
        assert!(!is_wg1(&s(&[0, 1, 1, 2, 1, 4]))); // gap degree 2
        assert!(!is_wg1(&s(&[0, 1, 1, 2, 3]))); // ill-nested
    }

    #[test]
    fn ec1_cases() {
        assert!(is_1ec(&s(&[0, 1, 2, 3]))); // planar, vacuous
        // C((2,4)) = {(1,3),(3,5)}: common node 3.
        assert!(is_1ec(&s(&[0, 1, 1, 2, 3])));
        // C((3,6)) = {(1,4),(2,5)}: no shared endpoint.
        assert!(!is_1ec(&s(&[0, 1, 1, 1, 2, 3])));
    }

    #[test]
    fn classify_fixtures() {
        let chain = classify(&s(&[0, 1, 2, 3]));
        assert!(chain.planar && chain.projective && chain.wg1 && chain.ec1);

        let ill = classify(&s(&[0, 1, 1, 2, 3]));
        assert_eq!(
            (ill.planar, ill.projective, ill.wg1, ill.ec1),
            (false, false, false, true)
        );

        // The n=8, D=13 figure fixture: 1EC but not planar.
        let fig1a = classify(&s(&[2, 3, 0, 3, 2, 7, 5, 4]));
        assert!(fig1a.ec1 && !fig1a.planar);
    }

    #[test]
    fn class_names_round_trip() {
        for c in ClassId::ALL {
            assert_eq!(c.name().parse::<ClassId>().unwrap(), c);
        }
        assert_eq!(
            "mh4".parse::<ClassId>(),
            Err(ClassParseError::Unsupported("mh4".into()))
        );
        assert_eq!(
            "mh5".parse::<ClassId>(),
            Err(ClassParseError::Unsupported("mh5".into()))
        );
        assert_eq!(
            "frobnicate".parse::<ClassId>(),
            Err(ClassParseError::Unknown("frobnicate".into()))
        );
    }

    #[test]
    fn implication_lattice_small_exhaustive() {
        for n in 2..=6 {
            for st in prufer::enumerate_all(n).unwrap() {
                let m = classify(&st);
                assert!(!m.projective || m.planar, "{:?}", st.numeric_heads());
                assert!(!m.planar || m.ec1, "{:?}", st.numeric_heads());
                assert!(!m.projective || m.wg1, "{:?}", st.numeric_heads());
            }
        }
    }

    #[test]
    fn projective_iff_gap_zero_small_exhaustive() {
        for n in 2..=6 {
            for st in prufer::enumerate_all(n).unwrap() {
                assert_eq!(
                    is_projective(&st),
                    gap_degree(&st) == 0,
                    "{:?}",
                    st.numeric_heads()
                );
            }
        }
    }

    #[test]
    fn n3_census() {
        let all: Vec<DepStructure> = prufer::enumerate_all(3).unwrap().collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all.iter().filter(|s| is_projective(s)).count(), 7);
        assert_eq!(all.iter().filter(|s| is_planar(s)).count(), 9);
        assert_eq!(all.iter().filter(|s| is_wg1(s)).count(), 9);
        assert_eq!(all.iter().filter(|s| is_1ec(s)).count(), 9);
    }

    #[test]
    fn optimized_agrees_with_oracle_small() {
        for n in 2..=6 {
            for st in prufer::enumerate_all(n).unwrap() {
                assert_eq!(classify(&st), oracle::classify(&st), "{:?}", st.numeric_heads());
                assert_eq!(gap_degree(&st), oracle::gap_degree(&st));
            }
        }
    }

    #[test]
    fn root_independence_of_planar_and_1ec() {
        // Re-rooting the same undirected tree + arrangement never changes
        // planarity or 1EC; projectivity does change (n=3 path witness).
        for n in [3usize, 5, 6] {
            for code_idx in 0..prufer::count_labelled_trees_u64(n).unwrap() {
                let tree = prufer::tree_from_index(n, code_idx);
                let rooted: Vec<DepStructure> =
                    (1..=n).map(|r| prufer::root_tree(&tree, r)).collect();
                let planar: Vec<bool> = rooted.iter().map(is_planar).collect();
                let ec1: Vec<bool> = rooted.iter().map(is_1ec).collect();
                assert!(planar.windows(2).all(|w| w[0] == w[1]));
                assert!(ec1.windows(2).all(|w| w[0] == w[1]));
            }
        }
        // Path 2–1–3: projective when rooted at 1, not when rooted at 2.
        let tree = prufer::UndirectedTree::new(3, vec![(1, 2), (1, 3)]).unwrap();
        assert!(is_projective(&prufer::root_tree(&tree, 1)));
        assert!(!is_projective(&prufer::root_tree(&tree, 2)));
    }

    #[test]
    fn oracle_interleave_matches_quadruple_definition() {
        use std::collections::BTreeSet;
        // Validate the greedy-chain oracle against the literal quadruple
        // search on all small disjoint set pairs over 1..=6.
        let subsets: Vec<BTreeSet<usize>> = (1u32..64)
            .map(|m| (1..=6).filter(|i| m >> (i - 1) & 1 == 1).collect())
            .collect();
        for a in &subsets {
            for b in &subsets {
                if a.intersection(b).next().is_some() {
                    continue;
                }
                let quadruple = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
                    a.iter().any(|&x| {
                        b.iter().any(|&y| {
                            x < y
                                && a.iter().any(|&x2| {
                                    y < x2 && b.iter().any(|&y2| x2 < y2)
                                })
                        })
                    })
                };
                // The pair is unordered: either labeling may lead.
                let literal = quadruple(a, b) || quadruple(b, a);
                let masks = |s: &BTreeSet<usize>| {
                    let mut w = [0u64; 1];
                    for &p in s {
                        w[0] |= 1 << (p - 1);
                    }
                    w
                };
                let (ma, mb) = (masks(a), masks(b));
                let ours = interleaved(&ma, &mb) || interleaved(&mb, &ma);
                assert_eq!(ours, literal, "a={a:?} b={b:?}");
            }
        }
    }
}
