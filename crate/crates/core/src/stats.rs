//! Exact per-(length, class) aggregation of dependency-distance statistics,
//! the survey driver, the undersampling filter, and the baseline
//! comparisons.
//!
//! Counts and distance sums are exact integers; means and proportions are
//! exact rationals. The only floating-point quantity is the standard-error
//! band attached to sampled rows at the reporting boundary.

use std::fmt;

use thiserror::Error;

use crate::classes::{classify, ClassId};
use crate::exec::Executor;
use crate::prufer::{
    count_labelled_trees_u64, count_structures_u64, root_tree, sample_chunk,
    sample_chunks, tree_from_index, GenConfig, GenError,
};
use crate::rational::{ratio, Rational};
use crate::tree::{baseline_rla, DepStructure};

/// Minimum structures behind a sampled estimate before it is reported.
pub const REPORT_THRESHOLD: u64 = 30;

/// Trees decoded per exhaustive work chunk.
const TREES_PER_CHUNK: u64 = 8192;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("length mismatch: accumulator has n={expected}, structure has n={got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot merge {a}/{an} into {b}/{bn}")]
    KeyMismatch { a: ClassId, an: usize, b: ClassId, bn: usize },
    #[error("class {0} absent from survey table")]
    ClassAbsent(ClassId),
}

/// Exact accumulator for one (length, class) cell: structure count, ΣD and
/// ΣD² (the squares feed the standard-error band of sampled rows).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthClassStats {
    pub n: usize,
    pub class: ClassId,
    pub count: u64,
    pub sum_d: i128,
    pub sum_d_sq: i128,
}

impl LengthClassStats {
    pub fn new(n: usize, class: ClassId) -> Self {
        Self { n, class, count: 0, sum_d: 0, sum_d_sq: 0 }
    }

    /// Folds one structure into the accumulator.
    pub fn observe(&mut self, s: &DepStructure) -> Result<(), StatsError> {
        if s.n() != self.n {
            return Err(StatsError::LengthMismatch { expected: self.n, got: s.n() });
        }
        self.add_distance_sum(s.distance_summary().sum);
        Ok(())
    }

    pub(crate) fn add_distance_sum(&mut self, d: u64) {
        self.count += 1;
        self.sum_d += d as i128;
        self.sum_d_sq += (d as i128) * (d as i128);
    }

    /// Componentwise sum; associative and commutative with `new` as
    /// identity.
    pub fn merge(&mut self, other: &Self) -> Result<(), StatsError> {
        if self.n != other.n || self.class != other.class {
            return Err(StatsError::KeyMismatch {
                a: other.class,
                an: other.n,
                b: self.class,
                bn: self.n,
            });
        }
        self.count += other.count;
        self.sum_d += other.sum_d;
        self.sum_d_sq += other.sum_d_sq;
        Ok(())
    }

    /// Pooled mean ⟨d⟩ = ΣD / (count·(n−1)), exact; `None` while empty.
    pub fn mean_d(&self) -> Option<Rational> {
        (self.count > 0)
            .then(|| ratio(self.sum_d, self.count as i128 * (self.n as i128 - 1)))
    }
}

/// Whether a row comes from generated (AS) or attested (RS) structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Artificial,
    Attested,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Artificial => "AS",
            Source::Attested => "RS",
        })
    }
}

/// One survey result cell, ready for emission.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRow {
    pub source: Source,
    pub class: ClassId,
    pub n: usize,
    pub count: u64,
    /// Structures examined at this length (class members and not).
    pub total: u64,
    /// Proportion of examined structures in the class, exact.
    pub p: Rational,
    pub sum_d: i128,
    pub sum_d_sq: i128,
    /// Exact mean ⟨d⟩, `None` when the class was never observed.
    pub mean_d: Option<Rational>,
    /// (n+1)/3.
    pub baseline: Rational,
    /// False when the cell is a sampled estimate backed by fewer than
    /// [`REPORT_THRESHOLD`] structures. A reporting filter, not a
    /// computation filter: the row data is complete either way.
    pub reported: bool,
}

impl SurveyRow {
    /// Builds a row from an accumulator. `total` is the number of
    /// structures examined at this length; `sampled` marks estimate rows,
    /// which are subject to the undersampling filter.
    pub fn from_stats(source: Source, stats: &LengthClassStats, total: u64, sampled: bool) -> Self {
        SurveyRow {
            source,
            class: stats.class,
            n: stats.n,
            count: stats.count,
            total,
            p: ratio(stats.count as i128, total as i128),
            sum_d: stats.sum_d,
            sum_d_sq: stats.sum_d_sq,
            mean_d: stats.mean_d(),
            baseline: baseline_rla(stats.n),
            reported: !sampled || stats.count >= REPORT_THRESHOLD,
        }
    }

    /// Standard error of the mean ⟨d⟩ (sample variance over the observed
    /// per-structure ⟨d⟩ values). `None` below two observations.
    pub fn std_error(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let c = self.count as f64;
        let sum = self.sum_d as f64;
        let sum_sq = self.sum_d_sq as f64;
        let var_d = (sum_sq - sum * sum / c) / (c - 1.0);
        let scale = (self.n as f64 - 1.0) * (self.n as f64 - 1.0);
        Some((var_d / scale / c).max(0.0).sqrt())
    }
}

/// A finished artificial survey: rows sorted by (class name, n), plus the
/// per-length totals for the run manifest.
#[derive(Debug, Clone)]
pub struct SurveyOutcome {
    pub rows: Vec<SurveyRow>,
    pub per_length_total: Vec<(usize, u64)>,
}

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Runs the full per-length experiment: exhaustive for n ≤ n*, uniform
/// sampling above, classifying every structure against `classes`.
/// Exhaustive rows are exact expectations; sampled rows are estimates.
pub fn survey(
    cfg: &GenConfig,
    classes: &[ClassId],
    exec: &Executor,
) -> Result<SurveyOutcome, SurveyError> {
    cfg.validate()?;
    let mut wanted = Vec::new();
    for &c in classes {
        if !wanted.contains(&c) {
            wanted.push(c);
        }
    }
    let mut rows = Vec::new();
    let mut per_length_total = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        let sampled = n > cfg.n_star;
        let (cells, total) = if sampled {
            (sampled_length_stats(n, cfg.samples, cfg.seed, &wanted, exec), cfg.samples)
        } else {
            exhaustive_length_stats(n, &wanted, exec)?
        };
        for cell in &cells {
            rows.push(SurveyRow::from_stats(Source::Artificial, cell, total, sampled));
        }
        per_length_total.push((n, total));
    }
    rows.sort_by(|a, b| a.class.name().cmp(b.class.name()).then(a.n.cmp(&b.n)));
    Ok(SurveyOutcome { rows, per_length_total })
}

fn empty_cells(n: usize, classes: &[ClassId]) -> Vec<LengthClassStats> {
    classes.iter().map(|&c| LengthClassStats::new(n, c)).collect()
}

fn merge_cells(
    mut acc: Vec<LengthClassStats>,
    chunk: Vec<LengthClassStats>,
) -> Vec<LengthClassStats> {
    for (a, b) in acc.iter_mut().zip(&chunk) {
        a.merge(b).expect("chunk cells share keys");
    }
    acc
}

/// Classifies one structure into every requested class cell. D is passed
/// in because it is shared by all rootings of one undirected tree.
fn tally(cells: &mut [LengthClassStats], classes: &[ClassId], s: &DepStructure, d: u64) {
    let mask = classify(s);
    for (cell, &class) in cells.iter_mut().zip(classes) {
        if mask.contains(class) {
            cell.add_distance_sum(d);
        }
    }
}

/// Exact per-class cells for one exhaustively enumerated length. Building
/// block of [`survey`]; exposed for benchmarking and custom drivers.
pub fn exhaustive_length_stats(
    n: usize,
    classes: &[ClassId],
    exec: &Executor,
) -> Result<(Vec<LengthClassStats>, u64), SurveyError> {
    if n > crate::prufer::EXHAUSTIVE_MAX_N {
        return Err(GenError::ExhaustiveTooLarge {
            n,
            max: crate::prufer::EXHAUSTIVE_MAX_N,
        }
        .into());
    }
    let trees = count_labelled_trees_u64(n).expect("guarded by EXHAUSTIVE_MAX_N");
    let ranges: Vec<std::ops::Range<u64>> = (0..trees)
        .step_by(TREES_PER_CHUNK as usize)
        .map(|lo| lo..(lo + TREES_PER_CHUNK).min(trees))
        .collect();
    let chunked = exec.run(ranges, |range| {
        let mut cells = empty_cells(n, classes);
        for idx in range {
            let tree = tree_from_index(n, idx);
            let d = tree.distance_sum();
            for root in 1..=n {
                tally(&mut cells, classes, &root_tree(&tree, root), d);
            }
        }
        cells
    });
    let cells = chunked.into_iter().fold(empty_cells(n, classes), merge_cells);
    let total = count_structures_u64(n).expect("guarded by EXHAUSTIVE_MAX_N");
    Ok((cells, total))
}

/// Estimated per-class cells for one sampled length. Building block of
/// [`survey`]; exposed for benchmarking and custom drivers.
pub fn sampled_length_stats(
    n: usize,
    samples: u64,
    seed: u64,
    classes: &[ClassId],
    exec: &Executor,
) -> Vec<LengthClassStats> {
    let chunks: Vec<(u64, u64)> = sample_chunks(samples).collect();
    let chunked = exec.run(chunks, |(idx, len)| {
        let mut cells = empty_cells(n, classes);
        for s in sample_chunk(n, seed, idx, len) {
            let d = s.distance_summary().sum;
            tally(&mut cells, classes, &s, d);
        }
        cells
    });
    chunked.into_iter().fold(empty_cells(n, classes), merge_cells)
}

/// Smallest n at which the class's exact mean drops below the baseline;
/// `None` if it never does within the table. The table must contain the
/// class (exhaustive rows, scanned in ascending n).
pub fn deviation_onset(
    rows: &[SurveyRow],
    class: ClassId,
) -> Result<Option<usize>, StatsError> {
    let mut of_class: Vec<&SurveyRow> = rows.iter().filter(|r| r.class == class).collect();
    if of_class.is_empty() {
        return Err(StatsError::ClassAbsent(class));
    }
    of_class.sort_by_key(|r| r.n);
    Ok(of_class
        .iter()
        .find(|r| r.mean_d.as_ref().is_some_and(|m| *m < r.baseline))
        .map(|r| r.n))
}

/// Maximum ⟨d⟩ attainable by a planar structure: n/2.
pub fn planar_max_mean(n: usize) -> Rational {
    assert!(n >= 2, "planar_max_mean requires n >= 2");
    ratio(n as i128, 2)
}
