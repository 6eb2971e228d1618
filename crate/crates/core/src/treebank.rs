//! CoNLL-U treebank ingestion and the preprocessing pipeline that turns
//! annotated sentences into valid dependency structures: punctuation
//! removal, reattachment of orphaned nodes to their nearest surviving
//! ancestor, renumbering, and the minimum-length cut.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::num::NonZeroUsize;
use std::path::Path;

use thiserror::Error;

use crate::stats::{LengthClassStats, Source, SurveyRow};
use crate::tree::DepStructure;
use crate::ClassId;

/// One syntactic word after CoNLL-U surface filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub upos: String,
    /// Head token id; 0 marks the sentence root.
    pub head: usize,
    pub deprel: String,
}

/// Where a sentence came from, for error reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub file: String,
    /// 0-based sentence index within the file.
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreebankSentence {
    pub tokens: Vec<Token>,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("{file}:{line}: {reason}")]
    Malformed { file: String, line: usize, reason: String },
    #[error("{file}: {source}")]
    Io { file: String, source: io::Error },
}

/// Streaming CoNLL-U parser. Comment lines, multiword-token ranges
/// (`a-b`) and empty nodes (`a.b`) are skipped; sentences are delimited by
/// blank lines. A malformed line poisons its sentence only: the error is
/// yielded and parsing resumes at the next sentence boundary.
pub struct ConlluReader<R: BufRead> {
    reader: R,
    file: String,
    line_no: usize,
    sentence_idx: usize,
    done: bool,
}

impl<R: BufRead> ConlluReader<R> {
    pub fn new(reader: R, file_label: impl Into<String>) -> Self {
        Self {
            reader,
            file: file_label.into(),
            line_no: 0,
            sentence_idx: 0,
            done: false,
        }
    }

    fn parse_word_line(&self, line: &str) -> Result<Option<Token>, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(format!("expected 10 tab-separated fields, got {}", cols.len()));
        }
        let id_field = cols[0];
        // Multiword-token range lines and empty-node lines carry no tree
        // structure of their own.
        if id_field.contains('-') || id_field.contains('.') {
            return Ok(None);
        }
        let id: usize = id_field
            .parse()
            .map_err(|_| format!("bad token id {id_field:?}"))?;
        if id == 0 {
            return Err("token id 0 is reserved".into());
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| format!("bad head {:?}", cols[6]))?;
        Ok(Some(Token {
            id,
            form: cols[1].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        }))
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = Result<TreebankSentence, ConlluError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut tokens: Vec<Token> = Vec::new();
        let mut poisoned: Option<ConlluError> = None;
        let mut line = String::new();
        loop {
            line.clear();
            let read = match self.reader.read_line(&mut line) {
                Ok(r) => r,
                Err(e) => {
                    self.done = true;
                    return Some(Err(ConlluError::Io { file: self.file.clone(), source: e }));
                }
            };
            if read == 0 {
                self.done = true;
                break;
            }
            self.line_no += 1;
            let trimmed = line.trim_end_matches(['\n', '\r']);
            if trimmed.is_empty() {
                if tokens.is_empty() && poisoned.is_none() {
                    continue; // stray blank line
                }
                break;
            }
            if trimmed.starts_with('#') || poisoned.is_some() {
                continue;
            }
            match self.parse_word_line(trimmed) {
                Ok(Some(token)) => tokens.push(token),
                Ok(None) => {}
                Err(reason) => {
                    poisoned = Some(ConlluError::Malformed {
                        file: self.file.clone(),
                        line: self.line_no,
                        reason,
                    });
                }
            }
        }
        if let Some(err) = poisoned {
            self.sentence_idx += 1;
            return Some(Err(err));
        }
        if tokens.is_empty() {
            return None;
        }
        // After filtering non-word lines the ids must be 1..m consecutive.
        for (i, t) in tokens.iter().enumerate() {
            if t.id != i + 1 {
                let err = ConlluError::Malformed {
                    file: self.file.clone(),
                    line: self.line_no,
                    reason: format!("token ids not consecutive: expected {}, got {}", i + 1, t.id),
                };
                self.sentence_idx += 1;
                return Some(Err(err));
            }
        }
        let sentence = TreebankSentence {
            tokens,
            provenance: Provenance { file: self.file.clone(), sentence: self.sentence_idx },
        };
        self.sentence_idx += 1;
        Some(Ok(sentence))
    }
}

/// Parses a CoNLL-U byte stream into sentences.
pub fn parse_conllu<R: BufRead>(
    reader: R,
    file_label: impl Into<String>,
) -> ConlluReader<R> {
    ConlluReader::new(reader, file_label)
}

/// Opens a CoNLL-U file, transparently decompressing `.gz`.
pub fn open_conllu(path: &Path) -> io::Result<ConlluReader<Box<dyn BufRead>>> {
    let label = path.display().to_string();
    let file = File::open(path)?;
    let reader: Box<dyn BufRead> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufReader::new(flate2::read::MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    Ok(ConlluReader::new(reader, label))
}

/// Which tokens count as punctuation (matched on UPOS; UD marks them
/// `PUNCT`, other annotation schemes differ).
#[derive(Debug, Clone)]
pub struct PunctFilter {
    tags: BTreeSet<String>,
}

impl Default for PunctFilter {
    fn default() -> Self {
        Self { tags: BTreeSet::from(["PUNCT".to_string()]) }
    }
}

impl PunctFilter {
    pub fn from_tags<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { tags: tags.into_iter().map(Into::into).collect() }
    }

    pub fn is_punct(&self, token: &Token) -> bool {
        self.tags.contains(&token.upos)
    }
}

/// Why a sentence was dropped rather than surveyed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscardReason {
    /// Fewer than three words survived preprocessing.
    TooShort,
    /// Not a single-rooted acyclic tree before removal.
    Malformed,
}

impl std::fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiscardReason::TooShort => "too short",
            DiscardReason::Malformed => "malformed",
        })
    }
}

/// Applies the preprocessing pipeline: remove punctuation, reattach nodes
/// whose head was deleted to their nearest surviving ancestor, renumber
/// positions preserving order, and discard results shorter than three
/// words.
///
/// When the original root is removed, its orphaned survivors attach to the
/// artificial root in surface order: the first becomes the new root and the
/// rest become its dependents.
pub fn preprocess(
    sentence: &TreebankSentence,
    punct: &PunctFilter,
) -> Result<DepStructure, DiscardReason> {
    let m = sentence.tokens.len();
    let heads: Vec<usize> = sentence.tokens.iter().map(|t| t.head).collect();
    // Structural validation before any removal.
    if heads.iter().filter(|&&h| h == 0).count() != 1 {
        return Err(DiscardReason::Malformed);
    }
    if heads.iter().any(|&h| h > m) {
        return Err(DiscardReason::Malformed);
    }
    for start in 1..=m {
        let mut cur = start;
        let mut steps = 0;
        while heads[cur - 1] != 0 {
            cur = heads[cur - 1];
            steps += 1;
            if steps >= m {
                return Err(DiscardReason::Malformed);
            }
        }
    }

    let removed: Vec<bool> = sentence.tokens.iter().map(|t| punct.is_punct(t)).collect();
    // Old id -> new position for survivors, in surface order.
    let mut new_pos = vec![0usize; m + 1];
    let mut n = 0usize;
    for (i, &gone) in removed.iter().enumerate() {
        if !gone {
            n += 1;
            new_pos[i + 1] = n;
        }
    }
    if n < 3 {
        return Err(DiscardReason::TooShort);
    }

    let mut new_heads: Vec<Option<NonZeroUsize>> = vec![None; n];
    let mut root_taken = false;
    let mut first_orphan: Option<usize> = None;
    for old in 1..=m {
        if removed[old - 1] {
            continue;
        }
        // Nearest surviving ancestor; 0 if every ancestor was removed or
        // this was the root already.
        let mut anc = heads[old - 1];
        while anc != 0 && removed[anc - 1] {
            anc = heads[anc - 1];
        }
        let pos = new_pos[old];
        if anc != 0 {
            new_heads[pos - 1] = NonZeroUsize::new(new_pos[anc]);
        } else if !root_taken {
            root_taken = true;
            first_orphan = Some(pos);
        } else {
            new_heads[pos - 1] = NonZeroUsize::new(first_orphan.expect("root assigned first"));
        }
    }
    Ok(DepStructure::from_heads_unchecked(new_heads))
}

/// Outcome of surveying a set of treebank files.
#[derive(Debug)]
pub struct TreebankReport {
    /// Per-length rows (class `all`, source RS), sorted by n.
    pub rows: Vec<SurveyRow>,
    /// Parse and I/O errors encountered; surveying continued past them.
    pub errors: Vec<ConlluError>,
    pub kept: u64,
    pub discarded_short: u64,
    pub discarded_malformed: u64,
}

/// Surveys attested sentences: per-length distance statistics over every
/// sentence that survives preprocessing, pooled across all files.
pub fn treebank_survey<P: AsRef<Path>>(paths: &[P], punct: &PunctFilter) -> TreebankReport {
    let mut cells: std::collections::BTreeMap<usize, LengthClassStats> = Default::default();
    let mut report = TreebankReport {
        rows: Vec::new(),
        errors: Vec::new(),
        kept: 0,
        discarded_short: 0,
        discarded_malformed: 0,
    };
    for path in paths {
        let path = path.as_ref();
        let reader = match open_conllu(path) {
            Ok(r) => r,
            Err(e) => {
                report
                    .errors
                    .push(ConlluError::Io { file: path.display().to_string(), source: e });
                continue;
            }
        };
        for item in reader {
            match item {
                Ok(sentence) => match preprocess(&sentence, punct) {
                    Ok(structure) => {
                        report.kept += 1;
                        cells
                            .entry(structure.n())
                            .or_insert_with(|| LengthClassStats::new(structure.n(), ClassId::All))
                            .observe(&structure)
                            .expect("length keyed by n");
                    }
                    Err(DiscardReason::TooShort) => report.discarded_short += 1,
                    Err(DiscardReason::Malformed) => report.discarded_malformed += 1,
                },
                Err(e) => report.errors.push(e),
            }
        }
    }
    report.rows = cells
        .into_values()
        .map(|cell| attested_row(&cell))
        .collect();
    report
}

fn attested_row(cell: &LengthClassStats) -> SurveyRow {
    SurveyRow {
        source: Source::Attested,
        class: ClassId::All,
        n: cell.n,
        count: cell.count,
        total: cell.count,
        p: crate::rational::ratio(1, 1),
        sum_d: cell.sum_d,
        sum_d_sq: cell.sum_d_sq,
        mean_d: cell.mean_d(),
        baseline: crate::tree::baseline_rla(cell.n),
        // Attested cells are always sample estimates; apply the threshold
        // at every length.
        reported: cell.count >= crate::stats::REPORT_THRESHOLD,
    }
}
