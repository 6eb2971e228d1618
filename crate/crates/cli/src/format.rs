//! On-disk formats owned by the CLI: the one-line structure format and the
//! survey row schemas (CSV and JSON).
//!
//! Structure lines are `n<TAB>h1 h2 … hn` with 0 denoting the root —
//! minimal, diff-able, and independent of any serialization library.
//!
//! The CSV schema is fixed: `source,class,n,count,p,sum_D,mean_d,baseline,
//! reported,mean_d_float`. Exact rationals are rendered `num/den`; the
//! trailing float column exists for plotting.

use std::io::Write;

use serde::Serialize;

use depdist::rational::{format_ratio, ratio_to_f64};
use depdist::stats::SurveyRow;
use depdist::{classify, ClassMask, DepStructure};

pub fn write_structure_line<W: Write>(w: &mut W, s: &DepStructure) -> std::io::Result<()> {
    let heads: Vec<String> = s.numeric_heads().iter().map(usize::to_string).collect();
    writeln!(w, "{}\t{}", s.n(), heads.join(" "))
}

/// Parses one structure line; the error string names what went wrong but
/// not where (callers attach line numbers).
pub fn parse_structure_line(line: &str) -> Result<DepStructure, String> {
    let (n_field, heads_field) = line
        .split_once('\t')
        .ok_or_else(|| "expected n<TAB>heads".to_string())?;
    let n: usize = n_field
        .trim()
        .parse()
        .map_err(|_| format!("bad length field {n_field:?}"))?;
    let heads: Vec<usize> = heads_field
        .split_whitespace()
        .map(|h| h.parse::<usize>().map_err(|_| format!("bad head {h:?}")))
        .collect::<Result<_, _>>()?;
    if heads.len() != n {
        return Err(format!("length field says {n} but {} heads given", heads.len()));
    }
    DepStructure::from_heads(&heads).map_err(|e| e.to_string())
}

/// Appends the class flags to a structure line: `planar,projective,wg1,1ec`
/// each as 0/1.
pub fn flags_suffix(mask: &ClassMask) -> String {
    format!(
        "{},{},{},{}",
        mask.planar as u8, mask.projective as u8, mask.wg1 as u8, mask.ec1 as u8
    )
}

pub fn classify_line(line: &str) -> Result<String, String> {
    let s = parse_structure_line(line)?;
    Ok(format!("{line}\t{}", flags_suffix(&classify(&s))))
}

pub const CSV_HEADER: &str =
    "source,class,n,count,p,sum_D,mean_d,baseline,reported,mean_d_float";

fn csv_row(row: &SurveyRow) -> String {
    let mean = row.mean_d.as_ref().map(format_ratio).unwrap_or_default();
    let mean_float = row
        .mean_d
        .as_ref()
        .map(|m| ratio_to_f64(m).to_string())
        .unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        row.source,
        row.class.name(),
        row.n,
        row.count,
        format_ratio(&row.p),
        row.sum_d,
        mean,
        format_ratio(&row.baseline),
        row.reported,
        mean_float
    )
}

/// Writes the survey CSV. Rows failing the undersampling filter are
/// dropped unless `keep_undersampled` is set, in which case they appear
/// with `reported` = false.
pub fn write_survey_csv<W: Write>(
    w: &mut W,
    rows: &[SurveyRow],
    keep_undersampled: bool,
) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        if row.reported || keep_undersampled {
            writeln!(w, "{}", csv_row(row))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    source: String,
    class: &'a str,
    n: usize,
    count: u64,
    p: String,
    #[serde(rename = "sum_D")]
    sum_d: i128,
    mean_d: Option<String>,
    baseline: String,
    reported: bool,
    mean_d_float: Option<f64>,
}

pub fn write_survey_json<W: Write>(
    w: &mut W,
    rows: &[SurveyRow],
    keep_undersampled: bool,
) -> std::io::Result<()> {
    let out: Vec<JsonRow> = rows
        .iter()
        .filter(|r| r.reported || keep_undersampled)
        .map(|row| JsonRow {
            source: row.source.to_string(),
            class: row.class.name(),
            n: row.n,
            count: row.count,
            p: format_ratio(&row.p),
            sum_d: row.sum_d,
            mean_d: row.mean_d.as_ref().map(|m| format_ratio(m)),
            baseline: format_ratio(&row.baseline),
            reported: row.reported,
            mean_d_float: row.mean_d.as_ref().map(ratio_to_f64),
        })
        .collect();
    serde_json::to_writer_pretty(&mut *w, &out)?;
    writeln!(w)
}
