//! Subcommand implementations.

use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use depdist::prufer::{self, GenConfig};
use depdist::stats::{self, SurveyRow};
use depdist::treebank::{treebank_survey, PunctFilter};
use depdist::{ClassId, Executor};

use crate::format::{classify_line, write_structure_line, write_survey_csv, write_survey_json};
use crate::manifest::{write_manifest, GenConfigOut, RunManifest, ToolInfo};
use crate::{AppError, ClassifyArgs, GenerateArgs, Mode, OutputFormat, SurveyArgs, TreebankArgs};

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(std::fs::File::create(p).map_err(
            |e| AppError::Data(format!("cannot create {}: {e}", p.display())),
        )?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

pub fn generate(args: GenerateArgs) -> Result<(), AppError> {
    let n = args.n as usize;
    let mut out = open_output(&args.out)?;
    let mut written = 0u64;
    match args.mode {
        Mode::Exhaustive => {
            let iter = if args.force {
                prufer::enumerate_all_unbounded(n)
            } else {
                prufer::enumerate_all(n)
            }
            .map_err(|e| AppError::Usage(e.to_string()))?;
            for s in iter {
                write_structure_line(&mut out, &s)?;
                written += 1;
            }
        }
        Mode::Sample => {
            let iter = prufer::sample_uniform(n, args.count, args.seed)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            for s in iter {
                write_structure_line(&mut out, &s)?;
                written += 1;
            }
        }
    }
    out.flush()?;
    eprintln!("depdist: wrote {written} structures of length {n}");
    Ok(())
}

pub fn classify(args: ClassifyArgs) -> Result<(), AppError> {
    let reader: Box<dyn BufRead> = match &args.input {
        Some(p) => Box::new(std::io::BufReader::new(std::fs::File::open(p).map_err(
            |e| AppError::Data(format!("cannot open {}: {e}", p.display())),
        )?)),
        None => Box::new(std::io::stdin().lock()),
    };
    let mut out = open_output(&args.out)?;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let annotated = classify_line(&line)
            .map_err(|e| AppError::Data(format!("line {}: {e}", i + 1)))?;
        writeln!(out, "{annotated}")?;
    }
    out.flush()?;
    Ok(())
}

fn parse_classes(spec: &str) -> Result<Vec<ClassId>, AppError> {
    let mut classes = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let class: ClassId = name
            .parse()
            .map_err(|e: depdist::classes::ClassParseError| AppError::Usage(e.to_string()))?;
        if !classes.contains(&class) {
            classes.push(class);
        }
    }
    if classes.is_empty() {
        return Err(AppError::Usage("no classes requested".into()));
    }
    Ok(classes)
}

fn executor(threads: usize) -> Result<Executor, AppError> {
    Executor::with_threads(threads).map_err(|e| AppError::Usage(e.to_string()))
}

fn write_rows(
    format: OutputFormat,
    out: &Option<PathBuf>,
    rows: &[SurveyRow],
    keep_undersampled: bool,
) -> Result<(), AppError> {
    let mut w = open_output(out)?;
    match format {
        OutputFormat::Csv => write_survey_csv(&mut w, rows, keep_undersampled)?,
        OutputFormat::Json => write_survey_json(&mut w, rows, keep_undersampled)?,
    }
    w.flush()?;
    Ok(())
}

fn manifest_path(explicit: &Option<PathBuf>, out: &Option<PathBuf>) -> Option<PathBuf> {
    explicit.clone().or_else(|| {
        out.as_ref().map(|p| {
            let mut name = p.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        })
    })
}

fn format_name(format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
    .to_string()
}

pub fn survey(args: SurveyArgs) -> Result<(), AppError> {
    let classes = parse_classes(&args.classes)?;
    let cfg = GenConfig {
        n_min: args.n_min,
        n_max: args.n_max,
        n_star: args.n_star,
        samples: args.samples,
        seed: args.seed,
    };
    cfg.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let exec = executor(args.threads)?;
    eprintln!(
        "depdist: surveying n={}..={} (exhaustive through n={}, {} draws above), classes {}",
        cfg.n_min,
        cfg.n_max,
        cfg.n_star,
        cfg.samples,
        classes.iter().map(ClassId::name).collect::<Vec<_>>().join(",")
    );
    let start = Instant::now();
    let outcome =
        stats::survey(&cfg, &classes, &exec).map_err(|e| AppError::Data(e.to_string()))?;
    let elapsed = start.elapsed().as_secs_f64();
    write_rows(args.format, &args.out, &outcome.rows, args.keep_undersampled)?;
    if let Some(path) = manifest_path(&args.manifest, &args.out) {
        let manifest = RunManifest {
            tool: ToolInfo::default(),
            command: "survey".into(),
            config: Some(GenConfigOut {
                n_min: cfg.n_min,
                n_max: cfg.n_max,
                n_star: cfg.n_star,
                samples: cfg.samples,
                seed: cfg.seed,
            }),
            classes: Some(classes.iter().map(|c| c.name().to_string()).collect()),
            files: None,
            punct_tags: None,
            threads: args.threads,
            keep_undersampled: args.keep_undersampled,
            format: format_name(args.format),
            per_length_structures: outcome.per_length_total.iter().copied().collect(),
            wall_clock_seconds: elapsed,
        };
        write_manifest(&path, &manifest)
            .map_err(|e| AppError::Data(format!("cannot write manifest: {e}")))?;
    }
    eprintln!("depdist: survey finished in {elapsed:.2}s");
    Ok(())
}

pub fn treebank(args: TreebankArgs) -> Result<(), AppError> {
    let punct = PunctFilter::from_tags(
        args.punct_tags.split(',').map(str::trim).filter(|s| !s.is_empty()),
    );
    let start = Instant::now();
    let report = treebank_survey(&args.files, &punct);
    let elapsed = start.elapsed().as_secs_f64();
    for err in &report.errors {
        eprintln!("depdist: warning: {err}");
    }
    eprintln!(
        "depdist: kept {} sentences ({} too short, {} malformed)",
        report.kept, report.discarded_short, report.discarded_malformed
    );
    if report.kept == 0 && !report.errors.is_empty() {
        return Err(AppError::Data(format!(
            "no sentences surveyed; {} file error(s)",
            report.errors.len()
        )));
    }
    write_rows(args.format, &args.out, &report.rows, args.keep_undersampled)?;
    if let Some(path) = manifest_path(&args.manifest, &args.out) {
        let per_length: BTreeMap<usize, u64> =
            report.rows.iter().map(|r| (r.n, r.count)).collect();
        let manifest = RunManifest {
            tool: ToolInfo::default(),
            command: "treebank".into(),
            config: None,
            classes: None,
            files: Some(args.files.iter().map(|p| p.display().to_string()).collect()),
            punct_tags: Some(
                args.punct_tags
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            ),
            threads: 1,
            keep_undersampled: args.keep_undersampled,
            format: format_name(args.format),
            per_length_structures: per_length,
            wall_clock_seconds: elapsed,
        };
        write_manifest(&path, &manifest)
            .map_err(|e| AppError::Data(format!("cannot write manifest: {e}")))?;
    }
    Ok(())
}
