//! Batch front end.
//!
//! `gipsynth --spec job.toml --out dir` runs one job file and writes its
//! outputs plus `report.toml` (input echo, notes, oracle errors and a sha256
//! manifest of every emitted file). Wall-clock times go to `timing.toml`,
//! which is the only output that differs between identical runs.

pub mod jobs;
pub mod spec;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ErrorKind, GipError};
use crate::par::{configure_threads, map_slice, Execution};
use jobs::{run_job, Outcome};
use spec::{expand_sweep, FieldError, JobSpec, Mode, Units};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "gipsynth",
    version,
    about = "Synthesize curves and surfaces with a prescribed geometry-induced potential"
)]
pub struct Args {
    /// Job specification (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run the oracles and write only the report.
    #[arg(long)]
    pub verify_only: bool,
    /// Overrides `units` in the spec.
    #[arg(long, value_enum)]
    pub units: Option<Units>,
}

#[derive(Debug)]
pub enum CliError {
    Field(FieldError),
    Gip(GipError),
    Read(PathBuf, std::io::Error),
    Write(PathBuf, std::io::Error),
    /// A verify run recomputed different oracle errors.
    Mismatch(String),
}

impl CliError {
    pub fn field(path: &str, message: impl Into<String>) -> Self {
        CliError::Field(FieldError {
            path: path.to_string(),
            message: message.into(),
        })
    }

    /// 2 validation, 3 infeasible, 4 numeric.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Field(_) | CliError::Read(..) => 2,
            CliError::Gip(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Infeasible => 3,
                ErrorKind::Numeric => 4,
            },
            CliError::Write(..) | CliError::Mismatch(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Field(e) => write!(f, "invalid spec: {e}"),
            CliError::Gip(e) => write!(f, "{e}"),
            CliError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
            CliError::Mismatch(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Field(e)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// `report.toml` of a single job.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub mode: String,
    pub units: String,
    pub verify_only: bool,
    pub notes: Vec<String>,
    pub input: toml::Table,
    pub errors: BTreeMap<String, f64>,
    pub summary: toml::Table,
    #[serde(default)]
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointEntry {
    pub dir: String,
    pub values: toml::Table,
}

/// Top-level report of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub tool: String,
    pub mode: String,
    pub units: String,
    pub verify_only: bool,
    pub points: Vec<PointEntry>,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckEntry {
    pub report: String,
    pub max_difference: f64,
    pub recorded: BTreeMap<String, f64>,
    pub recomputed: BTreeMap<String, f64>,
}

/// `report.toml` of a verify job.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool: String,
    pub mode: String,
    pub source: String,
    pub tolerance: f64,
    pub matches: bool,
    pub max_difference: f64,
    pub checks: Vec<CheckEntry>,
}

fn tool() -> String {
    format!("gipsynth {}", env!("CARGO_PKG_VERSION"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e| CliError::Write(path.to_path_buf(), e);
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(fail)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(fail)
}

fn to_toml<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("reports serialize")
}

fn read_table(path: &Path) -> Result<toml::Table, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::field("spec", format!("{}: {}", path.display(), e.message())))
}

struct Point {
    dir: String,
    values: BTreeMap<String, toml::Value>,
    spec: JobSpec,
}

/// What a finished run wrote.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub files: Vec<FileEntry>,
    pub errors: BTreeMap<String, f64>,
}

fn echo(spec: &JobSpec) -> toml::Table {
    toml::Table::try_from(spec).expect("spec serializes")
}

fn report_for(
    spec: &JobSpec,
    verify_only: bool,
    outcome: &Outcome,
    files: Vec<FileEntry>,
) -> RunReport {
    RunReport {
        tool: tool(),
        mode: spec.mode.name().into(),
        units: spec.units.name().into(),
        verify_only,
        notes: outcome
            .notes
            .iter()
            .enumerate()
            .filter(|(i, n)| !outcome.notes[..*i].contains(n))
            .map(|(_, n)| n.clone())
            .collect(),
        input: echo(spec),
        errors: outcome.errors.clone(),
        summary: outcome.summary.clone().into_iter().collect(),
        files,
    }
}

/// Writes a point's files under `dir` and returns their manifest entries,
/// with paths relative to `root`.
fn emit(root: &Path, dir: &str, files: &[(String, String)]) -> Result<Vec<FileEntry>, CliError> {
    let mut entries = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let rel = if dir.is_empty() {
            name.clone()
        } else {
            format!("{dir}/{name}")
        };
        write_atomic(&root.join(&rel), contents.as_bytes())?;
        entries.push(FileEntry {
            path: rel,
            bytes: contents.len() as u64,
            sha256: sha256_hex(contents.as_bytes()),
        });
    }
    Ok(entries)
}

/// Parses `args.spec`, runs every sweep point and writes the outputs.
pub fn run(args: &Args) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    let exec = match args.threads {
        Some(0) => return Err(CliError::field("--threads", "must be at least 1")),
        Some(1) => Execution::Sequential,
        Some(n) => {
            // a second call in the same process keeps the first pool
            let _ = configure_threads(n);
            Execution::Parallel
        }
        None => Execution::default(),
    };
    let mut table = read_table(&args.spec)?;
    if let Some(u) = args.units {
        table.insert("units".into(), u.name().into());
    }
    let expanded = expand_sweep(table)?;
    let sweep = expanded.len() > 1 || !expanded[0].0.is_empty();
    let mut points = Vec::with_capacity(expanded.len());
    for (i, (values, t)) in expanded.into_iter().enumerate() {
        let spec = JobSpec::from_table(t)?;
        let dir = if sweep {
            format!("point_{i:04}")
        } else {
            String::new()
        };
        points.push(Point { dir, values, spec });
    }
    if points[0].spec.mode == Mode::Verify {
        if sweep {
            return Err(CliError::field("sweep", "verify jobs cannot be swept"));
        }
        return verify(args, &points[0].spec, exec, started);
    }

    let timed: Vec<Result<(Outcome, f64), CliError>> = map_slice(exec, &points, |p| {
        let t = Instant::now();
        run_job(&p.spec, exec, !args.verify_only).map(|o| (o, t.elapsed().as_secs_f64()))
    });
    let mut outcomes = Vec::with_capacity(points.len());
    for r in timed {
        outcomes.push(r?);
    }

    let root = &args.out;
    let mut manifest = Vec::new();
    let mut all_errors = BTreeMap::new();
    let mut timing = toml::Table::new();
    for (p, (outcome, secs)) in points.iter().zip(&outcomes) {
        let mut files = emit(root, &p.dir, &outcome.files)?;
        let report = to_toml(&report_for(
            &p.spec,
            args.verify_only,
            outcome,
            files.clone(),
        ));
        files.extend(emit(root, &p.dir, &[("report.toml".into(), report)])?);
        manifest.extend(files);
        for (k, v) in &outcome.errors {
            let key = if p.dir.is_empty() {
                k.clone()
            } else {
                format!("{}/{k}", p.dir)
            };
            all_errors.insert(key, *v);
        }
        timing.insert(
            if p.dir.is_empty() {
                "job_seconds".into()
            } else {
                format!("{}_seconds", p.dir)
            },
            (*secs).into(),
        );
    }
    if sweep {
        let report = SweepReport {
            tool: tool(),
            mode: points[0].spec.mode.name().into(),
            units: points[0].spec.units.name().into(),
            verify_only: args.verify_only,
            points: points
                .iter()
                .map(|p| PointEntry {
                    dir: p.dir.clone(),
                    values: p.values.clone().into_iter().collect(),
                })
                .collect(),
            files: manifest.clone(),
        };
        manifest.extend(emit(root, "", &[("report.toml".into(), to_toml(&report))])?);
    }
    timing.insert(
        "total_seconds".into(),
        started.elapsed().as_secs_f64().into(),
    );
    write_atomic(&root.join("timing.toml"), to_toml(&timing).as_bytes())?;
    Ok(RunSummary {
        out: root.clone(),
        files: manifest,
        errors: all_errors,
    })
}

fn max_difference(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let mut worst = 0.0_f64;
    for key in a.keys().chain(b.keys()) {
        let d = match (a.get(key), b.get(key)) {
            (Some(x), Some(y)) if x.is_nan() && y.is_nan() => 0.0,
            (Some(x), Some(y)) if x == y => 0.0,
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        };
        worst = if d.is_nan() {
            f64::INFINITY
        } else {
            worst.max(d)
        };
    }
    worst
}

/// Re-runs the job echoed in an earlier report (every point of a sweep) in
/// verify-only mode and compares the oracle errors.
fn verify(
    args: &Args,
    spec: &JobSpec,
    exec: Execution,
    started: Instant,
) -> Result<RunSummary, CliError> {
    let job = spec.verify.as_ref().unwrap();
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let source = base.join(&job.run);
    let top = read_table(&source)?;
    let reports: Vec<PathBuf> = match top.get("points") {
        Some(_) => {
            let sweep: SweepReport =
                toml::Value::Table(top)
                    .try_into()
                    .map_err(|e: toml::de::Error| {
                        CliError::field("verify.run", e.message().to_string())
                    })?;
            let dir = source.parent().unwrap_or(Path::new("."));
            sweep
                .points
                .iter()
                .map(|p| dir.join(&p.dir).join("report.toml"))
                .collect()
        }
        None => vec![source.clone()],
    };
    let mut checks = Vec::with_capacity(reports.len());
    for path in &reports {
        let recorded: RunReport =
            toml::Value::Table(read_table(path)?)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    CliError::field("verify.run", format!("{}: {}", path.display(), e.message()))
                })?;
        let rerun = JobSpec::from_table(recorded.input.clone())?;
        let outcome = run_job(&rerun, exec, false)?;
        checks.push(CheckEntry {
            report: path.display().to_string(),
            max_difference: max_difference(&recorded.errors, &outcome.errors),
            recorded: recorded.errors,
            recomputed: outcome.errors,
        });
    }
    let worst = checks.iter().map(|c| c.max_difference).fold(0.0, f64::max);
    let report = VerifyReport {
        tool: tool(),
        mode: "verify".into(),
        source: job.run.clone(),
        tolerance: job.tolerance,
        matches: worst <= job.tolerance,
        max_difference: worst,
        checks,
    };
    let files = emit(&args.out, "", &[("report.toml".into(), to_toml(&report))])?;
    let mut timing = toml::Table::new();
    timing.insert(
        "total_seconds".into(),
        started.elapsed().as_secs_f64().into(),
    );
    write_atomic(&args.out.join("timing.toml"), to_toml(&timing).as_bytes())?;
    if !report.matches {
        return Err(CliError::Mismatch(format!(
            "recomputed oracle errors differ from {} by {worst:e} (tolerance {:e})",
            job.run, job.tolerance
        )));
    }
    let errors = report
        .checks
        .into_iter()
        .flat_map(|c| c.recomputed)
        .collect();
    Ok(RunSummary {
        out: args.out.clone(),
        files,
        errors,
    })
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with(args: Args) -> u8 {
    match run(&args) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}  {}", f.sha256, f.path);
            }
            0
        }
        Err(e) => {
            eprintln!("gipsynth: {e}");
            e.exit_code()
        }
    }
}
