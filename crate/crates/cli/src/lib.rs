//! Runs configured experiments and renders their output files.

pub mod config;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use polytunnel::lattice_oracle::{continuum_transmission, lattice_recursion_scatter};
use polytunnel::scattering::ClosedFormAudit;
use polytunnel::zeno_time::{SkippedPoint, SweepOptions};
use polytunnel::{
    compare_methods, compute_dispersion, paper_coefficients, solve_boundary_system, sweep_mu0,
    tunneling_time, validate_params, AmplitudeSource, Complex64, ParamError, ScatterError,
    SiteConvention, SweepError, TimeError, TimeOptions,
};
use serde_json::json;
use thiserror::Error;

pub use config::{ConfigOverrides, ExperimentConfig, Format, Mode, Particle};
use report::{CompareReport, CompareRow, ScatterReport, SweepReport, SweepSummary, TimeReport};

/// Tolerance on `|T + R − 1|` for emitted rows.
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{message}")]
    Validation { code: &'static str, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation { .. } => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Validation { code, .. } => code,
            CliError::Io(_) => "IoError",
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "code": self.code(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Validation {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl From<ScatterError> for CliError {
    fn from(e: ScatterError) -> Self {
        CliError::Validation {
            code: "SingularSystem",
            message: e.to_string(),
        }
    }
}

impl From<TimeError> for CliError {
    fn from(e: TimeError) -> Self {
        match e {
            TimeError::Scatter(s) => s.into(),
            TimeError::DegenerateBarrier { .. } => CliError::Validation {
                code: "DegenerateBarrier",
                message: e.to_string(),
            },
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match &e {
            SweepError::EmptyRange | SweepError::InvalidWindow { .. } => CliError::Config(e.to_string()),
            SweepError::NoAdmissiblePoints { skipped } => CliError::Validation {
                code: skipped.first().map(|s| s.code).unwrap_or("NoAdmissiblePoints"),
                message: e.to_string(),
            },
            SweepError::EmptyBand { .. } => CliError::Validation {
                code: "EmptyBand",
                message: e.to_string(),
            },
        }
    }
}

fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation {
            code: "InvariantViolation",
            message: what(),
        })
    }
}

/// One output file; `path = None` means standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

/// Summary file written next to a CSV sweep: `sweep.csv` → `sweep.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    match cfg.mode {
        Mode::Scatter => run_scatter(cfg),
        Mode::Compare => run_compare(cfg),
        Mode::Sweep => run_sweep(cfg),
        Mode::Time => run_time(cfg),
    }
}

fn time_options(cfg: &ExperimentConfig) -> TimeOptions {
    TimeOptions {
        source: if cfg.use_paper_coefficients {
            AmplitudeSource::PaperClosedForm
        } else {
            AmplitudeSource::LinearSolve
        },
        ..Default::default()
    }
}

fn single(cfg: &ExperimentConfig, contents: String) -> Vec<Artifact> {
    vec![Artifact {
        path: cfg.out.clone(),
        contents,
    }]
}

pub fn scatter_report(cfg: &ExperimentConfig) -> Result<ScatterReport, CliError> {
    let p = validate_params(cfg.raw_params())?;
    let d = compute_dispersion(&p);
    let n = p.num_steps();
    let c1 = Complex64::new(config::C1_CONVENTION, 0.0);
    let linear = solve_boundary_system(&d, n, c1)?;
    invariant(linear.conservation_residual().abs() < CONSERVATION_TOLERANCE, || {
        format!("T + R - 1 = {:e} at N = {n}", linear.conservation_residual())
    })?;
    let oracle = lattice_recursion_scatter(&d, n, SiteConvention::default()).map_err(|e| {
        CliError::Validation {
            code: "FitSingular",
            message: e.to_string(),
        }
    })?;
    Ok(ScatterReport {
        params: p,
        dispersion: d,
        c1: config::C1_CONVENTION,
        linear_solve: linear,
        paper_closed_form: paper_coefficients(&d, n, c1),
        comparison: compare_methods(&d, n),
        oracle,
        continuum_transmission: continuum_transmission(&p),
    })
}

fn run_scatter(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let r = scatter_report(cfg)?;
    let contents = match cfg.format {
        Format::Json => report::json_document(&r),
        Format::Csv => r.to_csv()?,
    };
    Ok(single(cfg, contents))
}

pub fn compare_report(cfg: &ExperimentConfig) -> Result<CompareReport, CliError> {
    let base = cfg.base();
    let convention = SiteConvention::default();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut reports = Vec::new();
    for n in cfg.n_range()? {
        match validate_params(base.at(n)) {
            Ok(p) => {
                let d = compute_dispersion(&p);
                reports.push(compare_methods(&d, n));
                rows.push(CompareRow::new(&p, &d, convention));
            }
            Err(ParamError::EnergyCutoffViolation { .. }) if n > 0 => {
                skipped.push(SkippedPoint {
                    n,
                    code: "EnergyCutoffViolation",
                    reason: format!("N = {n} violates the energy cutoff"),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    if rows.is_empty() {
        return Err(SweepError::NoAdmissiblePoints { skipped }.into());
    }
    Ok(CompareReport {
        base,
        oracle_convention: convention,
        audit: ClosedFormAudit::from_reports(&reports),
        rows,
        skipped,
    })
}

fn run_compare(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let r = compare_report(cfg)?;
    let contents = match cfg.format {
        Format::Json => report::json_document(&r),
        Format::Csv => r.to_csv()?,
    };
    Ok(single(cfg, contents))
}

pub fn sweep_report(cfg: &ExperimentConfig) -> Result<SweepReport, CliError> {
    let opts = SweepOptions {
        time: time_options(cfg),
        fs_window: cfg.fs_window()?,
    };
    let range = cfg.n_range()?;
    let analysis = sweep_mu0(&cfg.base(), range, &opts)?;
    for r in &analysis.records {
        let expected_mu0 = cfg.barrier_width_nm / r.n as f64;
        invariant(
            (r.transmission + r.reflection - 1.0).abs() < CONSERVATION_TOLERANCE
                && r.time_fs.is_finite()
                && r.time_fs >= 0.0
                && r.mu0_nm == expected_mu0,
            || format!("sweep record violates invariants: {r:?}"),
        )?;
    }
    Ok(SweepReport {
        summary: SweepSummary {
            base: cfg.base(),
            n_min: cfg.n_min,
            n_max: cfg.n_max,
            amplitude_source: opts.time.source,
            normalization: opts.time.normalization,
            record_count: analysis.records.len(),
            minimum: analysis.minimum,
            interior_minimum: analysis.interior_minimum,
            local_minima: analysis.local_minima,
            fs_window: analysis.fs_window,
            fs_band: analysis.fs_band,
            skipped: analysis.skipped,
        },
        records: analysis.records,
    })
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let r = sweep_report(cfg)?;
    match cfg.format {
        Format::Json => Ok(single(cfg, report::json_document(&r))),
        Format::Csv => {
            let mut out = single(cfg, r.records_csv()?);
            if let Some(path) = &cfg.out {
                out.push(Artifact {
                    path: Some(summary_path(path)),
                    contents: report::json_document(&r.summary),
                });
            }
            Ok(out)
        }
    }
}

pub fn time_report(cfg: &ExperimentConfig) -> Result<TimeReport, CliError> {
    let p = validate_params(cfg.raw_params())?;
    let result = tunneling_time(&p, time_options(cfg))?;
    let d = compute_dispersion(&p);
    let s = solve_boundary_system(&d, p.num_steps(), Complex64::new(1.0, 0.0))?;
    Ok(TimeReport {
        c1: config::C1_CONVENTION,
        transmission: s.transmission,
        result,
    })
}

fn run_time(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let r = time_report(cfg)?;
    let contents = match cfg.format {
        Format::Json => report::json_document(&r),
        Format::Csv => r.to_csv()?,
    };
    Ok(single(cfg, contents))
}

/// Writes a file via a temporary sibling and an atomic rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn emit(artifacts: &[Artifact]) -> Result<(), CliError> {
    for a in artifacts {
        match &a.path {
            Some(path) => write_atomic(path, &a.contents)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(a.contents.as_bytes())?;
                stdout.flush()?;
            }
        }
    }
    Ok(())
}
