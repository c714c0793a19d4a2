//! Output documents for each run mode and their CSV/JSON renderings.

use polytunnel::lattice_oracle::{continuum_transmission, lattice_recursion_scatter};
use polytunnel::scattering::ClosedFormAudit;
use polytunnel::zeno_time::{BaseParams, FsBand, FsWindow, SkippedPoint, SweepRecord};
use polytunnel::{
    DispersionParams, MethodComparisonReport, OracleScatter, PhysicalParams, ScatteringSolution,
    SiteConvention, TimeNormalization, TunnelTimeResult, AmplitudeSource,
};
use serde::Serialize;

use crate::CliError;

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_document(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

pub fn json_document<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatterReport {
    pub params: PhysicalParams,
    pub dispersion: DispersionParams,
    pub c1: f64,
    pub linear_solve: ScatteringSolution,
    pub paper_closed_form: ScatteringSolution,
    pub comparison: MethodComparisonReport,
    pub oracle: OracleScatter,
    pub continuum_transmission: f64,
}

impl ScatterReport {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let header = [
            "method", "N", "mu0_nm", "a1_re", "a1_im", "a2_re", "a2_im", "b1_re", "b1_im", "b2_re",
            "b2_im", "c1_re", "c1_im", "T", "R",
        ];
        let row = |s: &ScatteringSolution| {
            let mut r = vec![format!("{:?}", s.method), s.num_steps.to_string(), fmt_float(self.params.lattice_scale())];
            for z in [s.a1, s.a2, s.b1, s.b2, s.c1] {
                r.push(fmt_float(z.re));
                r.push(fmt_float(z.im));
            }
            r.push(fmt_float(s.transmission));
            r.push(fmt_float(s.reflection));
            r
        };
        csv_document(&header, [row(&self.linear_solve), row(&self.paper_closed_form)])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub mu0_nm: f64,
    pub t_linear: Option<f64>,
    pub t_paper: f64,
    pub t_oracle: Option<f64>,
    pub t_continuum: f64,
    pub oracle_vs_linear: Option<f64>,
    pub linear_vs_continuum: Option<f64>,
    pub oracle_vs_continuum: Option<f64>,
    pub max_amplitude_deviation: f64,
    pub paper_forms_consistent: bool,
    pub condition_number: Option<f64>,
}

impl CompareRow {
    pub fn new(p: &PhysicalParams, d: &DispersionParams, convention: SiteConvention) -> Self {
        let n = p.num_steps();
        let cmp = polytunnel::compare_methods(d, n);
        let oracle = lattice_recursion_scatter(d, n, convention).ok().map(|o| o.transmission);
        let t_cont = continuum_transmission(p);
        let rel = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => Some((a - b).abs() / b.abs()),
            _ => None,
        };
        CompareRow {
            n,
            mu0_nm: p.lattice_scale(),
            t_linear: cmp.transmission_linear,
            t_paper: cmp.transmission_paper,
            t_oracle: oracle,
            t_continuum: t_cont,
            oracle_vs_linear: rel(oracle, cmp.transmission_linear),
            linear_vs_continuum: rel(cmp.transmission_linear, Some(t_cont)),
            oracle_vs_continuum: rel(oracle, Some(t_cont)),
            max_amplitude_deviation: cmp.max_deviation,
            paper_forms_consistent: cmp.paper_forms_consistent,
            condition_number: cmp.condition_number,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub base: BaseParams,
    pub oracle_convention: SiteConvention,
    pub audit: ClosedFormAudit,
    pub rows: Vec<CompareRow>,
    pub skipped: Vec<SkippedPoint>,
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl CompareReport {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let header = [
            "N",
            "mu0_nm",
            "T_linear",
            "T_paper",
            "T_oracle",
            "T_continuum",
            "oracle_vs_linear",
            "linear_vs_continuum",
            "oracle_vs_continuum",
            "max_amplitude_deviation",
            "paper_forms_consistent",
            "condition_number",
        ];
        let rows = self.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                fmt_float(r.mu0_nm),
                opt(r.t_linear),
                fmt_float(r.t_paper),
                opt(r.t_oracle),
                fmt_float(r.t_continuum),
                opt(r.oracle_vs_linear),
                opt(r.linear_vs_continuum),
                opt(r.oracle_vs_continuum),
                fmt_float(r.max_amplitude_deviation),
                r.paper_forms_consistent.to_string(),
                opt(r.condition_number),
            ]
        });
        csv_document(&header, rows)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub base: BaseParams,
    pub n_min: u64,
    pub n_max: u64,
    pub amplitude_source: AmplitudeSource,
    pub normalization: TimeNormalization,
    pub record_count: usize,
    pub minimum: SweepRecord,
    pub interior_minimum: bool,
    pub local_minima: usize,
    pub fs_window: FsWindow,
    pub fs_band: Option<FsBand>,
    pub skipped: Vec<SkippedPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub summary: SweepSummary,
    pub records: Vec<SweepRecord>,
}

pub const SWEEP_COLUMNS: [&str; 6] = ["N", "mu0_nm", "T", "R", "time_fs", "region"];

impl SweepReport {
    pub fn records_csv(&self) -> Result<String, CliError> {
        let rows = self.records.iter().map(|r| {
            vec![
                r.n.to_string(),
                fmt_float(r.mu0_nm),
                fmt_float(r.transmission),
                fmt_float(r.reflection),
                fmt_float(r.time_fs),
                r.region.as_str().to_string(),
            ]
        });
        csv_document(&SWEEP_COLUMNS, rows)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeReport {
    pub c1: f64,
    pub transmission: f64,
    pub result: TunnelTimeResult,
}

impl TimeReport {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let r = &self.result;
        let header = [
            "N", "mu0_nm", "time_fs", "T", "lam", "phi", "b1_re", "b1_im", "b2_re", "b2_im",
        ];
        let row = vec![
            r.params.num_steps().to_string(),
            fmt_float(r.params.lattice_scale()),
            fmt_float(r.time_fs),
            fmt_float(self.transmission),
            fmt_float(r.lam),
            fmt_float(r.phi),
            fmt_float(r.b1.re),
            fmt_float(r.b1.im),
            fmt_float(r.b2.re),
            fmt_float(r.b2.im),
        ];
        csv_document(&header, [row])
    }
}
