//! Tunneling time across the barrier and its dependence on the lattice scale.
//!
//! The time is the closed form
//!
//! ```text
//! τ = | i·(2mNμ₀²/ħ) · 1/(2√(λ²−1)) · [ b₂*b₁(1+N) + |b₂|²(e^{2φ} − e^{−2Nφ})/(e^{2φ} − 1) ] |
//! ```
//!
//! evaluated directly; the divergent branch of the underlying integral is
//! dropped. `τ` is quadratic in the barrier amplitudes, so an amplitude
//! normalisation has to be fixed: by default the incident wave has unit
//! amplitude (`a₁ = 1`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_complex::Complex64;

use crate::dispersion::{compute_dispersion, DispersionParams};
use crate::scattering::{paper_coefficients, solve_boundary_system, ScatterError};
use crate::units::{validate_params, ParamError, PhysicalParams, RawParams, HBAR_EV_FS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeError {
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error("barrier region has vanishing momentum (lam = {lam}); tunneling time diverges")]
    DegenerateBarrier { lam: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AmplitudeSource {
    #[default]
    LinearSolve,
    PaperClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TimeNormalization {
    /// `a₁ = 1`: time per unit incident wave.
    #[default]
    IncidentUnit,
    /// `c₁ = 1`: time per unit transmitted wave.
    TransmittedUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TimeOptions {
    pub source: AmplitudeSource,
    pub normalization: TimeNormalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunnelTimeResult {
    pub time_fs: f64,
    pub params: PhysicalParams,
    pub b1: Complex64,
    pub b2: Complex64,
    pub lam: f64,
    pub phi: f64,
    pub source: AmplitudeSource,
    pub normalization: TimeNormalization,
}

/// `2mNμ₀²/ħ`, in fs.
pub fn time_prefactor(p: &PhysicalParams) -> f64 {
    let mu = p.lattice_scale();
    2.0 * p.mass() * p.num_steps() as f64 * mu * mu / HBAR_EV_FS
}

/// Evaluates the closed-form time for given barrier amplitudes.
pub fn time_from_amplitudes(
    p: &PhysicalParams,
    d: &DispersionParams,
    b1: Complex64,
    b2: Complex64,
) -> Result<f64, TimeError> {
    // λ² − 1 below the normal range counts as zero
    if d.lambda_gap * (2.0 + d.lambda_gap) < f64::MIN_POSITIVE {
        return Err(TimeError::DegenerateBarrier { lam: d.lam });
    }
    let n = p.num_steps() as f64;
    // Σ_{k=0}^{N} e^{−2kφ}
    let geometric = ((2.0 * d.phi).exp() - (-2.0 * n * d.phi).exp()) / (2.0 * d.phi).exp_m1();
    let bracket = b2.conj() * b1 * (1.0 + n) + b2.norm_sqr() * geometric;
    let scale = Complex64::new(0.0, time_prefactor(p) / (2.0 * d.sqrt_lam2_minus_1()));
    let time = (scale * bracket).norm();
    if !time.is_finite() {
        return Err(TimeError::DegenerateBarrier { lam: d.lam });
    }
    Ok(time)
}

pub fn tunneling_time(p: &PhysicalParams, opts: TimeOptions) -> Result<TunnelTimeResult, TimeError> {
    let d = compute_dispersion(p);
    let n = p.num_steps();
    let c1 = Complex64::new(1.0, 0.0);
    let s = match opts.source {
        AmplitudeSource::LinearSolve => solve_boundary_system(&d, n, c1)?,
        AmplitudeSource::PaperClosedForm => paper_coefficients(&d, n, c1),
    };
    let (b1, b2) = match opts.normalization {
        TimeNormalization::IncidentUnit => (s.b1 / s.a1, s.b2 / s.a1),
        TimeNormalization::TransmittedUnit => (s.b1, s.b2),
    };
    let time_fs = time_from_amplitudes(p, &d, b1, b2)?;
    Ok(TunnelTimeResult {
        time_fs,
        params: *p,
        b1,
        b2,
        lam: d.lam,
        phi: d.phi,
        source: opts.source,
        normalization: opts.normalization,
    })
}

/// Experiment inputs shared by every point of a lattice sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseParams {
    pub mass: f64,
    pub energy: f64,
    pub barrier_height: f64,
    pub barrier_width: f64,
}

impl BaseParams {
    pub fn at(&self, num_steps: u64) -> RawParams {
        RawParams {
            mass: self.mass,
            energy: self.energy,
            barrier_height: self.barrier_height,
            barrier_width: self.barrier_width,
            num_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZenoRegion {
    Zeno,
    AntiZeno,
    Minimum,
    Unclassified,
}

impl ZenoRegion {
    pub fn as_str(self) -> &'static str {
        match self {
            ZenoRegion::Zeno => "Zeno",
            ZenoRegion::AntiZeno => "AntiZeno",
            ZenoRegion::Minimum => "Minimum",
            ZenoRegion::Unclassified => "Unclassified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "N")]
    pub n: u64,
    pub mu0_nm: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
    pub time_fs: f64,
    pub region: ZenoRegion,
}

/// A lattice size dropped from a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    #[serde(rename = "N")]
    pub n: u64,
    pub code: &'static str,
    pub reason: String,
}

/// Closed time interval in fs; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FsWindow {
    pub const DEFAULT: FsWindow = FsWindow { lo: 0.1, hi: 10.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, SweepError> {
        if lo.is_nan() || hi.is_nan() || lo < 0.0 || lo > hi {
            return Err(SweepError::InvalidWindow { lo, hi });
        }
        Ok(FsWindow { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

impl Default for FsWindow {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsBand {
    pub mu0_lo: f64,
    pub mu0_hi: f64,
    pub points_inside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZenoAnalysis {
    /// Sorted by `mu0` descending.
    pub records: Vec<SweepRecord>,
    pub minimum: SweepRecord,
    /// Whether the global minimum lies strictly between the sweep endpoints.
    pub interior_minimum: bool,
    /// Count of strict interior local minima.
    pub local_minima: usize,
    pub fs_window: FsWindow,
    pub fs_band: Option<FsBand>,
    pub skipped: Vec<SkippedPoint>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep range is empty")]
    EmptyRange,
    #[error("no admissible lattice size in the sweep ({} skipped)", skipped.len())]
    NoAdmissiblePoints { skipped: Vec<SkippedPoint> },
    #[error("no sweep point has a tunneling time inside [{lo}, {hi}] fs")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("invalid time window [{lo}, {hi}] fs")]
    InvalidWindow { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    pub time: TimeOptions,
    pub fs_window: FsWindow,
}

#[derive(Debug, Clone, PartialEq, Error)]
enum PointError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Time(#[from] TimeError),
}

impl PointError {
    fn code(&self) -> &'static str {
        match self {
            PointError::Params(e) => e.code(),
            PointError::Time(TimeError::DegenerateBarrier { .. }) => "DegenerateBarrier",
            PointError::Time(TimeError::Scatter(_)) => "SingularSystem",
        }
    }
}

fn sweep_point(base: &BaseParams, n: u64, opts: TimeOptions) -> Result<SweepRecord, PointError> {
    let p = validate_params(base.at(n))?;
    let d = compute_dispersion(&p);
    let s = solve_boundary_system(&d, n, Complex64::new(1.0, 0.0)).map_err(TimeError::from)?;
    let time = tunneling_time(&p, opts)?;
    Ok(SweepRecord {
        n,
        mu0_nm: p.lattice_scale(),
        transmission: s.transmission,
        reflection: s.reflection,
        time_fs: time.time_fs,
        region: ZenoRegion::Unclassified,
    })
}

/// Tunneling time over a set of lattice sizes at fixed barrier width.
///
/// Points that violate the energy cutoff (or fail otherwise) are skipped and
/// listed in [`ZenoAnalysis::skipped`]. Points are evaluated in parallel; the
/// output order depends only on `N`.
pub fn sweep_mu0(
    base: &BaseParams,
    num_steps: impl IntoIterator<Item = u64>,
    opts: &SweepOptions,
) -> Result<ZenoAnalysis, SweepError> {
    let mut ns: Vec<u64> = num_steps.into_iter().collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(SweepError::EmptyRange);
    }
    let outcomes: Vec<(u64, Result<SweepRecord, PointError>)> = ns
        .par_iter()
        .map(|&n| (n, sweep_point(base, n, opts.time)))
        .collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let mut skipped = Vec::new();
    for (n, outcome) in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                log::info!("sweep: skipping N={n}: {e}");
                skipped.push(SkippedPoint {
                    n,
                    code: e.code(),
                    reason: e.to_string(),
                });
            }
        }
    }
    if records.is_empty() {
        return Err(SweepError::NoAdmissiblePoints { skipped });
    }

    let min_idx = classify(&mut records);
    let last = records.len() - 1;
    let local_minima = (1..last)
        .filter(|&i| {
            records[i].time_fs < records[i - 1].time_fs && records[i].time_fs < records[i + 1].time_fs
        })
        .count();
    let fs_band = find_fs_band(&records, opts.fs_window).ok();
    Ok(ZenoAnalysis {
        minimum: records[min_idx],
        interior_minimum: min_idx > 0 && min_idx < last,
        local_minima,
        fs_window: opts.fs_window,
        fs_band,
        records,
        skipped,
    })
}

/// Labels records (sorted by `mu0` descending, i.e. `N` ascending) relative to
/// the global minimum of the time and returns its index.
///
/// Above the minimum in `mu0`, a point is anti-Zeno when the time still falls
/// at the next smaller `mu0`. Below it, a point is Zeno when the time has risen
/// from the next larger `mu0`.
pub fn classify(records: &mut [SweepRecord]) -> usize {
    let min_idx = records
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if r.time_fs < records[best].time_fs { i } else { best });
    if records.len() < 2 {
        for r in records.iter_mut() {
            r.region = ZenoRegion::Unclassified;
        }
        return min_idx;
    }
    let times: Vec<f64> = records.iter().map(|r| r.time_fs).collect();
    for (i, r) in records.iter_mut().enumerate() {
        r.region = if i == min_idx {
            ZenoRegion::Minimum
        } else if i < min_idx && times[i + 1] < times[i] {
            ZenoRegion::AntiZeno
        } else if i > min_idx && times[i] > times[i - 1] {
            ZenoRegion::Zeno
        } else {
            ZenoRegion::Unclassified
        };
    }
    min_idx
}

/// Smallest and largest `mu0` whose time lies inside `window`.
pub fn find_fs_band(records: &[SweepRecord], window: FsWindow) -> Result<FsBand, SweepError> {
    let inside: Vec<f64> = records
        .iter()
        .filter(|r| window.contains(r.time_fs))
        .map(|r| r.mu0_nm)
        .collect();
    if inside.is_empty() {
        return Err(SweepError::EmptyBand {
            lo: window.lo,
            hi: window.hi,
        });
    }
    Ok(FsBand {
        mu0_lo: inside.iter().copied().fold(f64::INFINITY, f64::min),
        mu0_hi: inside.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        points_inside: inside.len(),
    })
}
