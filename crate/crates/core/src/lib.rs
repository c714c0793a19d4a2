//! Quantum tunneling through a rectangular barrier in polymer quantum
//! mechanics, where space is a lattice of spacing `μ₀` and the Schrödinger
//! equation becomes a second-order difference equation.
//!
//! * [`units`]: eV / nm / fs unit system and validated experiment parameters.
//! * [`dispersion`]: characteristic roots in the free and barrier regions.
//! * [`scattering`]: boundary matching, transmission and reflection.
//! * [`lattice_oracle`]: direct recursion and continuum-limit references.
//! * [`zeno_time`]: tunneling time and lattice-scale sweeps.

pub mod dispersion;
pub mod lattice_oracle;
pub mod scattering;
pub mod units;
pub mod zeno_time;

pub use dispersion::{compute_dispersion, DispersionParams};
pub use lattice_oracle::{
    continuum_transmission, lattice_recursion_scatter, OracleError, OracleScatter, SiteConvention,
};
pub use scattering::{
    compare_methods, paper_coefficients, sample_wavefunction, solve_boundary_system,
    ClosedFormAudit, Method, MethodComparisonReport, ScatterError, ScatteringSolution,
    WavefunctionSample,
};
pub use units::{validate_params, ParamError, PhysicalParams, RawParams, UnitSystem, ELECTRON_MASS};
pub use zeno_time::{
    find_fs_band, sweep_mu0, tunneling_time, AmplitudeSource, BaseParams, FsBand, FsWindow,
    SweepError, SweepOptions, SweepRecord, TimeError, TimeNormalization, TimeOptions,
    TunnelTimeResult, ZenoAnalysis, ZenoRegion,
};

pub use num_complex::Complex64;
