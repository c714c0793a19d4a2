//! Python bindings for the `polytunnel` core library.

use num_complex::Complex64;
use polytunnel as pt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pt::zeno_time::SweepOptions;
use pt::{AmplitudeSource, BaseParams, FsWindow, SiteConvention, TimeNormalization, TimeOptions};

fn value_error(code: &str, e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(format!("{code}: {e}"))
}

/// Validated tunnelling parameters (eV, nm, fs).
#[pyclass(frozen, skip_from_py_object, name = "Params")]
#[derive(Clone, Copy)]
struct PyParams(pt::PhysicalParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (energy, barrier_height, barrier_width, num_steps, mass = None))]
    fn new(energy: f64, barrier_height: f64, barrier_width: f64, num_steps: u64, mass: Option<f64>) -> PyResult<Self> {
        validate_params(energy, barrier_height, barrier_width, num_steps, mass)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass()
    }
    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy()
    }
    #[getter]
    fn barrier_height(&self) -> f64 {
        self.0.barrier_height()
    }
    #[getter]
    fn barrier_width(&self) -> f64 {
        self.0.barrier_width()
    }
    #[getter]
    fn num_steps(&self) -> u64 {
        self.0.num_steps()
    }
    #[getter]
    fn lattice_scale(&self) -> f64 {
        self.0.lattice_scale()
    }
    #[getter]
    fn energy_cutoff(&self) -> f64 {
        self.0.energy_cutoff()
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(energy={}, barrier_height={}, barrier_width={}, num_steps={}, mass={})",
            self.0.energy(),
            self.0.barrier_height(),
            self.0.barrier_width(),
            self.0.num_steps(),
            self.0.mass()
        )
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Dispersion")]
#[derive(Clone, Copy)]
struct PyDispersion(pt::DispersionParams);

#[pymethods]
impl PyDispersion {
    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }
    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }
    #[getter]
    fn lam(&self) -> f64 {
        self.0.lam
    }
    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }
    #[getter]
    fn epsilon_gap(&self) -> f64 {
        self.0.epsilon_gap
    }
    #[getter]
    fn lambda_gap(&self) -> f64 {
        self.0.lambda_gap
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Scattering")]
#[derive(Clone, Copy)]
struct PyScattering(pt::ScatteringSolution);

#[pymethods]
impl PyScattering {
    #[getter]
    fn a1(&self) -> Complex64 {
        self.0.a1
    }
    #[getter]
    fn a2(&self) -> Complex64 {
        self.0.a2
    }
    #[getter]
    fn b1(&self) -> Complex64 {
        self.0.b1
    }
    #[getter]
    fn b2(&self) -> Complex64 {
        self.0.b2
    }
    #[getter]
    fn c1(&self) -> Complex64 {
        self.0.c1
    }
    #[getter]
    fn transmission(&self) -> f64 {
        self.0.transmission
    }
    #[getter]
    fn reflection(&self) -> f64 {
        self.0.reflection
    }
    #[getter]
    fn method(&self) -> String {
        format!("{:?}", self.0.method)
    }
    #[getter]
    fn condition_number(&self) -> Option<f64> {
        self.0.condition_number
    }
    fn conservation_residual(&self) -> f64 {
        self.0.conservation_residual()
    }
}

#[pyclass(frozen, skip_from_py_object, get_all, name = "MethodComparison")]
#[derive(Clone)]
struct PyComparison {
    num_steps: u64,
    max_deviation: f64,
    paper_forms_consistent: bool,
    condition_number: Option<f64>,
    transmission_linear: Option<f64>,
    transmission_paper: f64,
    linear_solve_error: Option<String>,
}

#[pyclass(frozen, skip_from_py_object, get_all, name = "OracleScatter")]
#[derive(Clone)]
struct PyOracle {
    transmission: f64,
    reflection: f64,
    t_amp: Complex64,
    r_amp: Complex64,
    convention: String,
}

#[pyclass(frozen, skip_from_py_object, get_all, name = "TunnelTime")]
#[derive(Clone)]
struct PyTime {
    time_fs: f64,
    b1: Complex64,
    b2: Complex64,
    lam: f64,
    phi: f64,
    num_steps: u64,
    lattice_scale: f64,
}

#[pyclass(frozen, get_all, from_py_object, name = "SweepRecord")]
#[derive(Clone)]
struct PySweepRecord {
    n: u64,
    mu0_nm: f64,
    transmission: f64,
    reflection: f64,
    time_fs: f64,
    region: String,
}

impl From<&pt::SweepRecord> for PySweepRecord {
    fn from(r: &pt::SweepRecord) -> Self {
        PySweepRecord {
            n: r.n,
            mu0_nm: r.mu0_nm,
            transmission: r.transmission,
            reflection: r.reflection,
            time_fs: r.time_fs,
            region: r.region.as_str().to_string(),
        }
    }
}

#[pyclass(frozen, skip_from_py_object, get_all, name = "ZenoAnalysis")]
#[derive(Clone)]
struct PyAnalysis {
    records: Vec<PySweepRecord>,
    minimum: PySweepRecord,
    interior_minimum: bool,
    local_minima: usize,
    fs_band: Option<(f64, f64)>,
    skipped: Vec<(u64, String)>,
}

fn convention(name: &str) -> PyResult<SiteConvention> {
    match name.to_ascii_lowercase().as_str() {
        "exclusive" => Ok(SiteConvention::Exclusive),
        "inclusive" => Ok(SiteConvention::Inclusive),
        "midpoint" => Ok(SiteConvention::Midpoint),
        "unit_endpoints" => Ok(SiteConvention::UnitEndpoints),
        other => Err(PyValueError::new_err(format!("unknown site convention `{other}`"))),
    }
}

fn time_options(use_paper_coefficients: bool, normalization: &str) -> PyResult<TimeOptions> {
    let normalization = match normalization {
        "incident" => TimeNormalization::IncidentUnit,
        "transmitted" => TimeNormalization::TransmittedUnit,
        other => return Err(PyValueError::new_err(format!("unknown normalization `{other}`"))),
    };
    Ok(TimeOptions {
        source: if use_paper_coefficients {
            AmplitudeSource::PaperClosedForm
        } else {
            AmplitudeSource::LinearSolve
        },
        normalization,
    })
}

#[pyfunction]
#[pyo3(signature = (energy, barrier_height, barrier_width, num_steps, mass = None))]
fn validate_params(
    energy: f64,
    barrier_height: f64,
    barrier_width: f64,
    num_steps: u64,
    mass: Option<f64>,
) -> PyResult<PyParams> {
    let raw = pt::RawParams {
        mass: mass.unwrap_or(pt::ELECTRON_MASS),
        energy,
        barrier_height,
        barrier_width,
        num_steps,
    };
    pt::validate_params(raw)
        .map(PyParams)
        .map_err(|e| value_error(e.code(), e))
}

#[pyfunction]
fn compute_dispersion(p: &PyParams) -> PyDispersion {
    PyDispersion(pt::compute_dispersion(&p.0))
}

#[pyfunction]
#[pyo3(signature = (d, num_steps, c1 = Complex64::new(1.0, 0.0)))]
fn solve_boundary_system(d: &PyDispersion, num_steps: u64, c1: Complex64) -> PyResult<PyScattering> {
    pt::solve_boundary_system(&d.0, num_steps, c1)
        .map(PyScattering)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (d, num_steps, c1 = Complex64::new(1.0, 0.0)))]
fn paper_coefficients(d: &PyDispersion, num_steps: u64, c1: Complex64) -> PyScattering {
    PyScattering(pt::paper_coefficients(&d.0, num_steps, c1))
}

#[pyfunction]
fn compare_methods(d: &PyDispersion, num_steps: u64) -> PyComparison {
    let r = pt::compare_methods(&d.0, num_steps);
    PyComparison {
        num_steps: r.num_steps,
        max_deviation: r.max_deviation,
        paper_forms_consistent: r.paper_forms_consistent,
        condition_number: r.condition_number,
        transmission_linear: r.transmission_linear,
        transmission_paper: r.transmission_paper,
        linear_solve_error: r.linear_solve_error,
    }
}

#[pyfunction]
#[pyo3(signature = (d, num_steps, convention = "midpoint"))]
fn lattice_recursion_scatter(d: &PyDispersion, num_steps: u64, convention: &str) -> PyResult<PyOracle> {
    let c = self::convention(convention)?;
    let o = pt::lattice_recursion_scatter(&d.0, num_steps, c)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyOracle {
        transmission: o.transmission,
        reflection: o.reflection,
        t_amp: o.t_amp,
        r_amp: o.r_amp,
        convention: format!("{:?}", o.convention),
    })
}

#[pyfunction]
fn continuum_transmission(p: &PyParams) -> f64 {
    pt::continuum_transmission(&p.0)
}

#[pyfunction]
#[pyo3(signature = (p, use_paper_coefficients = false, normalization = "incident"))]
fn tunneling_time(p: &PyParams, use_paper_coefficients: bool, normalization: &str) -> PyResult<PyTime> {
    let t = pt::tunneling_time(&p.0, time_options(use_paper_coefficients, normalization)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyTime {
        time_fs: t.time_fs,
        b1: t.b1,
        b2: t.b2,
        lam: t.lam,
        phi: t.phi,
        num_steps: t.params.num_steps(),
        lattice_scale: t.params.lattice_scale(),
    })
}

#[pyfunction]
#[pyo3(signature = (
    energy, barrier_height, barrier_width, n_min, n_max,
    mass = None, fs_window = (0.1, 10.0), use_paper_coefficients = false,
))]
#[allow(clippy::too_many_arguments)]
fn sweep_mu0(
    py: Python<'_>,
    energy: f64,
    barrier_height: f64,
    barrier_width: f64,
    n_min: u64,
    n_max: u64,
    mass: Option<f64>,
    fs_window: (f64, f64),
    use_paper_coefficients: bool,
) -> PyResult<PyAnalysis> {
    let base = BaseParams {
        mass: mass.unwrap_or(pt::ELECTRON_MASS),
        energy,
        barrier_height,
        barrier_width,
    };
    let opts = SweepOptions {
        time: time_options(use_paper_coefficients, "incident")?,
        fs_window: FsWindow::new(fs_window.0, fs_window.1).map_err(|e| PyValueError::new_err(e.to_string()))?,
    };
    let a = py
        .detach(|| pt::sweep_mu0(&base, n_min..=n_max, &opts))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyAnalysis {
        records: a.records.iter().map(Into::into).collect(),
        minimum: (&a.minimum).into(),
        interior_minimum: a.interior_minimum,
        local_minima: a.local_minima,
        fs_band: a.fs_band.map(|b| (b.mu0_lo, b.mu0_hi)),
        skipped: a.skipped.iter().map(|s| (s.n, s.code.to_string())).collect(),
    })
}

/// `(mu0_lo, mu0_hi)` over records whose time lies in `[lo, hi]` fs.
#[pyfunction]
#[pyo3(signature = (records, lo = 0.1, hi = 10.0))]
fn find_fs_band(records: Vec<PySweepRecord>, lo: f64, hi: f64) -> PyResult<(f64, f64)> {
    let window = FsWindow::new(lo, hi).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let recs: Vec<pt::SweepRecord> = records
        .iter()
        .map(|r| pt::SweepRecord {
            n: r.n,
            mu0_nm: r.mu0_nm,
            transmission: r.transmission,
            reflection: r.reflection,
            time_fs: r.time_fs,
            region: pt::ZenoRegion::Unclassified,
        })
        .collect();
    pt::find_fs_band(&recs, window)
        .map(|b| (b.mu0_lo, b.mu0_hi))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn polytunnel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ELECTRON_MASS", pt::ELECTRON_MASS)?;
    m.add("HBAR_EV_FS", pt::units::HBAR_EV_FS)?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyDispersion>()?;
    m.add_class::<PyScattering>()?;
    m.add_class::<PyComparison>()?;
    m.add_class::<PyOracle>()?;
    m.add_class::<PyTime>()?;
    m.add_class::<PySweepRecord>()?;
    m.add_class::<PyAnalysis>()?;
    m.add_function(wrap_pyfunction!(validate_params, m)?)?;
    m.add_function(wrap_pyfunction!(compute_dispersion, m)?)?;
    m.add_function(wrap_pyfunction!(solve_boundary_system, m)?)?;
    m.add_function(wrap_pyfunction!(paper_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(compare_methods, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_recursion_scatter, m)?)?;
    m.add_function(wrap_pyfunction!(continuum_transmission, m)?)?;
    m.add_function(wrap_pyfunction!(tunneling_time, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_mu0, m)?)?;
    m.add_function(wrap_pyfunction!(find_fs_band, m)?)?;
    Ok(())
}
