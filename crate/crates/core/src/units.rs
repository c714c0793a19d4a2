//! Unit system, physical constants and validated experiment parameters.
//!
//! Everything in the crate works in eV (energy), nm (length) and fs (time).
//! In that system the reduced Planck constant is in eV·fs and a mass is in
//! eV·fs²/nm², so `m·μ₀²/ħ` comes out directly in femtoseconds.

use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reduced Planck constant, eV·fs (CODATA 2018).
pub const HBAR_EV_FS: f64 = 0.658_211_956_9;

/// Electron rest energy, eV (CODATA 2018).
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.95;

/// Speed of light, nm/fs.
pub const SPEED_OF_LIGHT_NM_FS: f64 = 299.792_458;

/// Electron mass in eV·fs²/nm² (`mₑc² / c²`).
pub const ELECTRON_MASS: f64 =
    ELECTRON_REST_ENERGY_EV / (SPEED_OF_LIGHT_NM_FS * SPEED_OF_LIGHT_NM_FS);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// eV·fs
    pub hbar: f64,
    /// eV·fs²/nm²
    pub mass_electron: f64,
    /// `ħ²/(2mₑ)` in eV·nm²
    pub hbar2_over_2m: f64,
}

impl UnitSystem {
    pub const fn codata() -> Self {
        UnitSystem {
            hbar: HBAR_EV_FS,
            mass_electron: ELECTRON_MASS,
            hbar2_over_2m: HBAR_EV_FS * HBAR_EV_FS / (2.0 * ELECTRON_MASS),
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::codata()
    }
}

/// Exponents of (energy, length, time) for test-time dimensional bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension {
    pub energy: i8,
    pub length: i8,
    pub time: i8,
}

impl Dimension {
    pub const NONE: Dimension = Dimension::new(0, 0, 0);
    pub const ENERGY: Dimension = Dimension::new(1, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1);
    pub const ACTION: Dimension = Dimension::new(1, 0, 1);
    pub const MASS: Dimension = Dimension::new(1, -2, 2);

    pub const fn new(energy: i8, length: i8, time: i8) -> Self {
        Dimension {
            energy,
            length,
            time,
        }
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Dimension) -> Dimension {
        Dimension::new(
            self.energy + rhs.energy,
            self.length + rhs.length,
            self.time + rhs.time,
        )
    }
}

impl Div for Dimension {
    type Output = Dimension;
    fn div(self, rhs: Dimension) -> Dimension {
        Dimension::new(
            self.energy - rhs.energy,
            self.length - rhs.length,
            self.time - rhs.time,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("parameter `{0}` must be positive")]
    NonPositive(&'static str),
    #[error("energy {energy} eV is not below the barrier height {barrier_height} eV")]
    NotTunneling { energy: f64, barrier_height: f64 },
    #[error("energy {energy} eV reaches the lattice cutoff {cutoff} eV (mu0 = {lattice_scale} nm)")]
    EnergyCutoffViolation {
        energy: f64,
        cutoff: f64,
        lattice_scale: f64,
    },
}

impl ParamError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ParamError::NonFinite(_) => "NonFinite",
            ParamError::NonPositive(_) => "NonPositive",
            ParamError::NotTunneling { .. } => "NotTunneling",
            ParamError::EnergyCutoffViolation { .. } => "EnergyCutoffViolation",
        }
    }
}

/// Unvalidated experiment inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    /// eV·fs²/nm²
    pub mass: f64,
    /// eV
    pub energy: f64,
    /// eV
    pub barrier_height: f64,
    /// nm
    pub barrier_width: f64,
    pub num_steps: u64,
}

impl RawParams {
    pub fn electron(energy: f64, barrier_height: f64, barrier_width: f64, num_steps: u64) -> Self {
        RawParams {
            mass: ELECTRON_MASS,
            energy,
            barrier_height,
            barrier_width,
            num_steps,
        }
    }
}

/// Validated experiment parameters. The integer step count is canonical and
/// the lattice scale is derived as `L / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    mass: f64,
    energy: f64,
    barrier_height: f64,
    barrier_width: f64,
    lattice_scale: f64,
    num_steps: u64,
}

/// Upper energy bound `2ħ²/(mμ₀²)` for propagating waves outside the barrier.
pub fn energy_cutoff(mass: f64, lattice_scale: f64) -> f64 {
    2.0 * HBAR_EV_FS * HBAR_EV_FS / (mass * lattice_scale * lattice_scale)
}

pub fn validate_params(raw: RawParams) -> Result<PhysicalParams, ParamError> {
    let finite = [
        ("mass", raw.mass),
        ("energy", raw.energy),
        ("barrier_height", raw.barrier_height),
        ("barrier_width", raw.barrier_width),
    ];
    for (name, value) in finite {
        if !value.is_finite() {
            return Err(ParamError::NonFinite(name));
        }
    }
    for (name, value) in finite {
        if value <= 0.0 {
            return Err(ParamError::NonPositive(name));
        }
    }
    if raw.num_steps < 1 {
        return Err(ParamError::NonPositive("num_steps"));
    }
    if raw.energy >= raw.barrier_height {
        return Err(ParamError::NotTunneling {
            energy: raw.energy,
            barrier_height: raw.barrier_height,
        });
    }
    let lattice_scale = raw.barrier_width / raw.num_steps as f64;
    let cutoff = energy_cutoff(raw.mass, lattice_scale);
    if raw.energy >= cutoff {
        return Err(ParamError::EnergyCutoffViolation {
            energy: raw.energy,
            cutoff,
            lattice_scale,
        });
    }
    Ok(PhysicalParams {
        mass: raw.mass,
        energy: raw.energy,
        barrier_height: raw.barrier_height,
        barrier_width: raw.barrier_width,
        lattice_scale,
        num_steps: raw.num_steps,
    })
}

impl PhysicalParams {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn barrier_height(&self) -> f64 {
        self.barrier_height
    }

    pub fn barrier_width(&self) -> f64 {
        self.barrier_width
    }

    /// μ₀ in nm.
    pub fn lattice_scale(&self) -> f64 {
        self.lattice_scale
    }

    pub fn num_steps(&self) -> u64 {
        self.num_steps
    }

    pub fn energy_cutoff(&self) -> f64 {
        energy_cutoff(self.mass, self.lattice_scale)
    }

    /// `m·μ₀²/ħ²`, in 1/eV.
    pub fn lattice_inertia(&self) -> f64 {
        self.mass * self.lattice_scale * self.lattice_scale / (HBAR_EV_FS * HBAR_EV_FS)
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            mass: self.mass,
            energy: self.energy,
            barrier_height: self.barrier_height,
            barrier_width: self.barrier_width,
            num_steps: self.num_steps,
        }
    }

    /// Same physics on a different lattice.
    pub fn with_num_steps(&self, num_steps: u64) -> Result<PhysicalParams, ParamError> {
        validate_params(RawParams {
            num_steps,
            ..self.to_raw()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_barrier(n: u64) -> RawParams {
        RawParams::electron(5.5, 9.7, 1.0, n)
    }

    #[test]
    fn unit_system_is_consistent() {
        let u = UnitSystem::codata();
        assert!(u.hbar > 0.0 && u.mass_electron > 0.0);
        assert_relative_eq!(
            u.hbar2_over_2m,
            u.hbar * u.hbar / (2.0 * u.mass_electron),
            max_relative = f64::EPSILON
        );
        assert_relative_eq!(u.mass_electron, 5.685_630, max_relative = 1e-6);
    }

    #[test]
    fn time_prefactor_has_time_dimension() {
        // 2 m N mu0^2 / hbar
        let d = Dimension::MASS * Dimension::LENGTH * Dimension::LENGTH / Dimension::ACTION;
        assert_eq!(d, Dimension::TIME);
        // m E mu0^2 / hbar^2 is dimensionless
        let eps = Dimension::MASS * Dimension::ENERGY * Dimension::LENGTH * Dimension::LENGTH
            / (Dimension::ACTION * Dimension::ACTION);
        assert_eq!(eps, Dimension::NONE);
    }

    #[test]
    fn default_experiment_is_valid() {
        let p = validate_params(reference_barrier(10)).unwrap();
        assert_relative_eq!(p.lattice_scale(), 0.1, max_relative = 1e-15);
        assert_eq!(p.num_steps(), 10);
    }

    #[test]
    fn barrier_top_is_not_tunneling() {
        let err = validate_params(RawParams::electron(9.7, 9.7, 1.0, 10)).unwrap_err();
        assert_eq!(err.code(), "NotTunneling");
    }

    #[test]
    fn coarse_lattice_violates_cutoff() {
        // 2 hbar^2 / (m * 1 nm^2); 50-digit reference 0.15239928462147706 eV
        assert_relative_eq!(
            energy_cutoff(ELECTRON_MASS, 1.0),
            0.152_399_284_621_477_06,
            max_relative = 1e-14
        );
        match validate_params(reference_barrier(1)) {
            Err(ParamError::EnergyCutoffViolation { cutoff, .. }) => {
                assert!(cutoff < 5.5);
            }
            other => panic!("expected cutoff violation, got {other:?}"),
        }
    }

    #[test]
    fn exact_cutoff_is_rejected() {
        let cutoff = energy_cutoff(ELECTRON_MASS, 0.5);
        let err = validate_params(RawParams::electron(cutoff, cutoff + 1.0, 1.0, 2)).unwrap_err();
        assert_eq!(err.code(), "EnergyCutoffViolation");
    }

    #[test]
    fn rejects_bad_inputs() {
        let cases = [
            RawParams::electron(-1.0, 9.7, 1.0, 10),
            RawParams::electron(5.5, 0.0, 1.0, 10),
            RawParams::electron(5.5, 9.7, 0.0, 10),
            RawParams::electron(5.5, 9.7, 1.0, 0),
            RawParams {
                mass: -1.0,
                ..reference_barrier(10)
            },
        ];
        for raw in cases {
            assert_eq!(validate_params(raw).unwrap_err().code(), "NonPositive");
        }
        let nan = RawParams::electron(f64::NAN, 9.7, 1.0, 10);
        assert_eq!(validate_params(nan).unwrap_err(), ParamError::NonFinite("energy"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn valid_params_are_self_consistent(
                width in 0.05f64..5.0,
                n in 1u64..5000,
                frac in 0.01f64..0.99,
                excess in 0.01f64..20.0,
            ) {
                let mu = width / n as f64;
                let energy = frac * energy_cutoff(ELECTRON_MASS, mu);
                let raw = RawParams::electron(energy, energy + excess, width, n);
                let p = validate_params(raw).unwrap();
                let reconstructed = p.num_steps() as f64 * p.lattice_scale();
                let ulp = f64::from_bits(width.to_bits() + 1) - width;
                prop_assert!((reconstructed - width).abs() <= ulp);
                prop_assert_eq!(validate_params(p.to_raw()).unwrap(), p);
            }
        }
    }
}
