//! Experiment configuration.
//!
//! Configs are flat `key = value` text files. Values are layered with
//! precedence command line > file > defaults; see [`ConfigOverrides`].

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use polytunnel::units::ELECTRON_MASS;
use polytunnel::zeno_time::{BaseParams, FsWindow};
use polytunnel::RawParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Particle {
    Electron,
    Custom { mass: f64 },
}

impl Particle {
    pub fn mass(&self) -> f64 {
        match self {
            Particle::Electron => ELECTRON_MASS,
            Particle::Custom { mass } => *mass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Scatter,
    Compare,
    Sweep,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }

        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok(Self::$variant),)+
                    other => Err(format!("unknown value `{other}`")),
                }
            }
        }
    };
}

keyword_enum!(Mode { Scatter => "scatter", Compare => "compare", Sweep => "sweep", Time => "time" });
keyword_enum!(Format { Csv => "csv", Json => "json" });

/// Amplitude normalisation for scattering output. Always `c₁ = 1`.
pub const C1_CONVENTION: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub particle: Particle,
    pub energy_ev: f64,
    pub barrier_height_ev: f64,
    pub barrier_width_nm: f64,
    pub num_steps: u64,
    pub n_min: u64,
    pub n_max: u64,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub fs_window_lo: f64,
    pub fs_window_hi: f64,
    pub use_paper_coefficients: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            particle: Particle::Electron,
            energy_ev: 5.5,
            barrier_height_ev: 9.7,
            barrier_width_nm: 1.0,
            num_steps: 10,
            n_min: 8,
            n_max: 120,
            mode: Mode::Scatter,
            out: None,
            format: Format::Json,
            fs_window_lo: FsWindow::DEFAULT.lo,
            fs_window_hi: FsWindow::DEFAULT.hi,
            use_paper_coefficients: false,
        }
    }
}

impl ExperimentConfig {
    pub fn raw_params(&self) -> RawParams {
        self.base().at(self.num_steps)
    }

    pub fn base(&self) -> BaseParams {
        BaseParams {
            mass: self.particle.mass(),
            energy: self.energy_ev,
            barrier_height: self.barrier_height_ev,
            barrier_width: self.barrier_width_nm,
        }
    }

    pub fn fs_window(&self) -> Result<FsWindow, CliError> {
        FsWindow::new(self.fs_window_lo, self.fs_window_hi).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn n_range(&self) -> Result<std::ops::RangeInclusive<u64>, CliError> {
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(CliError::Config(format!(
                "invalid N range [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        Ok(self.n_min..=self.n_max)
    }

    /// Flat `key = value` form; [`ConfigOverrides::parse`] reads it back.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("mode", self.mode.as_str().to_string());
        match self.particle {
            Particle::Electron => put("particle", "electron".into()),
            Particle::Custom { mass } => put("mass_evfs2nm2", mass.to_string()),
        }
        put("E_ev", self.energy_ev.to_string());
        put("V0_ev", self.barrier_height_ev.to_string());
        put("L_nm", self.barrier_width_nm.to_string());
        put("N", self.num_steps.to_string());
        put("N_min", self.n_min.to_string());
        put("N_max", self.n_max.to_string());
        put("fs_window_lo", self.fs_window_lo.to_string());
        put("fs_window_hi", self.fs_window_hi.to_string());
        if let Some(out) = &self.out {
            put("out", out.display().to_string());
        }
        put("format", self.format.as_str().to_string());
        put("use_paper_coefficients", self.use_paper_coefficients.to_string());
        put("c1", C1_CONVENTION.to_string());
        s
    }
}

/// A partial configuration layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub mode: Option<Mode>,
    pub electron: bool,
    pub mass: Option<f64>,
    pub energy_ev: Option<f64>,
    pub barrier_height_ev: Option<f64>,
    pub barrier_width_nm: Option<f64>,
    pub num_steps: Option<u64>,
    pub n_min: Option<u64>,
    pub n_max: Option<u64>,
    pub fs_window_lo: Option<f64>,
    pub fs_window_hi: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub use_paper_coefficients: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("key `{key}`: cannot parse `{value}`: {e}")))
}

impl ConfigOverrides {
    /// Parses a flat key-value file. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = ConfigOverrides::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "mode" => o.mode = Some(parse_value(key, value)?),
                "particle" => match value.to_ascii_lowercase().as_str() {
                    "electron" => o.electron = true,
                    "custom" => {}
                    _ => return Err(CliError::Config(format!("unknown particle `{value}`"))),
                },
                "mass_evfs2nm2" => o.mass = Some(parse_value(key, value)?),
                "E_ev" => o.energy_ev = Some(parse_value(key, value)?),
                "V0_ev" => o.barrier_height_ev = Some(parse_value(key, value)?),
                "L_nm" => o.barrier_width_nm = Some(parse_value(key, value)?),
                "N" => o.num_steps = Some(parse_value(key, value)?),
                "N_min" => o.n_min = Some(parse_value(key, value)?),
                "N_max" => o.n_max = Some(parse_value(key, value)?),
                "fs_window_lo" => o.fs_window_lo = Some(parse_value(key, value)?),
                "fs_window_hi" => o.fs_window_hi = Some(parse_value(key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => o.format = Some(parse_value(key, value)?),
                "use_paper_coefficients" => o.use_paper_coefficients = Some(parse_value(key, value)?),
                "c1" => {
                    let c1: f64 = parse_value(key, value)?;
                    if c1 != C1_CONVENTION {
                        return Err(CliError::Config("c1 is fixed at 1".into()));
                    }
                }
                _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
            }
        }
        Ok(o)
    }

    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if self.electron {
            cfg.particle = Particle::Electron;
        }
        if let Some(mass) = self.mass {
            cfg.particle = Particle::Custom { mass };
        }
        macro_rules! set {
            ($($field:ident),+) => { $(if let Some(v) = self.$field.clone() { cfg.$field = v; })+ };
        }
        set!(
            energy_ev,
            barrier_height_ev,
            barrier_width_nm,
            num_steps,
            n_min,
            n_max,
            fs_window_lo,
            fs_window_hi,
            format,
            use_paper_coefficients,
            mode
        );
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_experiment() {
        let c = ExperimentConfig::default();
        assert_eq!(c.particle, Particle::Electron);
        assert_eq!((c.energy_ev, c.barrier_height_ev, c.barrier_width_nm), (5.5, 9.7, 1.0));
        assert_eq!((c.fs_window_lo, c.fs_window_hi), (0.1, 10.0));
    }

    #[test]
    fn layering_precedence() {
        let file = ConfigOverrides::parse("E_ev = 4.0\nV0_ev = 8.0\n# comment\nmode = sweep\n").unwrap();
        let cli = ConfigOverrides {
            energy_ev: Some(3.0),
            ..Default::default()
        };
        let cfg = cli.apply(file.apply(ExperimentConfig::default()));
        assert_eq!(cfg.energy_ev, 3.0);
        assert_eq!(cfg.barrier_height_ev, 8.0);
        assert_eq!(cfg.mode, Mode::Sweep);
        assert_eq!(cfg.barrier_width_nm, 1.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(ConfigOverrides::parse("foo = 1"), Err(CliError::Config(_))));
        assert!(matches!(ConfigOverrides::parse("E_ev = abc"), Err(CliError::Config(_))));
        assert!(matches!(ConfigOverrides::parse("mode = dance"), Err(CliError::Config(_))));
        assert!(matches!(ConfigOverrides::parse("c1 = 2"), Err(CliError::Config(_))));
        assert!(matches!(ConfigOverrides::parse("no equals sign"), Err(CliError::Config(_))));
    }

    #[test]
    fn custom_mass() {
        let o = ConfigOverrides::parse("mass_evfs2nm2 = 11.5").unwrap();
        let cfg = o.apply(ExperimentConfig::default());
        assert_eq!(cfg.particle, Particle::Custom { mass: 11.5 });
        assert_eq!(cfg.raw_params().mass, 11.5);
    }
}
