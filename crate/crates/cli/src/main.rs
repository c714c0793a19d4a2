use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polytunnel_cli::{emit, run, CliError, ConfigOverrides, ExperimentConfig, Format, Mode};

/// Discrete-lattice tunnelling through a rectangular barrier.
#[derive(Debug, Parser)]
#[command(name = "polytunnel", version)]
struct Args {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Incident energy (eV).
    #[arg(long = "E-ev")]
    e_ev: Option<f64>,
    /// Barrier height (eV).
    #[arg(long = "V0-ev")]
    v0_ev: Option<f64>,
    /// Barrier width (nm).
    #[arg(long = "L-nm")]
    l_nm: Option<f64>,
    /// Number of lattice steps across the barrier.
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long = "N-min")]
    n_min: Option<u64>,
    #[arg(long = "N-max")]
    n_max: Option<u64>,
    /// Particle mass in eV·fs²/nm² (default: electron).
    #[arg(long = "mass-evfs2nm2")]
    mass: Option<f64>,
    #[arg(long)]
    fs_window_lo: Option<f64>,
    #[arg(long)]
    fs_window_hi: Option<f64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Use the closed-form amplitudes instead of the linear solve for times.
    #[arg(long)]
    use_paper_coefficients: bool,
    /// Flat `key = value` config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            mode: self.mode,
            electron: false,
            mass: self.mass,
            energy_ev: self.e_ev,
            barrier_height_ev: self.v0_ev,
            barrier_width_nm: self.l_nm,
            num_steps: self.n,
            n_min: self.n_min,
            n_max: self.n_max,
            fs_window_lo: self.fs_window_lo,
            fs_window_hi: self.fs_window_hi,
            out: self.out.clone(),
            format: self.format,
            use_paper_coefficients: self.use_paper_coefficients.then_some(true),
        }
    }
}

fn resolve(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg = ConfigOverrides::parse(&text)?.apply(cfg);
    }
    Ok(args.overrides().apply(cfg))
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.trim_start_matches("error: ").trim_end();
            return fail(&CliError::Config(msg.to_string()));
        }
    };
    match resolve(&args).and_then(|cfg| run(&cfg)).and_then(|a| emit(&a)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
