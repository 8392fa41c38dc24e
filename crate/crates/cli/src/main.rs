use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;
mod schemes;
mod suites;

use config::{GridFile, Observable, Overrides, RunConfig};
use error::CliError;
use output::{run_header, Emitter, Format};

#[derive(Parser)]
#[command(name = "lattice-walk", version, about = "Lattice Dirac Hamiltonians and their quantum-walk digitizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an initial state and write densities, norms and other observables.
    Evolve(Common),
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        /// unitarity, ultralocality, equivalence, gauge, convergence or symmetry
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// One CSV row per point of a (dt, a, m, r) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        grid_dt: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        grid_a: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        grid_m: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        grid_r: Option<Vec<f64>>,
    },
    /// Eigenvalues of the one-step operator or Hamiltonian.
    Spectrum(Common),
    /// Real-space coefficients of the even-odd to naive-walk mapping.
    MapCoeffs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_offset: Option<usize>,
        /// Quadrature points over the cell Brillouin zone
        #[arg(long)]
        points: Option<usize>,
    },
    /// Gauge covariance and plaquette checks on a loaded or seeded random field.
    GaugeCheck(Common),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    wilson_r: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// JSON run config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gauge field JSON {"q", "A0", "A1"}
    #[arg(long)]
    gauge: Option<PathBuf>,
    /// Comma-separated observables, e.g. probability_density,norm
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn parse_outputs(list: &Option<Vec<String>>) -> Result<Option<Vec<Observable>>, CliError> {
    list.as_ref()
        .map(|v| {
            v.iter()
                .map(|s| {
                    serde_json::from_value(serde_json::Value::String(s.clone()))
                        .map_err(|_| CliError::Config(format!("unknown observable {s:?}")))
                })
                .collect()
        })
        .transpose()
}

fn resolve(c: &Common, grid: GridFile, max_offset: Option<usize>, points: Option<usize>) -> Result<RunConfig, CliError> {
    let file = c.config.as_deref().map(|p| config::read_config_file(p).map(|f| (p, f))).transpose()?;
    let flags = Overrides {
        scheme: c.scheme.clone(),
        n_sites: c.n_sites,
        dt: c.dt,
        a: c.a,
        mass: c.mass,
        wilson_r: c.wilson_r,
        steps: c.steps,
        seed: c.seed,
        gauge: c.gauge.clone(),
        outputs: parse_outputs(&c.outputs)?,
        max_offset,
        points,
        grid,
    };
    RunConfig::resolve(file, flags)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (name, common, grid, max_offset, points) = match &cli.command {
        Command::Evolve(c) => ("evolve", c, GridFile::default(), None, None),
        Command::Verify { common, .. } => ("verify", common, GridFile::default(), None, None),
        Command::Sweep { common, grid_dt, grid_a, grid_m, grid_r } => {
            let g = GridFile { dt: grid_dt.clone(), a: grid_a.clone(), m: grid_m.clone(), r: grid_r.clone() };
            ("sweep", common, g, None, None)
        }
        Command::Spectrum(c) => ("spectrum", c, GridFile::default(), None, None),
        Command::MapCoeffs { common, max_offset, points } => ("map-coeffs", common, GridFile::default(), *max_offset, *points),
        Command::GaugeCheck(c) => ("gauge-check", c, GridFile::default(), None, None),
    };
    if let Command::Verify { suite, .. } = &cli.command {
        if !suites::SUITES.contains(&suite.as_str()) {
            return Err(CliError::Config(format!("unknown suite {suite:?}; expected one of {}", suites::SUITES.join(", "))));
        }
    }
    let cfg = resolve(common, grid, max_offset, points)?;
    let mut header = run_header(name, &cfg);
    if let Command::Verify { suite, .. } = &cli.command {
        header.insert("suite".into(), serde_json::json!(suite));
    }
    let mut out = Emitter::new(&common.out_dir, common.format, header)?;
    match &cli.command {
        Command::Evolve(_) => commands::evolve(&cfg, &out),
        Command::Verify { suite, .. } => suites::run(suite, &cfg, &out),
        Command::Sweep { .. } => commands::sweep(&cfg, &out),
        Command::Spectrum(_) => commands::spectrum(&cfg, &out),
        Command::MapCoeffs { .. } => commands::map_coeffs(&cfg, &mut out),
        Command::GaugeCheck(_) => commands::gauge_check(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
