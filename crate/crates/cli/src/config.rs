use std::fs;
use std::path::{Path, PathBuf};

use lattice_walk::lattice::Component;
use lattice_walk::{GaugeConfigF64, WalkParamsF64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::schemes::Scheme;

/// Observables a run can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    ProbabilityDensity,
    Norm,
    OutsideConeMass,
    Spectrum,
    #[serde(rename = "F01")]
    F01,
    #[serde(rename = "U01")]
    U01,
    UnitarityDefect,
    StepError,
    DoublingCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    DeltaPeak {
        site: usize,
        #[serde(default = "default_component")]
        component: Component,
    },
    Gaussian {
        center: f64,
        width: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default = "default_component")]
        component: Component,
    },
    PlaneWave {
        k: i64,
        #[serde(default = "default_component")]
        branch: Component,
    },
}

fn default_component() -> Component {
    Component::L
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub a: Option<f64>,
    pub dt: Option<f64>,
    pub m: Option<f64>,
    pub r: Option<f64>,
    pub n_sites: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub dt: Option<Vec<f64>>,
    pub a: Option<Vec<f64>>,
    pub m: Option<Vec<f64>>,
    pub r: Option<Vec<f64>>,
}

/// The JSON config file as written by the user; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scheme: Option<String>,
    #[serde(default)]
    pub params: ParamsFile,
    pub initial_state: Option<InitialState>,
    pub steps: Option<usize>,
    pub gauge: Option<PathBuf>,
    pub outputs: Option<Vec<Observable>>,
    pub seed: Option<u64>,
    pub grid: Option<GridFile>,
    pub kappa: Option<[f64; 2]>,
    pub max_offset: Option<usize>,
    pub points: Option<usize>,
}

/// Flag values; `None` means "not given on the command line".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<String>,
    pub n_sites: Option<usize>,
    pub dt: Option<f64>,
    pub a: Option<f64>,
    pub mass: Option<f64>,
    pub wilson_r: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub gauge: Option<PathBuf>,
    pub outputs: Option<Vec<Observable>>,
    pub max_offset: Option<usize>,
    pub points: Option<usize>,
    pub grid: GridFile,
}

/// Fully resolved configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub params: WalkParamsF64,
    pub initial_state: InitialState,
    pub steps: usize,
    pub gauge_source: Option<PathBuf>,
    #[serde(skip)]
    pub gauge: Option<GaugeConfigF64>,
    pub outputs: Option<Vec<Observable>>,
    pub seed: u64,
    pub grid: GridFile,
    pub kappa: [f64; 2],
    pub max_offset: usize,
    pub points: usize,
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn read_gauge(path: &Path) -> Result<GaugeConfigF64, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let g: GaugeConfigF64 = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    g.validate().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(g)
}

impl RunConfig {
    /// Merges the optional config file with the flags; flags win.
    pub fn resolve(file: Option<(&Path, ConfigFile)>, flags: Overrides) -> Result<Self, CliError> {
        let (base_dir, file) = match file {
            Some((path, f)) => (path.parent().map(Path::to_path_buf), f),
            None => (None, ConfigFile::default()),
        };
        let name = flags.scheme.or(file.scheme).unwrap_or_else(|| "left-right-walk".into());
        let scheme = Scheme::parse(&name)?;
        let n_sites = flags.n_sites.or(file.params.n_sites).unwrap_or(32);
        let params = WalkParamsF64::new(
            flags.a.or(file.params.a).unwrap_or(1.0),
            flags.dt.or(file.params.dt).unwrap_or(0.5),
            flags.mass.or(file.params.m).unwrap_or(0.0),
            flags.wilson_r.or(file.params.r).unwrap_or(0.0),
            n_sites,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let initial_state = file.initial_state.unwrap_or(InitialState::DeltaPeak { site: n_sites / 2, component: Component::L });
        let gauge_source = match flags.gauge {
            Some(p) => Some(p),
            None => file.gauge.map(|p| match (&base_dir, p.is_relative()) {
                (Some(dir), true) => dir.join(p),
                _ => p,
            }),
        };
        let gauge = gauge_source.as_deref().map(read_gauge).transpose()?;
        let fg = file.grid.unwrap_or_default();
        let grid = GridFile { dt: flags.grid.dt.or(fg.dt), a: flags.grid.a.or(fg.a), m: flags.grid.m.or(fg.m), r: flags.grid.r.or(fg.r) };
        let cfg = RunConfig {
            scheme,
            params,
            initial_state,
            steps: flags.steps.or(file.steps).unwrap_or(10),
            gauge_source,
            gauge,
            outputs: flags.outputs.or(file.outputs),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            grid,
            kappa: file.kappa.unwrap_or([1.0, 1.0]),
            max_offset: flags.max_offset.or(file.max_offset).unwrap_or(8),
            points: flags.points.or(file.points).unwrap_or(256),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let n = self.params.n_sites;
        match &self.initial_state {
            InitialState::DeltaPeak { site, .. } if *site >= n => {
                return Err(CliError::Config(format!("initial_state.delta_peak.site {site} is outside 0..{n}")));
            }
            InitialState::Gaussian { width, .. } if !width.is_finite() || *width <= 0.0 => {
                return Err(CliError::Config(format!("initial_state.gaussian.width must be positive, got {width}")));
            }
            InitialState::PlaneWave { k, .. } if 2 * k.unsigned_abs() as usize >= n => {
                return Err(CliError::Config(format!("initial_state.plane_wave.k = {k} aliases on {n} sites")));
            }
            _ => {}
        }
        if let Some(g) = &self.gauge {
            if g.n_sites() != n {
                return Err(CliError::Config(format!("gauge field has {} sites but n_sites = {n}", g.n_sites())));
            }
        }
        if self.scheme.is_gauged() {
            let g = self
                .gauge
                .as_ref()
                .ok_or_else(|| CliError::Config(format!("scheme {} needs a gauge field (--gauge)", self.scheme.name())))?;
            if g.steps() < self.steps.max(1) {
                return Err(CliError::Config(format!(
                    "gauge field covers {} time slices but {} steps were requested",
                    g.steps(),
                    self.steps.max(1)
                )));
            }
        }
        if self.points == 0 {
            return Err(CliError::Config("points must be positive".into()));
        }
        Ok(())
    }

    /// Requested observables checked against what `allowed` can produce.
    pub fn observables(&self, allowed: &[Observable], default: &[Observable]) -> Result<Vec<Observable>, CliError> {
        let list = self.outputs.clone().unwrap_or_else(|| default.to_vec());
        for o in &list {
            if !allowed.contains(o) {
                return Err(CliError::Config(format!("observable {o:?} is not available here")));
            }
            let needs_gauge = matches!(o, Observable::F01 | Observable::U01);
            if needs_gauge && self.gauge.is_none() {
                return Err(CliError::Config(format!("observable {o:?} needs a gauge field (--gauge)")));
            }
            if *o == Observable::OutsideConeMass && !matches!(self.initial_state, InitialState::DeltaPeak { .. }) {
                return Err(CliError::Config("outside_cone_mass needs a delta_peak initial state".into()));
            }
            if *o == Observable::StepError && self.scheme.continuum_name().is_none() {
                return Err(CliError::Config(format!("scheme {} has no continuous-time counterpart", self.scheme.name())));
            }
            if *o == Observable::DoublingCount && !self.scheme.is_hamiltonian() {
                return Err(CliError::Config("doubling_count needs a Hamiltonian scheme".into()));
            }
        }
        Ok(list)
    }
}
