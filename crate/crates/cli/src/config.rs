//! Run configuration, read from a single JSON document.

use std::path::{Path, PathBuf};

use m2ch_core::scenario::{default_x_grid, DEFAULT_DT, DEFAULT_MARGIN, DEFAULT_N, DEFAULT_XI_MIN, DEFAULT_XI_RIGHT};
use m2ch_core::{EulerianProfile, Scenario, XGrid, XiGrid};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    Zero,
    Peakon {
        c: f64,
        #[serde(default)]
        x0: f64,
    },
    PeakonAntipeakon {
        c: f64,
        a: f64,
    },
    Gaussian {
        amp_u: f64,
        amp_gamma: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    Atom {
        mass: f64,
        #[serde(default)]
        location: f64,
    },
    /// An Eulerian CSV (`x,u,gamma,mu_density`, optionally `gamma_x`) on a
    /// uniform grid, with atoms from a separate `location,mass` CSV.
    FromFile {
        path: PathBuf,
        #[serde(default)]
        atoms: Option<PathBuf>,
    },
}

impl ScenarioConfig {
    /// The analytic scenario, `None` for file input.
    pub fn analytic(&self) -> Option<Scenario> {
        Some(match *self {
            ScenarioConfig::Zero => Scenario::Zero,
            ScenarioConfig::Peakon { c, x0 } => Scenario::Peakon { c, x0 },
            ScenarioConfig::PeakonAntipeakon { c, a } => Scenario::PeakonAntipeakon { c, a },
            ScenarioConfig::Gaussian { amp_u, amp_gamma, width, center } => {
                Scenario::Gaussian { amp_u, amp_gamma, width, center }
            }
            ScenarioConfig::Atom { mass, location } => Scenario::Atom { mass, location },
            ScenarioConfig::FromFile { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Defaults to -40.
    pub xi_min: Option<f64>,
    /// Defaults to `40 + μ(ℝ) + 5`.
    pub xi_max: Option<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Shift the grid so kinks of analytic data sit mid-cell.
    #[serde(default = "yes")]
    pub align_kinks: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { xi_min: None, xi_max: None, n: DEFAULT_N, align_kinks: true }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Time between snapshots, rounded to a whole number of steps.
    #[serde(default = "default_output_every")]
    pub output_every: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { dt: DEFAULT_DT, t_end: default_t_end(), output_every: default_output_every() }
    }
}

impl TimeConfig {
    pub fn output_steps(&self) -> usize {
        ((self.output_every / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerianOutConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub m: usize,
}

impl Default for EulerianOutConfig {
    fn default() -> Self {
        let g = default_x_grid();
        Self { x_min: g.min(), x_max: g.max(), m: g.len() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default)]
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), format: Format::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on the invariant-set residuals of every snapshot.
    #[serde(default = "default_constraint_tol")]
    pub constraint_tol: f64,
    /// Bound on the relative drift of the total energy.
    #[serde(default = "default_energy_tol")]
    pub energy_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { constraint_tol: default_constraint_tol(), energy_tol: default_energy_tol() }
    }
}

/// Settings of the `metric` verb: the data is compared with its perturbations
/// `u + ε x e^{-x²}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Energy bound `M`; defaults to twice the energy of the data, at least 1.
    pub energy_bound: Option<f64>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self { epsilons: default_epsilons(), times: default_times(), energy_bound: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub eulerian_out: EulerianOutConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub metric: MetricConfig,
}

fn yes() -> bool {
    true
}
fn default_n() -> usize {
    DEFAULT_N
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_t_end() -> f64 {
    1.0
}
fn default_output_every() -> f64 {
    0.1
}
fn default_directory() -> PathBuf {
    PathBuf::from("out")
}
fn default_constraint_tol() -> f64 {
    1e-6
}
fn default_energy_tol() -> f64 {
    1e-4
}
fn default_epsilons() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4]
}
fn default_times() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut cfg.output.directory);
        if let ScenarioConfig::FromFile { path, atoms } = &mut cfg.scenario {
            rebase(path);
            if let Some(a) = atoms {
                rebase(a);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return bad(format!("time.dt must be positive, got {}", t.dt));
        }
        if !(t.t_end >= 0.0 && t.t_end.is_finite()) {
            return bad(format!("time.t_end must be nonnegative, got {}", t.t_end));
        }
        if !(t.output_every > 0.0 && t.output_every.is_finite()) {
            return bad(format!("time.output_every must be positive, got {}", t.output_every));
        }
        if self.grid.n < 3 {
            return bad(format!("grid.n must be at least 3, got {}", self.grid.n));
        }
        let e = &self.eulerian_out;
        if e.m < 3 || !(e.x_min < e.x_max) {
            return bad(format!("eulerian_out needs m >= 3 and x_min < x_max, got {e:?}"));
        }
        let tol = &self.tolerances;
        if !(tol.constraint_tol > 0.0 && tol.energy_tol > 0.0) {
            return bad(format!("tolerances must be positive, got {tol:?}"));
        }
        if let Some(s) = self.scenario.analytic() {
            s.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn x_grid(&self) -> Result<XGrid, CliError> {
        let e = &self.eulerian_out;
        XGrid::new(e.x_min, e.x_max, e.m).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The label grid for data of total energy `mass`. The domain has to
    /// cover `[x_min, x_max + mass + 5]` so that every output point is
    /// reached by a characteristic.
    pub fn xi_grid(&self, mass: f64) -> Result<XiGrid, CliError> {
        let g = &self.grid;
        let lo = g.xi_min.unwrap_or(DEFAULT_XI_MIN);
        let hi = g.xi_max.unwrap_or(DEFAULT_XI_RIGHT + mass + DEFAULT_MARGIN);
        let need = (self.eulerian_out.x_min, self.eulerian_out.x_max + mass + DEFAULT_MARGIN);
        if lo > need.0 || hi < need.1 {
            return Err(CliError::Config(format!(
                "label domain [{lo}, {hi}] must contain [{}, {}]",
                need.0, need.1
            )));
        }
        let grid = XiGrid::new(lo, hi, g.n).map_err(|e| CliError::Config(e.to_string()))?;
        match self.scenario.analytic() {
            Some(s) if g.align_kinks => s.align_grid(grid).map_err(|e| CliError::Config(e.to_string())),
            _ => Ok(grid),
        }
    }

    /// Default energy bound for the metric verb.
    pub fn energy_bound(&self, p: &dyn EulerianProfile) -> f64 {
        self.metric.energy_bound.unwrap_or_else(|| (2.0 * p.total_mass()).max(1.0))
    }
}
