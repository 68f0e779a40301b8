//! TOML run configuration.
//!
//! One file describes a whole run: grid, kernel, habitat, initial data,
//! iteration counts, and the diagnostics to evaluate afterwards. Unknown
//! keys are rejected so typos fail loudly, defaults live here (and nowhere
//! else), and the effective configuration — defaults filled in — is echoed
//! into every manifest.

use habwave_core::{Error, Field, Habitat, Kernel, Nonlinearity, Profile, Result, Samples, SpatialGrid};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

/// Top-level configuration; every section is optional so each subcommand can
/// demand exactly what it needs by name.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: Option<GridSpec>,
    pub kernel: Option<KernelSpec>,
    pub habitat: Option<HabitatSpec>,
    pub initial: Option<InitialSpec>,
    pub run: Option<RunSpec>,
    pub diagnostics: Option<DiagnosticsSpec>,
    pub speed: Option<SpeedSpec>,
    pub fixed_point: Option<FixedPointSpec>,
    pub certificate: Option<CertificateSpec>,
    pub counterexample: Option<CounterexampleSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::invalid("config", format!("cannot read {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))
    }

    /// Effective configuration echoed into manifests.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        section(&self.grid, "grid")?.build()
    }

    pub fn kernel(&self) -> Result<Kernel> {
        section(&self.kernel, "kernel")?.build()
    }

    pub fn habitat(&self) -> Result<Habitat> {
        section(&self.habitat, "habitat")?.build()
    }

    pub fn initial(&self, grid: SpatialGrid) -> Result<Field> {
        section(&self.initial, "initial")?.build(grid)
    }

    pub fn run(&self) -> Result<&RunSpec> {
        section(&self.run, "run")
    }
}

fn section<'a, T>(opt: &'a Option<T>, name: &'static str) -> Result<&'a T> {
    opt.as_ref().ok_or_else(|| Error::invalid(name, "section is required by this subcommand"))
}

/// Uniform grid: `points` nodes spanning `[x_min, x_max]`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.x_min, self.x_max, self.points)
    }
}

/// Dispersal kernel families.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Gaussian {
        mean: f64,
        variance: f64,
        truncation_radius: Option<f64>,
    },
    Laplace {
        rate: f64,
        shift: f64,
        truncation_radius: Option<f64>,
    },
    /// Density samples from a two-column CSV (y, density); must already have
    /// unit trapezoid mass.
    Tabulated {
        samples: PathBuf,
        truncation_radius: Option<f64>,
    },
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        let (kernel, radius) = match self {
            KernelSpec::Gaussian { mean, variance, truncation_radius } => {
                (Kernel::gaussian(*mean, *variance)?, truncation_radius)
            }
            KernelSpec::Laplace { rate, shift, truncation_radius } => {
                (Kernel::laplace(*rate, *shift)?, truncation_radius)
            }
            KernelSpec::Tabulated { samples, truncation_radius } => {
                let file = fs::File::open(samples).map_err(|e| {
                    Error::invalid("kernel", format!("cannot read {}: {e}", samples.display()))
                })?;
                (Kernel::tabulated(Samples::from_csv(BufReader::new(file))?)?, truncation_radius)
            }
        };
        match radius {
            Some(r) => kernel.with_truncation_radius(*r),
            None => Ok(kernel),
        }
    }
}

/// Habitat models; `custom` exposes the full profile/nonlinearity algebra.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum HabitatSpec {
    BevertonHolt {
        rate_minus: f64,
        rate_plus: f64,
        carrying: f64,
        steepness: f64,
        caps: Option<Vec<f64>>,
    },
    GaussianPatch { beta: f64, caps: Option<Vec<f64>> },
    PatchWithRamp { beta: f64, caps: Option<Vec<f64>> },
    Linear { slope: f64, caps: Option<Vec<f64>> },
    Custom {
        profile: Profile,
        nonlinearity: Nonlinearity,
        caps: Option<Vec<f64>>,
    },
}

impl HabitatSpec {
    pub fn build(&self) -> Result<Habitat> {
        let (habitat, caps) = match self {
            HabitatSpec::BevertonHolt { rate_minus, rate_plus, carrying, steepness, caps } => {
                (Habitat::beverton_holt(*rate_minus, *rate_plus, *carrying, *steepness)?, caps)
            }
            HabitatSpec::GaussianPatch { beta, caps } => (Habitat::gaussian_patch(*beta)?, caps),
            HabitatSpec::PatchWithRamp { beta, caps } => (Habitat::patch_with_ramp(*beta)?, caps),
            HabitatSpec::Linear { slope, caps } => (Habitat::linear(*slope)?, caps),
            HabitatSpec::Custom { profile, nonlinearity, caps } => {
                (Habitat::from_parts(profile.clone(), *nonlinearity)?, caps)
            }
        };
        match caps {
            Some(c) => habitat.with_caps(c.clone()),
            None => Ok(habitat),
        }
    }
}

/// Initial data shapes.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Triangular bump: `height` at `center`, reaching zero `width/2` away.
    Bump { center: f64, width: f64, height: f64 },
    /// Left-supported step: `height` for `x <= edge`, zero beyond.
    Step { edge: f64, height: f64 },
    Constant { value: f64 },
    /// Two-column CSV (x, u), resampled onto the run grid.
    Csv { path: PathBuf },
}

impl InitialSpec {
    pub fn build(&self, grid: SpatialGrid) -> Result<Field> {
        match self {
            InitialSpec::Bump { center, width, height } => {
                if !(*width > 0.0 && *height >= 0.0) {
                    return Err(Error::invalid("initial", "bump needs width > 0, height >= 0"));
                }
                Ok(Field::from_fn(grid, |x| {
                    height * (1.0 - (x - center).abs() / (0.5 * width)).max(0.0)
                }))
            }
            InitialSpec::Step { edge, height } => {
                if height.is_nan() || *height < 0.0 {
                    return Err(Error::invalid("initial", "step needs height >= 0"));
                }
                Ok(Field::from_fn(grid, |x| if x <= *edge { *height } else { 0.0 }))
            }
            InitialSpec::Constant { value } => {
                if value.is_nan() || *value < 0.0 {
                    return Err(Error::invalid("initial", "constant level must be >= 0"));
                }
                Ok(Field::constant(grid, *value))
            }
            InitialSpec::Csv { path } => {
                let file = fs::File::open(path).map_err(|e| {
                    Error::invalid("initial", format!("cannot read {}: {e}", path.display()))
                })?;
                Field::read_csv(grid, BufReader::new(file))
            }
        }
    }
}

/// Iteration bookkeeping.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub steps: usize,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    /// Also write SVG plots (the `--svg` flag forces this on).
    #[serde(default)]
    pub svg: bool,
}

fn default_snapshot_every() -> usize {
    1
}

/// Post-run diagnostics. The shared margin `eps` and the limiting speeds
/// derived from the habitat's right limit parameterize every window.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    /// Track the front at this level of the state.
    pub level: Option<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Steps discarded before fitting front speeds.
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub convergence: Option<ConvergenceSpec>,
    pub annihilation: Option<AnnihilationSpec>,
    pub reference_gap: Option<ReferenceGapSpec>,
}

fn default_eps() -> f64 {
    0.5
}

fn default_burn_in() -> usize {
    10
}

/// Upward convergence toward the right-limit state on expanding windows.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    /// Override for the target level; defaults to the habitat's right-limit
    /// fixed point.
    pub u_star: Option<f64>,
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_left_tol")]
    pub left_tol: f64,
    /// Judge the series from this step on; default judges the final entry.
    pub from_step: Option<usize>,
}

fn default_gap_tol() -> f64 {
    1e-2
}

fn default_left_tol() -> f64 {
    1e-3
}

/// Decay ahead of the advancing front.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnnihilationSpec {
    #[serde(default = "default_annihilation_tol")]
    pub tol: f64,
    pub from_step: Option<usize>,
}

fn default_annihilation_tol() -> f64 {
    1e-6
}

/// Gap to a reference stationary state loaded from CSV.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceGapSpec {
    pub path: PathBuf,
    #[serde(default = "default_reference_tol")]
    pub tol: f64,
    pub from_step: Option<usize>,
}

fn default_reference_tol() -> f64 {
    1e-3
}

/// Options for the `speed` subcommand.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedSpec {
    /// Linearization coefficient; defaults to the habitat's right limit.
    pub coef: Option<f64>,
    /// When set and the leftward speed is negative, also emit the decay
    /// certificate at this margin.
    pub epsilon: Option<f64>,
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
}

impl Default for SpeedSpec {
    fn default() -> Self {
        SpeedSpec { coef: None, epsilon: None, curve_points: default_curve_points() }
    }
}

fn default_curve_points() -> usize {
    200
}

/// Options for the `fixed-point` subcommand.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointSpec {
    /// Explicit cap; default takes `cap_index` from the habitat's ladder.
    pub cap: Option<f64>,
    #[serde(default)]
    pub cap_index: usize,
    #[serde(default = "default_fp_tol")]
    pub tol: f64,
    #[serde(default = "default_fp_iters")]
    pub max_iters: usize,
    /// Subsolution CSV: solve in the order interval above it.
    pub lower: Option<PathBuf>,
}

impl Default for FixedPointSpec {
    fn default() -> Self {
        FixedPointSpec {
            cap: None,
            cap_index: 0,
            tol: default_fp_tol(),
            max_iters: default_fp_iters(),
            lower: None,
        }
    }
}

fn default_fp_tol() -> f64 {
    1e-10
}

fn default_fp_iters() -> usize {
    5_000
}

/// Options for `fixed-point --refute` (nonexistence certificate).
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_collapse_iters")]
    pub max_collapse_iters: usize,
}

impl Default for CertificateSpec {
    fn default() -> Self {
        CertificateSpec {
            gamma: default_gamma(),
            epsilon: default_epsilon(),
            max_collapse_iters: default_collapse_iters(),
        }
    }
}

fn default_gamma() -> f64 {
    0.1
}

fn default_epsilon() -> f64 {
    0.4
}

fn default_collapse_iters() -> usize {
    500
}

/// Options for the `counterexample` subcommand.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSpec {
    #[serde(default = "default_ce_tol")]
    pub tol: f64,
}

impl Default for CounterexampleSpec {
    fn default() -> Self {
        CounterexampleSpec { tol: default_ce_tol() }
    }
}

fn default_ce_tol() -> f64 {
    1e-10
}

/// A sweep file: shared thread count plus one complete config per run.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub jobs: Option<usize>,
    #[serde(default)]
    pub runs: Vec<SweepEntry>,
}

/// One sweep entry: a named run executed as if by its own subcommand.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub name: String,
    #[serde(default = "default_sweep_command")]
    pub command: SweepCommand,
    #[serde(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCommand {
    Speed,
    Simulate,
    FixedPoint,
    Counterexample,
}

fn default_sweep_command() -> SweepCommand {
    SweepCommand::Simulate
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::invalid("config", format!("cannot read {}: {e}", path.display()))
        })?;
        let sweep: SweepConfig = toml::from_str(&text)
            .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))?;
        let mut names: Vec<&str> = sweep.runs.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != sweep.runs.len() {
            return Err(Error::invalid("runs", "sweep run names must be unique"));
        }
        if sweep.runs.is_empty() {
            return Err(Error::invalid("runs", "sweep file declares no runs"));
        }
        for run in &sweep.runs {
            if run.name.is_empty()
                || run.name.contains(['/', '\\'])
                || run.name.starts_with('.')
            {
                return Err(Error::invalid(
                    "runs",
                    format!("run name {:?} must be a plain directory name", run.name),
                ));
            }
        }
        Ok(sweep)
    }
}
