//! Flat run-configuration documents and command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use synth_core::{
    AngleConvention, ArrayGeometry, CsaConfig, Symmetry, SynthesisError, SynthesisSpec, ThetaGrid,
};

/// Every key a config file may set. Omitted keys take the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub m: usize,
    pub n: usize,
    pub dx_wavelengths: f64,
    pub dy_wavelengths: f64,
    pub phi_deg: f64,
    pub theta_start_deg: f64,
    pub theta_stop_deg: f64,
    pub theta_points: usize,
    pub convention: AngleConvention,
    pub symmetry: Symmetry,
    pub taper_monotone: bool,
    pub amplitude_lower: f64,
    pub amplitude_upper: f64,
    pub population: usize,
    pub pa: f64,
    pub alpha: f64,
    pub levy_exponent: f64,
    pub max_iterations: usize,
    pub raw_levy: bool,
    pub seed: u64,
    /// Runs one synthesis per seed; overrides `seed` when non-empty.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        let spec = SynthesisSpec::new(ArrayGeometry::new(11, 11).expect("11x11 is valid"));
        let grid = spec.theta_grid;
        let csa = spec.csa;
        Self {
            m: spec.geometry.m_count(),
            n: spec.geometry.n_count(),
            dx_wavelengths: spec.geometry.dx_wavelengths(),
            dy_wavelengths: spec.geometry.dy_wavelengths(),
            phi_deg: spec.cut_phi_deg,
            theta_start_deg: grid.start_deg,
            theta_stop_deg: grid.stop_deg,
            theta_points: grid.points,
            convention: spec.convention,
            symmetry: spec.symmetry,
            taper_monotone: spec.taper_monotone,
            amplitude_lower: spec.amplitude_bounds.0,
            amplitude_upper: spec.amplitude_bounds.1,
            population: csa.population,
            pa: csa.pa,
            alpha: csa.alpha,
            levy_exponent: csa.levy_exponent,
            max_iterations: csa.max_iterations,
            raw_levy: csa.raw_levy,
            seed: csa.seed,
            seeds: Vec::new(),
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: Option<PathBuf>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(path) = &self.path {
            write!(f, "{}:", path.display())?;
        }
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, "{line}:{column}:")?;
        }
        if self.path.is_some() || self.line.is_some() {
            f.write_str(" ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn plain(message: impl Into<String>) -> Self {
        Self {
            path: None,
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = match e.span() {
                Some(span) => {
                    let (l, c) = line_column(text, span.start);
                    (Some(l), Some(c))
                }
                None => (None, None),
            };
            ConfigError {
                path: None,
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: Some(path.to_path_buf()),
            line: None,
            column: None,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(&text).map_err(|e| ConfigError {
            path: Some(path.to_path_buf()),
            ..e
        })
    }

    /// Seeds to run, in order.
    pub fn effective_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.seed]
        } else {
            self.seeds.clone()
        }
    }

    /// The configuration of a single run, as echoed into its result file.
    pub fn for_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            seeds: Vec::new(),
            out_dir: None,
            ..self.clone()
        }
    }

    pub fn geometry(&self) -> Result<ArrayGeometry, ConfigError> {
        ArrayGeometry::with_spacing(self.m, self.n, self.dx_wavelengths, self.dy_wavelengths)
            .map_err(|e| ConfigError::plain(e.to_string()))
    }

    pub fn theta_grid(&self) -> Result<ThetaGrid, ConfigError> {
        ThetaGrid::new(self.theta_start_deg, self.theta_stop_deg, self.theta_points)
            .map_err(|e| ConfigError::plain(e.to_string()))
    }

    pub fn to_spec(&self, seed: u64) -> Result<SynthesisSpec, ConfigError> {
        let spec = SynthesisSpec {
            geometry: self.geometry()?,
            cut_phi_deg: self.phi_deg,
            theta_grid: self.theta_grid()?,
            convention: self.convention,
            symmetry: self.symmetry,
            taper_monotone: self.taper_monotone,
            amplitude_bounds: (self.amplitude_lower, self.amplitude_upper),
            csa: CsaConfig {
                population: self.population,
                pa: self.pa,
                alpha: self.alpha,
                levy_exponent: self.levy_exponent,
                max_iterations: self.max_iterations,
                seed,
                raw_levy: self.raw_levy,
            },
        };
        spec.validate()
            .map_err(|e: SynthesisError| ConfigError::plain(e.to_string()))?;
        Ok(spec)
    }
}

/// `MxN` element counts, e.g. `16x16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArraySize {
    pub m: usize,
    pub n: usize,
}

impl std::str::FromStr for ArraySize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, n) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected MxN, got `{s}`"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|v| *v > 0)
                .ok_or_else(|| format!("expected positive element counts in `{s}`"))
        };
        Ok(Self {
            m: parse(m)?,
            n: parse(n)?,
        })
    }
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub out_dir: Option<PathBuf>,
    pub pa: Option<f64>,
    pub max_iterations: Option<usize>,
    pub population: Option<usize>,
    pub phi_deg: Option<f64>,
    pub size: Option<ArraySize>,
}

impl Overrides {
    pub fn apply(&self, mut config: RunConfigFile) -> RunConfigFile {
        if let Some(seed) = self.seed {
            config.seed = seed;
            config.seeds.clear();
        }
        if let Some(seeds) = &self.seeds {
            config.seeds = seeds.clone();
        }
        if let Some(out) = &self.out_dir {
            config.out_dir = Some(out.clone());
        }
        if let Some(pa) = self.pa {
            config.pa = pa;
        }
        if let Some(iters) = self.max_iterations {
            config.max_iterations = iters;
        }
        if let Some(pop) = self.population {
            config.population = pop;
        }
        if let Some(phi) = self.phi_deg {
            config.phi_deg = phi;
        }
        if let Some(size) = self.size {
            config.m = size.m;
            config.n = size.n;
        }
        config
    }
}
