//! The `run` and `eval` subcommands.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::Serialize;
use synth_core::{
    compute_sll, evaluate_cut, locate_main_lobe, synthesize_with, ArrayError, ArrayGeometry,
    LobeInterval, SynthesisResult,
};

use crate::config::{ConfigError, Overrides, RunConfigFile};
use crate::io::{self, SummaryRow};
use crate::parallel::RayonEvaluator;

pub const RESULT_FILE: &str = "result.json";
pub const PATTERN_FILE: &str = "pattern.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const EXCITATION_FILE: &str = "excitation.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

const DEFAULT_RUN_DIR: &str = "out";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input files; exit status 2.
    Usage(String),
    Config(ConfigError),
    /// A condition reported to stdout as a JSON object; exit status 1.
    Structured { kind: &'static str, message: String },
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Structured { .. } | CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Structured { kind, message } => write!(f, "{kind}: {message}"),
            CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfigFile, ConfigError> {
    let file = match path {
        Some(p) => RunConfigFile::load(p)?,
        None => RunConfigFile::default(),
    };
    Ok(overrides.apply(file))
}

/// Contents of `result.json`.
#[derive(Debug, Serialize)]
pub struct ResultFile<'a> {
    pub config: RunConfigFile,
    pub synthesis: &'a SynthesisResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub sll_db: f64,
    pub main_lobe: LobeInterval,
    pub dir: PathBuf,
}

pub fn write_run_artifacts(dir: &Path, config: &RunConfigFile, result: &SynthesisResult) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let file = ResultFile {
        config: config.for_seed(result.spec.csa.seed),
        synthesis: result,
    };
    io::write_json(&dir.join(RESULT_FILE), &file)?;
    io::write_pattern_csv(&dir.join(PATTERN_FILE), &result.pattern()?)?;
    io::write_convergence_csv(&dir.join(CONVERGENCE_FILE), &result.run)?;
    io::write_excitation_csv(&dir.join(EXCITATION_FILE), &result.best_excitation)?;
    Ok(())
}

/// Runs one synthesis per seed. A single seed writes into the output
/// directory itself; several seeds get `seed-<n>/` subdirectories and a
/// `summary.csv`.
pub fn cmd_synthesize(
    config_path: Option<&Path>,
    overrides: &Overrides,
    threads: usize,
    stdout: &mut dyn Write,
) -> Result<Vec<SeedOutcome>, CliError> {
    let config = load_config(config_path, overrides)?;
    let seeds = config.effective_seeds();
    let specs = seeds
        .iter()
        .map(|&seed| config.to_spec(seed))
        .collect::<Result<Vec<_>, _>>()?;
    let out_dir = config
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_RUN_DIR));
    let multi = seeds.len() > 1;

    let evaluator = RayonEvaluator::new(threads).map_err(|e| CliError::Runtime(anyhow!(e)))?;
    let results = evaluator.install(|| {
        specs
            .par_iter()
            .map(|spec| synthesize_with(spec, &evaluator))
            .collect::<Vec<_>>()
    });

    let mut outcomes = Vec::with_capacity(seeds.len());
    for (seed, result) in seeds.iter().zip(results) {
        let result = result.with_context(|| format!("synthesis failed for seed {seed}"))?;
        let dir = if multi {
            out_dir.join(format!("seed-{seed}"))
        } else {
            out_dir.clone()
        };
        write_run_artifacts(&dir, &config, &result)?;
        let outcome = SeedOutcome {
            seed: *seed,
            sll_db: result.sll_db,
            main_lobe: result.main_lobe,
            dir,
        };
        writeln!(stdout, "{}", serde_json::to_string(&outcome).map_err(anyhow::Error::from)?)
            .map_err(anyhow::Error::from)?;
        outcomes.push(outcome);
    }

    if multi {
        let rows: Vec<SummaryRow> = outcomes
            .iter()
            .map(|o| SummaryRow {
                seed: o.seed,
                sll_db: o.sll_db,
                main_lobe_low_deg: o.main_lobe.theta_low_deg,
                main_lobe_high_deg: o.main_lobe.theta_high_deg,
            })
            .collect();
        io::write_summary_csv(&out_dir.join(SUMMARY_FILE), &rows)?;
    }
    Ok(outcomes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub m: usize,
    pub n: usize,
    pub phi_deg: f64,
    pub sll_db: f64,
    pub main_lobe: LobeInterval,
}

/// Measures an excitation file on the configured cut. Without a config the
/// geometry is taken from the file with half-wave spacing.
pub fn cmd_evaluate(
    config_path: Option<&Path>,
    excitation_path: &Path,
    overrides: &Overrides,
    stdout: &mut dyn Write,
) -> Result<EvalReport, CliError> {
    let excitation = io::read_excitation_csv(excitation_path).map_err(|e| CliError::Usage(format!("{e:#}")))?;
    let mut config = load_config(config_path, overrides)?;
    if config_path.is_none() && overrides.size.is_none() {
        config.m = excitation.m_count();
        config.n = excitation.n_count();
    }
    let geometry: ArrayGeometry = config.geometry()?;
    if (geometry.m_count(), geometry.n_count()) != (excitation.m_count(), excitation.n_count()) {
        return Err(CliError::Usage(format!(
            "excitation dimension mismatch: expected {}x{}, found {}x{}",
            geometry.m_count(),
            geometry.n_count(),
            excitation.m_count(),
            excitation.n_count()
        )));
    }
    let grid = config.theta_grid()?.samples();

    let cut = evaluate_cut(&geometry, &excitation, config.phi_deg, &grid, config.convention).map_err(|e| match e {
        ArrayError::DegenerateExcitation => CliError::Structured {
            kind: "degenerate_excitation",
            message: e.to_string(),
        },
        other => CliError::Runtime(anyhow!(other)),
    })?;
    let out_dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    io::write_pattern_csv(&out_dir.join(PATTERN_FILE), &cut)?;

    let main_lobe = locate_main_lobe(&cut).map_err(|e| CliError::Runtime(anyhow!(e)))?;
    let sll_db = compute_sll(&cut, &main_lobe).map_err(|e| match e {
        ArrayError::NoSidelobeRegion => CliError::Structured {
            kind: "no_sidelobe_region",
            message: e.to_string(),
        },
        other => CliError::Runtime(anyhow!(other)),
    })?;
    let report = EvalReport {
        m: geometry.m_count(),
        n: geometry.n_count(),
        phi_deg: cut.phi_deg(),
        sll_db,
        main_lobe,
    };
    writeln!(stdout, "{}", serde_json::to_string(&report).map_err(anyhow::Error::from)?)
        .map_err(anyhow::Error::from)?;
    Ok(report)
}
