//! Files, parallel evaluation and the command-line front end for `synth-core`.

pub mod commands;
pub mod config;
pub mod io;
pub mod parallel;

pub use commands::{cmd_evaluate, cmd_synthesize, CliError, EvalReport, SeedOutcome};
pub use config::{ArraySize, ConfigError, Overrides, RunConfigFile};
pub use parallel::RayonEvaluator;
