//! Low-sidelobe planar array synthesis by cuckoo search.
//!
//! - [`array`]: array factor, pattern cuts, main-lobe and side lobe level measurement
//! - [`levy`]: heavy-tailed step generator
//! - [`cuckoo`]: the bounded cuckoo search optimizer
//! - [`synthesis`]: SLL objective over element amplitudes and the synthesis driver
//!
//! The crate is `no_std` and only needs an allocator.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod array;
pub mod cuckoo;
pub mod levy;
pub mod synthesis;

pub use array::{
    compute_sll, evaluate_array_factor, evaluate_cut, locate_main_lobe, AngleConvention,
    ArrayError, ArrayGeometry, CutEvaluator, Direction, ExcitationMatrix, LobeInterval,
    PatternCut, ThetaGrid, DB_FLOOR,
};
pub use cuckoo::{
    best_index, init_population, init_population_with, propose_cuckoo, run_csa, run_csa_with,
    step_iteration, Bounds, CsaConfig, CsaError, CsaRng, Evaluator, Nest, Objective,
    ObjectiveError, RunResult, Sequential,
};
pub use levy::{levy_step, InvalidLevyExponent, LevySampler};
pub use synthesis::{
    build_objective, decision_dimension, expand_excitation, synthesize, synthesize_with,
    Measurement, SllObjective, Symmetry, SynthesisError, SynthesisResult, SynthesisSpec,
    DEGENERATE_SENTINEL_DB,
};
pub use num_complex::Complex64;
