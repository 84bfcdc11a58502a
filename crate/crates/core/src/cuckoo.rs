//! Cuckoo search over a bounded box, minimizing.
//!
//! Each iteration lays one Lévy-flight egg per nest and drops it into a
//! randomly chosen nest, replacing that nest only on strict improvement. The
//! worst `ceil(pa * n)` nests, never including the current best, are then
//! abandoned and rebuilt. The best nest therefore survives every iteration and
//! the best-so-far objective never increases.
//!
//! All random draws of an iteration happen on the calling thread before any
//! objective is evaluated, so a parallel [`Evaluator`] cannot change results.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::levy::{InvalidLevyExponent, LevySampler};

/// The generator every run is seeded into.
pub type CsaRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CsaConfig {
    /// Number of host nests.
    pub population: usize,
    /// Fraction of nests abandoned per iteration.
    pub pa: f64,
    /// Step scale applied to every Lévy move.
    pub alpha: f64,
    pub levy_exponent: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Add `alpha * levy` directly instead of scaling it by the distance to the best nest.
    pub raw_levy: bool,
}

impl Default for CsaConfig {
    fn default() -> Self {
        Self {
            population: 25,
            pa: 0.25,
            alpha: 0.01,
            levy_exponent: 1.5,
            max_iterations: 500,
            seed: 0,
            raw_levy: false,
        }
    }
}

impl CsaConfig {
    pub fn validate(&self) -> Result<(), CsaError> {
        if self.population < 2 {
            return Err(CsaError::InvalidConfig("population must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.pa) {
            return Err(CsaError::InvalidConfig("pa must lie in [0, 1]"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(CsaError::InvalidConfig("alpha must be finite and non-negative"));
        }
        if self.max_iterations == 0 {
            return Err(CsaError::InvalidConfig("max_iterations must be at least 1"));
        }
        LevySampler::new(self.levy_exponent)?;
        Ok(())
    }

    /// Nests rebuilt per iteration, before the elite is excluded.
    pub fn abandon_count(&self) -> usize {
        libm::ceil(self.pa * self.population as f64) as usize
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ObjectiveError {
    message: String,
}

impl ObjectiveError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CsaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    LevyExponent(#[from] InvalidLevyExponent),
    #[error("invalid bounds: {0}")]
    InvalidBounds(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("objective failed at iteration {iteration}, nest {nest}: {source}")]
    Objective {
        iteration: usize,
        nest: usize,
        source: ObjectiveError,
    },
}

/// Function being minimized.
pub trait Objective {
    fn evaluate(&self, position: &[f64]) -> Result<f64, ObjectiveError>;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, position: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self(position))
    }
}

/// Evaluates a batch of candidates, returning results in input order.
pub trait Evaluator {
    fn evaluate_batch<O>(&self, objective: &O, candidates: &[Vec<f64>]) -> Vec<Result<f64, ObjectiveError>>
    where
        O: Objective + Sync + ?Sized;
}

/// Evaluates candidates one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Evaluator for Sequential {
    fn evaluate_batch<O>(&self, objective: &O, candidates: &[Vec<f64>]) -> Vec<Result<f64, ObjectiveError>>
    where
        O: Objective + Sync + ?Sized,
    {
        candidates.iter().map(|c| objective.evaluate(c)).collect()
    }
}

/// Per-coordinate `[lower, upper]` box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self, CsaError> {
        if intervals.is_empty() {
            return Err(CsaError::InvalidBounds("at least one dimension is required"));
        }
        if intervals
            .iter()
            .any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(CsaError::InvalidBounds("each interval must be finite with lower < upper"));
        }
        Ok(Self {
            lower: intervals.iter().map(|i| i.0).collect(),
            upper: intervals.iter().map(|i| i.1).collect(),
        })
    }

    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self, CsaError> {
        Self::new(&alloc::vec![(lower, upper); dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimension()
            && position
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| (*lo..=*hi).contains(x))
    }

    pub fn clamp(&self, position: &mut [f64]) {
        for (x, (lo, hi)) in position.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *x = if x.is_nan() { *lo } else { x.clamp(*lo, *hi) };
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect()
    }

    fn check_dimension(&self, position: &[f64]) -> Result<(), CsaError> {
        if position.len() != self.dimension() {
            return Err(CsaError::DimensionMismatch {
                expected: self.dimension(),
                found: position.len(),
            });
        }
        Ok(())
    }
}

/// A stored candidate with its cached objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Nest {
    position: Vec<f64>,
    objective_value: f64,
}

impl Nest {
    pub fn evaluated<O: Objective + ?Sized>(position: Vec<f64>, objective: &O) -> Result<Self, ObjectiveError> {
        let objective_value = checked(objective.evaluate(&position))?;
        Ok(Self {
            position,
            objective_value,
        })
    }

    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn objective_value(&self) -> f64 {
        self.objective_value
    }
}

fn checked(value: Result<f64, ObjectiveError>) -> Result<f64, ObjectiveError> {
    match value {
        Ok(v) if v.is_nan() => Err(ObjectiveError::new("objective returned NaN")),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_objective: f64,
    /// Best objective of the initial population, before the first iteration.
    pub initial_best_objective: f64,
    /// Best objective after each iteration.
    pub best_history: Vec<f64>,
    /// Change of the best objective per iteration; entry 0 is relative to the
    /// initial population.
    pub fitness_deltas: Vec<f64>,
    pub iterations_executed: usize,
    pub seed: u64,
}

fn evaluate_all<O, E>(
    objective: &O,
    evaluator: &E,
    candidates: Vec<Vec<f64>>,
    iteration: usize,
    nest_of: impl Fn(usize) -> usize,
) -> Result<Vec<Nest>, CsaError>
where
    O: Objective + Sync + ?Sized,
    E: Evaluator + ?Sized,
{
    let values = evaluator.evaluate_batch(objective, &candidates);
    debug_assert_eq!(values.len(), candidates.len());
    candidates
        .into_iter()
        .zip(values)
        .enumerate()
        .map(|(k, (position, value))| {
            let objective_value = checked(value).map_err(|source| CsaError::Objective {
                iteration,
                nest: nest_of(k),
                source,
            })?;
            Ok(Nest {
                position,
                objective_value,
            })
        })
        .collect()
}

/// Draws `config.population` nests uniformly inside `bounds`.
pub fn init_population<O, R>(
    config: &CsaConfig,
    bounds: &Bounds,
    objective: &O,
    rng: &mut R,
) -> Result<Vec<Nest>, CsaError>
where
    O: Objective + Sync + ?Sized,
    R: Rng + ?Sized,
{
    init_population_with(config, bounds, objective, rng, &Sequential)
}

pub fn init_population_with<O, R, E>(
    config: &CsaConfig,
    bounds: &Bounds,
    objective: &O,
    rng: &mut R,
    evaluator: &E,
) -> Result<Vec<Nest>, CsaError>
where
    O: Objective + Sync + ?Sized,
    R: Rng + ?Sized,
    E: Evaluator + ?Sized,
{
    config.validate()?;
    let positions = (0..config.population).map(|_| bounds.sample(rng)).collect();
    evaluate_all(objective, evaluator, positions, 0, |k| k)
}

/// Index of the lowest objective, first one on ties.
pub fn best_index(nests: &[Nest]) -> usize {
    let mut best = 0;
    for (i, nest) in nests.iter().enumerate().skip(1) {
        if nest.objective_value < nests[best].objective_value {
            best = i;
        }
    }
    best
}

fn propose(
    position: &[f64],
    best: &[f64],
    config: &CsaConfig,
    bounds: &Bounds,
    sampler: &LevySampler,
    rng: &mut (impl Rng + ?Sized),
) -> Vec<f64> {
    let at_best = position == best;
    let mut candidate: Vec<f64> = position
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let scale = if config.raw_levy {
                1.0
            } else if at_best {
                bounds.upper[i] - bounds.lower[i]
            } else {
                x - best[i]
            };
            x + config.alpha * sampler.sample(rng) * scale
        })
        .collect();
    bounds.clamp(&mut candidate);
    candidate
}

/// Lays a cuckoo egg from `nest`: a Lévy move scaled by the distance to
/// `best`, or by the box width when `nest` is the best one, clamped to the box.
pub fn propose_cuckoo<R: Rng + ?Sized>(
    nest: &Nest,
    best: &Nest,
    config: &CsaConfig,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<Vec<f64>, CsaError> {
    bounds.check_dimension(&nest.position)?;
    bounds.check_dimension(&best.position)?;
    let sampler = LevySampler::new(config.levy_exponent)?;
    Ok(propose(&nest.position, &best.position, config, bounds, &sampler, rng))
}

/// Runs one generation in place and returns the index of the best nest.
///
/// `iteration` is only used to label objective failures.
pub fn step_iteration<O, R, E>(
    nests: &mut [Nest],
    config: &CsaConfig,
    bounds: &Bounds,
    objective: &O,
    rng: &mut R,
    evaluator: &E,
    iteration: usize,
) -> Result<usize, CsaError>
where
    O: Objective + Sync + ?Sized,
    R: Rng + ?Sized,
    E: Evaluator + ?Sized,
{
    if nests.is_empty() {
        return Err(CsaError::InvalidConfig("population is empty"));
    }
    let sampler = LevySampler::new(config.levy_exponent)?;
    let n = nests.len();
    let best = nests[best_index(nests)].position.clone();

    // Lay one egg per nest and pick the nest it lands in.
    let mut eggs = Vec::with_capacity(n);
    let mut hosts = Vec::with_capacity(n);
    for nest in nests.iter() {
        eggs.push(propose(&nest.position, &best, config, bounds, &sampler, rng));
        hosts.push(rng.random_range(0..n));
    }
    let eggs = evaluate_all(objective, evaluator, eggs, iteration, |k| k)?;
    for (egg, host) in eggs.into_iter().zip(hosts) {
        if egg.objective_value < nests[host].objective_value {
            nests[host] = egg;
        }
    }

    // Abandon the worst nests, never the elite one.
    let elite = best_index(nests);
    let mut ranked: Vec<usize> = (0..n).filter(|&i| i != elite).collect();
    ranked.sort_by(|&a, &b| {
        nests[b]
            .objective_value
            .total_cmp(&nests[a].objective_value)
            .then(a.cmp(&b))
    });
    let abandoned: Vec<usize> = ranked
        .into_iter()
        .take(config.abandon_count().min(n - 1))
        .collect();
    if !abandoned.is_empty() {
        let survivors: Vec<usize> = (0..n).filter(|i| !abandoned.contains(i)).collect();
        let elite_position = nests[elite].position.clone();
        let rebuilt = abandoned
            .iter()
            .map(|_| {
                if rng.random_bool(0.5) {
                    bounds.sample(rng)
                } else {
                    let donor = survivors[rng.random_range(0..survivors.len())];
                    propose(&nests[donor].position, &elite_position, config, bounds, &sampler, rng)
                }
            })
            .collect();
        let rebuilt = evaluate_all(objective, evaluator, rebuilt, iteration, |k| abandoned[k])?;
        for (slot, nest) in abandoned.iter().zip(rebuilt) {
            nests[*slot] = nest;
        }
    }

    Ok(best_index(nests))
}

/// Full optimization run on the calling thread.
pub fn run_csa<O>(config: &CsaConfig, bounds: &Bounds, objective: &O) -> Result<RunResult, CsaError>
where
    O: Objective + Sync + ?Sized,
{
    run_csa_with(config, bounds, objective, &Sequential)
}

pub fn run_csa_with<O, E>(
    config: &CsaConfig,
    bounds: &Bounds,
    objective: &O,
    evaluator: &E,
) -> Result<RunResult, CsaError>
where
    O: Objective + Sync + ?Sized,
    E: Evaluator + ?Sized,
{
    config.validate()?;
    let mut rng = CsaRng::seed_from_u64(config.seed);
    let mut nests = init_population_with(config, bounds, objective, &mut rng, evaluator)?;
    let initial_best_objective = nests[best_index(&nests)].objective_value;

    let mut best_history = Vec::with_capacity(config.max_iterations);
    let mut fitness_deltas = Vec::with_capacity(config.max_iterations);
    let mut previous = initial_best_objective;
    let mut best = 0;
    for iteration in 1..=config.max_iterations {
        best = step_iteration(&mut nests, config, bounds, objective, &mut rng, evaluator, iteration)?;
        let current = nests[best].objective_value;
        best_history.push(current);
        fitness_deltas.push(current - previous);
        previous = current;
    }

    Ok(RunResult {
        best_position: nests[best].position.clone(),
        best_objective: nests[best].objective_value,
        initial_best_objective,
        best_history,
        fitness_deltas,
        iterations_executed: config.max_iterations,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn config_validation() {
        assert!(CsaConfig::default().validate().is_ok());
        let bad = [
            CsaConfig { population: 1, ..Default::default() },
            CsaConfig { pa: 1.5, ..Default::default() },
            CsaConfig { alpha: -1.0, ..Default::default() },
            CsaConfig { levy_exponent: 3.0, ..Default::default() },
            CsaConfig { max_iterations: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn defaults() {
        let c = CsaConfig::default();
        assert_eq!((c.population, c.pa, c.alpha, c.levy_exponent, c.max_iterations), (25, 0.25, 0.01, 1.5, 500));
        assert_eq!(c.abandon_count(), 7);
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(&[]).is_err());
        assert!(Bounds::new(&[(1.0, 1.0)]).is_err());
        assert!(Bounds::new(&[(0.0, f64::INFINITY)]).is_err());
        let b = Bounds::new(&[(0.0, 1.0), (-2.0, 2.0)]).unwrap();
        let mut x = vec![1.5, f64::NAN];
        b.clamp(&mut x);
        assert_eq!(x, vec![1.0, -2.0]);
    }

    #[test]
    fn init_population_respects_bounds_and_seed() {
        let config = CsaConfig { population: 2, ..Default::default() };
        let bounds = Bounds::uniform(1, 0.0, 1.0).unwrap();
        let a = init_population(&config, &bounds, &sphere, &mut CsaRng::seed_from_u64(5)).unwrap();
        let b = init_population(&config, &bounds, &sphere, &mut CsaRng::seed_from_u64(5)).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a, b);
        for nest in &a {
            assert!(bounds.contains(nest.position()));
            assert_eq!(nest.objective_value(), sphere(nest.position()));
        }
    }

    #[test]
    fn zero_alpha_proposal_is_identity() {
        let config = CsaConfig { alpha: 0.0, ..Default::default() };
        let bounds = Bounds::uniform(3, -1.0, 1.0).unwrap();
        let nest = Nest::evaluated(vec![0.1, -0.4, 0.9], &sphere).unwrap();
        let best = Nest::evaluated(vec![0.0, 0.0, 0.0], &sphere).unwrap();
        let mut rng = CsaRng::seed_from_u64(1);
        assert_eq!(propose_cuckoo(&nest, &best, &config, &bounds, &mut rng).unwrap(), nest.position());
        assert_eq!(propose_cuckoo(&best, &best, &config, &bounds, &mut rng).unwrap(), best.position());
    }

    #[test]
    fn best_nest_still_moves() {
        let config = CsaConfig { alpha: 0.5, ..Default::default() };
        let bounds = Bounds::uniform(4, -1.0, 1.0).unwrap();
        let best = Nest::evaluated(vec![0.0; 4], &sphere).unwrap();
        let candidate = propose_cuckoo(&best, &best, &config, &bounds, &mut CsaRng::seed_from_u64(2)).unwrap();
        assert_ne!(candidate, best.position());
    }

    #[test]
    fn proposal_dimension_checked() {
        let bounds = Bounds::uniform(2, 0.0, 1.0).unwrap();
        let a = Nest::evaluated(vec![0.5, 0.5], &sphere).unwrap();
        let b = Nest::evaluated(vec![0.5], &sphere).unwrap();
        let err = propose_cuckoo(&a, &b, &CsaConfig::default(), &bounds, &mut CsaRng::seed_from_u64(0));
        assert_eq!(err, Err(CsaError::DimensionMismatch { expected: 2, found: 1 }));
    }

    fn positions(nests: &[Nest]) -> Vec<Vec<f64>> {
        nests.iter().map(|n| n.position.clone()).collect()
    }

    #[test]
    fn full_abandonment_rebuilds_all_but_elite() {
        // alpha 0 freezes the egg-laying phase, so only abandonment moves nests.
        let config = CsaConfig { population: 8, pa: 1.0, alpha: 0.0, ..Default::default() };
        let bounds = Bounds::uniform(3, -1.0, 1.0).unwrap();
        let mut rng = CsaRng::seed_from_u64(11);
        let mut nests = init_population(&config, &bounds, &sphere, &mut rng).unwrap();
        let before = positions(&nests);
        let elite = best_index(&nests);
        step_iteration(&mut nests, &config, &bounds, &sphere, &mut rng, &Sequential, 1).unwrap();
        // Rebuilt nests are fresh draws or zero-length copies of the only survivor.
        let elite_position = &before[elite];
        let after = positions(&nests);
        assert!(after.contains(elite_position));
        for position in &after {
            assert!(position == elite_position || !before.contains(position));
        }
    }

    #[test]
    fn zero_abandonment_moves_only_through_eggs() {
        let config = CsaConfig { population: 6, pa: 0.0, alpha: 0.0, ..Default::default() };
        let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let mut rng = CsaRng::seed_from_u64(4);
        let mut nests = init_population(&config, &bounds, &sphere, &mut rng).unwrap();
        let before = nests.clone();
        for it in 1..=20 {
            step_iteration(&mut nests, &config, &bounds, &sphere, &mut rng, &Sequential, it).unwrap();
        }
        // Zero-length eggs equal their parents, so nests can only be copied
        // over other nests, never moved to new points.
        for nest in &nests {
            assert!(before.iter().any(|b| b.position == nest.position));
        }
    }

    #[test]
    fn objective_errors_carry_context() {
        let failing = FailAbove(0.5);
        let config = CsaConfig { population: 4, max_iterations: 3, ..Default::default() };
        let bounds = Bounds::uniform(2, 0.0, 1.0).unwrap();
        match run_csa(&config, &bounds, &failing) {
            Err(CsaError::Objective { iteration, nest, .. }) => {
                assert_eq!(iteration, 0);
                assert!(nest < 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        let nan = |_: &[f64]| f64::NAN;
        assert!(matches!(run_csa(&config, &bounds, &nan), Err(CsaError::Objective { .. })));
    }

    struct FailAbove(f64);

    impl Objective for FailAbove {
        fn evaluate(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
            if x[0] > self.0 {
                Err(ObjectiveError::new("out of domain"))
            } else {
                Ok(x[0])
            }
        }
    }

    #[test]
    fn budget_of_one_iteration() {
        let config = CsaConfig { population: 2, max_iterations: 1, ..Default::default() };
        let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let r = run_csa(&config, &bounds, &sphere).unwrap();
        assert_eq!(r.best_history.len(), 1);
        assert_eq!(r.iterations_executed, 1);
        assert_eq!(r.best_objective, r.best_history[0]);
        assert_eq!(r.fitness_deltas[0], r.best_history[0] - r.initial_best_objective);
    }
}
