use rayon::prelude::*;
use synth_core::{Evaluator, Objective, ObjectiveError};

/// Evaluates each batch across a rayon pool. Results come back in input
/// order, so runs are identical to [`synth_core::Sequential`].
#[derive(Debug)]
pub struct RayonEvaluator {
    pool: rayon::ThreadPool,
}

impl RayonEvaluator {
    /// `threads == 0` lets rayon pick the thread count.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

impl Evaluator for RayonEvaluator {
    fn evaluate_batch<O>(&self, objective: &O, candidates: &[Vec<f64>]) -> Vec<Result<f64, ObjectiveError>>
    where
        O: Objective + Sync + ?Sized,
    {
        self.pool
            .install(|| candidates.par_iter().map(|c| objective.evaluate(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use synth_core::{run_csa, run_csa_with, Bounds, CsaConfig};

    #[test]
    fn parallel_runs_match_sequential() {
        let rastrigin = |x: &[f64]| {
            x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos() + 10.0)
                .sum::<f64>()
        };
        let bounds = Bounds::uniform(6, -5.12, 5.12).unwrap();
        let config = CsaConfig { max_iterations: 80, seed: 17, ..Default::default() };
        let sequential = run_csa(&config, &bounds, &rastrigin).unwrap();
        for threads in [1, 3, 8] {
            let evaluator = RayonEvaluator::new(threads).unwrap();
            assert_eq!(run_csa_with(&config, &bounds, &rastrigin, &evaluator).unwrap(), sequential);
        }
    }
}
