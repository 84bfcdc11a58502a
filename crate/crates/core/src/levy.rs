//! Heavy-tailed step lengths for Lévy flights.
//!
//! Steps are drawn with Mantegna's ratio of Gaussians, `u / |v|^(1/beta)`
//! with `beta = exponent - 1`, which gives a step density decaying like
//! `|s|^-exponent` in the tails.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("Lévy exponent must lie strictly inside (1, 3), got {0}")]
pub struct InvalidLevyExponent(pub f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevySampler {
    exponent: f64,
    inv_beta: f64,
    sigma_u: f64,
}

impl LevySampler {
    pub fn new(exponent: f64) -> Result<Self, InvalidLevyExponent> {
        if !(exponent > 1.0 && exponent < 3.0) {
            return Err(InvalidLevyExponent(exponent));
        }
        let beta = exponent - 1.0;
        let numerator = libm::tgamma(1.0 + beta) * libm::sin(PI * beta / 2.0);
        let denominator =
            libm::tgamma((1.0 + beta) / 2.0) * beta * libm::pow(2.0, (beta - 1.0) / 2.0);
        Ok(Self {
            exponent,
            inv_beta: 1.0 / beta,
            sigma_u: libm::pow(numerator / denominator, 1.0 / beta),
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Standard deviation of the numerator Gaussian.
    pub fn sigma_u(&self) -> f64 {
        self.sigma_u
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = StandardNormal.sample(rng);
            let v: f64 = StandardNormal.sample(rng);
            let step = self.sigma_u * u / libm::pow(libm::fabs(v), self.inv_beta);
            if step.is_finite() {
                return step;
            }
        }
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for slot in out {
            *slot = self.sample(rng);
        }
    }
}

/// A `dimension`-long vector of independent Lévy steps.
pub fn levy_step<R: Rng + ?Sized>(
    rng: &mut R,
    levy_exponent: f64,
    dimension: usize,
) -> Result<Vec<f64>, InvalidLevyExponent> {
    let sampler = LevySampler::new(levy_exponent)?;
    let mut step = alloc::vec![0.0; dimension];
    sampler.fill(rng, &mut step);
    Ok(step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_exponents_outside_open_interval() {
        for bad in [1.0, 3.0, 0.5, 3.5, f64::NAN] {
            assert!(LevySampler::new(bad).is_err());
        }
        assert!(levy_step(&mut ChaCha8Rng::seed_from_u64(0), 1.0, 4).is_err());
    }

    #[test]
    fn shape_matches_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(levy_step(&mut rng, 1.5, 3).unwrap().len(), 3);
        assert!(levy_step(&mut rng, 1.5, 0).unwrap().is_empty());
    }

    #[test]
    fn mantegna_sigma_for_beta_three_halves() {
        // Reference value for beta = 1.5, the common cuckoo-search setting.
        let s = LevySampler::new(2.5).unwrap();
        assert!((s.sigma_u() - 0.696_574_502_557_5).abs() < 1e-9, "{}", s.sigma_u());
    }

    #[test]
    fn reproducible_for_equal_seeds() {
        let a = levy_step(&mut ChaCha8Rng::seed_from_u64(9), 1.7, 16).unwrap();
        let b = levy_step(&mut ChaCha8Rng::seed_from_u64(9), 1.7, 16).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.is_finite()));
    }
}
