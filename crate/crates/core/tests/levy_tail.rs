//! Tail behaviour of the Lévy step generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use synth_core::levy_step;

const SAMPLES: usize = 100_000;

/// Log-log slope of the empirical density of `|x|` above its 99th percentile,
/// from log-spaced histogram bins and least squares.
fn tail_density_slope(samples: &[f64]) -> f64 {
    let mut mags: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let threshold = mags[(mags.len() as f64 * 0.99) as usize];
    let max = *mags.last().unwrap();
    let tail: Vec<f64> = mags.into_iter().filter(|v| *v >= threshold).collect();

    let bins = 12;
    let log_lo = threshold.ln();
    let log_width = (max.ln() - log_lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &tail {
        let k = (((v.ln() - log_lo) / log_width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let points: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, c)| **c >= 5)
        .map(|(k, c)| {
            let a = (log_lo + k as f64 * log_width).exp();
            let b = (log_lo + (k + 1) as f64 * log_width).exp();
            ((a * b).sqrt().ln(), (*c as f64 / (b - a)).ln())
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Hill estimate of the survival-function tail index over the top 1%.
fn hill_index(samples: &[f64]) -> f64 {
    let mut mags: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let k = samples.len() / 100;
    let x_k = mags[k];
    let mean_log: f64 = mags[..k].iter().map(|v| (v / x_k).ln()).sum::<f64>() / k as f64;
    1.0 / mean_log
}

fn steps(exponent: f64, seed: u64) -> Vec<f64> {
    levy_step(&mut ChaCha8Rng::seed_from_u64(seed), exponent, SAMPLES).unwrap()
}

#[test]
fn tail_slope_tracks_exponent() {
    for exponent in [1.5, 2.5] {
        let s = steps(exponent, 42);
        let slope = tail_density_slope(&s);
        assert!((slope + exponent).abs() <= 0.4, "exponent {exponent}: slope {slope}");
        // Density slope -exponent corresponds to a survival index exponent - 1.
        let hill = hill_index(&s);
        assert!((hill - (exponent - 1.0)).abs() <= 0.3, "exponent {exponent}: hill {hill}");
    }
}

#[test]
fn heavier_than_gaussian() {
    fn exceed_fraction(samples: &[f64]) -> f64 {
        let mut mags: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        mags.iter().filter(|v| **v > 10.0 * median).count() as f64 / mags.len() as f64
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gaussian: Vec<f64> = (0..SAMPLES).map(|_| StandardNormal.sample(&mut rng)).collect();
    let baseline = exceed_fraction(&gaussian);
    for exponent in [1.5, 2.5] {
        let levy = exceed_fraction(&steps(exponent, 8));
        assert!(levy > baseline, "exponent {exponent}: {levy} vs gaussian {baseline}");
    }
}
