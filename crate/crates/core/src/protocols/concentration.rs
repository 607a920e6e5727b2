//! Monte Carlo entanglement concentration on `n` copies of
//! `sqrt(1-p)|00> + sqrt(p)|11>`.
//!
//! Measuring the Hamming weight of Alice's string projects onto a type
//! class; weight `k` occurs with probability `C(n,k) p^k (1-p)^(n-k)` and
//! leaves a maximally entangled state of rank `C(n,k)`. Only the weight is
//! sampled, never the `2^n`-dimensional state.

use alloc::vec::Vec;

#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRun {
    /// Mean of the per-trial yields, in ebits.
    pub mean_yield: f64,
    /// Sampled Hamming weights, one per trial.
    pub weights: Vec<u64>,
    /// `log2 C(n, k)` per trial, floored when requested.
    pub yields: Vec<f64>,
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// `log2 C(n, k)` through `ln Gamma`.
fn log2_binomial(n: u64, k: u64) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    (libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)) / core::f64::consts::LN_2
}

pub fn concentration_sample(p: f64, n: u64, trials: usize, seed: u64, floor: bool) -> Result<ConcentrationRun> {
    if !(p > 0.0 && p < 1.0) {
        return Err(err!(Domain, "p must lie in (0, 1), got {p}"));
    }
    if n == 0 {
        return Err(err!(Domain, "n must be at least 1"));
    }
    if trials == 0 {
        return Err(err!(Domain, "trials must be at least 1"));
    }
    let dist = Binomial::new(n, p).map_err(|e| err!(Domain, "{e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<u64> = (0..trials).map(|_| dist.sample(&mut rng)).collect();
    let yields: Vec<f64> = weights
        .iter()
        .map(|&k| {
            let y = log2_binomial(n, k).max(0.0);
            if floor {
                // lgamma round-off can land just under an exact integer.
                (y + 1e-9).floor()
            } else {
                y
            }
        })
        .collect();
    let mean_yield = yields.iter().sum::<f64>() / trials as f64;
    Ok(ConcentrationRun { mean_yield, weights, yields })
}
