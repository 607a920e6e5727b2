//! The eps-perturbed spread
//! `min { log2 tr P + log2 ||P rho P||_inf : tr(P rho) >= 1 - eps }`,
//! with `P` ranging over projectors onto sets of eigenvectors of `rho`.

use alloc::vec::Vec;

use num_bigint::BigUint;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;

use super::{log2_add, log2_biguint, spread, SchmidtSpectrum};
use crate::error::{err, Result};

/// Slack on the retained-weight constraint, shared by the sweep and the
/// exhaustive oracle so both accept the same subsets.
const WEIGHT_TOL: f64 = 1e-12;

pub const BRUTEFORCE_MAX_EIGENVALUES: usize = 20;

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(err!(Domain, "smoothing parameter must lie in [0, 1), got {eps}"));
    }
    Ok(())
}

/// Exact optimum over eigenbasis projectors.
///
/// For every candidate largest retained class `i`, the cheapest feasible set
/// with that maximum keeps class `i` and then the next-largest eigenvalues
/// until the retained weight reaches `1 - eps`; the objective only grows with
/// the number of retained eigenvalues, so the sweep over `i` is exact.
pub fn smoothed_spread(spec: &SchmidtSpectrum, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if eps == 0.0 {
        return Ok(spread(spec));
    }
    let classes = spec.classes();
    let weights: Vec<f64> = classes.iter().map(|c| c.weight()).collect();
    let mut suffix = alloc::vec![0.0; weights.len() + 1];
    for i in (0..weights.len()).rev() {
        suffix[i] = suffix[i + 1] + weights[i];
    }
    let need = 1.0 - eps - WEIGHT_TOL;

    let mut best = f64::INFINITY;
    for i in 0..classes.len() {
        if suffix[i] < need {
            break;
        }
        let mut acc = 0.0;
        let mut full = BigUint::default();
        let mut log_count = None;
        for j in i..classes.len() {
            if acc + weights[j] >= need {
                let rest = need - acc;
                let log_partial = rest.log2() - classes[j].log2_value();
                log_count = Some(if log_partial < 52.0 {
                    let k = (rest / classes[j].value()).ceil().max(1.0) as u64;
                    let k = BigUint::from(k).min(classes[j].multiplicity().clone());
                    log2_biguint(&(full + k))
                } else {
                    // Exceeds exact f64 integers; the ceiling is immaterial here.
                    log2_add(log2_biguint(&full), log_partial.min(classes[j].log2_multiplicity()))
                });
                break;
            }
            acc += weights[j];
            full += classes[j].multiplicity();
        }
        let Some(log_count) = log_count else {
            // Rounding in the suffix sum; this tail cannot meet the constraint.
            continue;
        };
        best = best.min(log_count + classes[i].log2_value());
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(err!(Internal, "no feasible projector for eps = {eps}"))
    }
}

/// Exhaustive minimum over all non-empty subsets of eigenvalues. Independent
/// of [`smoothed_spread`] and only usable for small spectra.
pub fn smoothed_spread_bruteforce(spec: &SchmidtSpectrum, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let values = spec
        .expand(BRUTEFORCE_MAX_EIGENVALUES)
        .ok_or_else(|| err!(Size, "exhaustive search supports at most {BRUTEFORCE_MAX_EIGENVALUES} eigenvalues"))?;
    let d = values.len();
    let need = 1.0 - eps - WEIGHT_TOL;
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << d) {
        let mut weight = 0.0;
        let mut largest = 0.0f64;
        for (k, &v) in values.iter().enumerate() {
            if mask & (1 << k) != 0 {
                weight += v;
                largest = largest.max(v);
            }
        }
        if weight >= need {
            let value = (mask.count_ones() as f64).log2() + largest.log2();
            best = best.min(value);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(err!(Internal, "no feasible subset for eps = {eps}"))
    }
}
