//! Spectra of `psi^{(x)n}` aggregated by type class.
//!
//! A type assigns a count `k_j` to every base class (`sum k_j = n`); all
//! eigenvalues of that type equal `prod lambda_j^{k_j}` and there are
//! `n! / prod k_j! * prod m_j^{k_j}` of them. The number of types is
//! `C(n + c - 1, c - 1)` for `c` base classes, polynomial in `n`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use super::SchmidtSpectrum;
use crate::error::{err, Result};

/// Default cap on the number of type classes enumerated.
pub const DEFAULT_CLASS_CAP: usize = 2_000_000;

fn type_count(n: u64, classes: usize) -> Option<u128> {
    // C(n + c - 1, c - 1) with early overflow detection.
    let k = classes as u128 - 1;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(n as u128 + i)? / i;
    }
    Some(acc)
}

/// Spectrum of `n` copies of a state with spectrum `base`, with the default
/// cap on the number of type classes.
pub fn tensor_power(base: &SchmidtSpectrum, n: u32) -> Result<SchmidtSpectrum> {
    tensor_power_capped(base, n, DEFAULT_CLASS_CAP)
}

pub fn tensor_power_capped(base: &SchmidtSpectrum, n: u32, cap: usize) -> Result<SchmidtSpectrum> {
    if n == 0 {
        return Err(err!(Domain, "tensor power needs n >= 1"));
    }
    let c = base.num_classes();
    match type_count(n as u64, c) {
        Some(t) if t <= cap as u128 => {}
        _ => return Err(err!(Size, "{c} base classes at n = {n} exceed the cap of {cap} type classes")),
    }
    let log_values: Vec<f64> = base.classes().iter().map(|x| x.log2_value()).collect();
    let mults: Vec<&BigUint> = base.classes().iter().map(|x| x.multiplicity()).collect();
    let mut out = Vec::new();
    enumerate_types(&log_values, &mults, 0, n, 0.0, BigUint::one(), &mut out);
    SchmidtSpectrum::from_log_classes(out)
}

/// Depth-first over the count of class `j`, carrying the running log-value
/// and the running multiplicity `prod_{i<j} C(rem_i, k_i) m_i^{k_i}`.
fn enumerate_types(
    log_values: &[f64],
    mults: &[&BigUint],
    j: usize,
    remaining: u32,
    log_value: f64,
    mult: BigUint,
    out: &mut Vec<(f64, BigUint)>,
) {
    if j + 1 == log_values.len() {
        let m = mult * mults[j].pow(remaining);
        out.push((log_value + remaining as f64 * log_values[j], m));
        return;
    }
    // binom = C(remaining, k), power = m_j^k
    let mut binom = BigUint::one();
    let mut power = BigUint::one();
    for k in 0..=remaining {
        enumerate_types(
            log_values,
            mults,
            j + 1,
            remaining - k,
            log_value + k as f64 * log_values[j],
            &mult * &binom * &power,
            out,
        );
        if k < remaining {
            binom = binom * (remaining - k) / (k + 1);
            power *= mults[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::spectra::{spread, tensor_product};
    use alloc::string::ToString;
    use num_traits::ToPrimitive;

    fn spec(values: &[(f64, u64)]) -> SchmidtSpectrum {
        SchmidtSpectrum::from_classes(values.iter().copied()).unwrap()
    }

    #[test]
    fn square_matches_product() {
        let p = spec(&[(0.75, 1), (0.25, 1)]);
        let sq = tensor_power(&p, 2).unwrap();
        let prod = tensor_product(&p, &p);
        assert_eq!(sq.num_classes(), 3);
        for (a, b) in sq.classes().iter().zip(prod.classes()) {
            assert!((a.value() - b.value()).abs() < 1e-15);
            assert_eq!(a.multiplicity(), b.multiplicity());
        }
    }

    #[test]
    fn flat_stays_flat() {
        let s = tensor_power(&spec(&[(0.5, 2)]), 10).unwrap();
        assert_eq!(s.num_classes(), 1);
        assert_eq!(s.classes()[0].multiplicity().to_u64(), Some(1024));
        assert_eq!(s.classes()[0].log2_value(), -10.0);
        assert_eq!(spread(&s), 0.0);
    }

    #[test]
    fn binomial_normalization() {
        let s = tensor_power(&spec(&[(0.9, 1), (0.1, 1)]), 100).unwrap();
        assert_eq!(s.num_classes(), 101);
        assert!((s.total_weight() - 1.0).abs() < 1e-9);
        // Middle multiplicity is C(100, 50).
        let c50 = s.classes()[50].multiplicity();
        assert_eq!(c50.to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn large_n_in_log_domain() {
        let s = tensor_power(&spec(&[(0.9, 1), (0.1, 1)]), 4096).unwrap();
        assert_eq!(s.num_classes(), 4097);
        assert!((s.total_weight() - 1.0).abs() < 1e-9);
        assert!((s.log2_rank() - 4096.0).abs() < 1e-9);
    }

    #[test]
    fn three_classes_with_coincident_values() {
        // {1/2, 1/4, 1/8} with mult 1, 1, 2 sums to 1; at n = 2 the types
        // (1,0,1) and (0,2,0) share the value 1/16.
        let base = spec(&[(0.5, 1), (0.25, 1), (0.125, 2)]);
        let sq = tensor_power(&base, 2).unwrap();
        let prod = tensor_product(&base, &base);
        assert_eq!(sq, prod);
        assert!((sq.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn additivity_of_spread_on_powers() {
        let p = spec(&[(0.6, 1), (0.3, 1), (0.1, 1)]);
        for n in 1..6u32 {
            let s = tensor_power(&p, n).unwrap();
            assert!((spread(&s) - n as f64 * spread(&p)).abs() < 1e-10);
        }
    }

    #[test]
    fn caps_and_domain() {
        let base = spec(&[(0.4, 1), (0.3, 1), (0.2, 1), (0.1, 1)]);
        assert!(matches!(tensor_power_capped(&base, 100, 1000), Err(Error::Size(_))));
        assert!(matches!(tensor_power(&base, 0), Err(Error::Domain(_))));
    }
}
