//! Named bipartite states and fidelities between Schmidt spectra.
//!
//! Fidelity here is the amplitude overlap `|<psi|phi>|` maximized over local
//! unitaries; the conversion error is `1 - F`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;
use num_traits::One;

use crate::error::{err, Error, Result};
use crate::spectra::{log2_biguint, tensor_product, SchmidtSpectrum};

/// Largest embezzler exponent accepted (`2^24` Schmidt coefficients).
pub const MAX_EMBEZZLER_QUBITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    /// `sqrt(1-p)|00> + sqrt(p)|11>`, `p` in `(0, 1)`.
    Partial(f64),
    /// `m` maximally entangled qubit pairs.
    Ebits(u32),
    /// `sum_{i=1}^{2^n} i^{-1/2} |ii>`, normalized.
    Embezzler(u32),
    Product,
}

impl NamedState {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NamedState::Partial(p) if !(p > 0.0 && p < 1.0) => Err(err!(Domain, "partial state needs p in (0, 1), got {p}")),
            NamedState::Embezzler(0) => Err(err!(Domain, "embezzler needs n >= 1")),
            NamedState::Embezzler(n) if n > MAX_EMBEZZLER_QUBITS => {
                Err(err!(Size, "embezzler(n) supported up to n = {MAX_EMBEZZLER_QUBITS}, got {n}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Partial(p) => write!(f, "partial:{p}"),
            NamedState::Ebits(m) => write!(f, "ebits:{m}"),
            NamedState::Embezzler(n) => write!(f, "embezzler:{n}"),
            NamedState::Product => f.write_str("product"),
        }
    }
}

impl FromStr for NamedState {
    type Err = Error;

    /// `partial:0.25`, `ebits:3`, `embezzler:16` or `product`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let bad = || err!(Validity, "cannot parse named state `{s}`");
        let state = match (kind, param) {
            ("product", None) => NamedState::Product,
            ("partial", Some(p)) => NamedState::Partial(p.parse().map_err(|_| bad())?),
            ("ebits", Some(m)) => NamedState::Ebits(m.parse().map_err(|_| bad())?),
            ("embezzler", Some(n)) => NamedState::Embezzler(n.parse().map_err(|_| bad())?),
            _ => return Err(Error::Lookup(s.to_string())),
        };
        state.validate()?;
        Ok(state)
    }
}

/// Neumaier-compensated harmonic number `H_N`.
fn harmonic(count: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in (1..=count).rev() {
        let x = 1.0 / i as f64;
        let t = sum + x;
        if sum.abs() >= x {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn spectrum_of_named(state: NamedState) -> Result<SchmidtSpectrum> {
    state.validate()?;
    match state {
        NamedState::Partial(p) => SchmidtSpectrum::from_values(&[1.0 - p, p]),
        NamedState::Ebits(m) => Ok(SchmidtSpectrum::flat_power_of_two(m)),
        NamedState::Product => Ok(SchmidtSpectrum::product()),
        NamedState::Embezzler(n) => {
            let count = 1u64 << n;
            let log_h = harmonic(count).log2();
            let raw = (1..=count).map(|i| (-(i as f64).log2() - log_h, BigUint::one())).collect();
            SchmidtSpectrum::from_log_classes(raw)
        }
    }
}

/// Best overlap reachable by local unitaries: `sum_i sqrt(p_i q_i)` over both
/// spectra sorted descending and zero-padded to a common length.
pub fn local_conversion_fidelity(source: &SchmidtSpectrum, target: &SchmidtSpectrum) -> f64 {
    let (a, b) = (source.classes(), target.classes());
    let (mut i, mut j) = (0, 0);
    let mut rem_a = a[0].multiplicity().clone();
    let mut rem_b = b[0].multiplicity().clone();
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let run = if rem_a <= rem_b { rem_a.clone() } else { rem_b.clone() };
        total += (log2_biguint(&run) + 0.5 * (a[i].log2_value() + b[j].log2_value())).exp2();
        rem_a -= &run;
        rem_b -= &run;
        if rem_a.bits() == 0 {
            i += 1;
            if i < a.len() {
                rem_a = a[i].multiplicity().clone();
            }
        }
        if rem_b.bits() == 0 {
            j += 1;
            if j < b.len() {
                rem_b = b[j].multiplicity().clone();
            }
        }
    }
    total.clamp(0.0, 1.0)
}

/// Fidelity of turning `phi_n` (padded with a product state) into
/// `phi_n (x) target` by local unitaries alone.
pub fn embezzle_fidelity(n: u32, target: &SchmidtSpectrum) -> Result<f64> {
    let emb = spectrum_of_named(NamedState::Embezzler(n))?;
    let goal = tensor_product(&emb, target);
    Ok(local_conversion_fidelity(&emb, &goal))
}

/// Spectrum values listed class by class, mostly for diagnostics.
pub fn class_values(spec: &SchmidtSpectrum) -> Vec<(f64, f64)> {
    spec.classes().iter().map(|c| (c.value(), c.log2_multiplicity())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn spec(values: &[(f64, u64)]) -> SchmidtSpectrum {
        SchmidtSpectrum::from_classes(values.iter().copied()).unwrap()
    }

    #[test]
    fn named_spectra() {
        let e = spectrum_of_named(NamedState::Ebits(3)).unwrap();
        assert_eq!(e.num_classes(), 1);
        assert_eq!(e.classes()[0].value(), 0.125);
        assert_eq!(e.classes()[0].multiplicity().to_u64(), Some(8));

        let z = spectrum_of_named(NamedState::Embezzler(1)).unwrap();
        assert!((z.classes()[0].value() - 2.0 / 3.0).abs() < 1e-15);
        assert!((z.classes()[1].value() - 1.0 / 3.0).abs() < 1e-15);

        let p = spectrum_of_named(NamedState::Partial(0.25)).unwrap();
        assert!((p.classes()[0].value() - 0.75).abs() < 1e-15);
        assert!((p.classes()[1].value() - 0.25).abs() < 1e-15);

        assert_eq!(spectrum_of_named(NamedState::Product).unwrap(), SchmidtSpectrum::product());
    }

    #[test]
    fn embezzler_normalized_up_to_twenty() {
        for n in [1, 5, 10, 16, 20] {
            let z = spectrum_of_named(NamedState::Embezzler(n)).unwrap();
            assert!((z.total_weight() - 1.0).abs() < 1e-10, "n = {n}");
            assert_eq!(z.num_classes(), 1 << n);
        }
    }

    #[test]
    fn harmonic_matches_asymptotics() {
        // H_N = ln N + gamma + 1/(2N) - 1/(12 N^2) + ...
        let n = 1u64 << 20;
        let nf = n as f64;
        let approx = nf.ln() + 0.577_215_664_901_532_9 + 1.0 / (2.0 * nf) - 1.0 / (12.0 * nf * nf);
        assert!((harmonic(n) - approx).abs() < 1e-13);
    }

    #[test]
    fn parse_named() {
        assert_eq!("partial:0.25".parse::<NamedState>().unwrap(), NamedState::Partial(0.25));
        assert_eq!("ebits:3".parse::<NamedState>().unwrap(), NamedState::Ebits(3));
        assert_eq!("embezzler:16".parse::<NamedState>().unwrap(), NamedState::Embezzler(16));
        assert_eq!("product".parse::<NamedState>().unwrap(), NamedState::Product);
        assert!(matches!("partial:1.5".parse::<NamedState>(), Err(Error::Domain(_))));
        assert!(matches!("bell".parse::<NamedState>(), Err(Error::Lookup(_))));
        assert!(matches!("ebits:x".parse::<NamedState>(), Err(Error::Validity(_))));
        assert!(matches!("embezzler:30".parse::<NamedState>(), Err(Error::Size(_))));
    }

    #[test]
    fn conversion_fidelity_examples() {
        let p = spec(&[(0.75, 1), (0.25, 1)]);
        assert!((local_conversion_fidelity(&p, &p) - 1.0).abs() < 1e-15);
        let flat = spec(&[(0.5, 2)]);
        let f = local_conversion_fidelity(&SchmidtSpectrum::product(), &flat);
        assert!((f - 0.5f64.sqrt()).abs() < 1e-15);
        let z = spec(&[(2.0 / 3.0, 1), (1.0 / 3.0, 1)]);
        let f = local_conversion_fidelity(&z, &flat);
        assert!((f - ((1.0f64 / 3.0).sqrt() + (1.0f64 / 6.0).sqrt())).abs() < 1e-15);
        assert!((f - 0.98560).abs() < 1e-5);
    }

    #[test]
    fn conversion_fidelity_with_large_classes() {
        // 2^40 equal values against a single one: sqrt(2^-40).
        let big = SchmidtSpectrum::flat_power_of_two(40);
        let f = local_conversion_fidelity(&SchmidtSpectrum::product(), &big);
        assert!((f - (2f64).powi(-20)).abs() < 1e-18);
        assert_eq!(local_conversion_fidelity(&big, &big), 1.0);
    }

    #[test]
    fn embezzle_examples() {
        assert!((embezzle_fidelity(4, &SchmidtSpectrum::product()).unwrap() - 1.0).abs() < 1e-12);
        let f = embezzle_fidelity(1, &spec(&[(0.5, 2)])).unwrap();
        assert!((f - ((2.0f64 / 9.0).sqrt() + 1.0 / 3.0)).abs() < 1e-14);
        assert!((f - 0.80474).abs() < 1e-5);
        let f = embezzle_fidelity(16, &SchmidtSpectrum::flat_power_of_two(2)).unwrap();
        assert!(f >= 1.0 - 2.0 / 16.0, "fidelity {f}");
    }

    #[test]
    fn destroy_equals_create() {
        let emb = spectrum_of_named(NamedState::Embezzler(8)).unwrap();
        let goal = tensor_product(&emb, &SchmidtSpectrum::flat_power_of_two(1));
        assert_eq!(local_conversion_fidelity(&emb, &goal), local_conversion_fidelity(&goal, &emb));
    }
}
