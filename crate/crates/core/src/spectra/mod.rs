//! Schmidt spectra and the entropy and spread functionals defined on them.
//!
//! A spectrum is stored as classes of equal eigenvalues. Each class keeps
//! `log2` of its eigenvalue and an exact integer multiplicity, so spectra of
//! `psi^{(x)n}` with `n` in the thousands (eigenvalues far below the smallest
//! `f64`, multiplicities far above `u64`) are represented without loss of
//! meaning. Every functional is evaluated in log-domain.

mod power;
mod smoothing;

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{err, Error, Result};
use crate::linalg::{eigh, CMatrix};

pub use power::{tensor_power, tensor_power_capped, DEFAULT_CLASS_CAP};
pub use smoothing::{smoothed_spread, smoothed_spread_bruteforce, BRUTEFORCE_MAX_EIGENVALUES};

/// Tolerance on `sum(value * mult) == 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as zero when a spectrum is read
/// off an explicit state.
pub const DEFAULT_ZERO_CUTOFF: f64 = 1e-12;
/// Two classes whose `log2` values differ by less than this (relative to
/// `max(1, |log2 value|)`) are merged.
const MERGE_TOL: f64 = 1e-12;

/// `log2` of an arbitrary-size positive integer.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_u64().map(|v| (v as f64).log2()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// `log2(2^a + 2^b)`.
pub(crate) fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumClass {
    log_value: f64,
    mult: BigUint,
    log_mult: f64,
}

impl SpectrumClass {
    fn new(log_value: f64, mult: BigUint) -> Self {
        let log_mult = log2_biguint(&mult);
        Self { log_value, mult, log_mult }
    }

    /// The eigenvalue. Underflows to zero for classes of very long tensor
    /// powers; use [`Self::log2_value`] there.
    pub fn value(&self) -> f64 {
        self.log_value.exp2()
    }

    pub fn log2_value(&self) -> f64 {
        self.log_value
    }

    pub fn multiplicity(&self) -> &BigUint {
        &self.mult
    }

    pub fn log2_multiplicity(&self) -> f64 {
        self.log_mult
    }

    /// Total probability carried by the class, `value * mult`.
    pub fn weight(&self) -> f64 {
        (self.log_value + self.log_mult).exp2()
    }
}

/// Eigenvalues of a reduced density matrix, grouped into classes of equal
/// value and sorted by value, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    classes: Vec<SpectrumClass>,
}

impl SchmidtSpectrum {
    /// Build from `(value, multiplicity)` pairs. Equal values are merged.
    pub fn from_classes<I>(classes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, u64)>,
    {
        let mut raw = Vec::new();
        for (value, mult) in classes {
            if !(value > 0.0 && value <= 1.0 + NORMALIZATION_TOL) {
                return Err(err!(Validity, "spectrum value {value} is outside (0, 1]"));
            }
            if mult == 0 {
                return Err(err!(Validity, "spectrum multiplicity must be positive"));
            }
            raw.push((value.min(1.0).log2(), BigUint::from(mult)));
        }
        Self::from_log_classes(raw)
    }

    /// Build from individual eigenvalues (each with multiplicity one).
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_classes(values.iter().map(|&v| (v, 1)))
    }

    /// Build from `(log2 value, multiplicity)` pairs; merges, sorts and checks
    /// normalization.
    pub fn from_log_classes(raw: Vec<(f64, BigUint)>) -> Result<Self> {
        let spec = Self::merge_unchecked(raw)?;
        let total = spec.total_weight();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(spec)
    }

    fn merge_unchecked(mut raw: Vec<(f64, BigUint)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(err!(Validity, "a spectrum needs at least one class"));
        }
        if raw.iter().any(|(lv, m)| !lv.is_finite() || m.is_zero()) {
            return Err(err!(Validity, "spectrum classes need a finite positive value and a positive multiplicity"));
        }
        raw.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        let mut classes: Vec<SpectrumClass> = Vec::with_capacity(raw.len());
        let mut iter = raw.into_iter();
        let (mut cur_lv, mut cur_m) = iter.next().expect("non-empty");
        for (lv, m) in iter {
            if (cur_lv - lv).abs() <= MERGE_TOL * cur_lv.abs().max(1.0) {
                cur_m += m;
            } else {
                classes.push(SpectrumClass::new(cur_lv.min(0.0), cur_m));
                cur_lv = lv;
                cur_m = m;
            }
        }
        classes.push(SpectrumClass::new(cur_lv.min(0.0), cur_m));
        Ok(Self { classes })
    }

    /// `2^m` equal eigenvalues: `m` ebits.
    pub fn flat_power_of_two(m: u32) -> Self {
        Self { classes: alloc::vec![SpectrumClass::new(-(m as f64), BigUint::one() << m)] }
    }

    /// The spectrum of a product state.
    pub fn product() -> Self {
        Self::flat_power_of_two(0)
    }

    pub fn classes(&self) -> &[SpectrumClass] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Schmidt rank: sum of multiplicities.
    pub fn rank(&self) -> BigUint {
        self.classes.iter().map(|c| &c.mult).sum()
    }

    pub fn log2_rank(&self) -> f64 {
        log2_biguint(&self.rank())
    }

    /// `log2` of the largest eigenvalue.
    pub fn log2_max(&self) -> f64 {
        self.classes[0].log_value
    }

    pub fn total_weight(&self) -> f64 {
        self.classes.iter().map(SpectrumClass::weight).sum()
    }

    /// Every eigenvalue listed with repetition, largest first. `None` if the
    /// rank exceeds `limit`.
    pub fn expand(&self, limit: usize) -> Option<Vec<f64>> {
        let rank = self.rank().to_usize()?;
        if rank > limit {
            return None;
        }
        let mut out = Vec::with_capacity(rank);
        for c in &self.classes {
            let m = c.mult.to_usize()?;
            out.extend(core::iter::repeat_n(c.value(), m));
        }
        Some(out)
    }
}

/// Amplitude matrix of a pure state on `A (x) B`; entry `(i, j)` multiplies
/// `|i>_A |j>_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    amplitudes: CMatrix,
}

impl BipartiteState {
    pub fn new(amplitudes: CMatrix) -> Result<Self> {
        if amplitudes.rows() == 0 || amplitudes.cols() == 0 {
            return Err(err!(Shape, "amplitude matrix must be non-empty"));
        }
        let n = amplitudes.frobenius_norm_sqr();
        if (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization(n));
        }
        Ok(Self { amplitudes })
    }

    /// `sum_i sqrt(lambda_i) |i>|i>` for the given eigenvalues.
    pub fn schmidt_form(values: &[f64]) -> Result<Self> {
        let d = values.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v.max(0.0).sqrt(), 0.0);
        }
        Self::new(m)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.amplitudes.rows(), self.amplitudes.cols())
    }

    pub fn amplitudes(&self) -> &CMatrix {
        &self.amplitudes
    }

    /// Amplitudes flattened with the `B` index fastest.
    pub fn to_vector(&self) -> Vec<Complex64> {
        self.amplitudes.as_slice().to_vec()
    }
}

/// Schmidt spectrum with the default zero cutoff.
pub fn schmidt_spectrum_of(state: &BipartiteState) -> Result<SchmidtSpectrum> {
    schmidt_spectrum_with_cutoff(state, DEFAULT_ZERO_CUTOFF)
}

/// Eigenvalues of the smaller reduced density matrix (the squared singular
/// values of the amplitude matrix), dropping those at or below `cutoff`.
pub fn schmidt_spectrum_with_cutoff(state: &BipartiteState, cutoff: f64) -> Result<SchmidtSpectrum> {
    let m = state.amplitudes();
    let gram = if m.rows() <= m.cols() { m.matmul(&m.adjoint()) } else { m.adjoint().matmul(m) };
    let values: Vec<f64> = eigh(&gram).values.into_iter().filter(|&v| v > cutoff).collect();
    if values.is_empty() {
        return Err(Error::Normalization(0.0));
    }
    let raw = values.iter().map(|&v| (v.min(1.0).log2(), BigUint::one())).collect();
    SchmidtSpectrum::from_log_classes(raw)
}

/// Renyi order. `Finite(a)` requires `a >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    fn key(self) -> f64 {
        match self {
            Order::Finite(a) => a,
            Order::Infinity => f64::INFINITY,
        }
    }
}

impl From<f64> for Order {
    fn from(a: f64) -> Self {
        if a == f64::INFINITY {
            Order::Infinity
        } else {
            Order::Finite(a)
        }
    }
}

/// Renyi entropy of entanglement `E_alpha` in bits. `alpha = 0` gives
/// `log2 rank`, `alpha = 1` the von Neumann entropy and `alpha = inf`
/// `-log2 lambda_max`.
///
/// Note the `+log2 rank` convention at `alpha = 0`: it is the continuous limit
/// of the Renyi formula and the one the spread uses.
pub fn renyi_entropy(spec: &SchmidtSpectrum, alpha: impl Into<Order>) -> Result<f64> {
    match alpha.into() {
        Order::Infinity => Ok(-spec.log2_max()),
        Order::Finite(a) if !(a >= 0.0) => Err(err!(Domain, "Renyi order must be non-negative, got {a}")),
        Order::Finite(0.0) => Ok(spec.log2_rank()),
        Order::Finite(1.0) => Ok(entanglement_moments(spec).0),
        Order::Finite(a) => {
            let log_tr = spec
                .classes
                .iter()
                .map(|c| c.log_mult + a * c.log_value)
                .fold(f64::NEG_INFINITY, log2_add);
            Ok(log_tr / (1.0 - a))
        }
    }
}

/// Entropy of entanglement `E` and the standard deviation `sigma` of
/// `-log2 lambda` under the Schmidt distribution, both in bits.
pub fn entanglement_moments(spec: &SchmidtSpectrum) -> (f64, f64) {
    let mut e = 0.0;
    let mut second = 0.0;
    for c in &spec.classes {
        let w = c.weight();
        e -= w * c.log_value;
        second += w * c.log_value * c.log_value;
    }
    let e = e.max(0.0);
    (e, (second - e * e).max(0.0).sqrt())
}

/// `log2 rank + log2 lambda_max`; zero exactly when all non-zero Schmidt
/// coefficients are equal.
pub fn spread(spec: &SchmidtSpectrum) -> f64 {
    if spec.classes.len() == 1 {
        return 0.0;
    }
    (spec.log2_rank() + spec.log2_max()).max(0.0)
}

/// `E_alpha - E_beta` for `alpha < beta`.
pub fn generalized_spread(spec: &SchmidtSpectrum, alpha: impl Into<Order>, beta: impl Into<Order>) -> Result<f64> {
    let (alpha, beta) = (alpha.into(), beta.into());
    if !(alpha.key() < beta.key()) {
        return Err(err!(Domain, "generalized spread needs alpha < beta, got {} and {}", alpha.key(), beta.key()));
    }
    if alpha == Order::Finite(0.0) && beta == Order::Infinity {
        renyi_entropy(spec, alpha)?;
        return Ok(spread(spec));
    }
    Ok(renyi_entropy(spec, alpha)? - renyi_entropy(spec, beta)?)
}

/// Spectrum of `psi_1 (x) psi_2`.
pub fn tensor_product(a: &SchmidtSpectrum, b: &SchmidtSpectrum) -> SchmidtSpectrum {
    let raw = a
        .classes
        .iter()
        .flat_map(|x| b.classes.iter().map(move |y| (x.log_value + y.log_value, &x.mult * &y.mult)))
        .collect();
    SchmidtSpectrum::merge_unchecked(raw).expect("product of valid spectra is valid")
}
