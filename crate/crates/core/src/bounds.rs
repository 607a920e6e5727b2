//! Communication lower bounds from entanglement spread, and the spread
//! capacity intervals of the standard resources.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;

use crate::error::{err, Error, Result};
use crate::protocols::{Ledger, PayloadReport};
use crate::spectra::{entanglement_moments, smoothed_spread, spread, tensor_power, SchmidtSpectrum};
use crate::states::{local_conversion_fidelity, spectrum_of_named, NamedState};

/// Slack when comparing a ledger against a bound.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Lower bound on `cbits + 2 qubits`, in bits. May be negative.
    pub bound_value: f64,
    /// `(4 eps)^(1/8)`.
    pub delta: f64,
    pub eps: f64,
    /// `Delta_delta` of the target.
    pub target_spread: f64,
    /// `Delta` of the source.
    pub source_spread: f64,
}

/// Communication needed to turn `source` into `target` up to error `eps`:
/// `Delta_delta(target) - Delta(source) + 2 log2(1 - delta)` with
/// `delta = (4 eps)^(1/8)`.
pub fn thm1_lower_bound(source: &SchmidtSpectrum, target: &SchmidtSpectrum, eps: f64) -> Result<BoundReport> {
    if !(0.0..0.25).contains(&eps) {
        return Err(err!(Domain, "eps must lie in [0, 1/4) so that delta < 1, got {eps}"));
    }
    let delta = (4.0 * eps).powf(0.125);
    let target_spread = smoothed_spread(target, delta)?;
    let source_spread = spread(source);
    Ok(BoundReport {
        bound_value: target_spread - source_spread + 2.0 * (1.0 - delta).log2(),
        delta,
        eps,
        target_spread,
        source_spread,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilutionPoint {
    pub n: u32,
    pub sqrt_n: f64,
    /// Number of ebits supplied, `ceil(n E)`.
    pub ebits: u32,
    pub bound: f64,
}

/// Lower bound on the communication of diluting `ceil(n E)` ebits into
/// `n` copies of `sqrt(1-p)|00> + sqrt(p)|11>`, for each `n`.
pub fn dilution_cost_curve(p: f64, eps: f64, ns: &[u32]) -> Result<Vec<DilutionPoint>> {
    let base = spectrum_of_named(NamedState::Partial(p))?;
    let (e, _) = entanglement_moments(&base);
    ns.iter()
        .map(|&n| {
            let target = tensor_power(&base, n)?;
            let ebits = (n as f64 * e).ceil() as u32;
            let source = SchmidtSpectrum::flat_power_of_two(ebits);
            let report = thm1_lower_bound(&source, &target, eps)?;
            Ok(DilutionPoint { n, sqrt_n: (n as f64).sqrt(), ebits, bound: report.bound_value })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadInterval {
    pub min: f64,
    pub max: f64,
}

impl SpreadInterval {
    fn new(min: f64, max: f64) -> Self {
        debug_assert!(min <= max);
        Self { min, max }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resource {
    Qubit,
    Cbit,
    Cobit,
    CoCobit,
    Ebit,
    /// `n` copies of the partial state with parameter `p`, error `eps`.
    Partial { p: f64, n: u32, eps: f64 },
    /// `n`-qubit embezzling state used with error `eps`.
    Embezzler { n: u32, eps: f64 },
    /// One use of a gate with entangling capacities `E(U)` and `E(U^dagger)`.
    Unitary { e: f64, e_dagger: f64 },
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Qubit => f.write_str("qubit"),
            Resource::Cbit => f.write_str("cbit"),
            Resource::Cobit => f.write_str("cobit"),
            Resource::CoCobit => f.write_str("co-cobit"),
            Resource::Ebit => f.write_str("ebit"),
            Resource::Partial { p, n, eps } => write!(f, "partial:{p},{n},{eps}"),
            Resource::Embezzler { n, eps } => write!(f, "embezzler:{n},{eps}"),
            Resource::Unitary { e, e_dagger } => write!(f, "unitary:{e},{e_dagger}"),
        }
    }
}

impl FromStr for Resource {
    type Err = Error;

    /// `qubit`, `cbit`, `cobit`, `co-cobit`, `ebit`, `partial:p,n,eps`,
    /// `embezzler:n,eps` or `unitary:E,E_dagger`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.split(',').map(str::trim).collect::<Vec<_>>()),
            None => (s.trim(), Vec::new()),
        };
        let bad = || err!(Validity, "cannot parse resource `{s}`");
        let num = |i: usize| -> Result<f64> { args.get(i).and_then(|a| a.parse().ok()).ok_or_else(bad) };
        let int = |i: usize| -> Result<u32> { args.get(i).and_then(|a| a.parse().ok()).ok_or_else(bad) };
        let arity = |k: usize| if args.len() == k { Ok(()) } else { Err(bad()) };
        Ok(match kind {
            "qubit" => arity(0).map(|_| Resource::Qubit)?,
            "cbit" => arity(0).map(|_| Resource::Cbit)?,
            "cobit" => arity(0).map(|_| Resource::Cobit)?,
            "co-cobit" => arity(0).map(|_| Resource::CoCobit)?,
            "ebit" => arity(0).map(|_| Resource::Ebit)?,
            "partial" => {
                arity(3)?;
                Resource::Partial { p: num(0)?, n: int(1)?, eps: num(2)? }
            }
            "embezzler" => {
                arity(2)?;
                Resource::Embezzler { n: int(0)?, eps: num(1)? }
            }
            "unitary" => {
                arity(2)?;
                Resource::Unitary { e: num(0)?, e_dagger: num(1)? }
            }
            _ => return Err(Error::Lookup(s.to_string())),
        })
    }
}

/// Range of net ebits a resource can create (positive) or destroy
/// (negative). For the partial state the width uses the normal quantile at
/// `1 - eps` as the constant in front of `sigma sqrt(n)`; this is a
/// central-limit heuristic, the exact quantity being the smoothed spread of
/// the tensor power.
pub fn spread_capacity_interval(resource: &Resource) -> Result<SpreadInterval> {
    Ok(match *resource {
        Resource::Qubit => SpreadInterval::new(-1.0, 1.0),
        Resource::Cbit => SpreadInterval::new(-1.0, 0.0),
        Resource::Cobit => SpreadInterval::new(0.0, 1.0),
        Resource::CoCobit => SpreadInterval::new(-1.0, 0.0),
        Resource::Ebit => SpreadInterval::new(1.0, 1.0),
        Resource::Partial { p, n, eps } => {
            if !(eps > 0.0 && eps <= 0.5) {
                return Err(err!(Domain, "eps must lie in (0, 1/2], got {eps}"));
            }
            let (e, sigma) = entanglement_moments(&spectrum_of_named(NamedState::Partial(p))?);
            let n = n as f64;
            let half = normal_quantile(1.0 - eps)? * sigma * n.sqrt();
            SpreadInterval::new(n * e - half, n * e + half)
        }
        Resource::Embezzler { n, eps } => {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(err!(Domain, "eps must be non-negative, got {eps}"));
            }
            SpreadInterval::new(-(n as f64) * eps, n as f64 * eps)
        }
        Resource::Unitary { e, e_dagger } => {
            if !(e >= 0.0 && e_dagger >= 0.0) {
                return Err(err!(Domain, "capacities must be non-negative, got ({e}, {e_dagger})"));
            }
            SpreadInterval::new(-e_dagger, e)
        }
    })
}

/// The fixed rows of the capacity table followed by sample parameterized
/// rows.
pub fn capacity_table() -> Vec<(Resource, SpreadInterval)> {
    [
        Resource::Qubit,
        Resource::Cbit,
        Resource::Cobit,
        Resource::CoCobit,
        Resource::Ebit,
        Resource::Partial { p: 0.1, n: 1000, eps: 0.01 },
        Resource::Embezzler { n: 16, eps: 0.01 },
        Resource::Unitary { e: 1.0, e_dagger: 1.0 },
    ]
    .into_iter()
    .map(|r| (r, spread_capacity_interval(&r).expect("valid table row")))
    .collect()
}

/// Lower bound on `Q1 + Q2` for simulating a gate: `(E(U) + E(U^dagger)) / 2`.
pub fn thm2_bound(e_u: f64, e_udag: f64) -> Result<f64> {
    if !(e_u >= 0.0 && e_udag >= 0.0) || !e_u.is_finite() || !e_udag.is_finite() {
        return Err(err!(Domain, "capacities must be finite and non-negative, got ({e_u}, {e_udag})"));
    }
    Ok(0.5 * (e_u + e_udag))
}

/// Standard normal quantile: rational approximation (Acklam) followed by one
/// Halley step against `erfc`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(err!(Domain, "quantile level must lie in (0, 1), got {p}"));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02, 6.680131188771972e+01, -1.328068155288572e+01];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * core::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x -= u / (1.0 + 0.5 * x * u);
    Ok(x)
}

/// A protocol run checked against [`thm1_lower_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyCheck {
    pub communication: u64,
    /// Overlap between the realized payload and the target, up to local
    /// unitaries.
    pub fidelity: f64,
    pub report: BoundReport,
    pub holds: bool,
}

/// Compares the ledger of a finished protocol against the bound for turning
/// `source` into `target`, with `eps = 1 - F` and `F` the overlap achieved
/// by the payload.
pub fn check_protocol(source: &SchmidtSpectrum, target: &SchmidtSpectrum, payload: &PayloadReport, ledger: &Ledger) -> Result<ConsistencyCheck> {
    let fidelity = payload.purity_fidelity * local_conversion_fidelity(&payload.spectrum, target);
    let eps = (1.0 - fidelity).max(0.0);
    let report = thm1_lower_bound(source, target, eps)?;
    let communication = ledger.communication();
    let holds = communication as f64 >= report.bound_value - CONSISTENCY_TOL;
    Ok(ConsistencyCheck { communication, fidelity, report, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(values: &[(f64, u64)]) -> SchmidtSpectrum {
        SchmidtSpectrum::from_classes(values.iter().copied()).unwrap()
    }

    #[test]
    fn thm1_examples() {
        let target = spec(&[(0.75, 1), (0.25, 1)]);
        let r = thm1_lower_bound(&SchmidtSpectrum::flat_power_of_two(3), &target, 0.0).unwrap();
        assert!((r.bound_value - 0.58496).abs() < 1e-5);
        assert_eq!(r.delta, 0.0);
        assert_eq!(thm1_lower_bound(&target, &target, 0.0).unwrap().bound_value, 0.0);
        let r = thm1_lower_bound(&target, &target, 1e-8).unwrap();
        assert!((r.delta - 0.118_920_711_500_272_1).abs() < 1e-12);
        // delta is below 0.25, so only the empty drop is feasible.
        assert!((r.target_spread - spread(&target)).abs() < 1e-15);
        assert!(matches!(thm1_lower_bound(&target, &target, 0.25), Err(Error::Domain(_))));
        assert!(matches!(thm1_lower_bound(&target, &target, -1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn flat_source_reduces_to_spread() {
        for t in [spec(&[(0.6, 1), (0.3, 1), (0.1, 1)]), spec(&[(0.25, 2), (0.125, 4)])] {
            let r = thm1_lower_bound(&SchmidtSpectrum::flat_power_of_two(5), &t, 0.0).unwrap();
            assert_eq!(r.bound_value, spread(&t));
        }
    }

    #[test]
    fn dilution_curve_flat_and_single_copy() {
        for point in dilution_cost_curve(0.5, 0.01, &[1, 16, 64]).unwrap() {
            assert!(point.bound <= 0.0);
        }
        let one = dilution_cost_curve(0.1, 0.01, &[1]).unwrap();
        let direct = thm1_lower_bound(
            &SchmidtSpectrum::flat_power_of_two(1),
            &spectrum_of_named(NamedState::Partial(0.1)).unwrap(),
            0.01,
        )
        .unwrap();
        assert_eq!(one[0].bound, direct.bound_value);
        assert_eq!(one[0].ebits, 1);
    }

    #[test]
    fn dilution_curve_grows() {
        let pts = dilution_cost_curve(0.1, 0.01, &[64, 128, 256, 512]).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].bound >= w[0].bound);
        }
    }

    #[test]
    fn table_rows() {
        assert_eq!(spread_capacity_interval(&"cbit".parse().unwrap()).unwrap(), SpreadInterval { min: -1.0, max: 0.0 });
        assert_eq!(spread_capacity_interval(&"ebit".parse().unwrap()).unwrap(), SpreadInterval { min: 1.0, max: 1.0 });
        assert_eq!(spread_capacity_interval(&"qubit".parse().unwrap()).unwrap(), SpreadInterval { min: -1.0, max: 1.0 });
        assert_eq!(spread_capacity_interval(&"cobit".parse().unwrap()).unwrap(), SpreadInterval { min: 0.0, max: 1.0 });
        assert_eq!(spread_capacity_interval(&"co-cobit".parse().unwrap()).unwrap(), SpreadInterval { min: -1.0, max: 0.0 });
        let u = spread_capacity_interval(&"unitary:1,1".parse().unwrap()).unwrap();
        assert_eq!(u, SpreadInterval { min: -1.0, max: 1.0 });
        let z = spread_capacity_interval(&"embezzler:16,0.01".parse().unwrap()).unwrap();
        assert!((z.max - 0.16).abs() < 1e-15 && (z.min + 0.16).abs() < 1e-15);
        assert_eq!(capacity_table().len(), 8);
    }

    #[test]
    fn partial_interval_is_centered() {
        for (p, n, eps) in [(0.1, 1000, 0.01), (0.3, 7, 0.2), (0.45, 123, 0.5)] {
            let i = spread_capacity_interval(&Resource::Partial { p, n, eps }).unwrap();
            let (e, _) = entanglement_moments(&spectrum_of_named(NamedState::Partial(p)).unwrap());
            assert!((i.midpoint() - n as f64 * e).abs() < 1e-9);
            assert!(i.min <= i.max);
        }
        let half = spread_capacity_interval(&Resource::Partial { p: 0.2, n: 10, eps: 0.5 }).unwrap();
        assert!((half.max - half.min).abs() < 1e-12);
        assert!(matches!(spread_capacity_interval(&Resource::Partial { p: 0.2, n: 10, eps: 0.0 }), Err(Error::Domain(_))));
    }

    #[test]
    fn resource_parsing_errors() {
        assert!(matches!("bogus".parse::<Resource>(), Err(Error::Lookup(_))));
        assert!(matches!("partial:0.1,10".parse::<Resource>(), Err(Error::Validity(_))));
        assert!(matches!("cbit:1".parse::<Resource>(), Err(Error::Validity(_))));
        let r: Resource = "partial:0.1,10,0.05".parse().unwrap();
        assert_eq!(r.to_string().parse::<Resource>().unwrap(), r);
    }

    #[test]
    fn thm2_examples() {
        assert_eq!(thm2_bound(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(thm2_bound(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(thm2_bound(2.0, 0.0).unwrap(), 1.0);
        assert!(matches!(thm2_bound(-0.1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn normal_quantile_values() {
        // Reference values from an independent inverse-CDF implementation.
        let cases = [
            (0.99, 2.326_347_874_040_840_8),
            (0.975, 1.959_963_984_540_053_6),
            (0.5, 0.0),
            (0.01, -2.326_347_874_040_840_8),
            (0.999_999, 4.753_424_308_817_089),
            (1e-10, -6.361_340_902_404_056),
            (0.9, 1.281_551_565_544_600_8),
        ];
        for (p, z) in cases {
            let got = normal_quantile(p).unwrap();
            assert!((got - z).abs() < 1e-9 * (1.0 + z.abs()), "p = {p}: {got} vs {z}");
        }
        assert!(normal_quantile(1.0).is_err());
    }
}
