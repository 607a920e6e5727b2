//! Channels in Kraus form, the entropic rates of their isometric extension
//! and the rate region for simulating them with classical communication and
//! entanglement.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{err, Error, Result};
use crate::linalg::{eigh, entropy_of_eigenvalues, von_neumann_entropy, CMatrix, Layout, ONE, ZERO};

/// Largest input dimension for grid sweeps.
pub const GRID_MAX_DIM: usize = 4;
const DENSITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    d_in: usize,
    d_out: usize,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(err!(Shape, "a channel needs at least one Kraus operator"));
        };
        let (d_out, d_in) = (first.rows(), first.cols());
        if d_in == 0 || d_out == 0 || kraus.iter().any(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(err!(Shape, "Kraus operators must share one non-empty shape"));
        }
        let mut sum = CMatrix::zeros(d_in, d_in);
        for k in &kraus {
            sum = sum.add(&k.adjoint().matmul(k));
        }
        let defect = sum.sub(&CMatrix::identity(d_in)).max_abs();
        if defect > super::UNITARITY_TOL {
            return Err(err!(Validity, "Kraus operators are not trace preserving (defect {defect:e})"));
        }
        Ok(Self { kraus, d_in, d_out })
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: alloc::vec![CMatrix::identity(d)], d_in: d, d_out: d }
    }

    /// `rho -> (1 - p/2) rho + (p/2) Z rho Z`; `p = 1` removes all coherence.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_unit(p)?;
        let z = CMatrix::diagonal(&[ONE, -ONE]);
        Self::new(alloc::vec![CMatrix::identity(2).scale(c((1.0 - p / 2.0).sqrt())), z.scale(c((p / 2.0).sqrt()))])
    }

    /// `rho -> (1 - p) rho + p I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_unit(p)?;
        let x = CMatrix::from_real(2, 2, &[0., 1., 1., 0.]).expect("2x2");
        let y = CMatrix::from_vec(2, 2, alloc::vec![ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO]).expect("2x2");
        let z = CMatrix::diagonal(&[ONE, -ONE]);
        let w = c((p / 4.0).sqrt());
        Self::new(alloc::vec![CMatrix::identity(2).scale(c((1.0 - 0.75 * p).sqrt())), x.scale(w), y.scale(w), z.scale(w)])
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_unit(gamma)?;
        let k0 = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]).expect("2x2");
        let k1 = CMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]).expect("2x2");
        Self::new(alloc::vec![k0, k1])
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.d_in
    }

    pub fn output_dim(&self) -> usize {
        self.d_out
    }

    pub fn environment_dim(&self) -> usize {
        self.kraus.len()
    }

    /// `V[(o, i), x] = K_i[o, x]`: output `B` slower, environment `E` faster.
    pub fn isometric_extension(&self) -> CMatrix {
        let r = self.kraus.len();
        let mut v = CMatrix::zeros(self.d_out * r, self.d_in);
        for (i, k) in self.kraus.iter().enumerate() {
            for o in 0..self.d_out {
                for x in 0..self.d_in {
                    v[(o * r + i, x)] = k[(o, x)];
                }
            }
        }
        v
    }
}

impl FromStr for QuantumChannel {
    type Err = Error;

    /// `identity`, `dephasing:p`, `depolarizing:p` or `amplitude-damping:g`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let value = || -> Result<f64> {
            arg.and_then(|a| a.parse().ok()).ok_or_else(|| err!(Validity, "cannot parse channel parameter in `{s}`"))
        };
        match kind {
            "identity" if arg.is_none() => Ok(Self::identity(2)),
            "dephasing" => Self::dephasing(value()?),
            "depolarizing" => Self::depolarizing(value()?),
            "amplitude-damping" => Self::amplitude_damping(value()?),
            _ => Err(Error::Lookup(s.to_string())),
        }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_unit(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(err!(Domain, "channel parameter must lie in [0, 1], got {p}"))
    }
}

fn check_density(rho: &CMatrix, d: usize) -> Result<()> {
    if rho.rows() != d || rho.cols() != d {
        return Err(err!(Validity, "density matrix must be {d}x{d}, got {}x{}", rho.rows(), rho.cols()));
    }
    let herm = rho.hermiticity_defect();
    if herm > DENSITY_TOL {
        return Err(err!(Validity, "density matrix is not Hermitian (defect {herm:e})"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(err!(Validity, "density matrix has trace {tr}"));
    }
    let min = eigh(rho).values.last().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL {
        return Err(err!(Validity, "density matrix has negative eigenvalue {min:e}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    /// `I(A;B) = S(A) + S(B) - S(E)` on the purified input sent through the channel.
    pub i_ab: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub s_e: f64,
}

/// Purifies `rho` as `sum_j sqrt(l_j) |j>_A |v_j>`, sends the second half
/// through the isometric extension and reads entropies off `A`, `B`, `E`.
pub fn channel_rates(ch: &QuantumChannel, rho: &CMatrix) -> Result<ChannelRates> {
    check_density(rho, ch.d_in)?;
    Ok(rates_unchecked(ch, rho))
}

fn rates_unchecked(ch: &QuantumChannel, rho: &CMatrix) -> ChannelRates {
    let (d, r) = (ch.d_in, ch.kraus.len());
    let eig = eigh(rho);
    let v = ch.isometric_extension();
    let width = ch.d_out * r;
    let mut joint = alloc::vec![ZERO; d * width];
    for (j, &l) in eig.values.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let amp = l.sqrt();
        let vj: Vec<Complex64> = (0..d).map(|x| eig.vectors[(x, j)]).collect();
        let out = v.apply(&vj);
        for (k, z) in out.into_iter().enumerate() {
            joint[j * width + k] = z * amp;
        }
    }
    let layout = Layout::new(&[d, ch.d_out, r]);
    let s_a = entropy_of_eigenvalues(&eig.values);
    let s_b = von_neumann_entropy(&layout.reduced(&[1], &joint));
    let s_e = von_neumann_entropy(&layout.reduced(&[2], &joint));
    ChannelRates { i_ab: s_a + s_b - s_e, s_a, s_b, s_e }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    MaxI,
    MaxSB,
    /// Minimize `S(B) + max(0, C1 - I(A;B))` at the given `C1`.
    MinRegionTerm { c1: f64 },
}

impl Objective {
    /// Value to be maximized.
    fn score(&self, r: &ChannelRates) -> f64 {
        match *self {
            Objective::MaxI => r.i_ab,
            Objective::MaxSB => r.s_b,
            Objective::MinRegionTerm { c1 } => -(r.s_b + (c1 - r.i_ab).max(0.0)),
        }
    }

    fn sign(&self) -> f64 {
        match self {
            Objective::MinRegionTerm { .. } => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Grid resolution; `None` skips the grid sweep.
    pub grid_steps: Option<usize>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { restarts: 8, iterations: 100, seed: 0, grid_steps: Some(16) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateOptimum {
    pub value: f64,
    pub rho: CMatrix,
}

/// Optimizes over input densities `rho = M M^dagger / tr`, by finite-difference
/// ascent on the entries of `M` from random starts, plus a grid sweep (the
/// Bloch ball for qubits, diagonal densities on a simplex grid for
/// dimension 3 and 4). The best point of both is kept.
pub fn optimize_rates(ch: &QuantumChannel, objective: Objective, settings: &OptimizerSettings) -> Result<RateOptimum> {
    let d = ch.d_in;
    if settings.grid_steps.is_some() && d > GRID_MAX_DIM {
        return Err(err!(Size, "grid sweep supports input dimension up to {GRID_MAX_DIM}, got {d}"));
    }
    if settings.grid_steps == Some(0) {
        return Err(err!(Domain, "grid needs at least one step"));
    }
    let score = |rho: &CMatrix| objective.score(&rates_unchecked(ch, rho));
    let mut best: Option<(f64, CMatrix)> = None;
    let mut consider = |rho: CMatrix| {
        let s = score(&rho);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, rho));
        }
    };

    if let Some(steps) = settings.grid_steps {
        if d == 2 {
            bloch_grid(steps, &mut consider);
        } else {
            simplex_grid(d, steps, &mut consider);
        }
    }

    let n = 2 * d * d;
    for r in 0..settings.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        rng.set_stream(r as u64);
        let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let f = |x: &[f64]| score(&density_from_params(x, d));
        let mut fx = f(&x);
        let mut step = 0.1;
        for _ in 0..settings.iterations {
            let h = 1e-6;
            let grad: Vec<f64> = (0..n)
                .map(|k| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    (f(&xp) - f(&xm)) / (2.0 * h)
                })
                .collect();
            let gn: f64 = grad.iter().map(|g| g * g).sum();
            if gn < 1e-18 {
                break;
            }
            let mut moved = false;
            while step > 1e-10 {
                let cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
                let fc = f(&cand);
                if fc > fx {
                    x = cand;
                    fx = fc;
                    moved = true;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        consider(density_from_params(&x, d));
    }

    let (s, rho) = best.ok_or_else(|| err!(Domain, "optimizer needs restarts or a grid"))?;
    Ok(RateOptimum { value: objective.sign() * s, rho })
}

fn density_from_params(x: &[f64], d: usize) -> CMatrix {
    let entries = (0..d * d).map(|k| Complex64::new(x[2 * k], x[2 * k + 1])).collect();
    let m = CMatrix::from_vec(d, d, entries).expect("d x d");
    let rho = m.matmul(&m.adjoint());
    let tr = rho.trace().re;
    if tr > 0.0 {
        rho.scale(c(1.0 / tr))
    } else {
        CMatrix::identity(d).scale(c(1.0 / d as f64))
    }
}

/// `(I + r n.sigma)/2` over `r` in `{0, 1/s, .., 1}`, polar angle in `s`
/// steps and azimuth in `2s` steps.
fn bloch_grid(steps: usize, visit: &mut impl FnMut(CMatrix)) {
    use core::f64::consts::PI;
    for ir in 0..=steps {
        let r = ir as f64 / steps as f64;
        for it in 0..=steps {
            let t = PI * it as f64 / steps as f64;
            let azimuths = if ir == 0 || it == 0 || it == steps { 1 } else { 2 * steps };
            for ip in 0..azimuths {
                let p = PI * ip as f64 / steps as f64;
                let (x, y, z) = (r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos());
                let rho = CMatrix::from_vec(
                    2,
                    2,
                    alloc::vec![c(0.5 * (1.0 + z)), Complex64::new(0.5 * x, -0.5 * y), Complex64::new(0.5 * x, 0.5 * y), c(0.5 * (1.0 - z))],
                )
                .expect("2x2");
                visit(rho);
            }
        }
    }
}

/// Diagonal densities with entries in multiples of `1/steps`.
fn simplex_grid(d: usize, steps: usize, visit: &mut impl FnMut(CMatrix)) {
    fn rec(d: usize, steps: usize, left: usize, acc: &mut Vec<usize>, visit: &mut impl FnMut(CMatrix)) {
        if acc.len() + 1 == d {
            acc.push(left);
            let diag: Vec<Complex64> = acc.iter().map(|&k| c(k as f64 / steps as f64)).collect();
            visit(CMatrix::diagonal(&diag));
            acc.pop();
            return;
        }
        for k in 0..=left {
            acc.push(k);
            rec(d, steps, left - k, acc, visit);
            acc.pop();
        }
    }
    rec(d, steps, steps, &mut Vec::new(), visit);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple {
    /// Forward classical bits.
    pub c1: f64,
    /// Backward classical bits.
    pub c2: f64,
    /// Ebits.
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrstReport {
    pub feasible: bool,
    /// `C1 - max I(A;B)`, `E - max S(B)` and
    /// `C2 - E + min [S(B) + max(0, C1 - I(A;B))]`.
    pub slacks: [f64; 3],
    pub max_i: f64,
    pub max_sb: f64,
    pub min_term: f64,
}

/// Checks a rate triple against the three rate inequalities for simulating
/// the channel's isometric extension; feasible iff every slack is at least
/// `-tolerance`.
pub fn qrst_region_check(ch: &QuantumChannel, rates: RateTriple, settings: &OptimizerSettings, tolerance: f64) -> Result<QrstReport> {
    let RateTriple { c1, c2, e } = rates;
    if !(c1.is_finite() && c2.is_finite() && e.is_finite()) {
        return Err(err!(Domain, "rates must be finite"));
    }
    let max_i = optimize_rates(ch, Objective::MaxI, settings)?.value;
    let max_sb = optimize_rates(ch, Objective::MaxSB, settings)?.value;
    let min_term = optimize_rates(ch, Objective::MinRegionTerm { c1 }, settings)?.value;
    let slacks = [c1 - max_i, e - max_sb, c2 - e + min_term];
    Ok(QrstReport { feasible: slacks.iter().all(|&s| s >= -tolerance), slacks, max_i, max_sb, min_term })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply_channel(ch: &QuantumChannel, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(ch.output_dim(), ch.output_dim());
        for k in ch.kraus() {
            out = out.add(&k.matmul(rho).matmul(&k.adjoint()));
        }
        out
    }

    /// `N^c(rho)_{ij} = tr(K_i rho K_j^dagger)`.
    fn complementary(ch: &QuantumChannel, rho: &CMatrix) -> CMatrix {
        let r = ch.environment_dim();
        let mut out = CMatrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                out[(i, j)] = ch.kraus()[i].matmul(rho).matmul(&ch.kraus()[j].adjoint()).trace();
            }
        }
        out
    }

    fn random_density(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let x: Vec<f64> = (0..2 * d * d).map(|_| StandardNormal.sample(rng)).collect();
        density_from_params(&x, d)
    }

    /// Kraus blocks of a random isometry `C^2 -> C^2 (x) C^r`.
    fn random_qubit_channel(r: usize, rng: &mut ChaCha8Rng) -> QuantumChannel {
        let rows = 2 * r;
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for _ in 0..2 {
            let mut v: Vec<Complex64> = (0..rows).map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
            for u in &cols {
                let p = crate::linalg::inner(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= b * p);
            }
            crate::linalg::normalize(&mut v);
            cols.push(v);
        }
        let kraus = (0..r)
            .map(|i| {
                let mut k = CMatrix::zeros(2, 2);
                for o in 0..2 {
                    for x in 0..2 {
                        k[(o, x)] = cols[x][o * r + i];
                    }
                }
                k
            })
            .collect();
        QuantumChannel::new(kraus).unwrap()
    }

    fn half() -> CMatrix {
        CMatrix::identity(2).scale(c(0.5))
    }

    #[test]
    fn rate_examples() {
        let r = channel_rates(&QuantumChannel::identity(2), &half()).unwrap();
        assert!((r.i_ab - 2.0).abs() < 1e-12 && (r.s_b - 1.0).abs() < 1e-12);
        let r = channel_rates(&QuantumChannel::dephasing(1.0).unwrap(), &half()).unwrap();
        assert!((r.i_ab - 1.0).abs() < 1e-12 && (r.s_b - 1.0).abs() < 1e-12);
        let mut pure = CMatrix::zeros(2, 2);
        pure[(0, 0)] = c(0.5);
        pure[(0, 1)] = c(0.5);
        pure[(1, 0)] = c(0.5);
        pure[(1, 1)] = c(0.5);
        let ch = QuantumChannel::amplitude_damping(0.3).unwrap();
        let r = channel_rates(&ch, &pure).unwrap();
        assert!(r.s_a.abs() < 1e-12);
        assert!((r.i_ab - (r.s_b - r.s_e)).abs() < 1e-12);
    }

    #[test]
    fn rates_match_direct_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ch in [
            QuantumChannel::dephasing(0.3).unwrap(),
            QuantumChannel::depolarizing(0.6).unwrap(),
            QuantumChannel::amplitude_damping(0.45).unwrap(),
            random_qubit_channel(3, &mut rng),
        ] {
            for _ in 0..5 {
                let rho = random_density(2, &mut rng);
                let r = channel_rates(&ch, &rho).unwrap();
                let s_b = von_neumann_entropy(&apply_channel(&ch, &rho));
                let s_e = von_neumann_entropy(&complementary(&ch, &rho));
                let s_a = von_neumann_entropy(&rho);
                assert!((r.s_b - s_b).abs() < 1e-10);
                assert!((r.i_ab - (s_a + s_b - s_e)).abs() < 1e-10);
                assert!(r.i_ab >= -1e-12 && r.i_ab <= 2.0 + 1e-12);
                assert!(r.s_b >= -1e-12 && r.s_b <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        let ch = QuantumChannel::identity(2);
        let not_unit = CMatrix::identity(2);
        assert!(matches!(channel_rates(&ch, &not_unit), Err(Error::Validity(_))));
        let negative = CMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(matches!(channel_rates(&ch, &negative), Err(Error::Validity(_))));
        assert!(matches!(QuantumChannel::new(alloc::vec![CMatrix::identity(2).scale(c(0.5))]), Err(Error::Validity(_))));
        assert!(matches!("dephasing:2".parse::<QuantumChannel>(), Err(Error::Domain(_))));
        assert!(matches!("erasure:0.1".parse::<QuantumChannel>(), Err(Error::Lookup(_))));
        assert!(matches!("dephasing".parse::<QuantumChannel>(), Err(Error::Validity(_))));
        let big = QuantumChannel::identity(5);
        assert!(matches!(optimize_rates(&big, Objective::MaxI, &OptimizerSettings::default()), Err(Error::Size(_))));
    }

    #[test]
    fn concavity_spot_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let ch = random_qubit_channel(2, &mut rng);
            let (r1, r2) = (random_density(2, &mut rng), random_density(2, &mut rng));
            let mid = r1.add(&r2).scale(c(0.5));
            let i = |r: &CMatrix| channel_rates(&ch, r).unwrap().i_ab;
            assert!(i(&mid) >= 0.5 * (i(&r1) + i(&r2)) - 1e-9);
        }
    }

    #[test]
    fn optimized_rates() {
        let s = OptimizerSettings::default();
        let deph = QuantumChannel::dephasing(1.0).unwrap();
        let m = optimize_rates(&deph, Objective::MaxI, &s).unwrap();
        assert!((m.value - 1.0).abs() < 1e-2);
        assert!(m.rho.sub(&half()).max_abs() < 0.05);
        let id = QuantumChannel::identity(2);
        assert!((optimize_rates(&id, Objective::MaxI, &s).unwrap().value - 2.0).abs() < 1e-2);
        for ch in ["amplitude-damping:0.3", "depolarizing:0.2"] {
            let ch: QuantumChannel = ch.parse().unwrap();
            assert!(optimize_rates(&ch, Objective::MaxSB, &s).unwrap().value <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn ascent_alone_and_grid_alone_agree() {
        let ch = QuantumChannel::amplitude_damping(0.4).unwrap();
        let grid = OptimizerSettings { restarts: 0, grid_steps: Some(24), ..Default::default() };
        let ascent = OptimizerSettings { restarts: 6, grid_steps: None, ..Default::default() };
        let a = optimize_rates(&ch, Objective::MaxI, &grid).unwrap().value;
        let b = optimize_rates(&ch, Objective::MaxI, &ascent).unwrap().value;
        assert!((a - b).abs() < 1e-2, "{a} vs {b}");
    }

    #[test]
    fn simplex_grid_for_qutrits() {
        let ch = QuantumChannel::identity(3);
        let s = OptimizerSettings { restarts: 2, iterations: 50, ..Default::default() };
        let m = optimize_rates(&ch, Objective::MaxSB, &s).unwrap();
        assert!(m.value <= 3f64.log2() + 1e-12);
        assert!(m.value > 3f64.log2() - 1e-2);
    }

    #[test]
    fn qrst_dephasing() {
        let ch = QuantumChannel::dephasing(1.0).unwrap();
        let s = OptimizerSettings::default();
        let ok = qrst_region_check(&ch, RateTriple { c1: 1.0, c2: 0.0, e: 1.0 }, &s, 1e-3).unwrap();
        assert!(ok.feasible, "{ok:?}");
        assert!(ok.slacks.iter().all(|x| x.abs() < 1e-2));
        let bad = qrst_region_check(&ch, RateTriple { c1: 0.5, c2: 0.0, e: 1.0 }, &s, 1e-3).unwrap();
        assert!(!bad.feasible);
        assert!((bad.slacks[0] + 0.5).abs() < 0.02);
        let low_e = qrst_region_check(&ch, RateTriple { c1: 1.0, c2: 5.0, e: 0.5 }, &s, 1e-3).unwrap();
        assert!(!low_e.feasible && low_e.slacks[1] < -0.4);
    }

    #[test]
    fn qrst_monotone_in_classical_rates() {
        let ch = QuantumChannel::amplitude_damping(0.25).unwrap();
        let s = OptimizerSettings { restarts: 2, iterations: 40, grid_steps: Some(12), seed: 4 };
        let base = RateTriple { c1: 0.6, c2: 0.1, e: 0.9 };
        let r0 = qrst_region_check(&ch, base, &s, 1e-3).unwrap();
        for more in [RateTriple { c1: 1.2, ..base }, RateTriple { c2: 0.8, ..base }] {
            let r = qrst_region_check(&ch, more, &s, 1e-3).unwrap();
            for k in 0..3 {
                assert!(r.slacks[k] >= r0.slacks[k] - 1e-9);
            }
            assert!(!r0.feasible || r.feasible);
        }
    }
}
