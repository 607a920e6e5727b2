//! Pure-state simulator for two-party protocols with an explicit environment.
//!
//! Every register is held by Alice, Bob or the environment. The only ways a
//! register leaves the parties are the clean ones: discarding a register
//! that is in `|0>`, or discarding a classical message after delivery. A
//! classical channel is a coherent copy of the message into a fresh
//! environment register, so the global state stays pure and the branches of
//! a superposed run can be compared exactly.

mod concentration;
mod superpose;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;

use crate::error::{err, Error, Result};
use crate::linalg::{eigh, norm_sqr, outer, trace_distance, CMatrix, Layout, ONE, ZERO};
use crate::spectra::{schmidt_spectrum_of, BipartiteState, SchmidtSpectrum};

pub use concentration::{binary_entropy, concentration_sample, ConcentrationRun};
pub use superpose::{clean_demo, dirty_demo, run_superposed, Superposition};

/// Default cap on the joint Hilbert-space dimension of a session.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 14;
/// Largest trace distance from `|0><0|` still accepted by a clean discard.
pub const CLEAN_DISCARD_TOL: f64 = 1e-9;
/// Minimum `<Phi|rho|Phi>` for a register pair to count as an ebit.
const EBIT_FIDELITY_TOL: f64 = 1e-9;
/// Largest payload dimension for which [`Session::payload_report`] runs.
const MAX_PAYLOAD_DIM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Holder {
    Alice,
    Bob,
    Environment,
}

impl Holder {
    fn other(self) -> Option<Holder> {
        match self {
            Holder::Alice => Some(Holder::Bob),
            Holder::Bob => Some(Holder::Alice),
            Holder::Environment => None,
        }
    }
}

impl fmt::Display for Holder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Holder::Alice => "alice",
            Holder::Bob => "bob",
            Holder::Environment => "environment",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    pub label: String,
    pub holder: Holder,
    pub dim: usize,
    /// Position in creation order across the whole session.
    pub order: usize,
    /// Set once the register has arrived through a classical channel.
    pub delivered: bool,
}

impl Register {
    /// Environment registers and delivered messages carry no payload.
    pub fn is_residual(&self) -> bool {
        self.holder == Holder::Environment || self.delivered
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ledger {
    pub cbits: u64,
    pub qubits: u64,
    pub ebits_consumed: u64,
    pub ebits_created: u64,
    /// Registers handed to the environment outside the clean rules.
    pub leaked: u64,
}

impl Ledger {
    /// Communication cost with a qubit priced at two cbits.
    pub fn communication(&self) -> u64 {
        self.cbits + 2 * self.qubits
    }
}

/// One component of the initial product state of a session.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    /// A pure state shared as registers `{label}_A` (Alice) and `{label}_B` (Bob).
    Shared { label: String, state: BipartiteState },
    Local { label: String, holder: Holder, amplitudes: Vec<Complex64> },
}

impl Initial {
    /// `(|00> + |11>)/sqrt(2)`.
    pub fn phi(label: &str) -> Self {
        let state = BipartiteState::schmidt_form(&[0.5, 0.5]).expect("normalized");
        Initial::Shared { label: label.to_string(), state }
    }

    pub fn plus(label: &str, holder: Holder) -> Self {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Initial::Local { label: label.to_string(), holder, amplitudes: alloc::vec![h, h] }
    }

    /// Shared state in Schmidt form for an explicit spectrum.
    pub fn from_spectrum(label: &str, spec: &SchmidtSpectrum, max_rank: usize) -> Result<Self> {
        let values = spec
            .expand(max_rank)
            .ok_or_else(|| err!(Size, "spectrum of rank above {max_rank} cannot be materialized"))?;
        Ok(Initial::Shared { label: label.to_string(), state: BipartiteState::schmidt_form(&values)? })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    LocalUnitary { holder: Holder, registers: Vec<String>, matrix: CMatrix },
    AddAncilla { holder: Holder, dim: usize, label: String },
    Discard { register: String },
    SendQubit { register: String },
    SendCbit { register: String },
    /// Hands a register to the environment with no communication. This is
    /// not a clean operation; it exists to build dirty counterexamples.
    Leak { register: String },
}

/// A program step: a primitive action or one of the canned protocols.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Act(Action),
    DestroyEbitViaCbit,
    NoopRandomBit,
    PreparePartialViaCbit(f64),
    PreparePartialViaQubit(f64),
}

/// Best pure approximation of the Alice:Bob payload.
#[derive(Debug, Clone, PartialEq)]
pub struct PayloadReport {
    /// Schmidt spectrum of the top eigenvector of the payload density matrix.
    pub spectrum: SchmidtSpectrum,
    /// `sqrt` of the top eigenvalue: overlap between the payload and that
    /// eigenvector, 1 when the payload is pure.
    pub purity_fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct Session {
    registers: Vec<Register>,
    state: Vec<Complex64>,
    ledger: Ledger,
    cap: usize,
    created: usize,
}

pub fn new_session(initial: &[Initial]) -> Result<Session> {
    Session::with_cap(initial, DEFAULT_DIMENSION_CAP)
}

impl Session {
    pub fn with_cap(initial: &[Initial], cap: usize) -> Result<Self> {
        let mut s = Session { registers: Vec::new(), state: alloc::vec![ONE], ledger: Ledger::default(), cap, created: 0 };
        for item in initial {
            match item {
                Initial::Shared { label, state } => {
                    let (da, db) = state.dims();
                    s.check_grow(da * db)?;
                    s.push_register(format!("{label}_A"), Holder::Alice, da)?;
                    s.push_register(format!("{label}_B"), Holder::Bob, db)?;
                    s.state = kron_vec(&s.state, &state.to_vector());
                }
                Initial::Local { label, holder, amplitudes } => {
                    if *holder == Holder::Environment {
                        return Err(err!(Precondition, "initial registers belong to Alice or Bob"));
                    }
                    let n = norm_sqr(amplitudes);
                    if (n - 1.0).abs() > 1e-10 {
                        return Err(Error::Normalization(n));
                    }
                    s.check_grow(amplitudes.len())?;
                    s.push_register(label.clone(), *holder, amplitudes.len())?;
                    s.state = kron_vec(&s.state, amplitudes);
                }
            }
        }
        Ok(s)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    /// Joint amplitudes, registers in [`Self::registers`] order, last fastest.
    pub fn state(&self) -> &[Complex64] {
        &self.state
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn dimension(&self) -> usize {
        self.state.len()
    }

    pub fn layout(&self) -> Layout {
        Layout::new(&self.registers.iter().map(|r| r.dim).collect::<Vec<_>>())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| err!(Validity, "no register labelled `{label}`"))
    }

    pub fn register(&self, label: &str) -> Result<&Register> {
        Ok(&self.registers[self.index_of(label)?])
    }

    /// Reduced density matrix of the labelled registers, in the given order.
    pub fn reduced(&self, labels: &[&str]) -> Result<CMatrix> {
        let idx = labels.iter().map(|l| self.index_of(l)).collect::<Result<Vec<_>>>()?;
        Ok(self.layout().reduced(&idx, &self.state))
    }

    fn check_grow(&self, factor: usize) -> Result<()> {
        match self.state.len().checked_mul(factor) {
            Some(d) if d <= self.cap => Ok(()),
            _ => Err(err!(Size, "joint dimension would exceed the cap of {}", self.cap)),
        }
    }

    fn push_register(&mut self, label: String, holder: Holder, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(err!(Shape, "register `{label}` needs dimension >= 1"));
        }
        if self.registers.iter().any(|r| r.label == label) {
            return Err(err!(Validity, "register label `{label}` already in use"));
        }
        self.registers.push(Register { label, holder, dim, order: self.created, delivered: false });
        self.created += 1;
        Ok(())
    }

    fn fresh_label(&self, prefix: &str) -> String {
        (0..)
            .map(|k| format!("{prefix}{k}"))
            .find(|l| self.registers.iter().all(|r| &r.label != l))
            .expect("unbounded label space")
    }

    /// Append a register in `|0>`.
    fn append_zero(&mut self, label: String, holder: Holder, dim: usize) -> Result<()> {
        self.check_grow(dim)?;
        self.push_register(label, holder, dim)?;
        let mut next = alloc::vec![ZERO; self.state.len() * dim];
        for (i, &a) in self.state.iter().enumerate() {
            next[i * dim] = a;
        }
        self.state = next;
        Ok(())
    }

    /// Remove register `r`, keeping the component where it reads 0.
    fn remove_projected(&mut self, r: usize) {
        let layout = self.layout();
        let mut kept: Vec<Complex64> = layout.bases(&[r]).into_iter().map(|i| self.state[i]).collect();
        let n = norm_sqr(&kept).sqrt();
        if n > 0.0 {
            kept.iter_mut().for_each(|z| *z /= n);
        }
        self.state = kept;
        self.registers.remove(r);
    }

    fn log2_dim(dim: usize, what: &str) -> Result<u64> {
        if dim.is_power_of_two() {
            Ok(dim.trailing_zeros() as u64)
        } else {
            Err(err!(Shape, "{what} needs a power-of-two dimension, got {dim}"))
        }
    }

    pub fn step(&mut self, action: &Action) -> Result<()> {
        match action {
            Action::LocalUnitary { holder, registers, matrix } => self.local_unitary(*holder, registers, matrix),
            Action::AddAncilla { holder, dim, label } => {
                if *holder == Holder::Environment {
                    return Err(err!(Precondition, "ancillas are added by Alice or Bob"));
                }
                self.append_zero(label.clone(), *holder, *dim)
            }
            Action::Discard { register } => self.discard(register),
            Action::SendQubit { register } => {
                let r = self.index_of(register)?;
                let reg = &self.registers[r];
                let to = reg.holder.other().ok_or_else(|| err!(Precondition, "environment registers cannot be sent"))?;
                let q = Self::log2_dim(reg.dim, "send_qubit")?;
                let reg = &mut self.registers[r];
                reg.holder = to;
                reg.delivered = false;
                self.ledger.qubits += q;
                Ok(())
            }
            Action::SendCbit { register } => self.send_cbit(register),
            Action::Leak { register } => {
                let r = self.index_of(register)?;
                if self.registers[r].holder == Holder::Environment {
                    return Err(err!(Precondition, "register `{register}` is already in the environment"));
                }
                self.registers[r].holder = Holder::Environment;
                self.ledger.leaked += 1;
                Ok(())
            }
        }
    }

    pub fn run(&mut self, program: &[Step]) -> Result<()> {
        for step in program {
            match step {
                Step::Act(a) => self.step(a)?,
                Step::DestroyEbitViaCbit => self.destroy_ebit_via_cbit()?,
                Step::NoopRandomBit => self.noop_random_bit()?,
                Step::PreparePartialViaCbit(p) => self.prepare_partial_via_cbit(*p)?,
                Step::PreparePartialViaQubit(p) => self.prepare_partial_via_qubit(*p)?,
            }
        }
        Ok(())
    }

    fn local_unitary(&mut self, holder: Holder, labels: &[String], matrix: &CMatrix) -> Result<()> {
        if holder == Holder::Environment {
            return Err(err!(Precondition, "the environment does not act"));
        }
        let idx = labels.iter().map(|l| self.index_of(l)).collect::<Result<Vec<_>>>()?;
        for (k, &r) in idx.iter().enumerate() {
            if idx[..k].contains(&r) {
                return Err(err!(Validity, "register `{}` listed twice", labels[k]));
            }
            if self.registers[r].holder != holder {
                return Err(err!(
                    Precondition,
                    "register `{}` is held by {}, not {holder}",
                    labels[k],
                    self.registers[r].holder
                ));
            }
        }
        let d: usize = idx.iter().map(|&r| self.registers[r].dim).product();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(err!(Shape, "unitary is {}x{}, registers span dimension {d}", matrix.rows(), matrix.cols()));
        }
        let defect = matrix.unitarity_defect();
        if defect > 1e-9 {
            return Err(err!(Validity, "matrix is not unitary (defect {defect:e})"));
        }
        self.layout().apply(&idx, matrix, &mut self.state);
        Ok(())
    }

    fn discard(&mut self, label: &str) -> Result<()> {
        let r = self.index_of(label)?;
        let reg = &self.registers[r];
        if reg.holder == Holder::Environment {
            return Err(err!(Precondition, "register `{label}` is already in the environment"));
        }
        if reg.delivered {
            self.registers[r].holder = Holder::Environment;
            return Ok(());
        }
        let rho = self.layout().reduced(&[r], &self.state);
        let mut zero = CMatrix::zeros(reg.dim, reg.dim);
        zero[(0, 0)] = ONE;
        let distance = trace_distance(&rho, &zero);
        if distance > CLEAN_DISCARD_TOL {
            return Err(Error::CleanViolation { register: label.to_string(), distance });
        }
        self.remove_projected(r);
        Ok(())
    }

    fn send_cbit(&mut self, label: &str) -> Result<()> {
        let r = self.index_of(label)?;
        let reg = &self.registers[r];
        let to = reg.holder.other().ok_or_else(|| err!(Precondition, "environment registers cannot be sent"))?;
        let bits = Self::log2_dim(reg.dim, "send_cbit")?;
        let d = reg.dim;
        let env = self.fresh_label("env");
        self.append_zero(env, Holder::Environment, d)?;
        let e = self.registers.len() - 1;
        // |x, y> -> |x, y + x mod d> on (message, environment).
        let mut copy = CMatrix::zeros(d * d, d * d);
        for x in 0..d {
            for y in 0..d {
                copy[(x * d + (y + x) % d, x * d + y)] = ONE;
            }
        }
        self.layout().apply(&[r, e], &copy, &mut self.state);
        let reg = &mut self.registers[r];
        reg.holder = to;
        reg.delivered = true;
        self.ledger.cbits += bits;
        Ok(())
    }

    fn find_ebit(&self) -> Result<(String, String)> {
        let phi = bell_projector();
        for a in self.registers.iter().filter(|r| r.holder == Holder::Alice && r.dim == 2 && !r.delivered) {
            for b in self.registers.iter().filter(|r| r.holder == Holder::Bob && r.dim == 2 && !r.delivered) {
                let rho = self.reduced(&[&a.label, &b.label])?;
                let f = phi.matmul(&rho).trace().re;
                if f >= 1.0 - EBIT_FIDELITY_TOL {
                    return Ok((a.label.clone(), b.label.clone()));
                }
            }
        }
        Err(err!(Precondition, "session holds no shared Phi pair"))
    }

    /// Alice sends her half of a shared `Phi` through the classical channel,
    /// Bob uncomputes his half with a CNOT and discards it in `|0>`.
    pub fn destroy_ebit_via_cbit(&mut self) -> Result<()> {
        let (a, b) = self.find_ebit()?;
        let mut trial = self.clone();
        trial.send_cbit(&a)?;
        trial.local_unitary(Holder::Bob, &[a, b.clone()], &gates::cnot())?;
        trial.discard(&b)?;
        trial.ledger.ebits_consumed += 1;
        *self = trial;
        Ok(())
    }

    /// Alice sends a uniformly random bit; Bob keeps the message.
    pub fn noop_random_bit(&mut self) -> Result<()> {
        let mut trial = self.clone();
        let m = trial.fresh_label("rnd");
        trial.append_zero(m.clone(), Holder::Alice, 2)?;
        trial.local_unitary(Holder::Alice, core::slice::from_ref(&m), &gates::hadamard())?;
        trial.send_cbit(&m)?;
        *self = trial;
        Ok(())
    }

    /// Turns a shared `Phi` into `sqrt(1-p)|00> + sqrt(p)|11>` with one cbit:
    /// a coherent two-outcome measurement on Alice's half, correction by both
    /// parties conditioned on the outcome, outcome sent through the channel.
    pub fn prepare_partial_via_cbit(&mut self, p: f64) -> Result<()> {
        check_p(p)?;
        let (a, b) = self.find_ebit()?;
        let mut trial = self.clone();
        let c = trial.fresh_label("meas");
        trial.append_zero(c.clone(), Holder::Alice, 2)?;
        trial.local_unitary(Holder::Alice, &[a.clone(), c.clone()], &gates::nielsen_measurement(p))?;
        trial.local_unitary(Holder::Alice, &[c.clone(), a], &gates::cnot())?;
        trial.send_cbit(&c)?;
        trial.local_unitary(Holder::Bob, &[c, b], &gates::cnot())?;
        trial.ledger.ebits_consumed += 1;
        *self = trial;
        Ok(())
    }

    /// Alice prepares `sqrt(1-p)|00> + sqrt(p)|11>` locally and sends one half.
    pub fn prepare_partial_via_qubit(&mut self, p: f64) -> Result<()> {
        check_p(p)?;
        let mut trial = self.clone();
        let a = trial.fresh_label("pa");
        let c = trial.fresh_label("pb");
        trial.append_zero(a.clone(), Holder::Alice, 2)?;
        trial.append_zero(c.clone(), Holder::Alice, 2)?;
        trial.local_unitary(Holder::Alice, core::slice::from_ref(&a), &gates::ry_prep(p))?;
        trial.local_unitary(Holder::Alice, &[a, c.clone()], &gates::cnot())?;
        trial.step(&Action::SendQubit { register: c })?;
        *self = trial;
        Ok(())
    }

    /// Indices of registers that carry no payload, in creation order.
    pub fn residual_registers(&self) -> Vec<usize> {
        (0..self.registers.len()).filter(|&r| self.registers[r].is_residual()).collect()
    }

    pub fn payload_registers(&self, holder: Holder) -> Vec<usize> {
        (0..self.registers.len())
            .filter(|&r| !self.registers[r].is_residual() && self.registers[r].holder == holder)
            .collect()
    }

    /// Best pure approximation of the state Alice and Bob hold, with the
    /// residual registers traced out.
    pub fn payload_report(&self) -> Result<PayloadReport> {
        let alice = self.payload_registers(Holder::Alice);
        let bob = self.payload_registers(Holder::Bob);
        let da: usize = alice.iter().map(|&r| self.registers[r].dim).product();
        let db: usize = bob.iter().map(|&r| self.registers[r].dim).product();
        if da * db > MAX_PAYLOAD_DIM {
            return Err(err!(Size, "payload dimension {} exceeds {MAX_PAYLOAD_DIM}", da * db));
        }
        let targets: Vec<usize> = alice.iter().chain(&bob).copied().collect();
        let rho = self.layout().reduced(&targets, &self.state);
        let eig = eigh(&rho);
        let top: Vec<Complex64> = (0..da * db).map(|i| eig.vectors[(i, 0)]).collect();
        let state = BipartiteState::new(CMatrix::from_vec(da, db, top)?)?;
        Ok(PayloadReport {
            spectrum: schmidt_spectrum_of(&state)?,
            purity_fidelity: eig.values[0].clamp(0.0, 1.0).sqrt(),
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(err!(Domain, "p must lie in (0, 1), got {p}"))
    }
}

fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

fn bell_projector() -> CMatrix {
    let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    outer(&[h, ZERO, ZERO, h])
}

pub(crate) mod gates {
    use super::*;

    pub fn hadamard() -> CMatrix {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
    }

    /// Control first, target second.
    pub fn cnot() -> CMatrix {
        CMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]).expect("4x4")
    }

    /// `|0> -> sqrt(1-p)|0> + sqrt(p)|1>`.
    pub fn ry_prep(p: f64) -> CMatrix {
        let (c, s) = ((1.0 - p).sqrt(), p.sqrt());
        CMatrix::from_real(2, 2, &[c, -s, s, c]).expect("2x2")
    }

    /// On (system, outcome) with the outcome register starting in `|0>`:
    /// `|x>|0> -> M0|x>|0> + M1|x>|1>`, `M0 = diag(sqrt(1-p), sqrt(p))`,
    /// `M1 = diag(sqrt(p), sqrt(1-p))`.
    pub fn nielsen_measurement(p: f64) -> CMatrix {
        let (c, s) = ((1.0 - p).sqrt(), p.sqrt());
        #[rustfmt::skip]
        let m = [
            c, s, 0., 0.,
            s, -c, 0., 0.,
            0., 0., s, c,
            0., 0., c, -s,
        ];
        CMatrix::from_real(4, 4, &m).expect("4x4")
    }
}
