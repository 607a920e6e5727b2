//! Running clean protocols in superposition.
//!
//! Branch `k` runs program `P_k` on its own copy of the common input. The
//! branch results are stitched into
//! `sum_k c_k |k>_A |k>_B (x) Psi_k`
//! after lining up their registers in a canonical slot order:
//! registers are grouped by role (payload or residual) and holder, sorted by
//! creation order within each group, and slot `j` of a group holds the
//! `j`-th register of that group in every branch. A branch with fewer
//! registers in a group is padded with `|0>`; slots whose dimensions differ
//! across branches are a shape error.
//!
//! The ideal result keeps each branch's payload and a residual that does not
//! depend on `k`: `sum_k c_k |k>|k> (x) phi_k (x) |R>`. Maximizing the overlap
//! over the `phi_k` leaves `F = max_R sum_k |c_k|^2 sqrt(<R| tau_k |R>)` with
//! `tau_k` the residual state of branch `k`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;

use super::{new_session, Action, Holder, Initial, Ledger, Session, Step, DEFAULT_DIMENSION_CAP};
use crate::error::{err, Error, Result};
use crate::linalg::{eigh, norm_sqr, trace_distance, CMatrix, Layout, ZERO};

/// Residual registers span at most this dimension.
const MAX_RESIDUAL_DIM: usize = 1024;
const FIXED_POINT_ITERS: usize = 500;

#[derive(Debug, Clone)]
pub struct Superposition {
    /// Slot names: `branch_A`, `branch_B`, then `payload:<holder>:<j>` and
    /// `residual:<holder>:<j>`.
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    /// Joint amplitudes over `dims`, last slot fastest.
    pub state: Vec<Complex64>,
    pub fidelity: f64,
    /// Largest pairwise trace distance between branch residual states.
    pub residual_distance: f64,
    pub ledgers: Vec<Ledger>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Payload,
    Residual,
}

const GROUPS: [(Role, Holder); 5] = [
    (Role::Payload, Holder::Alice),
    (Role::Payload, Holder::Bob),
    (Role::Residual, Holder::Alice),
    (Role::Residual, Holder::Bob),
    (Role::Residual, Holder::Environment),
];

fn group_members(s: &Session, role: Role, holder: Holder) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..s.registers().len())
        .filter(|&r| {
            let reg = &s.registers()[r];
            reg.holder == holder && (reg.is_residual() == (role == Role::Residual))
        })
        .collect();
    idx.sort_by_key(|&r| s.registers()[r].order);
    idx
}

pub fn run_superposed(input: &[Initial], branches: &[Vec<Step>], amplitudes: &[Complex64]) -> Result<Superposition> {
    let m = branches.len();
    if m == 0 || amplitudes.len() != m {
        return Err(err!(Shape, "{m} branch programs but {} amplitudes", amplitudes.len()));
    }
    let n = norm_sqr(amplitudes);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(n));
    }
    let mut sessions = Vec::with_capacity(m);
    for program in branches {
        let mut s = new_session(input)?;
        s.run(program)?;
        sessions.push(s);
    }

    // Canonical slots: (group, position) -> dimension.
    let mut labels = alloc::vec![String::from("branch_A"), String::from("branch_B")];
    let mut dims = alloc::vec![m, m];
    let mut residual_slots = Vec::new();
    // For each branch, slot index -> register index in that branch.
    let mut maps: Vec<Vec<Option<usize>>> = alloc::vec![Vec::new(); m];
    for (role, holder) in GROUPS {
        let members: Vec<Vec<usize>> = sessions.iter().map(|s| group_members(s, role, holder)).collect();
        let width = members.iter().map(Vec::len).max().unwrap_or(0);
        for j in 0..width {
            let mut dim = None;
            for (k, s) in sessions.iter().enumerate() {
                if let Some(&r) = members[k].get(j) {
                    let d = s.registers()[r].dim;
                    match dim {
                        None => dim = Some(d),
                        Some(prev) if prev != d => {
                            let role_name = if role == Role::Payload { "payload" } else { "residual" };
                            return Err(err!(Shape, "{role_name} slot {j} of {holder} has dimension {prev} in one branch and {d} in another"));
                        }
                        _ => {}
                    }
                }
                maps[k].push(members[k].get(j).copied());
            }
            let role_name = if role == Role::Payload { "payload" } else { "residual" };
            if role == Role::Residual {
                residual_slots.push(dims.len());
            }
            labels.push(format!("{role_name}:{holder}:{j}"));
            dims.push(dim.expect("width > 0"));
        }
    }
    let slot_layout = Layout::new(&dims[2..]);
    let inner = slot_layout.total();
    let total = inner.checked_mul(m * m).filter(|&t| t <= DEFAULT_DIMENSION_CAP);
    let Some(total) = total else {
        return Err(err!(Size, "superposed state exceeds the dimension cap of {DEFAULT_DIMENSION_CAP}"));
    };

    let branch_states: Vec<Vec<Complex64>> = sessions.iter().zip(&maps).map(|(s, map)| embed(s, map, &slot_layout)).collect();

    let mut state = alloc::vec![ZERO; total];
    for (k, psi) in branch_states.iter().enumerate() {
        let base = (k * m + k) * inner;
        for (i, &a) in psi.iter().enumerate() {
            state[base + i] = amplitudes[k] * a;
        }
    }

    let residual: Vec<usize> = residual_slots.iter().map(|&s| s - 2).collect();
    let rdim: usize = residual.iter().map(|&r| slot_layout.dims()[r]).product();
    if rdim > MAX_RESIDUAL_DIM {
        return Err(err!(Size, "residual dimension {rdim} exceeds {MAX_RESIDUAL_DIM}"));
    }
    let taus: Vec<CMatrix> = branch_states.iter().map(|psi| slot_layout.reduced(&residual, psi)).collect();
    let weights: Vec<f64> = amplitudes.iter().map(|c| c.norm_sqr()).collect();
    let fidelity = common_residual_fidelity(&taus, &weights);
    let mut residual_distance: f64 = 0.0;
    for a in 0..m {
        for b in (a + 1)..m {
            residual_distance = residual_distance.max(trace_distance(&taus[a], &taus[b]));
        }
    }
    Ok(Superposition {
        labels,
        dims,
        state,
        fidelity,
        residual_distance,
        ledgers: sessions.iter().map(|s| *s.ledger()).collect(),
    })
}

/// Branch state rewritten over the slot layout, missing slots in `|0>`.
fn embed(s: &Session, map: &[Option<usize>], slots: &Layout) -> Vec<Complex64> {
    let own = s.layout();
    let mut out = alloc::vec![ZERO; slots.total()];
    for (i, &a) in s.state().iter().enumerate() {
        let mut j = 0;
        for (slot, reg) in map.iter().enumerate() {
            let digit = reg.map_or(0, |r| own.digit(i, r));
            j = j * slots.dims()[slot] + digit;
        }
        out[j] = a;
    }
    out
}

/// `max_R sum_k w_k sqrt(<R|tau_k|R>)` over unit vectors `R`.
///
/// The objective is convex and positively homogeneous, so replacing `R` by
/// its normalized gradient never decreases it. Started from the top
/// eigenvector of every `tau_k` and of their weighted mean.
fn common_residual_fidelity(taus: &[CMatrix], weights: &[f64]) -> f64 {
    let d = taus[0].rows();
    let objective = |r: &[Complex64]| -> f64 {
        taus.iter().zip(weights).map(|(t, &w)| w * quad(t, r).max(0.0).sqrt()).sum()
    };
    let mut mean = CMatrix::zeros(d, d);
    for (t, &w) in taus.iter().zip(weights) {
        mean = mean.add(&t.scale(Complex64::new(w, 0.0)));
    }
    let mut starts: Vec<Vec<Complex64>> = taus.iter().chain(core::iter::once(&mean)).map(top_vector).collect();
    let mut best: f64 = 0.0;
    for r in starts.iter_mut() {
        let mut value = objective(r);
        for _ in 0..FIXED_POINT_ITERS {
            let mut g = alloc::vec![ZERO; d];
            for (t, &w) in taus.iter().zip(weights) {
                let q = quad(t, r);
                if q <= 1e-300 {
                    continue;
                }
                let tr = t.apply(r);
                let s = w / q.sqrt();
                for (gi, ti) in g.iter_mut().zip(tr) {
                    *gi += ti * s;
                }
            }
            let n = norm_sqr(&g).sqrt();
            if n == 0.0 {
                break;
            }
            g.iter_mut().for_each(|z| *z /= n);
            let next = objective(&g);
            let done = next - value <= 1e-15;
            if next >= value {
                r.copy_from_slice(&g);
                value = next;
            }
            if done {
                break;
            }
        }
        best = best.max(value);
    }
    best.min(1.0)
}

fn quad(t: &CMatrix, r: &[Complex64]) -> f64 {
    crate::linalg::inner(r, &t.apply(r)).re
}

fn top_vector(t: &CMatrix) -> Vec<Complex64> {
    let e = eigh(t);
    (0..t.rows()).map(|i| e.vectors[(i, 0)]).collect()
}

fn equal_pair() -> [Complex64; 2] {
    let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, h]
}

/// Destroying a shared ebit with one cbit, superposed with sending a random
/// bit, at equal amplitudes. The residuals agree, so the superposition is
/// exact.
pub fn clean_demo() -> Result<Superposition> {
    let branches = [alloc::vec![Step::DestroyEbitViaCbit], alloc::vec![Step::NoopRandomBit]];
    run_superposed(&[Initial::phi("phi")], &branches, &equal_pair())
}

/// Bob hands his half of the ebit to the environment, superposed with doing
/// nothing. The environment learns which branch ran.
pub fn dirty_demo() -> Result<Superposition> {
    let branches = [alloc::vec![Step::Act(Action::Leak { register: String::from("phi_B") })], Vec::new()];
    run_superposed(&[Initial::phi("phi")], &branches, &equal_pair())
}
