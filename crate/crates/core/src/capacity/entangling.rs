//! Single-shot entangling power: the largest increase `E(U psi) - E(psi)`
//! over pure inputs on `(ancilla_a (x) A) : (B (x) ancilla_b)`. This is a
//! lower bound on the asymptotic entangling capacity.
//!
//! The search is Riemannian gradient ascent on the unit sphere with
//! backtracking, from random complex Gaussian starts. Restart `r` draws its
//! start from ChaCha8 stream `r` of the given seed, so adding restarts never
//! changes the earlier ones.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{operator_schmidt_rank, BipartiteUnitary};
use crate::error::{err, Result};
use crate::linalg::{eigh, entropy_of_eigenvalues, inner, norm_sqr, normalize, CMatrix, Layout, ZERO};

pub const DEFAULT_RESTARTS: usize = 32;
/// Largest `a dA dB b` accepted.
pub const MAX_INPUT_DIM: usize = 256;
const MAX_ITERS: usize = 400;
/// Eigenvalues below this are left out of `log rho`.
const LOG_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglingPower {
    /// Best increase found, in ebits.
    pub value: f64,
    /// `log2` of the operator Schmidt rank, an upper bound on `value`.
    pub upper_bound: f64,
    /// Input achieving `value`, over `(ancilla_a, A, B, ancilla_b)`.
    pub best_input: Vec<Complex64>,
}

struct Problem {
    layout: Layout,
    u: CMatrix,
    u_dag: CMatrix,
    left: usize,
    right: usize,
}

impl Problem {
    fn apply(&self, m: &CMatrix, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = psi.to_vec();
        self.layout.apply(&[1, 2], m, &mut out);
        out
    }

    /// Entanglement across the cut and its gradient with respect to `conj(psi)`.
    fn entropy(&self, psi: &[Complex64], with_grad: bool) -> (f64, Vec<Complex64>) {
        let m = CMatrix::from_vec(self.left, self.right, psi.to_vec()).expect("shape");
        let rho = m.matmul(&m.adjoint());
        let eig = eigh(&rho);
        let value = entropy_of_eigenvalues(&eig.values);
        if !with_grad {
            return (value, Vec::new());
        }
        // d S / d conj(M) = -(log2 rho + 1/ln 2) M
        let mut log_rho = CMatrix::zeros(self.left, self.left);
        for (k, &l) in eig.values.iter().enumerate() {
            if l <= LOG_CUTOFF {
                continue;
            }
            let w = l.log2() + core::f64::consts::LOG2_E;
            for i in 0..self.left {
                let vik = eig.vectors[(i, k)] * w;
                for j in 0..self.left {
                    log_rho[(i, j)] += vik * eig.vectors[(j, k)].conj();
                }
            }
        }
        let g = log_rho.matmul(&m).scale(Complex64::new(-1.0, 0.0));
        (value, g.into_vec())
    }

    fn objective(&self, psi: &[Complex64]) -> f64 {
        self.entropy(&self.apply(&self.u, psi), false).0 - self.entropy(psi, false).0
    }

    fn objective_and_grad(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
        let out = self.apply(&self.u, psi);
        let (e_out, g_out) = self.entropy(&out, true);
        let (e_in, g_in) = self.entropy(psi, true);
        let pulled = self.apply(&self.u_dag, &g_out);
        (e_out - e_in, pulled.iter().zip(&g_in).map(|(a, b)| a - b).collect())
    }

    fn ascend(&self, mut psi: Vec<Complex64>) -> (f64, Vec<Complex64>) {
        let (mut value, mut grad) = self.objective_and_grad(&psi);
        let mut step = 0.5;
        for _ in 0..MAX_ITERS {
            // Tangent part of the gradient.
            let radial = inner(&psi, &grad).re;
            let g: Vec<Complex64> = grad.iter().zip(&psi).map(|(g, p)| g - p * radial).collect();
            let gn = norm_sqr(&g);
            if gn < 1e-20 {
                break;
            }
            let mut accepted = None;
            while step > 1e-12 {
                let mut cand: Vec<Complex64> = psi.iter().zip(&g).map(|(p, d)| p + d * step).collect();
                normalize(&mut cand);
                let v = self.objective(&cand);
                if v >= value + 1e-4 * step * gn {
                    accepted = Some((cand, v));
                    break;
                }
                step *= 0.5;
            }
            let Some((cand, v)) = accepted else { break };
            let gain = v - value;
            psi = cand;
            (value, grad) = self.objective_and_grad(&psi);
            step *= 2.0;
            if gain < 1e-13 {
                break;
            }
        }
        (value, psi)
    }
}

pub fn entangling_power(u: &BipartiteUnitary, ancilla_dims: (usize, usize), restarts: usize, seed: u64) -> Result<EntanglingPower> {
    let defect = u.matrix().unitarity_defect();
    if defect > super::UNITARITY_TOL {
        return Err(err!(Validity, "gate is not unitary (defect {defect:e})"));
    }
    if restarts == 0 {
        return Err(err!(Domain, "restarts must be at least 1"));
    }
    let (da, db) = u.dims();
    let (a, b) = ancilla_dims;
    if a == 0 || b == 0 {
        return Err(err!(Domain, "ancilla dimensions must be at least 1"));
    }
    let total = a * da * db * b;
    if total > MAX_INPUT_DIM {
        return Err(err!(Size, "input dimension {total} exceeds {MAX_INPUT_DIM}"));
    }
    let problem = Problem {
        layout: Layout::new(&[a, da, db, b]),
        u: u.matrix().clone(),
        u_dag: u.matrix().adjoint(),
        left: a * da,
        right: db * b,
    };
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut psi: Vec<Complex64> = (0..total)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        normalize(&mut psi);
        let found = problem.ascend(psi);
        if found.0 > best.0 {
            best = found;
        }
    }
    let value = best.0.max(0.0);
    let upper_bound = (operator_schmidt_rank(u) as f64).log2();
    if value == 0.0 {
        // Product inputs always reach zero.
        best.1 = alloc::vec![ZERO; total];
        best.1[0] = Complex64::new(1.0, 0.0);
    }
    Ok(EntanglingPower { value, upper_bound, best_input: best.1 })
}
