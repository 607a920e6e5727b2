//! Dense complex matrices, a Hermitian eigensolver and tensor-register helpers.
//!
//! Matrices are small (a few hundred rows at most), so a cyclic Jacobi
//! eigensolver is accurate and fast enough. Multi-register vectors are laid
//! out row-major: the last register is the fastest-varying index.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;

use crate::error::{err, Result};

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(err!(Shape, "expected {} entries for a {rows}x{cols} matrix, got {}", rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise deviation of `self * self^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.matmul(&self.adjoint()).sub(&Self::identity(self.rows)).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint()).max_abs()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

/// Cyclic complex Jacobi. Only the Hermitian part of `a` is used.
pub fn eigh(a: &CMatrix) -> HermitianEigen {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrize so round-off in the input cannot leak into the rotations.
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let h = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = h;
            m[(j, i)] = h.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm_sqr().sqrt().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm_sqr()).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Phase that makes the (p, q) entry real and positive.
                let phase = b / babs;
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(s, 0.0);
                let gqp = phase.conj() * (-s);
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * gpp + mkq * gqp;
                    m[(k, q)] = mkp * gpq + mkq * gqq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = gpp.conj() * mpk + gqp.conj() * mqk;
                    m[(q, k)] = gpq.conj() * mpk + gqq.conj() * mqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(y, y)].re.partial_cmp(&m[(x, x)].re).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    HermitianEigen { values, vectors }
}

/// Von Neumann entropy in bits from a list of eigenvalues. Negative round-off
/// eigenvalues are clamped to zero.
pub fn entropy_of_eigenvalues(values: &[f64]) -> f64 {
    values.iter().map(|&l| if l > 0.0 { -l * l.log2() } else { 0.0 }).sum::<f64>().max(0.0)
}

pub fn von_neumann_entropy(rho: &CMatrix) -> f64 {
    entropy_of_eigenvalues(&eigh(rho).values)
}

/// `0.5 * || a - b ||_1` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * eigh(&a.sub(b)).values.iter().map(|x| x.abs()).sum::<f64>()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn normalize(v: &mut [Complex64]) {
    let n = norm_sqr(v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

pub fn outer(v: &[Complex64]) -> CMatrix {
    let n = v.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = v[i] * v[j].conj();
        }
    }
    m
}

/// Index arithmetic for a vector over a tensor product of registers.
#[derive(Debug, Clone)]
pub struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Layout {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for r in (0..dims.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * dims[r + 1];
        }
        let total = dims.iter().product();
        Self { dims: dims.to_vec(), strides, total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn digit(&self, index: usize, register: usize) -> usize {
        (index / self.strides[register]) % self.dims[register]
    }

    /// Offsets of every joint value of `targets` (in the given order, last
    /// target fastest) relative to a base index where those digits are zero.
    pub fn sub_offsets(&self, targets: &[usize]) -> Vec<usize> {
        let sub = Layout::new(&targets.iter().map(|&t| self.dims[t]).collect::<Vec<_>>());
        (0..sub.total())
            .map(|s| targets.iter().enumerate().map(|(pos, &t)| sub.digit(s, pos) * self.strides[t]).sum())
            .collect()
    }

    /// Indices whose digits on `targets` are all zero.
    pub fn bases(&self, targets: &[usize]) -> Vec<usize> {
        (0..self.total).filter(|&i| targets.iter().all(|&t| self.digit(i, t) == 0)).collect()
    }

    /// Apply `m` to the registers `targets` of `state` in place.
    pub fn apply(&self, targets: &[usize], m: &CMatrix, state: &mut [Complex64]) {
        let offs = self.sub_offsets(targets);
        assert_eq!(m.rows(), offs.len());
        assert_eq!(m.cols(), offs.len());
        let mut buf = vec![ZERO; offs.len()];
        for base in self.bases(targets) {
            for (b, &o) in buf.iter_mut().zip(&offs) {
                *b = state[base + o];
            }
            let out = m.apply(&buf);
            for (v, &o) in out.into_iter().zip(&offs) {
                state[base + o] = v;
            }
        }
    }

    /// Reduced density matrix of `targets` (ordered as given).
    pub fn reduced(&self, targets: &[usize], state: &[Complex64]) -> CMatrix {
        let offs = self.sub_offsets(targets);
        let d = offs.len();
        let mut rho = CMatrix::zeros(d, d);
        for base in self.bases(targets) {
            for i in 0..d {
                let a = state[base + offs[i]];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    rho[(i, j)] += a * state[base + offs[j]].conj();
                }
            }
        }
        rho
    }

    /// Reorder `state` so that the registers appear in the order `perm`.
    pub fn permute(&self, perm: &[usize], state: &[Complex64]) -> (Layout, Vec<Complex64>) {
        let new = Layout::new(&perm.iter().map(|&r| self.dims[r]).collect::<Vec<_>>());
        let mut out = vec![ZERO; self.total];
        for (i, &amp) in state.iter().enumerate() {
            let j: usize = perm.iter().enumerate().map(|(pos, &r)| self.digit(i, r) * new.strides[pos]).sum();
            out[j] = amp;
        }
        (new, out)
    }
}
