//! Bipartite gates and their entangling power; channels and the rate
//! quantities of their isometric extensions.

mod channel;
mod entangling;

use alloc::string::ToString;
use alloc::vec::Vec;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)] // f64 math lives in std; needed on no_std builds
use num_traits::Float;

use crate::error::{err, Error, Result};
use crate::linalg::{eigh, CMatrix, ONE};

pub use channel::{
    channel_rates, optimize_rates, qrst_region_check, ChannelRates, Objective, OptimizerSettings, QrstReport, QuantumChannel,
    RateOptimum, RateTriple, GRID_MAX_DIM,
};
pub use entangling::{entangling_power, EntanglingPower, DEFAULT_RESTARTS, MAX_INPUT_DIM};

/// Unitarity tolerance for gates and channels.
pub const UNITARITY_TOL: f64 = 1e-9;

/// A unitary on `A (x) B`, rows and columns indexed `(a, b)` with `b` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteUnitary {
    matrix: CMatrix,
    da: usize,
    db: usize,
}

impl BipartiteUnitary {
    pub fn new(matrix: CMatrix, da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 || matrix.rows() != da * db || matrix.cols() != da * db {
            return Err(err!(Shape, "a {da}x{db} gate needs a {0}x{0} matrix, got {1}x{2}", da * db, matrix.rows(), matrix.cols()));
        }
        let defect = matrix.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(err!(Validity, "matrix is not unitary (defect {defect:e})"));
        }
        Ok(Self { matrix, da, db })
    }

    pub fn identity(da: usize, db: usize) -> Self {
        Self { matrix: CMatrix::identity(da * db), da, db }
    }

    /// Control on `A`.
    pub fn cnot() -> Self {
        let m = CMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]).expect("4x4");
        Self { matrix: m, da: 2, db: 2 }
    }

    pub fn cz() -> Self {
        let m = CMatrix::diagonal(&[ONE, ONE, ONE, -ONE]);
        Self { matrix: m, da: 2, db: 2 }
    }

    pub fn swap() -> Self {
        let m = CMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).expect("4x4");
        Self { matrix: m, da: 2, db: 2 }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), da: self.da, db: self.db }
    }
}

impl FromStr for BipartiteUnitary {
    type Err = Error;

    /// `identity`, `cnot`, `swap` or `cz`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" => Ok(Self::identity(2, 2)),
            "cnot" => Ok(Self::cnot()),
            "swap" => Ok(Self::swap()),
            "cz" => Ok(Self::cz()),
            _ => Err(Error::Lookup(s.to_string())),
        }
    }
}

/// `U_f = sum_{x,y} (-1)^{f(x,y)} |x><x| (x) |y><y|` with `table[x][y] = f(x, y)`.
pub fn build_uf(table: &[Vec<bool>]) -> Result<BipartiteUnitary> {
    let da = table.len();
    let db = table.first().map_or(0, Vec::len);
    if !da.is_power_of_two() || !db.is_power_of_two() || table.iter().any(|row| row.len() != db) {
        return Err(err!(Shape, "truth table must be rectangular with power-of-two sides"));
    }
    let entries: Vec<Complex64> = table.iter().flat_map(|row| row.iter().map(|&f| if f { -ONE } else { ONE })).collect();
    Ok(BipartiteUnitary { matrix: CMatrix::diagonal(&entries), da, db })
}

/// Relative cutoff on operator Schmidt coefficients.
const OPERATOR_RANK_TOL: f64 = 1e-10;

/// Operator Schmidt coefficients of `U`, descending, and their count above a
/// relative cutoff. `U = sum_k s_k A_k (x) B_k` with orthonormal `A_k`, `B_k`.
pub fn operator_schmidt(u: &BipartiteUnitary) -> (usize, Vec<f64>) {
    let (da, db) = u.dims();
    // R[(i, k), (j, l)] = U[(i, j), (k, l)]
    let mut r = CMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    r[(i * da + k, j * db + l)] = u.matrix[(i * db + j, k * db + l)];
                }
            }
        }
    }
    let values: Vec<f64> = eigh(&r.matmul(&r.adjoint())).values.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    let top = values.first().copied().unwrap_or(0.0);
    let rank = values.iter().filter(|&&s| s > OPERATOR_RANK_TOL * top.max(1.0)).count();
    (rank, values)
}

pub fn operator_schmidt_rank(u: &BipartiteUnitary) -> usize {
    operator_schmidt(u).0
}
