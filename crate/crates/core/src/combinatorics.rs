//! Exact integer combinatorics behind the polynomial-time criterion.
//!
//! Everything here reduces to counting bit patterns: `eta(w_p, w_m)` is the
//! signed count of weight-`w_p` words against a fixed weight-`w_m` mask, and
//! the `Xi_w` Gram matrices are `eta` values scaled by `1/N`. Integer values
//! are exact up to `n = 64`; floating point enters only at the final division.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Number of set bits in the binary representation of a position index.
pub fn hamming_weight(p: u64) -> usize {
    p.count_ones() as usize
}

/// Exact binomial coefficient C(n, k); zero outside `0 <= k <= n`.
///
/// Overflow of the 128-bit accumulator is reported, never wrapped.
pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) is always divisible by i at this point.
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or(Error::Overflow("binomial"))?
            / i as u128;
    }
    Ok(acc)
}

/// Count of weight-`w_p` words whose overlap with a fixed weight-`w_m` mask is
/// even: sum over l of C(w_m, 2l) C(n - w_m, w_p - 2l).
pub fn zeta(w_m: usize, w_p: usize, n: usize) -> Result<u128> {
    let mut total: u128 = 0;
    for l in 0..=(w_m / 2) {
        if 2 * l > w_p {
            break;
        }
        let inside = binomial(w_m, 2 * l)?;
        let outside = binomial(n - w_m, w_p - 2 * l)?;
        let term = inside
            .checked_mul(outside)
            .ok_or(Error::Overflow("zeta term"))?;
        total = total.checked_add(term).ok_or(Error::Overflow("zeta sum"))?;
    }
    Ok(total)
}

/// Signed Hadamard row sum: eta(w_p, w_m) = 2 zeta - C(n, w_p).
///
/// Equals the sum of (-1)^<rho|mu> over all words rho of weight `w_p`, for any
/// fixed mask mu of weight `w_m`.
pub fn eta(w_p: usize, w_m: usize, n: usize) -> Result<i128> {
    let z = zeta(w_m, w_p, n)?;
    let c = binomial(n, w_p)?;
    let two_z = z.checked_mul(2).ok_or(Error::Overflow("eta"))?;
    let signed = i128::try_from(two_z).map_err(|_| Error::Overflow("eta"))?
        - i128::try_from(c).map_err(|_| Error::Overflow("eta"))?;
    Ok(signed)
}

/// Precomputed table of eta(w_p, w_m) for all weight pairs of one dimension.
#[derive(Debug, Clone)]
pub struct WeightTable {
    n: usize,
    eta: Vec<Vec<i128>>,
}

impl WeightTable {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionZero);
        }
        let mut rows = Vec::with_capacity(n + 1);
        for w_p in 0..=n {
            let mut row = Vec::with_capacity(n + 1);
            for w_m in 0..=n {
                row.push(eta(w_p, w_m, n)?);
            }
            rows.push(row);
        }
        Ok(Self { n, eta: rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self, w_p: usize, w_m: usize) -> i128 {
        self.eta[w_p][w_m]
    }
}

/// The M x M matrix Xi_w with entries eta(w, weight(a xor b)) / N.
///
/// Equals the Gram matrix of the weight-`w` Hadamard rows restricted to the
/// solution columns, so it is symmetric positive semidefinite.
pub fn xi_matrix(spec: &ProblemSpec, w: usize) -> Result<DMatrix<f64>> {
    let table = WeightTable::new(spec.n())?;
    Ok(xi_from_table(spec, &table, w))
}

fn xi_from_table(spec: &ProblemSpec, table: &WeightTable, w: usize) -> DMatrix<f64> {
    let m = spec.m();
    let inv_n = 1.0 / spec.big_n();
    let sols = spec.solutions();
    DMatrix::from_fn(m, m, |a, b| {
        let wx = hamming_weight(sols[a] ^ sols[b]);
        table.eta(w, wx) as f64 * inv_n
    })
}

/// All Xi_w matrices of one problem, indexed by weight `w = 0..=n`.
///
/// This stack is the only problem-dependent input the spectral pipeline
/// needs; everything downstream works on M x M matrices.
#[derive(Debug, Clone)]
pub struct XiStack {
    n: usize,
    m: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl XiStack {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        let table = WeightTable::new(spec.n())?;
        let matrices = (0..=spec.n())
            .map(|w| xi_from_table(spec, &table, w))
            .collect();
        Ok(Self {
            n: spec.n(),
            m: spec.m(),
            matrices,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn xi(&self, w: usize) -> &DMatrix<f64> {
        &self.matrices[w]
    }

    /// The transformation f: sum over w of weights[w] * Xi_w.
    ///
    /// `weights` must hold one coefficient per weight, `0..=n`.
    pub fn weighted_sum(&self, weights: &[f64]) -> DMatrix<f64> {
        assert_eq!(weights.len(), self.n + 1);
        let mut acc = DMatrix::zeros(self.m, self.m);
        for (w, mat) in self.matrices.iter().enumerate() {
            if weights[w] != 0.0 {
                acc += mat * weights[w];
            }
        }
        acc
    }
}

/// Relative/absolute threshold used when counting numerical ranks.
#[derive(Debug, Clone, Copy)]
pub struct RankTolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        // Xi eigenvalues are well separated at the scales this library runs;
        // the relative cut dominates except for structurally zero matrices.
        Self {
            relative: 1e-10,
            absolute: 1e-14,
        }
    }
}

/// Rank of Xi_w, which equals the rank r_w of the weight-`w` solution
/// submatrix of the Hadamard transform.
pub fn rank_xi(spec: &ProblemSpec, w: usize, tol: RankTolerance) -> Result<usize> {
    let xi = xi_matrix(spec, w)?;
    Ok(psd_rank(&xi, tol))
}

pub(crate) fn psd_rank(mat: &DMatrix<f64>, tol: RankTolerance) -> usize {
    let eigen = mat.clone().symmetric_eigen();
    let max = eigen.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = (tol.relative * max).max(tol.absolute);
    eigen.eigenvalues.iter().filter(|&&ev| ev.abs() > cut).count()
}

/// Dimension of the effective subspace: 2 + 2 * sum of r_w over w = 1..n-1.
pub fn effective_dim(spec: &ProblemSpec) -> Result<usize> {
    effective_dim_with(spec, RankTolerance::default())
}

pub fn effective_dim_with(spec: &ProblemSpec, tol: RankTolerance) -> Result<usize> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::SpectralDimension(n));
    }
    let table = WeightTable::new(n)?;
    let mut sum = 0;
    for w in 1..n {
        let xi = xi_from_table(spec, &table, w);
        sum += psd_rank(&xi, tol);
    }
    Ok(2 + 2 * sum)
}
