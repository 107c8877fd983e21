//! Reconstruction of the components of |u> and |s> in each eigenspace.
//!
//! The kernel vectors of `D_phi^s` parametrize (non-orthonormal) eigenvectors
//! of the walk, so the raw overlaps `s'(k,l) = <eps_1(l)|u_M>` must be
//! corrected through the correlation matrix of the generated eigenvectors.
//! The correlation is always of the form `E1^T f(table) E1` (plus a stacked
//! term in the singular case), built from the same Xi stack as the criterion.

use nalgebra::{Complex, DMatrix, DVector};

use super::pipeline::Pipeline;
use super::weights::t_table;
use super::{ComponentKind, PhaseComponent, ScanOptions};
use crate::combinatorics::RankTolerance;

type C64 = Complex<f64>;

/// Relative cut below which correlation eigendirections are discarded as
/// numerically collapsed.
const CORRELATION_RANK_TOL: f64 = 1e-12;

/// Shared correction: diagonalize the correlation matrix, drop collapsed
/// directions, and rotate the raw overlaps into orthonormal coordinates.
///
/// `s(k) = S_E^{-1} V_E^T s'(k)` and `u(k,l) = sqrt(M/N) (1 - i cot(phi/2)) s(k,l)`.
fn correct(
    pipeline: &Pipeline,
    phi: f64,
    e1: &DMatrix<f64>,
    correlation: &DMatrix<f64>,
    kind: ComponentKind,
) -> Option<PhaseComponent> {
    let m = pipeline.m() as f64;
    let s_prime: DVector<f64> = DVector::from_fn(e1.ncols(), |l, _| {
        e1.column(l).sum() / m.sqrt()
    });

    let eig = correlation.clone().symmetric_eigen();
    let max_ev = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &ev| acc.max(ev.abs()));
    if max_ev <= 0.0 {
        return None;
    }
    let cut = CORRELATION_RANK_TOL * max_ev;
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > cut)
        .collect();
    if kept.is_empty() {
        return None;
    }

    let root_m_over_n = (pipeline.m() as f64 / pipeline.spec().big_n()).sqrt();
    let u_factor = C64::new(1.0, -1.0 / (phi / 2.0).tan());
    let mut s_comp = Vec::with_capacity(kept.len());
    let mut u_comp = Vec::with_capacity(kept.len());
    for &j in &kept {
        let coord: f64 = eig.eigenvectors.column(j).dot(&s_prime);
        let s_val = coord / eig.eigenvalues[j].sqrt();
        s_comp.push(C64::new(s_val, 0.0));
        u_comp.push(u_factor * root_m_over_n * s_val);
    }
    Some(PhaseComponent {
        phi,
        multiplicity: kept.len(),
        s_comp,
        u_comp,
        kind,
    })
}

/// Regular phase: correlation `E1^T f(D^2 (1 + T)) E1`.
pub(super) fn regular(pipeline: &Pipeline, phi: f64, e1: &DMatrix<f64>) -> Option<PhaseComponent> {
    let n = pipeline.n();
    let d_table = super::weights::d_hat_table(phi, n).ok()?;
    let t = t_table(phi, n);
    let weights: Vec<f64> = (0..=n)
        .map(|w| d_table[w] * d_table[w] * (1.0 + t[w]))
        .collect();
    let correlation = e1.transpose() * pipeline.xi().weighted_sum(&weights) * e1;
    correct(pipeline, phi, e1, &correlation, ComponentKind::Regular)
}

/// The phase-pi component: eigenvectors are parametrized by the kernel of the
/// alternating-sign row `h`, with correlation `E1^T f(1 + W) E1`. Empty for a
/// single solution.
///
/// The phase `+0` twin of this sector is orthogonal to both |u> and |s> by
/// construction (its parameter vectors are orthogonal to `u_M`), so it is
/// never built; only its dimension `M - 1` enters the completeness count.
pub(super) fn minus_one(pipeline: &Pipeline) -> Option<PhaseComponent> {
    let m = pipeline.m();
    if m < 2 {
        return None;
    }
    let h = DVector::from_fn(m, |k, _| {
        let weight = crate::combinatorics::hamming_weight(pipeline.spec().solutions()[k]);
        if weight % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    });
    let e1 = complement_basis(&h);
    let table = super::weights::minus_one_table(pipeline.n());
    let correlation = e1.transpose() * pipeline.xi().weighted_sum(&table) * &e1;
    correct(
        pipeline,
        std::f64::consts::PI,
        &e1,
        &correlation,
        ComponentKind::MinusOne,
    )
}

/// Component at the singular phase `phi_w = arccos(1 - 2w/n)`.
///
/// Kernel vectors of `D_phi^s` do not exist there; instead the parameters are
/// constrained to `ker(Xi_w)` and paired with an auxiliary vector through the
/// stacked system `[D_phi^{s,p-bar} Y | V_w S_w]`. Absent whenever `Xi_w` has
/// full rank.
pub(super) fn singular(
    pipeline: &Pipeline,
    w: usize,
    opts: &ScanOptions,
) -> Option<PhaseComponent> {
    let n = pipeline.n();
    let m = pipeline.m();
    debug_assert!(w >= 1 && w < n);
    let phi = (1.0 - 2.0 * w as f64 / n as f64).acos();

    let xi_w = pipeline.xi().xi(w);
    let eig = xi_w.clone().symmetric_eigen();
    let max_ev = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &ev| acc.max(ev.abs()));
    let tol = RankTolerance::default();
    let cut = (tol.relative * max_ev).max(tol.absolute);
    let mut kernel_cols = Vec::new();
    let mut range_cols = Vec::new();
    for i in 0..m {
        if eig.eigenvalues[i].abs() > cut {
            // thin column of V_w S_w: eigenvector scaled by the singular
            // value of H^{s,w}, which is sqrt of the Xi_w eigenvalue
            range_cols.push(eig.eigenvectors.column(i) * eig.eigenvalues[i].max(0.0).sqrt());
        } else {
            kernel_cols.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    if kernel_cols.is_empty() {
        return None;
    }
    let y = DMatrix::from_columns(&kernel_cols);
    let rank = range_cols.len();

    // Stacked system: i D^{s,p-bar} (Y eps) + V S x = 0. With real eps the
    // auxiliary x is purely imaginary, so the kernel can be taken over the
    // real stacked matrix [D^{s,p-bar} Y | V S].
    let d_masked = pipeline.d_s_masked(phi, w).ok()?;
    let a = &d_masked * &y;
    let mut stacked = DMatrix::zeros(m, y.ncols() + rank);
    stacked.columns_mut(0, y.ncols()).copy_from(&a);
    for (j, col) in range_cols.iter().enumerate() {
        stacked.column_mut(y.ncols() + j).copy_from(col);
    }
    let svd = stacked.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().unwrap();
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let sv_cut = (opts.zero_sv_tol * sigma_max).max(super::ZERO_SV_ABS_FLOOR);
    let mut eps_cols = Vec::new();
    let mut aux_cols = Vec::new();
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] <= sv_cut {
            let row = v_t.row(i).transpose();
            let eps_hat = row.rows(0, y.ncols()).into_owned();
            if eps_hat.norm() < 1e-10 {
                continue;
            }
            eps_cols.push(&y * eps_hat);
            aux_cols.push(row.rows(y.ncols(), rank).into_owned());
        }
    }
    if eps_cols.is_empty() {
        return None;
    }
    let e1 = DMatrix::from_columns(&eps_cols);
    let aux = DMatrix::from_columns(&aux_cols);

    let d_table = super::weights::d_hat_table_masked(phi, n, w).ok()?;
    let t = t_table(phi, n);
    let weights: Vec<f64> = (0..=n)
        .map(|v| {
            if v == w {
                0.0
            } else {
                d_table[v] * d_table[v] * (1.0 + t[v])
            }
        })
        .collect();
    let correlation = e1.transpose() * pipeline.xi().weighted_sum(&weights) * &e1
        + aux.transpose() * &aux * 2.0;
    correct(
        pipeline,
        phi,
        &e1,
        &correlation,
        ComponentKind::Singular { weight: w },
    )
}

/// Mirror a component to the conjugate phase: `-phi` with conjugated entries.
pub(super) fn conjugate(component: &PhaseComponent) -> PhaseComponent {
    PhaseComponent {
        phi: -component.phi,
        multiplicity: component.multiplicity,
        s_comp: component.s_comp.iter().map(|z| z.conj()).collect(),
        u_comp: component.u_comp.iter().map(|z| z.conj()).collect(),
        kind: component.kind,
    }
}

/// Orthonormal basis of the complement of `v` in R^k, via the Householder
/// reflection sending `e_1` to `v / |v|`.
fn complement_basis(v: &DVector<f64>) -> DMatrix<f64> {
    let k = v.len();
    assert!(k >= 2);
    let unit = v / v.norm();
    let mut h = unit.clone();
    h[0] -= 1.0;
    let norm2 = h.norm_squared();
    if norm2 < 1e-300 {
        // v is already e_1; the complement is the remaining identity columns
        return DMatrix::identity(k, k).columns(1, k - 1).into_owned();
    }
    let house = DMatrix::identity(k, k) - &h * h.transpose() * (2.0 / norm2);
    house.columns(1, k - 1).into_owned()
}
