//! Shared per-problem state for the spectral pipeline: the Xi stack, the
//! singular phases of the uniform walk, and `D_theta^s` assembly.

use nalgebra::DMatrix;

use super::weights::{d_hat_table, d_hat_table_masked};
use super::ScanOptions;
use crate::combinatorics::XiStack;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone)]
pub(super) struct Pipeline {
    spec: ProblemSpec,
    xi: XiStack,
    /// The phases `arccos(1 - 2w/n)` where the D-hat table is undefined,
    /// one per weight `1..=n-1`.
    singular: Vec<(usize, f64)>,
}

impl Pipeline {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        let n = spec.n();
        if n < 2 {
            return Err(Error::SpectralDimension(n));
        }
        if spec.all_solutions() {
            return Err(Error::AllPositionsSolutions);
        }
        let xi = XiStack::new(spec)?;
        let singular = (1..n)
            .map(|w| (w, (1.0 - 2.0 * w as f64 / n as f64).acos()))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            xi,
            singular,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn m(&self) -> usize {
        self.spec.m()
    }

    pub fn xi(&self) -> &XiStack {
        &self.xi
    }

    pub fn singular_phases(&self) -> &[(usize, f64)] {
        &self.singular
    }

    /// `D_theta^s = sum_w D_hat_theta(w) Xi_w`.
    pub fn d_s(&self, theta: f64) -> Result<DMatrix<f64>> {
        let table = d_hat_table(theta, self.n())
            .map_err(|w| Error::SingularPhase {
                weight: w,
                phi: theta,
            })?;
        Ok(self.xi.weighted_sum(&table))
    }

    /// `D_theta^s` with the slot of one weight forced to zero.
    pub fn d_s_masked(&self, theta: f64, masked_w: usize) -> Result<DMatrix<f64>> {
        let table = d_hat_table_masked(theta, self.n(), masked_w)
            .map_err(|w| Error::SingularPhase {
                weight: w,
                phi: theta,
            })?;
        Ok(self.xi.weighted_sum(&table))
    }

    /// Least and largest singular values of `D_theta^s` plus its negative
    /// eigenvalue count. `None` where the table is singular.
    pub fn sigma_profile(&self, theta: f64) -> Option<(f64, f64, usize)> {
        let d = self.d_s(theta).ok()?;
        let eig = d.symmetric_eigen();
        let mut sigma_min = f64::INFINITY;
        let mut sigma_max = 0.0f64;
        let mut negatives = 0usize;
        for &ev in eig.eigenvalues.iter() {
            sigma_min = sigma_min.min(ev.abs());
            sigma_max = sigma_max.max(ev.abs());
            if ev < 0.0 {
                negatives += 1;
            }
        }
        Some((sigma_min, sigma_max, negatives))
    }

    /// Kernel of `D_phi^s` at a refined phase.
    ///
    /// `proven_count` is the number of zeros certified by the negative-count
    /// jump across the detection bracket: at least that many eigendirections
    /// are returned (the smallest-magnitude ones), regardless of how the
    /// threshold test lands on refinement residue. The relative zero
    /// threshold can widen the kernel further when additional directions are
    /// degenerate at this phase.
    pub fn kernel_at(
        &self,
        phi: f64,
        opts: &ScanOptions,
        proven_count: usize,
    ) -> Option<(usize, DMatrix<f64>)> {
        let d = self.d_s(phi).ok()?;
        let eig = d.symmetric_eigen();
        let sigma_max = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &ev| acc.max(ev.abs()));
        let cut = (opts.zero_sv_tol * sigma_max).max(super::ZERO_SV_ABS_FLOOR);
        let mut order: Vec<usize> = (0..self.m()).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .abs()
                .partial_cmp(&eig.eigenvalues[j].abs())
                .unwrap()
        });
        let under_threshold = order
            .iter()
            .filter(|&&i| eig.eigenvalues[i].abs() <= cut)
            .count();
        let mult = under_threshold.max(proven_count);
        if mult == 0 {
            return None;
        }
        let cols: Vec<_> = order[..mult]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        Some((mult, DMatrix::from_columns(&cols)))
    }
}
