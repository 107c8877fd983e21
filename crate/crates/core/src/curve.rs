//! Success curves: evaluation from a spectral decomposition, the analytic
//! upper bound, and the optimal measurement time.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::spectral::SpectralDecomposition;

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveSource {
    Spectral,
    Direct,
}

/// The probability of success p_0..p_T with its peak.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessCurve {
    pub probabilities: Vec<f64>,
    pub argmax_t: usize,
    pub max_p: f64,
    pub source: CurveSource,
    /// Set when the decomposition behind a spectral curve was incomplete.
    pub approximate: bool,
}

impl SuccessCurve {
    pub fn new(probabilities: Vec<f64>, source: CurveSource, approximate: bool) -> Self {
        assert!(!probabilities.is_empty());
        let probabilities: Vec<f64> = probabilities
            .into_iter()
            .map(|p| p.clamp(0.0, 1.0))
            .collect();
        let (argmax_t, max_p) = probabilities
            .iter()
            .enumerate()
            .fold((0usize, f64::MIN), |(bi, bp), (i, &p)| {
                if p > bp {
                    (i, p)
                } else {
                    (bi, bp)
                }
            });
        Self {
            probabilities,
            argmax_t,
            max_p,
            source,
            approximate,
        }
    }

    pub fn t_max(&self) -> usize {
        self.probabilities.len() - 1
    }
}

/// Evaluates `p_t = |sum_k,l s(k,l)* e^{i phi_k t} u(k,l)|^2` for t = 0..t_max.
///
/// Each component contributes through the single scalar `sum_l s(k,l)* u(k,l)`,
/// advanced by one phase rotation per step; phasors are renormalized every
/// 2^12 steps to keep drift bounded over long runs.
pub fn probability_curve(decomp: &SpectralDecomposition, t_max: usize) -> SuccessCurve {
    let terms: Vec<(C64, C64)> = decomp
        .components
        .iter()
        .map(|c| {
            let weight: C64 = c
                .s_comp
                .iter()
                .zip(&c.u_comp)
                .map(|(s, u)| s.conj() * u)
                .sum();
            let rot = C64::from_polar(1.0, c.phi);
            (weight, rot)
        })
        .collect();

    let mut phasors: Vec<C64> = vec![C64::new(1.0, 0.0); terms.len()];
    let mut probabilities = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let amp: C64 = terms
            .iter()
            .zip(&phasors)
            .map(|((weight, _), z)| weight * z)
            .sum();
        probabilities.push(amp.norm_sqr());
        if t == t_max {
            break;
        }
        for ((_, rot), z) in terms.iter().zip(phasors.iter_mut()) {
            *z *= rot;
        }
        if t % (1 << 12) == (1 << 12) - 1 {
            for z in phasors.iter_mut() {
                *z /= z.norm();
            }
        }
    }
    SuccessCurve::new(probabilities, CurveSource::Spectral, !decomp.complete)
}

/// Triangle-inequality bound on the success probability:
/// `(M/N) (sum_k sqrt(1 + cot^2(phi_k/2)) sum_l |s(k,l)|^2)^2`.
///
/// The factor is `1/|sin(phi/2)|`, which is exactly 1 for the phase-pi
/// component, matching its `u = sqrt(M/N) s` relation.
pub fn upper_bound(decomp: &SpectralDecomposition) -> f64 {
    let m_over_n = decomp.spec.m() as f64 / decomp.spec.big_n();
    let total: f64 = decomp
        .components
        .iter()
        .map(|c| {
            let mass: f64 = c.s_comp.iter().map(|s| s.norm_sqr()).sum();
            mass / (c.phi / 2.0).sin().abs()
        })
        .sum();
    m_over_n * total * total
}

/// Smallest `t` achieving the maximum of the curve.
pub fn optimal_iteration(curve: &SuccessCurve) -> (usize, f64) {
    (curve.argmax_t, curve.max_p)
}
