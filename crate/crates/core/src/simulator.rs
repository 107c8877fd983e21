//! Matrix-free direct simulation of the walk: apply `Q = SCO` step by step
//! and read off the overlap with the solution superposition. This is the
//! brute-force reference the spectral path is checked against.

use nalgebra::Complex;

use crate::curve::{CurveSource, SuccessCurve};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

type C64 = Complex<f64>;

/// Default cap on the direct simulation (state holds `n 2^n` amplitudes).
pub const DEFAULT_SIM_CAP: usize = 22;

/// Walk state: one complex amplitude per (position, direction) pair, stored
/// flat as `p * n + (d - 1)`.
#[derive(Debug, Clone)]
pub struct WalkState {
    n: usize,
    amps: Vec<C64>,
}

impl WalkState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn index(&self, p: u64, d: usize) -> usize {
        p as usize * self.n + (d - 1)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Self {
        assert_eq!(amps.len(), n << n);
        Self { n, amps }
    }
}

/// The uniform state |u>: every amplitude `1/sqrt(N_e)`.
pub fn uniform_state(n: usize) -> WalkState {
    let n_e = n << n;
    let amp = C64::new(1.0 / (n_e as f64).sqrt(), 0.0);
    WalkState {
        n,
        amps: vec![amp; n_e],
    }
}

/// Applies the oracle in place: solution blocks get `-G`, i.e.
/// `a_i <- a_i - 2 mean(a)`; other blocks are untouched. O(M n).
pub fn apply_oracle(state: &mut WalkState, spec: &ProblemSpec) {
    let n = state.n;
    for &p in spec.solutions() {
        let base = p as usize * n;
        let block = &mut state.amps[base..base + n];
        let mean = block.iter().sum::<C64>() / n as f64;
        for a in block.iter_mut() {
            *a -= 2.0 * mean;
        }
    }
}

/// Applies the coin in place: every block gets `G`, i.e.
/// `a_i <- 2 mean(a) - a_i`. O(N_e).
pub fn apply_coin(state: &mut WalkState) {
    let n = state.n;
    for block in state.amps.chunks_exact_mut(n) {
        let mean = block.iter().sum::<C64>() / n as f64;
        for a in block.iter_mut() {
            *a = 2.0 * mean - *a;
        }
    }
}

/// Applies the shift in place: amplitude at `(p, d)` swaps with
/// `(p xor 2^(d-1), d)`. O(N_e).
pub fn apply_shift(state: &mut WalkState) {
    let n = state.n;
    let big_n = 1usize << n;
    for d0 in 0..n {
        let bit = 1usize << d0;
        for p in 0..big_n {
            if p & bit == 0 {
                let i = p * n + d0;
                let j = (p | bit) * n + d0;
                state.amps.swap(i, j);
            }
        }
    }
}

/// One full iteration `Q = S C O`.
pub fn apply_walk_step(state: &mut WalkState, spec: &ProblemSpec) {
    apply_oracle(state, spec);
    apply_coin(state);
    apply_shift(state);
}

/// Overlap `<s|psi>` with the uniform superposition of the solution blocks
/// (solutions spread uniformly over directions).
pub fn solution_overlap(state: &WalkState, spec: &ProblemSpec) -> C64 {
    let n = state.n;
    let scale = 1.0 / ((spec.m() * n) as f64).sqrt();
    let mut sum = C64::new(0.0, 0.0);
    for &p in spec.solutions() {
        let base = p as usize * n;
        sum += state.amps[base..base + n].iter().sum::<C64>();
    }
    sum * scale
}

/// Runs the walk for `t_max` iterations and records `p_t = |<s|psi_t>|^2`.
pub fn simulate_curve(spec: &ProblemSpec, t_max: usize) -> Result<SuccessCurve> {
    simulate_curve_capped(spec, t_max, DEFAULT_SIM_CAP)
}

/// Same as [`simulate_curve`] with an explicit cap on `n`.
pub fn simulate_curve_capped(spec: &ProblemSpec, t_max: usize, cap: usize) -> Result<SuccessCurve> {
    let n = spec.n();
    if n > cap {
        return Err(Error::ResourceCap { n, cap });
    }
    let mut state = uniform_state(n);
    let mut probabilities = Vec::with_capacity(t_max + 1);
    probabilities.push(solution_overlap(&state, spec).norm_sqr());
    for _ in 0..t_max {
        apply_walk_step(&mut state, spec);
        probabilities.push(solution_overlap(&state, spec).norm_sqr());
    }
    Ok(SuccessCurve::new(probabilities, CurveSource::Direct, false))
}
