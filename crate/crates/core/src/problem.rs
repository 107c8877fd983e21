use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest hypercube dimension the exact combinatorics supports.
pub const MAX_DIMENSION: usize = 64;

/// A search instance: the hypercube dimension `n` and the marked positions.
///
/// Positions are stored strictly increasing. `N = 2^n` and `N_e = n 2^n` are
/// always derived, never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    n: usize,
    solutions: Vec<u64>,
}

impl ProblemSpec {
    pub fn new(n: usize, mut solutions: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionZero);
        }
        if n > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge {
                n,
                max: MAX_DIMENSION,
            });
        }
        if solutions.is_empty() {
            return Err(Error::NoSolutions);
        }
        solutions.sort_unstable();
        for pair in solutions.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateSolution(pair[0]));
            }
        }
        let limit = position_count(n);
        for &p in &solutions {
            if u128::from(p) >= limit {
                return Err(Error::SolutionOutOfRange { position: p, n });
            }
        }
        Ok(Self { n, solutions })
    }

    /// Draws `m` distinct solution positions uniformly, deterministic in `seed`.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionZero);
        }
        if n > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge {
                n,
                max: MAX_DIMENSION,
            });
        }
        let count = position_count(n);
        if m == 0 {
            return Err(Error::NoSolutions);
        }
        if u128::try_from(m).unwrap() > count {
            return Err(Error::SolutionOutOfRange {
                position: m as u64,
                n,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // sample() works on usize; fine for any n this is realistically called with.
        let picks = sample(&mut rng, count as usize, m);
        let solutions = picks.into_iter().map(|p| p as u64).collect();
        Self::new(n, solutions)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of marked positions M.
    pub fn m(&self) -> usize {
        self.solutions.len()
    }

    pub fn solutions(&self) -> &[u64] {
        &self.solutions
    }

    /// N = 2^n as f64 (exact: powers of two are representable).
    pub fn big_n(&self) -> f64 {
        (self.n as f64).exp2()
    }

    /// Workspace dimension N_e = n 2^n, for sizes that fit in usize.
    pub fn n_e(&self) -> usize {
        self.n * (1usize << self.n)
    }

    pub fn is_solution(&self, p: u64) -> bool {
        self.solutions.binary_search(&p).is_ok()
    }

    /// True when every position is marked; the spectral pipeline rejects this.
    pub fn all_solutions(&self) -> bool {
        u128::try_from(self.m()).unwrap() == position_count(self.n)
    }
}

fn position_count(n: usize) -> u128 {
    1u128 << n
}
