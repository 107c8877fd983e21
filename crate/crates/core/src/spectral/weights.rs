//! Per-weight diagonal tables.
//!
//! Every diagonal operator in the pipeline depends on a position only through
//! its Hamming weight, so it is stored as a length-(n+1) table. This is what
//! keeps the whole method polynomial in `n`.

/// Denominator magnitudes below this flag the entry as singular.
pub(crate) const SINGULAR_DENOM_TOL: f64 = 1e-12;

/// One entry of the diagonal table `D_hat_phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DhatEntry {
    Finite(f64),
    /// The denominator vanishes: `cos(phi) = 1 - 2w/n`, the complex
    /// eigenphase of the uniform walk at this weight.
    Singular,
}

/// `D_hat_phi(w) = 1 / ((1 - w/n) tan(phi/2) - (w/n) cot(phi/2))`.
pub fn d_hat_entry(phi: f64, w: usize, n: usize) -> DhatEntry {
    debug_assert!(phi > 0.0 && phi < std::f64::consts::PI);
    let t = (phi / 2.0).tan();
    let frac = w as f64 / n as f64;
    let denom = (1.0 - frac) * t - frac / t;
    if denom.abs() < SINGULAR_DENOM_TOL {
        DhatEntry::Singular
    } else {
        DhatEntry::Finite(1.0 / denom)
    }
}

/// Full table of `D_hat_phi` over weights `0..=n`; `Err(w)` reports the first
/// singular weight.
pub(crate) fn d_hat_table(phi: f64, n: usize) -> Result<Vec<f64>, usize> {
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=n {
        match d_hat_entry(phi, w, n) {
            DhatEntry::Finite(v) => out.push(v),
            DhatEntry::Singular => return Err(w),
        }
    }
    Ok(out)
}

/// Same table with the entry at `masked_w` forced to zero (the `p-bar`
/// variant used at singular phases).
pub(crate) fn d_hat_table_masked(phi: f64, n: usize, masked_w: usize) -> Result<Vec<f64>, usize> {
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=n {
        if w == masked_w {
            out.push(0.0);
            continue;
        }
        match d_hat_entry(phi, w, n) {
            DhatEntry::Finite(v) => out.push(v),
            DhatEntry::Singular => return Err(w),
        }
    }
    Ok(out)
}

/// Block average of `Gamma_phi^{-2}`:
/// `T_phi(w) = (1 - w/n) tan^2(phi/2) + (w/n) cot^2(phi/2)`.
pub(crate) fn t_table(phi: f64, n: usize) -> Vec<f64> {
    let t = (phi / 2.0).tan();
    let t2 = t * t;
    let c2 = 1.0 / t2;
    (0..=n)
        .map(|w| {
            let frac = w as f64 / n as f64;
            (1.0 - frac) * t2 + frac * c2
        })
        .collect()
}

/// Weights `1 + W(w)` with `W(w) = w / (n - w)` for the phase-pi correlation.
///
/// The `w = n` slot never acts on the constrained kernel (the corresponding
/// Xi_n annihilates it), so its W part is set to zero.
pub(crate) fn minus_one_table(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|w| {
            if w == n {
                1.0
            } else {
                1.0 + w as f64 / (n - w) as f64
            }
        })
        .collect()
}
