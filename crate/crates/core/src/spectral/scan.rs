//! Eigenphase search: evaluate the least singular value of `D_theta^s` over a
//! grid on (0, pi), locate its zeros, and refine them.
//!
//! Two detectors run over every continuity segment of the grid:
//! a local-minimum detector on the least singular value (refined by
//! golden-section search) and a sign-change detector on `det(D_theta^s)`
//! (refined by bisection). The determinant detector is what makes phases far
//! below the grid step resolvable — near theta = 0 the least singular value
//! decays linearly toward the endpoint and a plain minimum search cannot
//! isolate the genuine zero riding on that ramp, while the determinant still
//! flips sign exactly there. Geometric sub-grids extend both endpoint regions
//! down to phases of order `2^{-n/2}`.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use super::pipeline::Pipeline;
use super::ScanOptions;

/// A refined eigenphase candidate with the kernel of `D_phi^s`.
#[derive(Debug, Clone)]
pub struct RefinedPhase {
    pub phi: f64,
    pub multiplicity: usize,
    /// Orthonormal kernel basis of `D_phi^s`, one column per multiplicity.
    pub kernel: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy)]
struct EvalPoint {
    theta: f64,
    /// Number of negative eigenvalues of the symmetric matrix `D_theta^s`.
    /// The derivative of `D_theta^s` in theta is strictly negative definite
    /// on every continuity segment, so each eigenvalue branch decreases
    /// monotonically and this count increases by exactly one at every zero:
    /// tracking it detects all eigenphases, including clusters that leave
    /// the determinant sign unchanged.
    negatives: usize,
}

pub(super) fn scan(pipeline: &Pipeline, opts: &ScanOptions) -> Vec<RefinedPhase> {
    let step = opts.theta_step;
    let exclusion = opts.effective_exclusion();
    let n = pipeline.n();
    let omegas = pipeline.singular_phases();
    let ratio = 10f64.powf(1.0 / 24.0);

    // Uniform grid over (0, pi), singular windows excluded.
    let mut points: Vec<f64> = Vec::new();
    let mut theta = step;
    while theta < PI - 0.5 * step {
        if omegas.iter().all(|&(_, om)| (theta - om).abs() >= exclusion) {
            points.push(theta);
        }
        theta += step;
    }

    // Geometric endpoint scans: deep enough for the smallest phase the walk
    // can produce (order 2^(-n/2)), with margin.
    let end_floor = (step / 2.0).min((-(n as f64) / 2.0 - 4.0).exp2());
    let mut g = end_floor;
    while g < step {
        points.push(g);
        points.push(PI - g);
        g *= ratio;
    }

    // Geometric pole-approach scans: eigenphases moved off a singular phase
    // by a weak coupling sit at distances down to the coupling mass over the
    // gap, far inside the exclusion window for outer weights at large n.
    // Their mass shrinks with the distance, so whatever lies below the
    // representability floor is negligible.
    for &(w, om) in omegas {
        let gap_guard = omegas
            .iter()
            .filter(|&&(_, other)| (other - om).abs() > 1e-12)
            .map(|&(_, other)| (other - om).abs() / 2.0)
            .fold(f64::INFINITY, f64::min)
            .min(om / 2.0)
            .min((PI - om) / 2.0);
        let start = exclusion.min(gap_guard);
        let floor = 2e-14 * om.max(PI - om);
        let mut delta = start;
        while delta > floor {
            if om - delta > 0.0 {
                points.push(om - delta);
            }
            if om + delta < PI {
                points.push(om + delta);
            }
            delta /= ratio;
        }
        // A cluster of roots at comparable offsets flips the parity an even
        // number of times between geometric points, so predict the offsets by
        // first-order perturbation and bracket each root individually.
        for theta in predicted_pole_roots(pipeline, w, om, floor, start) {
            for factor in [0.75, 0.92, 0.99, 1.01, 1.08, 1.25] {
                let candidate = om + (theta - om) * factor;
                if candidate > 0.0 && candidate < PI && (candidate - om).abs() > floor {
                    points.push(candidate);
                }
            }
        }
    }

    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    // Evaluate; drop points the table rejects (can only happen inside an
    // explicitly shrunk exclusion window).
    let evals: Vec<EvalPoint> = points
        .iter()
        .filter_map(|&t| eval(pipeline, t))
        .collect();

    // Split into continuity segments: the determinant has poles at the
    // uniform-walk phases, so detections never straddle one.
    let mut segments: Vec<&[EvalPoint]> = Vec::new();
    let mut start = 0;
    for i in 1..evals.len() {
        let crosses_pole = omegas
            .iter()
            .any(|&(_, om)| evals[i - 1].theta < om && om < evals[i].theta);
        if crosses_pole {
            segments.push(&evals[start..i]);
            start = i;
        }
    }
    if start < evals.len() {
        segments.push(&evals[start..]);
    }

    // (phi, count): `count` zeros proven by the negative-count jump. Every
    // eigenvalue branch decreases strictly in theta, so count tracking finds
    // each zero exactly once; a least-singular-value minimum that is not a
    // crossing is never an eigenphase (those are the excess minima a plain
    // grid scan has to reject by threshold).
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for seg in segments {
        for i in 1..seg.len() {
            if seg[i].negatives > seg[i - 1].negatives {
                localize(pipeline, seg[i - 1], seg[i], opts, 0, &mut candidates);
            }
        }
    }

    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let merge_tol = (2.0 * opts.refine_tol).max(1e-13);
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for (phi, count) in candidates {
        match merged.last_mut() {
            Some(last) if (phi - last.0).abs() <= merge_tol => last.1 += count,
            _ => merged.push((phi, count)),
        }
    }

    merged
        .into_iter()
        .filter_map(|(phi, count)| {
            let (mult, kernel) = pipeline.kernel_at(phi, opts, count)?;
            Some(RefinedPhase {
                phi,
                multiplicity: mult,
                kernel,
            })
        })
        .collect()
}

/// Recursively splits a bracket with a proven crossing count into individual
/// zeros. A cluster tighter than the refinement tolerance, or one whose
/// midpoint has sign-indeterminate eigenvalues, is emitted as a single phase
/// carrying the whole count.
fn localize(
    pipeline: &Pipeline,
    lo: EvalPoint,
    hi: EvalPoint,
    opts: &ScanOptions,
    depth: usize,
    out: &mut Vec<(f64, usize)>,
) {
    let jump = hi.negatives - lo.negatives;
    // Phases near zero need relative accuracy: their curve contribution is
    // amplified by cot(phi/2), so a micro-radian phase refined only to the
    // absolute tolerance would poison the component weights.
    let tol = opts
        .refine_tol
        .min(hi.theta * 1e-10)
        .max(hi.theta * 8.0 * f64::EPSILON);
    if hi.theta - lo.theta <= tol || depth >= opts.max_refine_iters {
        out.push((0.5 * (lo.theta + hi.theta), jump));
        return;
    }
    let mid_theta = 0.5 * (lo.theta + hi.theta);
    let mid = match eval(pipeline, mid_theta) {
        Some(point) => point,
        None => {
            out.push((mid_theta, jump));
            return;
        }
    };
    if mid.negatives > lo.negatives {
        localize(pipeline, lo, mid, opts, depth + 1, out);
    }
    if hi.negatives > mid.negatives {
        localize(pipeline, mid, hi, opts, depth + 1, out);
    }
}

/// First-order prediction of the eigenphases hugging one singular phase.
///
/// Near `omega`, `D(omega + delta) ~ R + d_hat_w(delta) Xi_w` with
/// `R = D^{s,p-bar}(omega)`. Writing `Xi_w = P P^T` (thin square root), the
/// determinant vanishes where `-1/d_hat_w` hits an eigenvalue `tau` of
/// `P^T R^{-1} P`, i.e. where the scalar denominator of weight `w` equals
/// `-tau`. Each such scalar equation is solved by bisection on both sides.
fn predicted_pole_roots(
    pipeline: &Pipeline,
    w: usize,
    om: f64,
    floor: f64,
    span: f64,
) -> Vec<f64> {
    let n = pipeline.n();
    let r = match pipeline.d_s_masked(om, w) {
        Ok(mat) => mat,
        Err(_) => return Vec::new(),
    };
    let lu = r.clone().lu();
    let xi_eig = pipeline.xi().xi(w).clone().symmetric_eigen();
    let max_ev = xi_eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &ev| acc.max(ev.abs()));
    if max_ev <= 0.0 {
        return Vec::new();
    }
    let mut taus = Vec::new();
    let mut p_cols = Vec::new();
    for i in 0..xi_eig.eigenvalues.len() {
        if xi_eig.eigenvalues[i] > 1e-13 * max_ev {
            p_cols.push(xi_eig.eigenvectors.column(i) * xi_eig.eigenvalues[i].sqrt());
        }
    }
    if p_cols.is_empty() {
        return Vec::new();
    }
    let p = DMatrix::from_columns(&p_cols);
    let solved = match lu.solve(&p) {
        Some(sol) => sol,
        None => return Vec::new(),
    };
    let small = (p.transpose() * solved).symmetric_eigen();
    for &tau in small.eigenvalues.iter() {
        if tau.abs() > 1e-300 {
            taus.push(tau);
        }
    }

    // d_hat_w(omega + delta) = -1/tau  <=>  denom_w(omega + delta) = -tau.
    // denom_w is monotone through its zero at omega on each side.
    let denom = |theta: f64| -> f64 {
        let t = (theta / 2.0).tan();
        let frac = w as f64 / n as f64;
        (1.0 - frac) * t - frac / t
    };
    let mut roots = Vec::new();
    for tau in taus {
        let target = -tau;
        for side in [-1.0, 1.0] {
            let mut lo = floor;
            let mut hi = span;
            let mut f_lo = denom(om + side * lo) - target;
            let f_hi = denom(om + side * hi) - target;
            if f_lo * f_hi > 0.0 {
                continue;
            }
            for _ in 0..200 {
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let f_mid = denom(om + side * mid) - target;
                if f_mid * f_lo > 0.0 {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(om + side * 0.5 * (lo + hi));
        }
    }
    roots
}

/// Eigenvalues below this fraction of the matrix norm have unreliable signs;
/// points carrying one contribute nothing to count tracking.
const SIGN_NOISE_REL: f64 = 1e-14;

fn eval(pipeline: &Pipeline, theta: f64) -> Option<EvalPoint> {
    let (sigma_min, sigma_max, negatives) = pipeline.sigma_profile(theta)?;
    if sigma_min < sigma_max * SIGN_NOISE_REL {
        return None;
    }
    Some(EvalPoint {
        theta,
        negatives,
    })
}

