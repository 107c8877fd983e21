//! The effective-subspace spectral method.
//!
//! The walk operator restricted to the effective subspace has at most
//! `2(n-1)M + 2` eigenphases. They are located as zeros of the least singular
//! value of the `M x M` matrix `D_theta^s`, scanned over (0, pi); the kernel
//! at each zero parametrizes the eigenvectors, whose overlaps with the
//! uniform state and the solution superposition are corrected into true
//! projections. Two special sectors are handled analytically: the real
//! eigenvalue -1 (kernel of the alternating-sign row) and the phases where
//! the diagonal table is singular (constrained to `ker Xi_w`). The +1 sector
//! carries zero projections of both key vectors and is only counted.

mod components;
mod pipeline;
mod scan;
mod weights;

pub use scan::RefinedPhase;
pub use weights::{d_hat_entry, DhatEntry};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{psd_rank, RankTolerance, XiStack};
use crate::error::Result;
use crate::problem::ProblemSpec;
use pipeline::Pipeline;

type C64 = Complex<f64>;

/// Absolute floor under the relative zero-singular-value threshold.
pub(crate) const ZERO_SV_ABS_FLOOR: f64 = 1e-12;

/// Knobs of the eigenphase search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Grid step over (0, pi).
    pub theta_step: f64,
    /// Bracket width at which refinement stops, radians.
    pub refine_tol: f64,
    /// Relative threshold under which a singular value counts as zero.
    pub zero_sv_tol: f64,
    /// Half-width of the window excluded around each singular phase;
    /// defaults to two grid steps.
    pub singular_exclusion: Option<f64>,
    /// Iteration cap for golden-section and bisection refinement.
    pub max_refine_iters: usize,
    /// Default curve length for downstream consumers.
    pub t_max: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            theta_step: std::f64::consts::PI / 2000.0,
            refine_tol: 1e-12,
            zero_sv_tol: 1e-8,
            singular_exclusion: None,
            max_refine_iters: 200,
            t_max: 10_000,
        }
    }
}

impl ScanOptions {
    pub fn effective_exclusion(&self) -> f64 {
        self.singular_exclusion.unwrap_or(2.0 * self.theta_step)
    }

    fn halved(&self) -> Self {
        Self {
            theta_step: self.theta_step / 2.0,
            ..*self
        }
    }
}

/// Which construction produced a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    Regular,
    MinusOne,
    Singular { weight: usize },
}

/// One eigenphase of the walk inside the effective subspace, with the
/// components of |s> and |u> in that eigenspace.
///
/// `u(k,l) = sqrt(M/N) (1 - i cot(phi/2)) s(k,l)` in every sector (the factor
/// degenerates to `sqrt(M/N)` at phi = pi); components at `-phi` are the
/// conjugates of those at `phi`.
#[derive(Debug, Clone)]
pub struct PhaseComponent {
    /// Eigenphase in (-pi, pi].
    pub phi: f64,
    pub multiplicity: usize,
    pub s_comp: Vec<C64>,
    pub u_comp: Vec<C64>,
    pub kind: ComponentKind,
}

impl PhaseComponent {
    /// Total |s|^2 mass carried by this component.
    pub fn s_mass(&self) -> f64 {
        self.s_comp.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn u_mass(&self) -> f64 {
        self.u_comp.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// The full spectral decomposition of one problem.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub spec: ProblemSpec,
    /// Components sorted by phase ascending in (-pi, pi].
    pub components: Vec<PhaseComponent>,
    /// Dimension of the effective subspace.
    pub dim_e: usize,
    /// Total multiplicity actually constructed.
    pub found: usize,
    /// Multiplicity required for completeness: dim E minus the M - 1
    /// dimensions of the +1 sector, which is intentionally not built.
    pub expected: usize,
    pub complete: bool,
    pub options: ScanOptions,
}

impl SpectralDecomposition {
    /// Components with their phase in (0, pi], one per conjugate pair plus
    /// the phase-pi sector.
    pub fn positive_components(&self) -> impl Iterator<Item = &PhaseComponent> {
        self.components.iter().filter(|c| c.phi > 0.0)
    }
}

/// Runs the full pipeline: effective dimension, criterion scan, component
/// reconstruction for the regular, phase-pi and singular sectors, conjugate
/// duplication, and a completeness check. On a shortfall the scan is rerun
/// once with half the grid step; a remaining shortfall is reported through
/// `complete = false`, never silently.
pub fn decompose(spec: &ProblemSpec, options: &ScanOptions) -> Result<SpectralDecomposition> {
    let pipeline = Pipeline::new(spec)?;
    let dim_e = effective_dim_from(&pipeline);
    let expected = dim_e - (spec.m() - 1);

    let mut opts = *options;
    let mut components = build_components(&pipeline, &opts);
    let mut found: usize = components.iter().map(|c| c.multiplicity).sum();
    if found < expected && !mass_closed(&components) {
        opts = opts.halved();
        components = build_components(&pipeline, &opts);
        found = components.iter().map(|c| c.multiplicity).sum();
    }

    // Complete when every slot of the effective subspace is accounted for,
    // or when the captured components already carry the full mass of both
    // key vectors (phases below the floating-point resolution of the scan
    // carry mass of the same vanishing order).
    let complete = found >= expected || mass_closed(&components);

    components.sort_by(|a, b| a.phi.partial_cmp(&b.phi).unwrap());
    Ok(SpectralDecomposition {
        spec: spec.clone(),
        components,
        dim_e,
        found,
        expected,
        complete,
        options: opts,
    })
}

/// Mass-closure tolerance: both unit-vector decompositions must close to
/// within this before a numerically short component count is still reported
/// as complete.
const MASS_CLOSURE_TOL: f64 = 1e-6;

fn mass_closed(components: &[PhaseComponent]) -> bool {
    let s_mass: f64 = components.iter().map(|c| c.s_mass()).sum();
    let u_mass: f64 = components.iter().map(|c| c.u_mass()).sum();
    (s_mass - 1.0).abs() <= MASS_CLOSURE_TOL && (u_mass - 1.0).abs() <= MASS_CLOSURE_TOL
}

fn effective_dim_from(pipeline: &Pipeline) -> usize {
    let tol = RankTolerance::default();
    let sum: usize = (1..pipeline.n())
        .map(|w| psd_rank(pipeline.xi().xi(w), tol))
        .sum();
    2 + 2 * sum
}

fn build_components(pipeline: &Pipeline, opts: &ScanOptions) -> Vec<PhaseComponent> {
    let mut components = Vec::new();
    for refined in scan::scan(pipeline, opts) {
        if let Some(c) = components::regular(pipeline, refined.phi, &refined.kernel) {
            components.push(components::conjugate(&c));
            components.push(c);
        }
    }
    if let Some(c) = components::minus_one(pipeline) {
        components.push(c);
    }
    for w in 1..pipeline.n() {
        if let Some(c) = components::singular(pipeline, w, opts) {
            components.push(components::conjugate(&c));
            components.push(c);
        }
    }
    components
}

/// The matrix `D_theta^s` for one angle, built from the Xi stack.
pub fn d_s_matrix(spec: &ProblemSpec, theta: f64) -> Result<DMatrix<f64>> {
    Pipeline::new(spec)?.d_s(theta)
}

/// Least singular value of `D_theta^s`; zero exactly at the eigenphases of
/// the walk with eigenvectors in the effective subspace (regular sector).
pub fn criterion(spec: &ProblemSpec, theta: f64) -> Result<f64> {
    let d = d_s_matrix(spec, theta)?;
    let eig = d.symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &ev| acc.min(ev.abs())))
}

/// Grid scan plus refinement over (0, pi): every detected eigenphase with
/// the kernel of its `D_phi^s`.
pub fn scan_and_refine(spec: &ProblemSpec, options: &ScanOptions) -> Result<Vec<RefinedPhase>> {
    let pipeline = Pipeline::new(spec)?;
    Ok(scan::scan(&pipeline, options))
}

/// The transformation f: the Xi-weighted sum of a per-weight table.
pub fn f_transform(spec: &ProblemSpec, weights: &[f64]) -> Result<DMatrix<f64>> {
    Ok(XiStack::new(spec)?.weighted_sum(weights))
}
