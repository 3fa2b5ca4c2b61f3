//! Time-ordered evolution for `H(t) = Σ fᵢ(t) Hᵢ` through products of
//! exponentials of the generator frozen on a uniform subdivision of the
//! window, with adaptive refinement and a numerically certified bound on
//! how far apart the evolutions of two nearby coefficient families can be.

pub mod coeffs;

use crate::error::{Error, Result};
use crate::linalg::{cx, hermitian_eigen_sorted, hermiticity_defect, seeded_state, CMatrix, CVector};
use crate::spectral::TruncatedOperator;
use coeffs::PiecewisePolynomial;
use std::collections::HashMap;

/// Where in each subinterval the generator is frozen.
///
/// The construction freezes at the left endpoint; midpoint freezing
/// converges one order faster but is a different construction, so it is
/// off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreezeRule {
    #[default]
    LeftEndpoint,
    Midpoint,
}

/// A Hamiltonian family `H(t) = Σ fᵢ(t) Hᵢ` on a time window.
#[derive(Debug, Clone)]
pub struct CoefficientPath {
    terms: Vec<TruncatedOperator>,
    coefficients: Vec<PiecewisePolynomial>,
    start: f64,
    end: f64,
}

impl CoefficientPath {
    pub fn new(
        terms: Vec<TruncatedOperator>,
        coefficients: Vec<PiecewisePolynomial>,
        window: (f64, f64),
    ) -> Result<Self> {
        let (start, end) = window;
        if terms.is_empty() {
            return Err(Error::invalid("a coefficient path needs at least one term"));
        }
        if terms.len() != coefficients.len() {
            return Err(Error::invalid(format!(
                "{} terms but {} coefficient functions",
                terms.len(),
                coefficients.len()
            )));
        }
        let dim = terms[0].dim();
        if terms.iter().any(|t| t.dim() != dim) {
            return Err(Error::invalid("all terms must share one basis dimension"));
        }
        if !(start.is_finite() && end.is_finite() && end >= start) {
            return Err(Error::invalid(format!("bad time window [{start}, {end}]")));
        }
        for (i, f) in coefficients.iter().enumerate() {
            let (lo, hi) = f.domain();
            if lo > start + 1e-12 || hi < end - 1e-12 {
                return Err(Error::invalid(format!(
                    "coefficient {i} covers [{lo}, {hi}] but the window is [{start}, {end}]"
                )));
            }
        }
        Ok(Self { terms, coefficients, start, end })
    }

    /// Time-independent family from constant coefficients.
    pub fn constant(terms: Vec<TruncatedOperator>, values: &[f64], window: (f64, f64)) -> Result<Self> {
        let coeffs = values
            .iter()
            .map(|&v| PiecewisePolynomial::constant(v, window.0, window.1.max(window.0 + 1.0)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms, coeffs, window)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }

    pub fn terms(&self) -> &[TruncatedOperator] {
        &self.terms
    }

    pub fn coefficients(&self) -> &[PiecewisePolynomial] {
        &self.coefficients
    }

    /// Same family considered on a subwindow.
    pub fn with_window(&self, start: f64, end: f64) -> Result<CoefficientPath> {
        if start < self.start - 1e-12 || end > self.end + 1e-12 || end < start {
            return Err(Error::invalid("subwindow must lie inside the path window"));
        }
        let mut path = self.clone();
        path.start = start;
        path.end = end;
        Ok(path)
    }

    /// Coefficient values at `t`.
    pub fn values_at(&self, t: f64) -> Vec<f64> {
        self.coefficients.iter().map(|f| f.eval(t)).collect()
    }

    /// `Σ fᵢ(t) Hᵢ` as a matrix.
    pub fn frozen_matrix(&self, t: f64) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (f, h) in self.coefficients.iter().zip(&self.terms) {
            let v = f.eval(t);
            if v != 0.0 {
                m += h.matrix() * cx(v, 0.0);
            }
        }
        m
    }
}

/// `exp(−i dt H)` for Hermitian `H`, through the eigendecomposition
/// `H = V Λ V†`, so the result is unitary to roundoff. A zero step returns
/// the identity exactly.
pub fn step_exponential(op: &TruncatedOperator, dt: f64) -> Result<CMatrix> {
    if !dt.is_finite() {
        return Err(Error::invalid("time step must be finite"));
    }
    let defect = hermiticity_defect(op.matrix());
    if defect > 1e-9 {
        return Err(Error::precondition(format!(
            "generator is not Hermitian: deviation {defect:.3e}"
        )));
    }
    if dt == 0.0 {
        return Ok(CMatrix::identity(op.dim(), op.dim()));
    }
    Ok(exponential_from_parts(&hermitian_eigen_sorted(op.matrix()), dt))
}

fn exponential_from_parts((values, vectors): &(Vec<f64>, CMatrix), dt: f64) -> CMatrix {
    let d = values.len();
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let phase = cx(0.0, -dt * lambda).exp();
        for r in 0..d {
            scaled[(r, j)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Keys the eigendecomposition cache on the exact frozen coefficient values.
fn freeze_key(values: &[f64]) -> Vec<u64> {
    values.iter().map(|v| v.to_bits()).collect()
}

/// Shared per-run cache of eigendecompositions of frozen generators.
struct FrozenCache {
    map: HashMap<Vec<u64>, (Vec<f64>, CMatrix)>,
}

impl FrozenCache {
    fn new() -> Self {
        Self { map: HashMap::new() }
    }

    fn factor(&mut self, path: &CoefficientPath, t: f64, dt: f64) -> CMatrix {
        let values = path.values_at(t);
        let key = freeze_key(&values);
        let parts = self
            .map
            .entry(key)
            .or_insert_with(|| hermitian_eigen_sorted(&path.frozen_matrix(t)));
        if dt == 0.0 {
            CMatrix::identity(path.dim(), path.dim())
        } else {
            exponential_from_parts(parts, dt)
        }
    }
}

fn frozen_time(path: &CoefficientPath, k: u64, j: u64, rule: FreezeRule) -> f64 {
    let delta = path.duration() / k as f64;
    match rule {
        FreezeRule::LeftEndpoint => path.start + (j as f64) * delta,
        FreezeRule::Midpoint => path.start + (j as f64 + 0.5) * delta,
    }
}

/// Apply the k-fold frozen propagator to a block of column states without
/// materializing the factors.
fn apply_frozen(path: &CoefficientPath, k: u64, rule: FreezeRule, block: &CMatrix) -> CMatrix {
    let delta = path.duration() / k as f64;
    let mut cache = FrozenCache::new();
    let mut out = block.clone();
    for j in 0..k {
        let factor = cache.factor(path, frozen_time(path, k, j, rule), delta);
        out = factor * out;
    }
    out
}

/// Factors beyond this count are not stored; the propagator keeps the path
/// and regenerates them on demand.
const MATERIALIZE_LIMIT: u64 = 4096;

enum Body {
    Dense(Vec<CMatrix>),
    Virtual { path: CoefficientPath, rule: FreezeRule },
}

/// Ordered product of unitary factors approximating the evolution over a
/// window: factor `j` is `exp(−iΔ H(tⱼ))` with `tⱼ` frozen per the
/// [`FreezeRule`], later factors applied later (leftmost in the product).
pub struct PiecewisePropagator {
    window: (f64, f64),
    subdivisions: u64,
    body: Body,
}

impl PiecewisePropagator {
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn subdivisions(&self) -> u64 {
        self.subdivisions
    }

    /// The stored factors, oldest first, when the subdivision was small
    /// enough to materialize.
    pub fn factors(&self) -> Option<&[CMatrix]> {
        match &self.body {
            Body::Dense(f) => Some(f),
            Body::Virtual { .. } => None,
        }
    }

    pub fn apply(&self, state: &CVector) -> CVector {
        let block = CMatrix::from_columns(&[state.clone()]);
        self.apply_block(&block).column(0).into_owned()
    }

    pub fn apply_block(&self, block: &CMatrix) -> CMatrix {
        match &self.body {
            Body::Dense(factors) => {
                let mut out = block.clone();
                for f in factors {
                    out = f * out;
                }
                out
            }
            Body::Virtual { path, rule } => apply_frozen(path, self.subdivisions, *rule, block),
        }
    }

    /// The full product as a matrix.
    pub fn total_matrix(&self) -> CMatrix {
        let d = match &self.body {
            Body::Dense(f) => f[0].nrows(),
            Body::Virtual { path, .. } => path.dim(),
        };
        self.apply_block(&CMatrix::identity(d, d))
    }

    /// `‖U†U − I‖_F` of the total product.
    pub fn unitarity_defect(&self) -> f64 {
        crate::linalg::unitarity_defect(&self.total_matrix())
    }
}

/// The k-fold frozen-generator propagator over the path's window.
pub fn rs_propagator(path: &CoefficientPath, k: u64) -> Result<PiecewisePropagator> {
    rs_propagator_with(path, k, FreezeRule::LeftEndpoint)
}

pub fn rs_propagator_with(
    path: &CoefficientPath,
    k: u64,
    rule: FreezeRule,
) -> Result<PiecewisePropagator> {
    if k < 1 {
        return Err(Error::invalid("subdivision count must be at least 1"));
    }
    if k <= MATERIALIZE_LIMIT {
        let delta = path.duration() / k as f64;
        let mut cache = FrozenCache::new();
        let factors: Vec<CMatrix> = (0..k)
            .map(|j| cache.factor(path, frozen_time(path, k, j, rule), delta))
            .collect();
        Ok(PiecewisePropagator { window: path.window(), subdivisions: k, body: Body::Dense(factors) })
    } else {
        Ok(PiecewisePropagator {
            window: path.window(),
            subdivisions: k,
            body: Body::Virtual { path: path.clone(), rule },
        })
    }
}

/// Seed for the pseudorandom member of the refinement probe set.
pub const PROBE_SEED: u64 = 0x5EED;
/// Hard ceiling on the subdivision count during refinement.
pub const REFINEMENT_CAP: u64 = 1 << 20;

fn probe_block(path: &CoefficientPath) -> CMatrix {
    let d = path.dim();
    let basis = path.terms()[0].basis();
    let mut cols = Vec::with_capacity(3);
    for mode in [0i64, 1] {
        let mut v = CVector::zeros(d);
        let idx = basis.index_of(mode).unwrap_or(d / 2);
        v[idx] = cx(1.0, 0.0);
        cols.push(v);
    }
    cols.push(seeded_state(d, PROBE_SEED));
    CMatrix::from_columns(&cols)
}

/// Double the subdivision from 8 until successive propagators agree on the
/// probe set (the Fourier modes 0 and 1 plus one fixed pseudorandom state)
/// within `tol`; returns the finer propagator and its subdivision count.
pub fn refine_to_tolerance(
    path: &CoefficientPath,
    tol: f64,
) -> Result<(PiecewisePropagator, u64)> {
    refine_with(path, tol, FreezeRule::LeftEndpoint)
}

pub fn refine_with(
    path: &CoefficientPath,
    tol: f64,
    rule: FreezeRule,
) -> Result<(PiecewisePropagator, u64)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let probes = probe_block(path);
    let mut k = 8u64;
    let mut coarse = apply_frozen(path, k, rule, &probes);
    loop {
        let fine = apply_frozen(path, 2 * k, rule, &probes);
        let gap = block_gap(&fine, &coarse);
        if gap <= tol {
            return Ok((rs_propagator_with(path, 2 * k, rule)?, 2 * k));
        }
        k *= 2;
        if 2 * k > REFINEMENT_CAP {
            return Err(Error::NonConvergence { k, gap });
        }
        coarse = fine;
    }
}

fn block_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..a.ncols() {
        let g = (a.column(c) - b.column(c)).norm();
        if g > worst {
            worst = g;
        }
    }
    worst
}

/// Time-stamped states along the refined evolution.
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<CVector>,
    subdivisions: u64,
    max_norm_drift: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }

    pub fn subdivisions(&self) -> u64 {
        self.subdivisions
    }

    /// Largest deviation of a sample's norm from one.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    pub fn final_state(&self) -> &CVector {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// Propagate `state` over the path, refining the subdivision to `tol`, and
/// record the state at every point of the final grid (or a uniform
/// subsample of at most `max_rows` rows when the grid is finer than that).
pub fn evolve(path: &CoefficientPath, state: &CVector, tol: f64) -> Result<Trajectory> {
    evolve_sampled(path, state, tol, usize::MAX)
}

pub fn evolve_sampled(
    path: &CoefficientPath,
    state: &CVector,
    tol: f64,
    max_rows: usize,
) -> Result<Trajectory> {
    if (state.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::precondition(format!(
            "initial state must be normalized within 1e-8, norm = {:.12}",
            state.norm()
        )));
    }
    let (_, k) = refine_to_tolerance(path, tol)?;
    let rule = FreezeRule::LeftEndpoint;
    let delta = path.duration() / k as f64;
    let keep_stride = ((k + 1) as usize).div_ceil(max_rows.max(2)).max(1);

    let mut cache = FrozenCache::new();
    let mut psi = state.clone();
    let mut times = vec![path.window().0];
    let mut states = vec![psi.clone()];
    let mut drift = (psi.norm() - 1.0).abs();
    for j in 0..k {
        let factor = cache.factor(path, frozen_time(path, k, j, rule), delta);
        psi = factor * psi;
        let nd = (psi.norm() - 1.0).abs();
        if nd > drift {
            drift = nd;
        }
        if (j + 1) % keep_stride as u64 == 0 || j + 1 == k {
            times.push(path.window().0 + (j + 1) as f64 * delta);
            states.push(psi.clone());
        }
    }
    Ok(Trajectory { times, states, subdivisions: k, max_norm_drift: drift })
}

/// Per-term contribution to the distance bound.
#[derive(Debug, Clone)]
pub struct BoundComponent {
    /// `‖fᵢ − gᵢ‖_∞` over the window.
    pub coefficient_gap: f64,
    /// `‖Hᵢ Ψ‖` on the initial state.
    pub term_weight: f64,
    /// `(T − s) · coefficient_gap · term_weight`.
    pub contribution: f64,
}

/// Outcome of certifying the evolution distance of two coefficient
/// families against the perturbation bound.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub bound: f64,
    pub measured: f64,
    pub components: Vec<BoundComponent>,
}

impl BoundReport {
    pub fn margin(&self) -> f64 {
        self.bound - self.measured
    }
}

/// Samples per coefficient piece used for the sup-norm estimate.
const SUP_SAMPLES_PER_PIECE: usize = 10_000;
/// Refinement tolerance for the two certified propagators.
const CERTIFY_TOL: f64 = 1e-8;

/// Certify `‖U₁Ψ − U₂Ψ‖ ≤ (T−s) Σᵢ ‖fᵢ−gᵢ‖_∞ ‖HᵢΨ‖` for two families
/// sharing the same terms. Returns the report, or a certification-failure
/// error carrying both values if the inequality fails (a propagator
/// defect).
pub fn certify_distance_bound(
    path1: &CoefficientPath,
    path2: &CoefficientPath,
    state: &CVector,
) -> Result<BoundReport> {
    certify_distance_bound_with_defect(path1, path2, state, 0.0)
}

/// Same as [`certify_distance_bound`] but with an injected phase defect on
/// the second propagator's output. A nonzero defect models a broken
/// propagator and exists so the failure path can be exercised end to end;
/// production callers pass zero.
pub fn certify_distance_bound_with_defect(
    path1: &CoefficientPath,
    path2: &CoefficientPath,
    state: &CVector,
    defect_phase: f64,
) -> Result<BoundReport> {
    if path1.terms().len() != path2.terms().len() {
        return Err(Error::invalid("paths must share the same terms"));
    }
    for (a, b) in path1.terms().iter().zip(path2.terms()) {
        if a.matrix() != b.matrix() {
            return Err(Error::invalid("paths must share the same terms"));
        }
    }
    let w1 = path1.window();
    let w2 = path2.window();
    if (w1.0 - w2.0).abs() > 1e-12 || (w1.1 - w2.1).abs() > 1e-12 {
        return Err(Error::invalid("paths must share the same window"));
    }
    if (state.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::precondition("state must be normalized"));
    }

    let duration = path1.duration();
    let mut components = Vec::with_capacity(path1.terms().len());
    let mut bound = 0.0;
    for ((f, g), h) in path1.coefficients().iter().zip(path2.coefficients()).zip(path1.terms()) {
        let gap = f.sup_abs_difference(g, w1.0, w1.1, SUP_SAMPLES_PER_PIECE);
        let weight = (h.matrix() * state).norm();
        let contribution = duration * gap * weight;
        bound += contribution;
        components.push(BoundComponent { coefficient_gap: gap, term_weight: weight, contribution });
    }

    let (u1, _) = refine_to_tolerance(path1, CERTIFY_TOL)?;
    let (u2, _) = refine_to_tolerance(path2, CERTIFY_TOL)?;
    let out1 = u1.apply(state);
    let mut out2 = u2.apply(state);
    if defect_phase != 0.0 {
        out2[0] *= cx(0.0, defect_phase).exp();
    }
    let measured = (out1 - out2).norm();

    if measured > bound + 1e-8 {
        return Err(Error::CertificationFailure { bound, measured });
    }
    Ok(BoundReport { bound, measured, components })
}
