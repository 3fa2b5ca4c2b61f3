//! Truncated plane-wave basis on an interval and the operators built in it.
//!
//! The basis functions are `e_n(x) = exp(i 2π n x / l) / √l` for
//! `n = −N..N`, the eigenfunctions of the periodic Laplacian on `[0, l]`.
//! A magnetic Laplacian with constant potential `A` is diagonal in this
//! basis with entries `(2πn/l − A)²`, so truncation introduces no spectral
//! error for it; the position operator is dense with a closed-form matrix.

use crate::error::{Error, Result};
use crate::linalg::{cx, hermitian_eigen_sorted, hermiticity_defect, CMatrix};
use num_complex::Complex64;
use std::sync::Arc;

/// The interval `[0, l]` the particle lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalGeometry {
    length: f64,
}

impl IntervalGeometry {
    pub fn new(length: f64) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::invalid(format!(
                "interval length must be finite and positive, got {length}"
            )));
        }
        Ok(Self { length })
    }

    pub fn length(&self) -> f64 {
        self.length
    }
}

/// Symmetric truncation of the plane-wave basis: modes `−N..N`.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    geometry: IntervalGeometry,
    half_width: usize,
    modes: Vec<i64>,
}

impl FourierBasis {
    pub fn new(geometry: IntervalGeometry, half_width: usize) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::invalid("basis half-width N must be at least 1"));
        }
        let n = half_width as i64;
        Ok(Self { geometry, half_width, modes: (-n..=n).collect() })
    }

    pub fn geometry(&self) -> IntervalGeometry {
        self.geometry
    }

    pub fn length(&self) -> f64 {
        self.geometry.length
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Matrix dimension, `2N + 1`.
    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Mode numbers in row order, `−N..N`.
    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    /// Row index of mode `n`.
    pub fn index_of(&self, mode: i64) -> Option<usize> {
        let n = self.half_width as i64;
        if mode < -n || mode > n {
            None
        } else {
            Some((mode + n) as usize)
        }
    }

    /// Wavenumber `2πn/l` of the mode at row `idx`.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.modes[idx] as f64 / self.geometry.length
    }

    /// Evaluate the basis function of row `idx` at `x`.
    pub fn eval(&self, idx: usize, x: f64) -> Complex64 {
        let k = self.wavenumber(idx);
        cx(0.0, k * x).exp() / cx(self.geometry.length.sqrt(), 0.0)
    }

    /// Evaluate the wavefunction with coefficients `coeffs` at `x`.
    pub fn reconstruct(&self, coeffs: &crate::linalg::CVector, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in coeffs.iter().enumerate() {
            acc += c * self.eval(idx, x);
        }
        acc
    }
}

/// Hermitian matrix representation of an operator in a [`FourierBasis`].
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    basis: Arc<FourierBasis>,
    matrix: CMatrix,
}

/// Construction-time Hermiticity gate.
const HERMITICITY_TOL: f64 = 1e-12;
/// Looser gate applied before eigendecomposition (allows arithmetic drift).
const EIGEN_HERMITICITY_TOL: f64 = 1e-9;

impl TruncatedOperator {
    pub fn new(basis: Arc<FourierBasis>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::invalid(format!(
                "matrix is {}x{} but the basis dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dim()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITICITY_TOL {
            return Err(Error::precondition(format!(
                "matrix is not Hermitian: max |H - H†| entry = {defect:.3e}"
            )));
        }
        Ok(Self { basis, matrix })
    }

    /// Bypasses the Hermiticity gate; for negative-control test fixtures.
    pub(crate) fn new_unchecked(basis: Arc<FourierBasis>, matrix: CMatrix) -> Self {
        Self { basis, matrix }
    }

    pub fn basis(&self) -> &Arc<FourierBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Scale by a real factor.
    pub fn scaled(&self, factor: f64) -> TruncatedOperator {
        TruncatedOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * cx(factor, 0.0),
        }
    }

    /// Sum of two operators over the same basis.
    pub fn add(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        if self.dim() != other.dim() {
            return Err(Error::invalid("operator dimensions differ"));
        }
        Ok(TruncatedOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }
}

/// Eigendecomposition of a [`TruncatedOperator`].
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Spectrum {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns are the eigenvectors, ordered to match
    /// [`Spectrum::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> crate::linalg::CVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Consecutive differences `λ_{k+1} − λ_k` of the full spectrum.
    pub fn gaps(&self) -> Vec<f64> {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Magnetic Laplacian `−(d/dx − iA)²` with constant potential `A` and
/// periodic boundary conditions: diagonal entries `(2πn/l − A)²`.
pub fn build_magnetic_laplacian(potential: f64, basis: &Arc<FourierBasis>) -> Result<TruncatedOperator> {
    if !potential.is_finite() {
        return Err(Error::invalid(format!("magnetic potential must be finite, got {potential}")));
    }
    let d = basis.dim();
    let mut m = CMatrix::zeros(d, d);
    for idx in 0..d {
        let k = basis.wavenumber(idx) - potential;
        m[(idx, idx)] = cx(k * k, 0.0);
    }
    TruncatedOperator::new(basis.clone(), m)
}

/// Momentum-like diagonal term with entries `2πn/l`; the cross term in the
/// expansion of the magnetic Laplacian.
pub fn build_momentum_operator(basis: &Arc<FourierBasis>) -> TruncatedOperator {
    let d = basis.dim();
    let mut m = CMatrix::zeros(d, d);
    for idx in 0..d {
        m[(idx, idx)] = cx(basis.wavenumber(idx), 0.0);
    }
    TruncatedOperator { basis: basis.clone(), matrix: m }
}

/// Identity operator.
pub fn build_identity(basis: &Arc<FourierBasis>) -> TruncatedOperator {
    TruncatedOperator { basis: basis.clone(), matrix: CMatrix::identity(basis.dim(), basis.dim()) }
}

/// Position operator `x` as a multiplication operator:
/// `⟨e_m, x e_n⟩ = l/2` on the diagonal and `i l / (2π (m − n))` off it.
pub fn build_position_operator(basis: &Arc<FourierBasis>) -> TruncatedOperator {
    let d = basis.dim();
    let l = basis.length();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut m = CMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            m[(r, c)] = if r == c {
                cx(l / 2.0, 0.0)
            } else {
                let diff = basis.modes()[r] - basis.modes()[c];
                cx(0.0, l / (two_pi * diff as f64))
            };
        }
    }
    TruncatedOperator { basis: basis.clone(), matrix: m }
}

/// Eigendecompose a Hermitian operator.
///
/// Output is deterministic: eigenvalues ascending, ties broken by the row
/// index of each eigenvector's dominant component, and every eigenvector
/// phased so that component is real positive.
pub fn eigendecompose(op: &TruncatedOperator) -> Result<Spectrum> {
    let defect = hermiticity_defect(op.matrix());
    if defect > EIGEN_HERMITICITY_TOL {
        return Err(Error::precondition(format!(
            "operator is not Hermitian: max deviation {defect:.3e} exceeds {EIGEN_HERMITICITY_TOL:.0e}"
        )));
    }
    let (eigenvalues, eigenvectors) = hermitian_eigen_sorted(op.matrix());
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// First `count` consecutive eigenvalue differences.
pub fn gap_sequence(spectrum: &Spectrum, count: usize) -> Result<Vec<f64>> {
    if count + 1 > spectrum.dim() {
        return Err(Error::invalid(format!(
            "requested {count} gaps but the spectrum has only {} eigenvalues",
            spectrum.dim()
        )));
    }
    Ok(spectrum.eigenvalues.windows(2).take(count).map(|w| w[1] - w[0]).collect())
}

#[cfg(test)]
mod tests;
