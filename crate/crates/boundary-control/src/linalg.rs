//! Small dense complex linear-algebra helpers shared across the crate.
//!
//! Everything here operates on `nalgebra` dynamic matrices over `Complex64`.
//! Matrices in this crate are small (dimension at most a few hundred), so
//! dense algorithms are always the right choice.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise deviation of `m` from its own adjoint.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            let d = (m[(r, c)] - m[(c, r)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Frobenius-norm deviation of `u` from unitarity, `‖U†U − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let mut g = u.adjoint() * u;
    for k in 0..n {
        g[(k, k)] -= Complex64::new(1.0, 0.0);
    }
    g.norm()
}

/// Operator 2-norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().max()
}

/// Polar projection: the unitary factor of `m`, i.e. the unitary closest to
/// `m` in Frobenius norm. `m` must have full rank; rank-deficient inputs are
/// the caller's problem (the shift construction handles them separately).
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    u * vt
}

/// Hermitian eigendecomposition with ascending eigenvalues and a
/// deterministic eigenvector gauge.
///
/// Ordering: ascending eigenvalue; exact ties broken by the row index of the
/// dominant component of the eigenvector. Each eigenvector is phased so its
/// dominant component is real and positive.
pub fn hermitian_eigen_sorted(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let dominant: Vec<usize> = (0..n)
        .map(|j| {
            let col = se.eigenvectors.column(j);
            let mut best = 0usize;
            let mut best_mag = -1.0f64;
            for (r, v) in col.iter().enumerate() {
                let mag = v.norm();
                if mag > best_mag + 1e-14 {
                    best_mag = mag;
                    best = r;
                }
            }
            best
        })
        .collect();
    idx.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .unwrap()
            .then(dominant[a].cmp(&dominant[b]))
    });

    let values: Vec<f64> = idx.iter().map(|&j| se.eigenvalues[j]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (out_col, &j) in idx.iter().enumerate() {
        let col = se.eigenvectors.column(j);
        let piv = dominant[j];
        let phase = col[piv] / cx(col[piv].norm().max(1e-300), 0.0);
        for r in 0..n {
            vectors[(r, out_col)] = col[r] * phase.conj();
        }
    }
    (values, vectors)
}

/// Deterministic pseudorandom normalized state.
pub fn seeded_state(dim: usize, seed: u64) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVector::zeros(dim);
    for k in 0..dim {
        // explicit Box-Muller keeps the stream independent of distribution-crate internals
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        v[k] = cx(r * th.cos(), r * th.sin());
    }
    let n = v.norm();
    v / cx(n, 0.0)
}

/// `|⟨a, b⟩|²` — projective fidelity between normalized states.
pub fn projective_fidelity(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}
