//! Piecewise-polynomial coefficient functions of degree at most two.
//!
//! These carry the time dependence `fᵢ(t)` of a Hamiltonian family
//! `H(t) = Σ fᵢ(t) Hᵢ`. Pieces are half-open `[start, end)` except the last,
//! which includes its right endpoint. Polynomials are stored in shifted form
//! `c₀ + c₁ (t − start) + c₂ (t − start)²` for conditioning.

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPiece {
    pub start: f64,
    pub end: f64,
    /// `[c0, c1, c2]` in powers of `t − start`.
    pub coeffs: [f64; MAX_DEGREE + 1],
}

impl PolynomialPiece {
    pub fn eval(&self, t: f64) -> f64 {
        let s = t - self.start;
        self.coeffs[0] + s * (self.coeffs[1] + s * self.coeffs[2])
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = t - self.start;
        self.coeffs[1] + 2.0 * s * self.coeffs[2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    pieces: Vec<PolynomialPiece>,
}

impl PiecewisePolynomial {
    pub fn new(pieces: Vec<PolynomialPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("coefficient function needs at least one piece"));
        }
        for p in &pieces {
            if !(p.start.is_finite() && p.end.is_finite() && p.end > p.start) {
                return Err(Error::invalid(format!(
                    "bad piece bounds [{}, {})",
                    p.start, p.end
                )));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("non-finite polynomial coefficient"));
            }
        }
        for w in pieces.windows(2) {
            if (w[0].end - w[1].start).abs() > 1e-12 * w[0].end.abs().max(1.0) {
                return Err(Error::invalid(format!(
                    "pieces are not contiguous: {} vs {}",
                    w[0].end, w[1].start
                )));
            }
        }
        Ok(Self { pieces })
    }

    /// Single constant value over a window.
    pub fn constant(value: f64, start: f64, end: f64) -> Result<Self> {
        Self::new(vec![PolynomialPiece { start, end, coeffs: [value, 0.0, 0.0] }])
    }

    /// Piecewise-constant function: `breaks` has one more entry than `values`.
    pub fn piecewise_constant(breaks: &[f64], values: &[f64]) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::invalid("breaks must have one more entry than values"));
        }
        let pieces = values
            .iter()
            .enumerate()
            .map(|(j, &v)| PolynomialPiece { start: breaks[j], end: breaks[j + 1], coeffs: [v, 0.0, 0.0] })
            .collect();
        Self::new(pieces)
    }

    pub fn pieces(&self) -> &[PolynomialPiece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].start, self.pieces[self.pieces.len() - 1].end)
    }

    fn piece_at(&self, t: f64) -> &PolynomialPiece {
        // binary search for the piece containing t; clamp outside the domain
        let idx = self
            .pieces
            .partition_point(|p| p.end <= t)
            .min(self.pieces.len() - 1);
        &self.pieces[idx]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.piece_at(t).eval(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.piece_at(t).derivative(t)
    }

    /// Sup of `|self − other|` over `[lo, hi]`.
    ///
    /// The difference restricted to any common subinterval is a quadratic,
    /// so the sup over each subinterval is attained at an endpoint or at the
    /// interior vertex; `samples_per_piece` dense samples are folded in as
    /// well so the routine stays correct if the representation grows.
    pub fn sup_abs_difference(
        &self,
        other: &PiecewisePolynomial,
        lo: f64,
        hi: f64,
        samples_per_piece: usize,
    ) -> f64 {
        let mut cuts: Vec<f64> = vec![lo, hi];
        for p in self.pieces.iter().chain(other.pieces.iter()) {
            for b in [p.start, p.end] {
                if b > lo && b < hi {
                    cuts.push(b);
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

        let mut sup = 0.0f64;
        let mut consider = |t: f64| {
            let d = (self.eval(t) - other.eval(t)).abs();
            if d > sup {
                sup = d;
            }
        };
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            consider(a);
            consider(b);
            // interior vertex of the quadratic difference
            let pa = self.piece_at(0.5 * (a + b));
            let pb = other.piece_at(0.5 * (a + b));
            // difference in powers of t: expand both shifted forms
            let (d2, d1) = {
                let (s1, c1) = (pa.start, pa.coeffs);
                let (s2, c2) = (pb.start, pb.coeffs);
                let q2 = c1[2] - c2[2];
                let q1 = (c1[1] - 2.0 * c1[2] * s1) - (c2[1] - 2.0 * c2[2] * s2);
                (q2, q1)
            };
            if d2.abs() > 1e-300 {
                let v = -q_half(d1, d2);
                if v > a && v < b {
                    consider(v);
                }
            }
            for j in 1..samples_per_piece {
                consider(a + (b - a) * j as f64 / samples_per_piece as f64);
            }
        }
        return sup;

        fn q_half(d1: f64, d2: f64) -> f64 {
            d1 / (2.0 * d2)
        }
    }
}
