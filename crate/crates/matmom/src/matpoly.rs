//! Matrix polynomials in one complex variable, the reflection `f#` in the
//! disc and half-plane geometries, Blaschke factors and the kernels `ρ_ω`.

use serde::{Deserialize, Serialize};

use crate::blockmat::{block_row, c64, mat_to_pairs, zeros, CMat, C64};
use crate::error::{Error, Result};

/// Trailing blocks below this fraction of the largest coefficient are dropped.
pub const TRIM_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Unit disc, boundary the unit circle.
    Disc,
    /// Upper half-plane, boundary the real line.
    HalfPlane,
}

impl Geometry {
    /// `ρ_ω(λ)`: `1 − λω̄` on the disc, `−2πi(λ − ω̄)` on the half-plane.
    pub fn rho(self, omega: C64, lambda: C64) -> C64 {
        match self {
            Geometry::Disc => c64(1.0, 0.0) - lambda * omega.conj(),
            Geometry::HalfPlane => c64(0.0, -2.0 * std::f64::consts::PI) * (lambda - omega.conj()),
        }
    }

    /// Membership in the open region `Ω₊`.
    pub fn contains(self, lambda: C64) -> bool {
        match self {
            Geometry::Disc => lambda.norm() < 1.0,
            Geometry::HalfPlane => lambda.im > 0.0,
        }
    }

    pub fn require_inside(self, lambda: C64) -> Result<()> {
        if self.contains(lambda) {
            Ok(())
        } else {
            Err(Error::OutOfRegion(format!("{lambda}")))
        }
    }
}

/// Elementary Blaschke factor with zero at `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blaschke {
    pub alpha: C64,
    pub geometry: Geometry,
}

pub fn blaschke(alpha: C64, geometry: Geometry) -> Result<Blaschke> {
    if !geometry.contains(alpha) {
        return Err(Error::AlphaOutOfRegion(format!("{alpha}")));
    }
    Ok(Blaschke { alpha, geometry })
}

impl Blaschke {
    pub fn eval(&self, lambda: C64) -> C64 {
        let a = self.alpha;
        match self.geometry {
            Geometry::Disc => (lambda - a) / (c64(1.0, 0.0) - lambda * a.conj()),
            Geometry::HalfPlane => (lambda - a) / (lambda - a.conj()),
        }
    }
}

/// `Σ λᵏ c_k` with `p × p` coefficient blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    pub p: usize,
    pub coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(p: usize, mut coeffs: Vec<CMat>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(zeros(p, p));
        }
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= TRIM_REL_TOL * max {
            coeffs.pop();
        }
        MatrixPolynomial { p, coeffs }
    }

    pub fn zero(p: usize) -> Self {
        Self::new(p, vec![])
    }

    pub fn constant(c: CMat) -> Self {
        Self::new(c.nrows(), vec![c])
    }

    /// Coefficients of `λ ↦ F(λ)v` for an `m × p` matrix `v`: the blocks of `v`.
    pub fn from_column(v: &CMat, p: usize) -> Self {
        let blocks = v.nrows() / p;
        Self::new(p, (0..blocks).map(|k| block_row(v, p, k)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> CMat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| zeros(self.p, self.p))
    }

    pub fn leading(&self) -> CMat {
        self.coeffs.last().unwrap().clone()
    }

    /// Horner evaluation.
    pub fn eval(&self, lambda: C64) -> CMat {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * lambda + c;
        }
        acc
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Product with the scalar polynomial `Σ a_k λᵏ`.
    pub fn mul_scalar_poly(&self, a: &[C64]) -> Self {
        let mut out = vec![zeros(self.p, self.p); self.coeffs.len() + a.len().max(1) - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, s) in a.iter().enumerate() {
                out[i + j] += c * *s;
            }
        }
        Self::new(self.p, out)
    }

    /// Multiply by `λᵏ`.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = vec![zeros(self.p, self.p); k];
        out.extend(self.coeffs.iter().cloned());
        Self::new(self.p, out)
    }

    pub fn mul_right(&self, m: &CMat) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|c| c * m).collect())
    }

    pub fn mul_left(&self, m: &CMat) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|c| m * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.p, (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c64(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![zeros(self.p, self.p); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.p, out)
    }

    /// Half-plane reflection `f#(λ) = f(λ̄)*`: conjugate-transposed coefficients.
    pub fn sharp_half_plane(&self) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|c| c.adjoint()).collect())
    }

    /// Disc reflection in polynomial form: `λᵈ f#(λ) = Σ c_k* λ^{d−k}`.
    pub fn reversed(&self, d: usize) -> Self {
        assert!(d >= self.degree(), "reversal degree below polynomial degree");
        let mut out = vec![zeros(self.p, self.p); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[d - k] = c.adjoint();
        }
        Self::new(self.p, out)
    }

    /// Evaluate `f#(λ)` in the given geometry.
    pub fn sharp_eval(&self, geometry: Geometry, lambda: C64) -> Result<CMat> {
        match geometry {
            Geometry::HalfPlane => Ok(self.eval(lambda.conj()).adjoint()),
            Geometry::Disc => {
                if lambda == c64(0.0, 0.0) {
                    return Err(Error::EvalAtZero);
                }
                Ok(self.eval(c64(1.0, 0.0) / lambda.conj()).adjoint())
            }
        }
    }

    pub fn to_pairs(&self) -> Vec<Vec<Vec<[f64; 2]>>> {
        self.coeffs.iter().map(mat_to_pairs).collect()
    }
}
