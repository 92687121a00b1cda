//! From the Gram matrix to the de Branges side: the columns `u_j`, `z_α`,
//! the matrices `N_α`, reproducing kernels, the pairs `(E₋, E₊)`, their
//! densities, the Carathéodory function `Φ_E` and the second-kind
//! polynomials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::blockmat::{
    block, build_gram, c64, eye, herm_inv_sqrt, hermitian_part, inverse, inverse_at, CMat,
    GramPair, MatrixMoments, MomentKind, ProblemDims, ShiftStructure, C64,
};
use crate::error::{Error, Result};
use crate::matpoly::{Geometry, MatrixPolynomial};
use crate::numerics::{CircleQuadrature, LineQuadrature, QuadEstimate};

/// Relative structure residual accepted as exact Toeplitz/Hankel layout.
pub const STRUCTURE_TOL: f64 = 1e-12;

pub const DEFAULT_ALPHA_DISC: C64 = C64 { re: 0.5, im: 0.0 };
pub const DEFAULT_ALPHA_HALF_PLANE: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct DeBrangesData {
    pub gram: GramPair,
    pub shift: ShiftStructure,
    pub geometry: Geometry,
    /// `u_j = Γe_j γ_jj^{−1/2}` for `j = 0..n`.
    pub u: Vec<CMat>,
    /// `N₀ = Γ − u₀u₀*`.
    pub n0: CMat,
    /// `N• = Γ − u_n u_n*`.
    pub nbullet: CMat,
}

impl DeBrangesData {
    pub fn new(gram: GramPair, geometry: Geometry) -> Self {
        let shift = ShiftStructure::new(gram.dims);
        let n = gram.dims.n;
        let u: Vec<CMat> = (0..=n)
            .map(|j| {
                let gjj = gram.gamma_block(j, j);
                &gram.gamma * shift.e(j) * herm_inv_sqrt(&gjj)
            })
            .collect();
        let n0 = &gram.gamma - &u[0] * u[0].adjoint();
        let nbullet = &gram.gamma - &u[n] * u[n].adjoint();
        DeBrangesData { gram, shift, geometry, u, n0, nbullet }
    }

    /// Build from moments; the geometry follows the moment kind.
    pub fn from_moments(moments: &MatrixMoments) -> Result<Self> {
        let gram = build_gram(moments)?;
        let geometry = match moments.kind {
            MomentKind::Trigonometric => Geometry::Disc,
            MomentKind::Hamburger => Geometry::HalfPlane,
        };
        Ok(Self::new(gram, geometry))
    }

    pub fn dims(&self) -> ProblemDims {
        self.gram.dims
    }

    pub fn p(&self) -> usize {
        self.gram.dims.p
    }

    pub fn n(&self) -> usize {
        self.gram.dims.n
    }

    pub fn m(&self) -> usize {
        self.gram.dims.m()
    }

    pub fn g(&self) -> &CMat {
        &self.gram.g
    }

    pub fn gamma(&self) -> &CMat {
        &self.gram.gamma
    }

    pub fn a(&self) -> &CMat {
        &self.shift.a
    }

    pub fn e(&self, j: usize) -> CMat {
        self.shift.e(j)
    }

    pub fn f(&self, lambda: C64) -> CMat {
        self.shift.f(lambda)
    }

    pub fn require_toeplitz(&self) -> Result<()> {
        let r = self.gram.toeplitz_residual();
        if r <= STRUCTURE_TOL {
            Ok(())
        } else {
            Err(Error::NotToeplitz(r))
        }
    }

    pub fn require_hankel(&self) -> Result<()> {
        let r = self.gram.hankel_residual();
        if r <= STRUCTURE_TOL {
            Ok(())
        } else {
            Err(Error::NotHankel(r))
        }
    }

    /// `z_α = ΓF(α)*(F(α)ΓF(α)*)^{−1/2}`.
    pub fn z_alpha(&self, alpha: C64) -> CMat {
        let fa = self.f(alpha);
        let col = self.gamma() * fa.adjoint();
        let k = &fa * &col;
        col * herm_inv_sqrt(&k)
    }

    /// `N_α = Γ − z_α z_α*`.
    pub fn n_alpha(&self, alpha: C64) -> CMat {
        let z = self.z_alpha(alpha);
        self.gamma() - &z * z.adjoint()
    }

    /// `K_ω(λ) = F(λ)ΓF(ω)*`.
    pub fn kernel(&self, omega: C64, lambda: C64) -> CMat {
        self.f(lambda) * self.gamma() * self.f(omega).adjoint()
    }

    /// `v_n = e_{n−1} − e_n γ_nn⁻¹ γ_{n,n−1}` (needs `n ≥ 1`).
    pub fn v_n(&self) -> Result<CMat> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InconsistentInputs("two-column formulas need n >= 1".into()));
        }
        let gnn = self.gram.gamma_block(n, n);
        let ginv = inverse(&gnn).ok_or_else(|| Error::SingularAtPoint("gamma_nn".into()))?;
        Ok(self.e(n - 1) - self.e(n) * ginv * self.gram.gamma_block(n, n - 1))
    }

    /// `w_n = Γv_n γ_nn^{−1/2}`.
    pub fn w_n(&self) -> Result<CMat> {
        let n = self.n();
        Ok(self.gamma() * self.v_n()? * herm_inv_sqrt(&self.gram.gamma_block(n, n)))
    }

    /// Lower-triangular block Toeplitz matrix with `h₀` on the diagonal and
    /// `2h_k` below it, read off from a Toeplitz `G`.
    pub fn l_matrix(&self) -> CMat {
        let p = self.p();
        let n = self.n();
        let mut l = CMat::zeros(self.m(), self.m());
        for i in 0..=n {
            for j in 0..=i {
                let s = if i == j { 1.0 } else { 2.0 };
                let b = block(self.g(), p, i, j) * c64(s, 0.0);
                l.view_mut((i * p, j * p), (p, p)).copy_from(&b);
            }
        }
        l
    }

    /// `h₀ = g₀₀`.
    pub fn h0(&self) -> CMat {
        self.gram.g_block(0, 0)
    }
}

/// Which formula produced a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Construction {
    ToeplitzTwoColumn,
    ToeplitzAlpha { alpha: [f64; 2] },
    HankelAlpha { alpha: [f64; 2] },
    HankelTwoColumn,
}

#[derive(Debug, Clone)]
pub struct DeBrangesPair {
    pub eminus: MatrixPolynomial,
    pub eplus: MatrixPolynomial,
    pub geometry: Geometry,
    pub construction: Construction,
}

impl DeBrangesPair {
    /// `χ(ω) = E₊(ω)⁻¹E₋(ω)`.
    pub fn chi(&self, omega: C64) -> Result<CMat> {
        Ok(inverse_at(&self.eplus.eval(omega), omega)? * self.eminus.eval(omega))
    }

    /// `E₊(λ)E₊(ω)* − E₋(λ)E₋(ω)*`.
    pub fn kernel_numerator(&self, omega: C64, lambda: C64) -> CMat {
        self.eplus.eval(lambda) * self.eplus.eval(omega).adjoint()
            - self.eminus.eval(lambda) * self.eminus.eval(omega).adjoint()
    }
}

fn pair_of(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

/// `E₊ = Fu₀`, `E₋ = F̂u_n` for block Toeplitz `G`.
pub fn toeplitz_pair(data: &DeBrangesData) -> Result<DeBrangesPair> {
    data.require_toeplitz()?;
    let p = data.p();
    Ok(DeBrangesPair {
        eplus: MatrixPolynomial::from_column(&data.u[0], p),
        eminus: MatrixPolynomial::from_column(&data.u[data.n()], p).shift(1),
        geometry: Geometry::Disc,
        construction: Construction::ToeplitzTwoColumn,
    })
}

/// `E₊ = (1−λᾱ)Fz_α/√(1−|α|²)`, `E₋ = (λ−α)Fz_{α∘}/√(1−|α|²)`, `α∘ = 1/ᾱ`.
pub fn toeplitz_pair_alpha(data: &DeBrangesData, alpha: C64) -> Result<DeBrangesPair> {
    data.require_toeplitz()?;
    if !(alpha.norm() > 0.0 && alpha.norm() < 1.0) {
        return Err(Error::AlphaOutOfRegion(format!("{alpha}")));
    }
    let p = data.p();
    let s = c64(1.0 / (1.0 - alpha.norm_sqr()).sqrt(), 0.0);
    let circ = c64(1.0, 0.0) / alpha.conj();
    let eplus = MatrixPolynomial::from_column(&data.z_alpha(alpha), p)
        .mul_scalar_poly(&[c64(1.0, 0.0), -alpha.conj()])
        .scale(s);
    let eminus = MatrixPolynomial::from_column(&data.z_alpha(circ), p)
        .mul_scalar_poly(&[-alpha, c64(1.0, 0.0)])
        .scale(s);
    Ok(DeBrangesPair {
        eplus,
        eminus,
        geometry: Geometry::Disc,
        construction: Construction::ToeplitzAlpha { alpha: pair_of(alpha) },
    })
}

/// Coefficients of `ρ_ω(λ) = −2πi(λ − ω̄)`.
fn rho_coeffs(omega: C64) -> [C64; 2] {
    let m2pi = c64(0.0, -2.0 * PI);
    [-m2pi * omega.conj(), m2pi]
}

/// `E₊ = ρ_α Fz_α/√ρ_α(α)`, `E₋ = ρ_ᾱ Fz_ᾱ/√ρ_α(α)` for block Hankel `G`.
pub fn hankel_pair(data: &DeBrangesData, alpha: C64) -> Result<DeBrangesPair> {
    data.require_hankel()?;
    if alpha.im <= 0.0 {
        return Err(Error::AlphaOutOfRegion(format!("{alpha}")));
    }
    let p = data.p();
    let s = c64(1.0 / (4.0 * PI * alpha.im).sqrt(), 0.0);
    let eplus = MatrixPolynomial::from_column(&data.z_alpha(alpha), p)
        .mul_scalar_poly(&rho_coeffs(alpha))
        .scale(s);
    let eminus = MatrixPolynomial::from_column(&data.z_alpha(alpha.conj()), p)
        .mul_scalar_poly(&rho_coeffs(alpha.conj()))
        .scale(s);
    Ok(DeBrangesPair {
        eplus,
        eminus,
        geometry: Geometry::HalfPlane,
        construction: Construction::HankelAlpha { alpha: pair_of(alpha) },
    })
}

/// `E± = √π F((λ ± i)u_n − w_n)` for block Hankel `G`.
pub fn hankel_two_column_pair(data: &DeBrangesData) -> Result<DeBrangesPair> {
    data.require_hankel()?;
    let p = data.p();
    let un = MatrixPolynomial::from_column(&data.u[data.n()], p);
    let wn = MatrixPolynomial::from_column(&data.w_n()?, p);
    let sp = c64(PI.sqrt(), 0.0);
    let one = c64(1.0, 0.0);
    let eplus = un.mul_scalar_poly(&[c64(0.0, 1.0), one]).sub(&wn).scale(sp);
    let eminus = un.mul_scalar_poly(&[c64(0.0, -1.0), one]).sub(&wn).scale(sp);
    Ok(DeBrangesPair {
        eplus,
        eminus,
        geometry: Geometry::HalfPlane,
        construction: Construction::HankelTwoColumn,
    })
}

/// `Δ = (E₊E₊*)⁻¹` at a boundary point.
pub fn density(pair: &DeBrangesPair, at: C64) -> Result<CMat> {
    let ep = pair.eplus.eval(at);
    let inv = inverse_at(&(&ep * ep.adjoint()), at)?;
    Ok(hermitian_part(&inv))
}

#[derive(Debug, Clone)]
pub struct SecondKind {
    pub eminus: MatrixPolynomial,
    pub eplus: MatrixPolynomial,
}

/// Second-kind polynomials `E₋∘, E₊∘`. Disc: `E₊∘ = F𝕃u₀`,
/// `E₋∘ = −F̂𝕃*u_n`. Half-plane: coefficient blocks of
/// `(2/√ρ_α(α)) e₀*G(I−λA)⁻¹(I−ᾱA)z_α` and the conjugate-point analog.
pub fn second_kind(data: &DeBrangesData, pair: &DeBrangesPair) -> Result<SecondKind> {
    let p = data.p();
    match pair.construction {
        Construction::ToeplitzTwoColumn => {
            data.require_toeplitz()?;
            let l = data.l_matrix();
            let eplus = MatrixPolynomial::from_column(&(&l * &data.u[0]), p);
            let eminus = MatrixPolynomial::from_column(&(l.adjoint() * &data.u[data.n()]), p)
                .shift(1)
                .scale(c64(-1.0, 0.0));
            Ok(SecondKind { eminus, eplus })
        }
        Construction::HankelAlpha { alpha } => {
            data.require_hankel()?;
            let alpha = c64(alpha[0], alpha[1]);
            let s = c64(2.0 / (4.0 * PI * alpha.im).sqrt(), 0.0);
            let build = |beta: C64| {
                let id = eye(data.m());
                let w = (&id - data.a() * beta.conj()) * data.z_alpha(beta);
                let mut row = data.e(0).adjoint() * data.g();
                let mut coeffs = Vec::with_capacity(data.n() + 1);
                for _ in 0..=data.n() {
                    coeffs.push(&row * &w * s);
                    row = row * data.a();
                }
                MatrixPolynomial::new(p, coeffs)
            };
            Ok(SecondKind { eplus: build(alpha), eminus: build(alpha.conj()) })
        }
        other => Err(Error::KindMismatch(format!(
            "second-kind polynomials are defined for the two-column Toeplitz pair and the \
             alpha-based Hankel pair, not {other:?}"
        ))),
    }
}

/// `Φ_E(ω)` by closed form: disc `2e₀*G(I−ωAN₀G)⁻¹e₀ − h₀`, half-plane
/// `E₊∘(ω)E₊(ω)⁻¹`.
pub fn phi_e(data: &DeBrangesData, pair: &DeBrangesPair, omega: C64) -> Result<CMat> {
    pair.geometry.require_inside(omega)?;
    match pair.construction {
        Construction::ToeplitzTwoColumn => {
            let id = eye(data.m());
            let r = &id - data.a() * &data.n0 * data.g() * omega;
            let r = inverse_at(&r, omega)?;
            let e0 = data.e(0);
            Ok(e0.adjoint() * data.g() * r * &e0 * c64(2.0, 0.0) - data.h0())
        }
        Construction::HankelAlpha { .. } => {
            let sk = second_kind(data, pair)?;
            Ok(sk.eplus.eval(omega) * inverse_at(&pair.eplus.eval(omega), omega)?)
        }
        other => Err(Error::KindMismatch(format!("closed-form Phi_E is not available for {other:?}"))),
    }
}

/// `Φ_E(ω)` from its defining integral, for any pair: disc
/// `(1/2π)∫(e^{it}+ω)/(e^{it}−ω)Δ dt`, half-plane `(1/πi)∫Δ(μ)/(μ−ω)dμ`.
pub fn phi_e_quadrature(
    pair: &DeBrangesPair,
    omega: C64,
    circle: &CircleQuadrature,
    line: &LineQuadrature,
) -> Result<QuadEstimate<CMat>> {
    pair.geometry.require_inside(omega)?;
    let q = match pair.geometry {
        Geometry::Disc => circle.mean(|t| {
            let z = C64::from_polar(1.0, t);
            Ok(vec![density(pair, z)? * ((z + omega) / (z - omega))])
        })?,
        Geometry::HalfPlane => {
            let k = c64(0.0, -1.0 / PI);
            line.integrate(|mu| {
                let z = c64(mu, 0.0);
                Ok(vec![density(pair, z)? * (k / (z - omega))])
            })?
        }
    };
    Ok(QuadEstimate { value: q.value.into_iter().next().unwrap(), error: q.error, nodes: q.nodes })
}

/// `E₊♭`, the `E₊` of the reversed Toeplitz matrix `ZGZ`.
pub fn reverse_plus(data: &DeBrangesData) -> Result<MatrixPolynomial> {
    data.require_toeplitz()?;
    let z = data.shift.reversal();
    let zgz = &z * data.g() * &z;
    let rev = GramPair::factor(data.dims(), Some(MomentKind::Trigonometric), zgz)?;
    let e0 = data.e(0);
    let col = &rev.gamma * &e0 * herm_inv_sqrt(&rev.gamma_block(0, 0));
    Ok(MatrixPolynomial::from_column(&col, data.p()))
}
