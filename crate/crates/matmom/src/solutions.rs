//! The `Θ` matrix, Schur-class parameters, the linear fractional transform
//! `T_Θ[S]`, solution densities, moment recovery and the entropy bound.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockmat::{
    c64, gaussian_matrix, eye, hermitian_part, inverse, min_hermitian_eig, pairs_to_mat, spectral_norm, zeros, CMat,
    C64,
};
use crate::debranges::{DeBrangesData, DeBrangesPair, SecondKind};
use crate::error::{Error, Result};
use crate::matpoly::{blaschke, Blaschke, Geometry, MatrixPolynomial};
use crate::numerics::{poisson_log_integral, CircleQuadrature, LineQuadrature, QuadEstimate};

/// Offset used for radial boundary limits.
pub const RADIAL_OFFSET: f64 = 1e-6;

/// `J_p = [[0, −I], [−I, 0]]`.
pub fn j_p(p: usize) -> CMat {
    let mut j = zeros(2 * p, 2 * p);
    for i in 0..p {
        j[(i, p + i)] = c64(-1.0, 0.0);
        j[(p + i, i)] = c64(-1.0, 0.0);
    }
    j
}

/// `j_p = diag(I, −I)`.
pub fn sig_j(p: usize) -> CMat {
    let mut j = eye(2 * p);
    for i in p..2 * p {
        j[(i, i)] = c64(-1.0, 0.0);
    }
    j
}

/// `Θ = (1/√2)[[E₋∘, E₊∘], [E₋, E₊]]`.
#[derive(Debug, Clone)]
pub struct ThetaMatrix {
    pub t11: MatrixPolynomial,
    pub t12: MatrixPolynomial,
    pub t21: MatrixPolynomial,
    pub t22: MatrixPolynomial,
    pub geometry: Geometry,
}

impl ThetaMatrix {
    pub fn p(&self) -> usize {
        self.t11.p
    }

    pub fn eval(&self, lambda: C64) -> CMat {
        let p = self.p();
        let mut m = zeros(2 * p, 2 * p);
        m.view_mut((0, 0), (p, p)).copy_from(&self.t11.eval(lambda));
        m.view_mut((0, p), (p, p)).copy_from(&self.t12.eval(lambda));
        m.view_mut((p, 0), (p, p)).copy_from(&self.t21.eval(lambda));
        m.view_mut((p, p), (p, p)).copy_from(&self.t22.eval(lambda));
        m
    }

    /// `Θ₂₁(λ)S + Θ₂₂(λ)`.
    pub fn denominator(&self, lambda: C64, s: &CMat) -> CMat {
        self.t21.eval(lambda) * s + self.t22.eval(lambda)
    }
}

pub fn assemble_theta(data: &DeBrangesData, pair: &DeBrangesPair, sk: &SecondKind) -> Result<ThetaMatrix> {
    if pair.geometry != data.geometry {
        return Err(Error::InconsistentInputs("pair and data geometries differ".into()));
    }
    let r = c64(1.0 / std::f64::consts::SQRT_2, 0.0);
    let theta = ThetaMatrix {
        t11: sk.eminus.scale(r),
        t12: sk.eplus.scale(r),
        t21: pair.eminus.scale(r),
        t22: pair.eplus.scale(r),
        geometry: pair.geometry,
    };
    let p = data.p();
    let (jp, sj) = (j_p(p), sig_j(p));
    let worst = crate::identities::boundary_points(pair.geometry, 8)
        .into_iter()
        .map(|z| {
            let t = theta.eval(z);
            crate::blockmat::rel_residual(&(&t * &sj * t.adjoint()), &jp)
        })
        .fold(0.0, f64::max);
    if !(worst <= 1e-9) {
        return Err(Error::InconsistentInputs(format!(
            "boundary J-relation residual {worst:e} exceeds 1e-9"
        )));
    }
    Ok(theta)
}

#[derive(Debug, Clone)]
pub enum SchurRepr {
    Constant(CMat),
    /// `b_α(λ)·U` with `U` unitary.
    BlaschkeUnitary { b: Blaschke, u: CMat },
    /// Pointwise product, left to right.
    Product(Vec<SchurParameter>),
}

/// A contractive matrix function on the disc or half-plane.
#[derive(Debug, Clone)]
pub struct SchurParameter {
    pub p: usize,
    pub geometry: Geometry,
    pub repr: SchurRepr,
}

impl SchurParameter {
    pub fn zero(p: usize, geometry: Geometry) -> Self {
        Self::constant(zeros(p, p), geometry)
    }

    pub fn constant(s: CMat, geometry: Geometry) -> Self {
        SchurParameter { p: s.nrows(), geometry, repr: SchurRepr::Constant(s) }
    }

    pub fn eval(&self, lambda: C64) -> CMat {
        match &self.repr {
            SchurRepr::Constant(s) => s.clone(),
            SchurRepr::BlaschkeUnitary { b, u } => u * b.eval(lambda),
            SchurRepr::Product(fs) => fs.iter().fold(eye(self.p), |acc, f| acc * f.eval(lambda)),
        }
    }

    pub fn as_constant(&self) -> Option<&CMat> {
        match &self.repr {
            SchurRepr::Constant(s) => Some(s),
            _ => None,
        }
    }

    /// Largest spectral norm over 32 interior and 32 boundary points.
    pub fn grid_norm(&self) -> f64 {
        let mut sampler = crate::identities::Sampler::new(0x5c_u64);
        let mut pts = sampler.interior_points(self.geometry, 32);
        pts.extend(crate::identities::boundary_points(self.geometry, 32));
        pts.into_iter().map(|z| spectral_norm(&self.eval(z))).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let nrm = self.grid_norm();
        if nrm > 1.0 + 1e-12 {
            Err(Error::NotContractive(nrm))
        } else {
            Ok(())
        }
    }
}

/// Recipe for [`sample_schur`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SchurSpec {
    Zero,
    /// Either an explicit matrix or a random one scaled to `sigma_max`.
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<[f64; 2]>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_max: Option<f64>,
    },
    /// `b_α·U`; `U` is random unitary unless given.
    BlaschkeUnitary {
        alpha: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<Vec<Vec<[f64; 2]>>>,
    },
    Product { factors: Vec<SchurSpec> },
}

pub fn random_unitary(rng: &mut ChaCha8Rng, p: usize) -> CMat {
    gaussian_matrix(rng, p, p).qr().q()
}

/// Random matrix with largest singular value `sigma_max`.
pub fn random_contraction(rng: &mut ChaCha8Rng, p: usize, sigma_max: f64) -> CMat {
    let g = gaussian_matrix(rng, p, p);
    let s = spectral_norm(&g);
    g * c64(sigma_max / s, 0.0)
}

pub fn sample_schur(spec: &SchurSpec, p: usize, geometry: Geometry, seed: u64) -> Result<SchurParameter> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = build_schur(spec, p, geometry, &mut rng)?;
    s.validate()?;
    Ok(s)
}

fn build_schur(spec: &SchurSpec, p: usize, geometry: Geometry, rng: &mut ChaCha8Rng) -> Result<SchurParameter> {
    Ok(match spec {
        SchurSpec::Zero => SchurParameter::zero(p, geometry),
        SchurSpec::Constant { matrix: Some(m), .. } => SchurParameter::constant(pairs_to_mat(m, p)?, geometry),
        SchurSpec::Constant { matrix: None, sigma_max } => {
            let sm = sigma_max.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&sm) {
                return Err(Error::NotContractive(sm));
            }
            SchurParameter::constant(random_contraction(rng, p, sm), geometry)
        }
        SchurSpec::BlaschkeUnitary { alpha, unitary } => {
            let b = blaschke(c64(alpha[0], alpha[1]), geometry)?;
            let u = match unitary {
                Some(m) => pairs_to_mat(m, p)?,
                None => random_unitary(rng, p),
            };
            SchurParameter { p, geometry, repr: SchurRepr::BlaschkeUnitary { b, u } }
        }
        SchurSpec::Product { factors } => {
            let fs = factors
                .iter()
                .map(|f| build_schur(f, p, geometry, rng))
                .collect::<Result<Vec<_>>>()?;
            SchurParameter { p, geometry, repr: SchurRepr::Product(fs) }
        }
    })
}

/// `T_Θ[S](ω) = (Θ₁₁S + Θ₁₂)(Θ₂₁S + Θ₂₂)⁻¹`.
pub fn lft_eval(theta: &ThetaMatrix, s: &SchurParameter, omega: C64) -> Result<CMat> {
    let sv = s.eval(omega);
    let num = theta.t11.eval(omega) * &sv + theta.t12.eval(omega);
    let den = inverse(&theta.denominator(omega, &sv)).ok_or_else(|| Error::SingularDenominator(format!("{omega}")))?;
    Ok(num * den)
}

/// `Φ = T_Θ[S]` with its boundary density.
#[derive(Debug, Clone)]
pub struct SolutionFunction {
    pub theta: ThetaMatrix,
    pub s: SchurParameter,
}

impl SolutionFunction {
    pub fn new(theta: ThetaMatrix, s: SchurParameter) -> Result<Self> {
        if theta.p() != s.p {
            return Err(Error::ShapeMismatch("Schur parameter size differs from Theta".into()));
        }
        if theta.geometry != s.geometry {
            return Err(Error::InconsistentInputs("Schur parameter region differs from Theta".into()));
        }
        Ok(SolutionFunction { theta, s })
    }

    pub fn geometry(&self) -> Geometry {
        self.theta.geometry
    }

    pub fn phi(&self, omega: C64) -> Result<CMat> {
        lft_eval(&self.theta, &self.s, omega)
    }

    /// `Δ_S = (Φ + Φ*)/2` at a boundary point through
    /// `½(S*Θ₂₁* + Θ₂₂*)⁻¹(I − S*S)(Θ₂₁S + Θ₂₂)⁻¹`. Where `‖S‖ = 1` the
    /// radial limit of `Re Φ` is used instead.
    pub fn boundary_density(&self, z: C64) -> Result<CMat> {
        let sv = self.s.eval(z);
        if spectral_norm(&sv) < 1.0 - 1e-12 {
            if let Some(bi) = inverse(&self.theta.denominator(z, &sv)) {
                let core = eye(self.s.p) - sv.adjoint() * &sv;
                return Ok(hermitian_part(&(bi.adjoint() * core * bi * c64(0.5, 0.0))));
            }
        }
        self.radial_density(z).map_err(|_| Error::BoundaryDegenerate(format!("{z}")))
    }

    /// Radial limit of `Re Φ`: values at offsets `ε` and `2ε` inside the
    /// boundary, Richardson-extrapolated to remove the first-order term.
    pub fn radial_density(&self, z: C64) -> Result<CMat> {
        let inner = |eps: f64| match self.geometry() {
            Geometry::Disc => z * (1.0 - eps),
            Geometry::HalfPlane => z + c64(0.0, eps),
        };
        let near = hermitian_part(&self.phi(inner(RADIAL_OFFSET))?);
        let far = hermitian_part(&self.phi(inner(2.0 * RADIAL_OFFSET))?);
        Ok(near * c64(2.0, 0.0) - far)
    }

    /// `Δ_S` where `S` is strictly contractive; moment recovery needs this.
    fn strict_density(&self, z: C64) -> Result<CMat> {
        let sv = self.s.eval(z);
        if spectral_norm(&sv) >= 1.0 - 1e-12 {
            return Err(Error::BoundaryDegenerate(format!("{z}")));
        }
        self.boundary_density(z)
    }

    /// Smallest eigenvalue of `Re Φ` over the given points.
    pub fn caratheodory_min_eig(&self, pts: &[C64]) -> Result<f64> {
        let mut m = f64::INFINITY;
        for &w in pts {
            m = m.min(min_hermitian_eig(&self.phi(w)?));
        }
        Ok(m)
    }
}

/// `ĥ_k = (1/2π)∫e^{−ikt}Δ_S(t)dt` for `k = 0..=kmax`.
pub fn recover_trig_moments(sol: &SolutionFunction, kmax: usize, quad: &CircleQuadrature) -> Result<QuadEstimate<Vec<CMat>>> {
    if sol.geometry() != Geometry::Disc {
        return Err(Error::KindMismatch("trigonometric recovery needs the disc geometry".into()));
    }
    let ks: Vec<i64> = (0..=kmax as i64).collect();
    quad.fourier_coeffs(|t| sol.strict_density(C64::from_polar(1.0, t)), &ks)
}

/// `ĥ_k = ∫μᵏΔ_S(μ)dμ` for `k = 0..=kmax`. For `k` past the decay of `Δ_S`
/// the symmetric panels give the principal value.
pub fn recover_hamburger_moments(sol: &SolutionFunction, kmax: usize, quad: &LineQuadrature) -> Result<QuadEstimate<Vec<CMat>>> {
    if sol.geometry() != Geometry::HalfPlane {
        return Err(Error::KindMismatch("Hamburger recovery needs the half-plane geometry".into()));
    }
    quad.integrate(|mu| {
        let d = sol.strict_density(c64(mu, 0.0))?;
        let mut out = Vec::with_capacity(kmax + 1);
        let mut pw = 1.0;
        for _ in 0..=kmax {
            out.push(&d * c64(pw, 0.0));
            pw *= mu;
        }
        Ok(out)
    })
}

#[derive(Debug, Clone)]
pub struct ChiInfinity {
    /// `(lead E₊)⁻¹(lead E₋)`.
    pub chi_inf: CMat,
    /// `‖χ(iν) − χ∞‖` at `ν = 10³, 10⁴`.
    pub crosscheck: [f64; 2],
}

/// `χ∞ = lim χ(iν)` from the leading coefficients, cross-checked at large `ν`.
pub fn chi_infinity(pair: &DeBrangesPair) -> Result<ChiInfinity> {
    if pair.geometry != Geometry::HalfPlane {
        return Err(Error::KindMismatch("chi at infinity is a half-plane notion".into()));
    }
    if pair.eplus.degree() != pair.eminus.degree() {
        return Err(Error::InconsistentInputs("E+ and E- degrees differ".into()));
    }
    let chi_inf = inverse(&pair.eplus.leading()).ok_or_else(|| Error::SingularAtPoint("infinity".into()))?
        * pair.eminus.leading();
    let mut crosscheck = [0.0; 2];
    for (slot, nu) in crosscheck.iter_mut().zip([1e3, 1e4]) {
        *slot = (pair.chi(c64(0.0, nu))? - &chi_inf).norm();
    }
    Ok(ChiInfinity { chi_inf, crosscheck })
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictedClassCheck {
    /// `ν⁻¹‖(I + χ∞S(iν))⁻¹‖` at `ν = 10², 10³, 10⁴`.
    pub values: [f64; 3],
    pub in_class: bool,
}

/// Required decay of `ν⁻¹|(I + χ∞S(iν))⁻¹|` over two decades of `ν`. A bounded
/// inverse gives 1e-2; anything growing faster than about `ν^0.35` is rejected.
pub const RESTRICTED_DECAY: f64 = 0.05;

/// Growth condition `ν⁻¹(I + χ∞S(iν))⁻¹ → 0`, sampled at `ν = 10², 10³, 10⁴`:
/// the values must decrease by at least [`RESTRICTED_DECAY`] overall.
pub fn check_restricted_class(s: &SchurParameter, chi_inf: &CMat) -> RestrictedClassCheck {
    let mut values = [0.0; 3];
    for (slot, nu) in values.iter_mut().zip([1e2, 1e3, 1e4]) {
        let m = eye(s.p) + chi_inf * s.eval(c64(0.0, nu));
        *slot = match inverse(&m) {
            Some(inv) if min_sv(&m) > 1e-13 => inv.norm() / nu,
            _ => f64::INFINITY,
        };
    }
    let decreasing = values[0] > values[1] && values[1] > values[2];
    let in_class = values.iter().all(|v| v.is_finite()) && decreasing && values[2] <= RESTRICTED_DECAY * values[0];
    RestrictedClassCheck { values, in_class }
}

fn min_sv(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Half-plane solutions require `S` in the restricted class.
pub fn require_restricted(s: &SchurParameter, pair: &DeBrangesPair) -> Result<()> {
    let chi = chi_infinity(pair)?;
    let c = check_restricted_class(s, &chi.chi_inf);
    if c.in_class {
        Ok(())
    } else {
        Err(Error::RestrictedClass(format!("nu^-1 |(I + chi_inf S(i nu))^-1| = {:?}", c.values)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    /// Poisson average of `ln det(Φ + Φ*)`.
    pub lhs: f64,
    /// `p·ln 2 − ln det(E₊E₊* − E₋E₋*)(ω)`.
    pub rhs: f64,
    /// `rhs − lhs`, nonnegative up to quadrature error.
    pub gap: f64,
    /// Whether `S ≡ −χ(ω)*`.
    pub equality_case: bool,
    pub quadrature_error: f64,
}

/// Entropy bound at `ω`: the Poisson average of `ln det(Φ + Φ*)` over the
/// boundary is at most `p·ln 2 − ln det(E₊E₊* − E₋E₋*)(ω)`, with equality
/// exactly when `S ≡ −χ(ω)*`.
pub fn entropy_check(
    pair: &DeBrangesPair,
    theta: &ThetaMatrix,
    s: &SchurParameter,
    omega: C64,
    quad: &CircleQuadrature,
) -> Result<EntropyReport> {
    let geom = theta.geometry;
    geom.require_inside(omega)?;
    let p = s.p;
    let integrand = |z: C64| -> Result<f64> {
        let sv = s.eval(z);
        let core = eye(p) - sv.adjoint() * &sv;
        let dc = core.determinant().re;
        let db = theta.denominator(z, &sv).determinant().norm();
        if !(dc > 0.0 && db > 0.0) {
            return Err(Error::IntegrandSingular(format!("{z}")));
        }
        Ok(dc.ln() - 2.0 * db.ln())
    };
    let q = poisson_log_integral(integrand, omega, geom, quad)?;
    let k = pair.kernel_numerator(omega, omega);
    let dk = hermitian_part(&k).determinant().re;
    if !(dk > 0.0) {
        return Err(Error::SingularAtPoint(format!("{omega}")));
    }
    let rhs = p as f64 * 2f64.ln() - dk.ln();
    let target = -pair.chi(omega)?.adjoint();
    let equality_case = match s.as_constant() {
        Some(c) => (c - &target).norm() <= 1e-12 * target.norm().max(1.0),
        None => false,
    };
    Ok(EntropyReport { lhs: q.value, rhs, gap: rhs - q.value, equality_case, quadrature_error: q.error })
}

/// Interior grid of 49 points: 7 radii × 7 angles (disc) or 7 × 7 in
/// `[−3, 3] + i[0.1, 3]` (half-plane).
pub fn interior_grid(geometry: Geometry) -> Vec<C64> {
    let mut pts = Vec::with_capacity(49);
    for i in 0..7 {
        for j in 0..7 {
            pts.push(match geometry {
                Geometry::Disc => C64::from_polar(0.9 * (i as f64 + 1.0) / 7.0, 2.0 * PI * j as f64 / 7.0 + 0.1),
                Geometry::HalfPlane => c64(-3.0 + i as f64, 0.1 + 2.9 * j as f64 / 6.0),
            });
        }
    }
    pts
}
