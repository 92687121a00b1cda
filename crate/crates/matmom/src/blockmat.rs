//! Dense complex block matrices: moment data, Gram matrices and their
//! inverses, the block shift `A`, block injections `e_j` and the row
//! `F(λ) = [I, λI, …, λⁿI]`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;

/// Relative pivot threshold for the positive definiteness test.
pub const PIVOT_REL_TOL: f64 = 1e-12;
/// Eigenvalue floor for Hermitian square roots, relative to the trace.
pub const SQRT_FLOOR: f64 = 1e-14;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// `‖L − R‖ / max(1, ‖L‖, ‖R‖)` in the Frobenius norm.
pub fn rel_residual(l: &CMat, r: &CMat) -> f64 {
    let d = (l - r).norm();
    d / 1f64.max(l.norm()).max(r.norm())
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eig(m: &CMat) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(m));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn max_hermitian_eig(m: &CMat) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(m));
    eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

fn hermitian_power(m: &CMat, power: f64) -> CMat {
    let h = hermitian_part(m);
    let trace: f64 = (0..h.nrows()).map(|i| h[(i, i)].re).sum();
    let floor = SQRT_FLOOR * trace.abs().max(f64::MIN_POSITIVE);
    let eig = SymmetricEigen::new(h);
    let d = eig.eigenvalues.map(|x| c64(x.max(floor).powf(power), 0.0));
    let v = &eig.eigenvectors;
    let r = v * CMat::from_diagonal(&d) * v.adjoint();
    hermitian_part(&r)
}

/// Hermitian square root of a positive semidefinite matrix.
pub fn herm_sqrt(m: &CMat) -> CMat {
    hermitian_power(m, 0.5)
}

/// Hermitian inverse square root of a positive definite matrix.
pub fn herm_inv_sqrt(m: &CMat) -> CMat {
    hermitian_power(m, -0.5)
}

/// General inverse by LU; `None` when numerically singular.
pub fn inverse(m: &CMat) -> Option<CMat> {
    let inv = m.clone().try_inverse()?;
    if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(inv)
    } else {
        None
    }
}

pub fn inverse_at(m: &CMat, at: C64) -> Result<CMat> {
    inverse(m).ok_or_else(|| Error::SingularAtPoint(format!("{at}")))
}

/// Copy of the `(i, j)` block of size `p × p`.
pub fn block(m: &CMat, p: usize, i: usize, j: usize) -> CMat {
    m.view((i * p, j * p), (p, p)).into_owned()
}

/// Rows `k·p .. (k+1)·p` of an `m × c` matrix.
pub fn block_row(m: &CMat, p: usize, k: usize) -> CMat {
    m.rows(k * p, p).into_owned()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDims {
    pub p: usize,
    pub n: usize,
}

impl ProblemDims {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::ShapeMismatch("block size p must be positive".into()));
        }
        Ok(ProblemDims { p, n })
    }

    pub fn m(&self) -> usize {
        (self.n + 1) * self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKind {
    Trigonometric,
    Hamburger,
}

/// Moment blocks. Trigonometric data stores `h₀..h_n` (negative indices
/// follow from `h₋ₖ = h_k*`), Hamburger data stores `h₀..h_{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMoments {
    pub kind: MomentKind,
    pub dims: ProblemDims,
    pub blocks: Vec<CMat>,
}

const HERMITIAN_TOL: f64 = 1e-10;

fn check_hermitian(h: &CMat, k: usize) -> Result<()> {
    let r = (h - h.adjoint()).norm();
    if r > HERMITIAN_TOL * h.norm().max(1.0) {
        return Err(Error::Input(format!("moment h_{k} is not Hermitian (residual {r:e})")));
    }
    Ok(())
}

impl MatrixMoments {
    pub fn new(kind: MomentKind, dims: ProblemDims, blocks: Vec<CMat>) -> Result<Self> {
        let want = match kind {
            MomentKind::Trigonometric => dims.n + 1,
            MomentKind::Hamburger => 2 * dims.n + 1,
        };
        if blocks.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "expected {want} moment blocks, got {}",
                blocks.len()
            )));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.nrows() != dims.p || b.ncols() != dims.p {
                return Err(Error::ShapeMismatch(format!(
                    "moment h_{k} is {}x{}, expected {}x{}",
                    b.nrows(),
                    b.ncols(),
                    dims.p,
                    dims.p
                )));
            }
        }
        match kind {
            MomentKind::Trigonometric => check_hermitian(&blocks[0], 0)?,
            MomentKind::Hamburger => {
                for (k, b) in blocks.iter().enumerate() {
                    check_hermitian(b, k)?;
                }
            }
        }
        Ok(MatrixMoments { kind, dims, blocks })
    }

    /// Trigonometric moment `h_k` for `|k| ≤ n`.
    pub fn trig(&self, k: i64) -> CMat {
        if k >= 0 {
            self.blocks[k as usize].clone()
        } else {
            self.blocks[(-k) as usize].adjoint()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MomentFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("moment JSON: {e}")))?;
        file.into_moments()
    }

    pub fn to_json(&self) -> String {
        let file = MomentFile {
            kind: self.kind,
            p: self.dims.p,
            n: self.dims.n,
            moments: self.blocks.iter().map(mat_to_pairs).collect(),
        };
        serde_json::to_string_pretty(&file).expect("moment file serializes")
    }
}

/// Serialized form of a moment sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentFile {
    pub kind: MomentKind,
    pub p: usize,
    pub n: usize,
    pub moments: Vec<Vec<Vec<[f64; 2]>>>,
}

impl MomentFile {
    pub fn into_moments(self) -> Result<MatrixMoments> {
        let dims = ProblemDims::new(self.p, self.n)?;
        let blocks = self
            .moments
            .iter()
            .map(|b| pairs_to_mat(b, dims.p))
            .collect::<Result<Vec<_>>>()?;
        MatrixMoments::new(self.kind, dims, blocks)
    }
}

pub fn mat_to_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn pairs_to_mat(rows: &[Vec<[f64; 2]>], p: usize) -> Result<CMat> {
    if rows.len() != p || rows.iter().any(|r| r.len() != p) {
        return Err(Error::ShapeMismatch(format!("block is not {p}x{p}")));
    }
    Ok(CMat::from_fn(p, p, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}

/// Positive definite Gram matrix `G` together with `Γ = G⁻¹`.
#[derive(Debug, Clone)]
pub struct GramPair {
    pub dims: ProblemDims,
    /// Layout used to assemble `G`, if it came from moments.
    pub kind: Option<MomentKind>,
    pub g: CMat,
    pub gamma: CMat,
    /// Smallest Cholesky pivot, or smallest eigenvalue when the
    /// factorization broke down.
    pub min_pivot: f64,
}

pub fn build_gram(moments: &MatrixMoments) -> Result<GramPair> {
    let ProblemDims { p, n } = moments.dims;
    let m = moments.dims.m();
    let mut g = zeros(m, m);
    for i in 0..=n {
        for j in 0..=n {
            let b = match moments.kind {
                MomentKind::Trigonometric => moments.trig(i as i64 - j as i64),
                MomentKind::Hamburger => moments.blocks[i + j].clone(),
            };
            g.view_mut((i * p, j * p), (p, p)).copy_from(&b);
        }
    }
    GramPair::factor(moments.dims, Some(moments.kind), g)
}

impl GramPair {
    /// Factor an arbitrary Hermitian matrix; used for moment builds and for
    /// unstructured test matrices.
    pub fn factor(dims: ProblemDims, kind: Option<MomentKind>, g: CMat) -> Result<Self> {
        let m = dims.m();
        if g.nrows() != m || g.ncols() != m {
            return Err(Error::ShapeMismatch(format!("Gram matrix must be {m}x{m}")));
        }
        let threshold = PIVOT_REL_TOL * g.norm();
        let chol = Cholesky::new(hermitian_part(&g));
        let (min_pivot, chol) = match chol {
            Some(ch) => {
                let l = ch.l();
                let piv = (0..m).map(|i| l[(i, i)].norm_sqr()).fold(f64::INFINITY, f64::min);
                (piv, Some(ch))
            }
            None => (min_hermitian_eig(&g), None),
        };
        match chol {
            Some(ch) if min_pivot > threshold => {
                let gamma = hermitian_part(&ch.inverse());
                Ok(GramPair { dims, kind, g, gamma, min_pivot })
            }
            _ => Err(Error::NotPositiveDefinite { min_pivot, threshold }),
        }
    }

    pub fn g_block(&self, i: usize, j: usize) -> CMat {
        block(&self.g, self.dims.p, i, j)
    }

    pub fn gamma_block(&self, i: usize, j: usize) -> CMat {
        block(&self.gamma, self.dims.p, i, j)
    }

    /// Relative residual of `[G − A*GA]` restricted to block rows and
    /// columns `1..n`; zero exactly when `G` is block Toeplitz.
    pub fn toeplitz_residual(&self) -> f64 {
        let s = ShiftStructure::new(self.dims);
        let d = &self.g - s.a.adjoint() * &self.g * &s.a;
        trailing_norm(&d, self.dims.p) / self.g.norm().max(1.0)
    }

    /// Relative residual of `[GA − A*G]` on block rows and columns `1..n`;
    /// zero exactly when `G` is block Hankel.
    pub fn hankel_residual(&self) -> f64 {
        let s = ShiftStructure::new(self.dims);
        let d = &self.g * &s.a - s.a.adjoint() * &self.g;
        trailing_norm(&d, self.dims.p) / self.g.norm().max(1.0)
    }
}

fn trailing_norm(d: &CMat, p: usize) -> f64 {
    let k = d.nrows() - p;
    d.view((p, p), (k, k)).norm()
}

/// Block upshift `A = Σ e_j e_{j+1}ᵀ` and the injections `e_j`.
#[derive(Debug, Clone)]
pub struct ShiftStructure {
    pub dims: ProblemDims,
    pub a: CMat,
}

impl ShiftStructure {
    pub fn new(dims: ProblemDims) -> Self {
        let m = dims.m();
        let p = dims.p;
        let mut a = zeros(m, m);
        for i in 0..m.saturating_sub(p) {
            a[(i, i + p)] = c64(1.0, 0.0);
        }
        ShiftStructure { dims, a }
    }

    /// `m × p` injection of the `j`-th block.
    pub fn e(&self, j: usize) -> CMat {
        let p = self.dims.p;
        let mut e = zeros(self.dims.m(), p);
        for i in 0..p {
            e[(j * p + i, i)] = c64(1.0, 0.0);
        }
        e
    }

    /// `F(λ) = [I, λI, …, λⁿI]`, built from powers directly.
    pub fn f(&self, lambda: C64) -> CMat {
        let p = self.dims.p;
        let mut f = zeros(p, self.dims.m());
        let mut pow = c64(1.0, 0.0);
        for k in 0..=self.dims.n {
            for i in 0..p {
                f[(i, k * p + i)] = pow;
            }
            pow *= lambda;
        }
        f
    }

    pub fn fhat(&self, lambda: C64) -> CMat {
        self.f(lambda) * lambda
    }

    /// Block reversal `Z = [e_n, …, e_0]`.
    pub fn reversal(&self) -> CMat {
        let p = self.dims.p;
        let n = self.dims.n;
        let m = self.dims.m();
        let mut z = zeros(m, m);
        for k in 0..=n {
            for i in 0..p {
                z[((n - k) * p + i, k * p + i)] = c64(1.0, 0.0);
            }
        }
        z
    }
}

pub fn gaussian_matrix<R: rand::Rng>(rng: &mut R, r: usize, c: usize) -> CMat {
    use rand::RngExt;
    use rand_distr::StandardNormal;
    CMat::from_fn(r, c, |_, _| {
        c64(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Ridge added to random trigonometric weights.
pub const TRIG_RIDGE: f64 = 0.1;
/// Ridge (times the standard normal moments) added to random Hamburger data.
pub const HANKEL_RIDGE: f64 = 1e-6;

/// Seeded positive definite moment data.
///
/// Trigonometric: Fourier coefficients of `W = B(e^{it})B(e^{it})* + εI`
/// with a random matrix polynomial `B` of degree `n+1`, computed exactly as
/// `h_k = Σ_j B_{j+k}B_j*`. Hamburger: `h_k = Σ_i x_iᵏ w_i` over random real
/// nodes and positive weights, plus `ε` times the moments of the standard
/// normal law so that the ridge keeps the Hankel layout.
pub fn random_moments(kind: MomentKind, dims: ProblemDims, seed: u64) -> MatrixMoments {
    use rand::SeedableRng;
    use rand::RngExt;
    use rand_distr::StandardNormal;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ProblemDims { p, n } = dims;
    let blocks = match kind {
        MomentKind::Trigonometric => {
            let d = n + 1;
            let scale = c64(1.0 / ((p * (d + 1)) as f64).sqrt(), 0.0);
            let b: Vec<CMat> = (0..=d).map(|_| gaussian_matrix(&mut rng, p, p) * scale).collect();
            (0..=n)
                .map(|k| {
                    let mut h = zeros(p, p);
                    for j in 0..=d {
                        if j + k <= d {
                            h += &b[j + k] * b[j].adjoint();
                        }
                    }
                    if k == 0 {
                        h += eye(p) * c64(TRIG_RIDGE, 0.0);
                        h = hermitian_part(&h);
                    }
                    h
                })
                .collect()
        }
        MomentKind::Hamburger => {
            let nodes = 2 * (n + 1) + 1;
            let mut h = vec![zeros(p, p); 2 * n + 1];
            for _ in 0..nodes {
                let x: f64 = rng.sample(StandardNormal);
                let c = gaussian_matrix(&mut rng, p, p);
                let w = hermitian_part(&(&c * c.adjoint() / c64(p as f64, 0.0)));
                let mut pw = 1.0;
                for hk in h.iter_mut() {
                    *hk += &w * c64(pw, 0.0);
                    pw *= x;
                }
            }
            let mut dfact = 1.0;
            for j in 0..=n {
                if j > 0 {
                    dfact *= (2 * j - 1) as f64;
                }
                h[2 * j] += eye(p) * c64(HANKEL_RIDGE * dfact, 0.0);
            }
            h
        }
    };
    MatrixMoments::new(kind, dims, blocks).expect("random moments are well formed")
}

impl GramPair {
    /// `G + ε‖G‖H/‖H‖` for a seeded random Hermitian `H`; the structure tag
    /// is kept so that structure-bound checks can flag the damage.
    pub fn perturbed(&self, eps: f64, seed: u64) -> Result<GramPair> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = self.dims.m();
        let h = hermitian_part(&gaussian_matrix(&mut rng, m, m));
        let g = &self.g + &h * c64(eps * self.g.norm() / h.norm(), 0.0);
        GramPair::factor(self.dims, self.kind, g)
    }
}
