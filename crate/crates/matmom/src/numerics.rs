//! Quadrature on the unit circle and on the real line.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::blockmat::{c64, CMat, C64};
use crate::error::{Error, Result};
use crate::matpoly::Geometry;

/// A converged quadrature value with the difference between the last two
/// refinements as its error estimate.
#[derive(Debug, Clone)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error: f64,
    pub nodes: usize,
}

/// Equispaced trapezoid rule on `[0, 2π)` with node doubling.
#[derive(Debug, Clone, Copy)]
pub struct CircleQuadrature {
    pub m: usize,
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for CircleQuadrature {
    fn default() -> Self {
        CircleQuadrature { m: 4096, tol: 1e-11, max_doublings: 4 }
    }
}

/// Gauss–Legendre panels on `(−π/2, π/2)` after the substitution `μ = tan t`.
#[derive(Debug, Clone, Copy)]
pub struct LineQuadrature {
    pub order: usize,
    pub panels: usize,
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        LineQuadrature { order: 32, panels: 16, tol: 1e-9, max_doublings: 8 }
    }
}

fn max_diff(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_norm(a: &[CMat]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn accumulate(acc: &mut Vec<CMat>, v: Vec<CMat>, w: C64) {
    if acc.is_empty() {
        *acc = v.into_iter().map(|x| x * w).collect();
    } else {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x * w;
        }
    }
}

impl CircleQuadrature {
    /// `(1/2π)∫ f(t) dt` for a vector of matrix-valued integrands. Doubling
    /// reuses the previous nodes.
    pub fn mean<F>(&self, mut f: F) -> Result<QuadEstimate<Vec<CMat>>>
    where
        F: FnMut(f64) -> Result<Vec<CMat>>,
    {
        let mut m = self.m;
        let mut sum: Vec<CMat> = Vec::new();
        for j in 0..m {
            accumulate(&mut sum, f(2.0 * PI * j as f64 / m as f64)?, c64(1.0, 0.0));
        }
        let mut est: Vec<CMat> = sum.iter().map(|s| s / c64(m as f64, 0.0)).collect();
        let mut last_diff = f64::INFINITY;
        for _ in 0..self.max_doublings {
            for j in 0..m {
                let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                accumulate(&mut sum, f(t)?, c64(1.0, 0.0));
            }
            m *= 2;
            let next: Vec<CMat> = sum.iter().map(|s| s / c64(m as f64, 0.0)).collect();
            last_diff = max_diff(&next, &est);
            est = next;
            if last_diff <= self.tol * max_norm(&est).max(1.0) {
                return Ok(QuadEstimate { value: est, error: last_diff, nodes: m });
            }
        }
        Err(Error::Nonconvergence { last_diff, nodes: m })
    }

    /// `(1/2π)∫ e^{−ikt} f(t) dt` for each requested `k`.
    pub fn fourier_coeffs<F>(&self, mut f: F, ks: &[i64]) -> Result<QuadEstimate<Vec<CMat>>>
    where
        F: FnMut(f64) -> Result<CMat>,
    {
        self.mean(|t| {
            let v = f(t)?;
            Ok(ks.iter().map(|&k| &v * C64::from_polar(1.0, -(k as f64) * t)).collect())
        })
    }
}

impl LineQuadrature {
    fn rule(&self) -> GaussLegendre {
        GaussLegendre::new(NonZeroUsize::new(self.order).expect("positive order"))
    }

    fn once<F>(&self, rule: &GaussLegendre, panels: usize, f: &mut F) -> Result<Vec<CMat>>
    where
        F: FnMut(f64) -> Result<Vec<CMat>>,
    {
        let h = PI / panels as f64;
        let mut acc = Vec::new();
        for k in 0..panels {
            let lo = -PI / 2.0 + k as f64 * h;
            for &(x, w) in rule.as_node_weight_pairs() {
                let t = lo + 0.5 * h * (x + 1.0);
                let c = t.cos();
                let jac = 0.5 * h * w / (c * c);
                accumulate(&mut acc, f(t.tan())?, c64(jac, 0.0));
            }
        }
        Ok(acc)
    }

    /// `∫_ℝ f(μ) dμ` for a vector of matrix-valued integrands, doubling the
    /// panel count until successive estimates agree.
    pub fn integrate<F>(&self, mut f: F) -> Result<QuadEstimate<Vec<CMat>>>
    where
        F: FnMut(f64) -> Result<Vec<CMat>>,
    {
        let rule = self.rule();
        let mut panels = self.panels;
        let mut est = self.once(&rule, panels, &mut f)?;
        let mut last_diff = f64::INFINITY;
        for _ in 0..self.max_doublings {
            panels *= 2;
            let next = self.once(&rule, panels, &mut f)?;
            last_diff = max_diff(&next, &est);
            est = next;
            if last_diff <= self.tol * max_norm(&est).max(1.0) {
                return Ok(QuadEstimate { value: est, error: last_diff, nodes: panels * self.order });
            }
        }
        Err(Error::Nonconvergence { last_diff, nodes: panels * self.order })
    }

    /// `∫_ℝ μᵏ f(μ) dμ` for a single weight power.
    pub fn line_integral<F>(&self, mut f: F, k: u32) -> Result<QuadEstimate<CMat>>
    where
        F: FnMut(f64) -> Result<CMat>,
    {
        let q = self.integrate(|mu| Ok(vec![f(mu)? * c64(mu.powi(k as i32), 0.0)]))?;
        Ok(QuadEstimate { value: q.value.into_iter().next().unwrap(), error: q.error, nodes: q.nodes })
    }
}

/// Poisson-weighted boundary average of a real function: on the disc
/// `(1/2π)∫ f(e^{it}) (1−|ω|²)/|e^{it}−ω|² dt`, on the half-plane
/// `(1/π)∫ f(μ) Im ω/|μ−ω|² dμ`.
///
/// Half-plane integrands may grow like `s·ln|μ|`; the slope is measured at
/// large `|μ|`, the term `s·ln|μ−ω̄|` is subtracted and its exact Poisson
/// average `s·ln(2 Im ω)` added back.
pub fn poisson_log_integral<F>(
    mut f: F,
    omega: C64,
    geometry: Geometry,
    quad: &CircleQuadrature,
) -> Result<QuadEstimate<f64>>
where
    F: FnMut(C64) -> Result<f64>,
{
    geometry.require_inside(omega)?;
    let checked = |z: C64, f: &mut F| -> Result<f64> {
        let v = f(z)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::IntegrandSingular(format!("{z}")))
        }
    };
    match geometry {
        Geometry::Disc => {
            let w = 1.0 - omega.norm_sqr();
            let q = quad.mean(|t| {
                let z = C64::from_polar(1.0, t);
                let v = checked(z, &mut f)? * w / (z - omega).norm_sqr();
                Ok(vec![CMat::from_element(1, 1, c64(v, 0.0))])
            })?;
            Ok(QuadEstimate { value: q.value[0][(0, 0)].re, error: q.error, nodes: q.nodes })
        }
        Geometry::HalfPlane => {
            let (a, b) = (omega.re, omega.im);
            let big = [1e6, 1e7];
            let mut slope = 0.0;
            for sign in [1.0, -1.0] {
                let f1 = checked(c64(a + sign * big[0], 0.0), &mut f)?;
                let f2 = checked(c64(a + sign * big[1], 0.0), &mut f)?;
                slope += 0.5 * (f2 - f1) / 10f64.ln();
            }
            if (slope - slope.round()).abs() < 1e-3 {
                slope = slope.round();
            }
            let wbar = omega.conj();
            // μ = a + b·tan(θ/2) carries the Poisson measure to dθ/2π. The
            // offset is half the finest spacing, so no node hits θ = ±π.
            let offset = PI / (quad.m << quad.max_doublings) as f64;
            let q = quad.mean(|t| {
                let theta = t - PI + offset;
                let mu = a + b * (0.5 * theta).tan();
                let z = c64(mu, 0.0);
                let v = checked(z, &mut f)? - slope * (z - wbar).norm().ln();
                Ok(vec![CMat::from_element(1, 1, c64(v, 0.0))])
            })?;
            let value = q.value[0][(0, 0)].re + slope * (2.0 * b).ln();
            Ok(QuadEstimate { value, error: q.error, nodes: q.nodes })
        }
    }
}
