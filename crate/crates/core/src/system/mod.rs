//! Residuals of the gradient Einstein-type equation for the warped ansatz.

mod report;
mod tensor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    inner_from, laplacian_from, scalar_from, warped_scalar_from, BaseAnsatz, FiberData,
};
use crate::profiles::{Interval, Jet2, Profile};

pub use report::{grid_rows, verify, GridRow, ResidualReport, ThetaConstancy, VerifyOptions};
pub use tensor::{full_metric, full_tensor_check, full_tensor_residual, TensorCheck};

/// Structure constants of `αRic + β∇dh + μ dh⊗dh = (ρR + λ)g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub rho: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    mu: f64,
    rho: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Params::new(r.alpha, r.beta, r.mu, r.rho)
    }
}

impl Params {
    pub fn new(alpha: f64, beta: f64, mu: f64, rho: f64) -> Result<Self> {
        if ![alpha, beta, mu, rho].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams(
                "structure constants must be finite".into(),
            ));
        }
        if alpha == 0.0 && beta == 0.0 && mu == 0.0 {
            return Err(Error::InvalidParams(
                "(alpha, beta, mu) must not all vanish".into(),
            ));
        }
        Ok(Self {
            alpha,
            beta,
            mu,
            rho,
        })
    }

    pub fn require_beta(&self) -> Result<()> {
        if self.beta == 0.0 {
            Err(Error::InvalidParams("beta must be nonzero".into()))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    Degenerate,
    Nondegenerate,
    BetaZero,
}

/// Degenerate when β² = (d−2)αμ up to a relative 1e-12.
pub fn classify_degeneracy(p: &Params, d: usize) -> Degeneracy {
    if p.beta == 0.0 {
        return Degeneracy::BetaZero;
    }
    let b2 = p.beta * p.beta;
    let other = (d as f64 - 2.0) * p.alpha * p.mu;
    if (b2 - other).abs() <= 1e-12 * b2.abs().max(other.abs()) {
        Degeneracy::Degenerate
    } else {
        Degeneracy::Nondegenerate
    }
}

/// Candidate metric `Ψ⁻²δ + f²g_F` with potential h and soliton function λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAnsatz")]
pub struct WarpedAnsatz {
    pub base: BaseAnsatz,
    pub fiber: FiberData,
    pub f: Profile,
    pub h: Profile,
    pub lambda: Profile,
    pub params: Params,
}

#[derive(Deserialize)]
struct RawAnsatz {
    base: BaseAnsatz,
    fiber: FiberData,
    f: Profile,
    h: Profile,
    lambda: Profile,
    params: Params,
}

impl TryFrom<RawAnsatz> for WarpedAnsatz {
    type Error = Error;
    fn try_from(r: RawAnsatz) -> Result<Self> {
        WarpedAnsatz::new(r.base, r.fiber, r.f, r.h, r.lambda, r.params)
    }
}

/// Jets of Ψ, f, h, λ at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jets {
    pub psi: Jet2,
    pub f: Jet2,
    pub h: Jet2,
    pub lam: Jet2,
}

impl WarpedAnsatz {
    pub fn new(
        base: BaseAnsatz,
        fiber: FiberData,
        f: Profile,
        h: Profile,
        lambda: Profile,
        params: Params,
    ) -> Result<Self> {
        let a = Self {
            base,
            fiber,
            f,
            h,
            lambda,
            params,
        };
        if a.domain().is_empty() {
            return Err(Error::InvalidAnsatz(
                "profile domains have empty intersection".into(),
            ));
        }
        Ok(a)
    }

    pub fn domain(&self) -> Interval {
        self.base
            .psi
            .domain()
            .intersect(&self.f.domain())
            .intersect(&self.h.domain())
            .intersect(&self.lambda.domain())
    }

    /// Intersection of the domains of the non-spline profiles.
    pub(crate) fn open_domain(&self) -> Interval {
        [
            self.base.psi.domain(),
            self.f.domain(),
            self.h.domain(),
            self.lambda.domain(),
        ]
        .iter()
        .filter(|d| !d.closed)
        .fold(Interval::REAL_LINE, |acc, d| acc.intersect(d))
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn m(&self) -> usize {
        self.fiber.m
    }

    /// Total dimension n + m.
    pub fn dim(&self) -> usize {
        self.base.n + self.fiber.m
    }

    pub fn with_lambda(&self, lambda: Profile) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn with_params(&self, params: Params) -> Self {
        Self {
            params,
            ..self.clone()
        }
    }

    pub fn with_h(&self, h: Profile) -> Self {
        Self { h, ..self.clone() }
    }

    pub fn with_fiber(&self, fiber: FiberData) -> Self {
        Self {
            fiber,
            ..self.clone()
        }
    }

    pub fn f_jet(&self, xi: f64) -> Result<Jet2> {
        let f = self.f.eval_jet2(xi)?;
        if f.value <= 0.0 {
            return Err(Error::NonpositiveWarp { xi, value: f.value });
        }
        Ok(f)
    }

    pub(crate) fn jets(&self, xi: f64) -> Result<Jets> {
        Ok(Jets {
            psi: self.base.psi_jet(xi)?,
            f: self.f_jet(xi)?,
            h: self.h.eval_jet2(xi)?,
            lam: self.lambda.eval_jet2(xi)?,
        })
    }

    /// Scalar curvature divided by ‖ᾱ‖².
    pub(crate) fn normalized_scalar(&self, j: &Jets, fiber_in_scalar: bool) -> f64 {
        warped_scalar_from(self, j.psi, j.f, fiber_in_scalar) / self.base.alpha_bar_norm_sq
    }

    pub(crate) fn ode1_from(&self, j: &Jets) -> f64 {
        let Params {
            alpha, beta, mu, ..
        } = self.params;
        let n = self.n() as f64;
        let m = self.m() as f64;
        let (p, f, h) = (j.psi, j.f, j.h);
        let rp = p.d1 / p.value;
        let rf = f.d1 / f.value;
        alpha * (n - 2.0) * p.d2 / p.value - alpha * m * f.d2 / f.value - 2.0 * alpha * m * rf * rp
            + beta * h.d2
            + 2.0 * beta * rp * h.d1
            + mu * h.d1 * h.d1
    }

    pub(crate) fn ode2_from(&self, j: &Jets, fiber_in_scalar: bool) -> f64 {
        let Params {
            alpha, beta, rho, ..
        } = self.params;
        let n = self.n() as f64;
        let m = self.m() as f64;
        let (p, f, h) = (j.psi, j.f, j.h);
        let pp = p.value * p.d1;
        alpha * p.value * p.d2 - alpha * (n - 1.0) * p.d1 * p.d1 + alpha * m * pp * f.d1 / f.value
            - beta * pp * h.d1
            - rho * self.normalized_scalar(j, fiber_in_scalar)
            - j.lam.value / self.base.alpha_bar_norm_sq
    }

    pub(crate) fn ode3_from(&self, j: &Jets, fiber_in_scalar: bool) -> f64 {
        let Params {
            alpha, beta, rho, ..
        } = self.params;
        let n = self.n() as f64;
        let m = self.m() as f64;
        let ab = self.base.alpha_bar_norm_sq;
        let (p, f, h) = (j.psi, j.f, j.h);
        let rf = f.d1 / f.value;
        let braces = -alpha * (f.d2 / f.value - (n - 2.0) * p.d1 / p.value * rf)
            - alpha * (m - 1.0) * rf * rf
            + beta * h.d1 * rf;
        alpha * self.fiber.theta / (ab * f.value * f.value) + p.value * p.value * braces
            - rho * self.normalized_scalar(j, fiber_in_scalar)
            - j.lam.value / ab
    }

    /// Numerator and denominator (α − mρ) of the implied fiber constant.
    pub(crate) fn theta_parts(&self, j: &Jets) -> (f64, f64) {
        let Params {
            alpha, beta, rho, ..
        } = self.params;
        let n = self.n();
        let m = self.m() as f64;
        let ab = self.base.alpha_bar_norm_sq;
        let (psi, f, h) = (j.psi, j.f, j.h);
        let fv = f.value;
        let rb = scalar_from(n, ab, psi);
        let bracket = rho * rb * fv * fv
            + j.lam.value * fv * fv
            + (alpha - 2.0 * m * rho) * fv * laplacian_from(n, ab, psi, f)
            - beta * fv * inner_from(ab, psi, h, f)
            + (m - 1.0) * (alpha - m * rho) * inner_from(ab, psi, f, f);
        (bracket, alpha - m * rho)
    }

    pub(crate) fn theta_from(&self, j: &Jets) -> Result<f64> {
        let (bracket, coeff) = self.theta_parts(j);
        let Params { alpha, rho, .. } = self.params;
        let scale = alpha.abs().max((self.m() as f64 * rho).abs());
        if coeff.abs() <= 1e-14 * scale {
            return Err(Error::DegenerateCoefficient { bracket });
        }
        Ok(bracket / coeff)
    }

    /// Φ(ξ), the scalar whose ξ-derivative is the left side of the identity.
    fn lemma2_lhs_scalar(&self, j: &Jets) -> f64 {
        let Params {
            alpha,
            beta,
            mu,
            rho,
        } = self.params;
        let n = self.n();
        let m = self.m() as f64;
        let ab = self.base.alpha_bar_norm_sq;
        let r = warped_scalar_from(self, j.psi, j.f, true);
        let lap_h = laplacian_from(n, ab, j.psi, j.h);
        let hf = inner_from(ab, j.psi, j.h, j.f);
        let hh = inner_from(ab, j.psi, j.h, j.h);
        alpha * (2.0 - self.dim() as f64) * (rho * r + j.lam.value)
            - alpha * beta * lap_h
            - alpha * beta * m * hf / j.f.value
            + (beta * beta - alpha * mu) * hh
    }

    fn lemma2_rhs(&self, j: &Jets) -> f64 {
        let Params {
            alpha,
            beta,
            mu,
            rho,
        } = self.params;
        let n = self.n();
        let m = self.m() as f64;
        let ab = self.base.alpha_bar_norm_sq;
        let (psi, h) = (j.psi, j.h);
        let r = warped_scalar_from(self, psi, j.f, true);
        let lap_h = laplacian_from(n, ab, psi, h);
        let hf = inner_from(ab, psi, h, j.f);
        let hh = inner_from(ab, psi, h, h);
        let d_hh = ab
            * (2.0 * psi.value * psi.d1 * h.d1 * h.d1 + 2.0 * psi.value * psi.value * h.d1 * h.d2);
        -alpha * mu * d_hh
            + (2.0 * beta * (rho * r + j.lam.value)
                + 2.0 * mu * (alpha * lap_h + alpha * m * hf / j.f.value - beta * hh))
                * h.d1
    }
}

/// Five-point first derivative; the step shrinks near open finite ends and
/// the stencil turns one-sided at closed ends.
pub(crate) fn fd_derivative<F>(g: F, xi: f64, dom: Interval) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    fd_derivative_within(g, xi, dom, Interval::REAL_LINE)
}

/// As [`fd_derivative`], with the step also shrinking near the finite ends of
/// `scale`: the open domain of the analytic ingredients, whose ends are where
/// the integrand is steep even when `dom` has been cut down to a closed
/// interval by a spline.
pub(crate) fn fd_derivative_within<F>(g: F, xi: f64, dom: Interval, scale: Interval) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut s: f64 = 1e-3;
    for d in [dom, scale] {
        if d.closed {
            continue;
        }
        if d.lo.is_finite() {
            s = s.min(1e-3 * (xi - d.lo));
        }
        if d.hi.is_finite() {
            s = s.min(1e-3 * (d.hi - xi));
        }
    }
    if dom.closed {
        s = s.min(0.05 * (dom.hi - dom.lo));
    }
    if !(s > 0.0) {
        return Err(Error::OutOfDomain {
            xi,
            lo: dom.lo,
            hi: dom.hi,
        });
    }
    let fits = |x: f64| dom.contains(x);
    if fits(xi - 2.0 * s) && fits(xi + 2.0 * s) {
        return Ok(
            (g(xi - 2.0 * s)? - 8.0 * g(xi - s)? + 8.0 * g(xi + s)? - g(xi + 2.0 * s)?)
                / (12.0 * s),
        );
    }
    let t = if fits(xi + 4.0 * s) { s } else { -s };
    let v = [
        g(xi)?,
        g(xi + t)?,
        g(xi + 2.0 * t)?,
        g(xi + 3.0 * t)?,
        g(xi + 4.0 * t)?,
    ];
    Ok((-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * t))
}

pub fn residual_ode1(a: &WarpedAnsatz, xi: f64) -> Result<f64> {
    Ok(a.ode1_from(&a.jets(xi)?))
}

pub fn residual_ode2(a: &WarpedAnsatz, xi: f64, fiber_in_scalar: bool) -> Result<f64> {
    Ok(a.ode2_from(&a.jets(xi)?, fiber_in_scalar))
}

pub fn residual_ode3(a: &WarpedAnsatz, xi: f64, fiber_in_scalar: bool) -> Result<f64> {
    Ok(a.ode3_from(&a.jets(xi)?, fiber_in_scalar))
}

/// Fiber Einstein constant implied by the fiber equation at ξ.
pub fn theorem1b_theta(a: &WarpedAnsatz, xi: f64) -> Result<f64> {
    a.theta_from(&a.jets(xi)?)
}

/// Φ′(ξ) minus the right-hand side of the Hamilton-type identity along the ξ-line.
pub fn lemma2_residual(a: &WarpedAnsatz, xi: f64) -> Result<f64> {
    a.params.require_beta()?;
    let j = a.jets(xi)?;
    let lhs = fd_derivative_within(
        |x| Ok(a.lemma2_lhs_scalar(&a.jets(x)?)),
        xi,
        a.domain(),
        a.open_domain(),
    )?;
    Ok(lhs - a.lemma2_rhs(&j))
}
