//! The fundamental equation checked on the explicit (n+m)-dimensional
//! coordinate metric with ᾱ = (0, …, 0, √a).

use nalgebra::DMatrix;
use serde::Serialize;

use super::WarpedAnsatz;
use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::oracle::FdOracle;

fn xi_of(a: &WarpedAnsatz, x: &[f64]) -> f64 {
    a.base.alpha_bar_norm_sq.sqrt() * x[a.n() - 1]
}

/// `Ψ(ξ)⁻²δ ⊕ f(ξ)²g_F(y)` at `x = (x₁..xₙ, y₁..yₘ)`.
pub fn full_metric(a: &WarpedAnsatz, x: &[f64]) -> Result<DMatrix<f64>> {
    let (n, m) = (a.n(), a.m());
    if x.len() != n + m {
        return Err(Error::InvalidParams(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            n + m
        )));
    }
    let xi = xi_of(a, x);
    let psi = a.base.psi_jet(xi)?.value;
    let f = a.f_jet(xi)?.value;
    let gf = a.fiber.chart_metric(&x[n..])?;
    let mut g = DMatrix::zeros(n + m, n + m);
    for i in 0..n {
        g[(i, i)] = 1.0 / (psi * psi);
    }
    g.view_mut((n, n), (m, m)).copy_from(&(gf * (f * f)));
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TensorCheck {
    /// Max-abs entry of αRic + βHess h̃ + μ dh̃⊗dh̃ − (ρR + λ)g.
    pub residual: f64,
    /// Max-abs entry of g.
    pub metric_sup: f64,
    pub scalar: f64,
}

pub fn full_tensor_check(a: &WarpedAnsatz, point: &[f64]) -> Result<TensorCheck> {
    if a.fiber.chart == Chart::None {
        return Err(Error::ChartUnavailable);
    }
    let dim = a.dim();
    let metric = |x: &[f64]| full_metric(a, x);
    let oracle = FdOracle::new(&metric, dim);
    let h = |x: &[f64]| -> Result<f64> { a.h.value(xi_of(a, x)) };
    let g = full_metric(a, point)?;
    let ginv = g.clone().try_inverse().ok_or(Error::NonFinite {
        what: "singular metric".into(),
        xi: xi_of(a, point),
    })?;
    let ric = oracle.ricci(point)?;
    let scalar = ginv.component_mul(&ric).sum();
    let hess = oracle.hessian(&h, point)?;
    let dh = oracle.gradient(&h, point)?;
    let lam = a.lambda.value(xi_of(a, point))?;
    let p = a.params;
    let lhs = ric * p.alpha + hess * p.beta + (&dh * dh.transpose()) * p.mu;
    let res = lhs - &g * (p.rho * scalar + lam);
    Ok(TensorCheck {
        residual: res.abs().max(),
        metric_sup: g.abs().max(),
        scalar,
    })
}

pub fn full_tensor_residual(a: &WarpedAnsatz, point: &[f64]) -> Result<f64> {
    full_tensor_check(a, point).map(|c| c.residual)
}
