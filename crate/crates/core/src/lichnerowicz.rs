//! The substitution u = f^{1/σ} that turns the fiber equation into a
//! Lichnerowicz-type equation `σΔ_w u + A·u + B·u^ε = 0` on the base.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{drifted_laplacian, scalar_from, BaseAnsatz};
use crate::profiles::{Interval, Profile};
use crate::system::{Params, WarpedAnsatz};

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// σ(m) = (α − 2mρ)/(m[α − ρ(1+m)]).
pub fn sigma(p: &Params, m: usize) -> Result<f64> {
    let mf = m as f64;
    let (alpha, rho) = (p.alpha, p.rho);
    if near(alpha, 2.0 * mf * rho) {
        return Err(Error::ForbiddenParameters(format!(
            "alpha = 2m*rho ({alpha} with m = {m}, rho = {rho})"
        )));
    }
    if near(alpha, (1.0 + mf) * rho) {
        return Err(Error::ForbiddenParameters(format!(
            "alpha = (1+m)*rho ({alpha} with m = {m}, rho = {rho})"
        )));
    }
    Ok((alpha - 2.0 * mf * rho) / (mf * (alpha - rho * (1.0 + mf))))
}

#[derive(Debug, Clone, Serialize)]
pub struct LichnerowiczData {
    pub sigma: f64,
    /// w = βh/(α − 2mρ)
    pub w: Profile,
    /// u = f^{1/σ}
    pub u: Profile,
    /// (ρR_{g_B} + λ)/(α − 2mρ); a constant profile when that is exactly
    /// constant, otherwise a quintic spline sampled on `window`.
    pub coeff_a: Profile,
    /// Value of `coeff_a` when it is constant.
    pub coeff_a_constant: Option<f64>,
    /// −(α − mρ)R_{g_F}/(m(α − 2mρ))
    pub coeff_b: f64,
    /// 1 − 2σ
    pub epsilon: f64,
    pub window: (f64, f64),
    #[serde(skip)]
    rho: f64,
    #[serde(skip)]
    denom: f64,
    #[serde(skip)]
    lambda: Profile,
}

/// Sampling window inside the ansatz domain: the domain itself clipped to
/// [−20, 20] and pulled 1e-3 away from open finite ends.
pub fn default_window(dom: Interval) -> (f64, f64) {
    let pad = |end: f64| {
        if end.is_finite() && !dom.closed {
            1e-3
        } else {
            0.0
        }
    };
    (
        dom.lo.max(-20.0) + pad(dom.lo),
        dom.hi.min(20.0) - pad(dom.hi),
    )
}

impl LichnerowiczData {
    /// Exact (ρR_{g_B} + λ)/(α − 2mρ) at ξ, bypassing the sampled profile.
    pub fn coeff_a_at(&self, base: &BaseAnsatz, xi: f64) -> Result<f64> {
        if let Some(c) = self.coeff_a_constant {
            return Ok(c);
        }
        let rb = scalar_from(base.n, base.alpha_bar_norm_sq, base.psi_jet(xi)?);
        Ok((self.rho * rb + self.lambda.value(xi)?) / self.denom)
    }

    /// Sign data (σ, A, ℬ_F) where ℬ_F = R_{g_F}(α − mρ)/(α − 2mρ) = −m·coeff_b.
    pub fn bf(&self, m: usize) -> f64 {
        -(m as f64) * self.coeff_b
    }
}

pub fn build(a: &WarpedAnsatz) -> Result<LichnerowiczData> {
    build_on(a, default_window(a.domain()))
}

pub fn build_on(a: &WarpedAnsatz, window: (f64, f64)) -> Result<LichnerowiczData> {
    let Params {
        alpha, beta, rho, ..
    } = a.params;
    let m = a.m();
    let mf = m as f64;
    let sigma = sigma(&a.params, m)?;
    let denom = alpha - 2.0 * mf * rho;
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidParams(format!("empty window [{lo}, {hi}]")));
    }

    for i in 0..=200 {
        let xi = lo + (hi - lo) * i as f64 / 200.0;
        a.f_jet(xi)?;
    }

    let rb_constant = a.base.psi.as_constant().is_some();
    let coeff_a_constant = match (rb_constant, a.lambda.as_constant()) {
        (true, Some(l)) => Some(l / denom),
        _ => None,
    };
    let coeff_a = match coeff_a_constant {
        Some(c) => Profile::constant(c),
        None => {
            let knots: Vec<f64> = (0..=2000)
                .map(|i| lo + (hi - lo) * i as f64 / 2000.0)
                .collect();
            let base = &a.base;
            Profile::sampled(knots, |xi| {
                let rb = scalar_from(base.n, base.alpha_bar_norm_sq, base.psi_jet(xi)?);
                Ok((rho * rb + a.lambda.value(xi)?) / denom)
            })?
        }
    };

    Ok(LichnerowiczData {
        sigma,
        w: a.h.scaled(beta / denom),
        u: a.f.pow(1.0 / sigma),
        coeff_a,
        coeff_a_constant,
        coeff_b: -(alpha - mf * rho) * a.fiber.scalar() / (mf * denom),
        epsilon: 1.0 - 2.0 * sigma,
        window,
        rho,
        denom,
        lambda: a.lambda.clone(),
    })
}

fn positive_u(u: &Profile, xi: f64) -> Result<f64> {
    let v = u.value(xi)?;
    if v <= 0.0 {
        return Err(Error::NonpositiveU { xi, value: v });
    }
    Ok(v)
}

/// σΔ_w u + A·u + B·u^ε, with A evaluated exactly.
pub fn pde_residual(l: &LichnerowiczData, base: &BaseAnsatz, xi: f64) -> Result<f64> {
    let u = positive_u(&l.u, xi)?;
    let lap = drifted_laplacian(base, &l.w, &l.u, xi)?;
    Ok(l.sigma * lap + l.coeff_a_at(base, xi)? * u + l.coeff_b * (l.epsilon * u.ln()).exp())
}

/// Δ_φ u + A·u + B·u^ε.
pub fn general_pde_residual(
    base: &BaseAnsatz,
    phi: &Profile,
    u: &Profile,
    a: &Profile,
    b: f64,
    eps: f64,
    xi: f64,
) -> Result<f64> {
    let uv = positive_u(u, xi)?;
    let lap = drifted_laplacian(base, phi, u, xi)?;
    let power = if b == 0.0 {
        0.0
    } else {
        b * (eps * uv.ln()).exp()
    };
    Ok(lap + a.value(xi)? * uv + power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::{Chart, FiberData};

    #[test]
    fn sigma_values() {
        let p = Params::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(sigma(&p, 3).unwrap(), 1.0 / 3.0);
        let ex1 = Params::new(1.0, 2f64.sqrt(), 1.0, -1.0).unwrap();
        assert_eq!(sigma(&ex1, 2).unwrap(), 5.0 / 8.0);
        assert!(matches!(
            sigma(&Params::new(4.0, 1.0, 0.0, 1.0).unwrap(), 2),
            Err(Error::ForbiddenParameters(_))
        ));
        assert!(matches!(
            sigma(&Params::new(3.0, 1.0, 0.0, 1.0).unwrap(), 2),
            Err(Error::ForbiddenParameters(_))
        ));
    }

    #[test]
    fn ex1_data() {
        let a = catalog::ex1(3, 2).unwrap();
        let l = build(&a).unwrap();
        assert_eq!(l.sigma, 0.625);
        assert_eq!(l.coeff_b, 0.0);
        assert_eq!(l.coeff_a_constant, Some(-1.2));
        assert_eq!(l.epsilon, -0.25);
        let xi = 0.7f64;
        assert!((l.w.value(xi).unwrap() - 0.4 * xi).abs() < 1e-15);
        assert!((l.u.value(xi).unwrap() - (1.6 * xi).exp()).abs() < 1e-13);
        for x in [-2.0, -0.3, 1.9] {
            assert!(pde_residual(&l, &a.base, x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn theta_injection() {
        let a = catalog::ex1(3, 2)
            .unwrap()
            .with_fiber(FiberData::new(2, 1.0, Chart::None).unwrap());
        let l = build(&a).unwrap();
        assert!((l.coeff_b + 0.6).abs() < 1e-15);
        for x in [-1.0f64, 0.5] {
            let u = (1.6 * x).exp();
            assert!((pde_residual(&l, &a.base, x).unwrap() + 0.6 * u.powf(-0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_product_gives_unit_u() {
        let a = catalog::flat(3, 2).unwrap();
        let l = build(&a).unwrap();
        assert_eq!(l.u.value(0.3).unwrap(), 1.0);
        assert_eq!(pde_residual(&l, &a.base, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn harmonic_exponential() {
        let b = BaseAnsatz::euclidean(3).unwrap();
        let r = general_pde_residual(
            &b,
            &Profile::constant(0.0),
            &Profile::exp(1.0, 1.0),
            &Profile::constant(-1.0),
            0.0,
            0.5,
            0.4,
        );
        assert!(r.unwrap().abs() < 1e-15);
    }

    #[test]
    fn nonconstant_coefficient_is_sampled() {
        let e = catalog::entry("ex5").unwrap();
        let l = build(&e.ansatz).unwrap();
        assert!(l.coeff_a_constant.is_none());
        for x in [-2.9, 0.0, 1.234] {
            let exact = l.coeff_a_at(&e.ansatz.base, x).unwrap();
            assert!((l.coeff_a.value(x).unwrap() - exact).abs() < 1e-8);
        }
    }
}
