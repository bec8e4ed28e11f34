//! Curvature of the conformally flat base `Ψ⁻²δ` and of the warped metric
//! `Ψ⁻²δ + f²g_F`, reduced to the single variable ξ = ᾱ·x.
//!
//! Tensor-valued quantities on the base have the coordinate form
//! `rank1·ᾱᵢᾱⱼ + iso·δᵢⱼ`; only ‖ᾱ‖² enters any scalar.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{Jet2, Profile};
use crate::system::WarpedAnsatz;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBase")]
pub struct BaseAnsatz {
    pub n: usize,
    pub alpha_bar_norm_sq: f64,
    pub psi: Profile,
}

#[derive(Deserialize)]
struct RawBase {
    n: usize,
    alpha_bar_norm_sq: f64,
    psi: Profile,
}

impl TryFrom<RawBase> for BaseAnsatz {
    type Error = Error;
    fn try_from(r: RawBase) -> Result<Self> {
        BaseAnsatz::new(r.n, r.alpha_bar_norm_sq, r.psi)
    }
}

impl BaseAnsatz {
    pub fn new(n: usize, alpha_bar_norm_sq: f64, psi: Profile) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAnsatz(format!(
                "base dimension must be at least 2, got {n}"
            )));
        }
        if !(alpha_bar_norm_sq > 0.0 && alpha_bar_norm_sq.is_finite()) {
            return Err(Error::InvalidAnsatz(format!(
                "|alpha|^2 must be positive, got {alpha_bar_norm_sq}"
            )));
        }
        Ok(Self {
            n,
            alpha_bar_norm_sq,
            psi,
        })
    }

    /// Flat base (Ψ ≡ 1) with a unit direction vector.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(n, 1.0, Profile::constant(1.0))
    }

    pub fn is_flat(&self) -> bool {
        self.psi.as_constant() == Some(1.0)
    }

    /// Ψ with its derivatives, refusing non-positive values.
    pub fn psi_jet(&self, xi: f64) -> Result<Jet2> {
        let j = self.psi.eval_jet2(xi)?;
        if j.value <= 0.0 {
            return Err(Error::NonpositiveProfile {
                name: "psi".into(),
                xi,
                value: j.value,
            });
        }
        Ok(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Euclidean,
    Sphere,
    Hyperbolic,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFiber")]
pub struct FiberData {
    pub m: usize,
    pub theta: f64,
    pub chart: Chart,
}

#[derive(Deserialize)]
struct RawFiber {
    m: usize,
    theta: f64,
    #[serde(default = "no_chart")]
    chart: Chart,
}

fn no_chart() -> Chart {
    Chart::None
}

impl TryFrom<RawFiber> for FiberData {
    type Error = Error;
    fn try_from(r: RawFiber) -> Result<Self> {
        FiberData::new(r.m, r.theta, r.chart)
    }
}

impl FiberData {
    pub fn new(m: usize, theta: f64, chart: Chart) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidAnsatz(
                "fiber dimension must be at least 1".into(),
            ));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidAnsatz(
                "fiber Einstein constant must be finite".into(),
            ));
        }
        if let Some(expected) = Self::chart_theta(m, chart) {
            if theta != expected {
                return Err(Error::InvalidAnsatz(format!(
                    "{chart:?} chart of dimension {m} has theta = {expected}, not {theta}"
                )));
            }
        }
        Ok(Self { m, theta, chart })
    }

    pub fn euclidean(m: usize) -> Result<Self> {
        Self::new(m, 0.0, Chart::Euclidean)
    }

    pub fn sphere(m: usize) -> Result<Self> {
        Self::new(m, m as f64 - 1.0, Chart::Sphere)
    }

    pub fn hyperbolic(m: usize) -> Result<Self> {
        Self::new(m, -(m as f64 - 1.0), Chart::Hyperbolic)
    }

    fn chart_theta(m: usize, chart: Chart) -> Option<f64> {
        let k = m as f64 - 1.0;
        match chart {
            Chart::Euclidean => Some(0.0),
            Chart::Sphere => Some(k),
            Chart::Hyperbolic => Some(-k),
            Chart::None => None,
        }
    }

    /// R_{g_F} = m·θ.
    pub fn scalar(&self) -> f64 {
        self.m as f64 * self.theta
    }

    /// Coordinate metric of the fiber chart at `y`.
    pub fn chart_metric(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let conf = match self.chart {
            Chart::Euclidean => 1.0,
            Chart::Sphere => 4.0 / ((1.0 + r2) * (1.0 + r2)),
            Chart::Hyperbolic => {
                if r2 >= 1.0 {
                    return Err(Error::OutOfDomain {
                        xi: r2.sqrt(),
                        lo: 0.0,
                        hi: 1.0,
                    });
                }
                4.0 / ((1.0 - r2) * (1.0 - r2))
            }
            Chart::None => return Err(Error::ChartUnavailable),
        };
        Ok(DMatrix::identity(self.m, self.m) * conf)
    }
}

/// Coordinate-basis tensor `rank1·ᾱᵢᾱⱼ + iso·δᵢⱼ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankOneIso {
    pub rank1: f64,
    pub iso: f64,
}

impl RankOneIso {
    pub fn matrix(&self, alpha_bar: &[f64]) -> DMatrix<f64> {
        let a = DVector::from_column_slice(alpha_bar);
        &a * a.transpose() * self.rank1 + DMatrix::identity(a.len(), a.len()) * self.iso
    }

    /// Eigenvalues of the g_B-self-adjoint operator `Ψ²·M`: along ᾱ, and on ᾱ⊥.
    pub fn metric_eigs(&self, psi: f64, alpha_bar_norm_sq: f64) -> (f64, f64) {
        let p2 = psi * psi;
        (
            p2 * (self.rank1 * alpha_bar_norm_sq + self.iso),
            p2 * self.iso,
        )
    }
}

impl std::ops::Add for RankOneIso {
    type Output = RankOneIso;
    fn add(self, o: RankOneIso) -> RankOneIso {
        RankOneIso {
            rank1: self.rank1 + o.rank1,
            iso: self.iso + o.iso,
        }
    }
}

// Jet-level kernels shared with the residual code.

pub(crate) fn ricci_from(n: usize, a: f64, psi: Jet2) -> RankOneIso {
    let nf = n as f64;
    let (p, dp, ddp) = (psi.value, psi.d1, psi.d2);
    RankOneIso {
        rank1: (nf - 2.0) * ddp / p,
        iso: a * (p * ddp - (nf - 1.0) * dp * dp) / (p * p),
    }
}

pub(crate) fn scalar_from(n: usize, a: f64, psi: Jet2) -> f64 {
    let nf = n as f64;
    a * (nf - 1.0) * (2.0 * psi.value * psi.d2 - nf * psi.d1 * psi.d1)
}

pub(crate) fn hessian_from(a: f64, psi: Jet2, q: Jet2) -> RankOneIso {
    let r = psi.d1 / psi.value;
    RankOneIso {
        rank1: q.d2 + 2.0 * r * q.d1,
        iso: -a * r * q.d1,
    }
}

pub(crate) fn laplacian_from(n: usize, a: f64, psi: Jet2, q: Jet2) -> f64 {
    let nf = n as f64;
    a * psi.value * psi.value * (q.d2 - (nf - 2.0) * psi.d1 / psi.value * q.d1)
}

pub(crate) fn inner_from(a: f64, psi: Jet2, p: Jet2, q: Jet2) -> f64 {
    a * psi.value * psi.value * p.d1 * q.d1
}

pub fn conformal_ricci(base: &BaseAnsatz, xi: f64) -> Result<RankOneIso> {
    Ok(ricci_from(
        base.n,
        base.alpha_bar_norm_sq,
        base.psi_jet(xi)?,
    ))
}

pub fn conformal_scalar(base: &BaseAnsatz, xi: f64) -> Result<f64> {
    Ok(scalar_from(
        base.n,
        base.alpha_bar_norm_sq,
        base.psi_jet(xi)?,
    ))
}

pub fn conformal_hessian(base: &BaseAnsatz, p: &Profile, xi: f64) -> Result<RankOneIso> {
    Ok(hessian_from(
        base.alpha_bar_norm_sq,
        base.psi_jet(xi)?,
        p.eval_jet2(xi)?,
    ))
}

pub fn conformal_laplacian(base: &BaseAnsatz, p: &Profile, xi: f64) -> Result<f64> {
    Ok(laplacian_from(
        base.n,
        base.alpha_bar_norm_sq,
        base.psi_jet(xi)?,
        p.eval_jet2(xi)?,
    ))
}

pub fn grad_inner(base: &BaseAnsatz, p: &Profile, q: &Profile, xi: f64) -> Result<f64> {
    Ok(inner_from(
        base.alpha_bar_norm_sq,
        base.psi_jet(xi)?,
        p.eval_jet2(xi)?,
        q.eval_jet2(xi)?,
    ))
}

pub fn grad_norm_sq(base: &BaseAnsatz, p: &Profile, xi: f64) -> Result<f64> {
    grad_inner(base, p, p, xi)
}

/// Δu − ⟨∇w, ∇u⟩ on the base.
pub fn drifted_laplacian(base: &BaseAnsatz, w: &Profile, u: &Profile, xi: f64) -> Result<f64> {
    let a = base.alpha_bar_norm_sq;
    let psi = base.psi_jet(xi)?;
    let u = u.eval_jet2(xi)?;
    let w = w.eval_jet2(xi)?;
    Ok(laplacian_from(base.n, a, psi, u) - inner_from(a, psi, w, u))
}

/// Eigenvalues of Ric + Hess w in a g_B-orthonormal frame:
/// `(along ᾱ, perpendicular with multiplicity n−1)`.
pub fn bakry_emery_eigs(base: &BaseAnsatz, w: &Profile, xi: f64) -> Result<(f64, f64)> {
    let a = base.alpha_bar_norm_sq;
    let psi = base.psi_jet(xi)?;
    let t = ricci_from(base.n, a, psi) + hessian_from(a, psi, w.eval_jet2(xi)?);
    Ok(t.metric_eigs(psi.value, a))
}

/// Scalar curvature of `Ψ⁻²δ + f²g_F`. Without `include_fiber` the
/// `R_{g_F}/f²` contribution is dropped.
pub fn warped_scalar(a: &WarpedAnsatz, xi: f64, include_fiber: bool) -> Result<f64> {
    let psi = a.base.psi_jet(xi)?;
    let f = a.f_jet(xi)?;
    Ok(warped_scalar_from(a, psi, f, include_fiber))
}

pub(crate) fn warped_scalar_from(a: &WarpedAnsatz, psi: Jet2, f: Jet2, include_fiber: bool) -> f64 {
    let n = a.base.n;
    let ab = a.base.alpha_bar_norm_sq;
    let m = a.fiber.m as f64;
    let fv = f.value;
    let mut r = scalar_from(n, ab, psi)
        - 2.0 * m * laplacian_from(n, ab, psi, f) / fv
        - m * (m - 1.0) * inner_from(ab, psi, f, f) / (fv * fv);
    if include_fiber {
        r += a.fiber.scalar() / (fv * fv);
    }
    r
}
