//! Construction of new solutions: fix Ψ and f, integrate the first reduced
//! equation for the potential h, read λ off the second, and check the third.

pub mod rk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BaseAnsatz, FiberData};
use crate::grid::Grid;
use crate::profiles::{Jet2, Profile};
use crate::system::{fd_derivative, verify, Params, ResidualReport, VerifyOptions, WarpedAnsatz};
use rk::{dopri5, Halt, Outcome, RkOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Initial {
    pub xi0: f64,
    pub h0: f64,
    pub v0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub xi_min: f64,
    pub xi_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Local error tolerance (relative and absolute).
    pub tol: f64,
    pub max_step: f64,
    /// |h′| above this counts as a finite-time escape.
    pub blowup_cap: f64,
    pub verify_tol: f64,
    /// Tolerance for the identity check, whose finite difference sees the
    /// third derivative of the spline.
    pub lemma2_tol: f64,
    pub verify_points: usize,
    pub fiber_in_scalar: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_step: 0.05,
            blowup_cap: 1e6,
            verify_tol: 1e-6,
            lemma2_tol: 1e-4,
            verify_points: 401,
            fiber_in_scalar: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub base: BaseAnsatz,
    pub f: Profile,
    pub params: Params,
    pub m: usize,
    pub initial: Initial,
    pub grid: Span,
    #[serde(default)]
    pub solver: SolverOptions,
}

/// File form of a construction request: an ansatz without h and λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionDoc {
    pub base: BaseAnsatz,
    pub fiber: FiberData,
    pub f: Profile,
    pub params: Params,
    pub initial: Initial,
    pub grid: Span,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl ConstructionDoc {
    pub fn into_parts(self) -> (ConstructionSpec, FiberData) {
        let spec = ConstructionSpec {
            base: self.base,
            f: self.f,
            params: self.params,
            m: self.fiber.m,
            initial: self.initial,
            grid: self.grid,
            solver: self.solver,
        };
        (spec, self.fiber)
    }
}

impl ConstructionSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.require_beta()?;
        let Span { xi_min, xi_max } = self.grid;
        if !(xi_min < xi_max) {
            return Err(Error::InvalidAnsatz(format!(
                "empty span [{xi_min}, {xi_max}]"
            )));
        }
        let xi0 = self.initial.xi0;
        if !(xi_min..=xi_max).contains(&xi0) {
            return Err(Error::InvalidAnsatz(format!(
                "xi0 = {xi0} outside [{xi_min}, {xi_max}]"
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidAnsatz(
                "fiber dimension must be positive".into(),
            ));
        }
        let o = &self.solver;
        if !(o.tol > 0.0 && o.max_step > 0.0 && o.blowup_cap > 0.0) {
            return Err(Error::InvalidParams(
                "solver tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    fn f_jet(&self, xi: f64) -> Result<Jet2> {
        let f = self.f.eval_jet2(xi)?;
        if f.value <= 0.0 {
            return Err(Error::NonpositiveProfile {
                name: "f".into(),
                xi,
                value: f.value,
            });
        }
        Ok(f)
    }

    /// Returns (Ψ′/Ψ, right-hand side) of βh″ + 2β(Ψ′/Ψ)h′ + μh′² = F.
    fn coefficients(&self, xi: f64) -> Result<(f64, f64)> {
        let Params { alpha, .. } = self.params;
        let n = self.base.n as f64;
        let m = self.m as f64;
        let p = self.base.psi_jet(xi)?;
        let f = self.f_jet(xi)?;
        let dp = p.d1 / p.value;
        let df = f.d1 / f.value;
        let rhs = -alpha * (n - 2.0) * p.d2 / p.value
            + alpha * m * f.d2 / f.value
            + 2.0 * alpha * m * df * dp;
        Ok((dp, rhs))
    }

    fn accel(&self, xi: f64, v: f64) -> Result<f64> {
        let Params { beta, mu, .. } = self.params;
        let (dp, rhs) = self.coefficients(xi)?;
        Ok((rhs - 2.0 * beta * dp * v - mu * v * v) / beta)
    }

    /// h‴ along a solution: the equation differentiated once, with the
    /// ξ-derivatives of its coefficients taken by finite differences.
    fn jerk(&self, xi: f64, v: f64, dv: f64) -> Result<f64> {
        let Params { beta, mu, .. } = self.params;
        let dom = self.base.psi.domain().intersect(&self.f.domain());
        let (dp, _) = self.coefficients(xi)?;
        let ddp = fd_derivative(|x| Ok(self.coefficients(x)?.0), xi, dom)?;
        let drhs = fd_derivative(|x| Ok(self.coefficients(x)?.1), xi, dom)?;
        Ok((drhs - 2.0 * beta * (ddp * v + dp * dv) - 2.0 * mu * v * dv) / beta)
    }
}

/// Accepted integrator states (ξ, h, h′, h″, h‴) in increasing ξ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub xi: Vec<f64>,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub ddv: Vec<f64>,
}

impl Trajectory {
    /// The quintic Hermite interpolant of h′ through (v, v′, v″), integrated
    /// exactly from the first knot. Knot values of h come from that integral
    /// rather than from the integrator, so h″ only inherits the (first-order)
    /// noise of the slope data.
    pub fn into_profile(self) -> Result<Profile> {
        let n = self.xi.len();
        let mut ys = Vec::with_capacity(n);
        ys.push(self.h[0]);
        for i in 0..n.saturating_sub(1) {
            let d = self.xi[i + 1] - self.xi[i];
            let area = d
                * (0.5 * (self.v[i] + self.v[i + 1])
                    + d * (self.dv[i] - self.dv[i + 1]) / 10.0
                    + d * d * (self.ddv[i] + self.ddv[i + 1]) / 120.0);
            ys.push(ys[i] + area);
        }
        Profile::from_hermite3(self.xi, ys, self.v, self.dv, self.ddv)
    }
}

fn sweep(s: &ConstructionSpec, end: f64) -> Result<Vec<(f64, f64, f64, f64)>> {
    let o = &s.solver;
    let opts = RkOptions::with_tol(o.tol, o.max_step);
    let cap = o.blowup_cap;
    let rhs = |xi: f64, y: &[f64; 2]| -> Result<[f64; 2]> { Ok([y[1], s.accel(xi, y[1])?]) };
    let y0 = [s.initial.h0, s.initial.v0];
    let pts = match dopri5(rhs, |y| y[1].abs() <= cap, s.initial.xi0, y0, end, &opts)? {
        Outcome::Done(p) => p,
        Outcome::Halted(_, Halt::Guard(x) | Halt::StepUnderflow(x)) => {
            return Err(Error::BlowUp { last_xi: x, cap });
        }
    };
    Ok(pts
        .into_iter()
        .map(|a| (a.x, a.y[0], a.y[1], a.dy[1]))
        .collect())
}

/// Integrates the potential equation from ξ0 towards both ends of the span.
pub fn integrate_potential(s: &ConstructionSpec) -> Result<Trajectory> {
    s.validate()?;
    if s.initial.v0.abs() > s.solver.blowup_cap {
        return Err(Error::BlowUp {
            last_xi: s.initial.xi0,
            cap: s.solver.blowup_cap,
        });
    }
    let back = sweep(s, s.grid.xi_min)?;
    let fwd = sweep(s, s.grid.xi_max)?;
    let mut t = Trajectory {
        xi: vec![],
        h: vec![],
        v: vec![],
        dv: vec![],
        ddv: vec![],
    };
    // the initial point heads both sweeps; keep it once
    for (x, h, v, dv) in back.into_iter().rev().chain(fwd.into_iter().skip(1)) {
        t.xi.push(x);
        t.h.push(h);
        t.v.push(v);
        t.dv.push(dv);
        t.ddv.push(s.jerk(x, v, dv)?);
    }
    refine(s, t)
}

/// Residual of the potential equation for the interpolant at `xi`, relative
/// to the size of its terms.
fn interpolant_defect(s: &ConstructionSpec, h: &Profile, xi: f64) -> Result<f64> {
    let Params { beta, mu, .. } = s.params;
    let (dp, rhs) = s.coefficients(xi)?;
    let j = h.eval_jet2(xi)?;
    let terms = [beta * j.d2, 2.0 * beta * dp * j.d1, mu * j.d1 * j.d1, rhs];
    let scale = terms.iter().fold(1.0f64, |acc, t| acc.max(t.abs()));
    Ok((terms[0] + terms[1] + terms[2] - terms[3]).abs() / scale)
}

/// Adds knots at the midpoints of intervals where the spline misses the
/// equation by more than 10·tol, integrating to each new midpoint from the
/// left knot of its interval.
fn refine(s: &ConstructionSpec, mut t: Trajectory) -> Result<Trajectory> {
    let o = &s.solver;
    let opts = RkOptions::with_tol(o.tol, o.max_step);
    for _ in 0..20 {
        let h = t.clone().into_profile()?;
        let mut inserts = Vec::new();
        for i in 0..t.xi.len() - 1 {
            let mid = 0.5 * (t.xi[i] + t.xi[i + 1]);
            if mid <= t.xi[i] || mid >= t.xi[i + 1] {
                continue;
            }
            if interpolant_defect(s, &h, mid)? > 10.0 * o.tol {
                let rhs =
                    |xi: f64, y: &[f64; 2]| -> Result<[f64; 2]> { Ok([y[1], s.accel(xi, y[1])?]) };
                let y0 = [t.h[i], t.v[i]];
                let Outcome::Done(pts) = dopri5(rhs, |_| true, t.xi[i], y0, mid, &opts)? else {
                    return Err(Error::BlowUp {
                        last_xi: t.xi[i],
                        cap: o.blowup_cap,
                    });
                };
                let last = pts.last().expect("integration keeps its start");
                let dv = last.dy[1];
                inserts.push((
                    i + 1,
                    mid,
                    last.y[0],
                    last.y[1],
                    dv,
                    s.jerk(mid, last.y[1], dv)?,
                ));
            }
        }
        if inserts.is_empty() {
            break;
        }
        for (at, x, hv, v, dv, ddv) in inserts.into_iter().rev() {
            t.xi.insert(at, x);
            t.h.insert(at, hv);
            t.v.insert(at, v);
            t.dv.insert(at, dv);
            t.ddv.insert(at, ddv);
        }
    }
    Ok(t)
}

/// h as a septic Hermite spline through the accepted states, with h″ and h‴
/// taken from the equation itself at every knot.
pub fn solve_potential(s: &ConstructionSpec) -> Result<Profile> {
    integrate_potential(s)?.into_profile()
}

/// λ = ‖ᾱ‖²[αΨΨ″ − α(n−1)Ψ′² + αmΨΨ′f′/f − βΨΨ′h′ − ρS] sampled on `knots`.
/// Returns a constant profile when every sample agrees exactly.
pub fn derive_lambda(
    base: &BaseAnsatz,
    f: &Profile,
    h: &Profile,
    params: &Params,
    fiber: &FiberData,
    fiber_in_scalar: bool,
    knots: Vec<f64>,
) -> Result<Profile> {
    let zero = WarpedAnsatz::new(
        base.clone(),
        *fiber,
        f.clone(),
        h.clone(),
        Profile::constant(0.0),
        *params,
    )?;
    let a = base.alpha_bar_norm_sq;
    let lam = |xi: f64| -> Result<f64> {
        let j = zero.jets(xi)?;
        Ok(a * zero.ode2_from(&j, fiber_in_scalar))
    };
    let samples: Vec<f64> = knots.iter().map(|&x| lam(x)).collect::<Result<_>>()?;
    if let Some(&first) = samples.first() {
        if samples.iter().all(|&v| v == first) {
            return Ok(Profile::constant(first));
        }
    }
    Profile::sampled(knots, lam)
}

#[derive(Debug, Clone, Serialize)]
pub struct Construction {
    pub ansatz: WarpedAnsatz,
    pub report: ResidualReport,
}

/// solve_potential → derive_lambda → verify.
///
/// A constant implied θ that disagrees with `fiber.theta` is an error; a
/// non-constant one comes back as a failing report.
pub fn construct(s: &ConstructionSpec, fiber: &FiberData) -> Result<Construction> {
    if fiber.m != s.m {
        return Err(Error::InvalidAnsatz(format!(
            "fiber dimension {} differs from spec m = {}",
            fiber.m, s.m
        )));
    }
    let traj = integrate_potential(s)?;
    let knots = traj.xi.clone();
    let h = traj.into_profile()?;
    let o = &s.solver;
    let lambda = derive_lambda(
        &s.base,
        &s.f,
        &h,
        &s.params,
        fiber,
        o.fiber_in_scalar,
        knots,
    )?;
    let ansatz = WarpedAnsatz::new(s.base.clone(), *fiber, s.f.clone(), h, lambda, s.params)?;
    let grid = Grid::new(s.grid.xi_min, s.grid.xi_max, o.verify_points)?;
    let opts = VerifyOptions {
        tol: o.verify_tol,
        lemma2_tol: o.lemma2_tol,
        fiber_in_scalar: o.fiber_in_scalar,
        ..VerifyOptions::default()
    };
    let report = verify(&ansatz, &grid, &opts)?;
    if let Some(t) = &report.theta_constancy {
        if t.max_deviation < o.verify_tol && (t.mean - fiber.theta).abs() >= o.verify_tol {
            return Err(Error::FiberMismatch {
                implied: t.mean,
                fiber: fiber.theta,
            });
        }
    }
    Ok(Construction { ansatz, report })
}

/// Constant slopes v* with μv*² = F when the potential equation is
/// autonomous (Ψ′ ≡ 0, F constant on the span). `None` otherwise or when no
/// real root exists; every v solves it when μ = 0 and F = 0, reported as `[0]`.
pub fn constant_slope_candidates(s: &ConstructionSpec) -> Result<Option<Vec<f64>>> {
    s.validate()?;
    let Span { xi_min, xi_max } = s.grid;
    let mut first = None;
    for i in 0..=100 {
        let xi = xi_min + (xi_max - xi_min) * i as f64 / 100.0;
        let (dp, rhs) = s.coefficients(xi)?;
        if dp.abs() > 1e-12 {
            return Ok(None);
        }
        match first {
            None => first = Some(rhs),
            Some(r0) if (rhs - r0).abs() > 1e-10 * r0.abs().max(1.0) => return Ok(None),
            _ => {}
        }
    }
    let rhs = first.unwrap_or(0.0);
    let mu = s.params.mu;
    if mu == 0.0 {
        return Ok(if rhs == 0.0 { Some(vec![0.0]) } else { None });
    }
    let q = rhs / mu;
    Ok(match q {
        q if q > 0.0 => Some(vec![-q.sqrt(), q.sqrt()]),
        0.0 => Some(vec![0.0]),
        _ => None,
    })
}

/// EX1 data (Ψ ≡ 1, f = e^ξ, α = 1, β = √2, μ = 1, ρ = −1, n = 3, m = 2) with
/// the given initial slope at ξ = 0 on [−2, 2].
pub fn ex1_spec(v0: f64) -> Result<ConstructionSpec> {
    Ok(ConstructionSpec {
        base: BaseAnsatz::euclidean(3)?,
        f: Profile::exp(1.0, 1.0),
        params: Params::new(1.0, 2f64.sqrt(), 1.0, -1.0)?,
        m: 2,
        initial: Initial {
            xi0: 0.0,
            h0: 0.0,
            v0,
        },
        grid: Span {
            xi_min: -2.0,
            xi_max: 2.0,
        },
        solver: SolverOptions::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::residual_ode1;

    #[test]
    fn linear_case_is_exact() {
        let s = ConstructionSpec {
            base: BaseAnsatz::euclidean(3).unwrap(),
            f: Profile::constant(1.0),
            params: Params::new(1.0, 1.0, 0.0, 0.0).unwrap(),
            m: 2,
            initial: Initial {
                xi0: 0.5,
                h0: 1.0,
                v0: -0.25,
            },
            grid: Span {
                xi_min: -1.0,
                xi_max: 2.0,
            },
            solver: SolverOptions::default(),
        };
        let h = solve_potential(&s).unwrap();
        for x in [-1.0, 0.0, 0.77, 2.0] {
            assert!((h.value(x).unwrap() - (1.0 - 0.25 * (x - 0.5))).abs() < 1e-13);
        }
    }

    #[test]
    fn ex1_constant_branch() {
        let t = integrate_potential(&ex1_spec(2f64.sqrt()).unwrap()).unwrap();
        assert_eq!(*t.xi.first().unwrap(), -2.0);
        assert_eq!(*t.xi.last().unwrap(), 2.0);
        for (x, h) in t.xi.iter().zip(&t.h) {
            assert!((h - 2f64.sqrt() * x).abs() < 1e-12);
        }
    }

    #[test]
    fn tanh_branch_matches_closed_form() {
        let h = solve_potential(&ex1_spec(0.0).unwrap()).unwrap();
        let r2 = 2f64.sqrt();
        for i in 0..=400 {
            let x = -2.0 + i as f64 / 100.0;
            let j = h.eval_jet2(x).unwrap();
            assert!((j.d1 - r2 * x.tanh()).abs() < 1e-8, "{x}");
            assert!((j.value - r2 * x.cosh().ln()).abs() < 1e-8, "{x}");
        }
    }

    #[test]
    fn riccati_escape() {
        // v = √2 coth(ξ + c) with coth c = √2 escapes at ξ = −c
        let err = solve_potential(&ex1_spec(2.0).unwrap()).unwrap_err();
        let c = (1.0 / 2f64.sqrt()).atanh();
        match err {
            Error::BlowUp { last_xi, .. } => {
                assert!(last_xi > -c && last_xi < -c + 1e-3, "{last_xi}")
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn ex1_construct_and_mismatch() {
        let s = ex1_spec(2f64.sqrt()).unwrap();
        let c = construct(&s, &FiberData::euclidean(2).unwrap()).unwrap();
        assert!(c.report.pass, "{:?}", c.report.failures);
        assert_eq!(c.ansatz.lambda.as_constant(), Some(-6.0));
        let sphere = FiberData::new(2, 1.0, crate::geometry::Chart::Sphere).unwrap();
        // with the fiber term in the scalar, λ absorbs −ρmθ/f² and the implied
        // constant becomes −ρmθ/(α − mρ) = 2/3; without it, it stays 0
        assert!(matches!(construct(&s, &sphere),
            Err(Error::FiberMismatch { implied, fiber }) if (implied - 2.0 / 3.0).abs() < 1e-9 && fiber == 1.0));
        let mut literal = s.clone();
        literal.solver.fiber_in_scalar = false;
        assert!(matches!(construct(&literal, &sphere),
            Err(Error::FiberMismatch { implied, .. }) if implied.abs() < 1e-9));
    }

    #[test]
    fn own_residual_is_small_on_knots() {
        let s = ex1_spec(0.3).unwrap();
        let t = integrate_potential(&s).unwrap();
        let knots = t.xi.clone();
        let c = construct(&s, &FiberData::euclidean(2).unwrap());
        let a = match c {
            Ok(c) => c.ansatz,
            Err(e) => panic!("{e:?}"),
        };
        for x in knots {
            assert!(residual_ode1(&a, x).unwrap().abs() <= 10.0 * s.solver.tol);
        }
    }

    #[test]
    fn fixed_points() {
        let v = constant_slope_candidates(&ex1_spec(0.0).unwrap())
            .unwrap()
            .unwrap();
        assert!((v[1] - 2f64.sqrt()).abs() < 1e-15 && (v[0] + 2f64.sqrt()).abs() < 1e-15);
        let mut s = ex1_spec(0.0).unwrap();
        s.base = BaseAnsatz::new(3, 1.0, Profile::sech(1.0, 1.0)).unwrap();
        assert_eq!(constant_slope_candidates(&s).unwrap(), None);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = ex1_spec(0.0).unwrap();
        s.params = Params::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(solve_potential(&s), Err(Error::InvalidParams(_))));
        let mut s = ex1_spec(0.0).unwrap();
        s.initial.xi0 = 3.0;
        assert!(matches!(solve_potential(&s), Err(Error::InvalidAnsatz(_))));
        let mut s = ex1_spec(0.0).unwrap();
        s.f = Profile::linear(0.5, 1.0);
        assert!(matches!(
            solve_potential(&s),
            Err(Error::NonpositiveProfile { .. })
        ));
    }
}
