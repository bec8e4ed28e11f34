use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{classify_degeneracy, lemma2_residual, Degeneracy, WarpedAnsatz};
use crate::error::{Error, Result};
use crate::grid::{Exec, Grid, SupNorm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Bound on the reduced-equation sup-norms and on the θ checks.
    pub tol: f64,
    /// Bound for the identity check, whose left side is a finite difference.
    pub lemma2_tol: f64,
    pub fiber_in_scalar: bool,
    #[serde(skip, default)]
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            lemma2_tol: 1e-6,
            fiber_in_scalar: true,
            exec: Exec::default(),
        }
    }
}

impl VerifyOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            lemma2_tol: tol.max(1e-6),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaConstancy {
    pub mean: f64,
    pub max_deviation: f64,
    pub argmax: f64,
    pub fiber_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub grid: Grid,
    pub tolerance: f64,
    pub lemma2_tolerance: f64,
    pub fiber_in_scalar: bool,
    pub degeneracy: Degeneracy,
    pub per_equation: BTreeMap<String, SupNorm>,
    /// Absent when α = mρ; the fiber-equation bracket is then reported instead.
    pub theta_constancy: Option<ThetaConstancy>,
    pub theta_bracket: Option<SupNorm>,
    /// |ρ·R_{g_F}/(‖ᾱ‖²f²)|: how far the two scalar-curvature conventions
    /// drift apart on this grid.
    pub convention_gap: SupNorm,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl ResidualReport {
    pub fn sup(&self, eq: &str) -> Option<f64> {
        self.per_equation.get(eq).map(|s| s.sup)
    }

    pub fn max_reduced_residual(&self) -> f64 {
        ["ode1", "ode2", "ode3"]
            .iter()
            .filter_map(|k| self.sup(k))
            .fold(0.0, f64::max)
    }
}

struct PointEval {
    ode1: f64,
    ode2: f64,
    ode3: f64,
    lemma2: Option<f64>,
    theta: std::result::Result<f64, f64>,
    gap: f64,
}

fn eval_point(a: &WarpedAnsatz, xi: f64, opts: &VerifyOptions) -> Result<PointEval> {
    let j = a.jets(xi)?;
    let theta = match a.theta_from(&j) {
        Ok(t) => Ok(t),
        Err(Error::DegenerateCoefficient { bracket }) => Err(bracket),
        Err(e) => return Err(e),
    };
    let lemma2 = if a.params.beta != 0.0 {
        Some(lemma2_residual(a, xi)?)
    } else {
        None
    };
    Ok(PointEval {
        ode1: a.ode1_from(&j),
        ode2: a.ode2_from(&j, opts.fiber_in_scalar),
        ode3: a.ode3_from(&j, opts.fiber_in_scalar),
        lemma2,
        theta,
        gap: a.params.rho * a.fiber.scalar() / (a.base.alpha_bar_norm_sq * j.f.value * j.f.value),
    })
}

/// Sweeps every residual over the grid and aggregates sup-norms.
pub fn verify(a: &WarpedAnsatz, grid: &Grid, opts: &VerifyOptions) -> Result<ResidualReport> {
    let xs = grid.points();
    let evals = opts.exec.try_map(&xs, |xi| eval_point(a, xi, opts))?;
    let col = |f: &dyn Fn(&PointEval) -> f64| -> Vec<f64> { evals.iter().map(f).collect() };

    let mut per_equation = BTreeMap::new();
    per_equation.insert("ode1".to_string(), SupNorm::of(&xs, &col(&|e| e.ode1)));
    per_equation.insert("ode2".to_string(), SupNorm::of(&xs, &col(&|e| e.ode2)));
    per_equation.insert("ode3".to_string(), SupNorm::of(&xs, &col(&|e| e.ode3)));
    if a.params.beta != 0.0 {
        per_equation.insert(
            "lemma2".to_string(),
            SupNorm::of(&xs, &col(&|e| e.lemma2.unwrap_or(f64::NAN))),
        );
    }

    let mut failures = Vec::new();
    for (k, s) in &per_equation {
        let tol = if k == "lemma2" {
            opts.lemma2_tol
        } else {
            opts.tol
        };
        if !(s.sup < tol) {
            failures.push(format!(
                "{k}: sup {:e} at xi = {} exceeds {tol:e}",
                s.sup, s.argmax
            ));
        }
    }

    let fiber_theta = a.fiber.theta;
    let (theta_constancy, theta_bracket) = if evals.iter().all(|e| e.theta.is_ok()) {
        let thetas: Vec<f64> = evals.iter().map(|e| *e.theta.as_ref().unwrap()).collect();
        let mean = thetas.iter().sum::<f64>() / thetas.len() as f64;
        let dev: Vec<f64> = thetas.iter().map(|t| t - mean).collect();
        let s = SupNorm::of(&xs, &dev);
        let tc = ThetaConstancy {
            mean,
            max_deviation: s.sup,
            argmax: s.argmax,
            fiber_theta,
        };
        if !(tc.max_deviation < opts.tol) {
            failures.push(format!(
                "implied theta not constant: deviation {:e} at xi = {}",
                tc.max_deviation, tc.argmax
            ));
        }
        if !((mean - fiber_theta).abs() < opts.tol) {
            failures.push(format!(
                "implied theta {mean} differs from fiber theta {fiber_theta}"
            ));
        }
        (Some(tc), None)
    } else {
        let brackets: Vec<f64> = evals
            .iter()
            .map(|e| e.theta.err().unwrap_or(f64::NAN))
            .collect();
        let s = SupNorm::of(&xs, &brackets);
        if !(s.sup < opts.tol) {
            failures.push(format!(
                "alpha = m*rho and the fiber bracket is {:e} at xi = {}",
                s.sup, s.argmax
            ));
        }
        (None, Some(s))
    };

    Ok(ResidualReport {
        grid: *grid,
        tolerance: opts.tol,
        lemma2_tolerance: opts.lemma2_tol,
        fiber_in_scalar: opts.fiber_in_scalar,
        degeneracy: classify_degeneracy(&a.params, a.dim()),
        per_equation,
        theta_constancy,
        theta_bracket,
        convention_gap: SupNorm::of(&xs, &col(&|e| e.gap)),
        pass: failures.is_empty(),
        failures,
    })
}

/// One row of the plotting export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub xi: f64,
    pub ode1: f64,
    pub ode2: f64,
    pub ode3: f64,
    /// NaN when α = mρ.
    pub theta_implied: f64,
}

pub fn grid_rows(a: &WarpedAnsatz, grid: &Grid, opts: &VerifyOptions) -> Result<Vec<GridRow>> {
    let xs = grid.points();
    opts.exec.try_map(&xs, |xi| {
        let j = a.jets(xi)?;
        Ok(GridRow {
            xi,
            ode1: a.ode1_from(&j),
            ode2: a.ode2_from(&j, opts.fiber_in_scalar),
            ode3: a.ode3_from(&j, opts.fiber_in_scalar),
            theta_implied: a.theta_from(&j).unwrap_or(f64::NAN),
        })
    })
}
