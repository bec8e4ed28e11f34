//! Closed-form warped metrics with known potentials, used as fixtures.
//!
//! Every builder is parametric in the dimensions (and in the free structure
//! constants where the family has them); [`entry`] returns the defaults.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BaseAnsatz, Chart, FiberData};
use crate::grid::Grid;
use crate::profiles::{Interval, Profile};
use crate::system::{classify_degeneracy, Degeneracy, Params, WarpedAnsatz};

pub const IDS: [&str; 7] = ["ex1", "ex2", "ex4", "ex5", "incomplete1", "feitosa", "flat"];

#[derive(Debug, Clone, Serialize)]
pub struct Expected {
    pub degeneracy: Degeneracy,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub completeness_note: String,
    pub grid: Grid,
    pub ansatz: WarpedAnsatz,
    pub expected: Expected,
}

const POS: Interval = Interval {
    lo: 0.0,
    hi: f64::INFINITY,
    closed: false,
};

fn ln_cosh() -> Profile {
    Profile::cosh(1.0, 1.0).ln()
}

/// `sech⁴ξ·(a + b·cosh 2ξ)`
fn sech4_affine_cosh2(a: f64, b: f64) -> Profile {
    Profile::sech(1.0, 1.0)
        .pow(4.0)
        .times(&Profile::constant(a).plus(&Profile::cosh(b, 2.0)))
}

/// Flat base, f = e^ξ, h = √m·ξ, λ ≡ −m² − m, Ricci-flat fiber.
pub fn ex1(n: usize, m: usize) -> Result<WarpedAnsatz> {
    let mf = m as f64;
    WarpedAnsatz::new(
        BaseAnsatz::euclidean(n)?,
        FiberData::euclidean(m)?,
        Profile::exp(1.0, 1.0),
        Profile::linear(0.0, mf.sqrt()),
        Profile::constant(-mf * mf - mf),
        Params::new(1.0, mf.sqrt(), 1.0, -1.0)?,
    )
}

/// Hyperbolic half-space base, f = 1/ξ, h = ln(ξ+1) − ln ξ; β = μ = 1.
pub fn ex2(n: usize, m: usize, alpha: f64, rho: f64) -> Result<WarpedAnsatz> {
    let d = (n + m) as f64;
    let c = 1.0 - alpha * (d - 1.0) + rho * d * (d - 1.0) - 1.0;
    WarpedAnsatz::new(
        BaseAnsatz::new(n, 1.0, Profile::linear(0.0, 1.0).restricted(POS)?)?,
        FiberData::euclidean(m)?,
        Profile::power(1.0, -1.0, 0.0, POS)?,
        Profile::log_affine(0.0, vec![[1.0, 1.0, 1.0], [-1.0, 1.0, 0.0]], POS)?,
        // 1 − α(d−1) − ξ/(ξ+1) + ρd(d−1) = c + 1/(ξ+1)
        Profile::constant(c).plus(&Profile::power(1.0, -1.0, 1.0, POS)?),
        Params::new(alpha, 1.0, 1.0, rho)?,
    )
}

/// Ψ = tanh, f = coth on the positive half-line; μ = 0.
pub fn ex4(n: usize, m: usize, alpha: f64, beta: f64, rho: f64) -> Result<WarpedAnsatz> {
    let d = (n + m) as f64;
    // −α/(3cosh⁴)[2(d−2) + (d+1)cosh 2ξ] − ρR with R = −(d−1)(2cosh 2ξ + d − 2)/cosh⁴
    let a = -2.0 * alpha * (d - 2.0) / 3.0 + rho * (d - 1.0) * (d - 2.0);
    let b = -alpha * (d + 1.0) / 3.0 + 2.0 * rho * (d - 1.0);
    WarpedAnsatz::new(
        BaseAnsatz::new(n, 1.0, Profile::tanh(1.0, 1.0).restricted(POS)?)?,
        FiberData::euclidean(m)?,
        Profile::coth(1.0, 1.0)?,
        ln_cosh()
            .scaled(2.0 * alpha * (d - 2.0) / (3.0 * beta))
            .restricted(POS)?,
        sech4_affine_cosh2(a, b),
        Params::new(alpha, beta, 0.0, rho)?,
    )
}

/// Ψ = sech, f = cosh on the whole line; μ = β²/(α(d−2)).
pub fn ex5(n: usize, m: usize, alpha: f64, beta: f64, rho: f64) -> Result<WarpedAnsatz> {
    let d = (n + m) as f64;
    // (ρ/2)(d−1)sech⁴{(d−2)(cosh 2ξ − 1) + 4} − α sech⁴
    let a = 0.5 * rho * (d - 1.0) * (4.0 - (d - 2.0)) - alpha;
    let b = 0.5 * rho * (d - 1.0) * (d - 2.0);
    WarpedAnsatz::new(
        BaseAnsatz::new(n, 1.0, Profile::sech(1.0, 1.0))?,
        FiberData::euclidean(m)?,
        Profile::cosh(1.0, 1.0),
        ln_cosh().scaled(alpha * (d - 2.0) / beta),
        sech4_affine_cosh2(a, b),
        Params::new(alpha, beta, beta * beta / (alpha * (d - 2.0)), rho)?,
    )
}

/// Flat half-space, f = ξ, h = −ln ξ, Einstein fiber with θ = m − 2.
pub fn incomplete1(n: usize, m: usize) -> Result<WarpedAnsatz> {
    if m <= 2 {
        return Err(Error::InvalidAnsatz(
            "this family needs fiber dimension m > 2".into(),
        ));
    }
    WarpedAnsatz::new(
        BaseAnsatz::new(n, 1.0, Profile::constant(1.0))?,
        FiberData::new(m, m as f64 - 2.0, Chart::None)?,
        Profile::linear(0.0, 1.0).restricted(POS)?,
        Profile::log_affine(0.0, vec![[-1.0, 1.0, 0.0]], POS)?,
        Profile::constant(0.0),
        Params::new(1.0, -1.0, 1.0, 0.0)?,
    )
}

/// Base e^{2ξ}δ, f = e^ξ, linear potential; steady-type constants (1, 1, 0, 0).
pub fn feitosa(n: usize, m: usize) -> Result<WarpedAnsatz> {
    let d = (n + m) as f64;
    WarpedAnsatz::new(
        BaseAnsatz::new(n, 1.0, Profile::exp(1.0, -1.0))?,
        FiberData::euclidean(m)?,
        Profile::exp(1.0, 1.0),
        Profile::linear(0.0, (d - 2.0) / 2.0),
        Profile::exp((2.0 - d) / 2.0, -2.0),
        Params::new(1.0, 1.0, 0.0, 0.0)?,
    )
}

/// Standard flat product.
pub fn flat(n: usize, m: usize) -> Result<WarpedAnsatz> {
    WarpedAnsatz::new(
        BaseAnsatz::euclidean(n)?,
        FiberData::euclidean(m)?,
        Profile::constant(1.0),
        Profile::constant(0.0),
        Profile::constant(0.0),
        Params::new(1.0, 1.0, 0.0, 0.0)?,
    )
}

pub fn entry(id: &str) -> Result<CatalogEntry> {
    let (ansatz, grid, description, completeness) = match id {
        "ex1" => (
            ex1(3, 2)?,
            Grid::new(-2.0, 2.0, 401)?,
            "flat base, exponential warping",
            "complete",
        ),
        "ex2" => (
            ex2(3, 2, 1.0, 1.0)?,
            Grid::new(0.1, 10.0, 401)?,
            "hyperbolic half-space base, f = 1/x",
            "complete",
        ),
        "ex4" => (
            ex4(3, 2, 1.0, 1.0, 1.0)?,
            Grid::new(0.1, 5.0, 401)?,
            "tanh/coth half-space, mu = 0",
            "complete",
        ),
        "ex5" => (
            ex5(3, 2, 1.0, 1.0, 1.0)?,
            Grid::new(-3.0, 3.0, 401)?,
            "sech/cosh, conformally Einstein",
            "complete",
        ),
        "incomplete1" => (
            incomplete1(3, 3)?,
            Grid::new(0.1, 10.0, 401)?,
            "flat half-space, f = xi, Einstein fiber",
            "incomplete",
        ),
        "feitosa" => (
            feitosa(3, 2)?,
            Grid::new(-2.0, 2.0, 401)?,
            "base e^{2 xi} g_Euc, steady-type constants",
            "incomplete",
        ),
        "flat" => (
            flat(3, 2)?,
            Grid::new(-1.0, 1.0, 401)?,
            "standard flat product",
            "complete",
        ),
        other => return Err(Error::UnknownId(other.to_string())),
    };
    let degeneracy = classify_degeneracy(&ansatz.params, ansatz.dim());
    Ok(CatalogEntry {
        id: id.to_string(),
        description: description.to_string(),
        completeness_note: completeness.to_string(),
        grid,
        ansatz,
        expected: Expected {
            degeneracy,
            pass: true,
        },
    })
}

pub fn all() -> Vec<CatalogEntry> {
    IDS.iter()
        .map(|id| entry(id).expect("catalog entries are well-formed"))
        .collect()
}
