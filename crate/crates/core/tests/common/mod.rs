#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;

use warpbench::geometry::{
    bakry_emery_eigs, conformal_hessian, conformal_laplacian, conformal_ricci, conformal_scalar,
    drifted_laplacian, grad_inner, BaseAnsatz,
};
use warpbench::oracle::FdOracle;
use warpbench::profiles::{Interval, Profile};
use warpbench::Result;

/// A smooth profile defined on all of [−1.5, 1.5].
pub fn profile(kind: u8, a: f64, k: f64) -> Profile {
    match kind % 9 {
        0 => Profile::constant(a),
        1 => Profile::linear(a, k),
        2 => Profile::exp(a, k),
        3 => Profile::cosh(a, k),
        4 => Profile::sech(a, k),
        5 => Profile::tanh(a, k),
        6 => Profile::power(a, 1.0 + k.abs(), 2.0, Interval::open(-2.0, f64::INFINITY)).unwrap(),
        7 => Profile::log_affine(a, vec![[k, 0.3, 2.0]], Interval::open(-5.0, 5.0)).unwrap(),
        _ => Profile::exp(a, k).times(&Profile::sech(1.0, k)),
    }
}

pub fn positive_profile(kind: u8, a: f64, k: f64) -> Profile {
    match kind % 4 {
        0 => Profile::constant(a.abs() + 0.5),
        1 => Profile::exp(a.abs() + 0.5, k),
        2 => Profile::cosh(a.abs() + 0.5, k),
        _ => Profile::linear(2.0 + a.abs(), 0.5 * k),
    }
}

/// Central differences of the value and of the first derivative.
pub fn fd1(p: &Profile, x: f64) -> (f64, f64) {
    let h = 1e-4;
    let jp = p.eval_jet2(x + h).unwrap();
    let jm = p.eval_jet2(x - h).unwrap();
    (
        (jp.value - jm.value) / (2.0 * h),
        (jp.d1 - jm.d1) / (2.0 * h),
    )
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

pub struct Config {
    pub base: BaseAnsatz,
    pub alpha_bar: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Profile,
    pub q: Profile,
}

pub fn config(rng: &mut impl Rng) -> Config {
    let n = rng.gen_range(2..=4);
    let a: f64 = rng.gen_range(0.5..2.0);
    let psi = positive_profile(
        rng.gen_range(0..4),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.8..0.8),
    );
    let mut dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    for v in &mut dir {
        *v *= a.sqrt() / norm;
    }
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.4..0.4)).collect();
    let p = profile(
        rng.gen_range(0..9),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let q = profile(
        rng.gen_range(0..9),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    Config {
        base: BaseAnsatz::new(n, a, psi).unwrap(),
        alpha_bar: dir,
        x,
        p,
        q,
    }
}

fn xi(c: &Config, x: &[f64]) -> f64 {
    c.alpha_bar.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Largest absolute disagreement between the closed-form geometry and the
/// finite-difference oracle, per operation.
pub fn oracle_errors(c: &Config) -> Vec<(&'static str, f64)> {
    let n = c.base.n;
    let metric = |x: &[f64]| -> Result<DMatrix<f64>> {
        let psi = c.base.psi.value(xi(c, x))?;
        Ok(DMatrix::identity(n, n) / (psi * psi))
    };
    let oracle = FdOracle::new(&metric, n);
    let s = xi(c, &c.x);
    let pf = |x: &[f64]| c.p.value(xi(c, x));
    let qf = |x: &[f64]| c.q.value(xi(c, x));
    let ginv = metric(&c.x).unwrap().try_inverse().unwrap();

    let ric = oracle.ricci(&c.x).unwrap();
    let hess = oracle.hessian(&pf, &c.x).unwrap();
    let mut out = vec![
        (
            "ricci",
            (conformal_ricci(&c.base, s).unwrap().matrix(&c.alpha_bar) - &ric)
                .abs()
                .max(),
        ),
        (
            "scalar",
            (conformal_scalar(&c.base, s).unwrap() - oracle.scalar(&c.x).unwrap()).abs(),
        ),
        (
            "hessian",
            (conformal_hessian(&c.base, &c.p, s)
                .unwrap()
                .matrix(&c.alpha_bar)
                - &hess)
                .abs()
                .max(),
        ),
        (
            "laplacian",
            (conformal_laplacian(&c.base, &c.p, s).unwrap() - oracle.laplacian(&pf, &c.x).unwrap())
                .abs(),
        ),
        (
            "grad_inner",
            (grad_inner(&c.base, &c.p, &c.q, s).unwrap() - oracle.inner(&pf, &qf, &c.x).unwrap())
                .abs(),
        ),
    ];
    let drift = oracle.laplacian(&qf, &c.x).unwrap() - oracle.inner(&pf, &qf, &c.x).unwrap();
    out.push((
        "drifted_laplacian",
        (drifted_laplacian(&c.base, &c.p, &c.q, s).unwrap() - drift).abs(),
    ));

    // Ric + Hess p as a g-self-adjoint operator
    let op = &ginv * (ric + hess);
    let sym = (&op + op.transpose()) * 0.5;
    let mut got: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (par, perp) = bakry_emery_eigs(&c.base, &c.p, s).unwrap();
    let mut want = vec![perp; n - 1];
    want.push(par);
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eig_err = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push(("bakry_emery_eigs", eig_err));
    out
}
