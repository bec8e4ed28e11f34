//! Piecewise-polynomial interpolants with analytic derivatives.
//!
//! Two flavours share one knot layout: the natural cubic spline (values only,
//! zero curvature at both ends) and the Hermite spline, which matches value,
//! first and second derivative at every knot (quintic, C²) and optionally the
//! third as well (septic, C³).

use crate::error::{Error, Result};

use super::jet::Jet2;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SplineData {
    /// Second derivatives at the knots.
    Natural { curvature: Vec<f64> },
    Hermite {
        dys: Vec<f64>,
        ddys: Vec<f64>,
        dddys: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    pub(crate) xs: Vec<f64>,
    pub(crate) ys: Vec<f64>,
    pub(crate) data: SplineData,
}

fn check_abscissae(xs: &[f64], ys: &[f64], need: usize) -> Result<()> {
    if xs.len() < need {
        return Err(Error::TooFewPoints {
            got: xs.len(),
            need,
        });
    }
    if xs.len() != ys.len() {
        return Err(Error::Parse(format!(
            "spline abscissae and ordinates differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonMonotoneAbscissae { index: i });
    }
    if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneAbscissae { index: i + 1 });
    }
    Ok(())
}

impl Spline {
    /// Natural cubic spline through the samples.
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_abscissae(&xs, &ys, 4)?;
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();

        // Thomas algorithm on the interior second derivatives.
        let interior = n - 2;
        let mut diag = vec![0.0; interior];
        let mut upper = vec![0.0; interior];
        let mut rhs = vec![0.0; interior];
        for k in 0..interior {
            let i = k + 1;
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            upper[k] = h[i];
            rhs[k] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        for k in 1..interior {
            let lower = h[k];
            let w = lower / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        let mut curvature = vec![0.0; n];
        for k in (0..interior).rev() {
            let next = if k + 1 < interior {
                curvature[k + 2]
            } else {
                0.0
            };
            curvature[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
        }
        Ok(Self {
            xs,
            ys,
            data: SplineData::Natural { curvature },
        })
    }

    /// Quintic Hermite spline matching value, slope and curvature at every knot.
    pub fn hermite(xs: Vec<f64>, ys: Vec<f64>, dys: Vec<f64>, ddys: Vec<f64>) -> Result<Self> {
        check_abscissae(&xs, &ys, 2)?;
        if dys.len() != xs.len() || ddys.len() != xs.len() {
            return Err(Error::Parse(
                "hermite derivative arrays must match the knots".into(),
            ));
        }
        Ok(Self {
            xs,
            ys,
            data: SplineData::Hermite {
                dys,
                ddys,
                dddys: None,
            },
        })
    }

    /// Septic Hermite spline that also matches the third derivative.
    pub fn hermite3(
        xs: Vec<f64>,
        ys: Vec<f64>,
        dys: Vec<f64>,
        ddys: Vec<f64>,
        dddys: Vec<f64>,
    ) -> Result<Self> {
        let mut s = Self::hermite(xs, ys, dys, ddys)?;
        if dddys.len() != s.xs.len() {
            return Err(Error::Parse(
                "hermite derivative arrays must match the knots".into(),
            ));
        }
        if let SplineData::Hermite { dddys: slot, .. } = &mut s.data {
            *slot = Some(dddys);
        }
        Ok(s)
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    /// Caller guarantees `x` lies in `[lo, hi]`.
    pub(crate) fn eval(&self, x: f64) -> Jet2 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let h = x1 - x0;
        match &self.data {
            SplineData::Natural { curvature } => {
                let (m0, m1) = (curvature[i], curvature[i + 1]);
                let a = x1 - x;
                let b = x - x0;
                let c0 = y0 / h - m0 * h / 6.0;
                let c1 = y1 / h - m1 * h / 6.0;
                Jet2::new(
                    m0 * a * a * a / (6.0 * h) + m1 * b * b * b / (6.0 * h) + c0 * a + c1 * b,
                    -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - c0 + c1,
                    (m0 * a + m1 * b) / h,
                )
            }
            SplineData::Hermite { dys, ddys, dddys } => {
                let s = (x - x0) / h;
                let mut out = Jet2::default();
                let mut add = |weight: f64, basis: &[f64]| {
                    let (p, dp, ddp) = poly(basis, s);
                    out.value += weight * p;
                    out.d1 += weight * dp / h;
                    out.d2 += weight * ddp / (h * h);
                };
                match dddys {
                    None => {
                        let w = [
                            y0,
                            h * dys[i],
                            h * h * ddys[i],
                            y1,
                            h * dys[i + 1],
                            h * h * ddys[i + 1],
                        ];
                        for (weight, basis) in w.into_iter().zip(&QUINTIC) {
                            add(weight, basis);
                        }
                    }
                    Some(d3) => {
                        let h3 = h * h * h;
                        let w = [
                            y0,
                            h * dys[i],
                            h * h * ddys[i],
                            h3 * d3[i],
                            y1,
                            h * dys[i + 1],
                            h * h * ddys[i + 1],
                            h3 * d3[i + 1],
                        ];
                        for (weight, basis) in w.into_iter().zip(&SEPTIC) {
                            add(weight, basis);
                        }
                    }
                }
                out
            }
        }
    }
}

/// Quintic Hermite basis on [0, 1], coefficients of s^0..s^5.
const QUINTIC: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
];

/// Septic Hermite basis on [0, 1]: value, first, second, third derivative
/// at 0, then the same at 1.
const SEPTIC: [[f64; 8]; 8] = [
    [1.0, 0.0, 0.0, 0.0, -35.0, 84.0, -70.0, 20.0],
    [0.0, 1.0, 0.0, 0.0, -20.0, 45.0, -36.0, 10.0],
    [0.0, 0.0, 0.5, 0.0, -5.0, 10.0, -7.5, 2.0],
    [
        0.0,
        0.0,
        0.0,
        1.0 / 6.0,
        -2.0 / 3.0,
        1.0,
        -2.0 / 3.0,
        1.0 / 6.0,
    ],
    [0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0],
    [0.0, 0.0, 0.0, 0.0, -15.0, 39.0, -34.0, 10.0],
    [0.0, 0.0, 0.0, 0.0, 2.5, -7.0, 6.5, -2.0],
    [0.0, 0.0, 0.0, 0.0, -1.0 / 6.0, 0.5, -0.5, 1.0 / 6.0],
];

fn poly(c: &[f64], s: f64) -> (f64, f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    let mut ddp = 0.0;
    for k in (0..c.len()).rev() {
        ddp = ddp * s + 2.0 * dp;
        dp = dp * s + p;
        p = p * s + c[k];
    }
    (p, dp, ddp)
}
