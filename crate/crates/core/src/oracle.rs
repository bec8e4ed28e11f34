//! Brute-force curvature of an arbitrary coordinate metric by central
//! differences. Independent of the closed forms in [`crate::geometry`]; used
//! as a cross-check and by the full-tensor residual.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type MetricFn<'a> = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Sync + 'a;
pub type ScalarFn<'a> = dyn Fn(&[f64]) -> Result<f64> + Sync + 'a;

pub struct FdOracle<'a> {
    metric: &'a MetricFn<'a>,
    dim: usize,
    step: f64,
}

fn shifted(x: &[f64], k: usize, by: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += by;
    y
}

fn invert(g: &DMatrix<f64>, x: &[f64]) -> Result<DMatrix<f64>> {
    g.clone().try_inverse().ok_or_else(|| Error::NonFinite {
        what: "singular metric".into(),
        xi: x[x.len() - 1],
    })
}

impl<'a> FdOracle<'a> {
    pub fn new(metric: &'a MetricFn<'a>, dim: usize) -> Self {
        Self {
            metric,
            dim,
            step: 1e-4,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        (self.metric)(x)
    }

    /// `Γ[k][(i, j)] = Γ^k_ij`.
    pub fn christoffel(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let n = self.dim;
        let h = self.step;
        let g = self.metric(x)?;
        let ginv = invert(&g, x)?;
        let mut dg = Vec::with_capacity(n);
        for k in 0..n {
            let p = self.metric(&shifted(x, k, h))?;
            let m = self.metric(&shifted(x, k, -h))?;
            dg.push((p - m) / (2.0 * h));
        }
        // first kind: [ij, l] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let mut out = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in 0..n {
                let first: DVector<f64> = DVector::from_fn(n, |l, _| {
                    0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])
                });
                let second = &ginv * first;
                for k in 0..n {
                    out[k][(i, j)] = second[k];
                }
            }
        }
        Ok(out)
    }

    pub fn ricci(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim;
        let h = self.step;
        let gam = self.christoffel(x)?;
        // dgam[l][k][(i, j)] = ∂_l Γ^k_ij
        let mut dgam = Vec::with_capacity(n);
        for l in 0..n {
            let p = self.christoffel(&shifted(x, l, h))?;
            let m = self.christoffel(&shifted(x, l, -h))?;
            dgam.push(
                p.iter()
                    .zip(&m)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect::<Vec<_>>(),
            );
        }
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let mut r = 0.0;
            for k in 0..n {
                r += dgam[k][k][(i, j)] - dgam[j][k][(k, i)];
                for l in 0..n {
                    r += gam[k][(k, l)] * gam[l][(i, j)] - gam[k][(j, l)] * gam[l][(k, i)];
                }
            }
            r
        }))
    }

    pub fn scalar(&self, x: &[f64]) -> Result<f64> {
        let ginv = invert(&self.metric(x)?, x)?;
        Ok(ginv.component_mul(&self.ricci(x)?).sum())
    }

    pub fn gradient(&self, phi: &ScalarFn<'_>, x: &[f64]) -> Result<DVector<f64>> {
        let h = self.step;
        let mut d = DVector::zeros(self.dim);
        for k in 0..self.dim {
            d[k] = (phi(&shifted(x, k, h))? - phi(&shifted(x, k, -h))?) / (2.0 * h);
        }
        Ok(d)
    }

    /// Covariant Hessian `∂_i∂_jφ − Γ^k_ij ∂_kφ`.
    pub fn hessian(&self, phi: &ScalarFn<'_>, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim;
        let h = self.step;
        let f0 = phi(x)?;
        let mut dd = DMatrix::zeros(n, n);
        for i in 0..n {
            let fp = phi(&shifted(x, i, h))?;
            let fm = phi(&shifted(x, i, -h))?;
            dd[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in (i + 1)..n {
                let pp = phi(&shifted(&shifted(x, i, h), j, h))?;
                let pm = phi(&shifted(&shifted(x, i, h), j, -h))?;
                let mp = phi(&shifted(&shifted(x, i, -h), j, h))?;
                let mm = phi(&shifted(&shifted(x, i, -h), j, -h))?;
                let v = (pp - pm - mp + mm) / (4.0 * h * h);
                dd[(i, j)] = v;
                dd[(j, i)] = v;
            }
        }
        let grad = self.gradient(phi, x)?;
        let gam = self.christoffel(x)?;
        for (k, gk) in gam.iter().enumerate() {
            dd -= gk * grad[k];
        }
        Ok(dd)
    }

    pub fn laplacian(&self, phi: &ScalarFn<'_>, x: &[f64]) -> Result<f64> {
        let ginv = invert(&self.metric(x)?, x)?;
        Ok(ginv.component_mul(&self.hessian(phi, x)?).sum())
    }

    pub fn inner(&self, p: &ScalarFn<'_>, q: &ScalarFn<'_>, x: &[f64]) -> Result<f64> {
        let ginv = invert(&self.metric(x)?, x)?;
        Ok((self.gradient(p, x)?.transpose() * ginv * self.gradient(q, x)?)[(0, 0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sphere_has_ricci_equal_to_metric() {
        let metric = |y: &[f64]| -> Result<DMatrix<f64>> {
            let r2 = y[0] * y[0] + y[1] * y[1];
            Ok(DMatrix::identity(2, 2) * (4.0 / ((1.0 + r2) * (1.0 + r2))))
        };
        let o = FdOracle::new(&metric, 2);
        let x = [0.3, -0.4];
        let ric = o.ricci(&x).unwrap();
        let g = metric(&x).unwrap();
        assert!((ric - &g).abs().max() < 1e-6);
        assert!((o.scalar(&x).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn flat_hessian_of_quadratic() {
        let metric = |_: &[f64]| -> Result<DMatrix<f64>> { Ok(DMatrix::identity(3, 3)) };
        let o = FdOracle::new(&metric, 3).with_step(1e-3);
        let phi = |x: &[f64]| -> Result<f64> { Ok(x[0] * x[1] + 0.5 * x[2] * x[2]) };
        let hess = o.hessian(&phi, &[0.1, 0.2, 0.3]).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((hess - want).abs().max() < 1e-8);
    }
}
