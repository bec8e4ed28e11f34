//! Evaluation grids and the data-parallel map used by every grid sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidParams("grid bounds must be finite".into()));
        }
        if count == 0 || (count > 1 && !(min < max)) || (count == 1 && min != max) {
            return Err(Error::InvalidParams(format!(
                "bad grid {min}:{max}:{count}"
            )));
        }
        Ok(Self { min, max, count })
    }

    /// `a:b:n`
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid `{s}` is not of the form a:b:n")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("grid `{s}`: {e}")))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("grid `{s}`: {e}")))?;
        Self::new(num(parts[0])?, num(parts[1])?, count)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }
}

/// How grid sweeps are executed. Results are always returned in grid order,
/// so reductions over them are deterministic either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn map<T, F>(self, xs: &[f64], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(f64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                xs.par_iter().map(|&x| f(x)).collect()
            }
            _ => xs.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn try_map<T, F>(self, xs: &[f64], f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(f64) -> Result<T> + Sync + Send,
    {
        self.map(xs, f).into_iter().collect()
    }
}

/// Supremum of |v| with the abscissa where it is attained. Ties keep the
/// first index; a NaN anywhere poisons the result to +∞ at its abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub sup: f64,
    pub argmax: f64,
}

impl SupNorm {
    pub fn of(xs: &[f64], vals: &[f64]) -> Self {
        let mut best = SupNorm {
            sup: 0.0,
            argmax: xs.first().copied().unwrap_or(f64::NAN),
        };
        for (&x, &v) in xs.iter().zip(vals) {
            if v.is_nan() {
                return SupNorm {
                    sup: f64::INFINITY,
                    argmax: x,
                };
            }
            if v.abs() > best.sup {
                best = SupNorm {
                    sup: v.abs(),
                    argmax: x,
                };
            }
        }
        best
    }
}
