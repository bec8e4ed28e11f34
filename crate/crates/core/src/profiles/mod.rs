//! Smooth functions of the ansatz coordinate ξ with exact first and second derivatives.

mod jet;
mod json;
mod spline;

use serde::{Deserialize, Serialize};

pub use jet::Jet2;
pub use json::ProfileDoc;
pub use spline::Spline;

use crate::error::{Error, Result};

/// Interval of the ξ-line. Builtin profiles live on open intervals; splines on
/// the closed hull of their knots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        closed: false,
    };

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            closed: false,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            closed: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.closed {
            x >= self.lo && x <= self.hi
        } else {
            x > self.lo && x < self.hi
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo) {
            Some(std::cmp::Ordering::Greater) => (self.lo, self.closed),
            Some(std::cmp::Ordering::Less) => (other.lo, other.closed),
            _ => (self.lo, self.closed && other.closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Less) => (self.hi, self.closed),
            Some(std::cmp::Ordering::Greater) => (other.hi, other.closed),
            _ => (self.hi, self.closed && other.closed),
        };
        Interval {
            lo,
            hi,
            closed: lo_closed && hi_closed,
        }
    }

    pub fn is_empty(&self) -> bool {
        if self.closed {
            !(self.lo <= self.hi)
        } else {
            !(self.lo < self.hi)
        }
    }

    fn check(&self, xi: f64) -> Result<()> {
        if self.contains(xi) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                xi,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// Hyperbolic/exponential family `a·g(k·ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Elementary {
    Exp,
    Cosh,
    Sech,
    Tanh,
    Coth,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompositeOp {
    Sum(Vec<Profile>),
    Product(Vec<Profile>),
    Quotient(Box<Profile>, Box<Profile>),
    Scale(f64, Box<Profile>),
    Pow(Box<Profile>, f64),
    Ln(Box<Profile>),
    Exp(Box<Profile>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Constant(f64),
    /// `a + b·ξ`
    Linear {
        a: f64,
        b: f64,
    },
    /// `scale·g(rate·ξ)`
    Elementary {
        func: Elementary,
        scale: f64,
        rate: f64,
    },
    /// `offset + Σ c·ln(a·ξ + b)`
    LogAffine {
        offset: f64,
        terms: Vec<[f64; 3]>,
    },
    /// `scale·(ξ + shift)^exponent`
    Power {
        scale: f64,
        exponent: f64,
        shift: f64,
    },
    Spline(Spline),
    Composite(CompositeOp),
}

/// A C² function of ξ on an interval. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct Profile {
    kind: Kind,
    domain: Interval,
}

fn bad(kind: &str, reason: impl Into<String>) -> Error {
    Error::BadCoefficients {
        kind: kind.to_string(),
        reason: reason.into(),
    }
}

/// Whether `a·ξ + b > 0` everywhere on the open interval.
fn affine_positive_on(a: f64, b: f64, dom: &Interval) -> bool {
    let at = |x: f64| -> bool {
        if x.is_infinite() {
            if a == 0.0 {
                b > 0.0
            } else {
                (a > 0.0) == (x > 0.0)
            }
        } else if dom.closed {
            a * x + b > 0.0
        } else {
            a * x + b >= 0.0
        }
    };
    at(dom.lo) && at(dom.hi)
}

impl Profile {
    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn constant(c: f64) -> Self {
        Self {
            kind: Kind::Constant(c),
            domain: Interval::REAL_LINE,
        }
    }

    pub fn linear(a: f64, b: f64) -> Self {
        Self {
            kind: Kind::Linear { a, b },
            domain: Interval::REAL_LINE,
        }
    }

    pub fn elementary(func: Elementary, scale: f64, rate: f64) -> Result<Self> {
        let domain = match func {
            Elementary::Coth => Interval::open(0.0, f64::INFINITY),
            _ => Interval::REAL_LINE,
        };
        Self::elementary_on(func, scale, rate, domain)
    }

    pub fn elementary_on(
        func: Elementary,
        scale: f64,
        rate: f64,
        domain: Interval,
    ) -> Result<Self> {
        Self::new(Kind::Elementary { func, scale, rate }, domain)
    }

    pub fn exp(scale: f64, rate: f64) -> Self {
        Self {
            kind: Kind::Elementary {
                func: Elementary::Exp,
                scale,
                rate,
            },
            domain: Interval::REAL_LINE,
        }
    }

    pub fn cosh(scale: f64, rate: f64) -> Self {
        Self {
            kind: Kind::Elementary {
                func: Elementary::Cosh,
                scale,
                rate,
            },
            domain: Interval::REAL_LINE,
        }
    }

    pub fn sech(scale: f64, rate: f64) -> Self {
        Self {
            kind: Kind::Elementary {
                func: Elementary::Sech,
                scale,
                rate,
            },
            domain: Interval::REAL_LINE,
        }
    }

    pub fn tanh(scale: f64, rate: f64) -> Self {
        Self {
            kind: Kind::Elementary {
                func: Elementary::Tanh,
                scale,
                rate,
            },
            domain: Interval::REAL_LINE,
        }
    }

    /// `scale·coth(rate·ξ)` on the positive half-line.
    pub fn coth(scale: f64, rate: f64) -> Result<Self> {
        Self::elementary(Elementary::Coth, scale, rate)
    }

    pub fn log_affine(offset: f64, terms: Vec<[f64; 3]>, domain: Interval) -> Result<Self> {
        Self::new(Kind::LogAffine { offset, terms }, domain)
    }

    pub fn power(scale: f64, exponent: f64, shift: f64, domain: Interval) -> Result<Self> {
        Self::new(
            Kind::Power {
                scale,
                exponent,
                shift,
            },
            domain,
        )
    }

    /// Natural cubic spline through `(xs, ys)`.
    pub fn from_samples(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let s = Spline::natural(xs, ys)?;
        let domain = Interval::closed(s.lo(), s.hi());
        Ok(Self {
            kind: Kind::Spline(s),
            domain,
        })
    }

    /// Quintic Hermite spline through values, slopes and curvatures.
    pub fn from_hermite(xs: Vec<f64>, ys: Vec<f64>, dys: Vec<f64>, ddys: Vec<f64>) -> Result<Self> {
        let s = Spline::hermite(xs, ys, dys, ddys)?;
        let domain = Interval::closed(s.lo(), s.hi());
        Ok(Self {
            kind: Kind::Spline(s),
            domain,
        })
    }

    /// Septic Hermite spline that also matches third derivatives.
    pub fn from_hermite3(
        xs: Vec<f64>,
        ys: Vec<f64>,
        dys: Vec<f64>,
        ddys: Vec<f64>,
        dddys: Vec<f64>,
    ) -> Result<Self> {
        let s = Spline::hermite3(xs, ys, dys, ddys, dddys)?;
        let domain = Interval::closed(s.lo(), s.hi());
        Ok(Self {
            kind: Kind::Spline(s),
            domain,
        })
    }

    /// Samples a function on `xs` and builds a quintic Hermite spline, taking
    /// slope and curvature from five-point finite differences of `f`
    /// (one-sided at the ends so that `f` is only queried inside `[xs[0], xs[last]]`).
    pub fn sampled<F>(xs: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if xs.len() < 2 {
            return Err(Error::TooFewPoints {
                got: xs.len(),
                need: 2,
            });
        }
        let lo = xs[0];
        let hi = xs[xs.len() - 1];
        let step = 1e-3 * (hi - lo).min(1.0);
        let mut ys = Vec::with_capacity(xs.len());
        let mut dys = Vec::with_capacity(xs.len());
        let mut ddys = Vec::with_capacity(xs.len());
        for &x in &xs {
            let y = f(x)?;
            let (d1, d2) = if x - 2.0 * step >= lo && x + 2.0 * step <= hi {
                let fm2 = f(x - 2.0 * step)?;
                let fm1 = f(x - step)?;
                let fp1 = f(x + step)?;
                let fp2 = f(x + 2.0 * step)?;
                (
                    (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step),
                    (-fm2 + 16.0 * fm1 - 30.0 * y + 16.0 * fp1 - fp2) / (12.0 * step * step),
                )
            } else {
                let dir = if x - 2.0 * step < lo { 1.0 } else { -1.0 };
                let s = dir * step;
                let v: Vec<f64> = (0..6)
                    .map(|k| if k == 0 { Ok(y) } else { f(x + k as f64 * s) })
                    .collect::<Result<_>>()?;
                (
                    (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4])
                        / (12.0 * s),
                    (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4]
                        - 10.0 * v[5])
                        / (12.0 * s * s),
                )
            };
            ys.push(y);
            dys.push(d1);
            ddys.push(d2);
        }
        Self::from_hermite(xs, ys, dys, ddys)
    }

    pub fn composite(op: CompositeOp) -> Result<Self> {
        let domain = match &op {
            CompositeOp::Sum(ps) | CompositeOp::Product(ps) => {
                if ps.is_empty() {
                    return Err(bad("composite", "sum/product needs at least one part"));
                }
                ps.iter()
                    .skip(1)
                    .fold(ps[0].domain, |d, p| d.intersect(&p.domain))
            }
            CompositeOp::Quotient(a, b) => a.domain.intersect(&b.domain),
            CompositeOp::Scale(_, p)
            | CompositeOp::Pow(p, _)
            | CompositeOp::Ln(p)
            | CompositeOp::Exp(p) => p.domain,
        };
        Self::new(Kind::Composite(op), domain)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            kind: Kind::Composite(CompositeOp::Scale(c, Box::new(self.clone()))),
            domain: self.domain,
        }
    }

    pub fn pow(&self, p: f64) -> Self {
        Self {
            kind: Kind::Composite(CompositeOp::Pow(Box::new(self.clone()), p)),
            domain: self.domain,
        }
    }

    pub fn ln(&self) -> Self {
        Self {
            kind: Kind::Composite(CompositeOp::Ln(Box::new(self.clone()))),
            domain: self.domain,
        }
    }

    pub fn exp_of(&self) -> Self {
        Self {
            kind: Kind::Composite(CompositeOp::Exp(Box::new(self.clone()))),
            domain: self.domain,
        }
    }

    pub fn times(&self, other: &Profile) -> Self {
        Self {
            kind: Kind::Composite(CompositeOp::Product(vec![self.clone(), other.clone()])),
            domain: self.domain.intersect(&other.domain),
        }
    }

    pub fn plus(&self, other: &Profile) -> Self {
        Self {
            kind: Kind::Composite(CompositeOp::Sum(vec![self.clone(), other.clone()])),
            domain: self.domain.intersect(&other.domain),
        }
    }

    /// Restricts the profile to a sub-interval of its domain.
    pub fn restricted(&self, domain: Interval) -> Result<Self> {
        let d = self.domain.intersect(&domain);
        if d.is_empty() {
            return Err(bad(self.kind_name(), "restriction leaves an empty domain"));
        }
        Ok(Self {
            kind: self.kind.clone(),
            domain: d,
        })
    }

    /// Builds a builtin profile from its wire name and coefficient list.
    pub fn builtin(kind: &str, coeffs: &[f64], domain: Option<Interval>) -> Result<Self> {
        let need = |n: &[usize]| -> Result<()> {
            if n.contains(&coeffs.len()) {
                Ok(())
            } else {
                Err(bad(
                    kind,
                    format!("expected {:?} coefficients, got {}", n, coeffs.len()),
                ))
            }
        };
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(bad(kind, format!("coefficient {i} is not finite")));
        }
        let (k, default_domain) = match kind {
            "constant" => {
                need(&[1])?;
                (Kind::Constant(coeffs[0]), Interval::REAL_LINE)
            }
            "linear" => {
                need(&[2])?;
                (
                    Kind::Linear {
                        a: coeffs[0],
                        b: coeffs[1],
                    },
                    Interval::REAL_LINE,
                )
            }
            "exp" | "cosh" | "sech" | "tanh" | "coth" => {
                need(&[2])?;
                let func = match kind {
                    "exp" => Elementary::Exp,
                    "cosh" => Elementary::Cosh,
                    "sech" => Elementary::Sech,
                    "tanh" => Elementary::Tanh,
                    _ => Elementary::Coth,
                };
                let dom = if func == Elementary::Coth {
                    if coeffs[1] > 0.0 {
                        Interval::open(0.0, f64::INFINITY)
                    } else {
                        Interval::open(f64::NEG_INFINITY, 0.0)
                    }
                } else {
                    Interval::REAL_LINE
                };
                (
                    Kind::Elementary {
                        func,
                        scale: coeffs[0],
                        rate: coeffs[1],
                    },
                    dom,
                )
            }
            "log-affine" => {
                if coeffs.len() < 4 || !(coeffs.len() - 1).is_multiple_of(3) {
                    return Err(bad(kind, "expected [offset, c1, a1, b1, c2, a2, b2, ...]"));
                }
                let terms: Vec<[f64; 3]> =
                    coeffs[1..].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
                // Default domain: where every affine argument is positive.
                let mut dom = Interval::REAL_LINE;
                for t in &terms {
                    let (a, b) = (t[1], t[2]);
                    if a > 0.0 {
                        dom = dom.intersect(&Interval::open(-b / a, f64::INFINITY));
                    } else if a < 0.0 {
                        dom = dom.intersect(&Interval::open(f64::NEG_INFINITY, -b / a));
                    }
                }
                (
                    Kind::LogAffine {
                        offset: coeffs[0],
                        terms,
                    },
                    dom,
                )
            }
            "power" => {
                need(&[2, 3])?;
                let shift = coeffs.get(2).copied().unwrap_or(0.0);
                let exponent = coeffs[1];
                let integral = exponent.fract() == 0.0 && exponent >= 0.0;
                let dom = if integral {
                    Interval::REAL_LINE
                } else {
                    Interval::open(-shift, f64::INFINITY)
                };
                (
                    Kind::Power {
                        scale: coeffs[0],
                        exponent,
                        shift,
                    },
                    dom,
                )
            }
            other => return Err(bad(other, "unknown builtin kind")),
        };
        Self::new(k, domain.unwrap_or(default_domain))
    }

    fn new(kind: Kind, domain: Interval) -> Result<Self> {
        if domain.is_empty() || domain.lo.is_nan() || domain.hi.is_nan() {
            return Err(bad(kind_name(&kind), "empty domain"));
        }
        match &kind {
            Kind::Elementary {
                func: Elementary::Coth,
                rate,
                ..
            } => {
                if *rate == 0.0 {
                    return Err(bad("coth", "rate must be nonzero"));
                }
                if !(domain.lo >= 0.0 || domain.hi <= 0.0) {
                    return Err(bad("coth", "domain must not contain the pole at 0"));
                }
            }
            Kind::LogAffine { terms, .. } => {
                for t in terms {
                    if !affine_positive_on(t[1], t[2], &domain) {
                        return Err(bad(
                            "log-affine",
                            format!(
                                "argument {}·ξ + {} is not positive on the domain",
                                t[1], t[2]
                            ),
                        ));
                    }
                }
            }
            Kind::Power {
                exponent, shift, ..
            } => {
                let integral = exponent.fract() == 0.0 && *exponent >= 0.0;
                if !integral && !affine_positive_on(1.0, *shift, &domain) {
                    return Err(bad(
                        "power",
                        "base ξ + shift must be positive on the domain",
                    ));
                }
            }
            Kind::Spline(s) if domain.lo < s.lo() || domain.hi > s.hi() => {
                return Err(bad("spline", "domain exceeds the knot range"));
            }
            _ => {}
        }
        Ok(Self { kind, domain })
    }

    pub fn kind_name(&self) -> &'static str {
        kind_name(&self.kind)
    }

    /// Value of a constant-kind profile.
    pub fn as_constant(&self) -> Option<f64> {
        match self.kind {
            Kind::Constant(c) => Some(c),
            _ => None,
        }
    }

    /// `(p(ξ), p′(ξ), p″(ξ))`.
    pub fn eval_jet2(&self, xi: f64) -> Result<Jet2> {
        self.domain.check(xi)?;
        let j = self.eval_unchecked(xi)?;
        if !j.is_finite() {
            return Err(Error::NonFinite {
                what: format!("{} profile", self.kind_name()),
                xi,
            });
        }
        Ok(j)
    }

    pub fn value(&self, xi: f64) -> Result<f64> {
        self.eval_jet2(xi).map(|j| j.value)
    }

    fn eval_unchecked(&self, xi: f64) -> Result<Jet2> {
        Ok(match &self.kind {
            Kind::Constant(c) => Jet2::constant(*c),
            Kind::Linear { a, b } => Jet2::new(a + b * xi, *b, 0.0),
            Kind::Elementary { func, scale, rate } => {
                let t = rate * xi;
                let (g, dg, ddg) = match func {
                    Elementary::Exp => {
                        let e = t.exp();
                        (e, e, e)
                    }
                    Elementary::Cosh => (t.cosh(), t.sinh(), t.cosh()),
                    Elementary::Sech => {
                        let s = 1.0 / t.cosh();
                        let th = t.tanh();
                        (s, -s * th, s * (2.0 * th * th - 1.0))
                    }
                    Elementary::Tanh => {
                        let th = t.tanh();
                        let s2 = 1.0 - th * th;
                        (th, s2, -2.0 * th * s2)
                    }
                    Elementary::Coth => {
                        let c = 1.0 / t.tanh();
                        let cs2 = c * c - 1.0;
                        (c, -cs2, 2.0 * c * cs2)
                    }
                };
                Jet2::new(scale * g, scale * rate * dg, scale * rate * rate * ddg)
            }
            Kind::LogAffine { offset, terms } => {
                let mut out = Jet2::constant(*offset);
                for t in terms {
                    let (c, a, b) = (t[0], t[1], t[2]);
                    let arg = a * xi + b;
                    out = out + Jet2::new(c * arg.ln(), c * a / arg, -c * a * a / (arg * arg));
                }
                out
            }
            Kind::Power {
                scale,
                exponent,
                shift,
            } => Jet2::variable(xi + shift).powf(*exponent).scale(*scale),
            Kind::Spline(s) => s.eval(xi),
            Kind::Composite(op) => match op {
                CompositeOp::Sum(ps) => {
                    let mut acc = Jet2::default();
                    for p in ps {
                        acc = acc + p.eval_jet2(xi)?;
                    }
                    acc
                }
                CompositeOp::Product(ps) => {
                    let mut acc = Jet2::constant(1.0);
                    for p in ps {
                        acc = acc * p.eval_jet2(xi)?;
                    }
                    acc
                }
                CompositeOp::Quotient(a, b) => {
                    let den = b.eval_jet2(xi)?;
                    if den.value == 0.0 {
                        return Err(Error::NonFinite {
                            what: "quotient with vanishing denominator".into(),
                            xi,
                        });
                    }
                    a.eval_jet2(xi)? / den
                }
                CompositeOp::Scale(c, p) => p.eval_jet2(xi)?.scale(*c),
                CompositeOp::Pow(p, e) => {
                    let base = p.eval_jet2(xi)?;
                    let integral = e.fract() == 0.0 && *e >= 0.0;
                    if !integral && base.value <= 0.0 {
                        return Err(Error::NonFinite {
                            what: "fractional power of a nonpositive value".into(),
                            xi,
                        });
                    }
                    base.powf(*e)
                }
                CompositeOp::Ln(p) => {
                    let base = p.eval_jet2(xi)?;
                    if base.value <= 0.0 {
                        return Err(Error::NonFinite {
                            what: "logarithm of a nonpositive value".into(),
                            xi,
                        });
                    }
                    base.ln()
                }
                CompositeOp::Exp(p) => p.eval_jet2(xi)?.exp(),
            },
        })
    }

    /// Samples the profile on `[lo, hi]` and screens for positivity.
    pub fn positivity_certificate(
        &self,
        lo: f64,
        hi: f64,
        samples: usize,
    ) -> Result<PositivityCertificate> {
        let samples = samples.max(2);
        let spacing = (hi - lo) / (samples - 1) as f64;
        let mut min_value = f64::INFINITY;
        let mut argmin = lo;
        let mut max_slope: f64 = 0.0;
        for i in 0..samples {
            let x = lo + spacing * i as f64;
            let j = self.eval_jet2(x)?;
            if j.value < min_value {
                min_value = j.value;
                argmin = x;
            }
            max_slope = max_slope.max(j.d1.abs());
        }
        let margin = min_value - 0.5 * spacing * max_slope;
        Ok(PositivityCertificate {
            lo,
            hi,
            samples,
            min_value,
            argmin,
            max_slope,
            positive: margin > 0.0,
        })
    }
}

fn kind_name(kind: &Kind) -> &'static str {
    match kind {
        Kind::Constant(_) => "constant",
        Kind::Linear { .. } => "linear",
        Kind::Elementary { func, .. } => match func {
            Elementary::Exp => "exp",
            Elementary::Cosh => "cosh",
            Elementary::Sech => "sech",
            Elementary::Tanh => "tanh",
            Elementary::Coth => "coth",
        },
        Kind::LogAffine { .. } => "log-affine",
        Kind::Power { .. } => "power",
        Kind::Spline(_) => "spline",
        Kind::Composite(_) => "composite",
    }
}

/// Grid-based positivity screen: the sampled minimum minus half a grid
/// spacing times the largest sampled slope must stay positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub min_value: f64,
    pub argmin: f64,
    pub max_slope: f64,
    pub positive: bool,
}
