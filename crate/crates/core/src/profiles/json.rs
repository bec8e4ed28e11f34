use serde::{Deserialize, Serialize};

use super::spline::SplineData;
use super::{CompositeOp, Elementary, Interval, Kind, Profile};
use crate::error::Error;

/// Wire form of a [`Profile`].
///
/// `{"kind": "exp", "coeffs": [1, 1], "domain": [null, null]}`; splines carry
/// `xs`/`ys` (plus `dys`/`ddys`, and optionally `dddys`, for the Hermite forms) and composites
/// carry `op` and `parts`. Infinite domain ends serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[Option<f64>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<ProfileDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ys: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dys: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ddys: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dddys: Option<Vec<f64>>,
}

fn end(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn doc(kind: &str, coeffs: Vec<f64>) -> ProfileDoc {
    ProfileDoc {
        kind: kind.to_string(),
        coeffs,
        domain: None,
        op: None,
        parts: Vec::new(),
        xs: None,
        dddys: None,
        ys: None,
        dys: None,
        ddys: None,
    }
}

impl From<Profile> for ProfileDoc {
    fn from(p: Profile) -> Self {
        let mut d = match p.kind {
            Kind::Constant(c) => doc("constant", vec![c]),
            Kind::Linear { a, b } => doc("linear", vec![a, b]),
            Kind::Elementary { func, scale, rate } => {
                let name = match func {
                    Elementary::Exp => "exp",
                    Elementary::Cosh => "cosh",
                    Elementary::Sech => "sech",
                    Elementary::Tanh => "tanh",
                    Elementary::Coth => "coth",
                };
                doc(name, vec![scale, rate])
            }
            Kind::LogAffine { offset, terms } => {
                let mut c = vec![offset];
                c.extend(terms.iter().flatten());
                doc("log-affine", c)
            }
            Kind::Power {
                scale,
                exponent,
                shift,
            } => doc("power", vec![scale, exponent, shift]),
            Kind::Spline(s) => {
                let mut d = doc("spline", Vec::new());
                if let SplineData::Hermite { dys, ddys, dddys } = s.data {
                    d.dys = Some(dys);
                    d.ddys = Some(ddys);
                    d.dddys = dddys;
                }
                d.xs = Some(s.xs);
                d.ys = Some(s.ys);
                d
            }
            Kind::Composite(op) => {
                let mut d = doc("composite", Vec::new());
                let (name, coeffs, parts): (&str, Vec<f64>, Vec<Profile>) = match op {
                    CompositeOp::Sum(ps) => ("sum", vec![], ps),
                    CompositeOp::Product(ps) => ("product", vec![], ps),
                    CompositeOp::Quotient(a, b) => ("quotient", vec![], vec![*a, *b]),
                    CompositeOp::Scale(c, p) => ("scale", vec![c], vec![*p]),
                    CompositeOp::Pow(p, e) => ("pow", vec![e], vec![*p]),
                    CompositeOp::Ln(p) => ("ln", vec![], vec![*p]),
                    CompositeOp::Exp(p) => ("exp", vec![], vec![*p]),
                };
                d.op = Some(name.to_string());
                d.coeffs = coeffs;
                d.parts = parts.into_iter().map(ProfileDoc::from).collect();
                d
            }
        };
        if d.kind != "spline" {
            d.domain = Some([end(p.domain.lo), end(p.domain.hi)]);
        }
        d
    }
}

impl TryFrom<ProfileDoc> for Profile {
    type Error = Error;

    fn try_from(d: ProfileDoc) -> Result<Self, Error> {
        let domain = d.domain.map(|[lo, hi]| {
            Interval::open(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))
        });
        match d.kind.as_str() {
            "spline" => {
                let xs =
                    d.xs.ok_or_else(|| Error::Parse("spline profile needs `xs`".into()))?;
                let ys =
                    d.ys.ok_or_else(|| Error::Parse("spline profile needs `ys`".into()))?;
                match (d.dys, d.ddys) {
                    (Some(dys), Some(ddys)) => match d.dddys {
                        Some(dddys) => Profile::from_hermite3(xs, ys, dys, ddys, dddys),
                        None => Profile::from_hermite(xs, ys, dys, ddys),
                    },
                    (None, None) if d.dddys.is_none() => Profile::from_samples(xs, ys),
                    _ => Err(Error::Parse(
                        "hermite spline needs both `dys` and `ddys`".into(),
                    )),
                }
            }
            "composite" => {
                let op =
                    d.op.ok_or_else(|| Error::Parse("composite profile needs `op`".into()))?;
                let mut parts = d
                    .parts
                    .into_iter()
                    .map(Profile::try_from)
                    .collect::<Result<Vec<_>, _>>()?;
                let arity = |n: usize, parts: &Vec<Profile>| -> Result<(), Error> {
                    if parts.len() == n {
                        Ok(())
                    } else {
                        Err(Error::Parse(format!(
                            "composite `{op}` takes {n} part(s), got {}",
                            parts.len()
                        )))
                    }
                };
                let coeff = |i: usize| -> Result<f64, Error> {
                    d.coeffs.get(i).copied().ok_or_else(|| {
                        Error::Parse(format!("composite `{op}` needs a coefficient"))
                    })
                };
                let built = match op.as_str() {
                    "sum" => CompositeOp::Sum(parts),
                    "product" => CompositeOp::Product(parts),
                    "quotient" => {
                        arity(2, &parts)?;
                        let b = parts.pop().unwrap();
                        let a = parts.pop().unwrap();
                        CompositeOp::Quotient(Box::new(a), Box::new(b))
                    }
                    "scale" | "pow" | "ln" | "exp" => {
                        arity(1, &parts)?;
                        let p = Box::new(parts.pop().unwrap());
                        match op.as_str() {
                            "scale" => CompositeOp::Scale(coeff(0)?, p),
                            "pow" => CompositeOp::Pow(p, coeff(0)?),
                            "ln" => CompositeOp::Ln(p),
                            _ => CompositeOp::Exp(p),
                        }
                    }
                    other => return Err(Error::Parse(format!("unknown composite op `{other}`"))),
                };
                let p = Profile::composite(built)?;
                match domain {
                    Some(dom) => p.restricted(dom),
                    None => Ok(p),
                }
            }
            kind => Profile::builtin(kind, &d.coeffs, domain),
        }
    }
}
