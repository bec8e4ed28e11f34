//! Gradient-estimate probe, growth probe and the rigidity/nonexistence
//! classifier for the Lichnerowicz-type equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::bakry_emery_eigs;
use crate::geometry::BaseAnsatz;
use crate::grid::{Exec, Grid};
use crate::lichnerowicz::{self, general_pde_residual};
use crate::profiles::Profile;
use crate::system::{Params, WarpedAnsatz};

// ---------------------------------------------------------------------------
// Gradient estimate probe

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    /// Ball radius, at least 2.
    #[serde(rename = "R")]
    pub radius: f64,
    /// Ball centre as a ξ value.
    pub x0: f64,
    pub p: f64,
    /// Defaults to δ + p·ln D, the smallest q with q − p ln u ≥ δ.
    pub q: Option<f64>,
    pub delta: f64,
    /// Upper bound for u on the ball; defaults to the sampled maximum.
    #[serde(rename = "D")]
    pub d_bound: Option<f64>,
    /// Ricci lower-bound constant; computed from Ric^φ when absent.
    #[serde(rename = "K")]
    pub k: Option<f64>,
    /// Max of Δ_φ r on the unit sphere; computed when absent.
    pub gamma: Option<f64>,
    /// Samples per ball.
    pub points: usize,
    /// The input must solve its equation to this (relative) tolerance.
    pub residual_tol: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            radius: 2.0,
            x0: 0.0,
            p: 1.0,
            q: None,
            delta: 1.0,
            d_bound: None,
            k: None,
            gamma: None,
            points: 401,
            residual_tol: 1e-8,
        }
    }
}

impl EstimateConfig {
    pub fn with_radius(radius: f64) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParams(s));
        if !(self.radius >= 2.0) || !self.radius.is_finite() {
            return bad(format!(
                "ball radius must be finite and at least 2, got {}",
                self.radius
            ));
        }
        if !(self.p > 0.0) || !(self.delta > 0.0) {
            return bad(format!(
                "need p > 0 and delta > 0 (p = {}, delta = {})",
                self.p, self.delta
            ));
        }
        if !self.x0.is_finite() {
            return bad("ball centre must be finite".into());
        }
        if self.points < 3 {
            return bad(format!(
                "need at least 3 points per ball, got {}",
                self.points
            ));
        }
        if matches!(self.k, Some(k) if !(k >= 0.0)) {
            return bad("K must be nonnegative".into());
        }
        if !(self.residual_tol > 0.0) {
            return bad("residual_tol must be positive".into());
        }
        Ok(())
    }
}

/// `Δ_φ u + A·u + B·u^ε = 0` on a base with Ψ ≡ 1.
#[derive(Debug, Clone)]
pub struct EstimateProblem {
    pub base: BaseAnsatz,
    pub phi: Profile,
    pub u: Profile,
    pub a: Profile,
    pub b: f64,
    pub eps: f64,
}

impl EstimateProblem {
    /// The Lichnerowicz data of an ansatz divided through by σ, so that
    /// φ = w, A = coeff_A/σ and B = coeff_B/σ.
    pub fn lichnerowicz(a: &WarpedAnsatz) -> Result<Self> {
        let l = lichnerowicz::build(a)?;
        Ok(Self {
            base: a.base.clone(),
            phi: l.w,
            u: l.u,
            a: l.coeff_a.scaled(1.0 / l.sigma),
            b: l.coeff_b / l.sigma,
            eps: l.epsilon,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketTerms {
    pub inv_radius: f64,
    pub sqrt_k: f64,
    pub gamma_term: f64,
    pub grad_a: f64,
    pub a_plus: f64,
    pub nonlinear: f64,
}

impl BracketTerms {
    pub fn total(&self) -> f64 {
        self.inv_radius + self.sqrt_k + self.gamma_term + self.grad_a + self.a_plus + self.nonlinear
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateRow {
    pub xi: f64,
    pub u: f64,
    pub grad_ln_u: f64,
    pub bracket: f64,
    pub local_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    #[serde(rename = "R")]
    pub radius: f64,
    pub x0: f64,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    #[serde(rename = "D")]
    pub d_bound: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub gamma: f64,
    pub max_residual: f64,
    pub terms: BracketTerms,
    pub lhs_sup: f64,
    pub rhs_bracket_sup: f64,
    pub empirical_c: f64,
    /// Rows on B(x0, R/2).
    pub rows: Vec<EstimateRow>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn sup(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// ‖∇ln u‖ at ξ on a flat base: ‖ᾱ‖·|u′/u|.
fn grad_ln(u: &Profile, s: f64, xi: f64) -> Result<(f64, f64)> {
    let j = u.eval_jet2(xi)?;
    if !(j.value > 0.0) {
        return Err(Error::NonpositiveU { xi, value: j.value });
    }
    Ok((j.value, s * (j.d1 / j.value).abs()))
}

/// Probes the gradient estimate on B(x0, R) for a solution on a flat base.
///
/// In the reduced geometry the distance from x0 is |ξ − ξ0|/‖ᾱ‖, so the
/// balls are ξ-intervals of half-width ‖ᾱ‖R and ‖ᾱ‖R/2.
pub fn empirical_estimate(cfg: &EstimateConfig, pb: &EstimateProblem) -> Result<EstimateReport> {
    empirical_estimate_with(cfg, pb, Exec::default())
}

pub fn empirical_estimate_with(
    cfg: &EstimateConfig,
    pb: &EstimateProblem,
    exec: Exec,
) -> Result<EstimateReport> {
    cfg.validate()?;
    if pb.base.psi.as_constant() != Some(1.0) {
        return Err(Error::UnsupportedBase(
            "the estimate probe needs a flat base (psi = 1)".into(),
        ));
    }
    let n = pb.base.n as f64;
    let s = pb.base.alpha_bar_norm_sq.sqrt();
    let (x0, big_r) = (cfg.x0, cfg.radius);
    let outer = linspace(x0 - s * big_r, x0 + s * big_r, cfg.points);
    let inner = linspace(x0 - 0.5 * s * big_r, x0 + 0.5 * s * big_r, cfg.points);

    // one pass over the outer ball for everything the bracket needs
    struct Sample {
        xi: f64,
        u: f64,
        residual: f64,
        scale: f64,
        min_eig: f64,
        a: f64,
        grad_a: f64,
    }
    let samples = exec.try_map(&outer, |xi| {
        let residual = general_pde_residual(&pb.base, &pb.phi, &pb.u, &pb.a, pb.b, pb.eps, xi)?;
        let u = pb.u.value(xi)?;
        let aj = pb.a.eval_jet2(xi)?;
        let power = if pb.b == 0.0 {
            0.0
        } else {
            (pb.b * (pb.eps * u.ln()).exp()).abs()
        };
        let (e1, e2) = bakry_emery_eigs(&pb.base, &pb.phi, xi)?;
        Ok(Sample {
            xi,
            u,
            residual: residual.abs(),
            scale: 1f64.max((aj.value * u).abs()).max(power),
            min_eig: e1.min(e2),
            a: aj.value,
            grad_a: s * aj.d1.abs(),
        })
    })?;

    let mut max_residual: f64 = 0.0;
    for sm in &samples {
        if sm.residual > cfg.residual_tol * sm.scale || sm.residual.is_nan() {
            return Err(Error::NotASolution {
                residual: sm.residual,
                xi: sm.xi,
                tol: cfg.residual_tol,
            });
        }
        max_residual = max_residual.max(sm.residual);
    }

    let u_max = samples
        .iter()
        .map(|sm| sm.u)
        .fold(f64::NEG_INFINITY, f64::max);
    let d_bound = cfg.d_bound.unwrap_or(u_max);
    if d_bound < u_max {
        return Err(Error::InvalidParams(format!(
            "D = {d_bound} is below sup u = {u_max} on the ball"
        )));
    }
    let q = cfg.q.unwrap_or(cfg.delta + cfg.p * d_bound.ln());
    let weight = |u: f64| q - cfg.p * u.ln();
    for sm in &samples {
        if weight(sm.u) < cfg.delta * (1.0 - 1e-12) {
            return Err(Error::InvalidParams(format!(
                "q - p ln u = {} < delta = {} at xi = {}",
                weight(sm.u),
                cfg.delta,
                sm.xi
            )));
        }
    }

    let k = match cfg.k {
        Some(k) => k,
        None => {
            let lo = samples
                .iter()
                .map(|sm| sm.min_eig)
                .fold(f64::INFINITY, f64::min);
            (-lo).max(0.0) / (n - 1.0)
        }
    };
    let gamma = match cfg.gamma {
        Some(g) => g,
        None => {
            // points of the unit sphere about x0 sit at ξ = ξ0 + ‖ᾱ‖c with
            // c the cosine to ᾱ; there Δ_φ r = (n − 1) − φ′·‖ᾱ‖c
            let mut g = f64::NEG_INFINITY;
            for c in linspace(-1.0, 1.0, 201) {
                let dphi = pb.phi.eval_jet2(x0 + s * c)?.d1;
                g = g.max((n - 1.0) - dphi * s * c);
            }
            g
        }
    };

    let nonlinear = if pb.b == 0.0 {
        0.0
    } else {
        let first = sup(samples.iter().map(|sm| {
            ((pb.eps - 1.0 + cfg.p / weight(sm.u)) * pb.b)
                .max(0.0)
                .sqrt()
        }));
        let second = sup(samples.iter().map(|sm| sm.u.powf(0.5 * (pb.eps - 1.0))));
        if first == 0.0 {
            0.0
        } else {
            first * second
        }
    };
    let terms = BracketTerms {
        inv_radius: 1.0 / big_r,
        sqrt_k: k.sqrt(),
        gamma_term: gamma.max(0.0).sqrt() / big_r.sqrt(),
        grad_a: sup(samples.iter().map(|sm| sm.grad_a.cbrt())),
        a_plus: sup(samples.iter().map(|sm| sm.a.max(0.0).sqrt())),
        nonlinear,
    };
    let bracket = terms.total();

    let lhs = exec.try_map(&inner, |xi| grad_ln(&pb.u, s, xi))?;
    let mut rows = Vec::with_capacity(inner.len());
    let (mut lhs_sup, mut empirical_c) = (0.0f64, 0.0f64);
    for (&xi, &(u, g)) in inner.iter().zip(&lhs) {
        let local_c = if g == 0.0 {
            0.0
        } else if bracket == 0.0 {
            return Err(Error::BracketZero { xi });
        } else {
            g / (weight(u) * bracket)
        };
        lhs_sup = lhs_sup.max(g);
        empirical_c = empirical_c.max(local_c);
        rows.push(EstimateRow {
            xi,
            u,
            grad_ln_u: g,
            bracket,
            local_c,
        });
    }

    Ok(EstimateReport {
        radius: big_r,
        x0,
        p: cfg.p,
        q,
        delta: cfg.delta,
        d_bound,
        k,
        gamma,
        max_residual,
        terms,
        lhs_sup,
        rhs_bracket_sup: bracket,
        empirical_c,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Growth probe

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    DecayingToZero,
    BoundedNonzero,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthSample {
    pub xi: f64,
    /// ln f(ξ)/√|ξ|
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub samples: Vec<GrowthSample>,
    /// Power-law exponent of the envelope of |q| between the second and last
    /// quarters of the sampled range.
    pub exponent: f64,
    pub verdict: GrowthVerdict,
}

const GROWTH_SAMPLES: usize = 400;
const GROWTH_SLACK: f64 = 0.05;
/// Far end used when probing an ansatz; e^ξ still fits in a double there.
pub const GROWTH_REACH: f64 = 500.0;

/// Samples q(ξ) = ln f/√|ξ| at geometrically spaced ξ towards the end of
/// `range` farthest from the origin. The verdict is a numerical indicator of
/// whether f = e^{o(√r)}, not a proof.
pub fn growth_probe(f: &Profile, range: (f64, f64)) -> Result<GrowthReport> {
    growth_probe_fn(|xi| f.value(xi), range)
}

pub fn growth_probe_fn<F>(f: F, range: (f64, f64)) -> Result<GrowthReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!(
            "bad growth range ({lo}, {hi})"
        )));
    }
    let dir = if hi.abs() >= lo.abs() { 1.0 } else { -1.0 };
    let far = if dir > 0.0 { hi } else { -lo };
    let near = if dir > 0.0 {
        lo.max(0.0)
    } else {
        (-hi).max(0.0)
    };
    let start = near.max(1.0);
    if far < 100.0 * start {
        return Err(Error::InvalidParams(format!(
            "growth range must span at least two decades away from the origin, got |xi| in [{start}, {far}]"
        )));
    }

    let ratio = (far / start).ln();
    let mut samples = Vec::with_capacity(GROWTH_SAMPLES);
    for i in 0..GROWTH_SAMPLES {
        let t = i as f64 / (GROWTH_SAMPLES - 1) as f64;
        let mag = if i + 1 == GROWTH_SAMPLES {
            far
        } else {
            start * (t * ratio).exp()
        };
        let xi = dir * mag;
        let v = f(xi)?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "f".into(),
                xi,
            });
        }
        if !(v > 0.0) {
            return Err(Error::NonpositiveProfile {
                name: "f".into(),
                xi,
                value: v,
            });
        }
        samples.push(GrowthSample {
            xi,
            q: v.ln() / mag.sqrt(),
        });
    }

    let quarter = GROWTH_SAMPLES / 4;
    let envelope = |from: usize| sup(samples[from..from + quarter].iter().map(|s| s.q.abs()));
    let (mid, tail) = (envelope(quarter), envelope(3 * quarter));
    // window maxima sit at matching ends of the two windows
    let span = ratio * (2 * quarter) as f64 / (GROWTH_SAMPLES - 1) as f64;
    let exponent = if tail == 0.0 {
        f64::NEG_INFINITY
    } else if mid == 0.0 {
        f64::INFINITY
    } else {
        (tail / mid).ln() / span
    };
    let verdict = if exponent < -GROWTH_SLACK {
        GrowthVerdict::DecayingToZero
    } else if exponent > GROWTH_SLACK {
        GrowthVerdict::Growing
    } else {
        GrowthVerdict::BoundedNonzero
    };
    Ok(GrowthReport {
        samples,
        exponent,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Rigidity / nonexistence classifier

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Pos, Sign::Neg, Sign::Zero];

    /// Sign with |x| ≤ tol counted as zero.
    pub fn of(x: f64, tol: f64) -> Sign {
        if x > tol {
            Sign::Pos
        } else if x < -tol {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "pos" | "positive" => Ok(Sign::Pos),
            "-" | "neg" | "negative" => Ok(Sign::Neg),
            "0" | "zero" => Ok(Sign::Zero),
            _ => Err(Error::Parse(format!("`{s}` is not a sign (+, -, 0)"))),
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
            Sign::Zero => "0",
        })
    }
}

/// Provenance of a side condition. Only `Verified` and `Asserted` count as
/// satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    /// Checked on a finite grid or range.
    Verified,
    /// Taken on the user's word.
    Asserted,
    /// A witness against it was found.
    Violated,
    /// Neither checked nor asserted.
    Unknown,
}

impl Evidence {
    pub fn satisfied(self) -> bool {
        matches!(self, Evidence::Verified | Evidence::Asserted)
    }
}

/// Hypothesis tuple of the rigidity and nonexistence statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidityHypotheses {
    pub sign_sigma: Sign,
    /// sign of (ρR_{g_B} + λ)/(α − 2mρ)
    #[serde(rename = "sign_A")]
    pub sign_a: Sign,
    /// sign of R_{g_F}(α − mρ)/(α − 2mρ)
    #[serde(rename = "sign_BF")]
    pub sign_bf: Sign,
    pub ricci_w_nonneg: Evidence,
    pub growth_ok: Evidence,
    pub gradient_decay: Evidence,
}

/// The same record with every field optional, as read from user input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypothesisInput {
    pub sign_sigma: Option<Sign>,
    #[serde(rename = "sign_A")]
    pub sign_a: Option<Sign>,
    #[serde(rename = "sign_BF")]
    pub sign_bf: Option<Sign>,
    pub ricci_w_nonneg: Option<Evidence>,
    pub growth_ok: Option<Evidence>,
    pub gradient_decay: Option<Evidence>,
}

impl HypothesisInput {
    pub fn complete(&self) -> Result<RigidityHypotheses> {
        let mut missing = Vec::new();
        if self.sign_sigma.is_none() {
            missing.push("sign_sigma");
        }
        if self.sign_a.is_none() {
            missing.push("sign_A");
        }
        if self.sign_bf.is_none() {
            missing.push("sign_BF");
        }
        if self.ricci_w_nonneg.is_none() {
            missing.push("ricci_w_nonneg");
        }
        if self.growth_ok.is_none() {
            missing.push("growth_ok");
        }
        if self.gradient_decay.is_none() {
            missing.push("gradient_decay");
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteHypotheses(missing.join(", ")));
        }
        Ok(RigidityHypotheses {
            sign_sigma: self.sign_sigma.unwrap(),
            sign_a: self.sign_a.unwrap(),
            sign_bf: self.sign_bf.unwrap(),
            ricci_w_nonneg: self.ricci_w_nonneg.unwrap(),
            growth_ok: self.growth_ok.unwrap(),
            gradient_decay: self.gradient_decay.unwrap(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Rigid,
    Nonexistent,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityVerdict {
    pub verdict: Verdict,
    /// Clause that produced a Rigid or Nonexistent verdict.
    pub clause: Option<String>,
    /// Clause matched by the signs alone, whether or not the side
    /// conditions held.
    pub sign_clause: Option<String>,
    pub hypotheses: RigidityHypotheses,
    pub notes: Vec<String>,
}

/// Sign table. Clause names: `rigidity` for the product conclusion,
/// `nonexistence` for the obstruction; (a) is σ > 0, (b) is σ < 0, and the
/// `[=0]` suffix marks the variant with A = 0.
pub fn sign_clause(sigma: Sign, a: Sign, bf: Sign) -> Option<(Verdict, &'static str)> {
    use Sign::*;
    use Verdict::*;
    match (sigma, a, bf) {
        (Pos, Neg, Neg) => Some((Rigid, "rigidity(a)")),
        (Pos, Zero, Zero) => Some((Rigid, "rigidity(a)[=0]")),
        (Neg, Pos, Pos) => Some((Rigid, "rigidity(b)")),
        (Neg, Zero, Zero) => Some((Rigid, "rigidity(b)[=0]")),
        (Pos, Neg, Pos) => Some((Nonexistent, "nonexistence(a)")),
        (Pos, Zero, Pos | Neg) => Some((Nonexistent, "nonexistence(a)[=0]")),
        (Neg, Pos, Neg) => Some((Nonexistent, "nonexistence(b)")),
        (Neg, Zero, Pos | Neg) => Some((Nonexistent, "nonexistence(b)[=0]")),
        _ => None,
    }
}

fn side_condition_notes(h: &RigidityHypotheses) -> Vec<String> {
    [
        ("ricci_w_nonneg", h.ricci_w_nonneg),
        ("growth_ok", h.growth_ok),
        ("gradient_decay", h.gradient_decay),
    ]
    .into_iter()
    .filter(|(_, e)| !e.satisfied())
    .map(|(name, e)| {
        format!(
            "side condition {name} is {}",
            serde_json::to_value(e).unwrap().as_str().unwrap()
        )
    })
    .collect()
}

/// Total: every tuple gets exactly one verdict, Undetermined when no
/// clause applies or a side condition is not satisfied.
pub fn classify_rigidity(h: &RigidityHypotheses) -> RigidityVerdict {
    let mut notes = Vec::new();
    let matched = sign_clause(h.sign_sigma, h.sign_a, h.sign_bf);
    if h.sign_sigma == Sign::Zero {
        notes.push("sigma cannot vanish for admissible parameters".into());
    } else if matched.is_none() {
        let mixed = (h.sign_a == Sign::Zero) != (h.sign_bf == Sign::Zero);
        notes.push(if mixed {
            "mixed strict/zero signs are not covered by either clause".into()
        } else {
            "signs lie outside both clause tables".into()
        });
    }
    let failing = side_condition_notes(h);
    let (verdict, clause) = match matched {
        Some((v, name)) if failing.is_empty() => (v, Some(name.to_string())),
        _ => (Verdict::Undetermined, None),
    };
    if matched.is_some() {
        notes.extend(failing);
    }
    RigidityVerdict {
        verdict,
        clause,
        sign_clause: matched.map(|(_, n)| n.to_string()),
        hypotheses: *h,
        notes,
    }
}

// ---------------------------------------------------------------------------
// Soliton presets

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    Ricci,
    EinsteinManifold,
    EinsteinSoliton,
    Traceless,
    Schouten,
}

impl PresetKind {
    pub const NAMES: [&'static str; 5] = [
        "ricci",
        "einstein-manifold",
        "einstein-soliton",
        "traceless",
        "schouten",
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "ricci" => PresetKind::Ricci,
            "einstein-manifold" => PresetKind::EinsteinManifold,
            "einstein-soliton" => PresetKind::EinsteinSoliton,
            "traceless" => PresetKind::Traceless,
            "schouten" => PresetKind::Schouten,
            other => return Err(Error::UnknownPreset(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub kind: PresetKind,
    pub n: usize,
    pub m: usize,
    pub params: Params,
    /// The potential is constant, so β plays no role.
    pub h_constant: bool,
    pub lambda_role: String,
}

/// Structure constants of the named soliton class, with d = n + m.
pub fn soliton_presets(name: &str, n: usize, m: usize) -> Result<Preset> {
    let kind = PresetKind::parse(name)?;
    if n < 2 || m < 1 {
        return Err(Error::InvalidParams(format!(
            "presets need n >= 2 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    let d = (n + m) as f64;
    let (rho, h_constant, role) = match kind {
        PresetKind::Ricci => (
            0.0,
            false,
            "constant; positive shrinking, zero steady, negative expanding",
        ),
        PresetKind::EinsteinManifold => (0.0, true, "constant Einstein constant, R_g = d*lambda"),
        PresetKind::EinsteinSoliton => (0.5, false, "constant, enters A through rho*R_B + lambda"),
        PresetKind::Traceless => (
            1.0 / d,
            false,
            "constant, enters A through rho*R_B + lambda",
        ),
        PresetKind::Schouten => (
            1.0 / (2.0 * (d - 1.0)),
            false,
            "constant, enters A through rho*R_B + lambda",
        ),
    };
    Ok(Preset {
        kind,
        n,
        m,
        params: Params::new(1.0, 1.0, 0.0, rho)?,
        h_constant,
        lambda_role: role.into(),
    })
}

/// A preset together with the (constant) curvature data of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub preset: Preset,
    /// Either λ itself or only its sign.
    pub lambda: Option<f64>,
    /// R_{g_B}, constant; needed whenever ρ ≠ 0.
    pub base_scalar: Option<f64>,
    pub fiber_scalar: Option<f64>,
    pub ricci_w_nonneg: Evidence,
    pub growth_ok: Evidence,
}

impl Scenario {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            lambda: None,
            base_scalar: None,
            fiber_scalar: None,
            ricci_w_nonneg: Evidence::Unknown,
            growth_ok: Evidence::Unknown,
        }
    }

    /// Sign data of the scenario. λ and R_{g_B} are constants here, so the
    /// gradient-decay condition holds identically.
    pub fn hypotheses(&self) -> Result<RigidityHypotheses> {
        let p = &self.preset.params;
        let m = self.preset.m;
        let mf = m as f64;
        let sigma = lichnerowicz::sigma(p, m)?;
        let denom = p.alpha - 2.0 * mf * p.rho;
        let mut missing = Vec::new();
        if self.lambda.is_none() {
            missing.push("lambda");
        }
        if p.rho != 0.0 && self.base_scalar.is_none() {
            missing.push("base_scalar");
        }
        if self.fiber_scalar.is_none() {
            missing.push("fiber_scalar");
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteHypotheses(missing.join(", ")));
        }
        let rb = if p.rho == 0.0 {
            0.0
        } else {
            self.base_scalar.unwrap()
        };
        let a = (p.rho * rb + self.lambda.unwrap()) / denom;
        let bf = self.fiber_scalar.unwrap() * (p.alpha - mf * p.rho) / denom;
        Ok(RigidityHypotheses {
            sign_sigma: Sign::of(sigma, 0.0),
            sign_a: Sign::of(
                a,
                1e-12 * (p.rho * rb).abs().max(self.lambda.unwrap().abs()),
            ),
            sign_bf: Sign::of(bf, 0.0),
            ricci_w_nonneg: self.ricci_w_nonneg,
            growth_ok: self.growth_ok,
            gradient_decay: Evidence::Verified,
        })
    }
}

/// Classifies a preset scenario. For an Einstein manifold (h constant, so
/// Ric^w = Ric and the drift vanishes) a nonpositive A forces u constant,
/// and a constant u solves the equation only when A and B_F agree in sign
/// with A = 0 iff B_F = 0; every other sign pair is then Nonexistent.
pub fn classify_scenario(s: &Scenario) -> Result<RigidityVerdict> {
    let h = s.hypotheses()?;
    let mut v = classify_rigidity(&h);
    if s.preset.kind == PresetKind::EinsteinManifold && h.sign_a != Sign::Pos {
        let failing = side_condition_notes(&h);
        let consistent = h.sign_a == h.sign_bf;
        let clause = if consistent {
            "einstein-rigidity"
        } else {
            "einstein-nonexistence"
        };
        v.sign_clause = Some(clause.into());
        if failing.is_empty() {
            v.verdict = if consistent {
                Verdict::Rigid
            } else {
                Verdict::Nonexistent
            };
            v.clause = Some(clause.into());
            v.notes.clear();
        } else {
            v.verdict = Verdict::Undetermined;
            v.clause = None;
            v.notes = failing;
        }
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Hypotheses read off an ansatz

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnsatzHypotheses {
    pub input: HypothesisInput,
    pub sigma: f64,
    pub coeff_a_range: (f64, f64),
    pub bf: f64,
    pub min_bakry_emery: f64,
    pub growth: Vec<GrowthReport>,
    pub notes: Vec<String>,
}

/// Reads the sign data off an ansatz on `grid`. Side conditions are
/// marked verified only where a finite check supports them; a sign of A
/// that changes across the grid is left missing.
pub fn hypotheses_from_ansatz(a: &WarpedAnsatz, grid: &Grid) -> Result<AnsatzHypotheses> {
    let l = lichnerowicz::build(a)?;
    let pts = grid.points();
    let mut notes = Vec::new();

    let avals = pts
        .iter()
        .map(|&x| l.coeff_a_at(&a.base, x))
        .collect::<Result<Vec<_>>>()?;
    let (amin, amax) = avals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let tol = 1e-12 * amin.abs().max(amax.abs()).max(1.0);
    let sign_a = match (Sign::of(amin, tol), Sign::of(amax, tol)) {
        (x, y) if x == y => Some(x),
        _ => {
            notes.push(format!(
                "A changes sign on the grid (range [{amin}, {amax}])"
            ));
            None
        }
    };
    let bf = l.bf(a.m());

    let mut min_eig = f64::INFINITY;
    for &x in &pts {
        let (e1, e2) = bakry_emery_eigs(&a.base, &l.w, x)?;
        min_eig = min_eig.min(e1).min(e2);
    }
    let ricci_w = if min_eig >= -1e-10 {
        Evidence::Verified
    } else {
        Evidence::Violated
    };

    let dom = a.domain();
    let mut growth = Vec::new();
    let mut ends = Vec::new();
    if dom.hi == f64::INFINITY {
        ends.push((1.0, GROWTH_REACH));
    }
    if dom.lo == f64::NEG_INFINITY {
        ends.push((-GROWTH_REACH, -1.0));
    }
    for r in ends {
        growth.push(growth_probe(&a.f, r)?);
    }
    let growth_ok = if growth.iter().any(|g| g.verdict == GrowthVerdict::Growing) {
        Evidence::Violated
    } else if !growth.is_empty()
        && dom.lo == f64::NEG_INFINITY
        && dom.hi == f64::INFINITY
        && growth
            .iter()
            .all(|g| g.verdict == GrowthVerdict::DecayingToZero)
    {
        Evidence::Verified
    } else {
        notes.push("growth of f not decidable on this domain".into());
        Evidence::Unknown
    };
    let gradient_decay = if l.coeff_a_constant.is_some() {
        Evidence::Verified
    } else {
        notes.push("rho*R_B + lambda is not constant; decay of its gradient is not checked".into());
        Evidence::Unknown
    };

    Ok(AnsatzHypotheses {
        input: HypothesisInput {
            sign_sigma: Some(Sign::of(l.sigma, 0.0)),
            sign_a,
            sign_bf: Some(Sign::of(bf, 1e-12 * bf.abs().max(1.0))),
            ricci_w_nonneg: Some(ricci_w),
            growth_ok: Some(growth_ok),
            gradient_decay: Some(gradient_decay),
        },
        sigma: l.sigma,
        coeff_a_range: (amin, amax),
        bf,
        min_bakry_emery: min_eig,
        growth,
        notes,
    })
}
