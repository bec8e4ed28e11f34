//! Dormand–Prince 5(4) with first-same-as-last and a standard step controller.

use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl RkOptions {
    pub fn with_tol(tol: f64, max_step: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_step,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Why an integration stopped before reaching its end point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Halt {
    /// The guard rejected the state; carries the last accepted abscissa.
    Guard(f64),
    /// Step size underflow at the given abscissa.
    StepUnderflow(f64),
}

pub struct Accepted<const N: usize> {
    pub x: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

pub enum Outcome<const N: usize> {
    Done(Vec<Accepted<N>>),
    Halted(Vec<Accepted<N>>, Halt),
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `x0` to `x_end` (either direction).
/// `guard` is checked on every accepted state.
pub fn dopri5<const N: usize, F, G>(
    mut f: F,
    guard: G,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    opts: &RkOptions,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: Fn(&[f64; N]) -> bool,
{
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let span = (x_end - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut k0 = f(x, &y)?;
    let mut out = vec![Accepted { x, y, dy: k0 }];
    if span == 0.0 {
        return Ok(Outcome::Done(out));
    }
    let mut h = opts.max_step.min(span).min(1e-2);
    let mut steps = 0;

    loop {
        let remaining = (x_end - x) * dir;
        if remaining <= 0.0 {
            return Ok(Outcome::Done(out));
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        } else if 2.0 * h > remaining {
            // split what is left evenly rather than finish with a sliver
            h = 0.5 * remaining;
        }
        if h < opts.min_step * x.abs().max(1.0) || steps >= opts.max_steps {
            return Ok(Outcome::Halted(out, Halt::StepUnderflow(x)));
        }
        steps += 1;

        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        let mut stage_failed = false;
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                *v += dir * h * acc;
            }
            if ys.iter().any(|v| !v.is_finite()) {
                stage_failed = true;
                break;
            }
            k[s] = f(x + dir * h * C[s], &ys)?;
            if k[s].iter().any(|v| !v.is_finite()) {
                stage_failed = true;
                break;
            }
        }

        let (err, y_new) = if stage_failed {
            (f64::INFINITY, y)
        } else {
            let mut y_new = y;
            for (i, v) in y_new.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(6) {
                    acc += A[6][j] * kj[i];
                }
                *v += dir * h * acc;
            }
            let mut err: f64 = 0.0;
            for i in 0..N {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((h * e).abs() / scale);
            }
            (err, y_new)
        };

        if err <= 1.0 {
            // a remainder below roundoff would only produce a degenerate step
            let snap = last || (x_end - (x + dir * h)) * dir <= 1e-12 * x_end.abs().max(1.0);
            x = if snap { x_end } else { x + dir * h };
            y = y_new;
            k0 = k[6];
            if !guard(&y) {
                let prev = out.last().map(|a| a.x).unwrap_or(x0);
                return Ok(Outcome::Halted(out, Halt::Guard(prev)));
            }
            out.push(Accepted { x, y, dy: k0 });
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(opts.max_step);
        } else {
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 1.0)
            } else {
                0.1
            };
            h *= factor;
        }
    }
}
