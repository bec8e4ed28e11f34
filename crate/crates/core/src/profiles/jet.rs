use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Value of a scalar function of one variable together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    /// The identity function evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0)
    }

    /// Chain rule for an outer function with known derivatives `(g, g', g'')` at `self.value`.
    pub fn compose(self, g: f64, dg: f64, ddg: f64) -> Self {
        Self::new(g, dg * self.d1, ddg * self.d1 * self.d1 + dg * self.d2)
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.value, c * self.d1, c * self.d2)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.value;
        self.compose(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.value;
        if p == 0.0 {
            return Self::constant(1.0);
        }
        let xp2 = if p.fract() == 0.0 && p.abs() < 64.0 {
            x.powi(p as i32 - 2)
        } else {
            x.powf(p - 2.0)
        };
        self.compose(xp2 * x * x, p * xp2 * x, p * (p - 1.0) * xp2)
    }

    pub fn recip(self) -> Self {
        let x = self.value;
        self.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

/// Leibniz rule: (pq)'' = p''q + 2p'q' + pq''.
impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_by_hand() {
        // x^2 * exp(x) at x = 1: value e, d1 3e, d2 7e
        let x = Jet2::variable(1.0);
        let p = (x * x) * x.exp();
        let e = std::f64::consts::E;
        assert!((p.value - e).abs() < 1e-15);
        assert!((p.d1 - 3.0 * e).abs() < 1e-14);
        assert!((p.d2 - 7.0 * e).abs() < 1e-14);
    }

    #[test]
    fn quotient_and_powers() {
        let x = Jet2::variable(2.0);
        let q = Jet2::constant(1.0) / x;
        let r = x.powf(-1.0);
        assert_eq!(q, Jet2::new(0.5, -0.25, 0.25));
        assert_eq!(r, Jet2::new(0.5, -0.25, 0.25));
        let s = x.sqrt();
        assert!((s.d1 - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert!((s.d2 + 0.25 / 2f64.powf(1.5)).abs() < 1e-15);
    }

    #[test]
    fn ln_of_exp_is_identity() {
        let x = Jet2::variable(0.3);
        let y = x.exp().ln();
        assert!((y.value - 0.3).abs() < 1e-15);
        assert!((y.d1 - 1.0).abs() < 1e-15);
        assert!(y.d2.abs() < 1e-15);
    }
}
