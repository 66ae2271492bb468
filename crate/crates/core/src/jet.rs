//! Third-order forward-mode derivatives.
//!
//! A [`Jet`] carries a value together with its first three derivatives with
//! respect to a single real variable. Arithmetic follows the Leibniz rule and
//! composition follows Faa di Bruno truncated at order three, so any
//! expression assembled from jets yields exact derivatives up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

/// Highest derivative tracked by a [`Jet`].
pub const JET_ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; JET_ORDER + 1]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    /// The identity function evaluated at `x`.
    pub fn variable(x: f64) -> Self {
        Jet([x, 1.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn d(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// Jet of the derivative; the top entry becomes unknown.
    pub fn shift(&self) -> Self {
        Jet([self.0[1], self.0[2], self.0[3], f64::NAN])
    }

    pub fn scale(&self, c: f64) -> Self {
        Jet(self.0.map(|v| v * c))
    }

    /// `outer(self)` where `outer` holds the value and derivatives of the
    /// outer function at `self.value()`.
    pub fn compose(&self, outer: [f64; 4]) -> Self {
        let [_, g1, g2, g3] = self.0;
        Jet([
            outer[0],
            outer[1] * g1,
            outer[2] * g1 * g1 + outer[1] * g2,
            outer[3] * g1 * g1 * g1 + 3.0 * outer[2] * g1 * g2 + outer[1] * g3,
        ])
    }

    /// `self^p` for real `p`; the value must be positive unless `p` is a
    /// non-negative integer.
    pub fn powf(&self, p: f64) -> Self {
        let x = self.0[0];
        self.compose([
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Self {
        let x = self.0[0];
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn ln(&self) -> Self {
        let x = self.0[0];
        let r = 1.0 / x;
        self.compose([x.ln(), r, -r * r, 2.0 * r * r * r])
    }

    pub fn exp(&self) -> Self {
        let e = self.0[0].exp();
        self.compose([e, e, e, e])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let [f0, f1, f2, f3] = self.0;
        let [g0, g1, g2, g3] = rhs.0;
        Jet([
            f0 * g0,
            f1 * g0 + f0 * g1,
            f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
            f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
        ])
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self;
        out.0[0] += rhs;
        out
    }
}
