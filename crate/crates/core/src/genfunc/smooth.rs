use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JET_ORDER};

/// Orientation of a Heaviside embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Half-line on which a smooth side is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `η̃ ≥ 0`
    Plus,
    /// `η̃ ≤ 0`
    Minus,
    All,
}

type JetFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

/// A smooth function of `η̃` together with analytic derivatives up to `order`
/// (at most three).
#[derive(Clone)]
pub struct SmoothSide {
    side: Side,
    order: usize,
    f: JetFn,
}

impl fmt::Debug for SmoothSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothSide")
            .field("side", &self.side)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl SmoothSide {
    /// Build from a value and its first three derivatives.
    pub fn new<F0, F1, F2, F3>(side: Side, value: F0, d1: F1, d2: F2, d3: F3) -> Result<Self>
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
        F3: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_jet(side, JET_ORDER, move |x| Jet([value(x), d1(x), d2(x), d3(x)]))
    }

    /// Build from a function returning the value and derivatives as a jet.
    /// Entries above `order` are ignored.
    pub fn from_jet<F>(side: Side, order: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Jet + Send + Sync + 'static,
    {
        if order > JET_ORDER {
            return Err(Error::InvalidArgument(format!(
                "smooth sides carry at most {JET_ORDER} derivatives, got {order}"
            )));
        }
        let s = Self {
            side,
            order,
            f: Arc::new(f),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(side: Side, c: f64) -> Self {
        Self {
            side,
            order: JET_ORDER,
            f: Arc::new(move |_| Jet::constant(c)),
        }
    }

    /// Polynomial with coefficients in increasing degree; derivatives exact.
    pub fn polynomial(side: Side, coeffs: &[f64]) -> Self {
        let c = coeffs.to_vec();
        Self {
            side,
            order: JET_ORDER,
            f: Arc::new(move |x| {
                let v = Jet::variable(x);
                c.iter()
                    .rev()
                    .fold(Jet::constant(0.0), |acc, &ci| acc * v + ci)
            }),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Highest available derivative.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x).0[0]
    }

    /// Value and derivatives at `x`; entries above [`order`](Self::order) are NaN.
    pub fn jet(&self, x: f64) -> Jet {
        let mut j = (self.f)(x);
        for v in j.0.iter_mut().skip(self.order + 1) {
            *v = f64::NAN;
        }
        j
    }

    /// Replace evaluation on `[lo, hi]` by Chebyshev interpolants of each
    /// jet component, built from the exact values; outside the interval the
    /// original function is used. The degree doubles from 16 until the
    /// trailing coefficients fall below `1e-14` of the largest sampled
    /// value and the interpolant matches the exact jet at probe points.
    /// Returns `self` unchanged if no degree up to 256 passes.
    pub fn tabulated(&self, lo: f64, hi: f64) -> Self {
        let exact = self.f.clone();
        let order = self.order;
        for n in [16usize, 32, 64, 128, 256] {
            let Some(table) = ChebTable::build(&*exact, lo, hi, n, order) else {
                continue;
            };
            let inner = exact.clone();
            return Self {
                side: self.side,
                order,
                f: Arc::new(move |x| {
                    if x >= lo && x <= hi {
                        table.eval(x)
                    } else {
                        inner(x)
                    }
                }),
            };
        }
        self.clone()
    }

    fn sample_points(&self) -> &'static [f64] {
        match self.side {
            Side::Plus => &[0.05, 0.3, 0.9, 2.5],
            Side::Minus => &[-0.05, -0.3, -0.9, -2.5],
            Side::All => &[-1.3, -0.4, 0.05, 0.7, 1.9],
        }
    }

    /// Compare each supplied derivative with a fourth-order central
    /// difference of the one below it.
    fn validate(&self) -> Result<()> {
        for &x in self.sample_points() {
            let h = 1e-4 * x.abs().max(1.0);
            let at = |t: f64| (self.f)(t);
            let (m2, m1, p1, p2) = (at(x - 2.0 * h), at(x - h), at(x + h), at(x + 2.0 * h));
            let here = at(x);
            for k in 1..=self.order {
                let fd = (m2.0[k - 1] - 8.0 * m1.0[k - 1] + 8.0 * p1.0[k - 1] - p2.0[k - 1])
                    / (12.0 * h);
                let supplied = here.0[k];
                let tol = 1e-6 * supplied.abs().max(fd.abs()) + 1e-10 * (1.0 + here.0[k - 1].abs());
                if !((fd - supplied).abs() <= tol) {
                    return Err(Error::InconsistentDerivative {
                        order: k,
                        x,
                        supplied,
                        estimated: fd,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Chebyshev series of each jet component on `[lo, hi]`.
struct ChebTable {
    lo: f64,
    hi: f64,
    coeffs: Vec<Vec<f64>>,
}

impl ChebTable {
    fn build(f: &dyn Fn(f64) -> Jet, lo: f64, hi: f64, n: usize, order: usize) -> Option<Self> {
        let nodes: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).cos())
            .collect();
        let vals: Vec<Jet> = nodes
            .iter()
            .map(|t| f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t))
            .collect();
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let c: Vec<f64> = (0..n)
                .map(|j| {
                    let s: f64 = (0..n)
                        .map(|i| {
                            vals[i].0[k]
                                * (std::f64::consts::PI * j as f64 * (i as f64 + 0.5) / n as f64).cos()
                        })
                        .sum();
                    if j == 0 { s / n as f64 } else { 2.0 * s / n as f64 }
                })
                .collect();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.0[k].abs()));
            if !scale.is_finite() || c[n - 4..].iter().any(|v| v.abs() > 1e-14 * scale) {
                return None;
            }
            coeffs.push(c);
        }
        let table = Self { lo, hi, coeffs };
        for i in 0..7 {
            let x = lo + (hi - lo) * (i as f64 + 0.37) / 7.0;
            let (e, t) = (f(x), table.eval(x));
            for k in 0..=order {
                if (e.0[k] - t.0[k]).abs() > 1e-13 * (1.0 + e.0[k].abs()) {
                    return None;
                }
            }
        }
        Some(table)
    }

    fn eval(&self, x: f64) -> Jet {
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let mut out = Jet([f64::NAN; JET_ORDER + 1]);
        for (k, c) in self.coeffs.iter().enumerate() {
            // Clenshaw recurrence.
            let (mut b1, mut b2) = (0.0, 0.0);
            for &cj in c.iter().skip(1).rev() {
                let b = 2.0 * t * b1 - b2 + cj;
                b2 = b1;
                b1 = b;
            }
            out.0[k] = t * b1 - b2 + c[0];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_consistent_derivatives() {
        let s = SmoothSide::new(Side::All, f64::sin, f64::cos, |x| -x.sin(), |x| -x.cos()).unwrap();
        assert_eq!(s.order(), 3);
        assert!((s.jet(0.3).d(2) + 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_derivative() {
        let e = SmoothSide::new(Side::Plus, f64::exp, f64::exp, |x| 2.0 * x.exp(), f64::exp);
        assert!(matches!(e, Err(Error::InconsistentDerivative { order: 2, .. })));
    }

    #[test]
    fn polynomial_jets_are_exact() {
        let p = SmoothSide::polynomial(Side::All, &[1.0, 0.0, 3.0, -2.0]);
        let j = p.jet(2.0);
        assert_eq!(j.0, [1.0 + 12.0 - 16.0, 12.0 - 24.0, 6.0 - 24.0, -12.0]);
    }

    #[test]
    fn tabulation_matches_exact_jets() {
        let s = SmoothSide::new(Side::Plus, |x| (1.0 + x).ln(), |x| 1.0 / (1.0 + x), |x| -1.0 / (1.0 + x).powi(2), |x| 2.0 / (1.0 + x).powi(3)).unwrap();
        let t = s.tabulated(0.0, 0.5);
        for &x in &[0.0, 0.013, 0.25, 0.4999, 0.5, 0.8] {
            let (a, b) = (s.jet(x), t.jet(x));
            for k in 0..4 {
                assert!((a.d(k) - b.d(k)).abs() < 1e-13 * (1.0 + a.d(k).abs()), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn limited_order_masks_higher_entries() {
        let s = SmoothSide::from_jet(Side::Minus, 1, |x| Jet([x * x, 2.0 * x, 0.0, 0.0])).unwrap();
        assert!(s.jet(-1.0).d(2).is_nan());
    }
}
