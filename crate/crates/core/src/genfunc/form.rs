use std::sync::OnceLock;

use crate::bump::Bump;
use crate::error::{Error, Result};

/// `∫ exp(-1/(1-u²)) du` over `(-1, 1)`.
pub const BUMP_INTEGRAL: f64 = 0.443_993_816_168_079_4;

fn bump() -> &'static Bump {
    static B: OnceLock<Bump> = OnceLock::new();
    B.get_or_init(Bump::new)
}

/// A weight against which generalized functions are paired.
pub trait Weight: Sync {
    fn weight(&self, x: f64) -> f64;
    /// Closed interval outside which the weight vanishes.
    fn support(&self) -> (f64, f64);
}

/// Unnormalized bump `exp(-1/(1-u²))`, `u = (x - center)/half_width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestForm {
    pub center: f64,
    pub half_width: f64,
}

impl TestForm {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite() && center.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "test form needs a finite center and positive half-width, got ({center}, {half_width})"
            )));
        }
        Ok(Self { center, half_width })
    }

    pub fn value(&self, x: f64) -> f64 {
        bump().value((x - self.center) / self.half_width)
    }

    /// `w⁽ᵏ⁾(x)` for `k ≤ 8`.
    pub fn deriv(&self, k: usize, x: f64) -> f64 {
        bump().deriv(k, (x - self.center) / self.half_width) / self.half_width.powi(k as i32)
    }

    pub fn integral(&self) -> f64 {
        BUMP_INTEGRAL * self.half_width
    }

    /// `sup w = e^{-1}`, attained at the center.
    pub fn sup_norm(&self) -> f64 {
        (-1.0f64).exp()
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Whether `x` lies in the open support.
    pub fn covers(&self, x: f64) -> bool {
        (x - self.center).abs() < self.half_width
    }

    /// Distance from `x` to the support (0 inside).
    pub fn distance_to(&self, x: f64) -> f64 {
        ((x - self.center).abs() - self.half_width).max(0.0)
    }

    /// The form `w⁽ᵏ⁾`.
    pub fn derivative(&self, k: usize) -> FormDerivative {
        FormDerivative { form: *self, k }
    }
}

impl Weight for TestForm {
    fn weight(&self, x: f64) -> f64 {
        self.value(x)
    }
    fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// A derivative of a test form, used for integration-by-parts checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormDerivative {
    pub form: TestForm,
    pub k: usize,
}

impl Weight for FormDerivative {
    fn weight(&self, x: f64) -> f64 {
        self.form.deriv(self.k, x)
    }
    fn support(&self) -> (f64, f64) {
        self.form.support()
    }
}

/// Forms for every pair of `centers × half_widths`, centers outermost.
pub fn corpus(centers: &[f64], half_widths: &[f64]) -> Result<Vec<TestForm>> {
    let mut out = Vec::with_capacity(centers.len() * half_widths.len());
    for &c in centers {
        for &hw in half_widths {
            out.push(TestForm::new(c, hw)?);
        }
    }
    Ok(out)
}

/// Centers `{0, ±hw_max/2}` with half-widths `{0.25, 1, 4}`: forms that
/// straddle the shell and forms that miss it.
pub fn default_corpus() -> Vec<TestForm> {
    corpus(&[0.0, -2.0, 2.0], &[0.25, 1.0, 4.0]).expect("static corpus is valid")
}
