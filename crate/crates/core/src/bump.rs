//! The standard bump `b(x) = exp(-1/(1-x²))` on `(-1, 1)` and its exact
//! derivatives.
//!
//! Derivatives take the form `b⁽ⁿ⁾(x) = Pₙ(x) b(x) / (1-x²)²ⁿ` with integer
//! polynomials generated by
//! `Pₙ₊₁ = Pₙ'(1-x²)² - 2x Pₙ + 4n x Pₙ (1-x²)`.

/// Highest derivative order precomputed for the bump.
pub const MAX_BUMP_DERIVATIVE: usize = 8;

/// Dense polynomial, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0.0) + other.0.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Poly {
        Poly(self.0.iter().map(|v| v * c).collect())
    }
}

#[derive(Clone, Debug)]
pub struct Bump {
    numerators: Vec<Poly>,
}

impl Default for Bump {
    fn default() -> Self {
        Self::new()
    }
}

impl Bump {
    pub fn new() -> Self {
        let q2 = Poly(vec![1.0, 0.0, -2.0, 0.0, 1.0]); // (1-x²)²
        let q = Poly(vec![1.0, 0.0, -1.0]);
        let x = Poly(vec![0.0, 1.0]);
        let mut numerators = vec![Poly(vec![1.0])];
        for n in 0..MAX_BUMP_DERIVATIVE {
            let p = &numerators[n];
            let next = p
                .derivative()
                .mul(&q2)
                .add(&x.mul(p).scale(-2.0))
                .add(&x.mul(p).mul(&q).scale(4.0 * n as f64));
            numerators.push(next);
        }
        Self { numerators }
    }

    /// `b⁽ᵏ⁾(x)`; zero outside `(-1, 1)`.
    pub fn deriv(&self, k: usize, x: f64) -> f64 {
        assert!(k <= MAX_BUMP_DERIVATIVE, "bump derivative {k} not tabulated");
        let q = 1.0 - x * x;
        if q <= 0.0 {
            return 0.0;
        }
        // exp(-1/q) / q^(2k) computed in log space to avoid overflow.
        let log_mag = -1.0 / q - 2.0 * k as f64 * q.ln();
        self.numerators[k].eval(x) * log_mag.exp()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.deriv(0, x)
    }
}
