use std::cell::RefCell;
use std::collections::HashMap;

use super::form::Weight;
use super::GenScalar;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

const SIGN_SAMPLES: usize = 64;
const MAX_SIGN_CHANGES: usize = 10_000;

fn pair_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

/// Memoizes `u(ε, ·)` at a fixed ε so that several forms (and the negative
/// part) can share evaluations.
pub struct Sampler<'a> {
    u: &'a GenScalar,
    eps: f64,
    cache: RefCell<HashMap<u64, f64>>,
}

impl<'a> Sampler<'a> {
    pub fn new(u: &'a GenScalar, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("eps = {eps} outside (0, 1]")));
        }
        Ok(Self {
            u,
            eps,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn value(&self, x: f64) -> f64 {
        if let Some(v) = self.cache.borrow().get(&x.to_bits()) {
            return *v;
        }
        let v = self.u.value(self.eps, x);
        self.cache.borrow_mut().insert(x.to_bits(), v);
        v
    }

    fn domain(&self, w: &dyn Weight) -> Option<(f64, f64, Vec<f64>)> {
        let (ul, uh) = self.u.support(self.eps);
        let (wl, wh) = w.support();
        let (lo, hi) = (ul.max(wl), uh.min(wh));
        if !(lo < hi) {
            return None;
        }
        let bps: Vec<f64> = self
            .u
            .breakpoints(self.eps)
            .into_iter()
            .filter(|b| *b > lo && *b < hi)
            .collect();
        Some((lo, hi, bps))
    }

    fn finish(&self, value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::InvalidArgument(format!(
                "non-finite pairing at eps = {:e}",
                self.eps
            )))
        }
    }

    /// `∫ u(ε, x) w(x) dx`.
    pub fn pair(&self, w: &dyn Weight) -> Result<f64> {
        let Some((lo, hi, bps)) = self.domain(w) else {
            return Ok(0.0);
        };
        if self.u.is_embedded() && bps.is_empty() && lo <= 0.0 && hi >= 0.0 {
            return Err(Error::MissingBreakpoints);
        }
        let r = integrate(
            |x| {
                let wx = w.weight(x);
                if wx == 0.0 {
                    0.0
                } else {
                    self.value(x) * wx
                }
            },
            lo,
            hi,
            &bps,
            &pair_opts(),
        )?;
        self.finish(r.value)
    }

    /// `∫ min(u(ε, x), 0) w(x) dx`, integrated segment by segment between
    /// the sign changes of `u`.
    pub fn negative_part(&self, w: &dyn Weight) -> Result<f64> {
        let Some((lo, hi, bps)) = self.domain(w) else {
            return Ok(0.0);
        };
        let mut nodes = Vec::with_capacity(bps.len() + 2);
        nodes.push(lo);
        nodes.extend(bps.iter().copied());
        nodes.push(hi);
        let mut cuts = bps.clone();
        for seg in nodes.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let xs: Vec<f64> = (0..=SIGN_SAMPLES)
                .map(|i| a + (b - a) * i as f64 / SIGN_SAMPLES as f64)
                .collect();
            let vs: Vec<f64> = xs.iter().map(|&x| self.value(x)).collect();
            for i in 0..SIGN_SAMPLES {
                if vs[i] * vs[i + 1] < 0.0 {
                    let mut conv = roots::SimpleConvergency {
                        eps: 1e-15 * (b - a),
                        max_iter: 100,
                    };
                    let root = roots::find_root_brent(xs[i], xs[i + 1], |x| self.value(x), &mut conv)
                        .unwrap_or(0.5 * (xs[i] + xs[i + 1]));
                    cuts.push(root);
                    if cuts.len() > MAX_SIGN_CHANGES {
                        return Err(Error::TooManySignChanges(cuts.len()));
                    }
                }
            }
        }
        let r = integrate(
            |x| {
                let wx = w.weight(x);
                if wx == 0.0 {
                    0.0
                } else {
                    self.value(x).min(0.0) * wx
                }
            },
            lo,
            hi,
            &cuts,
            &pair_opts(),
        )?;
        self.finish(r.value)
    }
}

/// `∫ u(ε, η̃) w(η̃) dη̃` over the intersection of the supports.
pub fn pair(u: &GenScalar, w: &dyn Weight, eps: f64) -> Result<f64> {
    Sampler::new(u, eps)?.pair(w)
}

/// `∫ min(u(ε, η̃), 0) w(η̃) dη̃`; non-positive for non-negative `w`.
pub fn negative_part_pair(u: &GenScalar, w: &dyn Weight, eps: f64) -> Result<f64> {
    Sampler::new(u, eps)?.negative_part(w)
}
