//! ε-indexed smooth families on the `η̃`-axis as immutable expression trees.
//!
//! Every [`GenScalar`] carries the mollifier that generated its embedded
//! nodes; combining values built from different mollifiers is an error.
//! Evaluation is pointwise in `(ε, η̃)` and derivatives are exact: a
//! `Derivative` node is evaluated in forward mode, while
//! [`GenScalar::lie_derivative`] rewrites the tree symbolically.

mod deriv;
mod form;
mod node;
mod pair;
mod smooth;

use std::fmt;
use std::sync::Arc;

pub use form::{corpus, default_corpus, FormDerivative, TestForm, Weight, BUMP_INTEGRAL};
pub use node::Kernel;
pub(crate) use node::{expand, Node};
pub use pair::{negative_part_pair, pair, Sampler};
pub use smooth::{Side, Sign, SmoothSide};

use crate::error::{Error, Result};
use crate::fit::fit_loglog;
use crate::jet::{Jet, JET_ORDER};
use crate::mollifier::Mollifier;

/// Highest delta derivative accepted by [`GenScalar::embed_delta_deriv`].
pub const MAX_DELTA_ORDER: usize = 2;

#[derive(Clone)]
pub struct GenScalar {
    node: Arc<Node>,
    moll: Arc<Mollifier>,
}

impl fmt::Debug for GenScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenScalar({})", self.node)
    }
}

impl fmt::Display for GenScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.node)
    }
}

impl GenScalar {
    fn wrap(moll: &Arc<Mollifier>, node: Node) -> Self {
        Self {
            node: Arc::new(node),
            moll: moll.clone(),
        }
    }

    fn with(&self, node: Arc<Node>) -> Self {
        Self {
            node,
            moll: self.moll.clone(),
        }
    }

    pub(crate) fn node(&self) -> &Arc<Node> {
        &self.node
    }

    pub fn constant(moll: &Arc<Mollifier>, c: f64) -> Self {
        Self::wrap(moll, Node::Constant(c))
    }

    /// `Ψ(sign·η̃/ε)` with `Ψ` the cumulative mollifier.
    pub fn embed_heaviside(moll: &Arc<Mollifier>, sign: Sign) -> Self {
        Self::wrap(moll, Node::Heaviside(sign))
    }

    /// `ρ_ε(η̃) = ε⁻¹ ψ(η̃/ε)`.
    pub fn embed_delta(moll: &Arc<Mollifier>) -> Self {
        Self::wrap(moll, Node::DeltaDeriv(0))
    }

    /// `ρ_ε⁽ᵏ⁾(η̃) = ε^{-(k+1)} ψ⁽ᵏ⁾(η̃/ε)` for `k ≤ 2`.
    pub fn embed_delta_deriv(moll: &Arc<Mollifier>, k: usize) -> Result<Self> {
        if k > MAX_DELTA_ORDER {
            return Err(Error::DeltaOrderOutOfRange(k));
        }
        Ok(Self::wrap(moll, Node::DeltaDeriv(k)))
    }

    /// `ρ_ε ∗ f` for `f = f⁺` on `η̃ > 0` and `f⁻` on `η̃ < 0`.
    pub fn embed_piecewise(
        moll: &Arc<Mollifier>,
        fplus: SmoothSide,
        fminus: SmoothSide,
    ) -> Result<Self> {
        Self::embed_kernel(moll, Kernel::new("piecewise", Some(fplus), Some(fminus))?)
    }

    /// `ρ_ε ∗ F` for an arbitrary two-sided kernel.
    pub fn embed_kernel(moll: &Arc<Mollifier>, kernel: Kernel) -> Result<Self> {
        Ok(Self::wrap(
            moll,
            Node::Embedded {
                kernel: Arc::new(kernel),
                order: 0,
            },
        ))
    }

    /// A smooth function, constant in ε.
    pub fn smooth(moll: &Arc<Mollifier>, f: SmoothSide) -> Self {
        Self::wrap(moll, Node::Smooth { f, order: 0 })
    }

    pub fn mollifier(&self) -> &Arc<Mollifier> {
        &self.moll
    }

    fn check(&self, other: &GenScalar) -> Result<()> {
        if Arc::ptr_eq(&self.moll, &other.moll) || self.moll.same_net(&other.moll) {
            Ok(())
        } else {
            Err(Error::MixedMollifiers)
        }
    }

    pub fn add(&self, other: &GenScalar) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(node::mk_sum(vec![self.node.clone(), other.node.clone()])))
    }

    pub fn sub(&self, other: &GenScalar) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &GenScalar) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(node::mk_product(vec![self.node.clone(), other.node.clone()])))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.with(node::mk_scale(c, self.node.clone()))
    }

    pub fn square(&self) -> Self {
        self.with(node::mk_product(vec![self.node.clone(), self.node.clone()]))
    }

    /// Sum of a non-empty list.
    pub fn sum(items: &[GenScalar]) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
        for it in items {
            first.check(it)?;
        }
        Ok(first.with(node::mk_sum(items.iter().map(|u| u.node.clone()).collect())))
    }

    /// Product of a non-empty list.
    pub fn product(items: &[GenScalar]) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        for it in items {
            first.check(it)?;
        }
        Ok(first.with(node::mk_product(items.iter().map(|u| u.node.clone()).collect())))
    }

    /// Unevaluated `d/dη̃`; evaluated by forward-mode jets.
    pub fn derivative(&self) -> Self {
        self.with(Arc::new(Node::Derivative(self.node.clone())))
    }

    /// `d/dη̃` pushed down to the leaves.
    pub fn lie_derivative(&self) -> Result<Self> {
        Ok(self.with(deriv::lie(&self.node)?))
    }

    /// Equivalent tree without `Derivative` nodes.
    pub fn normal_form(&self) -> Result<Self> {
        Ok(self.with(deriv::normal_form(&self.node)?))
    }

    /// `√(sign·u)` on `window`.
    ///
    /// The sign condition is sampled on the default schedule and a grid over
    /// the window; the largest `ε₀` below which it holds at every sample is
    /// recorded. Fails if it is violated even at the smallest schedule point.
    pub fn sqrt_family(&self, sign: Sign, window: (f64, f64)) -> Result<Self> {
        if !(window.0 < window.1) {
            return Err(Error::InvalidArgument(format!(
                "empty sqrt window [{}, {}]",
                window.0, window.1
            )));
        }
        let s = sign.as_f64();
        let grid: Vec<f64> = (0..=64)
            .map(|i| window.0 + (window.1 - window.0) * i as f64 / 64.0)
            .collect();
        let mut eps0 = None;
        for j in (0..25).rev() {
            let eps = 0.2 * 0.7f64.powi(j);
            let near = [-eps, 0.0, eps];
            let bad = grid
                .iter()
                .chain(near.iter().filter(|x| **x >= window.0 && **x <= window.1))
                .find(|&&x| !(s * self.value(eps, x) > 0.0));
            match bad {
                Some(&x) if eps0.is_none() => return Err(Error::SignViolation { eps, x }),
                Some(_) => break,
                None => eps0 = Some(eps),
            }
        }
        Ok(self.with(Arc::new(Node::Sqrt(node::SqrtData {
            inner: self.node.clone(),
            sign: s,
            window,
            power: 1,
            eps0: eps0.expect("loop ran at least once"),
        }))))
    }

    /// Largest ε at which a square-root family's sign condition was
    /// confirmed; `None` for other nodes.
    pub fn sqrt_eps0(&self) -> Option<f64> {
        match &*self.node {
            Node::Sqrt(d) => Some(d.eps0),
            _ => None,
        }
    }

    pub fn value(&self, eps: f64, x: f64) -> f64 {
        node::eval(&self.node, &self.moll, eps, x, 0).0[0]
    }

    /// Value and the first `n ≤ 3` derivatives in `η̃`; higher entries are NaN.
    pub fn jet(&self, eps: f64, x: f64, n: usize) -> Jet {
        assert!(n <= JET_ORDER, "jets carry at most {JET_ORDER} derivatives");
        let mut j = node::eval(&self.node, &self.moll, eps, x, n);
        for v in j.0.iter_mut().skip(n + 1) {
            *v = f64::NAN;
        }
        j
    }

    /// Interval outside which the family vanishes identically at this ε.
    /// `lo > hi` denotes the empty set.
    pub fn support(&self, eps: f64) -> (f64, f64) {
        node::support(&self.node, eps)
    }

    /// Points where the integrand may only be piecewise smooth.
    pub fn breakpoints(&self, eps: f64) -> Vec<f64> {
        if !node::has_embedded(&self.node) {
            return Vec::new();
        }
        let mut b = vec![-eps, 0.0, eps];
        b.extend(self.moll.breakpoints().iter().map(|k| k * eps));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn is_embedded(&self) -> bool {
        node::has_embedded(&self.node)
    }

    /// Declared growth order `p`: `sup|u_ε| = O(ε^{-p})` on compacts.
    pub fn declared_order(&self) -> f64 {
        node::declared_order(&self.node)
    }

    /// Measured growth order of `sup_{window}|u_ε|` over `eps`.
    pub fn moderateness(&self, window: (f64, f64), eps: &[f64]) -> Moderateness {
        let sups: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let mut pts: Vec<f64> = (0..=400)
                    .map(|i| window.0 + (window.1 - window.0) * i as f64 / 400.0)
                    .collect();
                pts.extend(
                    (0..=40)
                        .map(|i| -e + 2.0 * e * i as f64 / 40.0)
                        .filter(|x| *x >= window.0 && *x <= window.1),
                );
                pts.iter().map(|&x| self.value(e, x).abs()).fold(0.0, f64::max)
            })
            .collect();
        let n = sups.len();
        let tail = n.saturating_sub(12);
        let measured = fit_loglog(&eps[tail..], &sups[tail..])
            .map(|f| -f.slope)
            .unwrap_or(0.0);
        Moderateness {
            declared: self.declared_order(),
            measured,
            sups,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Moderateness {
    pub declared: f64,
    /// Fitted `p` in `sup|u_ε| ~ ε^{-p}` over the last 12 points.
    pub measured: f64,
    pub sups: Vec<f64>,
}

impl Moderateness {
    /// Measured growth stays within the declared order plus 0.2.
    pub fn within_declared(&self) -> bool {
        self.measured <= self.declared + 0.2
    }
}
