use std::fmt;
use std::sync::Arc;

use super::smooth::{Side, Sign, SmoothSide};
use crate::error::{Error, Result};
use crate::jet::{Jet, JET_ORDER};
use crate::mollifier::{Mollifier, MAX_PROFILE_DERIVATIVE};
use crate::quad::{integrate_lenient, QuadOptions};

/// Largest delta derivative that may appear inside a tree (after pushing
/// derivatives down). The public constructor stops at 2.
pub(crate) const MAX_INTERNAL_DELTA: usize = 5;

const EMPTY: (f64, f64) = (f64::INFINITY, f64::NEG_INFINITY);
const ALL: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

/// A two-sided density `F` on the `η̃`-axis, embedded as `ρ_ε ∗ F`.
///
/// `plus` describes `F` on `η̃ > 0`, `minus` on `η̃ < 0`; a missing side is
/// identically zero.
pub struct Kernel {
    label: String,
    plus: Option<SmoothSide>,
    minus: Option<SmoothSide>,
    jumps: [f64; JET_ORDER + 1],
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("label", &self.label)
            .field("plus", &self.plus.is_some())
            .field("minus", &self.minus.is_some())
            .finish()
    }
}

impl Kernel {
    pub fn new(
        label: impl Into<String>,
        plus: Option<SmoothSide>,
        minus: Option<SmoothSide>,
    ) -> Result<Self> {
        if plus.as_ref().is_some_and(|p| p.side() == Side::Minus)
            || minus.as_ref().is_some_and(|m| m.side() == Side::Plus)
        {
            return Err(Error::InvalidArgument(
                "kernel side defined on the wrong half-line".into(),
            ));
        }
        let at0 = |s: &Option<SmoothSide>| s.as_ref().map(|f| f.jet(0.0)).unwrap_or(Jet::constant(0.0));
        let (p, m) = (at0(&plus), at0(&minus));
        let jumps = std::array::from_fn(|j| p.0[j] - m.0[j]);
        Ok(Self {
            label: label.into(),
            plus,
            minus,
            jumps,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn plus(&self) -> Option<&SmoothSide> {
        self.plus.as_ref()
    }

    pub fn minus(&self) -> Option<&SmoothSide> {
        self.minus.as_ref()
    }

    /// Highest derivative order available on every present side.
    pub fn max_order(&self) -> usize {
        [&self.plus, &self.minus]
            .iter()
            .filter_map(|s| s.as_ref().map(|f| f.order()))
            .min()
            .unwrap_or(JET_ORDER)
    }

    /// `F⁽ʲ⁾(0+) - F⁽ʲ⁾(0-)`.
    pub fn jump(&self, j: usize) -> f64 {
        self.jumps[j]
    }

    /// Side values of `F⁽ᵏ⁾` at the shell, `(plus, minus)`.
    pub fn shell_jets(&self) -> (Jet, Jet) {
        let at0 = |s: &Option<SmoothSide>| s.as_ref().map(|f| f.jet(0.0)).unwrap_or(Jet::constant(0.0));
        (at0(&self.plus), at0(&self.minus))
    }

    /// `(ρ_ε ∗ F)⁽ᵏ⁾(x)`: the smooth part `∫ρ_ε(x-s)F⁽ᵏ⁾(s)ds` plus the jump
    /// terms `Σ_j [F⁽ʲ⁾]₀ ρ_ε⁽ᵏ⁻¹⁻ʲ⁾(x)`.
    pub(crate) fn convolve(&self, moll: &Mollifier, k: usize, eps: f64, x: f64) -> f64 {
        let t = x / eps;
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 200,
        };
        let knots = moll.breakpoints();
        let mut total = 0.0;
        if let Some(p) = &self.plus {
            let hi = t.min(1.0);
            if hi > -1.0 {
                total += integrate_lenient(
                    |y| moll.value(y) * p.jet(x - eps * y).0[k],
                    -1.0,
                    hi,
                    knots,
                    &opts,
                );
            }
        }
        if let Some(m) = &self.minus {
            let lo = t.max(-1.0);
            if lo < 1.0 {
                total += integrate_lenient(
                    |y| moll.value(y) * m.jet(x - eps * y).0[k],
                    lo,
                    1.0,
                    knots,
                    &opts,
                );
            }
        }
        if t.abs() < 1.0 {
            for j in 0..k {
                if self.jumps[j] != 0.0 {
                    total += self.jumps[j] * moll.deriv(k - 1 - j, t) / eps.powi((k - j) as i32);
                }
            }
        }
        total
    }
}

#[derive(Debug)]
pub(crate) struct SqrtData {
    pub inner: Arc<Node>,
    pub sign: f64,
    pub window: (f64, f64),
    /// Odd exponent `p` in `(sign·u)^{p/2}`.
    pub power: i32,
    pub eps0: f64,
}

#[derive(Debug)]
pub(crate) enum Node {
    Constant(f64),
    Heaviside(Sign),
    DeltaDeriv(usize),
    Embedded { kernel: Arc<Kernel>, order: usize },
    Smooth { f: SmoothSide, order: usize },
    Sum(Vec<Arc<Node>>),
    Product(Vec<Arc<Node>>),
    Scale(f64, Arc<Node>),
    Derivative(Arc<Node>),
    Sqrt(SqrtData),
}

pub(crate) fn constant(c: f64) -> Arc<Node> {
    Arc::new(Node::Constant(c))
}

fn is_zero(n: &Node) -> bool {
    matches!(n, Node::Constant(c) if *c == 0.0)
}

pub(crate) fn mk_sum(items: Vec<Arc<Node>>) -> Arc<Node> {
    let mut flat = Vec::with_capacity(items.len());
    for it in items {
        match &*it {
            Node::Sum(inner) => flat.extend(inner.iter().cloned()),
            n if is_zero(n) => {}
            _ => flat.push(it),
        }
    }
    match flat.len() {
        0 => constant(0.0),
        1 => flat.pop().unwrap(),
        _ => Arc::new(Node::Sum(flat)),
    }
}

pub(crate) fn mk_product(items: Vec<Arc<Node>>) -> Arc<Node> {
    let mut flat = Vec::with_capacity(items.len());
    for it in items {
        match &*it {
            Node::Product(inner) => flat.extend(inner.iter().cloned()),
            n if is_zero(n) => return constant(0.0),
            Node::Constant(c) if *c == 1.0 => {}
            _ => flat.push(it),
        }
    }
    // Cheap factors first so that products outside a delta support exit
    // before any convolution is evaluated.
    flat.sort_by_key(|n| cost(n));
    match flat.len() {
        0 => constant(1.0),
        1 => flat.pop().unwrap(),
        _ => Arc::new(Node::Product(flat)),
    }
}

pub(crate) fn mk_scale(c: f64, u: Arc<Node>) -> Arc<Node> {
    if c == 0.0 || is_zero(&u) {
        return constant(0.0);
    }
    if c == 1.0 {
        return u;
    }
    match &*u {
        Node::Constant(v) => constant(c * v),
        Node::Scale(d, inner) => mk_scale(c * d, inner.clone()),
        _ => Arc::new(Node::Scale(c, u)),
    }
}

fn cost(n: &Node) -> u8 {
    match n {
        Node::Constant(_) | Node::Heaviside(_) | Node::DeltaDeriv(_) => 0,
        Node::Smooth { .. } => 1,
        Node::Scale(_, u) | Node::Derivative(u) => cost(u),
        Node::Sum(v) | Node::Product(v) => v.iter().map(|u| cost(u)).max().unwrap_or(0),
        Node::Embedded { .. } | Node::Sqrt(_) => 2,
    }
}

fn nan_jet() -> Jet {
    Jet([f64::NAN; JET_ORDER + 1])
}

fn zero_upto(j: &Jet, n: usize) -> bool {
    j.0[..=n].iter().all(|v| *v == 0.0)
}

/// Value and first `n ≤ 3` derivatives at `(eps, x)`; entries above `n`
/// are unspecified.
pub(crate) fn eval(node: &Node, moll: &Mollifier, eps: f64, x: f64, n: usize) -> Jet {
    debug_assert!(n <= JET_ORDER);
    eval_in(node, moll, eps, x, n, &mut Vec::new())
}

/// Embedded nodes already convolved at this point, keyed by address and
/// jet order. Shared subtrees are common in assembled expressions.
type Memo = Vec<(*const Node, usize, Jet)>;

fn eval_in(node: &Node, moll: &Mollifier, eps: f64, x: f64, n: usize, memo: &mut Memo) -> Jet {
    match node {
        Node::Constant(c) => Jet::constant(*c),
        Node::Heaviside(s) => {
            let sg = s.as_f64();
            let y = sg * x / eps;
            let mut out = nan_jet();
            out.0[0] = moll.cumulative(y);
            for k in 1..=n {
                out.0[k] = sg.powi(k as i32) * moll.deriv(k - 1, y) / eps.powi(k as i32);
            }
            out
        }
        Node::DeltaDeriv(k) => {
            let y = x / eps;
            let mut out = nan_jet();
            for j in 0..=n {
                if k + j <= MAX_PROFILE_DERIVATIVE {
                    out.0[j] = moll.deriv(k + j, y) / eps.powi((k + j + 1) as i32);
                }
            }
            out
        }
        Node::Embedded { kernel, order } => {
            let key = node as *const Node;
            if let Some((_, _, j)) = memo.iter().find(|(p, m, _)| *p == key && *m == n) {
                return *j;
            }
            let mut out = nan_jet();
            for j in 0..=n {
                if order + j <= kernel.max_order() {
                    out.0[j] = kernel.convolve(moll, order + j, eps, x);
                }
            }
            memo.push((key, n, out));
            out
        }
        Node::Smooth { f, order } => {
            let jf = f.jet(x);
            let mut out = nan_jet();
            for j in 0..=n {
                if order + j <= JET_ORDER {
                    out.0[j] = jf.0[order + j];
                }
            }
            out
        }
        Node::Sum(items) => {
            let mut acc = Jet::constant(0.0);
            for it in items {
                acc = acc + eval_in(it, moll, eps, x, n, memo);
            }
            acc
        }
        Node::Product(items) => {
            let mut jets = Vec::with_capacity(items.len());
            for it in items {
                let j = eval_in(it, moll, eps, x, n, memo);
                if zero_upto(&j, n) {
                    return Jet::constant(0.0);
                }
                jets.push(j);
            }
            // Multiply in a canonical order so that the result does not
            // depend on how the factors were listed.
            jets.sort_by(|a, b| {
                a.0.iter()
                    .zip(b.0.iter())
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            jets.into_iter().fold(Jet::constant(1.0), |acc, j| acc * j)
        }
        Node::Scale(c, u) => eval_in(u, moll, eps, x, n, memo) * *c,
        Node::Derivative(u) => {
            let m = (n + 1).min(JET_ORDER);
            eval_in(u, moll, eps, x, m, memo).shift()
        }
        Node::Sqrt(d) => {
            let v = eval_in(&d.inner, moll, eps, x, n, memo) * d.sign;
            if !(v.0[0] > 0.0) {
                return nan_jet();
            }
            v.powf(d.power as f64 / 2.0)
        }
    }
}

pub(crate) fn support(node: &Node, eps: f64) -> (f64, f64) {
    match node {
        Node::Constant(c) => {
            if *c == 0.0 {
                EMPTY
            } else {
                ALL
            }
        }
        Node::Heaviside(Sign::Plus) => (-eps, f64::INFINITY),
        Node::Heaviside(Sign::Minus) => (f64::NEG_INFINITY, eps),
        Node::DeltaDeriv(_) => (-eps, eps),
        Node::Embedded { kernel, .. } => (
            if kernel.minus.is_some() { f64::NEG_INFINITY } else { -eps },
            if kernel.plus.is_some() { f64::INFINITY } else { eps },
        ),
        Node::Smooth { .. } => ALL,
        Node::Sum(items) => items.iter().fold(EMPTY, |acc, it| {
            let s = support(it, eps);
            (acc.0.min(s.0), acc.1.max(s.1))
        }),
        Node::Product(items) => items.iter().fold(ALL, |acc, it| {
            let s = support(it, eps);
            (acc.0.max(s.0), acc.1.min(s.1))
        }),
        Node::Scale(c, u) => {
            if *c == 0.0 {
                EMPTY
            } else {
                support(u, eps)
            }
        }
        Node::Derivative(u) => support(u, eps),
        Node::Sqrt(d) => {
            if d.power > 0 {
                support(&d.inner, eps)
            } else {
                ALL
            }
        }
    }
}

pub(crate) fn has_embedded(node: &Node) -> bool {
    match node {
        Node::Constant(_) | Node::Smooth { .. } => false,
        Node::Heaviside(_) | Node::DeltaDeriv(_) | Node::Embedded { .. } => true,
        Node::Sum(v) | Node::Product(v) => v.iter().any(|u| has_embedded(u)),
        Node::Scale(_, u) | Node::Derivative(u) => has_embedded(u),
        Node::Sqrt(d) => has_embedded(&d.inner),
    }
}

/// Growth order `p` with `sup |u_ε| = O(ε^{-p})` on compacts.
pub(crate) fn declared_order(node: &Node) -> f64 {
    match node {
        Node::Constant(_) | Node::Smooth { .. } | Node::Heaviside(_) => 0.0,
        Node::DeltaDeriv(k) => (*k + 1) as f64,
        Node::Embedded { kernel, order } => (0..*order)
            .find(|&j| kernel.jump(j) != 0.0)
            .map(|j| (order - j) as f64)
            .unwrap_or(0.0),
        Node::Sum(v) => v.iter().map(|u| declared_order(u)).fold(0.0, f64::max),
        Node::Product(v) => v.iter().map(|u| declared_order(u)).sum(),
        Node::Scale(_, u) => declared_order(u),
        Node::Derivative(u) => declared_order(u) + 1.0,
        // For negative powers this assumes |u| stays bounded below by a
        // constant on the window, which the construction samples.
        Node::Sqrt(d) => {
            if d.power > 0 {
                d.power as f64 / 2.0 * declared_order(&d.inner)
            } else {
                0.0
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, v: &[Arc<Node>], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, u) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{u}")?;
            }
            write!(f, ")")
        };
        match self {
            Node::Constant(c) => write!(f, "{c}"),
            Node::Heaviside(Sign::Plus) => write!(f, "H+"),
            Node::Heaviside(Sign::Minus) => write!(f, "H-"),
            Node::DeltaDeriv(k) => write!(f, "delta{}", "'".repeat(*k)),
            Node::Embedded { kernel, order } => {
                write!(f, "i[{}]{}", kernel.label, "'".repeat(*order))
            }
            Node::Smooth { order, .. } => write!(f, "f{}", "'".repeat(*order)),
            Node::Sum(v) => join(f, v, " + "),
            Node::Product(v) => join(f, v, " * "),
            Node::Scale(c, u) => write!(f, "{c}*{u}"),
            Node::Derivative(u) => write!(f, "d({u})"),
            Node::Sqrt(d) => write!(f, "({}*{})^({}/2)", d.sign, d.inner, d.power),
        }
    }
}

/// One term `coeff · Π factors` of a fully expanded tree.
#[derive(Debug, Clone)]
pub(crate) struct Monomial {
    pub coeff: f64,
    pub factors: Vec<Arc<Node>>,
}

/// Distribute products over sums. Derivative nodes must have been pushed
/// down already.
pub(crate) fn expand(node: &Arc<Node>) -> Result<Vec<Monomial>> {
    Ok(match &**node {
        Node::Constant(c) => {
            if *c == 0.0 {
                vec![]
            } else {
                vec![Monomial {
                    coeff: *c,
                    factors: vec![],
                }]
            }
        }
        Node::Sum(v) => {
            let mut out = Vec::new();
            for u in v {
                out.extend(expand(u)?);
            }
            out
        }
        Node::Scale(c, u) => expand(u)?
            .into_iter()
            .map(|m| Monomial {
                coeff: m.coeff * c,
                factors: m.factors,
            })
            .collect(),
        Node::Product(v) => {
            let mut acc = vec![Monomial {
                coeff: 1.0,
                factors: vec![],
            }];
            for u in v {
                let terms = expand(u)?;
                let mut next = Vec::with_capacity(acc.len() * terms.len());
                for a in &acc {
                    for t in &terms {
                        let mut factors = a.factors.clone();
                        factors.extend(t.factors.iter().cloned());
                        next.push(Monomial {
                            coeff: a.coeff * t.coeff,
                            factors,
                        });
                    }
                }
                acc = next;
            }
            acc
        }
        Node::Derivative(_) => {
            return Err(Error::Unsupported(
                "expand requires derivatives pushed down first".into(),
            ))
        }
        _ => vec![Monomial {
            coeff: 1.0,
            factors: vec![node.clone()],
        }],
    })
}
