//! Admissible mollifier profiles and the delta nets they generate.
//!
//! A profile `ψ = p·b / Z` is a base bump `b` supported in `[-1, 1]` times the
//! unique polynomial `p` of degree at most `m` whose moments satisfy
//! `∫ xᵏ p b = δ_{k0}` for `k = 0..=m`. The delta net is
//! `ρ_ε⁽ᵏ⁾(x) = ε^{-(k+1)} ψ⁽ᵏ⁾(x/ε)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::bump::{Bump, Poly};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Highest profile derivative that can be evaluated.
pub const MAX_PROFILE_DERIVATIVE: usize = 7;
/// Largest supported number of vanishing moments.
pub const MAX_MOMENT_ORDER: usize = 8;

const SPLINE_INTERVALS: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// `exp(-1/(1-x²))` base.
    BumpPoly,
    /// Cardinal cubic-septic B-spline of order 8 rescaled to `[-1, 1]`.
    BsplinePoly,
}

impl ProfileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileKind::BumpPoly => "bump_poly",
            ProfileKind::BsplinePoly => "bspline_poly",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump_poly" => Ok(ProfileKind::BumpPoly),
            "bspline_poly" => Ok(ProfileKind::BsplinePoly),
            other => Err(Error::InvalidArgument(format!(
                "unknown mollifier kind `{other}` (expected bump_poly or bspline_poly)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
enum Base {
    Bump(Bump),
    Bspline,
}

const BSPLINE_ORDER: usize = 8;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// k-th derivative of the cardinal B-spline `M₈` on `[0, 8]`, evaluated on
/// the left half and reflected to avoid cancellation in the truncated-power
/// sum.
fn bspline_deriv(k: usize, t: f64) -> f64 {
    let n = BSPLINE_ORDER;
    if !(0.0..=n as f64).contains(&t) || k >= n {
        return 0.0;
    }
    let half = n as f64 / 2.0;
    let (t, sign) = if t > half {
        (n as f64 - t, if k % 2 == 0 { 1.0 } else { -1.0 })
    } else {
        (t, 1.0)
    };
    let deg = n - 1 - k;
    let mut sum = 0.0;
    for i in 0..=n {
        let d = t - i as f64;
        if d < 0.0 || (d == 0.0 && deg == 0) {
            break;
        }
        let term = if deg == 0 { 1.0 } else { d.powi(deg as i32) };
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += s * binomial(n, i) * term;
    }
    sign * sum / factorial(deg)
}

impl Base {
    fn deriv(&self, k: usize, x: f64) -> f64 {
        match self {
            Base::Bump(b) => b.deriv(k, x),
            Base::Bspline => {
                let scale = (BSPLINE_ORDER / 2) as f64;
                scale.powi(k as i32) * bspline_deriv(k, scale * (x + 1.0))
            }
        }
    }

    fn knots(&self) -> Vec<f64> {
        match self {
            Base::Bump(_) => vec![0.0],
            Base::Bspline => (1..BSPLINE_ORDER)
                .map(|i| -1.0 + 2.0 * i as f64 / BSPLINE_ORDER as f64)
                .collect(),
        }
    }
}

/// A compactly supported smooth profile with vanishing moments.
#[derive(Clone)]
pub struct Mollifier {
    kind: ProfileKind,
    moment_order: usize,
    base: Base,
    poly: Poly,
    poly_derivs: Vec<Poly>,
    knots: Vec<f64>,
    l1_norm: f64,
    sup_norms: [f64; 5],
    cumulative: Vec<f64>,
}

impl fmt::Debug for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mollifier")
            .field("kind", &self.kind)
            .field("moment_order", &self.moment_order)
            .field("poly", &self.poly.0)
            .field("l1_norm", &self.l1_norm)
            .finish()
    }
}

fn tight() -> QuadOptions {
    QuadOptions::with_tolerances(1e-16, 1e-15)
}

/// Build a mollifier with `moment_order` vanishing moments.
pub fn build_mollifier(moment_order: usize, kind: ProfileKind) -> Result<Arc<Mollifier>> {
    Mollifier::new(moment_order, kind).map(Arc::new)
}

impl Mollifier {
    pub fn new(moment_order: usize, kind: ProfileKind) -> Result<Self> {
        if moment_order > MAX_MOMENT_ORDER {
            return Err(Error::InvalidArgument(format!(
                "moment order {moment_order} outside [0, {MAX_MOMENT_ORDER}]"
            )));
        }
        let base = match kind {
            ProfileKind::BumpPoly => Base::Bump(Bump::new()),
            ProfileKind::BsplinePoly => Base::Bspline,
        };
        let knots = base.knots();
        let m = moment_order;
        // Both bases are even, so odd moments vanish identically.
        let mut base_moments = vec![0.0; 2 * m + 1];
        for (j, mom) in base_moments.iter_mut().enumerate() {
            if j % 2 == 0 {
                *mom = integrate(
                    |x| x.powi(j as i32) * base.deriv(0, x),
                    -1.0,
                    1.0,
                    &knots,
                    &tight(),
                )?
                .value;
            }
        }
        let hankel = DMatrix::from_fn(m + 1, m + 1, |k, i| base_moments[k + i]);
        let lu = hankel.clone().lu();
        let u = lu.u();
        let diag_max = (0..=m).map(|i| u[(i, i)].abs()).fold(0.0, f64::max);
        let diag_min = (0..=m).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
        if !(diag_min > 1e-14 * diag_max) {
            return Err(Error::SingularMomentSystem {
                order: m,
                pivot: diag_min,
            });
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[0] = 1.0;
        let coeffs = lu.solve(&rhs).ok_or(Error::SingularMomentSystem {
            order: m,
            pivot: diag_min,
        })?;
        let poly = Poly(coeffs.iter().copied().collect());
        let mut poly_derivs = vec![poly.clone()];
        for _ in 0..MAX_PROFILE_DERIVATIVE {
            let next = poly_derivs.last().unwrap().derivative();
            poly_derivs.push(next);
        }
        let mut moll = Mollifier {
            kind,
            moment_order,
            base,
            poly,
            poly_derivs,
            knots: knots.clone(),
            l1_norm: f64::NAN,
            sup_norms: [f64::NAN; 5],
            cumulative: Vec::new(),
        };
        moll.l1_norm = moll.signed_mass()?.0;
        for k in 0..5 {
            moll.sup_norms[k] = moll.sup_abs(k).0;
        }
        moll.cumulative = moll.tabulate_cumulative()?;
        Ok(moll)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn moment_order(&self) -> usize {
        self.moment_order
    }

    pub fn support_radius(&self) -> f64 {
        1.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Measured `sup|ψ⁽ᵏ⁾|` for `k = 0..=4`.
    pub fn sup_norms(&self) -> [f64; 5] {
        self.sup_norms
    }

    /// Coefficients of the moment-correcting polynomial, increasing degree.
    pub fn polynomial(&self) -> &[f64] {
        &self.poly.0
    }

    /// Two mollifiers generate comparable nets iff they agree in kind and
    /// moment order; construction is deterministic.
    pub fn same_net(&self, other: &Mollifier) -> bool {
        self.kind == other.kind && self.moment_order == other.moment_order
    }

    /// Interior points where the profile is only piecewise smooth (B-spline
    /// knots) plus the center.
    pub fn breakpoints(&self) -> &[f64] {
        &self.knots
    }

    /// `ψ⁽ᵏ⁾(y)`, zero outside `(-1, 1)`.
    pub fn deriv(&self, k: usize, y: f64) -> f64 {
        assert!(
            k <= MAX_PROFILE_DERIVATIVE,
            "profile derivative {k} exceeds {MAX_PROFILE_DERIVATIVE}"
        );
        if y <= -1.0 || y >= 1.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        for j in 0..=k.min(self.poly.0.len() - 1) {
            sum += binomial(k, j) * self.poly_derivs[j].eval(y) * self.base.deriv(k - j, y);
        }
        sum
    }

    pub fn value(&self, y: f64) -> f64 {
        self.deriv(0, y)
    }

    /// `Ψ(y) = ∫_{-1}^{y} ψ`, exactly 0 below -1 and exactly 1 above 1.
    pub fn cumulative(&self, y: f64) -> f64 {
        if y <= -1.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        let h = 2.0 / SPLINE_INTERVALS as f64;
        let pos = (y + 1.0) / h;
        let i = (pos.floor() as usize).min(SPLINE_INTERVALS - 1);
        let x0 = -1.0 + i as f64 * h;
        let x1 = x0 + h;
        let t = (y - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        self.cumulative[i] * h0
            + h * self.value(x0) * h1
            + h * h * self.deriv(1, x0) * h2
            + h * h * self.deriv(1, x1) * h3
            + h * self.value(x1) * h4
            + self.cumulative[i + 1] * h5
    }

    fn tabulate_cumulative(&self) -> Result<Vec<f64>> {
        let h = 2.0 / SPLINE_INTERVALS as f64;
        let knots = self.breakpoints();
        let mut acc = 0.0;
        let mut table = Vec::with_capacity(SPLINE_INTERVALS + 1);
        table.push(0.0);
        for i in 0..SPLINE_INTERVALS {
            let a = -1.0 + i as f64 * h;
            let piece = integrate(|y| self.value(y), a, a + h, knots, &tight())?;
            acc += piece.value;
            table.push(acc);
        }
        Ok(table)
    }

    /// Adaptive quadrature of `∫ yᵏ ψ(y) dy` over `[-1, 1]`.
    pub fn moment(&self, k: usize) -> Result<f64> {
        Ok(integrate(
            |y| y.powi(k as i32) * self.value(y),
            -1.0,
            1.0,
            self.breakpoints(),
            &QuadOptions::with_tolerances(1e-14, 1e-14),
        )?
        .value)
    }

    /// Sign changes of `ψ` inside `(-1, 1)`; the base is positive there, so
    /// these are the roots of the correcting polynomial.
    fn sign_changes(&self) -> Vec<f64> {
        let n = 4000;
        let mut roots = Vec::new();
        let xs: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
        for w in xs.windows(2) {
            let (pa, pb) = (self.poly.eval(w[0]), self.poly.eval(w[1]));
            if pa == 0.0 && w[0] > -1.0 {
                roots.push(w[0]);
            } else if pa * pb < 0.0 {
                let mut conv = roots::SimpleConvergency {
                    eps: 1e-15,
                    max_iter: 200,
                };
                if let Ok(r) = roots::find_root_brent(w[0], w[1], |x| self.poly.eval(x), &mut conv) {
                    roots.push(r);
                }
            }
        }
        roots
    }

    /// Returns `(∫|ψ|, ∫(ψ)₋)` with `(·)₋ = min(·, 0)` reported as a positive mass.
    fn signed_mass(&self) -> Result<(f64, f64)> {
        let mut cuts = self.breakpoints().to_vec();
        cuts.extend(self.sign_changes());
        let l1 = integrate(|y| self.value(y).abs(), -1.0, 1.0, &cuts, &tight())?.value;
        let neg = integrate(|y| (-self.value(y)).max(0.0), -1.0, 1.0, &cuts, &tight())?.value;
        Ok((l1, neg))
    }

    /// Dense-grid sup of `|ψ⁽ᵏ⁾|` followed by golden-section refinement.
    /// Returns `(sup, argmax)`.
    fn sup_abs(&self, k: usize) -> (f64, f64) {
        let n = 4000;
        let f = |y: f64| self.deriv(k, y).abs();
        let (mut best_i, mut best) = (0, 0.0);
        for i in 0..=n {
            let v = f(-1.0 + 2.0 * i as f64 / n as f64);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let h = 2.0 / n as f64;
        let (mut lo, mut hi) = (
            (-1.0 + (best_i as f64 - 1.0) * h).max(-1.0),
            (-1.0 + (best_i as f64 + 1.0) * h).min(1.0),
        );
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let c = hi - g * (hi - lo);
            let d = lo + g * (hi - lo);
            if f(c) > f(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        let x = 0.5 * (lo + hi);
        if f(x) > best {
            (f(x), x)
        } else {
            (best, -1.0 + best_i as f64 * h)
        }
    }

    pub fn report(&self) -> Result<MollifierReport> {
        let (l1, neg) = self.signed_mass()?;
        let (sup0, argmax) = self.sup_abs(0);
        let support_ok = [-1.0, 1.0, -1.5, 1.5, -1.0 - 1e-12, 1.0 + 1e-12]
            .iter()
            .all(|&y| (0..=4).all(|k| self.deriv(k, y) == 0.0));
        let moments = (0..=self.moment_order.max(2) + 1)
            .map(|k| self.moment(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(MollifierReport {
            kind: self.kind,
            moment_order: self.moment_order,
            l1_norm: l1,
            sup_norms: self.sup_norms,
            sup_argmax: argmax,
            sup_value: sup0,
            negative_mass: neg,
            support_ok,
            moments,
        })
    }
}

/// Measurable proxies for the admissibility conditions at a fixed profile.
///
/// Moderateness of the net holds with order `k + 1` for `ρ_ε⁽ᵏ⁾` by the
/// scaling law. The L¹ condition (`∫|ρ_ε| → 1`) cannot hold for a fixed
/// profile with positive moment order; `l1_norm` and `negative_mass` report
/// how far the profile is from it.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierReport {
    pub kind: ProfileKind,
    pub moment_order: usize,
    pub l1_norm: f64,
    pub sup_norms: [f64; 5],
    pub sup_value: f64,
    pub sup_argmax: f64,
    /// `∫(ψ)₋` as a non-negative number.
    pub negative_mass: f64,
    pub support_ok: bool,
    /// `∫ yᵏ ψ` for `k = 0..`.
    pub moments: Vec<f64>,
}

impl MollifierReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("{:<24}{}\n", "kind", self.kind));
        s.push_str(&format!("{:<24}{}\n", "moment_order", self.moment_order));
        s.push_str(&format!("{:<24}{:.16e}\n", "l1_norm", self.l1_norm));
        s.push_str(&format!("{:<24}{:.16e}\n", "negative_mass", self.negative_mass));
        for (k, v) in self.sup_norms.iter().enumerate() {
            s.push_str(&format!("{:<24}{:.16e}\n", format!("sup|psi^({k})|"), v));
        }
        s.push_str(&format!("{:<24}{:.16e}\n", "sup_argmax", self.sup_argmax));
        s.push_str(&format!("{:<24}{}\n", "support_in_[-1,1]", self.support_ok));
        for (k, v) in self.moments.iter().enumerate() {
            s.push_str(&format!("{:<24}{:.16e}\n", format!("moment_{k}"), v));
        }
        s.push_str(&format!(
            "{:<24}{}\n",
            "moderateness",
            "sup|rho_eps^(k)| = eps^-(k+1) sup|psi^(k)|"
        ));
        s.push_str(&format!(
            "{:<24}{}\n",
            "l1_condition",
            if self.negative_mass == 0.0 {
                "satisfied (psi >= 0)".to_string()
            } else {
                format!("not enforced: int|psi| = {:.6} at every eps", self.l1_norm)
            }
        ));
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,value\n");
        s.push_str(&format!("l1_norm,{:.16e}\n", self.l1_norm));
        s.push_str(&format!("negative_mass,{:.16e}\n", self.negative_mass));
        for (k, v) in self.sup_norms.iter().enumerate() {
            s.push_str(&format!("sup_d{k},{v:.16e}\n"));
        }
        s.push_str(&format!("sup_argmax,{:.16e}\n", self.sup_argmax));
        s.push_str(&format!("support_ok,{}\n", self.support_ok));
        for (k, v) in self.moments.iter().enumerate() {
            s.push_str(&format!("moment_{k},{v:.16e}\n"));
        }
        s
    }
}

/// `ρ_ε⁽ᵏ⁾(x) = ε^{-(k+1)} ψ⁽ᵏ⁾(x/ε)`.
#[derive(Clone, Debug)]
pub struct DeltaNet {
    pub base: Arc<Mollifier>,
    pub k: usize,
}

impl DeltaNet {
    pub fn new(base: Arc<Mollifier>, k: usize) -> Self {
        Self { base, k }
    }

    pub fn eval(&self, eps: f64, x: f64) -> f64 {
        self.base.deriv(self.k, x / eps) / eps.powi(self.k as i32 + 1)
    }

    pub fn support(&self, eps: f64) -> (f64, f64) {
        (-eps, eps)
    }
}
