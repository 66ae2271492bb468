//! Equal-mass Schwarzschild thin-shell wormhole in proper radial distance.
//!
//! Both sides carry `A(r) = 1 - 2M/r`. The proper distance from the throat
//! is `η̃±(r) = ±∫_a^r A^{-1/2}`, the shell sits at `η̃ = 0` and the time
//! matching factor between the sides is 1.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::genfunc::{GenScalar, Kernel, Side, Sign, SmoothSide};
use crate::jet::Jet;
use crate::mollifier::Mollifier;
use crate::quad::{integrate, QuadOptions};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WormholeParams {
    pub mass: f64,
    pub throat_radius: f64,
    /// Coefficient of `R²` in `F(R) = 2Λ + R + α₂R²`.
    pub alpha2: f64,
    /// Fixed at 0.
    pub lambda: f64,
    /// `8π`.
    pub kappa: f64,
}

impl WormholeParams {
    pub fn new(mass: f64, throat_radius: f64, alpha2: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        if !(throat_radius > 2.0 * mass && throat_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "throat radius {throat_radius} must exceed 2M = {}",
                2.0 * mass
            )));
        }
        if !alpha2.is_finite() {
            return Err(Error::InvalidArgument("alpha2 must be finite".into()));
        }
        Ok(Self {
            mass,
            throat_radius,
            alpha2,
            lambda: 0.0,
            kappa: 8.0 * PI,
        })
    }

    /// `A(r) = 1 - 2M/r`.
    pub fn lapse(&self, r: f64) -> f64 {
        1.0 - 2.0 * self.mass / r
    }

    /// `A(a)`.
    pub fn lapse_at_throat(&self) -> f64 {
        self.lapse(self.throat_radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThroatConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn throat_constants(p: &WormholeParams) -> ThroatConstants {
    let (m, a) = (p.mass, p.throat_radius);
    let sa = p.lapse_at_throat().sqrt();
    ThroatConstants {
        alpha: (a / (a - 2.0 * m)).sqrt() * 4.0 * m / (a * a) + 8.0 / a * sa,
        beta: sa * 2.0 * m / (a * a),
        gamma: 2.0 * a * sa,
    }
}

/// Antiderivative of `A^{-1/2}`: `√(r(r-2M)) + 2M ln(√r + √(r-2M))`.
fn distance_antiderivative(r: f64, m: f64) -> f64 {
    (r * (r - 2.0 * m)).sqrt() + 2.0 * m * (r.sqrt() + (r - 2.0 * m).sqrt()).ln()
}

fn check_radius(r: f64, p: &WormholeParams) -> Result<()> {
    if r < p.throat_radius || r.is_nan() {
        return Err(Error::InsideThroat {
            r,
            a: p.throat_radius,
        });
    }
    Ok(())
}

/// `η̃±(r)` from the closed-form antiderivative.
pub fn proper_distance(r: f64, side: Sign, p: &WormholeParams) -> Result<f64> {
    check_radius(r, p)?;
    let d = distance_antiderivative(r, p.mass) - distance_antiderivative(p.throat_radius, p.mass);
    Ok(side.as_f64() * d.max(0.0))
}

/// `η̃±(r)` by adaptive quadrature after `r = 2M + t²`, which turns the
/// integrand into `2√(2M + t²)` and removes the endpoint singularity as
/// `a → 2M`.
pub fn proper_distance_by_quadrature(r: f64, side: Sign, p: &WormholeParams) -> Result<f64> {
    check_radius(r, p)?;
    let m2 = 2.0 * p.mass;
    let q = integrate(
        |t| 2.0 * (m2 + t * t).sqrt(),
        (p.throat_radius - m2).sqrt(),
        (r - m2).sqrt(),
        &[],
        &QuadOptions::with_tolerances(1e-14, 1e-15),
    )?;
    Ok(side.as_f64() * q.value)
}

/// Inverse of `|η̃|`: the radius at proper distance `s` from the throat on
/// either side.
///
/// `η̃` is concave and increasing in `r` with `η̃(r) ≥ r - a`, so the root
/// lies in `[a, a + |s|]`; Newton from the right end is safeguarded by
/// bisection.
pub fn radius_from_distance(s: f64, p: &WormholeParams) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::Bracketing(format!("distance {s} is not finite")));
    }
    let t = s.abs();
    let (a, m) = (p.throat_radius, p.mass);
    if t == 0.0 {
        return Ok(a);
    }
    let g0 = distance_antiderivative(a, m);
    let (mut lo, mut hi) = (a, a + t);
    let mut r = hi;
    for _ in 0..100 {
        let f = distance_antiderivative(r, m) - g0 - t;
        if f == 0.0 {
            return Ok(r);
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let step = f * p.lapse(r).sqrt();
        let mut next = r - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 4.0 * f64::EPSILON * r || hi - lo <= 4.0 * f64::EPSILON * r {
            return Ok(next);
        }
        r = next;
    }
    Err(Error::Bracketing(format!(
        "radius inversion did not converge for s = {s}"
    )))
}

/// `r(s)` and its first three derivatives in `s` on the given side.
pub fn radius_jet(s: f64, side: Sign, p: &WormholeParams) -> Result<Jet> {
    let r = radius_from_distance(s, p)?;
    let m = p.mass;
    let sig = side.as_f64();
    let sa = p.lapse(r).sqrt();
    Ok(Jet([
        r,
        sig * sa,
        m / (r * r),
        -2.0 * m * sig * sa / (r * r * r),
    ]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideMetric {
    pub g_tt: f64,
    pub g_thth: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideChristoffel {
    /// `Γ^η̃_tt`
    pub tt: f64,
    /// `Γ^η̃_ϑϑ`
    pub thth: f64,
}

/// `g_tt = -A(r)`, `g_ϑϑ = r²` at `r = r(η̃)`; identical on both sides.
pub fn side_metric(s: f64, p: &WormholeParams) -> Result<SideMetric> {
    let r = radius_from_distance(s, p)?;
    Ok(SideMetric {
        g_tt: -p.lapse(r),
        g_thth: r * r,
    })
}

/// `(Γ±)^η̃_tt = ±√A M/r²`, `(Γ±)^η̃_ϑϑ = ∓r√A`.
pub fn side_christoffel(s: f64, side: Sign, p: &WormholeParams) -> Result<SideChristoffel> {
    let r = radius_from_distance(s, p)?;
    let sa = p.lapse(r).sqrt();
    let sig = side.as_f64();
    Ok(SideChristoffel {
        tt: sig * sa * p.mass / (r * r),
        thth: -sig * r * sa,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Gtt,
    Gthth,
    /// `Γ^η̃_tt` restricted to one side of the shell.
    GammaTt(Sign),
    /// `Γ^η̃_ϑϑ` restricted to one side of the shell.
    GammaThth(Sign),
}

impl Component {
    pub fn label(&self) -> &'static str {
        match self {
            Component::Gtt => "g_tt",
            Component::Gthth => "g_thth",
            Component::GammaTt(Sign::Plus) => "Gamma+_tt",
            Component::GammaTt(Sign::Minus) => "Gamma-_tt",
            Component::GammaThth(Sign::Plus) => "Gamma+_thth",
            Component::GammaThth(Sign::Minus) => "Gamma-_thth",
        }
    }

    /// Which sides of the shell carry the component.
    fn sides(&self) -> (bool, bool) {
        match self {
            Component::Gtt | Component::Gthth => (true, true),
            Component::GammaTt(s) | Component::GammaThth(s) => (*s == Sign::Plus, *s == Sign::Minus),
        }
    }

    /// The component as a jet in `η̃` on `side`, from the radius jet.
    fn density(&self, r: Jet, side: Sign, m: f64) -> Jet {
        let lapse = r.recip() * (-2.0 * m) + 1.0;
        let sa = lapse.sqrt();
        let sig = side.as_f64();
        match self {
            Component::Gtt => -lapse,
            Component::Gthth => r * r,
            Component::GammaTt(_) => sa * r.recip() * r.recip() * (sig * m),
            Component::GammaThth(_) => r * sa * (-sig),
        }
    }

    /// Closed-form side value at `η̃ = s`; the restricted components vanish
    /// on the other side.
    pub fn classical(&self, s: f64, p: &WormholeParams) -> Result<f64> {
        let side = if s >= 0.0 { Sign::Plus } else { Sign::Minus };
        let (plus, minus) = self.sides();
        if (side == Sign::Plus && !plus) || (side == Sign::Minus && !minus) {
            return Ok(0.0);
        }
        Ok(self.density(radius_jet(s, side, p)?, side, p.mass).value())
    }
}

/// Distance from the shell within which side functions are tabulated. It
/// covers every point the convolution touches for `ε ≤ 0.25`.
const TABULATED_RANGE: f64 = 0.5;

fn side_function(c: Component, side: Sign, p: WormholeParams) -> Result<SmoothSide> {
    let half = match side {
        Sign::Plus => Side::Plus,
        Sign::Minus => Side::Minus,
    };
    let f = SmoothSide::from_jet(half, 3, move |s| match radius_jet(s, side, &p) {
        Ok(r) => c.density(r, side, p.mass),
        Err(_) => Jet([f64::NAN; 4]),
    })?;
    let (lo, hi) = match side {
        Sign::Plus => (0.0, TABULATED_RANGE),
        Sign::Minus => (-TABULATED_RANGE, 0.0),
    };
    Ok(f.tabulated(lo, hi))
}

/// `ι(component)`: the mollified component, `ρ_ε ∗ F` with `F` the side
/// values in `η̃`. This is the radial integral `∫_a^∞ h(r) ρ_ε(η̃ - η̃±(r)) dr`
/// after the substitution `dr = √A dη̃`.
pub fn embedded_component(
    which: Component,
    p: &WormholeParams,
    moll: &Arc<Mollifier>,
) -> Result<GenScalar> {
    let (plus, minus) = which.sides();
    let plus = plus.then(|| side_function(which, Sign::Plus, *p)).transpose()?;
    let minus = minus.then(|| side_function(which, Sign::Minus, *p)).transpose()?;
    GenScalar::embed_kernel(moll, Kernel::new(which.label(), plus, minus)?)
}
