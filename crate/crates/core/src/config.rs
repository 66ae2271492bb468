//! Run configuration: a flat `key = value` file with `#` comments, plus
//! `key=value` overrides applied in order.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::association::{EpsSchedule, VerdictOptions};
use crate::error::{Error, Result};
use crate::genfunc::{corpus, TestForm};
use crate::mollifier::{ProfileKind, MAX_MOMENT_ORDER};
use crate::wormhole::WormholeParams;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mollifier_kind: ProfileKind,
    /// Moment order for geometry, NEC and the mollifier report.
    pub moment_order: usize,
    /// Moment orders the association suite is run for.
    pub rule_moment_orders: Vec<usize>,
    pub schedule: EpsSchedule,
    pub corpus_centers: Vec<f64>,
    pub corpus_half_widths: Vec<f64>,
    pub mass: f64,
    pub throat_radius: f64,
    pub alpha2: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_steps: usize,
    pub sweep_alpha2: Vec<f64>,
    pub verdict: VerdictOptions,
    pub geometry_radii: Vec<f64>,
    /// CSV destination; empty for none.
    pub output: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mollifier_kind: ProfileKind::BumpPoly,
            moment_order: 0,
            rule_moment_orders: vec![0, 2],
            schedule: EpsSchedule::default(),
            corpus_centers: vec![0.0, -2.0, 2.0],
            corpus_half_widths: vec![0.25, 1.0, 4.0],
            mass: 1.0,
            throat_radius: 2.5,
            alpha2: 0.0,
            a_min: 2.05,
            a_max: 3.0,
            a_steps: 20,
            sweep_alpha2: vec![0.0, 0.5, 1.0],
            verdict: VerdictOptions::default(),
            geometry_radii: vec![2.6, 3.0, 5.0, 10.0, 100.0],
            output: String::new(),
        }
    }
}

const KEYS: &[&str] = &[
    "mollifier.kind",
    "mollifier.moment_order",
    "rules.moment_orders",
    "schedule.eps0",
    "schedule.ratio",
    "schedule.count",
    "corpus.centers",
    "corpus.half_widths",
    "wormhole.mass",
    "wormhole.throat_radius",
    "wormhole.alpha2",
    "sweep.a_min",
    "sweep.a_max",
    "sweep.a_steps",
    "sweep.alpha2",
    "verdict.rel_tol",
    "verdict.min_slope",
    "verdict.max_fit_residual",
    "verdict.min_divergence_order",
    "verdict.fit_window",
    "geometry.radii",
    "output.path",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("{key}: empty list")));
    }
    Ok(items)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parse a configuration file's text on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "mollifier.kind" => {
                self.mollifier_kind = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "mollifier.moment_order" => self.moment_order = parse(key, v)?,
            "rules.moment_orders" => self.rule_moment_orders = parse_list(key, v)?,
            "schedule.eps0" => self.schedule.eps0 = parse(key, v)?,
            "schedule.ratio" => self.schedule.ratio = parse(key, v)?,
            "schedule.count" => self.schedule.count = parse(key, v)?,
            "corpus.centers" => self.corpus_centers = parse_list(key, v)?,
            "corpus.half_widths" => self.corpus_half_widths = parse_list(key, v)?,
            "wormhole.mass" => self.mass = parse(key, v)?,
            "wormhole.throat_radius" => self.throat_radius = parse(key, v)?,
            "wormhole.alpha2" => self.alpha2 = parse(key, v)?,
            "sweep.a_min" => self.a_min = parse(key, v)?,
            "sweep.a_max" => self.a_max = parse(key, v)?,
            "sweep.a_steps" => self.a_steps = parse(key, v)?,
            "sweep.alpha2" => self.sweep_alpha2 = parse_list(key, v)?,
            "verdict.rel_tol" => self.verdict.rel_tol = parse(key, v)?,
            "verdict.min_slope" => self.verdict.min_slope = parse(key, v)?,
            "verdict.max_fit_residual" => self.verdict.max_fit_residual = parse(key, v)?,
            "verdict.min_divergence_order" => self.verdict.min_divergence_order = parse(key, v)?,
            "verdict.fit_window" => self.verdict.fit_window = parse(key, v)?,
            "geometry.radii" => self.geometry_radii = parse_list(key, v)?,
            "output.path" => self.output = v.to_string(),
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}`; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> String {
        match key {
            "mollifier.kind" => self.mollifier_kind.to_string(),
            "mollifier.moment_order" => self.moment_order.to_string(),
            "rules.moment_orders" => join(&self.rule_moment_orders),
            "schedule.eps0" => self.schedule.eps0.to_string(),
            "schedule.ratio" => self.schedule.ratio.to_string(),
            "schedule.count" => self.schedule.count.to_string(),
            "corpus.centers" => join(&self.corpus_centers),
            "corpus.half_widths" => join(&self.corpus_half_widths),
            "wormhole.mass" => self.mass.to_string(),
            "wormhole.throat_radius" => self.throat_radius.to_string(),
            "wormhole.alpha2" => self.alpha2.to_string(),
            "sweep.a_min" => self.a_min.to_string(),
            "sweep.a_max" => self.a_max.to_string(),
            "sweep.a_steps" => self.a_steps.to_string(),
            "sweep.alpha2" => join(&self.sweep_alpha2),
            "verdict.rel_tol" => self.verdict.rel_tol.to_string(),
            "verdict.min_slope" => self.verdict.min_slope.to_string(),
            "verdict.max_fit_residual" => self.verdict.max_fit_residual.to_string(),
            "verdict.min_divergence_order" => self.verdict.min_divergence_order.to_string(),
            "verdict.fit_window" => self.verdict.fit_window.to_string(),
            "geometry.radii" => join(&self.geometry_radii),
            "output.path" => self.output.clone(),
            _ => unreachable!("every listed key has a getter"),
        }
    }

    /// The resolved configuration as `# key = value` comment lines.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for k in KEYS {
            let _ = writeln!(s, "# {k} = {}", self.get(k));
        }
        s
    }

    /// Check every range and build the validated pieces.
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        if self.moment_order > MAX_MOMENT_ORDER
            || self.rule_moment_orders.iter().any(|m| *m > MAX_MOMENT_ORDER)
        {
            return Err(Error::Config(format!(
                "moment orders must not exceed {MAX_MOMENT_ORDER}"
            )));
        }
        EpsSchedule::new(self.schedule.eps0, self.schedule.ratio, self.schedule.count).map_err(cfg)?;
        self.corpus().map_err(cfg)?;
        self.params().map_err(cfg)?;
        if !(self.a_min > 2.0 * self.mass) {
            return Err(Error::Config(format!(
                "sweep.a_min = {} must exceed 2M = {}",
                self.a_min,
                2.0 * self.mass
            )));
        }
        if !(self.a_max >= self.a_min) || self.a_steps == 0 || (self.a_steps > 1 && self.a_max == self.a_min) {
            return Err(Error::Config("sweep a range is empty".into()));
        }
        if self.sweep_alpha2.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("sweep.alpha2 must be finite".into()));
        }
        let v = &self.verdict;
        if !(v.rel_tol > 0.0 && v.min_slope > 0.0 && v.max_fit_residual > 0.0 && v.min_divergence_order > 0.0)
            || v.fit_window < 3
        {
            return Err(Error::Config(
                "verdict tolerances must be positive and fit_window at least 3".into(),
            ));
        }
        if self.geometry_radii.iter().any(|r| !(*r >= self.throat_radius)) {
            return Err(Error::Config(format!(
                "geometry.radii must not be below the throat radius {}",
                self.throat_radius
            )));
        }
        Ok(())
    }

    pub fn corpus(&self) -> Result<Vec<TestForm>> {
        corpus(&self.corpus_centers, &self.corpus_half_widths)
    }

    pub fn params(&self) -> Result<WormholeParams> {
        WormholeParams::new(self.mass, self.throat_radius, self.alpha2)
    }

    /// `a_min (1 - t) + a_max t` on `a_steps` points; the end points are
    /// exact.
    pub fn sweep_radii(&self) -> Vec<f64> {
        if self.a_steps == 1 {
            return vec![self.a_min];
        }
        (0..self.a_steps)
            .map(|i| {
                let t = i as f64 / (self.a_steps - 1) as f64;
                self.a_min * (1.0 - t) + self.a_max * t
            })
            .collect()
    }
}
