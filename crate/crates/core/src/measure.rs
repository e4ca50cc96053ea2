//! Finite positive radial measures on `[0, 1)`: tails, moments and
//! integrals against them.
//!
//! Densities that pile up near `t = 1` are integrated in the variable
//! `u = -log(1 - t)`, where `(1 - t)^(gamma - 1) dt` becomes `exp(-gamma u) du`
//! and `t^n = (1 - exp(-u))^n` is a smooth step located near `u = log n`.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Estimate, QuadValue, Tolerance};

/// Moments below this are flushed to zero.
const UNDERFLOW: f64 = 1e-300;

/// Width of the linear part of the `u` range before switching to `u = U1 e^v`.
const LINEAR_SPAN: f64 = 48.0;

/// One building block of a [`RadialMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MeasureComponent {
    /// `c (1-t)^(gamma-1) (log(e/(1-t)))^(-beta) dt`.
    #[serde(rename = "power_log")]
    PowerLog {
        c: f64,
        gamma: f64,
        #[serde(default)]
        beta: f64,
    },
    /// `w` times the unit mass at `t0`.
    #[serde(rename = "point")]
    Point { w: f64, t0: f64 },
    /// Piecewise-linear density through `(x[i], v[i])`, zero beyond the last node.
    #[serde(rename = "table")]
    Table { x: Vec<f64>, v: Vec<f64> },
}

impl MeasureComponent {
    fn validate(&self) -> Result<()> {
        match self {
            MeasureComponent::PowerLog { c, gamma, beta } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::invalid(format!("power_log weight must be >= 0, got {c}")));
                }
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::invalid(format!("power_log gamma must be > 0, got {gamma}")));
                }
                if !(beta.is_finite() && *beta >= 0.0) {
                    return Err(Error::invalid(format!("power_log beta must be >= 0, got {beta}")));
                }
            }
            MeasureComponent::Point { w, t0 } => {
                if !(w.is_finite() && *w >= 0.0) {
                    return Err(Error::invalid(format!("point weight must be >= 0, got {w}")));
                }
                if !(t0.is_finite() && (0.0..1.0).contains(t0)) {
                    return Err(Error::invalid(format!("point location must lie in [0,1), got {t0}")));
                }
            }
            MeasureComponent::Table { x, v } => {
                if x.len() < 2 || x.len() != v.len() {
                    return Err(Error::invalid("table needs matching x and v with at least two nodes"));
                }
                if x[0] != 0.0 {
                    return Err(Error::invalid("table grid must start at 0"));
                }
                if !x.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::invalid("table grid must be strictly increasing"));
                }
                let last = x[x.len() - 1];
                if !(last < 1.0) {
                    return Err(Error::invalid("table grid must end below 1"));
                }
                if v.iter().any(|y| !(y.is_finite() && *y >= 0.0)) {
                    return Err(Error::invalid("table values must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    fn scaled(&self, factor: f64) -> MeasureComponent {
        match self {
            MeasureComponent::PowerLog { c, gamma, beta } => MeasureComponent::PowerLog {
                c: c * factor,
                gamma: *gamma,
                beta: *beta,
            },
            MeasureComponent::Point { w, t0 } => MeasureComponent::Point { w: w * factor, t0: *t0 },
            MeasureComponent::Table { x, v } => MeasureComponent::Table {
                x: x.clone(),
                v: v.iter().map(|y| y * factor).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeasureFile {
    components: Vec<MeasureComponent>,
}

/// A finite positive Borel measure on `[0, 1)`, stored as a mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureFile", into = "MeasureFile")]
pub struct RadialMeasure {
    components: Vec<MeasureComponent>,
}

impl TryFrom<MeasureFile> for RadialMeasure {
    type Error = Error;

    fn try_from(file: MeasureFile) -> Result<Self> {
        RadialMeasure::new(file.components)
    }
}

impl From<RadialMeasure> for MeasureFile {
    fn from(m: RadialMeasure) -> Self {
        MeasureFile {
            components: m.components,
        }
    }
}

impl RadialMeasure {
    pub fn new(components: Vec<MeasureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a measure needs at least one component"));
        }
        for c in &components {
            c.validate()?;
        }
        let m = RadialMeasure { components };
        let mass = m.total_mass()?;
        if !(mass > 0.0) {
            return Err(Error::invalid("total mass must be strictly positive"));
        }
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialises")
    }

    /// Lebesgue measure `dt`.
    pub fn lebesgue() -> Self {
        Self::power_log(1.0, 1.0, 0.0)
    }

    /// `c (1-t)^(gamma-1) (log(e/(1-t)))^(-beta) dt`.
    pub fn power_log(c: f64, gamma: f64, beta: f64) -> Self {
        RadialMeasure::new(vec![MeasureComponent::PowerLog { c, gamma, beta }]).expect("valid power_log parameters")
    }

    pub fn point(w: f64, t0: f64) -> Self {
        RadialMeasure::new(vec![MeasureComponent::Point { w, t0 }]).expect("valid point mass")
    }

    pub fn components(&self) -> &[MeasureComponent] {
        &self.components
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid("scale factor must be positive"));
        }
        Ok(RadialMeasure {
            components: self.components.iter().map(|c| c.scaled(factor)).collect(),
        })
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &RadialMeasure) -> RadialMeasure {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        RadialMeasure { components }
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.moment(0)
    }

    /// `nu([t, 1))`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && (0.0..1.0).contains(&t)) {
            return Err(Error::invalid(format!("tail point must lie in [0,1), got {t}")));
        }
        let mut total = 0.0;
        for c in &self.components {
            total += match c {
                MeasureComponent::PowerLog { c, gamma, beta } => {
                    let u0 = -(-t).ln_1p();
                    if *beta == 0.0 {
                        c * (-gamma * u0).exp() / gamma
                    } else {
                        power_log_integral(*c, *gamma, *beta, 0.0, u0, Tolerance::default(), |_, _| 1.0)?.value
                    }
                }
                MeasureComponent::Point { w, t0 } => {
                    if t <= *t0 {
                        *w
                    } else {
                        0.0
                    }
                }
                MeasureComponent::Table { x, v } => table_tail(x, v, t),
            };
        }
        Ok(total)
    }

    pub fn moment(&self, n: usize) -> Result<f64> {
        Ok(self.moment_estimate(n)?.value)
    }

    /// `mu_n` together with the quadrature error estimate.
    pub fn moment_estimate(&self, n: usize) -> Result<Estimate<f64>> {
        let mut total = Estimate::exact(0.0);
        for c in &self.components {
            let part = match c {
                MeasureComponent::PowerLog { c, gamma, beta } => {
                    if n == 0 && *beta == 0.0 {
                        Estimate::exact(c / gamma)
                    } else {
                        let nf = n as f64;
                        power_log_integral(*c, *gamma, *beta, 0.0, 0.0, Tolerance::default(), |t, omt| {
                            pow_t(nf, t, omt)
                        })?
                    }
                }
                MeasureComponent::Point { w, t0 } => Estimate::exact(point_moment(*w, *t0, n)),
                MeasureComponent::Table { x, v } => Estimate::exact(table_moment(x, v, n)),
            };
            total = total.combine(part);
        }
        if total.value < UNDERFLOW {
            total.value = total.value.max(0.0);
        }
        Ok(total)
    }

    /// `mu_0, ..., mu_{n_max}`.
    pub fn moments(&self, n_max: usize) -> Result<MomentSequence> {
        let mut values = Vec::with_capacity(n_max + 1);
        let mut errors = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let est = self.moment_estimate(n)?;
            values.push(est.value);
            errors.push(est.error);
        }
        MomentSequence::with_errors(values, errors, DEFAULT_MOMENT_TOLERANCE)
    }

    /// Independent evaluation of `mu_n` through `n * int_0^1 nu([x,1)) x^(n-1) dx`,
    /// using composite Gauss-Legendre panels and its own tail evaluation.
    pub fn moment_via_tail(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("moment_via_tail needs n >= 1"));
        }
        let nf = n as f64;
        // x = 1 - e^{-v}
        let mut breaks = vec![0.0, 45.0];
        for c in &self.components {
            match c {
                MeasureComponent::Point { t0, .. } => breaks.push(-(-t0).ln_1p()),
                MeasureComponent::Table { x, .. } => breaks.extend(x.iter().map(|xi| -(-xi).ln_1p())),
                MeasureComponent::PowerLog { .. } => {}
            }
        }
        let integrand = |v: f64| {
            let omx = (-v).exp();
            let x = -(-v).exp_m1();
            let tail: f64 = self.components.iter().map(|c| oracle_tail(c, x, v)).sum();
            nf * tail * pow_t(nf - 1.0, x, omx) * omx
        };
        Ok(legendre_composite(integrand, &breaks, 0.25))
    }

    /// `int (1-t)^(-growth) g(t, 1-t) dnu(t)`.
    ///
    /// `g` must stay bounded as `t -> 1`; the `(1-t)^(-growth)` factor is
    /// folded into the density so that its divergence can be detected exactly.
    pub fn integrate<T, G>(&self, growth: f64, tol: Tolerance, g: G) -> Result<Estimate<T>>
    where
        T: QuadValue,
        G: Fn(f64, f64) -> T,
    {
        let mut total = Estimate::exact(T::zero());
        for c in &self.components {
            let part = match c {
                MeasureComponent::PowerLog { c, gamma, beta } => {
                    power_log_integral(*c, *gamma, *beta, growth, 0.0, tol, &g)?
                }
                MeasureComponent::Point { w, t0 } => {
                    let omt = 1.0 - t0;
                    Estimate::exact(g(*t0, omt) * (w * omt.powf(-growth)))
                }
                MeasureComponent::Table { x, v } => {
                    let mut acc = Estimate::exact(T::zero());
                    for i in 0..x.len() - 1 {
                        let (a, b, va, vb) = (x[i], x[i + 1], v[i], v[i + 1]);
                        if va == 0.0 && vb == 0.0 {
                            continue;
                        }
                        let h = b - a;
                        let est = quad::integrate(
                            |t: f64| {
                                let dens = va + (vb - va) * (t - a) / h;
                                let omt = 1.0 - t;
                                g(t, omt) * (dens * omt.powf(-growth))
                            },
                            a,
                            b,
                            tol,
                        )?;
                        acc = acc.combine(est);
                    }
                    acc
                }
            };
            total = total.combine(part);
        }
        Ok(total)
    }
}

/// Absolute tolerance declared for computed moment sequences.
pub const DEFAULT_MOMENT_TOLERANCE: f64 = 1e-12;

/// `t^n` from `t` and `1 - t`, accurate when `t` is close to 1.
fn pow_t(n: f64, t: f64, omt: f64) -> f64 {
    if n == 0.0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let ln_t = if omt < 0.5 { (-omt).ln_1p() } else { t.ln() };
    (n * ln_t).exp()
}

fn point_moment(w: f64, t0: f64, n: usize) -> f64 {
    if n == 0 {
        return w;
    }
    if t0 == 0.0 || w == 0.0 {
        return 0.0;
    }
    let v = (n as f64 * t0.ln() + w.ln()).exp();
    if v < UNDERFLOW {
        0.0
    } else {
        v
    }
}

/// `int_a^b t^n dt` and `int_a^b t^n (t - a) dt`.
fn panel_power_integrals(a: f64, b: f64, n: usize) -> (f64, f64) {
    let n1 = n as f64 + 1.0;
    let n2 = n as f64 + 2.0;
    let pw = |x: f64, k: f64| if x == 0.0 { 0.0 } else { x.powf(k) };
    let j0 = (pw(b, n1) - pw(a, n1)) / n1;
    let j1 = (pw(b, n2) - pw(a, n2)) / n2 - a * j0;
    (j0, j1)
}

fn table_moment(x: &[f64], v: &[f64], n: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..x.len() - 1 {
        let (a, b) = (x[i], x[i + 1]);
        let (j0, j1) = panel_power_integrals(a, b, n);
        total += v[i] * j0 + (v[i + 1] - v[i]) / (b - a) * j1;
    }
    if total < UNDERFLOW {
        0.0
    } else {
        total
    }
}

fn table_tail(x: &[f64], v: &[f64], t: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..x.len() - 1 {
        let (a, b) = (x[i], x[i + 1]);
        if b <= t {
            continue;
        }
        let lo = a.max(t);
        let at = |s: f64| v[i] + (v[i + 1] - v[i]) * (s - a) / (b - a);
        total += 0.5 * (at(lo) + v[i + 1]) * (b - lo);
    }
    total
}

/// `int_{u0}^inf g(t(u), 1-t(u)) c e^{-(gamma-growth) u} (1+u)^{-beta} du` with `t = 1 - e^{-u}`.
fn power_log_integral<T, G>(
    c: f64,
    gamma: f64,
    beta: f64,
    growth: f64,
    u0: f64,
    tol: Tolerance,
    g: G,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    G: Fn(f64, f64) -> T,
{
    if c == 0.0 {
        return Ok(Estimate::exact(T::zero()));
    }
    let rate = gamma - growth;
    if rate < -1e-12 || (rate.abs() <= 1e-12 && beta <= 1.0) {
        return Err(Error::Divergent(format!(
            "(1-t)^(-{growth:?}) is not integrable against (1-t)^({gamma:?}-1) (log e/(1-t))^(-{beta:?})"
        )));
    }
    let rate = rate.max(0.0);
    let weighted = |u: f64| {
        let omt = (-u).exp();
        let t = -(-u).exp_m1();
        let w = c * (-rate * u).exp() * (1.0 + u).powf(-beta);
        if w == 0.0 {
            T::zero()
        } else {
            g(t, omt) * w
        }
    };

    let offsets = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, LINEAR_SPAN];
    let breaks: Vec<f64> = offsets.iter().map(|o| u0 + o).collect();
    let head = quad::integrate_with_breaks(&weighted, &breaks, tol)?;

    // u = u0 + L e^v beyond the linear span
    let start = u0 + LINEAR_SPAN;
    if rate * start > 700.0 {
        return Ok(head);
    }
    let v_max = if rate > 0.0 {
        ((60.0 / (rate * LINEAR_SPAN)).max(1.0)).ln() + 1.0
    } else {
        80.0
    };
    let tail_tol = Tolerance {
        abs: tol.abs.max(tol.rel * head.value.magnitude()),
        ..tol
    };
    let tail = quad::integrate(
        |v: f64| {
            let w = LINEAR_SPAN * v.exp();
            weighted(u0 + w) * w
        },
        0.0,
        v_max,
        tail_tol,
    )?;
    let mut est = head.combine(tail);
    if rate == 0.0 {
        // algebraic remainder beyond the last node, bounded by the density alone
        let end = u0 + LINEAR_SPAN * v_max.exp();
        est.error += c * (1.0 + end).powf(1.0 - beta) / (beta - 1.0);
    }
    Ok(est)
}

fn legendre_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(20).expect("nonzero")))
}

/// Composite 20-point Gauss-Legendre over `[min(breaks), max(breaks)]` with
/// panels no wider than `width` and every break point on a panel boundary.
fn legendre_composite<F: Fn(f64) -> f64>(f: F, breaks: &[f64], width: f64) -> f64 {
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let rule = legendre_rule();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for k in 0..pieces {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == pieces { b } else { lo + h };
            total += rule.integrate(lo, hi, &f);
        }
    }
    total
}

/// Tail of one component at `x = 1 - e^{-v}` for the distribution-function oracle.
fn oracle_tail(c: &MeasureComponent, x: f64, v: f64) -> f64 {
    match c {
        MeasureComponent::PowerLog { c, gamma, beta } => {
            let head = c * (-gamma * v).exp();
            if *beta == 0.0 {
                head / gamma
            } else {
                let span = 45.0 / gamma;
                let rest = legendre_composite(
                    |w| (-gamma * w).exp() * (1.0 + v + w).powf(-beta),
                    &[0.0, span],
                    0.5 / gamma,
                );
                head * rest
            }
        }
        // the oracle integrates on open panels, so the atom side does not matter
        MeasureComponent::Point { w, t0 } => {
            if x <= *t0 {
                *w
            } else {
                0.0
            }
        }
        MeasureComponent::Table { x: xs, v: vs } => table_tail(xs, vs, x),
    }
}

/// `mu_0..mu_N` with the per-entry error estimates of the quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    values: Vec<f64>,
    errors: Vec<f64>,
    abs_tolerance: f64,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>, abs_tolerance: f64) -> Result<Self> {
        let errors = vec![0.0; values.len()];
        Self::with_errors(values, errors, abs_tolerance)
    }

    pub fn with_errors(values: Vec<f64>, errors: Vec<f64>, abs_tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("moment sequence must be nonempty"));
        }
        if values.len() != errors.len() {
            return Err(Error::invalid("moment values and errors differ in length"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("moments must be finite and nonnegative"));
        }
        Ok(MomentSequence {
            values,
            errors,
            abs_tolerance,
        })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn abs_tolerance(&self) -> f64 {
        self.abs_tolerance
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + self.abs_tolerance)
    }

    /// Checks `(-1)^k Delta^k mu_n >= -abs_tolerance` for `k <= max_order`.
    /// On failure returns `(k, n, value)` of the first violation.
    pub fn check_total_monotonicity(&self, max_order: usize) -> std::result::Result<(), (usize, usize, f64)> {
        let mut diff = self.values.clone();
        for k in 1..=max_order {
            // diff[n] <- diff[n] - diff[n+1], i.e. (-1)^k Delta^k
            let next: Vec<f64> = diff.windows(2).map(|w| w[0] - w[1]).collect();
            if let Some((n, v)) = next.iter().enumerate().find(|(_, v)| **v < -self.abs_tolerance) {
                return Err((k, n, *v));
            }
            diff = next;
        }
        Ok(())
    }

    /// CSV with columns `n, mu_n, tolerance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mu_n,tolerance\n");
        for (n, (v, e)) in self.values.iter().zip(&self.errors).enumerate() {
            let tol = e.max(self.abs_tolerance);
            out.push_str(&format!(
                "{n},{},{}\n",
                crate::report::fmt17(*v),
                crate::report::fmt17(tol)
            ));
        }
        out
    }
}
