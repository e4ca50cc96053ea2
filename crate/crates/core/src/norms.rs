//! Numerical Bloch, Besov and mean Lipschitz norms of truncated power series.
//!
//! Circle values come from one inverse FFT of the folded coefficients
//! `a_n r^n`, which is exact at the sample points. Sups are taken over nested
//! grids built on the radial ladder `r = 1 - 2^-x`, `x = k / 2^level`.

use std::cell::RefCell;
use std::f64::consts::LN_2;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::series::{EvalPoint, PowerSeries};

const MIN_ANGLES: usize = 64;
const MAX_ANGLES: usize = 1 << 22;
const ANGULAR_TOL: f64 = 1e-10;
/// `r^n < e^-40` past this many multiples of `1/(1-r)`.
const DECAY_SPAN: f64 = 40.0;
/// Radius cap `1 - 2^-40` of the Besov radial quadrature, as `u = -log(1-r)`.
const BESOV_U_CAP: f64 = 40.0 * LN_2;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Sampling parameters for the grid-sup estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormGrid {
    /// Radial ladder reaches `r = 1 - 2^-ladder_depth`.
    pub ladder_depth: u32,
    /// Number of nested refinements of the ladder and the angular grid.
    pub refinements: u32,
    /// Angular samples per effective coefficient for sup estimates.
    pub oversample: usize,
}

impl Default for NormGrid {
    fn default() -> Self {
        NormGrid {
            ladder_depth: 12,
            refinements: 2,
            oversample: 4,
        }
    }
}

impl NormGrid {
    fn validate(&self) -> Result<()> {
        if self.ladder_depth == 0 || self.ladder_depth > 40 {
            return Err(Error::invalid("ladder depth must lie in 1..=40"));
        }
        if self.refinements > 8 {
            return Err(Error::invalid("at most 8 grid refinements"));
        }
        if self.oversample == 0 {
            return Err(Error::invalid("oversample must be positive"));
        }
        Ok(())
    }

    /// Ladder exponents `x` at the finest level.
    fn exponents(&self) -> Vec<f64> {
        let per = 1usize << self.refinements;
        (0..=self.ladder_depth as usize * per)
            .map(|k| k as f64 / per as f64)
            .collect()
    }

    /// Coarsest refinement level that contains finest-grid node `k`.
    fn level_of(&self, k: usize) -> u32 {
        let mut level = self.refinements;
        let mut k = k;
        while level > 0 && k % 2 == 0 {
            k /= 2;
            level -= 1;
        }
        level
    }
}

/// How an estimate was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub ladder_depth: u32,
    pub refinements: u32,
    pub radial_nodes: usize,
    pub max_angles: usize,
    /// Quadrature error estimate, for integral-type norms.
    pub quadrature_error: Option<f64>,
}

/// A norm estimate with the values at successive refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub grid: GridSpec,
    pub history: Vec<f64>,
}

/// Values of `sum c_n r^n e^{i n theta_k}` at `theta_k = 2 pi k / m`.
pub fn circle_values(coeffs: &[Complex64], r: f64, m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let ln_r = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
    for (n, c) in coeffs.iter().enumerate() {
        let w = if n == 0 {
            1.0
        } else if r == 0.0 {
            break;
        } else {
            (n as f64 * ln_r).exp()
        };
        if w == 0.0 {
            break;
        }
        buf[n % m] += c * w;
    }
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_inverse(m);
        fft.process(&mut buf);
    });
    buf
}

fn effective_terms(len: usize, r: f64) -> usize {
    if r < 1.0 {
        let cut = (DECAY_SPAN / (1.0 - r)).ceil();
        if cut < len as f64 {
            return cut as usize + 1;
        }
    }
    len
}

fn base_angles(len: usize, r: f64, oversample: usize) -> usize {
    (oversample * effective_terms(len, r))
        .max(MIN_ANGLES)
        .next_power_of_two()
}

fn power_mean(values: &[Complex64], p: f64) -> f64 {
    let m = values.len() as f64;
    let sum: f64 = if p == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum()
    } else {
        values.iter().map(|v| v.norm().powf(p)).sum()
    };
    (sum / m).powf(1.0 / p)
}

/// `M_p(r, g)` for the series with coefficients `coeffs`, doubling the
/// angular count until the relative change drops below `1e-10`.
fn integral_mean_coeffs(coeffs: &[Complex64], r: f64, p: f64) -> (f64, usize) {
    let mut m = base_angles(coeffs.len(), r, 2);
    let mut value = power_mean(&circle_values(coeffs, r, m), p);
    while m < MAX_ANGLES {
        let next = power_mean(&circle_values(coeffs, r, 2 * m), p);
        m *= 2;
        let change = (next - value).abs();
        value = next;
        if change <= ANGULAR_TOL * value.abs() || value == 0.0 {
            break;
        }
    }
    (value, m)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && (0.0..1.0).contains(&r)) {
        return Err(Error::invalid(format!("radius must lie in [0,1), got {r}")));
    }
    Ok(())
}

/// `M_p(r, f')` (or `M_p(r, f)` when `use_derivative` is false).
pub fn integral_mean(f: &PowerSeries, r: f64, p: f64, use_derivative: bool) -> Result<f64> {
    check_radius(r)?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::invalid(format!("integral mean exponent must be >= 1, got {p}")));
    }
    let g = if use_derivative { f.derivative() } else { f.clone() };
    Ok(integral_mean_coeffs(g.coeffs(), r, p).0)
}

pub fn bloch_norm(f: &PowerSeries) -> NormEstimate {
    bloch_norm_with(f, &NormGrid::default()).expect("default grid is valid")
}

/// `|f(0)| + sup (1-|z|^2) |f'(z)|` over the nested grids.
pub fn bloch_norm_with(f: &PowerSeries, grid: &NormGrid) -> Result<NormEstimate> {
    grid.validate()?;
    let df = f.derivative();
    let levels = grid.refinements as usize + 1;
    let mut sups = vec![0.0f64; levels];
    let mut max_angles = 0;
    let exps = grid.exponents();
    for (k, x) in exps.iter().enumerate() {
        let one_minus_r = (-x).exp2();
        let r = 1.0 - one_minus_r;
        let weight = one_minus_r * (1.0 + r);
        let finest = base_angles(df.coeffs().len(), r, grid.oversample) << grid.refinements;
        max_angles = max_angles.max(finest);
        let vals = circle_values(df.coeffs(), r, finest);
        for level in grid.level_of(k)..=grid.refinements {
            let stride = 1usize << (grid.refinements - level);
            let peak = vals.iter().step_by(stride).map(|v| v.norm()).fold(0.0, f64::max);
            let s = &mut sups[level as usize];
            *s = s.max(weight * peak);
        }
    }
    let f0 = f.value_at_zero().norm();
    let history = running_max(sups.iter().map(|s| f0 + s));
    Ok(NormEstimate {
        value: *history.last().expect("at least one level"),
        grid: GridSpec {
            ladder_depth: grid.ladder_depth,
            refinements: grid.refinements,
            radial_nodes: exps.len(),
            max_angles,
            quadrature_error: None,
        },
        history,
    })
}

fn running_max(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    values
        .map(|v| {
            best = best.max(v);
            best
        })
        .collect()
}

pub fn mean_lipschitz_norm(f: &PowerSeries, p: f64, alpha: f64) -> Result<NormEstimate> {
    mean_lipschitz_norm_with(f, p, alpha, &NormGrid::default())
}

/// `|f(0)| + sup_r (1-r)^(1-alpha) M_p(r, f')` over the radial ladder.
pub fn mean_lipschitz_norm_with(f: &PowerSeries, p: f64, alpha: f64, grid: &NormGrid) -> Result<NormEstimate> {
    let profile = lipschitz_profile(f, p, alpha, grid)?;
    let levels = grid.refinements as usize + 1;
    let mut sups = vec![0.0f64; levels];
    for (k, point) in profile.points.iter().enumerate() {
        for level in grid.level_of(k)..=grid.refinements {
            let s = &mut sups[level as usize];
            *s = s.max(point.weighted_mean);
        }
    }
    let f0 = f.value_at_zero().norm();
    let history = running_max(sups.iter().map(|s| f0 + s));
    Ok(NormEstimate {
        value: *history.last().expect("at least one level"),
        grid: GridSpec {
            ladder_depth: grid.ladder_depth,
            refinements: grid.refinements,
            radial_nodes: profile.points.len(),
            max_angles: profile.max_angles,
            quadrature_error: None,
        },
        history,
    })
}

/// One point of a `(r, (1-r)^(1-alpha) M_p(r, f'))` profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub r: f64,
    pub weighted_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProfile {
    pub p: f64,
    pub alpha: f64,
    pub points: Vec<ProfilePoint>,
    pub max_angles: usize,
}

impl LipschitzProfile {
    /// CSV with columns `r, weighted_mean`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,weighted_mean\n");
        for pt in &self.points {
            out.push_str(&format!(
                "{},{}\n",
                crate::report::fmt17(pt.r),
                crate::report::fmt17(pt.weighted_mean)
            ));
        }
        out
    }
}

/// `(1-r)^(1-alpha) M_p(r, f')` on the finest ladder of `grid`.
pub fn lipschitz_profile(f: &PowerSeries, p: f64, alpha: f64, grid: &NormGrid) -> Result<LipschitzProfile> {
    grid.validate()?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::invalid(format!(
            "mean Lipschitz exponent p must be >= 1, got {p}"
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!(
            "mean Lipschitz alpha must lie in (0,1], got {alpha}"
        )));
    }
    let df = f.derivative();
    let mut max_angles = 0;
    let points = grid
        .exponents()
        .into_iter()
        .map(|x| {
            let one_minus_r = (-x).exp2();
            let r = 1.0 - one_minus_r;
            let (mean, m) = integral_mean_coeffs(df.coeffs(), r, p);
            max_angles = max_angles.max(m);
            ProfilePoint {
                r,
                weighted_mean: one_minus_r.powf(1.0 - alpha) * mean,
            }
        })
        .collect();
    Ok(LipschitzProfile {
        p,
        alpha,
        points,
        max_angles,
    })
}

pub fn besov_norm(f: &PowerSeries, p: f64) -> Result<NormEstimate> {
    besov_norm_with(f, p, Tolerance::new(1e-300, 1e-10))
}

/// `|f(0)| + (int_D |f'|^p (1-|z|^2)^(p-2) dA)^(1/p)` with normalised area.
///
/// Radial integration runs in `u = -log(1-r)` up to `r = 1 - 2^-40`; the rest
/// is added in closed form using the flat limit of `M_p(r, f')` for a polynomial.
pub fn besov_norm_with(f: &PowerSeries, p: f64, tol: Tolerance) -> Result<NormEstimate> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::invalid(format!("Besov exponent must exceed 1, got {p}")));
    }
    let df = f.derivative();
    let coeffs = df.coeffs();
    let mut max_angles = 0;
    let mut integrand = |u: f64| {
        let one_minus_r = (-u).exp();
        let r = -(-u).exp_m1();
        let (mean, m) = integral_mean_coeffs(coeffs, r, p);
        max_angles = max_angles.max(m);
        2.0 * r * (1.0 + r).powf(p - 2.0) * one_minus_r.powf(p - 1.0) * mean.powf(p)
    };
    let breaks = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, BESOV_U_CAP];
    let est = quad::integrate_with_breaks(&mut integrand, &breaks, tol)?;
    let r_cap = -(-BESOV_U_CAP).exp_m1();
    let (edge_mean, _) = integral_mean_coeffs(coeffs, r_cap, p);
    let remainder = 2f64.powf(p - 1.0) * edge_mean.powf(p) * (-(p - 1.0) * BESOV_U_CAP).exp() / (p - 1.0);
    let integral = (est.value + remainder).max(0.0);
    let value = f.value_at_zero().norm() + integral.powf(1.0 / p);
    Ok(NormEstimate {
        value,
        grid: GridSpec {
            ladder_depth: 40,
            refinements: 0,
            radial_nodes: est.evaluations,
            max_angles,
            quadrature_error: Some(est.error),
        },
        history: vec![value],
    })
}

/// `sup |f(z)| / (||f||_{B_p} (log 2/(1-|z|^2))^(1/q))` over `ladder`.
pub fn growth_ratio(f: &PowerSeries, p: f64, ladder: &[EvalPoint]) -> Result<f64> {
    let besov = besov_norm(f, p)?.value;
    growth_ratio_with_norm(f, p, besov, ladder)
}

pub(crate) fn growth_ratio_with_norm(f: &PowerSeries, p: f64, besov: f64, ladder: &[EvalPoint]) -> Result<f64> {
    if ladder.is_empty() {
        return Err(Error::invalid("growth ratio needs at least one point"));
    }
    if besov == 0.0 {
        return Ok(0.0);
    }
    let q = p / (p - 1.0);
    Ok(ladder
        .iter()
        .map(|z| {
            let rho2 = z.z().norm_sqr();
            let growth = (2.0 / (1.0 - rho2)).ln().powf(1.0 / q);
            f.eval(*z).norm() / (besov * growth)
        })
        .fold(0.0, f64::max))
}

/// `r_j e^{i theta}` for `r_j = 1 - 2^-j`, `j = 0..=depth`, at `angles` equally spaced directions.
pub fn disk_ladder(depth: u32, angles: usize) -> Vec<EvalPoint> {
    let mut pts = Vec::new();
    for j in 0..=depth {
        let r = 1.0 - (-(j as f64)).exp2();
        for a in 0..angles.max(1) {
            let theta = 2.0 * std::f64::consts::PI * a as f64 / angles.max(1) as f64;
            if let Ok(z) = EvalPoint::polar(r, theta) {
                pts.push(z);
            }
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn circle_values_match_horner() {
        let f = PowerSeries::new(vec![c(1.0), Complex64::new(0.5, -0.25), c(2.0), c(-1.0)]).unwrap();
        let vals = circle_values(f.coeffs(), 0.7, 8);
        for (k, v) in vals.iter().enumerate() {
            let z = Complex64::from_polar(0.7, 2.0 * std::f64::consts::PI * k as f64 / 8.0);
            assert!((v - f.eval_unchecked(z)).norm() < 1e-14);
        }
        // aliasing folds high terms correctly
        let vals = circle_values(f.coeffs(), 0.7, 2);
        assert!((vals[1] - f.eval_unchecked(c(-0.7))).norm() < 1e-14);
    }

    #[test]
    fn integral_mean_of_identity() {
        let z = PowerSeries::monomial(1);
        for r in [0.0, 0.3, 0.99] {
            assert_abs_diff_eq!(integral_mean(&z, r, 2.0, true).unwrap(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(integral_mean(&z, r, 1.0, true).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert!(integral_mean(&z, 1.0, 2.0, true).is_err());
        assert!(integral_mean(&z, 0.5, 0.5, true).is_err());
    }

    #[test]
    fn simple_norms() {
        let z = PowerSeries::monomial(1);
        assert_abs_diff_eq!(bloch_norm(&z).value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(besov_norm(&z, 2.0).unwrap().value, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mean_lipschitz_norm(&z, 2.0, 0.5).unwrap().value, 1.0, epsilon = 1e-12);
        let k = PowerSeries::constant(Complex64::new(0.6, 0.8));
        assert_abs_diff_eq!(bloch_norm(&k).value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(besov_norm(&k, 1.5).unwrap().value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean_lipschitz_norm(&k, 3.0, 0.25).unwrap().value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn besov_p2_is_dirichlet_sum() {
        // ||f||_{B_2} - |f(0)| = (sum n |a_n|^2)^{1/2}
        let f = PowerSeries::from_real(&[0.0, 1.0, -0.5, 0.25, 0.0, 2.0]).unwrap();
        let expect: f64 = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum();
        assert_abs_diff_eq!(besov_norm(&f, 2.0).unwrap().value, expect.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn besov_of_monomial_general_p() {
        // f = z: int_D (1-|z|^2)^{p-2} dA = 1/(p-1)
        let z = PowerSeries::monomial(1);
        for p in [1.5f64, 3.0] {
            let expect = (1.0 / (p - 1.0)).powf(1.0 / p);
            assert_abs_diff_eq!(besov_norm(&z, p).unwrap().value, expect, epsilon = 1e-8);
        }
        assert!(besov_norm(&z, 1.0).is_err());
    }

    #[test]
    fn refinement_history_is_nondecreasing() {
        let f =
            PowerSeries::log_one_over_one_minus_z(300).add(&PowerSeries::monomial(7).scale(Complex64::new(0.0, 3.0)));
        let grid = NormGrid {
            ladder_depth: 10,
            refinements: 3,
            oversample: 2,
        };
        for est in [
            bloch_norm_with(&f, &grid).unwrap(),
            mean_lipschitz_norm_with(&f, 1.5, 0.5, &grid).unwrap(),
        ] {
            assert_eq!(est.history.len(), 4);
            assert!(est.history.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn growth_ratio_of_constant() {
        let k = PowerSeries::constant(c(2.0));
        let ratio = growth_ratio(&k, 2.0, &disk_ladder(8, 4)).unwrap();
        assert_abs_diff_eq!(ratio, 1.0 / 2f64.ln().sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn level_bookkeeping() {
        let grid = NormGrid {
            ladder_depth: 2,
            refinements: 2,
            oversample: 1,
        };
        assert_eq!(grid.exponents().len(), 9);
        let levels: Vec<u32> = (0..9).map(|k| grid.level_of(k)).collect();
        assert_eq!(levels, vec![0, 2, 1, 2, 0, 2, 1, 2, 0]);
    }
}
