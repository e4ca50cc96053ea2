//! Numerical classification of radial measures against logarithmic Carleson
//! conditions.
//!
//! Three characterisations are evaluated on dyadic ladders and labelled with
//! [`crate::fit::label_ladder`]:
//!
//! * the tail quotient `Q(t) = nu([t,1)) (log e/(1-t))^alpha / (1-t)^s`,
//! * the normalised moments `mu_n (n+1)^s (log(n+1))^alpha`,
//! * the integrals
//!   `(1-|a|)^t (log e/(1-|a|))^alpha int (1-x)^-r k_a(x)^-(s+t-r) dnu(x)`
//!   with `k_a(x) = 1-|a|x` (ii), `|1-ax|` (iii) or the complex `1-ax` (iv,
//!   modulus taken after integration).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, LN_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{self, Label, LogPowerFit, TrendFit};
use crate::measure::{MomentSequence, RadialMeasure};
use crate::quad::Tolerance;
use crate::report::serialize_extended;

/// Deepest point of the default ladders, `t = 1 - 2^-14`.
pub const DEFAULT_LADDER_DEPTH: u32 = 14;
/// Moment classification needs `n_max >= 2^10`.
pub const MIN_MOMENT_ORDER: usize = 1 << 10;
/// Default number of moments used by [`classify`].
pub const DEFAULT_MOMENT_ORDER: usize = 1 << 14;

const INTEGRAL_TOLERANCE: Tolerance = Tolerance::new(1e-300, 1e-10);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonParams {
    pub s: f64,
    pub alpha: f64,
    #[serde(default = "one")]
    pub t_exp: f64,
    #[serde(default)]
    pub r_exp: f64,
}

fn one() -> f64 {
    1.0
}

impl CarlesonParams {
    /// `(s, alpha)` with the integral exponents `t = 1`, `r = 0`.
    pub fn new(s: f64, alpha: f64) -> Result<Self> {
        Self::with_exponents(s, alpha, 1.0, 0.0)
    }

    pub fn with_exponents(s: f64, alpha: f64, t_exp: f64, r_exp: f64) -> Result<Self> {
        let p = CarlesonParams { s, alpha, t_exp, r_exp };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::invalid(format!("s must be positive, got {}", self.s)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        if !(self.t_exp.is_finite() && self.t_exp > 0.0) {
            return Err(Error::invalid(format!("t_exp must be positive, got {}", self.t_exp)));
        }
        if !(self.r_exp.is_finite() && self.r_exp >= 0.0 && self.r_exp < self.s) {
            return Err(Error::invalid(format!("r_exp must lie in [0, s), got {}", self.r_exp)));
        }
        Ok(())
    }

    /// The probes `(t, r)` in `{(1, 0), (1, s/2), (2, s/2)}`.
    pub fn default_probes(&self) -> Vec<CarlesonParams> {
        [(1.0, 0.0), (1.0, 0.5 * self.s), (2.0, 0.5 * self.s)]
            .into_iter()
            .map(|(t_exp, r_exp)| CarlesonParams { t_exp, r_exp, ..*self })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Ii,
    Iii,
    Iv,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Ii, Variant::Iii, Variant::Iv];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Ii => "ii",
            Variant::Iii => "iii",
            Variant::Iv => "iv",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ii" => Ok(Variant::Ii),
            "iii" => Ok(Variant::Iii),
            "iv" => Ok(Variant::Iv),
            other => Err(Error::invalid(format!(
                "unknown variant {other:?}, expected ii, iii or iv"
            ))),
        }
    }
}

/// `log(e/(1-t))` from `1-t`.
fn log_weight(one_minus_t: f64) -> f64 {
    1.0 - one_minus_t.ln()
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && (0.0..1.0).contains(&t)) {
        return Err(Error::invalid(format!("t must lie in [0,1), got {t}")));
    }
    Ok(())
}

/// `nu([t,1)) (log e/(1-t))^alpha / (1-t)^s`.
pub fn carleson_quotient(m: &RadialMeasure, t: f64, params: &CarlesonParams) -> Result<f64> {
    params.validate()?;
    check_t(t)?;
    let omt = 1.0 - t;
    let tail = m.tail(t)?;
    if tail == 0.0 {
        return Ok(0.0);
    }
    Ok(tail * log_weight(omt).powf(params.alpha) * (-params.s * omt.ln()).exp())
}

/// One value of a dyadic ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    /// Ladder index `j`.
    pub j: u32,
    /// Abscissa: `t_j`, `|a_j|` or `n`.
    pub x: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
}

/// Ladder, fit and label for one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: String,
    pub label: Label,
    pub fit: Option<TrendFit>,
    pub ladder: Vec<LadderPoint>,
}

fn dyadic_ladder(depth: u32) -> Vec<(u32, f64)> {
    (1..=depth).map(|j| (j, 1.0 - (-(j as f64)).exp2())).collect()
}

fn label_points(criterion: String, points: Vec<LadderPoint>, scale: impl Fn(&LadderPoint) -> f64) -> CriterionResult {
    let index: Vec<f64> = points.iter().map(|p| p.j as f64).collect();
    let scales: Vec<f64> = points.iter().map(&scale).collect();
    let values: Vec<f64> = points.iter().map(|p| p.value).collect();
    let (label, fit) = fit::label_ladder(&index, &scales, &values);
    CriterionResult {
        criterion,
        label,
        fit,
        ladder: points,
    }
}

fn dyadic_scale(p: &LadderPoint) -> f64 {
    1.0 + p.j as f64 * LN_2
}

/// Tail quotient on `t_j = 1 - 2^-j`, `j = 1..=depth`.
pub fn classify_tail(m: &RadialMeasure, params: &CarlesonParams, depth: u32) -> Result<CriterionResult> {
    params.validate()?;
    let points = dyadic_ladder(depth)
        .into_iter()
        .map(|(j, t)| {
            Ok(LadderPoint {
                j,
                x: t,
                value: carleson_quotient(m, t, params)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(label_points("tail".into(), points, dyadic_scale))
}

/// Moment criterion with the log-power fit of the raw moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCriterion {
    #[serde(flatten)]
    pub result: CriterionResult,
    pub moment_fit: Option<LogPowerFit>,
}

/// `mu_n (n+1)^s (log(n+1))^alpha` on `n = 2^k`, `k = 1..=log2(n_max)`.
pub fn classify_moments(mu: &MomentSequence, params: &CarlesonParams) -> Result<MomentCriterion> {
    params.validate()?;
    if mu.n_max() < MIN_MOMENT_ORDER {
        return Err(Error::invalid(format!(
            "moment classification needs n_max >= {MIN_MOMENT_ORDER}, got {}",
            mu.n_max()
        )));
    }
    let values = mu.values();
    let kmax = mu.n_max().ilog2();
    let points: Vec<LadderPoint> = (1..=kmax)
        .map(|k| {
            let n = 1usize << k;
            let n1 = n as f64 + 1.0;
            let mu_n = values[n];
            let value = if mu_n == 0.0 {
                0.0
            } else {
                (mu_n.ln() + params.s * n1.ln()).exp() * n1.ln().powf(params.alpha)
            };
            LadderPoint {
                j: k,
                x: n as f64,
                value,
            }
        })
        .collect();
    let fit_range: Vec<&LadderPoint> = points.iter().filter(|p| p.x >= 64.0).collect();
    let xs: Vec<f64> = fit_range.iter().map(|p| p.x + 1.0).collect();
    let ys: Vec<f64> = fit_range.iter().map(|p| values[p.x as usize]).collect();
    let moment_fit = fit::log_power_fit(&xs, &ys);
    let result = label_points("moments".into(), points, |p| (p.x + 1.0).ln());
    Ok(MomentCriterion { result, moment_fit })
}

/// One of the integral quantities at a point `a` of the disc.
///
/// Returns `+inf` when `int (1-x)^-r dnu` diverges.
pub fn carleson_integral(m: &RadialMeasure, a: Complex64, params: &CarlesonParams, variant: Variant) -> Result<f64> {
    let rho = a.norm();
    integral_at(m, a, 1.0 - rho, params, variant)
}

// `one_minus_rho` is passed separately so that dyadic ladders keep `1-|a|` exact.
fn integral_at(
    m: &RadialMeasure,
    a: Complex64,
    one_minus_rho: f64,
    params: &CarlesonParams,
    variant: Variant,
) -> Result<f64> {
    params.validate()?;
    let rho = 1.0 - one_minus_rho;
    if !(a.re.is_finite() && a.im.is_finite()) || !(one_minus_rho > 0.0 && one_minus_rho <= 1.0) {
        return Err(Error::invalid(format!("a must lie in the open unit disc, got {a}")));
    }
    let k = params.s + params.t_exp - params.r_exp;
    let prefactor = one_minus_rho.powf(params.t_exp) * log_weight(one_minus_rho).powf(params.alpha);
    // 1 - rho x = (1 - rho) + rho (1 - x), free of cancellation near x = 1
    let radial = move |omx: f64| one_minus_rho + rho * omx;
    let real_axis = a.im == 0.0 && a.re >= 0.0;
    let est = match variant {
        Variant::Ii => m.integrate(params.r_exp, INTEGRAL_TOLERANCE, |_, omx| radial(omx).powf(-k)),
        Variant::Iii => m.integrate(params.r_exp, INTEGRAL_TOLERANCE, |_, omx| {
            let d = if real_axis {
                radial(omx)
            } else {
                ((1.0 - a) + a * omx).norm()
            };
            d.powf(-k)
        }),
        Variant::Iv => {
            let est = m.integrate(params.r_exp, INTEGRAL_TOLERANCE, |_, omx| {
                let d = if real_axis {
                    Complex64::new(radial(omx), 0.0)
                } else {
                    (1.0 - a) + a * omx
                };
                d.powf(-k)
            });
            est.map(|e| crate::quad::Estimate {
                value: e.value.norm(),
                error: e.error,
                evaluations: e.evaluations,
            })
        }
    };
    match est {
        Ok(e) => Ok(prefactor * e.value),
        Err(Error::Divergent(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Ray directions used for variants iii and iv.
pub const RAYS: [f64; 3] = [0.0, FRAC_PI_6, -FRAC_PI_2];

/// Integral values at `|a| = 1 - 2^-j` maximised over [`RAYS`]
/// (only the real ray for variant ii, which depends on `|a|` alone).
pub fn integral_profile(
    m: &RadialMeasure,
    params: &CarlesonParams,
    variant: Variant,
    depth: u32,
) -> Result<CriterionResult> {
    params.validate()?;
    let rays: &[f64] = if variant == Variant::Ii { &RAYS[..1] } else { &RAYS };
    let points = dyadic_ladder(depth)
        .into_iter()
        .map(|(j, rho)| {
            let omr = (-(j as f64)).exp2();
            let mut best = 0.0f64;
            for &phi in rays {
                let a = if phi == 0.0 {
                    Complex64::new(rho, 0.0)
                } else {
                    Complex64::from_polar(rho, phi)
                };
                let v = integral_at(m, a, omr, params, variant)?;
                best = if v.is_nan() { v } else { best.max(v) };
            }
            Ok(LadderPoint { j, x: rho, value: best })
        })
        .collect::<Result<Vec<_>>>()?;
    let name = format!("integral:{}:t={},r={}", variant.as_str(), params.t_exp, params.r_exp);
    Ok(label_points(name, points, dyadic_scale))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub ladder_depth: u32,
    pub n_max: usize,
    /// Integral probes; `None` uses [`CarlesonParams::default_probes`].
    pub probes: Option<Vec<(f64, f64)>>,
    pub variants: Vec<Variant>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            ladder_depth: DEFAULT_LADDER_DEPTH,
            n_max: DEFAULT_MOMENT_ORDER,
            probes: None,
            variants: Variant::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonVerdict {
    pub params: CarlesonParams,
    /// Largest tail quotient on the ladder.
    #[serde(serialize_with = "serialize_extended")]
    pub sup_estimate: f64,
    /// Tail quotient at the deepest ladder point.
    #[serde(serialize_with = "serialize_extended")]
    pub limit_estimate: f64,
    /// Exponents of `mu_n ~ C n^b (log n)^c` over `n >= 64`.
    #[serde(serialize_with = "serialize_extended")]
    pub fitted_exponent: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub fitted_log_exponent: f64,
    pub per_criterion: BTreeMap<String, Label>,
    pub agreement: bool,
    pub label: Label,
    pub tail: CriterionResult,
    pub moments: MomentCriterion,
    pub integrals: Vec<CriterionResult>,
}

/// Whether all conclusive labels coincide.
pub fn labels_agree<'a>(labels: impl IntoIterator<Item = &'a Label>) -> bool {
    let mut seen: Option<Label> = None;
    for l in labels.into_iter().filter(|l| l.is_conclusive()) {
        match seen {
            None => seen = Some(*l),
            Some(s) if s != *l => return false,
            _ => {}
        }
    }
    true
}

/// Common label of the conclusive criteria, or inconclusive.
fn combined_label(labels: &BTreeMap<String, Label>) -> Label {
    let mut conclusive = labels.values().filter(|l| l.is_conclusive());
    match conclusive.next() {
        Some(first) if conclusive.all(|l| l == first) => *first,
        _ => Label::Inconclusive,
    }
}

/// Runs every criterion for `params` on `m`.
pub fn classify(m: &RadialMeasure, params: &CarlesonParams, config: &ClassifyConfig) -> Result<CarlesonVerdict> {
    params.validate()?;
    let tail = classify_tail(m, params, config.ladder_depth)?;
    let mu = m.moments(config.n_max)?;
    let moments = classify_moments(&mu, params)?;
    let probes: Vec<CarlesonParams> = match &config.probes {
        None => params.default_probes(),
        Some(list) => list
            .iter()
            .map(|&(t, r)| CarlesonParams::with_exponents(params.s, params.alpha, t, r))
            .collect::<Result<_>>()?,
    };
    let mut integrals = Vec::new();
    for probe in &probes {
        for &variant in &config.variants {
            integrals.push(integral_profile(m, probe, variant, config.ladder_depth)?);
        }
    }
    let mut per_criterion = BTreeMap::new();
    per_criterion.insert(tail.criterion.clone(), tail.label);
    per_criterion.insert(moments.result.criterion.clone(), moments.result.label);
    for c in &integrals {
        per_criterion.insert(c.criterion.clone(), c.label);
    }
    let sup_estimate = tail.ladder.iter().map(|p| p.value).fold(0.0, f64::max);
    let limit_estimate = tail.ladder.last().map_or(f64::NAN, |p| p.value);
    let (fitted_exponent, fitted_log_exponent) = moments
        .moment_fit
        .map_or((f64::NAN, f64::NAN), |f| (f.exponent, f.log_exponent));
    Ok(CarlesonVerdict {
        params: *params,
        sup_estimate,
        limit_estimate,
        fitted_exponent,
        fitted_log_exponent,
        agreement: labels_agree(per_criterion.values()),
        label: combined_label(&per_criterion),
        per_criterion,
        tail,
        moments,
        integrals,
    })
}

impl CarlesonVerdict {
    /// CSV with columns `criterion, j, x, value` for every ladder.
    pub fn ladders_csv(&self) -> String {
        let mut out = String::from("criterion,j,x,value\n");
        let all = std::iter::once(&self.tail)
            .chain(std::iter::once(&self.moments.result))
            .chain(&self.integrals);
        for c in all {
            for p in &c.ladder {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    c.criterion,
                    p.j,
                    crate::report::fmt17(p.x),
                    crate::report::fmt17(p.value)
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(s: f64, alpha: f64) -> CarlesonParams {
        CarlesonParams::new(s, alpha).unwrap()
    }

    #[test]
    fn quotient_examples() {
        let leb = RadialMeasure::lebesgue();
        for t in [0.0, 0.3, 0.999] {
            assert_abs_diff_eq!(
                carleson_quotient(&leb, t, &params(1.0, 0.0)).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        for j in [1, 5, 12] {
            let t = 1.0 - (-(j as f64)).exp2();
            let expect = (1.0 + j as f64 * LN_2).sqrt();
            assert_abs_diff_eq!(
                carleson_quotient(&leb, t, &params(1.0, 0.5)).unwrap(),
                expect,
                epsilon = 1e-12
            );
        }
        let atom = RadialMeasure::point(1.0, 0.75);
        assert_abs_diff_eq!(
            carleson_quotient(&atom, 0.75, &params(1.0, 0.0)).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_eq!(carleson_quotient(&atom, 0.8, &params(1.0, 0.0)).unwrap(), 0.0);
        assert!(carleson_quotient(&atom, 1.0, &params(1.0, 0.0)).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(CarlesonParams::new(0.0, 0.0).is_err());
        assert!(CarlesonParams::new(1.0, -0.1).is_err());
        assert!(CarlesonParams::with_exponents(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(CarlesonParams::with_exponents(1.0, 0.0, 1.0, 1.0).is_err());
        assert_eq!(params(2.0, 0.0).default_probes()[2].r_exp, 1.0);
    }

    #[test]
    fn tail_labels() {
        let leb = RadialMeasure::lebesgue();
        let c = classify_tail(&leb, &params(1.0, 0.0), 14).unwrap();
        assert_eq!(c.label, Label::FiniteLooking);
        assert_eq!(
            classify_tail(&leb, &params(1.0, 0.5), 14).unwrap().label,
            Label::Diverging
        );
        let atom = RadialMeasure::point(1.0, 0.9);
        for (s, a) in [(1.0, 0.0), (2.0, 1.0), (0.5, 3.0)] {
            assert_eq!(classify_tail(&atom, &params(s, a), 14).unwrap().label, Label::Vanishing);
        }
    }

    #[test]
    fn moment_labels() {
        let leb = RadialMeasure::lebesgue().moments(1 << 12).unwrap();
        let c = classify_moments(&leb, &params(1.0, 0.0)).unwrap();
        assert_eq!(c.result.label, Label::FiniteLooking);
        assert_abs_diff_eq!(c.moment_fit.unwrap().exponent, -1.0, epsilon = 1e-9);
        let atom = RadialMeasure::point(1.0, 0.9).moments(1 << 12).unwrap();
        assert_eq!(
            classify_moments(&atom, &params(1.0, 0.0)).unwrap().result.label,
            Label::Vanishing
        );
        let short = RadialMeasure::lebesgue().moments(100).unwrap();
        assert!(classify_moments(&short, &params(1.0, 0.0)).is_err());
    }

    #[test]
    fn integral_examples() {
        let origin = RadialMeasure::point(1.0, 0.0);
        for p in [
            CarlesonParams::with_exponents(1.0, 0.0, 1.0, 0.0).unwrap(),
            CarlesonParams::with_exponents(2.0, 0.7, 0.5, 1.5).unwrap(),
        ] {
            for v in Variant::ALL {
                assert_abs_diff_eq!(
                    carleson_integral(&origin, Complex64::new(0.0, 0.0), &p, v).unwrap(),
                    1.0,
                    epsilon = 1e-15
                );
            }
        }
        // Lebesgue, variant ii with t = 1, r = 0, s = 1: exactly 1 for every rho
        let leb = RadialMeasure::lebesgue();
        for rho in [0.5, 0.99, 1.0 - 2f64.powi(-14)] {
            let v = carleson_integral(&leb, Complex64::new(rho, 0.0), &params(1.0, 0.0), Variant::Ii).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn variants_ii_and_iii_coincide_on_the_real_axis() {
        let m = RadialMeasure::lebesgue().plus(&RadialMeasure::point(0.3, 0.6));
        let p = CarlesonParams::with_exponents(1.0, 0.5, 2.0, 0.5).unwrap();
        for rho in [0.0, 0.4, 0.97] {
            let a = Complex64::new(rho, 0.0);
            let ii = carleson_integral(&m, a, &p, Variant::Ii).unwrap();
            assert_eq!(ii, carleson_integral(&m, a, &p, Variant::Iii).unwrap());
        }
    }

    #[test]
    fn divergent_integral_is_infinite() {
        // (1-t)^{-1/2} dt against (1-x)^{-1/2}
        let m = RadialMeasure::power_log(1.0, 0.5, 0.0);
        let p = CarlesonParams::with_exponents(1.0, 0.0, 1.0, 0.5).unwrap();
        let v = carleson_integral(&m, Complex64::new(0.5, 0.0), &p, Variant::Ii).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn profiles() {
        let atom = RadialMeasure::point(1.0, 0.9);
        for v in Variant::ALL {
            assert_eq!(
                integral_profile(&atom, &params(1.0, 0.0), v, 14).unwrap().label,
                Label::Vanishing
            );
        }
        let leb = RadialMeasure::lebesgue();
        assert_eq!(
            integral_profile(&leb, &params(1.0, 0.5), Variant::Ii, 14)
                .unwrap()
                .label,
            Label::Diverging
        );
        let logw = RadialMeasure::power_log(1.0, 1.0, 1.0);
        assert_eq!(
            integral_profile(&logw, &params(1.0, 1.0), Variant::Ii, 14)
                .unwrap()
                .label,
            Label::FiniteLooking
        );
    }

    #[test]
    fn agreement_ignores_inconclusive() {
        use Label::*;
        assert!(labels_agree(&[Vanishing, Inconclusive, Vanishing]));
        assert!(!labels_agree(&[Vanishing, FiniteLooking]));
        assert!(labels_agree(&[]));
    }

    #[test]
    fn full_verdict() {
        let v = classify(
            &RadialMeasure::lebesgue(),
            &params(1.0, 0.0),
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert!(v.agreement, "{:?}", v.per_criterion);
        assert_eq!(v.label, Label::FiniteLooking);
        assert_eq!(v.per_criterion.len(), 11);
        assert_abs_diff_eq!(v.sup_estimate, 1.0, epsilon = 1e-12);
        assert!(v.ladders_csv().lines().count() > 100);
    }
}
