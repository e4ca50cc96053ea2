//! Experiments tying the operator, the norms and the classifier together.
//!
//! The boundedness and compactness experiments run the test family
//! `f_t = (log e/(1-t))^(-1/p) log 1/(1-tz)` along `t_j = 1 - 2^-j` and track
//!
//! * `R(t) = ||C_mu f_t||_{Lambda^s_{1/s}} / ||f_t||_{B_p}`,
//! * the Bloch analogue `||C_mu f_t||_B / ||f_t||_{B_p}`,
//! * `L_N = mu_N N (log(N+1))^(1/q)` on dyadic `N`,
//!
//! and compare their trends with the classifier at `(s, alpha) = (1, 1/q)`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::carleson::{self, CarlesonParams, CarlesonVerdict, ClassifyConfig};
use crate::error::{Error, Result};
use crate::fit::{self, Label, TrendFit};
use crate::measure::{MomentSequence, RadialMeasure};
use crate::norms::{self, NormGrid};
use crate::report::serialize_extended;
use crate::series::{self, PowerSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// The t-ladder is `t_j = 1 - 2^-j`, `j = 1..=ladder_depth`.
    pub ladder_depth: u32,
    /// Truncation degree at `t_j` is `min(max_degree, nextpow2(degree_factor 2^j))`.
    pub degree_factor: usize,
    pub max_degree: usize,
    /// `L_N` is reported for `N = 2^k`, `k = 2..=lower_bound_order`.
    pub lower_bound_order: u32,
    /// Norm grid refinements and oversampling; the radial depth at `t_j` is `max(12, j + 4)`.
    pub norm_refinements: u32,
    pub oversample: usize,
    pub classifier: ClassifyConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            ladder_depth: 12,
            degree_factor: 32,
            max_degree: 1 << 17,
            lower_bound_order: 14,
            norm_refinements: 2,
            oversample: 4,
            classifier: ClassifyConfig::default(),
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if !(1..=30).contains(&self.ladder_depth) {
            return Err(Error::invalid("verify ladder depth must lie in 1..=30"));
        }
        if self.degree_factor == 0 || self.max_degree == 0 {
            return Err(Error::invalid("degrees must be positive"));
        }
        if !(2..=30).contains(&self.lower_bound_order) {
            return Err(Error::invalid("lower bound order must lie in 2..=30"));
        }
        Ok(())
    }

    fn degree_at(&self, j: u32) -> usize {
        (self.degree_factor << j).next_power_of_two().min(self.max_degree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Boundedness,
    Compactness,
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boundedness" => Ok(Theorem::Boundedness),
            "compactness" => Ok(Theorem::Compactness),
            other => Err(Error::invalid(format!(
                "unknown theorem {other:?}, expected boundedness or compactness"
            ))),
        }
    }
}

/// One rung of the t-ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub j: u32,
    pub t: f64,
    pub degree: usize,
    /// `||f_t||_{B_p}`.
    pub besov_norm: f64,
    /// `||C_mu f_t||_{Lambda^s_{1/s}}`.
    pub norm: f64,
    /// `||C_mu f_t||_B`.
    pub bloch_norm: f64,
    pub ratio: f64,
    pub bloch_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundPoint {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L_N")]
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceFit {
    pub label: Label,
    pub fit: Option<TrendFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub measure: RadialMeasure,
    pub p: f64,
    pub s: f64,
    pub q: f64,
    pub ladder: Vec<LadderRow>,
    pub lower_bound: Vec<LowerBoundPoint>,
    /// Trend labels of `ratio`, `bloch_ratio`, `norm` and `lower_bound`.
    pub fits: BTreeMap<String, SequenceFit>,
    /// Last ladder norm over its peak.
    #[serde(serialize_with = "serialize_extended")]
    pub final_to_peak: f64,
    pub classifier: CarlesonVerdict,
    pub verdict: String,
    pub consistent: bool,
}

fn conjugate(p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    Ok(p / (p - 1.0))
}

/// `mu_N N (log(N+1))^(1/q)`.
pub fn lower_bound_statistic(mu: &MomentSequence, p: f64, n: usize) -> Result<f64> {
    let q = conjugate(p)?;
    if n <= 2 {
        return Err(Error::invalid(format!("N must exceed 2, got {n}")));
    }
    let mu_n = mu.get(n).ok_or(Error::DegreeMismatch {
        required: n,
        available: mu.n_max(),
    })?;
    let nf = n as f64;
    Ok(mu_n * nf * (nf + 1.0).ln().powf(1.0 / q))
}

fn sequence_fit(index: &[f64], scale: &[f64], values: &[f64]) -> SequenceFit {
    let (label, fit) = fit::label_ladder(index, scale, values);
    SequenceFit { label, fit }
}

struct Run {
    q: f64,
    ladder: Vec<LadderRow>,
    lower_bound: Vec<LowerBoundPoint>,
    fits: BTreeMap<String, SequenceFit>,
    final_to_peak: f64,
    classifier: CarlesonVerdict,
}

fn run(m: &RadialMeasure, p: f64, s: f64, config: &VerifyConfig) -> Result<Run> {
    let q = conjugate(p)?;
    if !(s.is_finite() && s > 1.0) {
        return Err(Error::invalid(format!("s must exceed 1, got {s}")));
    }
    config.validate()?;
    let n_max = config
        .degree_at(config.ladder_depth)
        .max(1usize << config.lower_bound_order);
    let mu = m.moments(n_max)?;

    let mut ladder = Vec::new();
    for j in 1..=config.ladder_depth {
        let t = 1.0 - (-(j as f64)).exp2();
        let degree = config.degree_at(j);
        let f = series::test_function(t, p, degree)?;
        let g = series::cesaro_like(&mu, &f)?;
        let grid = NormGrid {
            ladder_depth: 12.max(j + 4),
            refinements: config.norm_refinements,
            oversample: config.oversample,
        };
        let besov_norm = norms::besov_norm(&f, p)?.value;
        let norm = norms::mean_lipschitz_norm_with(&g, s, 1.0 / s, &grid)?.value;
        let bloch_norm = norms::bloch_norm_with(&g, &grid)?.value;
        ladder.push(LadderRow {
            j,
            t,
            degree,
            besov_norm,
            norm,
            bloch_norm,
            ratio: norm / besov_norm,
            bloch_ratio: bloch_norm / besov_norm,
        });
    }

    let lower_bound = (2..=config.lower_bound_order)
        .map(|k| {
            let n = 1usize << k;
            Ok(LowerBoundPoint {
                n,
                value: lower_bound_statistic(&mu, p, n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let index: Vec<f64> = ladder.iter().map(|r| r.j as f64).collect();
    let scale: Vec<f64> = index.iter().map(|j| 1.0 + j * LN_2).collect();
    let column = |f: fn(&LadderRow) -> f64| ladder.iter().map(f).collect::<Vec<f64>>();
    let mut fits = BTreeMap::new();
    fits.insert("ratio".to_string(), sequence_fit(&index, &scale, &column(|r| r.ratio)));
    fits.insert(
        "bloch_ratio".to_string(),
        sequence_fit(&index, &scale, &column(|r| r.bloch_ratio)),
    );
    let norms_col = column(|r| r.norm);
    fits.insert("norm".to_string(), sequence_fit(&index, &scale, &norms_col));
    let lb_index: Vec<f64> = lower_bound.iter().map(|b| (b.n as f64).log2()).collect();
    let lb_scale: Vec<f64> = lower_bound.iter().map(|b| (b.n as f64 + 1.0).ln()).collect();
    let lb_values: Vec<f64> = lower_bound.iter().map(|b| b.value).collect();
    fits.insert(
        "lower_bound".to_string(),
        sequence_fit(&lb_index, &lb_scale, &lb_values),
    );

    let peak = norms_col.iter().cloned().fold(0.0, f64::max);
    let final_to_peak = norms_col.last().map_or(f64::NAN, |v| v / peak);

    let params = CarlesonParams::new(1.0, 1.0 / q)?;
    let classifier = carleson::classify(m, &params, &config.classifier)?;
    Ok(Run {
        q,
        ladder,
        lower_bound,
        fits,
        final_to_peak,
        classifier,
    })
}

/// Boundedness of `C_mu` from `B_p` into `Lambda^s_{1/s}` along the test family.
pub fn boundedness_experiment(m: &RadialMeasure, p: f64, s: f64, config: &VerifyConfig) -> Result<VerificationReport> {
    let r = run(m, p, s, config)?;
    let ratio_bounded = r.fits["ratio"].label.is_bounded();
    let verdict = match ratio_bounded {
        Some(true) => "bounded",
        Some(false) => "not bounded",
        None => "inconclusive",
    };
    let consistent = ratio_bounded.is_some()
        && r.classifier.label.is_bounded() == ratio_bounded
        && r.fits["lower_bound"].label.is_bounded() == ratio_bounded;
    Ok(VerificationReport {
        theorem: Theorem::Boundedness,
        measure: m.clone(),
        p,
        s,
        q: r.q,
        ladder: r.ladder,
        lower_bound: r.lower_bound,
        fits: r.fits,
        final_to_peak: r.final_to_peak,
        classifier: r.classifier,
        verdict: verdict.to_string(),
        consistent,
    })
}

/// Compactness signal: `||C_mu f_t||_{Lambda^s_{1/s}} -> 0` as `t -> 1`.
pub fn compactness_experiment(m: &RadialMeasure, p: f64, s: f64, config: &VerifyConfig) -> Result<VerificationReport> {
    let r = run(m, p, s, config)?;
    let norm_label = r.fits["norm"].label;
    let class_label = r.classifier.label;
    let verdict = if norm_label == Label::Vanishing && class_label == Label::Vanishing {
        "compact-consistent"
    } else {
        "not compact-consistent"
    };
    let consistent = norm_label.is_conclusive()
        && class_label.is_conclusive()
        && (norm_label == Label::Vanishing) == (class_label == Label::Vanishing);
    Ok(VerificationReport {
        theorem: Theorem::Compactness,
        measure: m.clone(),
        p,
        s,
        q: r.q,
        ladder: r.ladder,
        lower_bound: r.lower_bound,
        fits: r.fits,
        final_to_peak: r.final_to_peak,
        classifier: r.classifier,
        verdict: verdict.to_string(),
        consistent,
    })
}

pub fn run_theorem(
    theorem: Theorem,
    m: &RadialMeasure,
    p: f64,
    s: f64,
    config: &VerifyConfig,
) -> Result<VerificationReport> {
    match theorem {
        Theorem::Boundedness => boundedness_experiment(m, p, s, config),
        Theorem::Compactness => compactness_experiment(m, p, s, config),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementCell {
    pub measure: String,
    pub s: f64,
    pub alpha: f64,
    pub tail: Label,
    pub moments: Label,
    /// `None` when either label is inconclusive.
    pub agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementMatrix {
    pub cells: Vec<AgreementCell>,
    pub conclusive: usize,
    pub agreeing: usize,
    #[serde(serialize_with = "serialize_extended")]
    pub rate: f64,
}

/// Tail against moment labels over a catalog and a parameter grid.
pub fn criterion_agreement_experiment(
    catalog: &[(String, RadialMeasure)],
    grid: &[CarlesonParams],
    ladder_depth: u32,
    n_max: usize,
) -> Result<AgreementMatrix> {
    if catalog.is_empty() || grid.is_empty() {
        return Err(Error::invalid("agreement experiment needs a nonempty catalog and grid"));
    }
    let mut cells = Vec::new();
    for (name, m) in catalog {
        let mu = m.moments(n_max)?;
        for params in grid {
            let tail = carleson::classify_tail(m, params, ladder_depth)?.label;
            let moments = carleson::classify_moments(&mu, params)?.result.label;
            let agree = (tail.is_conclusive() && moments.is_conclusive()).then_some(tail == moments);
            cells.push(AgreementCell {
                measure: name.clone(),
                s: params.s,
                alpha: params.alpha,
                tail,
                moments,
                agree,
            });
        }
    }
    let conclusive = cells.iter().filter(|c| c.agree.is_some()).count();
    let agreeing = cells.iter().filter(|c| c.agree == Some(true)).count();
    let rate = if conclusive == 0 {
        f64::NAN
    } else {
        agreeing as f64 / conclusive as f64
    };
    Ok(AgreementMatrix {
        cells,
        conclusive,
        agreeing,
        rate,
    })
}

/// `||C_mu f_{N/(N+1)}||_B / L_N` for `N = 2^k`, `k` in `orders`.
pub fn lower_bound_witness(m: &RadialMeasure, p: f64, orders: &[u32]) -> Result<Vec<(usize, f64)>> {
    let kmax = *orders.iter().max().ok_or_else(|| Error::invalid("no orders given"))?;
    let n_max = 32usize << kmax;
    let mu = m.moments(n_max)?;
    orders
        .iter()
        .map(|&k| {
            let n = 1usize << k;
            let t = n as f64 / (n as f64 + 1.0);
            let f: PowerSeries = series::test_function(t.max(0.5), p, 32 << k)?;
            let g = series::cesaro_like(&mu, &f)?;
            let grid = NormGrid {
                ladder_depth: 12.max(k + 4),
                ..NormGrid::default()
            };
            let bloch = norms::bloch_norm_with(&g, &grid)?.value;
            Ok((n, bloch / lower_bound_statistic(&mu, p, n)?))
        })
        .collect()
}
