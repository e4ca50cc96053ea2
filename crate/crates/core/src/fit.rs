//! Least-squares trend fits on dyadic ladders and the labels derived from them.
//!
//! A ladder is a sequence of positive values `y_j` indexed by `j`, together
//! with a slowly growing scale `L_j` (for example `log(e/(1-t_j))`). The fit
//!
//! ```text
//! log2 y_j = a + B j + C log2 L_j
//! ```
//!
//! over the trailing half of the ladder separates geometric growth or decay
//! (`B`) from logarithmic growth or decay (`C`). On short windows `j` and
//! `log2 L` are nearly collinear, so labels rely on the local exponent
//! `E = d log2 y / d log2 L` of the fitted model at the deepest point, which
//! is well determined even when `B` and `C` individually are not.

use serde::{Deserialize, Serialize};

/// `|B|` above this is a geometric trend.
pub const SLOPE_TOL: f64 = 0.05;
/// `|E|` above this is a logarithmic trend.
pub const LOG_EXPONENT_TOL: f64 = 0.25;
/// Fits with a larger RMS residual (in log2 units) are not trusted.
pub const RESIDUAL_TOL: f64 = 0.25;
/// Terminal-to-peak ratio below which a decreasing ladder counts as vanishing.
pub const VANISH_RATIO: f64 = 1e-3;
/// Successive differences shrinking at least this fast count as geometric convergence.
pub const GEOMETRIC_RATIO: f64 = 0.75;
/// Fewest points in the fitted window.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    FiniteLooking,
    Diverging,
    Vanishing,
    Inconclusive,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::FiniteLooking => "finite-looking",
            Label::Diverging => "diverging",
            Label::Vanishing => "vanishing",
            Label::Inconclusive => "inconclusive",
        }
    }

    pub fn is_conclusive(&self) -> bool {
        *self != Label::Inconclusive
    }

    /// Bounded in the sense of a finite sup: finite-looking or vanishing.
    pub fn is_bounded(&self) -> Option<bool> {
        match self {
            Label::FiniteLooking | Label::Vanishing => Some(true),
            Label::Diverging => Some(false),
            Label::Inconclusive => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficients of `log2 y = a + B j + C log2 L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub intercept: f64,
    pub slope: f64,
    pub log_exponent: f64,
    /// `d log2 y / d log2 L` of the fitted model at the last ladder point.
    pub local_exponent: f64,
    pub residual_rms: f64,
    pub points: usize,
}

/// `y = A x^b` fitted in log-log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub log_constant: f64,
    pub residual_rms: f64,
}

/// `log y = a + b log x + c log log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPowerFit {
    pub exponent: f64,
    pub log_exponent: f64,
    pub log_constant: f64,
    pub residual_rms: f64,
}

/// Ordinary least squares for `y ~ beta_0 + sum beta_k x_k`.
///
/// Columns are centred before forming the normal equations. Returns the
/// coefficients (intercept first) and the RMS residual, or `None` for a
/// singular design.
pub fn least_squares(columns: &[&[f64]], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    let k = columns.len();
    if n < k + 1 || columns.iter().any(|c| c.len() != n) {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let ybar = mean(y);
    let xbar: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..n)
                .map(|r| (columns[i][r] - xbar[i]) * (columns[j][r] - xbar[j]))
                .sum();
        }
        a[i][k] = (0..n).map(|r| (columns[i][r] - xbar[i]) * (y[r] - ybar)).sum();
    }
    let beta = solve(a)?;
    let intercept = ybar - beta.iter().zip(&xbar).map(|(b, x)| b * x).sum::<f64>();
    let ss: f64 = (0..n)
        .map(|r| {
            let pred = intercept + (0..k).map(|i| beta[i] * columns[i][r]).sum::<f64>();
            (y[r] - pred).powi(2)
        })
        .sum();
    let mut coeffs = vec![intercept];
    coeffs.extend(beta);
    Some((coeffs, (ss / n as f64).sqrt()))
}

// Gaussian elimination with partial pivoting on an augmented matrix.
#[allow(clippy::needless_range_loop)]
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    let scale = a.iter().flat_map(|r| r[..k].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return if k == 0 { Some(vec![]) } else { None };
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..=k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][k] - s) / a[row][row];
    }
    Some(x)
}

/// Power-law fit of positive `y` against positive `x`.
pub fn power_fit(x: &[f64], y: &[f64]) -> Option<PowerFit> {
    if x.len() != y.len() || x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (c, rms) = least_squares(&[&lx], &ly)?;
    Some(PowerFit {
        exponent: c[1],
        log_constant: c[0],
        residual_rms: rms,
    })
}

/// Power-times-log fit of positive `y` against `x > 1`.
pub fn log_power_fit(x: &[f64], y: &[f64]) -> Option<LogPowerFit> {
    if x.len() != y.len()
        || x.iter().any(|v| !(v.is_finite() && *v > 1.0))
        || y.iter().any(|v| !(v.is_finite() && *v > 0.0))
    {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let llx: Vec<f64> = lx.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (c, rms) = least_squares(&[&lx, &llx], &ly)?;
    Some(LogPowerFit {
        exponent: c[1],
        log_exponent: c[2],
        log_constant: c[0],
        residual_rms: rms,
    })
}

/// Trend fit over the trailing half of the ladder (at least [`MIN_FIT_POINTS`]).
pub fn trend_fit(index: &[f64], scale: &[f64], values: &[f64]) -> Option<TrendFit> {
    let n = values.len();
    if index.len() != n || scale.len() != n {
        return None;
    }
    let window = (n / 2).max(MIN_FIT_POINTS);
    if n < window {
        return None;
    }
    let start = n - window;
    let j = &index[start..];
    let l: Vec<f64> = scale[start..].iter().map(|v| v.log2()).collect();
    if values[start..]
        .iter()
        .chain(&scale[start..])
        .any(|v| !(v.is_finite() && *v > 0.0))
    {
        return None;
    }
    let y: Vec<f64> = values[start..].iter().map(|v| v.log2()).collect();
    let (c, rms) = least_squares(&[j, &l], &y)?;
    let m = l.len();
    let dl_dj = (l[m - 1] - l[m - 2]) / (j[m - 1] - j[m - 2]);
    if !(dl_dj > 0.0) {
        return None;
    }
    Some(TrendFit {
        intercept: c[0],
        slope: c[1],
        log_exponent: c[2],
        local_exponent: c[2] + c[1] / dl_dj,
        residual_rms: rms,
        points: window,
    })
}

/// Labels a ladder of nonnegative values; see the module docs for the fit.
///
/// Rules, in order: any NaN is inconclusive and any `+inf` diverging; fewer
/// than `2 * MIN_FIT_POINTS` points is inconclusive; an all-zero ladder, or
/// one whose last four values are nonincreasing and whose terminal value is
/// below `VANISH_RATIO` times the peak, is vanishing; a ladder whose last
/// differences shrink geometrically is labelled by its extrapolated limit
/// (vanishing below `VANISH_RATIO` times the peak); a fit residual above
/// `RESIDUAL_TOL` is inconclusive; a slope `B` beyond `SLOPE_TOL` decides when
/// the local exponent `E` has the same sign; otherwise `E` beyond
/// `LOG_EXPONENT_TOL` decides, and anything else is finite-looking.
pub fn label_ladder(index: &[f64], scale: &[f64], values: &[f64]) -> (Label, Option<TrendFit>) {
    if values.iter().any(|v| v.is_nan() || *v < 0.0) {
        return (Label::Inconclusive, None);
    }
    if values.iter().any(|v| v.is_infinite()) {
        return (Label::Diverging, None);
    }
    let n = values.len();
    if n < 2 * MIN_FIT_POINTS {
        return (Label::Inconclusive, None);
    }
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return (Label::Vanishing, None);
    }
    let tail = &values[n - 4..];
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    if decreasing && values[n - 1] < VANISH_RATIO * peak {
        return (Label::Vanishing, trend_fit(index, scale, values));
    }
    if let Some(limit) = geometric_limit(tail) {
        let label = if limit <= VANISH_RATIO * peak {
            Label::Vanishing
        } else {
            Label::FiniteLooking
        };
        return (label, trend_fit(index, scale, values));
    }
    let Some(fit) = trend_fit(index, scale, values) else {
        return (Label::Inconclusive, None);
    };
    let label = if fit.residual_rms > RESIDUAL_TOL {
        Label::Inconclusive
    } else if fit.slope > SLOPE_TOL && fit.local_exponent > 0.0 {
        Label::Diverging
    } else if fit.slope < -SLOPE_TOL && fit.local_exponent < 0.0 {
        Label::Vanishing
    } else if fit.local_exponent > LOG_EXPONENT_TOL {
        Label::Diverging
    } else if fit.local_exponent < -LOG_EXPONENT_TOL {
        Label::Vanishing
    } else {
        Label::FiniteLooking
    };
    (label, Some(fit))
}

/// Aitken limit of the last four values when their differences have one sign
/// and shrink by at most [`GEOMETRIC_RATIO`] per step.
fn geometric_limit(last4: &[f64]) -> Option<f64> {
    let d: Vec<f64> = last4.windows(2).map(|w| w[1] - w[0]).collect();
    if d.contains(&0.0) || d.windows(2).any(|w| w[0].signum() != w[1].signum()) {
        return None;
    }
    let ratio = (d[1] / d[0]).max(d[2] / d[1]);
    if ratio > GEOMETRIC_RATIO {
        return None;
    }
    Some(last4[3] + d[2] * ratio / (1.0 - ratio))
}
