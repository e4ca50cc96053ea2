//! Truncated power series on the unit disk and the Cesàro-like operator
//! `C_mu`, in coefficient form and in integral form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MomentSequence, RadialMeasure};
use crate::quad::Tolerance;

/// Largest modulus accepted for an evaluation point.
pub const MAX_RADIUS: f64 = 1.0 - 1.0 / (1u64 << 40) as f64;

/// Largest modulus at which the integral representation is evaluated.
pub const INTEGRAL_FORM_RADIUS: f64 = 0.95;

/// Default truncation degree.
pub const DEFAULT_DEGREE: usize = 4096;

/// A point of the disk with `|z| <= 1 - 2^-40`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint(Complex64);

impl EvalPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_RADIUS {
            return Err(Error::invalid(format!("evaluation point {z} outside |z| <= 1 - 2^-40")));
        }
        Ok(EvalPoint(z))
    }

    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(r, theta))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }
}

/// `a_0 + a_1 z + ... + a_N z^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a power series needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::invalid("power series coefficients must be finite"));
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The zero series of the given degree.
    pub fn zeros(degree: usize) -> Self {
        PowerSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); degree + 1],
        }
    }

    /// `z^k` as a series of degree `k`.
    pub fn monomial(k: usize) -> Self {
        let mut s = Self::zeros(k);
        s.coeffs[k] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn constant(c: Complex64) -> Self {
        PowerSeries { coeffs: vec![c] }
    }

    /// Truncated `log 1/(1-z) = sum_{k>=1} z^k / k`.
    pub fn log_one_over_one_minus_z(degree: usize) -> Self {
        let coeffs = (0..=degree)
            .map(|k| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0 / k as f64, 0.0)
                }
            })
            .collect();
        PowerSeries { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Zero-pads or truncates to exactly `degree`.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, Complex64::new(0.0, 0.0));
        PowerSeries { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Sum; the result has the larger of the two degrees.
    pub fn add(&self, other: &PowerSeries) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(zero) + other.coeffs.get(k).copied().unwrap_or(zero))
            .collect();
        PowerSeries { coeffs }
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn eval(&self, z: EvalPoint) -> Complex64 {
        self.eval_unchecked(z.z())
    }

    /// Horner evaluation without the disk check.
    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    /// `(f(z), f'(z))` in one Horner pass.
    pub(crate) fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> PowerSeries {
        if self.coeffs.len() == 1 {
            return PowerSeries::zeros(0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * k as f64)
            .collect();
        PowerSeries { coeffs }
    }

    /// `s_n = a_0 + ... + a_n` with compensated summation.
    pub fn partial_sums(&self) -> Vec<Complex64> {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        self.coeffs
            .iter()
            .map(|a| {
                re.add(a.re);
                im.add(a.im);
                Complex64::new(re.total(), im.total())
            })
            .collect()
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Coefficients of `C_mu f`: `b_n = mu_n (a_0 + ... + a_n)`, same degree as `f`.
pub fn cesaro_like(mu: &MomentSequence, f: &PowerSeries) -> Result<PowerSeries> {
    if mu.n_max() < f.degree() {
        return Err(Error::DegreeMismatch {
            required: f.degree(),
            available: mu.n_max(),
        });
    }
    let coeffs = f
        .partial_sums()
        .into_iter()
        .zip(mu.values())
        .map(|(s, m)| s * *m)
        .collect();
    PowerSeries::new(coeffs)
}

fn integral_form_tolerance() -> Tolerance {
    Tolerance::new(1e-13, 1e-12)
}

fn check_integral_form_point(z: EvalPoint) -> Result<Complex64> {
    let z = z.z();
    if z.norm() > INTEGRAL_FORM_RADIUS {
        return Err(Error::invalid(format!(
            "integral form is only evaluated for |z| <= {INTEGRAL_FORM_RADIUS}, got |z| = {}",
            z.norm()
        )));
    }
    Ok(z)
}

/// `C_mu(f)(z) = int f(tz) / (1 - tz) dmu(t)`.
pub fn cesaro_like_integral_eval(m: &RadialMeasure, f: &PowerSeries, z: EvalPoint) -> Result<Complex64> {
    let z = check_integral_form_point(z)?;
    let est = m.integrate(0.0, integral_form_tolerance(), |t, _| {
        let w = z * t;
        f.eval_unchecked(w) / (1.0 - w)
    })?;
    Ok(est.value)
}

/// `C_mu(f)'(z) = int t f'(tz)/(1-tz) dmu + int t f(tz)/(1-tz)^2 dmu`.
pub fn cesaro_like_derivative_eval(m: &RadialMeasure, f: &PowerSeries, z: EvalPoint) -> Result<Complex64> {
    let z = check_integral_form_point(z)?;
    let est = m.integrate(0.0, integral_form_tolerance(), |t, _| {
        let w = z * t;
        let (fv, dfv) = f.eval_with_derivative(w);
        let k = 1.0 / (1.0 - w);
        (dfv * k + fv * k * k) * t
    })?;
    Ok(est.value)
}

/// `f_t(z) = (log(e/(1-t)))^(-1/p) log 1/(1-tz)`, truncated at `degree`.
pub fn test_function(t: f64, p: f64, degree: usize) -> Result<PowerSeries> {
    if !(t.is_finite() && (0.5..1.0).contains(&t)) {
        return Err(Error::invalid(format!(
            "test function parameter must lie in [1/2, 1), got {t}"
        )));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::invalid(format!("test function exponent must exceed 1, got {p}")));
    }
    let scale = (1.0 - (-t).ln_1p()).powf(-1.0 / p);
    let ln_t = t.ln();
    let coeffs = (0..=degree)
        .map(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let kf = k as f64;
                Complex64::new(scale * (kf * ln_t).exp() / kf, 0.0)
            }
        })
        .collect();
    PowerSeries::new(coeffs)
}

/// Function file: explicit coefficients or a named builtin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Coefficients {
        coeffs_re: Vec<f64>,
        #[serde(default)]
        coeffs_im: Vec<f64>,
    },
    Builtin(Builtin),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case")]
pub enum Builtin {
    LogOneOverOneMinusZ {
        #[serde(default)]
        degree: Option<usize>,
    },
    TestFunction {
        t: f64,
        p: f64,
        #[serde(default)]
        degree: Option<usize>,
    },
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the series; builtins use `default_degree` unless they carry their own.
    pub fn build(&self, default_degree: usize) -> Result<PowerSeries> {
        match self {
            FunctionSpec::Coefficients { coeffs_re, coeffs_im } => {
                if coeffs_im.len() > coeffs_re.len() {
                    return Err(Error::invalid("coeffs_im is longer than coeffs_re"));
                }
                let coeffs = coeffs_re
                    .iter()
                    .enumerate()
                    .map(|(k, re)| Complex64::new(*re, coeffs_im.get(k).copied().unwrap_or(0.0)))
                    .collect();
                PowerSeries::new(coeffs)
            }
            FunctionSpec::Builtin(Builtin::LogOneOverOneMinusZ { degree }) => {
                Ok(PowerSeries::log_one_over_one_minus_z(degree.unwrap_or(default_degree)))
            }
            FunctionSpec::Builtin(Builtin::TestFunction { t, p, degree }) => {
                test_function(*t, *p, degree.unwrap_or(default_degree))
            }
        }
    }
}
