//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets the tolerance. Segments are summed in left-to-right order
//! at the end, so the result does not depend on the refinement history.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_929_914_400,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_segments: 4000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-14, 1e-12)
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

impl<T: QuadValue> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Estimate {
            value,
            error: 0.0,
            evaluations: 0,
        }
    }

    pub fn combine(self, other: Estimate<T>) -> Self {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Estimate {
            value: self.value * c,
            error: self.error * c.abs(),
            evaluations: self.evaluations,
        }
    }
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    // integral of |f|, used for the round-off floor
    abs_value: f64,
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    let mut abs_sum = fc.magnitude() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kron = kron + pair * WGK[j];
        abs_sum += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    Segment {
        a,
        b,
        value,
        error,
        abs_value: abs_sum * half.abs(),
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrate `f` over `[points[0], points[last]]`, starting from one segment
/// per consecutive pair of (sorted) break points.
pub fn integrate_with_breaks<T, F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if points.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two break points"));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("quadrature break points must be sorted"));
    }
    let mut evaluations = 0;
    let mut segments: Vec<Segment<T>> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            evaluations += 21;
            kronrod(&mut f, w[0], w[1])
        })
        .collect();
    if segments.is_empty() {
        return Ok(Estimate::exact(T::zero()));
    }

    loop {
        let total = sum_in_order(&mut segments);
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let abs_total: f64 = segments.iter().map(|s| s.abs_value).sum();
        if !total.is_finite_value() || !error.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{}, {}]",
                points[0],
                points[points.len() - 1]
            )));
        }
        let requested = tol.abs.max(tol.rel * total.magnitude());
        let floor = 50.0 * f64::EPSILON * abs_total;
        if error <= requested.max(floor) {
            return Ok(Estimate {
                value: total,
                error,
                evaluations,
            });
        }
        // first segment with the largest error
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[idx];
        let mid = 0.5 * (seg.a + seg.b);
        let splittable = mid > seg.a && mid < seg.b;
        if segments.len() >= tol.max_segments || !splittable || worst <= floor / segments.len() as f64 {
            return Err(Error::Quadrature {
                a: points[0],
                b: points[points.len() - 1],
                achieved: error,
                requested,
            });
        }
        let left = kronrod(&mut f, seg.a, mid);
        let right = kronrod(&mut f, mid, seg.b);
        evaluations += 42;
        segments[idx] = left;
        segments.insert(idx + 1, right);
    }
}

fn sum_in_order<T: QuadValue>(segments: &mut [Segment<T>]) -> T {
    // segments are kept sorted by construction (insert after the split one)
    segments.iter().fold(T::zero(), |acc, s| acc + s.value)
}
