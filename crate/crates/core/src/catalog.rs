//! Builtin measures, test functions and parameter grids.
//!
//! The measures and functions are the JSON files under `fixtures/`, so the
//! CLI examples, the tests and the library share one source.

use crate::carleson::CarlesonParams;
use crate::error::Result;
use crate::measure::RadialMeasure;
use crate::series::{FunctionSpec, PowerSeries};

/// `(name, measure file)` pairs.
pub const MEASURE_FILES: [(&str, &str); 7] = [
    ("lebesgue", include_str!("../fixtures/measures/lebesgue.json")),
    ("atom09", include_str!("../fixtures/measures/atom09.json")),
    ("linear_decay", include_str!("../fixtures/measures/linear_decay.json")),
    ("powerlog", include_str!("../fixtures/measures/powerlog.json")),
    ("log_weighted", include_str!("../fixtures/measures/log_weighted.json")),
    ("hat", include_str!("../fixtures/measures/hat.json")),
    ("mixture", include_str!("../fixtures/measures/mixture.json")),
];

/// `(name, function file)` pairs.
pub const FUNCTION_FILES: [(&str, &str); 4] = [
    ("ones", include_str!("../fixtures/functions/ones.json")),
    ("identity", include_str!("../fixtures/functions/identity.json")),
    ("log", include_str!("../fixtures/functions/log.json")),
    (
        "test_function",
        include_str!("../fixtures/functions/test_function.json"),
    ),
];

pub fn measures() -> Vec<(&'static str, RadialMeasure)> {
    MEASURE_FILES
        .iter()
        .map(|(name, text)| (*name, RadialMeasure::from_json(text).expect("catalog measure parses")))
        .collect()
}

pub fn measure(name: &str) -> Option<RadialMeasure> {
    MEASURE_FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| RadialMeasure::from_json(text).expect("catalog measure parses"))
}

/// Catalog functions; builtins without an explicit degree get `default_degree`.
pub fn functions(default_degree: usize) -> Result<Vec<(&'static str, PowerSeries)>> {
    FUNCTION_FILES
        .iter()
        .map(|(name, text)| Ok((*name, FunctionSpec::from_json(text)?.build(default_degree)?)))
        .collect()
}

/// `(s, alpha)` in `{(1, 0), (1, 1/2), (2, 0), (1/2, 1)}`.
pub fn parameter_grid() -> Vec<CarlesonParams> {
    [(1.0, 0.0), (1.0, 0.5), (2.0, 0.0), (0.5, 1.0)]
        .into_iter()
        .map(|(s, a)| CarlesonParams::new(s, a).expect("grid parameters are valid"))
        .collect()
}
