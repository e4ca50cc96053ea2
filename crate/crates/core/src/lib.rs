//! Cesàro-like operators `C_mu` on spaces of analytic functions in the unit disc.
//!
//! A finite positive Borel measure `mu` on `[0,1)` acts on a power series
//! `f = sum a_n z^n` by
//!
//! ```text
//! C_mu f(z) = sum_n mu_n (a_0 + ... + a_n) z^n,    mu_n = int t^n dmu(t).
//! ```
//!
//! The crate computes moments and tails of radial measures, applies the
//! operator to truncated series, estimates Bloch, Besov and mean Lipschitz
//! norms, and runs numerical Carleson-type classification and boundedness
//! experiments.

// `!(x > 0.0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleson;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod fit;
pub mod measure;
pub mod norms;
pub mod quad;
pub mod report;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{MeasureComponent, MomentSequence, RadialMeasure};
pub use norms::{NormEstimate, NormGrid};
pub use series::{EvalPoint, FunctionSpec, PowerSeries};
