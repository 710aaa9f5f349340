//! Persistence probabilities `p_n(θ) = P[Z_1 ≥ 0, …, Z_n ≥ 0]` and first-passage
//! masses `q_n(θ) = p_n(θ) − p_{n+1}(θ)` of the autoregressive chain
//! `Z_0 = 0, Z_n = θ Z_{n−1} + X_n` with i.i.d. continuous innovations.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: truncated power series over any [`Scalar`] (floats or exact rationals),
//!   carrying every generating-function identity (`φ`, `ψ`, `σ`, weights).
//! - [`qseries`]: q-Pochhammer products and the entire function `D_θ`.
//! - [`innovations`]: innovation laws (density, CDF, sampler, shape flags).
//! - [`laplace`]: closed forms and recursions for Laplace innovations, both drift signs.
//! - [`spectral`]: zeroes of `D_θ`, geometric-mixture coefficients and interval step functions.
//! - [`estimate`]: Monte Carlo and density-propagation quadrature estimators.
//! - [`factor`]: factorization verifiers, the discrete Van Dantzig solver and shape diagnostics.
//!
//! Concrete aliases for the common scalar choices live at the crate root.

pub mod error;
pub mod estimate;
pub mod factor;
pub mod innovations;
pub mod laplace;
pub mod quad;
pub mod qseries;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod table;

pub use error::{Error, Result};
pub use innovations::{Family, Innovation};
pub use scalar::Scalar;
pub use series::Series;
pub use table::{PersistRow, PersistTable, Provenance};

/// Exact rational scalar used by the "rational mode" kernels.
pub type Rational = num_rational::BigRational;

/// Double-precision power series, the default carrier.
pub type Series64 = Series<f64>;
/// Single-precision power series.
pub type Series32 = Series<f32>;
/// Exact rational power series.
pub type RationalSeries = Series<Rational>;

/// Double-precision persistence table.
pub type Table64 = PersistTable<f64>;
/// Exact rational persistence table.
pub type RationalTable = PersistTable<Rational>;

/// Default truncation order for series work.
pub const DEFAULT_ORDER: usize = 64;
