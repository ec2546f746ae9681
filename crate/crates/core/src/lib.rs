//! Dunkl generalization of q-parametric Szász-Mirakjan operators.
//!
//! The crate is organized bottom-up:
//!
//! * [`qcore`]: q-integers, q-factorials, q-binomials, q-Pochhammer symbols and
//!   the two classical q-exponentials.
//! * [`dunkl`]: the parity function θ, the coefficients γ_{μ,q} and the two
//!   q-Dunkl exponentials e_{μ,q}, E_{μ,q}.
//! * [`operators`]: the operator D*_{n,q}, its nodes, weights and moments,
//!   plus the classical Szász, Sucu and Içöz operators used as baselines.
//! * [`bivariate`]: the tensor-product extension D*_{n₁,n₂}.
//! * [`analysis`]: moduli of continuity, norms, q_n schedules, Korovkin
//!   studies and rate-of-convergence bound checks.
//!
//! Every infinite series is summed in ascending index order with compensated
//! summation and stops only once a geometric-majorant tail certificate is
//! below the requested tolerance, so results are deterministic and carry a
//! rigorous truncation bound.

pub mod analysis;
pub mod bivariate;
pub mod dunkl;
mod error;
pub mod operators;
pub mod qcore;
pub mod series;

pub use analysis::{BoundReport, QSchedule, Window};
pub use bivariate::{BivariateParams, TestFunction2D};
pub use dunkl::DunklParam;
pub use error::{Error, Result};
pub use operators::{Growth, OperatorParams, OperatorValue, TestFunction};
pub use qcore::{QParam, QRealExponent};
pub use series::{SeriesValue, TruncationControl};
