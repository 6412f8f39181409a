//! Mean-field dynamics of randomly initialized residual networks.
//!
//! Wide residual networks with i.i.d. Gaussian weights admit exact layerwise
//! recurrences for the statistics of the forward pass (squared lengths,
//! cross-input correlations) and the backward pass (squared gradient norms).
//! This crate evaluates those recurrences for reduced (`x = φ(h) + x̲`) and
//! full (`x = v·φ(h) + x̲ + a`) residual architectures with tanh and α-ReLU
//! nonlinearities, computes the closed-form fixed points and asymptotic laws
//! that govern them at large depth, and validates both against Monte Carlo
//! simulation of actual finite-width networks.
//!
//! The main entry points:
//!
//! * [`recurrence::forward`] / [`recurrence::backward`] — exact mean-field
//!   trajectories for a [`recurrence::NetConfig`].
//! * [`transforms`] — the Gaussian integral transforms `Vφ`, `Wφ` and the
//!   α-ReLU kernel `𝕁_α` with its Bessel-integral cross-checks.
//! * [`asymptotics`] — fixed points `e*`, convergence exponents (`δ*`, `μ`,
//!   `R`), expansion coefficients, and log–log slope fitting.
//! * [`simulator`] — seeded, parallel Monte Carlo runs of finite-width
//!   networks plus z-score comparison against the recurrences.

// negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod nonlin;
pub mod quad;
pub mod recurrence;
pub mod simulator;
pub mod special;
pub mod transforms;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A quadrature or solver failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Malformed configuration or mismatched data shapes.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
