//! Activation functions and their derivatives.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nonlinearity descriptor.
///
/// `AlphaRelu` is `x ↦ x^α` on positives and 0 otherwise; `TemperedAlphaRelu`
/// is `x ↦ (x+ε)^α − ε^α` on positives and 0 otherwise, which keeps the
/// derivative bounded near 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Activation {
    Tanh,
    AlphaRelu { alpha: f64 },
    TemperedAlphaRelu { alpha: f64, eps: f64 },
}

/// Default tempering offset; keeps `(x+ε)^α` within 1e-3 of `x^α` on
/// x ∈ [0.1, 10] for α ≥ 0.5.
pub const DEFAULT_TEMPER_EPS: f64 = 1e-4;

impl Activation {
    pub fn tanh() -> Self {
        Activation::Tanh
    }

    /// α-ReLU; requires α > −1/2 so that `Vψ_α` exists.
    pub fn alpha_relu(alpha: f64) -> Result<Self> {
        let a = Activation::AlphaRelu { alpha };
        a.validate()?;
        Ok(a)
    }

    /// Tempered α-ReLU; requires α > −1/2 and ε > 0.
    pub fn tempered_alpha_relu(alpha: f64, eps: f64) -> Result<Self> {
        let a = Activation::TemperedAlphaRelu { alpha, eps };
        a.validate()?;
        Ok(a)
    }

    /// Parameter checks (also used after deserializing configs).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::Tanh => Ok(()),
            Activation::AlphaRelu { alpha } => {
                if !(alpha > -0.5) || !alpha.is_finite() {
                    Err(Error::Domain(format!(
                        "alpha-ReLU needs alpha > -1/2 (V psi_alpha diverges), got {alpha}"
                    )))
                } else {
                    Ok(())
                }
            }
            Activation::TemperedAlphaRelu { alpha, eps } => {
                if !(alpha > -0.5) || !alpha.is_finite() {
                    Err(Error::Domain(format!(
                        "tempered alpha-ReLU needs alpha > -1/2, got {alpha}"
                    )))
                } else if !(eps > 0.0) || !eps.is_finite() {
                    Err(Error::Domain(format!(
                        "tempered alpha-ReLU needs eps > 0, got {eps}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// φ(x).
    pub fn activate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("activate: non-finite input {x}")));
        }
        Ok(match *self {
            Activation::Tanh => x.tanh(),
            Activation::AlphaRelu { alpha } => {
                if x > 0.0 {
                    x.powf(alpha)
                } else {
                    0.0
                }
            }
            Activation::TemperedAlphaRelu { alpha, eps } => {
                if x > 0.0 {
                    (x + eps).powf(alpha) - eps.powf(alpha)
                } else {
                    0.0
                }
            }
        })
    }

    /// φ̇(x). For the rectified kinds the derivative at exactly x = 0 is
    /// defined as 0 (a measure-zero event under Gaussian pre-activations).
    pub fn activate_deriv(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "activate_deriv: non-finite input {x}"
            )));
        }
        Ok(match *self {
            Activation::Tanh => {
                let c = x.cosh();
                1.0 / (c * c)
            }
            Activation::AlphaRelu { alpha } => {
                if x > 0.0 {
                    alpha * x.powf(alpha - 1.0)
                } else {
                    0.0
                }
            }
            Activation::TemperedAlphaRelu { alpha, eps } => {
                if x > 0.0 {
                    alpha * (x + eps).powf(alpha - 1.0)
                } else {
                    0.0
                }
            }
        })
    }

    /// tanh is antisymmetric; the rectified kinds are not.
    pub fn is_antisymmetric(&self) -> bool {
        matches!(self, Activation::Tanh)
    }

    /// Checks the extra constraint gradient-path operations need: for pure
    /// α-ReLU, `Vψ̇_α` exists only for α > 1/2. The tempered variant has a
    /// bounded derivative, so any valid α works.
    pub fn validate_for_gradients(&self) -> Result<()> {
        self.validate()?;
        if let Activation::AlphaRelu { alpha } = *self {
            if alpha <= 0.5 {
                return Err(Error::Domain(format!(
                    "V of the squared alpha-ReLU derivative diverges for alpha <= 1/2, got {alpha}"
                )));
            }
        }
        Ok(())
    }
}
