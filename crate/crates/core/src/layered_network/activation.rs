use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;

/// Smooth activation applied to each layer's affine pre-activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Identity,
    Tanh,
    Logistic,
    /// `ln(1 + e^z)`, a smooth stand-in for ReLU.
    Softplus,
}

impl ActivationKind {
    pub fn apply<T: Real>(self, z: T) -> T {
        match self {
            ActivationKind::Identity => z,
            ActivationKind::Tanh => z.tanh(),
            ActivationKind::Logistic => logistic(z),
            ActivationKind::Softplus => {
                // ln(1 + e^z) = max(z, 0) + ln(1 + e^{-|z|})
                z.max(T::zero()) + (-z.abs()).exp().ln_1p()
            }
        }
    }

    pub fn derivative<T: Real>(self, z: T) -> T {
        match self {
            ActivationKind::Identity => T::one(),
            ActivationKind::Tanh => {
                let t = z.tanh();
                T::one() - t * t
            }
            ActivationKind::Logistic => {
                let s = logistic(z);
                s * (T::one() - s)
            }
            ActivationKind::Softplus => logistic(z),
        }
    }
}

impl std::str::FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "linear" => Ok(ActivationKind::Identity),
            "tanh" => Ok(ActivationKind::Tanh),
            "logistic" | "sigmoid" => Ok(ActivationKind::Logistic),
            "softplus" => Ok(ActivationKind::Softplus),
            other => Err(Error::InvalidConfig(format!("unknown activation `{other}`"))),
        }
    }
}

/// Numerically stable `1 / (1 + e^{-z})`.
pub fn logistic<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}
