use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// How a complex `beta` should be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionKind {
    /// Real inverse temperature, `beta > 0`.
    Thermal,
    /// `beta = i t` with `hbar = 1`.
    RealTime,
    General,
}

/// The complex "time" of `exp(-beta H)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionParameter<T> {
    beta: Cplx<T>,
    kind: EvolutionKind,
}

impl<T: Real> EvolutionParameter<T> {
    pub fn thermal(beta: T) -> Result<Self> {
        if !(beta.is_finite() && beta > T::zero()) {
            return Err(Error::InvalidEvolution(format!(
                "thermal beta must be finite and positive, got {beta}"
            )));
        }
        Ok(Self {
            beta: Cplx::new(beta, T::zero()),
            kind: EvolutionKind::Thermal,
        })
    }

    /// Unitary evolution for time `t`: `beta = i t`.
    pub fn real_time(t: T) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidEvolution(format!("time must be finite, got {t}")));
        }
        Ok(Self {
            beta: Cplx::new(T::zero(), t),
            kind: EvolutionKind::RealTime,
        })
    }

    pub fn general(beta: Cplx<T>) -> Self {
        Self {
            beta,
            kind: EvolutionKind::General,
        }
    }

    pub fn beta(&self) -> Cplx<T> {
        self.beta
    }

    pub fn kind(&self) -> EvolutionKind {
        self.kind
    }

    /// `beta / slices`, keeping the interpretation.
    pub fn divided(&self, slices: usize) -> Self {
        let p = T::from_usize(slices).expect("slice count representable");
        Self {
            beta: self.beta / p,
            kind: self.kind,
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        if factor <= T::zero() && self.kind == EvolutionKind::Thermal {
            return Self::general(self.beta * factor);
        }
        Self {
            beta: self.beta * factor,
            kind: self.kind,
        }
    }

    /// Complex conjugate: a real-time step run backwards, thermal unchanged.
    pub fn conj(&self) -> Self {
        Self {
            beta: self.beta.conj(),
            kind: self.kind,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_requires_positive_beta() {
        assert!(EvolutionParameter::thermal(0.0f64).is_err());
        assert!(EvolutionParameter::thermal(-1.0f64).is_err());
        assert!(EvolutionParameter::thermal(f64::NAN).is_err());
        assert!(EvolutionParameter::thermal(0.5f64).is_ok());
    }

    #[test]
    fn real_time_is_imaginary() {
        let b = EvolutionParameter::real_time(1.3f64).unwrap();
        assert_eq!(b.beta(), Cplx::new(0.0, 1.3));
        assert_eq!(b.conj().beta(), Cplx::new(0.0, -1.3));
        assert_eq!(b.divided(2).kind(), EvolutionKind::RealTime);
    }
}
