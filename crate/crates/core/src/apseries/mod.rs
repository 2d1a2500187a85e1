//! Finite almost-periodic / torus Fourier–Taylor series and their
//! weighted norms.

mod family;
mod poly;
mod series;

pub use family::{ParamScalar, ParamSeries};
pub use poly::ZPoly;
pub use series::{Domain, Mode, TorusSeries, Var};

use crate::error::{Error, Result};
use crate::lattice::IndexWindow;
use serde::{Deserialize, Serialize};

/// A frequency vector over the active window, with its sup norm. Rational
/// independence is not checkable in floating point; a nonresonance
/// certificate from `resonance::scan` stands in for it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Frequency {
    pub window: IndexWindow,
    pub values: Vec<f64>,
}

impl Frequency {
    pub fn new(window: IndexWindow, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidInput(format!(
                "frequency needs {} entries for the window, got {}",
                window.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("frequency entries must be finite".into()));
        }
        Ok(Frequency { window, values })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    /// `⟨k, ω⟩` for a dense mode vector over the window.
    pub fn dot(&self, k: &[i32]) -> f64 {
        debug_assert_eq!(k.len(), self.values.len());
        k.iter()
            .zip(&self.values)
            .map(|(&ki, &wi)| ki as f64 * wi)
            .sum()
    }

    pub fn scale(&self, factor: f64) -> Frequency {
        Frequency {
            window: self.window,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}
