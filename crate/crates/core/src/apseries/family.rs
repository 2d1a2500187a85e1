//! Parameter-sampled series: one `TorusSeries` per Chebyshev node of the
//! frequency-parameter grid. Norms take grid maxima; values between
//! nodes come from barycentric interpolation of the samples.

use super::series::TorusSeries;
use crate::chebyshev::ChebGrid;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A family of series sampled over a parameter grid.
#[derive(Clone, Debug)]
pub struct ParamSeries {
    pub grid: ChebGrid,
    pub samples: Vec<TorusSeries>,
}

impl ParamSeries {
    pub fn new(grid: ChebGrid, samples: Vec<TorusSeries>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for the parameter grid, got {}",
                grid.len(),
                samples.len()
            )));
        }
        Ok(ParamSeries { grid, samples })
    }

    /// A parameter-independent series (sampled grid of any size).
    pub fn constant(grid: ChebGrid, series: TorusSeries) -> Self {
        let samples = vec![series; grid.len()];
        ParamSeries { grid, samples }
    }

    pub fn map(&self, f: impl Fn(&TorusSeries) -> TorusSeries) -> ParamSeries {
        ParamSeries {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(f).collect(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&TorusSeries) -> Result<TorusSeries>,
    ) -> Result<ParamSeries> {
        let samples = self
            .samples
            .iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        Ok(ParamSeries {
            grid: self.grid.clone(),
            samples,
        })
    }

    /// Family norm: the grid maximum of the per-sample weighted norms
    /// (the certified surrogate for the sup over the parameter domain).
    pub fn norm_total(&self, m: f64, r: f64, s: f64) -> f64 {
        self.samples
            .iter()
            .map(|t| t.norm_total(m, r, s))
            .fold(0.0, f64::max)
    }

    /// Interpolate the whole series at a parameter point: the barycentric
    /// linear combination of the samples, coefficient by coefficient.
    pub fn interp_series(&self, point: &[f64]) -> Result<TorusSeries> {
        let coeffs = self.grid.interp_coeffs(point);
        let mut out = TorusSeries::zero(self.samples[0].structure.clone(), self.samples[0].z_cap);
        for (c, sample) in coeffs.iter().zip(&self.samples) {
            if *c == 0.0 {
                continue;
            }
            out = out.add(&sample.scale(Complex64::new(*c, 0.0)))?;
        }
        Ok(out)
    }

    /// Evaluate at angles, actions, and a parameter point.
    pub fn eval(
        &self,
        theta: &[f64],
        x: &[f64],
        z: &[Complex64],
        omega_tilde: &[f64],
    ) -> Complex64 {
        let coeffs = self.grid.interp_coeffs(omega_tilde);
        coeffs
            .iter()
            .zip(&self.samples)
            .map(|(c, s)| s.eval(theta, x, z) * *c)
            .sum()
    }

    pub fn prune(&mut self, tol: f64) {
        for s in &mut self.samples {
            s.prune(tol);
        }
    }
}

/// Scalar sampled over the same parameter grid (normal-form energies,
/// frequency shifts per component).
#[derive(Clone, Debug)]
pub struct ParamScalar {
    pub grid: ChebGrid,
    pub values: Vec<f64>,
}

impl ParamScalar {
    pub fn zeros(grid: ChebGrid) -> Self {
        let values = vec![0.0; grid.len()];
        ParamScalar { grid, values }
    }

    pub fn interp(&self, point: &[f64]) -> f64 {
        self.grid.interp(&self.values, point)
    }
}
