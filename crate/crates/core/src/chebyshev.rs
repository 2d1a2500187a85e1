//! Tensor Chebyshev–Lobatto grids over parameter boxes, with barycentric
//! interpolation. Used to sample the frequency-parameter dependence of
//! series coefficients and frequency maps.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Chebyshev–Lobatto nodes per dimension over a box; a single node per
/// dimension degenerates to the box midpoint (no interpolation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebGrid {
    /// Per-dimension intervals `[lo, hi]`.
    pub bounds: Vec<(f64, f64)>,
    /// Nodes per dimension (same count in each dimension).
    pub nodes_per_dim: usize,
}

impl ChebGrid {
    pub fn new(bounds: Vec<(f64, f64)>, nodes_per_dim: usize) -> Result<Self> {
        if bounds.is_empty() || nodes_per_dim == 0 {
            return Err(Error::InvalidInput("empty parameter grid".into()));
        }
        for &(lo, hi) in &bounds {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "bad parameter interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(ChebGrid {
            bounds,
            nodes_per_dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.nodes_per_dim.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-D nodes for a dimension, ordered ascending.
    pub fn nodes_1d(&self, dim: usize) -> Vec<f64> {
        let (lo, hi) = self.bounds[dim];
        let g = self.nodes_per_dim;
        if g == 1 {
            return vec![0.5 * (lo + hi)];
        }
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        // x_i = c - r cos(pi i/(g-1)) ascends with i
        (0..g)
            .map(|i| c - r * (std::f64::consts::PI * i as f64 / (g - 1) as f64).cos())
            .collect()
    }

    /// Full tensor node, row-major over dimensions (last dimension fastest).
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let g = self.nodes_per_dim;
        let d = self.dim();
        let mut idx = flat;
        let mut out = vec![0.0; d];
        for dim in (0..d).rev() {
            let i = idx % g;
            idx /= g;
            out[dim] = self.nodes_1d(dim)[i];
        }
        out
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|f| self.node(f)).collect()
    }

    /// Barycentric weights for Chebyshev–Lobatto nodes: `(-1)^i δ_i` with
    /// `δ = 1/2` at the endpoints.
    fn bary_weights(&self) -> Vec<f64> {
        let g = self.nodes_per_dim;
        (0..g)
            .map(|i| {
                let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
                if i == 0 || i == g - 1 {
                    w *= 0.5;
                }
                w
            })
            .collect()
    }

    /// Interpolation coefficients: weights `c_f` such that
    /// `p(x) = Σ_f c_f · sample_f` for any function sampled on the grid.
    /// Exact reproduction when `x` hits a node.
    pub fn interp_coeffs(&self, x: &[f64]) -> Vec<f64> {
        let g = self.nodes_per_dim;
        let d = self.dim();
        debug_assert_eq!(x.len(), d);
        let w = self.bary_weights();
        // per-dimension 1-D barycentric coefficients
        let mut per_dim: Vec<Vec<f64>> = Vec::with_capacity(d);
        for dim in 0..d {
            let nodes = self.nodes_1d(dim);
            let mut coeffs = vec![0.0; g];
            if g == 1 {
                coeffs[0] = 1.0;
            } else if let Some(hit) = nodes
                .iter()
                .position(|&t| (t - x[dim]).abs() < 1e-14 * (1.0 + t.abs()))
            {
                coeffs[hit] = 1.0;
            } else {
                let mut denom = 0.0;
                for i in 0..g {
                    let c = w[i] / (x[dim] - nodes[i]);
                    coeffs[i] = c;
                    denom += c;
                }
                for c in &mut coeffs {
                    *c /= denom;
                }
            }
            per_dim.push(coeffs);
        }
        // tensor product, row-major
        let mut out = vec![0.0; self.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut idx = flat;
            let mut prod = 1.0;
            for dim in (0..d).rev() {
                prod *= per_dim[dim][idx % g];
                idx /= g;
            }
            *slot = prod;
        }
        out
    }

    /// Interpolate scalar samples at a point.
    pub fn interp(&self, samples: &[f64], x: &[f64]) -> f64 {
        let c = self.interp_coeffs(x);
        c.iter().zip(samples).map(|(a, b)| a * b).sum()
    }
}
