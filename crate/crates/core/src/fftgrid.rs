//! Tensor evaluation grids over the active angles and the FFT bridge
//! between grid values and torus series coefficients.
//!
//! A grid covers only the angle dimensions that actually carry modes:
//! the active window slots (for `θ`) plus the full internal block (for
//! `x`). Sizes are powers of two at least twice the retained order plus
//! one, so the retained band is transformed exactly.

use crate::apseries::{Mode, TorusSeries, ZPoly};
use crate::error::{Error, Result};
use crate::lattice::ProductStructure;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    /// Window offsets of the active `θ` dimensions, ascending.
    pub theta_slots: Vec<usize>,
    /// Number of internal angle dimensions (always the full block).
    pub n_x: usize,
    /// Grid size per dimension, `θ` dims first, then `x` dims.
    pub sizes: Vec<usize>,
}

fn next_pow2(mut v: usize) -> usize {
    let mut p = 1;
    while p < v {
        p <<= 1;
        v = v.max(1);
    }
    p
}

impl GridSpec {
    /// Build a grid adapted to the actual mode content of the given
    /// series: per dimension, twice the maximum retained order plus one,
    /// rounded up to a power of two and clamped to `[min_size, max_size]`.
    pub fn for_series(series: &[&TorusSeries], min_size: usize, max_size: usize) -> GridSpec {
        let (window_len, n) = series
            .first()
            .map(|s| (s.window_len(), s.nvars()))
            .unwrap_or((0, 0));
        let mut active: BTreeSet<usize> = BTreeSet::new();
        let mut max_theta = vec![0i32; window_len];
        let mut max_x = vec![0i32; n];
        for s in series {
            for (mode, _) in s.modes() {
                for (i, &k) in mode.k.iter().enumerate() {
                    if k != 0 {
                        active.insert(i);
                        max_theta[i] = max_theta[i].max(k.abs());
                    }
                }
                for (i, &k) in mode.kt.iter().enumerate() {
                    max_x[i] = max_x[i].max(k.abs());
                }
            }
        }
        let theta_slots: Vec<usize> = active.into_iter().collect();
        let mut sizes = Vec::new();
        for &slot in &theta_slots {
            let need = 2 * max_theta[slot] as usize + 1;
            sizes.push(next_pow2(need).clamp(min_size, max_size));
        }
        for i in 0..n {
            let need = 2 * max_x[i] as usize + 1;
            sizes.push(next_pow2(need).clamp(min_size, max_size));
        }
        GridSpec {
            theta_slots,
            n_x: n,
            sizes,
        }
    }

    pub fn ndims(&self) -> usize {
        self.sizes.len()
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product::<usize>().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Multi-index of a flat node, row-major (last dimension fastest).
    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.ndims()];
        let mut rem = flat;
        for d in (0..self.ndims()).rev() {
            idx[d] = rem % self.sizes[d];
            rem /= self.sizes[d];
        }
        idx
    }

    /// Angle coordinates of a node: full-window `θ` (inactive slots at 0)
    /// and the `x` block.
    pub fn angles(&self, flat: usize, window_len: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.unflatten(flat);
        let mut theta = vec![0.0; window_len];
        for (d, &slot) in self.theta_slots.iter().enumerate() {
            theta[slot] = std::f64::consts::TAU * idx[d] as f64 / self.sizes[d] as f64;
        }
        let mut x = vec![0.0; self.n_x];
        let base = self.theta_slots.len();
        for i in 0..self.n_x {
            x[i] = std::f64::consts::TAU * idx[base + i] as f64 / self.sizes[base + i] as f64;
        }
        (theta, x)
    }

    /// Map an FFT bin to a signed frequency.
    fn bin_to_freq(size: usize, bin: usize) -> i32 {
        if bin <= size / 2 {
            bin as i32
        } else {
            bin as i32 - size as i32
        }
    }

    /// Grid-dimension frequencies of a mode, or `None` if the mode does
    /// not fit the band (inactive θ slots must carry zero).
    pub fn mode_to_freqs(&self, mode: &Mode) -> Option<Vec<i32>> {
        let mut freqs = Vec::with_capacity(self.ndims());
        let mut seen = vec![false; mode.k.len()];
        for (d, &slot) in self.theta_slots.iter().enumerate() {
            let k = mode.k[slot];
            seen[slot] = true;
            if 2 * k.unsigned_abs() as usize >= self.sizes[d] {
                return None;
            }
            freqs.push(k);
        }
        for (i, &k) in mode.k.iter().enumerate() {
            if !seen[i] && k != 0 {
                return None;
            }
        }
        let base = self.theta_slots.len();
        for (i, &k) in mode.kt.iter().enumerate() {
            if 2 * k.unsigned_abs() as usize >= self.sizes[base + i] {
                return None;
            }
            freqs.push(k);
        }
        Some(freqs)
    }
}

/// In-place multi-dimensional forward FFT (unnormalized).
fn fft_nd(values: &mut [Complex64], sizes: &[usize]) {
    let mut planner = FftPlanner::new();
    let total: usize = sizes.iter().product();
    debug_assert_eq!(values.len(), total);
    let mut stride = 1usize;
    for d in (0..sizes.len()).rev() {
        let n = sizes[d];
        let fft = planner.plan_fft_forward(n);
        let block = stride * n;
        let mut line = vec![Complex64::ZERO; n];
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for j in 0..n {
                    line[j] = values[base + off + j * stride];
                }
                fft.process(&mut line);
                for j in 0..n {
                    values[base + off + j * stride] = line[j];
                }
            }
        }
        stride *= n;
    }
}

/// Transform per-node scalar values into a torus series (z-degree 0),
/// assigning each surviving mode to its minimum-weight component and
/// pruning below `tol`.
pub fn grid_to_series(
    values: &[Complex64],
    grid: &GridSpec,
    structure: &Arc<ProductStructure>,
    tol: f64,
) -> Result<TorusSeries> {
    let node_polys: Vec<ZPoly> = values
        .iter()
        .map(|&v| ZPoly::constant(structure.n, v))
        .collect();
    polys_to_series(&node_polys, grid, structure, 0, tol)
}

/// Transform per-node z-polynomials into a torus series: one FFT per
/// occurring multi-degree.
pub fn polys_to_series(
    node_polys: &[ZPoly],
    grid: &GridSpec,
    structure: &Arc<ProductStructure>,
    z_cap: usize,
    tol: f64,
) -> Result<TorusSeries> {
    if node_polys.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} node values, got {}",
            grid.len(),
            node_polys.len()
        )));
    }
    let window_len = structure.base.window.len();
    let mut degrees: BTreeSet<Vec<u8>> = BTreeSet::new();
    for p in node_polys {
        for (deg, _) in p.terms() {
            degrees.insert(deg.clone());
        }
    }
    let mut out = TorusSeries::zero(structure.clone(), z_cap);
    let total = grid.len();
    let norm = 1.0 / total as f64;
    for deg in degrees {
        let mut values: Vec<Complex64> =
            node_polys.iter().map(|p| p.coeff(&deg)).collect();
        fft_nd(&mut values, &grid.sizes);
        for (flat, &c) in values.iter().enumerate() {
            let c = c * norm;
            if c.norm() <= tol {
                continue;
            }
            let idx = grid.unflatten(flat);
            let mut k = vec![0i32; window_len];
            for (d, &slot) in grid.theta_slots.iter().enumerate() {
                k[slot] = GridSpec::bin_to_freq(grid.sizes[d], idx[d]);
            }
            let base = grid.theta_slots.len();
            let mut kt = vec![0i32; grid.n_x];
            for i in 0..grid.n_x {
                kt[i] = GridSpec::bin_to_freq(grid.sizes[base + i], idx[base + i]);
            }
            out.insert(Mode { k, kt }, ZPoly::monomial(structure.n, deg.clone(), c))?;
        }
    }
    Ok(out)
}

/// Per-dimension root-of-unity tables for fast phase evaluation on grid
/// nodes: `table[d][m] = exp(2πi m / N_d)`.
pub struct PhaseTable {
    tables: Vec<Vec<Complex64>>,
}

impl PhaseTable {
    pub fn new(grid: &GridSpec) -> Self {
        let tables = grid
            .sizes
            .iter()
            .map(|&n| {
                (0..n)
                    .map(|m| {
                        Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / n as f64)
                    })
                    .collect()
            })
            .collect();
        PhaseTable { tables }
    }

    /// `exp(i Σ_d freq_d · angle_d)` at a node, with angles the grid
    /// coordinates.
    pub fn phase(&self, grid: &GridSpec, node_idx: &[usize], freqs: &[i32]) -> Complex64 {
        let mut out = Complex64::ONE;
        for d in 0..freqs.len() {
            let n = grid.sizes[d] as i64;
            let m = ((node_idx[d] as i64 * freqs[d] as i64) % n + n) % n;
            out *= self.tables[d][m as usize];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{IndexWindow, SpatialStructure};
    use approx::assert_relative_eq;

    fn structure() -> Arc<ProductStructure> {
        let s = SpatialStructure::new(
            IndexWindow::new(0, 1).unwrap(),
            vec![vec![0], vec![1], vec![0, 1]],
            3.0,
        )
        .unwrap();
        Arc::new(ProductStructure::new(s, 1).unwrap())
    }

    #[test]
    fn round_trip_single_mode() {
        let st = structure();
        let f = TorusSeries::real_mode(
            st.clone(),
            2,
            Mode {
                k: vec![1, 0],
                kt: vec![2],
            },
            ZPoly::constant(1, Complex64::ONE),
            0.7,
        )
        .unwrap();
        let grid = GridSpec::for_series(&[&f], 8, 64);
        assert_eq!(grid.theta_slots, vec![0]);
        let values: Vec<Complex64> = (0..grid.len())
            .map(|flat| {
                let (theta, x) = grid.angles(flat, 2);
                f.eval(&theta, &x, &[Complex64::ZERO])
            })
            .collect();
        let back = grid_to_series(&values, &grid, &st, 1e-14).unwrap();
        let d = back.sub(&f).unwrap();
        assert!(d.max_abs() < 1e-13, "defect {}", d.max_abs());
    }

    #[test]
    fn round_trip_z_polynomial_values() {
        let st = structure();
        let mut f = TorusSeries::zero(st.clone(), 3);
        let mut p = ZPoly::constant(1, Complex64::new(0.25, 0.0));
        p.add_term(vec![1], Complex64::new(0.5, 0.0));
        p.add_term(vec![2], Complex64::new(-0.125, 0.0));
        f.insert(
            Mode {
                k: vec![0, 1],
                kt: vec![-1],
            },
            p.clone(),
        )
        .unwrap();
        f.insert(
            Mode {
                k: vec![0, -1],
                kt: vec![1],
            },
            p.conj(),
        )
        .unwrap();
        let grid = GridSpec::for_series(&[&f], 8, 64);
        let node_polys: Vec<ZPoly> = (0..grid.len())
            .map(|flat| {
                let (theta, x) = grid.angles(flat, 2);
                // evaluate the angle part only, keep z symbolic
                let mut acc = ZPoly::zero(1);
                for (mode, poly) in f.modes() {
                    let mut phase = 0.0;
                    for (i, &k) in mode.k.iter().enumerate() {
                        phase += k as f64 * theta[i];
                    }
                    phase += mode.kt[0] as f64 * x[0];
                    acc.add_scaled(poly, Complex64::from_polar(1.0, phase));
                }
                acc
            })
            .collect();
        let back = polys_to_series(&node_polys, &grid, &st, 3, 1e-14).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn phase_table_matches_direct() {
        let st = structure();
        let f = TorusSeries::real_mode(
            st.clone(),
            0,
            Mode {
                k: vec![2, 1],
                kt: vec![-1],
            },
            ZPoly::constant(1, Complex64::ONE),
            1.0,
        )
        .unwrap();
        let grid = GridSpec::for_series(&[&f], 8, 64);
        let pt = PhaseTable::new(&grid);
        for flat in [0usize, 3, 17, grid.len() - 1] {
            let idx = grid.unflatten(flat);
            let (theta, x) = grid.angles(flat, 2);
            for (mode, _) in f.modes() {
                let freqs = grid.mode_to_freqs(mode).unwrap();
                let got = pt.phase(&grid, &idx, &freqs);
                let mut phase = 0.0;
                for (i, &k) in mode.k.iter().enumerate() {
                    phase += k as f64 * theta[i];
                }
                phase += mode.kt[0] as f64 * x[0];
                let want = Complex64::from_polar(1.0, phase);
                assert_relative_eq!(got.re, want.re, epsilon = 1e-12);
                assert_relative_eq!(got.im, want.im, epsilon = 1e-12);
            }
        }
    }
}
