//! Torus Fourier–Taylor series over the product structure: construction,
//! evaluation, ring operations, derivatives, Poisson bracket, and the
//! weighted norms.

use super::poly::ZPoly;
use crate::error::{Error, Result};
use crate::lattice::ProductStructure;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Fourier mode `(k, k̃)`: `k` dense over the window, `k̃` over the angle
/// block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub k: Vec<i32>,
    pub kt: Vec<i32>,
}

impl Mode {
    pub fn zero(window_len: usize, n: usize) -> Self {
        Mode {
            k: vec![0; window_len],
            kt: vec![0; n],
        }
    }

    /// `|k| + |k̃|`.
    pub fn order(&self) -> u32 {
        self.k.iter().map(|v| v.unsigned_abs()).sum::<u32>()
            + self.kt.iter().map(|v| v.unsigned_abs()).sum::<u32>()
    }

    pub fn is_zero(&self) -> bool {
        self.k.iter().all(|&v| v == 0) && self.kt.iter().all(|&v| v == 0)
    }

    pub fn neg(&self) -> Mode {
        Mode {
            k: self.k.iter().map(|v| -v).collect(),
            kt: self.kt.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &Mode) -> Mode {
        Mode {
            k: self.k.iter().zip(&other.k).map(|(a, b)| a + b).collect(),
            kt: self.kt.iter().zip(&other.kt).map(|(a, b)| a + b).collect(),
        }
    }

    /// Window sites where `k` is nonzero.
    pub fn k_support(&self, window_lo: i64) -> Vec<i64> {
        self.k
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| window_lo + i as i64)
            .collect()
    }
}

/// Differentiation variable selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    /// `∂/∂θ_λ`, by window offset.
    Theta(usize),
    /// `∂/∂x_i`.
    X(usize),
    /// `∂/∂z_i`.
    Z(usize),
}

/// Analyticity record carried by Hamiltonians: weight-norm exponent `m`,
/// angle strip `r`, action radius `s`, parameter fattening `h`, and the
/// residual weight exponent `w`.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct Domain {
    pub m: f64,
    pub r: f64,
    pub s: f64,
    pub h: f64,
    pub w: f64,
}

/// A finite torus Fourier–Taylor series
/// `Σ P_{k,k̃}(z) e^{i(⟨k,θ⟩ + ⟨k̃,x⟩)}` with `z`-polynomial coefficients.
///
/// Modes are stored flat; the component (the minimum-weight covering
/// product set) is derived from the mode support when norms are taken.
#[derive(Clone, Debug)]
pub struct TorusSeries {
    pub structure: Arc<ProductStructure>,
    pub z_cap: usize,
    modes: BTreeMap<Mode, ZPoly>,
}

impl TorusSeries {
    pub fn zero(structure: Arc<ProductStructure>, z_cap: usize) -> Self {
        TorusSeries {
            structure,
            z_cap,
            modes: BTreeMap::new(),
        }
    }

    pub fn window_len(&self) -> usize {
        self.structure.base.window.len()
    }

    pub fn nvars(&self) -> usize {
        self.structure.n
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &ZPoly)> {
        self.modes.iter()
    }

    pub fn get(&self, mode: &Mode) -> Option<&ZPoly> {
        self.modes.get(mode)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    fn compatible(&self, other: &TorusSeries) -> Result<()> {
        if Arc::ptr_eq(&self.structure, &other.structure) {
            return Ok(());
        }
        let a = &self.structure;
        let b = &other.structure;
        if a.base.window == b.base.window
            && a.base.subsets == b.base.subsets
            && a.n == b.n
            && a.angle_offset == b.angle_offset
        {
            return Ok(());
        }
        Err(Error::StructureMismatch(
            "series built over different product structures".into(),
        ))
    }

    /// Insert (accumulate) a coefficient polynomial at a mode. The mode
    /// support must be covered by the structure.
    pub fn insert(&mut self, mode: Mode, poly: ZPoly) -> Result<()> {
        debug_assert_eq!(mode.k.len(), self.window_len());
        debug_assert_eq!(mode.kt.len(), self.nvars());
        let support = mode.k_support(self.structure.base.window.lo);
        self.structure
            .pair_min_cover(&support)
            .map_err(|_| Error::SupportOverflow { support })?;
        if poly.is_zero() {
            return Ok(());
        }
        match self.modes.entry(mode) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(poly);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_scaled(&poly, Complex64::ONE);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
        Ok(())
    }

    /// Component owning a mode: index of the minimum-weight covering
    /// product set.
    pub fn bin_of(&self, mode: &Mode) -> usize {
        let support = mode.k_support(self.structure.base.window.lo);
        self.structure
            .pair_min_cover(&support)
            .expect("stored mode must be covered")
    }

    /// Real cosine-type helper: `amp · cos(⟨k,θ⟩ + ⟨k̃,x⟩)` times a
    /// z-polynomial with real coefficients.
    pub fn real_mode(
        structure: Arc<ProductStructure>,
        z_cap: usize,
        mode: Mode,
        poly: ZPoly,
        amp: f64,
    ) -> Result<Self> {
        let mut s = TorusSeries::zero(structure, z_cap);
        let half = poly.scale(Complex64::new(0.5 * amp, 0.0));
        s.insert(mode.neg(), half.conj())?;
        s.insert(mode, half)?;
        Ok(s)
    }

    // -- evaluation -----------------------------------------------------

    /// Evaluate at real angles and complex actions.
    pub fn eval(&self, theta: &[f64], x: &[f64], z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(theta.len(), self.window_len());
        debug_assert_eq!(x.len(), self.nvars());
        let mut total = Complex64::ZERO;
        for (mode, poly) in &self.modes {
            let mut phase = 0.0;
            for (i, &k) in mode.k.iter().enumerate() {
                phase += k as f64 * theta[i];
            }
            for (i, &k) in mode.kt.iter().enumerate() {
                phase += k as f64 * x[i];
            }
            total += poly.eval(z) * Complex64::from_polar(1.0, phase);
        }
        total
    }

    /// Evaluate a real-valued series at a real point, enforcing that the
    /// imaginary residue stays below 1e-12 relative.
    pub fn eval_real(&self, theta: &[f64], x: &[f64], z: &[f64]) -> Result<f64> {
        let zc: Vec<Complex64> = z.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let v = self.eval(theta, x, &zc);
        let scale = v.re.abs().max(self.max_abs()).max(1.0);
        if v.im.abs() > 1e-12 * scale {
            return Err(Error::DomainViolation(format!(
                "imaginary residue {:.3e} on a real-valued series",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Domain check for evaluation points.
    pub fn check_domain(&self, z: &[f64], domain: &Domain) -> Result<()> {
        let sup = z.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if sup > domain.s {
            return Err(Error::DomainViolation(format!(
                "|z| = {sup:.6e} exceeds the action radius s = {:.6e}",
                domain.s
            )));
        }
        Ok(())
    }

    // -- norms ------------------------------------------------------------

    /// `‖P_Ã‖_{r,s} = Σ |P_{k,k̃}|_s e^{r(|k|+|k̃|)}` for the component
    /// owning the given product-set index, with `|·|_s` the coefficient
    /// majorant.
    pub fn norm_component(&self, subset_idx: usize, r: f64, s: f64) -> f64 {
        self.modes
            .iter()
            .filter(|(m, _)| self.bin_of(m) == subset_idx)
            .map(|(m, p)| p.majorant(s) * (r * m.order() as f64).exp())
            .sum()
    }

    /// `|||P|||_{m,r,s} = Σ_Ã ‖P_Ã‖_{r,s} e^{m[Ã]}`.
    pub fn norm_total(&self, m: f64, r: f64, s: f64) -> f64 {
        self.modes
            .iter()
            .map(|(mode, p)| {
                let w = self.structure.product_weight(self.bin_of(mode));
                p.majorant(s) * (r * mode.order() as f64).exp() * (m * w).exp()
            })
            .sum()
    }

    /// Plain coefficient-majorant sum: an upper bound for the sup norm on
    /// the real torus times the polydisc `|z| ≤ s`.
    pub fn sup_majorant(&self, s: f64) -> f64 {
        self.modes.values().map(|p| p.majorant(s)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.values().map(|p| p.max_abs()).fold(0.0, f64::max)
    }

    // -- ring operations ---------------------------------------------------

    pub fn add(&self, other: &TorusSeries) -> Result<TorusSeries> {
        self.compatible(other)?;
        let mut out = self.clone();
        out.z_cap = self.z_cap.max(other.z_cap);
        for (mode, poly) in &other.modes {
            out.insert(mode.clone(), poly.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> TorusSeries {
        let mut out = TorusSeries::zero(self.structure.clone(), self.z_cap);
        for (mode, poly) in &self.modes {
            let p = poly.scale(c);
            if !p.is_zero() {
                out.modes.insert(mode.clone(), p);
            }
        }
        out
    }

    pub fn sub(&self, other: &TorusSeries) -> Result<TorusSeries> {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Support-wise convolution. The product of modes is assigned to the
    /// minimum-weight covering product set; `SupportOverflow` if the
    /// summed support is covered by no subset.
    pub fn multiply(
        &self,
        other: &TorusSeries,
        z_cap: usize,
        order_cap: Option<u32>,
    ) -> Result<TorusSeries> {
        self.compatible(other)?;
        let mut out = TorusSeries::zero(self.structure.clone(), z_cap);
        for (m1, p1) in &self.modes {
            for (m2, p2) in &other.modes {
                let mode = m1.add(m2);
                if let Some(cap) = order_cap {
                    if mode.order() > cap {
                        continue;
                    }
                }
                let poly = p1.mul(p2, z_cap);
                out.insert(mode, poly)?;
            }
        }
        Ok(out)
    }

    /// `∂/∂θ_λ` multiplies by `i k_λ`; `∂/∂x_i` by `i k̃_i`; `∂/∂z_i`
    /// lowers the polynomial degree.
    pub fn derivative(&self, var: Var) -> TorusSeries {
        let mut out = TorusSeries::zero(self.structure.clone(), self.z_cap);
        for (mode, poly) in &self.modes {
            let (m, p) = match var {
                Var::Theta(off) => {
                    let k = mode.k[off];
                    if k == 0 {
                        continue;
                    }
                    (
                        mode.clone(),
                        poly.scale(Complex64::new(0.0, k as f64)),
                    )
                }
                Var::X(i) => {
                    let k = mode.kt[i];
                    if k == 0 {
                        continue;
                    }
                    (
                        mode.clone(),
                        poly.scale(Complex64::new(0.0, k as f64)),
                    )
                }
                Var::Z(i) => {
                    let d = poly.derivative(i);
                    if d.is_zero() {
                        continue;
                    }
                    (mode.clone(), d)
                }
            };
            out.modes.insert(m, p);
        }
        out
    }

    /// Poisson bracket in the `(x, z)` pairs:
    /// `{f, g} = Σ_i (∂_{x_i} f ∂_{z_i} g − ∂_{z_i} f ∂_{x_i} g)`.
    ///
    /// The `(θ, J)` pairs contribute nothing for stored series (they
    /// carry no `J` dependence); the normal-form contribution
    /// `⟨ω,∂_θ f⟩ + ⟨ω̃,∂_x f⟩` is assembled by the KAM layer.
    pub fn poisson_bracket(
        &self,
        other: &TorusSeries,
        z_cap: usize,
        order_cap: Option<u32>,
    ) -> Result<TorusSeries> {
        self.compatible(other)?;
        let mut out = TorusSeries::zero(self.structure.clone(), z_cap);
        for i in 0..self.nvars() {
            let a = self
                .derivative(Var::X(i))
                .multiply(&other.derivative(Var::Z(i)), z_cap, order_cap)?;
            let b = self
                .derivative(Var::Z(i))
                .multiply(&other.derivative(Var::X(i)), z_cap, order_cap)?;
            out = out.add(&a)?.sub(&b)?;
        }
        Ok(out)
    }

    /// Drop coefficients below an absolute threshold.
    pub fn prune(&mut self, tol: f64) {
        let mut dead = Vec::new();
        for (mode, poly) in self.modes.iter_mut() {
            poly.prune(tol);
            if poly.is_zero() {
                dead.push(mode.clone());
            }
        }
        for m in dead {
            self.modes.remove(&m);
        }
    }

    /// Largest deviation from conjugate symmetry
    /// `c_{−(k,k̃)} = conj(c_{(k,k̃)})`.
    pub fn realness_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (mode, poly) in &self.modes {
            let neg = mode.neg();
            let mirror = self.modes.get(&neg);
            for (deg, c) in poly.terms() {
                let m = mirror
                    .map(|p| p.coeff(deg))
                    .unwrap_or(Complex64::ZERO);
                worst = worst.max((m.conj() - c).norm());
            }
        }
        worst
    }

    /// Project onto the real (conjugate-symmetric) part.
    pub fn conj_symmetrize(&self) -> TorusSeries {
        let mut out = TorusSeries::zero(self.structure.clone(), self.z_cap);
        for (mode, poly) in &self.modes {
            let neg = mode.neg();
            let mirrored = self
                .modes
                .get(&neg)
                .cloned()
                .unwrap_or_else(|| ZPoly::zero(self.nvars()));
            let mut avg = poly.clone();
            avg.add_scaled(&mirrored.conj(), Complex64::ONE);
            let avg = avg.scale(Complex64::new(0.5, 0.0));
            if !avg.is_zero() {
                out.modes.insert(mode.clone(), avg);
            }
        }
        out
    }

    // -- structure-aware views ----------------------------------------------

    /// The mean `z`-polynomial (the `(0,0)` mode).
    pub fn mean(&self) -> ZPoly {
        let zero = Mode::zero(self.window_len(), self.nvars());
        self.modes
            .get(&zero)
            .cloned()
            .unwrap_or_else(|| ZPoly::zero(self.nvars()))
    }

    /// Series of coefficients at a fixed `z` multi-degree (the result has
    /// `z_cap = 0`).
    pub fn z_slice(&self, deg: &[u8]) -> TorusSeries {
        let mut out = TorusSeries::zero(self.structure.clone(), 0);
        for (mode, poly) in &self.modes {
            let c = poly.coeff(deg);
            if c != Complex64::ZERO {
                out.modes
                    .insert(mode.clone(), ZPoly::constant(self.nvars(), c));
            }
        }
        out
    }

    /// Retain only modes passing the filter (used by truncation).
    pub fn filter_modes(&self, keep: impl Fn(&Mode, &ZPoly) -> bool) -> TorusSeries {
        let mut out = TorusSeries::zero(self.structure.clone(), self.z_cap);
        for (mode, poly) in &self.modes {
            if keep(mode, poly) {
                out.modes.insert(mode.clone(), poly.clone());
            }
        }
        out
    }

    /// Map every coefficient polynomial (used by truncation to strip
    /// high z-degrees).
    pub fn map_polys(&self, f: impl Fn(&Mode, &ZPoly) -> ZPoly) -> TorusSeries {
        let mut out = TorusSeries::zero(self.structure.clone(), self.z_cap);
        for (mode, poly) in &self.modes {
            let p = f(mode, poly);
            if !p.is_zero() {
                out.modes.insert(mode.clone(), p);
            }
        }
        out
    }

    pub fn max_order(&self) -> u32 {
        self.modes.keys().map(|m| m.order()).max().unwrap_or(0)
    }

    pub fn max_z_degree(&self) -> usize {
        self.modes.values().map(|p| p.degree()).max().unwrap_or(0)
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

    fn cosine(st: &Arc<ProductStructure>, k: Vec<i32>, kt: Vec<i32>, amp: f64) -> TorusSeries {
        TorusSeries::real_mode(
            st.clone(),
            4,
            Mode { k, kt },
            ZPoly::constant(1, Complex64::ONE),
            amp,
        )
        .unwrap()
    }

    #[test]
    fn zero_series_evaluates_to_zero() {
        let st = structure();
        let s = TorusSeries::zero(st, 4);
        assert_eq!(
            s.eval(&[0.3, 0.7], &[0.1], &[Complex64::ZERO]),
            Complex64::ZERO
        );
    }

    #[test]
    fn conjugate_pair_gives_cosine() {
        let st = structure();
        // cos(theta_0 + 2 x_1) at theta_0 = pi/3, x_1 = pi/6 -> cos(2pi/3) = -1/2
        let s = cosine(&st, vec![1, 0], vec![2], 1.0);
        let v = s
            .eval_real(
                &[std::f64::consts::PI / 3.0, 0.0],
                &[std::f64::consts::PI / 6.0],
                &[0.0],
            )
            .unwrap();
        assert_relative_eq!(v, -0.5, epsilon = 1e-14);
        // phase zero gives 1
        let one = s.eval_real(&[0.0, 0.0], &[0.0], &[0.0]).unwrap();
        assert_relative_eq!(one, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn norm_component_single_coefficient() {
        let st = structure();
        let mut s = TorusSeries::zero(st.clone(), 4);
        // coefficient c at order 3, constant in z
        let mode = Mode {
            k: vec![1, 0],
            kt: vec![2],
        };
        s.insert(mode.clone(), ZPoly::constant(1, Complex64::new(2.0, 0.0)))
            .unwrap();
        let r = 0.4;
        let idx = s.bin_of(&mode);
        assert_relative_eq!(
            s.norm_component(idx, r, 0.5),
            2.0 * (3.0 * r).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn norm_component_majorant_of_one_plus_z() {
        let st = structure();
        let mut s = TorusSeries::zero(st, 4);
        let mut p = ZPoly::constant(1, Complex64::ONE);
        p.add_term(vec![1], Complex64::ONE);
        let zero = Mode::zero(2, 1);
        s.insert(zero.clone(), p).unwrap();
        let idx = s.bin_of(&zero);
        assert_relative_eq!(s.norm_component(idx, 0.3, 0.5), 1.5, max_relative = 1e-14);
    }

    #[test]
    fn norm_total_weights_by_component() {
        let st = structure();
        let mut s = TorusSeries::zero(st.clone(), 4);
        let mode = Mode {
            k: vec![0, 0],
            kt: vec![0],
        };
        s.insert(mode, ZPoly::constant(1, Complex64::new(2.0, 0.0)))
            .unwrap();
        // weight of the min-cover product set for empty k-support
        let w = st.pair_weight(&[]).unwrap();
        assert_relative_eq!(
            s.norm_total(0.5, 0.3, 0.1),
            2.0 * (0.5 * w).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn triangle_inequality_and_homogeneity() {
        let st = structure();
        let f = cosine(&st, vec![1, 0], vec![1], 0.7);
        let g = cosine(&st, vec![0, 1], vec![-1], 0.4);
        let (m, r, s) = (0.45, 0.3, 0.2);
        let nf = f.norm_total(m, r, s);
        let ng = g.norm_total(m, r, s);
        let nsum = f.add(&g).unwrap().norm_total(m, r, s);
        assert!(nsum <= nf + ng + 1e-14);
        let scaled = f.scale(Complex64::new(-2.5, 0.0));
        assert_relative_eq!(scaled.norm_total(m, r, s), 2.5 * nf, max_relative = 1e-13);
    }

    #[test]
    fn add_identity_and_support_cancellation() {
        let st = structure();
        let f = cosine(&st, vec![1, 0], vec![0], 1.0);
        let zero = TorusSeries::zero(st.clone(), 4);
        let sum = f.add(&zero).unwrap();
        assert_eq!(sum.num_modes(), f.num_modes());
        // e^{i theta_0} * e^{-i theta_0} = 1
        let mut ep = TorusSeries::zero(st.clone(), 4);
        ep.insert(
            Mode {
                k: vec![1, 0],
                kt: vec![0],
            },
            ZPoly::constant(1, Complex64::ONE),
        )
        .unwrap();
        let mut em = TorusSeries::zero(st.clone(), 4);
        em.insert(
            Mode {
                k: vec![-1, 0],
                kt: vec![0],
            },
            ZPoly::constant(1, Complex64::ONE),
        )
        .unwrap();
        let prod = ep.multiply(&em, 4, None).unwrap();
        assert_eq!(prod.num_modes(), 1);
        assert_relative_eq!(
            prod.eval_real(&[0.9, 0.1], &[0.2], &[0.0]).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn product_of_cosines() {
        let st = structure();
        // cos(theta_0)^2 = 1/2 + cos(2 theta_0)/2
        let f = cosine(&st, vec![1, 0], vec![0], 1.0);
        let sq = f.multiply(&f, 4, None).unwrap();
        for th in [0.0, 0.3, 1.1, 2.9] {
            let got = sq.eval_real(&[th, 0.0], &[0.0], &[0.0]).unwrap();
            assert_relative_eq!(got, th.cos().powi(2), epsilon = 1e-13);
        }
    }

    #[test]
    fn multiply_commutative_and_associative_below_caps() {
        let st = structure();
        let f = cosine(&st, vec![1, 0], vec![0], 0.8);
        let g = cosine(&st, vec![0, 1], vec![1], 0.5);
        let h = cosine(&st, vec![0, 0], vec![2], 0.3);
        let fg = f.multiply(&g, 8, None).unwrap();
        let gf = g.multiply(&f, 8, None).unwrap();
        let d = fg.sub(&gf).unwrap();
        assert!(d.max_abs() < 1e-15);
        let fg_h = fg.multiply(&h, 8, None).unwrap();
        let f_gh = f
            .multiply(&g.multiply(&h, 8, None).unwrap(), 8, None)
            .unwrap();
        assert!(fg_h.sub(&f_gh).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn derivative_of_constant_and_single_mode() {
        let st = structure();
        let c = cosine(&st, vec![0, 0], vec![0], 3.0);
        assert!(c.derivative(Var::Theta(0)).is_zero());
        // d/dtheta_0 e^{2 i theta_0} = 2i e^{2 i theta_0}
        let mut s = TorusSeries::zero(st, 4);
        s.insert(
            Mode {
                k: vec![2, 0],
                kt: vec![0],
            },
            ZPoly::constant(1, Complex64::ONE),
        )
        .unwrap();
        let d = s.derivative(Var::Theta(0));
        let got = d.get(&Mode {
            k: vec![2, 0],
            kt: vec![0],
        });
        assert_eq!(got.unwrap().coeff(&[0]), Complex64::new(0.0, 2.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let st = structure();
        let f = cosine(&st, vec![1, -1], vec![2], 0.9);
        let d = f.derivative(Var::X(0));
        let h = 1e-5;
        let mut rng_state = 0x243F6A88u64;
        let mut rnd = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU
        };
        for _ in 0..100 {
            let th = [rnd(), rnd()];
            let x = [rnd()];
            let fp = f.eval_real(&th, &[x[0] + h], &[0.0]).unwrap();
            let fm = f.eval_real(&th, &[x[0] - h], &[0.0]).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let an = d.eval_real(&th, &x, &[0.0]).unwrap();
            assert_relative_eq!(an, fd, epsilon = 1e-7, max_relative = 1e-7);
        }
    }

    #[test]
    fn bracket_antisymmetry_and_sign_convention() {
        let st = structure();
        let f = cosine(&st, vec![1, 0], vec![1], 0.6);
        let ff = f.poisson_bracket(&f, 6, None).unwrap();
        assert!(ff.max_abs() < 1e-15);
        // {z_1, sin x_1} = -cos x_1 under the convention
        // {F,G} = <dF/dx, dG/dz> - <dF/dz, dG/dx>
        let mut z1 = TorusSeries::zero(st.clone(), 4);
        z1.insert(Mode::zero(2, 1), ZPoly::linear(1, 0, Complex64::ONE))
            .unwrap();
        // sin x_1 = (e^{ix} - e^{-ix}) / 2i
        let mut sinx = TorusSeries::zero(st.clone(), 4);
        sinx.insert(
            Mode {
                k: vec![0, 0],
                kt: vec![1],
            },
            ZPoly::constant(1, Complex64::new(0.0, -0.5)),
        )
        .unwrap();
        sinx.insert(
            Mode {
                k: vec![0, 0],
                kt: vec![-1],
            },
            ZPoly::constant(1, Complex64::new(0.0, 0.5)),
        )
        .unwrap();
        let br = z1.poisson_bracket(&sinx, 4, None).unwrap();
        for x in [0.0, 0.7, 2.2] {
            let got = br.eval_real(&[0.0, 0.0], &[x], &[0.0]).unwrap();
            assert_relative_eq!(got, -x.cos(), epsilon = 1e-13);
        }
    }

    #[test]
    fn jacobi_identity() {
        let st = structure();
        let mut f = cosine(&st, vec![1, 0], vec![1], 0.4);
        f = f
            .add(&TorusSeries::real_mode(
                st.clone(),
                4,
                Mode {
                    k: vec![0, 0],
                    kt: vec![1],
                },
                ZPoly::linear(1, 0, Complex64::ONE),
                0.3,
            )
            .unwrap())
            .unwrap();
        let g = TorusSeries::real_mode(
            st.clone(),
            4,
            Mode {
                k: vec![0, 1],
                kt: vec![-1],
            },
            {
                let mut p = ZPoly::constant(1, Complex64::ONE);
                p.add_term(vec![2], Complex64::new(0.5, 0.0));
                p
            },
            0.5,
        )
        .unwrap();
        let h = cosine(&st, vec![0, 0], vec![2], 0.6);
        let cap = 10usize;
        let j1 = f
            .poisson_bracket(&g.poisson_bracket(&h, cap, None).unwrap(), cap, None)
            .unwrap();
        let j2 = g
            .poisson_bracket(&h.poisson_bracket(&f, cap, None).unwrap(), cap, None)
            .unwrap();
        let j3 = h
            .poisson_bracket(&f.poisson_bracket(&g, cap, None).unwrap(), cap, None)
            .unwrap();
        let total = j1.add(&j2).unwrap().add(&j3).unwrap();
        assert!(total.max_abs() < 1e-10, "jacobi residual {}", total.max_abs());
    }

    #[test]
    fn realness_defect_detects_asymmetry() {
        let st = structure();
        let f = cosine(&st, vec![1, 0], vec![0], 1.0);
        assert!(f.realness_defect() < 1e-15);
        let mut bad = TorusSeries::zero(st, 4);
        bad.insert(
            Mode {
                k: vec![1, 0],
                kt: vec![0],
            },
            ZPoly::constant(1, Complex64::new(0.0, 1.0)),
        )
        .unwrap();
        assert!(bad.realness_defect() > 0.5);
        assert!(bad.conj_symmetrize().realness_defect() < 1e-15);
    }

    #[test]
    fn support_overflow_detected() {
        // structure without the union set {0,1}
        let s = SpatialStructure::new(
            IndexWindow::new(0, 1).unwrap(),
            vec![vec![0], vec![1]],
            3.0,
        )
        .unwrap();
        let st = Arc::new(ProductStructure::new(s, 1).unwrap());
        let f = cosine(&st, vec![1, 0], vec![0], 1.0);
        let g = cosine(&st, vec![0, 1], vec![0], 1.0);
        assert!(matches!(
            f.multiply(&g, 4, None),
            Err(Error::SupportOverflow { .. })
        ));
    }
}
