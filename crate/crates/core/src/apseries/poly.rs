//! Polynomial coefficients in the action-like variables `z ∈ ℂⁿ`,
//! truncated at a total-degree cap.

use num_complex::Complex64;
use std::collections::BTreeMap;

/// Multivariate polynomial in `z` with complex coefficients, keyed by
/// multi-degree. Terms with coefficient exactly zero are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ZPoly {
    n: usize,
    terms: BTreeMap<Vec<u8>, Complex64>,
}

impl ZPoly {
    pub fn zero(n: usize) -> Self {
        ZPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = ZPoly::zero(n);
        if c != Complex64::ZERO {
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    /// The monomial `c · z_i`.
    pub fn linear(n: usize, i: usize, c: Complex64) -> Self {
        let mut deg = vec![0u8; n];
        deg[i] = 1;
        let mut p = ZPoly::zero(n);
        if c != Complex64::ZERO {
            p.terms.insert(deg, c);
        }
        p
    }

    pub fn monomial(n: usize, deg: Vec<u8>, c: Complex64) -> Self {
        debug_assert_eq!(deg.len(), n);
        let mut p = ZPoly::zero(n);
        if c != Complex64::ZERO {
            p.terms.insert(deg, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, deg: &[u8]) -> Complex64 {
        self.terms.get(deg).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Complex64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|d| d.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, deg: Vec<u8>, c: Complex64) {
        let entry = self.terms.entry(deg).or_insert(Complex64::ZERO);
        *entry += c;
        if *entry == Complex64::ZERO {
            // re-fetch key to remove; cheap since map is tiny
            let dead: Vec<Vec<u8>> = self
                .terms
                .iter()
                .filter(|(_, v)| **v == Complex64::ZERO)
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ZPoly, scale: Complex64) {
        for (deg, c) in &other.terms {
            self.add_term(deg.clone(), c * scale);
        }
    }

    pub fn scale(&self, c: Complex64) -> ZPoly {
        let mut out = ZPoly::zero(self.n);
        for (deg, v) in &self.terms {
            if v * c != Complex64::ZERO {
                out.terms.insert(deg.clone(), v * c);
            }
        }
        out
    }

    pub fn conj(&self) -> ZPoly {
        let mut out = ZPoly::zero(self.n);
        for (deg, v) in &self.terms {
            out.terms.insert(deg.clone(), v.conj());
        }
        out
    }

    /// Product truncated at total degree `cap`.
    pub fn mul(&self, other: &ZPoly, cap: usize) -> ZPoly {
        let mut out = ZPoly::zero(self.n);
        for (d1, c1) in &self.terms {
            let o1: usize = d1.iter().map(|&x| x as usize).sum();
            for (d2, c2) in &other.terms {
                let o2: usize = d2.iter().map(|&x| x as usize).sum();
                if o1 + o2 > cap {
                    continue;
                }
                let deg: Vec<u8> = d1.iter().zip(d2).map(|(a, b)| a + b).collect();
                out.add_term(deg, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂z_i`, lowering the degree.
    pub fn derivative(&self, i: usize) -> ZPoly {
        let mut out = ZPoly::zero(self.n);
        for (deg, c) in &self.terms {
            if deg[i] == 0 {
                continue;
            }
            let mut d = deg.clone();
            d[i] -= 1;
            out.add_term(d, c * deg[i] as f64);
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.n);
        let mut total = Complex64::ZERO;
        for (deg, c) in &self.terms {
            let mut term = *c;
            for (i, &d) in deg.iter().enumerate() {
                for _ in 0..d {
                    term *= z[i];
                }
            }
            total += term;
        }
        total
    }

    /// Coefficient majorant `Σ |c_deg| s^{|deg|}`; dominates the sup over
    /// the polydisc `|z| < s`.
    pub fn majorant(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|(deg, c)| {
                let o: usize = deg.iter().map(|&x| x as usize).sum();
                c.norm() * s.powi(o as i32)
            })
            .sum()
    }

    /// Substitute the affine map `z_i = a_i + Σ_j b[i][j] z̃_j`, truncated
    /// at `cap`.
    pub fn substitute_affine(&self, a: &[Complex64], b: &[Vec<Complex64>], cap: usize) -> ZPoly {
        let n = self.n;
        debug_assert_eq!(a.len(), n);
        // affine polynomials for each variable
        let affine: Vec<ZPoly> = (0..n)
            .map(|i| {
                let mut p = ZPoly::constant(n, a[i]);
                for j in 0..n {
                    p.add_term(
                        {
                            let mut d = vec![0u8; n];
                            d[j] = 1;
                            d
                        },
                        b[i][j],
                    );
                }
                p
            })
            .collect();
        let mut out = ZPoly::zero(n);
        for (deg, c) in &self.terms {
            let mut term = ZPoly::constant(n, *c);
            for (i, &d) in deg.iter().enumerate() {
                for _ in 0..d {
                    term = term.mul(&affine[i], cap);
                }
            }
            out.add_scaled(&term, Complex64::ONE);
        }
        out
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
