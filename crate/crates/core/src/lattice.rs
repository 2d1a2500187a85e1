//! Finite-truncation model of the bilateral index lattice: the active
//! window, integer index vectors, spatial structures with their weights,
//! and distribution counts.
//!
//! Everything lives on a finite window `Λ = [lo, hi] ⊂ ℤ`. The weight of
//! a finite subset `A` is `[A] = 1 + Σ_{i∈A} ln(1+|i|)^ϱ_w` with
//! `ϱ_w > 2`, and the weight of an index vector is the minimum weight of
//! a covering subset of the structure.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Inclusive bounds of the active window `Λ ⊂ ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInput(format!(
                "window bounds out of order: [{lo}, {hi}]"
            )));
        }
        Ok(IndexWindow { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // invariant lo <= hi guarantees at least one slot
    }

    pub fn contains(&self, lambda: i64) -> bool {
        self.lo <= lambda && lambda <= self.hi
    }

    /// Position of a lattice site within the window.
    pub fn offset(&self, lambda: i64) -> Option<usize> {
        self.contains(lambda).then(|| (lambda - self.lo) as usize)
    }

    /// Lattice site at a window position.
    pub fn site(&self, offset: usize) -> i64 {
        self.lo + offset as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// A finitely supported integer vector over the window, stored sparsely.
/// No stored entry is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexVector {
    entries: BTreeMap<i64, i64>,
}

impl IndexVector {
    pub fn zero() -> Self {
        IndexVector {
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let entries = entries.into_iter().filter(|&(_, v)| v != 0).collect();
        IndexVector { entries }
    }

    pub fn get(&self, lambda: i64) -> i64 {
        self.entries.get(&lambda).copied().unwrap_or(0)
    }

    pub fn support(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    /// `|k| = Σ_λ |k_λ|`.
    pub fn norm(&self) -> u64 {
        self.entries.values().map(|v| v.unsigned_abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &i64)> {
        self.entries.iter()
    }
}

/// A finite family `𝒮` of finite index subsets with the weight exponent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpatialStructure {
    pub window: IndexWindow,
    /// Finite subsets of the window; each stored sorted and deduplicated.
    pub subsets: Vec<Vec<i64>>,
    /// Weight exponent `ϱ_w > 2`.
    pub rho_w: f64,
}

/// Weight of a finite subset: `[A] = 1 + Σ_{i∈A} ln(1+|i|)^ϱ_w`.
///
/// The empty set has weight 1.
pub fn weight(set: &[i64], rho_w: f64) -> f64 {
    1.0 + set
        .iter()
        .map(|&i| (1.0 + (i.abs() as f64)).ln().powf(rho_w))
        .sum::<f64>()
}

impl SpatialStructure {
    pub fn new(window: IndexWindow, subsets: Vec<Vec<i64>>, rho_w: f64) -> Result<Self> {
        if rho_w <= 2.0 {
            return Err(Error::InvalidInput(format!(
                "weight exponent must exceed 2, got {rho_w}"
            )));
        }
        let mut cleaned = Vec::with_capacity(subsets.len());
        for mut a in subsets {
            a.sort_unstable();
            a.dedup();
            if let Some(&bad) = a.iter().find(|&&i| !window.contains(i)) {
                return Err(Error::InvalidInput(format!(
                    "subset entry {bad} lies outside the window [{}, {}]",
                    window.lo, window.hi
                )));
            }
            cleaned.push(a);
        }
        // Every window site must belong to at least one subset.
        for lambda in window.sites() {
            if !cleaned.iter().any(|a| a.binary_search(&lambda).is_ok()) {
                return Err(Error::InvalidInput(format!(
                    "window site {lambda} is covered by no subset"
                )));
            }
        }
        Ok(SpatialStructure {
            window,
            subsets: cleaned,
            rho_w,
        })
    }

    pub fn weight_of(&self, subset_idx: usize) -> f64 {
        weight(&self.subsets[subset_idx], self.rho_w)
    }

    /// Indices of subsets containing the given support.
    pub fn covering(&self, support: &[i64]) -> impl Iterator<Item = usize> + '_ {
        let support = support.to_vec();
        (0..self.subsets.len()).filter(move |&i| {
            support
                .iter()
                .all(|s| self.subsets[i].binary_search(s).is_ok())
        })
    }

    /// `[[k]] = min{[A] : supp k ⊆ A ∈ 𝒮}`.
    pub fn support_weight(&self, k: &IndexVector) -> Result<f64> {
        let support = k.support();
        self.covering(&support)
            .map(|i| self.weight_of(i))
            .fold(None, |acc: Option<f64>, w| {
                Some(acc.map_or(w, |a| a.min(w)))
            })
            .ok_or(Error::NoCoveringSet { support })
    }

    /// Index of the minimum-weight covering subset (first in structure
    /// order on ties).
    pub fn min_cover(&self, support: &[i64]) -> Result<usize> {
        let mut best: Option<(f64, usize)> = None;
        for i in self.covering(support) {
            let w = self.weight_of(i);
            if best.map_or(true, |(bw, _)| w < bw) {
                best = Some((w, i));
            }
        }
        best.map(|(_, i)| i).ok_or(Error::NoCoveringSet {
            support: support.to_vec(),
        })
    }

    /// Distribution count `N_i(t) = card{A ∈ 𝒮 : card(A) = i, [A] ≤ t}`.
    pub fn distribution_count(&self, i: usize, t: f64) -> usize {
        self.subsets
            .iter()
            .filter(|a| a.len() == i && weight(a, self.rho_w) <= t)
            .count()
    }

    /// Per-site weight `[λ] = min_{λ ∈ A} [A]`, used by the action norm
    /// `|J|_w`.
    pub fn site_weight(&self, lambda: i64) -> Result<f64> {
        self.support_weight(&IndexVector::from_entries([(lambda, 1)]))
    }
}

/// The product structure `𝒮̃ = {A × B}` where `B = {1,…,n}` indexes the
/// internal angles. The weight of a product set applies the same weight
/// rule to `A ∪ σ(B)` where `σ` shifts the angle block to fresh slots
/// adjacent to the window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductStructure {
    pub base: SpatialStructure,
    /// Dimension of the internal angle block.
    pub n: usize,
    /// First lattice slot used for the shifted angle block.
    pub angle_offset: i64,
}

impl ProductStructure {
    pub fn new(base: SpatialStructure, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("angle block must be nonempty".into()));
        }
        let angle_offset = base.window.hi + 1;
        Ok(ProductStructure {
            base,
            n,
            angle_offset,
        })
    }

    pub fn with_offset(base: SpatialStructure, n: usize, angle_offset: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("angle block must be nonempty".into()));
        }
        if angle_offset <= base.window.hi && angle_offset + n as i64 - 1 >= base.window.lo {
            return Err(Error::InvalidInput(
                "shifted angle block overlaps the window".into(),
            ));
        }
        Ok(ProductStructure {
            base,
            n,
            angle_offset,
        })
    }

    fn angle_slots(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n as i64).map(move |j| self.angle_offset + j)
    }

    /// `[Ã]` for the product set built from base subset `idx`.
    pub fn product_weight(&self, idx: usize) -> f64 {
        let mut set: Vec<i64> = self.base.subsets[idx].clone();
        set.extend(self.angle_slots());
        weight(&set, self.base.rho_w)
    }

    /// `[[(k,k̃)]] = min{[Ã] : supp(k,k̃) ⊆ Ã ∈ 𝒮̃}`. Since every product
    /// set contains the full angle block, only the support of `k`
    /// constrains the cover.
    pub fn pair_weight(&self, k_support: &[i64]) -> Result<f64> {
        let mut best: Option<f64> = None;
        for i in self.base.covering(k_support) {
            let w = self.product_weight(i);
            if best.map_or(true, |b| w < b) {
                best = Some(w);
            }
        }
        best.ok_or(Error::NoCoveringSet {
            support: k_support.to_vec(),
        })
    }

    /// Minimum-weight covering product set index for a `k`-support.
    pub fn pair_min_cover(&self, k_support: &[i64]) -> Result<usize> {
        let mut best: Option<(f64, usize)> = None;
        for i in self.base.covering(k_support) {
            let w = self.product_weight(i);
            if best.map_or(true, |(bw, _)| w < bw) {
                best = Some((w, i));
            }
        }
        best.map(|(_, i)| i).ok_or(Error::NoCoveringSet {
            support: k_support.to_vec(),
        })
    }
}

/// Count of integer vectors in the ℓ¹ ball of radius `cap` in `ℤ^dim`
/// (Delannoy-type sum), used to pre-check enumeration budgets.
pub fn l1_ball_count(dim: usize, cap: u32) -> u128 {
    // N(d, c) = Σ_k 2^k C(d, k) C(c, k)
    let mut total: u128 = 0;
    for k in 0..=dim.min(cap as usize) {
        let mut term: u128 = 1u128 << k;
        for j in 0..k {
            term = term * (dim - j) as u128 / (j + 1) as u128;
        }
        // C(c, k)
        let mut binom: u128 = 1;
        for j in 0..k {
            binom = binom * (cap as u128 - j as u128) / (j + 1) as u128;
        }
        total += term * binom;
    }
    total
}

/// Enumerate all integer vectors supported on the given slots with
/// `Σ|entries| ≤ cap`, in deterministic lexicographic order (entry by
/// entry, most negative first).
///
/// `slots` are arbitrary lattice positions (window sites and/or shifted
/// angle slots); the result pairs each slot with its entry, omitting
/// zeros.
pub fn enumerate_indices(
    slots: &[i64],
    cap: u32,
    budget: u128,
) -> Result<Vec<Vec<(i64, i64)>>> {
    let expected = l1_ball_count(slots.len(), cap);
    if expected > budget {
        return Err(Error::CapTooLarge {
            requested: expected,
            budget,
        });
    }
    let mut out = Vec::with_capacity(expected as usize);
    let mut current: Vec<(i64, i64)> = Vec::new();
    fn rec(
        slots: &[i64],
        pos: usize,
        remaining: i64,
        current: &mut Vec<(i64, i64)>,
        out: &mut Vec<Vec<(i64, i64)>>,
    ) {
        if pos == slots.len() {
            out.push(current.clone());
            return;
        }
        for v in -remaining..=remaining {
            if v != 0 {
                current.push((slots[pos], v));
            }
            rec(slots, pos + 1, remaining - v.abs(), current, out);
            if v != 0 {
                current.pop();
            }
        }
    }
    rec(slots, 0, cap as i64, &mut current, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toy_structure() -> SpatialStructure {
        SpatialStructure::new(
            IndexWindow::new(0, 1).unwrap(),
            vec![vec![0], vec![1], vec![0, 1]],
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn weight_empty_set_is_one() {
        assert_eq!(weight(&[], 3.0), 1.0);
    }

    #[test]
    fn weight_origin_is_one() {
        assert_eq!(weight(&[0], 3.0), 1.0); // ln(1) = 0
    }

    #[test]
    fn weight_symmetric_pair() {
        // 1 + 2 (ln 2)^3
        let expected = 1.0 + 2.0 * 2f64.ln().powi(3);
        assert_relative_eq!(weight(&[1, -1], 3.0), expected, max_relative = 1e-15);
        assert_relative_eq!(weight(&[1, -1], 3.0), 1.6660493, epsilon = 1e-6);
    }

    #[test]
    fn weight_monotone_under_inclusion() {
        let rho = 3.0;
        let a = vec![1, 3];
        let b = vec![1, 3, -2];
        assert!(weight(&a, rho) <= weight(&b, rho));
    }

    #[test]
    fn support_weight_zero_vector() {
        let s = SpatialStructure::new(IndexWindow::new(0, 0).unwrap(), vec![vec![0]], 3.0)
            .unwrap();
        assert_eq!(s.support_weight(&IndexVector::zero()).unwrap(), 1.0);
    }

    #[test]
    fn support_weight_picks_min_cover() {
        let s = SpatialStructure::new(
            IndexWindow::new(0, 1).unwrap(),
            vec![vec![0], vec![0, 1]],
            3.0,
        )
        .unwrap();
        let k = IndexVector::from_entries([(1, 1)]);
        let expected = 1.0 + 2f64.ln().powi(3);
        assert_relative_eq!(s.support_weight(&k).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(s.support_weight(&k).unwrap(), 1.3330247, epsilon = 1e-6);
    }

    #[test]
    fn support_weight_tie_resolved_by_min() {
        let s = SpatialStructure::new(
            IndexWindow::new(0, 1).unwrap(),
            vec![vec![1], vec![0, 1]],
            3.0,
        )
        .unwrap();
        let k = IndexVector::from_entries([(1, 2)]);
        // weight({1}) = weight({0,1}) = 1 + (ln 2)^3; min is the same
        assert_relative_eq!(
            s.support_weight(&k).unwrap(),
            1.0 + 2f64.ln().powi(3),
            max_relative = 1e-15
        );
    }

    #[test]
    fn support_weight_no_cover_errors() {
        let s = SpatialStructure::new(
            IndexWindow::new(0, 1).unwrap(),
            vec![vec![0], vec![1]],
            3.0,
        )
        .unwrap();
        let k = IndexVector::from_entries([(0, 1), (1, 1)]);
        assert!(matches!(
            s.support_weight(&k),
            Err(Error::NoCoveringSet { .. })
        ));
    }

    #[test]
    fn support_weight_at_least_one_and_below_any_cover() {
        let s = toy_structure();
        for k in [
            IndexVector::zero(),
            IndexVector::from_entries([(0, 3)]),
            IndexVector::from_entries([(0, -1), (1, 2)]),
        ] {
            let w = s.support_weight(&k).unwrap();
            assert!(w >= 1.0);
            for i in s.covering(&k.support()) {
                assert!(w <= s.weight_of(i) + 1e-15);
            }
        }
    }

    #[test]
    fn distribution_count_below_unit_weight_is_zero() {
        let s = toy_structure();
        assert_eq!(s.distribution_count(1, 0.5), 0);
    }

    #[test]
    fn distribution_count_examples() {
        let s = toy_structure();
        // weights: [{0}] = 1, [{1}] = 1.333, [{0,1}] = 1.333
        assert_eq!(s.distribution_count(1, 1.4), 2);
        assert_eq!(s.distribution_count(2, 1.0), 0);
        assert_eq!(s.distribution_count(2, 1.4), 1);
    }

    #[test]
    fn distribution_count_nondecreasing_in_t() {
        let s = toy_structure();
        for i in 1..=2 {
            let mut prev = 0;
            for step in 0..30 {
                let t = step as f64 * 0.1;
                let c = s.distribution_count(i, t);
                assert!(c >= prev);
                prev = c;
            }
        }
    }

    #[test]
    fn enumerate_empty_support() {
        let v = enumerate_indices(&[], 5, 1 << 20).unwrap();
        assert_eq!(v, vec![Vec::<(i64, i64)>::new()]);
    }

    #[test]
    fn enumerate_counts_match_l1_ball() {
        assert_eq!(l1_ball_count(2, 1), 5);
        assert_eq!(l1_ball_count(2, 2), 13);
        let v = enumerate_indices(&[0, 2], 1, 1 << 20).unwrap();
        assert_eq!(v.len(), 5);
        let v = enumerate_indices(&[0, 2], 2, 1 << 20).unwrap();
        assert_eq!(v.len(), 13);
    }

    #[test]
    fn enumerate_brute_force_cross_check() {
        // brute force over the dense cube, dims <= 3, cap <= 6
        for (slots, cap) in [(vec![0i64], 6u32), (vec![0, 1], 4), (vec![-1, 0, 1], 3)] {
            let fast = enumerate_indices(&slots, cap, 1 << 24).unwrap();
            let mut brute = 0usize;
            let d = slots.len();
            let c = cap as i64;
            let mut idx = vec![-c; d];
            loop {
                if idx.iter().map(|v| v.abs()).sum::<i64>() <= c {
                    brute += 1;
                }
                let mut pos = 0;
                loop {
                    if pos == d {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] > c {
                        idx[pos] = -c;
                        pos += 1;
                    } else {
                        break;
                    }
                }
                if pos == d {
                    break;
                }
            }
            assert_eq!(fast.len(), brute);
            assert_eq!(fast.len() as u128, l1_ball_count(d, cap));
        }
    }

    #[test]
    fn enumerate_budget_enforced() {
        assert!(matches!(
            enumerate_indices(&[0, 1, 2, 3], 20, 100),
            Err(Error::CapTooLarge { .. })
        ));
    }

    #[test]
    fn enumerate_is_deterministic_lexicographic() {
        let v = enumerate_indices(&[0], 1, 100).unwrap();
        assert_eq!(
            v,
            vec![vec![(0, -1)], vec![], vec![(0, 1)]]
        );
    }

    #[test]
    fn product_weight_dominates_base() {
        let s = toy_structure();
        let p = ProductStructure::new(s, 1).unwrap();
        for i in 0..p.base.subsets.len() {
            assert!(p.product_weight(i) >= p.base.weight_of(i));
        }
        // angle slot is hi+1 = 2: [Ã] for A={0} is 1 + ln(3)^3
        assert_relative_eq!(
            p.product_weight(0),
            1.0 + 3f64.ln().powi(3),
            max_relative = 1e-15
        );
    }

    #[test]
    fn pair_weight_ignores_ktilde_support() {
        let s = toy_structure();
        let p = ProductStructure::new(s, 1).unwrap();
        // both empty-k and k supported in {0} are covered; weight for empty
        // support is the min over all product sets
        let w_empty = p.pair_weight(&[]).unwrap();
        let w0 = p.pair_weight(&[0]).unwrap();
        assert!(w_empty <= w0 + 1e-15);
    }

    #[test]
    fn structure_serialization_round_trip() {
        let s = toy_structure();
        let json = serde_json::to_string(&s).unwrap();
        let back: SpatialStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back.subsets, s.subsets);
        assert_eq!(back.window, s.window);
    }
}
