//! Small-divisor evaluation, nonresonance certification, and Monte-Carlo
//! measure estimation of the resonant parameter set.
//!
//! A certificate records that `|⟨k,ω⟩ + ⟨k̃,ω̃⟩| ≥ α / (Δ([[(k,k̃)]]) Δ(|k|+|k̃|))`
//! held on an exhaustive scan within explicit weight and order caps;
//! the caps make the certificate's scope crisp.

use crate::approx::ApproxFunction;
use crate::apseries::Frequency;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_indices, ProductStructure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Scan caps: weight cap on `[[·]]` and order cap on `|k| + |k̃|`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanCaps {
    pub weight_max: f64,
    pub order_max: u32,
    /// Enumeration budget guarding against runaway index counts.
    pub budget: u128,
}

impl Default for ScanCaps {
    fn default() -> Self {
        ScanCaps {
            weight_max: 5.0,
            order_max: 8,
            budget: 1 << 24,
        }
    }
}

/// Result of a passing scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonresonanceCertificate {
    pub alpha: f64,
    pub caps: ScanCaps,
    /// Offending-closest pair and its margin `|d|ΔΔ/α − 1 ≥ 0`.
    pub worst_k: Vec<i32>,
    pub worst_ktilde: Vec<i32>,
    pub worst_margin: f64,
    /// Number of index pairs checked.
    pub checked: usize,
}

/// Bounded box of admissible parameter frequencies `ω̃ ∈ O ⊂ ℝⁿ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrequencyBox {
    pub bounds: Vec<(f64, f64)>,
}

impl FrequencyBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput("empty frequency box".into()));
        }
        for &(lo, hi) in &bounds {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "bad box interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(FrequencyBox { bounds })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|&(lo, hi)| hi - lo).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect()
    }
}

/// `⟨k,ω⟩ + ⟨k̃,ω̃⟩` with `k` dense over the window.
pub fn divisor(k: &[i32], ktilde: &[i32], omega: &Frequency, omega_tilde: &[f64]) -> f64 {
    debug_assert_eq!(ktilde.len(), omega_tilde.len());
    omega.dot(k)
        + ktilde
            .iter()
            .zip(omega_tilde)
            .map(|(&ki, &wi)| ki as f64 * wi)
            .sum::<f64>()
}

/// One scannable index pair with its precomputed threshold data.
struct ScanPair {
    k: Vec<i32>,
    ktilde: Vec<i32>,
    /// `Δ([[(k,k̃)]]) Δ(|k|+|k̃|)`.
    delta_product: f64,
    k_dot_omega: f64,
    pair_weight: f64,
    order: u32,
}

/// Enumerate the scan set. With `with_ktilde = false` the (b6) sector is
/// produced: `k̃ = 0`, `k ≠ 0`. With `true` the parameter sector of the
/// extended condition: `k̃ ≠ 0`, any covered `k`.
fn scan_pairs(
    omega: &Frequency,
    structure: &ProductStructure,
    delta: &ApproxFunction,
    caps: &ScanCaps,
    with_ktilde: bool,
) -> Result<Vec<ScanPair>> {
    let window = structure.base.window;
    let slots: Vec<i64> = window.sites().collect();
    let k_vectors = enumerate_indices(&slots, caps.order_max, caps.budget)?;
    let n = structure.n;
    let kt_vectors: Vec<Vec<(i64, i64)>> = if with_ktilde {
        let kt_slots: Vec<i64> = (0..n as i64).collect();
        enumerate_indices(&kt_slots, caps.order_max, caps.budget)?
    } else {
        vec![Vec::new()]
    };
    let mut out = Vec::new();
    for k_sparse in &k_vectors {
        let mut k = vec![0i32; window.len()];
        let mut support = Vec::new();
        for &(slot, v) in k_sparse {
            k[window.offset(slot).unwrap()] = v as i32;
            support.push(slot);
        }
        let k_order: u32 = k_sparse.iter().map(|&(_, v)| v.unsigned_abs() as u32).sum();
        // pair weight over the product structure when the angle block is in
        // play, base support weight for the pure-frequency condition
        let weight = if with_ktilde {
            match structure.pair_min_cover(&support) {
                Ok(idx) => structure.product_weight(idx),
                Err(_) => continue, // uncovered support cannot occur in series
            }
        } else {
            match structure.base.min_cover(&support) {
                Ok(idx) => structure.base.weight_of(idx),
                Err(_) => continue,
            }
        };
        if weight > caps.weight_max {
            continue;
        }
        let k_dot_omega = omega.dot(&k);
        for kt_sparse in &kt_vectors {
            let mut ktilde = vec![0i32; n];
            for &(slot, v) in kt_sparse {
                ktilde[slot as usize] = v as i32;
            }
            let kt_order: u32 = kt_sparse
                .iter()
                .map(|&(_, v)| v.unsigned_abs() as u32)
                .sum();
            if with_ktilde {
                if kt_order == 0 {
                    continue;
                }
            } else if k_order == 0 {
                continue;
            }
            let order = k_order + kt_order;
            if order > caps.order_max {
                continue;
            }
            let delta_product =
                delta.delta(weight) * delta.delta(order as f64);
            out.push(ScanPair {
                k: k.clone(),
                ktilde,
                delta_product,
                k_dot_omega,
                pair_weight: weight,
                order,
            });
        }
    }
    Ok(out)
}

/// Exhaustive nonresonance scan within caps.
///
/// With `omega_tilde = None` the pure-frequency condition is checked over
/// `k ≠ 0` (the `k̃ = 0` sector); with a parameter point the extended
/// condition is checked over `k̃ ≠ 0`. Returns the certificate with the
/// worst margin, or the violation with both sides of the inequality.
pub fn scan(
    omega: &Frequency,
    omega_tilde: Option<&[f64]>,
    structure: &ProductStructure,
    delta: &ApproxFunction,
    alpha: f64,
    caps: &ScanCaps,
) -> Result<NonresonanceCertificate> {
    if alpha <= 0.0 {
        return Err(Error::InvalidInput("alpha must be positive".into()));
    }
    let pairs = scan_pairs(omega, structure, delta, caps, omega_tilde.is_some())?;
    let empty: &[f64] = &[];
    let wt = omega_tilde.unwrap_or(empty);
    let mut worst: Option<(f64, &ScanPair)> = None;
    for p in &pairs {
        let d = if wt.is_empty() {
            p.k_dot_omega
        } else {
            p.k_dot_omega
                + p.ktilde
                    .iter()
                    .zip(wt)
                    .map(|(&ki, &wi)| ki as f64 * wi)
                    .sum::<f64>()
        };
        let threshold = alpha / p.delta_product;
        if d.abs() < threshold {
            return Err(Error::Violation {
                k: p.k.clone(),
                ktilde: p.ktilde.clone(),
                lhs: d.abs(),
                rhs: threshold,
            });
        }
        let margin = d.abs() * p.delta_product / alpha - 1.0;
        if worst.as_ref().map_or(true, |(m, _)| margin < *m) {
            worst = Some((margin, p));
        }
    }
    let (margin, pair) = worst.ok_or_else(|| {
        Error::InvalidInput("scan caps admit no index pairs".into())
    })?;
    Ok(NonresonanceCertificate {
        alpha,
        caps: *caps,
        worst_k: pair.k.clone(),
        worst_ktilde: pair.ktilde.clone(),
        worst_margin: margin,
        checked: pairs.len(),
    })
}

/// Result of the Monte-Carlo measure estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub alpha: f64,
    pub fraction_resonant: f64,
    pub ci95: (f64, f64),
    /// Union bound `Σ meas(slab ∩ O) / meas(O)` with exact slab-box
    /// intersections.
    pub union_bound: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Monte-Carlo fraction of `ω̃ ∈ O` violating the extended nonresonance
/// condition within caps, with a binomial 95% interval and the analytic
/// union bound.
pub fn measure_estimate(
    omega: &Frequency,
    structure: &ProductStructure,
    delta: &ApproxFunction,
    alpha: f64,
    frequency_box: &FrequencyBox,
    caps: &ScanCaps,
    n_samples: usize,
    seed: u64,
) -> Result<MeasureEstimate> {
    if n_samples < 1000 {
        return Err(Error::InvalidInput(
            "Monte-Carlo estimate needs at least 1000 samples".into(),
        ));
    }
    if frequency_box.dim() != structure.n {
        return Err(Error::InvalidInput(
            "frequency box dimension must match the angle block".into(),
        ));
    }
    let pairs = scan_pairs(omega, structure, delta, caps, true)?;

    // analytic union bound: the resonant slab for (k, k̃) constrains the
    // coordinate of the largest |k̃| entry to an interval of half-width
    // δ = α / (ΔΔ |k̃_max|); intersect exactly with the box
    let mut union = 0.0;
    let volume = frequency_box.volume();
    for p in &pairs {
        let (jmax, ktmax) = p
            .ktilde
            .iter()
            .enumerate()
            .max_by_key(|(_, v)| v.unsigned_abs())
            .map(|(i, &v)| (i, v))
            .expect("ktilde nonzero in the parameter sector");
        let delta_half = alpha / (p.delta_product * ktmax.unsigned_abs() as f64);
        // slab: |ω̃_j + b| < δ with b = (Σ_{i≠j} k̃_i ω̃_i + ⟨k,ω⟩)/k̃_j —
        // for the bound we take the worst-case center range over the box,
        // i.e. the measure of ω̃_j values hit for any admissible others;
        // with one varying coordinate the exact per-slab measure is the
        // intersection length times the complementary sides. For n = 1 the
        // center is fixed and the intersection is exact.
        let (lo, hi) = frequency_box.bounds[jmax];
        let other_volume: f64 = frequency_box
            .bounds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != jmax)
            .map(|(_, &(l, h))| h - l)
            .product();
        let slab_len = if structure.n == 1 {
            let center = -p.k_dot_omega / ktmax as f64;
            (hi.min(center + delta_half) - lo.max(center - delta_half)).max(0.0)
        } else {
            // conservative: full two-sided width clipped to the side length
            (2.0 * delta_half).min(hi - lo)
        };
        union += slab_len * other_volume / volume;
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let wt = frequency_box.sample(&mut rng);
        let resonant = pairs.iter().any(|p| {
            let d = p.k_dot_omega
                + p.ktilde
                    .iter()
                    .zip(&wt)
                    .map(|(&ki, &wi)| ki as f64 * wi)
                    .sum::<f64>();
            d.abs() < alpha / p.delta_product
        });
        if resonant {
            hits += 1;
        }
    }
    let frac = hits as f64 / n_samples as f64;
    let half = 1.96 * (frac * (1.0 - frac) / n_samples as f64).sqrt();
    Ok(MeasureEstimate {
        alpha,
        fraction_resonant: frac,
        ci95: ((frac - half).max(0.0), (frac + half).min(1.0)),
        union_bound: union,
        n_samples,
        seed,
    })
}

/// Weight and order data of a retained pair, for the extended-divisor
/// hypothesis (the `h` bound from the truncation orders).
pub fn extended_divisor_h_bound(
    structure: &ProductStructure,
    delta: &ApproxFunction,
    truncation_order: impl Fn(f64) -> u32,
) -> f64 {
    let mut h_max = f64::INFINITY;
    for idx in 0..structure.base.subsets.len() {
        let w = structure.product_weight(idx);
        let ord = truncation_order(w);
        if ord == 0 {
            continue; // no constraint from an empty retained band
        }
        let bound = 1.0 / (delta.delta(w) * ord as f64 * delta.delta(ord as f64));
        h_max = h_max.min(bound);
    }
    h_max
}
