//! Approximation functions and the supremum functionals and sequence
//! products derived from them.
//!
//! An approximation function is a nondecreasing `Δ : [0,∞) → [1,∞)` with
//! `Δ(0) = 1`, `log Δ(t)/t ↘ 0` and `∫ log Δ(t)/t² dt < ∞`. The module
//! evaluates `Γ₀(μ) = sup_t Δ(t)e^{−μt}`, `Γ₁(ρ) = sup_t (1+t)Δ(t)e^{−ρt}`
//! and the infinite product `Ψ₀(μ)Ψ₁(ρ) = Π_ν (Γ₀(μ_ν)Γ₁(ρ_ν))^{κ_ν}`
//! over a geometric splitting of `μ` and `ρ`.
//!
//! All suprema are computed in log space: a 512-point logarithmic grid
//! pre-scan locates the global basin and golden-section refinement
//! polishes the maximizer to 1e-10 relative.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const GRID_POINTS: usize = 512;
const GOLDEN_TOL: f64 = 1e-10;
const T_HARD_CAP: f64 = 1e15;

/// Selectable approximation function kinds.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DeltaKind {
    /// `Δ(t) = exp(t / (1 + ln(1+t))²)`.
    Default,
    /// `Δ(t) = exp(t^σ)` with `σ ∈ (0,1)`.
    PowerExp { sigma: f64 },
    /// Piecewise log-linear table through `(t, Δ(t))` knots, constant
    /// beyond the last knot. A single knot `(0,1)` yields `Δ ≡ 1`.
    Table { knots: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxFunction {
    pub kind: DeltaKind,
}

/// The concrete default `Δ(t) = exp(t/(1+ln(1+t))²)`.
pub fn default_delta() -> ApproxFunction {
    ApproxFunction {
        kind: DeltaKind::Default,
    }
}

impl ApproxFunction {
    pub fn power_exp(sigma: f64) -> Result<Self> {
        if !(0.0 < sigma && sigma < 1.0) {
            return Err(Error::InvalidInput(format!(
                "power-exp exponent must lie in (0,1), got {sigma}"
            )));
        }
        Ok(ApproxFunction {
            kind: DeltaKind::PowerExp { sigma },
        })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() || knots[0] != (0.0, 1.0) {
            return Err(Error::InvalidInput(
                "table must start with the knot (0, 1)".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::InvalidInput(
                    "table knots must be strictly increasing in t and nondecreasing in value"
                        .into(),
                ));
            }
        }
        if knots.iter().any(|&(_, v)| v < 1.0) {
            return Err(Error::InvalidInput("table values must be >= 1".into()));
        }
        Ok(ApproxFunction {
            kind: DeltaKind::Table { knots },
        })
    }

    /// `Δ ≡ 1`, the trivial gauge.
    pub fn one() -> Self {
        ApproxFunction {
            kind: DeltaKind::Table {
                knots: vec![(0.0, 1.0)],
            },
        }
    }

    pub fn log_delta(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.kind {
            DeltaKind::Default => t / (1.0 + (1.0 + t).ln()).powi(2),
            DeltaKind::PowerExp { sigma } => t.powf(*sigma),
            DeltaKind::Table { knots } => {
                let last = knots.len() - 1;
                if t >= knots[last].0 {
                    return knots[last].1.ln();
                }
                let pos = knots.partition_point(|&(tk, _)| tk <= t);
                // t < last knot and t >= knots[0].0 = 0, so 1 <= pos <= last
                let (t0, v0) = knots[pos - 1];
                let (t1, v1) = knots[pos];
                let s = (t - t0) / (t1 - t0);
                (1.0 - s) * v0.ln() + s * v1.ln()
            }
        }
    }

    pub fn delta(&self, t: f64) -> f64 {
        self.log_delta(t).exp()
    }

    /// Verify the defining properties on a logarithmic grid over
    /// `[0, t_hi]`: normalization, monotonicity, decay of `log Δ(t)/t`,
    /// and convergence of `∫ log Δ(t)/t² dt` by a dyadic-block ratio test.
    pub fn validate(&self, t_hi: f64) -> Result<()> {
        if (self.delta(0.0) - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidInput("Delta(0) must equal 1".into()));
        }
        let n = 10_000;
        let mut prev_val = 0.0f64;
        let mut prev_rate = f64::INFINITY;
        for i in 0..=n {
            let t = if i == 0 {
                0.0
            } else {
                t_hi.powf(i as f64 / n as f64) // log grid over [1, t_hi]
            };
            let v = self.log_delta(t);
            if v < prev_val - 1e-12 * prev_val.abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "Delta not nondecreasing near t = {t:.6e}"
                )));
            }
            if t >= 1.0 {
                let rate = v / t;
                if rate > prev_rate * (1.0 + 1e-12) + 1e-15 {
                    return Err(Error::InvalidInput(format!(
                        "log Delta(t)/t not nonincreasing near t = {t:.6e}"
                    )));
                }
                prev_rate = rate;
            }
            prev_val = v;
        }
        // Dyadic-block ratio test for ∫_1^∞ log Δ(t)/t² dt: block over
        // [2^j, 2^{j+1}] bounded by log Δ(2^{j+1})/2^j; ratios must fall
        // below 1 for the tail blocks.
        let mut prev_block = f64::INFINITY;
        let mut shrinking = 0u32;
        let mut j = 0;
        while 2f64.powi(j + 1) < T_HARD_CAP {
            let block = self.log_delta(2f64.powi(j + 1)) / 2f64.powi(j);
            if block < prev_block {
                shrinking += 1;
                if shrinking >= 8 {
                    return Ok(());
                }
            } else {
                shrinking = 0;
            }
            prev_block = block;
            j += 1;
        }
        Err(Error::InvalidInput(
            "integral test for log Delta(t)/t^2 did not contract".into(),
        ))
    }
}

/// Maximize `g` over `[0, ∞)` by log-grid pre-scan and golden-section
/// refinement; `g` must eventually decrease. Returns `(t*, g(t*))`.
fn sup_search(g: &dyn Fn(f64) -> f64, decay: f64) -> Result<(f64, f64)> {
    // Expand t_max until the integrand is safely decaying: the local
    // exponent rate must have fallen below the decay parameter.
    let mut t_max = 10.0 / decay;
    loop {
        let tail_rate = (g(t_max) - g(t_max * 0.99)) / (0.01 * t_max);
        if tail_rate < 0.0 {
            break;
        }
        t_max *= 4.0;
        if t_max > T_HARD_CAP {
            return Err(Error::NoConvergence(format!(
                "maximizer bracket exceeded t = {T_HARD_CAP:e} without decay"
            )));
        }
    }
    let mut best = (0.0, g(0.0));
    let mut grid = Vec::with_capacity(GRID_POINTS + 1);
    grid.push(0.0);
    let lo = (t_max * 1e-8).max(1e-12);
    for i in 0..GRID_POINTS {
        let t = lo * (t_max / lo).powf(i as f64 / (GRID_POINTS - 1) as f64);
        grid.push(t);
    }
    let mut best_i = 0;
    for (i, &t) in grid.iter().enumerate() {
        let v = g(t);
        if v > best.1 {
            best = (t, v);
            best_i = i;
        }
    }
    // golden-section refine within the bracketing grid cells
    let (mut a, mut b) = (
        if best_i == 0 { 0.0 } else { grid[best_i - 1] },
        if best_i + 1 < grid.len() {
            grid[best_i + 1]
        } else {
            t_max
        },
    );
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > GOLDEN_TOL * b.max(1.0) {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    let v = g(t);
    Ok(if v > best.1 { (t, v) } else { best })
}

/// `log Γ₀(μ) = sup_{t ≥ 0} (log Δ(t) − μt)`, always `≥ 0`.
pub fn log_gamma0(delta: &ApproxFunction, mu: f64) -> Result<f64> {
    if mu <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "decay rate must be positive, got {mu}"
        )));
    }
    let g = |t: f64| delta.log_delta(t) - mu * t;
    Ok(sup_search(&g, mu)?.1.max(0.0))
}

/// `Γ₀(μ) = sup_{t ≥ 0} Δ(t)e^{−μt}`.
pub fn gamma0(delta: &ApproxFunction, mu: f64) -> Result<f64> {
    Ok(log_gamma0(delta, mu)?.exp())
}

/// `log Γ₁(ρ) = sup_{t ≥ 0} (log(1+t) + log Δ(t) − ρt)`.
pub fn log_gamma1(delta: &ApproxFunction, rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "decay rate must be positive, got {rho}"
        )));
    }
    let g = |t: f64| (1.0 + t).ln() + delta.log_delta(t) - rho * t;
    Ok(sup_search(&g, rho)?.1.max(0.0))
}

/// `Γ₁(ρ) = sup_{t ≥ 0} (1+t)Δ(t)e^{−ρt}`.
pub fn gamma1(delta: &ApproxFunction, rho: f64) -> Result<f64> {
    Ok(log_gamma1(delta, rho)?.exp())
}

/// Geometric splitting of the total analyticity losses, with the
/// exponents `κ_ν = (κ−1)/κ^{ν+1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceSchedule {
    /// Total weight-norm loss `μ = Σ μ_ν`.
    pub mu_total: f64,
    /// Total angle-analyticity loss `ρ = Σ ρ_ν`.
    pub rho_total: f64,
    /// Contraction exponent, `3/2` throughout.
    pub kappa: f64,
    /// Geometric ratio of the splitting `μ_ν = μ(1−q)q^ν`.
    pub decay_q: f64,
    /// Stop the product when the estimated tail exponent drops below this.
    pub tail_tol: f64,
}

impl SequenceSchedule {
    pub fn new(mu_total: f64, rho_total: f64, decay_q: f64, tail_tol: f64) -> Result<Self> {
        if mu_total <= 0.0 || rho_total <= 0.0 {
            return Err(Error::InvalidInput("losses must be positive".into()));
        }
        if !(0.0 < decay_q && decay_q < 1.0) {
            return Err(Error::InvalidInput(format!(
                "geometric ratio must lie in (0,1), got {decay_q}"
            )));
        }
        Ok(SequenceSchedule {
            mu_total,
            rho_total,
            kappa: 1.5,
            decay_q,
            tail_tol,
        })
    }

    /// `κ_ν = (κ−1)/κ^{ν+1}`; these sum to one.
    pub fn kappa_nu(&self, nu: usize) -> f64 {
        (self.kappa - 1.0) / self.kappa.powi(nu as i32 + 1)
    }

    pub fn mu_nu(&self, nu: usize) -> f64 {
        self.mu_total * (1.0 - self.decay_q) * self.decay_q.powi(nu as i32)
    }

    pub fn rho_nu(&self, nu: usize) -> f64 {
        self.rho_total * (1.0 - self.decay_q) * self.decay_q.powi(nu as i32)
    }
}

const PSI_MAX_TERMS: usize = 500;

/// `log(Ψ₀(μ)Ψ₁(ρ)) = Σ_ν κ_ν (log Γ₀(μ_ν) + log Γ₁(ρ_ν))`, truncated
/// when the tail estimate `κ-tail × current per-term log` falls below
/// `tail_tol`. Detects divergence when the per-term values stop
/// contracting.
pub fn log_psi_product(delta: &ApproxFunction, sched: &SequenceSchedule) -> Result<f64> {
    let mut sum = 0.0;
    let mut prev_term: Option<f64> = None;
    let mut noncontracting = 0u32;
    for nu in 0..PSI_MAX_TERMS {
        let kn = sched.kappa_nu(nu);
        let log_pair =
            log_gamma0(delta, sched.mu_nu(nu))? + log_gamma1(delta, sched.rho_nu(nu))?;
        let term = kn * log_pair;
        sum += term;
        if let Some(prev) = prev_term {
            if prev > 0.0 && term >= prev * 0.999_999 {
                noncontracting += 1;
                if noncontracting >= 3 {
                    return Err(Error::Divergence {
                        nu,
                        ratio: term / prev,
                    });
                }
            } else {
                noncontracting = 0;
            }
        }
        prev_term = Some(term);
        // κ-tail: Σ_{ν' > ν} κ_ν' = κ^{-(ν+1)}
        let tail = sched.kappa.powi(-(nu as i32 + 1)) * log_pair;
        if tail < sched.tail_tol && nu >= 2 {
            return Ok(sum);
        }
    }
    Err(Error::Divergence {
        nu: PSI_MAX_TERMS,
        ratio: f64::NAN,
    })
}

/// `Ψ₀(μ)Ψ₁(ρ)` as a plain value; always `≥ 1`.
pub fn psi_product(delta: &ApproxFunction, sched: &SequenceSchedule) -> Result<f64> {
    Ok(log_psi_product(delta, sched)?.exp())
}
