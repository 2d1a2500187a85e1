//! Run configuration: the JSON schema shared by the CLI subcommands.

use crate::approx::DeltaKind;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    /// Active window `[lo, hi]`.
    pub window: (i64, i64),
    /// Spatial structure subsets.
    pub subsets: Vec<Vec<i64>>,
    #[serde(default = "default_rho_w")]
    pub rho_w: f64,
    /// Base frequency entries over the window.
    pub omega: Vec<f64>,
    /// Approximation function selector.
    pub delta: DeltaKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub kam: KamConfig,
    #[serde(default)]
    pub caps: CapsConfig,
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_rho_w() -> f64 {
    3.0
}
fn default_alpha() -> f64 {
    2.0
}
fn default_seed() -> u64 {
    42
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub mu: f64,
    pub rho: f64,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_q() -> f64 {
    0.5
}
fn default_tail_tol() -> f64 {
    1e-10
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            mu: 0.35,
            rho: 0.2,
            q: default_q(),
            tail_tol: default_tail_tol(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KamConfig {
    pub m: f64,
    pub w: f64,
    pub r: f64,
    pub s: f64,
    pub h: f64,
    #[serde(default = "default_z_cap")]
    pub z_cap: usize,
    #[serde(default = "default_grid_min")]
    pub grid_min: usize,
    #[serde(default = "default_grid_max")]
    pub grid_max: usize,
    #[serde(default = "default_jmax")]
    pub j_max: usize,
    /// Parameter box for the frequency parameters.
    pub omega_tilde_box: Vec<(f64, f64)>,
    #[serde(default = "default_cheb_nodes")]
    pub cheb_nodes: usize,
}

fn default_z_cap() -> usize {
    4
}
fn default_grid_min() -> usize {
    8
}
fn default_grid_max() -> usize {
    128
}
fn default_jmax() -> usize {
    8
}
fn default_cheb_nodes() -> usize {
    9
}

impl Default for KamConfig {
    fn default() -> Self {
        KamConfig {
            m: 0.5,
            w: 0.1,
            r: 0.5,
            s: 0.05,
            h: 1e-4,
            z_cap: default_z_cap(),
            grid_min: default_grid_min(),
            grid_max: default_grid_max(),
            j_max: default_jmax(),
            omega_tilde_box: vec![(1.0, 2.0)],
            cheb_nodes: default_cheb_nodes(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapsConfig {
    pub weight_max: f64,
    pub order_max: u32,
}

impl Default for CapsConfig {
    fn default() -> Self {
        CapsConfig {
            weight_max: 5.0,
            order_max: 8,
        }
    }
}

/// One almost-periodic forcing coefficient `p_j` as a finite mode list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcingCoefficient {
    pub j: usize,
    /// Cosine modes: amplitude × cos(⟨k,ωt⟩ + phase-free); `k` dense over
    /// the window.
    pub modes: Vec<ForcingMode>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcingMode {
    pub k: Vec<i32>,
    pub amp: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OscillatorConfig {
    pub l: u32,
    pub eps: f64,
    #[serde(default = "default_rho0")]
    pub rho0: f64,
    /// Action interval `[c1, c2]` bounded away from zero.
    pub action_window: (f64, f64),
    pub forcing: Vec<ForcingCoefficient>,
}

fn default_rho0() -> f64 {
    1.0
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.0 > self.window.1 {
            return Err(Error::InvalidInput("window bounds out of order".into()));
        }
        let len = (self.window.1 - self.window.0 + 1) as usize;
        if self.omega.len() != len {
            return Err(Error::InvalidInput(format!(
                "omega needs {len} entries for the window, got {}",
                self.omega.len()
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidInput("alpha must be positive".into()));
        }
        if let Some(osc) = &self.oscillator {
            if osc.eps <= 0.0 {
                return Err(Error::InvalidInput("epsilon must be positive".into()));
            }
            if osc.action_window.0 <= 0.0 || osc.action_window.0 >= osc.action_window.1 {
                return Err(Error::InvalidInput(
                    "action window must be positive and ordered".into(),
                ));
            }
            for fc in &osc.forcing {
                if fc.j > 2 * osc.l as usize {
                    return Err(Error::InvalidInput(format!(
                        "forcing index j = {} exceeds 2l = {}",
                        fc.j,
                        2 * osc.l
                    )));
                }
                for m in &fc.modes {
                    if m.k.len() != len {
                        return Err(Error::InvalidInput(
                            "forcing mode vector length must match the window".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
