//! apkam — a numerical workbench for KAM iteration under almost-periodic
//! forcing.
//!
//! The crate models, at finite truncation, the machinery needed to run a
//! parameterized KAM scheme whose perturbations are almost periodic in
//! time: a windowed frequency lattice with weighted spatial structures
//! (`lattice`), approximation functions and the derived supremum
//! functionals and sequence products (`approx`), torus Fourier–Taylor
//! series with weighted norms (`apseries`), small-divisor scans and
//! resonance measure estimation (`resonance`), the KAM step and
//! iteration scheduler (`kam`), and the superquadratic oscillator
//! application with action-angle reduction and long-horizon simulation
//! (`oscillator`).

pub mod approx;
pub mod apseries;
pub mod chebyshev;
pub mod config;
pub mod error;
pub mod fftgrid;
pub mod kam;
pub mod lattice;
pub mod ode;
pub mod oscillator;
pub mod output;
pub mod resonance;

pub use error::{Error, Result};
