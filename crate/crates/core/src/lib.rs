//! Simulation of a microwave photodetector built around an
//! electro-opto-mechanical converter.
//!
//! A mechanical resonator mediates a beam-splitter interaction between a
//! microwave cavity and an optical cavity, both pumped on their red
//! sidebands. The crate derives the operating point from hardware
//! parameters ([`params`]), solves the three-mode linear response for the
//! optical-output scattering row ([`scattering`]), propagates Gaussian
//! microwave pulses to optical spectra ([`pulse`]), evaluates the detector
//! figure of merit ([`detector`]), sweeps the cooperativity design space
//! ([`sweep`]), and cross-checks everything against independent numerical
//! engines ([`oracle`]).
//!
//! Langevin convention used throughout: cavity amplitudes decay as
//! `-kappa_j c_j` (mechanics as `-gamma_M b`) and inputs enter with weights
//! `sqrt(2 kappa_j^ext)`, `sqrt(2 kappa_j^int)` and `sqrt(2 gamma_M)`. This
//! is the unique convention consistent with the input-output relation
//! `c_out = sqrt(2 kappa^ext) c - c_ext`, the cooperativities
//! `Gamma_j = G_j^2 / (kappa_j gamma_M)` and the converter bandwidth
//! `W_c = gamma_M (1 + Gamma_w + Gamma_o)`.

pub mod config;
pub mod detector;
pub mod oracle;
pub mod params;
pub mod pulse;
pub mod quad;
pub mod scattering;
pub mod sweep;

mod error;

pub use error::Error;

/// Physical constants (SI, 2018 CODATA exact values).
pub mod constants {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J/K.
    pub const K_B: f64 = 1.380_649e-23;
    /// Speed of light in vacuum, m/s.
    pub const C_LIGHT: f64 = 2.997_924_58e8;
}
