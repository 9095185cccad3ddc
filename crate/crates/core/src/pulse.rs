//! Gaussian microwave pulse propagation through the converter.
//!
//! Spectral densities are photons per rad/s, normalized so that photon
//! numbers are plain `d omega` integrals of densities. Stationary thermal
//! noise enters as a flux density with an explicit `1/(2 pi)`; the
//! correlation-matrix engine in [`crate::oracle`] pins that constant.

use serde::{Deserialize, Serialize};

use crate::params::DerivedSystem;
use crate::scattering::scattering_row;
use crate::{quad, Error};

/// Incoming coherent microwave pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    /// Total photon number.
    pub n_p: f64,
    /// Spectral width parameter W, rad/s (the density is Gaussian with
    /// standard deviation W/2).
    pub width: f64,
    /// Carrier offset from the microwave cavity resonance, rad/s.
    pub carrier_offset: f64,
}

impl GaussianPulse {
    pub fn new(n_p: f64, width: f64, carrier_offset: f64) -> Result<Self, Error> {
        if !(n_p >= 0.0) || !n_p.is_finite() {
            return Err(Error::OutOfRange("n_p", format!("{n_p} < 0")));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::NonPositiveParameter("W"));
        }
        Ok(GaussianPulse { n_p, width, carrier_offset })
    }
}

/// Sampled spectral density on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSamples {
    /// Detuning grid, rad/s, strictly increasing.
    pub omegas: Vec<f64>,
    /// Density, photons per rad/s, nonnegative.
    pub values: Vec<f64>,
}

impl SpectrumSamples {
    pub fn validate(&self) -> Result<(), Error> {
        if self.omegas.len() != self.values.len() {
            return Err(Error::OutOfRange("spectrum", "grid/value length mismatch".into()));
        }
        if self.omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::OutOfRange("spectrum", "grid not strictly increasing".into()));
        }
        if self.values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::OutOfRange("spectrum", "negative density".into()));
        }
        Ok(())
    }
}

/// Whether (and over which band) stationary thermal noise is counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseSetting {
    Off,
    /// Count noise over `|omega| <= half_width`, rad/s.
    Band { half_width: f64 },
}

impl NoiseSetting {
    /// Default detection band: one converter bandwidth.
    pub fn default_band(sys: &DerivedSystem) -> Self {
        NoiseSetting::Band { half_width: sys.w_c }
    }
}

/// Input photon flux density `|alpha(omega)|^2`, photons per rad/s:
/// a Gaussian of standard deviation W/2 carrying `n_p` photons.
pub fn input_spectrum(pulse: &GaussianPulse, omega: f64) -> f64 {
    let d = omega - pulse.carrier_offset;
    let w = pulse.width;
    pulse.n_p * (-2.0 * d * d / (w * w)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * w / 2.0)
}

/// Stationary thermal-noise flux density at the optical output,
/// photons per rad/s.
pub fn noise_density(sys: &DerivedSystem, omega: f64) -> f64 {
    let row = scattering_row(sys, omega);
    (row.c.norm_sqr() * sys.n_b_t
        + row.d.norm_sqr() * sys.n_w_t
        + (row.a.norm_sqr() + row.e.norm_sqr()) * sys.n_o_t)
        / (2.0 * std::f64::consts::PI)
}

/// Optical-output spectral density: converted signal plus thermal noise.
pub fn output_spectrum(sys: &DerivedSystem, pulse: &GaussianPulse, omega: f64) -> f64 {
    signal_spectrum(sys, pulse, omega) + noise_density(sys, omega)
}

/// Converted-signal part only, `|B(omega)|^2 |alpha(omega)|^2`.
pub fn signal_spectrum(sys: &DerivedSystem, pulse: &GaussianPulse, omega: f64) -> f64 {
    scattering_row(sys, omega).b.norm_sqr() * input_spectrum(pulse, omega)
}

const QUAD_REL_TOL: f64 = 1e-10;

/// Mean output photon number per pulse: the signal density integrated over
/// the union of the pulse support (eight widths) and the converter band
/// (eight bandwidths), plus band-integrated noise when enabled.
pub fn converted_photons(
    sys: &DerivedSystem,
    pulse: &GaussianPulse,
    noise: NoiseSetting,
) -> Result<f64, Error> {
    let signal = quad::integrate_union(
        &|omega| signal_spectrum(sys, pulse, omega),
        &[
            (pulse.carrier_offset - 8.0 * pulse.width, pulse.carrier_offset + 8.0 * pulse.width),
            (-8.0 * sys.w_c, 8.0 * sys.w_c),
        ],
        QUAD_REL_TOL,
    )?;
    let noise_photons = band_noise_photons(sys, noise)?;
    Ok(signal + noise_photons)
}

/// Thermal noise photons collected over the detection band.
pub fn band_noise_photons(sys: &DerivedSystem, noise: NoiseSetting) -> Result<f64, Error> {
    match noise {
        NoiseSetting::Off => Ok(0.0),
        NoiseSetting::Band { half_width } => {
            if sys.n_b_t == 0.0 && sys.n_w_t == 0.0 && sys.n_o_t == 0.0 {
                return Ok(0.0);
            }
            quad::integrate(&|omega| noise_density(sys, omega), -half_width, half_width, QUAD_REL_TOL)
        }
    }
}
