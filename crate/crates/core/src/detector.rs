//! End-to-end detector figure of merit: effective quantum efficiency,
//! thermal count floor, detected photons per pulse.

use serde::{Deserialize, Serialize};

use crate::params::DerivedSystem;
use crate::pulse::{self, GaussianPulse, NoiseSetting};
use crate::scattering::{b_coeff_dc, scattering_row};
use crate::Error;

/// Broadband lossy optical photodetector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Photodetection efficiency, in [0, 1].
    pub eta: f64,
    /// Detector bandwidth, rad/s. Enters only as the validity check
    /// `W_c << bandwidth`; no spectral filtering is modeled.
    pub bandwidth: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, bandwidth: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange("eta", format!("{eta} not in [0, 1]")));
        }
        if !(bandwidth > 0.0) {
            return Err(Error::NonPositiveParameter("bandwidth"));
        }
        Ok(DetectorModel { eta, bandwidth })
    }

    /// Ideal detector with a 10 GHz (angular 2 pi x 10^10 rad/s) bandwidth.
    pub fn ideal() -> Self {
        DetectorModel { eta: 1.0, bandwidth: std::f64::consts::TAU * 10e9 }
    }

    /// True when the converter bandwidth fits comfortably inside the
    /// detector bandwidth.
    pub fn covers(&self, sys: &DerivedSystem) -> bool {
        sys.w_c * 10.0 <= self.bandwidth
    }
}

/// Effective quantum efficiency of the microwave detector,
/// `eta_eff = eta |B(0)|^2`.
pub fn eta_eff(sys: &DerivedSystem, det: &DetectorModel) -> f64 {
    det.eta * b_coeff_dc(sys)
}

/// Point-value thermal count floor `|C(0)|^2 n_b^T + |D(0)|^2 n_w^T`.
pub fn thermal_counts(sys: &DerivedSystem) -> f64 {
    let row = scattering_row(sys, 0.0);
    row.c.norm_sqr() * sys.n_b_t + row.d.norm_sqr() * sys.n_w_t
}

/// Band-integrated thermal counts (delegates to the pulse module's
/// stationary noise flux density).
pub fn thermal_counts_band(sys: &DerivedSystem, noise: NoiseSetting) -> Result<f64, Error> {
    pulse::band_noise_photons(sys, noise)
}

/// Detected photon number per pulse: narrowband approximation, exact
/// quadrature path, and their discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectedPhotons {
    /// `eta_eff n_p + eta N_thermal` (point-value thermal floor).
    pub approx: f64,
    /// `eta` times the band-integrated signal-plus-noise photon number.
    pub exact: f64,
    pub discrepancy: f64,
}

/// Both evaluation paths for the detected photon number.
///
/// The approximate path requires a narrowband pulse (`W <= 0.3 W_c`);
/// use [`detected_photons_exact`] outside that regime.
pub fn detected_photons(
    sys: &DerivedSystem,
    pulse: &GaussianPulse,
    det: &DetectorModel,
    noise: NoiseSetting,
) -> Result<DetectedPhotons, Error> {
    let limit = 0.3 * sys.w_c;
    if pulse.width > limit {
        return Err(Error::ApproximationOutOfRange { w: pulse.width, limit });
    }
    let approx = eta_eff(sys, det) * pulse.n_p
        + det.eta
            * match noise {
                NoiseSetting::Off => 0.0,
                NoiseSetting::Band { .. } => thermal_counts(sys),
            };
    let exact = detected_photons_exact(sys, pulse, det, noise)?;
    Ok(DetectedPhotons { approx, exact, discrepancy: (approx - exact).abs() })
}

/// Exact path: `eta` times the full output photon number.
pub fn detected_photons_exact(
    sys: &DerivedSystem,
    pulse: &GaussianPulse,
    det: &DetectorModel,
    noise: NoiseSetting,
) -> Result<f64, Error> {
    Ok(det.eta * pulse::converted_photons(sys, pulse, noise)?)
}
