//! Design-space sweeps over the two cooperativities and the matched-diagonal
//! minimum-cooperativity search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{self, DetectorModel};
use crate::params::DerivedSystem;
use crate::pulse::{GaussianPulse, NoiseSetting};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// Rectangular grid over `(Gamma_w, Gamma_o)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub gamma_w_range: (f64, f64),
    pub gamma_o_range: (f64, f64),
    /// Points per axis.
    pub points: usize,
    pub scale: GridScale,
}

impl GridSpec {
    /// Paper-scale default: logarithmic, `Gamma in [1e-2, 1e3]`, 101 points
    /// per axis.
    pub fn default_log() -> Self {
        GridSpec {
            gamma_w_range: (1e-2, 1e3),
            gamma_o_range: (1e-2, 1e3),
            points: 101,
            scale: GridScale::Log,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.points < 2 {
            return Err(Error::OutOfRange("points", format!("{} < 2", self.points)));
        }
        for (name, (lo, hi)) in
            [("gamma_w_range", self.gamma_w_range), ("gamma_o_range", self.gamma_o_range)]
        {
            if !(hi > lo) {
                return Err(Error::OutOfRange(name, format!("[{lo}, {hi}] is empty")));
            }
            let floor_ok = match self.scale {
                GridScale::Log => lo > 0.0,
                GridScale::Linear => lo >= 0.0,
            };
            if !floor_ok {
                return Err(Error::OutOfRange(name, format!("min {lo} invalid for this scale")));
            }
        }
        Ok(())
    }

    fn axis(&self, range: (f64, f64)) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.scale {
                    GridScale::Linear => range.0 + t * (range.1 - range.0),
                    GridScale::Log => (range.0.ln() + t * (range.1.ln() - range.0.ln())).exp(),
                }
            })
            .collect()
    }

    pub fn gamma_w_axis(&self) -> Vec<f64> {
        self.axis(self.gamma_w_range)
    }

    pub fn gamma_o_axis(&self) -> Vec<f64> {
        self.axis(self.gamma_o_range)
    }
}

/// Pulse description for sweeps: the width may track the converter
/// bandwidth of each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub n_p: f64,
    pub width: WidthSpec,
    pub carrier_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WidthSpec {
    /// rad/s.
    Absolute(f64),
    /// Fraction of the grid point's `W_c`.
    RelativeToBandwidth(f64),
}

impl PulseSpec {
    pub fn resolve(&self, sys: &DerivedSystem) -> Result<GaussianPulse, Error> {
        let width = match self.width {
            WidthSpec::Absolute(w) => w,
            WidthSpec::RelativeToBandwidth(f) => f * sys.w_c,
        };
        GaussianPulse::new(self.n_p, width, self.carrier_offset)
    }
}

/// A scalar figure of merit over the cooperativity grid, row-major with the
/// `Gamma_w` index outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySurface {
    pub grid: GridSpec,
    pub gamma_w_axis: Vec<f64>,
    pub gamma_o_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub quantity: String,
}

impl EfficiencySurface {
    pub fn value(&self, i_w: usize, i_o: usize) -> f64 {
        self.values[i_w * self.gamma_o_axis.len() + i_o]
    }
}

fn evaluate_grid<F>(base: &DerivedSystem, grid: &GridSpec, quantity: &str, f: F) -> Result<EfficiencySurface, Error>
where
    F: Fn(&DerivedSystem) -> Result<f64, Error> + Sync,
{
    grid.validate()?;
    let gw = grid.gamma_w_axis();
    let go = grid.gamma_o_axis();
    let values: Result<Vec<f64>, Error> = (0..gw.len() * go.len())
        .into_par_iter()
        .map(|idx| {
            let (i_w, i_o) = (idx / go.len(), idx % go.len());
            f(&base.with_cooperativities(gw[i_w], go[i_o]))
        })
        .collect();
    Ok(EfficiencySurface {
        grid: *grid,
        gamma_w_axis: gw,
        gamma_o_axis: go,
        values: values?,
        quantity: quantity.to_owned(),
    })
}

/// Effective quantum efficiency `eta |B(0)|^2` over the grid.
pub fn efficiency_surface(
    base: &DerivedSystem,
    det: &DetectorModel,
    grid: &GridSpec,
) -> Result<EfficiencySurface, Error> {
    evaluate_grid(base, grid, "eta_eff", |sys| Ok(detector::eta_eff(sys, det)))
}

/// Photon conversion ratio `N_o / n_p` over the grid (0 by convention for
/// an empty pulse).
pub fn ratio_surface(
    base: &DerivedSystem,
    pulse: &PulseSpec,
    noise: NoiseSetting,
    grid: &GridSpec,
) -> Result<EfficiencySurface, Error> {
    evaluate_grid(base, grid, "conversion_ratio", |sys| {
        if pulse.n_p == 0.0 {
            return Ok(0.0);
        }
        let resolved = pulse.resolve(sys)?;
        let noise = match noise {
            // keep the band tied to each grid point's bandwidth
            NoiseSetting::Band { .. } => NoiseSetting::default_band(sys),
            NoiseSetting::Off => NoiseSetting::Off,
        };
        Ok(crate::pulse::converted_photons(sys, &resolved, noise)? / pulse.n_p)
    })
}

const BISECTION_REL_TOL: f64 = 1e-6;

/// Smallest matched-diagonal cooperativity `Gamma_w = Gamma_o = Gamma` with
/// `eta_eff >= target`, found by bisection to relative 1e-6.
pub fn find_min_cooperativity(
    target_eff: f64,
    det: &DetectorModel,
    base: &DerivedSystem,
) -> Result<f64, Error> {
    if !(target_eff > 0.0) {
        return Err(Error::OutOfRange("target_eff", format!("{target_eff} <= 0")));
    }
    let ceiling = det.eta * base.eta_w() * base.eta_o();
    if target_eff >= ceiling {
        return Err(Error::TargetUnreachable { target: target_eff, ceiling });
    }
    let eval = |coop: f64| detector::eta_eff(&base.with_cooperativities(coop, coop), det);

    let mut lo = 0.0;
    let mut hi = 1.0;
    while eval(hi) < target_eff {
        lo = hi;
        hi *= 2.0;
        if hi > 1e18 {
            return Err(Error::NotConverged("bisection bracket exceeded 1e18".into()));
        }
    }
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if eval(mid) >= target_eff {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
