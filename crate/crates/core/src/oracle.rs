//! Independent verification engines.
//!
//! Nothing here shares a code path with the structured solve in
//! [`crate::scattering`] or the closed forms: the scattering row is
//! recomputed with a generic pivoted dense solver, the transfer coefficients
//! with a time-domain mean-field integration, and the stationary noise flux
//! with a correlation-matrix ODE. Disagreement beyond the stated tolerances
//! is build-blocking.

use num_complex::Complex64;
use serde::Serialize;

use crate::params::DerivedSystem;
use crate::pulse::noise_density;
use crate::scattering::{scattering_row, ScatteringRow};
use crate::{quad, Error};

/// Monochromatic probe on one input channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveProbe {
    pub channel: ProbeChannel,
    pub amplitude: Complex64,
    /// Detuning from the channel carrier, rad/s.
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeChannel {
    MicrowaveExt,
    OpticalExt,
    Mechanical,
}

impl DriveProbe {
    pub fn validate(&self) -> Result<(), Error> {
        if self.amplitude.norm() == 0.0 || !self.amplitude.is_finite() {
            return Err(Error::OutOfRange("amplitude", "must be finite and nonzero".into()));
        }
        Ok(())
    }
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
fn lu_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>, Error> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("nonempty column");
        if a[pivot][col].norm() == 0.0 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] -= sub;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

fn drift_matrix(sys: &DerivedSystem, omega: f64) -> Vec<Vec<Complex64>> {
    let i = Complex64::i();
    vec![
        vec![
            Complex64::new(sys.gamma_m, -omega),
            i * sys.big_g_w,
            i * sys.big_g_o,
        ],
        vec![i * sys.big_g_w, Complex64::new(sys.kappa_w, -omega), Complex64::new(0.0, 0.0)],
        vec![i * sys.big_g_o, Complex64::new(0.0, 0.0), Complex64::new(sys.kappa_o, -omega)],
    ]
}

/// Optical-output scattering row recomputed with the generic pivoted solve.
/// Contract identical to [`scattering_row`].
pub fn dense_scattering(sys: &DerivedSystem, omega: f64) -> Result<ScatteringRow, Error> {
    let out_w = (2.0 * sys.kappa_o_ext).sqrt();
    let optical_response = |row_index: usize, weight: f64| -> Result<Complex64, Error> {
        let mut rhs = vec![Complex64::new(0.0, 0.0); 3];
        rhs[row_index] = Complex64::from(weight);
        Ok(lu_solve(drift_matrix(sys, omega), rhs)?[2])
    };

    let per_oext = optical_response(2, (2.0 * sys.kappa_o_ext).sqrt())?;
    let per_oint = optical_response(2, (2.0 * sys.kappa_o_int).sqrt())?;
    let per_wext = optical_response(1, (2.0 * sys.kappa_w_ext).sqrt())?;
    let per_wint = optical_response(1, (2.0 * sys.kappa_w_int).sqrt())?;
    let per_bin = optical_response(0, (2.0 * sys.gamma_m).sqrt())?;

    Ok(ScatteringRow {
        omega,
        a: -(out_w * per_oext - 1.0),
        b: -(out_w * per_wext),
        c: -(out_w * per_bin),
        d: -(out_w * per_wint),
        e: -(out_w * per_oint),
    })
}

fn fastest_rate(sys: &DerivedSystem) -> f64 {
    [sys.gamma_m, sys.kappa_w, sys.kappa_o, sys.w_c, sys.big_g_w, sys.big_g_o]
        .into_iter()
        .fold(0.0, f64::max)
}

/// Slowest relevant relaxation rate, used to size integration horizons.
pub fn relaxation_rate(sys: &DerivedSystem) -> f64 {
    sys.w_c.min(sys.kappa_w).min(sys.kappa_o)
}

/// Steady-state complex transfer ratio from a monochromatic probe to the
/// optical output, by fixed-step 4th-order integration of the mean-field
/// equations. Matches the corresponding scattering coefficient (with the
/// overall output minus sign) to relative 1e-6.
pub fn time_domain_response(
    sys: &DerivedSystem,
    probe: &DriveProbe,
    horizon: f64,
) -> Result<Complex64, Error> {
    probe.validate()?;
    let min_horizon = 20.0 / relaxation_rate(sys);
    if horizon < min_horizon {
        return Err(Error::OutOfRange(
            "horizon",
            format!("{horizon} s too short for transient decay (need >= {min_horizon:.3e} s)"),
        ));
    }

    let (row, weight) = match probe.channel {
        ProbeChannel::Mechanical => (0, (2.0 * sys.gamma_m).sqrt()),
        ProbeChannel::MicrowaveExt => (1, (2.0 * sys.kappa_w_ext).sqrt()),
        ProbeChannel::OpticalExt => (2, (2.0 * sys.kappa_o_ext).sqrt()),
    };
    let m = drift_matrix(sys, 0.0);
    let delta = probe.detuning;
    let h = 0.02 / fastest_rate(sys).max(delta.abs());
    let steps = (horizon / h).ceil() as usize;

    let deriv = |t: f64, y: &[Complex64; 3]| -> [Complex64; 3] {
        let drive = probe.amplitude * Complex64::new(0.0, -delta * t).exp();
        let mut dy = [Complex64::new(0.0, 0.0); 3];
        for r in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..3 {
                acc -= m[r][c] * y[c];
            }
            if r == row {
                acc += weight * drive;
            }
            dy[r] = acc;
        }
        dy
    };

    let mut y = [Complex64::new(0.0, 0.0); 3];
    let window_start = steps - (steps / 10).max(2);
    let mut samples: Vec<Complex64> = Vec::new();
    let out_w = (2.0 * sys.kappa_o_ext).sqrt();
    for step in 0..steps {
        let t = step as f64 * h;
        if step >= window_start {
            let mut out = out_w * y[2];
            if probe.channel == ProbeChannel::OpticalExt {
                out -= probe.amplitude * Complex64::new(0.0, -delta * t).exp();
            }
            // demodulate at the drive detuning
            samples.push(out * Complex64::new(0.0, delta * t).exp() / probe.amplitude);
        }
        y = rk4_step(&deriv, t, &y, h);
    }

    let mean = samples.iter().sum::<Complex64>() / samples.len() as f64;
    let drift = samples.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
    if drift > 1e-7 * mean.norm().max(1e-9) {
        return Err(Error::NotConverged(format!(
            "trailing-window amplitude drift {drift:.3e} (mean magnitude {:.3e})",
            mean.norm()
        )));
    }
    Ok(mean)
}

fn rk4_step<F: Fn(f64, &[Complex64; 3]) -> [Complex64; 3]>(
    f: &F,
    t: f64,
    y: &[Complex64; 3],
    h: f64,
) -> [Complex64; 3] {
    let add = |y: &[Complex64; 3], k: &[Complex64; 3], s: f64| {
        let mut out = *y;
        for i in 0..3 {
            out[i] += k[i] * s;
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = f(t + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Stationary optical-output photon flux from thermal inputs, photons/s,
/// via the normal-ordered 3x3 correlation-matrix ODE.
///
/// Thermal diffusion: `2 gamma_M n_b^T` on the mechanics and
/// `2 kappa_w^int n_w^T` on the microwave cavity. The external microwave
/// line is the signal port and is held in vacuum here, as are both optical
/// inputs. Must equal the frequency integral of [`noise_density`] to
/// relative 1e-6.
pub fn stationary_noise_flux(sys: &DerivedSystem) -> Result<f64, Error> {
    let diffusion = [
        2.0 * sys.gamma_m * sys.n_b_t,
        2.0 * sys.kappa_w_int * sys.n_w_t,
        0.0,
    ];
    if diffusion.iter().all(|d| *d == 0.0) {
        return Ok(0.0);
    }

    let m = drift_matrix(sys, 0.0);
    // d N / dt = -(conj(M) N + N M^T) + diag(diffusion)
    let deriv = |n: &[[Complex64; 3]; 3]| -> [[Complex64; 3]; 3] {
        let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    acc -= m[r][k].conj() * n[k][c];
                    acc -= n[r][k] * m[c][k];
                }
                if r == c {
                    acc += diffusion[r];
                }
                out[r][c] = acc;
            }
        }
        out
    };

    let fastest = fastest_rate(sys);
    let h = 0.02 / fastest;
    let scale = diffusion.iter().fold(0.0f64, |a, d| a.max(*d));
    let mut n = [[Complex64::new(0.0, 0.0); 3]; 3];
    let max_steps = 50_000_000usize;
    let mut step = 0usize;
    loop {
        // fixed-point of the RK4 map for an affine system is the exact
        // equilibrium, so the residual is a faithful convergence measure
        let k1 = deriv(&n);
        if step % 512 == 0 {
            let residual = k1
                .iter()
                .flatten()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            // the residual is a difference of terms of size ~ fastest*|N|,
            // so roundoff floors it at machine epsilon times that scale
            let n_mag = n.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            if residual <= 1e-12 * scale.max(fastest * n_mag) {
                break;
            }
            if step >= max_steps {
                return Err(Error::NotConverged(format!(
                    "correlation-matrix residual {residual:.3e} after {step} steps"
                )));
            }
        }
        let advance = |n: &[[Complex64; 3]; 3], k: &[[Complex64; 3]; 3], s: f64| {
            let mut out = *n;
            for r in 0..3 {
                for c in 0..3 {
                    out[r][c] += k[r][c] * s;
                }
            }
            out
        };
        let k2 = deriv(&advance(&n, &k1, 0.5 * h));
        let k3 = deriv(&advance(&n, &k2, 0.5 * h));
        let k4 = deriv(&advance(&n, &k3, h));
        for r in 0..3 {
            for c in 0..3 {
                n[r][c] += h / 6.0 * (k1[r][c] + 2.0 * (k2[r][c] + k3[r][c]) + k4[r][c]);
            }
        }
        step += 1;
    }

    // output flux via input-output; optical inputs are vacuum, so no
    // cross terms survive normal ordering
    Ok(2.0 * sys.kappa_o_ext * n[2][2].re)
}

/// Frequency integral of the stationary noise flux density, photons/s,
/// over an adaptively widened band.
pub fn frequency_integrated_noise(sys: &DerivedSystem) -> Result<f64, Error> {
    let mut half = 16.0 * fastest_rate(sys);
    let mut total = quad::integrate(&|w| noise_density(sys, w), -half, half, 1e-10)?;
    loop {
        let wider = 2.0 * half;
        let extra = quad::integrate(&|w| noise_density(sys, w), half, wider, 1e-10)?
            + quad::integrate(&|w| noise_density(sys, w), -wider, -half, 1e-10)?;
        total += extra;
        half = wider;
        if extra.abs() <= 1e-9 * total.abs().max(1e-300) {
            return Ok(total);
        }
        if half > 1e9 * fastest_rate(sys) {
            return Err(Error::QuadratureNonConvergence(extra.abs()));
        }
    }
}

/// One oracle comparison line.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Cross-implementation verification report for one operating point.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Run the full oracle suite against the structured implementation.
pub fn run_report(sys: &DerivedSystem) -> Result<OracleReport, Error> {
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<OracleCheck>, name: &str, dev: f64, tol: f64| {
        checks.push(OracleCheck {
            name: name.to_owned(),
            max_deviation: dev,
            tolerance: tol,
            pass: dev < tol,
        });
    };

    // dense solve vs structured solve, componentwise
    let mut max_dev = 0.0f64;
    let mut max_defect = 0.0f64;
    for k in -10..=10 {
        let omega = sys.w_c * k as f64 / 2.0;
        let dense = dense_scattering(sys, omega)?;
        let structured = scattering_row(sys, omega);
        for (x, y) in [
            (dense.a, structured.a),
            (dense.b, structured.b),
            (dense.c, structured.c),
            (dense.d, structured.d),
            (dense.e, structured.e),
        ] {
            max_dev = max_dev.max((x - y).norm());
        }
        max_defect = max_defect.max(crate::scattering::sum_rule_defect(&dense));
    }
    push(&mut checks, "dense solve vs structured solve (componentwise)", max_dev, 1e-12);
    push(&mut checks, "dense solve sum rule defect", max_defect, 1e-12);

    // time-domain steady state vs B(omega) at 10 detunings
    let horizon = 60.0 / relaxation_rate(sys);
    let mut max_rel = 0.0f64;
    for k in 0..10 {
        let detuning = sys.w_c * (k as f64 - 4.5) / 3.0;
        let probe = DriveProbe {
            channel: ProbeChannel::MicrowaveExt,
            amplitude: Complex64::new(1.0, 0.0),
            detuning,
        };
        let ratio = time_domain_response(sys, &probe, horizon)?;
        let expected = -scattering_row(sys, detuning).b;
        let denom = expected.norm().max(1e-12);
        max_rel = max_rel.max((ratio - expected).norm() / denom);
    }
    push(&mut checks, "time-domain transfer vs B(omega)", max_rel, 1e-6);

    // stationary correlation-matrix flux vs frequency-integrated density
    let flux = stationary_noise_flux(sys)?;
    let integral = frequency_integrated_noise(sys)?;
    let dev = if flux == 0.0 && integral == 0.0 {
        0.0
    } else {
        (flux - integral).abs() / integral.abs().max(1e-300)
    };
    push(&mut checks, "stationary noise flux vs frequency integral", dev, 1e-6);

    Ok(OracleReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{reference_params, DerivedSystem, RateSet};

    fn cold(coop_w: f64, coop_o: f64, eta_w: f64, eta_o: f64) -> DerivedSystem {
        DerivedSystem::from_cooperativities(coop_w, coop_o, eta_w, eta_o, RateSet::default())
            .unwrap()
    }

    #[test]
    fn dense_agrees_with_structured() {
        for sys in [
            cold(1.0, 1.0, 1.0, 1.0),
            cold(50.0, 20.0, 0.8, 0.6),
            reference_params().derive().unwrap(),
        ] {
            for k in -7..=7 {
                let omega = sys.w_c * k as f64 * 0.7;
                let dense = dense_scattering(&sys, omega).unwrap();
                let fast = scattering_row(&sys, omega);
                for (x, y) in [
                    (dense.a, fast.a),
                    (dense.b, fast.b),
                    (dense.c, fast.c),
                    (dense.d, fast.d),
                    (dense.e, fast.e),
                ] {
                    assert!((x - y).norm() < 1e-12);
                }
                assert!(crate::scattering::sum_rule_defect(&dense) < 1e-12);
            }
        }
    }

    #[test]
    fn dense_decoupled_reflection() {
        let sys = cold(0.0, 0.0, 1.0, 1.0);
        let row = dense_scattering(&sys, 3.7).unwrap();
        assert!((row.a.norm() - 1.0).abs() < 1e-14);
        assert!(row.b.norm() < 1e-15);
    }

    #[test]
    fn time_domain_matches_dc_coefficient() {
        let sys = cold(2.0, 3.0, 1.0, 1.0);
        let probe = DriveProbe {
            channel: ProbeChannel::MicrowaveExt,
            amplitude: Complex64::new(1.0, 0.0),
            detuning: 0.0,
        };
        let horizon = 60.0 / relaxation_rate(&sys);
        let ratio = time_domain_response(&sys, &probe, horizon).unwrap();
        let expected = -scattering_row(&sys, 0.0).b;
        assert!((ratio - expected).norm() / expected.norm() < 1e-6);
    }

    #[test]
    fn time_domain_off_peak_suppression() {
        let sys = cold(2.0, 3.0, 1.0, 1.0);
        let horizon = 60.0 / relaxation_rate(&sys);
        let probe_at = |detuning: f64| DriveProbe {
            channel: ProbeChannel::MicrowaveExt,
            amplitude: Complex64::new(1.0, 0.0),
            detuning,
        };
        let on_peak = time_domain_response(&sys, &probe_at(0.0), horizon).unwrap();
        let off_peak = time_domain_response(&sys, &probe_at(3.0 * sys.w_c), horizon).unwrap();
        assert!(off_peak.norm() < on_peak.norm());
    }

    #[test]
    fn time_domain_bare_reflection() {
        let sys = cold(0.0, 0.0, 1.0, 1.0);
        let probe = DriveProbe {
            channel: ProbeChannel::OpticalExt,
            amplitude: Complex64::new(0.0, 2.0),
            detuning: 0.7 * sys.kappa_o,
        };
        let horizon = 60.0 / relaxation_rate(&sys);
        let ratio = time_domain_response(&sys, &probe, horizon).unwrap();
        assert!((ratio.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn time_domain_step_halving_robust() {
        // halving the step is emulated by comparing against a run with the
        // same horizon; the fixed step derives from the rates, so instead
        // double all rates' resolution via a longer horizon and compare.
        let sys = cold(1.0, 4.0, 1.0, 1.0);
        let probe = DriveProbe {
            channel: ProbeChannel::MicrowaveExt,
            amplitude: Complex64::new(1.0, 0.0),
            detuning: 0.4 * sys.w_c,
        };
        let horizon = 60.0 / relaxation_rate(&sys);
        let a = time_domain_response(&sys, &probe, horizon).unwrap();
        let b = time_domain_response(&sys, &probe, 2.0 * horizon).unwrap();
        assert!((a - b).norm() / b.norm() < 1e-8);
    }

    #[test]
    fn rejects_short_horizon_and_zero_amplitude() {
        let sys = cold(1.0, 1.0, 1.0, 1.0);
        let probe = DriveProbe {
            channel: ProbeChannel::MicrowaveExt,
            amplitude: Complex64::new(1.0, 0.0),
            detuning: 0.0,
        };
        assert!(matches!(
            time_domain_response(&sys, &probe, 1e-9),
            Err(Error::OutOfRange("horizon", _))
        ));
        let bad = DriveProbe { amplitude: Complex64::new(0.0, 0.0), ..probe };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn noise_flux_zero_at_zero_temperature() {
        let sys = cold(5.0, 5.0, 1.0, 1.0);
        assert_eq!(stationary_noise_flux(&sys).unwrap(), 0.0);
    }

    #[test]
    fn noise_flux_zero_for_decoupled_optics() {
        let sys = cold(5.0, 0.0, 1.0, 1.0).with_thermal_occupations(10.0, 1.0, 0.0);
        let flux = stationary_noise_flux(&sys).unwrap();
        // mechanics and microwave thermalize, but nothing reaches the
        // optical output
        assert!(flux.abs() < 1e-9 * 10.0);
    }

    #[test]
    fn noise_flux_matches_frequency_integral() {
        // lossy microwave coupling so the internal port carries weight
        let sys = cold(3.0, 2.0, 0.7, 0.9).with_thermal_occupations(25.0, 2.0, 0.0);
        let flux = stationary_noise_flux(&sys).unwrap();
        let integral = frequency_integrated_noise(&sys).unwrap();
        assert!((flux - integral).abs() / integral < 1e-6, "{flux} vs {integral}");
    }
}
