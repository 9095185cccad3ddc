//! Operating-point derivation: from raw hardware parameters to couplings,
//! cooperativities, converter bandwidth and thermal occupations.
//!
//! Three input tiers build a [`DerivedSystem`]:
//! 1. cooperativities given directly ([`DerivedSystem::from_cooperativities`]),
//! 2. many-photon couplings given ([`DerivedSystem::from_couplings`]),
//! 3. full physical hardware description ([`PhysicalParams::derive`]).
//!
//! Lower tiers populate only what they determine; operations that need a
//! missing field return [`Error::MissingParameter`].

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, HBAR, K_B};
use crate::Error;

/// Raw hardware description of the electro-opto-mechanical converter.
///
/// All angular frequencies and decay parameters are in rad/s (amplitude
/// decay convention: inputs couple with weight `sqrt(2 kappa)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Effective mass of the mechanical resonator, kg.
    pub mass: f64,
    /// Mechanical angular frequency, rad/s.
    pub omega_m: f64,
    /// Mechanical quality factor (energy convention, `gamma_M = omega_M / Q`).
    pub quality: f64,
    /// Microwave cavity angular frequency, rad/s.
    pub omega_w: f64,
    /// Optical drive wavelength, m.
    pub lambda_o: f64,
    /// Optical cavity length, m.
    pub cavity_length: f64,
    /// Total microwave cavity decay parameter, rad/s.
    pub kappa_w: f64,
    /// Total optical cavity decay parameter, rad/s.
    pub kappa_o: f64,
    /// External-coupling fraction `kappa_w^ext / kappa_w`, in [0, 1].
    pub eta_cpl_w: f64,
    /// External-coupling fraction `kappa_o^ext / kappa_o`, in [0, 1].
    pub eta_cpl_o: f64,
    /// Microwave pump power, W.
    pub p_w: f64,
    /// Optical pump power, W.
    pub p_o: f64,
    /// Single-photon electromechanical coupling, rad/s (direct input: it
    /// cannot be derived without the circuit geometry).
    pub g_w: f64,
    /// Converter temperature, K.
    pub temperature: f64,
}

/// Non-fatal diagnostics emitted while deriving an operating point.
#[derive(Debug, Clone, PartialEq)]
pub enum DeriveWarning {
    /// `kappa >= omega_M` on a branch: the resolved-sideband (beam-splitter)
    /// approximation is not justified there.
    ResolvedSidebandViolation {
        branch: &'static str,
        kappa: f64,
        omega_m: f64,
    },
}

impl std::fmt::Display for DeriveWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeriveWarning::ResolvedSidebandViolation { branch, kappa, omega_m } => write!(
                f,
                "resolved-sideband condition violated on {branch} branch: kappa = {kappa:.6e} rad/s >= omega_M = {omega_m:.6e} rad/s"
            ),
        }
    }
}

/// Derived operating point of the converter.
///
/// Always populated: decay parameters, many-photon couplings `G_j`,
/// cooperativities `Gamma_j = G_j^2 / (kappa_j gamma_M)`, bandwidth
/// `W_c = gamma_M (1 + Gamma_w + Gamma_o)` and thermal occupations
/// (zero for tiers that carry no temperature). Optional fields are filled
/// only by the physical tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedSystem {
    #[serde(rename = "gamma_M")]
    pub gamma_m: f64,
    pub kappa_w: f64,
    pub kappa_o: f64,
    pub kappa_w_ext: f64,
    pub kappa_w_int: f64,
    pub kappa_o_ext: f64,
    pub kappa_o_int: f64,
    #[serde(rename = "G_w")]
    pub big_g_w: f64,
    #[serde(rename = "G_o")]
    pub big_g_o: f64,
    #[serde(rename = "Gamma_w")]
    pub coop_w: f64,
    #[serde(rename = "Gamma_o")]
    pub coop_o: f64,
    #[serde(rename = "W_c")]
    pub w_c: f64,
    #[serde(rename = "n_b_T")]
    pub n_b_t: f64,
    #[serde(rename = "n_w_T")]
    pub n_w_t: f64,
    #[serde(rename = "n_o_T")]
    pub n_o_t: f64,
    #[serde(rename = "g_o")]
    pub g_o_single: Option<f64>,
    #[serde(rename = "g_w")]
    pub g_w_single: Option<f64>,
    #[serde(rename = "N_w")]
    pub n_pump_w: Option<f64>,
    #[serde(rename = "N_o")]
    pub n_pump_o: Option<f64>,
    pub x_zpf: Option<f64>,
    #[serde(rename = "omega_M")]
    pub omega_m: Option<f64>,
    pub omega_w: Option<f64>,
    pub omega_o: Option<f64>,
    pub temperature: Option<f64>,
}

/// Decay parameters shared by the non-physical input tiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma_m: f64,
    pub kappa_w: f64,
    pub kappa_o: f64,
}

impl Default for RateSet {
    /// Normalized defaults for cooperativity-only studies: `gamma_M = 1`,
    /// cavities four decades faster (deep in the `kappa >> W_c` regime for
    /// moderate cooperativities).
    fn default() -> Self {
        RateSet { gamma_m: 1.0, kappa_w: 1.0e4, kappa_o: 1.0e4 }
    }
}

fn require_positive(value: f64, name: &'static str) -> Result<(), Error> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::NonPositiveParameter(name));
    }
    Ok(())
}

fn require_nonnegative(value: f64, name: &'static str) -> Result<(), Error> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::OutOfRange(name, format!("{value} < 0")));
    }
    Ok(())
}

fn require_fraction(value: f64, name: &'static str) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange(name, format!("{value} not in [0, 1]")));
    }
    Ok(())
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), Error> {
        require_positive(self.mass, "m")?;
        require_positive(self.omega_m, "omega_M")?;
        require_positive(self.omega_w, "omega_w")?;
        require_positive(self.lambda_o, "lambda_o")?;
        require_positive(self.cavity_length, "L")?;
        require_positive(self.kappa_w, "kappa_w")?;
        require_positive(self.kappa_o, "kappa_o")?;
        require_positive(self.g_w, "g_w")?;
        if self.quality < 1.0 {
            return Err(Error::OutOfRange("Q", format!("{} < 1", self.quality)));
        }
        require_fraction(self.eta_cpl_w, "eta_cpl_w")?;
        require_fraction(self.eta_cpl_o, "eta_cpl_o")?;
        require_nonnegative(self.p_w, "P_w")?;
        require_nonnegative(self.p_o, "P_o")?;
        require_nonnegative(self.temperature, "T")?;
        Ok(())
    }

    /// Non-fatal model-validity checks (resolved-sideband regime).
    pub fn warnings(&self) -> Vec<DeriveWarning> {
        let mut out = Vec::new();
        if self.kappa_w >= self.omega_m {
            out.push(DeriveWarning::ResolvedSidebandViolation {
                branch: "microwave",
                kappa: self.kappa_w,
                omega_m: self.omega_m,
            });
        }
        if self.kappa_o >= self.omega_m {
            out.push(DeriveWarning::ResolvedSidebandViolation {
                branch: "optical",
                kappa: self.kappa_o,
                omega_m: self.omega_m,
            });
        }
        out
    }

    /// Optical cavity angular frequency `2 pi c / lambda`, rad/s.
    pub fn omega_o(&self) -> f64 {
        2.0 * std::f64::consts::PI * C_LIGHT / self.lambda_o
    }

    /// Zero-point positional spread `sqrt(hbar / (2 m omega_M))`, m.
    pub fn x_zpf(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_m)).sqrt()
    }

    /// Derive the operating point at the red-sideband working detunings
    /// `Delta_w = Delta_o = omega_M`.
    ///
    /// Intracavity pump photon numbers follow
    /// `N_j = |E_j|^2 / (kappa_j^2 + omega_M^2)` with the external-drive
    /// amplitude `|E_j| = sqrt(2 kappa_j^ext P_j / (hbar omega_dj))` at the
    /// drive frequency `omega_dj = omega_j - omega_M`.
    pub fn derive(&self) -> Result<DerivedSystem, Error> {
        self.validate()?;

        let gamma_m = self.omega_m / self.quality;
        let omega_o = self.omega_o();
        let x_zpf = self.x_zpf();
        let g_o = omega_o / self.cavity_length * x_zpf;

        let kappa_w_ext = self.eta_cpl_w * self.kappa_w;
        let kappa_o_ext = self.eta_cpl_o * self.kappa_o;

        let pump_photons = |kappa: f64, kappa_ext: f64, power: f64, omega_cav: f64| {
            let omega_drive = omega_cav - self.omega_m;
            let amp_sq = 2.0 * kappa_ext * power / (HBAR * omega_drive);
            amp_sq / (kappa * kappa + self.omega_m * self.omega_m)
        };
        let n_pump_w = pump_photons(self.kappa_w, kappa_w_ext, self.p_w, self.omega_w);
        let n_pump_o = pump_photons(self.kappa_o, kappa_o_ext, self.p_o, omega_o);

        let big_g_w = self.g_w * n_pump_w.sqrt();
        let big_g_o = g_o * n_pump_o.sqrt();

        let coop_w = big_g_w * big_g_w / (self.kappa_w * gamma_m);
        let coop_o = big_g_o * big_g_o / (self.kappa_o * gamma_m);

        Ok(DerivedSystem {
            gamma_m,
            kappa_w: self.kappa_w,
            kappa_o: self.kappa_o,
            kappa_w_ext,
            kappa_w_int: self.kappa_w - kappa_w_ext,
            kappa_o_ext,
            kappa_o_int: self.kappa_o - kappa_o_ext,
            big_g_w,
            big_g_o,
            coop_w,
            coop_o,
            w_c: gamma_m * (1.0 + coop_w + coop_o),
            n_b_t: thermal_occupation(self.omega_m, self.temperature)?,
            n_w_t: thermal_occupation(self.omega_w, self.temperature)?,
            n_o_t: thermal_occupation(omega_o, self.temperature)?,
            g_o_single: Some(g_o),
            g_w_single: Some(self.g_w),
            n_pump_w: Some(n_pump_w),
            n_pump_o: Some(n_pump_o),
            x_zpf: Some(x_zpf),
            omega_m: Some(self.omega_m),
            omega_w: Some(self.omega_w),
            omega_o: Some(omega_o),
            temperature: Some(self.temperature),
        })
    }
}

impl DerivedSystem {
    /// Tier-1 builder: cooperativities given directly. Decay parameters
    /// default to the normalized [`RateSet`]; thermal occupations are zero
    /// (no temperature information at this tier).
    pub fn from_cooperativities(
        coop_w: f64,
        coop_o: f64,
        eta_cpl_w: f64,
        eta_cpl_o: f64,
        rates: RateSet,
    ) -> Result<Self, Error> {
        require_nonnegative(coop_w, "Gamma_w")?;
        require_nonnegative(coop_o, "Gamma_o")?;
        let big_g_w = (coop_w * rates.kappa_w * rates.gamma_m).sqrt();
        let big_g_o = (coop_o * rates.kappa_o * rates.gamma_m).sqrt();
        Self::from_couplings(big_g_w, big_g_o, eta_cpl_w, eta_cpl_o, rates)
    }

    /// Tier-2 builder: many-photon couplings given directly.
    pub fn from_couplings(
        big_g_w: f64,
        big_g_o: f64,
        eta_cpl_w: f64,
        eta_cpl_o: f64,
        rates: RateSet,
    ) -> Result<Self, Error> {
        require_positive(rates.gamma_m, "gamma_M")?;
        require_positive(rates.kappa_w, "kappa_w")?;
        require_positive(rates.kappa_o, "kappa_o")?;
        require_nonnegative(big_g_w, "G_w")?;
        require_nonnegative(big_g_o, "G_o")?;
        require_fraction(eta_cpl_w, "eta_cpl_w")?;
        require_fraction(eta_cpl_o, "eta_cpl_o")?;

        let coop_w = big_g_w * big_g_w / (rates.kappa_w * rates.gamma_m);
        let coop_o = big_g_o * big_g_o / (rates.kappa_o * rates.gamma_m);
        let kappa_w_ext = eta_cpl_w * rates.kappa_w;
        let kappa_o_ext = eta_cpl_o * rates.kappa_o;
        Ok(DerivedSystem {
            gamma_m: rates.gamma_m,
            kappa_w: rates.kappa_w,
            kappa_o: rates.kappa_o,
            kappa_w_ext,
            kappa_w_int: rates.kappa_w - kappa_w_ext,
            kappa_o_ext,
            kappa_o_int: rates.kappa_o - kappa_o_ext,
            big_g_w,
            big_g_o,
            coop_w,
            coop_o,
            w_c: rates.gamma_m * (1.0 + coop_w + coop_o),
            n_b_t: 0.0,
            n_w_t: 0.0,
            n_o_t: 0.0,
            g_o_single: None,
            g_w_single: None,
            n_pump_w: None,
            n_pump_o: None,
            x_zpf: None,
            omega_m: None,
            omega_w: None,
            omega_o: None,
            temperature: None,
        })
    }

    /// Replace the cooperativities, back-solving the many-photon couplings
    /// `G_j = sqrt(Gamma_j kappa_j gamma_M)` at fixed decay parameters.
    /// Pump-derived bookkeeping (intracavity photon numbers) is cleared
    /// because it no longer corresponds to the stated pump powers.
    pub fn with_cooperativities(&self, coop_w: f64, coop_o: f64) -> Self {
        let big_g_w = (coop_w * self.kappa_w * self.gamma_m).sqrt();
        let big_g_o = (coop_o * self.kappa_o * self.gamma_m).sqrt();
        DerivedSystem {
            big_g_w,
            big_g_o,
            coop_w,
            coop_o,
            w_c: self.gamma_m * (1.0 + coop_w + coop_o),
            n_pump_w: None,
            n_pump_o: None,
            ..*self
        }
    }

    /// External-coupling fraction of the microwave cavity.
    pub fn eta_w(&self) -> f64 {
        self.kappa_w_ext / self.kappa_w
    }

    /// External-coupling fraction of the optical cavity.
    pub fn eta_o(&self) -> f64 {
        self.kappa_o_ext / self.kappa_o
    }

    /// Override the bath occupations (tiers 1 and 2 default to zero).
    pub fn with_thermal_occupations(&self, n_b_t: f64, n_w_t: f64, n_o_t: f64) -> Self {
        DerivedSystem { n_b_t, n_w_t, n_o_t, ..*self }
    }
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / k_B T) - 1)`.
///
/// Returns 0 at `T = 0` (and whenever the exponent overflows).
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64, Error> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency);
    }
    require_nonnegative(temperature, "T")?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    let denom = x.exp_m1();
    if denom.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 / denom)
}

/// Coherent-exchange diagnostics: the mechanical thermal decoherence rate
/// `gamma_M k_B T / (hbar omega_M)` divided by the exchange rate
/// `F_j = G_j^2 / kappa_j` for each branch. Values below 1 mean the
/// excitation exchange stays coherent. Returns infinity on a decoupled
/// branch.
pub fn coherence_margin(sys: &DerivedSystem, temperature: f64) -> Result<(f64, f64), Error> {
    let omega_m = sys.omega_m.ok_or(Error::MissingParameter("omega_M"))?;
    require_nonnegative(temperature, "T")?;
    let decoherence = sys.gamma_m * K_B * temperature / (HBAR * omega_m);
    let ratio = |big_g: f64, kappa: f64| {
        if big_g == 0.0 {
            if decoherence == 0.0 {
                // T = 0: no thermal decoherence at all, coherent by convention.
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            decoherence / (big_g * big_g / kappa)
        }
    };
    Ok((ratio(sys.big_g_w, sys.kappa_w), ratio(sys.big_g_o, sys.kappa_o)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{HBAR, K_B};

    pub(crate) const TWO_PI: f64 = std::f64::consts::TAU;

    /// Reference hardware set used across the test suite (cryogenic
    /// membrane converter, fully overcoupled cavities).
    pub(crate) fn reference_params() -> PhysicalParams {
        PhysicalParams {
            mass: 10e-12,
            omega_m: TWO_PI * 10e6,
            quality: 36e4,
            omega_w: TWO_PI * 10e9,
            lambda_o: 1064e-9,
            cavity_length: 1e-3,
            kappa_w: 0.101 * TWO_PI * 10e6,
            kappa_o: 0.301 * TWO_PI * 10e6,
            eta_cpl_w: 1.0,
            eta_cpl_o: 1.0,
            p_w: 35e-3,
            p_o: 5e-3,
            g_w: TWO_PI * 0.2,
            temperature: 4.0,
        }
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn mechanical_damping_from_quality_factor() {
        let sys = reference_params().derive().unwrap();
        // omega_M / Q = 2 pi * 27.78 Hz; frozen from high-precision evaluation
        assert!(rel_err(sys.gamma_m, 174.532925199432958) < 1e-12);
    }

    #[test]
    fn zero_point_fluctuation() {
        let p = reference_params();
        // frozen from independent high-precision evaluation of sqrt(hbar/(2 m omega_M))
        assert!(rel_err(p.x_zpf(), 2.896897629542263e-16) < 1e-12);
    }

    #[test]
    fn no_pump_means_bare_mechanics() {
        let mut p = reference_params();
        p.p_w = 0.0;
        p.p_o = 0.0;
        let sys = p.derive().unwrap();
        assert_eq!(sys.n_pump_w, Some(0.0));
        assert_eq!(sys.n_pump_o, Some(0.0));
        assert_eq!(sys.big_g_w, 0.0);
        assert_eq!(sys.big_g_o, 0.0);
        assert_eq!(sys.coop_w, 0.0);
        assert_eq!(sys.coop_o, 0.0);
        assert_eq!(sys.w_c, sys.gamma_m);
    }

    #[test]
    fn reference_operating_point() {
        // Frozen from an independent high-precision (30-digit) evaluation
        // of the derivation chain.
        let sys = reference_params().derive().unwrap();
        assert!(rel_err(sys.g_o_single.unwrap(), 512.8520451335137) < 1e-12);
        assert!(rel_err(sys.n_pump_w.unwrap(), 1.68271371302105e13) < 1e-11);
        assert!(rel_err(sys.n_pump_o.unwrap(), 2.352803442557748e8) < 1e-11);
        assert!(rel_err(sys.big_g_w, 5.154837521056271e6) < 1e-11);
        assert!(rel_err(sys.big_g_o, 7.866561009316253e6) < 1e-11);
        assert!(rel_err(sys.coop_w, 23991.165809409033) < 1e-10);
        assert!(rel_err(sys.coop_o, 18747.618131959869) < 1e-10);
        assert!(rel_err(sys.w_c, 7.459499513678864e6) < 1e-10);
    }

    #[test]
    fn thermal_occupation_fixtures() {
        // frozen from high-precision Bose-Einstein evaluation
        let n = thermal_occupation(TWO_PI * 10e9, 4.0).unwrap();
        assert!(rel_err(n, 7.844643679458343) < 1e-12);

        let n = thermal_occupation(TWO_PI * 10e6, 4.0).unwrap();
        assert!(rel_err(n, 8334.147664436251) < 1e-12);
        // Rayleigh-Jeans limit within 0.01%
        let rj = K_B * 4.0 / (HBAR * TWO_PI * 10e6);
        assert!(rel_err(n, rj) < 1e-4);
    }

    #[test]
    fn thermal_occupation_zero_temperature() {
        assert_eq!(thermal_occupation(TWO_PI * 1e9, 0.0).unwrap(), 0.0);
        // exponent overflow treated as zero occupation
        assert_eq!(thermal_occupation(1e20, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn thermal_occupation_rejects_nonpositive_frequency() {
        assert_eq!(thermal_occupation(0.0, 4.0), Err(Error::NonPositiveFrequency));
        assert_eq!(thermal_occupation(-1.0, 4.0), Err(Error::NonPositiveFrequency));
    }

    #[test]
    fn occupations_ordered_by_frequency() {
        let sys = reference_params().derive().unwrap();
        assert!(sys.n_b_t >= sys.n_w_t);
        assert!(sys.n_w_t >= sys.n_o_t);
        assert!(sys.n_o_t >= 0.0);
    }

    #[test]
    fn cooperativity_definition_round_trip() {
        let sys = reference_params().derive().unwrap();
        let back_w = sys.coop_w * sys.kappa_w * sys.gamma_m;
        let back_o = sys.coop_o * sys.kappa_o * sys.gamma_m;
        assert!(rel_err(back_w, sys.big_g_w * sys.big_g_w) < 1e-12);
        assert!(rel_err(back_o, sys.big_g_o * sys.big_g_o) < 1e-12);
        assert!(rel_err(sys.w_c / sys.gamma_m - 1.0, sys.coop_w + sys.coop_o) < 1e-12);
    }

    #[test]
    fn derive_is_deterministic() {
        let a = reference_params().derive().unwrap();
        let b = reference_params().derive().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nonpositive_fields_rejected() {
        for (field, mutate) in [
            ("m", Box::new(|p: &mut PhysicalParams| p.mass = 0.0) as Box<dyn Fn(&mut PhysicalParams)>),
            ("omega_M", Box::new(|p: &mut PhysicalParams| p.omega_m = -1.0)),
            ("kappa_w", Box::new(|p: &mut PhysicalParams| p.kappa_w = 0.0)),
            ("g_w", Box::new(|p: &mut PhysicalParams| p.g_w = 0.0)),
        ] {
            let mut p = reference_params();
            mutate(&mut p);
            assert_eq!(p.derive(), Err(Error::NonPositiveParameter(field)));
        }
        let mut p = reference_params();
        p.quality = 0.5;
        assert!(matches!(p.derive(), Err(Error::OutOfRange("Q", _))));
        let mut p = reference_params();
        p.eta_cpl_o = 1.5;
        assert!(matches!(p.derive(), Err(Error::OutOfRange("eta_cpl_o", _))));
    }

    #[test]
    fn sideband_warning_raised_when_cavity_too_lossy() {
        let mut p = reference_params();
        assert!(p.warnings().is_empty());
        p.kappa_o = 2.0 * p.omega_m;
        let warns = p.warnings();
        assert_eq!(warns.len(), 1);
        assert!(matches!(
            warns[0],
            DeriveWarning::ResolvedSidebandViolation { branch: "optical", .. }
        ));
    }

    #[test]
    fn coherence_margin_reference_point() {
        let sys = reference_params().derive().unwrap();
        let (rw, ro) = coherence_margin(&sys, 4.0).unwrap();
        // frozen from the same high-precision evaluation as the operating point
        assert!(rel_err(rw, 0.34740486230015066) < 1e-10);
        assert!(rel_err(ro, 0.4445710167431561) < 1e-10);
        assert!(rw < 1.0 && ro < 1.0);
    }

    #[test]
    fn coherence_margin_edge_cases() {
        let sys = reference_params().derive().unwrap();
        let (rw, ro) = coherence_margin(&sys, 0.0).unwrap();
        assert_eq!((rw, ro), (0.0, 0.0));

        let decoupled = sys.with_cooperativities(0.0, 0.0);
        let (rw, ro) = coherence_margin(&decoupled, 4.0).unwrap();
        assert!(rw.is_infinite() && ro.is_infinite());
    }

    #[test]
    fn coherence_margin_needs_physical_tier() {
        let sys =
            DerivedSystem::from_cooperativities(1.0, 1.0, 1.0, 1.0, RateSet::default()).unwrap();
        assert_eq!(coherence_margin(&sys, 4.0), Err(Error::MissingParameter("omega_M")));
    }

    #[test]
    fn tier1_builder_back_solves_couplings() {
        let sys =
            DerivedSystem::from_cooperativities(50.0, 50.0, 1.0, 1.0, RateSet::default()).unwrap();
        assert!(rel_err(sys.coop_w, 50.0) < 1e-14);
        assert!(rel_err(sys.big_g_w * sys.big_g_w, 50.0 * 1e4).abs() < 1e-12);
        assert!(rel_err(sys.w_c, 101.0) < 1e-14);
        assert_eq!(sys.n_b_t, 0.0);
        assert_eq!(sys.omega_m, None);
    }

    #[test]
    fn kappa_split_is_exact() {
        let mut p = reference_params();
        p.eta_cpl_w = 0.7;
        p.eta_cpl_o = 0.3;
        let sys = p.derive().unwrap();
        assert!(rel_err(sys.kappa_w_ext + sys.kappa_w_int, sys.kappa_w) < 1e-15);
        assert!(rel_err(sys.kappa_o_ext + sys.kappa_o_int, sys.kappa_o) < 1e-15);
        assert!(rel_err(sys.eta_w(), 0.7) < 1e-15);
        assert!(rel_err(sys.eta_o(), 0.3) < 1e-15);
    }

    #[test]
    fn thermal_occupation_monotone() {
        // strictly decreasing in omega, strictly increasing in T, on grids
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let omega = 1e6 * 1.1f64.powi(k);
            let n = thermal_occupation(omega, 4.0).unwrap();
            assert!(n < prev, "not decreasing at omega = {omega}");
            prev = n;
        }
        let mut prev = 0.0;
        for k in 1..200 {
            let t = 0.01 * k as f64;
            let n = thermal_occupation(TWO_PI * 10e9, t).unwrap();
            assert!(n > prev, "not increasing at T = {t}");
            prev = n;
        }
    }
}

#[cfg(test)]
pub(crate) use tests::reference_params;
