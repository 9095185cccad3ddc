//! Configuration-file ingestion and emission.
//!
//! Line-based `[section]` / `key = value` format. Dimensioned values carry
//! a unit suffix; frequency-like quantities given in Hz multiples are
//! converted to angular rad/s (factor 2 pi) at parse time, while the `rads`
//! suffix passes through unchanged. Parsing is total: every failure is a
//! positioned diagnostic and no partial configuration escapes.
//!
//! Exactly one input tier may be populated:
//! cooperativities (`[cooperativities]`), many-photon couplings
//! (`[couplings]`), or the full physical description
//! (`[mechanics]`/`[microwave]`/`[optics]` hardware keys).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::DetectorModel;
use crate::params::{DerivedSystem, PhysicalParams, RateSet};
use crate::pulse::{GaussianPulse, NoiseSetting};
use crate::sweep::{GridScale, GridSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },

    #[error("line {line}: key `{key}` expects {expected}, found `{found}`")]
    UnitMismatch { line: usize, key: String, expected: &'static str, found: String },

    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("conflicting input tiers: {0}")]
    ConflictingTiers(String),

    #[error("invalid parameter: {0}")]
    Invalid(String),
}

impl From<crate::Error> for ConfigError {
    fn from(err: crate::Error) -> Self {
        match err {
            crate::Error::MissingParameter(name) => ConfigError::MissingParameter(name),
            other => ConfigError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepQuantity {
    Ratio,
    Efficiency,
}

/// Which input tier a parsed configuration populates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputTier {
    DirectCooperativities,
    Couplings,
    Physical,
}

/// Fully resolved run configuration, SI/angular units throughout.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    // [mechanics]
    pub omega_m: Option<f64>,
    pub quality: Option<f64>,
    pub mass: Option<f64>,
    // [microwave]
    pub omega_w: Option<f64>,
    pub kappa_w: Option<f64>,
    pub kappa_w_rel: Option<f64>,
    pub eta_cpl_w: Option<f64>,
    pub p_w: Option<f64>,
    pub g_w: Option<f64>,
    // [optics]
    pub lambda_o: Option<f64>,
    pub cavity_length: Option<f64>,
    pub kappa_o: Option<f64>,
    pub kappa_o_rel: Option<f64>,
    pub eta_cpl_o: Option<f64>,
    pub p_o: Option<f64>,
    // [system]
    pub temperature: Option<f64>,
    pub gamma_m: Option<f64>,
    // [cooperativities]
    pub coop_w: Option<f64>,
    pub coop_o: Option<f64>,
    // [couplings]
    pub big_g_w: Option<f64>,
    pub big_g_o: Option<f64>,
    // [pulse]
    pub n_p: Option<f64>,
    pub pulse_width: Option<f64>,
    pub pulse_width_rel: Option<f64>,
    pub carrier_offset: Option<f64>,
    // [detector]
    pub det_eta: Option<f64>,
    pub det_bandwidth: Option<f64>,
    pub target_eff: Option<f64>,
    // [grid]
    pub grid_w_min: Option<f64>,
    pub grid_w_max: Option<f64>,
    pub grid_o_min: Option<f64>,
    pub grid_o_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub grid_scale: Option<GridScale>,
    // [output]
    pub format: Option<OutputFormat>,
    pub path: Option<String>,
    pub noise: Option<bool>,
    pub band_rel: Option<f64>,
    pub quantity: Option<SweepQuantity>,
    pub spectrum_points: Option<usize>,
    pub spectrum_span_rel: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Frequency,
    Power,
    Mass,
    Length,
    Temperature,
    Dimensionless,
    Integer,
    Scale,
    Format,
    Switch,
    Quantity,
    Path,
}

impl Kind {
    fn expected(&self) -> &'static str {
        match self {
            Kind::Frequency => "a frequency (Hz/kHz/MHz/GHz or rads)",
            Kind::Power => "a power (uW/mW/W)",
            Kind::Mass => "a mass (ng/ug/mg/g/kg)",
            Kind::Length => "a length (nm/um/mm/m)",
            Kind::Temperature => "a temperature (K)",
            Kind::Dimensionless => "a dimensionless number",
            Kind::Integer => "a positive integer",
            Kind::Scale => "`linear` or `log`",
            Kind::Format => "`csv` or `json`",
            Kind::Switch => "`on` or `off`",
            Kind::Quantity => "`ratio` or `efficiency`",
            Kind::Path => "a file path",
        }
    }
}

/// (section, key, kind) registry; the emitter walks it in this order.
const KEYS: &[(&str, &str, Kind)] = &[
    ("mechanics", "omega_M", Kind::Frequency),
    ("mechanics", "Q", Kind::Dimensionless),
    ("mechanics", "m", Kind::Mass),
    ("microwave", "omega_w", Kind::Frequency),
    ("microwave", "kappa_w", Kind::Frequency),
    ("microwave", "kappa_w_rel", Kind::Dimensionless),
    ("microwave", "eta_cpl_w", Kind::Dimensionless),
    ("microwave", "P_w", Kind::Power),
    ("microwave", "g_w", Kind::Frequency),
    ("optics", "lambda", Kind::Length),
    ("optics", "L", Kind::Length),
    ("optics", "kappa_o", Kind::Frequency),
    ("optics", "kappa_o_rel", Kind::Dimensionless),
    ("optics", "eta_cpl_o", Kind::Dimensionless),
    ("optics", "P_o", Kind::Power),
    ("system", "T", Kind::Temperature),
    ("system", "gamma_M", Kind::Frequency),
    ("cooperativities", "Gamma_w", Kind::Dimensionless),
    ("cooperativities", "Gamma_o", Kind::Dimensionless),
    ("couplings", "G_w", Kind::Frequency),
    ("couplings", "G_o", Kind::Frequency),
    ("pulse", "n_p", Kind::Dimensionless),
    ("pulse", "W", Kind::Frequency),
    ("pulse", "W_rel", Kind::Dimensionless),
    ("pulse", "delta_p", Kind::Frequency),
    ("detector", "eta", Kind::Dimensionless),
    ("detector", "bandwidth", Kind::Frequency),
    ("detector", "target_eff", Kind::Dimensionless),
    ("grid", "Gamma_w_min", Kind::Dimensionless),
    ("grid", "Gamma_w_max", Kind::Dimensionless),
    ("grid", "Gamma_o_min", Kind::Dimensionless),
    ("grid", "Gamma_o_max", Kind::Dimensionless),
    ("grid", "points", Kind::Integer),
    ("grid", "scale", Kind::Scale),
    ("output", "format", Kind::Format),
    ("output", "path", Kind::Path),
    ("output", "noise", Kind::Switch),
    ("output", "band_rel", Kind::Dimensionless),
    ("output", "quantity", Kind::Quantity),
    ("output", "spectrum_points", Kind::Integer),
    ("output", "spectrum_span_rel", Kind::Dimensionless),
];

fn unit_factor(kind: Kind, unit: &str) -> Option<f64> {
    match (kind, unit) {
        (Kind::Frequency, "Hz") => Some(TAU),
        (Kind::Frequency, "kHz") => Some(TAU * 1e3),
        (Kind::Frequency, "MHz") => Some(TAU * 1e6),
        (Kind::Frequency, "GHz") => Some(TAU * 1e9),
        (Kind::Frequency, "rads") => Some(1.0),
        (Kind::Power, "uW") => Some(1e-6),
        (Kind::Power, "mW") => Some(1e-3),
        (Kind::Power, "W") => Some(1.0),
        (Kind::Mass, "ng") => Some(1e-12),
        (Kind::Mass, "ug") => Some(1e-9),
        (Kind::Mass, "mg") => Some(1e-6),
        (Kind::Mass, "g") => Some(1e-3),
        (Kind::Mass, "kg") => Some(1.0),
        (Kind::Length, "nm") => Some(1e-9),
        (Kind::Length, "um") => Some(1e-6),
        (Kind::Length, "mm") => Some(1e-3),
        (Kind::Length, "m") => Some(1.0),
        (Kind::Temperature, "K") => Some(1.0),
        _ => None,
    }
}

/// Parse configuration text into a fully resolved [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    let mut seen: Vec<(String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    column: line.len(),
                    message: "unterminated section header".into(),
                });
            };
            let name = name.trim();
            if !KEYS.iter().any(|(s, _, _)| *s == name) {
                return Err(ConfigError::UnknownKey {
                    line: line_no,
                    section: name.to_owned(),
                    key: "(section)".to_owned(),
                });
            }
            section = name.to_owned();
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                column: line.find(trimmed).unwrap_or(0) + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = trimmed[..eq].trim();
        let value = trimmed[eq + 1..].trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                column: eq + 1,
                message: "empty key or value".into(),
            });
        }
        if section.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                column: 1,
                message: "key outside any [section]".into(),
            });
        }
        let Some((_, _, kind)) = KEYS
            .iter()
            .find(|(s, k, _)| *s == section && *k == key)
        else {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                section: section.clone(),
                key: key.to_owned(),
            });
        };
        if seen.iter().any(|(s, k)| s == &section && k == key) {
            return Err(ConfigError::Duplicate { line: line_no, key: key.to_owned() });
        }
        seen.push((section.clone(), key.to_owned()));
        apply(&mut cfg, &section, key, *kind, value, line_no)?;
    }
    cfg.check_tier_consistency()?;
    Ok(cfg)
}

fn parse_number(
    kind: Kind,
    key: &str,
    value: &str,
    line: usize,
) -> Result<f64, ConfigError> {
    let mismatch = || ConfigError::UnitMismatch {
        line,
        key: key.to_owned(),
        expected: kind.expected(),
        found: value.to_owned(),
    };
    let mut parts = value.split_whitespace();
    let number: f64 = parts
        .next()
        .ok_or_else(mismatch)?
        .parse()
        .map_err(|_| mismatch())?;
    let unit = parts.next();
    if parts.next().is_some() {
        return Err(mismatch());
    }
    match (kind, unit) {
        (Kind::Dimensionless, None) => Ok(number),
        (Kind::Dimensionless, Some(_)) => Err(mismatch()),
        (_, None) => Err(mismatch()),
        (_, Some(u)) => unit_factor(kind, u).map(|f| number * f).ok_or_else(mismatch),
    }
}

fn apply(
    cfg: &mut RunConfig,
    section: &str,
    key: &str,
    kind: Kind,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    let mismatch = || ConfigError::UnitMismatch {
        line,
        key: key.to_owned(),
        expected: kind.expected(),
        found: value.to_owned(),
    };
    match kind {
        Kind::Integer => {
            let n: usize = value.parse().map_err(|_| mismatch())?;
            match (section, key) {
                ("grid", "points") => cfg.grid_points = Some(n),
                ("output", "spectrum_points") => cfg.spectrum_points = Some(n),
                _ => unreachable!("registry covers all integer keys"),
            }
        }
        Kind::Scale => {
            cfg.grid_scale = Some(match value {
                "linear" => GridScale::Linear,
                "log" => GridScale::Log,
                _ => return Err(mismatch()),
            })
        }
        Kind::Format => {
            cfg.format = Some(match value {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                _ => return Err(mismatch()),
            })
        }
        Kind::Switch => {
            cfg.noise = Some(match value {
                "on" => true,
                "off" => false,
                _ => return Err(mismatch()),
            })
        }
        Kind::Quantity => {
            cfg.quantity = Some(match value {
                "ratio" => SweepQuantity::Ratio,
                "efficiency" => SweepQuantity::Efficiency,
                _ => return Err(mismatch()),
            })
        }
        Kind::Path => cfg.path = Some(value.to_owned()),
        _ => {
            let number = parse_number(kind, key, value, line)?;
            let slot = match (section, key) {
                ("mechanics", "omega_M") => &mut cfg.omega_m,
                ("mechanics", "Q") => &mut cfg.quality,
                ("mechanics", "m") => &mut cfg.mass,
                ("microwave", "omega_w") => &mut cfg.omega_w,
                ("microwave", "kappa_w") => &mut cfg.kappa_w,
                ("microwave", "kappa_w_rel") => &mut cfg.kappa_w_rel,
                ("microwave", "eta_cpl_w") => &mut cfg.eta_cpl_w,
                ("microwave", "P_w") => &mut cfg.p_w,
                ("microwave", "g_w") => &mut cfg.g_w,
                ("optics", "lambda") => &mut cfg.lambda_o,
                ("optics", "L") => &mut cfg.cavity_length,
                ("optics", "kappa_o") => &mut cfg.kappa_o,
                ("optics", "kappa_o_rel") => &mut cfg.kappa_o_rel,
                ("optics", "eta_cpl_o") => &mut cfg.eta_cpl_o,
                ("optics", "P_o") => &mut cfg.p_o,
                ("system", "T") => &mut cfg.temperature,
                ("system", "gamma_M") => &mut cfg.gamma_m,
                ("cooperativities", "Gamma_w") => &mut cfg.coop_w,
                ("cooperativities", "Gamma_o") => &mut cfg.coop_o,
                ("couplings", "G_w") => &mut cfg.big_g_w,
                ("couplings", "G_o") => &mut cfg.big_g_o,
                ("pulse", "n_p") => &mut cfg.n_p,
                ("pulse", "W") => &mut cfg.pulse_width,
                ("pulse", "W_rel") => &mut cfg.pulse_width_rel,
                ("pulse", "delta_p") => &mut cfg.carrier_offset,
                ("detector", "eta") => &mut cfg.det_eta,
                ("detector", "bandwidth") => &mut cfg.det_bandwidth,
                ("detector", "target_eff") => &mut cfg.target_eff,
                ("grid", "Gamma_w_min") => &mut cfg.grid_w_min,
                ("grid", "Gamma_w_max") => &mut cfg.grid_w_max,
                ("grid", "Gamma_o_min") => &mut cfg.grid_o_min,
                ("grid", "Gamma_o_max") => &mut cfg.grid_o_max,
                ("output", "band_rel") => &mut cfg.band_rel,
                ("output", "spectrum_span_rel") => &mut cfg.spectrum_span_rel,
                _ => unreachable!("registry covers all numeric keys"),
            };
            *slot = Some(number);
        }
    }
    Ok(())
}

impl RunConfig {
    fn tier1_keys(&self) -> bool {
        self.coop_w.is_some() || self.coop_o.is_some()
    }

    fn tier2_keys(&self) -> bool {
        self.big_g_w.is_some() || self.big_g_o.is_some()
    }

    fn tier3_keys(&self) -> bool {
        self.mass.is_some()
            || self.quality.is_some()
            || self.p_w.is_some()
            || self.p_o.is_some()
            || self.g_w.is_some()
            || self.lambda_o.is_some()
            || self.cavity_length.is_some()
    }

    fn check_tier_consistency(&self) -> Result<(), ConfigError> {
        let mut tiers = Vec::new();
        if self.tier1_keys() {
            tiers.push("cooperativities");
        }
        if self.tier2_keys() {
            tiers.push("couplings");
        }
        if self.tier3_keys() {
            tiers.push("physical parameters");
        }
        if tiers.len() > 1 {
            return Err(ConfigError::ConflictingTiers(tiers.join(" and ")));
        }
        if self.gamma_m.is_some() && self.quality.is_some() {
            return Err(ConfigError::ConflictingTiers(
                "gamma_M given directly while Q also determines it".into(),
            ));
        }
        for (abs, rel, name) in [
            (self.kappa_w, self.kappa_w_rel, "kappa_w"),
            (self.kappa_o, self.kappa_o_rel, "kappa_o"),
        ] {
            if abs.is_some() && rel.is_some() {
                return Err(ConfigError::ConflictingTiers(format!(
                    "{name} given both absolutely and relative to omega_M"
                )));
            }
        }
        Ok(())
    }

    pub fn tier(&self) -> Result<InputTier, ConfigError> {
        if self.tier1_keys() {
            Ok(InputTier::DirectCooperativities)
        } else if self.tier2_keys() {
            Ok(InputTier::Couplings)
        } else if self.tier3_keys() {
            Ok(InputTier::Physical)
        } else {
            Err(ConfigError::MissingParameter("Gamma_w (no input tier populated)"))
        }
    }

    fn resolved_kappa(
        &self,
        abs: Option<f64>,
        rel: Option<f64>,
        name: &'static str,
    ) -> Result<f64, ConfigError> {
        if let Some(v) = abs {
            return Ok(v);
        }
        if let Some(r) = rel {
            let omega_m = self.omega_m.ok_or(ConfigError::MissingParameter("omega_M"))?;
            return Ok(r * omega_m);
        }
        Err(ConfigError::MissingParameter(name))
    }

    /// Build the derived operating point for the populated tier.
    pub fn build_system(&self) -> Result<DerivedSystem, ConfigError> {
        let require = |v: Option<f64>, name: &'static str| {
            v.ok_or(ConfigError::MissingParameter(name))
        };
        let eta_w = self.eta_cpl_w.unwrap_or(1.0);
        let eta_o = self.eta_cpl_o.unwrap_or(1.0);
        let mut sys = match self.tier()? {
            InputTier::Physical => {
                let params = PhysicalParams {
                    mass: require(self.mass, "m")?,
                    omega_m: require(self.omega_m, "omega_M")?,
                    quality: require(self.quality, "Q")?,
                    omega_w: require(self.omega_w, "omega_w")?,
                    lambda_o: require(self.lambda_o, "lambda")?,
                    cavity_length: require(self.cavity_length, "L")?,
                    kappa_w: self.resolved_kappa(self.kappa_w, self.kappa_w_rel, "kappa_w")?,
                    kappa_o: self.resolved_kappa(self.kappa_o, self.kappa_o_rel, "kappa_o")?,
                    eta_cpl_w: eta_w,
                    eta_cpl_o: eta_o,
                    p_w: require(self.p_w, "P_w")?,
                    p_o: require(self.p_o, "P_o")?,
                    g_w: require(self.g_w, "g_w")?,
                    temperature: self.temperature.unwrap_or(0.0),
                };
                params.derive()?
            }
            InputTier::DirectCooperativities => {
                let rates = self.rate_overrides();
                DerivedSystem::from_cooperativities(
                    require(self.coop_w, "Gamma_w")?,
                    require(self.coop_o, "Gamma_o")?,
                    eta_w,
                    eta_o,
                    rates,
                )?
            }
            InputTier::Couplings => {
                let defaults = RateSet::default();
                let rates = RateSet {
                    gamma_m: require(self.gamma_m, "gamma_M")?,
                    kappa_w: self.kappa_w.unwrap_or(defaults.kappa_w),
                    kappa_o: self.kappa_o.unwrap_or(defaults.kappa_o),
                };
                DerivedSystem::from_couplings(
                    require(self.big_g_w, "G_w")?,
                    require(self.big_g_o, "G_o")?,
                    eta_w,
                    eta_o,
                    rates,
                )?
            }
        };
        // Lower tiers with enough side information still get thermal baths.
        if sys.temperature.is_none() {
            if let Some(t) = self.temperature {
                let occ = |omega: Option<f64>| -> Result<f64, ConfigError> {
                    match omega {
                        Some(w) => Ok(crate::params::thermal_occupation(w, t)?),
                        None => Ok(0.0),
                    }
                };
                sys = sys.with_thermal_occupations(
                    occ(self.omega_m)?,
                    occ(self.omega_w)?,
                    0.0,
                );
                sys.omega_m = self.omega_m.or(sys.omega_m);
                sys.omega_w = self.omega_w.or(sys.omega_w);
                sys.temperature = Some(t);
            } else if self.omega_m.is_some() {
                sys.omega_m = self.omega_m;
            }
        }
        Ok(sys)
    }

    fn rate_overrides(&self) -> RateSet {
        let defaults = RateSet::default();
        RateSet {
            gamma_m: self.gamma_m.unwrap_or(defaults.gamma_m),
            kappa_w: self.kappa_w.unwrap_or(defaults.kappa_w),
            kappa_o: self.kappa_o.unwrap_or(defaults.kappa_o),
        }
    }

    /// Resolve the pulse against a derived system. When both `W` and
    /// `W_rel` are given, `W_rel` takes precedence; a mismatch beyond 0.1%
    /// is reported through the returned warning.
    pub fn build_pulse(
        &self,
        sys: &DerivedSystem,
    ) -> Result<(GaussianPulse, Option<String>), ConfigError> {
        let n_p = self.n_p.ok_or(ConfigError::MissingParameter("n_p"))?;
        let mut warning = None;
        let width = match (self.pulse_width_rel, self.pulse_width) {
            (Some(rel), absolute) => {
                let width = rel * sys.w_c;
                if let Some(w) = absolute {
                    let mismatch = (w - width).abs() / width.abs().max(1e-300);
                    if mismatch > 1e-3 {
                        warning = Some(format!(
                            "pulse width mismatch: W = {w:.6e} rad/s but W_rel * W_c = {width:.6e} rad/s; using W_rel"
                        ));
                    }
                }
                width
            }
            (None, Some(w)) => w,
            (None, None) => return Err(ConfigError::MissingParameter("W")),
        };
        let pulse = GaussianPulse::new(n_p, width, self.carrier_offset.unwrap_or(0.0))?;
        Ok((pulse, warning))
    }

    pub fn build_detector(&self) -> Result<DetectorModel, ConfigError> {
        Ok(DetectorModel::new(
            self.det_eta.unwrap_or(1.0),
            self.det_bandwidth.unwrap_or(TAU * 10e9),
        )?)
    }

    pub fn build_grid(&self) -> Result<GridSpec, ConfigError> {
        let d = GridSpec::default_log();
        let grid = GridSpec {
            gamma_w_range: (
                self.grid_w_min.unwrap_or(d.gamma_w_range.0),
                self.grid_w_max.unwrap_or(d.gamma_w_range.1),
            ),
            gamma_o_range: (
                self.grid_o_min.unwrap_or(d.gamma_o_range.0),
                self.grid_o_max.unwrap_or(d.gamma_o_range.1),
            ),
            points: self.grid_points.unwrap_or(d.points),
            scale: self.grid_scale.unwrap_or(d.scale),
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Noise accounting for the `convert`/`sweep`/`spectrum` commands
    /// (defaults: on, band of one converter bandwidth).
    pub fn noise_setting(&self, sys: &DerivedSystem) -> NoiseSetting {
        if self.noise.unwrap_or(true) {
            NoiseSetting::Band { half_width: self.band_rel.unwrap_or(1.0) * sys.w_c }
        } else {
            NoiseSetting::Off
        }
    }
}

fn push_value(out: &mut String, key: &str, kind: Kind, value: f64) {
    let unit = match kind {
        Kind::Frequency => " rads",
        Kind::Power => " W",
        Kind::Mass => " kg",
        Kind::Length => " m",
        Kind::Temperature => " K",
        _ => "",
    };
    out.push_str(&format!("{key} = {value:e}{unit}\n"));
}

/// Emit a configuration in canonical form; `parse_config(emit_config(c))`
/// reproduces `c` exactly (values are printed with shortest round-trip
/// precision and dimensioned keys use pass-through units).
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut current_section = "";
    for (section, key, kind) in KEYS {
        let line: Option<(Kind, f64)> = match (*section, *key) {
            ("mechanics", "omega_M") => cfg.omega_m.map(|v| (*kind, v)),
            ("mechanics", "Q") => cfg.quality.map(|v| (*kind, v)),
            ("mechanics", "m") => cfg.mass.map(|v| (*kind, v)),
            ("microwave", "omega_w") => cfg.omega_w.map(|v| (*kind, v)),
            ("microwave", "kappa_w") => cfg.kappa_w.map(|v| (*kind, v)),
            ("microwave", "kappa_w_rel") => cfg.kappa_w_rel.map(|v| (*kind, v)),
            ("microwave", "eta_cpl_w") => cfg.eta_cpl_w.map(|v| (*kind, v)),
            ("microwave", "P_w") => cfg.p_w.map(|v| (*kind, v)),
            ("microwave", "g_w") => cfg.g_w.map(|v| (*kind, v)),
            ("optics", "lambda") => cfg.lambda_o.map(|v| (*kind, v)),
            ("optics", "L") => cfg.cavity_length.map(|v| (*kind, v)),
            ("optics", "kappa_o") => cfg.kappa_o.map(|v| (*kind, v)),
            ("optics", "kappa_o_rel") => cfg.kappa_o_rel.map(|v| (*kind, v)),
            ("optics", "eta_cpl_o") => cfg.eta_cpl_o.map(|v| (*kind, v)),
            ("optics", "P_o") => cfg.p_o.map(|v| (*kind, v)),
            ("system", "T") => cfg.temperature.map(|v| (*kind, v)),
            ("system", "gamma_M") => cfg.gamma_m.map(|v| (*kind, v)),
            ("cooperativities", "Gamma_w") => cfg.coop_w.map(|v| (*kind, v)),
            ("cooperativities", "Gamma_o") => cfg.coop_o.map(|v| (*kind, v)),
            ("couplings", "G_w") => cfg.big_g_w.map(|v| (*kind, v)),
            ("couplings", "G_o") => cfg.big_g_o.map(|v| (*kind, v)),
            ("pulse", "n_p") => cfg.n_p.map(|v| (*kind, v)),
            ("pulse", "W") => cfg.pulse_width.map(|v| (*kind, v)),
            ("pulse", "W_rel") => cfg.pulse_width_rel.map(|v| (*kind, v)),
            ("pulse", "delta_p") => cfg.carrier_offset.map(|v| (*kind, v)),
            ("detector", "eta") => cfg.det_eta.map(|v| (*kind, v)),
            ("detector", "bandwidth") => cfg.det_bandwidth.map(|v| (*kind, v)),
            ("detector", "target_eff") => cfg.target_eff.map(|v| (*kind, v)),
            ("grid", "Gamma_w_min") => cfg.grid_w_min.map(|v| (*kind, v)),
            ("grid", "Gamma_w_max") => cfg.grid_w_max.map(|v| (*kind, v)),
            ("grid", "Gamma_o_min") => cfg.grid_o_min.map(|v| (*kind, v)),
            ("grid", "Gamma_o_max") => cfg.grid_o_max.map(|v| (*kind, v)),
            ("output", "band_rel") => cfg.band_rel.map(|v| (*kind, v)),
            ("output", "spectrum_span_rel") => cfg.spectrum_span_rel.map(|v| (*kind, v)),
            _ => None,
        };
        let word: Option<String> = match (*section, *key) {
            ("grid", "points") => cfg.grid_points.map(|v| v.to_string()),
            ("output", "spectrum_points") => cfg.spectrum_points.map(|v| v.to_string()),
            ("grid", "scale") => cfg.grid_scale.map(|v| {
                match v {
                    GridScale::Linear => "linear",
                    GridScale::Log => "log",
                }
                .to_owned()
            }),
            ("output", "format") => cfg.format.map(|v| {
                match v {
                    OutputFormat::Csv => "csv",
                    OutputFormat::Json => "json",
                }
                .to_owned()
            }),
            ("output", "noise") => cfg.noise.map(|v| if v { "on" } else { "off" }.to_owned()),
            ("output", "quantity") => cfg.quantity.map(|v| {
                match v {
                    SweepQuantity::Ratio => "ratio",
                    SweepQuantity::Efficiency => "efficiency",
                }
                .to_owned()
            }),
            ("output", "path") => cfg.path.clone(),
            _ => None,
        };
        if line.is_none() && word.is_none() {
            continue;
        }
        if current_section != *section {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("[{section}]\n"));
            current_section = section;
        }
        if let Some((kind, value)) = line {
            push_value(&mut out, key, kind, value);
        } else if let Some(word) = word {
            out.push_str(&format!("{key} = {word}\n"));
        }
    }
    out
}
