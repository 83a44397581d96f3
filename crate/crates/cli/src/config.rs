//! Flat `key = value` run configuration.
//!
//! Units are carried in the key names (`*_mhz`, `*_ns`, `*_us`). `#` starts
//! a comment. Unknown keys, duplicate keys and malformed values are errors.

use std::fmt::Write as _;
use std::str::FromStr;

use ququart::pulse::{PulseModel, PulseParams};
use ququart::ramsey::{InitialState, Observable, RamseySettings, TauGrid};
use ququart::spectral::{DeltaRange, DftOptions, Window};
use ququart::units::ns_to_us;
use ququart::SpinParams;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given more than once")]
    DuplicateKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Every key accepted in a config file or as a command-line override.
pub const KEYS: [&str; 21] = [
    "dgs_mhz",
    "delta_mhz",
    "delta_min_mhz",
    "delta_max_mhz",
    "delta_step_mhz",
    "omega1_mhz",
    "pulse_ns",
    "pulse_phase_rad",
    "pulse_model",
    "tau_start_ns",
    "dtau_ns",
    "n_samples",
    "initial_state",
    "observable",
    "t2star_us",
    "window",
    "zero_pad",
    "mean_subtract",
    "peak_prominence",
    "peak_min_sep_mhz",
    "assign_tol_mhz",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dgs_mhz: f64,
    pub delta_mhz: f64,
    pub delta_min_mhz: Option<f64>,
    pub delta_max_mhz: Option<f64>,
    pub delta_step_mhz: f64,
    pub omega1_mhz: f64,
    pub pulse_ns: f64,
    pub pulse_phase_rad: f64,
    pub pulse_model: PulseModel,
    pub tau_start_ns: f64,
    pub dtau_ns: f64,
    pub n_samples: usize,
    pub initial_state: InitialState,
    pub observable: Observable,
    pub t2star_us: Option<f64>,
    pub window: Window,
    pub zero_pad: usize,
    pub mean_subtract: bool,
    pub peak_prominence: f64,
    /// Defaults to three acquisition bins when unset.
    pub peak_min_sep_mhz: Option<f64>,
    /// Defaults to one acquisition bin when unset.
    pub assign_tol_mhz: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dgs_mhz: 2.25,
            delta_mhz: 0.0,
            delta_min_mhz: None,
            delta_max_mhz: None,
            delta_step_mhz: 0.1,
            omega1_mhz: 3.125,
            pulse_ns: 80.0,
            pulse_phase_rad: 0.0,
            pulse_model: PulseModel::Exact,
            tau_start_ns: 0.0,
            dtau_ns: 60.0,
            n_samples: 512,
            initial_state: InitialState::MixedHalf,
            observable: Observable::O2,
            t2star_us: None,
            window: Window::Hann,
            zero_pad: 4,
            mean_subtract: true,
            peak_prominence: 0.05,
            peak_min_sep_mhz: None,
            assign_tol_mhz: None,
        }
    }
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| bad(key, value, e.to_string()))
}

fn finite(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = num(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, value, "must be finite"))
    }
}

fn initial_state_name(s: &InitialState) -> &'static str {
    match s {
        InitialState::PlusHalf => "plus_half",
        InitialState::MinusHalf => "minus_half",
        InitialState::MixedHalf => "mixed_half",
        InitialState::Custom(_) => "custom",
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::DuplicateKey(key.to_string()));
            }
            cfg.set(key, value.trim())?;
            seen.push(key.to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value. Does not re-validate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "dgs_mhz" => self.dgs_mhz = finite(key, v)?,
            "delta_mhz" => self.delta_mhz = finite(key, v)?,
            "delta_min_mhz" => self.delta_min_mhz = Some(finite(key, v)?),
            "delta_max_mhz" => self.delta_max_mhz = Some(finite(key, v)?),
            "delta_step_mhz" => self.delta_step_mhz = finite(key, v)?,
            "omega1_mhz" => self.omega1_mhz = finite(key, v)?,
            "pulse_ns" => self.pulse_ns = finite(key, v)?,
            "pulse_phase_rad" => self.pulse_phase_rad = finite(key, v)?,
            "pulse_model" => {
                self.pulse_model = match v {
                    "exact" => PulseModel::Exact,
                    "hard" => PulseModel::Hard,
                    _ => return Err(bad(key, v, "expected exact|hard")),
                }
            }
            "tau_start_ns" => self.tau_start_ns = finite(key, v)?,
            "dtau_ns" => self.dtau_ns = finite(key, v)?,
            "n_samples" => self.n_samples = num(key, v)?,
            "initial_state" => {
                self.initial_state = match v {
                    "plus_half" => InitialState::PlusHalf,
                    "minus_half" => InitialState::MinusHalf,
                    "mixed_half" => InitialState::MixedHalf,
                    _ => return Err(bad(key, v, "expected plus_half|minus_half|mixed_half")),
                }
            }
            "observable" => {
                self.observable = match v {
                    "o1" => Observable::O1,
                    "o2" => Observable::O2,
                    _ => return Err(bad(key, v, "expected o1|o2")),
                }
            }
            "t2star_us" => self.t2star_us = Some(finite(key, v)?),
            "window" => {
                self.window = match v {
                    "none" => Window::None,
                    "hann" => Window::Hann,
                    _ => return Err(bad(key, v, "expected none|hann")),
                }
            }
            "zero_pad" => self.zero_pad = num(key, v)?,
            "mean_subtract" => self.mean_subtract = num(key, v)?,
            "peak_prominence" => self.peak_prominence = finite(key, v)?,
            "peak_min_sep_mhz" => self.peak_min_sep_mhz = Some(finite(key, v)?),
            "assign_tol_mhz" => self.assign_tol_mhz = Some(finite(key, v)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.pulse_ns < 0.0 {
            return fail("pulse_ns must be >= 0");
        }
        if self.omega1_mhz < 0.0 {
            return fail("omega1_mhz must be >= 0");
        }
        if self.tau_start_ns < 0.0 {
            return fail("tau_start_ns must be >= 0");
        }
        if self.dtau_ns <= 0.0 {
            return fail("dtau_ns must be > 0");
        }
        if self.delta_step_mhz <= 0.0 {
            return fail("delta_step_mhz must be > 0");
        }
        if self.n_samples < 2 {
            return fail("n_samples must be >= 2");
        }
        if self.zero_pad < 1 {
            return fail("zero_pad must be >= 1");
        }
        if matches!(self.t2star_us, Some(t) if t <= 0.0) {
            return fail("t2star_us must be > 0");
        }
        if !(0.0..=1.0).contains(&self.peak_prominence) {
            return fail("peak_prominence must be within [0, 1]");
        }
        if matches!(self.peak_min_sep_mhz, Some(s) if s < 0.0) {
            return fail("peak_min_sep_mhz must be >= 0");
        }
        if matches!(self.assign_tol_mhz, Some(t) if t <= 0.0) {
            return fail("assign_tol_mhz must be > 0");
        }
        if self.delta_min_mhz.is_some() != self.delta_max_mhz.is_some() {
            return fail("delta_min_mhz and delta_max_mhz must be given together");
        }
        Ok(())
    }

    /// Serializes every key; parsing the result yields an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("dgs_mhz", self.dgs_mhz.to_string());
        put("delta_mhz", self.delta_mhz.to_string());
        if let Some(v) = self.delta_min_mhz {
            put("delta_min_mhz", v.to_string());
        }
        if let Some(v) = self.delta_max_mhz {
            put("delta_max_mhz", v.to_string());
        }
        put("delta_step_mhz", self.delta_step_mhz.to_string());
        put("omega1_mhz", self.omega1_mhz.to_string());
        put("pulse_ns", self.pulse_ns.to_string());
        put("pulse_phase_rad", self.pulse_phase_rad.to_string());
        put("pulse_model", self.pulse_model.name().to_string());
        put("tau_start_ns", self.tau_start_ns.to_string());
        put("dtau_ns", self.dtau_ns.to_string());
        put("n_samples", self.n_samples.to_string());
        put("initial_state", initial_state_name(&self.initial_state).to_string());
        put("observable", self.observable.name().to_string());
        if let Some(v) = self.t2star_us {
            put("t2star_us", v.to_string());
        }
        put("window", self.window.name().to_string());
        put("zero_pad", self.zero_pad.to_string());
        put("mean_subtract", self.mean_subtract.to_string());
        put("peak_prominence", self.peak_prominence.to_string());
        if let Some(v) = self.peak_min_sep_mhz {
            put("peak_min_sep_mhz", v.to_string());
        }
        if let Some(v) = self.assign_tol_mhz {
            put("assign_tol_mhz", v.to_string());
        }
        out
    }

    pub fn spin(&self) -> SpinParams {
        SpinParams::from_mhz(self.dgs_mhz, self.delta_mhz, self.omega1_mhz)
    }

    pub fn settings(&self) -> RamseySettings {
        RamseySettings {
            pulse: PulseParams::from_ns(self.spin(), self.pulse_ns).with_phase(self.pulse_phase_rad),
            pulse_model: self.pulse_model,
            tau_grid: TauGrid::from_ns(self.tau_start_ns, self.dtau_ns, self.n_samples),
            initial_state: self.initial_state,
            observable: self.observable,
            t2star: self.t2star_us,
        }
    }

    pub fn dft_options(&self) -> DftOptions {
        DftOptions {
            window: self.window,
            zero_pad: self.zero_pad,
            mean_subtract: self.mean_subtract,
        }
    }

    /// Sweep bounds, or the single configured detuning.
    pub fn delta_range(&self) -> DeltaRange {
        match (self.delta_min_mhz, self.delta_max_mhz) {
            (Some(min), Some(max)) => DeltaRange {
                min,
                max,
                step: self.delta_step_mhz,
            },
            _ => DeltaRange::single(self.delta_mhz),
        }
    }

    /// Sampling rate `1/Δτ` in MHz.
    pub fn sampling_rate_mhz(&self) -> f64 {
        1.0 / ns_to_us(self.dtau_ns)
    }

    /// Acquisition resolution `1/(N·Δτ)` in MHz.
    pub fn resolution_mhz(&self) -> f64 {
        self.sampling_rate_mhz() / self.n_samples as f64
    }

    pub fn peak_min_sep(&self) -> f64 {
        self.peak_min_sep_mhz.unwrap_or(3.0 * self.resolution_mhz())
    }

    pub fn assign_tol(&self) -> f64 {
        self.assign_tol_mhz.unwrap_or(self.resolution_mhz())
    }
}
