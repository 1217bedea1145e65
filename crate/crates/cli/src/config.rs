//! Strict JSON configuration for the command-line driver.
//!
//! Frequencies accept a bare JSON number in Hz or a string with a unit
//! suffix (`Hz`, `kHz`, `MHz`, `GHz`, `THz`); times accept seconds or a
//! string with `s`, `ms`, `us`/`µs`, `ns`, `ps`, or `fs`. Unknown keys are
//! rejected everywhere so a typo cannot silently fall back to a default.
//! Serialization always emits base units (Hz, seconds), and re-parsing an
//! emitted configuration reproduces it exactly.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use tangle4::{
    angular, BareIndex, InitialState, IntegratorConfig, PeakDetection, SystemParams, ZConvention,
    C64,
};

const FREQ_UNITS: &[(&str, f64)] =
    &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9), ("THz", 1e12)];
const TIME_UNITS: &[(&str, f64)] = &[
    ("s", 1.0),
    ("ms", 1e-3),
    ("us", 1e-6),
    ("µs", 1e-6),
    ("ns", 1e-9),
    ("ps", 1e-12),
    ("fs", 1e-15),
];

/// Longest leading substring that parses as a number, plus the rest.
/// Scanning for the longest match keeps exponents intact: in "1e9 Hz" the
/// prefix "1e" fails to parse but "1e9" succeeds.
fn split_value_unit(s: &str) -> Option<(f64, &str)> {
    let s = s.trim();
    let mut best: Option<(f64, usize)> = None;
    for end in 1..=s.len() {
        if !s.is_char_boundary(end) {
            continue;
        }
        if let Ok(v) = s[..end].parse::<f64>() {
            best = Some((v, end));
        }
    }
    best.map(|(value, end)| (value, s[end..].trim()))
}

fn parse_with_units(s: &str, units: &[(&str, f64)], kind: &str) -> Result<f64, String> {
    let (value, unit) = split_value_unit(s)
        .ok_or_else(|| format!("cannot parse \"{s}\" as a {kind}"))?;
    if unit.is_empty() {
        let expected: Vec<&str> = units.iter().map(|(u, _)| *u).collect();
        return Err(format!(
            "\"{s}\" has no unit; write a bare JSON number for base units or append one of {}",
            expected.join(", ")
        ));
    }
    match units.iter().find(|(u, _)| *u == unit) {
        Some((_, scale)) => Ok(value * scale),
        None => {
            let expected: Vec<&str> = units.iter().map(|(u, _)| *u).collect();
            Err(format!("unknown {kind} unit \"{unit}\" in \"{s}\"; expected one of {}", expected.join(", ")))
        }
    }
}

macro_rules! unit_newtype {
    ($name:ident, $units:ident, $kind:literal, $expecting:literal) => {
        /// Value in base units. Compares exactly; the configuration
        /// round-trip guarantee depends on it.
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub f64);

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_f64(self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $name;

                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, $expecting)
                    }

                    fn visit_f64<E: de::Error>(self, v: f64) -> Result<$name, E> {
                        Ok($name(v))
                    }

                    fn visit_i64<E: de::Error>(self, v: i64) -> Result<$name, E> {
                        Ok($name(v as f64))
                    }

                    fn visit_u64<E: de::Error>(self, v: u64) -> Result<$name, E> {
                        Ok($name(v as f64))
                    }

                    fn visit_str<E: de::Error>(self, s: &str) -> Result<$name, E> {
                        parse_with_units(s, $units, $kind).map($name).map_err(E::custom)
                    }
                }
                d.deserialize_any(V)
            }
        }
    };
}

unit_newtype!(Frequency, FREQ_UNITS, "frequency", "a frequency in Hz or a string like \"300 MHz\"");
unit_newtype!(TimeSpan, TIME_UNITS, "time", "a time in seconds or a string like \"10 ns\"");

// ---------------------------------------------------------------------------
// Sections.

/// Full system description for a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub cavity: Frequency,
    pub qubit_l: Frequency,
    pub qubit_m: Frequency,
    pub qubit_r: Frequency,
    pub coupling_l: Frequency,
    pub coupling_m: Frequency,
    pub coupling_r: Frequency,
    pub drive_amplitude: Frequency,
    pub drive_frequency: Frequency,
    #[serde(default)]
    pub qubit_z_convention: ZConvention,
}

impl SystemSection {
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            omega_c: angular(self.cavity.0),
            omega_l: angular(self.qubit_l.0),
            omega_m: angular(self.qubit_m.0),
            omega_r: angular(self.qubit_r.0),
            eta_l: angular(self.coupling_l.0),
            eta_m: angular(self.coupling_m.0),
            eta_r: angular(self.coupling_r.0),
            epsilon_d: angular(self.drive_amplitude.0),
            omega_d: angular(self.drive_frequency.0),
            z_convention: self.qubit_z_convention,
        }
    }
}

/// System description for a sweep: the couplings come from the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSystemSection {
    pub cavity: Frequency,
    pub qubit_l: Frequency,
    pub qubit_m: Frequency,
    pub qubit_r: Frequency,
    pub drive_amplitude: Frequency,
    pub drive_frequency: Frequency,
    #[serde(default)]
    pub qubit_z_convention: ZConvention,
}

impl SweepSystemSection {
    /// Parameters with the couplings zeroed; the sweep fills them per point.
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            omega_c: angular(self.cavity.0),
            omega_l: angular(self.qubit_l.0),
            omega_m: angular(self.qubit_m.0),
            omega_r: angular(self.qubit_r.0),
            eta_l: 0.0,
            eta_m: 0.0,
            eta_r: 0.0,
            epsilon_d: angular(self.drive_amplitude.0),
            omega_d: angular(self.drive_frequency.0),
            z_convention: self.qubit_z_convention,
        }
    }
}

/// One bare-basis amplitude: qubit configuration `m` (0..8), photon number
/// `n` (0..2), and a complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmpEntry {
    pub m: usize,
    pub n: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Initial state: the presets `"photon"` / `"tilted"`, or explicit
/// normalized amplitudes `{"amplitudes": [{"m": 0, "n": 1, "re": 1.0}]}`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialStateSection {
    Photon,
    Tilted,
    Explicit(Vec<AmpEntry>),
}

impl InitialStateSection {
    pub fn to_initial_state(&self) -> Result<InitialState, String> {
        match self {
            InitialStateSection::Photon => Ok(InitialState::Photon),
            InitialStateSection::Tilted => Ok(InitialState::Tilted),
            InitialStateSection::Explicit(entries) => {
                let mut pairs = Vec::with_capacity(entries.len());
                for e in entries {
                    let idx = BareIndex::new(e.m, e.n).map_err(|err| err.to_string())?;
                    pairs.push((idx, C64::new(e.re, e.im)));
                }
                Ok(InitialState::Explicit(pairs))
            }
        }
    }
}

impl Serialize for InitialStateSection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Holder<'a> {
            amplitudes: &'a [AmpEntry],
        }
        match self {
            InitialStateSection::Photon => s.serialize_str("photon"),
            InitialStateSection::Tilted => s.serialize_str("tilted"),
            InitialStateSection::Explicit(v) => Holder { amplitudes: v }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for InitialStateSection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = InitialStateSection;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "\"photon\", \"tilted\", or {{\"amplitudes\": [...]}}")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Self::Value, E> {
                match s {
                    "photon" => Ok(InitialStateSection::Photon),
                    "tilted" => Ok(InitialStateSection::Tilted),
                    other => Err(E::custom(format!(
                        "unknown initial state preset \"{other}\"; expected \"photon\" or \"tilted\""
                    ))),
                }
            }

            fn visit_map<A: de::MapAccess<'de>>(self, map: A) -> Result<Self::Value, A::Error> {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Holder {
                    amplitudes: Vec<AmpEntry>,
                }
                let h = Holder::deserialize(de::value::MapAccessDeserializer::new(map))?;
                Ok(InitialStateSection::Explicit(h.amplitudes))
            }
        }
        d.deserialize_any(V)
    }
}

/// Integration window; defaults to the production 2 us / 1 ps / stride-100
/// setup with the half-step convergence probe off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub t_end: TimeSpan,
    pub dt: TimeSpan,
    pub sample_stride: usize,
    pub convergence_check: bool,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            t_end: TimeSpan(2.0e-6),
            dt: TimeSpan(1.0e-12),
            sample_stride: 100,
            convergence_check: false,
        }
    }
}

impl IntegratorSection {
    pub fn to_config(&self) -> IntegratorConfig {
        IntegratorConfig { t_end: self.t_end.0, dt: self.dt.0, sample_stride: self.sample_stride }
    }
}

/// Revival-detection knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionSection {
    pub zero_threshold: f64,
    pub min_separation: TimeSpan,
}

impl Default for DetectionSection {
    fn default() -> Self {
        Self { zero_threshold: 0.02, min_separation: TimeSpan(10.0e-9) }
    }
}

impl DetectionSection {
    pub fn to_detection(&self) -> PeakDetection {
        PeakDetection { zero_threshold: self.zero_threshold, min_separation: self.min_separation.0 }
    }
}

/// Which files `run` writes next to `run.json`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    /// series.csv: time against 4-tangle.
    Series,
    /// trajectory.csv: time against all 16 bare populations.
    Trajectory,
    /// spectrum.csv: the dressed levels of the drive-free Hamiltonian.
    Spectrum,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Series]
}

fn photon_default() -> InitialStateSection {
    InitialStateSection::Photon
}

fn tilted_default() -> InitialStateSection {
    InitialStateSection::Tilted
}

fn default_bin_width() -> f64 {
    0.025
}

/// Configuration for `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub system: SystemSection,
    #[serde(default = "photon_default")]
    pub initial_state: InitialStateSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub detection: DetectionSection,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
}

/// Either an inclusive range with a step, or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesSpec {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueList {
    Range(RangeSpec),
    Values(ValuesSpec),
}

fn expand_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(format!("step must be a positive number, got {step}"));
    }
    if !(start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(format!("bad range [{start}, {stop}]"));
    }
    // The epsilon keeps an on-grid stop inside the range; the min() keeps
    // accumulated rounding from poking the last value past it.
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| (start + i as f64 * step).min(stop)).collect())
}

impl ValueList {
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        match self {
            ValueList::Range(r) => expand_range(r.start, r.stop, r.step),
            ValueList::Values(v) if v.values.is_empty() => Err("empty values list".into()),
            ValueList::Values(v) => Ok(v.values.clone()),
        }
    }
}

/// Range or values with frequency units allowed in every slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyRangeSpec {
    pub start: Frequency,
    pub stop: Frequency,
    pub step: Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyValuesSpec {
    pub values: Vec<Frequency>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencyList {
    Range(FrequencyRangeSpec),
    Values(FrequencyValuesSpec),
}

impl FrequencyList {
    /// Expanded list in Hz.
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        match self {
            FrequencyList::Range(r) => expand_range(r.start.0, r.stop.0, r.step.0),
            FrequencyList::Values(v) if v.values.is_empty() => Err("empty values list".into()),
            FrequencyList::Values(v) => Ok(v.values.iter().map(|f| f.0).collect()),
        }
    }
}

/// The swept grid: coupling ratio (outer axis) and left coupling (inner
/// axis). The right coupling follows the left one unless pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub lambda: ValueList,
    pub coupling_l: FrequencyList,
    #[serde(default)]
    pub coupling_r: Option<Frequency>,
}

/// Configuration for `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfigFile {
    pub system: SweepSystemSection,
    pub grid: GridSection,
    #[serde(default = "tilted_default")]
    pub initial_state: InitialStateSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub detection: DetectionSection,
    #[serde(default = "default_bin_width")]
    pub histogram_bin_width: f64,
}

/// Parses strictly; the error string carries serde_json's line/column and
/// field diagnostics.
pub fn parse_run_config(text: &str) -> Result<RunConfigFile, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfigFile, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}
