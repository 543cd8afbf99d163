//! Scenario files: sectioned `key = value` documents with unit-suffixed
//! keys, validated against a fixed schema and serialized canonically.

mod schema;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::charging::{FilmSample, IlluminationScenario};
use crate::electrostatics::ChargeScenario;
use crate::ion_impact::{GateParams, TrapConfig};
use crate::quantities::{Dimension, MonteCarlo, UncertainQuantity};
use crate::rydberg_impact::RydbergConfig;
use crate::{Error, Result};

use schema::{Check, Kind, SectionSpec};

/// The Yb⁺ scenario shipped with the toolkit.
pub const PAPER_YB: &str = include_str!("../../data/paper_yb.scenario");

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
    FloatList(Vec<f64>),
    TextList(Vec<String>),
}

/// Validated key/value pairs of one section, in file units.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    values: BTreeMap<&'static str, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub mc_samples: u64,
    sections: BTreeMap<&'static str, Section>,
}

fn schema_err(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(f) => Some(*f),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn check_number(path: &str, x: f64, check: Check) -> Result<()> {
    let ok = x.is_finite()
        && match check {
            Check::Positive => x > 0.0,
            Check::NonNegative => x >= 0.0,
            Check::Fraction => (0.0..=1.0).contains(&x),
            Check::Any => true,
        };
    if ok {
        Ok(())
    } else {
        Err(schema_err(format!("{path} = {x} violates {check:?}")))
    }
}

fn convert(path: &str, kind: Kind, raw: &toml::Value) -> Result<Value> {
    let wrong = || schema_err(format!("{path}: expected {kind:?}, got {}", raw.type_str()));
    match kind {
        Kind::Float(check) => {
            let x = as_f64(raw).ok_or_else(wrong)?;
            check_number(path, x, check)?;
            Ok(Value::Float(x))
        }
        Kind::Int => raw.as_integer().map(Value::Int).ok_or_else(wrong),
        Kind::FloatList(check) => {
            let arr = raw.as_array().ok_or_else(wrong)?;
            let xs = arr
                .iter()
                .map(|v| as_f64(v).ok_or_else(wrong))
                .collect::<Result<Vec<_>>>()?;
            for (i, x) in xs.iter().enumerate() {
                check_number(&format!("{path}[{i}]"), *x, check)?;
            }
            Ok(Value::FloatList(xs))
        }
        Kind::TextList => {
            let arr = raw.as_array().ok_or_else(wrong)?;
            arr.iter()
                .map(|v| v.as_str().map(String::from).ok_or_else(wrong))
                .collect::<Result<Vec<_>>>()
                .map(Value::TextList)
        }
    }
}

fn unknown_key(section: &SectionSpec, key: &str) -> Error {
    let (stem, suffix) = schema::stem(key);
    let known = section
        .keys
        .iter()
        .find(|k| schema::stem(k.key).0 == stem && k.key != key);
    match known {
        Some(k) => schema_err(format!(
            "[{}].{key}: unit suffix {} does not match the schema key {}",
            section.name,
            suffix.unwrap_or("(none)"),
            k.key
        )),
        None => schema_err(format!("[{}].{key}: unknown key", section.name)),
    }
}

fn parse_section(spec: &'static SectionSpec, table: &toml::Table) -> Result<Section> {
    let mut values = BTreeMap::new();
    for (key, raw) in table {
        let Some(k) = spec.keys.iter().find(|k| k.key == key) else {
            return Err(unknown_key(spec, key));
        };
        let path = format!("[{}].{}", spec.name, k.key);
        values.insert(k.key, convert(&path, k.kind, raw)?);
    }
    for k in spec.keys.iter().filter(|k| k.required) {
        if !values.contains_key(k.key) {
            return Err(schema_err(format!("[{}].{}: required key missing", spec.name, k.key)));
        }
    }
    Ok(Section { values })
}

fn unsigned(key: &str, raw: &toml::Value) -> Result<u64> {
    raw.as_integer()
        .and_then(|i| u64::try_from(i).ok())
        .ok_or_else(|| schema_err(format!("{key} must be a non-negative integer")))
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_scenario(text)
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| schema_err(e.to_string()))?;
    let mut name = None;
    let mut seed = DEFAULT_SEED;
    let mut mc_samples = DEFAULT_MC_SAMPLES;
    let mut sections = BTreeMap::new();
    for (key, raw) in &doc {
        match (key.as_str(), raw) {
            ("name", toml::Value::String(s)) => name = Some(s.clone()),
            ("name", _) => return Err(schema_err("name must be a string")),
            ("seed", v) => seed = unsigned("seed", v)?,
            ("mc_samples", v) => {
                mc_samples = unsigned("mc_samples", v)?;
                if mc_samples < MonteCarlo::MIN_SAMPLES as u64 {
                    return Err(schema_err(format!(
                        "mc_samples must be at least {}",
                        MonteCarlo::MIN_SAMPLES
                    )));
                }
            }
            (k, toml::Value::Table(t)) => {
                let spec = schema::section(k)
                    .ok_or_else(|| schema_err(format!("[{k}]: unknown section")))?;
                sections.insert(spec.name, parse_section(spec, t)?);
            }
            (k, _) => return Err(schema_err(format!("{k}: unknown top-level key"))),
        }
    }
    let name = name.ok_or_else(|| schema_err("name: required key missing"))?;
    let s = Scenario {
        name,
        seed,
        mc_samples,
        sections,
    };
    s.check_cross_fields()?;
    Ok(s)
}

pub fn read_scenario(path: impl AsRef<std::path::Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_scenario(&text)
}

fn fmt_f64(x: f64) -> String {
    // Debug gives the shortest string that parses back to the same bits.
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'i', 'N']) {
        s
    } else {
        format!("{s}.0")
    }
}

fn fmt_str(s: &str) -> String {
    toml::Value::String(s.into()).to_string()
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Float(x) => fmt_f64(*x),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => fmt_str(s),
        Value::FloatList(xs) => {
            format!("[{}]", xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", "))
        }
        Value::TextList(xs) => {
            format!("[{}]", xs.iter().map(|x| fmt_str(x)).collect::<Vec<_>>().join(", "))
        }
    }
}

/// Canonical text: top-level keys, then sections and keys in schema order.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", fmt_str(&s.name));
    let _ = writeln!(out, "seed = {}", s.seed);
    let _ = writeln!(out, "mc_samples = {}", s.mc_samples);
    for spec in schema::SECTIONS {
        let Some(sec) = s.sections.get(spec.name) else {
            continue;
        };
        let _ = writeln!(out, "\n[{}]", spec.name);
        for k in spec.keys {
            if let Some(v) = sec.values.get(k.key) {
                let _ = writeln!(out, "{} = {}", k.key, fmt_value(v));
            }
        }
    }
    out
}

impl Section {
    fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn float(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(Value::Float(x)) => Some(*x),
            _ => None,
        }
    }

    fn floats(&self, key: &str) -> Option<&[f64]> {
        match self.get(key) {
            Some(Value::FloatList(x)) => Some(x),
            _ => None,
        }
    }
}

/// One asymmetric-cavity finesse measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct FinesseEntry {
    pub label: String,
    pub finesse: UncertainQuantity,
}

impl Scenario {
    pub fn section(&self, name: &str) -> Result<&Section> {
        self.sections
            .get(name)
            .ok_or_else(|| schema_err(format!("[{name}]: section required for this computation")))
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    fn require(&self, section: &str, key: &str) -> Result<f64> {
        self.section(section)?
            .float(key)
            .ok_or_else(|| schema_err(format!("[{section}].{key}: required for this computation")))
    }

    fn optional(&self, section: &str, key: &str) -> Result<Option<f64>> {
        Ok(self.section(section)?.float(key))
    }

    fn check_cross_fields(&self) -> Result<()> {
        if let Some(c) = self.sections.get("cavity") {
            if c.float("fsr_hz").is_some() && c.float("length_m").is_some() {
                return Err(schema_err("[cavity]: give fsr_hz or length_m, not both"));
            }
            let n = c.floats("finesse").map_or(0, <[f64]>::len);
            if c.floats("finesse_sigma").map_or(0, <[f64]>::len) != n {
                return Err(schema_err("[cavity].finesse_sigma: length must match finesse"));
            }
            if let Some(Value::TextList(l)) = c.get("labels") {
                if l.len() != n {
                    return Err(schema_err("[cavity].labels: length must match finesse"));
                }
            }
        }
        if let Some(t) = self.sections.get("trap") {
            if let (Some(rf), Some(w)) = (t.float("rf_hz"), t.float("secular_hz")) {
                if rf <= w {
                    return Err(schema_err("[trap].rf_hz must exceed secular_hz"));
                }
            }
            if let Some(Value::Int(n)) = t.get("gate_occupation") {
                if *n < 0 {
                    return Err(schema_err("[trap].gate_occupation must be non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Monte-Carlo settings from `seed` and `mc_samples`.
    pub fn monte_carlo(&self) -> MonteCarlo {
        MonteCarlo::new(self.mc_samples as usize, self.seed)
    }

    pub fn reference_finesse(&self) -> Result<UncertainQuantity> {
        UncertainQuantity::new(
            self.require("cavity", "f00")?,
            self.require("cavity", "f00_sigma")?,
            Dimension::Dimensionless,
        )
    }

    pub fn finesse_entries(&self) -> Result<Vec<FinesseEntry>> {
        let c = self.section("cavity")?;
        let f = c
            .floats("finesse")
            .ok_or_else(|| schema_err("[cavity].finesse: required for this computation"))?;
        let s = c.floats("finesse_sigma").unwrap_or(&[]);
        let labels: Vec<String> = match c.get("labels") {
            Some(Value::TextList(l)) => l.clone(),
            _ => (0..f.len()).map(|i| format!("F01[{i}]")).collect(),
        };
        f.iter()
            .zip(s)
            .zip(labels)
            .map(|((f, s), label)| {
                Ok(FinesseEntry {
                    label,
                    finesse: UncertainQuantity::new(*f, *s, Dimension::Dimensionless)?,
                })
            })
            .collect()
    }

    /// Free spectral range in Hz, from `fsr_hz` or `length_m`.
    pub fn fsr(&self) -> Result<UncertainQuantity> {
        let sigma = self.optional("cavity", "fsr_sigma_hz")?.unwrap_or(0.0);
        if let Some(f) = self.optional("cavity", "fsr_hz")? {
            return UncertainQuantity::new(f, sigma, Dimension::Frequency);
        }
        let l = self
            .optional("cavity", "length_m")?
            .ok_or_else(|| schema_err("[cavity].fsr_hz or [cavity].length_m: required"))?;
        UncertainQuantity::new(crate::ringdown::fsr_from_length(l)?, sigma, Dimension::Frequency)
    }

    pub fn film_thickness(&self) -> Result<UncertainQuantity> {
        UncertainQuantity::new(
            self.require("cavity", "thickness_m")?,
            self.optional("cavity", "thickness_sigma_m")?.unwrap_or(0.0),
            Dimension::Length,
        )
    }

    pub fn probe_wavelength(&self) -> Result<f64> {
        self.require("cavity", "wavelength_m")
    }

    pub fn trap_config(&self) -> Result<TrapConfig> {
        let g = |k| self.require("trap", k);
        TrapConfig::new(
            g("mass_amu")?,
            g("secular_hz")?,
            g("rf_hz")?,
            g("cooling_wavelength_m")?,
            g("gate_wavelength_m")?,
            g("cavity_wavelength_m")?,
        )
    }

    pub fn trap_setting(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.optional("trap", key)?.unwrap_or(default))
    }

    pub fn gate_params(&self) -> Result<GateParams> {
        let occupation = match self.section("trap")?.get("gate_occupation") {
            Some(Value::Int(n)) => u32::try_from(*n).map_err(|_| schema_err("gate_occupation too large"))?,
            _ => 50,
        };
        GateParams::new(
            self.require("trap", "gate_rabi_hz")?,
            occupation,
            self.trap_setting("gate_threshold", GateParams::DEFAULT_THRESHOLD)?,
        )
    }

    pub fn charge_scenario(&self) -> Result<ChargeScenario> {
        ChargeScenario::new(
            self.require("charges", "q1_e")?,
            self.require("charges", "q2_e")?,
            self.require("charges", "xq_m")?,
        )
    }

    /// Stray-charge distance with its uncertainty.
    pub fn x_q(&self) -> Result<UncertainQuantity> {
        UncertainQuantity::new(
            self.require("charges", "xq_m")?,
            self.optional("charges", "xq_sigma_m")?.unwrap_or(0.0),
            Dimension::Length,
        )
    }

    pub fn rydberg_config(&self) -> Result<RydbergConfig> {
        RydbergConfig::new(self.require("rydberg", "alpha")?, self.require("rydberg", "rabi_hz")?)
    }

    pub fn rydberg_setting(&self, key: &str) -> Result<Option<f64>> {
        self.optional("rydberg", key)
    }

    pub fn film_sample(&self) -> Result<FilmSample> {
        FilmSample::new(
            self.require("film", "resistivity_ohm_m")?,
            self.require("film", "thickness_m")?,
            self.require("film", "radius_m")?,
            self.optional("film", "capacitance_f")?
                .unwrap_or(FilmSample::DEFAULT_CAPACITANCE),
        )
    }

    /// Electron rate overriding the photon-count estimate, 1/s.
    pub fn electron_rate_override(&self) -> Result<Option<f64>> {
        self.optional("film", "electron_rate_per_s")
    }

    pub fn illumination(&self) -> Result<IlluminationScenario> {
        let x_q = self.require("charges", "xq_m")?;
        IlluminationScenario::new(
            self.require("illumination", "power_w")?,
            self.require("illumination", "wavelength_m")?,
            self.require("illumination", "efficiency")?,
            self.require("illumination", "waist_m")?,
            x_q,
        )
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
