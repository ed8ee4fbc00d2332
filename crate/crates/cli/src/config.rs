//! Run configuration: JSON file, then command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coulomb_qed::resources::NormMode;
use coulomb_qed::trotter::Fault;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A value, or `"auto"` to take it from the resource bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auto<T> {
    Auto,
    Value(T),
}

impl<T: Copy> Auto<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Auto::Auto => None,
            Auto::Value(v) => Some(v),
        }
    }
}

impl<T: Serialize> Serialize for Auto<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Auto::Auto => s.serialize_str("auto"),
            Auto::Value(v) => v.serialize(s),
        }
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Auto<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Text(String),
            Value(T),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "auto" => Ok(Auto::Auto),
            Raw::Text(t) => Err(de::Error::custom(format!("expected a number or \"auto\", got \"{t}\""))),
            Raw::Value(v) => Ok(Auto::Value(v)),
        }
    }
}

impl<T: FromStr> FromStr for Auto<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Auto::Auto);
        }
        s.parse().map(Auto::Value).map_err(|e| format!("{e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub dims: [usize; 3],
    pub g: f64,
    pub mass: f64,
    pub wilson: f64,
    /// State energy `E` before the fermion shift.
    pub energy: f64,
    /// `energy` is already the shifted `E'`.
    pub energy_shifted: bool,
    pub epsilon: f64,
    pub time: f64,
    pub steps: Auto<usize>,
    pub n_a: Auto<usize>,
    /// Field cutoff of the simulated registers.
    pub a_max: Auto<f64>,
    pub norm_mode: NormMode,
    pub transverse_hi: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dims: [2, 1, 1],
            g: 0.3,
            mass: 0.5,
            wilson: 1.0,
            energy: 10.0,
            energy_shifted: false,
            epsilon: 0.1,
            time: 0.5,
            steps: Auto::Value(16),
            n_a: Auto::Value(1),
            a_max: Auto::Value(1.0),
            norm_mode: NormMode::Asymptotic,
            transverse_hi: true,
            seed: 7,
            out: None,
            fault: None,
        }
    }
}

/// Command-line values that replace those of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dims: Option<[usize; 3]>,
    pub g: Option<f64>,
    pub mass: Option<f64>,
    pub wilson: Option<f64>,
    pub energy: Option<f64>,
    pub energy_shifted: bool,
    pub epsilon: Option<f64>,
    pub time: Option<f64>,
    pub steps: Option<Auto<usize>>,
    pub n_a: Option<Auto<usize>>,
    pub a_max: Option<Auto<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub numeric_norms: bool,
    pub transverse_hi: Option<bool>,
    pub fault: Option<Fault>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut c = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        c.apply(overrides);
        c.validate()?;
        Ok(c)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = o.$f.clone() { self.$f = v; })*};
        }
        set!(dims, g, mass, wilson, energy, epsilon, time, steps, n_a, a_max, seed, transverse_hi);
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        if o.fault.is_some() {
            self.fault = o.fault;
        }
        if o.energy_shifted {
            self.energy_shifted = true;
        }
        if o.numeric_norms {
            self.norm_mode = NormMode::Numeric;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}, expected {SCHEMA_VERSION}", self.schema_version));
        }
        if self.dims.contains(&0) {
            return bad(format!("lattice dimensions must be positive, got {:?}", self.dims));
        }
        for (name, v) in [
            ("g", self.g),
            ("mass", self.mass),
            ("wilson", self.wilson),
            ("energy", self.energy),
            ("epsilon", self.epsilon),
            ("time", self.time),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.g < 0.0 || self.mass < 0.0 || self.energy < 0.0 || self.time < 0.0 {
            return bad("g, mass, energy and time must be nonnegative".into());
        }
        if !(self.wilson > 0.0) {
            return bad(format!("wilson must be positive, got {}", self.wilson));
        }
        if matches!(self.steps, Auto::Value(0)) {
            return bad("steps must be at least 1".into());
        }
        if matches!(self.n_a, Auto::Value(0)) {
            return bad("n_a must be at least 1".into());
        }
        if let Auto::Value(a) = self.a_max {
            if !(a > 0.0) || !a.is_finite() {
                return bad(format!("a_max must be positive, got {a}"));
            }
        }
        Ok(())
    }
}

pub fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,Z, got \"{s}\""));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("bad dimension \"{p}\": {e}"))?;
    }
    Ok(out)
}
