//! Shared tunables and their flat `key = value` file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! threshold = 0.7
//! eps_amp = 0.02
//! start_color = 255,255,255
//! forward = up
//! ```
//!
//! Keys are the field names of [`AnalyzerConfig`], [`RenderConfig`] and the
//! loop/dataset constants below. Unknown keys are an error.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analyzer::AnalyzerConfig;
use crate::error::{Error, Result};
use crate::render::RenderConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    /// Score the refinement loop must reach before it stops.
    pub theta_loop: f64,
    pub budget: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            theta_loop: 0.9,
            budget: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n_neg: usize,
    pub split_seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig { n_neg: 10, split_seed: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub analyzer: AnalyzerConfig,
    pub render: RenderConfig,
    pub refine: LoopConfig,
    pub dataset: DatasetConfig,
}

fn fields<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("config sections serialize to objects"),
    }
}

fn parse_number(key: &str, raw: &str, like: &serde_json::Number) -> Result<Value> {
    let bad = || Error::Config(format!("{key}: expected a number, got {raw:?}"));
    if like.is_f64() {
        let v: f64 = raw.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Value::from(v))
    } else {
        let v: u64 = raw.parse().map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {raw:?}")))?;
        Ok(Value::from(v))
    }
}

fn parse_rgb(key: &str, raw: &str) -> Result<Value> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("{key}: expected r,g,b with 0..=255 channels, got {raw:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let rgb = parts.iter().map(|p| p.parse::<u8>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
    Ok(Value::from(rgb))
}

/// Parses `raw` into the JSON shape of the default `like`.
fn parse_value(key: &str, raw: &str, like: &Value) -> Result<Value> {
    match like {
        Value::Number(n) => parse_number(key, raw, n),
        Value::String(_) => Ok(Value::from(raw)),
        Value::Bool(_) => raw
            .parse::<bool>()
            .map(Value::from)
            .map_err(|_| Error::Config(format!("{key}: expected true or false, got {raw:?}"))),
        Value::Array(items) if items.first().is_some_and(Value::is_array) => {
            let colors = raw.split(';').map(|c| parse_rgb(key, c)).collect::<Result<Vec<_>>>()?;
            Ok(Value::Array(colors))
        }
        Value::Array(_) => parse_rgb(key, raw),
        _ => Err(Error::Config(format!("{key}: unsupported value"))),
    }
}

fn format_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if items.first().is_some_and(Value::is_array) => {
            items.iter().map(format_value).collect::<Vec<_>>().join(";")
        }
        Value::Array(items) => items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

fn de<T: serde::de::DeserializeOwned>(m: Map<String, Value>) -> Result<T> {
    serde_json::from_value(Value::Object(m)).map_err(|e| Error::Config(e.to_string()))
}

fn range(key: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(Error::Config(format!("{key} = {v} is outside [{lo}, {hi}]")))
    }
}

impl Config {
    /// Applies `key = value` overrides on top of the defaults.
    pub fn parse(text: &str) -> Result<Config> {
        let defaults = Config::default();
        let mut sections = [
            fields(&defaults.analyzer),
            fields(&defaults.render),
            fields(&defaults.refine),
            fields(&defaults.dataset),
        ];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, raw) = (key.trim(), raw.trim());
            let section = sections
                .iter_mut()
                .find(|s| s.contains_key(key))
                .ok_or_else(|| Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)))?;
            let value = parse_value(key, raw, &section[key])?;
            section.insert(key.to_string(), value);
        }
        let [a, r, l, d] = sections;
        let cfg = Config {
            analyzer: de(a)?,
            render: de(r)?,
            refine: de(l)?,
            dataset: de(d)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    /// Every key with its current value, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for section in [
            fields(&self.analyzer),
            fields(&self.render),
            fields(&self.refine),
            fields(&self.dataset),
        ] {
            for (k, v) in section {
                out.push_str(&format!("{k} = {}\n", format_value(&v)));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.analyzer;
        range("threshold", a.threshold, 0.0, 1.0)?;
        range("surplus_penalty", a.surplus_penalty, 0.0, 1.0)?;
        range("cycle_decay", a.cycle_decay, 0.0, 1.0)?;
        for (k, v) in [
            ("eps_amp", a.eps_amp),
            ("eps_slope", a.eps_slope),
            ("eps_margin", a.eps_margin),
            ("surplus_unit", a.surplus_unit),
            ("straight_falloff", a.straight_falloff),
            ("bulge_confidence", a.bulge_confidence),
            ("circularity_tolerance", a.circularity_tolerance),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{k} = {v} must be positive")));
            }
        }
        range("min_segment_fraction", a.min_segment_fraction, 0.0, 0.5)?;
        range("split_angle_deg", a.split_angle_deg, 1.0, 180.0)?;
        if a.n_analysis < 16 {
            return Err(Error::Config(format!("n_analysis = {} must be at least 16", a.n_analysis)));
        }
        if a.smoothing_window < 1 || a.split_persistence < 1 {
            return Err(Error::Config("smoothing_window and split_persistence must be at least 1".into()));
        }
        self.render.validate()?;
        range("theta_loop", self.refine.theta_loop, 0.0, 1.0)?;
        if self.refine.budget < 1 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.dataset.n_neg < 1 {
            return Err(Error::Config("n_neg must be at least 1".into()));
        }
        Ok(())
    }
}
