//! Run configuration: defaults, config files and flag overrides.

use std::path::PathBuf;

use invis_core::born::{Method, Side};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

/// Environment variable that overrides the output directory of a config file.
pub const OUT_DIR_ENV: &str = "INVIS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved parameters of one run. Every output embeds this verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Wavenumber in units of `π/a`.
    pub k: f64,
    /// Wavenumbers for `fig2`, in units of `π/a`.
    pub k_list: Vec<f64>,
    pub ell: i32,
    pub m: i32,
    /// `gaussian`, `quartic`, or a path to an envelope table.
    pub envelope: String,
    pub g0: f64,
    pub g0_im: f64,
    pub b: f64,
    pub dimension: u8,
    /// `constructed`, `zero`, `random:<seed>`, or a path to a sampled field.
    pub potential: String,
    pub side: Side,
    pub method: Method,
    pub theta_samples: usize,
    pub grazing_margin: f64,
    /// Azimuth for 3D amplitudes.
    pub phi: f64,
    pub grid_n: usize,
    /// `None` picks a count from the support length and `k`.
    pub slices: Option<usize>,
    pub tol: f64,
    pub d: f64,
    pub s_max: f64,
    pub samples: usize,
    /// Gauss nodes per angular half for total powers.
    pub power_angles: usize,
    pub nx: usize,
    pub ny: usize,
    pub format: Format,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 2.0,
            k_list: vec![2.0, 4.0, 8.0, 12.0],
            ell: -1,
            m: 1,
            envelope: "quartic".into(),
            g0: 1e-2,
            g0_im: 0.0,
            b: 1.0,
            dimension: 2,
            potential: "constructed".into(),
            side: Side::Left,
            method: Method::Born,
            theta_samples: 181,
            grazing_margin: invis_core::born::GRAZING_MARGIN,
            phi: 0.0,
            grid_n: 41,
            slices: None,
            tol: 1e-3,
            d: 100.0,
            s_max: 100.0,
            samples: 400,
            power_angles: 201,
            nx: 61,
            ny: 61,
            format: Format::Csv,
            out: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn g0_complex(&self) -> invis_core::Complex64 {
        invis_core::Complex64::new(self.g0, self.g0_im)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Checks ranges that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let finite = [
            ("k", self.k),
            ("g0", self.g0),
            ("g0_im", self.g0_im),
            ("b", self.b),
            ("phi", self.phi),
            ("tol", self.tol),
            ("d", self.d),
            ("s_max", self.s_max),
            ("grazing_margin", self.grazing_margin),
        ];
        if let Some((name, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return bad(format!("{name} must be finite, got {v}"));
        }
        if self.k <= 0.0 || self.k_list.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return bad("wavenumbers must be positive".into());
        }
        if self.b <= 0.0 {
            return bad(format!("b must be positive, got {}", self.b));
        }
        if !matches!(self.dimension, 2 | 3) {
            return bad(format!("dimension must be 2 or 3, got {}", self.dimension));
        }
        if self.grid_n.is_multiple_of(2) || self.grid_n < 3 {
            return bad(format!("grid_n must be odd and at least 3, got {}", self.grid_n));
        }
        if self.slices == Some(0) {
            return bad("slices must be positive".into());
        }
        if !(0.0..1.0).contains(&self.grazing_margin) {
            return bad("grazing_margin must lie in [0, 1)".into());
        }
        if self.tol <= 0.0 || self.d <= 0.0 || self.s_max <= 0.0 {
            return bad("tol, d and s_max must be positive".into());
        }
        if self.samples == 0 || self.theta_samples == 0 || self.power_angles < 3 || self.nx < 2 || self.ny < 2 {
            return bad("sample counts are too small".into());
        }
        Ok(())
    }
}

/// Parses a config file: JSON, `key = value` lines, or a previous output
/// (the embedded `config` is reused).
pub fn parse_config(text: &str) -> Result<Map<String, Value>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed).map_err(|e| CliError::Config(format!("config JSON: {e}")))?;
        let Value::Object(mut obj) = value else {
            return Err(CliError::Config("config JSON must be an object".into()));
        };
        return match obj.remove("config") {
            Some(Value::Object(inner)) => Ok(inner),
            Some(_) => Err(CliError::Config("embedded config must be an object".into())),
            None => Ok(obj),
        };
    }
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# config: ") {
            return parse_config(rest);
        }
    }
    let mut map = Map::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", i + 1)));
        }
        if map.insert(key.to_string(), parse_value(value.trim())).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(map)
}

fn parse_value(text: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return v;
    }
    if text.contains(',') {
        return Value::Array(text.split(',').map(|t| parse_value(t.trim())).collect());
    }
    Value::String(text.to_string())
}

/// Defaults overlaid with `file` entries.
pub fn from_entries(entries: Map<String, Value>) -> Result<RunConfig, CliError> {
    let mut base = match serde_json::to_value(RunConfig::default()).expect("config serializes") {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    for (k, v) in entries {
        base.insert(k, v);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_file() {
        let text = "# run\nk = 4\nk_list = 2, 8\nenvelope = gaussian\nslices = 50\nside = right\n";
        let cfg = from_entries(parse_config(text).unwrap()).unwrap();
        assert_eq!(cfg.k, 4.0);
        assert_eq!(cfg.k_list, vec![2.0, 8.0]);
        assert_eq!(cfg.envelope, "gaussian");
        assert_eq!(cfg.slices, Some(50));
        assert_eq!(cfg.side, Side::Right);
    }

    #[test]
    fn json_and_embedded_configs_agree() {
        let cfg = RunConfig {
            k: 8.0,
            g0_im: 3e-3,
            ..Default::default()
        };
        let direct = from_entries(parse_config(&cfg.to_json()).unwrap()).unwrap();
        let wrapped = format!("{{\"command\":\"x\",\"config\":{}}}", cfg.to_json());
        let csv = format!("# command: x\n# config: {}\na,b\n1,2\n", cfg.to_json());
        assert_eq!(direct, cfg);
        assert_eq!(from_entries(parse_config(&wrapped).unwrap()).unwrap(), cfg);
        assert_eq!(from_entries(parse_config(&csv).unwrap()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(from_entries(parse_config("colour = red").unwrap()).is_err());
        assert!(parse_config("just words").is_err());
        assert!(parse_config("k = 1\nk = 2").is_err());
        assert!(parse_config("[1, 2]").is_err() || from_entries(parse_config("[1, 2]").unwrap()).is_err());
        let even = RunConfig {
            grid_n: 40,
            ..Default::default()
        };
        assert!(even.validate().is_err());
        let nan = RunConfig {
            k: f64::NAN,
            ..Default::default()
        };
        assert!(nan.validate().is_err());
    }
}
