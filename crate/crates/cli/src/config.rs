//! Plain-text `key = value` scenario files.
//!
//! ```text
//! # two devices per tier, aerial devices on
//! M = 2
//! Pg_dBm = 0
//! Pu_dBm = 0 dBm
//! m_list = 3, 1
//! ```
//!
//! Omitted keys take the defaults of [`nomacov::NetworkConfigBuilder`].
//! Powers accept `off` or `-inf` for a silent tier.

use std::fmt::Write as _;
use std::path::Path;

use nomacov::geometry::watts_to_dbm;
use nomacov::{Config, NetworkConfigBuilder};

use crate::error::{CliError, Result};

pub const CONFIG_KEYS: [&str; 11] =
    ["M", "R_m", "r0_m", "alpha_g", "alpha_u", "Pg_dBm", "Pu_dBm", "B_Hz", "sigma2_dBm", "m_list", "rates_bps_list"];

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub fn error(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Parse { line: self.line, msg: format!("{}: {msg}", self.key) }
    }

    fn unit_stripped(&self, unit: &str) -> &str {
        let v = self.value.trim();
        match v.len().checked_sub(unit.len()) {
            Some(cut) if !unit.is_empty() && v[cut..].eq_ignore_ascii_case(unit) => v[..cut].trim_end(),
            _ => v,
        }
    }

    pub fn number(&self, unit: &str) -> Result<f64> {
        let v = self.unit_stripped(unit);
        v.parse::<f64>().map_err(|_| self.error(format!("expected a number, got '{v}'")))
    }

    /// A power level in dBm where `off` and `-inf` mean no transmission.
    pub fn dbm(&self) -> Result<f64> {
        match self.unit_stripped("dBm").to_ascii_lowercase().as_str() {
            "off" | "-inf" => Ok(f64::NEG_INFINITY),
            _ => self.number("dBm"),
        }
    }

    pub fn integer(&self) -> Result<u64> {
        let v = self.value.trim();
        v.parse::<u64>().map_err(|_| self.error(format!("expected a nonnegative integer, got '{v}'")))
    }

    pub fn items(&self) -> impl Iterator<Item = &str> {
        self.value.split([',', ' ', '\t']).map(str::trim).filter(|s| !s.is_empty())
    }

    pub fn list<V: std::str::FromStr>(&self) -> Result<Vec<V>> {
        self.items()
            .map(|s| s.parse::<V>().map_err(|_| self.error(format!("cannot parse list item '{s}'"))))
            .collect()
    }
}

/// Splits a file into entries, dropping comments and blank lines.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| CliError::Parse { line, msg: format!("expected 'key = value', got '{body}'") })?;
        let key = key.trim().to_string();
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(CliError::Parse { line, msg: format!("{key} already set on line {}", prev.line) });
        }
        out.push(Entry { key, value: value.trim().to_string(), line });
    }
    Ok(out)
}

/// Applies scenario keys to `builder`. Entries with other keys are returned.
pub fn apply_entries(mut b: NetworkConfigBuilder<f64>, entries: Vec<Entry>) -> Result<(NetworkConfigBuilder<f64>, Vec<Entry>)> {
    let mut rest = Vec::new();
    for e in entries {
        b = match e.key.as_str() {
            "M" => b.devices(e.integer()? as usize),
            "R_m" => b.radius(e.number("m")?),
            "r0_m" => b.r0(e.number("m")?),
            "alpha_g" => b.alpha_g(e.number("")?),
            "alpha_u" => b.alpha_u(e.number("")?),
            "Pg_dBm" => b.p_g_dbm(e.dbm()?),
            "Pu_dBm" => b.p_u_dbm(e.dbm()?),
            "B_Hz" => b.bandwidth(e.number("Hz")?),
            "sigma2_dBm" => b.sigma2(nomacov::geometry::dbm_to_watts(e.dbm()?)),
            "m_list" => b.nakagami(e.list()?),
            "rates_bps_list" => b.rates(e.list()?),
            _ => {
                rest.push(e);
                b
            }
        };
    }
    Ok((b, rest))
}

pub fn parse_config(text: &str) -> Result<Config> {
    let (b, rest) = apply_entries(Config::builder(), parse_entries(text)?)?;
    if let Some(e) = rest.first() {
        return Err(e.error(format!("unknown key; expected one of {}", CONFIG_KEYS.join(", "))));
    }
    Ok(b.build()?)
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load_config(path: &Path) -> Result<Config> {
    parse_config(&read(path)?)
}

fn list<V: std::fmt::Display>(xs: &[V]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// YAML-style description of a resolved scenario, one line per key.
pub fn describe(cfg: &Config) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "M: {}", cfg.devices());
    let _ = writeln!(s, "R_m: {}", cfg.radius());
    let _ = writeln!(s, "r0_m: {}", cfg.r0());
    let _ = writeln!(s, "alpha_g: {}", cfg.alpha_g());
    let _ = writeln!(s, "alpha_u: {}", cfg.alpha_u());
    let _ = writeln!(s, "Pg_dBm: {}", watts_to_dbm(cfg.p_g()));
    let _ = writeln!(s, "Pu_dBm: {}", watts_to_dbm(cfg.p_u()));
    let _ = writeln!(s, "B_Hz: {}", cfg.bandwidth());
    let _ = writeln!(s, "sigma2_dBm: {}", watts_to_dbm(cfg.sigma2()));
    let _ = writeln!(s, "m_list: [{}]", list(cfg.nakagami()));
    let _ = writeln!(s, "rates_bps_list: [{}]", list(cfg.rates()));
    s
}
