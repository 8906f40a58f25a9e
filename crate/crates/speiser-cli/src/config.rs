//! Plain `key = value` config files plus flag resolution. Flags always
//! win over the file; every resolved value is recorded so output files
//! can carry their full configuration header.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use speiser_core::error::Error;
use speiser_core::sphere::SphereValue;

use crate::CliResult;

#[derive(Default)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Config> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Config { map });
        };
        let text = std::fs::read_to_string(path)?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected `key = value`, got `{line}`"),
                }
                .into());
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { map })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }
}

/// Merges flags over config values and keeps the `key = value` trail
/// for the output header, in resolution order.
pub struct Resolve<'c> {
    cfg: &'c Config,
    pub header: Vec<(String, String)>,
}

fn bad(key: &str, raw: &str, what: &str) -> crate::CliError {
    crate::CliError::Msg(format!("--{key}: cannot parse `{raw}` as {what}"))
}

impl<'c> Resolve<'c> {
    pub fn new(cfg: &'c Config) -> Resolve<'c> {
        Resolve { cfg, header: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.header.push((key.to_string(), value.to_string()));
    }

    fn pick(&self, key: &str, flag: Option<String>) -> Option<String> {
        flag.or_else(|| self.cfg.raw(key).map(|s| s.to_string()))
    }

    fn need(&self, key: &str, flag: Option<String>) -> CliResult<String> {
        self.pick(key, flag)
            .ok_or_else(|| crate::CliError::Msg(format!("missing --{key} (no flag, no config entry)")))
    }

    pub fn string(&mut self, key: &str, flag: Option<String>) -> CliResult<String> {
        let v = self.need(key, flag)?;
        self.note(key, &v);
        Ok(v)
    }

    pub fn f64_or(&mut self, key: &str, flag: Option<f64>, default: f64) -> CliResult<f64> {
        let v = match flag {
            Some(v) => v,
            None => match self.cfg.raw(key) {
                Some(raw) => raw.parse().map_err(|_| bad(key, raw, "a number"))?,
                None => default,
            },
        };
        self.note(key, v);
        Ok(v)
    }

    pub fn f64_req(&mut self, key: &str, flag: Option<f64>) -> CliResult<f64> {
        let raw = self.need(key, flag.map(|v| v.to_string()))?;
        let v: f64 = raw.parse().map_err(|_| bad(key, &raw, "a number"))?;
        self.note(key, v);
        Ok(v)
    }

    pub fn usize_or(&mut self, key: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        let v = match flag {
            Some(v) => v,
            None => match self.cfg.raw(key) {
                Some(raw) => raw.parse().map_err(|_| bad(key, raw, "an integer"))?,
                None => default,
            },
        };
        self.note(key, v);
        Ok(v)
    }

    pub fn usize_req(&mut self, key: &str, flag: Option<usize>) -> CliResult<usize> {
        let raw = self.need(key, flag.map(|v| v.to_string()))?;
        let v: usize = raw.parse().map_err(|_| bad(key, &raw, "an integer"))?;
        self.note(key, v);
        Ok(v)
    }

    pub fn u64_or(&mut self, key: &str, flag: Option<u64>, default: u64) -> CliResult<u64> {
        let v = match flag {
            Some(v) => v,
            None => match self.cfg.raw(key) {
                Some(raw) => raw.parse().map_err(|_| bad(key, raw, "an integer"))?,
                None => default,
            },
        };
        self.note(key, v);
        Ok(v)
    }

    /// Comma list of floats, also accepting `lo..hi` integer ranges.
    pub fn f64_list(&mut self, key: &str, flag: Option<String>, default: &[f64]) -> CliResult<Vec<f64>> {
        match self.pick(key, flag) {
            Some(raw) => {
                let v = parse_f64_list(&raw).ok_or_else(|| bad(key, &raw, "a list of numbers"))?;
                self.note(key, &raw);
                Ok(v)
            }
            None => {
                let shown: Vec<String> = default.iter().map(|v| v.to_string()).collect();
                self.note(key, shown.join(","));
                Ok(default.to_vec())
            }
        }
    }

    pub fn u64_list(&mut self, key: &str, flag: Option<String>, default: &[u64]) -> CliResult<Vec<u64>> {
        match self.pick(key, flag) {
            Some(raw) => {
                let mut out = Vec::new();
                for part in raw.split(',') {
                    out.push(
                        part.trim()
                            .parse::<u64>()
                            .map_err(|_| bad(key, &raw, "a list of integers"))?,
                    );
                }
                self.note(key, &raw);
                Ok(out)
            }
            None => {
                let shown: Vec<String> = default.iter().map(|v| v.to_string()).collect();
                self.note(key, shown.join(","));
                Ok(default.to_vec())
            }
        }
    }

    /// Radii: `2..12` (inclusive) or `2,4,6`.
    pub fn radii(&mut self, key: &str, flag: Option<String>, default: &str) -> CliResult<Vec<usize>> {
        let raw = self.pick(key, flag).unwrap_or_else(|| default.to_string());
        let v = parse_radii(&raw).ok_or_else(|| bad(key, &raw, "radii like 2..12 or 2,4,6"))?;
        self.note(key, &raw);
        Ok(v)
    }

    pub fn sphere_opt(&mut self, key: &str, flag: Option<String>) -> CliResult<Option<SphereValue>> {
        match self.pick(key, flag) {
            Some(raw) => {
                let v = SphereValue::parse(&raw)?;
                self.note(key, v);
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn complex_opt(&mut self, key: &str, flag: Option<String>) -> CliResult<Option<Complex64>> {
        match self.pick(key, flag) {
            Some(raw) => {
                let v = SphereValue::parse(&raw)?
                    .as_complex()
                    .ok_or_else(|| bad(key, &raw, "a finite complex number"))?;
                self.note(key, SphereValue::from_complex(v));
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn complex_req(&mut self, key: &str, flag: Option<String>) -> CliResult<Complex64> {
        let raw = self.need(key, flag)?;
        let v = SphereValue::parse(&raw)?
            .as_complex()
            .ok_or_else(|| bad(key, &raw, "a finite complex number"))?;
        self.note(key, SphereValue::from_complex(v));
        Ok(v)
    }
}

fn parse_f64_list(raw: &str) -> Option<Vec<f64>> {
    if let Some(v) = parse_radii(raw) {
        return Some(v.into_iter().map(|r| r as f64).collect());
    }
    let mut out = Vec::new();
    for part in raw.split(',') {
        out.push(part.trim().parse::<f64>().ok()?);
    }
    Some(out)
}

fn parse_radii(raw: &str) -> Option<Vec<usize>> {
    let raw = raw.trim();
    if let Some((lo, hi)) = raw.split_once("..") {
        let lo: usize = lo.trim().parse().ok()?;
        let hi: usize = hi.trim().parse().ok()?;
        if hi < lo {
            return None;
        }
        return Some((lo..=hi).collect());
    }
    let mut out = Vec::new();
    for part in raw.split(',') {
        out.push(part.trim().parse::<usize>().ok()?);
    }
    Some(out)
}
