use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{usage, CliResult};

/// Experiment kinds, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Marcinkiewicz,
    MellinDecay,
    SquareFunction,
    RieszCrossCheck,
    CzEstimates,
    CzDecompose,
    NormEstimate,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Marcinkiewicz,
        Kind::MellinDecay,
        Kind::SquareFunction,
        Kind::RieszCrossCheck,
        Kind::CzEstimates,
        Kind::CzDecompose,
        Kind::NormEstimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Marcinkiewicz => "marcinkiewicz",
            Kind::MellinDecay => "mellin-decay",
            Kind::SquareFunction => "square-function",
            Kind::RieszCrossCheck => "riesz-cross-check",
            Kind::CzEstimates => "cz-estimates",
            Kind::CzDecompose => "cz-decompose",
            Kind::NormEstimate => "norm-estimate",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = crate::error::CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| usage(format!("unknown experiment kind `{s}`")))
    }
}

/// Flat `key=value` configuration with typed, range-checked access.
///
/// Every value read (explicit or defaulted) is recorded, so the resolved
/// configuration can be echoed into the report; keys never read are rejected.
#[derive(Debug)]
pub struct ExperimentConfig {
    kind: Kind,
    values: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        Self { kind, values: BTreeMap::new(), resolved: RefCell::new(BTreeMap::new()) }
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped. A
    /// `kind` entry must agree with `kind`.
    pub fn parse(kind: Kind, text: &str) -> CliResult<Self> {
        let mut cfg = Self::new(kind);
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value, got `{line}`", no + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if key.is_empty() {
            return Err(usage("empty config key"));
        }
        if key == "kind" {
            let k: Kind = value.parse()?;
            if k != self.kind {
                return Err(usage(format!("field `kind`: config is for `{k}` but `{}` was requested", self.kind)));
            }
            return Ok(());
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> CliResult<()> {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("override `{kv}`: expected key=value")))?;
        self.set(k.trim(), v.trim())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, v.clone());
        v
    }

    pub fn f64_in(&self, key: &str, default: f64, valid: impl Fn(f64) -> bool, what: &str) -> CliResult<f64> {
        let v = match self.raw(key) {
            Some(s) => s.parse::<f64>().map_err(|_| usage(format!("field `{key}`: `{s}` is not a number")))?,
            None => default,
        };
        if !valid(v) {
            return Err(usage(format!("field `{key}`: {v} out of range ({what})")));
        }
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn usize_in(&self, key: &str, default: usize, lo: usize, hi: usize) -> CliResult<usize> {
        let v = match self.raw(key) {
            Some(s) => s.parse::<usize>().map_err(|_| usage(format!("field `{key}`: `{s}` is not a non-negative integer")))?,
            None => default,
        };
        if v < lo || v > hi {
            return Err(usage(format!("field `{key}`: {v} outside [{lo}, {hi}]")));
        }
        self.record(key, v.to_string());
        Ok(v)
    }

    /// Comma-separated non-negative integers.
    pub fn usize_list(&self, key: &str, default: &[usize], hi: usize) -> CliResult<Vec<usize>> {
        let v: Vec<usize> = match self.raw(key) {
            Some(s) => s
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("field `{key}`: `{s}` is not a list of integers"))))
                .collect::<CliResult<_>>()?,
            None => default.to_vec(),
        };
        if v.is_empty() || v.len() > 2 || v.iter().any(|&x| x > hi) {
            return Err(usage(format!("field `{key}`: need 1 or 2 entries, each at most {hi}")));
        }
        self.record(key, v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        Ok(v)
    }

    pub fn bool(&self, key: &str, default: bool) -> CliResult<bool> {
        let v = match self.raw(key) {
            Some("true") => true,
            Some("false") => false,
            Some(s) => return Err(usage(format!("field `{key}`: `{s}` is not true/false"))),
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    /// The mandatory seed of sampled experiments.
    pub fn seed(&self) -> CliResult<u64> {
        let s = self.raw("seed").ok_or_else(|| usage(format!("field `seed`: required for `{}`", self.kind)))?;
        let v = s.parse::<u64>().map_err(|_| usage(format!("field `seed`: `{s}` is not a non-negative integer")))?;
        self.record("seed", v.to_string());
        Ok(v)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    /// Keys given but never read.
    pub fn unused(&self) -> Vec<String> {
        let used: BTreeSet<String> = self.resolved.borrow().keys().cloned().collect();
        self.values.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }

    /// The configuration as resolved during the run.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out = self.resolved.borrow().clone();
        out.insert("kind".into(), self.kind.name().into());
        out
    }
}
