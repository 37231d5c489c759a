//! Run configuration: defaults, `key=value` config files and flag overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Bin,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Bin => "bin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Trace,
    EcTrace,
    Overlap,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Trace => "trace",
            Method::EcTrace => "ec-trace",
            Method::Overlap => "overlap",
        }
    }
}

/// Input state selector.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Codeword(usize),
    /// Approximate codeword; `None` takes Δ from the `delta` setting.
    Approx { delta: Option<f64>, l: usize },
    Tabulated(PathBuf),
}

impl FromStr for StateSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("invalid state spec '{s}'"));
        match s {
            "vacuum" => return Ok(Self::Vacuum),
            "gkp0" => return Ok(Self::Codeword(0)),
            "gkp1" => return Ok(Self::Codeword(1)),
            _ => {}
        }
        if let Some(path) = s.strip_prefix("tabulated:") {
            if path.is_empty() {
                return Err(bad());
            }
            return Ok(Self::Tabulated(PathBuf::from(path)));
        }
        let rest = s.strip_prefix("gkp-approx").ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(':').skip(1).collect();
        if !rest.is_empty() && !rest.starts_with(':') {
            return Err(bad());
        }
        let delta = match parts.first() {
            Some(d) => Some(d.parse::<f64>().map_err(|_| bad())?),
            None => None,
        };
        let l = match parts.get(1) {
            Some(l) => l.parse::<usize>().map_err(|_| bad())?,
            None => 0,
        };
        if parts.len() > 2 || l > 1 || delta.is_some_and(|d| !(d > 0.0 && d.is_finite())) {
            return Err(bad());
        }
        Ok(Self::Approx { delta, l })
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Vacuum => write!(f, "vacuum"),
            Self::Codeword(l) => write!(f, "gkp{l}"),
            Self::Approx { delta: Some(d), l } => write!(f, "gkp-approx:{d:?}:{l}"),
            Self::Approx { delta: None, l } => write!(f, "gkp-approx::{l}"),
            Self::Tabulated(p) => write!(f, "tabulated:{}", p.display()),
        }
    }
}

/// Settings given on the command line; `None` falls back to the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Code half-spacing α (default √π).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Grid size as NuxNv (default 256x256).
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Comb-sum truncation M_max (default 16).
    #[arg(long, global = true)]
    pub mmax: Option<usize>,
    /// Δ for approximate codewords without an explicit Δ (default 0.25).
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// vacuum | gkp0 | gkp1 | gkp-approx[:Δ[:ℓ]] | tabulated:PATH
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Output file (directory for shift-array).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// key=value configuration file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub nu: usize,
    pub nv: usize,
    pub mmax: usize,
    pub delta: f64,
    pub state: StateSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub method: Method,
    pub seed: u64,
    pub config_file: Option<PathBuf>,
    /// Remaining file entries, consumed by individual commands.
    pub extra: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: PI.sqrt(),
            nu: 256,
            nv: 256,
            mmax: 16,
            delta: 0.25,
            state: StateSpec::Vacuum,
            out: None,
            format: Format::Csv,
            method: Method::Trace,
            seed: 0,
            config_file: None,
            extra: BTreeMap::new(),
        }
    }
}

/// Keys accepted by individual commands in addition to the common ones.
const COMMAND_KEYS: &[&str] = &["jmax", "kmax", "dx", "dy", "deltas", "target"];

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value '{value}' for {key}")))
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::Config(format!("grid must be NuxNv, got '{s}'")))?;
    let nu: usize = parse_value("grid", a)?;
    let nv: usize = parse_value("grid", b)?;
    if nu == 0 || !nu.is_multiple_of(4) || nv == 0 || !nv.is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "grid {nu}x{nv}: Nu must be a positive multiple of 4 and Nv positive and even"
        )));
    }
    Ok((nu, nv))
}

fn enum_value<T: clap::ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, false).map_err(|_| CliError::Config(format!("invalid value '{value}' for {key}")))
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_file(&parse_config_text(&text)?)?;
            cfg.config_file = Some(path.clone());
        }
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, map: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in map {
            match k.as_str() {
                "alpha" => self.alpha = parse_value(k, v)?,
                "grid" => (self.nu, self.nv) = parse_grid(v)?,
                "mmax" => self.mmax = parse_value(k, v)?,
                "delta" => self.delta = parse_value(k, v)?,
                "state" => self.state = v.parse()?,
                "out" => self.out = Some(PathBuf::from(v)),
                "format" => self.format = enum_value(k, v)?,
                "method" => self.method = enum_value(k, v)?,
                "seed" => self.seed = parse_value(k, v)?,
                _ if COMMAND_KEYS.contains(&k.as_str()) => {
                    self.extra.insert(k.clone(), v.clone());
                }
                _ => return Err(CliError::Config(format!("unknown config key '{k}'"))),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &Overrides) -> Result<(), CliError> {
        if let Some(x) = f.alpha {
            self.alpha = x;
        }
        if let Some(g) = &f.grid {
            (self.nu, self.nv) = parse_grid(g)?;
        }
        if let Some(m) = f.mmax {
            self.mmax = m;
        }
        if let Some(d) = f.delta {
            self.delta = d;
        }
        if let Some(s) = &f.state {
            self.state = s.parse()?;
        }
        if let Some(o) = &f.out {
            self.out = Some(o.clone());
        }
        if let Some(x) = f.format {
            self.format = x;
        }
        if let Some(x) = f.method {
            self.method = x;
        }
        if let Some(x) = f.seed {
            self.seed = x;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(CliError::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(CliError::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if self.mmax == 0 {
            return Err(CliError::Config("mmax must be positive".into()));
        }
        Ok(())
    }

    /// Command-specific value: flag, then config file, then default.
    pub fn command_value<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        match (flag, self.extra.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => parse_value(key, s),
            (None, None) => Ok(default),
        }
    }

    /// Effective settings as `key=value` lines.
    pub fn manifest(&self, command: &str, extra: &[(&str, String)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command={command}");
        let _ = writeln!(out, "alpha={:?}", self.alpha);
        let _ = writeln!(out, "grid={}x{}", self.nu, self.nv);
        let _ = writeln!(out, "mmax={}", self.mmax);
        let _ = writeln!(out, "delta={:?}", self.delta);
        let _ = writeln!(out, "state={}", self.state);
        let _ = writeln!(out, "format={}", self.format.extension());
        let _ = writeln!(out, "method={}", self.method.name());
        let _ = writeln!(out, "seed={}", self.seed);
        let cfg = self.config_file.as_deref().map_or("none".to_string(), |p: &Path| p.display().to_string());
        let _ = writeln!(out, "config={cfg}");
        for (k, v) in extra {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}
