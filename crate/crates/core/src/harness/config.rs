//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! `scheme`, `n_cells`, `st` and `t_end` are required; every other key has a
//! default (see [`RunConfig::default`]). Unknown or repeated keys are errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::driver::{SchemeKind, TimeStepPolicy};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryPolicy, InitialSampling};

/// What a run's density is compared against.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ReferenceSpec {
    #[default]
    None,
    /// Heat-kernel solution of the small-Stokes limit.
    Analytic,
    /// Snapshot CSV on the same domain, possibly on a finer grid.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub n_cells: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub sigma0: f64,
    /// Projection of the initial bump onto the cells.
    pub initial_sampling: InitialSampling,
    pub st: f64,
    pub tau_g: f64,
    pub u_g: f64,
    pub cfl: f64,
    pub source_cap_enabled: bool,
    pub implicit_multiplier: f64,
    pub safety: f64,
    pub boundary: BoundaryPolicy,
    pub t_end: f64,
    /// Extra output times before `t_end`; `t_end` is always written.
    pub snapshot_times: Vec<f64>,
    pub output_path: Option<PathBuf>,
    pub reference: ReferenceSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        let policy = TimeStepPolicy::default();
        Self {
            scheme: SchemeKind::ApExplicit,
            n_cells: 100,
            x_min: -1.0,
            x_max: 1.0,
            sigma0: 0.01,
            initial_sampling: InitialSampling::Center,
            st: 0.1,
            tau_g: 0.1,
            u_g: 0.0,
            cfl: policy.cfl,
            source_cap_enabled: policy.source_cap_enabled,
            implicit_multiplier: policy.implicit_multiplier,
            safety: policy.safety,
            boundary: BoundaryPolicy::Transmissive,
            t_end: 0.2,
            snapshot_times: Vec::new(),
            output_path: None,
            reference: ReferenceSpec::None,
        }
    }
}

const REQUIRED: [&str; 4] = ["scheme", "n_cells", "st", "t_end"];

const KEYS: [&str; 18] = [
    "scheme",
    "n_cells",
    "x_min",
    "x_max",
    "sigma0",
    "initial_sampling",
    "st",
    "tau_g",
    "u_g",
    "cfl",
    "source_cap",
    "implicit_multiplier",
    "safety",
    "boundary",
    "t_end",
    "snapshot_times",
    "output",
    "reference",
];

impl RunConfig {
    pub fn time_step_policy(&self) -> TimeStepPolicy {
        TimeStepPolicy {
            cfl: self.cfl,
            source_cap_enabled: self.source_cap_enabled,
            implicit_multiplier: self.implicit_multiplier,
            safety: self.safety,
        }
    }

    /// Range checks shared by the parser and programmatic construction.
    pub fn validate(&self) -> Result<()> {
        for key in KEYS {
            if let Err(msg) = self.check_key(key) {
                return Err(Error::Config(format!("{key}: {msg}")));
            }
        }
        Ok(())
    }

    fn check_key(&self, key: &str) -> std::result::Result<(), String> {
        let positive = |v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("must be finite and positive, got {v}"))
            }
        };
        let non_negative = |v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("must be finite and non-negative, got {v}"))
            }
        };
        match key {
            "n_cells" if self.n_cells < 3 => Err(format!("need at least 3 cells, got {}", self.n_cells)),
            "x_min" if !self.x_min.is_finite() => Err(format!("must be finite, got {}", self.x_min)),
            "x_max" if !(self.x_max.is_finite() && self.x_max > self.x_min) => Err(format!(
                "must be finite and greater than x_min = {}, got {}",
                self.x_min, self.x_max
            )),
            "sigma0" => positive(self.sigma0),
            "st" => positive(self.st),
            "tau_g" => non_negative(self.tau_g),
            "u_g" if !self.u_g.is_finite() => Err(format!("must be finite, got {}", self.u_g)),
            "cfl" if !(self.cfl > 0.0 && self.cfl <= 1.0) => {
                Err(format!("must lie in (0, 1], got {}", self.cfl))
            }
            "implicit_multiplier" if !(self.implicit_multiplier >= 1.0 && self.implicit_multiplier.is_finite()) => {
                Err(format!("must be finite and at least 1, got {}", self.implicit_multiplier))
            }
            "safety" if !(self.safety >= 1.0 && self.safety.is_finite()) => {
                Err(format!("must be finite and at least 1, got {}", self.safety))
            }
            "t_end" => non_negative(self.t_end),
            "snapshot_times" => self.snapshot_times.iter().try_for_each(|&t| non_negative(t)),
            _ => Ok(()),
        }
    }

    /// Text form accepted by [`parse_config`]; `parse_config(&c.to_text())`
    /// reproduces `c`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("scheme", self.scheme.to_string());
        line("n_cells", self.n_cells.to_string());
        line("x_min", fmt_f64(self.x_min));
        line("x_max", fmt_f64(self.x_max));
        line("sigma0", fmt_f64(self.sigma0));
        line("initial_sampling", self.initial_sampling.to_string());
        line("st", fmt_f64(self.st));
        line("tau_g", fmt_f64(self.tau_g));
        line("u_g", fmt_f64(self.u_g));
        line("cfl", fmt_f64(self.cfl));
        line("source_cap", if self.source_cap_enabled { "on" } else { "off" }.into());
        line("implicit_multiplier", fmt_f64(self.implicit_multiplier));
        line("safety", fmt_f64(self.safety));
        line("boundary", self.boundary.to_string());
        line("t_end", fmt_f64(self.t_end));
        if !self.snapshot_times.is_empty() {
            let times: Vec<String> = self.snapshot_times.iter().map(|&t| fmt_f64(t)).collect();
            line("snapshot_times", times.join(", "));
        }
        if let Some(p) = &self.output_path {
            line("output", p.display().to_string());
        }
        match &self.reference {
            ReferenceSpec::None => line("reference", "none".into()),
            ReferenceSpec::Analytic => line("reference", "analytic".into()),
            ReferenceSpec::File(p) => line("reference", p.display().to_string()),
        }
        s
    }
}

/// Shortest decimal form that parses back to the same bits.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on/off, got `{v}`")),
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got `{v}`"))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<(&str, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let key = KEYS
            .iter()
            .copied()
            .find(|k| *k == key)
            .ok_or_else(|| err(format!("unknown key `{key}`")))?;
        if let Some((_, first)) = seen.iter().find(|(k, _)| *k == key) {
            return Err(err(format!("duplicate key `{key}` (first set on line {first})")));
        }
        seen.push((key, line_no));
        if value.is_empty() && key != "output" {
            return Err(err(format!("missing value for `{key}`")));
        }

        match key {
            "scheme" => cfg.scheme = value.parse().map_err(err)?,
            "n_cells" => {
                cfg.n_cells = value
                    .parse()
                    .map_err(|_| err(format!("expected a cell count, got `{value}`")))?
            }
            "x_min" => cfg.x_min = parse_f64(value).map_err(err)?,
            "x_max" => cfg.x_max = parse_f64(value).map_err(err)?,
            "sigma0" => cfg.sigma0 = parse_f64(value).map_err(err)?,
            "initial_sampling" => cfg.initial_sampling = value.parse().map_err(err)?,
            "st" => cfg.st = parse_f64(value).map_err(err)?,
            "tau_g" => cfg.tau_g = parse_f64(value).map_err(err)?,
            "u_g" => cfg.u_g = parse_f64(value).map_err(err)?,
            "cfl" => cfg.cfl = parse_f64(value).map_err(err)?,
            "source_cap" => cfg.source_cap_enabled = parse_bool(value).map_err(err)?,
            "implicit_multiplier" => cfg.implicit_multiplier = parse_f64(value).map_err(err)?,
            "safety" => cfg.safety = parse_f64(value).map_err(err)?,
            "boundary" => cfg.boundary = value.parse().map_err(err)?,
            "t_end" => cfg.t_end = parse_f64(value).map_err(err)?,
            "snapshot_times" => {
                cfg.snapshot_times = value
                    .split(',')
                    .map(|t| parse_f64(t.trim()))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(err)?
            }
            "output" => cfg.output_path = (!value.is_empty()).then(|| PathBuf::from(value)),
            "reference" => {
                cfg.reference = match value {
                    "none" => ReferenceSpec::None,
                    "analytic" => ReferenceSpec::Analytic,
                    path => ReferenceSpec::File(PathBuf::from(path)),
                }
            }
            _ => unreachable!("key list and match arms out of sync"),
        }
    }

    if let Some(missing) = REQUIRED.iter().find(|k| !seen.iter().any(|(s, _)| s == *k)) {
        return Err(Error::Config(format!("missing required key `{missing}`")));
    }
    // range checks, reported on the line that set the offending key
    for key in KEYS {
        if let Err(message) = cfg.check_key(key) {
            let line = seen.iter().find(|(k, _)| *k == key).map(|(_, l)| *l);
            return Err(match line {
                Some(line) => Error::Parse {
                    line,
                    message: format!("{key}: {message}"),
                },
                None => Error::Config(format!("{key}: {message}")),
            });
        }
    }
    Ok(cfg)
}

/// Reads and parses a config file. A relative `reference` path is resolved
/// against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if let ReferenceSpec::File(p) = &cfg.reference {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.reference = ReferenceSpec::File(dir.join(p));
            }
        }
    }
    Ok(cfg)
}
