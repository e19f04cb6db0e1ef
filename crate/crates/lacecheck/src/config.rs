//! Run configuration: `lacecheck.toml`, then `LACECHECK_*` environment
//! overrides, then command-line flags.
//!
//! ```toml
//! [solver]
//! path = "z3"
//! timeout_secs = 30
//! pool = 4
//! cache_dir = ".lacecheck-cache"
//!
//! [check]
//! screg = false
//! pms = true
//! loop_unroll = 3
//! ```

use crate::obligations::Options;
use crate::solver::SolverConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

pub const CONFIG_FILE: &str = "lacecheck.toml";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: String, source: toml::de::Error },
    #[error("environment variable {name}: {msg}")]
    Env { name: String, msg: String },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSolver {
    path: Option<PathBuf>,
    timeout_secs: Option<u64>,
    pool: Option<usize>,
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCheck {
    screg: Option<bool>,
    pms: Option<bool>,
    loop_unroll: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    #[serde(default)]
    solver: FileSolver,
    #[serde(default)]
    check: FileCheck,
}

/// Everything a check run needs besides the program.
#[derive(Clone, Debug)]
pub struct Config {
    pub solver: SolverConfig,
    /// Solver processes run concurrently.
    pub pool: usize,
    pub options: Options,
}

impl Default for Config {
    fn default() -> Self {
        let pool = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
        Config { solver: SolverConfig::default(), pool, options: Options::default() }
    }
}

impl Config {
    /// Reads `path`, or `lacecheck.toml` in the working directory when
    /// present, then applies environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let file = match path {
            Some(p) => Some(p.to_path_buf()),
            None => Some(PathBuf::from(CONFIG_FILE)).filter(|p| p.exists()),
        };
        if let Some(p) = file {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| ConfigError::Io { path: p.display().to_string(), source: e })?;
            cfg.apply_toml(&text).map_err(|e| ConfigError::Toml { path: p.display().to_string(), source: e })?;
        }
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    pub fn apply_toml(&mut self, text: &str) -> Result<(), toml::de::Error> {
        let f: File = toml::from_str(text)?;
        if let Some(p) = f.solver.path {
            self.solver.path = p;
        }
        if let Some(t) = f.solver.timeout_secs {
            self.solver.timeout = Duration::from_secs(t);
        }
        if let Some(n) = f.solver.pool {
            self.pool = n.max(1);
        }
        if let Some(d) = f.solver.cache_dir {
            self.solver.cache_dir = Some(d);
        }
        if let Some(b) = f.check.screg {
            self.options.screg = b;
        }
        if let Some(b) = f.check.pms {
            self.options.pms = b;
        }
        if let Some(n) = f.check.loop_unroll {
            self.options.unroll = n;
        }
        Ok(())
    }

    /// `LACECHECK_SOLVER`, `LACECHECK_TIMEOUT` (seconds), `LACECHECK_POOL`,
    /// `LACECHECK_CACHE`.
    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        let num = |name: &str, v: String| {
            v.trim().parse::<u64>().map_err(|e| ConfigError::Env { name: name.into(), msg: e.to_string() })
        };
        if let Some(v) = get("LACECHECK_SOLVER") {
            self.solver.path = PathBuf::from(v);
        }
        if let Some(v) = get("LACECHECK_TIMEOUT") {
            self.solver.timeout = Duration::from_secs(num("LACECHECK_TIMEOUT", v)?);
        }
        if let Some(v) = get("LACECHECK_POOL") {
            self.pool = (num("LACECHECK_POOL", v)? as usize).max(1);
        }
        if let Some(v) = get("LACECHECK_CACHE") {
            self.solver.cache_dir = if v.is_empty() { None } else { Some(PathBuf::from(v)) };
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_env() {
        let mut c = Config::default();
        c.apply_toml("[solver]\ntimeout_secs = 5\npool = 2\n[check]\nscreg = true\nloop_unroll = 2\n").unwrap();
        assert_eq!(c.solver.timeout, Duration::from_secs(5));
        assert_eq!(c.pool, 2);
        assert!(c.options.screg);
        assert_eq!(c.options.unroll, 2);
        c.apply_env(|k| (k == "LACECHECK_TIMEOUT").then(|| "7".to_string())).unwrap();
        assert_eq!(c.solver.timeout, Duration::from_secs(7));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::default().apply_toml("[solver]\ntimeout = 5\n").is_err());
    }
}
