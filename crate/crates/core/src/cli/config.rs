//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "TORUSBLOCKS_CACHE";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

/// Tolerances that are not fixed by the identity being tested.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative KZB residual.
    pub kzb: f64,
    /// Finite-difference step in `λ` and `τ`.
    pub fd_step: f64,
    pub trace_oracle: f64,
    pub degenerate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kzb: 1e-5,
            fd_step: 1e-3,
            trace_oracle: crate::suite::TRACE_ORACLE_TOL,
            degenerate: crate::suite::DEGENERATE_TOL,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kzb", self.kzb),
            ("fd_step", self.fd_step),
            ("trace_oracle", self.trace_oracle),
            ("degenerate", self.degenerate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `κ` as a single value, a list or an inclusive range `a..b`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    One(i64),
    Many(Vec<i64>),
    Text(String),
}

impl KappaSpec {
    pub fn values(&self) -> Result<Vec<i64>> {
        match self {
            KappaSpec::One(k) => Ok(vec![*k]),
            KappaSpec::Many(v) => Ok(v.clone()),
            KappaSpec::Text(s) => parse_kappa(s),
        }
    }
}

/// `"8"`, `"4,6,8"` or `"4..12"` (inclusive).
pub fn parse_kappa(s: &str) -> Result<Vec<i64>> {
    let bad = || Error::Invalid(format!("cannot parse kappa {s:?}; use N, N,M,… or A..B"));
    let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (int(a)?, int(b.trim_start_matches('=')).map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(int).collect()
}

/// `"RE,IM"` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Invalid(format!("cannot parse complex number {s:?}; use RE,IM"));
    let f = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(f(re)?, f(im)?)),
        None => Ok(Complex64::new(f(s)?, 0.0)),
    }
}

fn complex_field<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<Complex64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Pair([f64; 2]),
        Real(f64),
        Text(String),
    }
    Ok(match Option::<Repr>::deserialize(d)? {
        None => None,
        Some(Repr::Pair([re, im])) => Some(Complex64::new(re, im)),
        Some(Repr::Real(re)) => Some(Complex64::new(re, 0.0)),
        Some(Repr::Text(s)) => Some(parse_complex(&s).map_err(serde::de::Error::custom)?),
    })
}

/// Contents of a `--config` TOML file. Every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kappa: Option<KappaSpec>,
    pub p: Option<i64>,
    pub k: Option<i64>,
    pub n: Option<i64>,
    pub backend: Option<Backend>,
    pub format: Option<Format>,
    pub cache_dir: Option<PathBuf>,
    pub level: Option<u32>,
    #[serde(default, deserialize_with = "complex_field")]
    pub lambda: Option<Complex64>,
    #[serde(default, deserialize_with = "complex_field")]
    pub tau: Option<Complex64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub kappa: Option<String>,
    pub p: Option<i64>,
    pub k: Option<i64>,
    pub n: Option<i64>,
    pub backend: Option<Backend>,
    pub format: Option<Format>,
    pub cache_dir: Option<PathBuf>,
    pub level: Option<u32>,
    pub lambda: Option<String>,
    pub tau: Option<String>,
}

/// The resolved configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub kappa: Vec<i64>,
    pub p: Option<i64>,
    pub k: Option<i64>,
    pub n: Option<i64>,
    pub backend: Backend,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub level: Option<u32>,
    pub lambda: Option<Complex64>,
    pub tau: Complex64,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Flags win over the file, the file over the environment and defaults.
    pub fn resolve(flags: Overrides, file: FileConfig, env_cache: Option<PathBuf>) -> Result<Self> {
        let kappa = match (&flags.kappa, &file.kappa) {
            (Some(s), _) => parse_kappa(s)?,
            (None, Some(k)) => k.values()?,
            (None, None) => Vec::new(),
        };
        let lambda = match flags.lambda {
            Some(s) => Some(parse_complex(&s)?),
            None => file.lambda,
        };
        let tau = match flags.tau {
            Some(s) => parse_complex(&s)?,
            None => file.tau.unwrap_or(Complex64::new(0.0, 1.0)),
        };
        let cfg = RunConfig {
            kappa,
            p: flags.p.or(file.p),
            k: flags.k.or(file.k),
            n: flags.n.or(file.n),
            backend: flags.backend.or(file.backend).unwrap_or_default(),
            format: flags.format.or(file.format).unwrap_or_default(),
            cache_dir: flags.cache_dir.or(file.cache_dir).or(env_cache),
            level: flags.level.or(file.level),
            lambda,
            tau,
            tolerances: file.tolerances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if let Some(p) = self.p {
            if p < 0 {
                return Err(Error::Invalid(format!("p must be nonnegative, got {p}")));
            }
            if let Some(&k) = self.kappa.iter().find(|&&k| k < 2 * p + 2) {
                return Err(Error::Invalid(format!("need kappa >= 2p+2, got kappa={k}, p={p}")));
            }
        }
        if let Some(&k) = self.kappa.iter().find(|&&k| k < 2) {
            return Err(Error::Invalid(format!("kappa must be at least 2, got {k}")));
        }
        if self.tau.im <= 0.0 {
            return Err(Error::Invalid(format!("tau must lie in the upper half plane, got {}", self.tau)));
        }
        Ok(())
    }

    /// The single `κ` of a command that takes one.
    pub fn one_kappa(&self) -> Result<i64> {
        match self.kappa.as_slice() {
            [k] => Ok(*k),
            [] => Err(Error::Invalid("--kappa is required".into())),
            _ => Err(Error::Invalid("this command takes a single kappa".into())),
        }
    }

    pub fn require_p(&self) -> Result<i64> {
        self.p.ok_or_else(|| Error::Invalid("--p is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> FileConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn kappa_forms() {
        assert_eq!(parse_kappa("4..7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_kappa("4..=5").unwrap(), vec![4, 5]);
        assert_eq!(parse_kappa("4, 8").unwrap(), vec![4, 8]);
        assert!(parse_kappa("8..4").is_err());
        assert!(parse_kappa("x").is_err());
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let f = file("kappa = \"4..6\"\np = 1\nformat = \"pretty\"\ntau = [0.2, 1.5]\n[tolerances]\nkzb = 1e-6\n");
        let cfg = RunConfig::resolve(Overrides::default(), f.clone(), None).unwrap();
        assert_eq!(cfg.kappa, vec![4, 5, 6]);
        assert_eq!(cfg.format, Format::Pretty);
        assert_eq!(cfg.tau, Complex64::new(0.2, 1.5));
        assert_eq!(cfg.tolerances.kzb, 1e-6);
        assert_eq!(cfg.tolerances.fd_step, 1e-3);
        assert_eq!(cfg.backend, Backend::Exact);

        let flags = Overrides {
            kappa: Some("8".into()),
            format: Some(Format::Json),
            tau: Some("0,2".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(flags, f, Some("/env".into())).unwrap();
        assert_eq!(cfg.kappa, vec![8]);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.tau, Complex64::new(0.0, 2.0));
        assert_eq!(cfg.p, Some(1));
        assert_eq!(cfg.cache_dir, Some(PathBuf::from("/env")));
    }

    #[test]
    fn rejects_bad_configs() {
        let over = |kappa: &str, p| Overrides { kappa: Some(kappa.into()), p: Some(p), ..Default::default() };
        assert!(RunConfig::resolve(over("5", 2), FileConfig::default(), None).is_err());
        assert!(RunConfig::resolve(over("6", 2), FileConfig::default(), None).is_ok());
        assert!(RunConfig::resolve(Overrides::default(), file("[tolerances]\nkzb = 0.0\n"), None).is_err());
        assert!(RunConfig::resolve(Overrides::default(), file("[tolerances]\ndegenerate = -1e-3\n"), None).is_err());
        assert!(toml::from_str::<FileConfig>("kapa = 4").is_err());
    }
}
