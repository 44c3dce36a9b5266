//! `key = value` run configuration files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use painleve_ds::exact_numerics::Rational;
use painleve_ds::heisenberg::Partition;
use painleve_ds::painleve_core::SystemId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json, csv or text)")),
        }
    }
}

/// A number given on the command line: exact when written as `n` or `n/d`.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => r.to_f64(),
            Number::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Result<Rational, String> {
        match self {
            Number::Exact(r) => Ok(r.clone()),
            Number::Float(x) => Err(format!("`{x}` is not an exact rational (write it as p/q)")),
        }
    }
}

impl FromStr for Number {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Ok(r) = s.parse::<Rational>() {
            return Ok(Number::Exact(r));
        }
        match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Number::Float(x)),
            _ => Err(format!("not a number: `{}`", s.trim())),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) => r.fmt(f),
            Number::Float(x) => x.fmt(f),
        }
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse::<T>().map_err(|e| e.to_string())).collect()
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

pub fn parse_rationals(s: &str) -> Result<Vec<Rational>, String> {
    parse_list::<Rational>(s)
}

pub fn parse_partition(s: &str) -> Result<Partition, String> {
    s.parse::<Partition>().map_err(|e| e.to_string())
}

pub fn parse_system(s: &str) -> Result<SystemId, String> {
    s.parse::<SystemId>().map_err(|e| e.to_string())
}

/// Every setting a subcommand may read. Unset fields fall back to the
/// subcommand's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub partition: Option<Partition>,
    pub system: Option<SystemId>,
    pub alphas: Option<Vec<Rational>>,
    pub eta: Option<Rational>,
    pub kappas: Option<Vec<Rational>>,
    pub rhos: Option<Vec<Rational>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub word: Option<String>,
    pub point: Option<Vec<Number>>,
    pub t: Option<Number>,
    pub t_end: Option<Number>,
    pub gauge: Option<Vec<Number>>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub grid: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

pub const KEYS: &[&str] = &[
    "command",
    "partition",
    "system",
    "alphas",
    "eta",
    "kappas",
    "rhos",
    "samples",
    "seed",
    "word",
    "point",
    "t",
    "t_end",
    "gauge",
    "rtol",
    "atol",
    "residual_tol",
    "grid",
    "output",
    "format",
];

fn num<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("`{v}`: {e}"))
}

impl RunConfig {
    /// Set one key from its string value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "command" => self.command = Some(v.to_string()),
            "partition" => self.partition = Some(parse_partition(v)?),
            "system" => self.system = Some(parse_system(v)?),
            "alphas" => self.alphas = Some(parse_rationals(v)?),
            "eta" => self.eta = Some(parse_rational(v)?),
            "kappas" => self.kappas = Some(parse_rationals(v)?),
            "rhos" => self.rhos = Some(parse_rationals(v)?),
            "samples" => self.samples = Some(num(v)?),
            "seed" => self.seed = Some(num(v)?),
            "word" => self.word = Some(v.to_string()),
            "point" => self.point = Some(parse_list(v)?),
            "t" => self.t = Some(v.parse()?),
            "t_end" => self.t_end = Some(v.parse()?),
            "gauge" => self.gauge = Some(parse_list(v)?),
            "rtol" => self.rtol = Some(num(v)?),
            "atol" => self.atol = Some(num(v)?),
            "residual_tol" => self.residual_tol = Some(num(v)?),
            "grid" => self.grid = Some(num(v)?),
            "output" => self.output = Some(PathBuf::from(v)),
            "format" => self.format = Some(v.parse()?),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(mut self, over: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            command, partition, system, alphas, eta, kappas, rhos, samples, seed, word, point, t, t_end, gauge,
            rtol, atol, residual_tol, grid, output, format
        );
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Parse config text. Returns the config and one warning per duplicate key.
pub fn parse_config(text: &str) -> Result<(RunConfig, Vec<String>), ConfigError> {
    let mut cfg = RunConfig::default();
    let mut warnings = Vec::new();
    let mut seen: Vec<(String, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line, message };
        let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(err("empty key".into()));
        }
        if let Some((_, first)) = seen.iter().find(|(s, _)| *s == key) {
            warnings.push(format!("line {line}: duplicate key `{key}` (first set on line {first}); the last value wins"));
        } else {
            seen.push((key.clone(), line));
        }
        cfg.set(&key, value.trim()).map_err(err)?;
    }
    Ok((cfg, warnings))
}

#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Parse(ConfigError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => f.write_str(m),
            LoadError::Parse(e) => e.fmt(f),
        }
    }
}

pub fn load_config(path: &Path) -> Result<(RunConfig, Vec<String>), LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| LoadError::Parse(ConfigError { line: e.line, message: format!("{}: {}", path.display(), e.message) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let (cfg, w) = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert!(w.is_empty());
        let (cfg, _) = parse_config("# only a comment\n\n   \n").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn exact_alphas() {
        let (cfg, _) = parse_config("alphas = 1/6,1/6,1/6,1/6,1/6,1/6\n").unwrap();
        let a = cfg.alphas.unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a.into_iter().fold(Rational::zero(), |s, x| s + x), Rational::one());
    }

    #[test]
    fn duplicates_last_wins() {
        let (cfg, w) = parse_config("seed = 1\nsamples = 3\nseed = 9 # again\n").unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("line 3") && w[0].contains("seed"), "{w:?}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("seed = 1\n\nsamples = many\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_config("partition 3,3\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_config("# c\ncolour = red\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown key"));
        let e = parse_config("alphas = 1/0\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn numbers() {
        assert_eq!("3/4".parse::<Number>().unwrap(), Number::Exact(Rational::frac(3, 4)));
        assert_eq!("0.25".parse::<Number>().unwrap(), Number::Float(0.25));
        assert!("0.25".parse::<Number>().unwrap().exact().is_err());
        assert!("x".parse::<Number>().is_err());
        assert!("inf".parse::<Number>().is_err());
    }

    #[test]
    fn overlay_prefers_the_override() {
        let (base, _) = parse_config("seed = 1\nsamples = 5\n").unwrap();
        let over = RunConfig { seed: Some(2), ..Default::default() };
        let cfg = base.overlay(over);
        assert_eq!(cfg.seed, Some(2));
        assert_eq!(cfg.samples, Some(5));
    }

    #[test]
    fn keys_are_settable() {
        let mut cfg = RunConfig::default();
        for k in KEYS {
            assert!(!matches!(cfg.set(k, ""), Err(ref e) if e.contains("unknown key")), "{k}");
        }
    }
}
