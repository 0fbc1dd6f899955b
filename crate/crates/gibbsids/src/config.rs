//! Plain-text experiment configurations: `[section]` headers, `key = value`
//! lines, `#` comments, space-separated arrays.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

/// Configuration problems, reported with the offending key path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("duplicate key `{0}`")]
    Duplicate(String),
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("unknown key `{0}`")]
    Unknown(String),
    #[error("unknown key `{found}` (did you mean `{expected}`?)")]
    Misspelled { found: String, expected: String },
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },
}

/// A parsed file: `section.key` (or bare `key` before any section) to its tokens.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Vec<String>>,
}

impl FromStr for RawConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |reason: &str| ConfigError::Syntax {
                line: k + 1,
                reason: reason.to_string(),
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| syntax("unterminated section header"))?.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(syntax("invalid section name"));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`"))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(syntax("invalid key"));
            }
            let tokens: Vec<String> = value.split_whitespace().map(str::to_string).collect();
            if tokens.is_empty() {
                return Err(syntax("empty value"));
            }
            let path = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if entries.insert(path.clone(), tokens).is_some() {
                return Err(ConfigError::Duplicate(path));
            }
        }
        Ok(RawConfig { entries })
    }
}

impl RawConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        text.parse()
    }

    pub fn set(&mut self, path: &str, value: &str) {
        self.entries
            .insert(path.to_string(), value.split_whitespace().map(str::to_string).collect());
    }

    pub fn get(&self, path: &str) -> Option<&[String]> {
        self.entries.get(path).map(Vec::as_slice)
    }

    /// Hex SHA-256 prefix of the canonical form: sorted paths, numbers normalized.
    pub fn hash(&self) -> String {
        let mut canonical = String::new();
        for (path, tokens) in &self.entries {
            let values: Vec<String> = tokens
                .iter()
                .map(|t| t.parse::<f64>().map_or_else(|_| t.clone(), |x| format!("{x:?}")))
                .collect();
            let _ = writeln!(canonical, "{path}={}", values.join(" "));
        }
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Typed access that records which keys were read.
    /// A key that differs from `path` only in case or separators.
    pub fn near_miss(&self, path: &str) -> Option<&str> {
        let squash = |s: &str| s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_lowercase();
        let target = squash(path);
        self.entries
            .keys()
            .find(|k| k.as_str() != path && squash(k) == target)
            .map(|k| k.as_str())
    }

    pub fn reader(&self) -> Reader<'_> {
        Reader {
            raw: self,
            used: BTreeSet::new(),
        }
    }
}

/// Typed view of a [`RawConfig`]; [`Reader::finish`] rejects keys nobody read.
pub struct Reader<'a> {
    raw: &'a RawConfig,
    used: BTreeSet<String>,
}

impl Reader<'_> {
    fn tokens(&mut self, path: &str) -> Option<&[String]> {
        let t = self.raw.get(path)?;
        self.used.insert(path.to_string());
        Some(t)
    }

    fn invalid(path: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            key: path.to_string(),
            reason: reason.into(),
        }
    }

    fn parse_one<T: FromStr>(path: &str, token: &str, what: &str) -> Result<T, ConfigError> {
        token
            .parse()
            .map_err(|_| Self::invalid(path, format!("expected {what}, found `{token}`")))
    }

    pub fn has(&self, path: &str) -> bool {
        self.raw.get(path).is_some()
    }

    pub fn opt_list<T: FromStr>(&mut self, path: &str, what: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.tokens(path) {
            None => Ok(None),
            Some(tokens) => {
                let tokens = tokens.to_vec();
                tokens.iter().map(|t| Self::parse_one(path, t, what)).collect::<Result<_, _>>().map(Some)
            }
        }
    }

    pub fn opt<T: FromStr>(&mut self, path: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.opt_list::<T>(path, what)? {
            None => Ok(None),
            Some(mut v) if v.len() == 1 => Ok(v.pop()),
            Some(_) => Err(Self::invalid(path, format!("expected a single {what}"))),
        }
    }

    pub fn req<T: FromStr>(&mut self, path: &str, what: &str) -> Result<T, ConfigError> {
        self.opt(path, what)?.ok_or_else(|| ConfigError::Missing(path.to_string()))
    }

    pub fn list<T: FromStr>(&mut self, path: &str, what: &str) -> Result<Vec<T>, ConfigError> {
        self.opt_list(path, what)?.ok_or_else(|| ConfigError::Missing(path.to_string()))
    }

    pub fn number(&mut self, path: &str) -> Result<f64, ConfigError> {
        let x: f64 = self.req(path, "a number")?;
        finite(path, x)
    }

    pub fn number_or(&mut self, path: &str, default: f64) -> Result<f64, ConfigError> {
        match self.opt::<f64>(path, "a number")? {
            Some(x) => finite(path, x),
            None => Ok(default),
        }
    }

    pub fn positive(&mut self, path: &str) -> Result<f64, ConfigError> {
        let x = self.number(path)?;
        positive(path, x)
    }

    pub fn positive_or(&mut self, path: &str, default: f64) -> Result<f64, ConfigError> {
        let x = self.number_or(path, default)?;
        positive(path, x)
    }

    pub fn count(&mut self, path: &str) -> Result<u64, ConfigError> {
        self.req(path, "a nonnegative integer")
    }

    pub fn count_or(&mut self, path: &str, default: u64) -> Result<u64, ConfigError> {
        Ok(self.opt(path, "a nonnegative integer")?.unwrap_or(default))
    }

    pub fn numbers(&mut self, path: &str) -> Result<Vec<f64>, ConfigError> {
        let v: Vec<f64> = self.list(path, "numbers")?;
        v.iter().try_for_each(|x| finite(path, *x).map(|_| ()))?;
        Ok(v)
    }

    pub fn word(&mut self, path: &str, choices: &[&str]) -> Result<String, ConfigError> {
        let w: String = self.req(path, "a word")?;
        if choices.contains(&w.as_str()) {
            Ok(w)
        } else {
            Err(Self::invalid(path, format!("expected one of {}, found `{w}`", choices.join(", "))))
        }
    }

    pub fn word_or(&mut self, path: &str, choices: &[&str], default: &str) -> Result<String, ConfigError> {
        if self.has(path) {
            self.word(path, choices)
        } else {
            Ok(default.to_string())
        }
    }

    /// Fails on any key that was never read.
    pub fn finish(self) -> Result<(), ConfigError> {
        match self.raw.entries.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(ConfigError::Unknown(k.clone())),
            None => Ok(()),
        }
    }
}

fn finite(path: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Reader::invalid(path, "must be finite"))
    }
}

fn positive(path: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Reader::invalid(path, "must be positive"))
    }
}

/// A λ grid from `sweep.lambda` or from `sweep.lambda_min/lambda_max/lambda_count`.
pub fn lambda_grid(r: &mut Reader) -> Result<Vec<f64>, ConfigError> {
    if r.has("sweep.lambda") {
        let v = r.numbers("sweep.lambda")?;
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Reader::invalid("sweep.lambda", "must be strictly increasing"));
        }
        return Ok(v);
    }
    let lo = r.number("sweep.lambda_min")?;
    let hi = r.number("sweep.lambda_max")?;
    let count: u64 = r.count("sweep.lambda_count")?;
    if count < 2 || hi <= lo {
        return Err(Reader::invalid("sweep.lambda_count", "need lambda_min < lambda_max and at least two points"));
    }
    Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
}

/// Optional `[lo, hi]` pair.
pub fn interval(r: &mut Reader, path: &str) -> Result<Option<(f64, f64)>, ConfigError> {
    match r.opt_list::<f64>(path, "numbers")? {
        None => Ok(None),
        Some(v) if v.len() == 2 && v[0] <= v[1] => Ok(Some((v[0], v[1]))),
        Some(_) => Err(Reader::invalid(path, "expected two increasing numbers")),
    }
}
