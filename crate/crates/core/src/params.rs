//! Training hyperparameters and their flat `key = value` config format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::embedding::Model;
use crate::error::{Error, Result};
use crate::graph::NegativeMode;

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub margin: f64,
    pub lambda_neg: f64,
    pub lambda_anc: f64,
    /// Batch size for the positive and anchor losses.
    pub b1: usize,
    /// Batch size for the negative loss.
    pub b2: usize,
    pub adam_alpha: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub iterations: usize,
    pub seed: u64,
    pub negative_mode: NegativeMode,
    /// Reconstruction rule being trained; the disk baseline ignores anchors.
    pub model: Model,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            margin: 0.01,
            lambda_neg: 8.0,
            lambda_anc: 1.0,
            b1: 10_000,
            b2: 100_000,
            adam_alpha: 0.05,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            iterations: 1000,
            seed: 0,
            negative_mode: NegativeMode::Exact,
            model: Model::Dancar,
        }
    }
}

/// Canonical config keys, in file order.
pub const KEYS: [&str; 13] = [
    "margin",
    "lambda_neg",
    "lambda_anc",
    "b1",
    "b2",
    "adam_alpha",
    "adam_beta1",
    "adam_beta2",
    "adam_eps",
    "iterations",
    "seed",
    "negative_mode",
    "model",
];

/// Maps flag-style spellings (`lambda-neg`, `alpha`, `baseline`) onto the
/// canonical key.
pub fn canonical_key(key: &str) -> Option<&'static str> {
    let key = key.trim().replace('-', "_");
    let canonical = match key.as_str() {
        "alpha" => "adam_alpha",
        "beta1" => "adam_beta1",
        "beta2" => "adam_beta2",
        "eps" => "adam_eps",
        "baseline" => "model",
        other => return KEYS.iter().copied().find(|k| *k == other),
    };
    Some(canonical)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Config {
        key: key.to_owned(),
        message: format!("cannot parse `{value}`: {e}"),
    })
}

impl Hyperparams {
    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let canonical = canonical_key(key).ok_or_else(|| Error::Config {
            key: key.to_owned(),
            message: "unknown key".into(),
        })?;
        let value = value.trim();
        match canonical {
            "margin" => self.margin = parse_value(canonical, value)?,
            "lambda_neg" => self.lambda_neg = parse_value(canonical, value)?,
            "lambda_anc" => self.lambda_anc = parse_value(canonical, value)?,
            "b1" => self.b1 = parse_value(canonical, value)?,
            "b2" => self.b2 = parse_value(canonical, value)?,
            "adam_alpha" => self.adam_alpha = parse_value(canonical, value)?,
            "adam_beta1" => self.adam_beta1 = parse_value(canonical, value)?,
            "adam_beta2" => self.adam_beta2 = parse_value(canonical, value)?,
            "adam_eps" => self.adam_eps = parse_value(canonical, value)?,
            "iterations" => self.iterations = parse_value(canonical, value)?,
            "seed" => self.seed = parse_value(canonical, value)?,
            "negative_mode" => self.negative_mode = value.parse()?,
            "model" => self.model = value.parse()?,
            _ => unreachable!("canonical key table out of sync"),
        }
        Ok(())
    }

    /// Rejects out-of-range values.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.to_owned(),
                message: message.to_owned(),
            })
        };
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !nonneg(self.margin) {
            return bad("margin", "must be finite and >= 0");
        }
        if !nonneg(self.lambda_neg) {
            return bad("lambda_neg", "must be finite and >= 0");
        }
        if !nonneg(self.lambda_anc) {
            return bad("lambda_anc", "must be finite and >= 0");
        }
        if self.b1 == 0 {
            return bad("b1", "must be >= 1");
        }
        if self.b2 == 0 {
            return bad("b2", "must be >= 1");
        }
        if !(self.adam_alpha.is_finite() && self.adam_alpha > 0.0) {
            return bad("adam_alpha", "must be > 0");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) {
            return bad("adam_beta1", "must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("adam_beta2", "must lie in [0, 1)");
        }
        if !(self.adam_eps.is_finite() && self.adam_eps > 0.0) {
            return bad("adam_eps", "must be > 0");
        }
        Ok(())
    }

    /// Renders every key, one `key = value` line each.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    fn entries(&self) -> [(&'static str, String); 13] {
        [
            ("margin", format!("{:?}", self.margin)),
            ("lambda_neg", format!("{:?}", self.lambda_neg)),
            ("lambda_anc", format!("{:?}", self.lambda_anc)),
            ("b1", self.b1.to_string()),
            ("b2", self.b2.to_string()),
            ("adam_alpha", format!("{:?}", self.adam_alpha)),
            ("adam_beta1", format!("{:?}", self.adam_beta1)),
            ("adam_beta2", format!("{:?}", self.adam_beta2)),
            ("adam_eps", format!("{:?}", self.adam_eps)),
            ("iterations", self.iterations.to_string()),
            ("seed", self.seed.to_string()),
            ("negative_mode", self.negative_mode.to_string()),
            ("model", self.model.to_string()),
        ]
    }
}

/// Parses `key = value` (or `key value`) lines; `#` starts a comment.
///
/// Keys are returned canonicalized when known, verbatim otherwise, so
/// callers can accept extra keys such as `dim`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("expected `key = value`, got `{line}`"),
                    })
                }
            },
        };
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                message: "empty key or value".into(),
            });
        }
        let key = canonical_key(key).map_or_else(|| key.replace('-', "_"), str::to_owned);
        out.insert(key, value.to_owned());
    }
    Ok(out)
}

/// Builds hyperparameters from a config map in which every canonical key
/// must be present. Unknown keys are ignored.
pub fn hyperparams_from_map(map: &BTreeMap<String, String>) -> Result<Hyperparams> {
    let mut hp = Hyperparams::default();
    for key in KEYS {
        let value = map.get(key).ok_or_else(|| Error::MissingKey(key.to_owned()))?;
        hp.set(key, value)?;
    }
    hp.validate()?;
    Ok(hp)
}
