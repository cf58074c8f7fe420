//! Experiment descriptions and the config-file grammar.
//!
//! ```text
//! # comment
//! name = exp-redblue-pc
//! seeds = 0, 1, 2, 3
//! replicas = 2
//!
//! [graph]
//! model = configuration
//! n = 1000000
//! d = 4
//!
//! [factor]
//! specs = red_blue
//!
//! [params]
//! threshold = 0.05
//! ```
//!
//! Keys outside a section belong to the experiment itself. Every key in
//! `[params]` is passed through to the experiment as a string and checked
//! there.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use fiid_perc::fiid::BlockFactor;
use fiid_perc::graph::{generate_configuration_model, generate_permutation_model, Graph};
use ini::Ini;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::exit::{invalid, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Configuration,
    Permutation,
}

impl FromStr for Model {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        match s {
            "configuration" => Ok(Model::Configuration),
            "permutation" => Ok(Model::Permutation),
            other => Err(invalid(format!("unknown graph model `{other}`"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Configuration => "configuration",
            Model::Permutation => "permutation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSpec {
    pub model: Model,
    pub n: usize,
    /// Degree; the permutation model uses `d / 2` permutations.
    pub d: usize,
}

impl GraphSpec {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.n < 2 {
            return Err(invalid(format!("n = {} is too small", self.n)));
        }
        if self.d == 0 {
            return Err(invalid("degree must be positive"));
        }
        if self.n > u32::MAX as usize {
            return Err(invalid(format!(
                "n = {} exceeds the vertex index range",
                self.n
            )));
        }
        match self.model {
            Model::Configuration if (self.n * self.d) % 2 == 1 => {
                Err(invalid(format!("n * d = {} is odd", self.n * self.d)))
            }
            Model::Permutation if self.d % 2 == 1 => Err(invalid(format!(
                "permutation model needs an even degree, got {}",
                self.d
            ))),
            _ => Ok(()),
        }
    }

    pub fn build(&self, seed: u64) -> Result<Graph> {
        let g = match self.model {
            Model::Configuration => generate_configuration_model(self.n, self.d, seed)?,
            Model::Permutation => generate_permutation_model(self.n, self.d / 2, seed)?,
        };
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub graph: GraphSpec,
    /// Factor specs in `rule_id:key=val,...` form; empty means the
    /// experiment's default list.
    pub factors: Vec<String>,
    pub statistics: Vec<String>,
    pub seeds: Vec<u64>,
    pub replicas: usize,
    pub output: Option<PathBuf>,
    pub params: BTreeMap<String, String>,
}

impl ExperimentSpec {
    pub fn new(name: &str) -> Self {
        ExperimentSpec {
            name: name.to_string(),
            graph: GraphSpec {
                model: Model::Configuration,
                n: 100_000,
                d: 4,
            },
            factors: Vec::new(),
            statistics: Vec::new(),
            seeds: vec![0],
            replicas: 1,
            output: None,
            params: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| invalid(e.to_string()))?;
        let general = ini.general_section();
        let name = general
            .get("name")
            .ok_or_else(|| invalid("config needs a `name`"))?;
        let mut spec = ExperimentSpec::new(name);
        for (section, props) in ini.iter() {
            for (key, value) in props.iter() {
                spec.set(section, key, value)?;
            }
        }
        Ok(spec)
    }

    /// Applies a `key=value` or `section.key=value` override.
    pub fn override_with(&mut self, item: &str) -> Result<(), Failure> {
        let (path, value) = item
            .split_once('=')
            .ok_or_else(|| invalid(format!("expected key=value, got `{item}`")))?;
        let (section, key) = match path.trim().split_once('.') {
            Some((s, k)) => (Some(s), k),
            None => (None, path.trim()),
        };
        self.set(section, key, value.trim())
    }

    fn set(&mut self, section: Option<&str>, key: &str, value: &str) -> Result<(), Failure> {
        match (section, key) {
            (None, "name") => self.name = value.to_string(),
            (None, "seeds") => self.seeds = parse_list(key, value)?,
            (None, "replicas") => self.replicas = parse_value(key, value)?,
            (None, "output") => self.output = Some(PathBuf::from(value)),
            (None, "statistics") => self.statistics = split_list(value),
            (Some("graph"), "model") => self.graph.model = value.parse()?,
            (Some("graph"), "n") => self.graph.n = parse_value(key, value)?,
            (Some("graph"), "d") => self.graph.d = parse_value(key, value)?,
            (Some("graph"), "k") => self.graph.d = 2 * parse_value::<usize>(key, value)?,
            (Some("factor"), "specs") => self.factors = split_factor_list(value),
            (Some("params"), _) => {
                self.params.insert(key.to_string(), value.to_string());
            }
            (s, _) => {
                return Err(invalid(format!(
                    "unknown key `{key}` in section [{}]",
                    s.unwrap_or("")
                )))
            }
        }
        Ok(())
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<(), Failure> {
        crate::experiments::lookup(&self.name)?;
        self.graph.validate()?;
        if self.seeds.is_empty() {
            return Err(invalid("at least one seed is needed"));
        }
        if self.replicas == 0 {
            return Err(invalid("replicas must be at least 1"));
        }
        for f in &self.factors {
            BlockFactor::parse(f).map_err(|e| invalid(format!("factor `{f}`: {e}")))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serialises");
        hex(&Sha256::digest(&json))
    }

    pub fn param<T: FromStr>(&self, key: &str, default: T) -> Result<T, Failure> {
        match self.params.get(key) {
            Some(v) => parse_value(key, v),
            None => Ok(default),
        }
    }

    pub fn param_list<T: FromStr + Clone>(
        &self,
        key: &str,
        default: &[T],
    ) -> Result<Vec<T>, Failure> {
        match self.params.get(key) {
            Some(v) => parse_list(key, v),
            None => Ok(default.to_vec()),
        }
    }

    /// The configured factors, or `default` when none were given.
    pub fn factors_or(&self, default: &[&str]) -> Vec<BlockFactor> {
        let list: Vec<String> = if self.factors.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.factors.clone()
        };
        list.iter()
            .map(|f| BlockFactor::parse(f).expect("factor specs are validated up front"))
            .collect()
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, Failure> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("cannot parse `{value}` for `{key}`")))
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, Failure> {
    split_list(value)
        .iter()
        .map(|v| parse_value(key, v))
        .collect()
}

/// Factor lists are separated by `;` because factor specs contain commas.
fn split_factor_list(value: &str) -> Vec<String> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}
