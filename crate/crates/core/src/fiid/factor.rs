//! Radius-`r` block factors and the built-in rule catalogue.
//!
//! A block factor decides the symbol at `v` from the labelled ball of radius
//! `r` around `v`. Every rule here depends on that ball only through its
//! distances and labels, which makes it equivariant by construction;
//! [`BlockFactor::eval_ball`] is the reference definition and
//! [`apply_factor`] the whole-graph evaluation, and the two are checked
//! against each other in tests.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::LabelField;
use crate::error::{Error, Result};
use crate::graph::{Graph, RootedBall, VertexSet};

pub type Symbol = u8;

const BINARY: &[&str] = &["closed", "open"];
const COLOURS: &[&str] = &["0", "1"];
const RED_BLUE: &[&str] = &["none", "red", "blue"];

#[derive(Clone, Debug, PartialEq)]
enum Rule {
    BernoulliThreshold { p: f64 },
    RedBlue,
    BallUnion { radius: usize, p_seed: f64 },
    LocalMinForest { radius: usize },
    TwoColourThreshold { t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ParamKind {
    Probability,
    Radius,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub rule_id: &'static str,
    /// `None` when the radius is the `r` parameter.
    pub fixed_radius: Option<usize>,
    pub params: &'static [ParamSpec],
    pub alphabet: &'static [&'static str],
    pub description: &'static str,
}

const P: ParamSpec = ParamSpec {
    name: "p",
    kind: ParamKind::Probability,
    default: 0.5,
};
const T: ParamSpec = ParamSpec {
    name: "t",
    kind: ParamKind::Probability,
    default: 0.5,
};
const R: ParamSpec = ParamSpec {
    name: "r",
    kind: ParamKind::Radius,
    default: 1.0,
};
const P_SEED: ParamSpec = ParamSpec {
    name: "p_seed",
    kind: ParamKind::Probability,
    default: 0.05,
};

pub fn builtin_factor_catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            rule_id: "bernoulli_threshold",
            fixed_radius: Some(0),
            params: &[P],
            alphabet: BINARY,
            description: "open iff U_v <= p",
        },
        CatalogEntry {
            rule_id: "red_blue",
            fixed_radius: Some(0),
            params: &[],
            alphabet: RED_BLUE,
            description: "red iff U_v <= 1/2, blue iff U_v >= 3/5, otherwise none",
        },
        CatalogEntry {
            rule_id: "ball_union",
            fixed_radius: None,
            params: &[R, P_SEED],
            alphabet: BINARY,
            description: "open iff some label within distance r is <= p_seed",
        },
        CatalogEntry {
            rule_id: "local_min_forest",
            fixed_radius: None,
            params: &[R],
            alphabet: BINARY,
            description: "open iff U_v is not the largest label within distance r",
        },
        CatalogEntry {
            rule_id: "two_colour_threshold",
            fixed_radius: Some(0),
            params: &[T],
            alphabet: COLOURS,
            description: "colour 1 iff U_v <= t",
        },
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockFactor {
    rule: Rule,
}

impl BlockFactor {
    /// Builds a registered rule. Missing parameters take their catalogue
    /// default; unknown names and out-of-range values are errors.
    pub fn new(rule_id: &str, params: &[(&str, f64)]) -> Result<Self> {
        let entry = builtin_factor_catalog()
            .into_iter()
            .find(|e| e.rule_id == rule_id)
            .ok_or_else(|| Error::UnknownRule(rule_id.to_string()))?;
        for (name, _) in params {
            if !entry.params.iter().any(|p| p.name == *name) {
                return Err(Error::invalid(format!(
                    "rule {rule_id} has no parameter `{name}`"
                )));
            }
        }
        let get = |spec: &ParamSpec| -> Result<f64> {
            let value = params
                .iter()
                .rev()
                .find(|(n, _)| *n == spec.name)
                .map_or(spec.default, |&(_, v)| v);
            match spec.kind {
                ParamKind::Probability if !(0.0..=1.0).contains(&value) => Err(Error::invalid(
                    format!("{} = {value} is not a probability", spec.name),
                )),
                ParamKind::Radius if value < 0.0 || value.fract() != 0.0 || value > 64.0 => Err(
                    Error::invalid(format!("{} = {value} is not a radius", spec.name)),
                ),
                _ => Ok(value),
            }
        };
        let rule = match rule_id {
            "bernoulli_threshold" => Rule::BernoulliThreshold { p: get(&P)? },
            "red_blue" => Rule::RedBlue,
            "ball_union" => Rule::BallUnion {
                radius: get(&R)? as usize,
                p_seed: get(&P_SEED)?,
            },
            "local_min_forest" => Rule::LocalMinForest {
                radius: get(&R)? as usize,
            },
            "two_colour_threshold" => Rule::TwoColourThreshold { t: get(&T)? },
            _ => unreachable!("catalogue and constructor disagree"),
        };
        Ok(BlockFactor { rule })
    }

    /// Parses `rule_id` or `rule_id:key=val,key=val`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (id, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = Vec::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got `{item}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad number in `{item}`")))?;
            params.push((k.trim(), v));
        }
        Self::new(id.trim(), &params)
    }

    pub fn rule_id(&self) -> &'static str {
        match self.rule {
            Rule::BernoulliThreshold { .. } => "bernoulli_threshold",
            Rule::RedBlue => "red_blue",
            Rule::BallUnion { .. } => "ball_union",
            Rule::LocalMinForest { .. } => "local_min_forest",
            Rule::TwoColourThreshold { .. } => "two_colour_threshold",
        }
    }

    pub fn radius(&self) -> usize {
        match self.rule {
            Rule::BallUnion { radius, .. } | Rule::LocalMinForest { radius } => radius,
            _ => 0,
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.rule {
            Rule::BernoulliThreshold { p } => vec![("p", p)],
            Rule::RedBlue => vec![],
            Rule::BallUnion { radius, p_seed } => vec![("r", radius as f64), ("p_seed", p_seed)],
            Rule::LocalMinForest { radius } => vec![("r", radius as f64)],
            Rule::TwoColourThreshold { t } => vec![("t", t)],
        }
    }

    pub fn alphabet(&self) -> &'static [&'static str] {
        match self.rule {
            Rule::RedBlue => RED_BLUE,
            Rule::TwoColourThreshold { .. } => COLOURS,
            _ => BINARY,
        }
    }

    /// Looks a symbol up by name or by index.
    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        let alphabet = self.alphabet();
        if let Some(i) = alphabet.iter().position(|s| *s == name) {
            return Ok(i as Symbol);
        }
        match name.parse::<usize>() {
            Ok(i) if i < alphabet.len() => Ok(i as Symbol),
            _ => Err(Error::invalid(format!(
                "rule {} has no symbol `{name}` (alphabet {:?})",
                self.rule_id(),
                alphabet
            ))),
        }
    }

    /// The reference definition: the symbol at the root of a labelled ball.
    pub fn eval_ball(&self, ball: &RootedBall) -> Symbol {
        let labels = ball
            .labels
            .as_ref()
            .expect("block factors read vertex labels");
        let within = |r: usize| {
            labels
                .iter()
                .zip(&ball.distance)
                .filter(move |(_, &d)| d <= r)
                .map(|(&u, _)| u)
        };
        let u = labels[0];
        match self.rule {
            Rule::BernoulliThreshold { p } => Symbol::from(u <= p),
            Rule::TwoColourThreshold { t } => Symbol::from(u <= t),
            Rule::RedBlue => red_blue(u),
            Rule::BallUnion { radius, p_seed } => Symbol::from(within(radius).any(|x| x <= p_seed)),
            Rule::LocalMinForest { radius } => Symbol::from(within(radius).any(|x| x > u)),
        }
    }
}

impl fmt::Display for BlockFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule_id())?;
        let params = self.params();
        for (i, (k, v)) in params.iter().enumerate() {
            let sep = if i == 0 { ':' } else { ',' };
            write!(f, "{sep}{k}={v}")?;
        }
        Ok(())
    }
}

#[inline]
fn red_blue(u: f64) -> Symbol {
    if u <= 0.5 {
        1
    } else if u >= 0.6 {
        2
    } else {
        0
    }
}

/// Output of a block factor on a whole graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub symbols: Vec<Symbol>,
    pub factor: BlockFactor,
    pub label_seed: u64,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn indicator(&self, symbol: Symbol) -> Vec<bool> {
        self.symbols.iter().map(|&s| s == symbol).collect()
    }

    pub fn support(&self, symbol: Symbol) -> VertexSet {
        VertexSet::from_indicator(self.indicator(symbol))
    }

    pub fn count(&self, symbol: Symbol) -> usize {
        self.symbols.iter().filter(|&&s| s == symbol).count()
    }
}

/// Evaluates `factor` at every vertex.
pub fn apply_factor(g: &Graph, field: &LabelField, factor: &BlockFactor) -> Result<Configuration> {
    if field.len() != g.n() {
        return Err(Error::invalid(format!(
            "label field has {} entries for {} vertices",
            field.len(),
            g.n()
        )));
    }
    let u = &field.labels;
    let symbols: Vec<Symbol> = match factor.rule {
        Rule::BernoulliThreshold { p } => u.par_iter().map(|&x| Symbol::from(x <= p)).collect(),
        Rule::TwoColourThreshold { t } => u.par_iter().map(|&x| Symbol::from(x <= t)).collect(),
        Rule::RedBlue => u.par_iter().map(|&x| red_blue(x)).collect(),
        Rule::BallUnion { radius, p_seed } => {
            let m = propagate(g, u, radius, f64::min);
            m.par_iter().map(|&x| Symbol::from(x <= p_seed)).collect()
        }
        Rule::LocalMinForest { radius } => {
            let m = propagate(g, u, radius, f64::max);
            m.par_iter()
                .zip(u.par_iter())
                .map(|(&x, &own)| Symbol::from(x > own))
                .collect()
        }
    };
    Ok(Configuration {
        symbols,
        factor: factor.clone(),
        label_seed: field.seed,
    })
}

/// `rounds` steps of neighbourhood aggregation: afterwards entry `v` is the
/// fold of all labels within distance `rounds` of `v`.
fn propagate(g: &Graph, labels: &[f64], rounds: usize, op: fn(f64, f64) -> f64) -> Vec<f64> {
    let mut cur = labels.to_vec();
    for _ in 0..rounds {
        cur = (0..g.n())
            .into_par_iter()
            .map(|v| {
                g.neighbours(v)
                    .iter()
                    .fold(cur[v], |acc, &w| op(acc, cur[w as usize]))
            })
            .collect();
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiid::sample_labels;
    use crate::graph::{ball, generate_configuration_model};

    #[test]
    fn parse_and_display() {
        let f = BlockFactor::parse("ball_union:r=2,p_seed=0.1").unwrap();
        assert_eq!(f.radius(), 2);
        assert_eq!(f.to_string(), "ball_union:r=2,p_seed=0.1");
        assert_eq!(BlockFactor::parse(&f.to_string()).unwrap(), f);
        assert_eq!(
            BlockFactor::parse("red_blue").unwrap().to_string(),
            "red_blue"
        );
        assert_eq!(BlockFactor::parse("local_min_forest").unwrap().radius(), 1);
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            BlockFactor::parse("nope"),
            Err(Error::UnknownRule(_))
        ));
        assert!(BlockFactor::parse("bernoulli_threshold:p=1.5").is_err());
        assert!(BlockFactor::parse("bernoulli_threshold:p=-0.1").is_err());
        assert!(BlockFactor::parse("ball_union:r=1.5").is_err());
        assert!(BlockFactor::parse("ball_union:q=1").is_err());
        assert!(BlockFactor::parse("ball_union:r").is_err());
    }

    #[test]
    fn red_blue_boundaries() {
        assert_eq!(red_blue(0.0), 1);
        assert_eq!(red_blue(0.5), 1);
        assert_eq!(red_blue(0.55), 0);
        assert_eq!(red_blue(0.6), 2);
        assert_eq!(red_blue(1.0), 2);
    }

    #[test]
    fn symbols_by_name_or_index() {
        let f = BlockFactor::parse("red_blue").unwrap();
        assert_eq!(f.symbol("blue").unwrap(), 2);
        assert_eq!(f.symbol("1").unwrap(), 1);
        assert!(f.symbol("green").is_err());
    }

    #[test]
    fn whole_graph_evaluation_matches_ball_definition() {
        let g = generate_configuration_model(3000, 4, 1).unwrap();
        let field = sample_labels(&g, 2);
        for spec in [
            "bernoulli_threshold:p=0.3",
            "red_blue",
            "ball_union:r=2,p_seed=0.05",
            "local_min_forest:r=2",
            "two_colour_threshold:t=0.7",
        ] {
            let f = BlockFactor::parse(spec).unwrap();
            let c = apply_factor(&g, &field, &f).unwrap();
            for v in (0..g.n()).step_by(37) {
                let b = ball(&g, Some(&field.labels), v, f.radius());
                assert_eq!(c.symbols[v], f.eval_ball(&b), "{spec} at {v}");
            }
        }
    }
}
