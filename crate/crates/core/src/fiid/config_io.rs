//! Run-length encoded configurations.
//!
//! ```text
//! config rule_id=ball_union params=r=2,p_seed=0.05 radius=2 seed=7 n=12
//! 0 5
//! 1 3
//! 0 4
//! ```
//!
//! Each body line is `symbol count`; counts sum to `n`.

use std::io::{BufRead, Write};

use super::{BlockFactor, Configuration, Symbol};
use crate::error::{Error, Result};

pub fn write_configuration<W: Write>(c: &Configuration, mut out: W) -> std::io::Result<()> {
    let params: Vec<String> = c
        .factor
        .params()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    writeln!(
        out,
        "config rule_id={} params={} radius={} seed={} n={}",
        c.factor.rule_id(),
        params.join(","),
        c.factor.radius(),
        c.label_seed,
        c.len()
    )?;
    let mut i = 0;
    while i < c.symbols.len() {
        let s = c.symbols[i];
        let run = c.symbols[i..].iter().take_while(|&&x| x == s).count();
        writeln!(out, "{s} {run}")?;
        i += run;
    }
    Ok(())
}

pub fn read_configuration<R: BufRead>(input: R) -> Result<Configuration> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let header = header.map_err(|e| Error::parse(1, e.to_string()))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("config") {
        return Err(Error::parse(1, "header must start with `config`"));
    }
    let mut rule_id = None;
    let mut params = String::new();
    let mut radius = None;
    let mut seed = None;
    let mut n = None;
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("bad header field `{f}`")))?;
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::parse(1, format!("bad integer `{s}`")))
        };
        match k {
            "rule_id" => rule_id = Some(v.to_string()),
            "params" => params = v.to_string(),
            "radius" => radius = Some(int(v)? as usize),
            "seed" => seed = Some(int(v)?),
            "n" => n = Some(int(v)? as usize),
            _ => return Err(Error::parse(1, format!("unknown header field `{k}`"))),
        }
    }
    let missing = |what: &str| Error::parse(1, format!("header lacks {what}"));
    let rule_id = rule_id.ok_or_else(|| missing("rule_id"))?;
    let factor = if params.is_empty() {
        BlockFactor::parse(&rule_id)?
    } else {
        BlockFactor::parse(&format!("{rule_id}:{params}"))?
    };
    if radius.ok_or_else(|| missing("radius"))? != factor.radius() {
        return Err(Error::parse(1, "radius disagrees with the rule parameters"));
    }
    let seed = seed.ok_or_else(|| missing("seed"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let alphabet = factor.alphabet().len();
    let mut symbols = Vec::with_capacity(n);
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let (s, k) = line
            .trim()
            .split_once(' ')
            .ok_or_else(|| Error::parse(lineno, "expected `symbol count`"))?;
        let s: Symbol = s.parse().map_err(|_| Error::parse(lineno, "bad symbol"))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, "bad count"))?;
        if s as usize >= alphabet {
            return Err(Error::parse(lineno, format!("symbol {s} outside alphabet")));
        }
        if symbols.len() + k > n {
            return Err(Error::parse(lineno, "runs exceed n"));
        }
        symbols.extend(std::iter::repeat_n(s, k));
    }
    if symbols.len() != n {
        return Err(Error::parse(
            0,
            format!("runs cover {} of {n} vertices", symbols.len()),
        ));
    }
    Ok(Configuration {
        symbols,
        factor,
        label_seed: seed,
    })
}
