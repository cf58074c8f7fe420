//! Edge-list text format.
//!
//! ```text
//! n d [labelled]
//! u v [tag]
//! ...
//! ```
//!
//! `d` is the common degree (the maximum degree for irregular graphs). Tags
//! name the half-edge at `u`: `g1`, `g1inv`, `g2`, ... Lines starting with `#`
//! and blank lines are ignored. Edge order is significant: it fixes the
//! half-edge order at every vertex, so reading back a written graph gives the
//! same graph.

use std::io::{BufRead, Write};

use super::{Graph, Tag};
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    let d = g.regular_degree().unwrap_or_else(|| g.max_degree());
    if g.is_labelled() {
        writeln!(out, "{} {} labelled", g.n(), d)?;
    } else {
        writeln!(out, "{} {}", g.n(), d)?;
    }
    match g.edge_tags() {
        Some(tags) => {
            for (&[u, v], t) in g.edges().iter().zip(tags) {
                writeln!(out, "{u} {v} {t}")?;
            }
        }
        None => {
            for &[u, v] in g.edges() {
                writeln!(out, "{u} {v}")?;
            }
        }
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut header: Option<(usize, usize, bool)> = None;
    let mut edges = Vec::new();
    let mut tags = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let number = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("expected an integer, got `{s}`")))
        };
        match header {
            None => {
                let labelled = match fields.as_slice() {
                    [_, _] => false,
                    [_, _, "labelled"] => true,
                    _ => return Err(Error::parse(lineno, "header must be `n d [labelled]`")),
                };
                header = Some((
                    number(fields[0])? as usize,
                    number(fields[1])? as usize,
                    labelled,
                ));
            }
            Some((n, _, labelled)) => {
                let expected = if labelled { 3 } else { 2 };
                if fields.len() != expected {
                    return Err(Error::parse(lineno, format!("expected {expected} fields")));
                }
                let (u, v) = (number(fields[0])?, number(fields[1])?);
                if u >= n as u64 || v >= n as u64 {
                    return Err(Error::parse(lineno, "vertex index out of range"));
                }
                edges.push([u as u32, v as u32]);
                if labelled {
                    tags.push(
                        fields[2]
                            .parse::<Tag>()
                            .map_err(|e| Error::parse(lineno, e.to_string()))?,
                    );
                }
            }
        }
    }
    let (n, d, labelled) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
    let g = if labelled {
        Graph::from_tagged_edges(n, edges, tags)?
    } else {
        Graph::from_edges(n, edges)?
    };
    let actual = g.regular_degree().unwrap_or_else(|| g.max_degree());
    if actual != d {
        return Err(Error::parse(
            1,
            format!("header says d = {d}, edges give {actual}"),
        ));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_configuration_model, generate_permutation_model};

    fn round_trip(g: &Graph) -> Graph {
        let mut buf = Vec::new();
        write_edge_list(g, &mut buf).unwrap();
        read_edge_list(buf.as_slice()).unwrap()
    }

    #[test]
    fn round_trips() {
        let g = generate_configuration_model(50, 3, 2).unwrap();
        assert_eq!(round_trip(&g), g);
        let g = generate_permutation_model(30, 3, 4).unwrap();
        assert_eq!(round_trip(&g), g);
    }

    #[test]
    fn format_is_plain_text() {
        let g = generate_permutation_model(1, 1, 0).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 2 labelled\n0 0 g1\n");
    }

    #[test]
    fn bad_input() {
        assert!(read_edge_list("3 2\n0 1\n1 7\n".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1 g1\n".as_bytes()).is_err());
        assert!(read_edge_list("2 3\n0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("".as_bytes()).is_err());
    }
}
