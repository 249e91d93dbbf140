use super::KPartiteHypergraph;
use crate::error::{Error, Result};

/// Parses a hypergraph from the text format or its JSON equivalent.
///
/// Text layout: a `k m` header, a line of `k` partition sizes, then `m` lines
/// of `k` zero-based vertex indices. Lines starting with `#` are comments.
/// Input whose first non-blank character is `{` is read as JSON with keys
/// `k`, `partition_sizes` and `edges`.
pub fn parse_hypergraph(text: &str) -> Result<KPartiteHypergraph> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()));
    }

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `k m` header"))?;
    let header = parse_numbers(header_line, header)?;
    let [k, m] = header[..] else {
        return Err(Error::parse(header_line, "header must be `k m`"));
    };
    if k == 0 {
        return Err(Error::parse(header_line, "k must be at least 1"));
    }

    let (sizes_line, sizes) = lines
        .next()
        .ok_or_else(|| Error::parse(header_line + 1, "missing partition sizes line"))?;
    let sizes = parse_numbers(sizes_line, sizes)?;
    if sizes.len() != k {
        return Err(Error::parse(
            sizes_line,
            format!("expected {k} partition sizes, found {}", sizes.len()),
        ));
    }
    if let Some(i) = sizes.iter().position(|&n| n == 0) {
        return Err(Error::parse(
            sizes_line,
            format!("partition {i} has size 0"),
        ));
    }

    let mut edges = Vec::with_capacity(m);
    let mut last_line = sizes_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if edges.len() == m {
            return Err(Error::parse(
                line_no,
                format!("more edge lines than the declared m = {m}"),
            ));
        }
        let edge = parse_numbers(line_no, line)?;
        if edge.len() != k {
            return Err(Error::parse(
                line_no,
                format!("edge has {} components, expected {k}", edge.len()),
            ));
        }
        for (i, (&v, &n)) in edge.iter().zip(&sizes).enumerate() {
            if v >= n {
                return Err(Error::parse(
                    line_no,
                    format!("component {i} index {v} out of range [0, {n})"),
                ));
            }
        }
        edges.push(edge);
    }
    if edges.len() != m {
        return Err(Error::parse(
            last_line,
            format!("declared m = {m} but found {} edge lines", edges.len()),
        ));
    }
    KPartiteHypergraph::new(sizes, edges)
}

fn parse_numbers(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| {
                Error::parse(line_no, format!("`{tok}` is not a non-negative integer"))
            })
        })
        .collect()
}
