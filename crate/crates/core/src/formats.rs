//! Text formats for domains and constraint lists.
//!
//! - Domain file: one order per line, alternatives separated by single spaces,
//!   lines sorted ascending.
//! - TRS file: `a b c RULE` per line, `RULE` one of `1N1`..`3N3` or `-`.
//! - TLS file: `a1 ... ak : p1,p2,...` per line with patterns written as
//!   hyphen-separated ranks (`2-5-3-1-4`), or `-` for no law.
//!
//! Readers skip blank lines and lines starting with `#`. Writers emit LF line
//! endings and no comments.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::types::{ConstraintEntry, ConstraintList, Domain, KTuple, Law, LinearOrder, NeverRule, Pattern};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<u8>> {
    s.split_whitespace()
        .map(|t| t.parse::<u8>().map_err(|_| parse_err(line, format!("`{t}` is not an alternative"))))
        .collect()
}

pub fn write_domain(domain: &Domain) -> String {
    let mut out = String::new();
    for o in domain.orders() {
        writeln!(out, "{o}").unwrap();
    }
    out
}

/// Reads a domain file. `n` is taken from the lines; pass it explicitly to
/// read an empty file or to check the line length.
pub fn parse_domain(text: &str, n: Option<usize>) -> Result<Domain> {
    let mut orders = Vec::new();
    let mut width = n;
    for (line, s) in content_lines(text) {
        let seq = parse_numbers(line, s)?;
        let expected = *width.get_or_insert(seq.len());
        if seq.len() != expected {
            return Err(parse_err(line, format!("expected {expected} alternatives, found {}", seq.len())));
        }
        let order = LinearOrder::new(seq).map_err(|e| parse_err(line, e.to_string()))?;
        orders.push((line, order));
    }
    for w in orders.windows(2) {
        if w[0].1 == w[1].1 {
            return Err(parse_err(w[1].0, format!("duplicate order ({})", w[1].1)));
        }
    }
    let n = width.unwrap_or(0);
    let domain = Domain::new(n, orders.into_iter().map(|(_, o)| o).collect())?;
    Ok(domain)
}

pub fn write_trs(list: &ConstraintList) -> Result<String> {
    let mut out = String::new();
    for e in list.entries() {
        let rule = match &e.law {
            None => "-".to_string(),
            Some(law) => law
                .as_never_rule()
                .ok_or_else(|| Error::InvalidState(format!("law {law} on {} is not a never rule", e.tuple)))?
                .to_string(),
        };
        writeln!(out, "{} {rule}", join_tuple(&e.tuple)).unwrap();
    }
    Ok(out)
}

fn join_tuple(t: &KTuple) -> String {
    t.elements().iter().map(u8::to_string).collect::<Vec<_>>().join(" ")
}

/// Reads a TRS file over `1..=n`, keeping the file's triple order.
pub fn parse_trs(text: &str, n: usize) -> Result<ConstraintList> {
    let mut entries = Vec::new();
    for (line, s) in content_lines(text) {
        let fields: Vec<&str> = s.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(line, "expected `a b c RULE`"));
        }
        let tuple = KTuple::new(parse_numbers(line, &fields[..3].join(" "))?).map_err(|e| parse_err(line, e.to_string()))?;
        let law = match fields[3] {
            "-" => None,
            r => Some(r.parse::<NeverRule>().map_err(|e| parse_err(line, e.to_string()))?.into()),
        };
        entries.push(ConstraintEntry { tuple, law });
    }
    ConstraintList::from_entries(n, 3, entries).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_tls(list: &ConstraintList) -> String {
    let mut out = String::new();
    for e in list.entries() {
        let law = e.law.as_ref().map_or_else(|| "-".to_string(), Law::to_string);
        writeln!(out, "{} : {law}", join_tuple(&e.tuple)).unwrap();
    }
    out
}

/// Reads a TLS file over `1..=n`; the arity comes from the first line.
pub fn parse_tls(text: &str, n: usize) -> Result<ConstraintList> {
    let mut entries = Vec::new();
    let mut k = None;
    for (line, s) in content_lines(text) {
        let (tuple, laws) = s.split_once(':').ok_or_else(|| parse_err(line, "expected `a1 ... ak : patterns`"))?;
        let tuple = KTuple::new(parse_numbers(line, tuple)?).map_err(|e| parse_err(line, e.to_string()))?;
        let arity = *k.get_or_insert(tuple.arity());
        if tuple.arity() != arity {
            return Err(parse_err(line, format!("tuple {tuple} does not have arity {arity}")));
        }
        let law = match laws.trim() {
            "-" => None,
            text => {
                let patterns = text
                    .split(',')
                    .map(|p| p.trim().parse::<Pattern>().map_err(|e| parse_err(line, e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                if patterns.iter().any(|p| p.len() != arity) {
                    return Err(parse_err(line, format!("patterns must have length {arity}")));
                }
                Some(Law::new(patterns).map_err(|e| parse_err(line, e.to_string()))?)
            }
        };
        entries.push(ConstraintEntry { tuple, law });
    }
    ConstraintList::from_entries(n, k.unwrap_or(3), entries).map_err(|e| parse_err(0, e.to_string()))
}
