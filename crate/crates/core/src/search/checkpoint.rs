use std::fmt::{Display, Write as _};
use std::str::FromStr;

use num_traits::Float;

use super::{Found, SearchConfig, SearchOrdering};
use crate::error::{invalid, Error, Result};
use crate::subsets::State;
use crate::types::NeverRule;

/// A paused best-first search.
///
/// Text form: the header `n=<n> k=3 ordering=<name> rules=<codes>`, then one
/// `<state-digits> <score>` line per state, frontier first (in pop order)
/// followed by the complete states already found.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<S> {
    pub n: usize,
    pub ordering: SearchOrdering,
    pub rules: Vec<NeverRule>,
    pub entries: Vec<(State, S)>,
}

impl<S: Float> Checkpoint<S> {
    pub(crate) fn new(config: &SearchConfig, entries: Vec<(State, S)>) -> Self {
        Self { n: config.n, ordering: config.ordering, rules: config.candidate_rules.clone(), entries }
    }

    pub(crate) fn check_matches(&self, config: &SearchConfig) -> Result<()> {
        if self.n != config.n || self.ordering != config.ordering || self.rules != config.candidate_rules {
            return Err(invalid(format!(
                "checkpoint (n={} ordering={} rules={}) does not match the search configuration",
                self.n,
                self.ordering,
                self.rule_codes()
            )));
        }
        Ok(())
    }

    fn rule_codes(&self) -> String {
        self.rules.iter().map(|r| r.code().to_string()).collect()
    }
}

impl<S: Float + Display> Checkpoint<S> {
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} k=3 ordering={} rules={}\n", self.n, self.ordering, self.rule_codes());
        for (state, score) in &self.entries {
            writeln!(out, "{state} {score}").unwrap();
        }
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

impl<S: Float + FromStr> Checkpoint<S> {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let (mut n, mut k, mut ordering, mut rules) = (None, None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| parse_err(1, format!("bad field `{field}`")))?;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| parse_err(1, "bad n"))?),
                "k" => k = Some(value.to_string()),
                "ordering" => ordering = Some(value.parse::<SearchOrdering>().map_err(|e| parse_err(1, e.to_string()))?),
                "rules" => {
                    rules = Some(
                        value
                            .bytes()
                            .map(|b| NeverRule::from_code(b.wrapping_sub(b'0')))
                            .collect::<Result<Vec<_>>>()
                            .map_err(|e| parse_err(1, e.to_string()))?,
                    )
                }
                _ => return Err(parse_err(1, format!("unknown field `{key}`"))),
            }
        }
        if k.as_deref() != Some("3") {
            return Err(parse_err(1, "header must declare k=3"));
        }
        let (Some(n), Some(ordering), Some(rules)) = (n, ordering, rules) else {
            return Err(parse_err(1, "header needs n, ordering and rules"));
        };
        let mut entries = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(state), Some(score), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(i + 1, "expected `<state> <score>`"));
            };
            let state: State = state.parse().map_err(|e: Error| parse_err(i + 1, e.to_string()))?;
            let score = score.parse::<S>().map_err(|_| parse_err(i + 1, format!("bad score `{score}`")))?;
            entries.push((state, score));
        }
        Ok(Self { n, ordering, rules, entries })
    }
}

/// Results file: `<state-digits> <size>` per line, in the given order.
pub fn write_results(results: &[Found]) -> String {
    let mut out = String::new();
    for (state, size) in results {
        writeln!(out, "{state} {size}").unwrap();
    }
    out
}

/// Parses a results file written by [`write_results`].
pub fn parse_results(text: &str) -> Result<Vec<Found>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let mut parts = line.split_whitespace();
            let (Some(state), Some(size), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(i + 1, "expected `<state> <size>`"));
            };
            let state = state.parse().map_err(|e: Error| parse_err(i + 1, e.to_string()))?;
            let size = size.parse().map_err(|_| parse_err(i + 1, format!("bad size `{size}`")))?;
            Ok((state, size))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{prs_search, prs_search_resumable, size_score};

    #[test]
    fn checkpoint_text_roundtrip() {
        let mut config = SearchConfig::new(4);
        config.ordering = SearchOrdering::Dynamic;
        let cp = Checkpoint::new(&config, vec![("1000".parse().unwrap(), 18.5f64), ("3467".parse().unwrap(), 9.0)]);
        let text = cp.to_text();
        assert!(text.starts_with("n=4 k=3 ordering=dynamic rules=3467\n"));
        assert_eq!(Checkpoint::<f64>::parse(&text).unwrap(), cp);
        assert!(Checkpoint::<f64>::parse("n=4 k=4 ordering=rz rules=1\n").is_err());
        assert!(Checkpoint::<f64>::parse("n=4 k=3 ordering=rz rules=1\n12 x\n").is_err());
    }

    #[test]
    fn resume_reproduces_result_set() {
        let mut config = SearchConfig::new(5);
        config.batch = 4;
        config.frontier_cap = 40;
        let whole = prs_search(&config, size_score::<f64>).unwrap();
        let paused = prs_search_resumable(&config, size_score::<f64>, None, Some(5)).unwrap();
        let cp = paused.checkpoint.expect("paused before the end");
        let reread = Checkpoint::<f64>::parse(&cp.to_text()).unwrap();
        let resumed = prs_search_resumable(&config, size_score::<f64>, Some(&reread), None).unwrap();
        assert_eq!(resumed.results, whole.results);

        let other = SearchConfig::new(6);
        assert!(prs_search_resumable(&other, size_score::<f64>, Some(&reread), None).is_err());
    }

    #[test]
    fn results_roundtrip() {
        let results = vec![("3467".parse().unwrap(), 9), ("1111".parse().unwrap(), 4)];
        let text = write_results(&results);
        assert_eq!(text, "3467 9\n1111 4\n");
        assert_eq!(parse_results(&text).unwrap(), results);
    }
}
