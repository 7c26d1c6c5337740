//! Regression suites run by `cdomain verify`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use cdomain::domain::size_par;
use cdomain::orderings::{alternating_trs, init_by_scheme, init_tuples, TupleOrdering};
use cdomain::{ConstraintList, KTuple, LinearOrder, Pattern};

const OEIS_FIXTURES: [(&str, &str); 3] = [
    ("A022558", include_str!("../../../fixtures/oeis/A022558.txt")),
    ("A061552", include_str!("../../../fixtures/oeis/A061552.txt")),
    ("A005802", include_str!("../../../fixtures/oeis/A005802.txt")),
];

const ALTERNATING_SIZES: [(usize, u64); 4] = [(8, 222), (9, 488), (10, 1069), (11, 2324)];

/// Largest `n` for which suites fall back to enumerating all `n!` orders.
pub const BRUTE_FORCE_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub expected: u64,
    pub got: u64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.got
    }

    pub fn line(&self) -> String {
        if self.passed() {
            format!("PASS {}: {}", self.label, self.got)
        } else {
            format!("FAIL {}: expected {}, got {}", self.label, self.expected, self.got)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeisFixture {
    pub id: String,
    pub pattern: Pattern,
    /// Terms from `n = 0`.
    pub terms: Vec<u64>,
}

pub fn parse_fixture(id: &str, text: &str) -> Result<OeisFixture> {
    let mut pattern = None;
    let mut terms = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(p) = line.strip_prefix("pattern ") {
            pattern = Some(p.trim().parse::<Pattern>()?);
        } else {
            terms = Some(
                line.split(',')
                    .map(|t| t.trim().parse::<u64>().with_context(|| format!("{id}: bad term `{t}`")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    }
    let (Some(pattern), Some(terms)) = (pattern, terms) else {
        bail!("{id}: fixture needs a pattern line and a terms line");
    };
    Ok(OeisFixture { id: id.to_string(), pattern, terms })
}

/// The vendored fixtures, or every `*.txt` file of `dir` when given.
pub fn oeis_fixtures(dir: Option<&Path>) -> Result<Vec<OeisFixture>> {
    let Some(dir) = dir else {
        return OEIS_FIXTURES.iter().map(|(id, text)| parse_fixture(id, text)).collect();
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "txt"));
    paths.sort();
    if paths.is_empty() {
        bail!("no .txt fixtures in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let id = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            parse_fixture(&id, &fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?)
        })
        .collect()
}

/// Every tuple of `1..=n` of the pattern's length forbids `pattern`.
pub fn avoidance_list(n: usize, pattern: &Pattern) -> Result<ConstraintList> {
    let base = init_tuples(n, pattern.len(), TupleOrdering::Lex)?;
    Ok(init_by_scheme(&base, |_: &KTuple| Ok::<_, cdomain::Error>(pattern.clone()))?)
}

/// Is some subsequence of `word` order-isomorphic to `pattern`?
pub fn contains_pattern(word: &[u8], pattern: &[u8]) -> bool {
    fn go(word: &[u8], pattern: &[u8], start: usize, chosen: &mut Vec<u8>) -> bool {
        let j = chosen.len();
        if j == pattern.len() {
            return true;
        }
        for i in start..=word.len() - (pattern.len() - j) {
            let x = word[i];
            if chosen.iter().zip(pattern).all(|(&y, &p)| (y < x) == (p < pattern[j])) {
                chosen.push(x);
                if go(word, pattern, i + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    pattern.len() <= word.len() && go(word, pattern, 0, &mut Vec::new())
}

/// Counts the orders of `1..=n` avoiding `pattern` by checking all of them.
pub fn brute_force_avoiders(n: usize, pattern: &Pattern) -> u64 {
    LinearOrder::all(n).iter().filter(|o| !contains_pattern(o.as_slice(), pattern.as_slice())).count() as u64
}

fn catalan(n: usize) -> u64 {
    (0..n as u64).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

pub fn catalan_suite(max_n: usize, jobs: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for pattern in Pattern::all(3) {
        for n in 1..=max_n {
            let got = size_par(&avoidance_list(n, &pattern)?, jobs)?;
            checks.push(Check { label: format!("avoid {pattern} n={n}"), expected: catalan(n), got });
            if n <= BRUTE_FORCE_MAX_N {
                checks.push(Check {
                    label: format!("avoid {pattern} n={n} brute force"),
                    expected: brute_force_avoiders(n, &pattern),
                    got,
                });
            }
        }
    }
    Ok(checks)
}

pub fn length4_suite(max_n: usize, jobs: usize, fixtures: Option<&Path>) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for fixture in oeis_fixtures(fixtures)? {
        if max_n >= fixture.terms.len() {
            bail!("{} has terms only up to n={}", fixture.id, fixture.terms.len() - 1);
        }
        for n in 1..=max_n {
            let got = size_par(&avoidance_list(n, &fixture.pattern)?, jobs)?;
            checks.push(Check {
                label: format!("{} avoid {} n={n}", fixture.id, fixture.pattern),
                expected: fixture.terms[n],
                got,
            });
        }
    }
    Ok(checks)
}

pub fn alternating_suite(max_n: usize, jobs: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (n, expected) in ALTERNATING_SIZES.into_iter().filter(|(n, _)| *n <= max_n) {
        let got = size_par(&alternating_trs(n), jobs)?;
        checks.push(Check { label: format!("alternating scheme n={n}"), expected, got });
    }
    Ok(checks)
}

/// `2-5-3-1-4` on 5-tuples: brute force up to [`BRUTE_FORCE_MAX_N`], and
/// sequential against parallel counting for every `n`.
pub fn k5_suite(max_n: usize, jobs: usize) -> Result<Vec<Check>> {
    let pattern: Pattern = "2-5-3-1-4".parse()?;
    let mut checks = Vec::new();
    for n in 5..=max_n {
        let list = avoidance_list(n, &pattern)?;
        let got = size_par(&list, 1)?;
        if n <= BRUTE_FORCE_MAX_N {
            checks.push(Check {
                label: format!("avoid {pattern} n={n} brute force"),
                expected: brute_force_avoiders(n, &pattern),
                got,
            });
        }
        let jobs = jobs.max(2);
        checks.push(Check {
            label: format!("avoid {pattern} n={n} jobs={jobs}"),
            expected: got,
            got: size_par(&list, jobs)?,
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment() {
        assert!(contains_pattern(&[3, 1, 4, 2], &[2, 1]));
        assert!(!contains_pattern(&[1, 2, 3, 4], &[2, 1]));
        assert!(contains_pattern(&[2, 4, 1, 3], &[2, 3, 1]));
        assert!(!contains_pattern(&[1, 3, 2], &[2, 3, 1]));
        assert!(!contains_pattern(&[1, 2], &[1, 2, 3]));
    }

    #[test]
    fn catalan_numbers() {
        assert_eq!((0..7).map(catalan).collect::<Vec<_>>(), vec![1, 1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn fixtures_match_brute_force() {
        for f in oeis_fixtures(None).unwrap() {
            assert_eq!(f.pattern.len(), 4);
            for n in 1..=BRUTE_FORCE_MAX_N {
                assert_eq!(brute_force_avoiders(n, &f.pattern), f.terms[n], "{} n={n}", f.id);
            }
        }
    }

    #[test]
    fn fixture_parsing() {
        let f = parse_fixture("X", "# c\npattern 1-2-3\n1, 1, 2\n").unwrap();
        assert_eq!(f.terms, vec![1, 1, 2]);
        assert!(parse_fixture("X", "1,2\n").is_err());
    }
}
