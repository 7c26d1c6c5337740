//! Tuple orderings, rule assignment and scheme-driven initialization.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::domain::size;
use crate::error::{invalid, Error, Result};
use crate::types::{ConstraintEntry, ConstraintList, KTuple, Law, NeverRule};
use crate::Count;

/// A total order on the `k`-subsets of `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TupleOrdering {
    /// Compare at the first differing coordinate.
    Lex,
    /// Compare at the last differing coordinate.
    CoLex,
    /// Triples only: compare the first element, then the third, then the second.
    #[default]
    Rz,
}

impl TupleOrdering {
    pub fn compare(self, a: &KTuple, b: &KTuple) -> Ordering {
        let (x, y) = (a.elements(), b.elements());
        match self {
            TupleOrdering::Lex => x.cmp(y),
            TupleOrdering::CoLex => x.iter().rev().cmp(y.iter().rev()),
            TupleOrdering::Rz => (x[0], x[2], x[1]).cmp(&(y[0], y[2], y[1])),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TupleOrdering::Lex => "lex",
            TupleOrdering::CoLex => "colex",
            TupleOrdering::Rz => "rz",
        }
    }
}

impl fmt::Display for TupleOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TupleOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lex" => Ok(TupleOrdering::Lex),
            "colex" => Ok(TupleOrdering::CoLex),
            "rz" => Ok(TupleOrdering::Rz),
            _ => Err(invalid(format!("unknown ordering `{s}` (expected lex, colex or rz)"))),
        }
    }
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> Vec<KTuple> {
    (1..=n as u8).combinations(k).map(KTuple::from_vec_unchecked).collect()
}

/// Every `k`-tuple of `1..=n`, unassigned, sorted by `ordering`.
///
/// When `n < k` the list is empty.
pub fn init_tuples(n: usize, k: usize, ordering: TupleOrdering) -> Result<ConstraintList> {
    if ordering == TupleOrdering::Rz && k != 3 {
        return Err(invalid(format!("the RZ ordering is defined for triples only, not k = {k}")));
    }
    let mut tuples = if k <= n { all_tuples(n, k) } else { Vec::new() };
    tuples.sort_by(|a, b| ordering.compare(a, b));
    let entries = tuples.into_iter().map(|tuple| ConstraintEntry { tuple, law: None }).collect();
    ConstraintList::from_entries(n, k, entries)
}

/// Sets the law of `tuple`.
pub fn assign_law(constraints: &ConstraintList, tuple: &KTuple, law: Law) -> Result<ConstraintList> {
    let index = constraints
        .position_of(tuple)
        .ok_or_else(|| Error::NotFound(format!("tuple {tuple} is not in the constraint list")))?;
    assign_law_by_index(constraints, index, law)
}

pub fn assign_law_by_index(constraints: &ConstraintList, index: usize, law: Law) -> Result<ConstraintList> {
    let mut out = constraints.clone();
    out.set_law(index, Some(law))?;
    Ok(out)
}

/// Assigns a never rule to `tuple`, replacing any previous law.
pub fn assign_rule(constraints: &ConstraintList, tuple: &KTuple, rule: NeverRule) -> Result<ConstraintList> {
    assign_law(constraints, tuple, rule.into())
}

/// Assigns a never rule to the entry at `index` (0-based).
pub fn assign_rule_by_index(constraints: &ConstraintList, index: usize, rule: NeverRule) -> Result<ConstraintList> {
    assign_law_by_index(constraints, index, rule.into())
}

/// Assigns every entry the law returned by `scheme` for its tuple.
///
/// The scheme may return a [`NeverRule`], a [`Law`] or a single pattern.
pub fn init_by_scheme<F, L, E>(constraints: &ConstraintList, mut scheme: F) -> Result<ConstraintList>
where
    F: FnMut(&KTuple) -> std::result::Result<L, E>,
    L: Into<Law>,
    E: fmt::Display,
{
    let mut out = constraints.clone();
    for i in 0..out.len() {
        let tuple = out.entries()[i].tuple.clone();
        let law = scheme(&tuple)
            .map_err(|e| Error::Scheme { tuple: tuple.to_string(), reason: e.to_string() })?
            .into();
        out.set_law(i, Some(law)).map_err(|e| Error::Scheme { tuple: tuple.to_string(), reason: e.to_string() })?;
    }
    Ok(out)
}

/// Alternating scheme: for the triple `a < b < c`, `2N3` when `b` is odd and
/// `2N1` when `b` is even.
pub fn alternating_scheme(tuple: &KTuple) -> NeverRule {
    if tuple.elements()[1] % 2 == 1 {
        NeverRule::N2N3
    } else {
        NeverRule::N2N1
    }
}

/// The alternating scheme with the opposite parity convention.
pub fn alternating_scheme_flipped(tuple: &KTuple) -> NeverRule {
    if tuple.elements()[1] % 2 == 1 {
        NeverRule::N2N1
    } else {
        NeverRule::N2N3
    }
}

/// Looks up a built-in scheme by name.
pub fn named_scheme(name: &str) -> Result<fn(&KTuple) -> NeverRule> {
    match name {
        "alternating" => Ok(alternating_scheme),
        "alternating-flipped" => Ok(alternating_scheme_flipped),
        _ => Err(invalid(format!("unknown scheme `{name}` (expected alternating or alternating-flipped)"))),
    }
}

/// The TRS over `1..=n` in RZ order assigned by the alternating scheme.
pub fn alternating_trs(n: usize) -> ConstraintList {
    let base = init_tuples(n, 3, TupleOrdering::Rz).expect("triples are always valid");
    init_by_scheme(&base, |t: &KTuple| Ok::<_, Error>(alternating_scheme(t))).expect("scheme is total")
}

/// Rules tried at each triple when none are given explicitly.
pub const DEFAULT_CANDIDATE_RULES: [NeverRule; 4] =
    [NeverRule::N1N3, NeverRule::N2N1, NeverRule::N2N3, NeverRule::N3N1];

/// Picks the unassigned triple whose best candidate rule leaves the smallest
/// domain.
///
/// For each unassigned triple `t` the table holds the largest
/// [`size`] reachable by assigning one of `candidate_rules` to `t`; the triple
/// with the smallest such value is returned, ties going to the earliest entry.
pub fn dynamic_next_triple(
    constraints: &ConstraintList,
    candidate_rules: &[NeverRule],
) -> Result<(KTuple, Vec<(KTuple, Count)>)> {
    if constraints.k() != 3 {
        return Err(invalid("dynamic triple ordering needs a list of triples"));
    }
    if candidate_rules.is_empty() {
        return Err(invalid("candidate rule set is empty"));
    }
    let mut table = Vec::new();
    for (i, entry) in constraints.entries().iter().enumerate() {
        if entry.law.is_some() {
            continue;
        }
        let mut best = 0;
        for &rule in candidate_rules {
            best = best.max(size(&assign_rule_by_index(constraints, i, rule)?)?);
        }
        table.push((entry.tuple.clone(), best));
    }
    let (tuple, _) = table
        .iter()
        .min_by_key(|(_, m)| *m)
        .ok_or_else(|| invalid("every triple is already assigned"))?
        .clone();
    Ok((tuple, table))
}
