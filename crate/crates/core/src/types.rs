//! Value types shared by every module: orders, tuples, patterns, never
//! rules, laws, constraint lists and domains.
//!
//! Alternatives are the integers `1..=n` stored as `u8`, so `n` is bounded
//! by [`MAX_ALTERNATIVES`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// An alternative (candidate, symbol) in `1..=n`.
pub type Alternative = u8;

/// Largest supported number of alternatives.
pub const MAX_ALTERNATIVES: usize = u8::MAX as usize;

fn is_permutation(seq: &[u8]) -> bool {
    let mut seen = vec![false; seq.len() + 1];
    for &v in seq {
        let v = v as usize;
        if v == 0 || v > seq.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

fn join(seq: &[u8], sep: &str) -> String {
    seq.iter().map(u8::to_string).collect::<Vec<_>>().join(sep)
}

/// A ranking of the alternatives `1..=m`, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearOrder(Vec<Alternative>);

impl LinearOrder {
    pub fn new(seq: Vec<Alternative>) -> Result<Self> {
        if seq.len() > MAX_ALTERNATIVES || !is_permutation(&seq) {
            return Err(invalid(format!("{seq:?} is not a permutation of 1..{}", seq.len())));
        }
        Ok(Self(seq))
    }

    pub(crate) fn from_vec_unchecked(seq: Vec<Alternative>) -> Self {
        debug_assert!(is_permutation(&seq));
        Self(seq)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Alternative] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Alternative> {
        self.0
    }

    /// `positions()[x - 1]` is the 0-based position of alternative `x`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            pos[x as usize - 1] = i;
        }
        pos
    }

    /// Does `a` come before `b` in this order?
    pub fn prefers(&self, a: Alternative, b: Alternative) -> bool {
        let pos = self.positions();
        pos[a as usize - 1] < pos[b as usize - 1]
    }

    /// Every order of `1..=n`, in lexicographic order.
    pub fn all(n: usize) -> Vec<LinearOrder> {
        use itertools::Itertools;
        (1..=n as u8).permutations(n).map(LinearOrder).collect()
    }
}

impl fmt::Display for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.0, " "))
    }
}

/// A strictly increasing tuple of alternatives.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KTuple(Vec<Alternative>);

impl KTuple {
    pub fn new(elements: Vec<Alternative>) -> Result<Self> {
        if elements.is_empty() || elements[0] == 0 {
            return Err(invalid(format!("tuple {elements:?} must hold alternatives >= 1")));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("tuple {elements:?} is not strictly increasing")));
        }
        Ok(Self(elements))
    }

    pub(crate) fn from_vec_unchecked(elements: Vec<Alternative>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Self(elements)
    }

    /// Sorts and validates arbitrary distinct alternatives.
    pub fn from_unsorted(mut elements: Vec<Alternative>) -> Result<Self> {
        elements.sort_unstable();
        Self::new(elements)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn elements(&self) -> &[Alternative] {
        &self.0
    }

    pub fn largest(&self) -> Alternative {
        *self.0.last().expect("tuples are non-empty")
    }

    pub fn contains(&self, x: Alternative) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// 1-based rank of `x` inside the tuple.
    pub fn rank_of(&self, x: Alternative) -> Option<u8> {
        self.0.binary_search(&x).ok().map(|i| i as u8 + 1)
    }
}

impl fmt::Display for KTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", join(&self.0, ","))
    }
}

/// A permutation of `1..=k`, the standardized shape of a restriction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(Vec<u8>);

impl Pattern {
    pub fn new(seq: Vec<u8>) -> Result<Self> {
        if seq.is_empty() || !is_permutation(&seq) {
            return Err(invalid(format!("{seq:?} is not a permutation of 1..{}", seq.len())));
        }
        Ok(Self(seq))
    }

    pub(crate) fn from_vec_unchecked(seq: Vec<u8>) -> Self {
        debug_assert!(is_permutation(&seq));
        Self(seq)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Position of this pattern in the lexicographic list of all patterns
    /// of the same length (Lehmer code).
    pub fn lex_rank(&self) -> u64 {
        let k = self.0.len();
        let mut rank = 0u64;
        for i in 0..k {
            let smaller_after = self.0[i + 1..].iter().filter(|&&v| v < self.0[i]).count() as u64;
            rank = rank * (k - i) as u64 + smaller_after;
        }
        rank
    }

    /// All patterns of length `k` in lexicographic order.
    pub fn all(k: usize) -> Vec<Pattern> {
        LinearOrder::all(k).into_iter().map(|o| Pattern(o.into_vec())).collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.0, "-"))
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Accepts `2-5-3-1-4`, and plain digit strings such as `231` when every
    /// entry is a single digit.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = if s.contains('-') {
            s.split('-').collect()
        } else {
            s.split("").filter(|p| !p.is_empty()).collect()
        };
        let seq = parts
            .iter()
            .map(|p| p.trim().parse::<u8>().map_err(|_| invalid(format!("bad pattern `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(seq)
    }
}

/// A never condition `rNp` on a triple: the element of rank `r` in the sorted
/// triple never occupies position `p` of the restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeverRule {
    rank: u8,
    position: u8,
}

impl NeverRule {
    pub const N1N1: NeverRule = NeverRule { rank: 1, position: 1 };
    pub const N1N3: NeverRule = NeverRule { rank: 1, position: 3 };
    pub const N2N1: NeverRule = NeverRule { rank: 2, position: 1 };
    pub const N2N3: NeverRule = NeverRule { rank: 2, position: 3 };
    pub const N3N1: NeverRule = NeverRule { rank: 3, position: 1 };
    pub const N3N3: NeverRule = NeverRule { rank: 3, position: 3 };

    pub fn new(rank: u8, position: u8) -> Result<Self> {
        if !(1..=3).contains(&rank) || !(1..=3).contains(&position) {
            return Err(invalid(format!("never rule {rank}N{position} out of range")));
        }
        Ok(Self { rank, position })
    }

    pub fn rank(self) -> u8 {
        self.rank
    }

    pub fn position(self) -> u8 {
        self.position
    }

    /// Numeric code `3 * (rank - 1) + position`, in `1..=9`.
    pub fn code(self) -> u8 {
        3 * (self.rank - 1) + self.position
    }

    pub fn from_code(code: u8) -> Result<Self> {
        if !(1..=9).contains(&code) {
            return Err(invalid(format!("rule code {code} outside 1..9")));
        }
        Ok(Self { rank: (code - 1) / 3 + 1, position: (code - 1) % 3 + 1 })
    }

    /// All nine rules in code order.
    pub fn all() -> [NeverRule; 9] {
        std::array::from_fn(|i| NeverRule::from_code(i as u8 + 1).unwrap())
    }

    /// The two length-3 patterns with `rank` at `position`.
    pub fn forbidden_patterns(self) -> [Pattern; 2] {
        let mut out = Pattern::all(3)
            .into_iter()
            .filter(|p| p.as_slice()[self.position as usize - 1] == self.rank);
        [out.next().unwrap(), out.next().unwrap()]
    }

    /// Does a length-3 restriction violate this rule?
    pub fn forbids(self, pattern: &Pattern) -> bool {
        pattern.len() == 3 && pattern.as_slice()[self.position as usize - 1] == self.rank
    }
}

impl fmt::Display for NeverRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}N{}", self.rank, self.position)
    }
}

impl FromStr for NeverRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.trim().as_bytes();
        if b.len() != 3 || !(b[1] == b'N' || b[1] == b'n') || !b[0].is_ascii_digit() || !b[2].is_ascii_digit() {
            return Err(invalid(format!("bad never rule `{s}`")));
        }
        NeverRule::new(b[0] - b'0', b[2] - b'0')
    }
}

/// The law equivalent to a never rule: its two forbidden length-3 patterns.
pub fn rule_to_patterns(rule: NeverRule) -> Law {
    Law { forbidden: rule.forbidden_patterns().into_iter().collect() }
}

/// A non-empty set of forbidden patterns of one common length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Law {
    forbidden: BTreeSet<Pattern>,
}

impl Law {
    pub fn new(patterns: impl IntoIterator<Item = Pattern>) -> Result<Self> {
        let forbidden: BTreeSet<Pattern> = patterns.into_iter().collect();
        let Some(first) = forbidden.iter().next() else {
            return Err(invalid("a law needs at least one forbidden pattern"));
        };
        let k = first.len();
        if forbidden.iter().any(|p| p.len() != k) {
            return Err(invalid("all patterns of a law must have the same length"));
        }
        Ok(Self { forbidden })
    }

    pub fn single(pattern: Pattern) -> Self {
        Self { forbidden: BTreeSet::from([pattern]) }
    }

    pub fn arity(&self) -> usize {
        self.forbidden.iter().next().map_or(0, Pattern::len)
    }

    pub fn patterns(&self) -> &BTreeSet<Pattern> {
        &self.forbidden
    }

    pub fn forbids(&self, pattern: &Pattern) -> bool {
        self.forbidden.contains(pattern)
    }

    /// True when every pattern of the arity is forbidden, which empties any
    /// domain over the tuple.
    pub fn is_total(&self) -> bool {
        let k = self.arity() as u64;
        (1..=k).product::<u64>() == self.forbidden.len() as u64
    }

    /// The never rule whose pattern pair is exactly this law, if any.
    pub fn as_never_rule(&self) -> Option<NeverRule> {
        if self.arity() != 3 || self.forbidden.len() != 2 {
            return None;
        }
        NeverRule::all().into_iter().find(|r| rule_to_patterns(*r) == *self)
    }
}

impl From<NeverRule> for Law {
    fn from(rule: NeverRule) -> Self {
        rule_to_patterns(rule)
    }
}

impl From<Pattern> for Law {
    fn from(p: Pattern) -> Self {
        Law::single(p)
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.forbidden.iter().map(Pattern::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// One tuple of a constraint list with its optional law.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintEntry {
    pub tuple: KTuple,
    pub law: Option<Law>,
}

impl ConstraintEntry {
    /// The never rule carried by this entry when its law is a rule pair.
    pub fn rule(&self) -> Option<NeverRule> {
        self.law.as_ref().and_then(Law::as_never_rule)
    }
}

/// An ordered list of `k`-tuples over `1..=n`, each with an optional law.
///
/// With `k = 3` and never-rule laws this is a TRS; otherwise a TLS.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintList {
    n: usize,
    k: usize,
    entries: Vec<ConstraintEntry>,
}

impl ConstraintList {
    /// A list without any tuples: every order of `1..=n` satisfies it.
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::from_entries(n, k, Vec::new())
    }

    pub fn from_entries(n: usize, k: usize, entries: Vec<ConstraintEntry>) -> Result<Self> {
        if n > MAX_ALTERNATIVES {
            return Err(invalid(format!("n = {n} exceeds {MAX_ALTERNATIVES}")));
        }
        if k < 3 {
            return Err(invalid(format!("tuple arity {k} must be at least 3")));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &entries {
            if e.tuple.arity() != k {
                return Err(invalid(format!("tuple {} does not have arity {k}", e.tuple)));
            }
            if e.tuple.largest() as usize > n {
                return Err(invalid(format!("tuple {} is not a subset of 1..{n}", e.tuple)));
            }
            if let Some(law) = &e.law {
                if law.arity() != k {
                    return Err(invalid(format!("law on {} has arity {}, expected {k}", e.tuple, law.arity())));
                }
            }
            if !seen.insert(&e.tuple) {
                return Err(invalid(format!("tuple {} listed twice", e.tuple)));
            }
        }
        Ok(Self { n, k, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[ConstraintEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position_of(&self, tuple: &KTuple) -> Option<usize> {
        self.entries.iter().position(|e| &e.tuple == tuple)
    }

    pub fn is_trs(&self) -> bool {
        self.k == 3 && self.entries.iter().all(|e| e.law.as_ref().is_none_or(|l| l.as_never_rule().is_some()))
    }

    pub fn assigned_count(&self) -> usize {
        self.entries.iter().filter(|e| e.law.is_some()).count()
    }

    /// Replaces the law of the entry at `index`.
    pub fn set_law(&mut self, index: usize, law: Option<Law>) -> Result<()> {
        let len = self.entries.len();
        let k = self.k;
        let entry = self
            .entries
            .get_mut(index)
            .ok_or_else(|| invalid(format!("index {index} out of range for {len} entries")))?;
        if let Some(l) = &law {
            if l.arity() != k {
                return Err(invalid(format!("law arity {} does not match k = {k}", l.arity())));
            }
        }
        entry.law = law;
        Ok(())
    }

    /// Keeps the tuples, drops every law.
    pub fn unassigned(&self) -> Self {
        Self {
            n: self.n,
            k: self.k,
            entries: self.entries.iter().map(|e| ConstraintEntry { tuple: e.tuple.clone(), law: None }).collect(),
        }
    }
}

/// A sorted, duplicate-free set of orders of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Domain {
    n: usize,
    orders: Vec<LinearOrder>,
}

impl Domain {
    pub fn new(n: usize, mut orders: Vec<LinearOrder>) -> Result<Self> {
        if let Some(o) = orders.iter().find(|o| o.len() != n) {
            return Err(invalid(format!("order ({o}) is not over 1..{n}")));
        }
        orders.sort_unstable();
        orders.dedup();
        Ok(Self { n, orders })
    }

    pub(crate) fn from_sorted_unchecked(n: usize, orders: Vec<LinearOrder>) -> Self {
        debug_assert!(orders.windows(2).all(|w| w[0] < w[1]));
        Self { n, orders }
    }

    /// Convenience constructor from raw sequences.
    pub fn from_sequences(n: usize, seqs: &[&[u8]]) -> Result<Self> {
        let orders = seqs.iter().map(|s| LinearOrder::new(s.to_vec())).collect::<Result<Vec<_>>>()?;
        Self::new(n, orders)
    }

    pub fn full(n: usize) -> Self {
        Self { n, orders: LinearOrder::all(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn contains(&self, order: &LinearOrder) -> bool {
        self.orders.binary_search(order).is_ok()
    }

    pub fn into_orders(self) -> Vec<LinearOrder> {
        self.orders
    }
}
