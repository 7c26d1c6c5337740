//! Search for large Condorcet domains over never-rule assignments.
//!
//! A search state assigns rules to a prefix of the triples (or, with
//! dynamic ordering, to triples picked one at a time by
//! [`dynamic_next_triple`](crate::orderings::dynamic_next_triple)).
//! Children assign each candidate rule to the next triple. The size of a
//! partial state counts orders of all `n` alternatives with unassigned triples
//! left unconstrained, so sizes never grow along a branch.
//!
//! Two drivers share this machinery: [`prs_search`], best-first over a
//! bounded frontier, and [`dfs_search`], depth-first with memory bounded by
//! depth times branching.

mod checkpoint;
mod dfs;
mod prs;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::Float;

use crate::domain::Compiled;
use crate::error::{invalid, Error, Result};
use crate::iso::SymmetryGroup;
use crate::orderings::{init_tuples, TupleOrdering, DEFAULT_CANDIDATE_RULES};
use crate::subsets::State;
use crate::types::{ConstraintList, NeverRule};
use crate::Count;

pub use checkpoint::{parse_results, write_results, Checkpoint};
pub use dfs::dfs_search;
pub use prs::{prs_search, prs_search_resumable};

/// How the next triple to assign is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOrdering {
    /// The first unassigned triple of a fixed order.
    Static(TupleOrdering),
    /// The triple minimizing the best reachable size; states are coded in RZ order.
    Dynamic,
}

impl SearchOrdering {
    pub fn name(self) -> &'static str {
        match self {
            SearchOrdering::Static(o) => o.name(),
            SearchOrdering::Dynamic => "dynamic",
        }
    }
}

/// CoLex: a state's prefix then fixes the domain on `1..=m` before any triple
/// mentions `m + 1`, which makes sizes of partial states comparable.
impl Default for SearchOrdering {
    fn default() -> Self {
        SearchOrdering::Static(TupleOrdering::CoLex)
    }
}

impl fmt::Display for SearchOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("dynamic") {
            Ok(SearchOrdering::Dynamic)
        } else {
            s.parse().map(SearchOrdering::Static)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub n: usize,
    pub ordering: SearchOrdering,
    /// Rules tried at each triple, in this order.
    pub candidate_rules: Vec<NeverRule>,
    /// States kept per depth by [`prs_search`]; lowest scores are evicted.
    pub frontier_cap: usize,
    /// Drop states that a relabelling preserving the candidate rules shows
    /// cannot complete to a lexicographically minimal state.
    pub prune_non_minimal: bool,
    /// Stop at the first complete state of at least this size. States smaller
    /// than the target are not expanded.
    pub target: Option<Count>,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
    /// States popped per best-first round.
    pub batch: usize,
    /// Keep only this many results (largest first).
    pub max_results: Option<usize>,
}

impl SearchConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ordering: SearchOrdering::default(),
            candidate_rules: DEFAULT_CANDIDATE_RULES.to_vec(),
            frontier_cap: usize::MAX,
            prune_non_minimal: false,
            target: None,
            jobs: 1,
            batch: 64,
            max_results: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(invalid(format!("search needs n >= 3, got {}", self.n)));
        }
        if self.candidate_rules.is_empty() {
            return Err(invalid("candidate rule set is empty"));
        }
        let mut codes: Vec<u8> = self.candidate_rules.iter().map(|r| r.code()).collect();
        codes.sort_unstable();
        codes.dedup();
        if codes.len() != self.candidate_rules.len() {
            return Err(invalid("candidate rules contain duplicates"));
        }
        if self.frontier_cap == 0 || self.batch == 0 {
            return Err(invalid("frontier cap and batch size must be at least 1"));
        }
        Ok(())
    }

    /// Candidate rule codes as a digit string, e.g. `3467`.
    pub fn rule_codes(&self) -> String {
        self.candidate_rules.iter().map(|r| r.code().to_string()).collect()
    }
}

/// A node of the search tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub state: State,
    pub assigned_count: usize,
    /// Domain size with unassigned triples unconstrained.
    pub size: Count,
}

/// Score by domain size.
pub fn size_score<S: Float>(s: &SearchState) -> S {
    S::from(s.size).unwrap_or_else(S::infinity)
}

/// Constant score: best-first degenerates to breadth-first.
pub fn constant_score<S: Float>(_: &SearchState) -> S {
    S::zero()
}

/// A complete state found by a search, with its domain size.
pub type Found = (State, Count);

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<S> {
    /// Sorted by size descending, then state ascending.
    pub results: Vec<Found>,
    /// Some states were evicted from a full frontier; the search was not exhaustive.
    pub truncated: bool,
    /// The target was reached before the tree was exhausted.
    pub stopped_early: bool,
    /// Number of states expanded.
    pub expanded: u64,
    /// Largest number of states held at once (frontier, or pending children
    /// along the depth-first stack).
    pub peak_tracked: usize,
    /// Present when a best-first run paused before finishing.
    pub checkpoint: Option<Checkpoint<S>>,
}

pub(crate) fn compare_scores<S: Float>(a: S, b: S) -> Ordering {
    a.partial_cmp(&b).unwrap_or_else(|| b.is_nan().cmp(&a.is_nan()))
}

pub(crate) fn sort_results(results: &mut Vec<Found>, max: Option<usize>) {
    results.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if let Some(m) = max {
        results.truncate(m);
    }
}

/// Everything a search needs besides its driver.
pub(crate) struct Context {
    n: usize,
    dynamic: bool,
    reference: ConstraintList,
    triples: Vec<[u8; 3]>,
    rules: Vec<NeverRule>,
    group: Option<SymmetryGroup>,
    target: Option<Count>,
}

impl Context {
    pub(crate) fn new(config: &SearchConfig) -> Result<Self> {
        config.validate()?;
        let ordering = match config.ordering {
            SearchOrdering::Static(o) => o,
            SearchOrdering::Dynamic => TupleOrdering::Rz,
        };
        Self::with_reference(config, init_tuples(config.n, 3, ordering)?)
    }

    fn with_reference(config: &SearchConfig, reference: ConstraintList) -> Result<Self> {
        let group = if config.prune_non_minimal {
            Some(SymmetryGroup::preserving(&reference, &config.candidate_rules)?)
        } else {
            None
        };
        let triples = reference
            .entries()
            .iter()
            .map(|e| {
                let t = e.tuple.elements();
                [t[0], t[1], t[2]]
            })
            .collect();
        Ok(Self {
            n: config.n,
            dynamic: config.ordering == SearchOrdering::Dynamic,
            reference,
            triples,
            rules: config.candidate_rules.clone(),
            group,
            target: config.target,
        })
    }

    pub(crate) fn slots(&self) -> usize {
        self.triples.len()
    }

    pub(crate) fn size_of(&self, state: &State) -> Result<Count> {
        let rules = (0..state.len()).filter_map(|i| state.rule(i).map(|r| (&self.triples[i][..], r)));
        Compiled::from_rules(self.n, rules).count()
    }

    pub(crate) fn node(&self, state: State) -> Result<SearchState> {
        let size = self.size_of(&state)?;
        Ok(SearchState { assigned_count: state.assigned_count(), state, size })
    }

    pub(crate) fn root(&self) -> Result<Option<SearchState>> {
        let root = self.node(State::unassigned(self.slots()))?;
        Ok(self.keep(&root).then_some(root))
    }

    pub(crate) fn is_complete(&self, node: &SearchState) -> bool {
        node.assigned_count == self.slots()
    }

    fn keep(&self, node: &SearchState) -> bool {
        node.size > 0
            && self.target.is_none_or(|t| node.size >= t)
            && !self.group.as_ref().is_some_and(|g| g.rejects(&node.state))
    }

    /// Index of the triple assigned next, if any remain.
    fn next_slot(&self, state: &State) -> Result<Option<usize>> {
        let free: Vec<usize> = (0..state.len()).filter(|&i| state.codes()[i] == 0).collect();
        if !self.dynamic || free.len() <= 1 {
            return Ok(free.first().copied());
        }
        let mut best: Option<(Count, usize)> = None;
        for &i in &free {
            let mut reach = 0;
            for &rule in &self.rules {
                let mut s = state.clone();
                s.set(i, Some(rule));
                reach = reach.max(self.size_of(&s)?);
            }
            if best.is_none_or(|(b, _)| reach < b) {
                best = Some((reach, i));
            }
        }
        Ok(best.map(|(_, i)| i))
    }

    /// Surviving children in candidate-rule order.
    pub(crate) fn children(&self, node: &SearchState) -> Result<Vec<SearchState>> {
        let Some(slot) = self.next_slot(&node.state)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::with_capacity(self.rules.len());
        for &rule in &self.rules {
            let mut state = node.state.clone();
            state.set(slot, Some(rule));
            let child = self.node(state)?;
            if self.keep(&child) {
                out.push(child);
            }
        }
        Ok(out)
    }

    pub(crate) fn reference(&self) -> &ConstraintList {
        &self.reference
    }
}

/// Upper bound on `C(n,3) * log2(|rules|)` accepted by
/// [`exhaustive_non_isomorphic`] without an override.
pub const EXHAUSTIVE_GUARD_BITS: f64 = 32.0;

/// Every complete assignment over `candidate_rules` that is lexicographically
/// minimal under all relabellings, with its size (zero-size domains included),
/// sorted by size descending then state.
///
/// When `candidate_rules` is closed under relabelling (for example all nine
/// rules) the result holds exactly one state per isomorphism class of
/// assignments.
pub fn exhaustive_non_isomorphic(n: usize, candidate_rules: &[NeverRule], allow_large: bool) -> Result<Vec<Found>> {
    let mut config = SearchConfig::new(n);
    config.candidate_rules = candidate_rules.to_vec();
    config.prune_non_minimal = true;
    config.validate()?;
    let slots = n * (n - 1) * (n - 2) / 6;
    let bits = slots as f64 * (candidate_rules.len() as f64).log2();
    if bits > EXHAUSTIVE_GUARD_BITS && !allow_large {
        return Err(invalid(format!(
            "exhaustive search over {} rules on {slots} triples is too large ({bits:.1} bits); pass the override to run it anyway",
            candidate_rules.len()
        )));
    }
    let ctx = Context::new(&config)?;
    let full = SymmetryGroup::full(ctx.reference())?;
    let mut out = Vec::new();
    let mut stack = vec![State::unassigned(slots)];
    while let Some(state) = stack.pop() {
        if ctx.group.as_ref().is_some_and(|g| g.rejects(&state)) {
            continue;
        }
        match state.codes().iter().position(|&c| c == 0) {
            Some(slot) => {
                for &rule in candidate_rules.iter().rev() {
                    let mut child = state.clone();
                    child.set(slot, Some(rule));
                    stack.push(child);
                }
            }
            None => {
                if full.is_lex_minimal(&state) {
                    let size = ctx.size_of(&state)?;
                    out.push((state, size));
                }
            }
        }
    }
    sort_results(&mut out, None);
    Ok(out)
}
