use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Float;
use rayon::prelude::*;

use super::checkpoint::Checkpoint;
use super::{compare_scores, sort_results, Context, Found, SearchConfig, SearchOutcome, SearchState};
use crate::error::{invalid, Result};
use crate::subsets::State;

/// Frontier entry: highest score first, then lowest sequence number (FIFO).
struct Entry<S> {
    score: S,
    seq: u64,
    node: SearchState,
}

impl<S: Float> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_scores(self.score, other.score).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl<S: Float> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Float> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Float> Eq for Entry<S> {}

/// States waiting for expansion, grouped by depth. The cap applies to each
/// depth separately.
struct Frontier<S> {
    levels: Vec<BTreeSet<Entry<S>>>,
    next_seq: u64,
    cap: usize,
    truncated: bool,
}

impl<S: Float> Frontier<S> {
    fn new(depth: usize, cap: usize) -> Self {
        Self { levels: (0..=depth).map(|_| BTreeSet::new()).collect(), next_seq: 0, cap, truncated: false }
    }

    fn len(&self) -> usize {
        self.levels.iter().map(BTreeSet::len).sum()
    }

    fn is_empty(&self) -> bool {
        self.levels.iter().all(BTreeSet::is_empty)
    }

    fn push(&mut self, node: SearchState, score: S) {
        let level = &mut self.levels[node.assigned_count];
        level.insert(Entry { score, seq: self.next_seq, node });
        self.next_seq += 1;
        if level.len() > self.cap {
            level.pop_first();
            self.truncated = true;
        }
    }

    /// Up to `max` highest-scoring states of the shallowest non-empty depth.
    fn pop_batch(&mut self, max: usize) -> Vec<SearchState> {
        let Some(level) = self.levels.iter_mut().find(|l| !l.is_empty()) else {
            return Vec::new();
        };
        (0..max).map_while(|_| level.pop_last()).map(|e| e.node).collect()
    }

    /// Every waiting state with its score, in pop order.
    fn snapshot(&self) -> Vec<(State, S)> {
        self.levels.iter().flat_map(|l| l.iter().rev()).map(|e| (e.node.state.clone(), e.score)).collect()
    }
}

/// Prioritised search, one depth (number of assigned triples) at a time.
///
/// The states of the shallowest non-empty depth are expanded `batch` at a
/// time, highest score first with ties in arrival order, on `jobs` workers.
/// Their children wait at the next depth, where at most `frontier_cap` states
/// are kept: when a depth overflows its lowest-scoring state is evicted and
/// the outcome is flagged `truncated`. Without overflow the search is
/// exhaustive up to pruning. Complete states are collected as they appear.
pub fn prs_search<S, F>(config: &SearchConfig, score: F) -> Result<SearchOutcome<S>>
where
    S: Float + Send + Sync,
    F: Fn(&SearchState) -> S + Sync,
{
    prs_search_resumable(config, score, None, None)
}

/// [`prs_search`] that can start from a checkpoint and pause after
/// `max_rounds` batches, returning a checkpoint in the outcome.
pub fn prs_search_resumable<S, F>(
    config: &SearchConfig,
    score: F,
    resume: Option<&Checkpoint<S>>,
    max_rounds: Option<u64>,
) -> Result<SearchOutcome<S>>
where
    S: Float + Send + Sync,
    F: Fn(&SearchState) -> S + Sync,
{
    let ctx = Context::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;

    let mut frontier = Frontier::new(ctx.slots(), config.frontier_cap);
    let mut results: Vec<Found> = Vec::new();
    let mut stopped_early = false;
    let reached = |size| config.target.is_some_and(|t| size >= t);

    match resume {
        Some(cp) => {
            cp.check_matches(config)?;
            for (state, s) in &cp.entries {
                if state.len() != ctx.slots() {
                    return Err(invalid("checkpoint state length does not match n"));
                }
                let node = ctx.node(state.clone())?;
                if ctx.is_complete(&node) {
                    results.push((node.state, node.size));
                } else {
                    frontier.push(node, *s);
                }
            }
        }
        None => {
            if let Some(root) = ctx.root()? {
                if ctx.is_complete(&root) {
                    results.push((root.state.clone(), root.size));
                } else {
                    let s = score(&root);
                    frontier.push(root, s);
                }
            }
        }
    }

    let mut expanded = 0u64;
    let mut peak = frontier.len();
    let mut rounds = 0u64;
    let mut paused = false;
    while !frontier.is_empty() {
        if results.iter().any(|r| reached(r.1)) {
            stopped_early = true;
            break;
        }
        if max_rounds.is_some_and(|m| rounds >= m) {
            paused = true;
            break;
        }
        rounds += 1;
        let batch = frontier.pop_batch(config.batch);
        expanded += batch.len() as u64;
        let expansions: Vec<Result<Vec<(SearchState, S)>>> = pool.install(|| {
            batch
                .par_iter()
                .map(|node| Ok(ctx.children(node)?.into_iter().map(|c| {
                    let s = score(&c);
                    (c, s)
                }).collect()))
                .collect()
        });
        for children in expansions {
            for (child, s) in children? {
                if ctx.is_complete(&child) {
                    results.push((child.state, child.size));
                } else {
                    frontier.push(child, s);
                }
            }
        }
        peak = peak.max(frontier.len());
    }

    let checkpoint = paused.then(|| {
        let mut entries = frontier.snapshot();
        let mut done: Vec<(State, S)> = results
            .iter()
            .map(|(state, size)| {
                let node = SearchState { assigned_count: state.assigned_count(), state: state.clone(), size: *size };
                (state.clone(), score(&node))
            })
            .collect();
        entries.append(&mut done);
        Checkpoint::new(config, entries)
    });
    sort_results(&mut results, config.max_results);
    Ok(SearchOutcome {
        results,
        truncated: frontier.truncated,
        stopped_early,
        expanded,
        peak_tracked: peak,
        checkpoint,
    })
}
