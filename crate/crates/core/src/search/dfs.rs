use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};

use num_traits::Float;
use rayon::prelude::*;

use super::{compare_scores, sort_results, Context, Found, SearchConfig, SearchOutcome, SearchState};
use crate::error::{invalid, Result};

struct Run<'a, F> {
    ctx: &'a Context,
    score: &'a F,
    target: Option<crate::Count>,
    stop: AtomicBool,
    expanded: AtomicUsize,
}

impl<F> Run<'_, F> {
    fn scored_children<S: Float>(&self, node: &SearchState) -> Result<Vec<SearchState>>
    where
        F: Fn(&SearchState) -> S,
    {
        self.expanded.fetch_add(1, AtomicOrdering::Relaxed);
        let mut children: Vec<(S, SearchState)> =
            self.ctx.children(node)?.into_iter().map(|c| ((self.score)(&c), c)).collect();
        // stable: equal scores keep candidate-rule order
        children.sort_by(|a, b| compare_scores(b.0, a.0));
        Ok(children.into_iter().map(|(_, c)| c).collect())
    }

    /// Explores below `node`; `pending` counts children waiting on the stack
    /// above this call.
    fn descend<S: Float>(&self, node: SearchState, pending: usize, peak: &mut usize, out: &mut Vec<Found>) -> Result<()>
    where
        F: Fn(&SearchState) -> S,
    {
        if self.stop.load(AtomicOrdering::Relaxed) {
            return Ok(());
        }
        if self.ctx.is_complete(&node) {
            if self.target.is_some_and(|t| node.size >= t) {
                self.stop.store(true, AtomicOrdering::Relaxed);
            }
            out.push((node.state, node.size));
            return Ok(());
        }
        let children = self.scored_children(&node)?;
        let mut waiting = children.len();
        *peak = (*peak).max(pending + waiting);
        for child in children {
            waiting -= 1;
            self.descend(child, pending + waiting, peak, out)?;
            if self.stop.load(AtomicOrdering::Relaxed) {
                break;
            }
        }
        Ok(())
    }
}

/// Depth-first search with children visited in descending score order.
///
/// Memory is bounded by the depth of the tree times the number of candidate
/// rules. With no target the result set equals an exhaustive
/// [`prs_search`](super::prs_search) on the same configuration.
/// `frontier_cap` does not apply. With `jobs > 1` the top of the tree is split
/// into independent subtrees explored concurrently.
pub fn dfs_search<S, F>(config: &SearchConfig, score: F) -> Result<SearchOutcome<S>>
where
    S: Float + Send + Sync,
    F: Fn(&SearchState) -> S + Sync,
{
    let ctx = Context::new(config)?;
    let run = Run { ctx: &ctx, score: &score, target: config.target, stop: AtomicBool::new(false), expanded: AtomicUsize::new(0) };
    let mut results = Vec::new();
    let mut peak = 0;
    if let Some(root) = ctx.root()? {
        if config.jobs <= 1 {
            run.descend(root, 0, &mut peak, &mut results)?;
        } else {
            // Split breadth first, keeping depth-first order among the pieces.
            let mut pieces = vec![root];
            while pieces.len() < 8 * config.jobs && pieces.iter().any(|p| !ctx.is_complete(p)) {
                let mut next = Vec::new();
                for p in pieces {
                    if ctx.is_complete(&p) {
                        next.push(p);
                    } else {
                        next.extend(run.scored_children(&p)?);
                    }
                }
                pieces = next;
            }
            peak = pieces.len();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
            let parts: Vec<Result<(Vec<Found>, usize)>> = pool.install(|| {
                pieces
                    .into_par_iter()
                    .map(|p| {
                        let mut out = Vec::new();
                        let mut local_peak = 0;
                        run.descend(p, 0, &mut local_peak, &mut out)?;
                        Ok((out, local_peak))
                    })
                    .collect()
            });
            let mut deepest = 0;
            for part in parts {
                let (mut out, local_peak) = part?;
                deepest = deepest.max(local_peak);
                results.append(&mut out);
            }
            peak += deepest;
        }
    }
    let stopped_early = run.stop.load(AtomicOrdering::Relaxed);
    sort_results(&mut results, config.max_results);
    Ok(SearchOutcome {
        results,
        truncated: false,
        stopped_early,
        expanded: run.expanded.load(AtomicOrdering::Relaxed) as u64,
        peak_tracked: peak,
        checkpoint: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{prs_search, size_score};
    use crate::types::NeverRule;

    #[test]
    fn matches_prs_when_exhaustive() {
        let mut c = SearchConfig::new(4);
        c.candidate_rules = NeverRule::all().to_vec();
        let a = dfs_search(&c, size_score::<f64>).unwrap();
        let b = prs_search(&c, size_score::<f64>).unwrap();
        assert_eq!(a.results, b.results);
        c.jobs = 3;
        assert_eq!(dfs_search(&c, size_score::<f64>).unwrap().results, a.results);
    }

    #[test]
    fn target_stops_early() {
        let mut c = SearchConfig::new(5);
        c.target = Some(20);
        let out = dfs_search(&c, size_score::<f64>).unwrap();
        assert!(out.stopped_early);
        assert!(out.results.iter().any(|r| r.1 >= 20));
        assert!(out.results.iter().all(|r| r.1 >= 20));
    }
}
