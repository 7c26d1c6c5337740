//! Restriction semantics, domain construction (breadth-first) and counting
//! (depth-first), plus recovery of the rules a domain satisfies.
//!
//! Both construction and counting grow orders one alternative at a time:
//! an order of `1..=m-1` is extended by inserting `m` at every position, and
//! only entries whose largest element is `m` need to be checked for the new
//! order. Entries mentioning alternatives above `m` are dormant until then.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::count::{rising_product, Counter};
use crate::error::{invalid, Error, Result};
use crate::types::{ConstraintList, Domain, KTuple, LinearOrder, NeverRule, Pattern};
use crate::Count;

/// Largest tuple arity the engine accepts (`20!` still fits in a `u64` rank).
pub const MAX_ARITY: usize = 20;

/// The standardized subsequence of `order` on the members of `tuple`.
pub fn restrict(order: &LinearOrder, tuple: &KTuple) -> Result<Pattern> {
    if tuple.largest() as usize > order.len() {
        return Err(invalid(format!("tuple {tuple} is not within 1..{}", order.len())));
    }
    let seq = order.as_slice().iter().filter_map(|&x| tuple.rank_of(x)).collect();
    Ok(Pattern::from_vec_unchecked(seq))
}

/// Does `order` (over `1..=m`) avoid every law whose tuple lies in `1..=m`?
pub fn satisfies(order: &LinearOrder, constraints: &ConstraintList) -> bool {
    let m = order.len();
    constraints.entries().iter().all(|e| match &e.law {
        Some(law) if e.tuple.largest() as usize <= m => {
            !law.forbids(&restrict(order, &e.tuple).expect("tuple checked against support"))
        }
        _ => true,
    })
}

/// Pattern ranks forbidden by one law.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Forbidden {
    /// Bit `r` set when the pattern of lexicographic rank `r` is forbidden.
    Mask(u64),
    Ranks(Vec<u64>),
}

impl Forbidden {
    fn contains(&self, rank: u64) -> bool {
        match self {
            Forbidden::Mask(m) => m >> rank & 1 == 1,
            Forbidden::Ranks(r) => r.binary_search(&rank).is_ok(),
        }
    }
}

/// Largest arity whose laws get a precomputed slot table of `(k-1)!` entries.
const TABLE_MAX_ARITY: usize = 9;

/// Where a law lets the largest member of its tuple go, given the pattern the
/// other members already form. Bit `s` of a slot mask is set when the largest
/// member may not have exactly `s` other members before it.
#[derive(Debug, Clone)]
enum Slots {
    /// Masks indexed by the rank of the other members' pattern.
    Table(Vec<u32>),
    Direct(Forbidden),
}

/// Lehmer rank of a sequence of distinct values.
fn lehmer_rank(seq: &[u8]) -> u64 {
    let k = seq.len();
    let mut rank = 0u64;
    for i in 0..k {
        let smaller_after = seq[i + 1..].iter().filter(|&&v| v < seq[i]).count() as u64;
        rank = rank * (k - i) as u64 + smaller_after;
    }
    rank
}

/// Slot mask for the largest member `k` inserted into `others`, a pattern of
/// `1..k-1`.
fn slot_mask(others: &[u8], forbidden: &Forbidden) -> u32 {
    let k = others.len() + 1;
    let mut full = [0u8; MAX_ARITY];
    let mut bits = 0;
    for s in 0..k {
        full[..s].copy_from_slice(&others[..s]);
        full[s] = k as u8;
        full[s + 1..k].copy_from_slice(&others[s..]);
        if forbidden.contains(lehmer_rank(&full[..k])) {
            bits |= 1 << s;
        }
    }
    bits
}

impl Slots {
    fn new(k: usize, forbidden: Forbidden) -> Self {
        if k > TABLE_MAX_ARITY {
            return Slots::Direct(forbidden);
        }
        let mut table = vec![0; (1..k).product()];
        for p in LinearOrder::all(k - 1) {
            table[lehmer_rank(p.as_slice()) as usize] = slot_mask(p.as_slice(), &forbidden);
        }
        Slots::Table(table)
    }

    fn mask(&self, others: &[u8]) -> u32 {
        match self {
            Slots::Table(t) => t[lehmer_rank(others) as usize],
            Slots::Direct(f) => slot_mask(others, f),
        }
    }
}

#[derive(Debug, Clone)]
struct Check {
    /// Tuple members other than its maximum, ascending.
    others: Vec<u8>,
    /// Index into [`Compiled::laws`].
    law: usize,
}

/// Constraint list preprocessed for incremental checking.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    n: usize,
    k: usize,
    /// `levels[m]` holds the assigned entries whose largest element is `m`.
    levels: Vec<Vec<Check>>,
    last_active: usize,
    /// Distinct laws, shared between entries.
    laws: Vec<Slots>,
    law_ids: BTreeMap<Forbidden, usize>,
}

impl Compiled {
    fn empty(n: usize, k: usize) -> Self {
        Self { n, k, levels: vec![Vec::new(); n + 1], last_active: 0, laws: Vec::new(), law_ids: BTreeMap::new() }
    }

    pub(crate) fn new(constraints: &ConstraintList) -> Result<Self> {
        let (n, k) = (constraints.n(), constraints.k());
        if k > MAX_ARITY {
            return Err(invalid(format!("tuple arity {k} exceeds {MAX_ARITY}")));
        }
        let mut compiled = Self::empty(n, k);
        let fits_mask = (1..=k as u64).product::<u64>() <= 64;
        for e in constraints.entries() {
            let Some(law) = &e.law else { continue };
            let mut ranks: Vec<u64> = law.patterns().iter().map(Pattern::lex_rank).collect();
            ranks.sort_unstable();
            let forbidden = if fits_mask {
                Forbidden::Mask(ranks.iter().fold(0, |m, &r| m | 1 << r))
            } else {
                Forbidden::Ranks(ranks)
            };
            compiled.push(e.tuple.elements(), forbidden);
        }
        Ok(compiled)
    }

    /// Triples with never rules, skipping the construction of [`Law`] values.
    ///
    /// [`Law`]: crate::types::Law
    pub(crate) fn from_rules<'a>(n: usize, rules: impl IntoIterator<Item = (&'a [u8], NeverRule)>) -> Self {
        let mut compiled = Self::empty(n, 3);
        for (triple, rule) in rules {
            let mask = rule.forbidden_patterns().iter().fold(0, |m, p| m | 1 << p.lex_rank());
            compiled.push(triple, Forbidden::Mask(mask));
        }
        compiled
    }

    fn push(&mut self, elems: &[u8], forbidden: Forbidden) {
        let law = match self.law_ids.get(&forbidden) {
            Some(&id) => id,
            None => {
                let id = self.laws.len();
                self.laws.push(Slots::new(self.k, forbidden.clone()));
                self.law_ids.insert(forbidden, id);
                id
            }
        };
        let m = *elems.last().expect("tuples are non-empty") as usize;
        self.levels[m].push(Check { others: elems[..elems.len() - 1].to_vec(), law });
        self.last_active = self.last_active.max(m);
    }

    /// Sets `blocked[at]` for every insertion point `at` of `m` that violates
    /// a level-`m` law. `pos[x - 1]` is the current position of `x < m`.
    fn mark_blocked(&self, m: usize, pos: &[usize], blocked: &mut Vec<bool>) {
        blocked.clear();
        blocked.resize(m, false);
        let k = self.k;
        let mut members = [(0usize, 0u8); MAX_ARITY];
        let mut pattern = [0u8; MAX_ARITY];
        for check in &self.levels[m] {
            let others = &mut members[..k - 1];
            for (slot, (r, &x)) in others.iter_mut().zip(check.others.iter().enumerate()) {
                *slot = (pos[x as usize - 1], r as u8 + 1);
            }
            others.sort_unstable();
            for (p, &(_, r)) in pattern.iter_mut().zip(others.iter()) {
                *p = r;
            }
            let bits = self.laws[check.law].mask(&pattern[..k - 1]);
            if bits == 0 {
                continue;
            }
            for s in (0..k).filter(|s| bits >> s & 1 == 1) {
                let lo = if s == 0 { 0 } else { others[s - 1].0 + 1 };
                let hi = if s == k - 1 { m - 1 } else { others[s].0 };
                blocked[lo..=hi].fill(true);
            }
        }
    }

    fn children(&self, order: &[u8]) -> impl Iterator<Item = Vec<u8>> + '_ {
        let m = order.len() + 1;
        let mut pos = vec![0; m];
        for (i, &x) in order.iter().enumerate() {
            pos[x as usize - 1] = i;
        }
        let mut blocked = Vec::new();
        self.mark_blocked(m, &pos, &mut blocked);
        let order = order.to_vec();
        (0..m).filter(move |&at| !blocked[at]).map(move |at| {
            let mut child = order.clone();
            child.insert(at, m as u8);
            child
        })
    }

    fn roots(&self) -> Vec<Vec<u8>> {
        match self.n {
            0 => vec![vec![]],
            1 => vec![vec![1]],
            _ => vec![vec![1, 2], vec![2, 1]],
        }
    }

    /// Members of the subtree below `order`, depth first. `scratch[m]` is a
    /// reusable buffer for level `m`.
    fn count_below<C: Counter>(
        &self,
        order: &mut Vec<u8>,
        pos: &mut [usize],
        tails: &[Option<C>],
        scratch: &mut [Vec<bool>],
    ) -> Result<C> {
        let m = order.len() + 1;
        if m > self.last_active {
            return tails[m.min(self.n + 1)].ok_or(Error::Overflow);
        }
        let mut blocked = std::mem::take(&mut scratch[m]);
        self.mark_blocked(m, pos, &mut blocked);
        let mut total = C::zero();
        for at in (0..m).filter(|&at| !blocked[at]) {
            order.insert(at, m as u8);
            for (j, &x) in order.iter().enumerate().skip(at) {
                pos[x as usize - 1] = j;
            }
            let below = self.count_below(order, pos, tails, scratch);
            order.remove(at);
            for (j, &x) in order.iter().enumerate().skip(at) {
                pos[x as usize - 1] = j;
            }
            total = total.checked_add(&below?).ok_or(Error::Overflow)?;
        }
        scratch[m] = blocked;
        Ok(total)
    }

    /// `tails[m]` is the number of unconstrained completions of an order of
    /// `1..=m-1`, i.e. `m * (m + 1) * ... * n`.
    fn tails<C: Counter>(&self) -> Vec<Option<C>> {
        (0..=self.n + 1).map(|m| rising_product(m.max(1), self.n)).collect()
    }

    fn count_from<C: Counter>(&self, start: &[u8], tails: &[Option<C>]) -> Result<C> {
        let mut order = start.to_vec();
        order.reserve(self.n);
        let mut pos = vec![0; self.n.max(1)];
        for (i, &x) in order.iter().enumerate() {
            pos[x as usize - 1] = i;
        }
        let mut scratch = vec![Vec::new(); self.n + 1];
        self.count_below(&mut order, &mut pos, tails, &mut scratch)
    }

    pub(crate) fn count<C: Counter>(&self) -> Result<C> {
        let tails = self.tails::<C>();
        self.roots().iter().try_fold(C::zero(), |acc, root| {
            acc.checked_add(&self.count_from(root, &tails)?).ok_or(Error::Overflow)
        })
    }

    fn count_parallel<C: Counter>(&self, jobs: usize) -> Result<C> {
        // Expand breadth first until there is enough independent work.
        let mut frontier = self.roots();
        let mut level = frontier.first().map_or(0, Vec::len);
        while level < self.last_active && frontier.len() < 16 * jobs {
            frontier = frontier.iter().flat_map(|o| self.children(o)).collect();
            level += 1;
        }
        let tails = self.tails::<C>();
        frontier
            .par_iter()
            .map(|o| self.count_from::<C>(o, &tails))
            .try_reduce(C::zero, |a, b| a.checked_add(&b).ok_or(Error::Overflow))
    }

    fn build(&self) -> Vec<Vec<u8>> {
        let mut level = self.roots();
        let start = level[0].len();
        for _ in start..self.n {
            level = level.iter().flat_map(|o| self.children(o)).collect();
        }
        level
    }

    fn build_parallel(&self) -> Vec<Vec<u8>> {
        let mut level = self.roots();
        let start = level[0].len();
        for _ in start..self.n {
            level = level.par_iter().flat_map_iter(|o| self.children(o)).collect();
        }
        level
    }
}

/// All orders of `1..=m` obtained by inserting `m = order.len() + 1` into
/// `order` that satisfy `constraints`, in insertion-position order.
///
/// Equivalent to filtering every insertion with [`satisfies`]: if `order`
/// itself violates a law, no extension survives.
pub fn extend(order: &LinearOrder, constraints: &ConstraintList) -> Result<Vec<LinearOrder>> {
    let m = order.len() + 1;
    if m > constraints.n() {
        return Err(invalid(format!("cannot extend an order of length {} beyond n = {}", order.len(), constraints.n())));
    }
    if !satisfies(order, constraints) {
        return Ok(Vec::new());
    }
    let compiled = Compiled::new(constraints)?;
    Ok(compiled.children(order.as_slice()).map(LinearOrder::from_vec_unchecked).collect())
}

/// Every order of `1..=n` that satisfies all assigned laws, sorted.
pub fn build_domain(constraints: &ConstraintList) -> Result<Domain> {
    let compiled = Compiled::new(constraints)?;
    Ok(into_domain(constraints.n(), compiled.build()))
}

/// [`build_domain`] with each breadth-first level expanded on `jobs` threads.
pub fn build_domain_par(constraints: &ConstraintList, jobs: usize) -> Result<Domain> {
    let compiled = Compiled::new(constraints)?;
    let orders = with_pool(jobs, || compiled.build_parallel())?;
    Ok(into_domain(constraints.n(), orders))
}

fn into_domain(n: usize, orders: Vec<Vec<u8>>) -> Domain {
    let mut orders: Vec<LinearOrder> = orders.into_iter().map(LinearOrder::from_vec_unchecked).collect();
    orders.sort_unstable();
    Domain::from_sorted_unchecked(n, orders)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Number of members of the domain, counted depth first without storing it.
pub fn size(constraints: &ConstraintList) -> Result<Count> {
    size_as(constraints)
}

pub fn size_as<C: Counter>(constraints: &ConstraintList) -> Result<C> {
    Compiled::new(constraints)?.count()
}

/// [`size`] with independent subtrees counted on `jobs` threads.
pub fn size_par(constraints: &ConstraintList, jobs: usize) -> Result<Count> {
    size_par_as(constraints, jobs)
}

pub fn size_par_as<C: Counter>(constraints: &ConstraintList, jobs: usize) -> Result<C> {
    let compiled = Compiled::new(constraints)?;
    if jobs <= 1 {
        return compiled.count();
    }
    with_pool(jobs, || compiled.count_parallel(jobs))?
}

fn check_tuples(domain: &Domain, tuples: &[KTuple]) -> Result<()> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    match tuples.iter().find(|t| t.largest() as usize > domain.n()) {
        Some(t) => Err(invalid(format!("tuple {t} is not within 1..{}", domain.n()))),
        None => Ok(()),
    }
}

/// For each tuple, the patterns that no member of `domain` realizes.
pub fn domain_to_rules(domain: &Domain, tuples: &[KTuple]) -> Result<BTreeMap<KTuple, BTreeSet<Pattern>>> {
    check_tuples(domain, tuples)?;
    Ok(tuples
        .iter()
        .map(|t| {
            let realized: BTreeSet<Pattern> = domain.orders().iter().map(|o| restrict(o, t).unwrap()).collect();
            let missing = Pattern::all(t.arity()).into_iter().filter(|p| !realized.contains(p)).collect();
            (t.clone(), missing)
        })
        .collect())
}

/// For each triple, every never rule satisfied by all members of `domain`.
pub fn domain_to_never_rules(domain: &Domain, triples: &[KTuple]) -> Result<BTreeMap<KTuple, BTreeSet<NeverRule>>> {
    check_tuples(domain, triples)?;
    if let Some(t) = triples.iter().find(|t| t.arity() != 3) {
        return Err(invalid(format!("never rules need triples, got {t}")));
    }
    Ok(triples
        .iter()
        .map(|t| {
            let mut realized = [[false; 3]; 3];
            for o in domain.orders() {
                let p = restrict(o, t).unwrap();
                for (pos, &rank) in p.as_slice().iter().enumerate() {
                    realized[rank as usize - 1][pos] = true;
                }
            }
            let rules = NeverRule::all()
                .into_iter()
                .filter(|r| !realized[r.rank() as usize - 1][r.position() as usize - 1])
                .collect();
            (t.clone(), rules)
        })
        .collect())
}

/// Every triple of `domain` satisfies at least one never rule.
pub fn is_condorcet(domain: &Domain) -> bool {
    if domain.is_empty() {
        return true;
    }
    let triples = crate::orderings::all_tuples(domain.n(), 3);
    domain_to_never_rules(domain, &triples)
        .map(|rules| rules.values().all(|r| !r.is_empty()))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ConstraintEntry, Law};

    fn order(s: &[u8]) -> LinearOrder {
        LinearOrder::new(s.to_vec()).unwrap()
    }

    fn tuple(s: &[u8]) -> KTuple {
        KTuple::new(s.to_vec()).unwrap()
    }

    fn pattern(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn trs_3n1() -> ConstraintList {
        ConstraintList::from_entries(3, 3, vec![ConstraintEntry { tuple: tuple(&[1, 2, 3]), law: Some(NeverRule::N3N1.into()) }])
            .unwrap()
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(restrict(&order(&[1, 2, 3, 4]), &tuple(&[1, 3, 4])).unwrap(), pattern("123"));
        assert_eq!(restrict(&order(&[2, 4, 1, 3]), &tuple(&[1, 2, 4])).unwrap(), pattern("231"));
        assert_eq!(restrict(&order(&[3, 2, 1]), &tuple(&[1, 2, 3])).unwrap(), pattern("321"));
        assert!(restrict(&order(&[1, 2, 3]), &tuple(&[1, 2, 4])).is_err());
    }

    #[test]
    fn rule_to_patterns_examples() {
        let set = |r: NeverRule| -> Vec<String> { r.forbidden_patterns().iter().map(|p| p.to_string()).collect() };
        assert_eq!(set(NeverRule::N3N1), ["3-1-2", "3-2-1"]);
        assert_eq!(set(NeverRule::N2N3), ["1-3-2", "3-1-2"]);
        assert_eq!(set(NeverRule::N1N1), ["1-2-3", "1-3-2"]);
    }

    #[test]
    fn each_pattern_forbidden_by_three_rules() {
        for p in Pattern::all(3) {
            assert_eq!(NeverRule::all().iter().filter(|r| r.forbids(&p)).count(), 3);
        }
    }

    #[test]
    fn satisfies_examples() {
        let t = trs_3n1();
        assert!(satisfies(&order(&[1, 2, 3]), &t));
        assert!(!satisfies(&order(&[3, 1, 2]), &t));
        assert!(satisfies(&order(&[3, 2, 1]), &t.unassigned()));
        // entries outside the support are dormant
        assert!(satisfies(&order(&[2, 1]), &t));
    }

    #[test]
    fn extend_examples() {
        let seqs = |v: Vec<LinearOrder>| v.into_iter().map(|o| o.into_vec()).collect::<Vec<_>>();
        let empty = ConstraintList::empty(3, 3).unwrap();
        assert_eq!(seqs(extend(&order(&[1, 2]), &empty).unwrap()), [vec![3, 1, 2], vec![1, 3, 2], vec![1, 2, 3]]);
        assert_eq!(seqs(extend(&order(&[1, 2]), &trs_3n1()).unwrap()), [vec![1, 3, 2], vec![1, 2, 3]]);
        assert_eq!(seqs(extend(&order(&[2, 1]), &trs_3n1()).unwrap()), [vec![2, 3, 1], vec![2, 1, 3]]);
        assert!(extend(&order(&[1, 2, 3]), &trs_3n1()).is_err());
    }

    #[test]
    fn build_domain_examples() {
        assert_eq!(build_domain(&ConstraintList::empty(3, 3).unwrap()).unwrap().len(), 6);
        let d = build_domain(&trs_3n1()).unwrap();
        let expect = Domain::from_sequences(3, &[&[1, 2, 3], &[1, 3, 2], &[2, 1, 3], &[2, 3, 1]]).unwrap();
        assert_eq!(d, expect);
        assert_eq!(build_domain(&ConstraintList::empty(0, 3).unwrap()).unwrap().len(), 1);
        assert_eq!(build_domain(&ConstraintList::empty(1, 3).unwrap()).unwrap().len(), 1);
        assert_eq!(build_domain(&ConstraintList::empty(2, 3).unwrap()).unwrap().len(), 2);
    }

    #[test]
    fn size_counts_catalan_for_231() {
        assert_eq!(size(&ConstraintList::empty(4, 3).unwrap()).unwrap(), 24);
        let avoid = crate::orderings::init_tuples(4, 3, crate::orderings::TupleOrdering::Lex).unwrap();
        let avoid = crate::orderings::init_by_scheme(&avoid, |_: &KTuple| Ok::<_, String>(Law::single(pattern("231"))))
            .unwrap();
        assert_eq!(size(&avoid).unwrap(), 14);
    }

    #[test]
    fn size_overflow_is_reported() {
        assert_eq!(size(&ConstraintList::empty(20, 3).unwrap()).unwrap(), 2_432_902_008_176_640_000);
        assert_eq!(size(&ConstraintList::empty(21, 3).unwrap()), Err(Error::Overflow));
        assert_eq!(size_as::<u128>(&ConstraintList::empty(21, 3).unwrap()).unwrap(), 51_090_942_171_709_440_000);
        assert_eq!(size_as::<u8>(&ConstraintList::empty(6, 3).unwrap()), Err(Error::Overflow));
    }

    #[test]
    fn domain_to_rules_examples() {
        let t = [tuple(&[1, 2, 3])];
        let single = Domain::from_sequences(3, &[&[1, 2, 3]]).unwrap();
        let rules: Vec<String> = domain_to_never_rules(&single, &t).unwrap()[&t[0]].iter().map(|r| r.to_string()).collect();
        assert_eq!(rules, ["1N2", "1N3", "2N1", "2N3", "3N1", "3N2"]);
        let two = Domain::from_sequences(3, &[&[1, 2, 3], &[1, 3, 2]]).unwrap();
        let rules: Vec<String> = domain_to_never_rules(&two, &t).unwrap()[&t[0]].iter().map(|r| r.to_string()).collect();
        assert_eq!(rules, ["1N2", "1N3", "2N1", "3N1"]);
        let missing = &domain_to_rules(&two, &t).unwrap()[&t[0]];
        assert_eq!(missing.len(), 4);
        assert!(domain_to_never_rules(&Domain::new(3, vec![]).unwrap(), &t).is_err());
    }

    #[test]
    fn is_condorcet_examples() {
        assert!(is_condorcet(&Domain::from_sequences(3, &[&[1, 2, 3]]).unwrap()));
        assert!(!is_condorcet(&Domain::full(3)));
        let d = Domain::from_sequences(3, &[&[1, 2, 3], &[2, 1, 3], &[2, 3, 1], &[3, 2, 1]]).unwrap();
        assert!(is_condorcet(&d));
        let t = tuple(&[1, 2, 3]);
        assert!(domain_to_never_rules(&d, std::slice::from_ref(&t)).unwrap()[&t].contains(&NeverRule::N2N3));
    }
}
