//! Brute-force oracles shared by the integration tests. They only use the
//! library's data types, never its counting or canonicalization code.
#![allow(dead_code)]

use cdomain::orderings::{init_tuples, TupleOrdering};
use cdomain::{ConstraintEntry, ConstraintList, Domain, KTuple, Law, LinearOrder, NeverRule, Pattern};
use rand::seq::SliceRandom;
use rand::Rng;

/// All orders of `1..=n`, sorted.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, left: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (1..=n as u8).collect(), &mut out);
    out
}

/// Ranks (1 = smallest) of the tuple's members in the order they appear.
pub fn pattern_of(order: &[u8], tuple: &[u8]) -> Vec<u8> {
    order
        .iter()
        .filter(|x| tuple.contains(x))
        .map(|x| tuple.iter().filter(|&y| y <= x).count() as u8)
        .collect()
}

pub fn allowed(order: &[u8], list: &ConstraintList) -> bool {
    list.entries().iter().all(|e| match &e.law {
        None => true,
        Some(law) => {
            let p = pattern_of(order, e.tuple.elements());
            !law.patterns().iter().any(|q| q.as_slice() == p.as_slice())
        }
    })
}

pub fn brute_force_domain(list: &ConstraintList) -> Vec<Vec<u8>> {
    permutations(list.n()).into_iter().filter(|o| allowed(o, list)).collect()
}

pub fn brute_force_size(list: &ConstraintList) -> u64 {
    brute_force_domain(list).len() as u64
}

pub fn orders_of(domain: &Domain) -> Vec<Vec<u8>> {
    domain.orders().iter().map(|o| o.as_slice().to_vec()).collect()
}

pub fn domain_of(n: usize, orders: &[Vec<u8>]) -> Domain {
    Domain::new(n, orders.iter().map(|o| LinearOrder::new(o.clone()).unwrap()).collect()).unwrap()
}

/// `g[x - 1]` is the new name of `x`.
pub fn relabel(orders: &[Vec<u8>], g: &[u8]) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = orders.iter().map(|o| o.iter().map(|&x| g[x as usize - 1]).collect()).collect();
    out.sort();
    out
}

/// Smallest sorted relabelled copy over all `n!` relabellings.
pub fn brute_force_hash(orders: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    permutations(n).iter().map(|g| relabel(orders, g)).min().unwrap()
}

/// Code list of the relabelled TRS, in the triple order of `list`.
pub fn transformed_codes(list: &ConstraintList, g: &[u8]) -> Vec<u8> {
    let mut codes = vec![0u8; list.len()];
    for e in list.entries() {
        let Some(rule) = e.rule() else { continue };
        let t = e.tuple.elements();
        let x = t[rule.rank() as usize - 1];
        let mut image: Vec<u8> = t.iter().map(|&y| g[y as usize - 1]).collect();
        image.sort();
        let rank = image.iter().position(|&y| y == g[x as usize - 1]).unwrap() as u8 + 1;
        let at = list.entries().iter().position(|f| f.tuple.elements() == image.as_slice()).unwrap();
        codes[at] = 3 * (rank - 1) + rule.position();
    }
    codes
}

pub fn codes(list: &ConstraintList) -> Vec<u8> {
    list.entries().iter().map(|e| e.rule().map_or(0, NeverRule::code)).collect()
}

/// Lexicographic minimality over all relabellings, unassigned lowest.
pub fn brute_force_lex_minimal(list: &ConstraintList) -> bool {
    let own = codes(list);
    permutations(list.n()).iter().all(|g| transformed_codes(list, g) >= own)
}

/// Does the pairwise majority of three voters contain a cycle?
pub fn majority_cycle(voters: [&[u8]; 3], n: usize) -> bool {
    let beats = |a: u8, b: u8| {
        voters
            .iter()
            .filter(|v| v.iter().position(|&x| x == a) < v.iter().position(|&x| x == b))
            .count()
            >= 2
    };
    for a in 1..=n as u8 {
        for b in 1..=n as u8 {
            for c in 1..=n as u8 {
                if a != b && b != c && a != c && beats(a, b) && beats(b, c) && beats(c, a) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn random_rule(rng: &mut impl Rng) -> NeverRule {
    NeverRule::all()[rng.gen_range(0..9)]
}

/// Every triple in `ordering`, each assigned a rule from `rules` (or left
/// unassigned with probability `blank`).
pub fn random_trs(rng: &mut impl Rng, n: usize, ordering: TupleOrdering, rules: &[NeverRule], blank: f64) -> ConstraintList {
    let mut list = init_tuples(n, 3, ordering).unwrap();
    for i in 0..list.len() {
        if !rng.gen_bool(blank) {
            list.set_law(i, Some((*rules.choose(rng).unwrap()).into())).unwrap();
        }
    }
    list
}

/// A random law on `k`-tuples forbidding one to three patterns.
pub fn random_law(rng: &mut impl Rng, k: usize) -> Law {
    let all = Pattern::all(k);
    let count = rng.gen_range(1..=3);
    Law::new(all.choose_multiple(rng, count).cloned()).unwrap()
}

/// A random TRS or TLS over at most `max_n` alternatives: a random subset of
/// the tuples in random order, with random laws.
pub fn random_list(rng: &mut impl Rng, max_n: usize) -> ConstraintList {
    let n = rng.gen_range(3..=max_n);
    let trs = rng.gen_bool(0.5);
    let k = if trs { 3 } else { rng.gen_range(3..=n.min(5)) };
    let mut tuples: Vec<KTuple> = init_tuples(n, k, TupleOrdering::Lex).unwrap().entries().iter().map(|e| e.tuple.clone()).collect();
    tuples.shuffle(rng);
    let keep = rng.gen_range(tuples.len() / 2..=tuples.len());
    tuples.truncate(keep.max(1));
    let entries = tuples
        .into_iter()
        .map(|tuple| {
            let law = match rng.gen_range(0..4) {
                0 => None,
                _ if trs => Some(random_rule(rng).into()),
                _ => Some(random_law(rng, k)),
            };
            ConstraintEntry { tuple, law }
        })
        .collect();
    ConstraintList::from_entries(n, k, entries).unwrap()
}

/// A random non-empty set of orders of `1..=n`.
pub fn random_domain(rng: &mut impl Rng, n: usize) -> Vec<Vec<u8>> {
    let all = permutations(n);
    let count = rng.gen_range(1..=all.len().min(12));
    let mut orders: Vec<Vec<u8>> = all.choose_multiple(rng, count).cloned().collect();
    orders.sort();
    orders
}

pub fn random_relabeling(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    let mut g: Vec<u8> = (1..=n as u8).collect();
    g.shuffle(rng);
    g
}
