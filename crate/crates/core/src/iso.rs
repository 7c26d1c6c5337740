//! Relabelling of alternatives: isomorphic copies of domains, the
//! lexicographically smallest isomorph as a normal form, and minimality of
//! never-rule assignments under relabelling.
//!
//! A relabelling `g` maps the member `(q1, ..., qn)` to `(g(q1), ..., g(qn))`.
//! Relabelling a domain by `p⁻¹` for a member `p` turns `p` into the identity
//! order. The smallest isomorph always contains the identity, so it is the
//! smallest of those `|D|` candidates.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::subsets::State;
use crate::types::{ConstraintList, Domain, KTuple, LinearOrder, NeverRule};

/// A permutation of the alternatives `1..=n`; `apply(x)` is the new label of `x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relabeling(Vec<u8>);

impl Relabeling {
    /// `images[x - 1]` is the image of alternative `x`.
    pub fn new(images: Vec<u8>) -> Result<Self> {
        LinearOrder::new(images).map(|o| Self(o.into_vec()))
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n as u8).collect())
    }

    /// The relabelling sending `order` to the identity order.
    pub fn inverse_of(order: &LinearOrder) -> Self {
        let mut g = vec![0; order.len()];
        for (i, &x) in order.as_slice().iter().enumerate() {
            g[x as usize - 1] = i as u8 + 1;
        }
        Self(g)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: u8) -> u8 {
        self.0[x as usize - 1]
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &y) in self.0.iter().enumerate() {
            inv[y as usize - 1] = i as u8 + 1;
        }
        Self(inv)
    }

    /// `self` after `first`: `x ↦ self(first(x))`.
    pub fn after(&self, first: &Relabeling) -> Self {
        Self(first.0.iter().map(|&y| self.apply(y)).collect())
    }

    /// All `n!` relabellings, lexicographically.
    pub fn all(n: usize) -> impl Iterator<Item = Relabeling> {
        (1..=n as u8).permutations(n).map(Relabeling)
    }

    fn apply_order(&self, order: &LinearOrder) -> LinearOrder {
        LinearOrder::from_vec_unchecked(order.as_slice().iter().map(|&x| self.apply(x)).collect())
    }
}

impl fmt::Display for Relabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.iter().map(u8::to_string).join(" "))
    }
}

/// Applies `g` to every member and re-sorts.
pub fn relabel_domain(domain: &Domain, g: &Relabeling) -> Result<Domain> {
    if g.n() != domain.n() {
        return Err(invalid(format!("relabelling on {} alternatives applied to a domain on {}", g.n(), domain.n())));
    }
    Ok(relabel_unchecked(domain, g))
}

fn relabel_unchecked(domain: &Domain, g: &Relabeling) -> Domain {
    let mut orders: Vec<LinearOrder> = domain.orders().iter().map(|o| g.apply_order(o)).collect();
    orders.sort_unstable();
    Domain::from_sorted_unchecked(domain.n(), orders)
}

/// The distinct domains `p⁻¹(D)` for `p ∈ D`, sorted; each contains the
/// identity order.
pub fn isomorphic_domains(domain: &Domain) -> Result<Vec<Domain>> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut out: Vec<Domain> =
        domain.orders().iter().map(|p| relabel_unchecked(domain, &Relabeling::inverse_of(p))).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The lexicographically smallest domain isomorphic to `domain`.
pub fn isomorphic_hash(domain: &Domain) -> Result<Domain> {
    isomorphic_hash_with_witness(domain).map(|(d, _)| d)
}

/// The normal form together with a relabelling that produces it.
pub fn isomorphic_hash_with_witness(domain: &Domain) -> Result<(Domain, Relabeling)> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(domain
        .orders()
        .iter()
        .map(|p| {
            let g = Relabeling::inverse_of(p);
            (relabel_unchecked(domain, &g), g)
        })
        .min()
        .expect("domain is non-empty"))
}

/// Keeps the first domain of every isomorphism class, in input order.
///
/// Each kept domain generates its copies `p⁻¹(A)`; later domains are
/// compared through one copy of their own containing the identity, which
/// lies among those copies exactly when the two domains are isomorphic.
pub fn non_isomorphic_domains(domains: &[Domain]) -> Vec<Domain> {
    let anchors: Vec<Option<Domain>> = domains
        .iter()
        .map(|d| d.orders().first().map(|p| relabel_unchecked(d, &Relabeling::inverse_of(p))))
        .collect();
    let mut deleted = vec![false; domains.len()];
    let mut kept = Vec::new();
    for (i, a) in domains.iter().enumerate() {
        if deleted[i] {
            continue;
        }
        kept.push(a.clone());
        if a.is_empty() {
            for j in i + 1..domains.len() {
                deleted[j] |= domains[j].is_empty() && domains[j].n() == a.n();
            }
            continue;
        }
        let copies: HashSet<Domain> = isomorphic_domains(a).expect("non-empty").into_iter().collect();
        for j in i + 1..domains.len() {
            if deleted[j] || domains[j].n() != a.n() || domains[j].len() != a.len() {
                continue;
            }
            if anchors[j].as_ref().is_some_and(|c| copies.contains(c)) {
                deleted[j] = true;
            }
        }
    }
    kept
}

fn check_trs(constraints: &ConstraintList) -> Result<()> {
    if !constraints.is_trs() {
        return Err(invalid("expected a list of triples carrying never rules"));
    }
    Ok(())
}

/// The image of a triple and its rule under `g`: the triple `{g(i), g(j), g(k)}`
/// with the rank of `g(x)` in place of `x`'s rank; the position is kept.
fn transform_rule(tuple: &KTuple, rule: NeverRule, g: &Relabeling) -> (KTuple, NeverRule) {
    let x = tuple.elements()[rule.rank() as usize - 1];
    let image = KTuple::from_unsorted(tuple.elements().iter().map(|&y| g.apply(y)).collect()).expect("bijection");
    let rank = image.rank_of(g.apply(x)).expect("image contains g(x)");
    (image, NeverRule::new(rank, rule.position()).expect("valid rank"))
}

/// Moves every rule along `g`, keeping the list's own triple order.
pub fn transform_trs(constraints: &ConstraintList, g: &Relabeling) -> Result<ConstraintList> {
    check_trs(constraints)?;
    if g.n() != constraints.n() {
        return Err(invalid(format!("relabelling on {} alternatives, list on {}", g.n(), constraints.n())));
    }
    let mut out = constraints.unassigned();
    for e in constraints.entries() {
        let Some(rule) = e.rule() else { continue };
        let (image, rule) = transform_rule(&e.tuple, rule, g);
        let at = out
            .position_of(&image)
            .ok_or_else(|| Error::NotFound(format!("image triple {image} is not in the list")))?;
        out.set_law(at, Some(rule.into()))?;
    }
    Ok(out)
}

/// Dense lookup from a triple to its index in a reference list.
struct TripleIndex {
    n: usize,
    table: Vec<u32>,
}

impl TripleIndex {
    fn new(reference: &ConstraintList) -> Result<Self> {
        let n = reference.n();
        let mut table = vec![u32::MAX; (n + 1).pow(3)];
        for (i, e) in reference.entries().iter().enumerate() {
            let t = e.tuple.elements();
            table[(t[0] as usize * (n + 1) + t[1] as usize) * (n + 1) + t[2] as usize] = i as u32;
        }
        let expected = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
        if reference.k() != 3 || reference.len() != expected {
            return Err(invalid("expected a list holding every triple of 1..n"));
        }
        Ok(Self { n, table })
    }

    fn get(&self, t: [u8; 3]) -> usize {
        let n1 = self.n + 1;
        self.table[(t[0] as usize * n1 + t[1] as usize) * n1 + t[2] as usize] as usize
    }
}

/// How one relabelling moves the codes of a reference triple list: target
/// slot `i` receives the code of slot `src[i]` with ranks renamed by `ranks[i]`.
#[derive(Debug, Clone)]
struct Action {
    src: Vec<u16>,
    ranks: Vec<[u8; 3]>,
}

impl Action {
    fn new(index: &TripleIndex, reference: &ConstraintList, g: &Relabeling) -> Self {
        let len = reference.len();
        let mut src = vec![0u16; len];
        let mut ranks = vec![[0u8; 3]; len];
        for (j, e) in reference.entries().iter().enumerate() {
            let t = e.tuple.elements();
            let img = [g.apply(t[0]), g.apply(t[1]), g.apply(t[2])];
            let mut sorted = img;
            sorted.sort_unstable();
            let target = index.get(sorted);
            src[target] = j as u16;
            for r in 0..3 {
                ranks[target][r] = sorted.iter().position(|&y| y == img[r]).unwrap() as u8 + 1;
            }
        }
        Self { src, ranks }
    }

    #[inline]
    fn code_at(&self, codes: &[u8], i: usize) -> u8 {
        match codes[self.src[i] as usize] {
            0 => 0,
            c => {
                let (rank, pos) = ((c - 1) / 3, (c - 1) % 3);
                3 * (self.ranks[i][rank as usize] - 1) + pos + 1
            }
        }
    }

    /// Compares the transformed code list with `codes`, unassigned lowest.
    fn compare(&self, codes: &[u8]) -> Ordering {
        for (i, &c) in codes.iter().enumerate() {
            match self.code_at(codes, i).cmp(&c) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    /// True when the transformed list is smaller than `codes` for every way
    /// of filling in the unassigned slots: the first slot that differs must
    /// come before any slot that is unassigned on either side.
    fn strictly_below_all_completions(&self, codes: &[u8]) -> bool {
        for (i, &c) in codes.iter().enumerate() {
            let t = self.code_at(codes, i);
            if c == 0 || t == 0 {
                return false;
            }
            match t.cmp(&c) {
                Ordering::Equal => continue,
                Ordering::Less => return true,
                Ordering::Greater => return false,
            }
        }
        false
    }

    fn maps_rules_into(&self, allowed: &[bool; 10]) -> bool {
        self.ranks.iter().all(|r| {
            (1..=9u8).filter(|&c| allowed[c as usize]).all(|c| {
                let (rank, pos) = ((c - 1) / 3, (c - 1) % 3);
                allowed[(3 * (r[rank as usize] - 1) + pos + 1) as usize]
            })
        })
    }
}

/// Is the code list of `constraints` no larger than that of any relabelled
/// copy, comparing in the list's triple order with unassigned below every rule?
///
/// Enumerates all `n!` relabellings; `constraints` must hold every triple.
pub fn is_trs_lex_minimal(constraints: &ConstraintList) -> Result<bool> {
    check_trs(constraints)?;
    let index = TripleIndex::new(constraints)?;
    let codes = crate::subsets::trs_to_state(constraints)?;
    Ok(Relabeling::all(constraints.n())
        .all(|g| Action::new(&index, constraints, &g).compare(codes.codes()) != Ordering::Less))
}

/// Largest `n` for which a [`SymmetryGroup`] is materialized.
pub const MAX_GROUP_N: usize = 8;

/// Precomputed actions of a group of relabellings on the states of a fixed
/// triple list.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    actions: Vec<Action>,
}

impl SymmetryGroup {
    /// Every relabelling of `1..=n`.
    pub fn full(reference: &ConstraintList) -> Result<Self> {
        Self::preserving(reference, &NeverRule::all())
    }

    /// The relabellings that send every rule in `rules`, on every triple, to a
    /// rule in `rules`. Searches restricted to `rules` are closed under this
    /// group; for all nine rules it is the full symmetric group.
    pub fn preserving(reference: &ConstraintList, rules: &[NeverRule]) -> Result<Self> {
        if reference.n() > MAX_GROUP_N {
            return Err(invalid(format!("symmetry groups are limited to n <= {MAX_GROUP_N}")));
        }
        let index = TripleIndex::new(reference)?;
        let mut allowed = [false; 10];
        for r in rules {
            allowed[r.code() as usize] = true;
        }
        let actions = Relabeling::all(reference.n())
            .skip(1) // identity
            .map(|g| Action::new(&index, reference, &g))
            .filter(|a| a.maps_rules_into(&allowed))
            .collect();
        Ok(Self { actions })
    }

    /// Group order, identity included.
    pub fn order(&self) -> usize {
        self.actions.len() + 1
    }

    /// Minimality with unassigned codes below every rule.
    pub fn is_lex_minimal(&self, state: &State) -> bool {
        self.actions.iter().all(|a| a.compare(state.codes()) != Ordering::Less)
    }

    /// True when some group element beats `state` no matter how its
    /// unassigned triples are filled in, so no completion is minimal.
    pub fn rejects(&self, state: &State) -> bool {
        self.actions.iter().any(|a| a.strictly_below_all_completions(state.codes()))
    }
}
