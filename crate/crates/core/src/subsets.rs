//! Numeric states of never-rule assignments and their restriction to
//! subsets of the alternatives.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::orderings::{init_tuples, TupleOrdering};
use crate::types::{ConstraintList, KTuple, NeverRule};

/// One code per triple of a reference list: `0` for unassigned, otherwise
/// the rule code `1..=9`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct State(Vec<u8>);

impl State {
    pub fn new(codes: Vec<u8>) -> Result<Self> {
        if let Some(c) = codes.iter().find(|&&c| c > 9) {
            return Err(Error::InvalidState(format!("code {c} outside 0..9")));
        }
        Ok(Self(codes))
    }

    pub fn unassigned(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn codes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn assigned_count(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn rule(&self, index: usize) -> Option<NeverRule> {
        match self.0[index] {
            0 => None,
            c => Some(NeverRule::from_code(c).expect("codes validated on construction")),
        }
    }

    pub(crate) fn set(&mut self, index: usize, rule: Option<NeverRule>) {
        self.0[index] = rule.map_or(0, NeverRule::code);
    }
}

/// Digits concatenated, one per triple.
impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let codes = s
            .trim()
            .bytes()
            .map(|b| {
                if b.is_ascii_digit() {
                    Ok(b - b'0')
                } else {
                    Err(Error::InvalidState(format!("`{}` is not a digit", b as char)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        State::new(codes)
    }
}

/// Encodes the rule of every entry; entries must be unassigned or carry the
/// pattern pair of a never rule.
pub fn trs_to_state(constraints: &ConstraintList) -> Result<State> {
    if constraints.k() != 3 {
        return Err(Error::InvalidState(format!("states need triples, got k = {}", constraints.k())));
    }
    let codes = constraints
        .entries()
        .iter()
        .map(|e| match &e.law {
            None => Ok(0),
            Some(law) => law
                .as_never_rule()
                .map(NeverRule::code)
                .ok_or_else(|| Error::InvalidState(format!("law {law} on {} is not a never rule", e.tuple))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(State(codes))
}

/// Decodes a state against all triples of `1..=n` sorted by `ordering`.
pub fn state_to_trs(state: &State, n: usize, ordering: TupleOrdering) -> Result<ConstraintList> {
    let base = init_tuples(n, 3, ordering)?;
    apply_state(&base, state)
}

/// Assigns `state`'s rules onto the triples of `reference`, in entry order.
pub fn apply_state(reference: &ConstraintList, state: &State) -> Result<ConstraintList> {
    if state.len() != reference.len() {
        return Err(Error::InvalidState(format!(
            "state has {} codes but the list has {} triples",
            state.len(),
            reference.len()
        )));
    }
    let mut out = reference.clone();
    for i in 0..state.len() {
        out.set_law(i, state.rule(i).map(Into::into))?;
    }
    Ok(out)
}

fn check_subset_size(constraints: &ConstraintList, t: usize) -> Result<()> {
    if constraints.k() != 3 {
        return Err(invalid("subset states are defined for triples only"));
    }
    if t < 3 || t > constraints.n() {
        return Err(invalid(format!("subset size {t} outside 3..={}", constraints.n())));
    }
    Ok(())
}

fn is_full_rz(constraints: &ConstraintList) -> bool {
    let reference = match init_tuples(constraints.n(), 3, TupleOrdering::Rz) {
        Ok(r) => r,
        Err(_) => return false,
    };
    reference.entries().iter().zip(constraints.entries()).all(|(a, b)| a.tuple == b.tuple)
        && reference.len() == constraints.len()
}

fn restricted_states(constraints: &ConstraintList, t: usize) -> Result<Vec<State>> {
    let mut codes: HashMap<&KTuple, u8> = HashMap::new();
    for e in constraints.entries() {
        let code = match &e.law {
            None => 0,
            Some(law) => law
                .as_never_rule()
                .map(NeverRule::code)
                .ok_or_else(|| Error::InvalidState(format!("law {law} on {} is not a never rule", e.tuple)))?,
        };
        codes.insert(&e.tuple, code);
    }
    let local = init_tuples(t, 3, TupleOrdering::Rz)?;
    Ok((1..=constraints.n() as u8)
        .combinations(t)
        .map(|subset| {
            // Relabelling is monotone, so rank/position rules carry over unchanged.
            let lifted = local.entries().iter().map(|e| {
                let tuple = KTuple::from_vec_unchecked(e.tuple.elements().iter().map(|&x| subset[x as usize - 1]).collect());
                codes.get(&tuple).copied().unwrap_or(0)
            });
            State(lifted.collect())
        })
        .collect())
}

/// The states of `constraints` restricted to every `t`-subset of the
/// alternatives, subsets in lexicographic order, each relabelled onto
/// `1..=t` with triples in RZ order.
///
/// `constraints` must list all triples in RZ order.
pub fn subset_states(constraints: &ConstraintList, t: usize) -> Result<Vec<State>> {
    check_subset_size(constraints, t)?;
    if !is_full_rz(constraints) {
        return Err(invalid("subset_states expects every triple in RZ order; use subset_states_any_ordering"));
    }
    restricted_states(constraints, t)
}

/// [`subset_states`] for triples in any order; missing triples count as
/// unassigned. Output states are always in RZ order.
pub fn subset_states_any_ordering(constraints: &ConstraintList, t: usize) -> Result<Vec<State>> {
    check_subset_size(constraints, t)?;
    restricted_states(constraints, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderings::assign_rule;

    fn tuple(s: &[u8]) -> KTuple {
        KTuple::new(s.to_vec()).unwrap()
    }

    #[test]
    fn state_examples() {
        let three = init_tuples(3, 3, TupleOrdering::Rz).unwrap();
        assert_eq!(trs_to_state(&three).unwrap().codes(), &[0]);
        let four = init_tuples(4, 3, TupleOrdering::Rz).unwrap();
        let t = assign_rule(&four, &tuple(&[1, 2, 3]), NeverRule::N3N1).unwrap();
        let s = trs_to_state(&t).unwrap();
        assert_eq!(s.codes(), &[7, 0, 0, 0]);
        assert_eq!(s.to_string(), "7000");
        assert_eq!(state_to_trs(&s, 4, TupleOrdering::Rz).unwrap(), t);
        assert_eq!(state_to_trs(&State::unassigned(4), 4, TupleOrdering::Rz).unwrap(), four);
    }

    #[test]
    fn state_errors() {
        assert!(State::new(vec![0, 10]).is_err());
        assert!("70a0".parse::<State>().is_err());
        assert!(state_to_trs(&State::unassigned(3), 4, TupleOrdering::Rz).is_err());
        let four = init_tuples(4, 3, TupleOrdering::Rz).unwrap();
        let odd = crate::orderings::assign_law(&four, &tuple(&[1, 2, 3]), crate::types::Law::single("123".parse().unwrap()))
            .unwrap();
        assert!(matches!(trs_to_state(&odd), Err(Error::InvalidState(_))));
    }

    #[test]
    fn subset_examples() {
        let four = init_tuples(4, 3, TupleOrdering::Rz).unwrap();
        let t = assign_rule(&four, &tuple(&[1, 2, 3]), NeverRule::new(1, 2).unwrap()).unwrap();
        let states: Vec<String> = subset_states(&t, 3).unwrap().iter().map(State::to_string).collect();
        assert_eq!(states, ["2", "0", "0", "0"]);
        assert_eq!(subset_states(&t, 4).unwrap(), vec![trs_to_state(&t).unwrap()]);
        assert!(subset_states(&t, 2).is_err());
        assert!(subset_states(&t, 5).is_err());
        let lex = init_tuples(5, 3, TupleOrdering::Lex).unwrap();
        assert!(subset_states(&lex, 4).is_err());
        assert!(subset_states_any_ordering(&lex, 4).unwrap().iter().all(|s| s.len() == 4));
    }
}
