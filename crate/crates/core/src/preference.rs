//! Axiom-based preferences of one country over strategy matrices.
//!
//! Every comparison reduces to a binary "goodness" reading of the states
//! the evaluator cares about: survival (safe or precarious) is good for the
//! evaluator and its friends, non-safety (unsafe or precarious) is good for
//! its adversaries. States of unrelated countries never matter.
//!
//! Orientation: `weakly_preferred(env, i, u, v)` means `v` is at least as
//! good as `u` for country `i`.

use std::collections::BTreeMap;

use crate::model::{Country, Environment, State, StateVector, StrategyMatrix, UnknownCountry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessVector {
    pub evaluator: Country,
    pub entries: BTreeMap<Country, bool>,
}

impl GoodnessVector {
    pub fn get(&self, j: Country) -> Option<bool> {
        self.entries.get(&j).copied()
    }

    /// Every coordinate good here is also good in `other`.
    pub fn dominated_by(&self, other: &GoodnessVector) -> bool {
        self.entries
            .iter()
            .all(|(j, &good)| !good || other.entries.get(j).copied().unwrap_or(false))
    }

    pub fn bad_coordinates(&self) -> impl Iterator<Item = Country> + '_ {
        self.entries.iter().filter(|(_, &g)| !g).map(|(&j, _)| j)
    }
}

/// Whether state `state` of country `j` is good from `i`'s perspective.
/// `None` when `j` is unrelated to `i`.
pub fn is_good_for(env: &Environment, i: Country, j: Country, state: State) -> Option<bool> {
    use crate::model::Relation;
    if i == j {
        return Some(state.survives());
    }
    match env.relation(i, j)? {
        Relation::Friend => Some(state.survives()),
        Relation::Adversary => Some(state != State::Safe),
    }
}

pub fn goodness_from_states(env: &Environment, i: Country, states: &StateVector) -> GoodnessVector {
    let entries = env
        .relevant(i)
        .into_iter()
        .filter_map(|j| is_good_for(env, i, j, states.get(j)).map(|g| (j, g)))
        .collect();
    GoodnessVector {
        evaluator: i,
        entries,
    }
}

pub fn goodness_vector(
    env: &Environment,
    u: &StrategyMatrix,
    i: Country,
) -> Result<GoodnessVector, UnknownCountry> {
    let i = env.check(i)?;
    Ok(goodness_from_states(env, i, &env.state_vector(u)))
}

/// `v` is at least as good as `u` for `i` on every relevant coordinate.
pub fn weakly_preferred(
    env: &Environment,
    i: Country,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<bool, UnknownCountry> {
    let gu = goodness_vector(env, u, i)?;
    let gv = goodness_vector(env, v, i)?;
    Ok(gu.dominated_by(&gv))
}

/// `v` achieves self-survival for `i` where `u` does not.
pub fn strictly_self_preferred(
    env: &Environment,
    i: Country,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<bool, UnknownCountry> {
    let i = env.check(i)?;
    Ok(self_survival_gain(
        env.state_vector(u).get(i),
        env.state_vector(v).get(i),
    ))
}

pub(crate) fn self_survival_gain(before: State, after: State) -> bool {
    before == State::Unsafe && after.survives()
}

/// `v` strictly beats `u` for `i`: either it dominates `u` without being
/// dominated back, or it restores `i`'s own survival.
pub fn strictly_preferred(
    env: &Environment,
    i: Country,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<bool, UnknownCountry> {
    let i = env.check(i)?;
    let su = env.state_vector(u);
    let sv = env.state_vector(v);
    Ok(strictly_better_states(env, i, &su, &sv))
}

pub(crate) fn strictly_better_states(
    env: &Environment,
    i: Country,
    before: &StateVector,
    after: &StateVector,
) -> bool {
    let gb = goodness_from_states(env, i, before);
    let ga = goodness_from_states(env, i, after);
    (gb.dominated_by(&ga) && !ga.dominated_by(&gb))
        || self_survival_gain(before.get(i), after.get(i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternativeComparison {
    /// `v` is weakly preferred (strictly better on the differing coordinate).
    VPreferred,
    UPreferred,
    Indifferent,
    /// The state vectors differ in more than one coordinate.
    NotAdmissible,
}

/// Compares two admissible alternatives, i.e. matrices whose state vectors
/// differ in at most one country.
pub fn axiom1_compare(
    env: &Environment,
    i: Country,
    u: &StrategyMatrix,
    v: &StrategyMatrix,
) -> Result<AlternativeComparison, UnknownCountry> {
    let i = env.check(i)?;
    let su = env.state_vector(u);
    let sv = env.state_vector(v);
    let mut differing = env.countries().filter(|&k| su.get(k) != sv.get(k));
    let Some(j) = differing.next() else {
        return Ok(AlternativeComparison::Indifferent);
    };
    if differing.next().is_some() {
        return Ok(AlternativeComparison::NotAdmissible);
    }
    let (Some(good_u), Some(good_v)) = (
        is_good_for(env, i, j, su.get(j)),
        is_good_for(env, i, j, sv.get(j)),
    ) else {
        return Ok(AlternativeComparison::Indifferent);
    };
    Ok(match (good_u, good_v) {
        (false, true) => AlternativeComparison::VPreferred,
        (true, false) => AlternativeComparison::UPreferred,
        _ => AlternativeComparison::Indifferent,
    })
}
