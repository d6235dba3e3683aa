//! Equilibrium construction, decomposition checks and Nash verification.
//!
//! The constructor walks the adversary pairs in a chosen order, commits
//! `min(z_i, z_j)` symmetrically between the two ends and subtracts it from
//! both residuals; whatever is left becomes each country's reserve. The
//! result is a decomposition `p = B d + c` of the power vector over the
//! adversary incidence matrix `B`.
//!
//! Verification never searches the (infinite) deviation set. A deviation
//! by `i` rewrites one row, and σ/τ of every country are affine in that
//! row, so whether a bad coordinate can be turned good reduces to a small
//! set of lower bounds on row entries. See [`can_flip_coordinate`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Country, Environment, Pair, Relation, StateVector, StrategyMatrix, UnknownCountry,
};
use crate::preference::goodness_from_states;
use crate::rational::{self, clamp_at_zero, format_rational, Rational};

/// When does a unilateral deviation refute an equilibrium?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NashCriterion {
    /// The deviation is strictly preferred: it dominates the status quo's
    /// goodness vector without being dominated back, or it restores the
    /// deviator's own survival.
    #[default]
    Strict,
    /// Any deviation that turns some bad coordinate good refutes, whatever
    /// it costs elsewhere (the status quo must dominate every deviation).
    AnyImprovement,
}

impl NashCriterion {
    pub fn as_str(self) -> &'static str {
        match self {
            NashCriterion::Strict => "strict",
            NashCriterion::AnyImprovement => "any-improvement",
        }
    }
}

impl fmt::Display for NashCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Processing order of the adversary pairs: `steps()[k]` is the 0-based
/// adversary label handled at step `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairOrdering(Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("ordering has {found} entries but there are {expected} adversary pairs")]
    WrongLength { expected: usize, found: usize },
    #[error("ordering is not a permutation of 1..={q}")]
    NotPermutation { q: usize },
}

impl PairOrdering {
    pub fn identity(q: usize) -> Self {
        PairOrdering((0..q).collect())
    }

    /// From 1-based adversary labels in processing order.
    pub fn from_labels(labels: &[usize], q: usize) -> Result<Self, OrderingError> {
        if labels.len() != q {
            return Err(OrderingError::WrongLength {
                expected: q,
                found: labels.len(),
            });
        }
        let mut seen = vec![false; q];
        let mut steps = Vec::with_capacity(q);
        for &label in labels {
            match label.checked_sub(1) {
                Some(k) if k < q && !seen[k] => {
                    seen[k] = true;
                    steps.push(k);
                }
                _ => return Err(OrderingError::NotPermutation { q }),
            }
        }
        Ok(PairOrdering(steps))
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|k| k + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PairOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.labels().iter().join(","))
    }
}

/// n×q incidence matrix of the adversary subgraph; column k is the
/// adversary pair with label k + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: Vec<Vec<bool>>,
    q: usize,
}

impl IncidenceMatrix {
    pub fn new(env: &Environment) -> Self {
        let pairs = env.adversary_pairs();
        let rows = env
            .countries()
            .map(|i| pairs.iter().map(|p| p.contains(i)).collect())
            .collect();
        IncidenceMatrix {
            rows,
            q: pairs.len(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: Country, k: usize) -> bool {
        self.rows[i.index()][k]
    }

    pub fn to_binary(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }

    /// `B d` as an n-vector.
    pub fn apply(&self, d: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(d)
                    .filter(|(&b, _)| b)
                    .fold(Rational::zero(), |acc, (_, v)| acc + v)
            })
            .collect()
    }
}

pub fn incidence_matrix(env: &Environment) -> IncidenceMatrix {
    IncidenceMatrix::new(env)
}

/// `d` is indexed by adversary label, `c` by country.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub d: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("decomposition has |d| = {d}, |c| = {c}; expected {q} and {n}")]
pub struct DimensionMismatch {
    pub d: usize,
    pub c: usize,
    pub q: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionViolation {
    /// `(B d + c)_i != p_i`.
    Conservation {
        country: Country,
        expected: Rational,
        found: Rational,
    },
    NegativeCommitment {
        pair_label: usize,
        value: Rational,
    },
    NegativeReserve {
        country: Country,
        value: Rational,
    },
    /// Both ends of an adversary pair keep a positive reserve.
    BothReservesPositive {
        pair: Pair,
    },
}

impl fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionViolation::Conservation {
                country,
                expected,
                found,
            } => write!(
                f,
                "country {country}: b_i d + c_i = {} but p_i = {}",
                format_rational(found),
                format_rational(expected)
            ),
            DecompositionViolation::NegativeCommitment { pair_label, value } => {
                write!(f, "d_{pair_label} = {} is negative", format_rational(value))
            }
            DecompositionViolation::NegativeReserve { country, value } => {
                write!(f, "c_{country} = {} is negative", format_rational(value))
            }
            DecompositionViolation::BothReservesPositive { pair } => {
                write!(f, "adversary pair {pair} has both reserves positive")
            }
        }
    }
}

pub fn check_decomposition(
    env: &Environment,
    dec: &Decomposition,
) -> Result<Vec<DecompositionViolation>, DimensionMismatch> {
    let (n, q) = (env.len(), env.adversary_pair_count());
    if dec.d.len() != q || dec.c.len() != n {
        return Err(DimensionMismatch {
            d: dec.d.len(),
            c: dec.c.len(),
            q,
            n,
        });
    }
    let mut violations = Vec::new();
    let committed = IncidenceMatrix::new(env).apply(&dec.d);
    for i in env.countries() {
        let found = &committed[i.index()] + &dec.c[i.index()];
        if &found != env.power(i) {
            violations.push(DecompositionViolation::Conservation {
                country: i,
                expected: env.power(i).clone(),
                found,
            });
        }
    }
    for (k, value) in dec.d.iter().enumerate() {
        if value.is_negative() {
            violations.push(DecompositionViolation::NegativeCommitment {
                pair_label: k + 1,
                value: value.clone(),
            });
        }
    }
    for i in env.countries() {
        let value = &dec.c[i.index()];
        if value.is_negative() {
            violations.push(DecompositionViolation::NegativeReserve {
                country: i,
                value: value.clone(),
            });
        }
    }
    for &pair in env.adversary_pairs() {
        let (a, b) = pair.ends();
        if dec.c[a.index()].is_positive() && dec.c[b.index()].is_positive() {
            violations.push(DecompositionViolation::BothReservesPositive { pair });
        }
    }
    Ok(violations)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error("decomposition is invalid: {}", .0.iter().map(ToString::to_string).join("; "))]
    Invalid(Vec<DecompositionViolation>),
}

/// Turns a valid decomposition into a strategy matrix: each adversary pair
/// commits `d_k` against each other, reserves are `c`, friends get nothing.
pub fn expand_decomposition(
    env: &Environment,
    dec: &Decomposition,
) -> Result<StrategyMatrix, ExpandError> {
    let violations = check_decomposition(env, dec)?;
    if !violations.is_empty() {
        return Err(ExpandError::Invalid(violations));
    }
    Ok(expand_unchecked(env, dec))
}

fn expand_unchecked(env: &Environment, dec: &Decomposition) -> StrategyMatrix {
    let n = env.len();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for (pair, d) in env.adversary_pairs().iter().zip(&dec.d) {
        let (a, b) = pair.ends();
        rows[a.index()][b.index()] = d.clone();
        rows[b.index()][a.index()] = d.clone();
    }
    for (i, c) in dec.c.iter().enumerate() {
        rows[i][i] = c.clone();
    }
    StrategyMatrix::from_rows_unchecked(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub ordering: PairOrdering,
    pub strategy: StrategyMatrix,
    pub decomposition: Decomposition,
    /// Residual vectors z(0) = p, z(1), ..., z(q).
    pub residuals: Vec<Vec<Rational>>,
}

/// Runs the residual recursion for `ordering`.
pub fn construct_equilibrium(
    env: &Environment,
    ordering: &PairOrdering,
) -> Result<Construction, OrderingError> {
    let q = env.adversary_pair_count();
    if ordering.len() != q {
        return Err(OrderingError::WrongLength {
            expected: q,
            found: ordering.len(),
        });
    }
    let pairs = env.adversary_pairs();
    let mut z = env.powers().to_vec();
    let mut residuals = Vec::with_capacity(q + 1);
    residuals.push(z.clone());
    let mut d = vec![Rational::zero(); q];
    for &k in ordering.steps() {
        let (a, b) = pairs[k].ends();
        let step = std::cmp::min(&z[a.index()], &z[b.index()]).clone();
        z[a.index()] -= &step;
        z[b.index()] -= &step;
        d[k] = step;
        residuals.push(z.clone());
    }
    let decomposition = Decomposition { d, c: z };
    let strategy = expand_unchecked(env, &decomposition);
    debug_assert!(check_decomposition(env, &decomposition)
        .map(|v| v.is_empty())
        .unwrap_or(false));
    Ok(Construction {
        ordering: ordering.clone(),
        strategy,
        decomposition,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error(transparent)]
    Unknown(#[from] UnknownCountry),
    #[error("country {target} is not related to country {deviator}")]
    NotRelevant { deviator: usize, target: usize },
    #[error("coordinate {target} is already good for country {deviator}")]
    AlreadyGood { deviator: usize, target: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipAssessment {
    pub feasible: bool,
    /// Slack of the best deviation; feasible iff nonnegative.
    pub margin: Rational,
}

/// Per-country σ, τ and states, evaluated once per matrix.
struct Evaluation {
    support: Vec<Rational>,
    threat: Vec<Rational>,
    states: StateVector,
}

impl Evaluation {
    fn new(env: &Environment, u: &StrategyMatrix) -> Self {
        let support: Vec<_> = env.countries().map(|i| env.support_of(u, i)).collect();
        let threat: Vec<_> = env.countries().map(|i| env.threat_of(u, i)).collect();
        let states = StateVector(
            support
                .iter()
                .zip(&threat)
                .map(|(s, t)| crate::model::State::compare(s, t))
                .collect(),
        );
        Evaluation {
            support,
            threat,
            states,
        }
    }
}

/// Smallest u_ik that keeps (or makes) coordinate k good for i, all other
/// rows fixed.
fn lower_bound(
    env: &Environment,
    ev: &Evaluation,
    u: &StrategyMatrix,
    i: Country,
    k: Country,
) -> Rational {
    let (s, t, own) = (&ev.support[k.index()], &ev.threat[k.index()], u.get(i, k));
    match env.relation(i, k) {
        Some(Relation::Friend) => clamp_at_zero(t - (s - own)),
        Some(Relation::Adversary) => clamp_at_zero(s - (t - own)),
        None => Rational::zero(),
    }
}

/// Best σ_i − τ_i that `i` can reach alone: everything into reserve/offense.
fn self_slack(env: &Environment, ev: &Evaluation, u: &StrategyMatrix, i: Country) -> Rational {
    let inbound = rational::sum(env.friends(i).iter().map(|&k| u.get(k, i)));
    env.power(i) + inbound - &ev.threat[i.index()]
}

fn flip_margin(
    env: &Environment,
    ev: &Evaluation,
    u: &StrategyMatrix,
    i: Country,
    j: Country,
    criterion: NashCriterion,
) -> Rational {
    if i == j {
        return self_slack(env, ev, u, i);
    }
    match criterion {
        NashCriterion::AnyImprovement => env.power(i) - lower_bound(env, ev, u, i, j),
        NashCriterion::Strict => {
            let goodness = goodness_from_states(env, i, &ev.states);
            let mut total = Rational::zero();
            let mut friend_aid = Rational::zero();
            for (&k, &good) in &goodness.entries {
                if k == i || !(good || k == j) {
                    continue;
                }
                let bound = lower_bound(env, ev, u, i, k);
                if env.relation(i, k) == Some(Relation::Friend) {
                    friend_aid += &bound;
                }
                total += bound;
            }
            let budget = env.power(i) - total;
            if goodness.get(i) == Some(true) {
                std::cmp::min(budget, self_slack(env, ev, u, i) - friend_aid)
            } else {
                budget
            }
        }
    }
}

/// Can `i`, rewriting only its own row, turn coordinate `j` good in a way
/// that refutes `u` under `criterion`?
///
/// For `j = i` the best move puts everything into reserve and offense. For
/// a friend or adversary `j` the deviation needs `u_ij` at least a lower
/// bound; under [`NashCriterion::Strict`] every currently good coordinate
/// contributes its own lower bound as well, and friend aid must leave
/// `i` itself surviving.
pub fn can_flip_coordinate(
    env: &Environment,
    u: &StrategyMatrix,
    i: Country,
    j: Country,
    criterion: NashCriterion,
) -> Result<FlipAssessment, FlipError> {
    let i = env.check(i)?;
    let j = env.check(j)?;
    if !env.is_relevant(i, j) {
        return Err(FlipError::NotRelevant {
            deviator: i.label(),
            target: j.label(),
        });
    }
    let ev = Evaluation::new(env, u);
    let goodness = goodness_from_states(env, i, &ev.states);
    if goodness.get(j) == Some(true) {
        return Err(FlipError::AlreadyGood {
            deviator: i.label(),
            target: j.label(),
        });
    }
    let margin = flip_margin(env, &ev, u, i, j, criterion);
    Ok(FlipAssessment {
        feasible: !margin.is_negative(),
        margin,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub deviator: Country,
    pub coordinate: Country,
    pub margin: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashReport {
    pub criterion: NashCriterion,
    pub witnesses: Vec<Witness>,
}

impl NashReport {
    pub fn is_equilibrium(&self) -> bool {
        self.witnesses.is_empty()
    }
}

pub fn is_nash(env: &Environment, u: &StrategyMatrix, criterion: NashCriterion) -> NashReport {
    let ev = Evaluation::new(env, u);
    let mut witnesses = Vec::new();
    for i in env.countries() {
        let goodness = goodness_from_states(env, i, &ev.states);
        for j in goodness.bad_coordinates() {
            let margin = flip_margin(env, &ev, u, i, j, criterion);
            if !margin.is_negative() {
                witnesses.push(Witness {
                    deviator: i,
                    coordinate: j,
                    margin,
                });
            }
        }
    }
    NashReport {
        criterion,
        witnesses,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedMatrix {
    /// Orderings producing this matrix, in lexicographic order.
    pub orderings: Vec<PairOrdering>,
    pub strategy: StrategyMatrix,
    pub decomposition: Decomposition,
    pub states: StateVector,
    pub report: NashReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// q!, when it fits in a u128.
    pub total_orderings: Option<u128>,
    pub orderings_tried: usize,
    /// Distinct constructed matrices that verify as equilibria.
    pub equilibria: Vec<EnumeratedMatrix>,
    /// Distinct constructed matrices that `is_nash` refutes.
    pub refuted: Vec<EnumeratedMatrix>,
}

impl Enumeration {
    pub fn truncated(&self) -> bool {
        self.total_orderings != Some(self.orderings_tried as u128)
    }

    pub fn distinct_matrices(&self) -> usize {
        self.equilibria.len() + self.refuted.len()
    }
}

pub fn factorial(q: usize) -> Option<u128> {
    (1..=q as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Constructs from the first `max_orderings` orderings in lexicographic
/// permutation order and deduplicates identical matrices.
pub fn enumerate_equilibria(
    env: &Environment,
    max_orderings: usize,
    criterion: NashCriterion,
) -> Enumeration {
    let q = env.adversary_pair_count();
    let mut seen: HashMap<StrategyMatrix, usize> = HashMap::new();
    let mut all: Vec<EnumeratedMatrix> = Vec::new();
    let mut tried = 0;
    for steps in (0..q).permutations(q).take(max_orderings.max(1)) {
        tried += 1;
        let ordering = PairOrdering(steps);
        let built = construct_equilibrium(env, &ordering).expect("ordering has length q");
        if let Some(&idx) = seen.get(&built.strategy) {
            all[idx].orderings.push(ordering);
            continue;
        }
        seen.insert(built.strategy.clone(), all.len());
        let report = is_nash(env, &built.strategy, criterion);
        all.push(EnumeratedMatrix {
            orderings: vec![ordering],
            states: env.state_vector(&built.strategy),
            strategy: built.strategy,
            decomposition: built.decomposition,
            report,
        });
    }
    let (equilibria, refuted) = all.into_iter().partition(|m| m.report.is_equilibrium());
    Enumeration {
        total_orderings: factorial(q),
        orderings_tried: tried,
        equilibria,
        refuted,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub states: StateVector,
    /// Indices into the input slice.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("matrix #{index} is not an equilibrium ({witnesses} refuting deviations)")]
pub struct NotAnEquilibrium {
    pub index: usize,
    pub witnesses: usize,
}

/// Groups equilibria by their exact state vector, classes sorted by state.
pub fn equivalence_classes(
    env: &Environment,
    equilibria: &[StrategyMatrix],
    criterion: NashCriterion,
) -> Result<Vec<EquivalenceClass>, NotAnEquilibrium> {
    let mut classes: BTreeMap<StateVector, Vec<usize>> = BTreeMap::new();
    for (index, u) in equilibria.iter().enumerate() {
        let report = is_nash(env, u, criterion);
        if !report.is_equilibrium() {
            return Err(NotAnEquilibrium {
                index,
                witnesses: report.witnesses.len(),
            });
        }
        classes.entry(env.state_vector(u)).or_default().push(index);
    }
    Ok(classes
        .into_iter()
        .map(|(states, members)| EquivalenceClass { states, members })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::State;
    use crate::rational::int;

    fn ints(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    const BOTH: [NashCriterion; 2] = [NashCriterion::Strict, NashCriterion::AnyImprovement];

    #[test]
    fn incidence_examples() {
        assert_eq!(incidence_matrix(&e2()).to_binary(), vec![vec![1], vec![1]]);
        assert_eq!(
            incidence_matrix(&e3()).to_binary(),
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]
        );
        let friends_only = env(&[1, 1, 1], &[(1, 2), (2, 3)], &[]);
        let b = incidence_matrix(&friends_only);
        assert_eq!((b.rows(), b.columns()), (3, 0));
    }

    #[test]
    fn ordering_from_labels() {
        assert_eq!(
            PairOrdering::from_labels(&[2, 1, 3], 3).unwrap().steps(),
            &[1, 0, 2]
        );
        assert!(PairOrdering::from_labels(&[1, 1, 3], 3).is_err());
        assert!(PairOrdering::from_labels(&[0, 1, 2], 3).is_err());
        assert!(PairOrdering::from_labels(&[1, 2], 3).is_err());
        assert_eq!(
            PairOrdering::from_labels(&[3, 1, 2], 3)
                .unwrap()
                .to_string(),
            "[3,1,2]"
        );
    }

    #[test]
    fn construct_e2() {
        let env = e2();
        let built = construct_equilibrium(&env, &PairOrdering::identity(1)).unwrap();
        assert_eq!(built.decomposition.d, ints(&[1]));
        assert_eq!(built.decomposition.c, ints(&[1, 0]));
        assert_eq!(built.strategy, matrix(&env, &[&[1, 1], &[1, 0]]));
        assert_eq!(
            env.state_vector(&built.strategy).0,
            vec![State::Safe, State::Precarious]
        );
        assert_eq!(built.residuals, vec![ints(&[2, 1]), ints(&[1, 0])]);
    }

    #[test]
    fn construct_e3() {
        let env = e3();
        let built = construct_equilibrium(&env, &PairOrdering::identity(3)).unwrap();
        assert_eq!(built.decomposition.d, ints(&[1, 0, 0]));
        assert_eq!(built.decomposition.c, ints(&[0, 0, 1]));
        assert_eq!(
            built.strategy,
            matrix(&env, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])
        );
        assert_eq!(
            env.state_vector(&built.strategy).0,
            vec![State::Precarious, State::Precarious, State::Safe]
        );
    }

    #[test]
    fn construct_without_adversaries_is_diagonal() {
        let env = env(&[2, 0, 5], &[(1, 2)], &[]);
        let built = construct_equilibrium(&env, &PairOrdering::identity(0)).unwrap();
        assert_eq!(
            built.strategy,
            matrix(&env, &[&[2, 0, 0], &[0, 0, 0], &[0, 0, 5]])
        );
        assert_eq!(
            env.state_vector(&built.strategy).0,
            vec![State::Safe, State::Precarious, State::Safe]
        );
        for criterion in BOTH {
            assert!(is_nash(&env, &built.strategy, criterion).is_equilibrium());
        }
    }

    #[test]
    fn construct_rejects_wrong_length() {
        assert!(construct_equilibrium(&e3(), &PairOrdering::identity(2)).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let env = e2();
        let ok = Decomposition {
            d: ints(&[1]),
            c: ints(&[1, 0]),
        };
        assert!(check_decomposition(&env, &ok).unwrap().is_empty());
        let both = Decomposition {
            d: ints(&[0]),
            c: ints(&[2, 1]),
        };
        assert_eq!(
            check_decomposition(&env, &both).unwrap(),
            vec![DecompositionViolation::BothReservesPositive {
                pair: env.adversary_pairs()[0]
            }]
        );
        let negative = Decomposition {
            d: ints(&[2]),
            c: ints(&[0, -1]),
        };
        let v = check_decomposition(&env, &negative).unwrap();
        assert!(v
            .iter()
            .any(|x| matches!(x, DecompositionViolation::NegativeReserve { .. })));
        let short = Decomposition {
            d: ints(&[]),
            c: ints(&[1, 0]),
        };
        assert!(check_decomposition(&env, &short).is_err());
        let leaky = Decomposition {
            d: ints(&[1]),
            c: ints(&[0, 0]),
        };
        assert!(matches!(
            check_decomposition(&env, &leaky).unwrap()[0],
            DecompositionViolation::Conservation { .. }
        ));
    }

    #[test]
    fn expand_matches_construction() {
        let env = e4();
        let built = construct_equilibrium(&env, &PairOrdering::identity(1)).unwrap();
        assert_eq!(
            expand_decomposition(&env, &built.decomposition).unwrap(),
            built.strategy
        );
        let bad = Decomposition {
            d: ints(&[0]),
            c: ints(&[1, 1, 3]),
        };
        assert!(matches!(
            expand_decomposition(&env, &bad),
            Err(ExpandError::Invalid(_))
        ));
    }

    #[test]
    fn flip_examples() {
        let env = e2();
        let reserve = matrix(&env, &[&[2, 0], &[0, 1]]);
        for criterion in BOTH {
            let a = can_flip_coordinate(&env, &reserve, c(1), c(2), criterion).unwrap();
            assert_eq!(
                a,
                FlipAssessment {
                    feasible: true,
                    margin: int(1)
                }
            );
            // τ_1 − u_21 + p_2 − σ_1 = 0 − 0 + 1 − 2
            let b = can_flip_coordinate(&env, &reserve, c(2), c(1), criterion).unwrap();
            assert_eq!(
                b,
                FlipAssessment {
                    feasible: false,
                    margin: int(-1)
                }
            );
        }

        let e4 = e4();
        let eq = matrix(&e4, &[&[1, 0, 0], &[0, 0, 1], &[0, 1, 2]]);
        for criterion in BOTH {
            let a = can_flip_coordinate(&e4, &eq, c(2), c(3), criterion).unwrap();
            assert_eq!(
                a,
                FlipAssessment {
                    feasible: false,
                    margin: int(-2)
                }
            );
        }
    }

    #[test]
    fn flip_errors() {
        let env = env(&[1, 1, 1], &[], &[(1, 2)]);
        let u = matrix(&env, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let s = NashCriterion::Strict;
        assert!(matches!(
            can_flip_coordinate(&env, &u, c(1), c(3), s),
            Err(FlipError::NotRelevant { .. })
        ));
        assert!(matches!(
            can_flip_coordinate(&env, &u, c(1), c(1), s),
            Err(FlipError::AlreadyGood { .. })
        ));
        assert!(matches!(
            can_flip_coordinate(&env, &u, c(1), c(4), s),
            Err(FlipError::Unknown(_))
        ));
    }

    #[test]
    fn powerless_deviator_cannot_flip() {
        let env = env(&[0, 2], &[], &[(1, 2)]);
        let u = matrix(&env, &[&[0, 0], &[1, 1]]);
        // σ_2 = 2 > τ_2 = 0, country 1 has nothing to commit
        for criterion in BOTH {
            let a = can_flip_coordinate(&env, &u, c(1), c(2), criterion).unwrap();
            assert_eq!(a.margin, int(-2));
            // country 1 faces τ_1 = 1 > σ_1 = 0 and cannot fix it
            let b = can_flip_coordinate(&env, &u, c(1), c(1), criterion).unwrap();
            assert_eq!(b.margin, int(-1));
        }
    }

    #[test]
    fn nash_examples() {
        let env = e2();
        let reserve = matrix(&env, &[&[2, 0], &[0, 1]]);
        for criterion in BOTH {
            let report = is_nash(&env, &reserve, criterion);
            assert_eq!(
                report.witnesses,
                vec![Witness {
                    deviator: c(1),
                    coordinate: c(2),
                    margin: int(1)
                }]
            );
            let eq = matrix(&env, &[&[1, 1], &[1, 0]]);
            assert!(is_nash(&env, &eq, criterion).is_equilibrium());
        }
    }

    #[test]
    fn e3_construction_depends_on_criterion() {
        let env = e3();
        let built = construct_equilibrium(&env, &PairOrdering::identity(3)).unwrap();
        assert!(is_nash(&env, &built.strategy, NashCriterion::Strict).is_equilibrium());
        // country 1 can dump everything on 3 (precarious) at the price of 2 turning safe
        let weak = is_nash(&env, &built.strategy, NashCriterion::AnyImprovement);
        assert!(weak
            .witnesses
            .iter()
            .any(|w| (w.deviator, w.coordinate, w.margin.clone()) == (c(1), c(3), int(0))));
    }

    #[test]
    fn construction_can_leave_a_profitable_deviation() {
        // 2 - 1 - 3 path; pair {1,2} first exhausts country 1 and leaves 3 with a reserve
        let env = env(&[1, 2, 1], &[], &[(1, 2), (1, 3)]);
        let built =
            construct_equilibrium(&env, &PairOrdering::from_labels(&[1, 2], 2).unwrap()).unwrap();
        assert_eq!(
            built.strategy,
            matrix(&env, &[&[0, 1, 0], &[1, 1, 0], &[0, 0, 1]])
        );
        let report = is_nash(&env, &built.strategy, NashCriterion::Strict);
        assert_eq!(
            report.witnesses,
            vec![Witness {
                deviator: c(1),
                coordinate: c(3),
                margin: int(0)
            }]
        );
        let deviated = matrix(&env, &[&[0, 0, 1], &[1, 1, 0], &[0, 0, 1]]);
        assert!(
            crate::preference::strictly_preferred(&env, c(1), &built.strategy, &deviated).unwrap()
        );

        // the other ordering does verify
        let other =
            construct_equilibrium(&env, &PairOrdering::from_labels(&[2, 1], 2).unwrap()).unwrap();
        assert!(is_nash(&env, &other.strategy, NashCriterion::Strict).is_equilibrium());
    }

    #[test]
    fn valid_decomposition_does_not_imply_equilibrium() {
        // country 2 splits its power over two adversaries that both keep reserves
        let env = env(&[2, 2, 2], &[], &[(1, 2), (2, 3)]);
        let dec = Decomposition {
            d: ints(&[1, 1]),
            c: ints(&[1, 0, 1]),
        };
        let u = expand_decomposition(&env, &dec).unwrap();
        assert!(!is_nash(&env, &u, NashCriterion::Strict).is_equilibrium());
    }

    #[test]
    fn enumerate_examples() {
        let e2 = e2();
        let en = enumerate_equilibria(&e2, 100, NashCriterion::Strict);
        assert_eq!(
            (en.orderings_tried, en.equilibria.len(), en.truncated()),
            (1, 1, false)
        );

        let e3 = e3();
        let en = enumerate_equilibria(&e3, 100, NashCriterion::Strict);
        assert_eq!(en.orderings_tried, 6);
        assert_eq!(en.equilibria.len(), 3);
        assert!(en.refuted.is_empty());
        assert!(en.equilibria.iter().all(|m| m.orderings.len() == 2));
        let first: Vec<_> = en
            .equilibria
            .iter()
            .map(|m| m.orderings[0].labels())
            .collect();
        assert_eq!(first, vec![vec![1, 2, 3], vec![2, 1, 3], vec![3, 1, 2]]);

        let truncated = enumerate_equilibria(&e3, 4, NashCriterion::Strict);
        assert!(truncated.truncated());
        assert_eq!(truncated.orderings_tried, 4);

        let none = env(&[1, 2], &[(1, 2)], &[]);
        let en = enumerate_equilibria(&none, 10, NashCriterion::Strict);
        assert_eq!((en.orderings_tried, en.equilibria.len()), (1, 1));
        assert_eq!(
            en.equilibria[0].strategy,
            matrix(&none, &[&[1, 0], &[0, 2]])
        );
    }

    #[test]
    fn classes_of_e3() {
        let env = e3();
        let matrices: Vec<_> = [[1, 2, 3], [2, 1, 3], [3, 1, 2]]
            .iter()
            .map(|o| {
                let ordering = PairOrdering::from_labels(o, 3).unwrap();
                construct_equilibrium(&env, &ordering).unwrap().strategy
            })
            .collect();
        let mut doubled = matrices.clone();
        doubled.extend(matrices.iter().cloned());
        let classes = equivalence_classes(&env, &doubled, NashCriterion::Strict).unwrap();
        assert_eq!(classes.len(), 3);
        assert!(classes.iter().all(|k| k.members.len() == 2));
        for class in &classes {
            let safe = class.states.0.iter().filter(|&&s| s == State::Safe).count();
            assert_eq!(safe, 1);
        }

        let single = equivalence_classes(&env, &matrices[..1], NashCriterion::Strict).unwrap();
        assert_eq!(single.len(), 1);

        let reserve = matrix(&env, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(equivalence_classes(&env, &[reserve], NashCriterion::Strict).is_err());
    }

    #[test]
    fn factorial_overflow_is_none() {
        assert_eq!(factorial(0), Some(1));
        assert_eq!(factorial(5), Some(120));
        assert_eq!(factorial(40), None);
    }
}
