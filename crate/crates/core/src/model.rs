//! Environment data model, strategy matrices and the support / threat /
//! state functions.
//!
//! Countries are identified externally by 1-based labels. Internally a
//! [`Country`] wraps the 0-based index.

use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Country(usize);

impl Country {
    pub fn from_index(index: usize) -> Self {
        Country(index)
    }

    /// `None` for label 0.
    pub fn from_label(label: usize) -> Option<Self> {
        label.checked_sub(1).map(Country)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Unordered pair of distinct countries, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: Country,
    hi: Country,
}

impl Pair {
    /// `None` when both ends coincide.
    pub fn new(a: Country, b: Country) -> Option<Self> {
        match a.cmp(&b) {
            CmpOrdering::Less => Some(Pair { lo: a, hi: b }),
            CmpOrdering::Greater => Some(Pair { lo: b, hi: a }),
            CmpOrdering::Equal => None,
        }
    }

    pub fn ends(self) -> (Country, Country) {
        (self.lo, self.hi)
    }

    pub fn contains(self, c: Country) -> bool {
        self.lo == c || self.hi == c
    }

    pub fn labels(self) -> [usize; 2] {
        [self.lo.label(), self.hi.label()]
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Friend,
    Adversary,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvironmentError {
    #[error("environment must contain at least one country")]
    Empty,
    #[error("{names} names but {powers} power values")]
    LengthMismatch { names: usize, powers: usize },
    #[error("country {label} has negative power {power}")]
    NegativePower { label: usize, power: String },
    #[error("label {label} in pair [{a}, {b}] is outside 1..={n}")]
    LabelOutOfRange {
        a: usize,
        b: usize,
        label: usize,
        n: usize,
    },
    #[error("self-pair [{label}, {label}]")]
    SelfPair { label: usize },
    #[error("duplicate {relation:?} pair {pair}")]
    DuplicatePair { pair: String, relation: Relation },
    #[error("pair {pair} in both relation sets")]
    ConflictingRelation { pair: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("country label {label} is outside 1..={n}")]
pub struct UnknownCountry {
    pub label: usize,
    pub n: usize,
}

/// A networked international environment: countries, their total power and
/// the symmetric friend/adversary relations between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    names: Vec<String>,
    power: Vec<Rational>,
    /// All related pairs sorted by pair; position + 1 is the relation label.
    relations: Vec<(Pair, Relation)>,
    /// Adversary pairs sorted by pair; position + 1 is the adversary label.
    adversary_pairs: Vec<Pair>,
    friend_pairs: Vec<Pair>,
    relation_of: Vec<Vec<Option<Relation>>>,
    friends_of: Vec<Vec<Country>>,
    adversaries_of: Vec<Vec<Country>>,
}

impl Environment {
    /// Builds and validates an environment. Pairs use 1-based labels.
    pub fn new(
        names: Vec<String>,
        power: Vec<Rational>,
        friends: &[(usize, usize)],
        adversaries: &[(usize, usize)],
    ) -> Result<Self, EnvironmentError> {
        let n = names.len();
        if n == 0 {
            return Err(EnvironmentError::Empty);
        }
        if power.len() != n {
            return Err(EnvironmentError::LengthMismatch {
                names: n,
                powers: power.len(),
            });
        }
        if let Some(i) = power.iter().position(rational::is_negative) {
            return Err(EnvironmentError::NegativePower {
                label: i + 1,
                power: format_rational(&power[i]),
            });
        }

        let to_pair = |(a, b): (usize, usize)| -> Result<Pair, EnvironmentError> {
            for label in [a, b] {
                if label == 0 || label > n {
                    return Err(EnvironmentError::LabelOutOfRange { a, b, label, n });
                }
            }
            Pair::new(Country(a - 1), Country(b - 1)).ok_or(EnvironmentError::SelfPair { label: a })
        };
        let collect = |raw: &[(usize, usize)], relation| {
            let mut set = BTreeSet::new();
            for &entry in raw {
                let pair = to_pair(entry)?;
                if !set.insert(pair) {
                    return Err(EnvironmentError::DuplicatePair {
                        pair: pair.to_string(),
                        relation,
                    });
                }
            }
            Ok(set)
        };
        let friend_set = collect(friends, Relation::Friend)?;
        let adversary_set = collect(adversaries, Relation::Adversary)?;
        if let Some(pair) = friend_set.intersection(&adversary_set).next() {
            return Err(EnvironmentError::ConflictingRelation {
                pair: pair.to_string(),
            });
        }

        let mut relations: Vec<(Pair, Relation)> = friend_set
            .iter()
            .map(|&p| (p, Relation::Friend))
            .chain(adversary_set.iter().map(|&p| (p, Relation::Adversary)))
            .collect();
        relations.sort();

        let mut relation_of = vec![vec![None; n]; n];
        let mut friends_of = vec![Vec::new(); n];
        let mut adversaries_of = vec![Vec::new(); n];
        for &(pair, relation) in &relations {
            let (a, b) = pair.ends();
            relation_of[a.0][b.0] = Some(relation);
            relation_of[b.0][a.0] = Some(relation);
            let lists = match relation {
                Relation::Friend => &mut friends_of,
                Relation::Adversary => &mut adversaries_of,
            };
            lists[a.0].push(b);
            lists[b.0].push(a);
        }
        for list in friends_of.iter_mut().chain(adversaries_of.iter_mut()) {
            list.sort();
        }

        Ok(Environment {
            names,
            power,
            relations,
            adversary_pairs: adversary_set.into_iter().collect(),
            friend_pairs: friend_set.into_iter().collect(),
            relation_of,
            friends_of,
            adversaries_of,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn countries(&self) -> impl ExactSizeIterator<Item = Country> + Clone {
        (0..self.len()).map(Country)
    }

    pub fn country(&self, label: usize) -> Result<Country, UnknownCountry> {
        match Country::from_label(label) {
            Some(c) if c.0 < self.len() => Ok(c),
            _ => Err(UnknownCountry {
                label,
                n: self.len(),
            }),
        }
    }

    pub(crate) fn check(&self, c: Country) -> Result<Country, UnknownCountry> {
        self.country(c.label())
    }

    pub fn name(&self, c: Country) -> &str {
        &self.names[c.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn power(&self, c: Country) -> &Rational {
        &self.power[c.0]
    }

    pub fn powers(&self) -> &[Rational] {
        &self.power
    }

    /// Related pairs in relation-label order (label = position + 1).
    pub fn relations(&self) -> &[(Pair, Relation)] {
        &self.relations
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Adversary pairs in default ordering (label = position + 1).
    pub fn adversary_pairs(&self) -> &[Pair] {
        &self.adversary_pairs
    }

    pub fn adversary_pair_count(&self) -> usize {
        self.adversary_pairs.len()
    }

    pub fn friend_pairs(&self) -> &[Pair] {
        &self.friend_pairs
    }

    pub fn relation(&self, a: Country, b: Country) -> Option<Relation> {
        self.relation_of[a.0][b.0]
    }

    pub fn friends(&self, c: Country) -> &[Country] {
        &self.friends_of[c.0]
    }

    pub fn adversaries(&self, c: Country) -> &[Country] {
        &self.adversaries_of[c.0]
    }

    /// Whether `j` is `i` itself, a friend or an adversary of `i`.
    pub fn is_relevant(&self, i: Country, j: Country) -> bool {
        i == j || self.relation(i, j).is_some()
    }

    /// `{i} ∪ F_i ∪ A_i` in ascending order.
    pub fn relevant(&self, i: Country) -> Vec<Country> {
        self.countries()
            .filter(|&j| self.is_relevant(i, j))
            .collect()
    }

    /// Same relations with every power multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Environment {
        let mut scaled = self.clone();
        for p in &mut scaled.power {
            *p = &*p * factor;
        }
        scaled
    }

    pub fn validate_strategy(
        &self,
        rows: Vec<Vec<Rational>>,
    ) -> Result<StrategyMatrix, StrategyErrors> {
        let n = self.len();
        let mut violations = Vec::new();
        if rows.len() != n {
            violations.push(StrategyViolation::RowCount {
                expected: n,
                found: rows.len(),
            });
            return Err(StrategyErrors(violations));
        }
        for (i, row) in rows.iter().enumerate() {
            let country = Country(i);
            if row.len() != n {
                violations.push(StrategyViolation::RowLength {
                    row: country.label(),
                    expected: n,
                    found: row.len(),
                });
                continue;
            }
            for (j, value) in row.iter().enumerate() {
                if rational::is_negative(value) {
                    violations.push(StrategyViolation::Negative {
                        row: i + 1,
                        column: j + 1,
                        value: format_rational(value),
                    });
                } else if !value.is_zero() && !self.is_relevant(country, Country(j)) {
                    violations.push(StrategyViolation::OffSupport {
                        row: i + 1,
                        column: j + 1,
                        value: format_rational(value),
                    });
                }
            }
            let total = rational::sum(row);
            if &total != self.power(country) {
                violations.push(StrategyViolation::RowSum {
                    row: i + 1,
                    sum: format_rational(&total),
                    power: format_rational(self.power(country)),
                });
            }
        }
        if violations.is_empty() {
            Ok(StrategyMatrix { rows })
        } else {
            Err(StrategyErrors(violations))
        }
    }

    /// σ_i(U): reserve, inbound friend aid and own offense against adversaries.
    pub fn support(&self, u: &StrategyMatrix, i: Country) -> Result<Rational, UnknownCountry> {
        let i = self.check(i)?;
        Ok(self.support_of(u, i))
    }

    /// τ_i(U): total offense committed against `i` by its adversaries.
    pub fn threat(&self, u: &StrategyMatrix, i: Country) -> Result<Rational, UnknownCountry> {
        let i = self.check(i)?;
        Ok(self.threat_of(u, i))
    }

    pub(crate) fn support_of(&self, u: &StrategyMatrix, i: Country) -> Rational {
        self.support_by(i, |a, b| u.get(a, b))
    }

    pub(crate) fn threat_of(&self, u: &StrategyMatrix, i: Country) -> Rational {
        self.threat_by(i, |a, b| u.get(a, b))
    }

    fn support_by<'a>(
        &self,
        i: Country,
        entry: impl Fn(Country, Country) -> &'a Rational,
    ) -> Rational {
        let mut total = entry(i, i).clone();
        for &j in self.friends(i) {
            total += entry(j, i);
        }
        for &j in self.adversaries(i) {
            total += entry(i, j);
        }
        total
    }

    fn threat_by<'a>(
        &self,
        i: Country,
        entry: impl Fn(Country, Country) -> &'a Rational,
    ) -> Rational {
        rational::sum(self.adversaries(i).iter().map(|&j| entry(j, i)))
    }

    /// States of `u` with row `deviator` replaced by `row`, without copying `u`.
    pub(crate) fn state_vector_with_row(
        &self,
        u: &StrategyMatrix,
        deviator: Country,
        row: &[Rational],
    ) -> StateVector {
        let entry = |a: Country, b: Country| {
            if a == deviator {
                &row[b.0]
            } else {
                u.get(a, b)
            }
        };
        StateVector(
            self.countries()
                .map(|i| State::compare(&self.support_by(i, entry), &self.threat_by(i, entry)))
                .collect(),
        )
    }

    pub fn state(&self, u: &StrategyMatrix, i: Country) -> Result<State, UnknownCountry> {
        let i = self.check(i)?;
        Ok(State::compare(
            &self.support_of(u, i),
            &self.threat_of(u, i),
        ))
    }

    pub fn state_vector(&self, u: &StrategyMatrix) -> StateVector {
        StateVector(
            self.countries()
                .map(|i| State::compare(&self.support_of(u, i), &self.threat_of(u, i)))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyMatrix {
    rows: Vec<Vec<Rational>>,
}

impl StrategyMatrix {
    pub fn get(&self, i: Country, j: Country) -> &Rational {
        &self.rows[i.0][j.0]
    }

    pub fn row(&self, i: Country) -> &[Rational] {
        &self.rows[i.0]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<Rational>> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<Rational>>) -> StrategyMatrix {
        StrategyMatrix { rows }
    }

    pub fn scaled(&self, factor: &Rational) -> StrategyMatrix {
        StrategyMatrix {
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyViolation {
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} entries, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: sums to {sum} but total power is {power}")]
    RowSum {
        row: usize,
        sum: String,
        power: String,
    },
    #[error("row {row}: entry ({row},{column}) = {value} is off the support")]
    OffSupport {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("row {row}: entry ({row},{column}) = {value} is negative")]
    Negative {
        row: usize,
        column: usize,
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct StrategyErrors(pub Vec<StrategyViolation>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    Safe,
    Precarious,
    Unsafe,
}

impl State {
    pub fn compare(support: &Rational, threat: &Rational) -> State {
        match support.cmp(threat) {
            CmpOrdering::Greater => State::Safe,
            CmpOrdering::Equal => State::Precarious,
            CmpOrdering::Less => State::Unsafe,
        }
    }

    pub fn survives(self) -> bool {
        self != State::Unsafe
    }

    pub fn as_str(self) -> &'static str {
        match self {
            State::Safe => "safe",
            State::Precarious => "precarious",
            State::Unsafe => "unsafe",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateVector(pub Vec<State>);

impl StateVector {
    pub fn get(&self, c: Country) -> State {
        self.0[c.0]
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}
