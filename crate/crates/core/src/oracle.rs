//! Brute-force refutation over a discretized deviation set.
//!
//! Independent of the closed-form verifier in [`crate::equilibrium`]: it
//! enumerates every grid row a country could switch to and compares state
//! vectors through the preference module only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::equilibrium::{is_nash, NashCriterion, NashReport};
use crate::model::{Country, Environment, StateVector, StrategyMatrix};
use crate::preference::{goodness_from_states, self_survival_gain, GoodnessVector};
use crate::rational::{format_rational, Rational};

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: Rational,
    /// Maximum number of rows enumerated for a single country.
    pub cap: u64,
}

impl GridSpec {
    pub fn new(resolution: Rational) -> Self {
        GridSpec {
            resolution,
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid resolution must be positive, got {0}")]
    NonPositiveResolution(String),
    #[error("power {power} of country {country} is not a multiple of resolution {resolution}")]
    NotDivisible {
        country: usize,
        power: String,
        resolution: String,
    },
    #[error("country {country} has {rows} grid rows ({steps} steps over {support} entries), cap is {cap}")]
    TooManyRows {
        country: usize,
        rows: String,
        steps: u64,
        support: usize,
        cap: u64,
    },
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Number of ways to write `steps` as an ordered sum of `parts` nonnegative integers.
pub fn weak_compositions(steps: u64, parts: usize) -> Option<u128> {
    if parts == 0 {
        return Some(u128::from(steps == 0));
    }
    binomial(steps + parts as u64 - 1, parts as u64 - 1)
}

/// Every grid row country `i` may play, in lexicographic order of its
/// support entries (self, friends and adversaries in label order).
#[derive(Debug, Clone)]
pub struct GridRows {
    n: usize,
    support: Vec<Country>,
    resolution: Rational,
    parts: Option<Vec<u64>>,
}

impl GridRows {
    fn row(&self, parts: &[u64]) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.n];
        for (&c, &k) in self.support.iter().zip(parts) {
            row[c.index()] = &self.resolution * Rational::from_integer(BigInt::from(k));
        }
        row
    }
}

impl Iterator for GridRows {
    type Item = Vec<Rational>;

    fn next(&mut self) -> Option<Vec<Rational>> {
        let parts = self.parts.as_mut()?;
        let current = parts.clone();
        // advance: bump the last position whose suffix still holds units
        let s = parts.len();
        let mut suffix = 0;
        let mut advanced = false;
        for t in (0..s.saturating_sub(1)).rev() {
            suffix += parts[t + 1];
            if suffix > 0 {
                parts[t] += 1;
                for p in &mut parts[t + 1..] {
                    *p = 0;
                }
                parts[s - 1] = suffix - 1;
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.parts = None;
        }
        Some(self.row(&current))
    }
}

fn steps_for(env: &Environment, i: Country, grid: &GridSpec) -> Result<u64, OracleError> {
    if !grid.resolution.is_positive() {
        return Err(OracleError::NonPositiveResolution(format_rational(
            &grid.resolution,
        )));
    }
    let ratio = env.power(i) / &grid.resolution;
    let steps = if ratio.is_integer() {
        ratio.to_integer().to_u64()
    } else {
        None
    };
    steps.ok_or_else(|| OracleError::NotDivisible {
        country: i.label(),
        power: format_rational(env.power(i)),
        resolution: format_rational(&grid.resolution),
    })
}

pub fn enumerate_grid_deviations(
    env: &Environment,
    i: Country,
    grid: &GridSpec,
) -> Result<GridRows, OracleError> {
    let steps = steps_for(env, i, grid)?;
    let support = env.relevant(i);
    let rows = weak_compositions(steps, support.len());
    if rows.is_none_or(|r| r > u128::from(grid.cap)) {
        return Err(OracleError::TooManyRows {
            country: i.label(),
            rows: rows.map_or_else(|| "more than 2^128".to_string(), |r| r.to_string()),
            steps,
            support: support.len(),
            cap: grid.cap,
        });
    }
    let mut parts = vec![0; support.len()];
    if let Some(last) = parts.last_mut() {
        *last = steps;
    }
    Ok(GridRows {
        n: env.len(),
        support,
        resolution: grid.resolution.clone(),
        parts: Some(parts),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchWitness {
    pub deviator: Country,
    pub row: Vec<Rational>,
    /// First coordinate that is bad before and good after the deviation.
    pub flipped: Country,
}

fn refutes(
    env: &Environment,
    i: Country,
    before: (&StateVector, &GoodnessVector),
    after: &StateVector,
    criterion: NashCriterion,
) -> Option<Country> {
    let (states, gb) = before;
    let ga = goodness_from_states(env, i, after);
    let refuted = match criterion {
        NashCriterion::Strict => {
            (gb.dominated_by(&ga) && !ga.dominated_by(gb))
                || self_survival_gain(states.get(i), after.get(i))
        }
        NashCriterion::AnyImprovement => !ga.dominated_by(gb),
    };
    if !refuted {
        return None;
    }
    gb.bad_coordinates().find(|&j| ga.get(j) == Some(true))
}

/// Searches every grid deviation of every country; the lowest
/// `(country, lexicographic row)` refutation wins.
pub fn refute_by_search(
    env: &Environment,
    u: &StrategyMatrix,
    grid: &GridSpec,
    criterion: NashCriterion,
) -> Result<Option<SearchWitness>, OracleError> {
    let searches = env
        .countries()
        .map(|i| enumerate_grid_deviations(env, i, grid).map(|rows| (i, rows)))
        .collect::<Result<Vec<_>, _>>()?;
    let before = env.state_vector(u);
    for (i, rows) in searches {
        let gb = goodness_from_states(env, i, &before);
        for row in rows {
            let after = env.state_vector_with_row(u, i, &row);
            if let Some(flipped) = refutes(env, i, (&before, &gb), &after, criterion) {
                return Ok(Some(SearchWitness {
                    deviator: i,
                    row,
                    flipped,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    AgreeEquilibrium,
    AgreeRefuted,
    /// The closed form refutes but no grid row does: the refuting
    /// deviation needs values off the grid.
    GridTooCoarse,
    /// The search found a refutation the closed form missed.
    HardDisagreement,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::AgreeEquilibrium => "agree-equilibrium",
            Verdict::AgreeRefuted => "agree-refuted",
            Verdict::GridTooCoarse => "grid-too-coarse",
            Verdict::HardDisagreement => "hard-disagreement",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossValidation {
    pub verdict: Verdict,
    pub closed_form: NashReport,
    pub search: Option<SearchWitness>,
}

pub fn cross_validate(
    env: &Environment,
    u: &StrategyMatrix,
    grid: &GridSpec,
    criterion: NashCriterion,
) -> Result<CrossValidation, OracleError> {
    let closed_form = is_nash(env, u, criterion);
    let search = refute_by_search(env, u, grid, criterion)?;
    let verdict = match (closed_form.is_equilibrium(), search.is_some()) {
        (true, false) => Verdict::AgreeEquilibrium,
        (false, true) => Verdict::AgreeRefuted,
        (false, false) => Verdict::GridTooCoarse,
        (true, true) => Verdict::HardDisagreement,
    };
    Ok(CrossValidation {
        verdict,
        closed_form,
        search,
    })
}

/// Smallest resolution 1/k that divides every power, if one with `k <= limit` exists.
pub fn common_resolution(env: &Environment, limit: u64) -> Option<Rational> {
    let mut lcm = BigInt::from(1);
    for p in env.powers() {
        lcm = lcm.lcm(p.denom());
    }
    let k = lcm.to_u64().filter(|&k| k <= limit)?;
    Some(Rational::new(BigInt::from(1), BigInt::from(k)))
}
