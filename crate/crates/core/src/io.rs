//! Scenario and strategy files.
//!
//! Both are JSON documents carrying a version tag. Rationals are always
//! strings (`"1/3"`, `"0.25"`, `"2"`) so values survive other tools
//! unchanged. Countries and relations use 1-based labels.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{Construction, Decomposition, PairOrdering};
use crate::model::{Environment, EnvironmentError, StrategyErrors, StrategyMatrix};
use crate::rational::{format_rational, parse_rational, Rational};

pub const SCENARIO_VERSION: &str = "pag-scenario/1";
pub const STRATEGY_VERSION: &str = "pag-strategy/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountryEntry {
    pub id: usize,
    pub name: String,
    pub power: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: String,
    pub countries: Vec<CountryEntry>,
    #[serde(default)]
    pub friends: Vec<[usize; 2]>,
    #[serde(default)]
    pub adversaries: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionRecord {
    /// Adversary labels in processing order.
    pub ordering: Vec<usize>,
    pub d: Vec<String>,
    pub c: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub version: String,
    pub n: usize,
    pub rows: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionRecord>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported version `{found}`, expected `{expected}`")]
    Version {
        expected: &'static str,
        found: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Environment(#[from] EnvironmentError),
    #[error("invalid strategy: {0}")]
    Strategy(#[from] StrategyErrors),
}

fn parse_error(err: serde_json::Error) -> FormatError {
    FormatError::Parse {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_at(text: &str, path: impl FnOnce() -> String) -> Result<Rational, FormatError> {
    parse_rational(text).map_err(|e| invalid(path(), e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl ScenarioFile {
    pub fn from_environment(env: &Environment) -> Self {
        ScenarioFile {
            version: SCENARIO_VERSION.to_string(),
            countries: env
                .countries()
                .map(|c| CountryEntry {
                    id: c.label(),
                    name: env.name(c).to_string(),
                    power: format_rational(env.power(c)),
                })
                .collect(),
            friends: env.friend_pairs().iter().map(|p| p.labels()).collect(),
            adversaries: env.adversary_pairs().iter().map(|p| p.labels()).collect(),
        }
    }

    pub fn to_environment(&self) -> Result<Environment, FormatError> {
        if self.version != SCENARIO_VERSION {
            return Err(FormatError::Version {
                expected: SCENARIO_VERSION,
                found: self.version.clone(),
            });
        }
        let n = self.countries.len();
        let mut slots: Vec<Option<(String, Rational)>> = vec![None; n];
        for (k, entry) in self.countries.iter().enumerate() {
            if entry.id == 0 || entry.id > n {
                return Err(invalid(
                    format!("countries[{k}].id"),
                    format!("id {} outside 1..={n}", entry.id),
                ));
            }
            let power = parse_at(&entry.power, || format!("countries[{k}].power"))?;
            let slot = &mut slots[entry.id - 1];
            if slot.is_some() {
                return Err(invalid(
                    format!("countries[{k}].id"),
                    format!("duplicate id {}", entry.id),
                ));
            }
            *slot = Some((entry.name.clone(), power));
        }
        let (names, powers) = slots.into_iter().flatten().unzip();
        let pairs = |raw: &[[usize; 2]]| raw.iter().map(|&[a, b]| (a, b)).collect::<Vec<_>>();
        Ok(Environment::new(
            names,
            powers,
            &pairs(&self.friends),
            &pairs(&self.adversaries),
        )?)
    }
}

pub fn parse_scenario_str(text: &str) -> Result<Environment, FormatError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(parse_error)?;
    file.to_environment()
}

pub fn read_scenario(path: &Path) -> Result<Environment, FormatError> {
    parse_scenario_str(&read_text(path)?)
}

pub fn scenario_to_string(env: &Environment) -> String {
    let mut text = serde_json::to_string_pretty(&ScenarioFile::from_environment(env))
        .expect("scenario serializes");
    text.push('\n');
    text
}

impl StrategyFile {
    pub fn from_matrix(u: &StrategyMatrix) -> Self {
        StrategyFile {
            version: STRATEGY_VERSION.to_string(),
            n: u.len(),
            rows: u
                .rows()
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
            decomposition: None,
        }
    }

    pub fn from_construction(built: &Construction) -> Self {
        StrategyFile::from_decomposed(&built.strategy, &built.ordering, &built.decomposition)
    }

    pub fn from_decomposed(
        u: &StrategyMatrix,
        ordering: &PairOrdering,
        dec: &Decomposition,
    ) -> Self {
        let mut file = StrategyFile::from_matrix(u);
        file.decomposition = Some(DecompositionRecord {
            ordering: ordering.labels(),
            d: dec.d.iter().map(format_rational).collect(),
            c: dec.c.iter().map(format_rational).collect(),
        });
        file
    }

    pub fn to_matrix(&self, env: &Environment) -> Result<StrategyMatrix, FormatError> {
        if self.version != STRATEGY_VERSION {
            return Err(FormatError::Version {
                expected: STRATEGY_VERSION,
                found: self.version.clone(),
            });
        }
        if self.n != env.len() {
            return Err(invalid(
                "n",
                format!(
                    "strategy has n = {} but scenario has {} countries",
                    self.n,
                    env.len()
                ),
            ));
        }
        if self.rows.len() != self.n {
            return Err(invalid(
                "rows",
                format!("expected {} rows, found {}", self.n, self.rows.len()),
            ));
        }
        let mut rows = Vec::with_capacity(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.n {
                return Err(invalid(
                    format!("rows[{i}]"),
                    format!("expected {} entries, found {}", self.n, row.len()),
                ));
            }
            rows.push(
                row.iter()
                    .enumerate()
                    .map(|(j, v)| parse_at(v, || format!("rows[{i}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(env.validate_strategy(rows)?)
    }

    pub fn decomposition(&self) -> Result<Option<Decomposition>, FormatError> {
        let Some(record) = &self.decomposition else {
            return Ok(None);
        };
        let parse_all = |values: &[String], field: &str| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| parse_at(v, || format!("decomposition.{field}[{k}]")))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(Some(Decomposition {
            d: parse_all(&record.d, "d")?,
            c: parse_all(&record.c, "c")?,
        }))
    }
}

pub fn parse_strategy_file(text: &str) -> Result<StrategyFile, FormatError> {
    serde_json::from_str(text).map_err(parse_error)
}

pub fn parse_strategy_str(env: &Environment, text: &str) -> Result<StrategyMatrix, FormatError> {
    parse_strategy_file(text)?.to_matrix(env)
}

pub fn read_strategy(env: &Environment, path: &Path) -> Result<StrategyMatrix, FormatError> {
    parse_strategy_str(env, &read_text(path)?)
}

pub fn strategy_file_to_string(file: &StrategyFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("strategy serializes");
    text.push('\n');
    text
}

pub fn strategy_to_string(u: &StrategyMatrix) -> String {
    strategy_file_to_string(&StrategyFile::from_matrix(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{construct_equilibrium, PairOrdering};
    use crate::model::fixtures::*;
    use crate::rational::{int, ratio};

    const MINIMAL: &str =
        r#"{"version": "pag-scenario/1", "countries": [{"id": 1, "name": "Solo", "power": "3"}]}"#;

    #[test]
    fn minimal_document() {
        let env = parse_scenario_str(MINIMAL).unwrap();
        assert_eq!(env.len(), 1);
        assert_eq!(env.power(c(1)), &int(3));
        assert_eq!(env.relation_count(), 0);
    }

    #[test]
    fn powers_are_exact() {
        let text = r#"{"version": "pag-scenario/1",
            "countries": [{"id": 2, "name": "B", "power": "0.75"}, {"id": 1, "name": "A", "power": "1/3"}],
            "adversaries": [[2, 1]]}"#;
        let env = parse_scenario_str(text).unwrap();
        assert_eq!(env.names(), ["A", "B"]);
        assert_eq!(env.power(c(1)), &ratio(1, 3));
        assert_eq!(env.power(c(2)), &ratio(3, 4));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err =
            parse_scenario_str("{\n  \"version\": \"pag-scenario/1\",\n  \"countries\": [,]\n}")
                .unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
        let err =
            parse_scenario_str(r#"{"version": "pag-scenario/1", "countries": [], "extra": 1}"#)
                .unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn semantic_errors() {
        let bad_power =
            r#"{"version": "pag-scenario/1", "countries": [{"id": 1, "name": "A", "power": "x"}]}"#;
        assert!(matches!(
            parse_scenario_str(bad_power),
            Err(FormatError::Invalid { path, .. }) if path == "countries[0].power"
        ));
        let dup = r#"{"version": "pag-scenario/1", "countries": [{"id": 1, "name": "A", "power": "1"}, {"id": 1, "name": "B", "power": "1"}]}"#;
        assert!(matches!(
            parse_scenario_str(dup),
            Err(FormatError::Invalid { .. })
        ));
        let overlap = r#"{"version": "pag-scenario/1",
            "countries": [{"id": 1, "name": "A", "power": "1"}, {"id": 2, "name": "B", "power": "1"}],
            "friends": [[1, 2]], "adversaries": [[1, 2]]}"#;
        assert!(matches!(
            parse_scenario_str(overlap),
            Err(FormatError::Environment(
                EnvironmentError::ConflictingRelation { .. }
            ))
        ));
        let version = r#"{"version": "pag-scenario/9", "countries": []}"#;
        assert!(matches!(
            parse_scenario_str(version),
            Err(FormatError::Version { .. })
        ));
    }

    #[test]
    fn strategy_parsing() {
        let env = e2();
        let u = parse_strategy_str(
            &env,
            r#"{"version": "pag-strategy/1", "n": 2, "rows": [["1", "1"], ["0", "1"]]}"#,
        )
        .unwrap();
        assert_eq!(u, matrix(&env, &[&[1, 1], &[0, 1]]));
        let bad = parse_strategy_str(
            &env,
            r#"{"version": "pag-strategy/1", "n": 2, "rows": [["2", "1"], ["0", "1"]]}"#,
        );
        assert!(matches!(bad, Err(FormatError::Strategy(_))));
        let wrong_n =
            parse_strategy_str(&env, r#"{"version": "pag-strategy/1", "n": 3, "rows": []}"#);
        assert!(matches!(wrong_n, Err(FormatError::Invalid { path, .. }) if path == "n"));
        let entry = parse_strategy_str(
            &env,
            r#"{"version": "pag-strategy/1", "n": 2, "rows": [["1", "?"], ["0", "1"]]}"#,
        );
        assert!(matches!(entry, Err(FormatError::Invalid { path, .. }) if path == "rows[0][1]"));
    }

    #[test]
    fn construction_file_carries_decomposition() {
        let env = e3();
        let built = construct_equilibrium(&env, &PairOrdering::from_labels(&[2, 1, 3], 3).unwrap())
            .unwrap();
        let text = strategy_file_to_string(&StrategyFile::from_construction(&built));
        let file = parse_strategy_file(&text).unwrap();
        assert_eq!(file.to_matrix(&env).unwrap(), built.strategy);
        assert_eq!(file.decomposition().unwrap(), Some(built.decomposition));
        assert_eq!(file.decomposition.unwrap().ordering, vec![2, 1, 3]);
    }

    #[test]
    fn round_trips() {
        let env = env(&[3, 0, 2, 5], &[(1, 2), (3, 4)], &[(1, 3), (2, 4)]);
        let again = parse_scenario_str(&scenario_to_string(&env)).unwrap();
        assert_eq!(again, env);
        let built = construct_equilibrium(&env, &PairOrdering::identity(2)).unwrap();
        assert_eq!(
            parse_strategy_str(&env, &strategy_to_string(&built.strategy)).unwrap(),
            built.strategy
        );
    }
}
