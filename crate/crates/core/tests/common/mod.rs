#![allow(dead_code)]

use num_bigint::BigInt;
use pag_core::model::{Country, Environment, StrategyMatrix};
use pag_core::rational::Rational;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    rat(v, 1)
}

pub struct EnvShape {
    pub max_n: usize,
    pub max_q: usize,
    /// Bound on numerators and denominators of powers.
    pub max_part: i64,
    /// Only integer powers in `0..=max_part`.
    pub integer: bool,
}

/// Random environment: each unordered pair is unrelated, friendly or
/// adversarial, with adversary pairs capped at `max_q`.
pub fn random_env<R: Rng>(rng: &mut R, shape: &EnvShape) -> Environment {
    let n = rng.gen_range(1..=shape.max_n);
    let power = (0..n)
        .map(|_| {
            if shape.integer {
                int(rng.gen_range(0..=shape.max_part))
            } else {
                rat(
                    rng.gen_range(0..=shape.max_part),
                    rng.gen_range(1..=shape.max_part),
                )
            }
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    let (mut friends, mut adversaries) = (Vec::new(), Vec::new());
    for pair in pairs {
        match rng.gen_range(0..3) {
            0 => friends.push(pair),
            1 if adversaries.len() < shape.max_q => adversaries.push(pair),
            _ => {}
        }
    }
    let names = (1..=n).map(|k| format!("C{k}")).collect();
    Environment::new(names, power, &friends, &adversaries).unwrap()
}

/// Random admissible row for `i`: integer weights over the relevant
/// countries, normalized to the power.
pub fn random_row<R: Rng>(rng: &mut R, env: &Environment, i: Country) -> Vec<Rational> {
    let support = env.relevant(i);
    let mut weights: Vec<i64> = support.iter().map(|_| rng.gen_range(0..=4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let mut row = vec![int(0); env.len()];
    for (c, w) in support.iter().zip(weights) {
        row[c.index()] = env.power(i) * rat(w, total);
    }
    row
}

pub fn random_strategy<R: Rng>(rng: &mut R, env: &Environment) -> StrategyMatrix {
    let rows = env.countries().map(|i| random_row(rng, env, i)).collect();
    env.validate_strategy(rows).unwrap()
}

/// Random strategy whose entries are integers; powers must be integers.
pub fn random_integer_strategy<R: Rng>(rng: &mut R, env: &Environment) -> StrategyMatrix {
    let rows = env
        .countries()
        .map(|i| {
            let support = env.relevant(i);
            let p = env.power(i).to_integer();
            let mut row = vec![int(0); env.len()];
            let mut units: i64 = p.try_into().unwrap();
            while units > 0 {
                let c = support[rng.gen_range(0..support.len())];
                row[c.index()] += int(1);
                units -= 1;
            }
            row
        })
        .collect();
    env.validate_strategy(rows).unwrap()
}
