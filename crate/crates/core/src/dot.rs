//! Graphviz export of an environment, optionally weighted by a strategy.
//!
//! Each relation becomes two directed edges. Adversary edges are red and
//! friend edges green. With a strategy, edge `(i, j)` carries `u_ij` and
//! vertex `i` carries its reserve `u_ii`.

use std::fmt::Write;

use crate::model::{Environment, Relation, StrategyMatrix};
use crate::rational::format_rational;

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

pub fn export_dot(env: &Environment, u: Option<&StrategyMatrix>) -> String {
    let mut out = String::new();
    out.push_str("digraph environment {\n");
    out.push_str("  node [shape=circle];\n");
    for c in env.countries() {
        let label = match u {
            Some(u) => format!("{}\n{}", env.name(c), format_rational(u.get(c, c))),
            None => env.name(c).to_string(),
        };
        writeln!(out, "  {} [label={}];", c.label(), quote(&label)).unwrap();
    }
    for &(pair, relation) in env.relations() {
        let color = match relation {
            Relation::Adversary => "red",
            Relation::Friend => "green",
        };
        let (a, b) = pair.ends();
        for (from, to) in [(a, b), (b, a)] {
            write!(out, "  {} -> {} [color={color}", from.label(), to.label()).unwrap();
            if let Some(u) = u {
                write!(out, ", label={}", quote(&format_rational(u.get(from, to)))).unwrap();
            }
            out.push_str("];\n");
        }
    }
    out.push_str("}\n");
    out
}
