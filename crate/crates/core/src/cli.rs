//! Command-line front end. `run` is the whole program minus process exit,
//! so it can be driven from tests with in-memory streams.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dot::export_dot;
use crate::equilibrium::{
    construct_equilibrium, enumerate_equilibria, equivalence_classes, is_nash, EnumeratedMatrix,
    NashCriterion, NashReport, PairOrdering,
};
use crate::io::{read_scenario, read_strategy, strategy_file_to_string, FormatError, StrategyFile};
use crate::model::{Environment, StrategyMatrix};
use crate::oracle::{cross_validate, GridSpec, Verdict, DEFAULT_CAP};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Parser)]
#[command(
    name = "pag",
    version,
    about = "Exact power allocation games on friend/adversary networks"
)]
struct Cli {
    /// Output style for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// What counts as a refuting unilateral deviation.
    #[arg(long, global = true, value_enum, default_value_t = CriterionArg::Strict)]
    criterion: CriterionArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Strict,
    AnyImprovement,
}

impl From<CriterionArg> for NashCriterion {
    fn from(arg: CriterionArg) -> Self {
        match arg {
            CriterionArg::Strict => NashCriterion::Strict,
            CriterionArg::AnyImprovement => NashCriterion::AnyImprovement,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario, and optionally a strategy against it.
    Validate {
        scenario: PathBuf,
        strategy: Option<PathBuf>,
    },
    /// Print support, threat and state of every country.
    States {
        scenario: PathBuf,
        strategy: PathBuf,
    },
    /// Decide whether a strategy is a pure Nash equilibrium (exit 1 if not).
    CheckNash {
        scenario: PathBuf,
        strategy: PathBuf,
    },
    /// Build a strategy from an ordering of the adversary pairs.
    Construct {
        scenario: PathBuf,
        /// 1-based adversary labels in processing order, e.g. 2,1,3.
        #[arg(long, value_delimiter = ',', conflicts_with = "all_orderings")]
        ordering: Option<Vec<usize>>,
        /// Write the strategy here instead of standard output.
        #[arg(long, conflicts_with = "all_orderings")]
        out: Option<PathBuf>,
        /// Construct from every ordering, in lexicographic order.
        #[arg(long)]
        all_orderings: bool,
        /// Stop after this many orderings.
        #[arg(long, default_value_t = 5040, requires = "all_orderings")]
        max: usize,
        /// Directory receiving one strategy file per distinct matrix.
        #[arg(long, requires = "all_orderings")]
        out_dir: Option<PathBuf>,
    },
    /// Group constructed equilibria by state vector.
    Classes {
        scenario: PathBuf,
        #[arg(long, default_value_t = 5040)]
        max: usize,
    },
    /// Cross-check the closed-form verdict against a grid search.
    Oracle {
        scenario: PathBuf,
        strategy: PathBuf,
        /// Grid step, e.g. 1 or 1/2.
        #[arg(long, value_parser = parse_resolution)]
        resolution: Rational,
        /// Maximum grid rows per country.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Print the relation graph in Graphviz format.
    ExportDot {
        scenario: PathBuf,
        strategy: Option<PathBuf>,
    },
}

fn parse_resolution(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<i32, Failure>;

struct Ctx<'a> {
    format: Format,
    criterion: NashCriterion,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit_json(&mut self, value: &Value) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(value).expect("json value serializes");
        writeln!(self.out, "{text}")
    }
}

/// Runs the program on `args` (including the program name) and returns
/// the exit code: 0 success, 1 refuted or invalid input, 2 usage error.
pub fn run<S: AsRef<str>>(args: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        criterion: cli.criterion.into(),
        out,
        err,
    };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(ctx.err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Outcome {
    match command {
        Command::Validate { scenario, strategy } => validate(ctx, &scenario, strategy.as_deref()),
        Command::States { scenario, strategy } => states(ctx, &scenario, &strategy),
        Command::CheckNash { scenario, strategy } => check_nash(ctx, &scenario, &strategy),
        Command::Construct {
            scenario,
            ordering,
            out,
            all_orderings,
            max,
            out_dir,
        } => {
            if all_orderings {
                construct_all(ctx, &scenario, max, out_dir.as_deref())
            } else {
                construct_one(ctx, &scenario, ordering.as_deref(), out.as_deref())
            }
        }
        Command::Classes { scenario, max } => classes(ctx, &scenario, max),
        Command::Oracle {
            scenario,
            strategy,
            resolution,
            cap,
        } => oracle(ctx, &scenario, &strategy, resolution, cap),
        Command::ExportDot { scenario, strategy } => {
            let env = load_scenario(&scenario)?;
            let u = strategy.map(|p| load_strategy(&env, &p)).transpose()?;
            write!(ctx.out, "{}", export_dot(&env, u.as_ref())).map_err(Failure::invalid)?;
            Ok(0)
        }
    }
}

fn located(path: &Path, e: FormatError) -> Failure {
    match e {
        FormatError::Io { .. } => Failure::invalid(e),
        _ => Failure::invalid(format!("{}: {e}", path.display())),
    }
}

fn load_scenario(path: &Path) -> Result<Environment, Failure> {
    read_scenario(path).map_err(|e| located(path, e))
}

fn load_strategy(env: &Environment, path: &Path) -> Result<StrategyMatrix, Failure> {
    read_strategy(env, path).map_err(|e| located(path, e))
}

fn validate(ctx: &mut Ctx<'_>, scenario: &Path, strategy: Option<&Path>) -> Outcome {
    let env = load_scenario(scenario)?;
    if let Some(path) = strategy {
        load_strategy(&env, path)?;
    }
    let (n, f, q) = (
        env.len(),
        env.friend_pairs().len(),
        env.adversary_pair_count(),
    );
    match ctx.format {
        Format::Json => ctx.emit_json(&json!({
            "valid": true,
            "countries": n,
            "friend_pairs": f,
            "adversary_pairs": q,
            "strategy_checked": strategy.is_some(),
        })),
        Format::Human => {
            let mut text = format!("ok: {n} countries, {f} friend pairs, {q} adversary pairs");
            if strategy.is_some() {
                text.push_str(", strategy valid");
            }
            writeln!(ctx.out, "{text}")
        }
    }
    .map_err(Failure::invalid)?;
    Ok(0)
}

fn states(ctx: &mut Ctx<'_>, scenario: &Path, strategy: &Path) -> Outcome {
    let env = load_scenario(scenario)?;
    let u = load_strategy(&env, strategy)?;
    let rows: Vec<(usize, &str, String, String, &str)> = env
        .countries()
        .map(|c| {
            let s = env.support(&u, c).expect("country in range");
            let t = env.threat(&u, c).expect("country in range");
            let state = crate::model::State::compare(&s, &t);
            (
                c.label(),
                env.name(c),
                format_rational(&s),
                format_rational(&t),
                state.as_str(),
            )
        })
        .collect();
    match ctx.format {
        Format::Json => {
            let countries: Vec<Value> = rows
                .iter()
                .map(|(id, name, s, t, state)| {
                    json!({"id": id, "name": name, "support": s, "threat": t, "state": state})
                })
                .collect();
            ctx.emit_json(&json!({ "countries": countries }))
        }
        Format::Human => {
            let width = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(4);
            let mut text = format!(
                "{:>3}  {:<width$}  {:>8}  {:>8}  state\n",
                "id", "name", "support", "threat"
            );
            for (id, name, s, t, state) in &rows {
                text.push_str(&format!(
                    "{id:>3}  {name:<width$}  {s:>8}  {t:>8}  {state}\n"
                ));
            }
            write!(ctx.out, "{text}")
        }
    }
    .map_err(Failure::invalid)?;
    Ok(0)
}

fn report_json(env: &Environment, report: &NashReport) -> Value {
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "deviator": w.deviator.label(),
                "coordinate": w.coordinate.label(),
                "margin": format_rational(&w.margin),
                "deviator_name": env.name(w.deviator),
                "coordinate_name": env.name(w.coordinate),
            })
        })
        .collect();
    json!({
        "criterion": report.criterion.as_str(),
        "equilibrium": report.is_equilibrium(),
        "witnesses": witnesses,
    })
}

fn report_human(env: &Environment, report: &NashReport) -> String {
    let mut text = if report.is_equilibrium() {
        format!("equilibrium ({} criterion)\n", report.criterion)
    } else {
        format!(
            "not an equilibrium ({} criterion), {} refuting deviation(s)\n",
            report.criterion,
            report.witnesses.len()
        )
    };
    for w in &report.witnesses {
        text.push_str(&format!(
            "  {} ({}) can flip {} ({}), margin {}\n",
            w.deviator.label(),
            env.name(w.deviator),
            w.coordinate.label(),
            env.name(w.coordinate),
            format_rational(&w.margin)
        ));
    }
    text
}

fn check_nash(ctx: &mut Ctx<'_>, scenario: &Path, strategy: &Path) -> Outcome {
    let env = load_scenario(scenario)?;
    let u = load_strategy(&env, strategy)?;
    let report = is_nash(&env, &u, ctx.criterion);
    match ctx.format {
        Format::Json => ctx.emit_json(&report_json(&env, &report)),
        Format::Human => write!(ctx.out, "{}", report_human(&env, &report)),
    }
    .map_err(Failure::invalid)?;
    Ok(if report.is_equilibrium() { 0 } else { 1 })
}

fn construct_one(
    ctx: &mut Ctx<'_>,
    scenario: &Path,
    ordering: Option<&[usize]>,
    out: Option<&Path>,
) -> Outcome {
    let env = load_scenario(scenario)?;
    let q = env.adversary_pair_count();
    let ordering = match ordering {
        Some(labels) => PairOrdering::from_labels(labels, q).map_err(|e| Failure {
            code: 2,
            message: format!("--ordering: {e}"),
        })?,
        None => PairOrdering::identity(q),
    };
    let built = construct_equilibrium(&env, &ordering).expect("ordering length matches");
    let report = is_nash(&env, &built.strategy, ctx.criterion);
    let text = strategy_file_to_string(&StrategyFile::from_construction(&built));
    if !report.is_equilibrium() {
        let _ = write!(
            ctx.err,
            "warning: ordering {ordering} does not yield an equilibrium\n{}",
            report_human(&env, &report)
        );
    }
    match out {
        None => write!(ctx.out, "{text}").map_err(Failure::invalid)?,
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            match ctx.format {
                Format::Json => ctx.emit_json(&json!({
                    "path": path.display().to_string(),
                    "ordering": ordering.labels(),
                    "report": report_json(&env, &report),
                })),
                Format::Human => writeln!(
                    ctx.out,
                    "wrote {} (ordering {ordering}, {})",
                    path.display(),
                    if report.is_equilibrium() {
                        "equilibrium"
                    } else {
                        "refuted"
                    }
                ),
            }
            .map_err(Failure::invalid)?;
        }
    }
    Ok(if report.is_equilibrium() { 0 } else { 1 })
}

fn construct_all(
    ctx: &mut Ctx<'_>,
    scenario: &Path,
    max: usize,
    out_dir: Option<&Path>,
) -> Outcome {
    let env = load_scenario(scenario)?;
    let run = enumerate_equilibria(&env, max, ctx.criterion);
    let tagged: Vec<(&str, usize, &EnumeratedMatrix)> = run
        .equilibria
        .iter()
        .enumerate()
        .map(|(k, m)| ("equilibrium", k + 1, m))
        .chain(
            run.refuted
                .iter()
                .enumerate()
                .map(|(k, m)| ("refuted", k + 1, m)),
        )
        .collect();

    let mut paths = Vec::new();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::invalid(format!("{}: {e}", dir.display())))?;
        for (kind, k, m) in &tagged {
            let path = dir.join(format!("{kind}-{k:03}.json"));
            let file =
                StrategyFile::from_decomposed(&m.strategy, &m.orderings[0], &m.decomposition);
            fs::write(&path, strategy_file_to_string(&file))
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            paths.push(Some(path.display().to_string()));
        }
    } else {
        paths.resize(tagged.len(), None);
    }

    let total = run
        .total_orderings
        .map_or_else(|| "overflow".to_string(), |t| t.to_string());
    match ctx.format {
        Format::Json => {
            let matrices: Vec<Value> = tagged
                .iter()
                .zip(&paths)
                .map(|((kind, _, m), path)| {
                    json!({
                        "kind": kind,
                        "orderings": m.orderings.iter().map(PairOrdering::labels).collect::<Vec<_>>(),
                        "states": m.states.states().iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                        "path": path,
                    })
                })
                .collect();
            ctx.emit_json(&json!({
                "criterion": ctx.criterion.as_str(),
                "total_orderings": total,
                "orderings_tried": run.orderings_tried,
                "truncated": run.truncated(),
                "distinct_matrices": run.distinct_matrices(),
                "equilibria": run.equilibria.len(),
                "refuted": run.refuted.len(),
                "matrices": matrices,
            }))
        }
        Format::Human => {
            let mut text = format!(
                "{} of {total} orderings tried, {} distinct matrices, {} equilibria, {} refuted\n",
                run.orderings_tried,
                run.distinct_matrices(),
                run.equilibria.len(),
                run.refuted.len()
            );
            for ((kind, k, m), path) in tagged.iter().zip(&paths) {
                text.push_str(&format!(
                    "  {kind} #{k}: states {}, {} ordering(s), first {}",
                    m.states,
                    m.orderings.len(),
                    m.orderings[0]
                ));
                if let Some(path) = path {
                    text.push_str(&format!(" -> {path}"));
                }
                text.push('\n');
            }
            write!(ctx.out, "{text}")
        }
    }
    .map_err(Failure::invalid)?;
    if run.truncated() {
        let _ = writeln!(
            ctx.err,
            "warning: stopped after {} orderings",
            run.orderings_tried
        );
    }
    if !run.refuted.is_empty() {
        let _ = writeln!(
            ctx.err,
            "warning: {} constructed matrices are not equilibria",
            run.refuted.len()
        );
        return Ok(1);
    }
    Ok(0)
}

fn classes(ctx: &mut Ctx<'_>, scenario: &Path, max: usize) -> Outcome {
    let env = load_scenario(scenario)?;
    let run = enumerate_equilibria(&env, max, ctx.criterion);
    let matrices: Vec<StrategyMatrix> = run.equilibria.iter().map(|m| m.strategy.clone()).collect();
    let classes = equivalence_classes(&env, &matrices, ctx.criterion).map_err(Failure::invalid)?;
    match ctx.format {
        Format::Json => {
            let list: Vec<Value> = classes
                .iter()
                .map(|class| {
                    let orderings: usize =
                        class.members.iter().map(|&k| run.equilibria[k].orderings.len()).sum();
                    json!({
                        "states": class.states.states().iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                        "matrices": class.members.len(),
                        "orderings": orderings,
                    })
                })
                .collect();
            ctx.emit_json(&json!({
                "criterion": ctx.criterion.as_str(),
                "orderings_tried": run.orderings_tried,
                "truncated": run.truncated(),
                "equilibria": run.equilibria.len(),
                "refuted": run.refuted.len(),
                "classes": list,
            }))
        }
        Format::Human => {
            let mut text = format!(
                "{} classes over {} equilibria ({} orderings tried, {} refuted)\n",
                classes.len(),
                run.equilibria.len(),
                run.orderings_tried,
                run.refuted.len()
            );
            for class in &classes {
                let orderings: usize =
                    class.members.iter().map(|&k| run.equilibria[k].orderings.len()).sum();
                text.push_str(&format!(
                    "  {}: {} matrices, {} orderings\n",
                    class.states,
                    class.members.len(),
                    orderings
                ));
            }
            write!(ctx.out, "{text}")
        }
    }
    .map_err(Failure::invalid)?;
    if run.truncated() {
        let _ = writeln!(
            ctx.err,
            "warning: stopped after {} orderings",
            run.orderings_tried
        );
    }
    Ok(0)
}

fn oracle(
    ctx: &mut Ctx<'_>,
    scenario: &Path,
    strategy: &Path,
    resolution: Rational,
    cap: u64,
) -> Outcome {
    let env = load_scenario(scenario)?;
    let u = load_strategy(&env, strategy)?;
    let grid = GridSpec::new(resolution).with_cap(cap);
    let result = cross_validate(&env, &u, &grid, ctx.criterion).map_err(Failure::invalid)?;
    let search = result.search.as_ref().map(|w| {
        (
            w.deviator.label(),
            w.flipped.label(),
            w.row.iter().map(format_rational).collect::<Vec<_>>(),
        )
    });
    match ctx.format {
        Format::Json => ctx.emit_json(&json!({
            "verdict": result.verdict.as_str(),
            "resolution": format_rational(&grid.resolution),
            "closed_form": report_json(&env, &result.closed_form),
            "search": search.as_ref().map(|(deviator, flipped, row)| json!({
                "deviator": deviator,
                "flipped": flipped,
                "row": row,
            })),
        })),
        Format::Human => {
            let mut text = format!("verdict: {}\n", result.verdict.as_str());
            text.push_str(&report_human(&env, &result.closed_form));
            match &search {
                Some((deviator, flipped, row)) => text.push_str(&format!(
                    "grid search: {deviator} plays [{}] and flips {flipped}\n",
                    row.join(", ")
                )),
                None => text.push_str("grid search: no refuting row\n"),
            }
            write!(ctx.out, "{text}")
        }
    }
    .map_err(Failure::invalid)?;
    if result.verdict == Verdict::HardDisagreement {
        let _ = writeln!(ctx.err, "warning: closed form and grid search disagree");
    }
    Ok(if result.verdict == Verdict::AgreeEquilibrium {
        0
    } else {
        1
    })
}
