//! Command-line driver. Every verb prints a single JSON document (or CSV
//! for `sweep`) with sorted keys and exact `"num/den"` rationals.
//!
//! Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 on
//! usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use qadv_core::adversary::{RelationInstance, WeightScheme};
use qadv_core::certificates::{cert_stats, gamma_symmetric};
use qadv_core::instances::{
    gen_bipartite_matching_with, gen_bipartiteness, gen_graph_matching,
    gen_invert_permutation_relation, CountedInstance, MatchingOptions, Mode, YLayout,
};
use qadv_core::optimizer::{best_known_bound, AscentConfig};
use qadv_core::verifier::{
    ci_value, element_distinctness_report, sweep_total_functions_with, verify_conversion,
    verify_scheme_limits, SweepOptions, Verdict,
};
use qadv_core::{rational, Error, FunctionTable};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "qadv",
    version,
    about = "Adversary lower bounds and certificate ceilings for small functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certificate measures of a function table.
    Analyze {
        #[arg(long)]
        table: PathBuf,
        /// Comma-separated subset of c0,c1,c,c_minus,ci,gamma.
        #[arg(long, value_delimiter = ',', default_value = "c0,c1,ci")]
        measures: Vec<Measure>,
    },
    /// Best adversary bound found by ascent from several starts.
    Optimize {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        ascent: AscentArgs,
        /// Write the winning weight scheme here.
        #[arg(long)]
        scheme_out: Option<PathBuf>,
        /// Write the winning relation here.
        #[arg(long)]
        relation_out: Option<PathBuf>,
    },
    /// Generate a relation construction and report its parameters.
    Instance {
        name: InstanceName,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "explicit")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random relabelings checked (bipartite matching only).
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Component layout of the Y side (bipartite matching only).
        #[arg(long, default_value = "two")]
        y_layout: YLayoutArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the explicit relation here, when one is materialized.
        #[arg(long)]
        relation_out: Option<PathBuf>,
    },
    /// Check a theorem on a relation and scheme.
    Verify {
        theorem: Theorem,
        #[command(flatten)]
        inputs: VerifyInputs,
    },
    /// Check every non-constant total Boolean function on a few variables.
    Sweep {
        #[arg(long)]
        nvars: usize,
        #[command(flatten)]
        ascent: AscentArgs,
        /// CSV destination (standard output by default).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Time budget in seconds; required for four variables.
        #[arg(long)]
        budget_secs: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct AscentArgs {
    #[arg(long, default_value_t = 200)]
    iters: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step multiplier after a stagnant pass, as "num/den".
    #[arg(long, default_value = "1/2")]
    shrink: String,
    /// Relative improvement floor, as "num/den".
    #[arg(long, default_value = "1/1000000")]
    tolerance: String,
}

impl AscentArgs {
    fn config(&self) -> Result<AscentConfig, Error> {
        let cfg = AscentConfig {
            max_iters: self.iters,
            seed: self.seed,
            step_shrink: rational::parse(&self.shrink)?,
            tolerance: rational::parse(&self.tolerance)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct VerifyInputs {
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<PathBuf>,
    #[arg(long)]
    relation: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Measure {
    C0,
    C1,
    C,
    #[value(name = "c_minus")]
    CMinus,
    Ci,
    Gamma,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum InstanceName {
    Bipartiteness,
    GraphMatching,
    BipartiteMatching,
    InvertPermutation,
    ElementDistinctness,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Explicit,
    Counting,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Explicit => Mode::Explicit,
            ModeArg::Counting => Mode::Counting,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum YLayoutArg {
    Two,
    One,
}

impl From<YLayoutArg> for YLayout {
    fn from(l: YLayoutArg) -> Self {
        match l {
            YLayoutArg::Two => YLayout::TwoComponents,
            YLayoutArg::One => YLayout::OneComponent,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Theorem {
    Thm6,
    Thm7,
    Thm9,
    Thm10,
}

/// Usage or input problem; reported on stderr with exit code 2.
enum Outcome {
    Usage(String),
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Outcome {
    fn from(e: std::io::Error) -> Self {
        Outcome::Usage(e.to_string())
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Outcome::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn emit(doc: &Json, out: Option<&Path>) -> Result<(), Outcome> {
    let text = format!("{}\n", serde_json::to_string(doc).map_err(Error::from)?);
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), Outcome> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_json(doc: &Json, path: &Path) -> Result<(), Outcome> {
    fs::write(
        path,
        format!("{}\n", serde_json::to_string(doc).map_err(Error::from)?),
    )?;
    Ok(())
}

fn read_json(path: &Path) -> Result<Json, Outcome> {
    let text =
        fs::read_to_string(path).map_err(|e| Outcome::Usage(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn verdict_code(failed: bool) -> i32 {
    if failed {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

fn dispatch(cmd: Command) -> Result<i32, Outcome> {
    match cmd {
        Command::Analyze { table, measures } => analyze(&FunctionTable::load(&table)?, &measures),
        Command::Optimize {
            table,
            ascent,
            scheme_out,
            relation_out,
        } => {
            let f = FunctionTable::load(&table)?;
            let best = best_known_bound(&f, &ascent.config()?)?;
            if let Some(path) = scheme_out {
                write_json(&best.scheme.to_json(&best.relation)?, &path)?;
            }
            if let Some(path) = relation_out {
                write_json(&best.relation.to_json()?, &path)?;
            }
            let mut doc = best.report.to_json(f.alphabet());
            doc["start"] = json!(best.start);
            emit(&doc, None)?;
            Ok(EXIT_PASS)
        }
        Command::Instance {
            name,
            n,
            mode,
            seed,
            samples,
            y_layout,
            out,
            relation_out,
        } => {
            let matching = MatchingOptions {
                samples,
                seed,
                y_layout: y_layout.into(),
            };
            instance(
                name,
                n,
                mode.into(),
                &matching,
                out.as_deref(),
                relation_out.as_deref(),
            )
        }
        Command::Verify { theorem, inputs } => verify(theorem, &inputs),
        Command::Sweep {
            nvars,
            ascent,
            out,
            json,
            budget_secs,
        } => {
            let opts = SweepOptions {
                time_budget: budget_secs.map(Duration::from_secs),
            };
            let sweep = sweep_total_functions_with(nvars, &ascent.config()?, &opts)?;
            write_text(&sweep.to_csv(), out.as_deref())?;
            if let Some(path) = json {
                write_json(&sweep.to_json(), &path)?;
            }
            Ok(verdict_code(!sweep.passed()))
        }
    }
}

fn analyze(f: &FunctionTable, measures: &[Measure]) -> Result<i32, Outcome> {
    let mut doc = Map::new();
    let stats = if measures
        .iter()
        .any(|m| matches!(m, Measure::C0 | Measure::C1 | Measure::C | Measure::CMinus))
    {
        Some(cert_stats(f)?)
    } else {
        None
    };
    for &m in measures {
        let (key, value) = match m {
            Measure::C0 => ("c0", json!(stats.expect("computed").c0)),
            Measure::C1 => ("c1", json!(stats.expect("computed").c1)),
            Measure::C => ("c", json!(stats.expect("computed").c)),
            Measure::CMinus => ("c_minus", json!(stats.expect("computed").c_minus)),
            Measure::Ci => {
                let ci = ci_value(f)?;
                if !ci.exact {
                    doc.insert("ci_exact".into(), json!(false));
                }
                ("ci", json!(ci.value))
            }
            Measure::Gamma => ("gamma", json!(gamma_symmetric(f)?)),
        };
        doc.insert(key.into(), value);
    }
    emit(&Json::Object(doc), None)?;
    Ok(EXIT_PASS)
}

fn instance(
    name: InstanceName,
    n: usize,
    mode: Mode,
    matching: &MatchingOptions,
    out: Option<&Path>,
    relation_out: Option<&Path>,
) -> Result<i32, Outcome> {
    let result: Result<CountedInstance, Error> = match name {
        InstanceName::Bipartiteness => gen_bipartiteness(n, mode),
        InstanceName::GraphMatching => gen_graph_matching(n, mode),
        InstanceName::BipartiteMatching => gen_bipartite_matching_with(n, mode, matching),
        InstanceName::InvertPermutation => gen_invert_permutation_relation(n),
        InstanceName::ElementDistinctness => {
            emit(&element_distinctness_report(n)?.to_json(), out)?;
            return Ok(EXIT_PASS);
        }
    };
    let inst = match result {
        Ok(inst) => inst,
        Err(Error::ConstructionCheck(msg)) => {
            eprintln!("construction check failed: {msg}");
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(e.into()),
    };
    if let (Some(path), Some(rel)) = (relation_out, &inst.relation) {
        write_json(&rel.to_json()?, path)?;
    }
    emit(&inst.to_json(), out)?;
    Ok(verdict_code(!inst.all_checks_pass()))
}

fn verify(theorem: Theorem, inputs: &VerifyInputs) -> Result<i32, Outcome> {
    let table = inputs
        .table
        .as_deref()
        .map(FunctionTable::load)
        .transpose()?;
    let rel_path = inputs
        .relation
        .as_deref()
        .ok_or_else(|| Outcome::Usage("--relation is required".into()))?;
    let rel = RelationInstance::from_json(&read_json(rel_path)?, table.as_ref())?;
    if theorem == Theorem::Thm6 {
        let report = verify_conversion(&rel)?;
        emit(&report.to_json(), None)?;
        return Ok(verdict_code(report.verdict.is_fail()));
    }
    let f = table.ok_or_else(|| Outcome::Usage("--table is required".into()))?;
    let scheme_path = inputs
        .scheme
        .as_deref()
        .ok_or_else(|| Outcome::Usage("--scheme is required".into()))?;
    let scheme = WeightScheme::from_json(&read_json(scheme_path)?, &rel)?;
    let (rel, scheme) = scheme.prune_empty(&rel)?;
    let report = verify_scheme_limits(&f, &rel, &scheme)?;
    let (key, verdict) = match theorem {
        Theorem::Thm7 => ("thm7", report.thm7),
        Theorem::Thm9 => ("thm9", report.thm9),
        Theorem::Thm10 => ("thm10", report.thm10),
        Theorem::Thm6 => unreachable!("handled above"),
    };
    let full = report.to_json();
    let mut doc = Map::new();
    doc.insert(key.into(), json!(verdict.name()));
    doc.insert("alb4_sq".into(), full["alb4_sq"].clone());
    let ceiling = match theorem {
        Theorem::Thm7 => ("n_cminus", full["n_cminus"].clone()),
        Theorem::Thm9 => ("n_ci", full["n_ci"].clone()),
        _ => ("c0c1", full["c0c1"].clone()),
    };
    doc.insert(ceiling.0.into(), ceiling.1);
    if theorem == Theorem::Thm10 {
        doc.insert("witness".into(), full["thm10_witness"].clone());
    }
    emit(&Json::Object(doc), None)?;
    Ok(verdict_code(verdict == Verdict::Fail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["qadv", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["qadv", "analyze"]), EXIT_USAGE);
        assert_eq!(
            run(["qadv", "analyze", "--table", "/nonexistent/f.tt"]),
            EXIT_USAGE
        );
        assert_eq!(run(["qadv", "sweep", "--nvars", "9"]), EXIT_USAGE);
    }

    #[test]
    fn help_and_version_exit_0() {
        assert_eq!(run(["qadv", "--version"]), EXIT_PASS);
        assert_eq!(run(["qadv", "--help"]), EXIT_PASS);
    }

    #[test]
    fn bad_ascent_rationals_rejected() {
        let args = AscentArgs {
            iters: 1,
            seed: 0,
            shrink: "3/2".into(),
            tolerance: "1/10".into(),
        };
        assert!(args.config().is_err());
    }
}
