//! Command-line front end. [`run`] does all the work so that tests can
//! drive it in-process; `main` only forwards the outcome.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use procalc::equivalence::{
    bounded_bisim, check_correspondence, replay_witness, strong_bisim, BisimResult, CorrespondenceReport,
    EquivalenceError, LabelMap, Side,
};
use procalc::io::{export_cspm, export_lts, parse_ccs, parse_cspmn, print_csp, LtsFormat};
use procalc::mn2csp::mn2csp;
use procalc::semantics::{build_lts, Ccs, CcsTau, CspMn, ExplorationBudget, Lts, Semantics};
use procalc::syntax::{CcsProc, CspProc, Term};
use procalc::translate::{ccs2csp3, ccs2csp_legacy, gstar2g2, TranslateError};

pub const PASS: i32 = 0;
pub const CHECK_FAILED: i32 = 1;
pub const USAGE: i32 = 2;
pub const BUDGET: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: PASS, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: stderr.into() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "procalc", version, about = "Translate CCS to CSPmn, elaborate CSPmn to CSP, and check the results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Translate a CCS term to CSP.
    Translate {
        /// Source file.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Pipeline::Mn)]
        pipeline: Pipeline,
    },
    /// Build and print the labelled transition system of a term.
    Lts {
        /// Source file.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Calculus::Ccs)]
        calculus: Calculus,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        config: Config,
    },
    /// Check a translation or elaboration against its source.
    Verify {
        /// Source file.
        input: PathBuf,
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Compare only up to this many steps (exploratory, not a proof).
        #[arg(long, value_name = "K")]
        bounded_depth: Option<usize>,
        #[command(flatten)]
        config: Config,
    },
    /// Emit machine-readable CSPm.
    Export {
        /// Source file.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Calculus::Cspmn)]
        calculus: Calculus,
    },
}

#[derive(Args, Debug, Clone)]
struct Config {
    #[arg(long, env = "PROCALC_BUDGET", hide_env_values = true, default_value_t = 10000)]
    max_states: usize,
    #[arg(long, default_value_t = 64)]
    max_depth: usize,
    /// Require every synchronising event to be offered by both operands.
    #[arg(long)]
    strict_premise: bool,
}

impl Config {
    fn budget(&self) -> ExplorationBudget {
        ExplorationBudget::new(self.max_states, self.max_depth)
    }

    fn cspmn(&self) -> CspMn {
        CspMn { strict_premise: self.strict_premise }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Pipeline {
    Mn,
    Gstar,
    Bridge,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Calculus {
    Ccs,
    Ccstau,
    Cspmn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Translation,
    Mn2csp,
    Bridge,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::fail(USAGE, text),
            };
        }
    };
    match cli.command {
        Command::Translate { input, pipeline } => with_source(&input, |src| translate(src, pipeline)),
        Command::Lts { input, calculus, format, config } => {
            with_source(&input, |src| lts(src, calculus, format, &config))
        }
        Command::Verify { input, check, format, bounded_depth, config } => {
            with_source(&input, |src| verify(src, check, format, bounded_depth, &config))
        }
        Command::Export { input, calculus } => with_source(&input, |src| export(src, calculus)),
    }
}

fn with_source(path: &PathBuf, f: impl FnOnce(&str) -> Outcome) -> Outcome {
    match std::fs::read_to_string(path) {
        Ok(text) => f(&text),
        Err(e) => Outcome::fail(USAGE, format!("error: cannot read {}: {e}\n", path.display())),
    }
}

fn parse_error(e: impl std::fmt::Display) -> Outcome {
    Outcome::fail(USAGE, format!("error: {e}\n"))
}

fn translate_error(e: TranslateError) -> Outcome {
    Outcome::fail(USAGE, format!("error: {e}\n"))
}

fn translate(src: &str, pipeline: Pipeline) -> Outcome {
    let p = match parse_ccs(src) {
        Ok(p) => p,
        Err(e) => return parse_error(e),
    };
    let mn = || ccs2csp3(&p).map(|q| q.canonicalise());
    let gstar = || ccs2csp_legacy(&p).map(|q| q.canonicalise());
    match pipeline {
        Pipeline::Mn => mn().map_or_else(translate_error, |q| Outcome::ok(format!("{}\n", print_csp(&q)))),
        Pipeline::Gstar => gstar().map_or_else(translate_error, |q| Outcome::ok(format!("{}\n", print_csp(&q)))),
        Pipeline::Bridge => match bridge(&p) {
            Ok((legacy, bridged, three, equal)) => {
                let out = format!(
                    "gstar:  {}\nbridged: {}\nmn:     {}\nterms equal: {equal}\n",
                    print_csp(&legacy),
                    print_csp(&bridged),
                    print_csp(&three)
                );
                Outcome { code: if equal { PASS } else { CHECK_FAILED }, stdout: out, stderr: String::new() }
            }
            Err(e) => translate_error(e),
        },
    }
}

fn bridge(p: &CcsProc) -> Result<(CspProc, CspProc, CspProc, bool), TranslateError> {
    let legacy = ccs2csp_legacy(p)?.canonicalise();
    let bridged = gstar2g2(&legacy)?.canonicalise();
    let three = ccs2csp3(p)?.canonicalise();
    let equal = bridged == three;
    Ok((legacy, bridged, three, equal))
}

fn lts_text<P: Term>(lts: &Lts<P>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", lts.state_count());
    let _ = writeln!(out, "transitions: {}", lts.transitions.len());
    let _ = writeln!(out, "complete: {}", lts.complete);
    for (i, p) in lts.states.iter().enumerate() {
        let mark = if i == lts.initial { " (initial)" } else { "" };
        let _ = writeln!(out, "s{i}{mark}: {p}");
    }
    for t in &lts.transitions {
        let _ = writeln!(out, "s{} --{}--> s{}", t.source, t.label, t.target);
    }
    out
}

fn render_lts<P: Term>(lts: &Lts<P>, format: Format) -> Outcome {
    let stdout = match format {
        Format::Text => lts_text(lts),
        Format::Json => export_lts(lts, LtsFormat::Json) + "\n",
        Format::Dot => export_lts(lts, LtsFormat::Dot),
    };
    let summary = format!("{} states, {} transitions", lts.state_count(), lts.transitions.len());
    if lts.complete {
        Outcome { code: PASS, stdout, stderr: if format == Format::Text { String::new() } else { summary + "\n" } }
    } else {
        let notice =
            format!("complete=false: exploration budget reached ({summary}); raise --max-states or --max-depth\n");
        Outcome { code: BUDGET, stdout, stderr: notice }
    }
}

fn build<S: Semantics>(p: &S::Proc, sem: &S, config: &Config, format: Format) -> Outcome {
    match build_lts(p, sem, config.budget()) {
        Ok(lts) => render_lts(&lts, format),
        Err(e) => Outcome::fail(USAGE, format!("error: {e}\n")),
    }
}

fn lts(src: &str, calculus: Calculus, format: Format, config: &Config) -> Outcome {
    match calculus {
        Calculus::Ccs => parse_ccs(src).map_or_else(parse_error, |p| build(&p, &Ccs, config, format)),
        Calculus::Ccstau => parse_ccs(src).map_or_else(parse_error, |p| build(&p, &CcsTau, config, format)),
        Calculus::Cspmn => parse_cspmn(src).map_or_else(parse_error, |p| build(&p, &config.cspmn(), config, format)),
    }
}

#[derive(Serialize, Debug, Default)]
struct VerifyReport {
    check: &'static str,
    pass: bool,
    /// Set when only a depth-bounded comparison was made.
    bounded_depth: Option<usize>,
    source_states: usize,
    target_states: usize,
    source_complete: bool,
    target_complete: bool,
    witness_size: usize,
    replay_violations: usize,
    counterexample: Vec<String>,
    correspondence: Option<CorrespondenceReport>,
    terms_equal: Option<bool>,
}

impl VerifyReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.check, if self.pass { "PASS" } else { "FAIL" });
        if let Some(k) = self.bounded_depth {
            let _ = writeln!(out, "bounded to depth {k}: exploratory, not a proof");
        }
        if let Some(eq) = self.terms_equal {
            let _ = writeln!(out, "terms equal: {eq}");
            return out;
        }
        let _ = writeln!(out, "source states: {}", self.source_states);
        let _ = writeln!(out, "target states: {}", self.target_states);
        let _ = writeln!(out, "witness pairs: {}", self.witness_size);
        let _ = writeln!(out, "replay violations: {}", self.replay_violations);
        if let Some(c) = &self.correspondence {
            let _ = writeln!(out, "soundness violations: {}", c.soundness.len());
            let _ = writeln!(out, "completeness violations: {}", c.completeness.len());
        }
        for step in &self.counterexample {
            let _ = writeln!(out, "  {step}");
        }
        out
    }
}

fn describe(r: &BisimResult, left: &[String], right: &[String]) -> Vec<String> {
    r.counterexample
        .iter()
        .map(|s| {
            let (mover, other) = match s.side {
                Side::Left => ("source", "target"),
                Side::Right => ("target", "source"),
            };
            format!("at ({} | {}): {mover} does {}, {other} cannot match", left[s.left], right[s.right], s.label)
        })
        .collect()
}

fn bisim_report<A: Semantics, B: Semantics>(
    check: &'static str,
    (sa, p): (&A, &A::Proc),
    (sb, q): (&B, &B::Proc),
    f: &LabelMap,
    bounded: Option<usize>,
    config: &Config,
) -> Result<VerifyReport, Outcome> {
    let budget = match bounded {
        Some(k) => ExplorationBudget::new(config.max_states, k.min(config.max_depth)),
        None => config.budget(),
    };
    let fail = |e: procalc::semantics::SemanticsError| Outcome::fail(USAGE, format!("error: {e}\n"));
    let l1 = build_lts(p, sa, budget).map_err(fail)?;
    let l2 = build_lts(q, sb, budget).map_err(fail)?;
    let names = |l: &Lts<A::Proc>| l.states.iter().map(ToString::to_string).collect::<Vec<_>>();
    let names2 = |l: &Lts<B::Proc>| l.states.iter().map(ToString::to_string).collect::<Vec<_>>();
    let result = match bounded {
        Some(k) => bounded_bisim(&l1, &l2, f, k),
        None => strong_bisim(&l1, &l2, f).map_err(|e| match e {
            EquivalenceError::IncompleteLts(side) => Outcome::fail(
                BUDGET,
                format!("error: {side:?} LTS is incomplete within the budget; raise --max-states/--max-depth or use --bounded-depth\n"),
            ),
            other => Outcome::fail(USAGE, format!("error: {other}\n")),
        })?,
    };
    let replay = if result.verdict && bounded.is_none() {
        replay_witness((sa, &l1), (sb, &l2), f, &result.witness).map_err(fail)?.len()
    } else {
        0
    };
    let correspondence = if bounded.is_none() && *f != LabelMap::Identity {
        Some(check_correspondence(&l1, &l2, f).map_err(|e| Outcome::fail(BUDGET, format!("error: {e}\n")))?)
    } else {
        None
    };
    let pass = result.verdict && replay == 0 && correspondence.as_ref().is_none_or(|c| c.pass);
    Ok(VerifyReport {
        check,
        pass,
        bounded_depth: bounded,
        source_states: l1.state_count(),
        target_states: l2.state_count(),
        source_complete: l1.complete,
        target_complete: l2.complete,
        witness_size: result.witness.len(),
        replay_violations: replay,
        counterexample: describe(&result, &names(&l1), &names2(&l2)),
        correspondence,
        terms_equal: None,
    })
}

fn verify(src: &str, check: Check, format: Format, bounded: Option<usize>, config: &Config) -> Outcome {
    let report = match check {
        Check::Translation => {
            let p = match parse_ccs(src) {
                Ok(p) => p,
                Err(e) => return parse_error(e),
            };
            let q = match ccs2csp3(&p) {
                Ok(q) => q,
                Err(e) => return translate_error(e),
            };
            bisim_report("translation", (&Ccs, &p), (&config.cspmn(), &q), &LabelMap::Identity, bounded, config)
        }
        Check::Mn2csp => {
            let p = match parse_cspmn(src) {
                Ok(p) => p,
                Err(e) => return parse_error(e),
            };
            let q = match mn2csp(&p) {
                Ok(q) => q,
                Err(e) => return parse_error(e),
            };
            let sem = config.cspmn();
            bisim_report("mn2csp", (&sem, &p), (&sem, &q), &LabelMap::EraseIndices, bounded, config)
        }
        Check::Bridge => {
            let p = match parse_ccs(src) {
                Ok(p) => p,
                Err(e) => return parse_error(e),
            };
            match bridge(&p) {
                Ok((_, _, _, equal)) => {
                    Ok(VerifyReport { check: "bridge", pass: equal, terms_equal: Some(equal), ..Default::default() })
                }
                Err(e) => return translate_error(e),
            }
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(outcome) => return outcome,
    };
    let stdout = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
        _ => report.text(),
    };
    Outcome { code: if report.pass { PASS } else { CHECK_FAILED }, stdout, stderr: String::new() }
}

fn export(src: &str, calculus: Calculus) -> Outcome {
    let plain = match calculus {
        Calculus::Cspmn => match parse_cspmn(src) {
            Ok(p) => mn2csp(&p).map_err(|e| format!("error: {e}\n")),
            Err(e) => return parse_error(e),
        },
        Calculus::Ccs | Calculus::Ccstau => match parse_ccs(src) {
            Ok(p) => ccs2csp_legacy(&p).map_err(|e| format!("error: {e}\n")),
            Err(e) => return parse_error(e),
        },
    };
    match plain.and_then(|q| export_cspm(&q.canonicalise()).map_err(|e| format!("error: {e}\n"))) {
        Ok(text) => Outcome::ok(text + "\n"),
        Err(msg) => Outcome::fail(USAGE, msg),
    }
}
