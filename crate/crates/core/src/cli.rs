//! The `siminf` command line.
//!
//! Exit codes: 0 success or true, 1 false or countermodel, 2 validation
//! failure, 3 resource bound hit, 4 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::entailment::{entails_bounded, EntailmentBound, EntailmentError, DEFAULT_BUDGET, DEFAULT_MAX_DOMAIN};
use crate::format::{
    parse_database, parse_declarations, parse_deductions, parse_premises, parse_script, write_database,
    write_script, FormatError,
};
use crate::golden::{verify_golden, Status};
use crate::metrics::{coherency_detail, deduction_metrics, Deduction, MetricValue, RelevantPremises};
use crate::model::{Database, DatabaseError};
use crate::planner::{plan_coherent_update, rank_deductions, PlanBounds, PlanError};
use crate::report::{BoundsEcho, CommandEcho, InputDigest, RunReport};
use crate::syntax::{parse_sentence, Formula, Signature};
use crate::updates::{build_update_with, TheoryCheck, Update};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BOUNDS: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "siminf", version, about = "Finite databases, structural updates, and semantic information measures")]
struct Cli {
    /// Largest domain size for bounded entailment checks.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DOMAIN)]
    max_domain: usize,
    /// Largest number of structures an entailment check may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Print a JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a database's theory is true in its structure.
    Check {
        #[arg(long)]
        db: PathBuf,
    },
    /// Apply an update script and print or write the final database.
    Update {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving every intermediate database.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Record theory violations as warnings instead of rejecting the step.
        #[arg(long)]
        allow_theory_violations: bool,
    },
    /// Bounded check of whether the theory entails a sentence.
    Entails {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        formula: String,
        /// Extra symbols such as `b/0`.
        #[arg(long = "declare")]
        declare: Vec<String>,
    },
    /// Coherency of a sentence with an update.
    Coherency(MetricArgs),
    /// Relevancy of a deduction's premises under an update.
    Relevancy(MetricArgs),
    /// Informativity of a deduction, or of a sentence when no premises are given.
    Informativity(MetricArgs),
    /// Shortest update making a sentence true.
    Plan {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_steps: usize,
        #[arg(long, default_value_t = 2)]
        max_fresh: usize,
        #[arg(long, default_value_t = 10_000)]
        max_branch: usize,
        #[arg(long = "declare")]
        declare: Vec<String>,
    },
    /// Rank deductions by the informativity of their planned updates.
    Rank {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        deductions: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_steps: usize,
        #[arg(long, default_value_t = 2)]
        max_fresh: usize,
        #[arg(long, default_value_t = 10_000)]
        max_branch: usize,
    },
    /// Recompute the reference values on the embedded fixtures and classify each row.
    #[command(name = "verify-paper")]
    VerifyGolden,
}

#[derive(Args, Debug)]
struct MetricArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    script: PathBuf,
    /// The sentence (the conclusion, when premises are given).
    #[arg(long)]
    formula: String,
    /// Premises separated by `;`.
    #[arg(long)]
    premises: Option<String>,
    #[arg(long = "declare")]
    declare: Vec<String>,
    #[arg(long)]
    allow_theory_violations: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Update { .. } => "update",
            Command::Entails { .. } => "entails",
            Command::Coherency(_) => "coherency",
            Command::Relevancy(_) => "relevancy",
            Command::Informativity(_) => "informativity",
            Command::Plan { .. } => "plan",
            Command::Rank { .. } => "rank",
            Command::VerifyGolden => "verify-paper",
        }
    }
}

struct Failure {
    code: i32,
    message: String,
    detail: Value,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let detail = match &e {
            FormatError::Database(DatabaseError::Incorrect { failing }) => json!({ "failing": failing }),
            _ => Value::Null,
        };
        Failure {
            code: EXIT_INVALID,
            message: e.to_string(),
            detail,
        }
    }
}

impl From<EntailmentError> for Failure {
    fn from(e: EntailmentError) -> Self {
        let code = match e {
            EntailmentError::BudgetExceeded { .. } => EXIT_BOUNDS,
            EntailmentError::InvalidBound => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

struct Outcome {
    code: i32,
    text: String,
    result: Value,
}

struct Ctx {
    report: RunReport,
    bound: EntailmentBound,
}

impl Ctx {
    fn read(&mut self, role: &str, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path)
            .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
        self.report
            .inputs
            .push(InputDigest::new(role, &path.display().to_string(), &bytes));
        String::from_utf8(bytes).map_err(|_| Failure::new(EXIT_INVALID, format!("{} is not UTF-8", path.display())))
    }

    fn warn(&mut self, w: impl Into<String>) {
        self.report.warnings.push(w.into());
    }

    fn load_db(&mut self, path: &Path) -> Result<Database, Failure> {
        let text = self.read("database", path)?;
        Ok(parse_database(&text)?)
    }

    fn load_update(&mut self, db: &Path, script: &Path, allow: bool) -> Result<Update, Failure> {
        let d = self.load_db(db)?;
        let text = self.read("script", script)?;
        let ops = parse_script(&text)?;
        let mode = if allow { TheoryCheck::Record } else { TheoryCheck::Enforce };
        let u = build_update_with(&d, &ops, mode).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
        for v in u.theory_violations() {
            for f in &v.failing {
                self.warn(format!("theory violation after step {}: {} is false", v.step, f.sentence));
            }
        }
        Ok(u)
    }
}

fn language(base: &Signature, declare: &[String]) -> Result<Signature, Failure> {
    let extra = parse_declarations(declare.iter().map(String::as_str))
        .map_err(|e| Failure::new(EXIT_USAGE, format!("--declare: {e}")))?;
    base.union(&extra)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("--declare: {e}")))
}

fn sentence(text: &str, sig: &Signature) -> Result<Formula, Failure> {
    parse_sentence(text, sig).map_err(|e| Failure::new(EXIT_INVALID, format!("formula: {e}")))
}

fn joined(fs: &[Formula]) -> String {
    fs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn cmd_check(ctx: &mut Ctx, db: &Path) -> Result<Outcome, Failure> {
    let d = ctx.load_db(db)?;
    Ok(Outcome {
        code: EXIT_OK,
        text: format!("correct: {} theory sentence(s) hold\n", d.theory().len()),
        result: json!({ "correct": true, "failing": [] }),
    })
}

fn cmd_update(
    ctx: &mut Ctx,
    db: &Path,
    script: &Path,
    out: Option<&Path>,
    trace: Option<&Path>,
    allow: bool,
) -> Result<Outcome, Failure> {
    let u = ctx.load_update(db, script, allow)?;
    let io = |p: &Path, e: std::io::Error| Failure::new(EXIT_USAGE, format!("cannot write {}: {e}", p.display()));
    if let Some(dir) = trace {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (i, s) in u.structures().iter().enumerate() {
            let p = dir.join(format!("db_{}.db", i + 1));
            std::fs::write(&p, write_database(s, u.theory())).map_err(|e| io(&p, e))?;
        }
    }
    let final_text = write_database(u.final_structure(), u.theory());
    let mut text = format!("update with {} step(s)\n", u.ops().len());
    match out {
        Some(p) => std::fs::write(p, &final_text).map_err(|e| io(p, e))?,
        None => text.push_str(&final_text),
    }
    Ok(Outcome {
        code: EXIT_OK,
        text,
        result: json!({
            "steps": u.ops().len(),
            "script": u.ops(),
            "valid": u.is_valid(),
            "theory_violations": u.theory_violations(),
            "final_database": final_text,
        }),
    })
}

fn cmd_entails(ctx: &mut Ctx, db: &Path, formula: &str, declare: &[String]) -> Result<Outcome, Failure> {
    let d = ctx.load_db(db)?;
    let sig = language(d.signature(), declare)?;
    let f = sentence(formula, &sig)?;
    let v = entails_bounded(d.theory(), &f, &ctx.bound)?;
    let witness = v.witness.as_ref().map(|w| write_database(w, d.theory()));
    let (code, text) = match &witness {
        None => (
            EXIT_OK,
            format!("entailed up to domain size {} (bounded check)\n", v.bound),
        ),
        Some(w) => (EXIT_FALSE, format!("countermodel found:\n{w}")),
    };
    Ok(Outcome {
        code,
        text,
        result: json!({
            "outcome": v.outcome,
            "bound": v.bound,
            "enumeration_size": v.enumeration_size,
            "witness": witness,
        }),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Metric {
    Coherency,
    Relevancy,
    Informativity,
}

fn cmd_metric(ctx: &mut Ctx, which: Metric, a: &MetricArgs) -> Result<Outcome, Failure> {
    if which == Metric::Relevancy && a.premises.is_none() {
        return Err(Failure::new(EXIT_USAGE, "relevancy needs --premises (use \"\" for none)"));
    }
    let u = ctx.load_update(&a.db, &a.script, a.allow_theory_violations)?;
    let sig = language(u.final_structure().signature(), &a.declare)?;
    let conclusion = sentence(&a.formula, &sig)?;
    let bound = ctx.bound;
    let deduction = match &a.premises {
        Some(p) => Some(Deduction::new(parse_premises(p, &sig)?, conclusion.clone())),
        None if which == Metric::Informativity => Some(Deduction::of_proposition(conclusion.clone())),
        None => None,
    };
    let coherency = coherency_detail(&u, &conclusion);
    let mut valid = None;
    let (relevant, relevancy, informativity) = match &deduction {
        Some(d) => {
            if a.premises.is_some() {
                let ok = d.is_valid_bounded(&bound)?;
                if !ok {
                    ctx.warn(format!(
                        "validity refuted at bound {}: the premises do not entail the conclusion",
                        bound.max_domain
                    ));
                }
                valid = Some(ok);
            }
            let m = deduction_metrics(&u, d, &bound)?;
            (Some(m.relevant_premises), Some(m.relevancy), Some(m.informativity))
        }
        None => (None, None, None),
    };
    let value = match which {
        Metric::Coherency => coherency.value,
        Metric::Relevancy => relevancy.expect("premises given"),
        Metric::Informativity => informativity.expect("deduction built"),
    };
    let name = match which {
        Metric::Coherency => "coherency",
        Metric::Relevancy => "relevancy",
        Metric::Informativity => "informativity",
    };
    let relevant_list = match &relevant {
        Some(RelevantPremises::Defined(v)) => Some(v.clone()),
        _ => None,
    };
    let mut text = format!("{name} = {value} ({})\n", value.decimal(4));
    let _ = writeln!(
        text,
        "coherency = {} (m = {})",
        coherency.value,
        coherency.m_index.map_or("none".into(), |m| m.to_string())
    );
    if let (Some(r), Some(i)) = (relevancy, informativity) {
        let _ = writeln!(text, "relevancy = {r}\ninformativity = {i}");
    }
    match &relevant {
        Some(RelevantPremises::Defined(v)) => {
            let _ = writeln!(text, "relevant premises: {{{}}}", joined(v));
        }
        Some(RelevantPremises::Undefined) => text.push_str("relevant premises: undefined (update incoherent with the conclusion)\n"),
        None => {}
    }
    let _ = writeln!(text, "entailment bound: domain size {} (bounded check)", bound.max_domain);
    let rational = |v: Option<MetricValue>| v.map_or(Value::Null, |v| json!(v));
    Ok(Outcome {
        code: EXIT_OK,
        text,
        result: json!({
            "metric": name,
            "value_num": value.numer(),
            "value_den": value.denom(),
            "value_decimal": value.decimal(6),
            "m_index": coherency.m_index,
            "relevant_premises": relevant_list,
            "coherent": coherency.coherent,
            "bound_used": bound.max_domain,
            "coherency": coherency.value,
            "relevancy": rational(relevancy),
            "informativity": rational(informativity),
            "valid_up_to_bound": valid,
        }),
    })
}

fn plan_failure(e: PlanError) -> Failure {
    let code = match &e {
        PlanError::BoundsExhausted { .. } => EXIT_BOUNDS,
        PlanError::Entailment(EntailmentError::BudgetExceeded { .. }) => EXIT_BOUNDS,
        PlanError::InvalidBounds(_) => EXIT_USAGE,
        _ => EXIT_INVALID,
    };
    Failure::new(code, e.to_string())
}

fn cmd_plan(ctx: &mut Ctx, db: &Path, formula: &str, bounds: PlanBounds, declare: &[String]) -> Result<Outcome, Failure> {
    let d = ctx.load_db(db)?;
    let sig = language(d.signature(), declare)?;
    let f = sentence(formula, &sig)?;
    match plan_coherent_update(&d, &f, &bounds) {
        Ok(Some(plan)) => Ok(Outcome {
            code: EXIT_OK,
            text: format!(
                "{}# steps: {}, coherency: {} ({})\n",
                write_script(plan.update.ops()),
                plan.steps_used,
                plan.coherency,
                plan.coherency.decimal(4)
            ),
            result: json!({ "outcome": "plan", "plan": plan }),
        }),
        Ok(None) => Ok(Outcome {
            code: EXIT_FALSE,
            text: "no coherent update exists within the fresh-element budget\n".into(),
            result: json!({ "outcome": "unreachable", "plan": null }),
        }),
        Err(PlanError::Impossible) => Ok(Outcome {
            code: EXIT_FALSE,
            text: "impossible: the target is a contradiction\n".into(),
            result: json!({ "outcome": "impossible", "plan": null }),
        }),
        Err(e) => Err(plan_failure(e)),
    }
}

fn cmd_rank(ctx: &mut Ctx, db: &Path, deductions: &Path, bounds: PlanBounds) -> Result<Outcome, Failure> {
    let d = ctx.load_db(db)?;
    let text_in = ctx.read("deductions", deductions)?;
    let cands = parse_deductions(&text_in, d.signature())?;
    let ranking = rank_deductions(&d, &cands, &bounds);
    let mut text = String::new();
    for (i, r) in ranking.ranked.iter().enumerate() {
        let _ = writeln!(
            text,
            "{}. I = {} | steps = {} | results = {} | {}{}",
            i + 1,
            r.informativity,
            r.plan.steps_used,
            r.results.len(),
            r.deduction,
            if r.uninformative { " [uninformative]" } else { "" }
        );
        if r.valid_up_to_bound == Some(false) {
            ctx.warn(format!("validity refuted at bound {}: {}", bounds.entailment.max_domain, r.deduction));
        }
    }
    for s in &ranking.skipped {
        let _ = writeln!(text, "skipped: {} ({})", s.deduction, s.reason);
        ctx.warn(format!("skipped {}: {}", s.deduction, s.reason));
    }
    Ok(Outcome {
        code: EXIT_OK,
        text,
        result: json!(ranking),
    })
}

fn cmd_verify() -> Outcome {
    let r = verify_golden();
    let mut text = String::new();
    for row in &r.rows {
        let status = match row.status {
            Status::Match => "MATCH",
            Status::Deviation => "DEVIATION",
            Status::Mismatch => "MISMATCH",
        };
        let _ = writeln!(
            text,
            "{status:<9}  {}  expected: {}  computed: {}",
            row.id, row.expected, row.computed
        );
        if row.status != Status::Match {
            if let Some(n) = &row.note {
                let _ = writeln!(text, "           note: {n}");
            }
            if let Some(t) = &row.trace {
                for s in t {
                    let _ = writeln!(text, "           step {}: {:?}", s.index, s.truth);
                }
            }
        } else if let Some(n) = &row.note {
            let _ = writeln!(text, "           note: {n}");
        }
    }
    let _ = writeln!(
        text,
        "{} match, {} deviation, {} mismatch",
        r.matches, r.deviations, r.mismatches
    );
    Outcome {
        code: if r.passed() { EXIT_OK } else { EXIT_FALSE },
        text,
        result: json!(r),
    }
}

/// Runs the CLI, writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let echo = CommandEcho {
        name: cli.command.name().to_string(),
        args: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
    };
    let mut bounds = BoundsEcho {
        max_domain: cli.max_domain,
        budget: cli.budget,
        ..Default::default()
    };
    let plan_bounds = |steps: usize, fresh: usize, branch: usize, bound: EntailmentBound| PlanBounds {
        max_steps: steps,
        max_fresh: fresh,
        max_branch: branch,
        entailment: bound,
        quotient_fresh: true,
    };
    match &cli.command {
        Command::Plan { max_steps, max_fresh, max_branch, .. } | Command::Rank { max_steps, max_fresh, max_branch, .. } => {
            bounds.max_steps = Some(*max_steps);
            bounds.max_fresh = Some(*max_fresh);
            bounds.max_branch = Some(*max_branch);
        }
        _ => {}
    }
    let bound = EntailmentBound::new(cli.max_domain).with_budget(cli.budget);
    let mut ctx = Ctx {
        report: RunReport::new(echo, bounds),
        bound,
    };
    let res = if cli.max_domain == 0 {
        Err(Failure::new(EXIT_USAGE, "--max-domain must be at least 1"))
    } else {
        match &cli.command {
            Command::Check { db } => cmd_check(&mut ctx, db),
            Command::Update {
                db,
                script,
                out,
                trace,
                allow_theory_violations,
            } => cmd_update(&mut ctx, db, script, out.as_deref(), trace.as_deref(), *allow_theory_violations),
            Command::Entails { db, formula, declare } => cmd_entails(&mut ctx, db, formula, declare),
            Command::Coherency(a) => cmd_metric(&mut ctx, Metric::Coherency, a),
            Command::Relevancy(a) => cmd_metric(&mut ctx, Metric::Relevancy, a),
            Command::Informativity(a) => cmd_metric(&mut ctx, Metric::Informativity, a),
            Command::Plan {
                db,
                formula,
                max_steps,
                max_fresh,
                max_branch,
                declare,
            } => cmd_plan(&mut ctx, db, formula, plan_bounds(*max_steps, *max_fresh, *max_branch, bound), declare),
            Command::Rank {
                db,
                deductions,
                max_steps,
                max_fresh,
                max_branch,
            } => cmd_rank(&mut ctx, db, deductions, plan_bounds(*max_steps, *max_fresh, *max_branch, bound)),
            Command::VerifyGolden => Ok(cmd_verify()),
        }
    };
    let mut report = ctx.report;
    let (code, text) = match res {
        Ok(o) => {
            report.result = o.result;
            (o.code, Some(o.text))
        }
        Err(f) => {
            let mut result = json!({ "error": f.message });
            if let Value::Object(extra) = f.detail {
                result.as_object_mut().expect("object").extend(extra);
            }
            report.result = result;
            let _ = writeln!(err, "error: {}", f.message);
            (f.code, None)
        }
    };
    report.exit_code = code;
    if cli.json {
        let _ = writeln!(out, "{}", report.to_json());
    } else {
        if let Some(t) = text {
            let _ = out.write_all(t.as_bytes());
        }
        for w in &report.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
    }
    code
}

/// Runs the CLI on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
