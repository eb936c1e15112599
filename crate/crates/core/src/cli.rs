//! Command-line front end.
//!
//! Exit status: 0 affirmative verdict, 1 negative verdict (a witness is
//! printed), 2 inconclusive because a bound was hit, 64 and above for usage,
//! input and internal errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bisim::{char_formula, enumerate_types, mismatch, nbisimilar, GenerationBounds};
use crate::decide::{is_satisfiable, is_theorem, Verdict};
use crate::error::Error;
use crate::formula::{parse, render_with, scan_variables, Formula, RenderMode, Substitution, VarContext};
use crate::model::{model_from_json, model_to_json, raw_from_json, validate_frame, PointedModel, StratifiedModel};
use crate::saturation::SaturationBounds;
use crate::unify::{basis_of_unifiers, is_admissible, projective_approximation, projective_unifier, UnifyBounds, Witness};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_BOUND: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "j2kit", version, about = "Decision procedures, unification and admissible rules for the logic J2")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Comma-separated variable context; defaults to the variables of the inputs.
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Largest model the search may reconstruct as a witness.
    #[arg(long, global = true)]
    max_worlds: Option<usize>,
    /// Cap on stored sheet profiles during saturation.
    #[arg(long, global = true)]
    max_sheets: Option<usize>,
    /// Iterations of the repair substitution.
    #[arg(long, global = true)]
    max_rounds: Option<usize>,
    /// Candidate type-sets examined by the approximation search.
    #[arg(long, global = true)]
    max_candidates: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and normalise a formula.
    Parse { formula: String },
    /// Check the frame conditions of a model file.
    ValidateFrame { model: PathBuf },
    /// Evaluate a formula at a world (the root by default) or everywhere.
    ModelCheck {
        model: PathBuf,
        formula: String,
        #[arg(long)]
        world: Option<i64>,
        #[arg(long)]
        global: bool,
    },
    /// Decide derivability; refutations come with a countermodel.
    Prove { formula: String },
    /// Decide satisfiability; a satisfying model is printed.
    Sat { formula: String },
    /// Decide (n-)bisimilarity of two pointed models.
    Bisim {
        #[arg(short = 'n')]
        n: Option<usize>,
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        world_a: Option<i64>,
        #[arg(long)]
        world_b: Option<i64>,
    },
    /// Characteristic formula of the n-type of a pointed model.
    Charform {
        #[arg(short = 'n')]
        n: usize,
        model: PathBuf,
        #[arg(long)]
        world: Option<i64>,
    },
    /// Enumerate the n-types over the variable context.
    Types {
        #[arg(short = 'n')]
        n: usize,
    },
    /// Decide projectivity and produce a verified unifier or a violation witness.
    Projective { formula: String },
    /// Unifiers of the maximal projective formulas entailing the input.
    UnifyBasis { formula: String },
    /// Maximal projective formulas of no greater depth entailing the input.
    Approx { formula: String },
    /// Decide admissibility and derivability of the rule premise / conclusion.
    Admissible { premise: String, conclusion: String },
}

/// Runs the CLI on `args` (including the program name), writing to the given streams.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let bounds = bounds_from(&cli.opts);
    let ctx_override = match cli.opts.vars.as_ref().map(VarContext::canonical).transpose() {
        Ok(c) => c,
        Err(e) => return fail(err, &e),
    };
    let env = Env { bounds, ctx_override, json: cli.opts.json };
    match execute(&cli.command, &env) {
        Ok(report) => {
            let text = if env.json {
                serde_json::to_string_pretty(&report.json).expect("serializable")
            } else {
                report.text
            };
            let _ = writeln!(out, "{text}");
            report.code
        }
        Err(e) => fail(err, &e),
    }
}

fn fail(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BoundExhausted(_) => EXIT_BOUND,
        Error::Io(_) => EXIT_NOINPUT,
        Error::Syntax { .. }
        | Error::UnknownVariable(_)
        | Error::InvalidContext(_)
        | Error::ContextMismatch(_)
        | Error::UnknownWorld(_)
        | Error::InvalidModel(_)
        | Error::NotStratified(_)
        | Error::NoRoot
        | Error::Json(_)
        | Error::NotOneCongruent
        | Error::ConstancyViolated(_)
        | Error::NotSheetFormula(_) => EXIT_DATA,
        Error::HypothesisViolated(_) | Error::GlNotProjective(_) => EXIT_SOFTWARE,
    }
}

fn bounds_from(o: &GlobalOpts) -> UnifyBounds {
    let mut b = UnifyBounds::from_env();
    if let Some(w) = o.max_worlds {
        b.saturation.max_witness_worlds = w;
    }
    if let Some(s) = o.max_sheets {
        b.saturation.max_profiles = s;
    }
    if let Some(r) = o.max_rounds {
        b.max_rounds = r;
    }
    if let Some(c) = o.max_candidates {
        b.max_candidates = c;
    }
    b
}

struct Env {
    bounds: UnifyBounds,
    ctx_override: Option<VarContext>,
    json: bool,
}

struct Report {
    code: i32,
    json: Value,
    text: String,
}

impl Env {
    fn sat(&self) -> &SaturationBounds {
        &self.bounds.saturation
    }

    /// The override, or the canonical context of the given formulas and extra names.
    fn context(&self, formulas: &[&str], extra: &[String]) -> Result<VarContext, Error> {
        if let Some(c) = &self.ctx_override {
            return Ok(c.clone());
        }
        let mut names: Vec<String> = formulas.iter().flat_map(|f| scan_variables(f)).collect();
        names.extend(extra.iter().cloned());
        VarContext::canonical(names)
    }

    fn render(&self, f: &Formula, ctx: &VarContext) -> String {
        render_with(f, Some(ctx), RenderMode::Sugared)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn file_vars(text: &str) -> Result<Vec<String>, Error> {
    let (_, ctx) = raw_from_json(text, None)?;
    Ok(ctx.names().to_vec())
}

fn point(m: &StratifiedModel, world: Option<i64>) -> Result<usize, Error> {
    match world {
        Some(id) => m.index_of(id),
        None => Ok(m.root()),
    }
}

fn model_value(m: &StratifiedModel, ctx: &VarContext) -> Value {
    serde_json::to_value(model_to_json(m, ctx)).expect("serializable")
}

fn pointed_value(pm: &PointedModel, ctx: &VarContext) -> Value {
    json!({ "model": model_value(&pm.model, ctx), "point": pm.model.id(pm.point) })
}

fn pointed_text(pm: &PointedModel, ctx: &VarContext) -> String {
    format!(
        "point {} of\n{}",
        pm.model.id(pm.point),
        serde_json::to_string(&model_to_json(&pm.model, ctx)).expect("serializable")
    )
}

fn subst_value(s: &Substitution) -> Value {
    s.to_json()
}

fn subst_text(s: &Substitution) -> String {
    s.render_shared().to_string()
}

fn bounds_value(b: &UnifyBounds) -> Value {
    serde_json::to_value(b).expect("serializable")
}

fn yes_no(b: bool) -> i32 {
    if b {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn verdict_report(v: &Verdict, f: &str, env: &Env, ctx: &VarContext, positive: &str, negative: &str, sat_mode: bool) -> Report {
    let witness = v.countermodel.as_ref();
    let mut json = json!({
        "formula": f,
        "verdict": if v.theorem { positive } else { negative },
        "bound": v.bound,
        "bounds": bounds_value(&env.bounds),
    });
    let key = if sat_mode { "model" } else { "countermodel" };
    json[key] = witness.map(|w| pointed_value(w, ctx)).unwrap_or(Value::Null);
    let mut text = format!("{}: {f}", if v.theorem { positive } else { negative });
    if let Some(w) = witness {
        text.push_str(&format!("\n{key} at {}", pointed_text(w, ctx)));
    }
    let affirmative = v.theorem;
    Report { code: yes_no(affirmative), json, text }
}

fn witness_value(w: &Witness, ctx: &VarContext) -> Value {
    json!({
        "model": model_value(&w.model, ctx),
        "summands": w.summands.iter().map(|m| model_value(m, ctx)).collect::<Vec<_>>(),
    })
}

fn execute(cmd: &Command, env: &Env) -> Result<Report, Error> {
    match cmd {
        Command::Parse { formula } => {
            let ctx = env.context(&[formula], &[])?;
            let f = parse(formula, &ctx)?;
            let shown = env.render(&f, &ctx);
            Ok(Report {
                code: EXIT_YES,
                json: json!({
                    "formula": shown,
                    "plain": render_with(&f, Some(&ctx), RenderMode::Plain),
                    "depth": f.depth(),
                    "size": f.size(),
                    "variables": ctx.names(),
                }),
                text: format!("{shown}\ndepth {} size {}", f.depth(), f.size()),
            })
        }
        Command::ValidateFrame { model } => {
            let text = read(model)?;
            let ctx = match &env.ctx_override {
                Some(c) => c.clone(),
                None => VarContext::canonical(file_vars(&text)?)?,
            };
            let (raw, _) = raw_from_json(&text, Some(&ctx))?;
            let report = validate_frame(&raw)?;
            let ok = report.all_ok();
            let mut lines = vec![format!("{}", if ok { "valid stratified frame" } else { "invalid frame" })];
            for v in &report.violations {
                lines.push(format!("  {} violated at {:?}", v.condition.tag(), v.witness));
            }
            Ok(Report { code: yes_no(ok), json: serde_json::to_value(&report)?, text: lines.join("\n") })
        }
        Command::ModelCheck { model, formula, world, global } => {
            let text = read(model)?;
            let ctx = env.context(&[formula], &file_vars(&text)?)?;
            let m = model_from_json(&text, &ctx)?;
            let f = parse(formula, &ctx)?;
            let truth = m.truth_set(&f);
            let refuting: Vec<i64> = (0..m.len()).filter(|&x| !truth.contains(x)).map(|x| m.id(x)).collect();
            let (holds, at) = if *global {
                (refuting.is_empty(), Value::String("global".into()))
            } else {
                let x = point(&m, *world)?;
                (truth.contains(x), json!(m.id(x)))
            };
            Ok(Report {
                code: yes_no(holds),
                json: json!({ "formula": env.render(&f, &ctx), "at": at, "holds": holds, "refuting_worlds": refuting }),
                text: format!(
                    "{} at {}{}",
                    if holds { "holds" } else { "fails" },
                    at,
                    if refuting.is_empty() { String::new() } else { format!("; refuted at worlds {refuting:?}") }
                ),
            })
        }
        Command::Prove { formula } => {
            let ctx = env.context(&[formula], &[])?;
            let f = parse(formula, &ctx)?;
            let v = is_theorem(&f, env.sat())?;
            Ok(verdict_report(&v, formula, env, &ctx, "theorem", "not a theorem", false))
        }
        Command::Sat { formula } => {
            let ctx = env.context(&[formula], &[])?;
            let f = parse(formula, &ctx)?;
            let v = is_satisfiable(&f, env.sat())?;
            Ok(verdict_report(&v, formula, env, &ctx, "satisfiable", "unsatisfiable", true))
        }
        Command::Bisim { n, a, b, world_a, world_b } => {
            let (ta, tb) = (read(a)?, read(b)?);
            let mut extra = file_vars(&ta)?;
            extra.extend(file_vars(&tb)?);
            let ctx = env.context(&[], &extra)?;
            let (ma, mb) = (model_from_json(&ta, &ctx)?, model_from_json(&tb, &ctx)?);
            let pa = PointedModel { point: point(&ma, *world_a)?, model: ma };
            let pb = PointedModel { point: point(&mb, *world_b)?, model: mb };
            let depth = n.unwrap_or(pa.model.len() + pb.model.len());
            let same = nbisimilar(&pa, &pb, depth);
            let mut json = json!({ "n": n, "bisimilar": same, "point_a": pa.model.id(pa.point), "point_b": pb.model.id(pb.point) });
            let mut text = format!("{}bisimilar{}", if same { "" } else { "not " }, n.map(|k| format!(" at depth {k}")).unwrap_or_default());
            if !same {
                // least depth at which the points separate; its characteristic formula holds at a only
                let k = (0..=depth).find(|&k| !nbisimilar(&pa, &pb, k)).expect("separates at some depth");
                let why = mismatch(&pa, &pb, k).expect("not k-bisimilar");
                let f = env.render(&char_formula(&pa, k, &ctx), &ctx);
                text.push_str(&format!("\nreason: {}\nformula true at a, false at b: {f}", serde_json::to_string(&why)?));
                json["mismatch"] = serde_json::to_value(&why)?;
                json["separating_depth"] = json!(k);
                json["distinguishing_formula"] = json!(f);
            }
            Ok(Report { code: yes_no(same), json, text })
        }
        Command::Charform { n, model, world } => {
            let text = read(model)?;
            let ctx = env.context(&[], &file_vars(&text)?)?;
            let m = model_from_json(&text, &ctx)?;
            let pm = PointedModel { point: point(&m, *world)?, model: m };
            let f = env.render(&char_formula(&pm, *n, &ctx), &ctx);
            Ok(Report { code: EXIT_YES, json: json!({ "n": n, "point": pm.model.id(pm.point), "formula": f }), text: f })
        }
        Command::Types { n } => {
            let ctx = env.context(&[], &[])?;
            let gb = GenerationBounds { saturation: env.bounds.saturation, max_types: env.bounds.max_types };
            let u = enumerate_types(&ctx, *n, &gb)?;
            let code = if u.truncated.is_some() { EXIT_BOUND } else { EXIT_YES };
            let mut json = u.to_json();
            json["bounds"] = bounds_value(&env.bounds);
            let mut text = format!("{} types at depth {n} over {:?}", u.types.len(), ctx.names());
            for t in &u.types {
                text.push_str(&format!("\n  {} ({} worlds)", t.code_hex(), t.rep.model.len()));
            }
            if let Some(why) = &u.truncated {
                text.push_str(&format!("\ntruncated: {why}"));
            }
            Ok(Report { code, json, text })
        }
        Command::Projective { formula } => {
            let ctx = env.context(&[formula], &[])?;
            let f = parse(formula, &ctx)?;
            let r = projective_unifier(&f, &ctx, &env.bounds)?;
            let json = json!({
                "formula": formula,
                "projective": r.projective,
                "unifier": r.unifier.as_ref().map(subst_value),
                "rounds": r.rounds_used,
                "method": r.method,
                "factors": r.factors,
                "witness": r.witness.as_ref().map(|w| witness_value(w, &ctx)),
                "bounds": bounds_value(&env.bounds),
            });
            let text = match (&r.unifier, &r.witness) {
                (Some(u), _) => format!("projective; unifier ({} rounds):\n{}", r.rounds_used, subst_text(u)),
                (None, Some(w)) => format!(
                    "not projective; no root valuation repairs\n{}",
                    serde_json::to_string(&model_to_json(&w.model, &ctx))?
                ),
                (None, None) => "not projective".to_string(),
            };
            Ok(Report { code: yes_no(r.projective), json, text })
        }
        Command::UnifyBasis { formula } | Command::Approx { formula } => {
            let ctx = env.context(&[formula], &[])?;
            let f = parse(formula, &ctx)?;
            let basis = matches!(cmd, Command::UnifyBasis { .. });
            let a = if basis { basis_of_unifiers(&f, &ctx, &env.bounds)?.0 } else { projective_approximation(&f, &ctx, &env.bounds)? };
            let members: Vec<Value> = a
                .pi
                .iter()
                .zip(&a.unifiers)
                .map(|(p, u)| json!({ "psi": env.render(p, &ctx), "unifier": subst_value(u) }))
                .collect();
            let code = if !a.pi.is_empty() {
                EXIT_YES
            } else if a.exhaustive {
                EXIT_NO
            } else {
                EXIT_BOUND
            };
            let json = json!({
                "formula": formula,
                "unifiable": !a.pi.is_empty(),
                "pi": members,
                "s_size": a.s_size,
                "exhaustive": a.exhaustive,
                "bounds": bounds_value(&env.bounds),
            });
            let mut text = format!(
                "{} member(s){}",
                a.pi.len(),
                if a.exhaustive { "" } else { " (search cut short)" }
            );
            for (p, u) in a.pi.iter().zip(&a.unifiers) {
                text.push_str(&format!("\n{}", env.render(p, &ctx)));
                if basis {
                    text.push_str(&format!("\n{}", subst_text(u)));
                }
            }
            Ok(Report { code, json, text })
        }
        Command::Admissible { premise, conclusion } => {
            let ctx = env.context(&[premise, conclusion], &[])?;
            let (p, c) = (parse(premise, &ctx)?, parse(conclusion, &ctx)?);
            let r = is_admissible(&p, &c, &ctx, &env.bounds)?;
            let failing = r.failing_psi.as_ref().map(|f| env.render(f, &ctx));
            let code = if !r.admissible {
                EXIT_NO
            } else if r.exhaustive {
                EXIT_YES
            } else {
                EXIT_BOUND
            };
            let json = json!({
                "premise": premise,
                "conclusion": conclusion,
                "admissible": r.admissible,
                "derivable": r.derivable,
                "failing_psi": failing,
                "exhaustive": r.exhaustive,
                "bounds": bounds_value(&env.bounds),
            });
            let mut text = format!(
                "{}admissible, {}derivable",
                if r.admissible { "" } else { "not " },
                if r.derivable { "" } else { "not " }
            );
            if let Some(f) = &failing {
                text.push_str(&format!("\nfailing projective premise: {f}"));
            }
            Ok(Report { code, json, text })
        }
    }
}
