//! The five commands. Each returns its full output and an exit code:
//! 0 when everything checked is valid, 1 when a violation is reported and
//! 2 for unusable input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use paction_core::pathalg::{
    check_algebra_globalization, check_not_ideal, check_subalgebra_partial_action, induced_partial_action,
    IdealCheck, ALGEBRA_GLOBALIZATION_CLAUSES, DEFAULT_TRUNCATION, SUBALGEBRA_ACTION_CLAUSES,
};
use paction_core::quiver_paction::{ENVELOPING_CLAUSES, PARTIAL_ACTION_CLAUSES};
use paction_core::{
    check_enveloping, envelope_quiver_action, export_dot, restrict_global_action, Clause, GlobalQuiverAction,
    Quiver, QuiverPartialAction, Report,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::document::{
    document_of_global, document_of_partial, parse_instance, serialize, DocumentError, GlobalBlock, GroupSpec,
    InstanceDocument, PartialBlock, QuiverBlock, Resolved, RestrictLine,
};

pub const EXIT_VALID: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("ambiguous subject: {0}")]
    Ambiguous(String),
    #[error("{0}")]
    Missing(String),
    #[error("{0}")]
    Build(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Globalize,
    Restrict,
    AlgebraCheck,
    ExportDot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Globalize => "globalize",
            Command::Restrict => "restrict",
            Command::AlgebraCheck => "algebra-check",
            Command::ExportDot => "export-dot",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Overrides the document's `truncate` line.
    pub truncate: Option<usize>,
    pub format: Format,
    /// For `export-dot`: draw the enveloping quiver instead.
    pub envelope: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

/// Parses `text` and runs `command` on it.
pub fn run(command: Command, text: &str, opts: &Options) -> Outcome {
    let result = parse_instance(text).map_err(CliError::from).and_then(|doc| dispatch(command, &doc, opts));
    match result {
        Ok(outcome) => outcome,
        Err(err) => Outcome {
            code: EXIT_INPUT,
            output: match opts.format {
                Format::Text => format!("error: {err}\n"),
                Format::Structured => pretty(&json!({ "command": command.name(), "error": err.to_string() })),
            },
        },
    }
}

pub fn dispatch(command: Command, doc: &InstanceDocument, opts: &Options) -> Result<Outcome, CliError> {
    let r = Resolved::new(doc)?;
    match command {
        Command::Validate => validate(doc, &r, opts),
        Command::Globalize => globalize(doc, &r, opts),
        Command::Restrict => restrict(doc, &r, opts),
        Command::AlgebraCheck => algebra_check(doc, &r, opts),
        Command::ExportDot => dot(doc, &r, opts),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn code(valid: bool) -> i32 {
    if valid {
        EXIT_VALID
    } else {
        EXIT_VIOLATION
    }
}

enum Subject<'d> {
    Partial(&'d PartialBlock),
    Restrict(&'d RestrictLine),
    Global(&'d GlobalBlock),
    Quiver(&'d QuiverBlock),
}

/// The partial action the command is about: the single `partial` block or
/// the single `restrict` line.
fn partial_subject(doc: &InstanceDocument) -> Result<Option<Subject<'_>>, CliError> {
    match (doc.partials.as_slice(), doc.restricts.as_slice()) {
        ([], []) => Ok(None),
        ([p], []) => Ok(Some(Subject::Partial(p))),
        ([], [r]) => Ok(Some(Subject::Restrict(r))),
        _ => Err(CliError::Ambiguous(format!(
            "{} partial blocks and {} restrict lines; keep exactly one",
            doc.partials.len(),
            doc.restricts.len()
        ))),
    }
}

fn subject(doc: &InstanceDocument) -> Result<Subject<'_>, CliError> {
    if let Some(s) = partial_subject(doc)? {
        return Ok(s);
    }
    match doc.globals.as_slice() {
        [g] => return Ok(Subject::Global(g)),
        [] => {}
        _ => return Err(CliError::Ambiguous(format!("{} global blocks", doc.globals.len()))),
    }
    match doc.quivers.as_slice() {
        [q] => Ok(Subject::Quiver(q)),
        _ => Err(CliError::Ambiguous(format!("{} quiver blocks and nothing acting on them", doc.quivers.len()))),
    }
}

/// The partial action of the subject together with the name of its quiver.
fn partial_action(r: &Resolved, s: &Subject) -> Result<(QuiverPartialAction, String), CliError> {
    match s {
        Subject::Partial(p) => Ok((r.partial(p)?, p.quiver.clone())),
        Subject::Restrict(line) => {
            let (b, sub) = r.restriction(line)?;
            let a = restrict_global_action(&b, &sub).map_err(|e| CliError::Build(e.to_string()))?;
            Ok((a, "restricted".into()))
        }
        _ => unreachable!("only called on partial subjects"),
    }
}

fn require_partial<'d>(doc: &'d InstanceDocument, command: Command) -> Result<Subject<'d>, CliError> {
    partial_subject(doc)?.ok_or_else(|| {
        CliError::Missing(format!("{} needs a `partial` block or a `restrict` line", command.name()))
    })
}

fn clause_json<V: Clause>(report: &Report<V>, clauses: &[&str]) -> Value {
    let summary: BTreeMap<&str, bool> = report.summary(clauses).into_iter().collect();
    json!({
        "valid": report.is_valid(),
        "clauses": summary,
        "violations": report.violations.iter().map(|v| json!({ "clause": v.clause(), "message": v.to_string() })).collect::<Vec<_>>(),
    })
}

fn clause_text<V: Clause>(out: &mut String, title: &str, report: &Report<V>, clauses: &[&str]) {
    let parts: Vec<String> = report
        .summary(clauses)
        .into_iter()
        .map(|(c, ok)| format!("{c} {}", if ok { "pass" } else { "FAIL" }))
        .collect();
    writeln!(out, "{title}: {}", parts.join(", ")).unwrap();
    for v in &report.violations {
        writeln!(out, "  violation: {v}").unwrap();
    }
}

fn validate(doc: &InstanceDocument, r: &Resolved, opts: &Options) -> Result<Outcome, CliError> {
    let s = subject(doc)?;
    match &s {
        Subject::Partial(_) | Subject::Restrict(_) => {
            let (a, _) = partial_action(r, &s)?;
            let report = a.check();
            let output = match opts.format {
                Format::Text => {
                    let mut out = String::new();
                    clause_text(&mut out, "partial action", &report, &PARTIAL_ACTION_CLAUSES);
                    writeln!(out, "{}", if report.is_valid() { "valid" } else { "invalid" }).unwrap();
                    out
                }
                Format::Structured => {
                    let mut v = clause_json(&report, &PARTIAL_ACTION_CLAUSES);
                    v["command"] = json!("validate");
                    v["subject"] = json!("partial action");
                    pretty(&v)
                }
            };
            Ok(Outcome { code: code(report.is_valid()), output })
        }
        Subject::Global(g) => {
            let generators = r.generators(&g.name)?;
            let built =
                GlobalQuiverAction::from_generators(r.group()?.clone(), r.quiver(&g.quiver)?.clone(), &generators);
            let (valid, message) = match &built {
                Ok(_) => (true, "valid".to_string()),
                Err(e) => (false, format!("violation: {e}")),
            };
            let output = match opts.format {
                Format::Text => format!("global action {}: {message}\n", g.name),
                Format::Structured => pretty(&json!({
                    "command": "validate",
                    "subject": "global action",
                    "valid": valid,
                    "violations": if valid { vec![] } else { vec![message] },
                })),
            };
            Ok(Outcome { code: code(valid), output })
        }
        Subject::Quiver(q) => {
            let quiver = r.quiver(&q.name)?;
            let output = match opts.format {
                Format::Text => format!(
                    "quiver {}: {} vertices, {} arrows, valid\n",
                    q.name,
                    quiver.vertex_count(),
                    quiver.arrow_count()
                ),
                Format::Structured => pretty(&json!({
                    "command": "validate",
                    "subject": "quiver",
                    "valid": true,
                    "vertices": quiver.vertex_count(),
                    "arrows": quiver.arrow_count(),
                })),
            };
            Ok(Outcome { code: EXIT_VALID, output })
        }
    }
}

fn group_spec(doc: &InstanceDocument) -> Result<GroupSpec, CliError> {
    doc.group.clone().ok_or_else(|| CliError::Missing("no group declared".into()))
}

fn invalid_partial(report: &Report<impl Clause>, opts: &Options, command: Command) -> Outcome {
    let output = match opts.format {
        Format::Text => {
            let mut out = String::new();
            clause_text(&mut out, "partial action", report, &PARTIAL_ACTION_CLAUSES);
            writeln!(out, "invalid: nothing to {}", command.name()).unwrap();
            out
        }
        Format::Structured => {
            let mut v = clause_json(report, &PARTIAL_ACTION_CLAUSES);
            v["command"] = json!(command.name());
            pretty(&v)
        }
    };
    Outcome { code: EXIT_VIOLATION, output }
}

fn table_json(q: &Quiver, b: &GlobalQuiverAction) -> Value {
    let g_ = b.group();
    let tables: BTreeMap<&str, Value> = g_
        .elements()
        .map(|g| {
            let v: BTreeMap<&str, &str> =
                (0..q.vertex_count()).map(|x| (q.vertex_name(x), q.vertex_name(b.vertex(g, x)))).collect();
            let a: BTreeMap<&str, &str> =
                (0..q.arrow_count()).map(|x| (q.arrow_name(x), q.arrow_name(b.arrow(g, x)))).collect();
            (g_.name(g), json!({ "vertices": v, "arrows": a }))
        })
        .collect();
    json!(tables)
}

fn arrows_json(q: &Quiver) -> Value {
    json!(q
        .arrow_records()
        .into_iter()
        .map(|a| json!({ "id": a.id, "source": a.source, "target": a.target }))
        .collect::<Vec<_>>())
}

fn globalize(doc: &InstanceDocument, r: &Resolved, opts: &Options) -> Result<Outcome, CliError> {
    let s = require_partial(doc, Command::Globalize)?;
    let (a, _) = partial_action(r, &s)?;
    let report = a.check();
    if !report.is_valid() {
        return Ok(invalid_partial(&report, opts, Command::Globalize));
    }
    let env = envelope_quiver_action(&a).map_err(|e| CliError::Build(e.to_string()))?;
    let check = check_enveloping(&env);
    let q = env.global.quiver();
    let gamma = a.quiver();
    let vembed: Vec<(&str, &str)> =
        (0..gamma.vertex_count()).map(|v| (gamma.vertex_name(v), q.vertex_name(env.embedding.map_vertex(v)))).collect();
    let aembed: Vec<(&str, &str)> =
        (0..gamma.arrow_count()).map(|x| (gamma.arrow_name(x), q.arrow_name(env.embedding.map_arrow(x)))).collect();
    let output = match opts.format {
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "# enveloping action: {} vertices, {} arrows", q.vertex_count(), q.arrow_count()).unwrap();
            for a in q.arrow_records() {
                writeln!(out, "#   {}: {} -> {}", a.id, a.source, a.target).unwrap();
            }
            let pairs: Vec<String> = vembed.iter().chain(&aembed).map(|(x, y)| format!("{x} -> {y}")).collect();
            writeln!(out, "# embedding: {}", pairs.join(", ")).unwrap();
            let mut checks = String::new();
            clause_text(&mut checks, "enveloping", &check, &ENVELOPING_CLAUSES);
            for line in checks.lines() {
                writeln!(out, "# {line}").unwrap();
            }
            out.push_str(&serialize(&document_of_global(group_spec(doc)?, "envelope", "beta", &env.global)));
            out
        }
        Format::Structured => {
            let mut v = clause_json(&check, &ENVELOPING_CLAUSES);
            v["command"] = json!("globalize");
            v["vertices"] = json!(q.vertex_names());
            v["arrows"] = arrows_json(q);
            v["beta"] = table_json(q, &env.global);
            v["embedding"] = json!({
                "vertices": vembed.iter().copied().collect::<BTreeMap<_, _>>(),
                "arrows": aembed.iter().copied().collect::<BTreeMap<_, _>>(),
            });
            pretty(&v)
        }
    };
    Ok(Outcome { code: code(check.is_valid()), output })
}

fn restrict(doc: &InstanceDocument, r: &Resolved, opts: &Options) -> Result<Outcome, CliError> {
    let line = match doc.restricts.as_slice() {
        [line] => line,
        [] => return Err(CliError::Missing("restrict needs a `restrict` line".into())),
        _ => return Err(CliError::Ambiguous(format!("{} restrict lines", doc.restricts.len()))),
    };
    let (b, sub) = r.restriction(line)?;
    let a = restrict_global_action(&b, &sub).map_err(|e| CliError::Build(e.to_string()))?;
    let report = a.check();
    let q = a.quiver();
    let output = match opts.format {
        Format::Text => {
            let mut out = format!("# restriction of {}\n", line.global);
            if !report.is_valid() {
                clause_text(&mut out, "# partial action", &report, &PARTIAL_ACTION_CLAUSES);
            }
            out.push_str(&serialize(&document_of_partial(group_spec(doc)?, "restricted", "restriction", &a)));
            out
        }
        Format::Structured => {
            let g_ = a.group();
            let domains: BTreeMap<&str, Value> = g_
                .elements()
                .map(|g| {
                    let d = a.domain(g);
                    let m = a.map(g);
                    let vm: BTreeMap<&str, &str> =
                        m.vertices.iter().map(|(&x, &y)| (q.vertex_name(x), q.vertex_name(y))).collect();
                    let am: BTreeMap<&str, &str> =
                        m.arrows.iter().map(|(&x, &y)| (q.arrow_name(x), q.arrow_name(y))).collect();
                    (
                        g_.name(g),
                        json!({
                            "vertices": d.vertex_names(q),
                            "arrows": d.arrow_names(q),
                            "vertex_map": vm,
                            "arrow_map": am,
                        }),
                    )
                })
                .collect();
            let mut v = clause_json(&report, &PARTIAL_ACTION_CLAUSES);
            v["command"] = json!("restrict");
            v["quiver"] = json!({ "vertices": q.vertex_names(), "arrows": arrows_json(q) });
            v["domains"] = json!(domains);
            pretty(&v)
        }
    };
    Ok(Outcome { code: code(report.is_valid()), output })
}

fn algebra_check(doc: &InstanceDocument, r: &Resolved, opts: &Options) -> Result<Outcome, CliError> {
    let s = require_partial(doc, Command::AlgebraCheck)?;
    let (a, _) = partial_action(r, &s)?;
    let report = a.check();
    if !report.is_valid() {
        return Ok(invalid_partial(&report, opts, Command::AlgebraCheck));
    }
    let l = opts.truncate.or(doc.truncate).unwrap_or(DEFAULT_TRUNCATION);
    let alpha = induced_partial_action(&a).map_err(|e| CliError::Build(e.to_string()))?;
    let sub = check_subalgebra_partial_action(&alpha, l);
    let env = envelope_quiver_action(&a).map_err(|e| CliError::Build(e.to_string()))?;
    let glob = check_algebra_globalization(&env, l);
    let g_ = a.group();
    let gamma = a.quiver();
    let mut ideals = Vec::new();
    for g in g_.elements().filter(|&g| g != g_.identity()) {
        let domain = alpha.domain(g);
        if domain.dimension(l) == 0 {
            continue;
        }
        let verdict = match check_not_ideal(&domain, l) {
            IdealCheck::NotIdeal(w) => Some(w.to_string()),
            IdealCheck::Ideal { .. } => None,
        };
        let basis: Vec<String> = domain.basis(l).iter().map(|x| x.to_string()).collect();
        ideals.push((g_.name(g).to_string(), basis, verdict));
    }
    let strict = glob.sum_dimension < glob.generated_dimension;
    let valid = sub.is_valid() && glob.is_valid();
    let output = match opts.format {
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "window: paths of length <= {l}").unwrap();
            clause_text(&mut out, "subalgebra partial action", &sub, &SUBALGEBRA_ACTION_CLAUSES);
            clause_text(&mut out, "globalization", &glob.report, &ALGEBRA_GLOBALIZATION_CLAUSES);
            writeln!(
                out,
                "sum dim = {}, generated dim = {}, strict: {}",
                glob.sum_dimension,
                glob.generated_dimension,
                if strict { "yes" } else { "no" }
            )
            .unwrap();
            writeln!(out, "window dim = {}", glob.window_dimension).unwrap();
            for d in &glob.intersections {
                writeln!(out, "D_{}: dim {}, {}", d.g, d.dimension, if d.unital { "unital" } else { "not unital" })
                    .unwrap();
            }
            for (g, basis, verdict) in &ideals {
                match verdict {
                    Some(w) => writeln!(out, "R_{g} = span{{{}}}: not an ideal, {w}", basis.join(", ")).unwrap(),
                    None => writeln!(out, "R_{g} = span{{{}}}: ideal up to length {l}", basis.join(", ")).unwrap(),
                }
            }
            writeln!(out, "{}", if valid { "valid" } else { "invalid" }).unwrap();
            out
        }
        Format::Structured => pretty(&json!({
            "command": "algebra-check",
            "valid": valid,
            "window": l,
            "quiver": { "vertices": gamma.vertex_count(), "arrows": gamma.arrow_count() },
            "subalgebra_action": clause_json(&sub, &SUBALGEBRA_ACTION_CLAUSES),
            "globalization": clause_json(&glob.report, &ALGEBRA_GLOBALIZATION_CLAUSES),
            "sum_dimension": glob.sum_dimension,
            "generated_dimension": glob.generated_dimension,
            "window_dimension": glob.window_dimension,
            "strict": strict,
            "intersections": glob.intersections.iter().map(|d| json!({ "g": d.g, "dimension": d.dimension, "unital": d.unital })).collect::<Vec<_>>(),
            "domains": ideals.iter().map(|(g, basis, w)| json!({ "g": g, "basis": basis, "ideal": w.is_none(), "witness": w })).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome { code: code(valid), output })
}

fn dot(doc: &InstanceDocument, r: &Resolved, opts: &Options) -> Result<Outcome, CliError> {
    let text = if opts.envelope {
        let s = require_partial(doc, Command::ExportDot)?;
        let (a, _) = partial_action(r, &s)?;
        let report = a.check();
        if !report.is_valid() {
            return Ok(invalid_partial(&report, opts, Command::ExportDot));
        }
        let env = envelope_quiver_action(&a).map_err(|e| CliError::Build(e.to_string()))?;
        export_dot(env.global.quiver(), Some(&env.embedded()))
    } else {
        match subject(doc)? {
            Subject::Restrict(line) => {
                let (b, sub) = r.restriction(line)?;
                export_dot(b.quiver(), Some(&sub))
            }
            Subject::Partial(p) => export_dot(r.quiver(&p.quiver)?, None),
            Subject::Global(g) => export_dot(r.quiver(&g.quiver)?, None),
            Subject::Quiver(q) => export_dot(r.quiver(&q.name)?, None),
        }
    };
    let output = match opts.format {
        Format::Text => text,
        Format::Structured => pretty(&json!({ "command": "export-dot", "dot": text })),
    };
    Ok(Outcome { code: EXIT_VALID, output })
}
