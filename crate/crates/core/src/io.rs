//! JSON input schemas (version 1), report serialization and text transcripts.
//!
//! Rationals are written as `"p/q"` strings. Object keys come out sorted, so equal
//! reports serialize to identical bytes.

use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value as Json};

use crate::basic_object::{BasicObject, IdTriple};
use crate::driver::{
    ideal_text, EmbeddedReport, EquiresReport, Failure, ReportChecks, Run, StepChecks, StepRecord, WellDefinedness,
};
use crate::error::{CoreError, Result};
use crate::invariants::{Rest, Value};
use crate::poly::{Poly, Ring};

pub const SCHEMA: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    schema: u32,
    #[serde(default)]
    kind: Option<String>,
    m: usize,
    vars: Vec<String>,
    ideal: Vec<String>,
    #[serde(default)]
    b: Option<u32>,
    #[serde(default, rename = "E")]
    e: Vec<String>,
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub enum Input {
    Object(BasicObject),
    Triple(IdTriple),
    Embedded(BasicObject),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Object(_) => "basic_object",
            Input::Triple(_) => "idtriple",
            Input::Embedded(_) => "embedded",
        }
    }

    /// The basic object the input stands for; ideals and varieties get index one.
    pub fn object(&self) -> BasicObject {
        match self {
            Input::Object(b) | Input::Embedded(b) => b.clone(),
            Input::Triple(t) => t.basic_object(),
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Error positioned at the first occurrence of `needle`, or at the start.
fn error_at(text: &str, needle: &str, msg: String) -> CoreError {
    let (line, column) = line_col(text, text.find(needle).unwrap_or(0));
    CoreError::Parse { msg, line, column }
}

fn parse_polys(text: &str, ring: &Ring, items: &[String], what: &str) -> Result<Vec<Poly>> {
    items
        .iter()
        .map(|s| {
            ring.parse(s).map_err(|e| {
                let literal = serde_json::to_string(s).unwrap_or_default();
                error_at(text, &literal, format!("{what} {literal}: {e}"))
            })
        })
        .collect()
}

/// Parses a schema-1 input. `m_override` replaces the declared `m`.
pub fn parse_input(text: &str, m_override: Option<usize>) -> Result<Input> {
    let raw: RawInput = serde_json::from_str(text)
        .map_err(|e| CoreError::Parse { msg: e.to_string(), line: e.line(), column: e.column() })?;
    if raw.schema != SCHEMA {
        return Err(error_at(text, "\"schema\"", format!("unsupported schema {} (expected {SCHEMA})", raw.schema)));
    }
    let m = m_override.unwrap_or(raw.m);
    if m == 0 {
        return Err(error_at(text, "\"m\"", "m must be at least 1".into()));
    }
    if raw.vars.is_empty() {
        return Err(error_at(text, "\"vars\"", "at least one variable is required".into()));
    }
    for (i, v) in raw.vars.iter().enumerate() {
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && v != "eps";
        if !ok || raw.vars[..i].contains(v) {
            return Err(error_at(text, &format!("\"{v}\""), format!("invalid or repeated variable name `{v}`")));
        }
    }
    if raw.ideal.is_empty() {
        return Err(error_at(text, "\"ideal\"", "the ideal needs at least one generator".into()));
    }
    let kind = raw.kind.clone().unwrap_or_else(|| if raw.b.is_some() { "basic_object" } else { "idtriple" }.into());
    let ring = Ring::new(&raw.vars, m);
    let gens = parse_polys(text, &ring, &raw.ideal, "generator")?;
    let e = parse_polys(text, &ring, &raw.e, "divisor")?;
    let positioned = |err: CoreError| match err {
        CoreError::Parse { .. } => err,
        other => error_at(text, "\"E\"", other.to_string()),
    };
    match kind.as_str() {
        "basic_object" => {
            let b = raw.b.ok_or_else(|| error_at(text, "{", "a basic object needs an index `b`".into()))?;
            if b == 0 {
                return Err(error_at(text, "\"b\"", "b must be at least 1".into()));
            }
            BasicObject::new(&raw.vars, m, gens, b, &e).map(Input::Object).map_err(positioned)
        }
        "idtriple" | "embedded" => {
            if raw.b.is_some_and(|b| b != 1) {
                return Err(error_at(text, "\"b\"", format!("`{kind}` inputs have index one")));
            }
            if kind == "embedded" {
                if !raw.e.is_empty() {
                    return Err(error_at(text, "\"E\"", "embedded inputs start without divisors".into()));
                }
                BasicObject::new(&raw.vars, m, gens, 1, &[]).map(Input::Embedded).map_err(positioned)
            } else {
                IdTriple::new(&raw.vars, m, gens, &e).map(Input::Triple).map_err(positioned)
            }
        }
        other => Err(error_at(text, "\"kind\"", format!("unknown kind `{other}`"))),
    }
}

/// `"p/q"`, with `q = 1` for integers.
pub fn rat(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Mono(g) => json!({
            "gamma": [format!("-{}", g.gamma1), rat(&g.gamma2), g.gamma3],
        }),
        Value::T { omega, n, rest } => {
            let then = match rest {
                Rest::Unknown => Json::Null,
                Rest::Infinity => json!("inf"),
                Rest::Sub(s) => value_json(s),
            };
            json!({ "max_omega": rat(omega), "max_t": [rat(omega), n], "then": then })
        }
    }
}

fn checks_json(c: &StepChecks) -> Json {
    json!({
        "omega_permissible": c.flags.as_ref().map(|f| f.omega),
        "t_permissible": c.flags.as_ref().map(|f| f.t),
        "bdp_agrees": c.bdp_agrees,
        "nice_good": c.nice_good,
        "order_balance": c.order_balance,
    })
}

pub fn step_json(s: &StepRecord) -> Json {
    json!({
        "j": s.index,
        "kind": s.kind.name(),
        "value": value_json(&s.value),
        "center": s.center_text,
        "trace": s.trace,
        "checks": checks_json(&s.checks),
    })
}

pub fn failure_json(f: &Failure) -> Json {
    json!({ "step": f.step, "clause": f.clause.to_string(), "detail": f.detail, "trace": f.trace })
}

fn wd_json(w: &WellDefinedness) -> Json {
    json!({ "depth": w.depth, "chart": w.chart, "first": w.first, "second": w.second, "agree": w.agree })
}

fn report_checks_json(c: &ReportChecks) -> Json {
    json!({
        "fibers_commute": c.fibers_commute,
        "values_decrease": c.values_decrease,
        "t_steps_first": c.t_steps_first,
        "order_balance": c.order_balance,
        "nice_good": c.nice_good,
        "bdp_agrees": c.bdp_agrees,
        "e_le_ell": c.e_le_ell,
    })
}

/// Charts, ideals and divisors of an object.
pub fn object_json(b: &BasicObject) -> Json {
    let charts: Vec<Json> = b
        .charts()
        .map(|(c, l)| {
            let ring = c.ring(b.m);
            let e: Vec<Json> = c.e.iter().map(|&(lab, v)| json!({ "label": lab, "var": c.vars[v] })).collect();
            json!({
                "id": c.id,
                "vars": c.vars,
                "ideal": ideal_text(&l.ideal, &ring),
                "proper": ideal_text(&l.proper, &ring),
                "E": e,
                "removed": c.removed.as_ref().map(|r| ideal_text(r, &ring)),
            })
        })
        .collect();
    json!({ "m": b.m, "b": b.b, "charts": charts, "sing_empty": b.sing_is_empty() })
}

pub fn run_json(r: &Run) -> Json {
    json!({
        "steps": r.steps.iter().map(step_json).collect::<Vec<_>>(),
        "failure": r.failure.as_ref().map(failure_json),
        "well_definedness": r.well_definedness.iter().map(wd_json).collect::<Vec<_>>(),
        "final": object_json(&r.last),
    })
}

pub fn envelope(command: &str, body: Json) -> Json {
    let mut out = json!({ "schema": SCHEMA, "command": command });
    if let (Json::Object(o), Json::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

pub fn equires_json(r: &EquiresReport) -> Json {
    json!({
        "m": r.m,
        "e": r.e,
        "ell": r.ell,
        "equisolvable": r.equisolvable(),
        "failure": r.failure().map(failure_json),
        "run": run_json(&r.run),
        "fiber": run_json(&r.fiber),
        "checks": report_checks_json(&r.checks),
    })
}

pub fn embedded_json(r: &EmbeddedReport) -> Json {
    json!({
        "eta": r.eta,
        "e": r.e,
        "eta_lifts": r.eta_lifts,
        "failure": r.failure.as_ref().map(failure_json),
        "fiber_steps": r.fiber_steps.iter().map(step_json).collect::<Vec<_>>(),
        "steps": r.steps.iter().map(step_json).collect::<Vec<_>>(),
        "strict_transform": r.strict,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Transcript verbosity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceLevel {
    None,
    Steps,
    Full,
}

impl std::str::FromStr for TraceLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(TraceLevel::None),
            "steps" => Ok(TraceLevel::Steps),
            "full" => Ok(TraceLevel::Full),
            _ => Err(format!("unknown trace level `{s}` (none, steps or full)")),
        }
    }
}

pub fn sing_text(b: &BasicObject) -> String {
    let parts: Vec<String> = b
        .singular_locus()
        .into_iter()
        .filter(|p| !p.empty)
        .map(|p| {
            let chart = b.pair.chart(&p.chart).expect("singular parts name charts of the object");
            format!("{}: V{}", p.chart, ideal_text(&p.ideal, &chart.ring(1)))
        })
        .collect();
    if parts.is_empty() {
        "Sing = ∅".to_string()
    } else {
        format!("Sing = {}", parts.join("; "))
    }
}

fn steps_text(out: &mut Vec<String>, label: &str, steps: &[StepRecord], level: TraceLevel) {
    if level == TraceLevel::None {
        return;
    }
    for s in steps {
        out.push(format!("{label} {}: {} center {} value {}", s.index, s.kind.name(), s.center_text.join("; "), s.value.display()));
        if level == TraceLevel::Full {
            out.extend(s.trace.iter().map(|t| format!("    {t}")));
        }
    }
}

fn failure_text(out: &mut Vec<String>, f: &Failure, level: TraceLevel) {
    out.push(format!("failure at step {}: {} ({})", f.step, f.clause, f.detail));
    if level == TraceLevel::Full {
        out.extend(f.trace.iter().map(|t| format!("    {t}")));
    }
}

pub fn run_text(r: &Run, level: TraceLevel) -> String {
    let mut out = Vec::new();
    steps_text(&mut out, "step", &r.steps, level);
    if let Some(f) = &r.failure {
        failure_text(&mut out, f, level);
    }
    out.push(format!("steps: {}", r.steps.len()));
    out.push(sing_text(&r.last));
    out.join("\n") + "\n"
}

pub fn equires_text(r: &EquiresReport, level: TraceLevel) -> String {
    let mut out = Vec::new();
    steps_text(&mut out, "step", &r.run.steps, level);
    if let Some(f) = r.failure() {
        failure_text(&mut out, f, level);
    }
    out.push(format!("e = {}, ell = {}", r.e, r.ell));
    out.push(if r.equisolvable() { "algorithmically equisolvable".into() } else { "not equisolvable".into() });
    out.join("\n") + "\n"
}

pub fn embedded_text(r: &EmbeddedReport, level: TraceLevel) -> String {
    let mut out = Vec::new();
    steps_text(&mut out, "fiber step", &r.fiber_steps, level);
    steps_text(&mut out, "step", &r.steps, level);
    if let Some(f) = &r.failure {
        failure_text(&mut out, f, level);
    }
    out.push(format!("eta = {}, e = {}, center at eta lifts: {}", r.eta, r.e, r.eta_lifts));
    out.extend(r.strict.iter().map(|s| format!("strict transform {s}")));
    out.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_basic_object() {
        let text = r#"{"schema": 1, "m": 2, "vars": ["x", "y"], "ideal": ["y^2", "x^3"], "b": 2}"#;
        let Input::Object(b) = parse_input(text, None).unwrap() else { panic!("wrong kind") };
        assert_eq!((b.m, b.b, b.nvars()), (2, 2, 2));
        let Input::Object(b) = parse_input(text, Some(3)).unwrap() else { panic!("wrong kind") };
        assert_eq!(b.m, 3);
    }

    #[test]
    fn errors_carry_positions() {
        let text = "{\n  \"schema\": 1,\n  \"m\": 2,\n  \"vars\": [\"x\"],\n  \"ideal\": [\"x^^2\"],\n  \"b\": 2\n}";
        match parse_input(text, None) {
            Err(CoreError::Parse { line, column, .. }) => assert_eq!((line, column), (5, 13)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_input("{\"schema\": 2, \"m\": 1, \"vars\": [\"x\"], \"ideal\": [\"x\"]}", None) {
            Err(CoreError::Parse { line, column, .. }) => assert_eq!((line, column), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_input("{\"schema\": 1,\n \"m\": 1, \"bogus\": 3}", None) {
            Err(CoreError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kinds_are_inferred() {
        let t = parse_input(r#"{"schema": 1, "m": 1, "vars": ["x", "y"], "ideal": ["x*y"], "E": ["x", "y"]}"#, None).unwrap();
        assert_eq!(t.kind(), "idtriple");
        let x = parse_input(r#"{"schema": 1, "kind": "embedded", "m": 1, "vars": ["x", "y"], "ideal": ["y^2 - x^3"]}"#, None);
        assert_eq!(x.unwrap().kind(), "embedded");
    }

    #[test]
    fn rationals_are_fractions() {
        assert_eq!(rat(&BigRational::new(3.into(), 2.into())), "3/2");
        assert_eq!(rat(&BigRational::from_integer(2.into())), "2/1");
    }
}
