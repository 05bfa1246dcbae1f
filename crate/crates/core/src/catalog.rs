//! Built-in worked examples, the fiber corpus and replay reports.

use num_rational::BigRational;
use serde_json::{json, Value as Json};

use crate::basic_object::{pre_equivalence_probe, BasicObject, ComponentVerdict};
use crate::contact::{homogenized_ideal, inductive_object, is_strongly_permissible, restricted_coefficient_ideal};
use crate::delta::delta;
use crate::driver::{equiresolve, ideal_text, DriverConfig, EquiresReport};
use crate::error::{CoreError, Result};
use crate::geometry::{CenterComponent, CenterSpec, CoordChange};
use crate::ideal::{rational_point, Ideal, Level};
use crate::io::{envelope, rat};
use crate::poly::{Poly, Ring};
use crate::scalar::{ratio, ArtinScalar};

/// Names accepted by [`replay`].
pub const REPLAY_NAMES: [&str; 6] = ["ex4_2", "ex_nohay", "ex4_6", "ex6_9", "ex6_10", "ex8_6"];

/// A named object.
#[derive(Clone, Debug)]
pub struct Named {
    pub name: &'static str,
    pub object: BasicObject,
}

/// Builds an object from literals known to be well formed.
pub fn object(vars: &[&str], m: usize, gens: &[&str], b: u32, e: &[&str]) -> BasicObject {
    let r = Ring::new(vars, m);
    let parse = |s: &&str| r.parse(s).expect("catalog literals parse");
    let g = gens.iter().map(parse).collect();
    let e: Vec<Poly> = e.iter().map(parse).collect();
    BasicObject::new(vars, m, g, b, &e).expect("catalog objects are well formed")
}

fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
    Ideal::new(r.nvars(), r.m, gens.iter().map(|g| r.parse(g).expect("catalog literals parse")).collect())
}

pub fn ex4_2() -> BasicObject {
    object(&["x", "y"], 2, &["eps*x + y^2 + x^3"], 2, &[])
}

pub fn ex_nohay() -> BasicObject {
    object(&["x"], 2, &["x^2", "eps*x"], 2, &[])
}

/// The two objects compared in the pre-equivalence example.
pub fn ex4_6() -> (BasicObject, BasicObject) {
    (object(&["x"], 2, &["x^2 + eps*x"], 2, &[]), object(&["x"], 2, &["x^5", "eps*x"], 2, &[]))
}

pub fn ex6_9() -> BasicObject {
    object(&["x", "z"], 2, &["z^2 + eps*x^2", "z^3 + x^3"], 2, &[])
}

pub fn ex6_10() -> BasicObject {
    object(&["x", "z"], 2, &["x^5 + eps*x^2*z + z^4"], 4, &[])
}

pub fn ex8_6() -> BasicObject {
    object(&["x", "y"], 2, &["y^2", "x^3"], 2, &[])
}

/// Small objects over `Q` in dimension at most two (plus one monomial object in
/// dimension three) whose resolutions are short enough to derive by hand.
pub fn fiber_corpus() -> Vec<Named> {
    let xy = ["x", "y"];
    vec![
        Named { name: "x2", object: object(&["x"], 1, &["x^2"], 2, &[]) },
        Named { name: "x3_b2", object: object(&["x"], 1, &["x^3"], 2, &[]) },
        Named { name: "cusp", object: object(&xy, 1, &["y^2 + x^3"], 2, &[]) },
        Named { name: "xy", object: object(&xy, 1, &["x*y"], 2, &[]) },
        Named { name: "y2_x5", object: object(&xy, 1, &["y^2 + x^5"], 2, &[]) },
        Named { name: "x2_y2", object: object(&xy, 1, &["x^2", "y^2"], 2, &[]) },
        Named { name: "three_lines", object: object(&xy, 1, &["x*y*(x + y)"], 2, &[]) },
        Named { name: "x2_on_e", object: object(&xy, 1, &["x^2"], 2, &["x"]) },
        Named { name: "mono_xy", object: object(&xy, 1, &["x^2*y^3"], 2, &["x", "y"]) },
        Named { name: "mono_xyz", object: object(&["x", "y", "z"], 1, &["x^2*y^2*z^2"], 3, &["x", "y", "z"]) },
    ]
}

/// Every object with a stored expectation: the worked examples, the fiber corpus and
/// a few deformations over `A`.
pub fn goldens() -> Vec<Named> {
    let (b46, b46p) = ex4_6();
    let mut out = vec![
        Named { name: "ex4_2", object: ex4_2() },
        Named { name: "ex_nohay", object: ex_nohay() },
        Named { name: "ex4_6", object: b46 },
        Named { name: "ex4_6_prime", object: b46p },
        Named { name: "ex6_9", object: ex6_9() },
        Named { name: "ex6_10", object: ex6_10() },
        Named { name: "ex8_6", object: ex8_6() },
        Named { name: "cusp_trivial", object: object(&["x", "y"], 2, &["y^2 + x^3 + eps*y^2"], 2, &[]) },
        Named { name: "y2_x5_eps", object: object(&["x", "y"], 2, &["y^2", "x^5 + eps*x^4"], 2, &[]) },
        Named { name: "x2_y2_eps", object: object(&["x", "y"], 3, &["x^2 + eps*y^2", "y^2"], 2, &[]) },
    ];
    out.extend(fiber_corpus());
    out
}

/// The center `V(x_0 - c_0 eps, ..., x_k)` on the root chart.
fn shifted(n: usize, vars: Vec<usize>, shifts: &[(usize, BigRational)], m: usize) -> CenterSpec {
    let changes = shifts
        .iter()
        .map(|(v, q)| {
            CoordChange::new(*v, ArtinScalar::one(m), Poly::eps(n, m).scale_rational(&-q.clone()))
                .expect("a constant shift is a coordinate change")
        })
        .collect();
    CenterSpec::single("W", CenterComponent { changes, vars })
}

fn origin(n: usize) -> CenterSpec {
    CenterSpec::single("W", CenterComponent::coordinate((0..n).collect()))
}

fn verdict_json(v: &ComponentVerdict) -> Json {
    json!({ "nu": v.nu, "nu_fiber": v.nu_fiber, "permissible": v.ok })
}

fn first(v: &crate::basic_object::Verdict) -> Json {
    v.components.first().map(verdict_json).unwrap_or(Json::Null)
}

fn summary(r: &EquiresReport) -> Json {
    let centers = |run: &crate::driver::Run| run.steps.iter().map(|s| s.center_text.join("; ")).collect::<Vec<_>>();
    json!({
        "e": r.e,
        "ell": r.ell,
        "equisolvable": r.equisolvable(),
        "failure": r.failure().map(|f| json!({ "step": f.step, "clause": f.clause.to_string(), "detail": f.detail })),
        "centers": centers(&r.run),
        "fiber_centers": centers(&r.fiber),
    })
}

fn object_text(b: &BasicObject) -> String {
    let l = &b.local[0];
    format!("({}, {})", ideal_text(&l.ideal, &b.pair.charts[0].ring(b.m)), b.b)
}

fn lambdas() -> Vec<BigRational> {
    vec![ratio(-1, 2), ratio(0, 1), ratio(1, 2), ratio(1, 1)]
}

fn replay_ex4_2(cfg: &DriverConfig) -> Result<Json> {
    let b = ex4_2();
    let fiber_order = b.local[0].ideal.order_at_point(&rational_point(&[ratio(0, 1), ratio(0, 1)], b.m), Level::Fiber)?;
    let v = b.is_permissible_center(&origin(2));
    Ok(json!({
        "object": object_text(&b),
        "center": "V(x,y)",
        "fiber_order_at_origin": fiber_order,
        "verdict": first(&v),
        "equires": summary(&equiresolve(&b, cfg)?),
    }))
}

fn replay_nohay(cfg: &DriverConfig) -> Result<Json> {
    let b = ex_nohay();
    let centers: Vec<Json> = lambdas()
        .into_iter()
        .map(|l| {
            let v = b.is_permissible_center(&shifted(1, vec![0], &[(0, l.clone())], b.m));
            json!({ "lambda": rat(&l), "verdict": first(&v) })
        })
        .collect();
    Ok(json!({ "object": object_text(&b), "centers_x_minus_lambda_eps": centers, "equires": summary(&equiresolve(&b, cfg)?) }))
}

fn replay_ex4_6() -> Result<Json> {
    let (b, bp) = ex4_6();
    let seqs: Vec<Vec<CenterSpec>> = lambdas().into_iter().map(|l| vec![shifted(1, vec![0], &[(0, l)], 2)]).collect();
    let probe = pre_equivalence_probe(&b, &bp, &seqs)?;
    let lines: Vec<Json> = lambdas()
        .iter()
        .zip(&probe.lines)
        .map(|(l, p)| json!({ "lambda": rat(l), "verdicts": p.verdicts, "fiber_verdicts": p.fiber_verdicts }))
        .collect();
    let (f, fp) = (b.fiber(), bp.fiber());
    let c0 = CenterSpec::single("W", CenterComponent::coordinate(vec![0]));
    let after = f.transform(&c0)?.0;
    let c1 = CenterSpec::single(&after.pair.charts[0].id, CenterComponent::coordinate(vec![0]));
    let fiber_probe = pre_equivalence_probe(&f, &fp, &[vec![c0, c1]])?;
    Ok(json!({
        "objects": [object_text(&b), object_text(&bp)],
        "probe": lines,
        "pre_equivalent_on_probe": probe.pre_equivalent(),
        "fiber_probe": fiber_probe.lines[0].verdicts,
        "fibers_pre_equivalent_on_probe": fiber_probe.pre_equivalent(),
    }))
}

/// Shared part of the two hypersurface examples: `Delta`, plain and homogenized `B_Z`,
/// and the verdicts of a center `C` in `W` and its trace in `Z = V(z)`.
fn replay_restriction(b: &BasicObject, cfg: &DriverConfig, expect_bz: &[&str]) -> Result<Json> {
    let chart = &b.pair.charts[0];
    let i = &b.local[0].ideal;
    let plain = inductive_object(chart, i, b.b, 1, &[], b.pair.next_label, false)?;
    let homog = inductive_object(chart, i, b.b, 1, &[], b.pair.next_label, true)?;
    let rz = plain.pair.charts[0].ring(b.m);
    let c = origin(2);
    let cz = CenterSpec::single("W", CenterComponent::coordinate(vec![0]));
    let s = is_strongly_permissible(b, &plain, &c, &cz);
    Ok(json!({
        "object": object_text(b),
        "Z": "V(z)",
        "B_Z": object_text(&plain),
        "B_Z_as_expected": plain.local[0].ideal.equals(&ideal(&rz, expect_bz), Level::Full),
        "homogenized_B_Z": object_text(&homog),
        "center": "V(x,z)",
        "center_in_Z": "V(x)",
        "for_B": first(&s.for_b),
        "for_B_Z": first(&s.for_bz),
        "equires": summary(&equiresolve(b, cfg)?),
    }))
}

fn replay_ex6_9(cfg: &DriverConfig) -> Result<Json> {
    let b = ex6_9();
    let r = b.ring();
    let d = delta(&b.local[0].ideal);
    let mut out = replay_restriction(&b, cfg, &["eps*x^2", "x^3"])?;
    out["delta"] = json!(ideal_text(&d.canonical(), &r));
    out["delta_is_z_eps_x_x2"] = json!(d.equals(&ideal(&r, &["z", "eps*x", "x^2"]), Level::Full));
    Ok(out)
}

fn replay_ex6_10(cfg: &DriverConfig) -> Result<Json> {
    replay_restriction(&ex6_10(), cfg, &["x^30"])
}

fn replay_ex8_6(cfg: &DriverConfig) -> Result<Json> {
    let b = ex8_6();
    let r = b.ring();
    let rz = Ring::new(&["x"], 2);
    let i = &b.local[0].ideal;
    let d = delta(i);
    let h = homogenized_ideal(i, 2);
    let c = restricted_coefficient_ideal(&h, 2, 1)?;
    let bz = inductive_object(&b.pair.charts[0], i, 2, 1, &[], b.pair.next_label, true)?;
    let mut selected = Vec::new();
    let family: Vec<Json> = lambdas()
        .into_iter()
        .map(|l| {
            let cw = shifted(2, vec![0, 1], &[(0, l.clone())], 2);
            let cz = shifted(1, vec![0], &[(0, l.clone())], 2);
            let s = is_strongly_permissible(&b, &bz, &cw, &cz);
            if s.ok {
                selected.push(rat(&l));
            }
            json!({ "lambda": rat(&l), "for_B": first(&s.for_b), "for_B_Z": first(&s.for_bz), "strongly_permissible": s.ok })
        })
        .collect();
    let rep = equiresolve(&b, cfg)?;
    let sing: Vec<Json> = rep
        .run
        .last
        .singular_locus()
        .into_iter()
        .map(|p| json!({ "chart": p.chart, "sing_empty": p.empty }))
        .collect();
    Ok(json!({
        "object": object_text(&b),
        "delta": ideal_text(&d.canonical(), &r),
        "delta_is_y_x2": d.equals(&ideal(&r, &["y", "x^2"]), Level::Full),
        "H": ideal_text(&h, &r),
        "H_is_y2_x2y_x3": h.equals(&ideal(&r, &["y^2", "x^2*y", "x^3"]), Level::Full),
        "coefficient_ideal": ideal_text(&c, &rz),
        "coefficient_ideal_is_x3": c.equals(&ideal(&rz, &["x^3"]), Level::Full),
        "centers_y_x_minus_lambda_eps": family,
        "selected_lambdas": selected,
        "equires": summary(&rep),
        "transform_sing": sing,
    }))
}

/// Recomputes the replay report of a named example.
pub fn replay(name: &str, cfg: &DriverConfig) -> Result<Json> {
    let body = match name {
        "ex4_2" => replay_ex4_2(cfg)?,
        "ex_nohay" => replay_nohay(cfg)?,
        "ex4_6" => replay_ex4_6()?,
        "ex6_9" => replay_ex6_9(cfg)?,
        "ex6_10" => replay_ex6_10(cfg)?,
        "ex8_6" => replay_ex8_6(cfg)?,
        _ => return Err(CoreError::BadInput(format!("unknown example `{name}` (known: {})", REPLAY_NAMES.join(", ")))),
    };
    Ok(envelope("replay", json!({ "example": name, "report": body })))
}
