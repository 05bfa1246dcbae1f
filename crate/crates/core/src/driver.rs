//! The resolution driver. Centers are chosen on the fiber from the invariant `t` and by
//! induction on dimension through adapted hypersurfaces; the same choices are lifted to
//! `A` step by step, and the first step without a lift is reported.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::basic_object::{BasicObject, Local};
use crate::contact::{
    find_adapted_hypersurfaces, homogenized_ideal, inductive_object, lift_pivot, pivot_allowed, pivots_of,
    FACTORIAL_GUARD,
};
use crate::delta::delta_power;
use crate::error::{CoreError, Result};
use crate::geometry::{BlowupRecord, CenterComponent, CenterSpec, Chart, CoordChange, SPair};
use crate::groebner::{MonoOrder, QPoly};
use crate::ideal::{from_full_q, to_full_q, Ideal, Level};
use crate::invariants::{
    b_doubleprime, b_prime, chart_orders, check_omega_t_permissible, divisor_exponents, gamma, max_t, ratio_u,
    MaxT, Piece, Rest, SequenceFlags, Value,
};
use crate::locus::{codim_one_part, div_exact, hypersurface_components, locus_within, pivot_form, saturate, saturate_q};
use crate::poly::Poly;

/// Largest ambient dimension accepted by default.
pub const MAX_DIM: usize = 3;

#[derive(Clone, Debug)]
pub struct DriverConfig {
    pub max_dim: usize,
    pub max_steps: usize,
    /// Compare the first center obtained from a second adapted hypersurface.
    pub check_well_definedness: bool,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig { max_dim: MAX_DIM, max_steps: 64, check_well_definedness: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `Max(t)` has a codimension-one part, blown up as a whole.
    Codim1,
    /// A new inductive object was built for this plateau of `t`.
    Inductive,
    /// The inductive objects of the previous step were reused.
    Carryover,
    /// The object is monomial; the center is the canonical one.
    Monomial,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::Codim1 => "codim1",
            StepKind::Inductive => "inductive",
            StepKind::Carryover => "carryover",
            StepKind::Monomial => "monomial",
        }
    }
}

/// Why a step has no lift over `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureClause {
    NoLift,
    NotStrong,
    NotMonomial,
}

impl fmt::Display for FailureClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureClause::NoLift => "no A-permissible lift",
            FailureClause::NotStrong => "B_Z center not strongly permissible",
            FailureClause::NotMonomial => "premonomial not monomial",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub step: usize,
    pub clause: FailureClause,
    pub detail: String,
    pub trace: Vec<String>,
}

/// Structural checks recorded for one step.
#[derive(Clone, Debug, Default)]
pub struct StepChecks {
    /// `omega`/`t`-permissibility of the fiber center.
    pub flags: Option<SequenceFlags>,
    /// The `B''` verdict agrees with `t`-permissibility.
    pub bdp_agrees: Option<bool>,
    /// `B''` has exactly order `b''` along the center.
    pub nice_good: Option<bool>,
    /// `b * omega = nu(I) - sum (nu_H - b)` along every component, over `A`.
    pub order_balance: Option<bool>,
}

/// Comparison of the first centers obtained from two adapted hypersurfaces.
#[derive(Clone, Debug)]
pub struct WellDefinedness {
    pub depth: usize,
    pub chart: String,
    pub first: String,
    pub second: String,
    pub agree: bool,
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub index: usize,
    pub kind: StepKind,
    pub value: Value,
    pub center: CenterSpec,
    pub center_text: Vec<String>,
    pub trace: Vec<String>,
    pub checks: StepChecks,
}

/// A chosen step before it is carried out.
#[derive(Clone, Debug)]
pub struct Plan {
    pub kind: StepKind,
    pub value: Value,
    /// Center over `A`; meaningless when `failure` is set.
    pub center: CenterSpec,
    pub center_fiber: CenterSpec,
    pub failure: Option<(FailureClause, String)>,
    /// Set when the center cannot be carried out in coordinate charts.
    pub pending: Option<String>,
    /// Fiber equations of codimension-one components that are not coordinate hypersurfaces.
    pub raw: BTreeMap<String, Vec<Poly>>,
    pub trace: Vec<String>,
    pub checks: StepChecks,
    winners: Vec<(usize, Plan)>,
}

/// One codimension-one component of `Max(t)` on the fiber.
struct Found {
    ci: usize,
    piece: Piece,
    pivot: Option<crate::locus::Pivot>,
    poly: Poly,
}

#[derive(Clone, Debug)]
struct Sub {
    driver: Driver,
    zvar: usize,
    /// The change that straightened `Z`, over `A`.
    change: CoordChange,
    s: Vec<usize>,
    line: String,
}

impl Sub {
    fn covers(&self, id: &str) -> bool {
        self.driver.obj.chart_index(id).is_some()
    }
}

#[derive(Clone, Debug)]
struct Plateau {
    t: (BigRational, usize),
    s_label: usize,
    subs: Vec<Sub>,
}

/// Resolution of one basic object, run over `A` and over the fiber in lockstep.
#[derive(Clone, Debug)]
pub struct Driver {
    obj: BasicObject,
    fib: Option<BasicObject>,
    protected: Vec<usize>,
    depth: usize,
    cfg: DriverConfig,
    s_label: usize,
    last_omega: Option<BigRational>,
    plateau: Option<Plateau>,
    /// Chart splits made during the last plan, in this driver's coordinates.
    splits: Vec<(String, Vec<Ideal>)>,
    wd: Vec<WellDefinedness>,
}

fn object_on(chart: &Chart, ideal: Ideal, b: u32) -> BasicObject {
    let labels = chart.labels();
    let next_label = labels.iter().max().map_or(0, |l| l + 1);
    let pair = SPair { charts: vec![chart.clone()], labels, next_label };
    BasicObject { m: ideal.m(), b, step: 0, pair, local: vec![Local::new(ideal)] }
}

fn only(c: &CenterSpec, id: &str) -> CenterSpec {
    CenterSpec { parts: c.parts.iter().filter(|(k, _)| *k == id).map(|(k, v)| (k.clone(), v.clone())).collect() }
}

fn component_of(change: CoordChange) -> CenterComponent {
    let var = change.var;
    if change.is_identity() {
        CenterComponent::coordinate(vec![var])
    } else {
        CenterComponent { changes: vec![change], vars: vec![var] }
    }
}

/// Index map from a hypersurface `x_v = 0` back to the ambient chart.
fn up_map(n: usize, v: usize) -> Vec<usize> {
    (0..n - 1).map(|i| if i < v { i } else { i + 1 }).collect()
}

fn lift_component(comp: &CenterComponent, v: usize, n: usize) -> CenterComponent {
    let map = up_map(n, v);
    let changes = comp
        .changes
        .iter()
        .map(|c| CoordChange { var: map[c.var], unit: c.unit.clone(), shift: c.shift.remap(&map, n) })
        .collect();
    let mut vars: Vec<usize> = comp.vars.iter().map(|&w| map[w]).collect();
    vars.push(v);
    vars.sort_unstable();
    CenterComponent { changes, vars }
}

fn lift_spec(c: &CenterSpec, v: usize, n: usize, into: &mut CenterSpec) {
    for (id, comps) in &c.parts {
        into.parts.entry(id.clone()).or_default().extend(comps.iter().map(|k| lift_component(k, v, n)));
    }
}

/// `(g1,g2,...)`.
pub fn ideal_text(i: &Ideal, ring: &crate::poly::Ring) -> String {
    i.display(ring)
}

/// Text of a center, one entry per chart component.
pub fn center_text(b: &BasicObject, c: &CenterSpec) -> Vec<String> {
    let mut out = Vec::new();
    for (id, comps) in &c.parts {
        let ring = match b.pair.chart(id) {
            Some(ch) => ch.ring(b.m),
            None => continue,
        };
        for comp in comps {
            out.push(format!("{id}: {}", comp.display(&ring)));
        }
    }
    out
}

/// A-level saturation `K : f^oo` inside `Q[x, eps] / (eps^m)`.
fn saturate_full(k: &Ideal, f: &Poly) -> Ideal {
    let (n, m) = (k.nvars(), k.m());
    let ord = MonoOrder::Grevlex;
    let mut gens: Vec<QPoly> = k.gens().iter().map(|g| to_full_q(g, ord)).collect();
    let mut em = vec![0; n + 1];
    em[n] = m as u32;
    gens.push(QPoly::from_terms(vec![(em, BigRational::from_integer(1.into()))], ord));
    let fq = to_full_q(&f.fiber().extend(m), ord);
    let sat = saturate_q(&gens, &fq);
    Ideal::new(n, m, sat.iter().map(|q| from_full_q(q, n, m)).filter(|p| !p.is_zero()).collect())
}

impl Driver {
    pub fn new(obj: BasicObject, cfg: DriverConfig) -> Result<Driver> {
        if obj.nvars() > cfg.max_dim {
            return Err(CoreError::GuardExceeded(format!("ambient dimension {} exceeds {}", obj.nvars(), cfg.max_dim)));
        }
        let fib = (obj.m > 1).then(|| obj.fiber());
        Ok(Driver::with_twin(obj, fib, Vec::new(), 0, cfg))
    }

    fn with_twin(obj: BasicObject, fib: Option<BasicObject>, protected: Vec<usize>, depth: usize, cfg: DriverConfig) -> Driver {
        Driver {
            obj,
            fib,
            protected,
            depth,
            cfg,
            s_label: 0,
            last_omega: None,
            plateau: None,
            splits: Vec::new(),
            wd: Vec::new(),
        }
    }

    /// The object over `A`.
    pub fn object(&self) -> &BasicObject {
        &self.obj
    }

    /// The object on which decisions are made.
    pub fn fiber(&self) -> &BasicObject {
        self.fib.as_ref().unwrap_or(&self.obj)
    }

    pub fn well_definedness(&self) -> &[WellDefinedness] {
        &self.wd
    }

    fn split(&mut self, ci: usize, loci: &[Ideal]) {
        self.splits.push((self.obj.pair.charts[ci].id.clone(), loci.to_vec()));
        self.obj.split_chart(ci, loci);
        if let Some(f) = &mut self.fib {
            f.split_chart(ci, loci);
        }
    }

    fn apply_change(&mut self, ci: usize, a: &CoordChange, f: &CoordChange) -> Result<()> {
        self.obj.apply_change(ci, a)?;
        if let Some(fb) = &mut self.fib {
            fb.apply_change(ci, f)?;
        }
        Ok(())
    }

    /// Chooses the next center; `None` once `Sing` is empty.
    pub fn plan(&mut self) -> Result<Option<Plan>> {
        self.splits.clear();
        let fib = self.fiber().clone();
        let orders = chart_orders(&fib);
        let Some(b_r) = orders.iter().map(|o| o.2).max() else {
            return Ok(None);
        };
        if b_r == 0 {
            self.plateau = None;
            self.last_omega = Some(BigRational::zero());
            return self.monomial_plan(&fib).map(Some);
        }
        let omega = ratio_u(b_r, fib.b);
        if self.last_omega.as_ref() != Some(&omega) {
            self.s_label = fib.pair.next_label;
            self.plateau = None;
            self.last_omega = Some(omega);
        }
        let s_label = self.s_label;
        let old = move |l: usize| l < s_label;
        let mt = max_t(&fib, &old).ok_or_else(|| CoreError::InvariantBreach("max t vanished on a nonempty Sing".into()))?;
        if let Some(p) = self.codim_one_plan(&fib, &mt, &old)? {
            self.plateau = None;
            return Ok(Some(p));
        }
        self.inductive_plan(mt).map(Some)
    }

    fn monomial_plan(&mut self, fib: &BasicObject) -> Result<Plan> {
        let (g, center) = gamma(fib)?.ok_or_else(|| CoreError::AlgorithmStuck("monomial object without a maximal stratum".into()))?;
        let mut failure = None;
        if self.fib.is_some() {
            for id in center.parts.keys() {
                let ci = self.obj.chart_index(id).expect("center chart exists");
                let (a, _) = divisor_exponents(&self.obj.pair.charts[ci], &self.obj.local[ci].ideal);
                let (a0, _) = divisor_exponents(&fib.pair.charts[ci], &fib.local[ci].ideal);
                if a != a0 {
                    failure = Some((FailureClause::NotMonomial, format!("chart {id}: divisor exponents {a:?} over A but {a0:?} on the fiber")));
                    break;
                }
            }
            if failure.is_none() {
                let v = self.obj.is_permissible_center(&center);
                if let Some(f) = v.first_failure() {
                    failure = Some((FailureClause::NotMonomial, format!("chart {}: {}", f.chart, f.reason.clone().unwrap_or_default())));
                }
            }
        }
        Ok(Plan {
            kind: StepKind::Monomial,
            value: Value::Mono(g),
            center: center.clone(),
            center_fiber: center,
            failure,
            pending: None,
            raw: BTreeMap::new(),
            trace: Vec::new(),
            checks: StepChecks::default(),
            winners: Vec::new(),
        })
    }

    fn b2(&self, obj: &BasicObject, ci: usize, b_r: u32, s: &[usize]) -> (Ideal, u32) {
        let chart = &obj.pair.charts[ci];
        let (j, b1) = b_prime(&obj.local[ci], chart, obj.b, b_r);
        (b_doubleprime(chart, &j, b1, s), b1)
    }

    fn sequence_checks(&self, fib: &BasicObject, center: &CenterSpec, mt: &MaxT, old: &dyn Fn(usize) -> bool, s_of: &dyn Fn(&str) -> Vec<usize>) -> StepChecks {
        let flags = check_omega_t_permissible(fib, center, mt, old);
        let mut bdp_ok = true;
        let mut good = true;
        for id in center.parts.keys() {
            let Some(ci) = fib.chart_index(id) else { continue };
            let (i2, b1) = self.b2(fib, ci, mt.b_r, &s_of(id));
            let v = object_on(&fib.pair.charts[ci], i2, b1).is_permissible_center(&only(center, id));
            bdp_ok &= v.ok;
            good &= v.components.iter().all(|c| c.nu == b1);
        }
        StepChecks { bdp_agrees: Some(bdp_ok == flags.t), nice_good: Some(good), flags: Some(flags), order_balance: None }
    }

    fn codim_one_plan(&mut self, fib: &BasicObject, mt: &MaxT, old: &dyn Fn(usize) -> bool) -> Result<Option<Plan>> {
        let n = fib.nvars();
        let mut found: Vec<Found> = Vec::new();
        for cm in &mt.charts {
            let chart = &fib.pair.charts[cm.chart];
            for piece in &cm.pieces {
                let g = codim_one_part(&piece.ideal);
                if g.is_constant() {
                    continue;
                }
                let parts = match hypersurface_components(&g, &|_| true) {
                    Ok(ps) => ps.iter().map(|p| p.poly()).collect(),
                    Err(CoreError::AlgorithmStuck(_)) => vec![g.clone()],
                    Err(e) => return Err(e),
                };
                for poly in parts {
                    if !chart.meets(&Ideal::new(n, 1, vec![poly.clone()])) {
                        continue;
                    }
                    let pivot = pivots_of(&poly).into_iter().find(|q| pivot_allowed(chart, &self.protected, q));
                    found.push(Found { ci: cm.chart, piece: piece.clone(), pivot, poly });
                }
            }
        }
        if found.is_empty() {
            return Ok(None);
        }
        for (i, a) in found.iter().enumerate() {
            for b in &found[i + 1..] {
                if a.ci == b.ci && fib.pair.charts[a.ci].meets(&Ideal::new(n, 1, vec![a.poly.clone(), b.poly.clone()])) {
                    return Err(CoreError::AlgorithmStuck(format!("chart {}: codimension-one components of Max t meet", fib.pair.charts[a.ci].id)));
                }
            }
        }
        let mut center_f = CenterSpec::default();
        let mut raw: BTreeMap<String, Vec<Poly>> = BTreeMap::new();
        for f in &found {
            let id = fib.pair.charts[f.ci].id.clone();
            match &f.pivot {
                Some(pv) => center_f.parts.entry(id).or_default().push(component_of(CoordChange::from_pivot(pv))),
                None => raw.entry(id).or_default().push(f.poly.clone()),
            }
        }
        let pending = raw.keys().next().map(|id| format!("chart {id}: a codimension-one center is not a coordinate hypersurface"));
        let s_of = |id: &str| found.iter().find(|f| fib.pair.charts[f.ci].id == id).map(|f| f.piece.s.clone()).unwrap_or_default();
        let mut failure = None;
        let center_a = if self.fib.is_none() {
            center_f.clone()
        } else {
            let mut c = CenterSpec::default();
            for (k, f) in found.iter().enumerate() {
                match self.lift_codim_one(&found, k, mt.b_r) {
                    Ok(Some(comp)) => c.parts.entry(self.obj.pair.charts[f.ci].id.clone()).or_default().push(comp),
                    Ok(None) => {}
                    Err(msg) => {
                        failure = Some((FailureClause::NoLift, msg));
                        break;
                    }
                }
            }
            if failure.is_none() {
                failure = self.check_lift(&c, mt.b_r, &s_of, FailureClause::NoLift);
            }
            c
        };
        let checks = self.sequence_checks(fib, &center_f, mt, old, &s_of);
        Ok(Some(Plan {
            kind: StepKind::Codim1,
            value: Value::T { omega: mt.omega(fib.b), n: mt.n, rest: Rest::Infinity },
            center: center_a,
            center_fiber: center_f,
            failure,
            pending,
            raw,
            trace: vec![format!("depth {}: codimension-one part of Max t", self.depth)],
            checks,
            winners: Vec::new(),
        }))
    }

    /// The A-level lift of one fiber component of `Max(t)`: the top derivative ideal of
    /// `B''`, saturated away from everything else, must be `V(x_v + h)` (or a principal
    /// lift of a component that is not a coordinate hypersurface, reported as `None`).
    fn lift_codim_one(&self, found: &[Found], me: usize, b_r: u32) -> std::result::Result<Option<CenterComponent>, String> {
        let this = &found[me];
        let ci = this.ci;
        let chart = &self.obj.pair.charts[ci];
        let n = chart.nvars();
        let m = self.obj.m;
        let p0 = this.poly.fiber();
        let (i2, b1) = self.b2(&self.obj, ci, b_r, &this.piece.s);
        let top = delta_power(&i2, b1.saturating_sub(1));
        let mut f = Poly::one(n, 1);
        for (k, other) in found.iter().enumerate() {
            if k != me && other.ci == ci {
                f = f.mul(&other.poly.fiber());
            }
        }
        let rest = saturate(&this.piece.ideal, &codim_one_part(&this.piece.ideal));
        if !rest.is_unit() {
            let q = rest.fiber_gb_polys().into_iter().find(|q| div_exact(q, &p0).is_none());
            f = f.mul(&q.ok_or_else(|| format!("chart {}: embedded component inside the hypersurface", chart.id))?);
        }
        if let Some(r) = &chart.removed {
            if let Some(q) = r.gens().iter().find(|q| div_exact(&q.fiber(), &p0).is_none()) {
                f = f.mul(&q.fiber());
            }
        }
        let k = saturate_full(&top, &f);
        let fiber_eq = Ideal::new(n, 1, vec![p0.clone()]);
        let Some(pv) = &this.pivot else {
            let principal = k.full_builder().reduced().iter().map(|q| from_full_q(q, n, m)).find(|g| {
                !g.fiber().is_zero()
                    && Ideal::new(n, 1, vec![g.fiber()]).equals(&fiber_eq, Level::Fiber)
                    && Ideal::new(n, m, vec![g.clone()]).contains_ideal(&k, Level::Full)
            });
            return match principal {
                Some(_) => Ok(None),
                None => Err(format!("chart {}: Delta^{}(I'') is not a principal lift of the hypersurface", chart.id, b1.saturating_sub(1))),
            };
        };
        let form = pivot_form(&k, &[pv.var]).ok_or_else(|| {
            format!("chart {}: Delta^{}(I'') does not define a smooth hypersurface over A", chart.id, b1.saturating_sub(1))
        })?;
        let (v, h) = form.into_iter().next().expect("one pivot");
        let change = CoordChange::new(v, crate::scalar::ArtinScalar::one(m), h).map_err(|e| e.to_string())?;
        if !Ideal::new(n, 1, vec![change.equation().fiber()]).equals(&fiber_eq, Level::Fiber) {
            return Err(format!("chart {}: the lift does not reduce to the fiber component", chart.id));
        }
        if !change.is_identity() && chart.label_on(v).is_some() {
            return Err(format!("chart {}: the lift moves a divisor of E", chart.id));
        }
        Ok(Some(component_of(change)))
    }

    /// A-level permissibility for `B` and for `B''` on every chart of the center.
    fn check_lift(&self, c: &CenterSpec, b_r: u32, s_of: &dyn Fn(&str) -> Vec<usize>, clause: FailureClause) -> Option<(FailureClause, String)> {
        let v = self.obj.is_permissible_center(c);
        if let Some(f) = v.first_failure() {
            return Some((clause, format!("chart {}: {}", f.chart, f.reason.clone().unwrap_or_default())));
        }
        for id in c.parts.keys() {
            let ci = self.obj.chart_index(id)?;
            let (i2, b1) = self.b2(&self.obj, ci, b_r, &s_of(id));
            let v = object_on(&self.obj.pair.charts[ci], i2, b1).is_permissible_center(&only(c, id));
            if let Some(f) = v.first_failure() {
                return Some((clause, format!("chart {id}: for B'': {}", f.reason.clone().unwrap_or_default())));
            }
        }
        None
    }

    fn plateau_matches(&self, mt: &MaxT, fib: &BasicObject, omega: &BigRational) -> bool {
        let Some(p) = &self.plateau else { return false };
        p.t == (omega.clone(), mt.n)
            && p.s_label == self.s_label
            && mt.charts.iter().all(|c| {
                let id = &fib.pair.charts[c.chart].id;
                c.pieces.len() == 1 && p.subs.iter().any(|s| s.covers(id) && s.s == c.pieces[0].s)
            })
    }

    fn inductive_plan(&mut self, mt: MaxT) -> Result<Plan> {
        let omega = mt.omega(self.fiber().b);
        let s_label = self.s_label;
        let old = move |l: usize| l < s_label;
        let reuse = self.plateau_matches(&mt, self.fiber(), &omega);
        let mut trace = Vec::new();
        let mt = if reuse {
            mt
        } else {
            self.plateau = None;
            if let Some(fail) = self.build_plateau(mt, &old)? {
                return Ok(self.failed_plan(fail, &omega));
            }
            let fib = self.fiber().clone();
            max_t(&fib, &old).ok_or_else(|| CoreError::InvariantBreach("max t vanished after the coordinate change".into()))?
        };
        let n_amb = self.obj.nvars();
        let mut plans = Vec::new();
        let mut new_splits = Vec::new();
        let mut sub_wd = Vec::new();
        {
            let plateau = self.plateau.as_mut().expect("plateau built");
            for (k, sub) in plateau.subs.iter_mut().enumerate() {
                let p = sub.driver.plan()?.ok_or_else(|| {
                    CoreError::InvariantBreach("the inductive object is resolved while t persists".into())
                })?;
                for (id, loci) in sub.driver.splits.drain(..) {
                    let map = up_map(n_amb, sub.zvar);
                    let lifted: Vec<Ideal> = loci.iter().map(|l| l.map(|g| g.remap(&map, n_amb))).collect();
                    new_splits.push((id, lifted));
                }
                plans.push((k, p));
                sub_wd.append(&mut sub.driver.wd);
            }
        }
        self.wd.append(&mut sub_wd);
        for (id, loci) in new_splits {
            let ci = self.obj.chart_index(&id).ok_or_else(|| CoreError::InvariantBreach(format!("split of unknown chart {id}")))?;
            self.split(ci, &loci);
        }
        let plateau = self.plateau.as_ref().expect("plateau built");
        let best = plans.iter().map(|(_, p)| p.value.clone()).max().expect("at least one inductive object");
        let winners: Vec<(usize, Plan)> = plans.into_iter().filter(|(_, p)| p.value == best).collect();
        let mut center = CenterSpec::default();
        let mut center_fiber = CenterSpec::default();
        let mut failure = None;
        let mut pending = None;
        for (k, p) in &winners {
            let sub = &plateau.subs[*k];
            trace.push(format!("depth {}: {}", self.depth, sub.line));
            trace.extend(p.trace.iter().cloned());
            if failure.is_none() {
                if let Some((c, d)) = &p.failure {
                    failure = Some((*c, d.clone()));
                }
            }
            if pending.is_none() {
                pending = p.pending.clone();
            }
            lift_spec(&p.center, sub.zvar, n_amb, &mut center);
            lift_spec(&p.center_fiber, sub.zvar, n_amb, &mut center_fiber);
        }
        let s_of = |id: &str| -> Vec<usize> {
            plateau.subs.iter().find(|s| s.covers(id)).map(|s| s.s.clone()).unwrap_or_default()
        };
        if failure.is_none() && self.fib.is_some() {
            failure = self.check_lift(&center, mt.b_r, &s_of, FailureClause::NotStrong);
        }
        let fib = self.fiber().clone();
        let checks = self.sequence_checks(&fib, &center_fiber, &mt, &old, &s_of);
        Ok(Plan {
            kind: if reuse { StepKind::Carryover } else { StepKind::Inductive },
            value: Value::T { omega, n: mt.n, rest: Rest::Sub(Box::new(best)) },
            center,
            center_fiber,
            failure,
            pending,
            raw: BTreeMap::new(),
            trace,
            checks,
            winners,
        })
    }

    fn failed_plan(&self, fail: (FailureClause, String), omega: &BigRational) -> Plan {
        Plan {
            kind: StepKind::Inductive,
            value: Value::T { omega: omega.clone(), n: 0, rest: Rest::Unknown },
            center: CenterSpec::default(),
            center_fiber: CenterSpec::default(),
            failure: Some(fail),
            pending: None,
            raw: BTreeMap::new(),
            trace: Vec::new(),
            checks: StepChecks::default(),
            winners: Vec::new(),
        }
    }

    /// Splits charts with several strata, then builds one inductive object per chart.
    fn build_plateau(&mut self, mt: MaxT, old: &dyn Fn(usize) -> bool) -> Result<Option<(FailureClause, String)>> {
        let omega = mt.omega(self.fiber().b);
        let mut multi: Vec<(usize, Vec<Ideal>)> =
            mt.charts.iter().filter(|c| c.pieces.len() > 1).map(|c| (c.chart, c.pieces.iter().map(|p| p.ideal.clone()).collect())).collect();
        multi.sort_by(|a, b| b.0.cmp(&a.0));
        for (ci, loci) in &multi {
            self.split(*ci, loci);
        }
        let fib = self.fiber().clone();
        let mt = max_t(&fib, old).ok_or_else(|| CoreError::InvariantBreach("max t vanished after splitting".into()))?;
        let mut subs = Vec::new();
        for cm in &mt.charts {
            let id = fib.pair.charts[cm.chart].id.clone();
            match self.make_sub(&id, &cm.pieces[0], mt.b_r)? {
                Ok(sub) => subs.push(sub),
                Err(fail) => return Ok(Some(fail)),
            }
        }
        self.plateau = Some(Plateau { t: (omega, mt.n), s_label: self.s_label, subs });
        Ok(None)
    }

    fn make_sub(&mut self, id: &str, piece: &Piece, b_r: u32) -> Result<std::result::Result<Sub, (FailureClause, String)>> {
        let ci = self.obj.chart_index(id).expect("chart of max t");
        let fib = self.fiber().clone();
        let fchart = fib.pair.charts[ci].clone();
        let (i2f, b1) = self.b2(&fib, ci, b_r, &piece.s);
        if b1 > FACTORIAL_GUARD {
            return Err(CoreError::GuardExceeded(format!("inductive index {b1} on chart {id}")));
        }
        let hf = homogenized_ideal(&i2f, b1);
        let eplus: Vec<usize> = fchart.labels().into_iter().filter(|&l| l >= self.s_label).collect();
        let candidates: Vec<_> = find_adapted_hypersurfaces(&hf, b1, &fchart, &self.protected)
            .into_iter()
            .filter(|h| h.a1 && h.a3 && fchart.label_on(h.pivot.var).map_or(true, |l| piece.s.contains(&l)))
            .collect();
        let Some(z) = candidates.first() else {
            return Err(CoreError::AlgorithmStuck(format!("chart {id}: no adapted hypersurface")));
        };
        let ha = if self.fib.is_some() {
            let (i2a, _) = self.b2(&self.obj, ci, b_r, &piece.s);
            homogenized_ideal(&i2a, b1)
        } else {
            hf.clone()
        };
        let before = self.clone();
        let sub = match self.sub_along(ci, &z.pivot, &hf, &ha, b1, &eplus)? {
            Ok(s) => s,
            Err(msg) => return Ok(Err((FailureClause::NoLift, msg))),
        };
        if self.cfg.check_well_definedness {
            if let Some(z2) = candidates.get(1) {
                let mut other = before;
                if let Ok(Ok(sub2)) = other.sub_along(ci, &z2.pivot, &hf, &ha, b1, &eplus) {
                    self.compare_first_centers(ci, &sub, &sub2);
                }
            }
        }
        let ring = fchart.ring(1);
        let line = format!(
            "Z = V({}) on {id}; B_Z = ({}, {})",
            ring.fmt(&z.pivot.poly()),
            ideal_text(&sub.driver.obj.local[0].ideal, &sub.driver.obj.pair.charts[0].ring(self.obj.m)),
            sub.driver.fiber().b
        );
        Ok(Ok(Sub { s: piece.s.clone(), line, ..sub }))
    }

    /// Moves the chart so that `Z = V(x_v)` and builds the inductive object there.
    fn sub_along(
        &mut self,
        ci: usize,
        zf: &crate::locus::Pivot,
        hf: &Ideal,
        ha: &Ideal,
        b1: u32,
        eplus: &[usize],
    ) -> Result<std::result::Result<Sub, String>> {
        let id = self.obj.pair.charts[ci].id.clone();
        let v = zf.var;
        let za = if self.fib.is_some() {
            let top = delta_power(ha, b1.saturating_sub(1));
            let fixed = self.obj.pair.charts[ci].label_on(v).is_some() || self.protected.contains(&v);
            match lift_pivot(&top, zf, fixed) {
                Some(p) => p,
                None => {
                    let ring = self.obj.pair.charts[ci].ring(1);
                    return Ok(Err(format!("chart {id}: V({}) has no lift inside Delta^{}(I'') over A", ring.fmt(&zf.poly()), b1 - 1)));
                }
            }
        } else {
            zf.clone()
        };
        let cha = CoordChange::from_pivot(&za);
        let chf = CoordChange::from_pivot(zf);
        self.apply_change(ci, &cha, &chf)?;
        let ha2 = ha.map(|g| cha.forward(g));
        let hf2 = hf.map(|g| chf.forward(g));
        let next = self.obj.pair.next_label;
        let sub_a = inductive_object(&self.obj.pair.charts[ci], &ha2, b1, v, eplus, next, false)?;
        let sub_f = match &self.fib {
            Some(f) => Some(inductive_object(&f.pair.charts[ci], &hf2, b1, v, eplus, next, false)?),
            None => None,
        };
        let chart = &self.obj.pair.charts[ci];
        let mut protected: Vec<usize> = chart
            .e
            .iter()
            .filter(|(l, _)| !eplus.contains(l))
            .map(|&(_, w)| w)
            .chain(self.protected.iter().copied())
            .filter(|&w| w != v)
            .map(|w| if w > v { w - 1 } else { w })
            .collect();
        protected.sort_unstable();
        protected.dedup();
        let driver = Driver::with_twin(sub_a, sub_f, protected, self.depth + 1, self.cfg.clone());
        Ok(Ok(Sub { driver, zvar: v, change: cha, s: Vec::new(), line: String::new() }))
    }

    /// First center of an inductive object, lifted to the chart and written in the
    /// coordinates before `Z` was straightened.
    fn first_center(&self, ci: usize, sub: &Sub) -> Option<Ideal> {
        let (n, m) = (self.obj.nvars(), self.obj.m);
        let id = &self.obj.pair.charts[ci].id;
        let mut probe = sub.driver.clone();
        let plan = probe.plan().ok()??;
        if plan.failure.is_some() {
            return None;
        }
        let mut lifted = CenterSpec::default();
        lift_spec(&plan.center, sub.zvar, n, &mut lifted);
        let gens: Vec<Poly> = lifted.parts.get(id)?.iter().flat_map(|c| c.ideal(n, m).gens().to_vec()).collect();
        Some(Ideal::new(n, m, gens).map(|g| sub.change.backward(g)))
    }

    fn compare_first_centers(&mut self, ci: usize, s1: &Sub, s2: &Sub) {
        let (Some(a), Some(b)) = (self.first_center(ci, s1), self.first_center(ci, s2)) else { return };
        let ring = self.obj.pair.charts[ci].ring(self.obj.m);
        let show = |i: &Ideal| format!("V{}", ideal_text(&i.canonical(), &ring));
        self.wd.push(WellDefinedness {
            depth: self.depth,
            chart: self.obj.pair.charts[ci].id.clone(),
            first: show(&a),
            second: show(&b),
            agree: a.equals(&b, Level::Full),
        });
    }

    /// Carries out a plan over `A` and on the fiber.
    pub fn execute(&mut self, plan: &Plan) -> Result<BlowupRecord> {
        if let Some(why) = &plan.pending {
            return Err(CoreError::AlgorithmStuck(why.clone()));
        }
        let label = self.obj.pair.next_label;
        let (o2, rec) = self.obj.transform(&plan.center)?;
        self.obj = o2;
        if let Some(f) = &self.fib {
            let (f2, _) = f.transform(&plan.center_fiber)?;
            self.fib = Some(f2);
        }
        if let Some(p) = &mut self.plateau {
            for (k, sp) in &plan.winners {
                let d = &mut p.subs[*k].driver;
                d.obj.pair.next_label = label;
                if let Some(f) = &mut d.fib {
                    f.pair.next_label = label;
                }
                d.execute(sp)?;
            }
        }
        Ok(rec)
    }
}


/// `b * omega = nu(I) - sum_{H ⊇ C} a_H` along each component of a center, where
/// `a_H = nu_H - b` for every divisor created by an earlier step.
pub fn order_balance(obj: &BasicObject, c: &CenterSpec) -> bool {
    c.parts.iter().all(|(id, comps)| {
        let Some(ci) = obj.chart_index(id) else { return false };
        let chart = &obj.pair.charts[ci];
        let l = &obj.local[ci];
        let created_ok = l.created_nu.iter().all(|(lab, &nu)| l.hist.get(lab).map_or(true, |&a| a + obj.b == nu));
        created_ok
            && comps.iter().all(|comp| {
                let (nu, _) = obj.orders_along(ci, comp);
                let lhs = obj.proper_order_along(ci, comp);
                if nu == u32::MAX || lhs == u32::MAX {
                    return true;
                }
                let through: u32 =
                    chart.e.iter().filter(|(_, w)| comp.vars.contains(w)).filter_map(|(lab, _)| l.hist.get(lab)).sum();
                lhs + through == nu
            })
    })
}

/// A finished run of a driver.
#[derive(Clone, Debug)]
pub struct Run {
    pub steps: Vec<StepRecord>,
    pub failure: Option<Failure>,
    /// Fiber objects `B_0, ..., B_k` of the run.
    pub fibers: Vec<BasicObject>,
    pub last: BasicObject,
    pub well_definedness: Vec<WellDefinedness>,
}

impl Driver {
    /// Steps until `Sing` is empty, `stop` holds on the fiber, or a step has no lift.
    pub fn run(&mut self, stop: Option<&dyn Fn(&BasicObject) -> bool>) -> Result<Run> {
        let mut steps = Vec::new();
        let mut fibers = vec![self.obj.fiber()];
        let mut failure = None;
        loop {
            if stop.is_some_and(|f| f(self.fiber())) {
                break;
            }
            if steps.len() >= self.cfg.max_steps {
                return Err(CoreError::AlgorithmStuck(format!("no resolution within {} steps", self.cfg.max_steps)));
            }
            let Some(mut plan) = self.plan()? else { break };
            if let Some((clause, detail)) = plan.failure.clone() {
                failure = Some(Failure { step: steps.len(), clause, detail, trace: plan.trace });
                break;
            }
            if plan.kind != StepKind::Monomial {
                plan.checks.order_balance = Some(order_balance(&self.obj, &plan.center));
            }
            let text = center_text(&self.obj, &plan.center);
            self.execute(&plan)?;
            fibers.push(self.obj.fiber());
            steps.push(StepRecord {
                index: steps.len(),
                kind: plan.kind,
                value: plan.value,
                center: plan.center,
                center_text: text,
                trace: plan.trace,
                checks: plan.checks,
            });
        }
        Ok(Run { steps, failure, fibers, last: self.obj.clone(), well_definedness: self.wd.clone() })
    }
}

fn same_fiber(a: &BasicObject, b: &BasicObject) -> bool {
    a.pair.charts.len() == b.pair.charts.len()
        && a.charts().zip(b.charts()).all(|((ca, la), (cb, lb))| {
            ca.id == cb.id && ca.e == cb.e && la.ideal.equals(&lb.ideal, Level::Fiber)
        })
}

/// Structural checks over a whole run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportChecks {
    /// Each A-level object reduces to the fiber run's object at the same step.
    pub fibers_commute: bool,
    pub values_decrease: bool,
    /// `t`-steps come first, then monomial steps only.
    pub t_steps_first: bool,
    pub order_balance: bool,
    pub nice_good: bool,
    pub bdp_agrees: bool,
    pub e_le_ell: bool,
}

fn run_checks(a: &Run, f: &Run) -> ReportChecks {
    let steps = &f.steps;
    let values_decrease = steps.windows(2).all(|w| w[0].value > w[1].value);
    let first_mono = steps.iter().position(|s| s.kind == StepKind::Monomial).unwrap_or(steps.len());
    let t_steps_first = steps[first_mono..].iter().all(|s| s.kind == StepKind::Monomial);
    let all = |g: &dyn Fn(&StepChecks) -> Option<bool>| a.steps.iter().chain(steps.iter()).all(|s| g(&s.checks).unwrap_or(true));
    ReportChecks {
        fibers_commute: a.fibers.iter().zip(f.fibers.iter()).all(|(x, y)| same_fiber(x, y)),
        values_decrease,
        t_steps_first,
        order_balance: all(&|c| c.order_balance),
        nice_good: all(&|c| c.nice_good),
        bdp_agrees: all(&|c| c.bdp_agrees),
        e_le_ell: a.steps.len() <= f.steps.len(),
    }
}

/// The outcome of an equiresolution attempt over `A`.
#[derive(Clone, Debug)]
pub struct EquiresReport {
    pub m: usize,
    /// Number of consecutive steps that lift over `A`.
    pub e: usize,
    /// Length of the resolution of the fiber.
    pub ell: usize,
    pub run: Run,
    pub fiber: Run,
    pub checks: ReportChecks,
}

impl EquiresReport {
    pub fn equisolvable(&self) -> bool {
        self.run.failure.is_none() && self.e == self.ell
    }

    pub fn failure(&self) -> Option<&Failure> {
        self.run.failure.as_ref()
    }
}

/// Resolution of the fiber of `b`.
pub fn resolve_fiber(b: &BasicObject, cfg: &DriverConfig) -> Result<Run> {
    Driver::new(b.fiber(), cfg.clone())?.run(None)
}

fn equiresolve_with(b: &BasicObject, cfg: &DriverConfig, stop: Option<&dyn Fn(&BasicObject) -> bool>) -> Result<EquiresReport> {
    let fiber = Driver::new(b.fiber(), cfg.clone())?.run(stop)?;
    let run = Driver::new(b.clone(), cfg.clone())?.run(stop)?;
    let checks = run_checks(&run, &fiber);
    Ok(EquiresReport { m: b.m, e: run.steps.len(), ell: fiber.steps.len(), run, fiber, checks })
}

/// Runs the fiber resolution over `A` and reports how far it lifts.
pub fn equiresolve(b: &BasicObject, cfg: &DriverConfig) -> Result<EquiresReport> {
    equiresolve_with(b, cfg, None)
}

/// Every chart's ideal is a monomial in the divisors times a unit.
pub fn is_principal_monomial(b: &BasicObject) -> bool {
    b.charts().all(|(c, l)| !c.meets(&divisor_exponents(c, &l.ideal).1.fiber()))
}

/// Principalization of an ideal: the resolution of `(I, 1)`, stopped as soon as the
/// transform is monomial in the exceptional divisors.
pub fn principalize(t: &crate::basic_object::IdTriple, cfg: &DriverConfig) -> Result<EquiresReport> {
    let b = t.basic_object();
    let mut rep = equiresolve_with(&b, cfg, Some(&is_principal_monomial))?;
    if rep.run.failure.is_none() && b.m > 1 {
        let last = &rep.run.last;
        let fib = last.fiber();
        for (ci, (c, l)) in last.charts().enumerate() {
            let (a, _) = divisor_exponents(c, &l.ideal);
            let (a0, _) = divisor_exponents(&fib.pair.charts[ci], &fib.local[ci].ideal);
            if a != a0 {
                rep.run.failure = Some(Failure {
                    step: rep.e,
                    clause: FailureClause::NotMonomial,
                    detail: format!("chart {}: divisor exponents {a:?} over A but {a0:?} on the fiber", c.id),
                    trace: Vec::new(),
                });
                break;
            }
        }
    }
    Ok(rep)
}

/// Embedded resolution of a reduced hypersurface `X`.
#[derive(Clone, Debug)]
pub struct EmbeddedReport {
    /// Index of the first center containing the strict transform as components.
    pub eta: usize,
    /// Steps before `eta` that lift over `A`.
    pub e: usize,
    /// Whether the center at `eta` lifts as well.
    pub eta_lifts: bool,
    pub failure: Option<Failure>,
    pub fiber_steps: Vec<StepRecord>,
    pub steps: Vec<StepRecord>,
    /// The strict transform at `eta`, chart by chart.
    pub strict: Vec<String>,
}

fn strict_is_center(b: &BasicObject, plan: &Plan) -> bool {
    let n = b.nvars();
    b.charts().all(|(chart, l)| {
        let x = l.proper.fiber();
        if !chart.meets(&x) {
            return true;
        }
        let comps = plan.center_fiber.components(&chart.id);
        let raw = plan.raw.get(&chart.id).map_or(&[][..], |v| v.as_slice());
        if comps.is_empty() && raw.is_empty() {
            return false;
        }
        let mut union = comps.iter().fold(Ideal::unit(n, 1), |acc, k| acc.product(&k.ideal(n, 1)).pruned());
        for g in raw {
            union = union.product(&Ideal::new(n, 1, vec![g.clone()])).pruned();
        }
        locus_within(&x, &union) && locus_within(&union, &x)
    })
}

fn record(index: usize, obj: &BasicObject, plan: Plan) -> StepRecord {
    StepRecord {
        index,
        kind: plan.kind,
        value: plan.value,
        center_text: center_text(obj, &plan.center),
        center: plan.center,
        trace: plan.trace,
        checks: plan.checks,
    }
}

/// Embedded resolution of `X = V(f)` given as an object of index one.
pub fn resolve_embedded(x: &BasicObject, cfg: &DriverConfig) -> Result<EmbeddedReport> {
    if x.b != 1 || x.pair.charts.len() != 1 {
        return Err(CoreError::BadInput("embedded resolution expects the ideal of X with index one".into()));
    }
    let gens = x.local[0].ideal.pruned();
    let [f] = gens.gens() else {
        return Err(CoreError::BadInput("embedded resolution supports hypersurfaces only".into()));
    };
    let f0 = f.fiber();
    if crate::locus::squarefree(&f0).total_degree() != f0.total_degree() {
        return Err(CoreError::BadInput("the fiber of X is not reduced".into()));
    }
    let mut fd = Driver::new(x.fiber(), cfg.clone())?;
    let mut fiber_steps = Vec::new();
    let eta = loop {
        if fiber_steps.len() >= cfg.max_steps {
            return Err(CoreError::AlgorithmStuck(format!("no embedded resolution within {} steps", cfg.max_steps)));
        }
        let plan = fd.plan()?.ok_or_else(|| CoreError::InvariantBreach("Sing emptied before X became a center".into()))?;
        if strict_is_center(fd.fiber(), &plan) {
            let k = fiber_steps.len();
            fiber_steps.push(record(k, fd.fiber(), plan));
            break k;
        }
        let rec = record(fiber_steps.len(), fd.fiber(), plan.clone());
        fd.execute(&plan)?;
        fiber_steps.push(rec);
    };
    let strict = fd
        .fiber()
        .charts()
        .filter(|(c, l)| c.meets(&l.proper))
        .map(|(c, l)| format!("{}: V{}", c.id, ideal_text(&l.proper, &c.ring(1))))
        .collect();
    let mut ad = Driver::new(x.clone(), cfg.clone())?;
    let mut steps = Vec::new();
    let mut failure = None;
    let mut eta_lifts = false;
    for k in 0..=eta {
        let plan = ad.plan()?.ok_or_else(|| CoreError::InvariantBreach("the A-level run ended early".into()))?;
        if let Some((clause, detail)) = plan.failure.clone() {
            failure = Some(Failure { step: k, clause, detail, trace: plan.trace });
            break;
        }
        if k == eta {
            eta_lifts = true;
            break;
        }
        let rec = record(k, ad.object(), plan.clone());
        ad.execute(&plan)?;
        steps.push(rec);
    }
    Ok(EmbeddedReport { eta, e: steps.len(), eta_lifts, failure, fiber_steps, steps, strict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn object(vars: &[&str], m: usize, gens: &[&str], b: u32, e: &[&str]) -> BasicObject {
        let r = Ring::new(vars, m);
        let g = gens.iter().map(|s| r.parse(s).unwrap()).collect();
        let e: Vec<Poly> = e.iter().map(|s| r.parse(s).unwrap()).collect();
        BasicObject::new(vars, m, g, b, &e).unwrap()
    }

    #[test]
    fn cusp_resolves_in_one_step_over_a() {
        let b = object(&["x", "y"], 2, &["y^2", "x^3"], 2, &[]);
        let rep = equiresolve(&b, &DriverConfig::default()).unwrap();
        assert_eq!((rep.e, rep.ell), (1, 1));
        assert!(rep.equisolvable());
        assert_eq!(rep.run.steps[0].center_text, vec!["W: V(x,y)".to_string()]);
        assert!(rep.run.steps[0].trace.iter().any(|t| t.contains("B_Z = ((x^3), 2)")), "{:?}", rep.run.steps[0].trace);
        assert!(rep.checks.fibers_commute);
        let wd = &rep.run.well_definedness;
        assert!(!wd.is_empty() && wd.iter().all(|w| w.agree), "{wd:?}");
    }

    #[test]
    fn object_without_centers_fails_at_once() {
        let b = object(&["x"], 2, &["x^2", "eps*x"], 2, &[]);
        let rep = equiresolve(&b, &DriverConfig::default()).unwrap();
        assert_eq!((rep.e, rep.ell), (0, 1));
        assert_eq!(rep.failure().unwrap().clause, FailureClause::NoLift);
    }
}
