//! Basic objects `(W -> S, I, b, E)`, permissibility of centers and their transforms.

use std::collections::BTreeMap;

use crate::delta::order_locus;
use crate::error::{CoreError, Result};
use crate::geometry::{self, BlowupRecord, CenterComponent, CenterSpec, Chart, CoordChange, SPair};
use crate::ideal::Ideal;
use crate::poly::{Poly, Ring};

/// Per-chart ideal data of a basic object.
#[derive(Clone, Debug, PartialEq)]
pub struct Local {
    /// The controlled transform `I_r`.
    pub ideal: Ideal,
    /// The proper transform: `I_r` with all exceptional factors divided out.
    pub proper: Ideal,
    /// Exceptional exponents `a_H` with `I_r = prod x_H^{a_H} * proper`.
    pub hist: BTreeMap<usize, u32>,
    /// Order of the ideal along the center that created each exceptional divisor.
    pub created_nu: BTreeMap<usize, u32>,
    /// Exponents `c_H` of the total transform `I'_r = prod x_H^{c_H} * I_r`.
    pub total: BTreeMap<usize, u32>,
}

impl Local {
    pub fn new(ideal: Ideal) -> Local {
        Local { proper: ideal.clone(), ideal, hist: BTreeMap::new(), created_nu: BTreeMap::new(), total: BTreeMap::new() }
    }

    fn fiber(&self) -> Local {
        Local { ideal: self.ideal.fiber(), proper: self.proper.fiber(), ..self.clone() }
    }

    fn truncate(&self, m: usize) -> Local {
        Local { ideal: self.ideal.truncate(m), proper: self.proper.truncate(m), ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasicObject {
    pub m: usize,
    pub b: u32,
    pub step: usize,
    pub pair: SPair,
    /// Ideal data, parallel to `pair.charts`.
    pub local: Vec<Local>,
}

/// An ideal on an `S`-pair, without an index.
#[derive(Clone, Debug, PartialEq)]
pub struct IdTriple {
    pub m: usize,
    pub pair: SPair,
    pub ideals: Vec<Ideal>,
}

impl IdTriple {
    pub fn new<S: AsRef<str>>(vars: &[S], m: usize, gens: Vec<Poly>, e: &[Poly]) -> Result<IdTriple> {
        let b = BasicObject::new(vars, m, gens, 1, e)?;
        Ok(IdTriple { m, pair: b.pair, ideals: b.local.into_iter().map(|l| l.ideal).collect() })
    }

    pub fn basic_object(&self) -> BasicObject {
        BasicObject { m: self.m, b: 1, step: 0, pair: self.pair.clone(), local: self.ideals.iter().cloned().map(Local::new).collect() }
    }
}

/// Permissibility data of one center component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentVerdict {
    pub chart: String,
    pub component: usize,
    pub nu: u32,
    pub nu_fiber: u32,
    pub in_sing: bool,
    pub ok: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub ok: bool,
    pub components: Vec<ComponentVerdict>,
}

impl Verdict {
    pub fn first_failure(&self) -> Option<&ComponentVerdict> {
        self.components.iter().find(|c| !c.ok)
    }
}

/// Singular locus on one chart.
#[derive(Clone, Debug)]
pub struct SingPart {
    pub chart: String,
    /// Fiber ideal cutting out `Sing` (reduced Groebner basis of the top derivative ideal).
    pub ideal: Ideal,
    pub empty: bool,
}

impl BasicObject {
    /// An object on affine space; the members of `E` are given by equations and
    /// normalized to coordinates, rewriting the ideal accordingly.
    pub fn new<S: AsRef<str>>(vars: &[S], m: usize, gens: Vec<Poly>, b: u32, e: &[Poly]) -> Result<BasicObject> {
        if b == 0 {
            return Err(CoreError::BadInput("the index b must be positive".into()));
        }
        let n = vars.len();
        if gens.iter().any(|g| g.nvars() != n || g.m() != m) || e.iter().any(|g| g.nvars() != n) {
            return Err(CoreError::BadInput("ring mismatch between the ideal and the variable list".into()));
        }
        let (chart, changes) = Chart::with_divisors("W", vars, e)?;
        let gens: Vec<Poly> = gens.iter().map(|g| geometry::forward_all(&changes, g)).collect();
        let ideal = Ideal::new(n, m, gens);
        if ideal.fiber_is_zero() {
            return Err(CoreError::BadInput("the fiber of the ideal is zero".into()));
        }
        let labels: Vec<usize> = (0..e.len()).collect();
        let mut local = Local::new(ideal);
        for &(lab, v) in &chart.e {
            let a = local.proper.var_adic_order(v).unwrap_or(0);
            local.proper = local.proper.div_var_power(v, a)?.pruned();
            local.hist.insert(lab, a);
        }
        let pair = SPair { charts: vec![chart], labels, next_label: e.len() };
        Ok(BasicObject { m, b, step: 0, pair, local: vec![local] })
    }

    pub fn nvars(&self) -> usize {
        self.pair.nvars()
    }

    pub fn charts(&self) -> impl Iterator<Item = (&Chart, &Local)> {
        self.pair.charts.iter().zip(self.local.iter())
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.pair.charts.iter().position(|c| c.id == id)
    }

    pub fn ring(&self) -> Ring {
        self.pair.charts[0].ring(self.m)
    }

    pub fn with_index(&self, b: u32) -> BasicObject {
        BasicObject { b, ..self.clone() }
    }

    /// Reduction modulo `eps`.
    pub fn fiber(&self) -> BasicObject {
        self.truncate(1)
    }

    /// Base change along `Q[eps]/(eps^m) -> Q[eps]/(eps^k)`, `k <= m`.
    pub fn truncate(&self, k: usize) -> BasicObject {
        let k = k.min(self.m);
        let mut pair = self.pair.clone();
        for c in &mut pair.charts {
            c.log = c.log.iter().map(|ch| ch.truncate(k)).collect();
        }
        let local = self.local.iter().map(|l| if k == 1 { l.fiber() } else { l.truncate(k) }).collect();
        BasicObject { m: k, b: self.b, step: self.step, pair, local }
    }

    /// `Sing` chart by chart.
    pub fn singular_locus(&self) -> Vec<SingPart> {
        self.charts()
            .map(|(c, l)| {
                let ideal = order_locus(&l.ideal, self.b);
                let empty = !c.meets(&ideal);
                SingPart { chart: c.id.clone(), ideal, empty }
            })
            .collect()
    }

    pub fn sing_is_empty(&self) -> bool {
        self.singular_locus().iter().all(|s| s.empty)
    }

    /// Order of the controlled ideal along a component, at the full level and on the fiber.
    pub fn orders_along(&self, chart: usize, comp: &CenterComponent) -> (u32, u32) {
        let l = &self.local[chart];
        let pulled = l.ideal.map(|g| comp.pull(g));
        let fc = comp.truncate(1);
        let pulled0 = l.ideal.fiber().map(|g| fc.pull(g));
        let nu = pulled.order_along(&comp.vars).unwrap_or(u32::MAX);
        let nu0 = pulled0.order_along(&comp.vars).unwrap_or(u32::MAX);
        (nu, nu0)
    }

    /// Order of the proper transform along a component (full level).
    pub fn proper_order_along(&self, chart: usize, comp: &CenterComponent) -> u32 {
        self.local[chart].proper.map(|g| comp.pull(g)).order_along(&comp.vars).unwrap_or(u32::MAX)
    }

    pub fn is_permissible_center(&self, c: &CenterSpec) -> Verdict {
        let mut comps = Vec::new();
        for (id, parts) in &c.parts {
            let Some(ci) = self.chart_index(id) else {
                comps.push(ComponentVerdict {
                    chart: id.clone(),
                    component: 0,
                    nu: 0,
                    nu_fiber: 0,
                    in_sing: false,
                    ok: false,
                    reason: Some("unknown chart".into()),
                });
                continue;
            };
            let chart = &self.pair.charts[ci];
            for (k, comp) in parts.iter().enumerate() {
                if let Err(e) = geometry::validate_component(chart, comp) {
                    comps.push(ComponentVerdict {
                        chart: id.clone(),
                        component: k,
                        nu: 0,
                        nu_fiber: 0,
                        in_sing: false,
                        ok: false,
                        reason: Some(e.to_string()),
                    });
                    continue;
                }
                let (nu, nu0) = self.orders_along(ci, comp);
                let in_sing = nu0 >= self.b;
                let ok = nu == nu0 && in_sing;
                let reason = if !in_sing {
                    Some(format!("center is not inside Sing (fiber order {nu0} < {})", self.b))
                } else if nu != nu0 {
                    Some(format!("order along the center is {nu} but {nu0} on the fiber"))
                } else {
                    None
                };
                comps.push(ComponentVerdict { chart: id.clone(), component: k, nu, nu_fiber: nu0, in_sing, ok, reason });
            }
        }
        Verdict { ok: comps.iter().all(|c| c.ok), components: comps }
    }

    /// The transform along a permissible center.
    pub fn transform(&self, c: &CenterSpec) -> Result<(BasicObject, BlowupRecord)> {
        let v = self.is_permissible_center(c);
        if let Some(f) = v.first_failure() {
            return Err(CoreError::PermissibilityError(format!(
                "chart {} component {}: {}",
                f.chart,
                f.component,
                f.reason.clone().unwrap_or_default()
            )));
        }
        self.transform_unchecked(c)
    }

    /// The transform without the permissibility check; division failures still surface.
    pub fn transform_unchecked(&self, c: &CenterSpec) -> Result<(BasicObject, BlowupRecord)> {
        let (pair, rec) = geometry::blowup(&self.pair, c, self.step)?;
        let mut local = Vec::with_capacity(pair.charts.len());
        for (pi, chart) in self.pair.charts.iter().enumerate() {
            if c.components(&chart.id).is_empty() {
                local.push(self.local[pi].clone());
            }
            for blow in rec.children.iter().filter(|b| b.source == pi) {
                local.push(self.child_local(pi, blow)?);
            }
        }
        Ok((BasicObject { m: self.m, b: self.b, step: self.step + 1, pair, local }, rec))
    }

    fn child_local(&self, pi: usize, blow: &geometry::ChartBlowup) -> Result<Local> {
        let l = &self.local[pi];
        let parent = &self.pair.charts[pi];
        let j = blow.exceptional;
        let nu = l.ideal.map(|g| blow.center.pull(g)).order_along(&blow.center.vars).unwrap_or(u32::MAX);
        let pulled = blow.pull_ideal(&l.ideal);
        let controlled = pulled
            .div_var_power(j, self.b)
            .map_err(|_| CoreError::InvariantBreach(format!("controlled transform not divisible in chart {}", blow.chart.id)))?
            .pruned();
        let pp = blow.pull_ideal(&l.proper);
        let k = pp.var_adic_order(j).unwrap_or(0);
        let proper = pp.div_var_power(j, k)?.pruned();
        let through: Vec<usize> = parent.e.iter().filter(|(_, v)| blow.center.vars.contains(v)).map(|&(lab, _)| lab).collect();
        let mut hist = BTreeMap::new();
        let mut total = BTreeMap::new();
        let mut created_nu = BTreeMap::new();
        for &(lab, _) in &blow.chart.e {
            if lab == blow.label {
                continue;
            }
            if let Some(&a) = l.hist.get(&lab) {
                hist.insert(lab, a);
            }
            if let Some(&c) = l.total.get(&lab) {
                total.insert(lab, c);
            }
            if let Some(&n) = l.created_nu.get(&lab) {
                created_nu.insert(lab, n);
            }
        }
        let a_new = controlled.var_adic_order(j).unwrap_or(0);
        hist.insert(blow.label, a_new);
        created_nu.insert(blow.label, nu);
        let c_new: u32 = through.iter().map(|lab| l.total.get(lab).copied().unwrap_or(0)).sum::<u32>() + self.b;
        total.insert(blow.label, c_new);
        Ok(Local { ideal: controlled, proper, hist, created_nu, total })
    }

    /// The maximal `a` with the total transform of the ideal inside `(x_j^a)` in the child chart.
    pub fn proper_transform_exponent(&self, chart: &str, comp: &CenterComponent, child_var: usize) -> Result<u32> {
        let ci = self.chart_index(chart).ok_or_else(|| CoreError::BadInput(format!("unknown chart {chart}")))?;
        let blows = geometry::blowup_component(&self.pair.charts[ci], comp, self.pair.next_label, self.step)?;
        let b = blows
            .iter()
            .find(|b| b.exceptional == child_var)
            .ok_or_else(|| CoreError::BadInput("the exceptional variable is not a center coordinate".into()))?;
        Ok(b.pull_ideal(&self.local[ci].ideal).var_adic_order(child_var).unwrap_or(0))
    }

    /// Checks `I_r = prod x_H^{a_H} * proper` at the full level in every chart.
    pub fn factorization_holds(&self) -> bool {
        self.charts().all(|(c, l)| {
            let mut rebuilt = l.proper.clone();
            for (&lab, &a) in &l.hist {
                if let Some(v) = c.var_of(lab) {
                    let x = Poly::var(v, c.nvars(), self.m).pow(a);
                    rebuilt = rebuilt.map(|g| g.mul(&x));
                }
            }
            rebuilt.equals(&l.ideal, crate::ideal::Level::Full)
        })
    }

    /// Rewrites one chart in new coordinates.
    pub fn apply_change(&mut self, ci: usize, change: &CoordChange) -> Result<()> {
        self.pair.charts[ci] = self.pair.charts[ci].apply_coordinate_change(change)?;
        let l = &mut self.local[ci];
        l.ideal = l.ideal.map(|g| change.forward(g));
        l.proper = l.proper.map(|g| change.forward(g));
        Ok(())
    }

    /// Replaces a chart by copies `id{k}`, copy `k` having every locus but the `k`-th removed.
    pub fn split_chart(&mut self, ci: usize, loci: &[Ideal]) {
        if loci.len() < 2 {
            return;
        }
        let chart = self.pair.charts.remove(ci);
        let local = self.local.remove(ci);
        for k in (0..loci.len()).rev() {
            let mut copy = chart.clone();
            copy.id = format!("{}{{{k}}}", chart.id);
            for (j, other) in loci.iter().enumerate() {
                if j != k {
                    copy = copy.remove(other);
                }
            }
            self.pair.charts.insert(ci, copy);
            self.local.insert(ci, local.clone());
        }
    }

    pub fn display(&self) -> String {
        let mut s = String::new();
        for (c, l) in self.charts() {
            let r = c.ring(self.m);
            s.push_str(&format!("[{}] ({}, {})", c.id, l.ideal.display(&r), self.b));
            if !c.e.is_empty() {
                let e: Vec<String> = c.e.iter().map(|&(lab, v)| format!("H{lab}:{}", c.vars[v])).collect();
                s.push_str(&format!(" E = {}", e.join(" ")));
            }
            s.push('\n');
        }
        s
    }
}

/// Verdict pairs for one candidate sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeLine {
    pub verdicts: Vec<(bool, bool)>,
    pub fiber_verdicts: Vec<(bool, bool)>,
}

impl ProbeLine {
    pub fn agree(&self) -> bool {
        self.verdicts.iter().all(|(a, b)| a == b)
    }

    pub fn fibers_agree(&self) -> bool {
        self.fiber_verdicts.iter().all(|(a, b)| a == b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub lines: Vec<ProbeLine>,
}

impl ProbeReport {
    pub fn pre_equivalent(&self) -> bool {
        self.lines.iter().all(|l| l.agree())
    }

    pub fn fibers_agree(&self) -> bool {
        self.lines.iter().all(|l| l.fibers_agree())
    }
}

/// Compares permissibility verdicts of two objects along the given center sequences.
/// A sequence is followed while both objects accept its centers.
pub fn pre_equivalence_probe(a: &BasicObject, b: &BasicObject, sequences: &[Vec<CenterSpec>]) -> Result<ProbeReport> {
    let mut lines = Vec::new();
    for seq in sequences {
        let (mut x, mut y) = (a.clone(), b.clone());
        let mut verdicts = Vec::new();
        let mut fiber_verdicts = Vec::new();
        for c in seq {
            let va = x.is_permissible_center(c).ok;
            let vb = y.is_permissible_center(c).ok;
            let c0 = c.truncate(1);
            fiber_verdicts.push((x.fiber().is_permissible_center(&c0).ok, y.fiber().is_permissible_center(&c0).ok));
            verdicts.push((va, vb));
            if !(va && vb) {
                break;
            }
            x = x.transform(c)?.0;
            y = y.transform(c)?.0;
        }
        lines.push(ProbeLine { verdicts, fiber_verdicts });
    }
    Ok(ProbeReport { lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CoordChange;
    use crate::ideal::Level;
    use crate::scalar::ArtinScalar;

    fn object(vars: &[&str], m: usize, gens: &[&str], b: u32) -> BasicObject {
        let r = Ring::new(vars, m);
        BasicObject::new(vars, m, gens.iter().map(|g| r.parse(g).unwrap()).collect(), b, &[]).unwrap()
    }

    fn origin(n: usize) -> CenterSpec {
        CenterSpec::single("W", CenterComponent::coordinate((0..n).collect()))
    }

    #[test]
    fn origin_is_not_permissible_for_a_linear_perturbation() {
        let b = object(&["x", "y"], 2, &["eps*x + y^2 + x^3"], 2);
        let v = b.is_permissible_center(&origin(2));
        assert!(!v.ok);
        assert_eq!((v.components[0].nu, v.components[0].nu_fiber), (1, 2));
    }

    #[test]
    fn cusp_like_object_resolves_in_one_step() {
        let b = object(&["x", "y"], 2, &["y^2", "x^3"], 2);
        let v = b.is_permissible_center(&origin(2));
        assert!(v.ok);
        let (b1, _) = b.transform(&origin(2)).unwrap();
        let r = Ring::new(&["x", "y"], 2);
        let cx = b1.chart_index("W.x").unwrap();
        let want = Ideal::new(2, 2, vec![r.parse("y^2").unwrap(), r.parse("x").unwrap()]);
        assert!(b1.local[cx].ideal.equals(&want, Level::Full));
        assert!(b1.sing_is_empty());
        assert!(b1.factorization_holds());
        assert_eq!(b.proper_transform_exponent("W", &CenterComponent::coordinate(vec![0, 1]), 0).unwrap(), 2);
    }

    #[test]
    fn shifted_centers_of_a_nilpotent_family_fail() {
        let b = object(&["x"], 2, &["x^2", "eps*x"], 2);
        let r = Ring::new(&["x"], 2);
        for lambda in [-2i64, 0, 3] {
            let ch = CoordChange::new(0, ArtinScalar::one(2), r.parse(&format!("{lambda}*eps")).unwrap()).unwrap();
            let c = CenterSpec::single("W", CenterComponent { changes: vec![ch], vars: vec![0] });
            let v = b.is_permissible_center(&c);
            assert!(!v.ok);
            assert_eq!((v.components[0].nu, v.components[0].nu_fiber), (1, 2));
        }
    }

    #[test]
    fn fiber_commutes_with_transform() {
        let b = object(&["x", "y"], 2, &["y^2 + eps*x^2", "x^3"], 2);
        let c = origin(2);
        let (t, _) = b.transform(&c).unwrap();
        let (t0, _) = b.fiber().transform(&c.truncate(1)).unwrap();
        for ((_, l), (_, l0)) in t.fiber().charts().zip(t0.charts()) {
            assert!(l.ideal.equals(&l0.ideal, Level::Fiber));
        }
    }
}
