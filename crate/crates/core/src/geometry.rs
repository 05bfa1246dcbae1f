//! Charts of the ambient space, coordinate changes, coordinate centers and blow-ups.
//!
//! A chart is quasi-affine: an affine space with named coordinates, minus the zero set
//! of an optional fiber ideal (`removed`). Divisors of `E` are always chart coordinates.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::ideal::Ideal;
use crate::locus::{self, Pivot};
use crate::poly::{Poly, Ring};
use crate::scalar::ArtinScalar;

/// Brings `p` to truncation order `m`.
pub fn fit(p: &Poly, m: usize) -> Poly {
    if p.m() >= m {
        p.truncate(m)
    } else {
        p.extend(m)
    }
}

fn fit_scalar(c: &ArtinScalar, m: usize) -> ArtinScalar {
    if c.m() >= m {
        c.truncate(m)
    } else {
        c.extend(m)
    }
}

/// The new coordinate `x_var' = unit * x_var + shift`, with `shift` free of `x_var`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordChange {
    pub var: usize,
    pub unit: ArtinScalar,
    pub shift: Poly,
}

impl CoordChange {
    pub fn new(var: usize, unit: ArtinScalar, shift: Poly) -> Result<Self> {
        if var >= shift.nvars() {
            return Err(CoreError::NotACoordinateChange(format!("variable index {var} out of range")));
        }
        if !unit.is_unit() {
            return Err(CoreError::NotACoordinateChange("linear coefficient is not a unit".into()));
        }
        if shift.involves(var) {
            return Err(CoreError::NotACoordinateChange("shift involves the replaced variable".into()));
        }
        Ok(CoordChange { var, unit, shift })
    }

    pub fn from_pivot(p: &Pivot) -> Self {
        CoordChange { var: p.var, unit: p.unit.clone(), shift: p.shift.clone() }
    }

    /// The change under which resident polynomials get `x_var` replaced by `image`.
    pub fn from_image(var: usize, image: &Poly) -> Result<Self> {
        let p = Pivot::of(image, &|u| u == var)
            .ok_or_else(|| CoreError::NotACoordinateChange("image is not a unit multiple of the variable plus a shift".into()))?;
        let inv = p.unit.inverse()?;
        CoordChange::new(var, inv.clone(), p.shift.scale(&inv).neg())
    }

    pub fn identity(var: usize, nvars: usize, m: usize) -> Self {
        CoordChange { var, unit: ArtinScalar::one(m), shift: Poly::zero(nvars, m) }
    }

    pub fn is_identity(&self) -> bool {
        self.unit.is_one() && self.shift.is_zero()
    }

    /// The polynomial `unit * x_var + shift` in the old coordinates.
    pub fn equation(&self) -> Poly {
        Pivot { var: self.var, unit: self.unit.clone(), shift: self.shift.clone() }.poly()
    }

    pub fn inverse(&self) -> CoordChange {
        let inv = self.unit.inverse().expect("coordinate change with a unit coefficient");
        CoordChange { var: self.var, unit: inv.clone(), shift: self.shift.scale(&inv).neg() }
    }

    /// Rewrites a polynomial from old to new coordinates.
    pub fn forward(&self, p: &Poly) -> Poly {
        let m = p.m();
        let n = p.nvars();
        let inv = fit_scalar(&self.unit.inverse().expect("unit"), m);
        let image = Poly::var(self.var, n, m).sub(&fit(&self.shift, m)).scale(&inv);
        p.substitute(self.var, &image)
    }

    /// Rewrites a polynomial from new to old coordinates.
    pub fn backward(&self, p: &Poly) -> Poly {
        let m = p.m();
        let n = p.nvars();
        let image = Poly::var(self.var, n, m).scale(&fit_scalar(&self.unit, m)).add(&fit(&self.shift, m));
        p.substitute(self.var, &image)
    }

    pub fn truncate(&self, m: usize) -> CoordChange {
        CoordChange { var: self.var, unit: fit_scalar(&self.unit, m), shift: fit(&self.shift, m) }
    }
}

pub fn forward_all(changes: &[CoordChange], p: &Poly) -> Poly {
    changes.iter().fold(p.clone(), |acc, c| c.forward(&acc))
}

pub fn backward_all(changes: &[CoordChange], p: &Poly) -> Poly {
    changes.iter().rev().fold(p.clone(), |acc, c| c.backward(&acc))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub id: String,
    pub vars: Vec<String>,
    pub log: Vec<CoordChange>,
    pub parent: Option<(String, usize)>,
    /// Present members of `E` as `(label, coordinate index)`.
    pub e: Vec<(usize, usize)>,
    /// Fiber ideal of the closed set cut away from the affine space.
    pub removed: Option<Ideal>,
}

impl Chart {
    pub fn root<S: AsRef<str>>(id: &str, vars: &[S]) -> Chart {
        Chart {
            id: id.to_string(),
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            log: Vec::new(),
            parent: None,
            e: Vec::new(),
            removed: None,
        }
    }

    /// A root chart whose divisors are given by equations; each is normalized to a coordinate.
    /// Returns the chart and the changes that were applied, in order.
    pub fn with_divisors<S: AsRef<str>>(id: &str, vars: &[S], eqs: &[Poly]) -> Result<(Chart, Vec<CoordChange>)> {
        let mut chart = Chart::root(id, vars);
        let mut changes = Vec::new();
        for (label, eq) in eqs.iter().enumerate() {
            let cur = forward_all(&changes, eq);
            if let Some(&(other, _)) = chart.e.iter().find(|(_, v)| {
                cur.num_terms() == 1 && cur.leading().is_some_and(|(mono, _)| *mono == crate::poly::Mono::var(*v, cur.nvars()))
            }) {
                return Err(CoreError::BadInput(format!("duplicate hypersurface: members {other} and {label} coincide")));
            }
            let used: Vec<usize> = chart.e.iter().map(|&(_, v)| v).collect();
            let pivot = Pivot::of(&cur, &|v| !used.contains(&v)).ok_or_else(|| {
                CoreError::BadInput(format!("member {label} of E cannot be normalized to a coordinate transversal to the others"))
            })?;
            let change = CoordChange::from_pivot(&pivot);
            chart.e.push((label, pivot.var));
            if !change.is_identity() {
                chart.log.push(change.clone());
                changes.push(change);
            }
        }
        Ok((chart, changes))
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn ring(&self, m: usize) -> Ring {
        Ring::new(&self.vars, m)
    }

    pub fn var_of(&self, label: usize) -> Option<usize> {
        self.e.iter().find(|&&(l, _)| l == label).map(|&(_, v)| v)
    }

    pub fn label_on(&self, var: usize) -> Option<usize> {
        self.e.iter().find(|&&(_, v)| v == var).map(|&(l, _)| l)
    }

    pub fn e_vars(&self) -> Vec<usize> {
        self.e.iter().map(|&(_, v)| v).collect()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.e.iter().map(|&(l, _)| l).collect()
    }

    /// Whether the zero set of `j` meets this chart.
    pub fn meets(&self, j: &Ideal) -> bool {
        locus::nonempty_on(&j.fiber(), self.removed.as_ref())
    }

    /// Records a coordinate change; divisors of `E` must stay coordinates.
    pub fn apply_coordinate_change(&self, change: &CoordChange) -> Result<Chart> {
        if change.var >= self.nvars() || change.shift.nvars() != self.nvars() {
            return Err(CoreError::NotACoordinateChange("variable count mismatch".into()));
        }
        CoordChange::new(change.var, change.unit.clone(), change.shift.clone())?;
        if change.is_identity() {
            return Ok(self.clone());
        }
        if self.label_on(change.var).is_some() {
            return Err(CoreError::NotACoordinateChange(format!(
                "`{}` carries a divisor of E and cannot be moved",
                self.vars[change.var]
            )));
        }
        let mut out = self.clone();
        out.log.push(change.clone());
        out.removed = self.removed.as_ref().map(|r| r.map(|g| change.forward(g).fiber()));
        Ok(out)
    }

    /// The removed locus enlarged by the zero set of `extra`.
    pub fn remove(&self, extra: &Ideal) -> Chart {
        let extra = extra.fiber();
        let mut out = self.clone();
        out.removed = Some(match &self.removed {
            None => extra,
            Some(r) => r.product(&extra).pruned(),
        });
        out
    }
}

/// One connected piece of a center: after `changes`, the center is `V(vars)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterComponent {
    pub changes: Vec<CoordChange>,
    pub vars: Vec<usize>,
}

impl CenterComponent {
    pub fn coordinate(mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        CenterComponent { changes: Vec::new(), vars }
    }

    pub fn codim(&self) -> usize {
        self.vars.len()
    }

    /// Chart coordinates to center coordinates.
    pub fn pull(&self, p: &Poly) -> Poly {
        forward_all(&self.changes, p)
    }

    /// Center coordinates to chart coordinates.
    pub fn push(&self, p: &Poly) -> Poly {
        backward_all(&self.changes, p)
    }

    /// The ideal of the component in chart coordinates.
    pub fn ideal(&self, nvars: usize, m: usize) -> Ideal {
        Ideal::new(nvars, m, self.vars.iter().map(|&v| self.push(&Poly::var(v, nvars, m))).collect())
    }

    pub fn truncate(&self, m: usize) -> CenterComponent {
        CenterComponent { changes: self.changes.iter().map(|c| c.truncate(m)).collect(), vars: self.vars.clone() }
    }

    pub fn display(&self, ring: &Ring) -> String {
        let n = ring.nvars();
        let gens: Vec<String> = self.vars.iter().map(|&v| ring.fmt(&self.push(&Poly::var(v, n, ring.m)).normalized())).collect();
        format!("V({})", gens.join(","))
    }
}

/// A center given chart by chart; charts without an entry do not meet it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CenterSpec {
    pub parts: BTreeMap<String, Vec<CenterComponent>>,
}

impl CenterSpec {
    pub fn single(chart: &str, comp: CenterComponent) -> Self {
        let mut parts = BTreeMap::new();
        parts.insert(chart.to_string(), vec![comp]);
        CenterSpec { parts }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.values().all(|v| v.is_empty())
    }

    pub fn components(&self, chart: &str) -> &[CenterComponent] {
        self.parts.get(chart).map_or(&[], |v| v.as_slice())
    }

    pub fn max_codim(&self) -> usize {
        self.parts.values().flatten().map(|c| c.codim()).max().unwrap_or(0)
    }

    pub fn truncate(&self, m: usize) -> CenterSpec {
        CenterSpec {
            parts: self.parts.iter().map(|(k, v)| (k.clone(), v.iter().map(|c| c.truncate(m)).collect())).collect(),
        }
    }
}

/// A smooth ambient space with an ordered normal-crossings divisor `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct SPair {
    pub charts: Vec<Chart>,
    /// Labels of `E`, in order.
    pub labels: Vec<usize>,
    pub next_label: usize,
}

impl SPair {
    pub fn affine<S: AsRef<str>>(vars: &[S]) -> SPair {
        SPair { charts: vec![Chart::root("W", vars)], labels: Vec::new(), next_label: 0 }
    }

    pub fn chart(&self, id: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.id == id)
    }

    pub fn nvars(&self) -> usize {
        self.charts.first().map_or(0, |c| c.nvars())
    }
}

/// Normal-crossings and coordinate-form violations, one line per problem.
pub fn validate_pair(p: &SPair) -> Vec<String> {
    let mut out = Vec::new();
    let n = p.nvars();
    for c in &p.charts {
        if c.nvars() != n {
            out.push(format!("chart {}: {} variables, expected {n}", c.id, c.nvars()));
        }
        for ch in &c.log {
            if !ch.unit.is_unit() || ch.shift.involves(ch.var) {
                out.push(format!("chart {}: logged change of `{}` is not invertible", c.id, c.vars[ch.var]));
            }
        }
        let mut seen_vars = Vec::new();
        let mut seen_labels = Vec::new();
        for &(l, v) in &c.e {
            if v >= c.nvars() {
                out.push(format!("chart {}: member {l} is not a chart coordinate", c.id));
            } else if seen_vars.contains(&v) {
                out.push(format!("chart {}: duplicate hypersurface on `{}`", c.id, c.vars[v]));
            }
            if seen_labels.contains(&l) {
                out.push(format!("chart {}: member {l} listed twice", c.id));
            }
            if !p.labels.contains(&l) {
                out.push(format!("chart {}: member {l} is not in E", c.id));
            }
            seen_vars.push(v);
            seen_labels.push(l);
        }
    }
    out
}

/// Checks that a component can be blown up in `chart`.
pub fn validate_component(chart: &Chart, comp: &CenterComponent) -> Result<()> {
    let n = chart.nvars();
    if comp.vars.is_empty() {
        return Err(CoreError::PermissibilityError("empty list of center coordinates".into()));
    }
    let mut vs = comp.vars.clone();
    vs.sort_unstable();
    vs.dedup();
    if vs.len() != comp.vars.len() || vs.iter().any(|&v| v >= n) {
        return Err(CoreError::PermissibilityError("center coordinates are not distinct chart coordinates".into()));
    }
    for ch in &comp.changes {
        if ch.shift.nvars() != n || ch.var >= n || !ch.unit.is_unit() || ch.shift.involves(ch.var) {
            return Err(CoreError::PermissibilityError("center change is not invertible".into()));
        }
        if chart.label_on(ch.var).is_some() {
            return Err(CoreError::PermissibilityError(format!(
                "normal crossings: the center change moves the divisor on `{}`",
                chart.vars[ch.var]
            )));
        }
    }
    Ok(())
}

/// One child chart of a blow-up with the ring map from its parent.
#[derive(Clone, Debug)]
pub struct ChartBlowup {
    pub chart: Chart,
    pub parent: String,
    /// Index of the parent chart in the pair that was blown up.
    pub source: usize,
    pub center: CenterComponent,
    /// Images of the parent's coordinates (after the center changes), as `m = 1` templates.
    pub images: Vec<Poly>,
    pub exceptional: usize,
    pub label: usize,
}

impl ChartBlowup {
    /// Total transform of a parent polynomial.
    pub fn pull(&self, p: &Poly) -> Poly {
        let m = p.m();
        let images: Vec<Poly> = self.images.iter().map(|q| q.extend(m)).collect();
        self.center.pull(p).compose(&images)
    }

    pub fn pull_ideal(&self, i: &Ideal) -> Ideal {
        i.map(|g| self.pull(g))
    }
}

/// Copies of `chart`, one per component, each with the other components cut away.
pub fn split_chart(chart: &Chart, comps: &[CenterComponent]) -> Vec<(Chart, CenterComponent)> {
    if comps.len() == 1 {
        return vec![(chart.clone(), comps[0].clone())];
    }
    let n = chart.nvars();
    comps
        .iter()
        .enumerate()
        .map(|(k, comp)| {
            let mut copy = chart.clone();
            copy.id = format!("{}[{k}]", chart.id);
            for (j, other) in comps.iter().enumerate() {
                if j != k {
                    copy = copy.remove(&other.ideal(n, 1));
                }
            }
            (copy, comp.clone())
        })
        .collect()
}

/// Blows up `chart` along one component, one child per center coordinate. A
/// codimension-one center yields a single child with the same coordinates.
pub fn blowup_component(chart: &Chart, comp: &CenterComponent, label: usize, step: usize) -> Result<Vec<ChartBlowup>> {
    validate_component(chart, comp)?;
    let n = chart.nvars();
    let mut log = chart.log.clone();
    log.extend(comp.changes.iter().filter(|c| !c.is_identity()).cloned());
    let mut out = Vec::new();
    for &j in &comp.vars {
        let images: Vec<Poly> = (0..n)
            .map(|i| {
                let x = Poly::var(i, n, 1);
                if i != j && comp.vars.contains(&i) {
                    x.mul(&Poly::var(j, n, 1))
                } else {
                    x
                }
            })
            .collect();
        let mut e: Vec<(usize, usize)> = chart.e.iter().copied().filter(|&(_, v)| v != j).collect();
        e.push((label, j));
        let id = format!("{}.{}", chart.id, chart.vars[j]);
        let removed = chart.removed.as_ref().map(|r| {
            let images: Vec<Poly> = images.clone();
            r.map(|g| comp.pull(g).fiber().compose(&images)).pruned()
        });
        let child = Chart { id, vars: chart.vars.clone(), log: log.clone(), parent: Some((chart.id.clone(), step)), e, removed };
        out.push(ChartBlowup { chart: child, parent: chart.id.clone(), source: 0, center: comp.clone(), images, exceptional: j, label });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BlowupRecord {
    pub step: usize,
    pub label: usize,
    pub children: Vec<ChartBlowup>,
    /// Charts the center does not meet, carried over unchanged.
    pub kept: Vec<String>,
}

/// Blow-up of a pair: each chart is split by the components of the center meeting it,
/// and every copy is blown up along its own component. One new label is appended to `E`.
pub fn blowup(p: &SPair, c: &CenterSpec, step: usize) -> Result<(SPair, BlowupRecord)> {
    for id in c.parts.keys() {
        if p.chart(id).is_none() {
            return Err(CoreError::PermissibilityError(format!("center refers to unknown chart {id}")));
        }
    }
    let label = p.next_label;
    let mut charts = Vec::new();
    let mut children = Vec::new();
    let mut kept = Vec::new();
    for (source, chart) in p.charts.iter().enumerate() {
        let comps = c.components(&chart.id);
        if comps.is_empty() {
            charts.push(chart.clone());
            kept.push(chart.id.clone());
            continue;
        }
        for (copy, comp) in split_chart(chart, comps) {
            for mut b in blowup_component(&copy, &comp, label, step)? {
                b.source = source;
                charts.push(b.chart.clone());
                children.push(b);
            }
        }
    }
    let mut labels = p.labels.clone();
    labels.push(label);
    Ok((SPair { charts, labels, next_label: label + 1 }, BlowupRecord { step, label, children, kept }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn change_round_trip() {
        let r = Ring::new(&["x", "y"], 2);
        let ch = CoordChange::new(1, ArtinScalar::from_int(2, 2), r.parse("x^2 + eps*x").unwrap()).unwrap();
        let p = r.parse("y^3 + x*y + eps").unwrap();
        assert_eq!(ch.backward(&ch.forward(&p)), p);
        assert_eq!(ch.inverse().forward(&ch.forward(&p)), p);
        assert!(CoordChange::new(1, ArtinScalar::eps_pow(1, 2), Poly::zero(2, 2)).is_err());
    }

    #[test]
    fn shifting_a_cube() {
        let r = Ring::new(&["x"], 2);
        let lambda = ratio(5, 3);
        let image = r.parse("x").unwrap().sub(&Poly::eps(1, 2).scale_rational(&lambda));
        let ch = CoordChange::from_image(0, &image).unwrap();
        let got = ch.forward(&r.parse("x^3").unwrap());
        let want = r.parse("x^3 - 5*eps*x^2").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn divisor_normalization() {
        let r = Ring::new(&["x", "y"], 1);
        assert!(Chart::with_divisors("W", &r.vars, &[r.parse("x").unwrap()]).is_ok());
        let dup = Chart::with_divisors("W", &r.vars, &[r.parse("x").unwrap(), r.parse("x").unwrap()]);
        assert!(matches!(dup, Err(CoreError::BadInput(msg)) if msg.contains("duplicate")));
        assert!(Chart::with_divisors("W", &r.vars, &[r.parse("x").unwrap(), r.parse("x + y^2").unwrap()]).is_err());
        let (c, ch) = Chart::with_divisors("W", &r.vars, &[r.parse("y + x^2").unwrap()]).unwrap();
        assert_eq!(c.e, vec![(0, 1)]);
        assert_eq!(ch[0].forward(&r.parse("y + x^2").unwrap()), r.parse("y").unwrap());
    }

    #[test]
    fn point_blowup_of_the_plane() {
        let mut p = SPair::affine(&["x", "y"]);
        p.labels.push(0);
        p.next_label = 1;
        p.charts[0].e.push((0, 1));
        let (q, rec) = blowup(&p, &CenterSpec::single("W", CenterComponent::coordinate(vec![0, 1])), 0).unwrap();
        assert_eq!(q.charts.len(), 2);
        assert!(validate_pair(&q).is_empty());
        let cx = q.chart("W.x").unwrap();
        assert_eq!(cx.e, vec![(0, 1), (1, 0)]);
        let cy = q.chart("W.y").unwrap();
        assert_eq!(cy.e, vec![(1, 1)]);
        let r = Ring::new(&["x", "y"], 1);
        let f = rec.children[0].pull(&r.parse("y^2 + x^3").unwrap());
        assert_eq!(f, r.parse("x^2*y^2 + x^3").unwrap());
    }

    #[test]
    fn two_component_split() {
        let p = SPair::affine(&["x", "y"]);
        let r = Ring::new(&["x", "y"], 1);
        let c1 = CenterComponent::coordinate(vec![0]);
        let c2 = CenterComponent { changes: vec![CoordChange::new(0, ArtinScalar::one(1), r.parse("-1").unwrap()).unwrap()], vars: vec![0] };
        let mut spec = CenterSpec::default();
        spec.parts.insert("W".into(), vec![c1, c2]);
        let (q, _) = blowup(&p, &spec, 0).unwrap();
        assert_eq!(q.charts.len(), 2);
        let a = &q.charts[0];
        assert!(!a.meets(&Ideal::new(2, 1, vec![r.parse("x - 1").unwrap()])));
        assert!(a.meets(&Ideal::new(2, 1, vec![r.parse("x").unwrap()])));
    }
}
