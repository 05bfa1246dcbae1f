//! Maximal contact: coefficient and homogenized ideals, adapted hypersurfaces and the
//! inductive object `B_Z`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::basic_object::{BasicObject, Local, Verdict};
use crate::delta::{delta_power, DeltaCache};
use crate::error::{CoreError, Result};
use crate::geometry::{CenterSpec, Chart, SPair};
use crate::groebner::{MonoOrder, QPoly};
use crate::ideal::{to_full_q, Ideal, Level};
use crate::locus::{div_exact, Pivot};
use crate::poly::{Mono, Poly};
use crate::scalar::ArtinScalar;

/// Largest index whose factorial the inductive object may use.
pub const FACTORIAL_GUARD: u32 = 6;

fn factorial(b: u32) -> u32 {
    (1..=b).product()
}

/// `sum_{i<b} Delta^i(I)^{b!/(b-i)}`.
pub fn coefficient_ideal(i: &Ideal, b: u32) -> Result<Ideal> {
    coefficient_ideal_with(i, b, |x| x.clone())
}

/// The coefficient ideal restricted to `x_v = 0`, in the ring without `x_v`.
/// Each derivative ideal is restricted before it is raised to its power.
pub fn restricted_coefficient_ideal(i: &Ideal, b: u32, v: usize) -> Result<Ideal> {
    coefficient_ideal_with(i, b, |x| x.map(|g| g.restrict_drop(v)).pruned())
}

fn coefficient_ideal_with(i: &Ideal, b: u32, restrict: impl Fn(&Ideal) -> Ideal) -> Result<Ideal> {
    if b == 0 {
        return Err(CoreError::BadInput("index must be positive".into()));
    }
    if b > FACTORIAL_GUARD {
        return Err(CoreError::GuardExceeded(format!("coefficient ideal of index {b}")));
    }
    let f = factorial(b);
    let mut cache = DeltaCache::new(i.clone());
    let mut parts = Vec::new();
    for k in 0..b {
        let d = restrict(cache.get(k as usize));
        parts.push(d.power(f / (b - k)));
    }
    let first = &parts[0];
    Ok(Ideal::sum_all(first.nvars(), first.m(), parts.iter()).pruned())
}

/// `I + sum_{1<=i<b} Delta^i(I) * T^i` with `T = Delta^{b-1}(I)`.
pub fn homogenized_ideal(i: &Ideal, b: u32) -> Ideal {
    if b <= 1 {
        return i.clone();
    }
    let mut cache = DeltaCache::new(i.clone());
    let t = cache.get(b as usize - 1).clone();
    let mut acc = i.clone();
    let mut tp = Ideal::unit(i.nvars(), i.m());
    for k in 1..b {
        tp = tp.product(&t).pruned();
        acc = acc.sum(&cache.get(k as usize).product(&tp)).pruned();
    }
    acc
}

/// A smooth hypersurface `V(unit * x_v + shift)` inside `V(Delta^{b-1}(I))`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedHypersurface {
    pub pivot: Pivot,
    /// Membership in the top derivative ideal.
    pub a1: bool,
    /// Transversality to the divisors.
    pub a2: bool,
    /// No common component with the zero set of the top derivative ideal.
    pub a3: bool,
}

impl AdaptedHypersurface {
    pub fn inductive(&self) -> bool {
        self.a1 && self.a2 && self.a3
    }

    pub fn equation(&self) -> Poly {
        self.pivot.poly()
    }
}

/// All readings of `p` as `c * x_v + h` with `c` a unit scalar and `h` free of `x_v`.
pub fn pivots_of(p: &Poly) -> Vec<Pivot> {
    (0..p.nvars()).filter_map(|v| Pivot::of(p, &|u| u == v)).collect()
}

/// Which pivots may serve as a hypersurface in this chart: a divisor coordinate or a
/// protected coordinate may only be used as itself.
pub fn pivot_allowed(chart: &Chart, protected: &[usize], p: &Pivot) -> bool {
    let fixed = chart.label_on(p.var).is_some() || protected.contains(&p.var);
    !fixed || p.shift.is_zero()
}

/// Fiber candidates for an adapted hypersurface, from the reduced Groebner basis of the
/// top derivative ideal and pairwise sums of its elements.
pub fn hypersurface_candidates(top0: &Ideal, ok: &dyn Fn(&Pivot) -> bool) -> Vec<Pivot> {
    let gb = top0.fiber_gb_polys();
    let mut polys: Vec<Poly> = gb.clone();
    for i in 0..gb.len() {
        for j in 0..gb.len() {
            if i != j {
                polys.push(gb[i].add(&gb[j]));
            }
        }
    }
    let mut out: Vec<Pivot> = Vec::new();
    for p in polys {
        for pv in pivots_of(&p) {
            if ok(&pv) && !out.iter().any(|q| q.var == pv.var && q.poly().monic() == pv.poly().monic()) {
                out.push(pv);
            }
        }
    }
    out
}

fn a3_holds(top0: &Ideal, z0: &Poly) -> bool {
    top0.gens().iter().any(|g| div_exact(&g.fiber(), z0).is_none())
}

/// Adapted hypersurfaces of `(I, b)` on a chart, evaluated on the fiber.
pub fn find_adapted_hypersurfaces(i: &Ideal, b: u32, chart: &Chart, protected: &[usize]) -> Vec<AdaptedHypersurface> {
    let top0 = delta_power(&i.fiber(), b.saturating_sub(1));
    if top0.is_unit() {
        return Vec::new();
    }
    let ok = |p: &Pivot| pivot_allowed(chart, protected, p);
    hypersurface_candidates(&top0, &ok)
        .into_iter()
        .map(|pivot| {
            let z0 = pivot.poly();
            let a1 = top0.contains(&z0, Level::Fiber);
            let a2 = pivot_allowed(chart, protected, &pivot) && chart.label_on(pivot.var).is_none();
            let a3 = a3_holds(&top0, &z0);
            AdaptedHypersurface { pivot, a1, a2, a3 }
        })
        .collect()
}

/// The first inductive hypersurface, if any.
pub fn find_adapted_hypersurface(i: &Ideal, b: u32, chart: &Chart, protected: &[usize]) -> Option<AdaptedHypersurface> {
    find_adapted_hypersurfaces(i, b, chart, protected).into_iter().find(|h| h.a1 && h.a3)
}

fn monomials_upto(nvars: usize, skip: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; nvars]];
    for _ in 0..deg {
        let mut next = Vec::new();
        for e in &out {
            for v in 0..nvars {
                if v == skip {
                    continue;
                }
                let mut f = e.clone();
                f[v] += 1;
                next.push(f);
            }
        }
        next.sort();
        next.dedup();
        for e in next {
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    out
}

fn qvec(q: &QPoly) -> BTreeMap<Vec<u32>, BigRational> {
    q.terms.iter().cloned().collect()
}

/// Solves `sum_j u_j * cols[j] = rhs` exactly.
fn solve(cols: &[BTreeMap<Vec<u32>, BigRational>], rhs: &BTreeMap<Vec<u32>, BigRational>) -> Option<Vec<BigRational>> {
    let mut rows: Vec<Vec<u32>> = cols.iter().flat_map(|c| c.keys().cloned()).chain(rhs.keys().cloned()).collect();
    rows.sort();
    rows.dedup();
    let nc = cols.len();
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c.get(r).cloned().unwrap_or_else(BigRational::zero)).collect();
            row.push(rhs.get(r).cloned().unwrap_or_else(BigRational::zero));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nc {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(pr.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[nc].is_zero()) {
        return None;
    }
    let mut u = vec![BigRational::zero(); nc];
    for (i, &c) in pivots.iter().enumerate() {
        u[c] = a[i][nc].clone();
    }
    Some(u)
}

/// Lifts a fiber hypersurface `c0 * x_v + h0` to an element `c * x_v + h` of the
/// `A`-level ideal `top`, with `c` a unit scalar and `h` free of `x_v`. The correction
/// terms are searched among monomials of bounded degree by exact linear algebra.
pub fn lift_pivot(top: &Ideal, fiber: &Pivot, shift_free: bool) -> Option<Pivot> {
    let n = top.nvars();
    let m = top.m();
    let v = fiber.var;
    let base = Pivot { var: v, unit: fiber.unit.truncate(1).extend(m), shift: fiber.shift.fiber().extend(m) };
    if m == 1 {
        return top.contains(&base.poly(), Level::Full).then_some(base);
    }
    let builder = top.full_builder();
    let ord = MonoOrder::Grevlex;
    let nf = |p: &Poly| qvec(&builder.reduce(&to_full_q(p, ord)));
    let deg = top.gens().iter().filter_map(|g| g.total_degree()).max().unwrap_or(1).max(fiber.shift.total_degree().unwrap_or(0));
    let monos = if shift_free { vec![] } else { monomials_upto(n, v, deg) };
    let mut basis: Vec<Poly> = Vec::new();
    for k in 1..m {
        let ek = ArtinScalar::eps_pow(k, m);
        basis.push(Poly::monomial(Mono::var(v, n), ek.clone()));
        for e in &monos {
            basis.push(Poly::monomial(Mono(e.clone()), ek.clone()));
        }
    }
    let cols: Vec<BTreeMap<Vec<u32>, BigRational>> = basis.iter().map(|b| nf(b)).collect();
    let mut rhs = nf(&base.poly());
    for x in rhs.values_mut() {
        *x = -x.clone();
    }
    let u = solve(&cols, &rhs)?;
    let mut g = base.poly();
    for (c, b) in u.iter().zip(basis.iter()) {
        if !c.is_zero() {
            g = g.add(&b.scale_rational(c));
        }
    }
    let p = Pivot::of(&g, &|w| w == v)?;
    debug_assert!(top.contains(&g, Level::Full));
    Some(p)
}

/// The chart of `Z = V(x_v)` inside `chart`, keeping the divisors listed in `keep`.
pub fn restrict_chart(chart: &Chart, v: usize, keep: &[usize]) -> Chart {
    let mut vars = chart.vars.clone();
    vars.remove(v);
    let e = chart
        .e
        .iter()
        .filter(|&&(l, w)| w != v && keep.contains(&l))
        .map(|&(l, w)| (l, if w > v { w - 1 } else { w }))
        .collect();
    let removed = chart.removed.as_ref().map(|r| r.map(|g| g.restrict_drop(v)).pruned());
    Chart { id: chart.id.clone(), vars, log: Vec::new(), parent: None, e, removed }
}

/// `B_Z`: the coefficient ideal (of the homogenized ideal when asked) restricted to
/// `Z = V(x_v)`, with index `b!` and the divisors in `keep`.
pub fn inductive_object(
    chart: &Chart,
    ideal: &Ideal,
    b: u32,
    v: usize,
    keep: &[usize],
    next_label: usize,
    homogenize: bool,
) -> Result<BasicObject> {
    let source = if homogenize { homogenized_ideal(ideal, b) } else { ideal.clone() };
    let restricted = restricted_coefficient_ideal(&source, b, v)?;
    if restricted.fiber_is_zero() {
        return Err(CoreError::A3Breach(format!("chart {}: the restricted coefficient ideal is zero", chart.id)));
    }
    let sub = restrict_chart(chart, v, keep);
    let labels: Vec<usize> = sub.e.iter().map(|&(l, _)| l).collect();
    let local = Local {
        proper: restricted.clone(),
        ideal: restricted,
        hist: BTreeMap::new(),
        created_nu: BTreeMap::new(),
        total: BTreeMap::new(),
    };
    Ok(BasicObject { m: ideal.m(), b: factorial(b), step: 0, pair: SPair { charts: vec![sub], labels, next_label }, local: vec![local] })
}

/// Verdicts of a center for `B_Z` and for `B`.
#[derive(Clone, Debug)]
pub struct StrongVerdict {
    pub ok: bool,
    pub for_b: Verdict,
    pub for_bz: Verdict,
}

/// Permissible for both `B_Z` (with the center as seen inside `Z`) and `B`.
pub fn is_strongly_permissible(b: &BasicObject, bz: &BasicObject, c: &CenterSpec, cz: &CenterSpec) -> StrongVerdict {
    let for_b = b.is_permissible_center(c);
    let for_bz = bz.is_permissible_center(cz);
    StrongVerdict { ok: for_b.ok && for_bz.ok, for_b, for_bz }
}

/// After a blow-up along a center inside `Z = V(x_z)`, the strict transform of `Z` is again
/// `V(x_z)` away from the `z`-chart and must lie in the top derivative ideal.
pub fn giraud_holds(child_ideal: &Ideal, b: u32, z: usize) -> bool {
    let top = delta_power(child_ideal, b.saturating_sub(1));
    top.contains(&Poly::var(z, child_ideal.nvars(), child_ideal.m()), Level::Full)
}

/// The inclusions `Delta^{b-i}(I) O_{W1} ⊆ I(H)^i` and
/// `I(H)^{-i} Delta^{b-i}(I) O_{W1} ⊆ Delta^{b-i}(I_1)` for one chart of a blow-up.
pub fn pullback_inclusions_hold(parent: &Ideal, b: u32, blow: &crate::geometry::ChartBlowup, child: &Ideal) -> bool {
    let j = blow.exceptional;
    let mut ok = true;
    let mut parent_cache = DeltaCache::new(parent.clone());
    let mut child_cache = DeltaCache::new(child.clone());
    for i in 1..=b {
        let d = blow.pull_ideal(parent_cache.get((b - i) as usize));
        match d.div_var_power(j, i) {
            Ok(q) => ok &= child_cache.get((b - i) as usize).contains_ideal(&q, Level::Full),
            Err(_) => return false,
        }
    }
    ok
}

/// Whether `I` has exactly order `b` along every component of `c`.
pub fn is_good_along(b: &BasicObject, c: &CenterSpec) -> bool {
    b.is_permissible_center(c).components.iter().all(|v| v.nu == b.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
        Ideal::new(r.nvars(), r.m, gens.iter().map(|g| r.parse(g).unwrap()).collect())
    }

    #[test]
    fn homogenized_cusp() {
        let r = Ring::new(&["x", "y"], 2);
        let h = homogenized_ideal(&ideal(&r, &["y^2", "x^3"]), 2);
        assert!(h.equals(&ideal(&r, &["y^2", "x^2*y", "x^3"]), Level::Full));
        let rz = Ring::new(&["x"], 2);
        let c = restricted_coefficient_ideal(&h, 2, 1).unwrap();
        assert!(c.equals(&ideal(&rz, &["x^3"]), Level::Full));
    }

    #[test]
    fn restricted_coefficient_ideals() {
        let r = Ring::new(&["x", "z"], 2);
        let rx = Ring::new(&["x"], 2);
        let c = restricted_coefficient_ideal(&ideal(&r, &["z^2 + eps*x^2", "z^3 + x^3"]), 2, 1).unwrap();
        assert!(c.equals(&ideal(&rx, &["eps*x^2", "x^3"]), Level::Full));
        let c = restricted_coefficient_ideal(&ideal(&r, &["x^5 + eps*x^2*z + z^4"]), 4, 1).unwrap();
        assert!(c.equals(&ideal(&rx, &["x^30"]), Level::Full));
        let i = ideal(&r, &["z^2 + x^3"]);
        assert!(coefficient_ideal(&i, 1).unwrap().equals(&i, Level::Full));
    }

    #[test]
    fn hypersurface_search() {
        let r = Ring::new(&["x", "y"], 1);
        let chart = Chart::root("W", &r.vars);
        let h = find_adapted_hypersurface(&ideal(&r, &["y^2", "x^3"]), 2, &chart, &[]).unwrap();
        assert_eq!(h.pivot.var, 1);
        assert!(h.inductive());
        let line = find_adapted_hypersurfaces(&ideal(&r, &["y"]), 1, &chart, &[]);
        let z = line.iter().find(|h| h.pivot.var == 1 && h.pivot.shift.is_zero()).unwrap();
        assert!(z.a1 && z.a2 && !z.a3);
    }

    #[test]
    fn lifting_a_hypersurface() {
        let r = Ring::new(&["x", "y"], 2);
        let top = ideal(&r, &["y + eps*x", "x^2"]);
        let fib = Pivot { var: 1, unit: ArtinScalar::one(1), shift: Poly::zero(2, 1) };
        let p = lift_pivot(&top, &fib, false).unwrap();
        assert!(top.contains(&p.poly(), Level::Full));
        assert!(lift_pivot(&ideal(&r, &["y", "eps"]), &fib, false).is_some());
        assert!(lift_pivot(&ideal(&r, &["y^2", "eps*y"]), &fib, false).is_none());
    }
}
