//! Resolution invariants: `omega`, `t`, the monomial invariant `Gamma`, and the auxiliary
//! ideals of `B'` and `B''`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::basic_object::{BasicObject, Local};
use crate::delta::delta_power;
use crate::error::{CoreError, Result};
use crate::geometry::{CenterComponent, CenterSpec, Chart};
use crate::ideal::{Ideal, Level};
use crate::poly::Poly;

/// Largest number of divisors the `Gamma` enumeration will handle.
pub const GAMMA_GUARD: usize = 12;

/// `(-Gamma_1, Gamma_2, Gamma_3)`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaValue {
    pub gamma1: u32,
    pub gamma2: BigRational,
    /// Selected labels (shifted by one so that zero pads), sorted decreasingly.
    pub gamma3: Vec<usize>,
}

impl Ord for GammaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .gamma1
            .cmp(&self.gamma1)
            .then_with(|| self.gamma2.cmp(&other.gamma2))
            .then_with(|| self.gamma3.cmp(&other.gamma3))
    }
}

impl PartialOrd for GammaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GammaValue {
    /// Labels of the divisors whose intersection is the canonical center.
    pub fn labels(&self) -> Vec<usize> {
        self.gamma3.iter().map(|l| l - 1).collect()
    }
}

/// The maximal `Gamma` over subsets of divisors with exponent sum at least `b`.
/// `alpha` lists `(label, exponent)` for the divisors through a common stratum.
pub fn gamma_max(alpha: &[(usize, u32)], b: u32) -> Result<Option<GammaValue>> {
    let live: Vec<(usize, u32)> = alpha.iter().copied().filter(|&(_, a)| a > 0).collect();
    if live.len() > GAMMA_GUARD {
        return Err(CoreError::GuardExceeded(format!("{} divisors in the monomial invariant", live.len())));
    }
    let mut best: Option<GammaValue> = None;
    for p in 1..=live.len() {
        for subset in live.iter().combinations(p) {
            let sum: u32 = subset.iter().map(|(_, a)| a).sum();
            if sum < b {
                continue;
            }
            let mut g3: Vec<usize> = subset.iter().map(|(l, _)| l + 1).collect();
            g3.sort_unstable_by(|a, b| b.cmp(a));
            let v = GammaValue { gamma1: p as u32, gamma2: BigRational::new(sum.into(), b.into()), gamma3: g3 };
            if best.as_ref().is_none_or(|cur| v > *cur) {
                best = Some(v);
            }
        }
        if best.is_some() {
            break;
        }
    }
    Ok(best)
}

/// Exponents of the divisors in a chart where the proper transform is a unit along `Sing`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialData {
    pub alpha: BTreeMap<usize, u32>,
}

/// Exponents of each present divisor in the controlled ideal, and the cofactor.
pub fn divisor_exponents(chart: &Chart, ideal: &Ideal) -> (BTreeMap<usize, u32>, Ideal) {
    let mut alpha = BTreeMap::new();
    let mut rest = ideal.clone();
    for &(lab, v) in &chart.e {
        let a = rest.var_adic_order(v).unwrap_or(0);
        if a > 0 {
            rest = rest.div_var_power(v, a).expect("exact by construction");
        }
        alpha.insert(lab, a);
    }
    (alpha, rest)
}

/// Monomial data on a chart: the factorization `I = prod x_H^alpha_H * unit` near `sing`.
pub fn monomial_data(chart: &Chart, ideal: &Ideal, sing: &Ideal) -> Result<MonomialData> {
    let (alpha, rest) = divisor_exponents(chart, ideal);
    if chart.meets(&rest.fiber().sum(sing)) {
        return Err(CoreError::NotMonomial(format!("chart {}: the cofactor vanishes on Sing", chart.id)));
    }
    Ok(MonomialData { alpha })
}

/// The maximal `Gamma` on one chart together with the chosen labels; `None` when no
/// stratum reaches the index inside the chart.
pub fn chart_gamma(chart: &Chart, data: &MonomialData, b: u32) -> Result<Option<GammaValue>> {
    let alpha: Vec<(usize, u32)> = data.alpha.iter().map(|(&l, &a)| (l, a)).collect();
    let live: Vec<(usize, u32)> = alpha.iter().copied().filter(|&(_, a)| a > 0).collect();
    if live.len() > GAMMA_GUARD {
        return Err(CoreError::GuardExceeded(format!("{} divisors in the monomial invariant", live.len())));
    }
    let n = chart.nvars();
    let mut best: Option<GammaValue> = None;
    for p in 1..=live.len() {
        for subset in live.iter().combinations(p) {
            let sum: u32 = subset.iter().map(|(_, a)| a).sum();
            if sum < b {
                continue;
            }
            let vars: Vec<usize> = subset.iter().map(|(l, _)| chart.var_of(*l).unwrap()).collect();
            if !chart.meets(&Ideal::of_vars(&vars, n, 1)) {
                continue;
            }
            let mut g3: Vec<usize> = subset.iter().map(|(l, _)| l + 1).collect();
            g3.sort_unstable_by(|a, b| b.cmp(a));
            let v = GammaValue { gamma1: p as u32, gamma2: BigRational::new(sum.into(), b.into()), gamma3: g3 };
            if best.as_ref().is_none_or(|cur| v > *cur) {
                best = Some(v);
            }
        }
        if best.is_some() {
            break;
        }
    }
    Ok(best)
}

/// Global maximum of `Gamma` and the canonical center, computed on the fiber.
pub fn gamma(fib: &BasicObject) -> Result<Option<(GammaValue, CenterSpec)>> {
    let sing = fib.singular_locus();
    let mut per_chart = Vec::new();
    for ((chart, l), s) in fib.charts().zip(sing.iter()) {
        if s.empty {
            continue;
        }
        let data = monomial_data(chart, &l.ideal, &s.ideal)?;
        if let Some(g) = chart_gamma(chart, &data, fib.b)? {
            per_chart.push((chart, g));
        }
    }
    let Some(max) = per_chart.iter().map(|(_, g)| g.clone()).max() else {
        return Ok(None);
    };
    Ok(Some((max.clone(), canonical_center(fib, &max.labels()))))
}

/// The intersection of the given divisors, in every chart where all of them are present.
pub fn canonical_center(b: &BasicObject, labels: &[usize]) -> CenterSpec {
    let mut spec = CenterSpec::default();
    for chart in &b.pair.charts {
        let vars: Option<Vec<usize>> = labels.iter().map(|&l| chart.var_of(l)).collect();
        if let Some(vars) = vars {
            if chart.meets(&Ideal::of_vars(&vars, chart.nvars(), 1)) {
                spec.parts.insert(chart.id.clone(), vec![CenterComponent::coordinate(vars)]);
            }
        }
    }
    spec
}

/// Largest `k` such that the fiber ideal has order at least `k` somewhere on `locus`
/// inside the chart. Zero when the ideal is a unit along the locus.
pub fn max_order_on(chart: &Chart, ideal0: &Ideal, locus: &Ideal) -> u32 {
    let mut k = 0;
    let mut cur = ideal0.fiber();
    loop {
        if !chart.meets(&cur.sum(locus)) {
            return k;
        }
        k += 1;
        cur = crate::delta::delta(&cur);
    }
}

/// `omega` at a rational point of `Sing`: the fiber order of the proper transform over `b`.
pub fn omega_at_point(b: &BasicObject, chart: usize, point: &[BigRational]) -> Result<BigRational> {
    let l = &b.local[chart];
    let pt = crate::ideal::rational_point(point, 1);
    let nu_i = l.ideal.order_at_point(&pt, Level::Fiber)?;
    if nu_i < b.b {
        return Err(CoreError::OutOfDomain);
    }
    let nu = l.proper.order_at_point(&pt, Level::Fiber)?;
    Ok(BigRational::new(nu.into(), b.b.into()))
}

/// `t` at a rational point of `Sing`: `omega` and the number of old divisors through it.
pub fn t_at_point(b: &BasicObject, chart: usize, point: &[BigRational], old: &dyn Fn(usize) -> bool) -> Result<(BigRational, usize)> {
    let w = omega_at_point(b, chart, point)?;
    let c = &b.pair.charts[chart];
    let n = c.e.iter().filter(|&&(l, v)| old(l) && point[v].is_zero()).count();
    Ok((w, n))
}

/// `omega` along a center component (proper transform, full level).
pub fn omega_along(b: &BasicObject, chart: usize, comp: &CenterComponent) -> BigRational {
    BigRational::new(b.proper_order_along(chart, comp).into(), b.b.into())
}

/// One connected stratum of `Max(t)` inside a chart: the old divisors through it and its ideal.
#[derive(Clone, Debug)]
pub struct Piece {
    pub s: Vec<usize>,
    pub ideal: Ideal,
}

#[derive(Clone, Debug)]
pub struct ChartMaxT {
    pub chart: usize,
    pub sing: Ideal,
    /// Fiber ideal of the maximal-`omega` locus.
    pub mo: Ideal,
    pub pieces: Vec<Piece>,
}

/// `max(t)` and its locus, computed on a fiber object.
#[derive(Clone, Debug)]
pub struct MaxT {
    /// `b * max(omega)`.
    pub b_r: u32,
    pub n: usize,
    pub charts: Vec<ChartMaxT>,
}

impl MaxT {
    pub fn omega(&self, b: u32) -> BigRational {
        BigRational::new(self.b_r.into(), b.into())
    }
}

/// Maximum order of the proper transform along `Sing`, per chart with nonempty `Sing`.
pub fn chart_orders(fib: &BasicObject) -> Vec<(usize, Ideal, u32)> {
    fib.singular_locus()
        .into_iter()
        .enumerate()
        .filter(|(_, s)| !s.empty)
        .map(|(i, s)| {
            let k = max_order_on(&fib.pair.charts[i], &fib.local[i].proper, &s.ideal);
            (i, s.ideal, k)
        })
        .collect()
}

/// `Max(t)` stratified by old divisors. `None` when `Sing` is empty or `max(omega) = 0`.
pub fn max_t(fib: &BasicObject, old: &dyn Fn(usize) -> bool) -> Option<MaxT> {
    let orders = chart_orders(fib);
    let b_r = orders.iter().map(|o| o.2).max()?;
    if b_r == 0 {
        return None;
    }
    let mut charts = Vec::new();
    for (i, sing, k) in orders {
        if k != b_r {
            continue;
        }
        let chart = &fib.pair.charts[i];
        let mo = delta_power(&fib.local[i].proper.fiber(), b_r - 1).sum(&sing).pruned();
        let olds: Vec<(usize, usize)> = chart.e.iter().copied().filter(|&(l, _)| old(l)).collect();
        let mut pieces = Vec::new();
        for p in (0..=olds.len()).rev() {
            for subset in olds.iter().combinations(p) {
                let vars: Vec<usize> = subset.iter().map(|&&(_, v)| v).collect();
                let ideal = mo.sum(&Ideal::of_vars(&vars, chart.nvars(), 1));
                if chart.meets(&ideal) {
                    pieces.push((p, Piece { s: subset.iter().map(|&&(l, _)| l).collect(), ideal }));
                }
            }
        }
        charts.push((i, sing, mo, pieces));
    }
    let n = charts.iter().flat_map(|c| c.3.iter().map(|p| p.0)).max()?;
    let charts = charts
        .into_iter()
        .map(|(chart, sing, mo, pieces)| ChartMaxT {
            chart,
            sing,
            mo,
            pieces: pieces.into_iter().filter(|p| p.0 == n).map(|p| p.1).collect(),
        })
        .filter(|c| !c.pieces.is_empty())
        .collect();
    Some(MaxT { b_r, n, charts })
}

/// The ideal and index of `B'` on one chart.
pub fn b_prime(local: &Local, chart: &Chart, b: u32, b_r: u32) -> (Ideal, u32) {
    if b_r >= b {
        return (local.proper.clone(), b_r);
    }
    let n = chart.nvars();
    let m = local.ideal.m();
    let mut mono = Poly::one(n, m);
    for (&lab, &a) in &local.hist {
        if let Some(v) = chart.var_of(lab) {
            mono = mono.mul(&Poly::var(v, n, m).pow(a));
        }
    }
    let c = Ideal::new(n, m, vec![mono]);
    let ideal = local.proper.power(b - b_r).sum(&c.power(b_r)).pruned();
    (ideal, b_r * (b - b_r))
}

/// The ideal of `B''`: `J + sum_{H in S} x_H^{b'}`.
pub fn b_doubleprime(chart: &Chart, j: &Ideal, b1: u32, s: &[usize]) -> Ideal {
    let n = chart.nvars();
    let m = j.m();
    let mut gens = j.gens().to_vec();
    for &l in s {
        if let Some(v) = chart.var_of(l) {
            gens.push(Poly::var(v, n, m).pow(b1));
        }
    }
    Ideal::new(n, m, gens).pruned()
}

/// Whether `Max(t)` on a chart is a single stratum `Max(omega) ∩ H_S`; returns `S`.
pub fn is_amenable(m: &MaxT, chart: usize) -> Option<Vec<usize>> {
    let c = m.charts.iter().find(|c| c.chart == chart)?;
    match c.pieces.as_slice() {
        [p] => Some(p.s.clone()),
        _ => None,
    }
}

/// Permissibility flags of a center relative to `max(omega)` and `max(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceFlags {
    pub omega: bool,
    pub t: bool,
}

/// A center is `omega`-permissible when the proper transform has order `b_r` along it at
/// the full level and on the fiber; `t`-permissible when in addition it lies in exactly
/// `n` old divisors.
pub fn check_omega_t_permissible(b: &BasicObject, c: &CenterSpec, mt: &MaxT, old: &dyn Fn(usize) -> bool) -> SequenceFlags {
    let mut omega = true;
    let mut t = true;
    for (id, comps) in &c.parts {
        let Some(ci) = b.chart_index(id) else {
            return SequenceFlags { omega: false, t: false };
        };
        let chart = &b.pair.charts[ci];
        for comp in comps {
            let pulled = b.local[ci].proper.map(|g| comp.pull(g));
            let nu = pulled.order_along(&comp.vars).unwrap_or(u32::MAX);
            let fc = comp.truncate(1);
            let nu0 = b.local[ci].proper.fiber().map(|g| fc.pull(g)).order_along(&comp.vars).unwrap_or(u32::MAX);
            if nu != mt.b_r || nu0 != mt.b_r {
                omega = false;
            }
            let through = chart.e.iter().filter(|&&(l, v)| old(l) && comp.vars.contains(&v) && comp.changes.iter().all(|ch| ch.var != v)).count();
            if through != mt.n {
                t = false;
            }
        }
    }
    SequenceFlags { omega, t: omega && t }
}

/// The comparison value of one resolution step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Mono(GammaValue),
    T { omega: BigRational, n: usize, rest: Rest },
}

/// What follows `t` in a step value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rest {
    Unknown,
    Sub(Box<Value>),
    Infinity,
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Mono(a), Value::Mono(b)) => a.cmp(b),
            (Value::Mono(_), Value::T { .. }) => Ordering::Less,
            (Value::T { .. }, Value::Mono(_)) => Ordering::Greater,
            (Value::T { omega: w1, n: n1, rest: r1 }, Value::T { omega: w2, n: n2, rest: r2 }) => {
                w1.cmp(w2).then(n1.cmp(n2)).then_with(|| r1.cmp(r2))
            }
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Value {
    pub fn t(&self) -> Option<(BigRational, usize)> {
        match self {
            Value::T { omega, n, .. } => Some((omega.clone(), *n)),
            Value::Mono(_) => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            Value::Mono(g) => {
                let g3: Vec<String> = g.gamma3.iter().map(|x| x.to_string()).collect();
                format!("Gamma(-{}, {}, ({}))", g.gamma1, g.gamma2, g3.join(","))
            }
            Value::T { omega, n, rest } => {
                let r = match rest {
                    Rest::Unknown => "?".to_string(),
                    Rest::Infinity => "inf".to_string(),
                    Rest::Sub(v) => v.display(),
                };
                format!("[({omega}, {n}); {r}]")
            }
        }
    }
}

pub fn ratio_u(a: u32, b: u32) -> BigRational {
    if b == 0 {
        return BigRational::one();
    }
    BigRational::new(a.into(), b.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;
    use crate::scalar::ratio;

    #[test]
    fn gamma_of_two_divisors() {
        let g = gamma_max(&[(0, 2), (1, 3)], 4).unwrap().unwrap();
        assert_eq!(g.gamma1, 2);
        assert_eq!(g.gamma2, ratio(5, 4));
        assert_eq!(g.gamma3, vec![2, 1]);
        let single = gamma_max(&[(0, 4)], 4).unwrap().unwrap();
        assert_eq!((single.gamma1, single.gamma2.clone(), single.gamma3.clone()), (1, ratio(1, 1), vec![1]));
        assert!(gamma_max(&[(0, 1)], 2).unwrap().is_none());
    }

    #[test]
    fn value_order() {
        let low = Value::Mono(gamma_max(&[(0, 1)], 1).unwrap().unwrap());
        let t = |w: i64, n: usize, rest: Rest| Value::T { omega: ratio(w, 1), n, rest };
        assert!(low < t(0, 0, Rest::Unknown));
        assert!(t(1, 0, Rest::Infinity) > t(1, 0, Rest::Sub(Box::new(t(5, 0, Rest::Infinity)))));
        assert!(t(2, 0, Rest::Unknown) > t(1, 3, Rest::Infinity));
    }

    #[test]
    fn omega_of_the_cusp_object() {
        let r = Ring::new(&["x", "y"], 2);
        let b = BasicObject::new(&r.vars, 2, vec![r.parse("y^2").unwrap(), r.parse("x^3").unwrap()], 2, &[]).unwrap();
        let w = omega_at_point(&b, 0, &[ratio(0, 1), ratio(0, 1)]).unwrap();
        assert_eq!(w, ratio(1, 1));
        assert!(omega_at_point(&b, 0, &[ratio(1, 1), ratio(0, 1)]).is_err());
        let mt = max_t(&b.fiber(), &|_| false).unwrap();
        assert_eq!((mt.b_r, mt.n), (2, 0));
        let (j, b1) = b_prime(&b.local[0], &b.pair.charts[0], 2, 2);
        assert_eq!(b1, 2);
        assert!(j.equals(&b.local[0].ideal, Level::Full));
    }
}
