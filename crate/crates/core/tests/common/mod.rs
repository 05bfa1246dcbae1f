#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use equires_core::basic_object::BasicObject;
use equires_core::contact::homogenized_ideal;
use equires_core::delta::{delta, delta_power};
use equires_core::driver::{EquiresReport, StepKind};
use equires_core::geometry::{blowup, CenterComponent, CenterSpec, CoordChange, SPair};
use equires_core::{ArtinScalar, Ideal, Level, Mono, Poly};

/// A random ideal with an index and a coordinate center, possibly shifted by `eps`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub vars: Vec<String>,
    pub m: usize,
    pub gens: Vec<Poly>,
    pub b: u32,
    pub center_vars: Vec<usize>,
    pub shift: i64,
}

impl Instance {
    pub fn ideal(&self) -> Ideal {
        Ideal::new(self.vars.len(), self.m, self.gens.clone())
    }

    pub fn object(&self) -> BasicObject {
        BasicObject::new(&self.vars, self.m, self.gens.clone(), self.b, &[]).expect("random objects are well formed")
    }

    pub fn center(&self) -> CenterSpec {
        let n = self.vars.len();
        let changes = if self.shift != 0 && self.m > 1 {
            let h = Poly::eps(n, self.m).scale_rational(&BigRational::from_integer(self.shift.into()));
            vec![CoordChange::new(self.center_vars[0], ArtinScalar::one(self.m), h).expect("shifts are coordinate changes")]
        } else {
            Vec::new()
        };
        CenterSpec::single("W", CenterComponent { changes, vars: self.center_vars.clone() })
    }
}

fn scalar(m: usize) -> impl Strategy<Value = ArtinScalar> {
    prop::collection::vec(-3i64..=3, m).prop_map(move |cs| {
        ArtinScalar::from_coeffs(cs.into_iter().map(|c| BigRational::from_integer(c.into())).collect(), m)
    })
}

fn exponent(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..=4, n).prop_filter("degree at most four", |e| e.iter().sum::<u32>() <= 4)
}

pub fn poly(n: usize, m: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((exponent(n), scalar(m)), 1..=4)
        .prop_map(move |terms| Poly::from_terms(n, m, terms.into_iter().map(|(e, c)| (Mono(e), c))))
}

/// Dimension at most two, degree at most four, `m` at most three.
pub fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=2, 1usize..=3, 1u32..=3)
        .prop_flat_map(|(n, m, b)| {
            let center = prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n);
            (Just(n), Just(m), Just(b), prop::collection::vec(poly(n, m), 1..=2), center, -1i64..=1)
        })
        .prop_map(|(n, m, b, gens, center_vars, shift)| Instance {
            vars: ["x", "y"][..n].iter().map(|s| s.to_string()).collect(),
            m,
            gens,
            b,
            center_vars,
            shift,
        })
        .prop_filter("fiber of the ideal is nonzero", |i| !i.ideal().fiber_is_zero())
}

/// Instances whose generators are multiplied into `I(C)^b`, so that most centers are permissible.
pub fn permissible_instance() -> impl Strategy<Value = Instance> {
    instance().prop_map(|mut inst| {
        let c = inst.center();
        let comp = &c.components("W")[0];
        let n = inst.vars.len();
        let factor = comp.ideal(n, inst.m).gens()[0].pow(inst.b);
        inst.gens = inst.gens.iter().map(|g| g.mul(&factor)).collect();
        inst
    })
}

fn check(ok: bool, what: &str, inst: &Instance) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what} fails on {inst:?}")))
    }
}

/// `Delta^{b-1}(I) = Delta^{b-1}(H(I, b))` at the full level.
pub fn delta_top_identity(inst: &Instance) -> Result<(), TestCaseError> {
    let i = inst.ideal();
    let k = inst.b - 1;
    let ok = delta_power(&i, k).equals(&delta_power(&homogenized_ideal(&i, inst.b), k), Level::Full);
    check(ok, "Delta-top identity", inst)
}

/// `nu(I, C) >= b` iff `Delta^{b-1}(I) ⊆ I(C)`.
pub fn order_criterion(inst: &Instance) -> Result<(), TestCaseError> {
    let b = inst.object();
    let c = inst.center();
    let comp = &c.components("W")[0];
    let (nu, _) = b.orders_along(0, comp);
    let ic = comp.ideal(inst.vars.len(), inst.m);
    let contained = ic.contains_ideal(&delta_power(&inst.ideal(), inst.b - 1), Level::Full);
    check((nu >= inst.b) == contained, "order criterion", inst)
}

fn same_charts(a: &BasicObject, b: &BasicObject) -> bool {
    a.pair.charts.len() == b.pair.charts.len()
        && a.charts().zip(b.charts()).all(|((ca, la), (cb, lb))| ca.id == cb.id && la.ideal.equals(&lb.ideal, Level::Fiber))
}

/// The fiber of a transform is the transform of the fiber.
pub fn fiber_transform(inst: &Instance) -> Result<(), TestCaseError> {
    let b = inst.object();
    let c = inst.center();
    prop_assume!(b.is_permissible_center(&c).ok);
    let t = b.transform(&c).map_err(|e| TestCaseError::fail(e.to_string()))?.0;
    let t0 = b.fiber().transform(&c.truncate(1)).map_err(|e| TestCaseError::fail(e.to_string()))?.0;
    check(same_charts(&t.fiber(), &t0), "fiber/transform commutation", inst)
}

/// `Delta` commutes with passing to the fiber.
pub fn fiber_delta(inst: &Instance) -> Result<(), TestCaseError> {
    let i = inst.ideal();
    check(delta(&i).fiber().equals(&delta(&i.fiber()), Level::Fiber), "fiber/Delta commutation", inst)
}

/// Pulling back to a blow-up chart commutes with passing to the fiber.
pub fn blowup_base_change(inst: &Instance) -> Result<(), TestCaseError> {
    let pair = SPair::affine(&inst.vars);
    let c = inst.center();
    let (_, rec) = blowup(&pair, &c, 0).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let (_, rec0) = blowup(&pair, &c.truncate(1), 0).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let i = inst.ideal();
    let ok = rec.children.len() == rec0.children.len()
        && rec.children.iter().zip(&rec0.children).all(|(k, k0)| {
            k.chart.id == k0.chart.id && k.pull_ideal(&i).fiber().equals(&k0.pull_ideal(&i.fiber()), Level::Fiber)
        });
    check(ok, "blow-up base change", inst)
}

/// Number of steps of the monomial algorithm on a single chart whose variables are all
/// divisors, simulated directly on exponent vectors: `chart` maps a variable to
/// `(label, exponent)`.
pub fn monomial_steps(chart: BTreeMap<usize, (usize, u32)>, b: u32, mut next: usize) -> usize {
    type Chart = BTreeMap<usize, (usize, u32)>;
    type Key = (i64, BigRational, Vec<usize>);
    fn best(c: &Chart, b: u32) -> Option<(Key, Vec<usize>)> {
        let vars: Vec<usize> = c.keys().copied().collect();
        let mut out: Option<(Key, Vec<usize>)> = None;
        for mask in 1u32..(1 << vars.len()) {
            let t: Vec<usize> = vars.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| *v).collect();
            let sum: u32 = t.iter().map(|v| c[v].1).sum();
            if sum < b {
                continue;
            }
            let mut labels: Vec<usize> = t.iter().map(|v| c[v].0 + 1).collect();
            labels.sort_unstable_by(|a, b| b.cmp(a));
            let key = (-(t.len() as i64), BigRational::new(sum.into(), b.into()), labels);
            if out.as_ref().map_or(true, |(k, _)| key > *k) {
                out = Some((key, t));
            }
        }
        out
    }
    let mut charts = vec![chart];
    let mut steps = 0;
    loop {
        let keys: Vec<Option<(Key, Vec<usize>)>> = charts.iter().map(|c| best(c, b)).collect();
        let Some(max) = keys.iter().flatten().map(|(k, _)| k.clone()).max() else { return steps };
        steps += 1;
        let mut new = Vec::new();
        for (c, k) in charts.into_iter().zip(keys) {
            match k {
                Some((key, t)) if key == max => {
                    let total: u32 = t.iter().map(|v| c[v].1).sum();
                    if t.len() == 1 {
                        let mut d = c.clone();
                        d.get_mut(&t[0]).expect("center variable").1 -= b;
                        new.push(d);
                    } else {
                        for v in &t {
                            let mut d = c.clone();
                            d.insert(*v, (next, total - b));
                            new.push(d);
                        }
                    }
                }
                _ => new.push(c),
            }
        }
        next += 1;
        charts = new;
    }
}

/// Fiber corpus step counts worked out by hand.
pub const HAND_COUNTS: [(&str, usize); 10] = [
    // (x^2, 2) on the line: the origin, then the controlled transform is (1).
    ("x2", 1),
    // (x^3, 2): the origin is a divisor; afterwards (x) has order one.
    ("x3_b2", 1),
    // The origin; the controlled transforms (y^2 + x, ...) and (1 + x^3 y, ...) have order at most one.
    ("cusp", 1),
    // The origin; in each chart the controlled transform is a coordinate.
    ("xy", 1),
    // The origin, then the origin of the x-chart where y^2 + x^3 remains.
    ("y2_x5", 2),
    // The origin; in each chart a coordinate lies in the controlled transform.
    ("x2_y2", 1),
    // The origin, then the three points where the strict transforms meet the exceptional line.
    ("three_lines", 2),
    // The divisor V(x) carries all of the order.
    ("x2_on_e", 1),
    // Monomial: V(y), then V(x).
    ("mono_xy", 2),
    // Monomial in three divisors, counted by the exponent simulation.
    ("mono_xyz", 10),
];

/// Structural checks of one equiresolution run, as failure messages.
pub fn structural(name: &str, r: &EquiresReport) -> Vec<String> {
    let mut bad = Vec::new();
    let mut fail = |ok: bool, what: &str| {
        if !ok {
            bad.push(format!("{name}: {what}"));
        }
    };
    for run in [&r.run, &r.fiber] {
        let ts: Vec<_> = run.steps.iter().filter_map(|s| s.value.t()).collect();
        fail(ts.windows(2).all(|w| w[0] >= w[1]), "max t increases");
        let mono: Vec<_> = run.steps.iter().filter(|s| s.kind == StepKind::Monomial).map(|s| &s.value).collect();
        fail(mono.windows(2).all(|w| w[0] > w[1]), "Gamma does not strictly decrease");
        fail(run.steps.iter().all(|s| s.checks.order_balance != Some(false)), "order balance breaks");
        fail(run.steps.iter().all(|s| s.checks.nice_good != Some(false)), "a nice object is not good");
    }
    let truncation = r.run.fibers.iter().zip(&r.fiber.fibers).all(|(a, f)| same_charts(a, f));
    fail(truncation && r.run.fibers.len() == r.e + 1, "the A-level sequence does not reduce to the fiber sequence");
    fail(r.e <= r.ell, "e exceeds ell");
    fail(r.fiber.failure.is_none() && r.fiber.last.sing_is_empty(), "the fiber run does not resolve");
    fail(r.fiber.fibers.len() == r.ell + 1, "fiber objects do not match the step count");
    bad
}
