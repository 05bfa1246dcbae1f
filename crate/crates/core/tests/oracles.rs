//! Kernel results checked against independent brute-force computations.

mod common;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::{instance, poly};
use equires_core::geometry::forward_all;
use equires_core::ideal::rational_point;
use equires_core::{ArtinScalar, BasicObject, Ideal, Level, Mono, Poly, Ring};

/// Exponent vectors of total degree at most `d` in `n` variables.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for k in 0..=d {
        for mut rest in monomials(n - 1, d - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Whether the linear system `a u = rhs` over `Q` has a solution.
fn solvable(mut rows: Vec<Vec<BigRational>>) -> bool {
    let cols = rows.first().map_or(0, |r| r.len() - 1);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].clone() / pivot.clone();
                for k in c..=cols {
                    let v = rows[rank][k].clone() * f.clone();
                    rows[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rows[rank..].iter().all(|r| r[cols].is_zero())
}

/// `f = sum c_k g_k` with cofactors of degree at most `d` over `Q[eps]/(eps^m)`,
/// decided by linear algebra on coefficients.
fn member_by_linear_algebra(f: &Poly, gens: &[Poly], d: u32) -> bool {
    let (n, m) = (f.nvars(), f.m());
    let mut unknowns = Vec::new();
    for (k, _) in gens.iter().enumerate() {
        for e in monomials(n, d) {
            for j in 0..m {
                unknowns.push((k, e.clone(), j));
            }
        }
    }
    let mut keys: Vec<(Vec<u32>, usize)> = Vec::new();
    let mut columns: Vec<Vec<((Vec<u32>, usize), BigRational)>> = Vec::new();
    for (k, e, j) in &unknowns {
        let c = Poly::monomial(Mono(e.clone()), ArtinScalar::eps_pow(*j, m));
        let prod = c.mul(&gens[*k]);
        let mut col = Vec::new();
        for (mono, s) in prod.terms() {
            for (l, q) in s.coeffs().iter().enumerate() {
                if !q.is_zero() {
                    col.push(((mono.0.clone(), l), q.clone()));
                }
            }
        }
        columns.push(col);
    }
    let mut rhs = Vec::new();
    for (mono, s) in f.terms() {
        for (l, q) in s.coeffs().iter().enumerate() {
            if !q.is_zero() {
                rhs.push(((mono.0.clone(), l), q.clone()));
            }
        }
    }
    for (key, _) in columns.iter().flatten().chain(rhs.iter()) {
        if !keys.contains(key) {
            keys.push(key.clone());
        }
    }
    let rows = keys
        .iter()
        .map(|key| {
            let mut row: Vec<BigRational> = columns
                .iter()
                .map(|col| col.iter().find(|(k, _)| k == key).map_or_else(BigRational::zero, |(_, q)| q.clone()))
                .collect();
            row.push(rhs.iter().find(|(k, _)| k == key).map_or_else(BigRational::zero, |(_, q)| q.clone()));
            row
        })
        .collect();
    solvable(rows)
}

fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
    Ideal::new(r.nvars(), r.m, gens.iter().map(|g| r.parse(g).unwrap()).collect())
}

#[test]
fn known_non_members() {
    let r = Ring::new(&["x"], 2);
    let i = ideal(&r, &["x^2", "eps*x"]);
    let x = r.parse("x").unwrap();
    assert!(!i.contains(&x, Level::Full));
    assert!(!member_by_linear_algebra(&x, i.gens(), 3));
    assert!(i.contains(&r.parse("eps*x + x^3").unwrap(), Level::Full));

    let r = Ring::new(&["x", "y"], 1);
    let sq = ideal(&r, &["y", "x^2"]).power(2);
    let f = r.parse("y^2 + x^3").unwrap();
    assert!(!sq.contains(&f, Level::Full));
    assert!(!member_by_linear_algebra(&f, sq.gens(), 3));
}

/// Order along a coordinate subspace: the least degree in its variables over all terms.
fn termwise_order(gens: &[Poly], vars: &[usize], fiber: bool) -> Option<u32> {
    gens.iter()
        .flat_map(|g| g.terms().filter(move |(_, c)| !fiber || !c.fiber().is_zero()).map(|(mono, _)| mono.degree_in(vars)))
        .min()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn membership_agrees_with_linear_algebra(
        (gens, f, cof) in (1usize..=2, 1usize..=2).prop_flat_map(|(n, m)| (
            prop::collection::vec(poly(n, m), 1..=2),
            poly(n, m),
            prop::collection::vec(poly(n, m), 2),
        ))
    ) {
        let i = Ideal::new(f.nvars(), f.m(), gens.clone());
        if member_by_linear_algebra(&f, &gens, 3) {
            prop_assert!(i.contains(&f, Level::Full));
        }
        let built = gens.iter().zip(&cof).fold(Poly::zero(f.nvars(), f.m()), |acc, (g, c)| acc.add(&g.mul(c)));
        prop_assert!(i.contains(&built, Level::Full));
        prop_assert_eq!(i.contains(&f, Level::Fiber), i.fiber().contains(&f.fiber(), Level::Full));
    }

    #[test]
    fn order_along_center_is_termwise(inst in instance()) {
        let b = inst.object();
        let c = inst.center();
        let comp = &c.components("W")[0];
        let moved: Vec<Poly> = inst.gens.iter().map(|g| forward_all(&comp.changes, g)).collect();
        let (nu, nu0) = b.orders_along(0, comp);
        prop_assert_eq!(Some(nu), termwise_order(&moved, &comp.vars, false));
        prop_assert_eq!(Some(nu0), termwise_order(&moved, &comp.vars, true));
    }

    #[test]
    fn singular_points_by_search(inst in instance()) {
        let r = Ring::new(&inst.vars, 1);
        let gens: Vec<Poly> = inst.gens.iter().map(|g| g.fiber()).collect();
        let b = BasicObject::new(&r.vars, 1, gens.clone(), inst.b, &[]).unwrap();
        let sing = b.singular_locus();
        let part = &sing[0];
        let n = inst.vars.len();
        let i = Ideal::new(n, 1, gens);
        let grid: Vec<i64> = (-2..=2).collect();
        let points: Vec<Vec<i64>> = if n == 1 {
            grid.iter().map(|&a| vec![a]).collect()
        } else {
            grid.iter().flat_map(|&a| grid.iter().map(move |&c| vec![a, c])).collect()
        };
        for p in points {
            let q: Vec<BigRational> = p.iter().map(|&a| BigRational::from_integer(a.into())).collect();
            let ord = i.order_at_point(&rational_point(&q, 1), Level::Fiber).unwrap();
            let on = part.ideal.gens().iter().all(|g| g.eval_fiber(&q).is_zero());
            prop_assert_eq!(ord >= inst.b, on, "point {:?}", p);
        }
    }

    #[test]
    fn scalars_reduce_to_the_fiber(a in prop::collection::vec(-5i64..=5, 3), b in prop::collection::vec(-5i64..=5, 3)) {
        let s = |v: &[i64]| ArtinScalar::from_coeffs(v.iter().map(|&c| BigRational::from_integer(c.into())).collect(), 3);
        let (x, y) = (s(&a), s(&b));
        prop_assert_eq!((&x * &y).fiber(), x.fiber() * y.fiber());
        prop_assert_eq!((&x + &y).fiber(), x.fiber() + y.fiber());
        if x.is_unit() {
            prop_assert!((&x * &x.inverse().unwrap()).is_one());
        }
    }
}

#[test]
fn unit_scalars_are_exactly_those_with_nonzero_fiber() {
    let one = BigRational::one();
    let eps = ArtinScalar::from_coeffs(vec![BigRational::zero(), one.clone()], 2);
    assert!(!eps.is_unit());
    assert!(ArtinScalar::from_coeffs(vec![one.clone(), one], 2).is_unit());
}
