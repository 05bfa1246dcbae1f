//! Fiber loci: elimination, saturation, radical membership, gcds and the splitting
//! of hypersurface loci into coordinate-normalizable components.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::groebner::{groebner, MonoOrder, QPoly};
use crate::ideal::{from_fiber_q, to_fiber_q, to_full_q, Ideal};
use crate::poly::{Mono, Poly};
use crate::scalar::ArtinScalar;

fn shift(q: &QPoly, k: usize, ord: MonoOrder) -> QPoly {
    QPoly::from_terms(
        q.terms
            .iter()
            .map(|(e, c)| {
                let mut v = vec![0; k];
                v.extend_from_slice(e);
                (v, c.clone())
            })
            .collect(),
        ord,
    )
}

/// `1 - t * f` with `t` as a new first variable.
fn rabinowitsch(f: &QPoly, ord: MonoOrder) -> QPoly {
    let n = f.terms.first().map_or(0, |t| t.0.len());
    let mut terms = vec![(vec![0; n + 1], BigRational::one())];
    for (e, c) in &f.terms {
        let mut v = vec![1];
        v.extend_from_slice(e);
        terms.push((v, -c.clone()));
    }
    QPoly::from_terms(terms, ord)
}

/// Generators of `(gens) ∩ Q[rest]` where `gens` live in `k + n` variables, the first `k`
/// being eliminated.
pub fn eliminate(gens: &[QPoly], k: usize) -> Vec<QPoly> {
    let ord = MonoOrder::Block(k);
    let gb = groebner(&gens.iter().map(|g| g.reorder(ord)).collect::<Vec<_>>(), ord);
    gb.into_iter()
        .filter(|g| g.terms.iter().all(|(e, _)| e[..k].iter().all(|&x| x == 0)))
        .map(|g| QPoly::from_terms(g.terms.into_iter().map(|(e, c)| (e[k..].to_vec(), c)).collect(), MonoOrder::Grevlex))
        .collect()
}

/// `J : f^oo` for rational polynomials in a common variable count.
pub fn saturate_q(j: &[QPoly], f: &QPoly) -> Vec<QPoly> {
    if f.is_constant() && !f.is_zero() {
        return groebner(j, MonoOrder::Grevlex);
    }
    let ord = MonoOrder::Block(1);
    let mut gens: Vec<QPoly> = j.iter().map(|g| shift(g, 1, ord)).collect();
    gens.push(rabinowitsch(f, ord));
    eliminate(&gens, 1)
}

/// `A ∩ B` by elimination of `t` from `tA + (1 - t)B`.
pub fn intersect_q(a: &[QPoly], b: &[QPoly]) -> Vec<QPoly> {
    let ord = MonoOrder::Block(1);
    let mut gens = Vec::new();
    for g in a {
        let mut s = shift(g, 1, ord);
        for t in &mut s.terms {
            t.0[0] += 1;
        }
        gens.push(QPoly::from_terms(s.terms, ord));
    }
    for g in b {
        let s = shift(g, 1, ord);
        let mut terms = s.terms.clone();
        for (e, c) in &s.terms {
            let mut e2 = e.clone();
            e2[0] += 1;
            terms.push((e2, -c.clone()));
        }
        gens.push(QPoly::from_terms(terms, ord));
    }
    eliminate(&gens, 1)
}

/// `f` lies in the radical of `J`.
pub fn in_radical_q(f: &QPoly, j: &[QPoly]) -> bool {
    if f.is_zero() {
        return true;
    }
    let ord = MonoOrder::Block(1);
    let mut gens: Vec<QPoly> = j.iter().map(|g| shift(g, 1, ord)).collect();
    gens.push(rabinowitsch(f, ord));
    let gb = groebner(&gens, ord);
    gb.len() == 1 && gb[0].is_one()
}

fn fq(p: &Poly) -> QPoly {
    to_fiber_q(p, MonoOrder::Grevlex)
}

fn fiber_gens(i: &Ideal) -> Vec<QPoly> {
    i.gens().iter().map(fq).filter(|q| !q.is_zero()).collect()
}

fn to_ideal(gens: Vec<QPoly>, nvars: usize) -> Ideal {
    Ideal::new(nvars, 1, gens.iter().map(|q| from_fiber_q(q, nvars, 1)).collect())
}

/// Fiber saturation `J : f^oo`.
pub fn saturate(j: &Ideal, f: &Poly) -> Ideal {
    to_ideal(saturate_q(&fiber_gens(j), &fq(f)), j.nvars())
}

/// Fiber saturation by every generator of `r`, i.e. `J : r^oo`.
pub fn saturate_ideal(j: &Ideal, r: &Ideal) -> Ideal {
    let mut acc: Option<Vec<QPoly>> = None;
    for g in r.gens() {
        let s = saturate_q(&fiber_gens(j), &fq(g));
        acc = Some(match acc {
            None => s,
            Some(a) => intersect_q(&a, &s),
        });
    }
    match acc {
        None => Ideal::unit(j.nvars(), 1),
        Some(a) => to_ideal(a, j.nvars()),
    }
}

pub fn intersect(a: &Ideal, b: &Ideal) -> Ideal {
    to_ideal(intersect_q(&fiber_gens(a), &fiber_gens(b)), a.nvars())
}

pub fn in_radical(f: &Poly, j: &Ideal) -> bool {
    in_radical_q(&fq(f), &fiber_gens(j))
}

/// `V(J)` is contained in `V(R)` (fiber level).
pub fn locus_within(j: &Ideal, r: &Ideal) -> bool {
    r.gens().iter().all(|g| in_radical(g, j))
}

/// `V(J)` minus `V(removed)` is nonempty (fiber level).
pub fn nonempty_on(j: &Ideal, removed: Option<&Ideal>) -> bool {
    if j.fiber().is_unit() {
        return false;
    }
    match removed {
        None => true,
        Some(r) => !locus_within(j, r),
    }
}

/// Exact quotient `f / g` over `Q`, if `g` divides `f`.
pub fn div_exact(f: &Poly, g: &Poly) -> Option<Poly> {
    let ord = MonoOrder::Grevlex;
    let gq = fq(g);
    if gq.is_zero() {
        return None;
    }
    let (gm, gc) = gq.lead().clone();
    let mut r = fq(f);
    let mut quot: Vec<(Vec<u32>, BigRational)> = Vec::new();
    while !r.is_zero() {
        let (rm, rc) = r.lead().clone();
        if !gm.iter().zip(&rm).all(|(a, b)| a <= b) {
            return None;
        }
        let qm: Vec<u32> = rm.iter().zip(&gm).map(|(a, b)| a - b).collect();
        let qc = rc / &gc;
        r = r.sub_scaled(&qc, &qm, &gq, ord);
        quot.push((qm, qc));
    }
    Some(from_fiber_q(&QPoly::from_terms(quot, ord), f.nvars(), 1))
}

/// Monic greatest common divisor over `Q`.
pub fn gcd(f: &Poly, g: &Poly) -> Poly {
    let n = f.nvars();
    let (f, g) = (f.fiber(), g.fiber());
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    if f.is_constant() || g.is_constant() {
        return Poly::one(n, 1);
    }
    if div_exact(&f, &g).is_some() {
        return g.monic();
    }
    if div_exact(&g, &f).is_some() {
        return f.monic();
    }
    let l = intersect_q(&[fq(&f)], &[fq(&g)]);
    let l = from_fiber_q(&l[0], n, 1);
    div_exact(&f.mul(&g), &l).expect("lcm divides the product").monic()
}

pub fn gcd_all<'a>(ps: impl IntoIterator<Item = &'a Poly>, nvars: usize) -> Poly {
    let mut acc = Poly::zero(nvars, 1);
    for p in ps {
        acc = gcd(&acc, p);
        if acc.is_constant() && !acc.is_zero() {
            break;
        }
    }
    acc
}

/// Squarefree part in characteristic zero.
pub fn squarefree(g: &Poly) -> Poly {
    let n = g.nvars();
    let g = g.fiber();
    if g.is_constant() {
        return g;
    }
    let mut d = g.clone();
    for i in 0..n {
        d = gcd(&d, &g.derivative(i));
    }
    div_exact(&g, &d).expect("gcd divides").monic()
}

/// Largest hypersurface contained in `V(J)` (fiber level): the squarefree gcd of a
/// Groebner basis; constant when `V(J)` has no codimension-one part.
pub fn codim_one_part(j: &Ideal) -> Poly {
    let gb = j.fiber_gb_polys();
    if gb.is_empty() {
        return Poly::zero(j.nvars(), 1);
    }
    squarefree(&gcd_all(gb.iter(), j.nvars()))
}

/// A hypersurface `V(c*x_v + h)` with `h` free of `x_v`, stored as the coordinate that
/// becomes `x_v` after the change.
#[derive(Clone, Debug, PartialEq)]
pub struct Pivot {
    pub var: usize,
    pub unit: ArtinScalar,
    pub shift: Poly,
}

impl Pivot {
    /// Reads `p` as `c*x_v + h`; prefers the lowest usable variable index.
    pub fn of(p: &Poly, allowed: &dyn Fn(usize) -> bool) -> Option<Pivot> {
        for v in 0..p.nvars() {
            if !allowed(v) || p.degree_in_var(v) != 1 {
                continue;
            }
            let c = p.coeff(&Mono::var(v, p.nvars()));
            if !c.is_unit() {
                continue;
            }
            let rest = p.sub(&Poly::monomial(Mono::var(v, p.nvars()), c.clone()));
            if rest.involves(v) {
                continue;
            }
            return Some(Pivot { var: v, unit: c, shift: rest });
        }
        None
    }

    pub fn poly(&self) -> Poly {
        let n = self.shift.nvars();
        Poly::monomial(Mono::var(self.var, n), self.unit.clone()).add(&self.shift)
    }
}

fn integer_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    if n.bits() > 40 {
        return Err(CoreError::GuardExceeded("coefficient too large for rational root search".into()));
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Rational roots (with the leftover cofactor) of a univariate polynomial in variable `v`.
pub fn rational_roots(g: &Poly, v: usize) -> Result<(Vec<BigRational>, Poly)> {
    let n = g.nvars();
    let mut g = g.fiber();
    let mut roots = Vec::new();
    let x = Poly::var(v, n, 1);
    while div_exact(&g, &x).is_some() && !g.is_constant() {
        g = div_exact(&g, &x).unwrap();
        roots.push(BigRational::zero());
    }
    loop {
        let deg = g.degree_in_var(v);
        if deg == 0 {
            break;
        }
        let coeffs: Vec<BigRational> = (0..=deg).map(|k| {
            let mut e = vec![0; n];
            e[v] = k;
            g.coeff(&Mono(e)).fiber()
        }).collect();
        let den = coeffs.iter().fold(BigInt::one(), |a, c| a.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        let (a0, an) = (&ints[0], &ints[deg as usize]);
        let mut found = None;
        'search: for p in integer_divisors(a0)? {
            for q in integer_divisors(an)? {
                for s in [1, -1] {
                    let r = BigRational::new(&p * s, q.clone());
                    let mut point = vec![BigRational::zero(); n];
                    point[v] = r.clone();
                    if g.eval_fiber(&point).is_zero() {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
        match found {
            None => break,
            Some(r) => {
                let lin = x.sub(&Poly::constant(ArtinScalar::from_rational(r.clone(), 1), n));
                g = div_exact(&g, &lin).expect("root gives a linear factor");
                roots.push(r);
            }
        }
    }
    Ok((roots, g))
}

/// Splits a squarefree hypersurface `V(g)` into coordinate-normalizable components.
/// Variable factors come first, then rational roots of a univariate remainder, then a
/// remainder that is itself linear in some allowed variable.
pub fn hypersurface_components(g: &Poly, allowed: &dyn Fn(usize) -> bool) -> Result<Vec<Pivot>> {
    let n = g.nvars();
    let mut g = g.fiber();
    let mut out = Vec::new();
    for v in 0..n {
        let x = Poly::var(v, n, 1);
        if let Some(q) = div_exact(&g, &x) {
            if allowed(v) || Pivot::of(&x, allowed).is_some() {
                out.push(Pivot { var: v, unit: ArtinScalar::one(1), shift: Poly::zero(n, 1) });
                g = q;
            }
        }
    }
    if g.is_constant() {
        return Ok(out);
    }
    let involved: Vec<usize> = (0..n).filter(|&v| g.involves(v)).collect();
    if involved.len() == 1 {
        let v = involved[0];
        let (roots, rest) = rational_roots(&g, v)?;
        for r in roots {
            out.push(Pivot {
                var: v,
                unit: ArtinScalar::one(1),
                shift: Poly::constant(ArtinScalar::from_rational(-r, 1), n),
            });
        }
        if !rest.is_constant() {
            return Err(CoreError::AlgorithmStuck("hypersurface locus has points that are not rational".into()));
        }
        return Ok(out);
    }
    match Pivot::of(&g, allowed) {
        Some(p) => {
            out.push(p);
            Ok(out)
        }
        None => Err(CoreError::AlgorithmStuck(format!("cannot split the hypersurface locus into coordinate components ({} terms)", g.num_terms()))),
    }
}

/// Normal form of an A-level ideal `K + (eps^m)` as `x_p + h_p` for the given pivots,
/// with each `h_p` free of all pivots. `None` when the ideal has another shape.
pub fn pivot_form(k: &Ideal, pivots: &[usize]) -> Option<Vec<(usize, Poly)>> {
    let n = k.nvars();
    let m = k.m();
    let mut perm: Vec<usize> = pivots.to_vec();
    perm.extend((0..n).filter(|v| !pivots.contains(v)));
    perm.push(n);
    let ord = MonoOrder::Lex;
    let permute = |q: &QPoly| -> QPoly {
        QPoly::from_terms(q.terms.iter().map(|(e, c)| (perm.iter().map(|&i| e[i]).collect(), c.clone())).collect(), ord)
    };
    let mut gens: Vec<QPoly> = k.gens().iter().map(|g| permute(&to_full_q(g, MonoOrder::Grevlex))).collect();
    let mut em = vec![0; n + 1];
    em[n] = m as u32;
    gens.push(QPoly::from_terms(vec![(em, BigRational::one())], ord));
    let gb = groebner(&gens, ord);
    let r = pivots.len();
    let mut out = Vec::new();
    for g in &gb {
        let (lm, _) = g.lead();
        let is_eps_power = lm[..n].iter().all(|&e| e == 0);
        if is_eps_power {
            if lm[n] as usize != m || g.terms.len() != 1 {
                return None;
            }
            continue;
        }
        let slot = (0..r).find(|&i| lm[i] == 1 && lm.iter().enumerate().all(|(j, &e)| j == i || e == 0))?;
        if g.terms[..g.terms.len() - 1].iter().any(|(e, _)| e[..r].iter().any(|&x| x > 0)) {
            return None;
        }
        let mut inv = vec![0usize; n + 1];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let back: Vec<(Vec<u32>, BigRational)> =
            g.terms[..g.terms.len() - 1].iter().map(|(e, c)| ((0..=n).map(|v| e[inv[v]]).collect(), c.clone())).collect();
        let h = crate::ideal::from_full_q(&QPoly { terms: back }, n, m);
        out.push((pivots[slot], h));
    }
    if out.len() != r {
        return None;
    }
    out.sort_by_key(|(v, _)| *v);
    Some(out)
}
