//! Buchberger's algorithm over `Q` with the Gebauer-Moeller pair criteria.
//!
//! Polynomials here are plain rational polynomials whose terms are kept sorted
//! ascending under a [`MonoOrder`], so the leading term sits at the end.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::grevlex_cmp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonoOrder {
    Grevlex,
    Lex,
    /// The first `k` variables are compared first (grevlex), ties broken by grevlex on the rest.
    Block(usize),
}

impl MonoOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match *self {
            MonoOrder::Grevlex => grevlex_cmp(a, b),
            MonoOrder::Lex => a.cmp(b),
            MonoOrder::Block(k) => grevlex_cmp(&a[..k], &b[..k]).then_with(|| grevlex_cmp(&a[k..], &b[k..])),
        }
    }
}

pub type Term = (Vec<u32>, BigRational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    /// Ascending under the order it was built with; never contains zero coefficients.
    pub terms: Vec<Term>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { terms: Vec::new() }
    }

    pub fn from_terms(mut terms: Vec<Term>, ord: MonoOrder) -> Self {
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by(|a, b| ord.cmp(&a.0, &b.0));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    if last.1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            out.push((m, c));
        }
        QPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &Term {
        self.terms.last().expect("nonzero polynomial")
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0) && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    pub fn monic(mut self) -> Self {
        if let Some((_, c)) = self.terms.last() {
            let inv = c.recip();
            for t in &mut self.terms {
                t.1 *= &inv;
            }
        }
        self
    }

    pub fn reorder(&self, ord: MonoOrder) -> Self {
        QPoly::from_terms(self.terms.clone(), ord)
    }

    /// `self - c * x^mono * g`, all sorted ascending under `ord`.
    pub fn sub_scaled(&self, c: &BigRational, mono: &[u32], g: &QPoly, ord: MonoOrder) -> QPoly {
        let shifted: Vec<Term> =
            g.terms.iter().map(|(m, a)| (m.iter().zip(mono).map(|(x, y)| x + y).collect(), -(a * c))).collect();
        let mut out = Vec::with_capacity(self.terms.len() + shifted.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < shifted.len() {
            match ord.cmp(&self.terms[i].0, &shifted[j].0) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(shifted[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &self.terms[i].1 + &shifted[j].1;
                    if !s.is_zero() {
                        out.push((self.terms[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend(shifted.into_iter().skip(j));
        QPoly { terms: out }
    }

    pub fn mul(&self, other: &QPoly, ord: MonoOrder) -> QPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.iter().zip(mb).map(|(x, y)| x + y).collect(), ca * cb));
            }
        }
        QPoly::from_terms(terms, ord)
    }
}

/// Full reduction of `f` modulo `basis` (the remainder of multivariate division).
pub fn reduce(f: &QPoly, basis: &[&QPoly], ord: MonoOrder) -> QPoly {
    let mut p = f.clone();
    let mut rem: Vec<Term> = Vec::new();
    while let Some((lm, lc)) = p.terms.last().cloned() {
        let divisor = basis.iter().find(|g| divides(&g.lead().0, &lm));
        match divisor {
            Some(g) => {
                let (gm, gc) = g.lead();
                let q: Vec<u32> = lm.iter().zip(gm).map(|(a, b)| a - b).collect();
                let c = &lc / gc;
                p = p.sub_scaled(&c, &q, g, ord);
            }
            None => {
                rem.push(p.terms.pop().unwrap());
            }
        }
    }
    rem.reverse();
    QPoly { terms: rem }
}

/// Incrementally maintained Groebner basis; after every `add` the stored basis is complete.
#[derive(Clone, Debug)]
pub struct GbBuilder {
    ord: MonoOrder,
    polys: Vec<QPoly>,
    active: Vec<bool>,
    pairs: Vec<(usize, usize, Vec<u32>)>,
}

impl GbBuilder {
    pub fn new(ord: MonoOrder) -> Self {
        GbBuilder { ord, polys: Vec::new(), active: Vec::new(), pairs: Vec::new() }
    }

    pub fn order(&self) -> MonoOrder {
        self.ord
    }

    fn basis_refs(&self) -> Vec<&QPoly> {
        self.polys.iter().zip(&self.active).filter(|(_, a)| **a).map(|(p, _)| p).collect()
    }

    pub fn reduce(&self, f: &QPoly) -> QPoly {
        reduce(f, &self.basis_refs(), self.ord)
    }

    pub fn contains(&self, f: &QPoly) -> bool {
        self.reduce(f).is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.basis_refs().iter().any(|p| p.is_constant())
    }

    /// Adds a generator; returns `false` if it already lies in the ideal.
    pub fn add(&mut self, f: QPoly) -> bool {
        let r = self.reduce(&f);
        if r.is_zero() {
            return false;
        }
        self.insert(r.monic());
        self.complete();
        true
    }

    pub fn add_all(&mut self, fs: impl IntoIterator<Item = QPoly>) {
        for f in fs {
            let r = self.reduce(&f);
            if !r.is_zero() {
                self.insert(r.monic());
            }
        }
        self.complete();
    }

    fn insert(&mut self, h: QPoly) {
        let ord = self.ord;
        let hi = self.polys.len();
        let hl = h.lead().0.clone();
        self.polys.push(h);
        self.active.push(true);

        let old: Vec<usize> = (0..hi).filter(|&i| self.active[i]).collect();
        let mut cands: Vec<(usize, Vec<u32>, bool)> =
            old.iter().map(|&g| (g, lcm(&hl, &self.polys[g].lead().0), coprime(&hl, &self.polys[g].lead().0))).collect();
        // Chain criterion among the new pairs.
        let mut keep: Vec<(usize, Vec<u32>, bool)> = Vec::new();
        for idx in 0..cands.len() {
            let (g, ref l, cp) = cands[idx];
            let dominated = !cp
                && cands.iter().enumerate().any(|(j, (_, l2, _))| {
                    j != idx && divides(l2, l) && (l2 != l || j < idx)
                });
            if !dominated {
                keep.push((g, l.clone(), cp));
            }
        }
        cands.clear();
        // Buchberger's product criterion.
        let new_pairs: Vec<(usize, usize, Vec<u32>)> =
            keep.into_iter().filter(|(_, _, cp)| !cp).map(|(g, l, _)| (g, hi, l)).collect();
        // Drop old pairs made redundant by the new leading term.
        let polys = &self.polys;
        self.pairs.retain(|(a, b, l)| {
            if !divides(&hl, l) {
                return true;
            }
            let la = lcm(&polys[*a].lead().0, &hl);
            let lb = lcm(&polys[*b].lead().0, &hl);
            la == *l || lb == *l
        });
        self.pairs.extend(new_pairs);
        for i in old {
            if divides(&hl, &self.polys[i].lead().0) {
                self.active[i] = false;
            }
        }
        let _ = ord;
    }

    fn complete(&mut self) {
        while !self.pairs.is_empty() {
            let ord = self.ord;
            let (idx, _) = self
                .pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    let da: u32 = a.2.iter().sum();
                    let db: u32 = b.2.iter().sum();
                    da.cmp(&db).then_with(|| ord.cmp(&a.2, &b.2))
                })
                .unwrap();
            let (i, j, l) = self.pairs.swap_remove(idx);
            let s = spoly(&self.polys[i], &self.polys[j], &l, ord);
            let h = self.reduce(&s);
            if !h.is_zero() {
                self.insert(h.monic());
            }
        }
    }

    /// The reduced Groebner basis, sorted ascending by leading monomial.
    pub fn reduced(&self) -> Vec<QPoly> {
        let ord = self.ord;
        let mut gs: Vec<QPoly> = self.basis_refs().into_iter().cloned().collect();
        gs.sort_by(|a, b| ord.cmp(&a.lead().0, &b.lead().0));
        let mut minimal: Vec<QPoly> = Vec::new();
        for g in gs {
            if !minimal.iter().any(|h| divides(&h.lead().0, &g.lead().0)) {
                minimal.push(g);
            }
        }
        let mut out = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<&QPoly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
            let lead = minimal[i].lead().clone();
            let mut tail = minimal[i].clone();
            tail.terms.pop();
            let mut r = reduce(&tail, &others, ord);
            r.terms.push(lead);
            out.push(r.monic());
        }
        out
    }
}

fn spoly(f: &QPoly, g: &QPoly, l: &[u32], ord: MonoOrder) -> QPoly {
    let (fm, fc) = f.lead();
    let (gm, gc) = g.lead();
    let qf: Vec<u32> = l.iter().zip(fm).map(|(a, b)| a - b).collect();
    let qg: Vec<u32> = l.iter().zip(gm).map(|(a, b)| a - b).collect();
    let zero = QPoly::zero();
    let a = zero.sub_scaled(&-fc.recip(), &qf, f, ord);
    a.sub_scaled(&gc.recip(), &qg, g, ord)
}

/// Reduced Groebner basis of the ideal generated by `gens`.
pub fn groebner(gens: &[QPoly], ord: MonoOrder) -> Vec<QPoly> {
    let mut b = GbBuilder::new(ord);
    b.add_all(gens.iter().filter(|g| !g.is_zero()).map(|g| g.reorder(ord)));
    b.reduced()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(terms: &[(&[u32], i64)], ord: MonoOrder) -> QPoly {
        QPoly::from_terms(terms.iter().map(|(m, c)| (m.to_vec(), rat(*c))).collect(), ord)
    }

    #[test]
    fn cusp_and_line() {
        let o = MonoOrder::Grevlex;
        // vars (x, y): {y^2 + x^3, y} -> {y, x^3}
        let g = groebner(&[q(&[(&[0, 2], 1), (&[3, 0], 1)], o), q(&[(&[0, 1], 1)], o)], o);
        assert_eq!(g, vec![q(&[(&[0, 1], 1)], o), q(&[(&[3, 0], 1)], o)]);
    }

    #[test]
    fn monomial_square_is_its_own_basis() {
        let o = MonoOrder::Grevlex;
        let gens = vec![q(&[(&[2, 0], 1)], o), q(&[(&[1, 1], 1)], o), q(&[(&[0, 2], 1)], o)];
        let mut g = groebner(&gens, o);
        g.sort_by(|a, b| o.cmp(&b.lead().0, &a.lead().0));
        assert_eq!(g, gens);
    }

    #[test]
    fn lex_elimination_finds_univariate() {
        // x - y^2, y^2 - 1 under lex: contains y^2 - 1 and x - 1
        let o = MonoOrder::Lex;
        let g = groebner(&[q(&[(&[1, 0], 1), (&[0, 2], -1)], o), q(&[(&[0, 2], 1), (&[0, 0], -1)], o)], o);
        assert!(g.iter().any(|p| p == &q(&[(&[1, 0], 1), (&[0, 0], -1)], o)));
    }
}
