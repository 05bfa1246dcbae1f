//! Ideals of `A[x]` with `A = Q[eps]/(eps^m)`.
//!
//! Full-level questions are answered in `Q[x, e]` modulo `e^m`: an element lies in
//! `I` over `A` exactly when it lies in `I + (e^m)` there.  Fiber-level questions use
//! the residue ideal in `Q[x]`.

use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::groebner::{GbBuilder, MonoOrder, QPoly};
use crate::poly::{Mono, Poly, Ring};
use crate::scalar::ArtinScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Fiber,
    Full,
}

/// Embeds into `Q[x, e]` with `e` as the last variable.
pub fn to_full_q(p: &Poly, ord: MonoOrder) -> QPoly {
    let mut terms = Vec::new();
    for (mono, c) in p.terms() {
        for (k, q) in c.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mut e = mono.0.clone();
            e.push(k as u32);
            terms.push((e, q.clone()));
        }
    }
    QPoly::from_terms(terms, ord)
}

pub fn from_full_q(q: &QPoly, nvars: usize, m: usize) -> Poly {
    let mut out = Poly::zero(nvars, m);
    for (e, c) in &q.terms {
        let k = e[nvars] as usize;
        if k >= m {
            continue;
        }
        let mut s = ArtinScalar::zero(m);
        s = &s + &{
            let mut t = ArtinScalar::eps_pow(k, m);
            t = t.scale(c);
            t
        };
        out = out.add(&Poly::monomial(Mono(e[..nvars].to_vec()), s));
    }
    out
}

/// Fiber of `p` in `Q[x]`.
pub fn to_fiber_q(p: &Poly, ord: MonoOrder) -> QPoly {
    QPoly::from_terms(p.terms().map(|(m, c)| (m.0.clone(), c.fiber())).filter(|(_, c)| !c.is_zero()).collect(), ord)
}

pub fn from_fiber_q(q: &QPoly, nvars: usize, m: usize) -> Poly {
    Poly::from_terms(nvars, m, q.terms.iter().map(|(e, c)| (Mono(e[..nvars].to_vec()), ArtinScalar::from_rational(c.clone(), m))))
}

fn eps_power_q(nvars: usize, m: usize) -> QPoly {
    let mut e = vec![0; nvars];
    e.push(m as u32);
    QPoly { terms: vec![(e, BigRational::one())] }
}

#[derive(Clone, Debug)]
pub struct Ideal {
    nvars: usize,
    m: usize,
    gens: Vec<Poly>,
    fiber_gb: OnceLock<Arc<GbBuilder>>,
    full_gb: OnceLock<Arc<GbBuilder>>,
}

impl PartialEq for Ideal {
    /// Structural equality of generator lists; use [`Ideal::equals`] for ideal equality.
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.m == other.m && self.gens == other.gens
    }
}

impl Ideal {
    pub fn new(nvars: usize, m: usize, gens: Vec<Poly>) -> Self {
        let mut out: Vec<Poly> = Vec::with_capacity(gens.len());
        for g in gens {
            assert_eq!(g.nvars(), nvars, "variable count mismatch");
            assert_eq!(g.m(), m, "truncation order mismatch");
            if !g.is_zero() && !out.contains(&g) {
                out.push(g);
            }
        }
        Ideal { nvars, m, gens: out, fiber_gb: OnceLock::new(), full_gb: OnceLock::new() }
    }

    pub fn from_gens(gens: Vec<Poly>) -> Self {
        let g = gens.first().expect("at least one generator");
        Self::new(g.nvars(), g.m(), gens)
    }

    pub fn unit(nvars: usize, m: usize) -> Self {
        Self::new(nvars, m, vec![Poly::one(nvars, m)])
    }

    /// Ideal of a coordinate subspace `V(x_i : i in vars)`.
    pub fn of_vars(vars: &[usize], nvars: usize, m: usize) -> Self {
        Self::new(nvars, m, vars.iter().map(|&i| Poly::var(i, nvars, m)).collect())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn fiber_builder(&self) -> &GbBuilder {
        self.fiber_gb.get_or_init(|| {
            let mut b = GbBuilder::new(MonoOrder::Grevlex);
            b.add_all(self.gens.iter().map(|g| to_fiber_q(g, MonoOrder::Grevlex)).filter(|q| !q.is_zero()));
            Arc::new(b)
        })
    }

    pub fn full_builder(&self) -> &GbBuilder {
        self.full_gb.get_or_init(|| {
            let mut b = GbBuilder::new(MonoOrder::Grevlex);
            let mut gens = vec![eps_power_q(self.nvars, self.m)];
            gens.extend(self.gens.iter().map(|g| to_full_q(g, MonoOrder::Grevlex)));
            b.add_all(gens);
            Arc::new(b)
        })
    }

    /// Reduced Groebner basis of the fiber ideal; empty for the zero ideal.
    pub fn fiber_gb(&self) -> Vec<QPoly> {
        self.fiber_builder().reduced()
    }

    /// Fiber Groebner basis as polynomials with `m = 1`.
    pub fn fiber_gb_polys(&self) -> Vec<Poly> {
        self.fiber_gb().iter().map(|q| from_fiber_q(q, self.nvars, 1)).collect()
    }

    pub fn contains(&self, f: &Poly, level: Level) -> bool {
        match level {
            Level::Fiber => self.fiber_builder().contains(&to_fiber_q(f, MonoOrder::Grevlex)),
            Level::Full => self.full_builder().contains(&to_full_q(f, MonoOrder::Grevlex)),
        }
    }

    pub fn contains_ideal(&self, other: &Ideal, level: Level) -> bool {
        other.gens.iter().all(|g| self.contains(g, level))
    }

    /// Two-sided membership.
    pub fn equals(&self, other: &Ideal, level: Level) -> bool {
        self.contains_ideal(other, level) && other.contains_ideal(self, level)
    }

    pub fn is_unit(&self) -> bool {
        self.fiber_builder().is_unit()
    }

    pub fn fiber_is_zero(&self) -> bool {
        self.gens.iter().all(|g| g.fiber().is_zero())
    }

    /// Canonical generators: the reduced Groebner basis at full level.
    pub fn canonical(&self) -> Ideal {
        let gb = self.full_builder().reduced();
        let gens: Vec<Poly> = gb.iter().map(|q| from_full_q(q, self.nvars, self.m)).filter(|p| !p.is_zero()).collect();
        let mut out = Ideal::new(self.nvars, self.m, gens);
        let _ = out.full_gb.set(self.full_builder().clone().into());
        out.gens.sort_by(|a, b| a.leading().map(|t| t.0).cmp(&b.leading().map(|t| t.0)));
        out
    }

    /// Drops generators that lie in the ideal of the ones kept before them.
    pub fn pruned(&self) -> Ideal {
        let mut gens = self.gens.clone();
        gens.sort_by(|a, b| {
            let ka = (a.total_degree(), a.num_terms());
            let kb = (b.total_degree(), b.num_terms());
            ka.cmp(&kb).then_with(|| a.leading().map(|t| t.0).cmp(&b.leading().map(|t| t.0)))
        });
        let mut b = GbBuilder::new(MonoOrder::Grevlex);
        b.add(eps_power_q(self.nvars, self.m));
        let mut kept = Vec::new();
        for g in gens {
            if b.is_unit() {
                break;
            }
            if b.add(to_full_q(&g, MonoOrder::Grevlex)) {
                kept.push(g.normalized());
            }
        }
        if b.is_unit() {
            return Ideal::unit(self.nvars, self.m);
        }
        let out = Ideal::new(self.nvars, self.m, kept);
        let _ = out.full_gb.set(Arc::new(b));
        out
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Ideal {
        let gens: Vec<Poly> = self.gens.iter().map(f).collect();
        let (n, m) = gens.first().map_or((self.nvars, self.m), |g| (g.nvars(), g.m()));
        Ideal::new(n, m, gens)
    }

    pub fn fiber(&self) -> Ideal {
        self.truncate(1)
    }

    pub fn truncate(&self, m: usize) -> Ideal {
        Ideal::new(self.nvars, m, self.gens.iter().map(|g| g.truncate(m)).collect())
    }

    pub fn extend(&self, m: usize) -> Ideal {
        Ideal::new(self.nvars, m, self.gens.iter().map(|g| g.extend(m)).collect())
    }

    /// Image under the ring map sending variable `i` to `images[i]`.
    pub fn compose(&self, images: &[Poly]) -> Ideal {
        let n = images.first().map_or(self.nvars, |p| p.nvars());
        Ideal::new(n, self.m, self.gens.iter().map(|g| g.compose(images)).collect())
    }

    pub fn substitute(&self, i: usize, image: &Poly) -> Ideal {
        self.map(|g| g.substitute(i, image))
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(self.nvars, self.m, gens)
    }

    pub fn sum_all<'a>(nvars: usize, m: usize, ideals: impl IntoIterator<Item = &'a Ideal>) -> Ideal {
        let mut gens = Vec::new();
        for i in ideals {
            gens.extend(i.gens.iter().cloned());
        }
        Ideal::new(nvars, m, gens)
    }

    /// Generator-wise product, without pruning.
    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.mul(b));
            }
        }
        Ideal::new(self.nvars, self.m, gens)
    }

    /// `I^k` by repeated squaring; intermediate generator lists are pruned.
    pub fn power(&self, k: u32) -> Ideal {
        if k == 0 {
            return Ideal::unit(self.nvars, self.m);
        }
        if k == 1 {
            return self.clone();
        }
        let mut acc: Option<Ideal> = None;
        let mut base = self.pruned();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.product(&base).pruned(),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.product(&base).pruned();
            }
        }
        acc.unwrap()
    }

    /// Divides every generator by `x_i^k`; fails on the first generator outside `(x_i^k)`.
    pub fn div_var_power(&self, i: usize, k: u32) -> Result<Ideal> {
        let mut gens = Vec::with_capacity(self.gens.len());
        for (idx, g) in self.gens.iter().enumerate() {
            match g.div_var_power(i, k) {
                Some(q) => gens.push(q),
                None => return Err(CoreError::NotDivisible(idx)),
            }
        }
        Ok(Ideal::new(self.nvars, self.m, gens))
    }

    /// Largest `a` with `I` inside `(x_i^a)`; `None` for the zero ideal.
    pub fn var_adic_order(&self, i: usize) -> Option<u32> {
        self.gens.iter().filter_map(|g| g.var_adic_order(i)).min()
    }

    /// Order at a point: translate it to the origin and take the least term degree.
    /// `eps` counts as a coefficient, so it does not raise the order.
    pub fn order_at_point(&self, point: &[ArtinScalar], level: Level) -> Result<u32> {
        assert_eq!(point.len(), self.nvars);
        let (src, m) = match level {
            Level::Fiber => (self.fiber(), 1),
            Level::Full => (self.clone(), self.m),
        };
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let p = if m == 1 { point[i].truncate(1) } else { point[i].clone() };
                Poly::var(i, self.nvars, m).add(&Poly::constant(p, self.nvars))
            })
            .collect();
        src.gens
            .iter()
            .filter_map(|g| g.compose(&images).order())
            .min()
            .ok_or(CoreError::InfiniteOrder)
    }

    /// Order along the coordinate center `V(x_i : i in vars)`: the least degree in those
    /// variables over all terms of all generators.
    pub fn order_along(&self, vars: &[usize]) -> Result<u32> {
        self.gens.iter().filter_map(|g| g.order_in(vars)).min().ok_or(CoreError::InfiniteOrder)
    }

    /// Same quantity decided by membership: the largest `s` with every generator in `I(C)^s`.
    pub fn order_along_by_membership(&self, vars: &[usize], cap: u32) -> u32 {
        let ic = Ideal::of_vars(vars, self.nvars, self.m);
        let mut s = 0;
        while s < cap {
            let p = ic.power(s + 1);
            if !p.contains_ideal(self, Level::Full) {
                break;
            }
            s += 1;
        }
        s
    }

    /// `(g1,g2,...)`.
    pub fn display(&self, ring: &Ring) -> String {
        let gens: Vec<String> = self.gens.iter().map(|g| ring.fmt(g)).collect();
        format!("({})", gens.join(","))
    }
}

/// Coordinates of a point with rational fiber values.
pub fn rational_point(coords: &[BigRational], m: usize) -> Vec<ArtinScalar> {
    coords.iter().map(|c| ArtinScalar::from_rational(c.clone(), m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
        Ideal::new(r.nvars(), r.m, gens.iter().map(|g| r.parse(g).unwrap()).collect())
    }

    #[test]
    fn membership_in_nilpotent_example() {
        let r = Ring::new(&["x"], 2);
        let i = ideal(&r, &["x^2", "eps*x"]);
        assert!(i.contains(&r.parse("eps*x").unwrap(), Level::Full));
        assert!(!i.contains(&r.parse("x").unwrap(), Level::Full));
        assert!(i.contains(&r.parse("x^2 + 3*eps*x").unwrap(), Level::Full));
    }

    #[test]
    fn cusp_not_in_square_of_maximal_contact_ideal() {
        let r = Ring::new(&["x", "y"], 1);
        let base = ideal(&r, &["y", "x^2"]);
        let sq = base.power(2);
        assert!(sq.equals(&ideal(&r, &["y^2", "x^2*y", "x^4"]), Level::Full));
        assert!(!sq.contains(&r.parse("y^2 + x^3").unwrap(), Level::Fiber));
    }

    #[test]
    fn orders_of_worked_examples() {
        let r = Ring::new(&["x", "y"], 2);
        let i = ideal(&r, &["eps*x + y^2 + x^3"]);
        let origin = vec![ArtinScalar::zero(2), ArtinScalar::zero(2)];
        assert_eq!(i.order_at_point(&origin, Level::Fiber).unwrap(), 2);
        assert_eq!(i.order_at_point(&origin, Level::Full).unwrap(), 1);
        assert_eq!(i.order_along(&[0, 1]).unwrap(), 1);
        let r3 = Ring::new(&["x", "z"], 2);
        let j = ideal(&r3, &["x^5 + eps*x^2*z + z^4"]);
        assert_eq!(j.order_along(&[0, 1]).unwrap(), 3);
        assert_eq!(j.order_along_by_membership(&[0, 1], 10), 3);
        let r1 = Ring::new(&["x"], 2);
        assert_eq!(ideal(&r1, &["x^30"]).order_along(&[0]).unwrap(), 30);
    }

    #[test]
    fn exact_division() {
        let r = Ring::new(&["w", "x", "y"], 1);
        let i = ideal(&r, &["w^2*y^2", "w^2*x"]);
        let q = i.div_var_power(0, 2).unwrap();
        assert!(q.equals(&ideal(&r, &["y^2", "x"]), Level::Full));
        assert_eq!(ideal(&r, &["w^2", "w*x"]).div_var_power(0, 2).unwrap_err(), CoreError::NotDivisible(1));
    }

    #[test]
    fn zero_fiber_ideal_has_empty_basis() {
        let r = Ring::new(&["x"], 2);
        let i = ideal(&r, &["eps*x"]);
        assert!(i.fiber_gb().is_empty());
        assert!(i.fiber_is_zero());
        assert!(matches!(i.order_at_point(&[ArtinScalar::zero(2)], Level::Fiber), Err(CoreError::InfiniteOrder)));
    }
}
