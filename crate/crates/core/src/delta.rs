//! Relative derivative ideals `Delta^i(I/S)` and singular loci.

use crate::ideal::Ideal;

/// `I` plus all first partials of its generators in the chart variables (never `eps`).
pub fn delta(i: &Ideal) -> Ideal {
    if i.gens().iter().any(|g| g.is_unit()) {
        return Ideal::unit(i.nvars(), i.m());
    }
    let mut gens = i.gens().to_vec();
    for g in i.gens() {
        for v in 0..i.nvars() {
            let d = g.derivative(v);
            if !d.is_zero() {
                gens.push(d);
            }
        }
    }
    Ideal::new(i.nvars(), i.m(), gens).pruned()
}

/// The `k`-fold iterate of [`delta`].
pub fn delta_power(i: &Ideal, k: u32) -> Ideal {
    let mut cur = i.clone();
    for _ in 0..k {
        if cur.gens().iter().any(|g| g.is_unit()) {
            break;
        }
        cur = delta(&cur);
    }
    cur
}

/// The ladder `Delta^0(I) ⊆ Delta^1(I) ⊆ ...`, filled on demand.
#[derive(Clone, Debug)]
pub struct DeltaCache {
    ladder: Vec<Ideal>,
}

impl DeltaCache {
    pub fn new(base: Ideal) -> Self {
        DeltaCache { ladder: vec![base] }
    }

    pub fn base(&self) -> &Ideal {
        &self.ladder[0]
    }

    pub fn get(&mut self, k: usize) -> &Ideal {
        while self.ladder.len() <= k {
            let next = delta(self.ladder.last().unwrap());
            self.ladder.push(next);
        }
        &self.ladder[k]
    }

    pub fn ladder(&self) -> &[Ideal] {
        &self.ladder
    }
}

/// Fiber ideal whose zero set is the locus where the fiber of `I` has order at least `b`.
pub fn order_locus(i: &Ideal, b: u32) -> Ideal {
    let top = delta_power(&i.fiber(), b.saturating_sub(1));
    Ideal::new(i.nvars(), 1, top.fiber_gb_polys())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::Level;
    use crate::poly::Ring;

    fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
        Ideal::new(r.nvars(), r.m, gens.iter().map(|g| r.parse(g).unwrap()).collect())
    }

    #[test]
    fn first_derivative_ideals() {
        let r = Ring::new(&["x", "z"], 2);
        let d = delta(&ideal(&r, &["z^2 + eps*x^2", "z^3 + x^3"]));
        assert!(d.equals(&ideal(&r, &["z", "eps*x", "x^2"]), Level::Full));
        let r2 = Ring::new(&["x", "y"], 2);
        assert!(delta(&ideal(&r2, &["y^2", "x^3"])).equals(&ideal(&r2, &["y", "x^2"]), Level::Full));
        assert!(delta(&ideal(&r2, &["x"])).is_unit());
    }

    #[test]
    fn ladder_is_increasing() {
        let r = Ring::new(&["x", "z"], 2);
        let mut c = DeltaCache::new(ideal(&r, &["x^5 + eps*x^2*z + z^4"]));
        for k in 0..3 {
            let (a, b) = (c.get(k).clone(), c.get(k + 1).clone());
            assert!(b.contains_ideal(&a, Level::Full));
        }
        let restricted = c.get(2).map(|g| g.substitute(1, &crate::poly::Poly::zero(2, 2)));
        assert!(restricted.contains(&r.parse("x^3").unwrap(), Level::Full));
        assert!(restricted.contains(&r.parse("eps*x").unwrap(), Level::Full));
    }

    #[test]
    fn singular_locus_of_cusp() {
        let r = Ring::new(&["x", "y"], 1);
        let s = order_locus(&ideal(&r, &["y^2 + x^3"]), 2);
        assert!(s.equals(&ideal(&r, &["y", "x^2"]), Level::Fiber));
    }
}
