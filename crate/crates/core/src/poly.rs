//! Polynomials with `ArtinScalar` coefficients over named chart variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::scalar::{rat, ArtinScalar};

/// Exponent vector. Its `Ord` is graded reverse lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u32>);

pub fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().rev().zip(b.iter().rev()) {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(vec![0; n])
    }

    pub fn var(i: usize, n: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Degree in a subset of the variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.0[i]).sum()
    }
}

/// Polynomial over `Q[eps]/(eps^m)` in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    m: usize,
    terms: BTreeMap<Mono, ArtinScalar>,
}

impl Poly {
    pub fn zero(nvars: usize, m: usize) -> Self {
        Poly { nvars, m, terms: BTreeMap::new() }
    }

    pub fn constant(c: ArtinScalar, nvars: usize) -> Self {
        Self::monomial(Mono::one(nvars), c)
    }

    pub fn one(nvars: usize, m: usize) -> Self {
        Self::constant(ArtinScalar::one(m), nvars)
    }

    pub fn int(n: i64, nvars: usize, m: usize) -> Self {
        Self::constant(ArtinScalar::from_int(n, m), nvars)
    }

    pub fn eps(nvars: usize, m: usize) -> Self {
        Self::constant(ArtinScalar::eps_pow(1, m), nvars)
    }

    pub fn var(i: usize, nvars: usize, m: usize) -> Self {
        Self::monomial(Mono::var(i, nvars), ArtinScalar::one(m))
    }

    pub fn monomial(mono: Mono, c: ArtinScalar) -> Self {
        let nvars = mono.0.len();
        let m = c.m();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Poly { nvars, m, terms }
    }

    pub fn from_terms(nvars: usize, m: usize, terms: impl IntoIterator<Item = (Mono, ArtinScalar)>) -> Self {
        let mut p = Poly::zero(nvars, m);
        for (mono, c) in terms {
            p.add_term(mono, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &ArtinScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mono: &Mono) -> ArtinScalar {
        self.terms.get(mono).cloned().unwrap_or_else(|| ArtinScalar::zero(self.m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_one())
    }

    /// A constant polynomial with unit value.
    pub fn is_unit(&self) -> bool {
        self.is_constant() && self.terms.values().next().map_or(false, |c| c.is_unit())
    }

    /// Greatest term in grevlex order.
    pub fn leading(&self) -> Option<(&Mono, &ArtinScalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    /// Smallest total degree of a term; `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).min()
    }

    /// Smallest degree in the given variables over all terms.
    pub fn order_in(&self, vars: &[usize]) -> Option<u32> {
        self.terms.keys().map(|k| k.degree_in(vars)).min()
    }

    pub fn degree_in_var(&self, i: usize) -> u32 {
        self.terms.keys().map(|k| k.0[i]).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|k| k.0[i] > 0)
    }

    /// Smallest `eps`-valuation among the coefficients.
    pub fn eps_valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.valuation()).min()
    }

    fn add_term(&mut self, mono: Mono, c: &ArtinScalar) {
        assert_eq!(mono.0.len(), self.nvars, "variable count mismatch");
        assert_eq!(c.m(), self.m, "truncation order mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(old) => {
                let s = &*old + c;
                if s.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(mono, c.clone());
            }
        }
    }

    fn check(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert_eq!(self.m, other.m, "truncation order mismatch");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check(other);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, m: self.m, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check(other);
        let mut out = Poly::zero(self.nvars, self.m);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka.mul(kb), &(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &ArtinScalar) -> Poly {
        let mut out = Poly::zero(self.nvars, self.m);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), &(a * c));
        }
        out
    }

    pub fn scale_rational(&self, q: &BigRational) -> Poly {
        self.scale(&ArtinScalar::from_rational(q.clone(), self.m))
    }

    pub fn mul_mono(&self, mono: &Mono) -> Poly {
        Poly {
            nvars: self.nvars,
            m: self.m,
            terms: self.terms.iter().map(|(k, c)| (k.mul(mono), c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars, self.m);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Formal partial derivative in variable `i` (never in `eps`).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars, self.m);
        for (k, c) in &self.terms {
            let e = k.0[i];
            if e == 0 {
                continue;
            }
            let mut nk = k.clone();
            nk.0[i] -= 1;
            out.add_term(nk, &c.scale(&rat(e as i64)));
        }
        out
    }

    /// Residue modulo `eps`, as a polynomial with `m = 1`.
    pub fn fiber(&self) -> Poly {
        self.truncate(1)
    }

    pub fn truncate(&self, m: usize) -> Poly {
        let mut out = Poly::zero(self.nvars, m);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &c.truncate(m));
        }
        out
    }

    pub fn extend(&self, m: usize) -> Poly {
        Poly {
            nvars: self.nvars,
            m,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.extend(m))).collect(),
        }
    }

    /// Ring map sending variable `i` to `images[i]`; the images fix the target variable count.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let tn = images.first().map_or(self.nvars, |p| p.nvars);
        let mut out = Poly::zero(tn, self.m);
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(tn, self.m), p.clone()]).collect();
        for (k, c) in &self.terms {
            let mut t = Poly::constant(c.clone(), tn);
            for (i, &e) in k.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][e as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Replaces variable `i` by `image`.
    pub fn substitute(&self, i: usize, image: &Poly) -> Poly {
        let images: Vec<Poly> = (0..self.nvars)
            .map(|j| if j == i { image.clone() } else { Poly::var(j, self.nvars, self.m) })
            .collect();
        self.compose(&images)
    }

    /// Sets variable `i` to zero and removes it from the variable list.
    pub fn restrict_drop(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars - 1, self.m);
        for (k, c) in &self.terms {
            if k.0[i] > 0 {
                continue;
            }
            let mut e = k.0.clone();
            e.remove(i);
            out.add_term(Mono(e), c);
        }
        out
    }

    /// Re-indexes variables: old variable `j` becomes `map[j]` in a ring with `nvars` variables.
    pub fn remap(&self, map: &[usize], nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars, self.m);
        for (k, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (j, &x) in k.0.iter().enumerate() {
                e[map[j]] += x;
            }
            out.add_term(Mono(e), c);
        }
        out
    }

    /// Largest power of variable `i` dividing every term.
    pub fn var_adic_order(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|k| k.0[i]).min()
    }

    /// Exact division by `x_i^k`.
    pub fn div_var_power(&self, i: usize, k: u32) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (mono, c) in &self.terms {
            if mono.0[i] < k {
                return None;
            }
            let mut e = mono.clone();
            e.0[i] -= k;
            terms.insert(e, c.clone());
        }
        Some(Poly { nvars: self.nvars, m: self.m, terms })
    }

    /// Divides by the leading coefficient when it is a unit.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_unit() => {
                let inv = c.inverse().expect("unit");
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    /// Makes the coefficient of the greatest term with unit coefficient equal to one,
    /// and clears denominators otherwise; used for canonical display of generators.
    pub fn normalized(&self) -> Poly {
        if let Some((_, c)) = self.terms.iter().rev().find(|(_, c)| c.is_unit()) {
            let inv = c.inverse().expect("unit");
            return self.scale(&inv);
        }
        if let Some((_, c)) = self.leading() {
            if let Some(v) = c.valuation() {
                let lead = c.coeff(v).clone();
                return self.scale_rational(&lead.recip());
            }
        }
        self.clone()
    }

    /// Coefficient of `eps^k` as a polynomial over `Q` (with `m = 1`).
    pub fn eps_layer(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.nvars, 1);
        for (mono, c) in &self.terms {
            out.add_term(mono.clone(), &ArtinScalar::from_rational(c.coeff(k).clone(), 1));
        }
        out
    }

    /// Value at a point with rational coordinates, on the fiber.
    pub fn eval_fiber(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (k, c) in &self.terms {
            let mut t = c.fiber();
            for (i, &e) in k.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }
}

/// Variable names and truncation order of a chart ring; owns parsing and printing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    pub vars: Vec<String>,
    pub m: usize,
}

impl Ring {
    pub fn new<S: AsRef<str>>(vars: &[S], m: usize) -> Self {
        Ring { vars: vars.iter().map(|s| s.as_ref().to_string()).collect(), m }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| CoreError::UnknownVariable(name.to_string()))
    }

    pub fn var(&self, name: &str) -> Poly {
        Poly::var(self.var_index(name).expect("known variable"), self.nvars(), self.m)
    }

    /// Parses the canonical grammar, e.g. `3/2*eps*x^2*y - y^3 + 1`.
    pub fn parse(&self, s: &str) -> Result<Poly> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, ring: self };
        let poly = p.poly()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(poly)
    }

    /// Parses `[g1, g2, ...]`.
    pub fn parse_list(&self, s: &str) -> Result<Vec<Poly>> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or(CoreError::Parse { msg: "ideal must be enclosed in [ ]".into(), line: 1, column: 1 })?;
        if inner.trim().is_empty() {
            return Ok(Vec::new());
        }
        inner.split(',').map(|g| self.parse(g)).collect()
    }

    pub fn fmt(&self, p: &Poly) -> String {
        format_poly(p, &self.vars)
    }
}

/// Canonical printing: terms in decreasing grevlex order, each coefficient split by `eps` power.
pub fn format_poly<S: AsRef<str>>(p: &Poly, names: &[S]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (mono, c) in p.terms.iter().rev() {
        for (k, q) in c.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mut factors: Vec<String> = Vec::new();
            match k {
                0 => {}
                1 => factors.push("eps".into()),
                _ => factors.push(format!("eps^{k}")),
            }
            for (i, &e) in mono.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].as_ref().to_string()),
                    _ => factors.push(format!("{}^{e}", names[i].as_ref())),
                }
            }
            let neg = q.is_negative();
            let a = q.abs();
            let body = if factors.is_empty() {
                a.to_string()
            } else if a.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", a, factors.join("*"))
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let _ = write!(out, "{body}");
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> CoreError {
        CoreError::Parse { msg: msg.to_string(), line: 1, column: self.pos + 1 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn poly(&mut self) -> Result<Poly> {
        let n = self.ring.nvars();
        let m = self.ring.m;
        let mut acc = Poly::zero(n, m);
        let mut sign = 1i64;
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(b'+') => {
                    sign = 1;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let n = self.ring.nvars();
        let m = self.ring.m;
        let mut acc = Poly::one(n, m);
        loop {
            let f = self.factor()?;
            acc = acc.mul(&f);
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected exponent"));
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            s.parse::<u32>().map_err(|_| self.err("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let n = self.ring.nvars();
        let m = self.ring.m;
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        if c == b'(' {
            self.pos += 1;
            let inner = self.poly()?;
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(inner.pow(e));
        }
        if c.is_ascii_digit() {
            let num = self.integer()?;
            let mut q = BigRational::from_integer(num);
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b'/') {
                self.pos += 1;
                self.skip_ws();
                let den = self.integer()?;
                if den.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                q = BigRational::new(q.numer().clone(), den);
            }
            return Ok(Poly::constant(ArtinScalar::from_rational(q, m), n));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            let e = self.exponent()?;
            if name == "eps" {
                return Ok(Poly::constant(ArtinScalar::eps_pow(e as usize, m), n));
            }
            let i = self.ring.vars.iter().position(|v| *v == name).ok_or_else(|| {
                let mut err = self.err(&format!("unknown variable `{name}`"));
                if let CoreError::Parse { column, .. } = &mut err {
                    *column = start + 1;
                }
                err
            })?;
            let mut mono = Mono::one(n);
            mono.0[i] = e;
            return Ok(Poly::monomial(mono, ArtinScalar::one(m)));
        }
        Err(self.err(&format!("unexpected character `{}`", c as char)))
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().expect("digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> Ring {
        Ring::new(&["x", "y"], 2)
    }

    #[test]
    fn grevlex_orders_by_degree_then_reverse() {
        // x^2 > x*y > y^2 > x > y > 1
        let ms = [vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1], vec![0, 0]];
        for w in ms.windows(2) {
            assert_eq!(grevlex_cmp(&w[0], &w[1]), Ordering::Greater);
        }
    }

    #[test]
    fn canonical_round_trip() {
        let r = r2();
        for s in ["3/2*eps*x^2*y", "x^3 + y^2 + eps*x", "-x + 1", "0", "eps", "-2/3*x*y - 5"] {
            let p = r.parse(s).unwrap();
            let printed = r.fmt(&p);
            assert_eq!(r.parse(&printed).unwrap(), p, "{s} -> {printed}");
        }
        assert_eq!(r.fmt(&r.parse("3/2*eps*x^2*y").unwrap()), "3/2*eps*x^2*y");
    }

    #[test]
    fn derivative_examples() {
        let r = Ring::new(&["x", "z"], 2);
        let f = r.parse("z^2 + eps*x^2").unwrap();
        assert_eq!(f.derivative(0), r.parse("2*eps*x").unwrap());
        let g = r.parse("x^5 + eps*x^2*z + z^4").unwrap();
        assert_eq!(g.derivative(0), r.parse("5*x^4 + 2*eps*x*z").unwrap());
        assert!(r.parse("z^3").unwrap().derivative(0).is_zero());
    }

    #[test]
    fn parse_reports_column() {
        let r = r2();
        match r.parse("x + w") {
            Err(CoreError::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eps_power_past_truncation_vanishes() {
        let r = r2();
        assert!(r.parse("eps^2*x").unwrap().is_zero());
    }

    #[test]
    fn translation_by_eps() {
        let r = Ring::new(&["x"], 2);
        let f = r.parse("x^3").unwrap();
        let g = f.substitute(0, &r.parse("x - 3*eps").unwrap());
        assert_eq!(g, r.parse("x^3 - 9*eps*x^2").unwrap());
    }
}
