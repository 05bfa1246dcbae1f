//! Truncated power series coefficients: elements of `Q[eps]/(eps^m)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::CoreError;

/// Largest truncation order accepted by the parsers and the CLI.
pub const MAX_M: usize = 8;

/// `c0 + c1*eps + ... + c_{m-1}*eps^{m-1}` with `eps^m = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ArtinScalar {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ArtinScalar {
    pub fn zero(m: usize) -> Self {
        assert!(m >= 1, "truncation order must be positive");
        ArtinScalar { coeffs: vec![BigRational::zero(); m] }
    }

    pub fn one(m: usize) -> Self {
        Self::from_rational(BigRational::one(), m)
    }

    pub fn from_rational(q: BigRational, m: usize) -> Self {
        let mut s = Self::zero(m);
        s.coeffs[0] = q;
        s
    }

    pub fn from_int(n: i64, m: usize) -> Self {
        Self::from_rational(rat(n), m)
    }

    /// `eps^k`; zero when `k >= m`.
    pub fn eps_pow(k: usize, m: usize) -> Self {
        let mut s = Self::zero(m);
        if k < m {
            s.coeffs[k] = BigRational::one();
        }
        s
    }

    /// Builds from a coefficient list, padding with zeros or truncating to length `m`.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, m: usize) -> Self {
        coeffs.resize(m, BigRational::zero());
        ArtinScalar { coeffs }
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    /// Projection to the residue field.
    pub fn fiber(&self) -> BigRational {
        self.coeffs[0].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Smallest `k` with a nonzero `eps^k` coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Reduction to a smaller (or equal) truncation order.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m >= 1 && m <= self.m());
        ArtinScalar { coeffs: self.coeffs[..m].to_vec() }
    }

    /// Inclusion into a larger truncation order by zero padding.
    pub fn extend(&self, m: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), m)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        ArtinScalar { coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.m());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact inverse of a unit.
    pub fn inverse(&self) -> Result<Self, CoreError> {
        if !self.is_unit() {
            return Err(CoreError::NonUnit(format!("{:?}", self.coeffs)));
        }
        let m = self.m();
        let c0 = &self.coeffs[0];
        let mut out = vec![BigRational::zero(); m];
        out[0] = c0.recip();
        for k in 1..m {
            let mut s = BigRational::zero();
            for j in 1..=k {
                s += &self.coeffs[j] * &out[k - j];
            }
            out[k] = -s / c0;
        }
        Ok(ArtinScalar { coeffs: out })
    }

    fn check_m(&self, other: &Self) {
        assert_eq!(self.m(), other.m(), "mixed truncation orders");
    }
}

impl Add for &ArtinScalar {
    type Output = ArtinScalar;
    fn add(self, rhs: &ArtinScalar) -> ArtinScalar {
        self.check_m(rhs);
        ArtinScalar { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ArtinScalar {
    type Output = ArtinScalar;
    fn sub(self, rhs: &ArtinScalar) -> ArtinScalar {
        self.check_m(rhs);
        ArtinScalar { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ArtinScalar {
    type Output = ArtinScalar;
    fn mul(self, rhs: &ArtinScalar) -> ArtinScalar {
        self.check_m(rhs);
        let m = self.m();
        let mut out = vec![BigRational::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(m - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        ArtinScalar { coeffs: out }
    }
}

impl Neg for &ArtinScalar {
    type Output = ArtinScalar;
    fn neg(self) -> ArtinScalar {
        ArtinScalar { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for ArtinScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match k {
                0 => c.to_string(),
                1 => format!("{c}*eps"),
                _ => format!("{c}*eps^{k}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_number_product_cancels() {
        let a = &ArtinScalar::one(2) + &ArtinScalar::eps_pow(1, 2);
        let b = &ArtinScalar::one(2) - &ArtinScalar::eps_pow(1, 2);
        assert!((&a * &b).is_one());
    }

    #[test]
    fn inverse_of_two_plus_eps() {
        let a = &ArtinScalar::from_int(2, 2) + &ArtinScalar::eps_pow(1, 2);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.coeffs(), &[ratio(1, 2), ratio(-1, 4)]);
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn non_unit_has_no_inverse() {
        assert!(matches!(ArtinScalar::eps_pow(1, 3).inverse(), Err(CoreError::NonUnit(_))));
    }

    #[test]
    fn fiber_projection() {
        let a = ArtinScalar::from_coeffs(vec![rat(3), rat(5)], 2);
        assert_eq!(a.fiber(), rat(3));
    }
}
