//! Arithmetic over a word-sized prime field F_l, the working field of the
//! character-table engine.

mod dlog;
mod linalg;
mod poly;

pub use dlog::DiscreteLog;
pub use linalg::{charpoly, nullspace, rref, Basis};
pub use poly::{poly_roots, Poly};

use crate::modring::prime_factors;

/// The prime field F_l with l < 2^32, so products fit in a u64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < 1 << 32, "field characteristic out of range");
        Self { p }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    /// The least generator of the multiplicative group.
    pub fn primitive_root(&self) -> u64 {
        let order = self.p - 1;
        let qs = prime_factors(order);
        (2..self.p)
            .find(|&g| qs.iter().all(|&q| self.pow(g, order / q) != 1))
            .expect("prime field has a primitive root")
    }

    /// An element of exact multiplicative order `e`; requires e | l - 1.
    pub fn element_of_order(&self, e: u64) -> u64 {
        assert_eq!((self.p - 1) % e, 0, "order must divide l - 1");
        self.pow(self.primitive_root(), (self.p - 1) / e)
    }

    /// Lifts a residue to the integer in [0, bound], if there is one.
    pub fn lift_bounded(&self, x: u64, bound: u64) -> Option<u64> {
        (x <= bound).then_some(x)
    }

    /// Sum of products of pairs, reduced once at the end.
    pub fn dot<I: IntoIterator<Item = (u64, u64)>>(&self, pairs: I) -> u64 {
        let acc: u128 = pairs.into_iter().map(|(a, b)| a as u128 * b as u128).sum();
        (acc % self.p as u128) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_basics() {
        let f = PrimeField::new(19);
        assert_eq!(f.mul(7, 11), 1);
        assert_eq!(f.inv(7), 11);
        assert_eq!(f.neg(0), 0);
        assert_eq!(f.from_i64(-1), 18);
        assert_eq!(f.primitive_root(), 2);
        let theta = f.element_of_order(6);
        assert_eq!(f.pow(theta, 6), 1);
        assert_ne!(f.pow(theta, 3), 1);
        assert_ne!(f.pow(theta, 2), 1);
    }

    #[test]
    fn dot_reduces_once() {
        let f = PrimeField::new(4_294_967_291);
        let big = f.p() - 1;
        let d = f.dot((0..1000).map(|_| (big, big)));
        assert_eq!(d, 1000 % f.p());
    }
}
