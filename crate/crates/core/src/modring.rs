//! Arithmetic in the residue ring Z/p^nZ and its unit group.

use serde::Serialize;

use crate::error::{Error, Result};

/// Trial-division primality test; adequate for the 32-bit range used here.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut d = 3u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= x {
        if x % d == 0 {
            out.push(d);
            while x % d == 0 {
                x /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push(x);
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// The modulus p^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Modulus {
    p: u64,
    n: u32,
    pn: u64,
}

/// A residue modulo p^n, always stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Residue(u32);

impl Residue {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl From<Residue> for u64 {
    fn from(r: Residue) -> u64 {
        r.0 as u64
    }
}

impl Modulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ParamOutOfRange("n must be at least 1".into()));
        }
        let mut pn = 1u64;
        for _ in 0..n {
            pn = pn
                .checked_mul(p)
                .filter(|&v| v <= 1 << 31)
                .ok_or(Error::ModulusTooLarge { p, n })?;
        }
        Ok(Self { p, n, pn })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// p^n
    pub fn pn(&self) -> u64 {
        self.pn
    }

    /// p^k for k <= n.
    pub fn p_pow(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    /// The same prime at a lower (or equal) level.
    pub fn at_level(&self, n: u32) -> Result<Self> {
        Modulus::new(self.p, n)
    }

    /// Reduces an arbitrary signed integer.
    pub fn residue(&self, x: i64) -> Residue {
        Residue(x.rem_euclid(self.pn as i64) as u32)
    }

    pub fn add(&self, x: Residue, y: Residue) -> Residue {
        Residue(((x.0 as u64 + y.0 as u64) % self.pn) as u32)
    }

    pub fn sub(&self, x: Residue, y: Residue) -> Residue {
        Residue(((x.0 as u64 + self.pn - y.0 as u64) % self.pn) as u32)
    }

    pub fn neg(&self, x: Residue) -> Residue {
        Residue(((self.pn - x.0 as u64) % self.pn) as u32)
    }

    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        Residue((x.0 as u64 * y.0 as u64 % self.pn) as u32)
    }

    pub fn pow(&self, x: Residue, mut e: u64) -> Residue {
        let mut base = x.0 as u64;
        let mut acc = 1 % self.pn;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.pn;
            }
            base = base * base % self.pn;
            e >>= 1;
        }
        Residue(acc as u32)
    }

    pub fn is_unit(&self, x: Residue) -> bool {
        x.0 as u64 % self.p != 0
    }

    pub fn inv(&self, x: Residue) -> Result<Residue> {
        if !self.is_unit(x) {
            return Err(Error::NonUnit {
                value: x.0 as u64,
                modulus: self.pn,
            });
        }
        // extended Euclid on (x, pn)
        let (mut r0, mut r1) = (self.pn as i64, x.0 as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.residue(t0))
    }

    /// |(Z/p^nZ)^x| = p^(n-1)(p-1)
    pub fn unit_count(&self) -> u64 {
        self.pn / self.p * (self.p - 1)
    }

    /// Multiplicative order of a unit.
    pub fn unit_order(&self, x: Residue) -> Result<u64> {
        if !self.is_unit(x) {
            return Err(Error::NonUnit {
                value: x.0 as u64,
                modulus: self.pn,
            });
        }
        let mut ord = self.unit_count();
        for q in prime_factors(ord) {
            while ord % q == 0 && self.pow(x, ord / q).0 == 1 % self.pn as u32 {
                ord /= q;
            }
        }
        Ok(ord)
    }

    /// The least primitive root of (Z/p^nZ)^x, for odd p.
    pub fn least_primitive_root(&self) -> Result<Residue> {
        if self.p == 2 {
            return Err(Error::OddPrimeRequired(2));
        }
        let target = self.unit_count();
        (2..self.pn)
            .map(|w| Residue(w as u32))
            .find(|&w| self.is_unit(w) && self.unit_order(w) == Ok(target))
            .ok_or_else(|| Error::Invariant(format!("no primitive root mod {}", self.pn)))
    }

    /// A unit of order exactly p - 1: the least primitive root raised to p^(n-1).
    pub fn element_t(&self) -> Result<Residue> {
        let w = self.least_primitive_root()?;
        Ok(self.pow(w, self.pn / self.p))
    }

    /// 1 - p as a residue.
    pub fn one_minus_p(&self) -> Residue {
        self.residue(1 - self.p as i64)
    }

    /// 1 + p + ... + p^(n-1), the inverse of 1 - p.
    pub fn geometric_sum(&self) -> Residue {
        let s: u64 = (0..self.n).map(|k| self.p.pow(k)).sum();
        self.residue((s % self.pn) as i64)
    }
}
