//! Exact character values as sums of roots of unity.

use std::f64::consts::TAU;
use std::sync::Mutex;

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::ffield::PrimeField;
use crate::modring::gcd;

/// A sum of e-th roots of unity with nonnegative multiplicities, stored as
/// sorted (exponent, multiplicity) pairs with exponents in [0, e).
///
/// A character value chi(g) is the trace of a matrix of finite order, so the
/// multiset of its eigenvalues is a canonical exact representation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CycloValue {
    terms: Vec<(u32, u32)>,
}

impl CycloValue {
    pub fn from_terms(mut terms: Vec<(u32, u32)>) -> Self {
        terms.retain(|&(_, m)| m != 0);
        terms.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(terms.len());
        for (t, m) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += m,
                _ => merged.push((t, m)),
            }
        }
        Self { terms: merged }
    }

    pub fn integer(value: u32) -> Self {
        Self::from_terms(vec![(0, value)])
    }

    pub fn terms(&self) -> &[(u32, u32)] {
        &self.terms
    }

    /// Number of eigenvalues, i.e. the degree of the representation.
    pub fn count(&self) -> u64 {
        self.terms.iter().map(|&(_, m)| m as u64).sum()
    }

    /// Whether the value is the rational integer `count()` (all eigenvalues 1).
    pub fn is_trivial(&self) -> bool {
        self.terms.iter().all(|&(t, _)| t == 0)
    }

    /// Complex conjugate, for exponent modulus e.
    pub fn conj(&self, e: u32) -> Self {
        Self::from_terms(self.terms.iter().map(|&(t, m)| ((e - t) % e, m)).collect())
    }

    /// Re-expresses the value for a larger modulus e_new, a multiple of e.
    pub fn rescale(&self, e: u32, e_new: u32) -> Self {
        assert_eq!(e_new % e, 0, "target exponent must be a multiple");
        let f = e_new / e;
        Self::from_terms(self.terms.iter().map(|&(t, m)| (t * f, m)).collect())
    }

    /// Dense integer coefficient vector of length e.
    pub fn to_dense(&self, e: u32) -> Vec<i64> {
        let mut out = vec![0i64; e as usize];
        for &(t, m) in &self.terms {
            out[t as usize] += m as i64;
        }
        out
    }

    pub fn eval_complex(&self, e: u32) -> Complex64 {
        self.terms
            .iter()
            .map(|&(t, m)| Complex64::from_polar(m as f64, TAU * t as f64 / e as f64))
            .sum()
    }

    /// Image in F_l under zeta_e -> theta, given theta^t for t in [0, e).
    pub fn eval_mod(&self, field: &PrimeField, theta_powers: &[u64]) -> u64 {
        field.dot(self.terms.iter().map(|&(t, m)| (m as u64, theta_powers[t as usize])))
    }
}

/// The cyclotomic polynomial Phi_n with integer coefficients, low degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    static CACHE: Mutex<Option<FxHashMap<u32, Vec<i64>>>> = Mutex::new(None);
    if let Some(hit) = CACHE.lock().unwrap().get_or_insert_with(Default::default).get(&n) {
        return hit.clone();
    }
    assert!(n >= 1);
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_div_monic(&num, &cyclotomic_polynomial(d));
    }
    CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(Default::default)
        .insert(n, num.clone());
    num
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dl = den.len();
    let mut q = vec![0i64; num.len() - dl + 1];
    for shift in (0..q.len()).rev() {
        let c = r[shift + dl - 1];
        q[shift] = c;
        for (i, &d) in den.iter().enumerate() {
            r[shift + i] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0), "division is not exact");
    q
}

/// Z[zeta_e] as Z[x]/Phi_e, for exact comparisons of cyclotomic integers.
#[derive(Clone, Debug)]
pub struct CyclotomicField {
    e: u32,
    phi: Vec<i64>,
}

impl CyclotomicField {
    pub fn new(e: u32) -> Self {
        Self {
            e,
            phi: cyclotomic_polynomial(e),
        }
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Euler phi(e), the degree of the field.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Canonical coordinates: the remainder of a dense coefficient vector
    /// modulo Phi_e.
    pub fn canonical(&self, dense: &[i64]) -> Vec<i64> {
        let deg = self.degree();
        let mut r = dense.to_vec();
        for top in (deg..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            let base = top - deg;
            for (i, &ph) in self.phi.iter().enumerate() {
                r[base + i] -= c * ph;
            }
        }
        r.truncate(deg);
        r.resize(deg, 0);
        r
    }

    pub fn canonical_value(&self, v: &CycloValue) -> Vec<i64> {
        self.canonical(&v.to_dense(self.e))
    }

    pub fn is_zero(&self, dense: &[i64]) -> bool {
        self.canonical(dense).iter().all(|&c| c == 0)
    }

    pub fn equal(&self, a: &CycloValue, b: &CycloValue) -> bool {
        a == b || self.canonical_value(a) == self.canonical_value(b)
    }

    /// Whether `v` equals the rational integer `n`.
    pub fn equals_integer(&self, v: &CycloValue, n: i64) -> bool {
        let mut dense = v.to_dense(self.e);
        dense[0] -= n;
        self.is_zero(&dense)
    }
}

/// Order of zeta_e^t.
pub fn root_order(t: u32, e: u32) -> u32 {
    e / gcd(t as u64, e as u64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2
        let phi105 = cyclotomic_polynomial(105);
        assert_eq!(phi105.len() - 1, 48);
        assert!(phi105.contains(&-2));
    }

    #[test]
    fn sum_of_all_roots_is_zero() {
        for e in [3u32, 8, 12, 30] {
            let field = CyclotomicField::new(e);
            let all = CycloValue::from_terms((0..e).map(|t| (t, 1)).collect());
            assert!(field.equals_integer(&all, 0), "e = {e}");
            let one = CycloValue::integer(1);
            assert!(!field.equals_integer(&one, 0));
        }
    }

    #[test]
    fn distinct_multisets_can_be_equal() {
        // 1 + zeta_6^2 = zeta_6
        let field = CyclotomicField::new(6);
        let a = CycloValue::from_terms(vec![(0, 1), (2, 1)]);
        let b = CycloValue::from_terms(vec![(1, 1)]);
        assert_ne!(a, b);
        assert!(field.equal(&a, &b));
        assert!((a.eval_complex(6) - b.eval_complex(6)).norm() < 1e-12);
    }

    #[test]
    fn conj_and_rescale() {
        let v = CycloValue::from_terms(vec![(1, 2), (0, 1), (1, 1)]);
        assert_eq!(v.terms(), &[(0, 1), (1, 3)]);
        assert_eq!(v.conj(5).terms(), &[(0, 1), (4, 3)]);
        assert_eq!(v.rescale(5, 15).terms(), &[(0, 1), (3, 3)]);
        assert_eq!(v.count(), 4);
        assert_eq!(root_order(3, 15), 5);
    }

    #[test]
    fn mod_l_evaluation_is_a_ring_map_on_sums() {
        let f = PrimeField::new(13);
        let theta = f.element_of_order(12);
        let pw: Vec<u64> = (0..12).map(|t| f.pow(theta, t)).collect();
        let v = CycloValue::from_terms((0..12).map(|t| (t, 1)).collect());
        assert_eq!(v.eval_mod(&f, &pw), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn value(e: u32) -> impl Strategy<Value = CycloValue> {
            prop::collection::vec((0..e, 1u32..4), 0..6).prop_map(CycloValue::from_terms)
        }

        proptest! {
            #[test]
            fn conj_is_an_involution_matching_complex_conjugation(v in value(12)) {
                prop_assert_eq!(v.conj(12).conj(12), v.clone());
                let (a, b) = (v.eval_complex(12), v.conj(12).eval_complex(12));
                prop_assert!((a.conj() - b).norm() < 1e-9);
            }

            #[test]
            fn rescaling_keeps_the_complex_value(v in value(6), f in 1u32..5) {
                let w = v.rescale(6, 6 * f);
                prop_assert!((v.eval_complex(6) - w.eval_complex(6 * f)).norm() < 1e-9);
                prop_assert_eq!(w.count(), v.count());
            }

            #[test]
            fn exact_zero_test_agrees_with_floats(v in value(10)) {
                let field = CyclotomicField::new(10);
                let zero = field.is_zero(&v.to_dense(10));
                prop_assert_eq!(zero, v.eval_complex(10).norm() < 1e-9);
            }
        }
    }
}
