use super::PrimeField;

/// Dense polynomial over F_l, low degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<u64>);

impl Poly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn x() -> Self {
        Self(vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with -1 standing for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn eval(&self, f: &PrimeField, x: u64) -> u64 {
        self.0.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn sub(&self, f: &PrimeField, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let out = (0..n)
            .map(|i| {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = o.0.get(i).copied().unwrap_or(0);
                f.sub(a, b)
            })
            .collect();
        Poly::new(out)
    }

    pub fn mul(&self, f: &PrimeField, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(Vec::new());
        }
        let mut acc = vec![0u128; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                acc[i + j] += a as u128 * b as u128;
            }
        }
        let p = f.p() as u128;
        Poly::new(acc.into_iter().map(|v| (v % p) as u64).collect())
    }

    pub fn monic(&self, f: &PrimeField) -> Poly {
        match self.0.last() {
            None => self.clone(),
            Some(&lead) => {
                let inv = f.inv(lead);
                Poly(self.0.iter().map(|&c| f.mul(c, inv)).collect())
            }
        }
    }

    /// Quotient and remainder on division by a nonzero divisor.
    pub fn divrem(&self, f: &PrimeField, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.0.len() < d.0.len() {
            return (Poly(Vec::new()), self.clone());
        }
        let mut r = self.0.clone();
        let dl = d.0.len();
        let lead_inv = f.inv(d.0[dl - 1]);
        let mut q = vec![0; r.len() - dl + 1];
        for shift in (0..q.len()).rev() {
            let c = f.mul(r[shift + dl - 1], lead_inv);
            q[shift] = c;
            if c == 0 {
                continue;
            }
            for (i, &dc) in d.0.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, dc));
            }
        }
        r.truncate(dl - 1);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, f: &PrimeField, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }

    /// Monic gcd.
    pub fn gcd(f: &PrimeField, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `self^e mod m`.
    pub fn powmod(&self, f: &PrimeField, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(f, m);
        let mut acc = Poly(vec![1]).rem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base).rem(f, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base).rem(f, m);
            }
        }
        acc
    }
}

/// Distinct roots in F_l of a nonzero polynomial, sorted ascending.
pub fn poly_roots(f: &PrimeField, poly: &Poly) -> Vec<u64> {
    let m = poly.monic(f);
    if m.degree() < 1 {
        return Vec::new();
    }
    let xl = Poly::x().powmod(f, f.p(), &m);
    let split = Poly::gcd(f, &m, &xl.sub(f, &Poly::x()));
    let mut roots = Vec::new();
    split_linear(f, split, &mut roots);
    roots.sort_unstable();
    roots
}

/// Splits a product of distinct monic linear factors with the deterministic
/// shifts x + a, a = 0, 1, 2, ...
fn split_linear(f: &PrimeField, g: Poly, out: &mut Vec<u64>) {
    match g.degree() {
        d if d < 1 => {}
        1 => out.push(f.neg(g.0[0])),
        _ => {
            let half = (f.p() - 1) / 2;
            for a in 0..f.p() {
                let w = Poly::new(vec![a, 1]).powmod(f, half, &g);
                let d = Poly::gcd(f, &g, &w.sub(f, &Poly(vec![1])));
                if d.degree() > 0 && d.degree() < g.degree() {
                    let (rest, _) = g.divrem(f, &d);
                    split_linear(f, d, out);
                    split_linear(f, rest.monic(f), out);
                    return;
                }
            }
            unreachable!("distinct linear factors always separate under some shift");
        }
    }
}
