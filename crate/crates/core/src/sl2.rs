//! The group SL2(Z/p^nZ), its congruence subgroups and special elements.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::{ElemId, GroupElement, GroupView, MatrixGroup, SubgroupHandle};
use crate::modring::Modulus;

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_BUDGET: u64 = 1 << 25;

/// A 2x2 matrix over Z/p^nZ, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GMat {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl GMat {
    pub const fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_signed(m: &Modulus, a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |x| m.residue(x).value();
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn det(&self, m: &Modulus) -> u32 {
        let pn = m.pn();
        let ad = self.a as u64 * self.d as u64 % pn;
        let bc = self.b as u64 * self.c as u64 % pn;
        ((ad + pn - bc) % pn) as u32
    }

    pub fn trace(&self, m: &Modulus) -> u32 {
        ((self.a as u64 + self.d as u64) % m.pn()) as u32
    }

    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Entrywise reduction to a divisor modulus.
    pub fn reduce(&self, modulus: u64) -> Self {
        let r = |x: u32| (x as u64 % modulus) as u32;
        Self::new(r(self.a), r(self.b), r(self.c), r(self.d))
    }

    pub fn scale(&self, s: u32, m: &Modulus) -> Self {
        let r = |x: u32| (x as u64 * s as u64 % m.pn()) as u32;
        Self::new(r(self.a), r(self.b), r(self.c), r(self.d))
    }

    pub fn add(&self, other: &Self, m: &Modulus) -> Self {
        let r = |x: u32, y: u32| ((x as u64 + y as u64) % m.pn()) as u32;
        Self::new(
            r(self.a, other.a),
            r(self.b, other.b),
            r(self.c, other.c),
            r(self.d, other.d),
        )
    }

    pub fn sub(&self, other: &Self, m: &Modulus) -> Self {
        let r = |x: u32, y: u32| ((x as u64 + m.pn() - y as u64) % m.pn()) as u32;
        Self::new(
            r(self.a, other.a),
            r(self.b, other.b),
            r(self.c, other.c),
            r(self.d, other.d),
        )
    }

    pub fn matmul(&self, o: &Self, pn: u64) -> Self {
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        let (e, f, g, h) = (o.a as u64, o.b as u64, o.c as u64, o.d as u64);
        Self::new(
            ((a * e + b * g) % pn) as u32,
            ((a * f + b * h) % pn) as u32,
            ((c * e + d * g) % pn) as u32,
            ((c * f + d * h) % pn) as u32,
        )
    }

    /// Inverse of a determinant-one matrix.
    pub fn adjugate(&self, pn: u64) -> Self {
        let neg = |x: u32| ((pn - x as u64) % pn) as u32;
        Self::new(self.d, neg(self.b), neg(self.c), self.a)
    }

    /// True if the matrix is congruent to the identity modulo `modulus`.
    pub fn is_identity_mod(&self, modulus: u64) -> bool {
        self.reduce(modulus) == Self::identity().reduce(modulus)
    }
}

impl fmt::Debug for GMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Precomputed data for multiplying and ranking matrices mod p^n.
#[derive(Debug)]
pub struct Sl2Ctx {
    m: Modulus,
    unit_index: Vec<u32>,
}

impl Sl2Ctx {
    fn new(m: Modulus) -> Self {
        let mut unit_index = vec![u32::MAX; m.pn() as usize];
        let mut next = 0;
        for x in 0..m.pn() {
            let r = m.residue(x as i64);
            if m.is_unit(r) {
                unit_index[x as usize] = next;
                next += 1;
            }
        }
        Self { m, unit_index }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.m
    }
}

impl GroupElement for GMat {
    type Ctx = Sl2Ctx;

    fn one(_: &Sl2Ctx) -> Self {
        GMat::identity()
    }

    #[inline]
    fn mul(&self, rhs: &Self, ctx: &Sl2Ctx) -> Self {
        self.matmul(rhs, ctx.m.pn())
    }

    fn inv(&self, ctx: &Sl2Ctx) -> Self {
        self.adjugate(ctx.m.pn())
    }

    fn rank_bound(ctx: &Sl2Ctx) -> Option<usize> {
        Some(sl2_order(&ctx.m) as usize)
    }

    /// Perfect ranking of SL2(Z/p^n): with `a` a unit the triple (a, b, c)
    /// determines `d`; otherwise `b` is a unit and (a, b, d) determines `c`.
    #[inline]
    fn rank(&self, ctx: &Sl2Ctx) -> usize {
        let pn = ctx.m.pn() as usize;
        let units = ctx.m.unit_count() as usize;
        let ua = ctx.unit_index[self.a as usize];
        if ua != u32::MAX {
            (ua as usize * pn + self.b as usize) * pn + self.c as usize
        } else {
            let ub = ctx.unit_index[self.b as usize] as usize;
            let p = ctx.m.p() as usize;
            units * pn * pn + ((self.a as usize / p) * units + ub) * pn + self.d as usize
        }
    }
}

/// |SL2(Z/p^nZ)| = p^(3n-2)(p^2-1), computed without overflow.
pub fn sl2_order(m: &Modulus) -> u64 {
    let p = m.p() as u128;
    let order = p.pow(3 * m.n() - 2) * (p * p - 1);
    u64::try_from(order).unwrap_or(u64::MAX)
}

/// Same as [`sl2_order`] for parameters that may not form a valid modulus.
pub fn sl2_order_for(p: u64, n: u32) -> u128 {
    let p = p as u128;
    p.saturating_pow(3 * n - 2).saturating_mul(p * p - 1)
}

/// SL2(Z/p^nZ) enumerated from the generators [[1,1],[0,1]] and [[1,0],[1,1]].
#[derive(Debug)]
pub struct Sl2Group {
    group: MatrixGroup<GMat>,
}

impl Sl2Group {
    pub fn build(m: Modulus, budget: u64) -> Result<Self> {
        let required = sl2_order(&m);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let gens = [GMat::new(1, 1, 0, 1), GMat::new(1, 0, 1, 1)];
        let group = MatrixGroup::generate(Sl2Ctx::new(m), &gens, budget)?;
        Ok(Self { group })
    }

    pub fn modulus(&self) -> &Modulus {
        self.group.ctx().modulus()
    }

    pub fn p(&self) -> u64 {
        self.modulus().p()
    }

    pub fn n(&self) -> u32 {
        self.modulus().n()
    }

    pub fn matrix(&self, id: ElemId) -> GMat {
        *self.group.element(id)
    }

    pub fn id_of(&self, x: &GMat) -> Option<ElemId> {
        self.group.id_of(x)
    }

    fn require_id(&self, x: &GMat) -> Result<ElemId> {
        self.id_of(x)
            .ok_or_else(|| Error::Invariant(format!("{x:?} is not in SL2(Z/{})", self.modulus().pn())))
    }

    /// The central involution -I.
    pub fn z(&self) -> ElemId {
        let m = *self.modulus();
        self.id_of(&GMat::from_signed(&m, -1, 0, 0, -1))
            .expect("-I has determinant one")
    }

    /// Scalar matrices of determinant one.
    pub fn center(&self) -> SubgroupHandle {
        let m = *self.modulus();
        let members = (0..m.pn() as u32)
            .filter(|&s| (s as u64 * s as u64) % m.pn() == 1 % m.pn())
            .filter_map(|s| self.id_of(&GMat::new(s, 0, 0, s)))
            .collect();
        SubgroupHandle::from_members(self, members).expect("scalars form a subgroup")
    }

    /// The reduction map to a lower level, as a table indexed by element id.
    pub fn reduce_hom(&self, dst: &Sl2Group) -> Result<Vec<ElemId>> {
        if dst.p() != self.p() || dst.n() > self.n() {
            return Err(Error::LevelMismatch {
                from: self.n(),
                to: dst.n(),
            });
        }
        let modulus = dst.modulus().pn();
        let map: Vec<ElemId> = self
            .group
            .elements()
            .iter()
            .map(|x| dst.require_id(&x.reduce(modulus)))
            .collect::<Result<_>>()?;
        for &a in self.generators() {
            for &b in self.generators() {
                let lhs = map[self.mul(a, b) as usize];
                let rhs = dst.mul(map[a as usize], map[b as usize]);
                if lhs != rhs {
                    return Err(Error::Invariant("reduction is not multiplicative".into()));
                }
            }
        }
        Ok(map)
    }

    /// Kernel of reduction modulo p^level: matrices congruent to I.
    pub fn congruence_kernel(&self, level: u32) -> Result<SubgroupHandle> {
        if level > self.n() {
            return Err(Error::LevelMismatch {
                from: self.n(),
                to: level,
            });
        }
        let modulus = self.p().pow(level);
        let members: Vec<ElemId> = (0..self.order() as ElemId)
            .filter(|&x| self.matrix(x).is_identity_mod(modulus))
            .collect();
        SubgroupHandle::from_members(self, members)
    }

    fn require_n2(&self) -> Result<()> {
        if self.n() < 2 {
            Err(Error::RequiresN2)
        } else {
            Ok(())
        }
    }

    /// E = {x : x = I mod p}, of order p^(3(n-1)).
    pub fn subgroup_e(&self) -> Result<SubgroupHandle> {
        self.require_n2()?;
        self.congruence_kernel(1)
    }

    /// F = {x : x = I mod p^(n-1)}, elementary abelian of order p^3.
    pub fn subgroup_f(&self) -> Result<SubgroupHandle> {
        self.require_n2()?;
        self.congruence_kernel(self.n() - 1)
    }

    /// F0 = {I + p^(n-1) Y : Y antidiagonal mod p}, of order p^2.
    pub fn subgroup_f0(&self) -> Result<SubgroupHandle> {
        self.require_n2()?;
        let m = *self.modulus();
        let q = m.p_pow(m.n() - 1);
        let mut members = Vec::new();
        for b in 0..m.p() {
            for c in 0..m.p() {
                members.push(self.require_id(&GMat::new(1, (b * q) as u32, (c * q) as u32, 1))?);
            }
        }
        SubgroupHandle::from_members(self, members)
    }

    /// The linearisation I + p^(n-1) Y -> Y mod p of an element of F, as
    /// traceless coordinates (x, b, c) of Y = [[x, b], [c, -x]].
    pub fn linearize(&self, f: ElemId) -> Option<[u32; 3]> {
        let m = self.modulus();
        if m.n() < 2 {
            return None;
        }
        let q = m.p_pow(m.n() - 1) as u32;
        let x = self.matrix(f);
        if !x.is_identity_mod(q as u64) {
            return None;
        }
        let p = m.p() as u32;
        let y = |v: u32| (v / q) % p;
        Some([y((x.a + m.pn() as u32 - 1) % m.pn() as u32), y(x.b), y(x.c)])
    }

    /// Inverse of [`Self::linearize`].
    pub fn delinearize(&self, coords: [u32; 3]) -> Result<ElemId> {
        self.require_n2()?;
        let m = *self.modulus();
        let q = m.p_pow(m.n() - 1) as i64;
        let [x, b, c] = coords.map(|v| v as i64);
        self.require_id(&GMat::from_signed(&m, 1 + q * x, q * b, q * c, 1 - q * x))
    }

    /// A = diag(1 - p, 1 + p + ... + p^(n-1)).
    pub fn element_a_matrix(&self) -> Result<GMat> {
        let m = *self.modulus();
        if m.p() == 2 {
            return Err(Error::OddPrimeRequired(2));
        }
        Ok(GMat::new(m.one_minus_p().value(), 0, 0, m.geometric_sum().value()))
    }

    /// g = diag(t(1 - p), t^(p-2)(1 + p + ... + p^(n-1))), where t has order p - 1.
    pub fn element_g_matrix(&self) -> Result<GMat> {
        let m = *self.modulus();
        let t = m.element_t()?;
        let a = m.mul(t, m.one_minus_p());
        let d = m.mul(m.pow(t, m.p() - 2), m.geometric_sum());
        Ok(GMat::new(a.value(), 0, 0, d.value()))
    }

    pub fn element_a(&self) -> Result<ElemId> {
        self.require_id(&self.element_a_matrix()?)
    }

    pub fn element_g(&self) -> Result<ElemId> {
        self.require_id(&self.element_g_matrix()?)
    }

    /// Checks (I + p^i X)(I + p^j Y) = I + p^i X + p^j Y = (I + p^j Y)(I + p^i X)
    /// for all admissible i, j (i + j >= n). Pairs are taken from the congruence
    /// kernels at levels i and j; exhaustive when p^n <= 125, otherwise a fixed
    /// stride sample of at most `sample` pairs per (i, j).
    pub fn check_com10(&self, sample: usize) -> Result<Com10Outcome> {
        self.require_n2()?;
        let m = *self.modulus();
        let exhaustive = m.pn() <= 125;
        let mut outcome = Com10Outcome {
            exhaustive,
            pairs_checked: 0,
            failures: Vec::new(),
        };
        let one = GMat::identity();
        for i in 1..m.n() {
            for j in i.max(m.n() - i)..m.n() {
                let ki = self.congruence_kernel(i)?;
                let kj = self.congruence_kernel(j)?;
                let total = ki.order() * kj.order();
                let (count, stride) = if exhaustive || total <= sample {
                    (total, 1)
                } else {
                    (sample, stride_for(total))
                };
                for s in 0..count {
                    let idx = (s as u64 * stride as u64 % total as u64) as usize;
                    let x = ki.members()[idx / kj.order()];
                    let y = kj.members()[idx % kj.order()];
                    let (mx, my) = (self.matrix(x), self.matrix(y));
                    let xy = mx.matmul(&my, m.pn());
                    let sum = mx.add(&my, &m).sub(&one, &m);
                    let yx = my.matmul(&mx, m.pn());
                    outcome.pairs_checked += 1;
                    if xy != sum || xy != yx {
                        outcome.failures.push((x, y));
                    }
                }
            }
        }
        Ok(outcome)
    }
}

/// A step coprime to `total`, for deterministic spread-out sampling.
pub(crate) fn stride_for(total: usize) -> usize {
    let mut s = (total as f64 * 0.618_033_988_7) as usize | 1;
    while crate::modring::gcd(s as u64, total as u64) != 1 {
        s += 2;
    }
    s.max(1)
}

#[derive(Debug, Clone)]
pub struct Com10Outcome {
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub failures: Vec<(ElemId, ElemId)>,
}

impl GroupView for Sl2Group {
    fn order(&self) -> usize {
        self.group.order()
    }

    fn identity(&self) -> ElemId {
        self.group.identity()
    }

    #[inline]
    fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.group.mul(a, b)
    }

    #[inline]
    fn inv(&self, a: ElemId) -> ElemId {
        self.group.inv(a)
    }

    fn generators(&self) -> &[ElemId] {
        self.group.generators()
    }
}
