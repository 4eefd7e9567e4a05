//! Finite groups as multiplication oracles over dense element ids.
//!
//! Every concrete group in the crate (SL2 over a residue ring, the orthogonal
//! groups, re-indexed subgroups and central quotients) is exposed through
//! [`GroupView`], which is all the class and character machinery consumes.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::modring::prime_factors;

/// Dense element id, `0..order`.
pub type ElemId = u32;

pub trait GroupView: Send + Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> ElemId;
    fn mul(&self, a: ElemId, b: ElemId) -> ElemId;
    fn inv(&self, a: ElemId) -> ElemId;
    /// A generating set.
    fn generators(&self) -> &[ElemId];

    /// `h x h^-1`
    fn conj(&self, h: ElemId, x: ElemId) -> ElemId {
        self.mul(self.mul(h, x), self.inv(h))
    }

    /// `x y x^-1 y^-1`
    fn commutator(&self, x: ElemId, y: ElemId) -> ElemId {
        self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))
    }

    fn pow(&self, x: ElemId, mut e: u64) -> ElemId {
        let mut base = x;
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Element order by repeated squaring, stripping prime factors of |G|.
    fn element_order(&self, x: ElemId) -> u64 {
        let mut ord = self.order() as u64;
        for q in prime_factors(ord) {
            while ord % q == 0 && self.pow(x, ord / q) == self.identity() {
                ord /= q;
            }
        }
        ord
    }

    /// The cyclic subgroup generated by `x`, listed as `x^0, x^1, ...`.
    fn cyclic(&self, x: ElemId) -> Vec<ElemId> {
        let mut out = vec![self.identity()];
        let mut cur = x;
        while cur != self.identity() {
            out.push(cur);
            cur = self.mul(cur, x);
        }
        out
    }
}

/// An element type that can be enumerated into a [`MatrixGroup`].
pub trait GroupElement: Clone + Eq + Hash + Debug + Send + Sync {
    type Ctx: Send + Sync + Debug;

    fn one(ctx: &Self::Ctx) -> Self;
    fn mul(&self, rhs: &Self, ctx: &Self::Ctx) -> Self;
    fn inv(&self, ctx: &Self::Ctx) -> Self;

    /// Size of a perfect ranking of all group elements, when one exists.
    fn rank_bound(_ctx: &Self::Ctx) -> Option<usize> {
        None
    }

    /// Position in `0..rank_bound`; only called when `rank_bound` is `Some`.
    fn rank(&self, _ctx: &Self::Ctx) -> usize {
        unreachable!("rank called on an element type without a ranking")
    }
}

#[derive(Debug)]
enum Lookup<E> {
    Ranked(Vec<ElemId>),
    Hashed(FxHashMap<E, ElemId>),
}

/// A group enumerated by breadth-first closure from a fixed generator list.
///
/// Ids are assigned in BFS order (identity first, right multiplication by the
/// generators in list order), so they are reproducible run to run.
#[derive(Debug)]
pub struct MatrixGroup<E: GroupElement> {
    ctx: E::Ctx,
    elems: Vec<E>,
    lookup: Lookup<E>,
    inverse: Vec<ElemId>,
    gens: Vec<ElemId>,
}

impl<E: GroupElement> MatrixGroup<E> {
    /// Closes `generators` under multiplication. Fails once more than
    /// `budget` elements are produced.
    pub fn generate(ctx: E::Ctx, generators: &[E], budget: u64) -> Result<Self> {
        let one = E::one(&ctx);
        let mut elems = vec![one.clone()];
        let mut lookup = match E::rank_bound(&ctx) {
            Some(n) => {
                let mut table = vec![ElemId::MAX; n];
                table[one.rank(&ctx)] = 0;
                Lookup::Ranked(table)
            }
            None => {
                let mut map = FxHashMap::default();
                map.insert(one, 0);
                Lookup::Hashed(map)
            }
        };
        let mut head = 0;
        while head < elems.len() {
            let x = elems[head].clone();
            head += 1;
            for g in generators {
                let y = x.mul(g, &ctx);
                let fresh = match &mut lookup {
                    Lookup::Ranked(table) => {
                        let slot = &mut table[y.rank(&ctx)];
                        if *slot == ElemId::MAX {
                            *slot = elems.len() as ElemId;
                            true
                        } else {
                            false
                        }
                    }
                    Lookup::Hashed(map) => {
                        if map.contains_key(&y) {
                            false
                        } else {
                            map.insert(y.clone(), elems.len() as ElemId);
                            true
                        }
                    }
                };
                if fresh {
                    if elems.len() as u64 >= budget {
                        return Err(Error::BudgetExceeded {
                            required: elems.len() as u64 + 1,
                            budget,
                        });
                    }
                    elems.push(y);
                }
            }
        }
        let mut group = Self {
            ctx,
            elems,
            lookup,
            inverse: Vec::new(),
            gens: Vec::new(),
        };
        group.inverse = group
            .elems
            .iter()
            .map(|x| group.id_of_unchecked(&x.inv(&group.ctx)))
            .collect();
        let mut gens: Vec<ElemId> = generators
            .iter()
            .map(|g| group.id_of_unchecked(g))
            .filter(|&g| g != 0)
            .collect();
        gens.dedup();
        group.gens = gens;
        Ok(group)
    }

    pub fn ctx(&self) -> &E::Ctx {
        &self.ctx
    }

    pub fn element(&self, id: ElemId) -> &E {
        &self.elems[id as usize]
    }

    pub fn elements(&self) -> &[E] {
        &self.elems
    }

    pub fn id_of(&self, e: &E) -> Option<ElemId> {
        match &self.lookup {
            Lookup::Ranked(table) => {
                let r = e.rank(&self.ctx);
                table.get(r).copied().filter(|&id| id != ElemId::MAX)
            }
            Lookup::Hashed(map) => map.get(e).copied(),
        }
    }

    fn id_of_unchecked(&self, e: &E) -> ElemId {
        self.id_of(e).expect("element outside the enumerated group")
    }
}

impl<E: GroupElement> GroupView for MatrixGroup<E> {
    fn order(&self) -> usize {
        self.elems.len()
    }

    fn identity(&self) -> ElemId {
        0
    }

    #[inline]
    fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        let prod = self.elems[a as usize].mul(&self.elems[b as usize], &self.ctx);
        self.id_of_unchecked(&prod)
    }

    #[inline]
    fn inv(&self, a: ElemId) -> ElemId {
        self.inverse[a as usize]
    }

    fn generators(&self) -> &[ElemId] {
        &self.gens
    }
}

/// Subgroup closure of `gens` inside `group` by BFS (right multiplication).
/// Stops early once `target` elements are reached.
pub fn closure<G: GroupView + ?Sized>(group: &G, gens: &[ElemId], target: Option<usize>) -> Vec<ElemId> {
    let mut seen = FxHashSet::default();
    seen.insert(group.identity());
    let mut out = vec![group.identity()];
    let mut head = 0;
    while head < out.len() {
        if target.is_some_and(|t| out.len() >= t) {
            break;
        }
        let x = out[head];
        head += 1;
        for &g in gens {
            let y = group.mul(x, g);
            if seen.insert(y) {
                out.push(y);
            }
        }
    }
    out.sort_unstable();
    out
}

/// A subgroup given by its sorted member ids in a parent group, together with
/// a generating set (parent ids). Local ids are positions in `members`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupHandle {
    members: Vec<ElemId>,
    generators: Vec<ElemId>,
}

impl SubgroupHandle {
    pub fn from_generators<G: GroupView + ?Sized>(group: &G, gens: &[ElemId]) -> Self {
        let generators: Vec<ElemId> = gens.iter().copied().filter(|&g| g != group.identity()).collect();
        Self {
            members: closure(group, &generators, None),
            generators,
        }
    }

    /// Validates closure under multiplication and inversion, then extracts a
    /// small generating set greedily.
    pub fn from_members<G: GroupView + ?Sized>(group: &G, mut members: Vec<ElemId>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.binary_search(&group.identity()).is_err() {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        for &x in &members {
            if members.binary_search(&group.inv(x)).is_err() {
                return Err(Error::NotASubgroup(format!("inverse of {x} missing")));
            }
        }
        let mut generators = Vec::new();
        let mut span = vec![group.identity()];
        for &x in &members {
            if span.len() == members.len() {
                break;
            }
            if span.binary_search(&x).is_err() {
                generators.push(x);
                span = closure(group, &generators, Some(members.len() + 1));
                if span.len() > members.len() {
                    return Err(Error::NotASubgroup(format!(
                        "closure exceeds {} elements",
                        members.len()
                    )));
                }
            }
        }
        if span != members {
            return Err(Error::NotASubgroup("not closed under multiplication".into()));
        }
        Ok(Self { members, generators })
    }

    /// Trusted constructor for member lists known to be subgroups.
    pub(crate) fn from_parts(mut members: Vec<ElemId>, generators: Vec<ElemId>) -> Self {
        members.sort_unstable();
        Self { members, generators }
    }

    pub fn members(&self) -> &[ElemId] {
        &self.members
    }

    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: ElemId) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn local_id(&self, x: ElemId) -> Option<ElemId> {
        self.members.binary_search(&x).ok().map(|i| i as ElemId)
    }

    pub fn parent_id(&self, local: ElemId) -> ElemId {
        self.members[local as usize]
    }

    pub fn is_subset_of(&self, other: &SubgroupHandle) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &SubgroupHandle) -> Vec<ElemId> {
        self.members.iter().copied().filter(|&x| other.contains(x)).collect()
    }

    /// Re-indexes the subgroup as a group in its own right.
    pub fn view<'g, G: GroupView + ?Sized>(&'g self, parent: &'g G) -> SubgroupView<'g, G> {
        SubgroupView::new(parent, self)
    }
}

/// A subgroup re-indexed with dense local ids.
pub struct SubgroupView<'g, G: GroupView + ?Sized> {
    parent: &'g G,
    handle: &'g SubgroupHandle,
    local_of: FxHashMap<ElemId, ElemId>,
    gens: Vec<ElemId>,
    identity: ElemId,
}

impl<'g, G: GroupView + ?Sized> SubgroupView<'g, G> {
    fn new(parent: &'g G, handle: &'g SubgroupHandle) -> Self {
        let local_of: FxHashMap<ElemId, ElemId> = handle
            .members
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as ElemId))
            .collect();
        let gens = handle.generators.iter().map(|g| local_of[g]).collect();
        let identity = local_of[&parent.identity()];
        Self {
            parent,
            handle,
            local_of,
            gens,
            identity,
        }
    }

    pub fn parent(&self) -> &G {
        self.parent
    }

    pub fn handle(&self) -> &SubgroupHandle {
        self.handle
    }

    pub fn to_parent(&self, local: ElemId) -> ElemId {
        self.handle.members[local as usize]
    }

    pub fn to_local(&self, parent_id: ElemId) -> Option<ElemId> {
        self.local_of.get(&parent_id).copied()
    }
}

impl<G: GroupView + ?Sized> GroupView for SubgroupView<'_, G> {
    fn order(&self) -> usize {
        self.handle.members.len()
    }

    fn identity(&self) -> ElemId {
        self.identity
    }

    fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        let prod = self.parent.mul(self.to_parent(a), self.to_parent(b));
        self.local_of[&prod]
    }

    fn inv(&self, a: ElemId) -> ElemId {
        self.local_of[&self.parent.inv(self.to_parent(a))]
    }

    fn generators(&self) -> &[ElemId] {
        &self.gens
    }
}

/// The quotient of a group by a central (more generally, normal) subgroup.
/// Each coset is represented by its least parent id.
pub struct QuotientGroup<'g, G: GroupView + ?Sized> {
    parent: &'g G,
    coset_of: Vec<ElemId>,
    reps: Vec<ElemId>,
    gens: Vec<ElemId>,
}

impl<'g, G: GroupView + ?Sized> QuotientGroup<'g, G> {
    pub fn new(parent: &'g G, normal: &SubgroupHandle) -> Result<Self> {
        for &g in parent.generators() {
            for &x in normal.members() {
                if !normal.contains(parent.conj(g, x)) {
                    return Err(Error::NotASubgroup("subgroup is not normal".into()));
                }
            }
        }
        let mut coset_of = vec![ElemId::MAX; parent.order()];
        let mut reps = Vec::with_capacity(parent.order() / normal.order());
        for x in 0..parent.order() as ElemId {
            if coset_of[x as usize] != ElemId::MAX {
                continue;
            }
            let q = reps.len() as ElemId;
            reps.push(x);
            for &n in normal.members() {
                coset_of[parent.mul(x, n) as usize] = q;
            }
        }
        let mut gens: Vec<ElemId> = parent
            .generators()
            .iter()
            .map(|&g| coset_of[g as usize])
            .filter(|&g| g != coset_of[parent.identity() as usize])
            .collect();
        gens.sort_unstable();
        gens.dedup();
        Ok(Self {
            parent,
            coset_of,
            reps,
            gens,
        })
    }

    /// The quotient map on parent ids.
    pub fn project(&self, x: ElemId) -> ElemId {
        self.coset_of[x as usize]
    }

    pub fn representative(&self, q: ElemId) -> ElemId {
        self.reps[q as usize]
    }

    pub fn parent(&self) -> &G {
        self.parent
    }
}

impl<G: GroupView + ?Sized> GroupView for QuotientGroup<'_, G> {
    fn order(&self) -> usize {
        self.reps.len()
    }

    fn identity(&self) -> ElemId {
        self.coset_of[self.parent.identity() as usize]
    }

    fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.coset_of[self.parent.mul(self.reps[a as usize], self.reps[b as usize]) as usize]
    }

    fn inv(&self, a: ElemId) -> ElemId {
        self.coset_of[self.parent.inv(self.reps[a as usize]) as usize]
    }

    fn generators(&self) -> &[ElemId] {
        &self.gens
    }
}

/// Normal closure of `seeds` under conjugation by `conjugators`.
pub fn normal_closure<G: GroupView + ?Sized>(group: &G, seeds: &[ElemId], conjugators: &[ElemId]) -> SubgroupHandle {
    let mut gens: Vec<ElemId> = Vec::new();
    let mut members = vec![group.identity()];
    let mut queue: VecDeque<ElemId> = seeds.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        if members.binary_search(&x).is_ok() {
            continue;
        }
        gens.push(x);
        members = closure(group, &gens, None);
        for &c in conjugators {
            queue.push_back(group.conj(c, x));
        }
    }
    SubgroupHandle::from_parts(members, gens)
}
