//! Conjugacy classes, centralizers, class matrices and power maps.

use rustc_hash::FxHashMap;

use crate::group::{closure, ElemId, GroupView, SubgroupHandle};
use crate::modring::lcm;

/// The conjugacy classes of a group.
///
/// Class representatives are the least element id in each class, and classes
/// are numbered in increasing order of representative, so the identity class
/// is class 0 whenever the identity has id 0.
#[derive(Clone, Debug)]
pub struct ClassStructure {
    group_order: u64,
    reps: Vec<ElemId>,
    sizes: Vec<u64>,
    class_of: Vec<u32>,
    inverse_class: Vec<usize>,
    rep_orders: Vec<u64>,
    members: Vec<ElemId>,
    starts: Vec<usize>,
}

impl ClassStructure {
    pub fn k(&self) -> usize {
        self.reps.len()
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn reps(&self) -> &[ElemId] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> ElemId {
        self.reps[i]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn size(&self, i: usize) -> u64 {
        self.sizes[i]
    }

    #[inline]
    pub fn class_of(&self, x: ElemId) -> usize {
        self.class_of[x as usize] as usize
    }

    /// |C_G(g_i)| = |G| / |C_i|
    pub fn cent_order(&self, i: usize) -> u64 {
        self.group_order / self.sizes[i]
    }

    pub fn cent_orders(&self) -> Vec<u64> {
        (0..self.k()).map(|i| self.cent_order(i)).collect()
    }

    pub fn inverse_class(&self, i: usize) -> usize {
        self.inverse_class[i]
    }

    /// Order of the elements in class i.
    pub fn element_order(&self, i: usize) -> u64 {
        self.rep_orders[i]
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> u64 {
        self.rep_orders.iter().fold(1, |acc, &o| lcm(acc, o))
    }

    pub fn members(&self, i: usize) -> &[ElemId] {
        &self.members[self.starts[i]..self.starts[i + 1]]
    }

    /// Classes of size one.
    pub fn central_classes(&self) -> Vec<usize> {
        (0..self.k()).filter(|&i| self.sizes[i] == 1).collect()
    }

    /// Number of elements of `subset` in each class.
    pub fn histogram(&self, subset: &[ElemId]) -> Vec<u64> {
        let mut h = vec![0u64; self.k()];
        for &x in subset {
            h[self.class_of(x)] += 1;
        }
        h
    }
}

/// Partitions the group into conjugation orbits, conjugating only by the
/// group's generators.
pub fn compute_classes<G: GroupView + ?Sized>(group: &G) -> ClassStructure {
    let order = group.order();
    let gens: Vec<(ElemId, ElemId)> = group.generators().iter().map(|&s| (s, group.inv(s))).collect();
    let mut class_of = vec![u32::MAX; order];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for x in 0..order as ElemId {
        if class_of[x as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        class_of[x as usize] = c;
        queue.clear();
        queue.push(x);
        let mut head = 0;
        while head < queue.len() {
            let y = queue[head];
            head += 1;
            for &(s, s_inv) in &gens {
                let z = group.mul(group.mul(s, y), s_inv);
                if class_of[z as usize] == u32::MAX {
                    class_of[z as usize] = c;
                    queue.push(z);
                }
            }
        }
        sizes.push(queue.len() as u64);
    }
    let k = reps.len();
    let mut starts = vec![0usize; k + 1];
    for (i, &s) in sizes.iter().enumerate() {
        starts[i + 1] = starts[i] + s as usize;
    }
    let mut fill = starts.clone();
    let mut members = vec![0; order];
    for (x, &c) in class_of.iter().enumerate() {
        let c = c as usize;
        members[fill[c]] = x as ElemId;
        fill[c] += 1;
    }
    let inverse_class = reps.iter().map(|&r| class_of[group.inv(r) as usize] as usize).collect();
    let rep_orders = reps.iter().map(|&r| group.element_order(r)).collect();
    ClassStructure {
        group_order: order as u64,
        reps,
        sizes,
        class_of,
        inverse_class,
        rep_orders,
        members,
        starts,
    }
}

/// The centralizer of `x`, built from Schreier generators of the conjugation
/// orbit of `x`.
pub fn centralizer<G: GroupView + ?Sized>(group: &G, classes: &ClassStructure, x: ElemId) -> SubgroupHandle {
    let target = classes.cent_order(classes.class_of(x)) as usize;
    if target == group.order() {
        let all: Vec<ElemId> = (0..group.order() as ElemId).collect();
        return SubgroupHandle::from_parts(all, group.generators().to_vec());
    }
    // transversal: orbit element y -> t with t x t^-1 = y
    let mut transversal: FxHashMap<ElemId, ElemId> = FxHashMap::default();
    transversal.insert(x, group.identity());
    let mut orbit = vec![x];
    let mut head = 0;
    while head < orbit.len() {
        let y = orbit[head];
        head += 1;
        let ty = transversal[&y];
        for &s in group.generators() {
            let z = group.conj(s, y);
            if let std::collections::hash_map::Entry::Vacant(slot) = transversal.entry(z) {
                slot.insert(group.mul(s, ty));
                orbit.push(z);
            }
        }
    }
    let mut gens: Vec<ElemId> = Vec::new();
    let mut members = vec![group.identity()];
    'outer: for &y in &orbit {
        let ty = transversal[&y];
        for &s in group.generators() {
            let z = group.conj(s, y);
            let schreier = group.mul(group.inv(transversal[&z]), group.mul(s, ty));
            if members.binary_search(&schreier).is_err() {
                gens.push(schreier);
                members = closure(group, &gens, Some(target));
                if members.len() >= target {
                    break 'outer;
                }
            }
        }
    }
    if members.len() >= target {
        // the early stop may leave the BFS frontier unexpanded; finish it
        members = closure(group, &gens, None);
    }
    SubgroupHandle::from_parts(members, gens)
}

/// Centralizer by filtering every element; used as an oracle in tests.
pub fn centralizer_brute<G: GroupView + ?Sized>(group: &G, x: ElemId) -> Vec<ElemId> {
    (0..group.order() as ElemId)
        .filter(|&y| group.mul(x, y) == group.mul(y, x))
        .collect()
}

/// Structure constants of class j acting on class functions:
/// `entry(r, c) = #{ y in C_j : y * g_r in C_c }`.
///
/// If v is the vector of values of an irreducible character, then
/// `M_j v = w_j v` with w_j the central character value on C_j; each row
/// sums to |C_j|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMatrix {
    j: usize,
    k: usize,
    entries: Vec<u32>,
}

impl ClassMatrix {
    pub fn class(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entry(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.k + c]
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.k..(r + 1) * self.k]
    }

    /// Nonzero entries of row r as (column, value).
    pub fn sparse_row(&self, r: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.row(r)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(c, &v)| (c, v))
    }

    /// Integer matrix product, for commutativity checks.
    pub fn product(&self, other: &ClassMatrix) -> Vec<u64> {
        let k = self.k;
        let mut out = vec![0u64; k * k];
        for r in 0..k {
            for (m, a) in self.sparse_row(r) {
                for (c, b) in other.sparse_row(m) {
                    out[r * k + c] += a as u64 * b as u64;
                }
            }
        }
        out
    }
}

pub fn class_matrix<G: GroupView + ?Sized>(group: &G, classes: &ClassStructure, j: usize) -> ClassMatrix {
    let k = classes.k();
    let mut entries = vec![0u32; k * k];
    for &y in classes.members(j) {
        for (r, &g) in classes.reps().iter().enumerate() {
            let c = classes.class_of(group.mul(y, g));
            entries[r * k + c] += 1;
        }
    }
    ClassMatrix { j, k, entries }
}

/// The class of `rep_i^s` for every class i; negative `s` means inverse powers.
pub fn power_class_map<G: GroupView + ?Sized>(group: &G, classes: &ClassStructure, s: i64) -> Vec<usize> {
    (0..classes.k())
        .map(|i| {
            let o = classes.element_order(i) as i64;
            let e = s.rem_euclid(o) as u64;
            classes.class_of(group.pow(classes.rep(i), e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::QuotientGroup;
    use crate::modring::Modulus;
    use crate::sl2::{stride_for, Sl2Group, DEFAULT_BUDGET};

    fn g(p: u64, n: u32) -> Sl2Group {
        Sl2Group::build(Modulus::new(p, n).unwrap(), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn class_counts_of_small_groups() {
        assert_eq!(compute_classes(&g(2, 1)).k(), 3);
        let sl23 = g(3, 1);
        let psl23 = QuotientGroup::new(&sl23, &sl23.center()).unwrap();
        assert_eq!(psl23.order(), 12);
        assert_eq!(compute_classes(&psl23).k(), 4);
        // SL2(5) has p + 4 classes
        assert_eq!(compute_classes(&g(5, 1)).k(), 9);
        assert_eq!(compute_classes(&g(7, 1)).k(), 11);
    }

    #[test]
    fn class_equation() {
        for (p, n) in [(5, 2), (2, 3), (3, 2)] {
            let grp = g(p, n);
            let cl = compute_classes(&grp);
            assert_eq!(cl.sizes().iter().sum::<u64>(), grp.order() as u64);
            for i in 0..cl.k() {
                assert_eq!(grp.order() as u64 % cl.size(i), 0);
                assert_eq!(cl.class_of(cl.rep(i)), i);
                assert_eq!(cl.cent_order(i) * cl.size(i), grp.order() as u64);
                assert!(cl.members(i).iter().all(|&x| x >= cl.rep(i)));
            }
        }
        assert_eq!(compute_classes(&g(5, 2)).sizes().iter().sum::<u64>(), 15000);
    }

    #[test]
    fn class_map_is_conjugation_invariant() {
        let grp = g(5, 1);
        let cl = compute_classes(&grp);
        for h in 0..grp.order() as ElemId {
            for x in 0..grp.order() as ElemId {
                assert_eq!(cl.class_of(grp.conj(h, x)), cl.class_of(x));
            }
        }
        let grp = g(5, 2);
        let cl = compute_classes(&grp);
        let st = stride_for(grp.order());
        for s in 0..1000usize {
            let h = (s * st % grp.order()) as ElemId;
            let x = ((s * 7919 + 13) % grp.order()) as ElemId;
            assert_eq!(cl.class_of(grp.conj(h, x)), cl.class_of(x));
        }
    }

    #[test]
    fn schreier_centralizer_matches_brute_force() {
        for (p, n) in [(2, 2), (3, 2), (5, 1), (5, 2)] {
            let grp = g(p, n);
            let cl = compute_classes(&grp);
            for i in 0..cl.k() {
                let c = centralizer(&grp, &cl, cl.rep(i));
                assert_eq!(c.members(), centralizer_brute(&grp, cl.rep(i)).as_slice());
                assert_eq!(c.order() as u64, cl.cent_order(i));
            }
        }
    }

    #[test]
    fn centralizer_of_identity_and_g() {
        let grp = g(5, 2);
        let cl = compute_classes(&grp);
        assert_eq!(centralizer(&grp, &cl, grp.identity()).order(), 15000);
        let gid = grp.element_g().unwrap();
        let c = centralizer(&grp, &cl, gid);
        assert_eq!(c.order(), 20);
        let mut cyc = grp.cyclic(gid);
        cyc.sort_unstable();
        assert_eq!(c.members(), cyc.as_slice());
    }

    #[test]
    fn class_matrix_properties() {
        let grp = g(3, 1);
        let cl = compute_classes(&grp);
        let k = cl.k();
        let id = class_matrix(&grp, &cl, 0);
        for r in 0..k {
            for c in 0..k {
                assert_eq!(id.entry(r, c), (r == c) as u32);
            }
        }
        let mats: Vec<ClassMatrix> = (0..k).map(|j| class_matrix(&grp, &cl, j)).collect();
        for m in &mats {
            for r in 0..k {
                assert_eq!(m.row(r).iter().map(|&v| v as u64).sum::<u64>(), cl.size(m.class()));
            }
        }
        for a in &mats {
            for b in &mats {
                assert_eq!(a.product(b), b.product(a));
            }
        }
    }

    #[test]
    fn power_maps() {
        let grp = g(5, 2);
        let cl = compute_classes(&grp);
        let ident: Vec<usize> = (0..cl.k()).collect();
        assert_eq!(power_class_map(&grp, &cl, 1), ident);
        let e = cl.exponent() as i64;
        assert!(power_class_map(&grp, &cl, e).iter().all(|&c| c == 0));
        let inv = power_class_map(&grp, &cl, -1);
        for (i, &c) in inv.iter().enumerate() {
            assert_eq!(c, cl.inverse_class(i));
        }
    }

    #[test]
    fn reduction_maps_classes_onto_classes() {
        let hi = g(5, 2);
        let lo = g(5, 1);
        let map = hi.reduce_hom(&lo).unwrap();
        let ch = compute_classes(&hi);
        let cl = compute_classes(&lo);
        let mut image = vec![usize::MAX; ch.k()];
        for x in 0..hi.order() as ElemId {
            let c = cl.class_of(map[x as usize]);
            let slot = &mut image[ch.class_of(x)];
            assert!(*slot == usize::MAX || *slot == c);
            *slot = c;
        }
        let mut hit: Vec<usize> = image.clone();
        hit.sort_unstable();
        hit.dedup();
        assert_eq!(hit.len(), cl.k());
    }
}
