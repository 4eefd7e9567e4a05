//! Three-dimensional quadratic spaces over F_q, the groups O ⊇ SO ⊇ Omega,
//! and the adjoint action of SL2(Z/p^nZ) on traceless 2x2 matrices.

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{normal_closure, ElemId, GroupElement, GroupView, MatrixGroup, SubgroupHandle};
use crate::modring::{is_prime, Modulus};
use crate::sl2::{stride_for, GMat, Sl2Group};

/// A vector of F_q^3.
pub type Vec3 = [u32; 3];

/// A 3x3 matrix over F_q acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat3(pub [[u32; 3]; 3]);

impl Mat3 {
    pub fn identity() -> Self {
        Mat3([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn scalar(s: u32) -> Self {
        Mat3([[s, 0, 0], [0, s, 0], [0, 0, s]])
    }

    pub fn from_columns(cols: [Vec3; 3]) -> Self {
        let mut m = [[0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col[i];
            }
        }
        Mat3(m)
    }

    pub fn apply(&self, v: Vec3, q: u64) -> Vec3 {
        let mut out = [0; 3];
        for (i, row) in self.0.iter().enumerate() {
            let s: u64 = (0..3).map(|j| row[j] as u64 * v[j] as u64).sum();
            out[i] = (s % q) as u32;
        }
        out
    }

    pub fn matmul(&self, o: &Mat3, q: u64) -> Mat3 {
        let mut m = [[0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let s: u64 = (0..3).map(|l| self.0[i][l] as u64 * o.0[l][j] as u64).sum();
                *x = (s % q) as u32;
            }
        }
        Mat3(m)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self, q: u64) -> u32 {
        let m = self.0.map(|r| r.map(|x| x as i64));
        let d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        d.rem_euclid(q as i64) as u32
    }

    /// Inverse via the adjugate; the determinant must be a unit.
    pub fn inverse(&self, q: u64) -> Option<Mat3> {
        let det = self.det(q);
        if det == 0 {
            return None;
        }
        let f = Modulus::new(q, 1).ok()?;
        let dinv = f.inv(f.residue(det as i64)).ok()?.value() as i64;
        let m = self.0.map(|r| r.map(|x| x as i64));
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Some(Mat3(
            adj.map(|r| r.map(|x| (x.rem_euclid(q as i64) * dinv % q as i64) as u32)),
        ))
    }
}

impl GroupElement for Mat3 {
    type Ctx = u64;

    fn one(_: &u64) -> Self {
        Mat3::identity()
    }

    fn mul(&self, rhs: &Self, q: &u64) -> Self {
        self.matmul(rhs, *q)
    }

    fn inv(&self, q: &u64) -> Self {
        self.inverse(*q).expect("group elements are invertible")
    }
}

/// Which bilinear form a space carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// diag(1, -1, 1)
    Split,
    /// Tr(ZT) on traceless matrices in coordinates (x, b, c)
    Trace,
}

/// F_q^3 with a non-degenerate symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpace {
    q: u64,
    gram: Mat3,
}

impl QuadSpace {
    pub fn new(q: u64, gram: Mat3) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q == 2 {
            return Err(Error::OddPrimeRequired(q));
        }
        let gram = Mat3(gram.0.map(|r| r.map(|x| (x as u64 % q) as u32)));
        if gram != gram.transpose() {
            return Err(Error::BadSubspace("gram matrix is not symmetric".into()));
        }
        if gram.det(q) == 0 {
            return Err(Error::BadSubspace("form is degenerate".into()));
        }
        Ok(Self { q, gram })
    }

    pub fn of_kind(q: u64, kind: FormKind) -> Result<Self> {
        let minus_one = (q as u32).wrapping_sub(1);
        match kind {
            FormKind::Split => Self::new(q, Mat3([[1, 0, 0], [0, minus_one, 0], [0, 0, 1]])),
            FormKind::Trace => Self::new(q, Mat3([[2, 0, 0], [0, 0, 1], [0, 1, 0]])),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn gram(&self) -> &Mat3 {
        &self.gram
    }

    pub fn form(&self, u: Vec3, v: Vec3) -> u32 {
        let gv = self.gram.apply(v, self.q);
        ((0..3).map(|i| u[i] as u64 * gv[i] as u64).sum::<u64>() % self.q) as u32
    }

    pub fn is_isotropic(&self, v: Vec3) -> bool {
        v != [0; 3] && self.form(v, v) == 0
    }

    pub fn nonzero_vectors(&self) -> impl Iterator<Item = Vec3> {
        let q = self.q as u32;
        (1..q * q * q).map(move |i| [i / (q * q), i / q % q, i % q])
    }

    pub fn add(&self, u: Vec3, v: Vec3) -> Vec3 {
        let q = self.q as u32;
        [(u[0] + v[0]) % q, (u[1] + v[1]) % q, (u[2] + v[2]) % q]
    }

    pub fn scale(&self, s: u32, v: Vec3) -> Vec3 {
        v.map(|x| (x as u64 * s as u64 % self.q) as u32)
    }

    /// Whether M^T G M = G.
    pub fn preserves(&self, m: &Mat3) -> bool {
        m.transpose().matmul(&self.gram, self.q).matmul(m, self.q) == self.gram
    }

    /// The reflection x -> x - 2 (x, v)/(v, v) v, for non-isotropic v.
    pub fn reflection(&self, v: Vec3) -> Option<Mat3> {
        let q = self.q;
        let norm = self.form(v, v);
        if norm == 0 {
            return None;
        }
        let f = Modulus::new(q, 1).ok()?;
        let c = f.mul(f.residue(2), f.inv(f.residue(norm as i64)).ok()?).value() as u64;
        let gv = self.gram.apply(v, q);
        let mut m = [[0u32; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let delta = u64::from(i == j);
                let t = c * v[i] as u64 % q * gv[j] as u64 % q;
                *x = ((delta + q - t) % q) as u32;
            }
        }
        Some(Mat3(m))
    }

    fn in_span(&self, basis: &[Vec3; 2], v: Vec3) -> bool {
        Mat3::from_columns([basis[0], basis[1], v]).det(self.q) == 0
    }

    /// Checks that U is a non-degenerate plane containing an isotropic vector.
    pub fn check_plane(&self, u: &[Vec3; 2]) -> Result<()> {
        let g = |a: Vec3, b: Vec3| self.form(a, b) as i64;
        let q = self.q as i64;
        let det = (g(u[0], u[0]) * g(u[1], u[1]) - g(u[0], u[1]) * g(u[1], u[0])).rem_euclid(q);
        if det == 0 {
            return Err(Error::BadSubspace("plane is degenerate or not two-dimensional".into()));
        }
        if self.plane_vectors(u).iter().all(|&v| !self.is_isotropic(v)) {
            return Err(Error::BadSubspace("plane has no isotropic vector".into()));
        }
        Ok(())
    }

    fn plane_vectors(&self, u: &[Vec3; 2]) -> Vec<Vec3> {
        let q = self.q as u32;
        (0..q * q)
            .map(|i| self.add(self.scale(i / q, u[0]), self.scale(i % q, u[1])))
            .filter(|&v| v != [0; 3])
            .collect()
    }

    /// The canonical hyperbolic plane: span(e2, e3) for the trace form and
    /// span(e1, e2) for the split form.
    pub fn standard_plane(kind: FormKind) -> [Vec3; 2] {
        match kind {
            FormKind::Trace => [[0, 1, 0], [0, 0, 1]],
            FormKind::Split => [[1, 0, 0], [0, 1, 0]],
        }
    }
}

/// O(V) with its subgroups SO(V) and Omega(V) = [SO(V), SO(V)].
pub struct OrthoGroups {
    space: QuadSpace,
    o: MatrixGroup<Mat3>,
    so: SubgroupHandle,
    omega: SubgroupHandle,
    reflections: Vec<Vec3>,
}

/// 2q(q^2 - 1), the order of O(V) in dimension 3.
pub fn orthogonal_order(q: u64) -> u64 {
    2 * q * (q * q - 1)
}

/// Generates O(V) by reflections: those in the basis vectors and their
/// non-isotropic pairwise sums, then further reflections in lexicographic
/// order of their vectors while the closure falls short of 2q(q^2 - 1).
pub fn build_ortho(space: QuadSpace, budget: u64) -> Result<OrthoGroups> {
    let q = space.q();
    let target = orthogonal_order(q);
    if target > budget {
        return Err(Error::BudgetExceeded {
            required: target,
            budget,
        });
    }
    let e = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut vectors: Vec<Vec3> = e.to_vec();
    for i in 0..3 {
        for j in i + 1..3 {
            vectors.push(space.add(e[i], e[j]));
        }
    }
    vectors.retain(|&v| space.form(v, v) != 0);
    let mut gens: Vec<Mat3> = vectors.iter().filter_map(|&v| space.reflection(v)).collect();
    let mut o = MatrixGroup::generate(q, &gens, budget)?;
    let mut candidates = space.nonzero_vectors();
    while (o.order() as u64) < target {
        let next = candidates
            .by_ref()
            .find(|&v| space.reflection(v).is_some_and(|r| o.id_of(&r).is_none()));
        let Some(v) = next else {
            return Err(Error::Invariant(format!(
                "reflections generate only {} of {target} isometries",
                o.order()
            )));
        };
        vectors.push(v);
        gens.push(space.reflection(v).unwrap());
        o = MatrixGroup::generate(q, &gens, budget)?;
    }
    if o.order() as u64 != target || !o.elements().iter().all(|m| space.preserves(m)) {
        return Err(Error::Invariant(
            "reflection closure is not the orthogonal group".into(),
        ));
    }
    let so_members: Vec<ElemId> = (0..o.order() as ElemId).filter(|&x| o.element(x).det(q) == 1).collect();
    let so = SubgroupHandle::from_members(&o, so_members)?;
    let commutators: Vec<ElemId> = so
        .generators()
        .iter()
        .flat_map(|&a| so.generators().iter().map(move |&b| (a, b)))
        .map(|(a, b)| o.commutator(a, b))
        .collect();
    let omega = normal_closure(&o, &commutators, so.generators());
    Ok(OrthoGroups {
        space,
        o,
        so,
        omega,
        reflections: vectors,
    })
}

impl OrthoGroups {
    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn o(&self) -> &MatrixGroup<Mat3> {
        &self.o
    }

    pub fn so(&self) -> &SubgroupHandle {
        &self.so
    }

    pub fn omega(&self) -> &SubgroupHandle {
        &self.omega
    }

    /// Vectors whose reflections generate O(V).
    pub fn reflection_vectors(&self) -> &[Vec3] {
        &self.reflections
    }

    pub fn matrix(&self, x: ElemId) -> &Mat3 {
        self.o.element(x)
    }

    /// O(V) = <-I> x SO(V) as sets.
    pub fn minus_identity_splits(&self) -> bool {
        let q = self.space.q();
        let Some(minus) = self.o.id_of(&Mat3::scalar(q as u32 - 1)) else {
            return false;
        };
        if self.so.contains(minus) {
            return false;
        }
        let mut all: Vec<ElemId> = self.so.members().to_vec();
        all.extend(self.so.members().iter().map(|&x| self.o.mul(minus, x)));
        all.sort_unstable();
        all.dedup();
        all.len() == self.o.order()
    }

    /// The orbit of v under the subgroup generated by `gens`.
    pub fn orbit(&self, gens: &[ElemId], v: Vec3) -> Vec<Vec3> {
        let q = self.space.q();
        let mats: Vec<&Mat3> = gens.iter().map(|&g| self.o.element(g)).collect();
        let mut seen = FxHashSet::default();
        seen.insert(v);
        let mut out = vec![v];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            head += 1;
            for m in &mats {
                let y = m.apply(x, q);
                if seen.insert(y) {
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Omega-orbits on nonzero vectors, each sorted, listed by least element.
    pub fn omega_orbits(&self) -> Vec<Vec<Vec3>> {
        let mut done = FxHashSet::default();
        let mut orbits = Vec::new();
        for v in self.space.nonzero_vectors() {
            if done.contains(&v) {
                continue;
            }
            let orbit = self.orbit(self.omega.generators(), v);
            done.extend(orbit.iter().copied());
            orbits.push(orbit);
        }
        orbits
    }

    /// Stabilizer of v in O(V).
    pub fn stabilizer(&self, v: Vec3) -> Vec<ElemId> {
        let q = self.space.q();
        (0..self.o.order() as ElemId)
            .filter(|&x| self.o.element(x).apply(v, q) == v)
            .collect()
    }
}

/// Whether the Omega-orbit of w meets the plane U.
pub fn check_f3(groups: &OrthoGroups, plane: &[Vec3; 2], w: Vec3) -> Result<bool> {
    let space = groups.space();
    space.check_plane(plane)?;
    if w == [0; 3] {
        return Err(Error::ParamOutOfRange("w must be nonzero".into()));
    }
    if space.in_span(plane, w) {
        return Ok(true);
    }
    Ok(groups
        .orbit(groups.omega().generators(), w)
        .iter()
        .any(|&v| space.in_span(plane, v)))
}

/// Everything checked about one quadratic space.
#[derive(Clone, Debug, Serialize)]
pub struct F3Report {
    pub q: u64,
    pub form: FormKind,
    pub o_order: u64,
    pub so_order: u64,
    pub omega_order: u64,
    pub minus_identity_splits: bool,
    pub vectors_checked: u64,
    pub failures: Vec<Vec3>,
    pub isotropic_count: u64,
    pub isotropic_orbit_sizes: Vec<u64>,
    pub isotropic_stabilizer_order: u64,
    pub so_plane_order: u64,
    pub so_plane_cyclic: bool,
    pub omega_plane_order: u64,
    pub s_outside_omega: bool,
}

impl F3Report {
    pub fn pass(&self) -> bool {
        let q = self.q;
        let half = (q * q - 1) / 2;
        self.failures.is_empty()
            && self.o_order == orthogonal_order(q)
            && self.so_order * 2 == self.o_order
            && self.omega_order * 2 == self.so_order
            && self.minus_identity_splits
            && self.vectors_checked == q * q * q - 1
            && self.isotropic_count == q * q - 1
            && self.isotropic_orbit_sizes == [half, half]
            && self.isotropic_stabilizer_order == 2 * q
            && self.so_plane_order == q - 1
            && self.so_plane_cyclic
            && self.omega_plane_order * 2 == q - 1
            && self.s_outside_omega
    }
}

/// Exhaustive check over all nonzero w for the standard plane of `kind`, with
/// the isotropic census and the plane subgroups.
pub fn f3_exhaustive(q: u64, kind: FormKind, budget: u64) -> Result<F3Report> {
    let space = QuadSpace::of_kind(q, kind)?;
    let plane = QuadSpace::standard_plane(kind);
    let groups = build_ortho(space, budget)?;
    let space = groups.space();
    space.check_plane(&plane)?;

    let orbits = groups.omega_orbits();
    let mut failures = Vec::new();
    let mut vectors_checked = 0;
    for orbit in &orbits {
        let meets = orbit.iter().any(|&v| space.in_span(&plane, v));
        vectors_checked += orbit.len() as u64;
        if !meets {
            failures.extend(orbit.iter().copied());
        }
    }
    failures.sort_unstable();

    let isotropic: Vec<Vec3> = space.nonzero_vectors().filter(|&v| space.is_isotropic(v)).collect();
    let mut isotropic_orbit_sizes: Vec<u64> = orbits
        .iter()
        .filter(|orb| space.is_isotropic(orb[0]))
        .map(|orb| orb.len() as u64)
        .collect();
    isotropic_orbit_sizes.sort_unstable();

    let iso = plane_isotropic(space, &plane);
    let isotropic_stabilizer_order = groups.stabilizer(iso).len() as u64;

    let (so_plane, generator_order) = so_of_plane(&groups, &plane)?;
    let omega_plane = so_plane.iter().filter(|&&x| groups.omega().contains(x)).count() as u64;
    let s = plane_scaling(space, &plane)?;
    let s_outside_omega = match groups.o().id_of(&s) {
        Some(id) => groups.so().contains(id) && !groups.omega().contains(id),
        None => false,
    };

    Ok(F3Report {
        q,
        form: kind,
        o_order: groups.o().order() as u64,
        so_order: groups.so().order() as u64,
        omega_order: groups.omega().order() as u64,
        minus_identity_splits: groups.minus_identity_splits(),
        vectors_checked,
        failures,
        isotropic_count: isotropic.len() as u64,
        isotropic_orbit_sizes,
        isotropic_stabilizer_order,
        so_plane_order: so_plane.len() as u64,
        so_plane_cyclic: generator_order == so_plane.len() as u64,
        omega_plane_order: omega_plane,
        s_outside_omega,
    })
}

fn plane_isotropic(space: &QuadSpace, plane: &[Vec3; 2]) -> Vec3 {
    space
        .plane_vectors(plane)
        .into_iter()
        .find(|&v| space.is_isotropic(v))
        .expect("plane was checked to contain an isotropic vector")
}

/// A nonzero vector spanning the orthogonal complement of the plane.
fn plane_complement(space: &QuadSpace, plane: &[Vec3; 2]) -> Vec3 {
    space
        .nonzero_vectors()
        .find(|&v| space.form(v, plane[0]) == 0 && space.form(v, plane[1]) == 0)
        .expect("a plane in a 3-space has a nonzero orthogonal complement")
}

/// SO(U) embedded in SO(V) as the isometries fixing the complement of U
/// pointwise, with the largest element order found in it.
fn so_of_plane(groups: &OrthoGroups, plane: &[Vec3; 2]) -> Result<(Vec<ElemId>, u64)> {
    let space = groups.space();
    let w = plane_complement(space, plane);
    let q = space.q();
    let members: Vec<ElemId> = groups
        .so()
        .members()
        .iter()
        .copied()
        .filter(|&x| groups.matrix(x).apply(w, q) == w)
        .collect();
    let max_order = members.iter().map(|&x| groups.o().element_order(x)).max().unwrap_or(1);
    Ok((members, max_order))
}

/// diag(delta, delta^-1) in a hyperbolic basis of U, extended by the identity
/// on the complement; delta is the least non-square mod q.
pub fn plane_scaling(space: &QuadSpace, plane: &[Vec3; 2]) -> Result<Mat3> {
    let q = space.q();
    let f = Modulus::new(q, 1)?;
    let u1 = plane_isotropic(space, plane);
    let partner = space
        .plane_vectors(plane)
        .into_iter()
        .find(|&v| space.is_isotropic(v) && space.form(u1, v) != 0)
        .ok_or_else(|| Error::BadSubspace("plane is not hyperbolic".into()))?;
    let scale = f.inv(f.residue(space.form(u1, partner) as i64))?.value();
    let u2 = space.scale(scale, partner);
    let w = plane_complement(space, plane);
    let delta = (2..q)
        .find(|&d| f.pow(f.residue(d as i64), (q - 1) / 2).value() as u64 == q - 1)
        .expect("odd prime fields have non-squares") as u32;
    let delta_inv = f.inv(f.residue(delta as i64))?.value();
    let basis = Mat3::from_columns([u1, u2, w]);
    let diag = Mat3([[delta, 0, 0], [0, delta_inv, 0], [0, 0, 1]]);
    let inv = basis
        .inverse(q)
        .ok_or_else(|| Error::BadSubspace("hyperbolic basis is singular".into()))?;
    Ok(basis.matmul(&diag, q).matmul(&inv, q))
}

/// (Z, T) = Tr(ZT) = 2 x x' + b c' + c b' in traceless coordinates.
pub fn trace_form(z: Vec3, t: Vec3, p: u64) -> u32 {
    let s = 2 * z[0] as u64 * t[0] as u64 + z[1] as u64 * t[2] as u64 + z[2] as u64 * t[1] as u64;
    (s % p) as u32
}

/// Matrix of Z -> x Z x^-1 on traceless coordinates, for x in SL2(F_p).
pub fn conjugation_matrix(x: &GMat, p: u64) -> Mat3 {
    let x = x.reduce(p);
    let xi = x.adjugate(p);
    let basis = [
        GMat::new(1, 0, 0, (p - 1) as u32),
        GMat::new(0, 1, 0, 0),
        GMat::new(0, 0, 1, 0),
    ];
    let cols = basis.map(|z| {
        let y = x.matmul(&z, p).matmul(&xi, p);
        [y.a, y.b, y.c]
    });
    Mat3::from_columns(cols)
}

/// The action of G = SL2(Z/p^nZ) on V = sl2(F_p) by conjugation through
/// reduction mod p, with O(V) taken for the trace form.
pub struct AdjointAction<'g> {
    group: &'g Sl2Group,
    ortho: OrthoGroups,
    to_level_one: Vec<ElemId>,
    level_one_image: Vec<ElemId>,
}

pub fn adjoint_action(group: &Sl2Group, budget: u64) -> Result<AdjointAction<'_>> {
    if group.n() < 2 {
        return Err(Error::RequiresN2);
    }
    let p = group.p();
    if p == 2 {
        return Err(Error::OddPrimeRequired(2));
    }
    let ortho = build_ortho(QuadSpace::of_kind(p, FormKind::Trace)?, budget)?;
    let g1 = Sl2Group::build(Modulus::new(p, 1)?, budget)?;
    let to_level_one = group.reduce_hom(&g1)?;
    let level_one_image = (0..g1.order() as ElemId)
        .map(|x| {
            let m = conjugation_matrix(&g1.matrix(x), p);
            ortho
                .o()
                .id_of(&m)
                .ok_or_else(|| Error::Invariant(format!("{m:?} does not preserve the trace form")))
        })
        .collect::<Result<_>>()?;
    Ok(AdjointAction {
        group,
        ortho,
        to_level_one,
        level_one_image,
    })
}

impl AdjointAction<'_> {
    pub fn ortho(&self) -> &OrthoGroups {
        &self.ortho
    }

    pub fn p(&self) -> u64 {
        self.group.p()
    }

    /// Image of x in O(V), as an id of the orthogonal group.
    pub fn image_of(&self, x: ElemId) -> ElemId {
        self.level_one_image[self.to_level_one[x as usize] as usize]
    }

    pub fn matrix_of(&self, x: ElemId) -> &Mat3 {
        self.ortho.matrix(self.image_of(x))
    }

    pub fn act(&self, x: ElemId, z: Vec3) -> Vec3 {
        self.matrix_of(x).apply(z, self.p())
    }

    /// The image of G, sorted.
    pub fn image(&self) -> Vec<ElemId> {
        let mut v = self.level_one_image.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn kernel(&self) -> Vec<ElemId> {
        (0..self.group.order() as ElemId)
            .filter(|&x| self.image_of(x) == self.ortho.o().identity())
            .collect()
    }
}

/// Results of the adjoint identification.
#[derive(Clone, Debug, Serialize)]
pub struct AdjointReport {
    pub p: u64,
    pub n: u32,
    pub image_order: u64,
    pub expected_order: u64,
    pub image_is_omega: bool,
    pub kernel_order: u64,
    pub kernel_contains_e_and_z: bool,
    pub equivariant_on_f: bool,
    pub equivariance_pairs: u64,
    pub quarter_turn_nontrivial: bool,
    pub g_fixed_space: Vec<Vec3>,
    pub form_invariant: bool,
    pub form_triples_checked: u64,
    pub form_exhaustive: bool,
}

impl AdjointReport {
    pub fn pass(&self) -> bool {
        self.image_order == self.expected_order
            && self.image_is_omega
            && self.kernel_contains_e_and_z
            && self.equivariant_on_f
            && self.quarter_turn_nontrivial
            && (self.p < 5 || self.g_fixed_space == [[1, 0, 0]])
            && self.form_invariant
    }
}

/// Number of sampled triples for the trace-form invariance check.
pub const FORM_SAMPLES: usize = 10_000;

pub fn adjoint_report(action: &AdjointAction<'_>) -> Result<AdjointReport> {
    let g = action.group;
    let p = g.p();
    let image = action.image();
    let omega = action.ortho().omega().members();

    let kernel = action.kernel();
    let e = g.subgroup_e()?;
    let kernel_contains_e_and_z =
        kernel.binary_search(&g.z()).is_ok() && e.members().iter().all(|x| kernel.binary_search(x).is_ok());

    // conjugation on F read through the linearisation
    let f = g.subgroup_f()?;
    let total = g.order();
    let picks = total.min(200);
    let stride = stride_for(total);
    let mut xs: Vec<ElemId> = g.generators().to_vec();
    xs.extend((0..picks).map(|s| (s * stride % total) as ElemId));
    let mut equivariant_on_f = true;
    let mut equivariance_pairs = 0;
    for &x in &xs {
        for &y in f.members() {
            let lin = g.linearize(g.conj(x, y)).expect("F is normal");
            equivariant_on_f &= lin == action.act(x, g.linearize(y).unwrap());
            equivariance_pairs += 1;
        }
    }

    let m = *g.modulus();
    let quarter = g
        .id_of(&GMat::from_signed(&m, 0, 1, -1, 0))
        .ok_or_else(|| Error::Invariant("(0 1; -1 0) missing".into()))?;
    let quarter_turn_nontrivial = action.image_of(quarter) != action.ortho().o().identity();

    let g_fixed_space = match g.element_g() {
        Ok(gid) => fixed_space(action.matrix_of(gid), p),
        Err(_) => Vec::new(),
    };

    let (form_invariant, form_triples_checked, form_exhaustive) = form_invariance(action);

    Ok(AdjointReport {
        p,
        n: g.n(),
        image_order: image.len() as u64,
        expected_order: p * (p * p - 1) / 2,
        image_is_omega: image == omega,
        kernel_order: kernel.len() as u64,
        kernel_contains_e_and_z,
        equivariant_on_f,
        equivariance_pairs,
        quarter_turn_nontrivial,
        g_fixed_space,
        form_invariant,
        form_triples_checked,
        form_exhaustive,
    })
}

/// Basis of {v : M v = v} in reduced echelon form, scaled to leading 1.
pub fn fixed_space(m: &Mat3, q: u64) -> Vec<Vec3> {
    let field = crate::ffield::PrimeField::new(q);
    let rows: Vec<Vec<u64>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let d = u64::from(i == j);
                    (m.0[i][j] as u64 + q - d) % q
                })
                .collect()
        })
        .collect();
    let kernel = crate::ffield::nullspace(&field, rows);
    let basis = crate::ffield::rref(&field, kernel);
    basis
        .rows
        .into_iter()
        .map(|r| [r[0] as u32, r[1] as u32, r[2] as u32])
        .collect()
}

/// (xZx^-1, xTx^-1) = (Z, T): exhaustive over SL2(F_p) x V x V at p = 5,
/// otherwise a fixed stride sample of [`FORM_SAMPLES`] triples.
fn form_invariance(action: &AdjointAction<'_>) -> (bool, u64, bool) {
    let p = action.p();
    let level_one: Vec<Mat3> = action
        .level_one_image
        .iter()
        .map(|&x| *action.ortho().matrix(x))
        .collect();
    let vectors: Vec<Vec3> = std::iter::once([0; 3])
        .chain(QuadSpace::of_kind(p, FormKind::Trace).unwrap().nonzero_vectors())
        .collect();
    let nv = vectors.len();
    let check = |m: &Mat3, z: Vec3, t: Vec3| trace_form(m.apply(z, p), m.apply(t, p), p) == trace_form(z, t, p);
    if p == 5 {
        let mut ok = true;
        let mut count = 0u64;
        for m in &level_one {
            for &z in &vectors {
                for &t in &vectors {
                    ok &= check(m, z, t);
                    count += 1;
                }
            }
        }
        (ok, count, true)
    } else {
        let total = level_one.len() * nv * nv;
        let stride = stride_for(total);
        let mut ok = true;
        for s in 0..FORM_SAMPLES {
            let idx = s * stride % total;
            let m = &level_one[idx / (nv * nv)];
            let z = vectors[idx / nv % nv];
            let t = vectors[idx % nv];
            ok &= check(m, z, t);
        }
        (ok, FORM_SAMPLES as u64, false)
    }
}

/// The linear character T -> eps^{(Z, T)} of F = V, kept as exponents mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Lambda {
    pub z: Vec3,
    pub p: u64,
}

pub fn lambda_from_z(z: Vec3, p: u64) -> Lambda {
    Lambda {
        z: z.map(|x| (x as u64 % p) as u32),
        p,
    }
}

impl Lambda {
    /// The exponent of eps in lambda(T).
    pub fn exponent(&self, t: Vec3) -> u32 {
        trace_form(self.z, t, self.p)
    }

    pub fn is_trivial(&self) -> bool {
        self.z == [0; 3]
    }

    /// Whether F0, the antidiagonal part of V, lies in the kernel.
    pub fn kernel_contains_f0(&self) -> bool {
        self.exponent([0, 1, 0]) == 0 && self.exponent([0, 0, 1]) == 0
    }

    /// lambda on an element of F, as an exponent of eps.
    pub fn on_element(&self, group: &Sl2Group, f: ElemId) -> Option<u32> {
        group.linearize(f).map(|t| self.exponent(t))
    }
}

/// The inertia group of lambda: the stabilizer of Z under the adjoint action.
pub fn inertia_group(action: &AdjointAction<'_>, lambda: &Lambda) -> Result<SubgroupHandle> {
    let g = action.group;
    let members: Vec<ElemId> = (0..g.order() as ElemId)
        .filter(|&x| action.act(x, lambda.z) == lambda.z)
        .collect();
    SubgroupHandle::from_members(g, members)
}

/// The inertia group from its definition: x with lambda(x^-1 f x) = lambda(f)
/// for f running over a basis of F.
pub fn inertia_group_direct(group: &Sl2Group, lambda: &Lambda) -> Result<SubgroupHandle> {
    let basis = [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|v| group.delinearize(v));
    let basis: Vec<ElemId> = basis.into_iter().collect::<Result<_>>()?;
    let members: Vec<ElemId> = (0..group.order() as ElemId)
        .filter(|&x| {
            basis.iter().all(|&f| {
                let moved = group.conj(group.inv(x), f);
                lambda.on_element(group, moved) == lambda.on_element(group, f)
            })
        })
        .collect();
    SubgroupHandle::from_members(group, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::closure;

    const BUDGET: u64 = 1 << 20;

    #[test]
    fn trace_form_examples() {
        let diag = [1, 0, 0];
        assert_eq!(trace_form(diag, diag, 7), 2);
        assert_eq!(trace_form([0, 1, 0], [0, 1, 0], 7), 0);
        for z in QuadSpace::of_kind(5, FormKind::Trace).unwrap().nonzero_vectors() {
            for t in [[1, 2, 3], [4, 0, 1], [0, 3, 3]] {
                assert_eq!(trace_form(z, t, 5), trace_form(t, z, 5));
            }
        }
        let space = QuadSpace::of_kind(7, FormKind::Trace).unwrap();
        assert_eq!(space.form([1, 2, 3], [4, 5, 6]), trace_form([1, 2, 3], [4, 5, 6], 7));
    }

    #[test]
    fn trace_form_matches_matrix_trace() {
        let p = 11;
        let mat = |v: Vec3| GMat::new(v[0], v[1], v[2], (p as u32 - v[0]) % p as u32);
        for z in [[1, 2, 3], [0, 5, 7], [10, 0, 4]] {
            for t in [[3, 3, 1], [2, 9, 0]] {
                let prod = mat(z).matmul(&mat(t), p);
                assert_eq!(trace_form(z, t, p), ((prod.a + prod.d) as u64 % p) as u32);
            }
        }
    }

    #[test]
    fn q3_orders_match_brute_force() {
        // every 3x3 matrix over F_3 preserving the split form
        let space = QuadSpace::of_kind(3, FormKind::Split).unwrap();
        let mut count = 0;
        for code in 0..3u32.pow(9) {
            let mut m = [[0; 3]; 3];
            let mut c = code;
            for row in m.iter_mut() {
                for x in row.iter_mut() {
                    *x = c % 3;
                    c /= 3;
                }
            }
            if space.preserves(&Mat3(m)) {
                count += 1;
            }
        }
        assert_eq!(count, 48);
        let groups = build_ortho(space, BUDGET).unwrap();
        assert_eq!(groups.o().order(), 48);
        assert_eq!(groups.so().order(), 24);
        assert_eq!(groups.omega().order(), 12);
        assert!(groups.minus_identity_splits());
    }

    #[test]
    fn omega_is_the_full_commutator_subgroup() {
        for (q, kind) in [(3, FormKind::Trace), (5, FormKind::Split), (5, FormKind::Trace)] {
            let groups = build_ortho(QuadSpace::of_kind(q, kind).unwrap(), BUDGET).unwrap();
            let so = groups.so().members();
            let all: Vec<ElemId> = so
                .iter()
                .flat_map(|&a| so.iter().map(move |&b| (a, b)))
                .map(|(a, b)| groups.o().commutator(a, b))
                .collect();
            assert_eq!(closure(groups.o(), &all, None), groups.omega().members());
            assert_eq!(groups.omega().order() as u64, q * (q * q - 1) / 2);
        }
    }

    #[test]
    fn f3_for_small_primes() {
        for q in [3, 5, 7] {
            for kind in [FormKind::Split, FormKind::Trace] {
                let r = f3_exhaustive(q, kind, BUDGET).unwrap();
                assert!(r.pass(), "{r:?}");
            }
        }
    }

    #[test]
    fn check_f3_single_vectors() {
        let groups = build_ortho(QuadSpace::of_kind(5, FormKind::Split).unwrap(), BUDGET).unwrap();
        let plane = QuadSpace::standard_plane(FormKind::Split);
        assert!(check_f3(&groups, &plane, [1, 0, 0]).unwrap());
        assert!(check_f3(&groups, &plane, [0, 0, 1]).unwrap());
        assert!(matches!(
            check_f3(&groups, &[[1, 0, 0], [2, 0, 0]], [0, 0, 1]),
            Err(Error::BadSubspace(_))
        ));
        // span(e1, e3) carries x^2 + z^2, anisotropic mod 7 but not mod 5
        let g7 = build_ortho(QuadSpace::of_kind(7, FormKind::Split).unwrap(), BUDGET).unwrap();
        assert!(matches!(
            check_f3(&g7, &[[1, 0, 0], [0, 0, 1]], [0, 1, 0]),
            Err(Error::BadSubspace(_))
        ));
    }

    #[test]
    fn bad_spaces() {
        assert!(matches!(
            QuadSpace::of_kind(9, FormKind::Split),
            Err(Error::NotPrime(9))
        ));
        assert!(matches!(
            QuadSpace::of_kind(2, FormKind::Split),
            Err(Error::OddPrimeRequired(2))
        ));
        let degenerate = Mat3([[1, 0, 0], [0, 0, 0], [0, 0, 1]]);
        assert!(matches!(QuadSpace::new(5, degenerate), Err(Error::BadSubspace(_))));
        assert!(matches!(
            build_ortho(QuadSpace::of_kind(13, FormKind::Split).unwrap(), 100),
            Err(Error::BudgetExceeded { required: 4368, .. })
        ));
    }

    #[test]
    fn conjugation_matrix_is_a_homomorphism() {
        let g = Sl2Group::build(Modulus::new(7, 1).unwrap(), BUDGET).unwrap();
        for a in (0..g.order() as ElemId).step_by(17) {
            for b in (0..g.order() as ElemId).step_by(23) {
                let lhs = conjugation_matrix(&g.matrix(g.mul(a, b)), 7);
                let rhs = conjugation_matrix(&g.matrix(a), 7).matmul(&conjugation_matrix(&g.matrix(b), 7), 7);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn adjoint_at_5_2() {
        let g = Sl2Group::build(Modulus::new(5, 2).unwrap(), BUDGET).unwrap();
        let action = adjoint_action(&g, BUDGET).unwrap();
        let r = adjoint_report(&action).unwrap();
        assert_eq!(r.image_order, 60);
        assert_eq!(r.kernel_order, 2 * 125);
        assert!(r.form_exhaustive);
        assert_eq!(r.form_triples_checked, 120 * 125 * 125);
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn adjoint_requires_level_two() {
        let g = Sl2Group::build(Modulus::new(5, 1).unwrap(), BUDGET).unwrap();
        assert!(matches!(adjoint_action(&g, BUDGET), Err(Error::RequiresN2)));
    }

    #[test]
    fn lambda_properties() {
        let p = 5;
        assert!(lambda_from_z([0, 0, 0], p).is_trivial());
        // Z -> lambda is injective: exponents on the basis determine Z
        let space = QuadSpace::of_kind(p, FormKind::Trace).unwrap();
        let mut seen = FxHashSet::default();
        for z in std::iter::once([0; 3]).chain(space.nonzero_vectors()) {
            let l = lambda_from_z(z, p);
            assert!(seen.insert([l.exponent([1, 0, 0]), l.exponent([0, 1, 0]), l.exponent([0, 0, 1])]));
            assert_eq!(l.kernel_contains_f0(), z[1] == 0 && z[2] == 0);
        }
        // lambda(A) = 1 at n = 2 for Z in V0
        let g = Sl2Group::build(Modulus::new(5, 2).unwrap(), BUDGET).unwrap();
        let a = g.element_a().unwrap();
        for z in [[0, 1, 0], [0, 2, 3], [0, 0, 4]] {
            assert_eq!(lambda_from_z(z, p).on_element(&g, a), Some(0));
        }
    }

    #[test]
    fn inertia_groups() {
        let g = Sl2Group::build(Modulus::new(5, 2).unwrap(), BUDGET).unwrap();
        let action = adjoint_action(&g, BUDGET).unwrap();
        let trivial = lambda_from_z([0, 0, 0], 5);
        assert_eq!(inertia_group(&action, &trivial).unwrap().order(), g.order());
        let e = g.subgroup_e().unwrap();
        let gid = g.element_g().unwrap();
        let cg = SubgroupHandle::from_generators(&g, &[gid]);
        let az = SubgroupHandle::from_generators(&g, &[g.element_a().unwrap(), g.z()]);
        for z in [[0, 1, 0], [0, 1, 1], [0, 2, 3]] {
            let lambda = lambda_from_z(z, 5);
            let j = inertia_group(&action, &lambda).unwrap();
            assert_eq!(j, inertia_group_direct(&g, &lambda).unwrap());
            assert!(e.is_subset_of(&j));
            assert_eq!(j.intersection(&cg), az.members());
            let orbit = action.ortho().orbit(&action.image(), z);
            assert_eq!(orbit.len() * j.order(), g.order());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn prime() -> impl Strategy<Value = u64> {
            prop::sample::select(vec![3u64, 5, 7, 11, 13])
        }

        proptest! {
            #[test]
            fn reflections_are_isometric_involutions(q in prime(), v in prop::array::uniform3(0u32..13), split in any::<bool>()) {
                let kind = if split { FormKind::Split } else { FormKind::Trace };
                let space = QuadSpace::of_kind(q, kind).unwrap();
                let v = v.map(|x| x % q as u32);
                match space.reflection(v) {
                    Some(r) => {
                        prop_assert!(space.preserves(&r));
                        prop_assert_eq!(r.matmul(&r, q), Mat3::identity());
                        prop_assert_eq!(r.det(q), (q - 1) as u32);
                    }
                    None => prop_assert_eq!(space.form(v, v), 0),
                }
            }

            #[test]
            fn conjugation_preserves_the_trace_form(
                (q, a, b, c, z, t) in prime().prop_flat_map(|q| {
                    let r = 0..q as u32;
                    (Just(q), 1..q as u32, r.clone(), r.clone(), prop::array::uniform3(r.clone()), prop::array::uniform3(r))
                })
            ) {
                let m = Modulus::new(q, 1).unwrap();
                // d = (1 + b c) / a, so a d - b c = 1
                let d = m.mul(m.residue(1 + b as i64 * c as i64), m.inv(m.residue(a as i64)).unwrap()).value();
                let cm = conjugation_matrix(&GMat::new(a, b, c, d), q);
                prop_assert_eq!(trace_form(cm.apply(z, q), cm.apply(t, q), q), trace_form(z, t, q));
                prop_assert_eq!(cm.det(q), 1);
            }
        }
    }
}
