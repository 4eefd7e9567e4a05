//! Complex character tables by the Dixon-Schneider method.
//!
//! The class matrices are diagonalized simultaneously over a prime field F_l
//! with l = 1 mod exponent(G); each common eigenvector is proportional to a
//! column of character values. Values are then lifted to sums of roots of
//! unity by counting eigenvalue multiplicities on cyclic subgroups.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classes::ClassStructure;
use crate::cyclo::{CycloValue, CyclotomicField};
use crate::error::{Error, Result};
use crate::ffield::{charpoly, nullspace, poly_roots, rref, Basis, Poly, PrimeField};
use crate::group::{ElemId, GroupView, SubgroupHandle};
use crate::modring::is_prime;

/// Tolerance for the advisory complex checks.
pub const FLOAT_TOLERANCE: f64 = 1e-6;

/// The character table of a finite group.
///
/// Rows are characters, columns are classes in the numbering of the
/// [`ClassStructure`] the table was built from. Row 0 is the trivial
/// character; rows are sorted by degree and then by their values mod l.
#[derive(Clone, Debug)]
pub struct CharTable {
    group_order: u64,
    exponent: u32,
    field: PrimeField,
    theta: u64,
    theta_powers: Vec<u64>,
    class_sizes: Vec<u64>,
    inverse_class: Vec<usize>,
    degrees: Vec<u64>,
    values_modl: Vec<Vec<u64>>,
    values_cyclo: Vec<Vec<CycloValue>>,
}

/// The least prime l = 1 mod e above 2 k ceil(sqrt|G|), with an element of
/// order e in F_l.
pub fn choose_ell(classes: &ClassStructure) -> (u64, u64) {
    let e = classes.exponent();
    let bound = 2 * classes.k() as u64 * ceil_sqrt(classes.group_order());
    let mut ell = bound / e * e + 1;
    while ell <= bound || !is_prime(ell) {
        ell += e;
    }
    let theta = PrimeField::new(ell).element_of_order(e);
    (ell, theta)
}

fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while r * r < x {
        r += 1;
    }
    r
}

fn floor_sqrt(x: u64) -> u64 {
    let r = ceil_sqrt(x);
    if r * r > x {
        r - 1
    } else {
        r
    }
}

pub fn compute_table<G: GroupView + ?Sized>(group: &G, classes: &ClassStructure) -> Result<CharTable> {
    let (ell, theta) = choose_ell(classes);
    compute_table_with(group, classes, ell, theta)
}

/// Builds the table over a caller-chosen field; `theta` must have order
/// exponent(G) in F_ell.
pub fn compute_table_with<G: GroupView + ?Sized>(
    group: &G,
    classes: &ClassStructure,
    ell: u64,
    theta: u64,
) -> Result<CharTable> {
    let k = classes.k();
    let field = PrimeField::new(ell);
    let e = classes.exponent();
    if (ell - 1) % e != 0 || field.pow(theta, e) != 1 {
        return Err(Error::SplitFailure {
            ell,
            reason: "theta does not have order dividing the exponent".into(),
        });
    }

    let columns = split_common_eigenspaces(group, classes, &field)?;

    let mut rows = Vec::with_capacity(k);
    for v in columns {
        if v[0] != 1 {
            return Err(Error::SplitFailure {
                ell,
                reason: "eigenvector vanishes at the identity class".into(),
            });
        }
        let s = field.dot((0..k).map(|c| (field.mul(classes.size(c) % ell, v[c]), v[classes.inverse_class(c)])));
        if s == 0 {
            return Err(Error::SplitFailure {
                ell,
                reason: "degenerate norm of an eigenvector".into(),
            });
        }
        let target = field.mul(classes.group_order() % ell, field.inv(s));
        let order = classes.group_order();
        let degree = (1..=floor_sqrt(order))
            .find(|&d| order % d == 0 && field.mul(d % ell, d % ell) == target)
            .ok_or_else(|| Error::SplitFailure {
                ell,
                reason: "no admissible degree for an eigenvector".into(),
            })?;
        let values: Vec<u64> = v.iter().map(|&x| field.mul(x, degree % ell)).collect();
        rows.push((degree, values));
    }
    rows.sort();
    let (degrees, values_modl): (Vec<u64>, Vec<Vec<u64>>) = rows.into_iter().unzip();

    let theta_powers: Vec<u64> = (0..e).map(|t| field.pow(theta, t)).collect();
    let values_cyclo = lift_cyclotomic(group, classes, &field, &theta_powers, &degrees, &values_modl)?;

    Ok(CharTable {
        group_order: classes.group_order(),
        exponent: e as u32,
        field,
        theta,
        theta_powers,
        class_sizes: classes.sizes().to_vec(),
        inverse_class: (0..k).map(|c| classes.inverse_class(c)).collect(),
        degrees,
        values_modl,
        values_cyclo,
    })
}

/// Rows `rows` of the class matrix of class j, built in parallel.
fn class_matrix_rows<G: GroupView + ?Sized>(
    group: &G,
    classes: &ClassStructure,
    j: usize,
    rows: &[usize],
) -> Vec<Vec<(usize, u32)>> {
    let members = classes.members(j);
    rows.par_iter()
        .map(|&r| {
            let g = classes.rep(r);
            let mut dense = vec![0u32; classes.k()];
            for &y in members {
                dense[classes.class_of(group.mul(y, g))] += 1;
            }
            dense.into_iter().enumerate().filter(|&(_, v)| v != 0).collect()
        })
        .collect()
}

/// Splits F_l^k into common eigenlines of the class matrices, taken in order
/// of increasing class size. Returns one vector per line, scaled to 1 at the
/// identity class when possible.
fn split_common_eigenspaces<G: GroupView + ?Sized>(
    group: &G,
    classes: &ClassStructure,
    field: &PrimeField,
) -> Result<Vec<Vec<u64>>> {
    let k = classes.k();
    let mut order: Vec<usize> = (0..k).filter(|&c| c != classes.class_of(group.identity())).collect();
    order.sort_by_key(|&c| (classes.size(c), c));

    let mut spaces = vec![Basis::standard(k)];
    for j in order {
        if spaces.iter().all(|s| s.dim() == 1) {
            break;
        }
        let mut needed: Vec<usize> = spaces
            .iter()
            .filter(|s| s.dim() > 1)
            .flat_map(|s| s.pivots.iter().copied())
            .collect();
        needed.sort_unstable();
        needed.dedup();
        let matrix_rows = class_matrix_rows(group, classes, j, &needed);
        let row_of = |r: usize| &matrix_rows[needed.binary_search(&r).unwrap()];

        let mut next = Vec::with_capacity(spaces.len());
        for space in spaces {
            if space.dim() == 1 {
                next.push(space);
                continue;
            }
            next.extend(split_space(field, &space, row_of)?);
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.dim() != 1) {
        return Err(Error::SplitFailure {
            ell: field.p(),
            reason: "class matrices leave a multi-dimensional common eigenspace".into(),
        });
    }
    Ok(spaces.into_iter().map(|s| s.rows.into_iter().next().unwrap()).collect())
}

fn split_space<'a>(
    field: &PrimeField,
    space: &Basis,
    row_of: impl Fn(usize) -> &'a Vec<(usize, u32)>,
) -> Result<Vec<Basis>> {
    let d = space.dim();
    // Matrix of M on the space in the RREF basis: coordinates are the values
    // at the pivot columns.
    let restricted: Vec<Vec<u64>> = space
        .pivots
        .iter()
        .map(|&pl| {
            let row = row_of(pl);
            space
                .rows
                .iter()
                .map(|b| field.dot(row.iter().map(|&(c, m)| (m as u64, b[c]))))
                .collect()
        })
        .collect();
    let roots = poly_roots(field, &Poly::new(charpoly(field, &restricted)));
    if roots.len() == 1 {
        return Ok(vec![space.clone()]);
    }
    let mut pieces = Vec::with_capacity(roots.len());
    let mut total = 0;
    for lambda in roots {
        let shifted: Vec<Vec<u64>> = restricted
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &x)| if i == j { field.sub(x, lambda) } else { x })
                    .collect()
            })
            .collect();
        let kernel = nullspace(field, shifted);
        let ambient: Vec<Vec<u64>> = kernel
            .iter()
            .map(|coeffs| {
                let mut w = vec![0u64; space.rows[0].len()];
                for (&c, b) in coeffs.iter().zip(&space.rows) {
                    if c == 0 {
                        continue;
                    }
                    for (x, &y) in w.iter_mut().zip(b) {
                        *x = field.add(*x, field.mul(c, y));
                    }
                }
                w
            })
            .collect();
        total += ambient.len();
        pieces.push(rref(field, ambient));
    }
    if total != d {
        return Err(Error::SplitFailure {
            ell: field.p(),
            reason: format!("eigenspaces of dimension {total} inside a space of dimension {d}"),
        });
    }
    Ok(pieces)
}

/// Recovers each chi(g) as a multiset of e-th roots of unity: on the cyclic
/// group <g> of order o, the multiplicity of zeta_o^m is
/// (1/o) sum_s chi(g^s) zeta_o^{-ms}, computed in F_l with zeta_o -> theta^{e/o}.
fn lift_cyclotomic<G: GroupView + ?Sized>(
    group: &G,
    classes: &ClassStructure,
    field: &PrimeField,
    theta_powers: &[u64],
    degrees: &[u64],
    values_modl: &[Vec<u64>],
) -> Result<Vec<Vec<CycloValue>>> {
    let e = theta_powers.len();
    let ell = field.p();
    let by_class: Vec<Vec<CycloValue>> = (0..classes.k())
        .into_par_iter()
        .map(|c| {
            let g = classes.rep(c);
            let o = classes.element_order(c) as usize;
            let step = e / o;
            let mut power_classes = Vec::with_capacity(o);
            let mut cur = group.identity();
            for _ in 0..o {
                power_classes.push(classes.class_of(cur));
                cur = group.mul(cur, g);
            }
            // theta_o^{-t}
            let inv_powers: Vec<u64> = (0..o).map(|t| theta_powers[(e - t * step) % e]).collect();
            let o_inv = field.inv(o as u64 % ell);
            let mut out = Vec::with_capacity(degrees.len());
            for (chi, row) in values_modl.iter().enumerate() {
                let a: Vec<u64> = power_classes.iter().map(|&pc| row[pc]).collect();
                let mut terms = Vec::new();
                let mut count = 0u64;
                for m in 0..o {
                    let mut acc: u128 = 0;
                    let mut idx = 0usize;
                    for &av in &a {
                        acc += av as u128 * inv_powers[idx] as u128;
                        idx += m;
                        if idx >= o {
                            idx -= o;
                        }
                    }
                    let mu = field.mul((acc % ell as u128) as u64, o_inv);
                    if mu == 0 {
                        continue;
                    }
                    if mu > degrees[chi] {
                        return Err(Error::LiftOutOfRange {
                            what: format!("eigenvalue multiplicity of character {chi} on class {c}"),
                            residue: mu,
                            ell,
                            bound: degrees[chi],
                        });
                    }
                    count += mu;
                    terms.push(((m * step) as u32, mu as u32));
                }
                if count != degrees[chi] {
                    return Err(Error::LiftOutOfRange {
                        what: format!("eigenvalue count of character {chi} on class {c}"),
                        residue: count,
                        ell,
                        bound: degrees[chi],
                    });
                }
                out.push(CycloValue::from_terms(terms));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let k = degrees.len();
    Ok((0..k)
        .map(|chi| by_class.iter().map(|col| col[chi].clone()).collect())
        .collect())
}

/// Result of the exact and advisory table checks.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrityReport {
    pub identity_column: bool,
    pub degree_square_sum: bool,
    pub degrees_divide: bool,
    pub row_orthogonality: bool,
    pub column_orthogonality: bool,
    pub cyclo_consistent: bool,
    pub inverse_consistent: bool,
    /// Largest deviation of the normalized complex inner products from the
    /// identity matrix, over rows and columns.
    pub complex_residual: f64,
}

impl IntegrityReport {
    pub fn exact_pass(&self) -> bool {
        self.identity_column
            && self.degree_square_sum
            && self.degrees_divide
            && self.row_orthogonality
            && self.column_orthogonality
            && self.cyclo_consistent
            && self.inverse_consistent
    }

    pub fn pass(&self) -> bool {
        self.exact_pass() && self.complex_residual < FLOAT_TOLERANCE
    }
}

impl CharTable {
    pub fn k(&self) -> usize {
        self.degrees.len()
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn ell(&self) -> u64 {
        self.field.p()
    }

    pub fn theta(&self) -> u64 {
        self.theta
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// theta^t for t in [0, e).
    pub fn theta_powers(&self) -> &[u64] {
        &self.theta_powers
    }

    pub fn class_sizes(&self) -> &[u64] {
        &self.class_sizes
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, chi: usize) -> u64 {
        self.degrees[chi]
    }

    pub fn value_modl(&self, chi: usize, c: usize) -> u64 {
        self.values_modl[chi][c]
    }

    pub fn row_modl(&self, chi: usize) -> &[u64] {
        &self.values_modl[chi]
    }

    pub fn value_cyclo(&self, chi: usize, c: usize) -> &CycloValue {
        &self.values_cyclo[chi][c]
    }

    pub fn row_cyclo(&self, chi: usize) -> &[CycloValue] {
        &self.values_cyclo[chi]
    }

    pub fn value_complex(&self, chi: usize, c: usize) -> Complex64 {
        self.values_cyclo[chi][c].eval_complex(self.exponent)
    }

    pub fn complex_values(&self) -> Vec<Vec<Complex64>> {
        (0..self.k())
            .map(|chi| (0..self.k()).map(|c| self.value_complex(chi, c)).collect())
            .collect()
    }

    pub fn cyclotomic_field(&self) -> CyclotomicField {
        CyclotomicField::new(self.exponent)
    }

    pub fn inverse_class(&self, c: usize) -> usize {
        self.inverse_class[c]
    }

    /// The row whose exact values equal `values`, if any.
    pub fn find_row(&self, values: &[CycloValue]) -> Option<usize> {
        self.values_cyclo.iter().position(|row| row.as_slice() == values)
    }

    /// Whether chi is trivial on the union of the given classes.
    pub fn trivial_on(&self, chi: usize, class_list: &[usize]) -> bool {
        class_list.iter().all(|&c| self.values_cyclo[chi][c].is_trivial())
    }

    /// The kernel of chi as a union of classes.
    pub fn kernel_classes(&self, chi: usize) -> Vec<usize> {
        (0..self.k())
            .filter(|&c| self.values_cyclo[chi][c].is_trivial())
            .collect()
    }

    pub fn check_integrity(&self) -> IntegrityReport {
        let k = self.k();
        let f = &self.field;
        let ell = f.p();
        let order = self.group_order;

        let identity_column = (0..k).all(|chi| self.values_modl[chi][0] == self.degrees[chi] % ell)
            && (0..k).all(|chi| self.values_cyclo[chi][0] == CycloValue::integer(self.degrees[chi] as u32));
        let degree_square_sum = self.degrees.iter().map(|d| d * d).sum::<u64>() == order;
        let degrees_divide = self.degrees.iter().all(|d| order % d == 0);

        let row_orthogonality = (0..k).into_par_iter().all(|a| {
            let weighted: Vec<u64> = (0..k)
                .map(|c| f.mul(self.class_sizes[c] % ell, self.values_modl[a][c]))
                .collect();
            (0..k).all(|b| {
                let s = f.dot((0..k).map(|c| (weighted[c], self.values_modl[b][self.inverse_class[c]])));
                s == if a == b { order % ell } else { 0 }
            })
        });
        let column_orthogonality = (0..k).into_par_iter().all(|i| {
            (0..k).all(|j| {
                let s =
                    f.dot((0..k).map(|chi| (self.values_modl[chi][i], self.values_modl[chi][self.inverse_class[j]])));
                s == if i == j { (order / self.class_sizes[i]) % ell } else { 0 }
            })
        });
        let cyclo_consistent = (0..k).all(|chi| {
            (0..k).all(|c| {
                let v = &self.values_cyclo[chi][c];
                v.count() == self.degrees[chi] && v.eval_mod(f, &self.theta_powers) == self.values_modl[chi][c]
            })
        });
        let inverse_consistent = (0..k).all(|chi| {
            (0..k)
                .all(|c| self.values_cyclo[chi][self.inverse_class[c]] == self.values_cyclo[chi][c].conj(self.exponent))
        });

        IntegrityReport {
            identity_column,
            degree_square_sum,
            degrees_divide,
            row_orthogonality,
            column_orthogonality,
            cyclo_consistent,
            inverse_consistent,
            complex_residual: self.complex_residual(),
        }
    }

    fn complex_residual(&self) -> f64 {
        let k = self.k();
        let x = self.complex_values();
        let order = self.group_order as f64;
        let rows = (0..k)
            .into_par_iter()
            .map(|a| {
                let mut worst: f64 = 0.0;
                for b in 0..k {
                    let s: Complex64 = (0..k)
                        .map(|c| x[a][c] * x[b][c].conj() * self.class_sizes[c] as f64)
                        .sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((s / order - expect).norm());
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        let cols = (0..k)
            .into_par_iter()
            .map(|i| {
                let cent = order / self.class_sizes[i] as f64;
                let mut worst: f64 = 0.0;
                for j in 0..k {
                    let s: Complex64 = (0..k).map(|chi| x[chi][i] * x[chi][j].conj()).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((s / cent - expect).norm());
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        rows.max(cols)
    }

    /// Writes the table as CSV.
    ///
    /// The first line holds a label, then each class size twice (once for the
    /// exact block and once for the float block). Every further line is one
    /// character: its degree, then k exact values as `c0;c1;...;c_{e-1}`,
    /// then k complex renderings `re+imi` with six decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let k = self.k();
        write!(w, "degree\\class_size")?;
        for _ in 0..2 {
            for s in &self.class_sizes {
                write!(w, ",{s}")?;
            }
        }
        writeln!(w)?;
        let mut dense = String::new();
        for chi in 0..k {
            write!(w, "{}", self.degrees[chi])?;
            for c in 0..k {
                dense.clear();
                let coeffs = self.values_cyclo[chi][c].to_dense(self.exponent);
                for (i, x) in coeffs.iter().enumerate() {
                    if i > 0 {
                        dense.push(';');
                    }
                    dense.push_str(&x.to_string());
                }
                write!(w, ",{dense}")?;
            }
            for c in 0..k {
                let z = self.value_complex(chi, c);
                let (re, im) = (clean_zero(z.re), clean_zero(z.im));
                write!(w, ",{re:.6}{im:+.6}i")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn clean_zero(x: f64) -> f64 {
    if x.abs() < 5e-7 {
        0.0
    } else {
        x
    }
}

/// [1_H, chi|_H] from the class histogram of H, lifted from F_l into [0, chi(1)].
pub fn restrict_inner_from_histogram(
    table: &CharTable,
    chi: usize,
    histogram: &[u64],
    subgroup_order: u64,
) -> Result<u64> {
    let f = table.field();
    let ell = f.p();
    if subgroup_order == 0 || table.group_order() % subgroup_order != 0 {
        return Err(Error::NotASubgroup(format!(
            "order {subgroup_order} does not divide {}",
            table.group_order()
        )));
    }
    let s = f.dot(histogram.iter().zip(table.row_modl(chi)).map(|(&h, &v)| (h % ell, v)));
    let value = f.mul(s, f.inv(subgroup_order % ell));
    let bound = table.degree(chi);
    f.lift_bounded(value, bound).ok_or_else(|| Error::LiftOutOfRange {
        what: format!("[1_H, chi_{chi}|_H]"),
        residue: value,
        ell,
        bound,
    })
}

pub fn restrict_inner_trivial(
    table: &CharTable,
    classes: &ClassStructure,
    chi: usize,
    subgroup: &SubgroupHandle,
) -> Result<u64> {
    if let Some(&last) = subgroup.members().last() {
        if last as u64 >= table.group_order() {
            return Err(Error::NotASubgroup("member outside the group".into()));
        }
    }
    let hist = classes.histogram(subgroup.members());
    restrict_inner_from_histogram(table, chi, &hist, subgroup.order() as u64)
}

/// Inflates the characters of a quotient G/N to G.
///
/// `class_map[c]` is the quotient class containing the image of class c of G,
/// and `target_exponent` is exponent(G), a multiple of the quotient's.
pub fn character_of_quotient_pullback(
    quotient: &CharTable,
    class_map: &[usize],
    target_exponent: u32,
) -> Vec<Vec<CycloValue>> {
    (0..quotient.k())
        .map(|chi| {
            class_map
                .iter()
                .map(|&qc| {
                    quotient
                        .value_cyclo(chi, qc)
                        .rescale(quotient.exponent(), target_exponent)
                })
                .collect()
        })
        .collect()
}

/// Class map G -> G/N induced by a homomorphism given on element ids.
pub fn quotient_class_map(
    classes: &ClassStructure,
    quotient_classes: &ClassStructure,
    project: impl Fn(ElemId) -> ElemId,
) -> Vec<usize> {
    classes
        .reps()
        .iter()
        .map(|&r| quotient_classes.class_of(project(r)))
        .collect()
}
