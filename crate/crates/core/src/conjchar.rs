//! The conjugation character pi_G(x) = |C_G(x)|: its decomposition into
//! irreducibles and centralizer certificates for its constituents.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::chartable::{restrict_inner_from_histogram, CharTable};
use crate::classes::{centralizer, ClassStructure};
use crate::error::{Error, Result};
use crate::group::{ElemId, GroupView};

/// Advisory tolerance between exact multiplicities and their float images.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-3;

pub fn pi_value(classes: &ClassStructure, x: ElemId) -> u64 {
    classes.cent_order(classes.class_of(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterRow {
    pub index: usize,
    pub degree: u64,
    pub central_trivial: bool,
    pub multiplicity: u64,
    pub certificate_class: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ConjDecomposition {
    rows: Vec<CharacterRow>,
}

impl ConjDecomposition {
    pub fn rows(&self) -> &[CharacterRow] {
        &self.rows
    }

    pub fn multiplicity(&self, chi: usize) -> u64 {
        self.rows[chi].multiplicity
    }

    pub fn constituents(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.multiplicity > 0)
            .map(|r| r.index)
            .collect()
    }

    pub fn central_trivial(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.central_trivial)
            .map(|r| r.index)
            .collect()
    }

    /// m(1) = k, constituents are trivial on the center, and
    /// sum m(chi) chi(1) = |G|.
    pub fn invariants_hold(&self, group_order: u64) -> bool {
        let k = self.rows.len() as u64;
        self.rows.first().map(|r| r.multiplicity) == Some(k)
            && self.rows.iter().all(|r| r.multiplicity == 0 || r.central_trivial)
            && self.rows.iter().map(|r| r.multiplicity * r.degree).sum::<u64>() == group_order
    }
}

/// m(chi) = [pi_G, chi] = sum over classes of chi(g_i), from class data only.
pub fn decompose(classes: &ClassStructure, table: &CharTable) -> Result<ConjDecomposition> {
    let f = table.field();
    let ell = f.p();
    let k = classes.k();
    let central = classes.central_classes();
    let rows = (0..table.k())
        .into_par_iter()
        .map(|chi| {
            let residue = f.dot(table.row_modl(chi).iter().map(|&v| (v, 1)));
            let bound = k as u64 * table.degree(chi);
            let m = f.lift_bounded(residue, bound).ok_or_else(|| Error::LiftOutOfRange {
                what: format!("multiplicity of character {chi}"),
                residue,
                ell,
                bound,
            })?;
            let float: f64 = (0..k).map(|c| table.value_complex(chi, c).re).sum();
            if (float - m as f64).abs() > MULTIPLICITY_TOLERANCE {
                return Err(Error::Invariant(format!(
                    "multiplicity of character {chi} is {m} exactly but {float} in floating point"
                )));
            }
            Ok(CharacterRow {
                index: chi,
                degree: table.degree(chi),
                central_trivial: table.trivial_on(chi, &central),
                multiplicity: m,
                certificate_class: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjDecomposition { rows })
}

/// Column orthogonality at (i, i): sum_psi psi(g_i) conj(psi(g_i)) = |C_G(g_i)|
/// in F_l, for every class.
pub fn tensor_identity_check(classes: &ClassStructure, table: &CharTable) -> bool {
    let f = table.field();
    (0..classes.k()).all(|i| {
        let inv = classes.inverse_class(i);
        let s = f.dot((0..table.k()).map(|psi| (table.value_modl(psi, i), table.value_modl(psi, inv))));
        s == classes.cent_order(i) % f.p()
    })
}

/// sum_chi m(chi) chi(g_i) = |C_G(g_i)| for every class, exactly in Z[zeta_e].
pub fn decomposition_reproduces_pi(
    classes: &ClassStructure,
    table: &CharTable,
    decomposition: &ConjDecomposition,
) -> bool {
    let e = table.exponent();
    let field = table.cyclotomic_field();
    (0..classes.k()).into_par_iter().all(|i| {
        let mut dense = vec![0i64; e as usize];
        for row in decomposition.rows() {
            if row.multiplicity == 0 {
                continue;
            }
            for &(t, m) in table.value_cyclo(row.index, i).terms() {
                dense[t as usize] += row.multiplicity as i64 * m as i64;
            }
        }
        dense[0] -= classes.cent_order(i) as i64;
        field.is_zero(&dense)
    })
}

/// Class histograms of centralizers, computed on first use and shared by all
/// certificate searches.
pub struct CentralizerCache<'a, G: GroupView + ?Sized> {
    group: &'a G,
    classes: &'a ClassStructure,
    scan_order: Vec<usize>,
    histograms: Vec<OnceLock<Vec<u64>>>,
}

impl<'a, G: GroupView + ?Sized> CentralizerCache<'a, G> {
    pub fn new(group: &'a G, classes: &'a ClassStructure) -> Self {
        let mut scan_order: Vec<usize> = (0..classes.k()).collect();
        scan_order.sort_by_key(|&i| (classes.cent_order(i), i));
        Self {
            group,
            classes,
            scan_order,
            histograms: (0..classes.k()).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Classes in increasing order of centralizer size.
    pub fn scan_order(&self) -> &[usize] {
        &self.scan_order
    }

    pub fn histogram(&self, i: usize) -> &[u64] {
        self.histograms[i].get_or_init(|| {
            if self.classes.size(i) == 1 {
                return self.classes.sizes().to_vec();
            }
            let c = centralizer(self.group, self.classes, self.classes.rep(i));
            self.classes.histogram(c.members())
        })
    }

    /// [1_{C(g_i)}, chi|_{C(g_i)}].
    pub fn inner(&self, table: &CharTable, chi: usize, i: usize) -> Result<u64> {
        restrict_inner_from_histogram(table, chi, self.histogram(i), self.classes.cent_order(i))
    }
}

/// The first class, in increasing centralizer order, whose centralizer
/// restriction of chi contains the trivial character.
pub fn find_certificate<G: GroupView + ?Sized>(
    cache: &CentralizerCache<'_, G>,
    table: &CharTable,
    chi: usize,
) -> Result<Option<usize>> {
    for &i in cache.scan_order() {
        if cache.inner(table, chi, i)? > 0 {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Fills the certificate of every character and checks that a certificate
/// exists exactly for the constituents.
pub fn attach_certificates<G: GroupView + ?Sized>(
    cache: &CentralizerCache<'_, G>,
    table: &CharTable,
    decomposition: &mut ConjDecomposition,
) -> Result<bool> {
    let found: Vec<Option<usize>> = (0..table.k())
        .into_par_iter()
        .map(|chi| find_certificate(cache, table, chi))
        .collect::<Result<_>>()?;
    let mut equivalent = true;
    for (row, cert) in decomposition.rows.iter_mut().zip(found) {
        equivalent &= (row.multiplicity > 0) == cert.is_some();
        row.certificate_class = cert;
    }
    Ok(equivalent)
}

/// sum_i [1_{C(g_i)}, chi|_{C(g_i)}] = m(chi) for every chi, by Frobenius
/// reciprocity over the orbit decomposition of pi_G.
pub fn frobenius_sums_match<G: GroupView + ?Sized>(
    cache: &CentralizerCache<'_, G>,
    table: &CharTable,
    decomposition: &ConjDecomposition,
) -> Result<bool> {
    let k = table.k();
    (0..k)
        .into_par_iter()
        .map(|chi| {
            let mut total = 0;
            for i in 0..k {
                total += cache.inner(table, chi, i)?;
            }
            Ok(total == decomposition.multiplicity(chi))
        })
        .collect::<Result<Vec<bool>>>()
        .map(|v| v.into_iter().all(|b| b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartable::compute_table;
    use crate::classes::compute_classes;
    use crate::group::QuotientGroup;
    use crate::modring::Modulus;
    use crate::sl2::Sl2Group;

    fn sl2(p: u64, n: u32) -> Sl2Group {
        Sl2Group::build(Modulus::new(p, n).unwrap(), 1 << 22).unwrap()
    }

    #[test]
    fn pi_values() {
        let g = sl2(5, 2);
        let cl = compute_classes(&g);
        let order = g.order() as u64;
        assert_eq!(pi_value(&cl, g.identity()), order);
        assert_eq!(pi_value(&cl, g.z()), order);
        assert_eq!(pi_value(&cl, g.element_g().unwrap()), 5 * 4);
    }

    #[test]
    fn sl2_2_decomposition() {
        let g = sl2(2, 1);
        let cl = compute_classes(&g);
        let t = compute_table(&g, &cl).unwrap();
        let mut d = decompose(&cl, &t).unwrap();
        // pi = 3 * 1 + sign + (degree 2), with values 6, 2, 3
        assert_eq!(d.multiplicity(0), 3);
        assert_eq!(d.multiplicity(1), 1);
        assert_eq!(d.multiplicity(2), 1);
        assert!(d.invariants_hold(6));
        assert!(tensor_identity_check(&cl, &t));
        assert!(decomposition_reproduces_pi(&cl, &t, &d));
        let cache = CentralizerCache::new(&g, &cl);
        assert!(attach_certificates(&cache, &t, &mut d).unwrap());
        // the degree 2 character is certified at a transposition, whose
        // centralizer has order 2
        let cert = d.rows()[2].certificate_class.unwrap();
        assert_eq!(cl.element_order(cert), 2);
        assert_eq!(cache.inner(&t, 2, cert).unwrap(), 1);
        assert!(frobenius_sums_match(&cache, &t, &d).unwrap());
    }

    #[test]
    fn psl2_3_degree_three_is_regular_on_three_centralizers() {
        let g = sl2(3, 1);
        let z = g.center();
        let q = QuotientGroup::new(&g, &z).unwrap();
        let cl = compute_classes(&q);
        let t = compute_table(&q, &cl).unwrap();
        let chi = t.k() - 1;
        assert_eq!(t.degree(chi), 3);
        let cache = CentralizerCache::new(&q, &cl);
        for i in (0..cl.k()).filter(|&i| cl.element_order(i) == 3) {
            assert_eq!(cl.cent_order(i), 3);
            assert_eq!(cache.inner(&t, chi, i).unwrap(), 1);
            assert!(t.value_cyclo(chi, i).count() == 3);
            assert!(t.cyclotomic_field().equals_integer(t.value_cyclo(chi, i), 0));
        }
    }

    #[test]
    fn sl2_5_constituents_are_the_central_trivial_characters() {
        let g = sl2(5, 1);
        let cl = compute_classes(&g);
        let t = compute_table(&g, &cl).unwrap();
        let mut d = decompose(&cl, &t).unwrap();
        assert_eq!(d.constituents(), d.central_trivial());
        assert_eq!(d.central_trivial().len(), 5);
        let cache = CentralizerCache::new(&g, &cl);
        assert!(attach_certificates(&cache, &t, &mut d).unwrap());
        assert!(frobenius_sums_match(&cache, &t, &d).unwrap());
        assert!(d.invariants_hold(120));
    }

    #[test]
    fn json_fragment_keys() {
        let row = CharacterRow {
            index: 3,
            degree: 2,
            central_trivial: false,
            multiplicity: 0,
            certificate_class: None,
        };
        assert_eq!(
            serde_json::to_string(&row).unwrap(),
            r#"{"index":3,"degree":2,"central_trivial":false,"multiplicity":0,"certificate_class":null}"#
        );
    }
}
