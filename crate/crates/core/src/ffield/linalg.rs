use super::PrimeField;

/// A subspace of F_l^k held as a basis in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
}

impl Basis {
    pub fn standard(k: usize) -> Self {
        let rows = (0..k)
            .map(|i| {
                let mut v = vec![0; k];
                v[i] = 1;
                v
            })
            .collect();
        Self {
            rows,
            pivots: (0..k).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Row-reduces `rows` in place and returns the nonzero rows as an RREF basis.
pub fn rref(f: &PrimeField, mut rows: Vec<Vec<u64>>) -> Basis {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = f.inv(rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    Basis { rows, pivots }
}

/// Basis of the right kernel {c : A c = 0} of a square matrix given by rows.
pub fn nullspace(f: &PrimeField, a: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let n = a.first().map_or(0, Vec::len);
    let reduced = rref(f, a);
    let mut is_pivot = vec![false; n];
    for &p in &reduced.pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&free| !is_pivot[free])
        .map(|free| {
            let mut v = vec![0; n];
            v[free] = 1;
            for (row, &p) in reduced.rows.iter().zip(&reduced.pivots) {
                v[p] = f.neg(row[free]);
            }
            v
        })
        .collect()
}

/// Characteristic polynomial det(xI - A), low degree first, via reduction to
/// upper Hessenberg form.
pub fn charpoly(f: &PrimeField, a: &[Vec<u64>]) -> Vec<u64> {
    let n = a.len();
    let mut h: Vec<Vec<u64>> = a.to_vec();
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if i != j + 1 {
            h.swap(i, j + 1);
            for row in h.iter_mut() {
                row.swap(i, j + 1);
            }
        }
        let inv = f.inv(h[j + 1][j]);
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let u = f.mul(h[i][j], inv);
            let pivot_row = h[j + 1].clone();
            for (x, &y) in h[i].iter_mut().zip(&pivot_row) {
                *x = f.sub(*x, f.mul(u, y));
            }
            for row in h.iter_mut() {
                row[j + 1] = f.add(row[j + 1], f.mul(u, row[i]));
            }
        }
    }
    // p_m = (x - h_mm) p_{m-1} - sum_{i<m} h_im (prod_{j=i+1..m} h_{j,j-1}) p_{i-1}, 1-based
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let prev = &polys[m - 1];
        let mut next = vec![0u64; m + 1];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = f.add(next[d + 1], c);
            next[d] = f.sub(next[d], f.mul(h[m - 1][m - 1], c));
        }
        let mut t = 1u64;
        for i in (1..m).rev() {
            t = f.mul(t, h[i][i - 1]);
            if t == 0 {
                break;
            }
            let coef = f.mul(h[i - 1][m - 1], t);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i - 1].iter().enumerate() {
                next[d] = f.sub(next[d], f.mul(coef, c));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F: PrimeField = PrimeField { p: 10_007 };

    fn det_brute(f: &PrimeField, a: &[Vec<u64>]) -> u64 {
        // Laplace expansion along the first row
        let n = a.len();
        if n == 0 {
            return 1;
        }
        let mut acc = 0;
        for c in 0..n {
            let minor: Vec<Vec<u64>> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                .collect();
            let term = f.mul(a[0][c], det_brute(f, &minor));
            acc = if c % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
        }
        acc
    }

    fn eval(f: &PrimeField, poly: &[u64], x: u64) -> u64 {
        poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    proptest! {
        #[test]
        fn charpoly_matches_determinant(entries in prop::collection::vec(0u64..10_007, 16), x in 0u64..10_007) {
            let a: Vec<Vec<u64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let cp = charpoly(&F, &a);
            prop_assert_eq!(cp.len(), 5);
            prop_assert_eq!(cp[4], 1);
            let shifted: Vec<Vec<u64>> = (0..4)
                .map(|i| (0..4).map(|j| {
                    let d = if i == j { x } else { 0 };
                    F.sub(d, a[i][j])
                }).collect())
                .collect();
            prop_assert_eq!(eval(&F, &cp, x), det_brute(&F, &shifted));
        }

        #[test]
        fn nullspace_vectors_are_annihilated(entries in prop::collection::vec(0u64..5, 25)) {
            let a: Vec<Vec<u64>> = entries.chunks(5).map(|c| c.to_vec()).collect();
            let rank = rref(&F, a.clone()).dim();
            let kernel = nullspace(&F, a.clone());
            prop_assert_eq!(rank + kernel.len(), 5);
            for v in &kernel {
                for row in &a {
                    prop_assert_eq!(F.dot(row.iter().copied().zip(v.iter().copied())), 0);
                }
            }
        }
    }

    #[test]
    fn charpoly_with_zero_subdiagonal() {
        let a = vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 3]];
        // (x-2)(x-3)^2 = x^3 - 8x^2 + 21x - 18
        assert_eq!(charpoly(&F, &a), vec![F.from_i64(-18), 21, F.from_i64(-8), 1]);
    }
}
