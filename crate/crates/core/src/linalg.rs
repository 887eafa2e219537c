//! Dense rational matrices and exact rank computations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{common_denominator, Rat};

/// Row-major dense matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    /// Builds from row vectors; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        RatMatrix { rows: nrows, cols, data }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rat::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn from_columns(cols: &[Vec<Rat>], rows: usize) -> Self {
        let mut m = RatMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m[(r, k)] = self[(r, c)].clone();
            }
        }
        m
    }

    /// Largest absolute entry (zero for an empty matrix).
    pub fn inf_norm(&self) -> Rat {
        self.data.iter().map(Rat::abs).max().unwrap_or_else(Rat::zero)
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| crate::rational::dot(self.row(r), x)).collect()
    }

    pub fn mul_int_vec(&self, x: &[i64]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| crate::rational::dot_int(self.row(r), x)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rat> {
        self.data.iter()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|r| self.row(r))).finish()
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Rat>>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(serde::de::Error::custom(format!(
                "ragged matrix: row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Ok(RatMatrix::from_rows_with_cols(rows, cols))
    }
}

/// Scales each row by the lcm of its denominators, giving an integer matrix
/// with the same row space.
fn integer_rows(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            let l = common_denominator(row);
            row.iter()
                .map(|v| v.numer() * (&l / v.denom()))
                .collect()
        })
        .collect()
}

/// Exact rank over the rationals, by fraction-free (Bareiss) elimination.
pub fn rank_exact(m: &RatMatrix) -> usize {
    let mut a = integer_rows(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// True iff the columns of `m` are linearly independent.
pub fn is_nonsingular(m: &RatMatrix) -> bool {
    rank_exact(m) == m.cols()
}

/// Dimension of the kernel of `m`.
pub fn nullity(m: &RatMatrix) -> usize {
    m.cols() - rank_exact(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Determinant by cofactor expansion; the oracle for minor-based rank.
    fn det_cofactor(a: &[Vec<Rat>]) -> Rat {
        let n = a.len();
        if n == 0 {
            return Rat::one();
        }
        let mut total = Rat::zero();
        for c in 0..n {
            if a[0][c].is_zero() {
                continue;
            }
            let minor: Vec<Vec<Rat>> = a[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &a[0][c] * &det_cofactor(&minor);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    /// Largest k with a nonzero k x k minor.
    fn rank_by_minors(a: &RatMatrix) -> usize {
        let max = a.rows().min(a.cols());
        for k in (1..=max).rev() {
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    let sub: Vec<Vec<Rat>> =
                        rs.iter().map(|&r| cs.iter().map(|&c| a[(r, c)].clone()).collect()).collect();
                    if !det_cofactor(&sub).is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_exact(&m(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank_exact(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_exact(&RatMatrix::zeros(3, 2)), 0);
        assert_eq!(rank_exact(&RatMatrix::zeros(0, 4)), 0);
    }

    #[test]
    fn nonsingular_examples() {
        assert!(is_nonsingular(&m(&[&[1, 0], &[0, 1]])));
        assert!(!is_nonsingular(&m(&[&[1, 1], &[1, 1]])));
        assert!(is_nonsingular(&m(&[&[1, 0], &[0, 1], &[1, 1]])));
        assert!(!is_nonsingular(&m(&[&[1, 2, 3]])));
    }

    #[test]
    fn rational_entries() {
        let a = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), Rat::one()],
        ]);
        assert_eq!(rank_exact(&a), 1);
    }

    #[test]
    fn random_4x4_rank_matches_minors() {
        // Fixed sample of integer matrices with entries in [-3, 3], including
        // deliberately deficient ones.
        let samples = [
            m(&[&[1, -2, 3, 0], &[2, -4, 6, 0], &[0, 1, -1, 2], &[3, -3, 3, 3]]),
            m(&[&[3, 1, -1, 2], &[-2, 0, 3, 1], &[1, 1, 2, 3], &[0, -3, 1, 1]]),
            m(&[&[0, 0, 0, 0], &[1, 1, 1, 1], &[-1, -1, -1, -1], &[2, 2, 2, 2]]),
            m(&[&[1, 2, 3, -3], &[-1, 0, 2, 1], &[0, 2, 5, -2], &[2, 2, 1, -4]]),
        ];
        for s in &samples {
            assert_eq!(rank_exact(s), rank_by_minors(s), "{s:?}");
        }
    }

    fn arb_matrix() -> impl Strategy<Value = RatMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                RatMatrix::from_int_rows(&v.chunks(c).map(|x| x.to_vec()).collect::<Vec<_>>())
            })
        })
    }

    proptest! {
        #[test]
        fn rank_matches_minor_oracle(a in arb_matrix()) {
            prop_assert_eq!(rank_exact(&a), rank_by_minors(&a));
        }

        #[test]
        fn rank_bounded_and_transpose_invariant(a in arb_matrix()) {
            let r = rank_exact(&a);
            prop_assert!(r <= a.rows().min(a.cols()));
            prop_assert_eq!(r, rank_exact(&a.transpose()));
        }

        #[test]
        fn appending_combination_keeps_rank(a in arb_matrix(), coeffs in proptest::collection::vec(-2i64..=2, 4)) {
            let mut cols: Vec<Vec<Rat>> = (0..a.cols()).map(|c| a.column(c)).collect();
            let combo: Vec<Rat> = (0..a.rows())
                .map(|r| (0..a.cols()).map(|c| &a[(r, c)] * &Rat::new(coeffs[c % 4], 2)).sum())
                .collect();
            cols.push(combo);
            let b = RatMatrix::from_columns(&cols, a.rows());
            prop_assert_eq!(rank_exact(&a), rank_exact(&b));
        }
    }
}
