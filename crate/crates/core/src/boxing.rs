//! Uniform grid discretization of column vectors.
//!
//! A vector `v` with `‖v‖∞ <= scale` falls into the cell with index
//! `λ_i = ⌈v_i / (δ·scale)⌉`, clamped to `[1 - 1/δ, 1/δ]`. Each cell is
//! represented by its lower corner, so every vector splits exactly into a
//! canonical part and a residual with `0 <= residual <= δ·scale`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BoxIndex(pub Vec<i64>);

/// Rounds `delta` down to the nearest reciprocal of a positive integer.
pub fn snap_delta(delta: &Rat) -> Rat {
    let cells = delta.recip().ceil();
    cells.recip()
}

fn cells_per_side(delta: &Rat) -> i64 {
    snap_delta(delta).recip().to_i64().expect("grid cell count fits in i64")
}

pub fn box_index(v: &[Rat], delta: &Rat, scale: &Rat) -> Result<BoxIndex> {
    let cells = cells_per_side(delta);
    let side = &snap_delta(delta) * scale;
    let mut lambdas = Vec::with_capacity(v.len());
    for x in v {
        if x.abs() > *scale {
            return Err(Error::OutOfRange { value: x.to_string(), scale: scale.to_string() });
        }
        let l = (x / &side).ceil_i64().expect("cell index fits in i64");
        lambdas.push(l.clamp(1 - cells, cells));
    }
    Ok(BoxIndex(lambdas))
}

pub fn canonical_vector(idx: &BoxIndex, delta: &Rat, scale: &Rat) -> Vec<Rat> {
    let side = &snap_delta(delta) * scale;
    idx.0.iter().map(|&l| &Rat::from_int(l - 1) * &side).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxPartition {
    /// The snapped width.
    pub delta: Rat,
    pub scale: Rat,
    pub groups: BTreeMap<BoxIndex, Vec<usize>>,
    pub canonicals: BTreeMap<BoxIndex, Vec<Rat>>,
    pub residuals: Vec<Vec<Rat>>,
    pub column_box: Vec<BoxIndex>,
}

impl BoxPartition {
    /// Cell side `delta·scale`.
    pub fn side(&self) -> Rat {
        &self.delta * &self.scale
    }

    /// Groups in index order, as `(canonical, members)`.
    pub fn ordered_groups(&self) -> Vec<(&Vec<Rat>, &Vec<usize>)> {
        self.groups.iter().map(|(k, members)| (&self.canonicals[k], members)).collect()
    }
}

/// Partitions arbitrary vectors of a common dimension with an explicit scale.
pub fn partition_vectors(vectors: &[Vec<Rat>], delta: &Rat, scale: &Rat) -> Result<BoxPartition> {
    let delta = snap_delta(delta);
    let mut groups: BTreeMap<BoxIndex, Vec<usize>> = BTreeMap::new();
    let mut canonicals = BTreeMap::new();
    let mut residuals = Vec::with_capacity(vectors.len());
    let mut column_box = Vec::with_capacity(vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        let idx = box_index(v, &delta, scale)?;
        let canon = canonicals
            .entry(idx.clone())
            .or_insert_with(|| canonical_vector(&idx, &delta, scale));
        residuals.push(v.iter().zip(canon.iter()).map(|(a, c)| a - c).collect());
        groups.entry(idx.clone()).or_default().push(j);
        column_box.push(idx);
    }
    Ok(BoxPartition { delta, scale: scale.clone(), groups, canonicals, residuals, column_box })
}

fn nonzero_or_one(r: Rat) -> Rat {
    if r.is_zero() {
        Rat::one()
    } else {
        r
    }
}

/// Partitions the columns of `h` with scale `‖h‖∞` (or 1 for a zero matrix).
pub fn partition_columns(h: &RatMatrix, delta: &Rat) -> BoxPartition {
    let scale = nonzero_or_one(h.inf_norm());
    let cols: Vec<Vec<Rat>> = (0..h.cols()).map(|j| h.column(j)).collect();
    partition_vectors(&cols, delta, &scale).expect("columns are bounded by the matrix norm")
}

/// Per-block grouping of configuration matrices by the tuple of their column cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigBoxPartition {
    pub delta: Rat,
    pub scale: Rat,
    /// Occupied type keys in ascending order; a type id is a position here.
    pub types: Vec<Vec<BoxIndex>>,
    pub block_type: Vec<usize>,
    pub type_groups: Vec<Vec<usize>>,
    /// Per type, its canonical columns.
    pub canonical_matrices: Vec<Vec<Vec<Rat>>>,
    /// Per block, its residual columns.
    pub residual_matrices: Vec<Vec<Vec<Rat>>>,
}

pub fn partition_config_columns(dcal: &[RatMatrix], delta: &Rat) -> ConfigBoxPartition {
    let scale = nonzero_or_one(dcal.iter().map(RatMatrix::inf_norm).max().unwrap_or_else(Rat::zero));
    partition_config_columns_scaled(dcal, delta, &scale)
}

pub(crate) fn partition_config_columns_scaled(dcal: &[RatMatrix], delta: &Rat, scale: &Rat) -> ConfigBoxPartition {
    let delta = snap_delta(delta);
    let keys: Vec<Vec<BoxIndex>> = dcal
        .iter()
        .map(|m| {
            (0..m.cols())
                .map(|c| box_index(&m.column(c), &delta, scale).expect("column bounded by scale"))
                .collect()
        })
        .collect();
    let mut by_key: BTreeMap<&Vec<BoxIndex>, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        by_key.entry(k).or_default().push(i);
    }
    let types: Vec<Vec<BoxIndex>> = by_key.keys().map(|k| (*k).clone()).collect();
    let type_groups: Vec<Vec<usize>> = by_key.into_values().collect();
    let mut block_type = vec![0; dcal.len()];
    for (k, members) in type_groups.iter().enumerate() {
        for &i in members {
            block_type[i] = k;
        }
    }
    let canonical_matrices: Vec<Vec<Vec<Rat>>> = types
        .iter()
        .map(|key| key.iter().map(|idx| canonical_vector(idx, &delta, scale)).collect())
        .collect();
    let residual_matrices = dcal
        .iter()
        .enumerate()
        .map(|(i, m)| {
            (0..m.cols())
                .map(|c| {
                    let canon = &canonical_matrices[block_type[i]][c];
                    m.column(c).iter().zip(canon).map(|(a, b)| a - b).collect()
                })
                .collect()
        })
        .collect();
    ConfigBoxPartition {
        delta,
        scale: scale.clone(),
        types,
        block_type,
        type_groups,
        canonical_matrices,
        residual_matrices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    #[test]
    fn box_index_examples() {
        let h = rat(1, 2);
        assert_eq!(box_index(&[r(0), r(0)], &h, &r(1)).unwrap(), BoxIndex(vec![0, 0]));
        assert_eq!(box_index(&[r(1), r(-1)], &h, &r(1)).unwrap(), BoxIndex(vec![2, -1]));
        assert_eq!(box_index(&[rat(3, 10), rat(-1, 5)], &h, &r(1)).unwrap(), BoxIndex(vec![1, 0]));
        assert!(matches!(box_index(&[r(2)], &h, &r(1)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn canonical_examples() {
        let h = rat(1, 2);
        assert_eq!(canonical_vector(&BoxIndex(vec![1, 1]), &h, &r(1)), vec![r(0), r(0)]);
        assert_eq!(canonical_vector(&BoxIndex(vec![0, 0]), &h, &r(1)), vec![rat(-1, 2), rat(-1, 2)]);
        assert_eq!(canonical_vector(&BoxIndex(vec![2, -1]), &h, &r(1)), vec![rat(1, 2), r(-1)]);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_delta(&rat(2, 5)), rat(1, 3));
        assert_eq!(snap_delta(&rat(1, 4)), rat(1, 4));
        assert_eq!(snap_delta(&r(3)), r(1));
    }

    #[test]
    fn identical_columns_share_a_group() {
        let h = RatMatrix::from_int_rows(&[vec![1, 1], vec![2, 2]]);
        let p = partition_columns(&h, &rat(1, 3));
        assert_eq!(p.groups.len(), 1);
        assert_eq!(p.groups.values().next().unwrap(), &vec![0, 1]);
    }

    #[test]
    fn two_distinct_boxes() {
        let h = RatMatrix::from_rows(vec![vec![r(1), rat(9, 10)], vec![r(0), rat(1, 10)]]);
        let p = partition_columns(&h, &rat(1, 2));
        assert_eq!(p.groups.len(), 2);
        assert_eq!(p.column_box, vec![BoxIndex(vec![2, 0]), BoxIndex(vec![2, 1])]);
    }

    #[test]
    fn config_types() {
        let d = RatMatrix::from_int_rows(&[vec![1, 0]]);
        let same = partition_config_columns(&[d.clone(), d.clone()], &rat(1, 2));
        assert_eq!(same.type_groups, vec![vec![0, 1]]);
        let e = RatMatrix::from_int_rows(&[vec![0, 1]]);
        let diff = partition_config_columns(&[d, e], &rat(1, 2));
        assert_eq!(diff.types.len(), 2);
    }

    fn matrix_strategy() -> impl Strategy<Value = (RatMatrix, Rat)> {
        (1usize..=3, 1usize..=6, 1i64..=6).prop_flat_map(|(rows, cols, cells)| {
            proptest::collection::vec((-20i64..=20, 1i64..=4), rows * cols).prop_map(move |vals| {
                let data: Vec<Vec<Rat>> = vals
                    .chunks(cols)
                    .map(|c| c.iter().map(|&(p, q)| rat(p, q)).collect())
                    .collect();
                (RatMatrix::from_rows(data), rat(1, cells))
            })
        })
    }

    proptest! {
        #[test]
        fn partition_invariants((h, delta) in matrix_strategy()) {
            let p = partition_columns(&h, &delta);
            let total: usize = p.groups.values().map(Vec::len).sum();
            prop_assert_eq!(total, h.cols());
            let side = p.side();
            for j in 0..h.cols() {
                let canon = &p.canonicals[&p.column_box[j]];
                let col = h.column(j);
                for i in 0..h.rows() {
                    prop_assert_eq!(&canon[i] + &p.residuals[j][i], col[i].clone());
                    prop_assert!(p.residuals[j][i].abs() <= side);
                }
            }
            for members in p.groups.values() {
                for &a in members {
                    for &b in members {
                        for i in 0..h.rows() {
                            prop_assert!((&h[(i, a)] - &h[(i, b)]).abs() <= side);
                        }
                    }
                }
            }
        }

        #[test]
        fn config_partition_invariants(
            (h, delta) in matrix_strategy(),
            blocks in 1usize..=5,
        ) {
            let mats: Vec<RatMatrix> = (0..blocks)
                .map(|b| {
                    let cols: Vec<usize> = (0..h.cols()).map(|c| (c + b) % h.cols()).collect();
                    h.select_columns(&cols)
                })
                .collect();
            let p = partition_config_columns(&mats, &delta);
            prop_assert!(p.types.len() <= blocks);
            let side = &p.delta * &p.scale;
            for (i, m) in mats.iter().enumerate() {
                for c in 0..m.cols() {
                    for r in 0..m.rows() {
                        let canon = &p.canonical_matrices[p.block_type[i]][c][r];
                        prop_assert_eq!(canon + &p.residual_matrices[i][c][r], m[(r, c)].clone());
                        prop_assert!(p.residual_matrices[i][c][r].abs() <= side);
                    }
                }
            }
        }
    }
}
