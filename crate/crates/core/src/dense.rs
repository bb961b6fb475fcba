//! Connected-support grouping and the small dense kernels run per group.
//!
//! Two sparse vectors interact only if their supports overlap, so every
//! subspace computation splits into independent problems over the
//! connected components of the "shares a lattice point" relation. Each
//! component is solved densely; for the weighted-shift operators in this
//! crate the components are usually one or two points wide.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::lattice::LatticePoint;
use crate::vector::{SparseVector, C64, ZERO};

pub(crate) struct Group {
    /// Indices of the member vectors, one list per input family.
    pub members: Vec<Vec<usize>>,
    /// Sorted union of the members' supports.
    pub points: Vec<LatticePoint>,
}

impl Group {
    pub fn dense(&self, vectors: &[SparseVector], family: usize) -> DMatrix<C64> {
        dense_columns(self.members[family].iter().map(|&i| &vectors[i]), &self.points)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so that group order follows input order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Splits the union of `families` into support-connected groups, ordered by
/// their first member. Zero vectors belong to no group.
pub(crate) fn group_families(families: &[&[SparseVector]]) -> Vec<Group> {
    let offsets: Vec<usize> = families
        .iter()
        .scan(0, |acc, f| {
            let start = *acc;
            *acc += f.len();
            Some(start)
        })
        .collect();
    let total: usize = families.iter().map(|f| f.len()).sum();
    let mut sets = DisjointSets::new(total);
    let mut owner: HashMap<&LatticePoint, usize> = HashMap::new();
    for (f, family) in families.iter().enumerate() {
        for (i, v) in family.iter().enumerate() {
            let id = offsets[f] + i;
            for p in v.support() {
                match owner.get(p) {
                    Some(&o) => sets.union(id, o),
                    None => {
                        owner.insert(p, id);
                    }
                }
            }
        }
    }

    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Group> = Vec::new();
    for (f, family) in families.iter().enumerate() {
        for (i, v) in family.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let root = sets.find(offsets[f] + i);
            let g = *slot.entry(root).or_insert_with(|| {
                groups.push(Group { members: vec![Vec::new(); families.len()], points: Vec::new() });
                groups.len() - 1
            });
            groups[g].members[f].push(i);
        }
    }
    for (p, id) in owner {
        let root = sets.find(id);
        groups[slot[&root]].points.push(p.clone());
    }
    for g in &mut groups {
        g.points.sort_unstable();
    }
    groups.sort_by_key(|g| {
        g.members
            .iter()
            .enumerate()
            .find_map(|(f, m)| m.first().map(|&i| offsets[f] + i))
            .unwrap_or(usize::MAX)
    });
    groups
}

pub(crate) fn dense_columns<'a>(
    vectors: impl Iterator<Item = &'a SparseVector>,
    points: &[LatticePoint],
) -> DMatrix<C64> {
    let cols: Vec<&SparseVector> = vectors.collect();
    let mut m = DMatrix::from_element(points.len(), cols.len(), ZERO);
    for (j, v) in cols.iter().enumerate() {
        for (p, z) in v.iter() {
            let i = points.binary_search(p).expect("support point belongs to the group");
            m[(i, j)] = *z;
        }
    }
    m
}

pub(crate) fn sparse_column(col: &DVector<C64>, points: &[LatticePoint]) -> SparseVector {
    SparseVector::from_entries(points.iter().cloned().zip(col.iter().copied()))
}

/// Singular values (descending) with matching right singular vectors.
pub(crate) fn right_singular_pairs(m: &DMatrix<C64>) -> Vec<(f64, DVector<C64>)> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    if rows == 0 {
        return (0..cols).map(|j| (0.0, unit(cols, j))).collect();
    }
    // pad so that the decomposition returns a full set of right vectors
    let padded = if rows < cols {
        let mut p = DMatrix::from_element(cols, cols, ZERO);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right vectors requested");
    let mut pairs: Vec<(f64, DVector<C64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, v_t.row(i).transpose().map(|z| z.conj())))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Largest singular value.
pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.ncols() == 1 {
        return m.column(0).norm();
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Orthonormal basis of `{ y : |m y| <= tol }` spanned by right singular
/// vectors with singular value at most `tol`.
pub(crate) fn null_space(m: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    right_singular_pairs(m).into_iter().filter(|(s, _)| *s <= tol).map(|(_, v)| v).collect()
}

fn unit(n: usize, j: usize) -> DVector<C64> {
    let mut v = DVector::from_element(n, ZERO);
    v[j] = C64::new(1.0, 0.0);
    v
}

/// Operator norm of the map `e_j -> columns[j]` for orthonormal inputs
/// `e_j`, computed group by group.
pub(crate) fn columns_norm(columns: &[SparseVector]) -> f64 {
    group_families(&[columns])
        .iter()
        .map(|g| spectral_norm(&g.dense(columns, 0)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: i64) -> SparseVector {
        SparseVector::basis(LatticePoint::at(&[k]))
    }

    #[test]
    fn grouping_follows_shared_support() {
        let mut a = e(0);
        a.axpy(C64::new(1.0, 0.0), &e(1));
        let fam1 = vec![a, e(5)];
        let fam2 = vec![e(1), e(2), SparseVector::zero()];
        let groups = group_families(&[&fam1, &fam2]);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0].members, vec![vec![0], vec![0]]);
        assert_eq!(groups[0].points.len(), 2);
        assert_eq!(groups[1].members, vec![vec![1], vec![]]);
        assert_eq!(groups[2].members, vec![vec![], vec![1]]);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // [1 1 0] has a two-dimensional kernel
        let m = DMatrix::from_row_slice(1, 3, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), ZERO]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }
}
