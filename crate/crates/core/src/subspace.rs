//! Tolerance-aware subspace algebra on windows: spans, projections,
//! intersections, orthogonal complements and principal-angle gaps.
//!
//! Every [`SubspaceBasis`] carries the window it lives in and the tolerance
//! its rank decisions were made with. All operations are pure.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::dense::{group_families, null_space, right_singular_pairs, sparse_column, Group};
use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, Window};
use crate::vector::{SparseVector, C64, ONE};

/// Slack factor applied to `tol` wherever a derived quantity is compared.
pub const SLACK: f64 = 10.0;

/// Orthonormal (within `tol`) family of vectors supported in `ambient`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    vectors: Vec<SparseVector>,
    tol: f64,
    ambient: Window,
}

impl SubspaceBasis {
    pub fn empty(ambient: &Window, tol: f64) -> Self {
        Self { vectors: Vec::new(), tol, ambient: ambient.clone() }
    }

    /// All of `l2(ambient)`, as standard basis vectors in lattice order.
    pub fn full(ambient: &Window, tol: f64) -> Self {
        let vectors = ambient.points().into_iter().map(SparseVector::basis).collect();
        Self { vectors, tol, ambient: ambient.clone() }
    }

    /// Span of the standard basis vectors at `points` (those inside `ambient`).
    pub fn coordinate(points: impl IntoIterator<Item = LatticePoint>, ambient: &Window, tol: f64) -> Self {
        let set: BTreeSet<LatticePoint> = points.into_iter().filter(|p| ambient.contains(p)).collect();
        let vectors = set.into_iter().map(SparseVector::basis).collect();
        Self { vectors, tol, ambient: ambient.clone() }
    }

    pub(crate) fn from_parts(vectors: Vec<SparseVector>, tol: f64, ambient: &Window) -> Self {
        debug_assert!(vectors.iter().all(|v| v.is_supported_in(ambient)));
        Self { vectors, tol, ambient: ambient.clone() }
    }

    /// `span(vectors) ∩ l2(window)`; vectors may stick out of the window.
    pub fn span_within(vectors: &[SparseVector], window: &Window, tol: f64) -> Self {
        let ortho = orthonormal_vectors(vectors, tol);
        let inside = restrict_vectors(ortho, window, tol);
        Self { vectors: inside, tol, ambient: window.clone() }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[SparseVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<SparseVector> {
        self.vectors
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn ambient(&self) -> &Window {
        &self.ambient
    }

    /// Same span, reported on a new tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// `self ∩ l2(window)`, re-homed on `window`.
    pub fn restrict_to(&self, window: &Window) -> SubspaceBasis {
        let inside = restrict_vectors(self.vectors.clone(), window, self.tol);
        Self { vectors: inside, tol: self.tol, ambient: window.clone() }
    }

    /// Same vectors on a larger ambient window.
    pub fn embed(&self, window: &Window) -> Result<SubspaceBasis> {
        if !self.ambient.is_within(window) {
            return Err(Error::WindowMismatch);
        }
        Ok(Self { vectors: self.vectors.clone(), tol: self.tol, ambient: window.clone() })
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for g in group_families(&[&self.vectors]) {
            let q = g.dense(&self.vectors, 0);
            let gram = q.adjoint() * &q;
            for ((i, j), z) in gram.iter().enumerate().map(|(k, z)| ((k % gram.nrows(), k / gram.nrows()), z)) {
                let target = if i == j { ONE } else { C64::new(0.0, 0.0) };
                worst = worst.max((z - target).norm());
            }
        }
        worst
    }

    pub fn projector(&self) -> Projector<'_> {
        Projector::new(self)
    }

    /// `min_{b in span} |v - b|`.
    pub fn distance(&self, v: &SparseVector) -> f64 {
        self.projector().residual(v).norm()
    }
}

/// Projection onto a [`SubspaceBasis`] with an index from lattice points
/// to the basis vectors touching them.
pub struct Projector<'a> {
    basis: &'a SubspaceBasis,
    index: BTreeMap<&'a LatticePoint, Vec<usize>>,
}

impl<'a> Projector<'a> {
    pub fn new(basis: &'a SubspaceBasis) -> Self {
        let mut index: BTreeMap<&LatticePoint, Vec<usize>> = BTreeMap::new();
        for (i, b) in basis.vectors.iter().enumerate() {
            for p in b.support() {
                index.entry(p).or_default().push(i);
            }
        }
        Self { basis, index }
    }

    /// `sum <b_i, v> b_i`.
    pub fn project(&self, v: &SparseVector) -> SparseVector {
        let touched: BTreeSet<usize> = v
            .support()
            .filter_map(|p| self.index.get(p))
            .flatten()
            .copied()
            .collect();
        let mut out = SparseVector::zero();
        for i in touched {
            let b = &self.basis.vectors[i];
            out.axpy(b.inner(v), b);
        }
        out
    }

    /// `v - project(v)`.
    pub fn residual(&self, v: &SparseVector) -> SparseVector {
        v.sub(&self.project(v))
    }
}

/// Orthonormal basis of `span(vectors)` on `ambient`.
///
/// Rank decisions drop a vector whose residual after projection onto the
/// previously accepted ones is at most `tol * max(1, scale)`, where `scale`
/// is the largest input norm. Projection is applied twice.
pub fn orthonormalize(vectors: &[SparseVector], ambient: &Window, tol: f64) -> SubspaceBasis {
    SubspaceBasis::from_parts(orthonormal_vectors(vectors, tol), tol, ambient)
}

pub(crate) fn orthonormal_vectors(vectors: &[SparseVector], tol: f64) -> Vec<SparseVector> {
    let scale = vectors.iter().map(SparseVector::norm).fold(1.0, f64::max);
    let threshold = tol * scale;
    let mut kept: Vec<(usize, SparseVector)> = Vec::new();
    for g in group_families(&[vectors]) {
        let members = &g.members[0];
        // a lone vector needs no projection
        if members.len() == 1 {
            let v = &vectors[members[0]];
            let n = v.norm();
            if n > threshold {
                kept.push((members[0], v.scaled(C64::new(1.0 / n, 0.0))));
            }
            continue;
        }
        let a = g.dense(vectors, 0);
        let mut q: Vec<nalgebra::DVector<C64>> = Vec::new();
        for (j, &idx) in members.iter().enumerate() {
            let mut w = a.column(j).clone_owned();
            for _ in 0..2 {
                for qk in &q {
                    let c = qk.dotc(&w);
                    w.axpy(-c, qk, ONE);
                }
            }
            let n = w.norm();
            if n > threshold {
                w.unscale_mut(n);
                kept.push((idx, sparse_column(&w, &g.points)));
                q.push(w);
            }
        }
    }
    kept.sort_by_key(|(i, _)| *i);
    kept.into_iter().map(|(_, v)| v).collect()
}

/// Orthonormal vectors spanning `span(ortho) ∩ l2(window)`, for an
/// orthonormal input family.
fn restrict_vectors(ortho: Vec<SparseVector>, window: &Window, tol: f64) -> Vec<SparseVector> {
    if ortho.iter().all(|v| v.is_supported_in(window)) {
        return ortho;
    }
    let mut out: Vec<SparseVector> = Vec::new();
    let mut mixed = false;
    for g in group_families(&[&ortho]) {
        let inside: Vec<bool> = g.points.iter().map(|p| window.contains(p)).collect();
        if inside.iter().all(|&b| b) {
            out.extend(g.members[0].iter().map(|&i| ortho[i].clone()));
            continue;
        }
        if inside.iter().all(|&b| !b) {
            continue;
        }
        let q = g.dense(&ortho, 0);
        let outside_rows: Vec<usize> = (0..g.points.len()).filter(|&i| !inside[i]).collect();
        let mut m = DMatrix::from_element(outside_rows.len(), q.ncols(), C64::new(0.0, 0.0));
        for (r, &i) in outside_rows.iter().enumerate() {
            m.row_mut(r).copy_from(&q.row(i));
        }
        for y in null_space(&m, tol) {
            let v = sparse_column(&(&q * y), &g.points).compressed_to(window);
            out.push(v);
            mixed = true;
        }
    }
    if mixed {
        canonical_order(orthonormal_vectors(&out, tol))
    } else {
        out
    }
}

fn canonical_order(mut vectors: Vec<SparseVector>) -> Vec<SparseVector> {
    vectors.sort_by(|a, b| {
        let pa = a.dominant().map(|(p, _)| p.clone());
        let pb = b.dominant().map(|(p, _)| p.clone());
        pa.cmp(&pb)
    });
    vectors
}

fn check_same_ambient(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<()> {
    if a.ambient != b.ambient {
        return Err(Error::WindowMismatch);
    }
    Ok(())
}

/// Orthogonal projection of `v` onto `span(s)`.
pub fn project(v: &SparseVector, s: &SubspaceBasis) -> SparseVector {
    s.projector().project(v)
}

/// `span(a) ∩ span(b)`: principal directions of `a` whose cosine with `b`
/// is at least `1 - tol`.
pub fn intersect(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis> {
    check_same_ambient(a, b)?;
    let tol = a.tol.max(b.tol);
    let mut out: Vec<SparseVector> = Vec::new();
    let mut mixed = false;
    for g in group_families(&[&a.vectors, &b.vectors]) {
        let (na, nb) = (g.members[0].len(), g.members[1].len());
        if na == 0 || nb == 0 {
            continue;
        }
        let np = g.points.len();
        if na == np {
            out.extend(g.members[1].iter().map(|&i| b.vectors[i].clone()));
            continue;
        }
        if nb == np {
            out.extend(g.members[0].iter().map(|&i| a.vectors[i].clone()));
            continue;
        }
        let qa = g.dense(&a.vectors, 0);
        let qb = g.dense(&b.vectors, 1);
        let cross = qb.adjoint() * &qa;
        for (s, y) in right_singular_pairs(&cross) {
            if s >= 1.0 - tol {
                out.push(sparse_column(&(&qa * y), &g.points).with_canonical_phase());
                mixed = true;
            }
        }
    }
    let vectors = if mixed { orthonormal_vectors(&out, tol) } else { out };
    Ok(SubspaceBasis { vectors: canonical_order(vectors), tol, ambient: a.ambient.clone() })
}

/// `a ⊖ b` for `b ⊆ a`: orthonormal basis of `a ∩ b^⊥`.
pub fn complement_within(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis> {
    check_same_ambient(a, b)?;
    let tol = a.tol.max(b.tol);
    let proj = a.projector();
    let deviation = b
        .vectors
        .iter()
        .map(|v| proj.residual(v).norm())
        .fold(0.0, f64::max);
    if deviation > SLACK * tol {
        return Err(Error::NotASubspace { deviation });
    }
    complement_by_count(a, b, tol)
}

fn complement_by_count(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<SubspaceBasis> {
    let mut out: Vec<SparseVector> = Vec::new();
    let mut mixed = false;
    for g in group_families(&[&a.vectors, &b.vectors]) {
        let (na, nb) = (g.members[0].len(), g.members[1].len());
        if nb == 0 {
            out.extend(g.members[0].iter().map(|&i| a.vectors[i].clone()));
            continue;
        }
        if nb > na {
            return Err(Error::NotASubspace { deviation: 1.0 });
        }
        if na == nb {
            continue;
        }
        let qa = g.dense(&a.vectors, 0);
        let qb = g.dense(&b.vectors, 1);
        let cross = qb.adjoint() * &qa;
        // the na - nb weakest directions of a against b span a ⊖ b
        let pairs = right_singular_pairs(&cross);
        for (_, y) in pairs.into_iter().skip(nb) {
            out.push(sparse_column(&(&qa * y), &g.points).with_canonical_phase());
            mixed = true;
        }
    }
    let vectors = if mixed { orthonormal_vectors(&out, tol) } else { out };
    Ok(SubspaceBasis { vectors: canonical_order(vectors), tol, ambient: a.ambient.clone() })
}

/// `a ∩ b^⊥` without requiring `b ⊆ a`: directions of `a` whose cosine
/// with `b` is at most `tol`.
pub fn orthogonal_part(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis> {
    check_same_ambient(a, b)?;
    let tol = a.tol.max(b.tol);
    let mut out: Vec<SparseVector> = Vec::new();
    let mut mixed = false;
    for g in group_families(&[&a.vectors, &b.vectors]) {
        let nb = g.members[1].len();
        if nb == 0 {
            out.extend(g.members[0].iter().map(|&i| a.vectors[i].clone()));
            continue;
        }
        if g.members[0].is_empty() {
            continue;
        }
        let qa = g.dense(&a.vectors, 0);
        let qb = g.dense(&b.vectors, 1);
        for y in null_space(&(qb.adjoint() * &qa), tol) {
            out.push(sparse_column(&(&qa * y), &g.points).with_canonical_phase());
            mixed = true;
        }
    }
    let vectors = if mixed { orthonormal_vectors(&out, tol) } else { out };
    Ok(SubspaceBasis { vectors: canonical_order(vectors), tol, ambient: a.ambient.clone() })
}

/// `orthonormalize(a ∪ b)`.
pub fn sum(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis> {
    check_same_ambient(a, b)?;
    let all: Vec<SparseVector> = a.vectors.iter().chain(&b.vectors).cloned().collect();
    Ok(orthonormalize(&all, &a.ambient, a.tol.max(b.tol)))
}

/// Largest distance from a unit vector of `span(a)` to `span(b)`, with a
/// unit vector of `span(a)` attaining it.
pub fn directed_gap(a: &SubspaceBasis, b: &SubspaceBasis) -> (f64, Option<SparseVector>) {
    directed_gap_vectors(&a.vectors, &b.vectors)
}

fn directed_gap_vectors(a: &[SparseVector], b: &[SparseVector]) -> (f64, Option<SparseVector>) {
    let mut worst = 0.0;
    let mut witness = None;
    for g in group_families(&[a, b]) {
        let (na, nb) = (g.members[0].len(), g.members[1].len());
        if na == 0 {
            continue;
        }
        let (gap, w) = if nb == 0 {
            (1.0, a[g.members[0][0]].clone())
        } else if nb == g.points.len() {
            continue;
        } else {
            group_gap(&g, a, b)
        };
        if gap > worst {
            worst = gap;
            witness = Some(w);
        }
    }
    (worst, witness)
}

fn group_gap(g: &Group, a: &[SparseVector], b: &[SparseVector]) -> (f64, SparseVector) {
    let qa = g.dense(a, 0);
    let qb = g.dense(b, 1);
    // residual of a against b, formed explicitly to avoid 1 - cos^2 cancellation
    let residual = &qa - &qb * (qb.adjoint() * &qa);
    let pairs = right_singular_pairs(&residual);
    let (s, y) = pairs.into_iter().next().expect("group has a-members");
    let w = sparse_column(&(&qa * y), &g.points);
    (s, w.normalized().unwrap_or(w))
}

/// Symmetrized gap `max(directed(a, b), directed(b, a))`; equals the norm
/// of the difference of the two orthogonal projections.
pub fn principal_angle_gap(a: &SubspaceBasis, b: &SubspaceBasis) -> f64 {
    gap_with_witness(a, b).0
}

/// [`principal_angle_gap`] plus a unit vector in one span that is at the
/// reported distance from the other.
pub fn gap_with_witness(a: &SubspaceBasis, b: &SubspaceBasis) -> (f64, Option<SparseVector>) {
    let ab = directed_gap(a, b);
    let ba = directed_gap(b, a);
    if ab.0 >= ba.0 {
        ab
    } else {
        ba
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    const TOL: f64 = 1e-10;

    fn window() -> Window {
        Window::new(&Lattice::half_line(), 6)
    }

    fn e(k: i64) -> SparseVector {
        SparseVector::basis(LatticePoint::at(&[k]))
    }

    fn combo(terms: &[(i64, f64)]) -> SparseVector {
        SparseVector::from_entries(terms.iter().map(|&(k, c)| (LatticePoint::at(&[k]), C64::new(c, 0.0))))
    }

    fn span(vs: &[SparseVector]) -> SubspaceBasis {
        orthonormalize(vs, &window(), TOL)
    }

    /// Eigenvalues of the Gram matrix above `tol` count the rank.
    fn gram_rank(vs: &[SparseVector], tol: f64) -> usize {
        let n = vs.len();
        let g = DMatrix::from_fn(n, n, |i, j| vs[i].inner(&vs[j]));
        g.symmetric_eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let s = span(&[e(0), e(1)]);
        assert_eq!(s.vectors(), &[e(0), e(1)]);
    }

    #[test]
    fn orthonormalize_collapses_duplicates() {
        assert_eq!(span(&[e(0), e(0)]).dim(), 1);
        assert!(span(&[SparseVector::zero()]).is_empty());
        assert!(span(&[]).is_empty());
    }

    #[test]
    fn orthonormalize_rank_matches_gram_eigenvalues() {
        let family = [combo(&[(0, 1.0), (1, 1.0)]), combo(&[(0, 1.0), (1, -1.0)]), e(0)];
        let s = span(&family);
        assert_eq!(s.dim(), gram_rank(&family, TOL));
        assert_eq!(s.dim(), 2);
        assert!(s.gram_deviation() <= SLACK * TOL);
    }

    #[test]
    fn project_examples() {
        let s = span(&[e(0)]);
        let v = combo(&[(0, 1.0), (1, 1.0)]);
        assert!(project(&v, &s).sub(&e(0)).norm() <= SLACK * TOL);
        assert!(project(&e(3), &s).norm() <= SLACK * TOL);
        assert!(project(&e(0), &s).sub(&e(0)).norm() <= SLACK * TOL);
    }

    #[test]
    fn intersect_examples() {
        let a = span(&[e(0), e(1)]);
        let b = span(&[e(1), e(2)]);
        let i = intersect(&a, &b).unwrap();
        assert!(principal_angle_gap(&i, &span(&[e(1)])) <= SLACK * TOL);
        assert_eq!(intersect(&a, &a).unwrap().dim(), 2);

        let a = span(&[combo(&[(0, 1.0), (1, 1.0)]), e(2)]);
        let b = span(&[combo(&[(0, 1.0), (1, -1.0)]), e(2)]);
        let i = intersect(&a, &b).unwrap();
        assert_eq!(i.dim(), 2 - 1);
        assert!(principal_angle_gap(&i, &span(&[e(2)])) <= SLACK * TOL);
    }

    /// Joint-projection oracle: eigenvalues of `P_A P_B P_A` at 1 count the
    /// intersection dimension.
    #[test]
    fn intersect_matches_joint_projection_oracle() {
        let a = span(&[combo(&[(0, 1.0), (1, 1.0)]), e(2)]);
        let b = span(&[combo(&[(0, 1.0), (1, -1.0)]), e(2)]);
        let proj = |s: &SubspaceBasis| {
            let n = 3;
            DMatrix::from_fn(n, n, |i, j| {
                s.vectors().iter().map(|v| v.get(&LatticePoint::at(&[i as i64])) * v.get(&LatticePoint::at(&[j as i64])).conj()).sum::<C64>()
            })
        };
        let (pa, pb) = (proj(&a), proj(&b));
        let joint = &pa * &pb * &pa;
        let ones = joint.symmetric_eigenvalues().iter().filter(|&&l| l >= 1.0 - TOL).count();
        assert_eq!(ones, 1);
        assert_eq!(intersect(&a, &b).unwrap().dim(), ones);
    }

    #[test]
    fn intersect_rejects_other_windows() {
        let a = span(&[e(0)]);
        let b = orthonormalize(&[e(0)], &Window::new(&Lattice::half_line(), 3), TOL);
        assert_eq!(intersect(&a, &b), Err(Error::WindowMismatch));
    }

    #[test]
    fn complement_examples() {
        let a = span(&[e(0), e(1), e(2)]);
        let c = complement_within(&a, &span(&[e(1)])).unwrap();
        assert!(principal_angle_gap(&c, &span(&[e(0), e(2)])) <= SLACK * TOL);
        assert!(complement_within(&a, &a).unwrap().is_empty());
        assert!(matches!(complement_within(&span(&[e(0)]), &span(&[e(1)])), Err(Error::NotASubspace { .. })));
    }

    #[test]
    fn gap_examples() {
        let a = span(&[e(0)]);
        assert!(principal_angle_gap(&a, &a) <= SLACK * TOL);
        assert!((principal_angle_gap(&a, &span(&[e(1)])) - 1.0).abs() <= SLACK * TOL);
        // unit e0 against the line through (e0 + e1)/sqrt(2): distance sin(pi/4)
        let b = span(&[combo(&[(0, 1.0), (1, 1.0)])]);
        assert!((principal_angle_gap(&a, &b) - 0.5f64.sqrt()).abs() <= SLACK * TOL);
    }

    #[test]
    fn span_within_cuts_to_window() {
        let small = Window::new(&Lattice::half_line(), 2);
        let s = SubspaceBasis::span_within(&[e(1), e(5), combo(&[(2, 1.0), (3, 1.0)])], &small, TOL);
        assert_eq!(s.vectors(), &[e(1)]);
        // e2 + e3 together with e3 spans e2
        let s = SubspaceBasis::span_within(&[combo(&[(2, 1.0), (3, 1.0)]), e(3)], &small, TOL);
        assert_eq!(s.dim(), 1);
        assert!((s.vectors()[0].get(&LatticePoint::at(&[2])).norm() - 1.0).abs() < 1e-12);
    }
}
