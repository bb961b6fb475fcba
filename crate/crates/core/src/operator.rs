//! Structured isometries on sequence spaces with exact adjoint rules.
//!
//! Every built-in kind is a weighted partial permutation of the standard
//! basis: `e_p` goes to a unimodular multiple of a single `e_q`, and the
//! adjoint sends `e_q` back or to zero. Products of such operators are
//! expressed as [`Word`]s.

use std::f64::consts::TAU;

use crate::dense::{columns_norm, group_families, null_space, sparse_column};
use crate::error::{Error, Result};
use crate::lattice::{AxisKind, Block, Lattice, LatticePoint, Window};
use crate::subspace::{orthonormalize, SubspaceBasis};
use crate::vector::{SparseVector, C64, ONE};

/// Tolerance on `|w| = 1` for explicitly listed weights.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Weight sequence `k -> w_k` indexed by the coordinate of the source point.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightRule {
    Constant(C64),
    /// `w_k = values[k mod len]`.
    Periodic(Vec<C64>),
    /// `w_k = exp(2 pi i k numerator / denominator)`.
    GeometricPhase { numerator: i64, denominator: u64 },
}

impl WeightRule {
    pub fn unit() -> Self {
        WeightRule::Constant(ONE)
    }

    /// `w_k = exp(i k theta)` with `theta = 2 pi numerator / denominator`.
    pub fn phase(numerator: i64, denominator: u64) -> Self {
        WeightRule::GeometricPhase { numerator, denominator }
    }

    pub fn value(&self, k: i64) -> C64 {
        match self {
            WeightRule::Constant(c) => *c,
            WeightRule::Periodic(values) => values[k.rem_euclid(values.len() as i64) as usize],
            WeightRule::GeometricPhase { numerator, denominator } => {
                // reduce the exponent exactly before converting to an angle
                let d = *denominator as i128;
                let r = ((k as i128) * (*numerator as i128)).rem_euclid(d);
                C64::from_polar(1.0, TAU * r as f64 / d as f64)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |z: &C64| {
            if (z.norm() - 1.0).abs() > UNIMODULAR_TOL {
                Err(Error::InvalidOperator(format!("weight {z} is not unimodular")))
            } else {
                Ok(())
            }
        };
        match self {
            WeightRule::Constant(c) => check(c),
            WeightRule::Periodic(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidOperator("periodic weight list is empty".into()));
                }
                values.iter().try_for_each(check)
            }
            WeightRule::GeometricPhase { denominator, .. } => {
                if *denominator == 0 {
                    Err(Error::InvalidOperator("phase denominator is zero".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorKind {
    Identity,
    /// `e_p -> w(p_axis) e_{p + 1_axis}` on a half-line axis.
    UnilateralShift { axis: usize, weights: WeightRule },
    /// `e_p -> w(p_axis) e_{p + 1_axis}` on a full-line axis.
    BilateralShift { axis: usize, weights: WeightRule },
    /// `e_p -> w(p_axis) e_p`.
    DiagonalUnitary { axis: usize, phases: WeightRule },
    /// Product in mathematical order: the last factor acts first.
    Compose(Vec<OperatorKind>),
    /// Commuting product of primitive factors on pairwise distinct axes.
    Tensor(Vec<OperatorKind>),
    /// One operator per lattice block.
    DirectSum(Vec<OperatorKind>),
}

impl OperatorKind {
    pub fn shift(axis: usize) -> Self {
        OperatorKind::UnilateralShift { axis, weights: WeightRule::unit() }
    }

    pub fn bilateral(axis: usize) -> Self {
        OperatorKind::BilateralShift { axis, weights: WeightRule::unit() }
    }

    fn name(&self) -> &'static str {
        match self {
            OperatorKind::Identity => "Identity",
            OperatorKind::UnilateralShift { .. } => "UnilateralShift",
            OperatorKind::BilateralShift { .. } => "BilateralShift",
            OperatorKind::DiagonalUnitary { .. } => "DiagonalUnitary",
            OperatorKind::Compose(_) => "Compose",
            OperatorKind::Tensor(_) => "Tensor",
            OperatorKind::DirectSum(_) => "DirectSum",
        }
    }

    fn primitive_axis(&self) -> Option<usize> {
        match self {
            OperatorKind::UnilateralShift { axis, .. }
            | OperatorKind::BilateralShift { axis, .. }
            | OperatorKind::DiagonalUnitary { axis, .. } => Some(*axis),
            _ => None,
        }
    }

    fn validate_on(&self, block: &Block, lattice: &Lattice) -> Result<()> {
        let axis_kind = |axis: usize| {
            block.axes.get(axis).copied().ok_or_else(|| {
                Error::InvalidOperator(format!("{} uses axis {axis} of a block with {} axes", self.name(), block.rank()))
            })
        };
        match self {
            OperatorKind::Identity => Ok(()),
            OperatorKind::UnilateralShift { axis, weights } => {
                if axis_kind(*axis)? != AxisKind::HalfLine {
                    return Err(Error::InvalidOperator(format!("UnilateralShift needs a half-line axis, axis {axis} is a full line")));
                }
                weights.validate()
            }
            OperatorKind::BilateralShift { axis, weights } => {
                if axis_kind(*axis)? != AxisKind::FullLine {
                    return Err(Error::InvalidOperator(format!("BilateralShift needs a full-line axis, axis {axis} is a half line")));
                }
                weights.validate()
            }
            OperatorKind::DiagonalUnitary { axis, phases } => {
                axis_kind(*axis)?;
                phases.validate()
            }
            OperatorKind::Compose(factors) => {
                if factors.is_empty() {
                    return Err(Error::InvalidOperator("Compose needs at least one factor".into()));
                }
                factors.iter().try_for_each(|f| f.validate_on(block, lattice))
            }
            OperatorKind::Tensor(factors) => {
                let mut seen = Vec::new();
                for f in factors {
                    let axis = f.primitive_axis().ok_or_else(|| {
                        Error::InvalidOperator(format!("Tensor factors must be shifts or diagonals, got {}", f.name()))
                    })?;
                    if seen.contains(&axis) {
                        return Err(Error::InvalidOperator(format!("Tensor uses axis {axis} twice")));
                    }
                    seen.push(axis);
                    f.validate_on(block, lattice)?;
                }
                Ok(())
            }
            OperatorKind::DirectSum(_) => Err(Error::InvalidOperator("DirectSum may only appear at the top level".into())),
        }
    }

    /// Image of `e_p` as `(q, w)` with `V e_p = w e_q`, or `None` for zero.
    fn map(&self, p: &LatticePoint, adjoint: bool) -> Option<(LatticePoint, C64)> {
        match self {
            OperatorKind::Identity => Some((p.clone(), ONE)),
            OperatorKind::UnilateralShift { axis, weights } | OperatorKind::BilateralShift { axis, weights } => {
                if adjoint {
                    let q = p.shifted(*axis, -1);
                    if matches!(self, OperatorKind::UnilateralShift { .. }) && q.coords[*axis] < 0 {
                        return None;
                    }
                    let w = weights.value(q.coords[*axis]).conj();
                    Some((q, w))
                } else {
                    Some((p.shifted(*axis, 1), weights.value(p.coords[*axis])))
                }
            }
            OperatorKind::DiagonalUnitary { axis, phases } => {
                let w = phases.value(p.coords[*axis]);
                Some((p.clone(), if adjoint { w.conj() } else { w }))
            }
            OperatorKind::Compose(factors) => {
                let mut cur = (p.clone(), ONE);
                let step = |f: &OperatorKind, cur: &mut (LatticePoint, C64)| -> bool {
                    match f.map(&cur.0, adjoint) {
                        Some((q, w)) => {
                            *cur = (q, cur.1 * w);
                            true
                        }
                        None => false,
                    }
                };
                if adjoint {
                    for f in factors {
                        if !step(f, &mut cur) {
                            return None;
                        }
                    }
                } else {
                    for f in factors.iter().rev() {
                        if !step(f, &mut cur) {
                            return None;
                        }
                    }
                }
                Some(cur)
            }
            OperatorKind::Tensor(factors) => {
                let mut cur = (p.clone(), ONE);
                for f in factors {
                    let (q, w) = f.map(&cur.0, adjoint)?;
                    cur = (q, cur.1 * w);
                }
                Some(cur)
            }
            OperatorKind::DirectSum(parts) => parts[p.block].map(p, adjoint),
        }
    }

    fn displacement(&self, block: usize, axis: usize) -> u32 {
        match self {
            OperatorKind::Identity | OperatorKind::DiagonalUnitary { .. } => 0,
            OperatorKind::UnilateralShift { axis: a, .. } | OperatorKind::BilateralShift { axis: a, .. } => {
                u32::from(*a == axis)
            }
            OperatorKind::Compose(factors) => factors.iter().map(|f| f.displacement(block, axis)).sum(),
            OperatorKind::Tensor(factors) => factors.iter().map(|f| f.displacement(block, axis)).max().unwrap_or(0),
            OperatorKind::DirectSum(parts) => parts[block].displacement(block, axis),
        }
    }
}

/// Validated operator on a fixed lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredOperator {
    kind: OperatorKind,
    lattice: Lattice,
}

impl StructuredOperator {
    pub fn new(kind: OperatorKind, lattice: &Lattice) -> Result<Self> {
        match &kind {
            OperatorKind::DirectSum(parts) => {
                if parts.len() != lattice.num_blocks() {
                    return Err(Error::InvalidOperator(format!(
                        "DirectSum has {} parts for a lattice with {} blocks",
                        parts.len(),
                        lattice.num_blocks()
                    )));
                }
                for (part, block) in parts.iter().zip(lattice.blocks()) {
                    part.validate_on(block, lattice)?;
                }
            }
            other => {
                for block in lattice.blocks() {
                    other.validate_on(block, lattice)?;
                }
            }
        }
        Ok(Self { kind, lattice: lattice.clone() })
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `V e_p` as `(q, w)` meaning `w e_q`; `None` when it is zero.
    pub fn map_point(&self, p: &LatticePoint) -> Option<(LatticePoint, C64)> {
        self.kind.map(p, false)
    }

    /// `V* e_p` in the same form as [`map_point`](Self::map_point).
    pub fn map_point_adjoint(&self, p: &LatticePoint) -> Option<(LatticePoint, C64)> {
        self.kind.map(p, true)
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        apply_map(v, |p| self.map_point(p))
    }

    pub fn apply_adjoint(&self, v: &SparseVector) -> SparseVector {
        apply_map(v, |p| self.map_point_adjoint(p))
    }

    /// Largest distance one application moves a point along `axis` of `block`.
    pub fn displacement(&self, block: usize, axis: usize) -> u32 {
        self.kind.displacement(block, axis)
    }

    pub fn max_displacement(&self) -> u32 {
        let mut d = 0;
        for (b, block) in self.lattice.blocks().iter().enumerate() {
            for a in 0..block.rank() {
                d = d.max(self.displacement(b, a));
            }
        }
        d
    }
}

fn apply_map(v: &SparseVector, f: impl Fn(&LatticePoint) -> Option<(LatticePoint, C64)>) -> SparseVector {
    let mut out = SparseVector::zero();
    for (p, z) in v.iter() {
        if let Some((q, w)) = f(p) {
            out.add_at(q, z * w);
        }
    }
    out
}

/// Finite product of operators and adjoints, written in mathematical order:
/// the last letter acts first.
#[derive(Clone, Debug)]
pub struct Word<'a> {
    letters: Vec<(&'a StructuredOperator, bool)>,
}

impl<'a> Word<'a> {
    pub fn identity() -> Self {
        Self { letters: Vec::new() }
    }

    /// `op^m`.
    pub fn power(op: &'a StructuredOperator, m: usize) -> Self {
        Self { letters: vec![(op, false); m] }
    }

    /// `(op*)^m`.
    pub fn adjoint_power(op: &'a StructuredOperator, m: usize) -> Self {
        Self { letters: vec![(op, true); m] }
    }

    /// `self * other`: `other` acts first.
    pub fn then(mut self, other: Word<'a>) -> Self {
        self.letters.extend(other.letters);
        self
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The adjoint word.
    pub fn adjoint(&self) -> Word<'a> {
        Self { letters: self.letters.iter().rev().map(|&(op, star)| (op, !star)).collect() }
    }

    pub fn map_point(&self, p: &LatticePoint) -> Option<(LatticePoint, C64)> {
        let mut cur = (p.clone(), ONE);
        for &(op, star) in self.letters.iter().rev() {
            let (q, w) = op.kind.map(&cur.0, star)?;
            cur = (q, cur.1 * w);
        }
        Some(cur)
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        apply_map(v, |p| self.map_point(p))
    }

    pub fn apply_adjoint(&self, v: &SparseVector) -> SparseVector {
        self.adjoint().apply(v)
    }

    pub fn displacement(&self, block: usize, axis: usize) -> u32 {
        self.letters.iter().map(|(op, _)| op.displacement(block, axis)).sum()
    }

    /// Largest total displacement over all blocks and axes.
    pub fn max_displacement(&self) -> u32 {
        let Some((first, _)) = self.letters.first() else {
            return 0;
        };
        let mut d = 0;
        for (b, block) in first.lattice.blocks().iter().enumerate() {
            for a in 0..block.rank() {
                d = d.max(self.displacement(b, a));
            }
        }
        d
    }
}

pub(crate) fn check_guard(window: &Window, required: u64) -> Result<()> {
    if required > window.guard() as u64 {
        return Err(Error::GuardTooSmall { required, available: window.guard() });
    }
    Ok(())
}

/// `R(word) ∩ l2(window)`, from the images of the basis of the window
/// inflated by the word's total displacement.
pub fn range_of_word(word: &Word<'_>, window: &Window, tol: f64) -> Result<SubspaceBasis> {
    let d = word.max_displacement();
    check_guard(window, d as u64)?;
    let domain = window.inflate(d);
    let images: Vec<SparseVector> = domain
        .points()
        .iter()
        .filter_map(|p| word.map_point(p))
        .map(|(q, w)| SparseVector::from_entries([(q, w)]))
        .collect();
    Ok(SubspaceBasis::span_within(&images, window, tol))
}

/// `R(op^power) ∩ l2(window)`.
pub fn range_on_window(op: &StructuredOperator, power: usize, window: &Window, tol: f64) -> Result<SubspaceBasis> {
    let d = op.max_displacement() as u64 * power as u64;
    check_guard(window, d)?;
    range_of_word(&Word::power(op, power), window, tol)
}

/// `word(S) ∩ l2(window)` for a subspace `S`.
pub fn image_within(word: &Word<'_>, s: &SubspaceBasis, window: &Window, tol: f64) -> SubspaceBasis {
    let images: Vec<SparseVector> = s.vectors().iter().map(|v| word.apply(v)).collect();
    SubspaceBasis::span_within(&images, window, tol)
}

/// `{ v in l2(window) : V* v = 0 }`.
pub fn kernel_of_adjoint(op: &StructuredOperator, window: &Window, tol: f64) -> SubspaceBasis {
    let points = window.points();
    let images: Vec<SparseVector> = points
        .iter()
        .map(|p| op.apply_adjoint(&SparseVector::basis(p.clone())))
        .collect();
    let mut kernel: Vec<SparseVector> = points
        .iter()
        .zip(&images)
        .filter(|(_, img)| img.is_zero())
        .map(|(p, _)| SparseVector::basis(p.clone()))
        .collect();
    for g in group_families(&[&images]) {
        let members = &g.members[0];
        if members.len() == 1 {
            continue;
        }
        let m = g.dense(&images, 0);
        let sources: Vec<LatticePoint> = members.iter().map(|&i| points[i].clone()).collect();
        for y in null_space(&m, tol) {
            kernel.push(sparse_column(&y, &sources));
        }
    }
    kernel.sort_by(|a, b| a.dominant().map(|(p, _)| p.clone()).cmp(&b.dominant().map(|(p, _)| p.clone())));
    orthonormalize(&kernel, window, tol)
}

/// Operator norm of `f` on `l2(window)`.
pub fn window_norm(window: &Window, f: impl Fn(&SparseVector) -> SparseVector) -> f64 {
    let columns: Vec<SparseVector> = window.points().into_iter().map(|p| f(&SparseVector::basis(p))).collect();
    columns_norm(&columns)
}

/// `|P_W (X X* - Y Y*) P_W|`: deviation of the two range projections
/// compressed to the window.
pub fn projection_deviation(x: &Word<'_>, y: &Word<'_>, window: &Window) -> f64 {
    window_norm(window, |e| {
        let xx = x.apply(&x.apply_adjoint(e));
        let yy = y.apply(&y.apply_adjoint(e));
        xx.sub(&yy).compressed_to(window)
    })
}
