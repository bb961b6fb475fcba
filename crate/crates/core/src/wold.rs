//! Wold decompositions on windows: one isometry, a pair through closed
//! block formulas, and `n <= 6` isometries through joint wandering
//! subspaces.
//!
//! All computations run on a working window that extends the user window
//! along full-line axes far enough that every operator image needed for
//! the user window is exact there. Intersections over all powers are cut
//! at `max_power`, which is only faithful on the *interior* window: the
//! user window with every half-line axis capped at `max_power - 1`.
//! Blocks are therefore reported on the interior, with their dimension on
//! the full user window kept as a diagnostic.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::dense::columns_norm;
use crate::error::{Error, Result};
use crate::lattice::{AxisKind, LatticePoint, Window};
use crate::operator::{check_guard, image_within, kernel_of_adjoint, range_of_word, range_on_window, StructuredOperator, Word};
use crate::subspace::{intersect, orthonormalize, principal_angle_gap, SubspaceBasis};
use crate::vector::SparseVector;

pub const DEFAULT_MAX_POWER: usize = 8;
pub const MAX_OPERATORS: usize = 6;

/// Subset of operator indices; bit `i` stands for operator `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u32);

impl Subset {
    pub fn full(n: usize) -> Self {
        Subset((1u32 << n) - 1)
    }

    /// All subsets of `{0, .., n-1}` in binary counting order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << n).map(Subset)
    }

    pub fn from_members(members: &[usize]) -> Self {
        Subset(members.iter().fold(0, |acc, &i| acc | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.contains(i)).collect()
    }

    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Self::full(n).0)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = (0..32).filter(|&i| self.contains(i)).map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", members.join(","))
    }
}

/// How one operator acts on one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorClass {
    Shift,
    Unitary,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WarningKind {
    /// An intersection over powers still changed at the probe power.
    NotStabilized,
    /// Neither the shift nor the unitary test was decisive.
    Inconclusive,
    /// A block was classified against its label.
    ClassMismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Warning {
    pub kind: WarningKind,
    pub message: String,
}

impl Warning {
    fn new(kind: WarningKind, message: String) -> Self {
        Self { kind, message }
    }
}

/// User window with half-line axes capped at `max_power - 1`.
pub fn interior_window(window: &Window, max_power: usize) -> Window {
    window.cap_half_lines(Some(max_power.saturating_sub(1) as u32))
}

/// User window widened on full-line axes by `(max_power + 1)` times the
/// summed displacement of the tuple along that axis.
pub fn working_window(window: &Window, tuple: &[StructuredOperator], max_power: usize) -> Result<Window> {
    let reach = |b: usize, a: usize| -> u64 {
        (max_power as u64 + 1) * tuple.iter().map(|op| op.displacement(b, a) as u64).sum::<u64>()
    };
    let lattice = window.lattice();
    let mut required = 0;
    for (b, block) in lattice.blocks().iter().enumerate() {
        for a in 0..block.rank() {
            required = required.max(reach(b, a));
        }
    }
    check_guard(window, required)?;
    Ok(window.inflate_by(|b, a, kind| match kind {
        AxisKind::FullLine => {
            let g = reach(b, a) as u32;
            (g, g)
        }
        AxisKind::HalfLine => (0, 0),
    }))
}

/// `probe` widened on full-line axes by `max_power` times the summed
/// displacement of `ops`.
fn widened(probe: &Window, ops: &[&StructuredOperator], max_power: usize) -> Window {
    probe.inflate_by(|b, a, kind| match kind {
        AxisKind::FullLine => {
            let g = max_power as u32 * ops.iter().map(|op| op.displacement(b, a)).sum::<u32>();
            (g, g)
        }
        AxisKind::HalfLine => (0, 0),
    })
}

/// `x ∩ V x ∩ ... ∩ V^M x` on the ambient window of `x`, with the gap to
/// the next term of the chain measured on `probe`.
fn power_intersection(
    op: &StructuredOperator,
    x: &SubspaceBasis,
    max_power: usize,
    probe: &Window,
    tol: f64,
) -> Result<(SubspaceBasis, f64)> {
    let ambient = x.ambient().clone();
    let step = Word::power(op, 1);
    let mut acc = x.clone();
    let mut image = x.clone();
    for _ in 1..=max_power {
        image = image_within(&step, &image, &ambient, tol);
        acc = intersect(&acc, &image)?;
    }
    image = image_within(&step, &image, &ambient, tol);
    let next = intersect(&acc, &image)?;
    let gap = principal_angle_gap(&acc.restrict_to(probe), &next.restrict_to(probe));
    Ok((acc, gap))
}

/// `x + V x + ... + V^M x` on the ambient window of `x`.
fn power_sum(op: &StructuredOperator, x: &SubspaceBasis, max_power: usize, tol: f64) -> SubspaceBasis {
    let ambient = x.ambient().clone();
    let step = Word::power(op, 1);
    let mut vectors: Vec<SparseVector> = x.vectors().to_vec();
    let mut image = x.clone();
    for _ in 1..=max_power {
        image = image_within(&step, &image, &ambient, tol);
        vectors.extend(image.vectors().iter().cloned());
    }
    orthonormalize(&vectors, &ambient, tol)
}

/// Wold parts of a single isometry restricted to the interior.
#[derive(Clone, Debug)]
struct SingleParts {
    /// `N(V*)` on the working window.
    wandering: SubspaceBasis,
    shift: SubspaceBasis,
    unitary: SubspaceBasis,
    stabilized_at: Option<usize>,
    chain_gaps: Vec<f64>,
}

fn single_parts(
    op: &StructuredOperator,
    working: &Window,
    interior: &Window,
    max_power: usize,
    tol: f64,
) -> Result<SingleParts> {
    let wandering = kernel_of_adjoint(op, working, tol);
    let shift = power_sum(op, &wandering, max_power, tol).restrict_to(interior);
    let mut unitary = SubspaceBasis::full(interior, tol);
    let mut chain_gaps = Vec::new();
    let mut stabilized_at = None;
    for m in 1..=max_power + 1 {
        let next = intersect(&unitary, &range_on_window(op, m, interior, tol)?)?;
        let gap = principal_angle_gap(&unitary, &next);
        chain_gaps.push(gap);
        if gap <= tol {
            stabilized_at = Some(m - 1);
            break;
        }
        if m <= max_power {
            unitary = next;
        }
    }
    Ok(SingleParts { wandering, shift, unitary, stabilized_at, chain_gaps })
}

fn not_stabilized(context: &str, gaps: &[f64]) -> Warning {
    let last: Vec<String> = gaps.iter().rev().take(2).rev().map(|g| format!("{g:.3e}")).collect();
    Warning::new(
        WarningKind::NotStabilized,
        format!("{context}: intersection chain still shrinking at the last power (gaps {})", last.join(", ")),
    )
}

/// Result of [`wold_single`]. Parts live on the interior window, the
/// wandering subspace on the user window.
#[derive(Clone, Debug)]
pub struct WoldReport {
    pub interior: Window,
    pub max_power: usize,
    pub unitary_part: SubspaceBasis,
    pub shift_part: SubspaceBasis,
    pub wandering: SubspaceBasis,
    pub multiplicity: usize,
    /// Largest distance from an interior basis vector to the sum of parts.
    pub residual: f64,
    /// Largest `|<u, s>|` between the parts.
    pub orthogonality: f64,
    /// Power from which the unitary chain no longer changed.
    pub stabilized_at: Option<usize>,
    pub chain_gaps: Vec<f64>,
    pub warnings: Vec<Warning>,
}

fn check_inputs(tuple: &[StructuredOperator], window: &Window, max_power: usize) -> Result<()> {
    if max_power == 0 {
        return Err(Error::InvalidArgument("max_power must be at least 1".into()));
    }
    if tuple.iter().any(|op| op.lattice() != window.lattice()) {
        return Err(Error::InvalidArgument("operators and window must share one lattice".into()));
    }
    Ok(())
}

/// Splits the interior window into `H_u ∩ interior` and `H_s ∩ interior`.
pub fn wold_single(op: &StructuredOperator, window: &Window, max_power: usize, tol: f64) -> Result<WoldReport> {
    let tuple = std::slice::from_ref(op);
    check_inputs(tuple, window, max_power)?;
    let working = working_window(window, tuple, max_power)?;
    let interior = interior_window(window, max_power);
    let parts = single_parts(op, &working, &interior, max_power, tol)?;
    let wandering = parts.wandering.restrict_to(window);
    let mut warnings = Vec::new();
    if parts.stabilized_at.is_none() {
        warnings.push(not_stabilized("unitary part", &parts.chain_gaps));
    }
    let all: Vec<SparseVector> = parts.unitary.vectors().iter().chain(parts.shift.vectors()).cloned().collect();
    let residual = completeness_residual(&all, &interior, tol);
    let orthogonality = cross_inner_products(&[parts.unitary.vectors(), parts.shift.vectors()]);
    Ok(WoldReport {
        interior,
        max_power,
        multiplicity: wandering.dim(),
        unitary_part: parts.unitary,
        shift_part: parts.shift,
        wandering,
        residual,
        orthogonality,
        stabilized_at: parts.stabilized_at,
        chain_gaps: parts.chain_gaps,
        warnings,
    })
}

/// Largest `|e_p - P e_p|` over the points of `interior`, where `P`
/// projects onto the span of the (orthonormal) `vectors`.
fn completeness_residual(vectors: &[SparseVector], interior: &Window, tol: f64) -> f64 {
    let all = SubspaceBasis::from_parts(vectors.to_vec(), tol, interior);
    let projector = all.projector();
    interior
        .points()
        .into_iter()
        .map(|p| projector.residual(&SparseVector::basis(p)).norm())
        .fold(0.0, f64::max)
}

/// Largest `|<u, v>|` over vectors taken from two different families.
fn cross_inner_products(families: &[&[SparseVector]]) -> f64 {
    let mut index: HashMap<&LatticePoint, Vec<(usize, usize)>> = HashMap::new();
    for (f, family) in families.iter().enumerate() {
        for (k, v) in family.iter().enumerate() {
            for p in v.support() {
                index.entry(p).or_default().push((f, k));
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (f, family) in families.iter().enumerate() {
        for v in family.iter() {
            let mut seen: Vec<(usize, usize)> = v
                .support()
                .flat_map(|p| index[p].iter().copied())
                .filter(|&(g, _)| g > f)
                .collect();
            seen.sort_unstable();
            seen.dedup();
            for (g, k) in seen {
                worst = worst.max(v.inner(&families[g][k]).norm());
            }
        }
    }
    worst
}

/// One joint reducing block.
#[derive(Clone, Debug)]
pub struct BlockReport {
    pub subset: Subset,
    /// The block on the interior window.
    pub basis: SubspaceBasis,
    /// Dimension on the user window before the interior cut.
    pub window_dim: usize,
    /// Dimension of the joint wandering subspace on the user window.
    pub wandering_dim: usize,
    /// Class of each operator on the block; empty for a zero block.
    pub classes: Vec<OperatorClass>,
    /// Gap to the same block computed from single-operator Wold parts.
    pub cross_check_gap: f64,
    /// Largest gap between the last two terms of the block's
    /// intersection chains.
    pub stabilization_gap: f64,
}

impl BlockReport {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// The `2^n` blocks in binary counting order of their subsets, with
/// diagnostics on the interior window.
#[derive(Clone, Debug)]
pub struct TupleDecomposition {
    pub n: usize,
    pub window: Window,
    pub interior: Window,
    pub max_power: usize,
    pub tol: f64,
    pub blocks: Vec<BlockReport>,
    pub completeness_residual: f64,
    pub orthogonality_worst: f64,
    pub warnings: Vec<Warning>,
    /// Outcome of a hypothesis check, when the caller attached one.
    pub hypotheses_pass: Option<bool>,
}

impl TupleDecomposition {
    pub fn block(&self, subset: Subset) -> &BlockReport {
        &self.blocks[subset.0 as usize]
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(BlockReport::dim).sum()
    }

    pub fn interior_dim(&self) -> usize {
        self.interior.cardinality()
    }

    /// Dimension of `N(V1*) ∩ ... ∩ N(Vn*)` on the user window.
    pub fn joint_wandering_dim(&self) -> usize {
        self.block(Subset::full(self.n)).wandering_dim
    }

    pub fn worst_cross_check_gap(&self) -> f64 {
        self.blocks.iter().map(|b| b.cross_check_gap).fold(0.0, f64::max)
    }

    pub fn inconclusive_count(&self) -> usize {
        self.blocks
            .iter()
            .flat_map(|b| &b.classes)
            .filter(|&&c| c == OperatorClass::Inconclusive)
            .count()
    }

    pub fn with_hypotheses(mut self, pass: bool) -> Self {
        self.hypotheses_pass = Some(pass);
        self
    }
}

/// Block before classification and cross-checking.
struct RawBlock {
    on_window: SubspaceBasis,
    on_interior: SubspaceBasis,
    wandering_dim: usize,
    stabilization_gap: f64,
}

/// Shift if `V^{*M}` kills the block, unitary if the block lies in `R(V)`.
fn classify(op: &StructuredOperator, basis: &SubspaceBasis, max_power: usize, tol: f64) -> OperatorClass {
    let adjoint = Word::adjoint_power(op, max_power);
    let killed: Vec<SparseVector> = basis.vectors().iter().map(|b| adjoint.apply(b)).collect();
    let uncovered: Vec<SparseVector> =
        basis.vectors().iter().map(|b| b.sub(&op.apply(&op.apply_adjoint(b)))).collect();
    match (columns_norm(&killed) <= tol, columns_norm(&uncovered) <= tol) {
        (true, false) => OperatorClass::Shift,
        (false, true) => OperatorClass::Unitary,
        _ => OperatorClass::Inconclusive,
    }
}

/// `(⋂_{i∉Λ} H_ui) ∩ (⋂_{j∈Λ} H_sj)` on the interior for every `Λ`.
fn intersection_formula(parts: &[SingleParts], interior: &Window, tol: f64) -> Result<Vec<SubspaceBasis>> {
    let n = parts.len();
    Subset::all(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| {
            let mut acc = SubspaceBasis::full(interior, tol);
            for (i, p) in parts.iter().enumerate() {
                acc = intersect(&acc, if s.contains(i) { &p.shift } else { &p.unitary })?;
            }
            Ok(acc)
        })
        .collect()
}

struct Setup {
    working: Window,
    interior: Window,
    parts: Vec<SingleParts>,
}

fn setup(tuple: &[StructuredOperator], window: &Window, max_power: usize, tol: f64) -> Result<Setup> {
    check_inputs(tuple, window, max_power)?;
    let working = working_window(window, tuple, max_power)?;
    let interior = interior_window(window, max_power);
    let parts = tuple
        .par_iter()
        .map(|op| single_parts(op, &working, &interior, max_power, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Setup { working, interior, parts })
}

fn assemble(
    tuple: &[StructuredOperator],
    window: &Window,
    setup: &Setup,
    raw: Vec<RawBlock>,
    max_power: usize,
    tol: f64,
) -> Result<TupleDecomposition> {
    let n = tuple.len();
    let oracle = intersection_formula(&setup.parts, &setup.interior, tol)?;
    let mut warnings = Vec::new();
    for (i, p) in setup.parts.iter().enumerate() {
        if p.stabilized_at.is_none() {
            warnings.push(not_stabilized(&format!("unitary part of operator {i}"), &p.chain_gaps));
        }
    }
    let mut blocks = Vec::with_capacity(raw.len());
    for (mask, r) in raw.into_iter().enumerate() {
        let subset = Subset(mask as u32);
        let classes: Vec<OperatorClass> = if r.on_interior.is_empty() {
            Vec::new()
        } else {
            tuple.iter().map(|op| classify(op, &r.on_interior, max_power, tol)).collect()
        };
        for (i, &class) in classes.iter().enumerate() {
            let expected = if subset.contains(i) { OperatorClass::Shift } else { OperatorClass::Unitary };
            if class == OperatorClass::Inconclusive {
                warnings.push(Warning::new(
                    WarningKind::Inconclusive,
                    format!("block {subset}: operator {i} is neither a clear shift nor a clear unitary"),
                ));
            } else if class != expected {
                warnings.push(Warning::new(
                    WarningKind::ClassMismatch,
                    format!("block {subset}: operator {i} acts as {class:?}, expected {expected:?}"),
                ));
            }
        }
        if r.stabilization_gap > tol {
            warnings.push(not_stabilized(&format!("block {subset}"), &[r.stabilization_gap]));
        }
        blocks.push(BlockReport {
            subset,
            cross_check_gap: principal_angle_gap(&r.on_interior, &oracle[mask]),
            window_dim: r.on_window.dim(),
            basis: r.on_interior,
            wandering_dim: r.wandering_dim,
            classes,
            stabilization_gap: r.stabilization_gap,
        });
    }
    let families: Vec<&[SparseVector]> = blocks.iter().map(|b| b.basis.vectors()).collect();
    let all: Vec<SparseVector> = families.iter().flat_map(|f| f.iter().cloned()).collect();
    Ok(TupleDecomposition {
        n,
        window: window.clone(),
        interior: setup.interior.clone(),
        max_power,
        tol,
        completeness_residual: completeness_residual(&all, &setup.interior, tol),
        orthogonality_worst: cross_inner_products(&families),
        blocks,
        warnings,
        hypotheses_pass: None,
    })
}

/// Joint wandering subspace `⋂_{i∈Λ} N(Vi*)` on the working window.
fn joint_wandering(setup: &Setup, subset: Subset, tol: f64) -> Result<SubspaceBasis> {
    let n = setup.parts.len();
    let mut members = subset.members(n).into_iter();
    let Some(first) = members.next() else {
        return Ok(SubspaceBasis::full(&setup.working, tol));
    };
    members.try_fold(setup.parts[first].wandering.clone(), |acc, i| intersect(&acc, &setup.parts[i].wandering))
}

/// `H_Λ = ⊕_p V_Λ^p K_Λ` with `K_Λ = ⋂_q V_{Λᶜ}^q W_Λ`, powers up to
/// `max_power` in every coordinate. The grids are evaluated one operator
/// at a time.
fn tuple_block(
    tuple: &[StructuredOperator],
    window: &Window,
    setup: &Setup,
    subset: Subset,
    max_power: usize,
    tol: f64,
) -> Result<RawBlock> {
    let n = tuple.len();
    let wandering = joint_wandering(setup, subset, tol)?;
    let wandering_dim = wandering.restrict_to(window).dim();
    let shifts: Vec<&StructuredOperator> = subset.members(n).into_iter().map(|i| &tuple[i]).collect();
    let probe = widened(&setup.interior, &shifts, max_power);
    let mut core = wandering;
    let mut stabilization_gap: f64 = 0.0;
    for i in subset.complement(n).members(n) {
        let (next, gap) = power_intersection(&tuple[i], &core, max_power, &probe, tol)?;
        core = next;
        stabilization_gap = stabilization_gap.max(gap);
    }
    let mut block = core;
    for op in shifts {
        block = power_sum(op, &block, max_power, tol);
    }
    Ok(RawBlock {
        on_window: block.restrict_to(window),
        on_interior: block.restrict_to(&setup.interior),
        wandering_dim,
        stabilization_gap,
    })
}

/// Decomposes the interior window into the `2^n` joint reducing blocks of
/// an equal-range tuple. Blocks are computed concurrently.
pub fn wold_tuple(tuple: &[StructuredOperator], window: &Window, max_power: usize, tol: f64) -> Result<TupleDecomposition> {
    if tuple.len() > MAX_OPERATORS {
        return Err(Error::TooManyOperators(tuple.len()));
    }
    if tuple.is_empty() {
        return Err(Error::InvalidArgument("the tuple is empty".into()));
    }
    let setup = setup(tuple, window, max_power, tol)?;
    let raw = Subset::all(tuple.len())
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| tuple_block(tuple, window, &setup, s, max_power, tol))
        .collect::<Result<Vec<_>>>()?;
    assemble(tuple, window, &setup, raw, max_power, tol)
}

/// Four-block decomposition of a pair from the closed forms
/// `H_uu = ⋂ R(V1^a V2^b)`, `H_su = ⊕_a V1^a ⋂_b V2^b N(V1*)`,
/// `H_us = ⊕_b V2^b ⋂_a V1^a N(V2*)` and
/// `H_ss = ⊕_{a,b} V1^a V2^b (N(V1*) ∩ N(V2*))`, each power grid written
/// out term by term. Blocks are indexed as in [`wold_tuple`]: bit 0 marks
/// `V1` as a shift.
pub fn wold_pair(
    v1: &StructuredOperator,
    v2: &StructuredOperator,
    window: &Window,
    max_power: usize,
    tol: f64,
) -> Result<TupleDecomposition> {
    let tuple = [v1.clone(), v2.clone()];
    let setup = setup(&tuple, window, max_power, tol)?;
    let working = &setup.working;
    let m = max_power;

    // H_uu: every grid term is a range, computed directly on the window
    let grid_range = |a: usize, b: usize| range_of_word(&Word::power(v1, a).then(Word::power(v2, b)), window, tol);
    let mut uu = SubspaceBasis::full(window, tol);
    for a in 0..=m {
        for b in 0..=m {
            if a + b > 0 {
                uu = intersect(&uu, &grid_range(a, b)?)?;
            }
        }
    }
    let mut uu_next = uu.clone();
    for k in 0..=m + 1 {
        uu_next = intersect(&uu_next, &grid_range(m + 1, k)?)?;
        uu_next = intersect(&uu_next, &grid_range(k, m + 1)?)?;
    }
    let uu_gap = principal_angle_gap(&uu.restrict_to(&setup.interior), &uu_next.restrict_to(&setup.interior));

    // H_su and H_us: chain of images of one kernel, then a sum of images
    let mixed = |shift: &StructuredOperator, unitary: &StructuredOperator, kernel: &SubspaceBasis| -> Result<(SubspaceBasis, f64)> {
        let mut core = kernel.clone();
        for k in 1..=m {
            core = intersect(&core, &image_within(&Word::power(unitary, k), kernel, working, tol))?;
        }
        let next = intersect(&core, &image_within(&Word::power(unitary, m + 1), kernel, working, tol))?;
        let probe = widened(&setup.interior, &[shift], m);
        let gap = principal_angle_gap(&core.restrict_to(&probe), &next.restrict_to(&probe));
        let mut vectors = Vec::new();
        for k in 0..=m {
            vectors.extend(image_within(&Word::power(shift, k), &core, working, tol).into_vectors());
        }
        Ok((orthonormalize(&vectors, working, tol), gap))
    };
    let (n1, n2) = (&setup.parts[0].wandering, &setup.parts[1].wandering);
    let (su, su_gap) = mixed(v1, v2, n1)?;
    let (us, us_gap) = mixed(v2, v1, n2)?;

    // H_ss: the full grid of images of the joint wandering subspace
    let joint = intersect(n1, n2)?;
    let mut vectors = Vec::new();
    for a in 0..=m {
        for b in 0..=m {
            vectors.extend(image_within(&Word::power(v1, a).then(Word::power(v2, b)), &joint, working, tol).into_vectors());
        }
    }
    let ss = orthonormalize(&vectors, working, tol);

    let raw_block = |basis: SubspaceBasis, wandering: &SubspaceBasis, gap: f64| RawBlock {
        on_window: basis.restrict_to(window),
        on_interior: basis.restrict_to(&setup.interior),
        wandering_dim: wandering.restrict_to(window).dim(),
        stabilization_gap: gap,
    };
    let everything = SubspaceBasis::full(window, tol);
    let raw = vec![
        raw_block(uu, &everything, uu_gap),
        raw_block(su, n1, su_gap),
        raw_block(us, n2, us_gap),
        raw_block(ss, &joint, 0.0),
    ];
    assemble(&tuple, window, &setup, raw, max_power, tol)
}

/// Decomposes `tuple` and its relabeling `tuple[perm[0]], tuple[perm[1]], ..`
/// and returns the largest gap between corresponding blocks.
pub fn permutation_probe(
    tuple: &[StructuredOperator],
    perm: &[usize],
    window: &Window,
    max_power: usize,
    tol: f64,
) -> Result<f64> {
    let n = tuple.len();
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument("perm must be a permutation of the operator indices".into()));
    }
    let permuted: Vec<StructuredOperator> = perm.iter().map(|&k| tuple[k].clone()).collect();
    let original = wold_tuple(tuple, window, max_power, tol)?;
    let relabeled = wold_tuple(&permuted, window, max_power, tol)?;
    let mut worst: f64 = 0.0;
    for s in Subset::all(n) {
        // position k of the permuted tuple holds operator perm[k]
        let image = Subset::from_members(&(0..n).filter(|&k| s.contains(perm[k])).collect::<Vec<_>>());
        worst = worst.max(principal_angle_gap(&original.block(s).basis, &relabeled.block(image).basis));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::operator::OperatorKind;

    #[test]
    fn subset_helpers() {
        let s = Subset::from_members(&[0, 2]);
        assert_eq!(s, Subset(0b101));
        assert_eq!(s.complement(3), Subset(0b010));
        assert_eq!(s.members(3), vec![0, 2]);
        assert_eq!(s.to_string(), "{0,2}");
        assert_eq!(Subset::all(2).count(), 4);
    }

    #[test]
    fn interior_caps_half_lines_only() {
        let l = Lattice::single(vec![AxisKind::HalfLine, AxisKind::FullLine]);
        let w = Window::new(&l, 5);
        let i = interior_window(&w, 3);
        assert_eq!(i.cardinality(), 3 * 11);
    }

    #[test]
    fn pure_shift_single() {
        let l = Lattice::half_line();
        let s = StructuredOperator::new(OperatorKind::shift(0), &l).unwrap();
        let r = wold_single(&s, &Window::new(&l, 8), 8, 1e-10).unwrap();
        assert!(r.unitary_part.is_empty());
        assert_eq!(r.shift_part.dim(), r.interior.cardinality());
        assert_eq!(r.multiplicity, 1);
        assert!(r.residual <= 1e-10);
        assert_eq!(r.stabilized_at, Some(8));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn too_many_operators() {
        let l = Lattice::half_line();
        let s = StructuredOperator::new(OperatorKind::shift(0), &l).unwrap();
        let tuple = vec![s; 7];
        assert_eq!(wold_tuple(&tuple, &Window::new(&l, 2), 2, 1e-10).unwrap_err(), Error::TooManyOperators(7));
    }
}
