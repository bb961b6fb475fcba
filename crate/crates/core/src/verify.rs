//! Checks of computed decompositions and of the wandering-subspace
//! identities that hold for equal-range tuples.

use crate::error::Result;
use crate::hypotheses::check_equal_range;
use crate::lattice::{AxisKind, Window};
use crate::operator::{check_guard, image_within, kernel_of_adjoint, StructuredOperator, Word};
use crate::subspace::{directed_gap, intersect, orthogonal_part, principal_angle_gap, SubspaceBasis};
use crate::vector::SparseVector;
use crate::wold::{Subset, TupleDecomposition};

/// Worst invariance defect of one block under one operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducingCheck {
    pub subset: Subset,
    pub operator: usize,
    /// Largest `|P_I V b - P_B P_I V b|` over basis vectors `b`.
    pub forward: f64,
    /// The same for `V*`.
    pub adjoint: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducingReport {
    pub checks: Vec<ReducingCheck>,
    pub worst: f64,
}

/// Checks that every block of `decomposition` is invariant under every
/// operator and its adjoint, after compressing images to the interior.
pub fn verify_reducing(tuple: &[StructuredOperator], decomposition: &TupleDecomposition) -> ReducingReport {
    let interior = &decomposition.interior;
    let mut checks = Vec::new();
    for block in &decomposition.blocks {
        if block.basis.is_empty() {
            continue;
        }
        let projector = block.basis.projector();
        let defect = |f: &dyn Fn(&SparseVector) -> SparseVector| {
            block
                .basis
                .vectors()
                .iter()
                .map(|b| projector.residual(&f(b).compressed_to(interior)).norm())
                .fold(0.0, f64::max)
        };
        for (i, op) in tuple.iter().enumerate() {
            checks.push(ReducingCheck {
                subset: block.subset,
                operator: i,
                forward: defect(&|b| op.apply(b)),
                adjoint: defect(&|b| op.apply_adjoint(b)),
            });
        }
    }
    let worst = checks.iter().map(|c| c.forward.max(c.adjoint)).fold(0.0, f64::max);
    ReducingReport { checks, worst }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    /// `Vj W_Λ ⊆ W_Λ` for `j ∉ Λ`.
    ForwardInvariance,
    /// `Vj* W_Λ ⊆ W_Λ` for `j ∉ Λ`.
    AdjointInvariance,
    /// `W_Λ ⊖ Vj W_Λ = W_Λ ∩ W_j` for `j ∉ Λ`.
    WanderingDifference,
    /// `V_{I∖Λ}^p V_j^p W_{Λ∪{j}} = V_j^p V_{I∖Λ}^p W_{Λ∪{j}}`.
    ExchangeOutside,
    /// `V_{I∖Λ}^p V_Λ^p W_Λ = V_Λ^p V_{I∖Λ}^p W_Λ`.
    ExchangeShifts,
    /// `V_{I∖Λ}^{*p} V_Λ^p W_Λ = V_Λ^p V_{I∖Λ}^{*p} W_Λ`.
    ExchangeAdjoint,
    /// `V_Λ^p V_j^p W_{Λ∪{j}} = V_j^p V_Λ^p W_{Λ∪{j}}`.
    ExchangeInside,
}

/// One identity instance. `prefix` is the operator range `0..prefix` the
/// exchange identities are stated over; `operator` is `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub kind: IdentityKind,
    pub subset: Subset,
    pub operator: usize,
    pub prefix: usize,
    pub power: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WanderingReport {
    pub checks: Vec<IdentityCheck>,
    pub invariance_worst: f64,
    pub difference_worst: f64,
    pub exchange_worst: f64,
    /// Whether both equal-range conditions hold at power 1. The
    /// identities are only guaranteed when they do.
    pub hypotheses_satisfied: bool,
}

impl WanderingReport {
    pub fn worst(&self) -> f64 {
        self.invariance_worst.max(self.difference_worst).max(self.exchange_worst)
    }
}

/// Powers at which the exchange identities are sampled.
pub const SAMPLED_POWERS: [usize; 2] = [1, 2];

struct Context<'a> {
    tuple: &'a [StructuredOperator],
    window: &'a Window,
    working: Window,
    kernels: Vec<SubspaceBasis>,
    tol: f64,
}

impl<'a> Context<'a> {
    fn wandering(&self, subset: Subset) -> Result<SubspaceBasis> {
        let mut acc = SubspaceBasis::full(&self.working, self.tol);
        for i in subset.members(self.tuple.len()) {
            acc = intersect(&acc, &self.kernels[i])?;
        }
        Ok(acc)
    }

    fn word(&self, ops: &[usize], power: usize, adjoint: bool) -> Word<'a> {
        ops.iter().fold(Word::identity(), |w, &i| {
            let letter = if adjoint {
                Word::adjoint_power(&self.tuple[i], power)
            } else {
                Word::power(&self.tuple[i], power)
            };
            w.then(letter)
        })
    }

    fn image(&self, word: &Word<'_>, s: &SubspaceBasis) -> SubspaceBasis {
        image_within(word, s, &self.working, self.tol)
    }

    /// Gap between `x s` and `y s`, judged on the user window.
    fn exchange_gap(&self, x: Word<'_>, y: Word<'_>, s: &SubspaceBasis) -> f64 {
        let a = self.image(&x, s).restrict_to(self.window);
        let b = self.image(&y, s).restrict_to(self.window);
        principal_angle_gap(&a, &b)
    }
}

/// Evaluates the invariance, difference and exchange identities of joint
/// wandering subspaces on `window`. Runs whether or not the tuple
/// satisfies the equal-range conditions and records which is the case.
pub fn verify_wandering_identities(tuple: &[StructuredOperator], window: &Window, tol: f64) -> Result<WanderingReport> {
    let n = tuple.len();
    let hypotheses_satisfied = check_equal_range(tuple, 1, window, tol)?.passes();
    let top = *SAMPLED_POWERS.iter().max().expect("non-empty");
    // widen every axis by the largest displacement any sampled word reaches
    let reach = |b: usize, a: usize| top as u32 * tuple.iter().map(|op| op.displacement(b, a)).sum::<u32>();
    let mut required = 0;
    for (b, block) in window.lattice().blocks().iter().enumerate() {
        for a in 0..block.rank() {
            required = required.max(reach(b, a));
        }
    }
    check_guard(window, required as u64)?;
    let working = window.inflate_by(|b, a, kind| match kind {
        AxisKind::FullLine => (reach(b, a), reach(b, a)),
        AxisKind::HalfLine => (0, reach(b, a)),
    });
    let kernels = tuple.iter().map(|op| kernel_of_adjoint(op, &working, tol)).collect();
    let cx = Context { tuple, window, working, kernels, tol };
    let mut checks = Vec::new();

    for s in Subset::all(n) {
        let w = cx.wandering(s)?;
        let w_on_window = w.restrict_to(window);
        for j in s.complement(n).members(n) {
            let forward = cx.image(&Word::power(&tuple[j], 1), &w).restrict_to(window);
            let adjoint = cx.image(&Word::adjoint_power(&tuple[j], 1), &w).restrict_to(window);
            for (kind, image) in [(IdentityKind::ForwardInvariance, forward), (IdentityKind::AdjointInvariance, adjoint)] {
                checks.push(IdentityCheck { kind, subset: s, operator: j, prefix: n, power: 1, gap: directed_gap(&image, &w_on_window).0 });
            }
            let moved = cx.image(&Word::power(&tuple[j], 1), &w);
            let difference = orthogonal_part(&w, &moved)?.restrict_to(window);
            let joint = intersect(&w, &cx.kernels[j])?.restrict_to(window);
            checks.push(IdentityCheck {
                kind: IdentityKind::WanderingDifference,
                subset: s,
                operator: j,
                prefix: n,
                power: 1,
                gap: principal_angle_gap(&difference, &joint),
            });
        }
    }

    for k in 1..n {
        for s in Subset::all(k) {
            let inside = s.members(k);
            let outside = s.complement(k).members(k);
            let w = cx.wandering(s)?;
            let w_next = cx.wandering(Subset(s.0 | 1 << k))?;
            for &p in &SAMPLED_POWERS {
                let gaps = [
                    (
                        IdentityKind::ExchangeOutside,
                        cx.exchange_gap(
                            cx.word(&outside, p, false).then(cx.word(&[k], p, false)),
                            cx.word(&[k], p, false).then(cx.word(&outside, p, false)),
                            &w_next,
                        ),
                    ),
                    (
                        IdentityKind::ExchangeShifts,
                        cx.exchange_gap(
                            cx.word(&outside, p, false).then(cx.word(&inside, p, false)),
                            cx.word(&inside, p, false).then(cx.word(&outside, p, false)),
                            &w,
                        ),
                    ),
                    (
                        IdentityKind::ExchangeAdjoint,
                        cx.exchange_gap(
                            cx.word(&outside, p, true).then(cx.word(&inside, p, false)),
                            cx.word(&inside, p, false).then(cx.word(&outside, p, true)),
                            &w,
                        ),
                    ),
                    (
                        IdentityKind::ExchangeInside,
                        cx.exchange_gap(
                            cx.word(&inside, p, false).then(cx.word(&[k], p, false)),
                            cx.word(&[k], p, false).then(cx.word(&inside, p, false)),
                            &w_next,
                        ),
                    ),
                ];
                for (kind, gap) in gaps {
                    checks.push(IdentityCheck { kind, subset: s, operator: k, prefix: k, power: p, gap });
                }
            }
        }
    }

    let worst_of = |kinds: &[IdentityKind]| {
        checks.iter().filter(|c| kinds.contains(&c.kind)).map(|c| c.gap).fold(0.0, f64::max)
    };
    Ok(WanderingReport {
        invariance_worst: worst_of(&[IdentityKind::ForwardInvariance, IdentityKind::AdjointInvariance]),
        difference_worst: worst_of(&[IdentityKind::WanderingDifference]),
        exchange_worst: worst_of(&[
            IdentityKind::ExchangeOutside,
            IdentityKind::ExchangeShifts,
            IdentityKind::ExchangeAdjoint,
            IdentityKind::ExchangeInside,
        ]),
        hypotheses_satisfied,
        checks,
    })
}
