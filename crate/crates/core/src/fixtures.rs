//! Ready-made operator tuples.

use crate::lattice::{AxisKind, Block, Lattice};
use crate::operator::{OperatorKind, StructuredOperator, WeightRule};

/// On `l2(Z+)`: the unweighted shift and the shift with weights
/// `exp(2 pi i k p / q)`. Ranges of products agree, ranges with one
/// adjoint factor do not.
pub fn weighted_shift_pair(numerator: i64, denominator: u64) -> Vec<StructuredOperator> {
    let lattice = Lattice::half_line();
    let weighted = OperatorKind::UnilateralShift { axis: 0, weights: WeightRule::phase(numerator, denominator) };
    vec![
        StructuredOperator::new(OperatorKind::shift(0), &lattice).expect("valid shift"),
        StructuredOperator::new(weighted, &lattice).expect("valid weighted shift"),
    ]
}

/// On `l2(Z+^2)`: `D ⊗ S` with `D e_a = exp(2 pi i a p / q) e_a`, and
/// `S ⊗ I`. Non-commuting, but both equal-range conditions hold.
pub fn hardy_bidisc_pair(numerator: i64, denominator: u64) -> Vec<StructuredOperator> {
    let lattice = Lattice::half_line_power(2);
    let first = OperatorKind::Tensor(vec![
        OperatorKind::DiagonalUnitary { axis: 0, phases: WeightRule::phase(numerator, denominator) },
        OperatorKind::shift(1),
    ]);
    vec![
        StructuredOperator::new(first, &lattice).expect("valid tensor"),
        StructuredOperator::new(OperatorKind::shift(0), &lattice).expect("valid shift"),
    ]
}

/// Lattice with one block per subset of `{0, .., n-1}`: block `mask` has `n`
/// axes, axis `i` a half line when bit `i` is set and a full line otherwise.
pub fn pattern_lattice(n: usize) -> Lattice {
    let blocks = (0..1u32 << n)
        .map(|mask| {
            Block::new(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { AxisKind::HalfLine } else { AxisKind::FullLine })
                    .collect(),
            )
        })
        .collect();
    Lattice::new(blocks).expect("n >= 1")
}

/// `n` isometries on [`pattern_lattice`]: `V_i` shifts axis `i` of every
/// block, unilaterally where that axis is a half line and bilaterally
/// otherwise. Block `mask` is then the joint block on which exactly the
/// operators in `mask` are shifts.
pub fn direct_sum_pattern_tuple(n: usize) -> Vec<StructuredOperator> {
    let lattice = pattern_lattice(n);
    (0..n)
        .map(|i| {
            let parts = (0..1u32 << n)
                .map(|mask| {
                    let weights = WeightRule::phase(i as i64 + 1, 2 * n as u64 + 3);
                    if mask >> i & 1 == 1 {
                        OperatorKind::UnilateralShift { axis: i, weights }
                    } else {
                        OperatorKind::BilateralShift { axis: i, weights }
                    }
                })
                .collect();
            StructuredOperator::new(OperatorKind::DirectSum(parts), &lattice).expect("valid direct sum")
        })
        .collect()
}
