use wold_core::fixtures::{direct_sum_pattern_tuple, hardy_bidisc_pair, pattern_lattice, weighted_shift_pair};
use wold_core::*;

const TOL: f64 = 1e-10;

fn op(kind: OperatorKind, lattice: &Lattice) -> StructuredOperator {
    StructuredOperator::new(kind, lattice).unwrap()
}

#[test]
fn pure_shift_block_reduces() {
    let l = Lattice::half_line();
    let tuple = [op(OperatorKind::shift(0), &l)];
    let d = wold_tuple(&tuple, &Window::new(&l, 8), 8, TOL).unwrap();
    let r = verify_reducing(&tuple, &d);
    assert_eq!(r.checks.len(), 1);
    assert!(r.worst <= 10.0 * TOL);
}

#[test]
fn bidisc_blocks_reduce() {
    let pair = hardy_bidisc_pair(1, 10);
    let d = wold_pair(&pair[0], &pair[1], &Window::new(&Lattice::half_line_power(2), 6), 6, TOL).unwrap();
    let r = verify_reducing(&pair, &d);
    assert_eq!(r.checks.len(), 2);
    assert!(r.worst <= 10.0 * TOL);
}

#[test]
fn corrupted_block_is_detected() {
    let two = Lattice::new(vec![Block::new(vec![AxisKind::FullLine]), Block::new(vec![AxisKind::HalfLine])]).unwrap();
    let tuple = [op(OperatorKind::DirectSum(vec![OperatorKind::bilateral(0), OperatorKind::shift(0)]), &two)];
    let mut d = wold_tuple(&tuple, &Window::new(&two, 4), 4, TOL).unwrap();
    assert!(verify_reducing(&tuple, &d).worst <= 10.0 * TOL);

    // rotate the first shift-block vector by 45 degrees into the unitary block
    let angle = std::f64::consts::FRAC_PI_4;
    let block = &mut d.blocks[1];
    let mut vectors = block.basis.vectors().to_vec();
    let first = vectors[0].dominant().unwrap().0.clone();
    assert_eq!(first, LatticePoint::new(1, &[0]));
    let mut rotated = vectors[0].scaled(C64::new(angle.cos(), 0.0));
    rotated.axpy(C64::new(angle.sin(), 0.0), &SparseVector::basis(LatticePoint::new(0, &[0])));
    vectors[0] = rotated;
    block.basis = orthonormalize(&vectors, &d.interior, TOL);

    let r = verify_reducing(&tuple, &d);
    assert!(r.worst > 0.1);
    // the adjoint moves the corrupted vector to a point outside the block, at distance sin(angle)
    let check = r.checks.iter().find(|c| c.subset == Subset(1)).unwrap();
    assert!((check.adjoint - angle.sin()).abs() < 1e-12);
}

#[test]
fn identities_hold_for_a_doubly_commuting_pair() {
    let l = Lattice::half_line_power(2);
    let tuple = [op(OperatorKind::shift(0), &l), op(OperatorKind::shift(1), &l)];
    let r = verify_wandering_identities(&tuple, &Window::new(&l, 4), TOL).unwrap();
    assert!(r.hypotheses_satisfied);
    assert!(r.worst() <= 10.0 * TOL);
    // two invariance checks and one difference check per (subset, outside operator),
    // four exchange identities per subset of {0} and sampled power
    assert_eq!(r.checks.len(), 4 * 3 + 2 * 4 * SAMPLED_POWERS.len());
}

#[test]
fn identities_hold_for_the_bidisc_pair() {
    let pair = hardy_bidisc_pair(1, 10);
    let r = verify_wandering_identities(&pair, &Window::new(&Lattice::half_line_power(2), 6), TOL).unwrap();
    assert!(r.hypotheses_satisfied);
    assert!(r.invariance_worst <= 10.0 * TOL);
    assert!(r.difference_worst <= 10.0 * TOL);
    assert!(r.exchange_worst <= 10.0 * TOL);
}

#[test]
fn identities_hold_on_the_eight_block_fixture() {
    let tuple = direct_sum_pattern_tuple(3);
    let r = verify_wandering_identities(&tuple, &Window::new(&pattern_lattice(3), 2), TOL).unwrap();
    assert!(r.hypotheses_satisfied);
    assert!(r.worst() <= 10.0 * TOL);
    for kind in [IdentityKind::ExchangeOutside, IdentityKind::ExchangeShifts, IdentityKind::ExchangeAdjoint, IdentityKind::ExchangeInside] {
        assert!(r.checks.iter().any(|c| c.kind == kind && c.prefix == 2));
    }
}

#[test]
fn identities_are_reported_when_the_hypotheses_fail() {
    let pair = weighted_shift_pair(1, 14);
    let r = verify_wandering_identities(&pair, &Window::new(&Lattice::half_line(), 8), TOL).unwrap();
    assert!(!r.hypotheses_satisfied);
    let difference: Vec<&IdentityCheck> = r.checks.iter().filter(|c| c.kind == IdentityKind::WanderingDifference).collect();
    assert_eq!(difference.len(), 4);
    assert!(difference.iter().all(|c| c.gap.is_finite() && (0.0..=1.0 + 1e-12).contains(&c.gap)));
}
