use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wold_core::fixtures::{hardy_bidisc_pair, weighted_shift_pair};
use wold_core::*;

const TOL: f64 = 1e-10;

fn half_line_window(depth: u32) -> Window {
    Window::new(&Lattice::half_line(), depth)
}

#[test]
fn weighted_pair_at_power_one() {
    let pair = weighted_shift_pair(1, 14);
    let r = check_equal_range(&pair, 1, &half_line_window(8), TOL).unwrap();
    assert_eq!(r.plain.verdict, Verdict::Pass);
    assert_eq!(r.starred.verdict, Verdict::Fail);
    assert_eq!(r.checks.len(), 1);
}

#[test]
fn weighted_pair_fails_starred_with_an_explicit_witness() {
    let pair = weighted_shift_pair(1, 14);
    let w = half_line_window(8);
    let r = check_equal_range(&pair, 2, &w, TOL).unwrap();
    assert!(r.plain.worst_gap <= 1e-8);
    assert_eq!(r.starred.verdict, Verdict::Fail);
    let witness = r.starred.witness.clone().unwrap();
    assert!(witness.gap >= 0.5);
    assert!((witness.vector.norm() - 1.0).abs() < 1e-12);

    // the witness lies in one of the two ranges and is far from the other
    let (vi, vj) = (&pair[witness.i], &pair[witness.j]);
    let (x, y) = if witness.reversed {
        (Word::adjoint_power(vj, witness.mj).then(Word::power(vi, witness.mi)), Word::power(vi, witness.mi).then(Word::adjoint_power(vj, witness.mj)))
    } else {
        (Word::adjoint_power(vi, witness.mi).then(Word::power(vj, witness.mj)), Word::power(vj, witness.mj).then(Word::adjoint_power(vi, witness.mi)))
    };
    let rx = range_of_word(&x, &w, TOL).unwrap();
    let ry = range_of_word(&y, &w, TOL).unwrap();
    let (dx, dy) = (rx.distance(&witness.vector), ry.distance(&witness.vector));
    assert!(dx.min(dy) <= 1e-12);
    assert!((dx.max(dy) - witness.gap).abs() <= 1e-12);

    let flags = &r.commutation[0];
    assert!(!flags.commuting && !flags.doubly_commuting);
    assert!(r.coherent);
}

#[test]
fn bidisc_pair_passes_both_conditions_without_commuting() {
    let pair = hardy_bidisc_pair(1, 10);
    let w = Window::new(&Lattice::half_line_power(2), 6);
    let r = check_equal_range(&pair, 2, &w, TOL).unwrap();
    assert!(r.passes());
    assert!(r.worst_gap() <= 1e-8);
    assert_eq!(r.checks.len(), 4);
    assert!(r.starred.witness.is_none());
    assert!(!r.commuting());
    assert!(r.coherent);
}

#[test]
fn star_equivalence_on_the_bidisc_pair() {
    let pair = hardy_bidisc_pair(1, 10);
    let w = Window::new(&Lattice::half_line_power(2), 6);
    let agreement = check_star_equivalence(&pair, 2, &w, TOL).unwrap();
    assert_eq!(agreement.len(), 1);
    assert_eq!(agreement[0].forward, Verdict::Pass);
    assert_eq!(agreement[0].backward, Verdict::Pass);
    assert!(agreement[0].agree);
}

#[test]
fn star_equivalence_on_the_weighted_pair() {
    let pair = weighted_shift_pair(1, 14);
    let agreement = check_star_equivalence(&pair, 2, &half_line_window(6), TOL).unwrap();
    assert_eq!(agreement[0].forward, Verdict::Fail);
    assert_eq!(agreement[0].backward, Verdict::Fail);
    assert!(agreement[0].agree);
}

#[test]
fn star_equivalence_on_bilateral_shifts() {
    let l = Lattice::full_line();
    let a = StructuredOperator::new(OperatorKind::bilateral(0), &l).unwrap();
    let b = StructuredOperator::new(OperatorKind::BilateralShift { axis: 0, weights: WeightRule::phase(2, 11) }, &l).unwrap();
    let agreement = check_star_equivalence(&[a, b], 2, &Window::new(&l, 5), TOL).unwrap();
    assert!(agreement[0].forward.is_pass() && agreement[0].backward.is_pass() && agreement[0].agree);
}

#[test]
fn commutation_flags() {
    let l = Lattice::half_line_power(2);
    let a = StructuredOperator::new(OperatorKind::shift(0), &l).unwrap();
    let b = StructuredOperator::new(OperatorKind::shift(1), &l).unwrap();
    let flags = classify_commutation(&[a, b], &Window::new(&l, 5), TOL);
    assert!(flags[0].commuting && flags[0].doubly_commuting);
    assert_eq!(flags[0].commutator, 0.0);

    let weighted = classify_commutation(&weighted_shift_pair(1, 14), &half_line_window(8), TOL);
    assert!(!weighted[0].commuting && !weighted[0].doubly_commuting);

    let bidisc = classify_commutation(&hardy_bidisc_pair(1, 10), &Window::new(&Lattice::half_line_power(2), 6), TOL);
    assert!(!bidisc[0].commuting);
    // |r_1 - 1| = 2 sin(pi/10) is the commutator norm on the window
    assert!((bidisc[0].commutator - 2.0 * (std::f64::consts::PI / 10.0).sin()).abs() < 1e-12);
}

#[test]
fn failures_persist_as_the_window_grows() {
    let pair = weighted_shift_pair(1, 14);
    let mut previous = 0.0;
    for depth in 4..=9 {
        let r = check_equal_range(&pair, 2, &half_line_window(depth), TOL).unwrap();
        assert_eq!(r.starred.verdict, Verdict::Fail);
        assert!(r.starred.worst_gap >= previous - 10.0 * TOL);
        previous = r.starred.worst_gap;
    }
}

#[test]
fn relabeling_permutes_the_report() {
    let pair = hardy_bidisc_pair(1, 10);
    let swapped = [pair[1].clone(), pair[0].clone()];
    let w = Window::new(&Lattice::half_line_power(2), 5);
    let r = check_equal_range(&pair, 2, &w, TOL).unwrap();
    let s = check_equal_range(&swapped, 2, &w, TOL).unwrap();
    assert_eq!(r.plain.verdict, s.plain.verdict);
    assert_eq!(r.starred.verdict, s.starred.verdict);
    for c in &r.checks {
        let d = s.checks.iter().find(|d| d.mi == c.mj && d.mj == c.mi).unwrap();
        assert!((c.plain.gap - d.plain.gap).abs() <= 10.0 * TOL);
        // the two starred directions trade places under the swap
        assert!((c.starred.gap - d.starred_reversed.gap).abs() <= 10.0 * TOL);
        assert!((c.starred_reversed.gap - d.starred.gap).abs() <= 10.0 * TOL);
    }

    let weighted = weighted_shift_pair(1, 14);
    let back = [weighted[1].clone(), weighted[0].clone()];
    let w = half_line_window(7);
    let a = check_equal_range(&weighted, 2, &w, TOL).unwrap();
    let b = check_equal_range(&back, 2, &w, TOL).unwrap();
    assert_eq!((a.plain.verdict, a.starred.verdict), (b.plain.verdict, b.starred.verdict));
}

#[test]
fn three_factor_ranges_are_cyclic_for_passing_tuples() {
    let l = Lattice::half_line_power(3);
    let tuple: Vec<StructuredOperator> = (0..3)
        .map(|i| StructuredOperator::new(OperatorKind::UnilateralShift { axis: i, weights: WeightRule::phase(i as i64 + 1, 7) }, &l).unwrap())
        .collect();
    let w = Window::new(&l, 4);
    assert!(check_equal_range(&tuple, 2, &w, TOL).unwrap().passes());
    for powers in [[1, 1, 1], [2, 1, 1], [1, 2, 3]] {
        assert!(cyclic_range_gap(&tuple, &powers, &w, TOL).unwrap() <= TOL);
    }
    assert!(cyclic_range_gap(&tuple, &[1, 1], &w, TOL).is_err());
}

/// A random weighted monomial isometry on `Z+ x Z`.
fn random_operator(rng: &mut ChaCha8Rng) -> OperatorKind {
    let phase = |rng: &mut ChaCha8Rng| WeightRule::phase(rng.gen_range(-5..=5), rng.gen_range(2..=12));
    match rng.gen_range(0..5) {
        0 => OperatorKind::UnilateralShift { axis: 0, weights: phase(rng) },
        1 => OperatorKind::BilateralShift { axis: 1, weights: phase(rng) },
        2 => OperatorKind::Tensor(vec![
            OperatorKind::DiagonalUnitary { axis: 0, phases: phase(rng) },
            OperatorKind::BilateralShift { axis: 1, weights: phase(rng) },
        ]),
        3 => OperatorKind::Tensor(vec![
            OperatorKind::UnilateralShift { axis: 0, weights: phase(rng) },
            OperatorKind::DiagonalUnitary { axis: 1, phases: phase(rng) },
        ]),
        _ => OperatorKind::Compose(vec![
            OperatorKind::UnilateralShift { axis: 0, weights: phase(rng) },
            OperatorKind::UnilateralShift { axis: 0, weights: phase(rng) },
        ]),
    }
}

fn mixed_lattice() -> Lattice {
    Lattice::single(vec![AxisKind::HalfLine, AxisKind::FullLine])
}

#[test]
fn range_equality_and_projection_equality_agree_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let l = mixed_lattice();
    let w = Window::new(&l, 3);
    let (mut equal, mut unequal) = (0, 0);
    for _ in 0..100 {
        let a = StructuredOperator::new(random_operator(&mut rng), &l).unwrap();
        let b = StructuredOperator::new(random_operator(&mut rng), &l).unwrap();
        let r = check_equal_range(&[a, b], 2, &w, TOL).unwrap();
        assert_eq!(r.coherence_factor, 100.0);
        assert!(r.coherent);
        for c in &r.checks {
            for cmp in [&c.plain, &c.starred, &c.starred_reversed] {
                if cmp.passes(TOL) {
                    equal += 1;
                } else {
                    unequal += 1;
                }
            }
        }
    }
    assert!(equal > 0 && unequal > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn worst_gap_is_the_maximum_over_checks(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = mixed_lattice();
        let a = StructuredOperator::new(random_operator(&mut rng), &l).unwrap();
        let b = StructuredOperator::new(random_operator(&mut rng), &l).unwrap();
        let r = check_equal_range(&[a, b], 2, &Window::new(&l, 3), TOL).unwrap();
        let plain = r.checks.iter().map(|c| c.plain.gap).fold(0.0, f64::max);
        let starred = r.checks.iter().map(|c| c.starred.gap.max(c.starred_reversed.gap)).fold(0.0, f64::max);
        prop_assert_eq!(r.plain.worst_gap, plain);
        prop_assert_eq!(r.starred.worst_gap, starred);
        prop_assert_eq!(r.plain.verdict.is_pass(), plain <= TOL);
        prop_assert_eq!(r.starred.verdict.is_pass(), starred <= TOL);
        prop_assert_eq!(r.plain.witness.is_some(), !r.plain.verdict.is_pass());
    }
}
