use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wold_core::*;

const TOL: f64 = 1e-10;

fn e(k: i64) -> SparseVector {
    SparseVector::basis(LatticePoint::at(&[k]))
}

fn window(depth: u32) -> Window {
    Window::new(&Lattice::half_line(), depth)
}

fn random_vector(rng: &mut ChaCha8Rng, len: i64) -> SparseVector {
    (0..len)
        .map(|k| (LatticePoint::at(&[k]), C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect()
}

fn combination(rng: &mut ChaCha8Rng, of: &[SparseVector]) -> SparseVector {
    let mut v = SparseVector::zero();
    for b in of {
        v.axpy(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), b);
    }
    v
}

/// Dense projector onto the span of an orthonormal basis, over points `0..n`.
fn dense_projector(s: &SubspaceBasis, n: usize) -> DMatrix<C64> {
    let q = DMatrix::from_fn(n, s.dim(), |i, j| s.vectors()[j].get(&LatticePoint::at(&[i as i64])));
    &q * q.adjoint()
}

#[test]
fn rank_of_dependent_family_matches_gram_eigenvalues() {
    let mut a = e(0);
    a.axpy(C64::new(1.0, 0.0), &e(1));
    let mut b = e(0);
    b.axpy(C64::new(-1.0, 0.0), &e(1));
    let family = vec![a, b, e(0)];
    let gram = DMatrix::from_fn(3, 3, |i, j| family[i].inner(&family[j]));
    let rank = gram.symmetric_eigenvalues().iter().filter(|&&l| l > TOL).count();
    let s = orthonormalize(&family, &window(4), TOL);
    assert_eq!(rank, 2);
    assert_eq!(s.dim(), rank);
}

#[test]
fn complement_of_shifted_window_is_the_vacuum() {
    let l = Lattice::half_line();
    let w = Window::new(&l, 4);
    let s = StructuredOperator::new(OperatorKind::shift(0), &l).unwrap();
    let a = SubspaceBasis::full(&w, TOL);
    let b = image_within(&Word::power(&s, 1), &a, &w, TOL);
    let c = complement_within(&a, &b).unwrap();

    // kernel of the 5x5 window matrix of S*, which has ones on the superdiagonal
    let adjoint = DMatrix::from_fn(5, 5, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let svd = adjoint.clone().svd(false, true);
    let v_t = svd.v_t.unwrap();
    let kernel: Vec<SparseVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= TOL)
        .map(|(r, _)| (0..5).map(|k| (LatticePoint::at(&[k as i64]), v_t[(r, k)].conj())).collect())
        .collect();
    let oracle = orthonormalize(&kernel, &w, TOL);
    assert_eq!(oracle.dim(), 1);
    assert!(principal_angle_gap(&c, &oracle) <= 10.0 * TOL);
    assert!(principal_angle_gap(&c, &SubspaceBasis::coordinate([LatticePoint::at(&[0])], &w, TOL)) <= 10.0 * TOL);
}

#[test]
fn gap_of_line_at_forty_five_degrees() {
    let w = window(3);
    let mut d = e(0);
    d.axpy(C64::new(1.0, 0.0), &e(1));
    let a = orthonormalize(&[e(0)], &w, TOL);
    let b = orthonormalize(&[d.scaled(C64::new(0.5f64.sqrt(), 0.0))], &w, TOL);
    // explicit plane geometry: the distance from e0 to the diagonal is sin(pi/4)
    let expected = (std::f64::consts::PI / 4.0).sin();
    assert!((principal_angle_gap(&a, &b) - expected).abs() <= 10.0 * TOL);
}

#[test]
fn gap_matches_dense_projector_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = window(5);
    for _ in 0..20 {
        let a = orthonormalize(&[random_vector(&mut rng, 6), random_vector(&mut rng, 6)], &w, TOL);
        let b = orthonormalize(&[random_vector(&mut rng, 6), random_vector(&mut rng, 6)], &w, TOL);
        let diff = dense_projector(&a, 6) - dense_projector(&b, 6);
        let oracle = diff.singular_values().max();
        assert!((principal_angle_gap(&a, &b) - oracle).abs() < 1e-12);
    }
}

#[test]
fn complement_requires_containment() {
    let w = window(3);
    let a = orthonormalize(&[e(0), e(1)], &w, TOL);
    let b = orthonormalize(&[e(2)], &w, TOL);
    match complement_within(&a, &b) {
        Err(Error::NotASubspace { deviation }) => assert!((deviation - 1.0).abs() < 1e-12),
        other => panic!("expected NotASubspace, got {other:?}"),
    }
}

#[test]
fn deterministic_output_order() {
    let w = window(5);
    let a = orthonormalize(&[e(3), e(1), e(4)], &w, TOL);
    assert_eq!(a.vectors(), &[e(3), e(1), e(4)]);
    let b = orthonormalize(&[e(4), e(1), e(3)], &w, TOL);
    let i = intersect(&a, &b).unwrap();
    let dominant: Vec<LatticePoint> = i.vectors().iter().map(|v| v.dominant().unwrap().0.clone()).collect();
    let mut sorted = dominant.clone();
    sorted.sort();
    assert_eq!(dominant, sorted);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn span_contains_every_input(seed in any::<u64>(), count in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family: Vec<SparseVector> = (0..count).map(|_| random_vector(&mut rng, 5)).collect();
        let s = orthonormalize(&family, &window(4), TOL);
        prop_assert!(s.gram_deviation() <= 10.0 * TOL);
        for f in &family {
            prop_assert!(s.distance(f) <= TOL * f.norm().max(1.0));
        }
    }

    #[test]
    fn intersection_and_sum_dimensions_add_up(seed in any::<u64>(), shared in 0usize..3, extra_a in 0usize..3, extra_b in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = window(7);
        let common: Vec<SparseVector> = (0..shared).map(|_| random_vector(&mut rng, 8)).collect();
        let mut fa = common.clone();
        fa.extend((0..extra_a).map(|_| random_vector(&mut rng, 8)));
        let mut fb = common;
        fb.extend((0..extra_b).map(|_| random_vector(&mut rng, 8)));
        let a = orthonormalize(&fa, &w, TOL);
        let b = orthonormalize(&fb, &w, TOL);
        let i = intersect(&a, &b).unwrap();
        let s = sum(&a, &b).unwrap();
        prop_assert_eq!(i.dim() + s.dim(), a.dim() + b.dim());
        prop_assert_eq!(i.dim(), shared);
    }

    #[test]
    fn intersection_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = window(5);
        let common = random_vector(&mut rng, 6);
        let a = orthonormalize(&[common.clone(), random_vector(&mut rng, 6), random_vector(&mut rng, 6)], &w, TOL);
        let b = orthonormalize(&[random_vector(&mut rng, 6), common], &w, TOL);
        let ab = intersect(&a, &b).unwrap();
        let ba = intersect(&b, &a).unwrap();
        prop_assert!(principal_angle_gap(&ab, &ba) <= 10.0 * TOL);
    }

    #[test]
    fn double_complement_returns_the_subspace(seed in any::<u64>(), dim_a in 2usize..5, dim_b in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = window(6);
        let a = orthonormalize(&(0..dim_a).map(|_| random_vector(&mut rng, 7)).collect::<Vec<_>>(), &w, TOL);
        let fb: Vec<SparseVector> = (0..dim_b.min(dim_a)).map(|_| combination(&mut rng, a.vectors())).collect();
        let b = orthonormalize(&fb, &w, TOL);
        let c = complement_within(&a, &b).unwrap();
        prop_assert_eq!(c.dim(), a.dim() - b.dim());
        let back = complement_within(&a, &c).unwrap();
        prop_assert!(principal_angle_gap(&back, &b) <= 10.0 * TOL);
    }

    #[test]
    fn projection_is_linear_and_idempotent(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = window(5);
        let s = orthonormalize(&[random_vector(&mut rng, 6), random_vector(&mut rng, 6)], &w, TOL);
        let (u, v) = (random_vector(&mut rng, 6), random_vector(&mut rng, 6));
        let alpha = C64::new(re, im);
        let beta = C64::new(im, -re);
        let mut mix = u.scaled(alpha);
        mix.axpy(beta, &v);
        let mut expected = project(&u, &s).scaled(alpha);
        expected.axpy(beta, &project(&v, &s));
        let bound = 10.0 * TOL * (alpha.norm() * u.norm() + beta.norm() * v.norm());
        prop_assert!(project(&mix, &s).sub(&expected).norm() <= bound);
        let once = project(&u, &s);
        prop_assert!(project(&once, &s).sub(&once).norm() <= 10.0 * TOL * u.norm());
    }
}
