use censorlab::qmath::{
    eig_hermitian, is_density, kron, partial_trace, partial_transpose_matrix, random_density,
    trace_distance, ComplexMatrix, DensityOperator, DimProfile, SeededStream,
};
use proptest::prelude::*;

fn profile(dims: &[usize]) -> DimProfile {
    DimProfile::new(dims.to_vec()).unwrap()
}

#[test]
fn random_density_is_valid_for_many_seeds() {
    for d in 2..=8 {
        let p = profile(&[d]);
        for seed in 0..1000 {
            let rho = random_density(d, seed).unwrap();
            assert!(
                is_density(rho.matrix(), &p, 1e-9).is_valid(),
                "d = {d}, seed = {seed}"
            );
        }
    }
}

#[test]
fn eigendecomposition_reconstructs() {
    let mut s = SeededStream::new(77);
    for k in 0..100 {
        let d = 1 + k % 16;
        let a = s.hermitian(d);
        let e = eig_hermitian(&a).unwrap();
        assert!(e.reconstruct().max_abs_diff(&a) <= 1e-9, "dimension {d}");
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_is_a_metric(d in 2usize..6, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (random_density(d, a).unwrap(), random_density(d, b).unwrap(), random_density(d, c).unwrap());
        let xy = trace_distance(&x, &y).unwrap();
        let yx = trace_distance(&y, &x).unwrap();
        let yz = trace_distance(&y, &z).unwrap();
        let xz = trace_distance(&x, &z).unwrap();
        prop_assert!((xy - yx).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&xy));
        prop_assert!(xz <= xy + yz + 1e-9);
        prop_assert_eq!(trace_distance(&x, &x).unwrap(), 0.0);
        if x.matrix().max_abs_diff(y.matrix()) > 1e-12 {
            prop_assert!(xy > 0.0);
        }
    }

    #[test]
    fn partial_trace_of_products(da in 2usize..5, db in 2usize..5, a in any::<u64>(), b in any::<u64>()) {
        let rho = random_density(da, a).unwrap();
        let sigma = random_density(db, b).unwrap();
        let joint = rho.tensor(&sigma).unwrap();
        let left = partial_trace(&joint, &[0]).unwrap();
        prop_assert!(left.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
        prop_assert!((left.matrix().trace().re - 1.0).abs() <= 1e-9);
        let right = partial_trace(&joint, &[1]).unwrap();
        prop_assert!(right.matrix().max_abs_diff(sigma.matrix()) <= 1e-12);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(da in 2usize..5, db in 2usize..5, seed in any::<u64>()) {
        let p = profile(&[da, db]);
        let rho = SeededStream::new(seed).ginibre_state(&p);
        let red = partial_trace(&rho, &[0]).unwrap();
        prop_assert!((red.matrix().trace().re - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn partial_transpose_is_an_involution(dims in prop::collection::vec(2usize..4, 2..4), sub in 0usize..3, seed in any::<u64>()) {
        let p = profile(&dims);
        let sub = sub % dims.len();
        let rho = SeededStream::new(seed).ginibre_state(&p);
        let once = partial_transpose_matrix(rho.matrix(), &p, &[sub]).unwrap();
        let twice = partial_transpose_matrix(&once, &p, &[sub]).unwrap();
        prop_assert_eq!(twice, rho.matrix().clone());
    }
}

#[test]
fn subsystem_order_is_big_endian() {
    // |0⟩⟨0| ⊗ |1⟩⟨1| sits at joint index 0·2 + 1 = 1.
    let zero = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
    let one = ComplexMatrix::from_diagonal(&[0.0, 1.0]);
    let joint = DensityOperator::new(kron(&zero, &one), profile(&[2, 2])).unwrap();
    assert_eq!(joint.matrix().get(1, 1).re, 1.0);
    let first = partial_trace(&joint, &[0]).unwrap();
    assert!(first.matrix().max_abs_diff(&zero) == 0.0);
}

#[test]
fn dimension_cap_is_enforced() {
    assert!(DimProfile::new(vec![4, 4, 4]).is_ok());
    assert!(DimProfile::new(vec![4, 4, 5]).is_err());
    assert!(DimProfile::new(vec![]).is_err());
}
