use censorlab::censors::{
    cq_censor_channel, cq_generators, dephasing_channel, diagonal_generators,
    informationally_complete_states, verify_resource_destroying, CensorSpec,
};
use censorlab::channels::{apply, fixed_point_distance};
use censorlab::protocol::{
    breakability_analysis, run_scenario, BreakabilityStatus, CompositeKind, Party, Scenario,
};
use censorlab::qmath::{
    max_entangled, Complex64, ComplexMatrix, DensityOperator, DimProfile, SeededStream,
};
use censorlab::resources::{
    affine_hull_membership, convex_hull_membership, membership, substitute, FreeSetOracle,
    GeneratorSet, Verdict, HULL_TOL,
};
use proptest::prelude::*;

fn profile(dims: &[usize]) -> DimProfile {
    DimProfile::new(dims.to_vec()).unwrap()
}

fn pure_product(a: usize, b: usize) -> DensityOperator {
    let mut v = vec![Complex64::new(0.0, 0.0); 4];
    v[2 * a + b] = Complex64::new(1.0, 0.0);
    DensityOperator::pure(&v, profile(&[2, 2])).unwrap()
}

#[test]
fn convex_hull_is_inside_affine_hull() {
    let gens = GeneratorSet::new(informationally_complete_states(2).unwrap()).unwrap();
    let mut s = SeededStream::new(11);
    for _ in 0..200 {
        let rho = s.ginibre_state(&profile(&[2]));
        let convex = convex_hull_membership(&rho, &gens, HULL_TOL).unwrap();
        let affine = affine_hull_membership(&rho, &gens, HULL_TOL).unwrap();
        if convex.is_member() {
            assert!(affine.is_member());
        }
        // IC generators span everything affinely.
        assert!(affine.is_member());
    }
}

#[test]
fn hull_certificates_reverify_by_substitution() {
    let gens = diagonal_generators(3).unwrap();
    let mut s = SeededStream::new(12);
    for _ in 0..100 {
        let w = s.probabilities(3);
        let rho = DensityOperator::new(ComplexMatrix::from_diagonal(&w), profile(&[3])).unwrap();
        let v = convex_hull_membership(&rho, &gens, HULL_TOL).unwrap();
        let coeffs = match v.certificate {
            censorlab::resources::Certificate::HullCoefficients { coefficients, .. } => {
                coefficients
            }
            other => panic!("unexpected certificate {other:?}"),
        };
        let (diff, sum) = substitute(&rho, &gens, &coeffs);
        assert!(diff <= 1e-8 && sum <= 1e-8);
        assert!(coeffs.iter().all(|&c| c >= -1e-12));
    }
}

#[test]
fn cq_fixed_set_contains_entangled_states() {
    // Classical registers in basis states and a Bell pair across Y₁Y₂,
    // in the order X₁ Y₁ X₂ Y₂.
    let cq = cq_censor_channel(2, 2).unwrap();
    let local = censorlab::channels::tensor_channels(&[cq.clone(), cq]).unwrap();
    let phi = max_entangled(2).unwrap();
    let mut amp = vec![Complex64::new(0.0, 0.0); 16];
    for y in 0..2 {
        amp[4 * y + 2 + y] = Complex64::new(1.0, 0.0);
    }
    let state = DensityOperator::pure(&amp, profile(&[2, 2, 2, 2])).unwrap();
    assert!(fixed_point_distance(&local, &state).unwrap() <= 1e-12);
    let sep = FreeSetOracle::separable_ppt(profile(&[4, 4])).unwrap();
    let joint = state.with_profile(profile(&[4, 4])).unwrap();
    assert_eq!(
        membership(&sep, &joint).unwrap().verdict,
        Verdict::NonMember
    );
    // The two-qubit Bell state is a non-member of the bipartite free set as well.
    let sep2 = FreeSetOracle::separable_ppt(profile(&[2, 2])).unwrap();
    let bell = phi.with_profile(profile(&[2, 2])).unwrap();
    assert_eq!(
        membership(&sep2, &bell).unwrap().verdict,
        Verdict::NonMember
    );
}

#[test]
fn cq_censor_is_not_resource_destroying_for_separable_states() {
    let cq = cq_censor_channel(2, 2).unwrap();
    let free = FreeSetOracle::separable_ppt(profile(&[2, 2])).unwrap();
    // Outputs are cq states, which are separable, so the censor passes here.
    let report = verify_resource_destroying(&cq, &free, 50, 0).unwrap();
    assert!(report.pass, "{report:?}");
    // The same censor fails as soon as the free set is incoherence.
    let inc = FreeSetOracle::incoherent(4).unwrap();
    let report = verify_resource_destroying(&cq, &inc, 10, 0).unwrap();
    assert!(!report.pass);
}

#[test]
fn product_of_free_states_is_free() {
    let inc = FreeSetOracle::incoherent(2).unwrap();
    let comp = FreeSetOracle::affine_composite(vec![inc.clone(), inc]).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert!(membership(&comp, &pure_product(a, b)).unwrap().is_member());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dephased_states_are_incoherent(d in 2usize..6, seed in any::<u64>()) {
        let rho = SeededStream::new(seed).ginibre_state(&profile(&[d]));
        let out = apply(&dephasing_channel(d).unwrap(), &rho).unwrap();
        let oracle = FreeSetOracle::incoherent(d).unwrap();
        prop_assert!(membership(&oracle, &out).unwrap().is_member());
    }

    #[test]
    fn cq_outputs_are_classical_quantum(seed in any::<u64>()) {
        let rho = SeededStream::new(seed).ginibre_state(&profile(&[2, 2]));
        let out = apply(&cq_censor_channel(2, 2).unwrap(), &rho).unwrap();
        let oracle = FreeSetOracle::classical_quantum(2, 2).unwrap();
        prop_assert!(membership(&oracle, &out).unwrap().is_member());
    }

    #[test]
    fn authorized_inputs_pass_unaltered(seed in any::<u64>(), n in 1usize..4) {
        // Convex mixtures of product generators are fixed points of the product censor.
        let spec = CensorSpec::Dephasing { dim: 2 };
        let parties: Vec<Party> = (0..n).map(|i| Party::from_spec(format!("P{i}"), &spec).unwrap()).collect();
        let mut s = SeededStream::new(seed);
        let w = s.probabilities(1 << n);
        let input = DensityOperator::new(ComplexMatrix::from_diagonal(&w), profile(&vec![2; n])).unwrap();
        let scenario = Scenario::with_composite(parties, input, CompositeKind::Affine).unwrap();
        let t = run_scenario(&scenario).unwrap();
        prop_assert!(t.transmitted_unaltered);
        prop_assert!(t.input_output_distance <= 1e-12);
    }
}

#[test]
fn cq_product_is_breakable_and_dephasing_product_is_not() {
    let cq = CensorSpec::CqCensor { x_dim: 2, y_dim: 2 };
    let parties: Vec<Party> = (0..2)
        .map(|i| Party::from_spec(format!("P{i}"), &cq).unwrap())
        .collect();
    let input = DensityOperator::maximally_mixed(profile(&[2, 2, 2, 2]));
    let s = Scenario::with_composite(parties, input.clone(), CompositeKind::Convex).unwrap();
    let v = breakability_analysis(&s).unwrap();
    assert_eq!(v.status, BreakabilityStatus::BrokenWitness);
    assert_eq!(v.fixed_dimension, 64);

    let deph = CensorSpec::Dephasing { dim: 4 };
    let parties: Vec<Party> = (0..2)
        .map(|i| Party::from_spec(format!("P{i}"), &deph).unwrap())
        .collect();
    let s = Scenario::with_composite(
        parties,
        input.with_profile(profile(&[4, 4])).unwrap(),
        CompositeKind::Affine,
    )
    .unwrap();
    assert_eq!(
        breakability_analysis(&s).unwrap().status,
        BreakabilityStatus::UnbreakableProved
    );
}

#[test]
fn cq_generators_are_fixed_points() {
    let cq = cq_censor_channel(3, 2).unwrap();
    for g in cq_generators(3, 2).unwrap().states() {
        assert!(fixed_point_distance(&cq, g).unwrap() <= 1e-12);
    }
}
