use super::*;
use crate::censors::{
    cq_censor_channel, cq_generators, dephasing_channel, diagonal_generators, CensorSpec,
    TwirlGroup,
};
use crate::channels::{compose, is_fixed_point};
use crate::qmath::{
    eig_hermitian, max_coherent, max_entangled, partial_transpose_matrix, Complex64, ComplexMatrix,
    SeededStream,
};
use crate::resources::{Certificate, Verdict};

fn profile(dims: &[usize]) -> DimProfile {
    DimProfile::new(dims.to_vec()).unwrap()
}

fn parties(spec: &CensorSpec, n: usize) -> Vec<Party> {
    (0..n)
        .map(|i| Party::from_spec(format!("A{}", i + 1), spec).unwrap())
        .collect()
}

fn diag(values: &[f64]) -> DensityOperator {
    DensityOperator::new(
        ComplexMatrix::from_diagonal(values),
        profile(&[values.len()]),
    )
    .unwrap()
}

/// `|0⟩⟨0|_{X₁} ⊗ |1⟩⟨1|_{X₂} ⊗ |φ⁺⟩_{Y₁Y₂}` in the order `X₁ Y₁ X₂ Y₂`.
fn breaking_state() -> DensityOperator {
    let mut amp = vec![Complex64::new(0.0, 0.0); 16];
    for y in 0..2 {
        amp[4 * y + 2 + y] = Complex64::new(1.0, 0.0);
    }
    DensityOperator::pure(&amp, profile(&[2, 2, 2, 2])).unwrap()
}

fn cq_scenario(input: DensityOperator) -> Scenario {
    let spec = CensorSpec::CqCensor { x_dim: 2, y_dim: 2 };
    Scenario::with_composite(parties(&spec, 2), input, CompositeKind::Convex).unwrap()
}

#[test]
fn authorized_product_passes_unaltered() {
    let spec = CensorSpec::Dephasing { dim: 2 };
    let input = diag(&[0.3, 0.7]).tensor(&diag(&[1.0, 0.0])).unwrap();
    let s = Scenario::with_composite(parties(&spec, 2), input, CompositeKind::Affine).unwrap();
    let t = run_scenario(&s).unwrap();
    assert!(t.transmitted_unaltered);
    assert!(t.output_membership.is_member());
    assert_eq!(t.stages.len(), 2);
}

#[test]
fn coherent_input_is_dephased() {
    let spec = CensorSpec::Dephasing { dim: 2 };
    let s = Scenario::with_composite(
        parties(&spec, 1),
        max_coherent(2).unwrap(),
        CompositeKind::Affine,
    )
    .unwrap();
    let t = run_scenario(&s).unwrap();
    assert!(!t.transmitted_unaltered);
    assert!((t.input_output_distance - 0.5).abs() < 1e-12);
    assert!(
        t.final_state()
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
            < 1e-15
    );
    assert!(t.output_membership.is_member());
}

#[test]
fn breaking_state_passes_entangled() {
    let t = run_scenario(&cq_scenario(breaking_state())).unwrap();
    assert!(t.transmitted_unaltered);
    assert!(t.input_output_distance <= 1e-12);
    assert!(t.output_membership.is_non_member());
}

#[test]
fn dephasing_censorship_is_unbreakable() {
    let spec = CensorSpec::Dephasing { dim: 2 };
    for n in 1..=3 {
        let input = DensityOperator::maximally_mixed(profile(&vec![2; n]));
        let s = Scenario::with_composite(parties(&spec, n), input, CompositeKind::Affine).unwrap();
        let v = breakability_analysis(&s).unwrap();
        assert_eq!(v.status, BreakabilityStatus::UnbreakableProved);
        assert_eq!(v.fixed_dimension, 1 << n);
        assert!(matches!(v.evidence, Evidence::LinearContainment { .. }));
    }
}

#[test]
fn twirl_censorship_is_unbreakable() {
    let spec = CensorSpec::Twirl {
        group: TwirlGroup::named("x2").unwrap(),
    };
    for n in 1..=3 {
        let input = DensityOperator::maximally_mixed(profile(&vec![2; n]));
        let s = Scenario::with_composite(parties(&spec, n), input, CompositeKind::Affine).unwrap();
        let v = breakability_analysis(&s).unwrap();
        assert_eq!(v.status, BreakabilityStatus::UnbreakableProved, "n = {n}");
    }
}

#[test]
fn cq_censorship_is_broken_by_the_known_witness() {
    let s = cq_scenario(breaking_state());
    let v = breakability_analysis(&s).unwrap();
    assert_eq!(v.status, BreakabilityStatus::BrokenWitness);
    let Evidence::Witness {
        state, certificate, ..
    } = &v.evidence
    else {
        panic!("{:?}", v.evidence);
    };
    assert!(state.matrix().max_abs_diff(breaking_state().matrix()) < 1e-15);
    assert!(is_fixed_point(&s.product_censor().unwrap(), state, 1e-8).unwrap());
    match certificate.certificate {
        Certificate::PartialTranspose { min_eigenvalue, .. } => {
            assert!((min_eigenvalue + 0.5).abs() < 1e-9)
        }
        ref c => panic!("{c:?}"),
    }
    // Oracle: transposing the receiver-2 registers directly.
    let pt = partial_transpose_matrix(state.matrix(), state.profile(), &[2, 3]).unwrap();
    assert!((eig_hermitian(&pt).unwrap().min() + 0.5).abs() < 1e-9);
}

#[test]
fn sampling_also_finds_a_cq_witness() {
    // The random search alone, without the hard-coded witness.
    let s = cq_scenario(breaking_state());
    let fixed = breakability_analysis(&s).unwrap().fixed_subspace;
    let opts = BreakabilityOptions {
        budget: 64,
        seed: 3,
    };
    let (status, evidence) = breakability::search(&s, &fixed, &opts).unwrap();
    assert_eq!(status, BreakabilityStatus::BrokenWitness, "{evidence:?}");
}

#[test]
fn replacement_censorship_is_unbreakable() {
    let sigma = diag(&[0.3, 0.7]);
    let spec = CensorSpec::Replacement {
        target: sigma.clone(),
    };
    for n in 1..=3 {
        let input = DensityOperator::maximally_mixed(profile(&vec![2; n]));
        let s = Scenario::with_composite(parties(&spec, n), input, CompositeKind::Convex).unwrap();
        let v = breakability_analysis(&s).unwrap();
        assert_eq!(v.status, BreakabilityStatus::UnbreakableProved);
        assert_eq!(v.fixed_dimension, 1);
        let eb = eb_unbreakability_check(&s, &BreakabilityOptions::default()).unwrap();
        assert_eq!(eb.status, EbCheckStatus::UnbreakableProved);
        assert!(eb.consistent);
    }
}

#[test]
fn eb_check_not_applicable_for_cq_censors() {
    let eb = eb_unbreakability_check(
        &cq_scenario(breaking_state()),
        &BreakabilityOptions::default(),
    )
    .unwrap();
    assert_eq!(eb.status, EbCheckStatus::NotApplicable);
    assert_eq!(eb.analysis, BreakabilityStatus::BrokenWitness);
    assert!(eb.consistent);
}

#[test]
fn dephasing_with_separable_composite() {
    let deph = CensorSpec::Dephasing { dim: 2 };
    let ps: Vec<Party> = parties(&deph, 2)
        .into_iter()
        .map(|p| {
            p.with_free_oracle(FreeSetOracle::separable_ppt(profile(&[2])).unwrap())
                .unwrap()
        })
        .collect();
    let s = Scenario::with_composite(ps, max_entangled(2).unwrap(), CompositeKind::Convex).unwrap();
    let v = breakability_analysis(&s).unwrap();
    assert_eq!(v.status, BreakabilityStatus::UnbreakableProved);
    let eb = eb_unbreakability_check(&s, &BreakabilityOptions::default()).unwrap();
    assert_eq!(eb.status, EbCheckStatus::UnbreakableProved);
    assert!(eb.consistent);
}

#[test]
fn mixed_composite_families_are_unsupported() {
    let a = Party::from_spec("A1", &CensorSpec::Dephasing { dim: 2 }).unwrap();
    let b = Party::from_spec(
        "A2",
        &CensorSpec::Twirl {
            group: TwirlGroup::named("z2").unwrap(),
        },
    )
    .unwrap();
    let err = Scenario::with_composite(
        vec![a, b],
        DensityOperator::maximally_mixed(profile(&[2, 2])),
        CompositeKind::Affine,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));
}

#[test]
fn unauthorized_generators_are_rejected() {
    let err = Party::new(
        "A1",
        profile(&[2]),
        dephasing_channel(2).unwrap(),
        GeneratorSet::new(vec![max_coherent(2).unwrap()]).unwrap(),
        FreeSetOracle::incoherent(2).unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn protocol_is_local_on_product_inputs() {
    let spec = CensorSpec::CqCensor { x_dim: 2, y_dim: 2 };
    let mut s = SeededStream::new(5);
    let a = s.ginibre_state(&profile(&[2, 2]));
    let b = s.ginibre_state(&profile(&[2, 2]));
    let joint = run_scenario(&cq_scenario(a.tensor(&b).unwrap())).unwrap();
    let single = |rho: &DensityOperator| {
        let sc = Scenario::with_composite(parties(&spec, 1), rho.clone(), CompositeKind::Convex)
            .unwrap();
        run_scenario(&sc).unwrap().final_state().clone()
    };
    let product = single(&a).tensor(&single(&b)).unwrap();
    assert!(joint.final_state().matrix().max_abs_diff(product.matrix()) < 1e-10);
}

#[test]
fn swap_examples() {
    let swap = swap_channel(2, 2).unwrap();
    let zero = diag(&[1.0, 0.0]);
    let plus = max_coherent(2).unwrap();
    let out = apply(&swap, &zero.tensor(&plus).unwrap()).unwrap();
    assert!(
        out.matrix()
            .max_abs_diff(plus.tensor(&zero).unwrap().matrix())
            < 1e-15
    );
    assert!(swap_channel(2, 3).is_err());

    // Σ_{x,y} p_x ⟨y|σˣ|y⟩ |y⟩⟨y| ⊗ |x⟩⟨x| for p = (1, 0), σ⁰ = |+⟩⟨+|.
    let cq = cq_censor_channel(2, 2).unwrap();
    let both = compose(&cq, &swap).unwrap();
    let out = apply(&both, &zero.tensor(&plus).unwrap()).unwrap();
    let want = ComplexMatrix::from_diagonal(&[0.5, 0.0, 0.5, 0.0]);
    assert!(out.matrix().max_abs_diff(&want) < 1e-15);
}

#[test]
fn commutation_examples() {
    let deph = dephasing_channel(2).unwrap();
    let mut u = ComplexMatrix::identity(2);
    u.set(1, 1, Complex64::from_polar(1.0, 0.7));
    let phase = KrausChannel::unitary(u, profile(&[2])).unwrap();
    let r = commutation_check(&phase, &deph, &diagonal_generators(2).unwrap(), 20).unwrap();
    assert!(r.pass && r.checked == 22);

    let cq = cq_censor_channel(2, 2).unwrap();
    let swap = swap_channel(2, 2).unwrap();
    let r = commutation_check(&swap, &cq, &cq_generators(2, 2).unwrap(), 10).unwrap();
    assert!(!r.pass);
    let w = r
        .witnesses
        .iter()
        .find(|w| w.label == "generator_2")
        .unwrap();
    let want = ComplexMatrix::from_diagonal(&[0.5, 0.0, 0.5, 0.0]);
    assert!(w.censor_after_noise.max_abs_diff(&want) < 1e-10);

    let id = KrausChannel::identity(profile(&[2, 2]));
    assert!(
        commutation_check(&id, &cq, &cq_generators(2, 2).unwrap(), 10)
            .unwrap()
            .pass
    );
}

#[test]
fn nongenerating_examples() {
    let swap = swap_channel(2, 2).unwrap();
    let sep = FreeSetOracle::separable_ppt(profile(&[2, 2])).unwrap();
    assert!(
        nongenerating_check(&swap, &sep, &cq_generators(2, 2).unwrap(), 20)
            .unwrap()
            .pass
    );

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = KrausChannel::unitary(
        ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap(),
        profile(&[2]),
    )
    .unwrap();
    let inc = FreeSetOracle::incoherent(2).unwrap();
    let r = nongenerating_check(&hadamard, &inc, &diagonal_generators(2).unwrap(), 5).unwrap();
    assert!(!r.pass);
    assert_eq!(r.failures[0].label, "generator_0");
    assert!(
        r.failures[0]
            .output
            .max_abs_diff(max_coherent(2).unwrap().matrix())
            < 1e-15
    );
    assert_eq!(r.failures[0].verdict.verdict, Verdict::NonMember);
}

#[test]
fn correction_effect() {
    let deph = dephasing_channel(2).unwrap();
    // Noise mixing in a little coherence: Φ(ρ) = 0.9ρ + 0.1|+⟩⟨+|.
    let plus = max_coherent(2).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut kraus = vec![ComplexMatrix::identity(2).scale_real(0.9f64.sqrt())];
    for j in 0..2 {
        let v = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        let mut e = [Complex64::new(0.0, 0.0); 2];
        e[j] = Complex64::new(1.0, 0.0);
        kraus.push(ComplexMatrix::outer(&v, &e).scale_real(0.1f64.sqrt()));
    }
    let noise = KrausChannel::new(kraus, profile(&[2]), profile(&[2])).unwrap();
    let sigma = diag(&[1.0, 0.0]);
    let out = apply(&noise, &sigma).unwrap();
    assert!(
        out.matrix()
            .max_abs_diff(&(&sigma.matrix().scale_real(0.9) + &plus.matrix().scale_real(0.1)))
            < 1e-15
    );
    let r = correction_effect_probe(&noise, &deph, &sigma).unwrap();
    assert!(r.corrected && r.noisy_distance > 0.0);

    let id = KrausChannel::identity(profile(&[2]));
    let r = correction_effect_probe(&id, &deph, &sigma).unwrap();
    assert_eq!((r.noisy_distance, r.censored_distance), (0.0, 0.0));
    assert!(correction_effect_probe(&id, &deph, &plus).is_err());
}

#[test]
fn rd_noise_transparency() {
    // Free σ through noise then an RD censor arrives as Φ(σ) when Φ keeps
    // free states free.
    let deph = CensorSpec::Dephasing { dim: 2 };
    let flip = KrausChannel::unitary(
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
        profile(&[2]),
    )
    .unwrap();
    let sigma = diag(&[0.2, 0.8]);
    let p = Party::from_spec("A1", &deph)
        .unwrap()
        .with_noise(flip.clone())
        .unwrap();
    let s = Scenario::with_composite(vec![p], sigma.clone(), CompositeKind::Affine).unwrap();
    let t = run_scenario(&s).unwrap();
    assert_eq!(t.stages.len(), 3);
    let expected = apply(&flip, &sigma).unwrap();
    assert!(t.final_state().matrix().max_abs_diff(expected.matrix()) <= 1e-9);
}
