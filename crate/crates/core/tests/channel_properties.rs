use censorlab::censors::{
    cq_censor_channel, dephasing_channel, replacement_channel, twirl_channel, TwirlGroup,
};
use censorlab::channels::{
    apply, choi_of, compose, fixed_point_subspace, is_cptp, is_entanglement_breaking,
    superoperator_of, tensor_channels, EbVerdict, KrausChannel,
};
use censorlab::protocol::swap_channel;
use censorlab::qmath::{
    eig_hermitian, partial_transpose_matrix, random_density, Complex64, ComplexMatrix,
    DensityOperator, DimProfile, SeededStream,
};

fn profile(dims: &[usize]) -> DimProfile {
    DimProfile::new(dims.to_vec()).unwrap()
}

fn channels() -> Vec<(&'static str, KrausChannel)> {
    let sigma = random_density(2, 9).unwrap();
    vec![
        ("identity", KrausChannel::identity(profile(&[2]))),
        ("dephasing2", dephasing_channel(2).unwrap()),
        ("dephasing4", dephasing_channel(4).unwrap()),
        (
            "twirl_pauli",
            twirl_channel(&TwirlGroup::named("pauli1").unwrap()),
        ),
        ("twirl_x2", twirl_channel(&TwirlGroup::named("x2").unwrap())),
        ("cq2x2", cq_censor_channel(2, 2).unwrap()),
        ("cq3x2", cq_censor_channel(3, 2).unwrap()),
        ("replacement", replacement_channel(&sigma).unwrap()),
        ("swap", swap_channel(2, 2).unwrap()),
    ]
}

#[test]
fn channels_preserve_trace_and_hermiticity() {
    for (name, ch) in channels() {
        assert!(is_cptp(&ch, 1e-9).is_cptp, "{name}");
        let mut s = SeededStream::new(1);
        for _ in 0..100 {
            let rho = s.ginibre_state(ch.in_profile());
            let out = ch.apply_operator(rho.matrix());
            assert!((out.trace().re - 1.0).abs() <= 1e-10, "{name}");
            assert!(out.hermitian_deviation() <= 1e-12, "{name}");
        }
    }
}

#[test]
fn superoperator_agrees_with_kraus_action() {
    for (name, ch) in channels() {
        let sup = superoperator_of(&ch).unwrap();
        let mut s = SeededStream::new(2);
        for _ in 0..50 {
            let rho = s.ginibre_state(ch.in_profile());
            let direct = apply(&ch, &rho).unwrap();
            assert!(
                sup.apply(rho.matrix()).max_abs_diff(direct.matrix()) <= 1e-10,
                "{name}"
            );
        }
    }
}

#[test]
fn censors_are_idempotent() {
    for (name, ch) in channels() {
        if name == "identity" || name == "swap" {
            continue;
        }
        let once = superoperator_of(&ch).unwrap();
        let twice = superoperator_of(&compose(&ch, &ch).unwrap()).unwrap();
        assert!(once.distance(&twice).unwrap() <= 1e-9, "{name}");
    }
}

#[test]
fn fixed_space_of_tensor_power_is_tensor_power_of_fixed_space() {
    for (name, ch) in [
        ("dephasing", dephasing_channel(2).unwrap()),
        ("cq", cq_censor_channel(2, 2).unwrap()),
        ("twirl", twirl_channel(&TwirlGroup::named("x2").unwrap())),
    ] {
        let local = fixed_point_subspace(&ch).unwrap();
        let mut power = local.clone();
        let mut product = ch.clone();
        for n in 2..=3 {
            if product.in_dim() * ch.in_dim() > 16 {
                break;
            }
            power = power.tensor(&local);
            product = tensor_channels(&[product, ch.clone()]).unwrap();
            let direct = fixed_point_subspace(&product).unwrap();
            assert_eq!(direct.dimension(), local.dimension().pow(n), "{name}");
            assert!(direct.same_span(&power, 1e-8), "{name} n = {n}");
        }
    }
}

#[test]
fn choi_of_identity_has_negative_partial_transpose() {
    let choi = choi_of(&KrausChannel::identity(profile(&[2]))).unwrap();
    let pt = partial_transpose_matrix(choi.matrix(), choi.profile(), &[1]).unwrap();
    assert!((eig_hermitian(&pt).unwrap().min() + 0.5).abs() < 1e-12);
}

#[test]
fn ppt_choi_in_small_dimension_is_never_inconclusive() {
    // Amplitude damping and depolarizing channels on a qubit.
    let mut s = SeededStream::new(3);
    for _ in 0..50 {
        let g = s.uniform();
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]).unwrap();
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, g.sqrt(), 0.0, 0.0]).unwrap();
        let ch = KrausChannel::new(vec![k0, k1], profile(&[2]), profile(&[2])).unwrap();
        assert_ne!(
            is_entanglement_breaking(&ch).verdict,
            EbVerdict::Inconclusive
        );
    }
    let p: f64 = 0.8;
    let mut kraus = vec![ComplexMatrix::identity(2).scale_real((1.0 - 3.0 * p / 4.0).sqrt())];
    for m in [[0.0, 1.0, 1.0, 0.0], [1.0, 0.0, 0.0, -1.0]] {
        kraus.push(
            ComplexMatrix::from_real(2, 2, &m)
                .unwrap()
                .scale_real((p / 4.0).sqrt()),
        );
    }
    let y = ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap();
    kraus.push(y.scale_real((p / 4.0).sqrt()));
    let depol = KrausChannel::new(kraus, profile(&[2]), profile(&[2])).unwrap();
    // Depolarizing with p ≥ 2/3 breaks entanglement.
    assert_eq!(is_entanglement_breaking(&depol).verdict, EbVerdict::Yes);
}

#[test]
fn replacement_output_is_target() {
    let sigma =
        DensityOperator::new(ComplexMatrix::from_diagonal(&[0.3, 0.7]), profile(&[2])).unwrap();
    let ch = replacement_channel(&sigma).unwrap();
    let out = apply(&ch, &random_density(2, 1).unwrap()).unwrap();
    assert!(out.matrix().max_abs_diff(sigma.matrix()) < 1e-12);
}
