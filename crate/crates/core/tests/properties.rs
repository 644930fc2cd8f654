//! Property tests over the Gaussian machinery and the metrics, with
//! proptest doing the case generation and shrinking.

use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;

use cvcx::gaussian::{GaussianState, SqueezeAxis, SymplecticTransform, TransformSpec};
use cvcx::metrics::{gaussian_fidelity, SingleModeGaussian};

fn arb_axis() -> impl Strategy<Value = SqueezeAxis> {
    prop_oneof![Just(SqueezeAxis::X), Just(SqueezeAxis::Y)]
}

fn arb_spec(n_modes: usize) -> impl Strategy<Value = TransformSpec> {
    let squeezer = (0..n_modes, 0.0..2.0f64, arb_axis())
        .prop_map(|(mode, r, axis)| TransformSpec::Squeezer { mode, r, axis });
    let rotation = (0..n_modes, -3.14..3.14f64)
        .prop_map(|(mode, theta)| TransformSpec::Rotation { mode, theta });
    let beamsplitter = (0..n_modes, 1..n_modes.max(2), -3.14..3.14f64, any::<bool>()).prop_map(
        move |(a, offset, phi, flip)| {
            let b = (a + offset) % n_modes;
            let sign = if flip { -1.0 } else { 1.0 };
            TransformSpec::Beamsplitter {
                mode_a: a,
                mode_b: if b == a { (a + 1) % n_modes } else { b },
                mix: [
                    [phi.cos(), phi.sin()],
                    [-sign * phi.sin(), sign * phi.cos()],
                ],
            }
        },
    );
    let permutation = Just(()).prop_perturb(move |_, mut rng| {
        let mut perm: Vec<usize> = (0..n_modes).collect();
        for i in (1..perm.len()).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        TransformSpec::Permutation(perm)
    });
    let displacement = proptest::collection::vec(-3.0..3.0f64, 2 * n_modes)
        .prop_map(TransformSpec::Displacement);
    if n_modes >= 2 {
        prop_oneof![squeezer, rotation, beamsplitter, permutation, displacement].boxed()
    } else {
        prop_oneof![squeezer, rotation, displacement].boxed()
    }
}

fn arb_pipeline() -> impl Strategy<Value = (usize, Vec<TransformSpec>)> {
    (2usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(arb_spec(n), 1..6).prop_map(move |specs| (n, specs))
    })
}

proptest! {
    #[test]
    fn constructed_transforms_satisfy_the_symplectic_invariant(
        (n_modes, specs) in arb_pipeline()
    ) {
        for spec in &specs {
            let t = SymplecticTransform::make(n_modes, spec).unwrap();
            prop_assert!(t.symplectic_defect() <= 1e-12);
        }
    }

    #[test]
    fn pipelines_preserve_state_invariants_and_purity(
        (n_modes, specs) in arb_pipeline()
    ) {
        let mut state = GaussianState::vacuum(n_modes).unwrap();
        for spec in &specs {
            state = state.apply(&SymplecticTransform::make(n_modes, spec).unwrap()).unwrap();
        }
        prop_assert!(state.validate().is_ok());
        // vacuum is pure; dets stay at 1 through any symplectic pipeline
        prop_assert!((state.purity_det() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn composition_equals_sequential_application(
        (n_modes, specs) in arb_pipeline()
    ) {
        let mut state = GaussianState::vacuum(n_modes).unwrap();
        let mut composed = SymplecticTransform::identity(n_modes);
        for spec in &specs {
            let t = SymplecticTransform::make(n_modes, spec).unwrap();
            state = state.apply(&t).unwrap();
            composed = composed.then(&t);
        }
        let direct = GaussianState::vacuum(n_modes).unwrap().apply(&composed).unwrap();
        prop_assert!((state.cov() - direct.cov()).abs().max() < 1e-12);
        prop_assert!((state.mean() - direct.mean()).abs().max() < 1e-12);
    }

    #[test]
    fn homodyne_conditional_covariance_ignores_the_outcome(
        (n_modes, specs) in arb_pipeline(),
        mode_pick in any::<prop::sample::Index>(),
        angle in -3.14..3.14f64,
        outcome_a in -5.0..5.0f64,
        outcome_b in -5.0..5.0f64,
    ) {
        let mut state = GaussianState::vacuum(n_modes).unwrap();
        for spec in &specs {
            state = state.apply(&SymplecticTransform::make(n_modes, spec).unwrap()).unwrap();
        }
        let mode = mode_pick.index(n_modes);
        let a = state.homodyne_condition(mode, angle, outcome_a).unwrap();
        let b = state.homodyne_condition(mode, angle, outcome_b).unwrap();
        prop_assert!((a.cov() - b.cov()).abs().max() < 1e-12);
        prop_assert!(a.validate().is_ok());
    }

    #[test]
    fn marginals_of_valid_states_are_valid(
        (n_modes, specs) in arb_pipeline(),
        keep_pick in any::<prop::sample::Index>(),
    ) {
        let mut state = GaussianState::vacuum(n_modes).unwrap();
        for spec in &specs {
            state = state.apply(&SymplecticTransform::make(n_modes, spec).unwrap()).unwrap();
        }
        let keep = keep_pick.index(n_modes);
        let marg = state.marginal(&[keep]).unwrap();
        prop_assert!(marg.validate().is_ok());
    }

    #[test]
    fn fidelity_stays_in_bounds_and_symmetric(
        a1 in 1.0..5.0f64, ratio1 in 1.0..4.0f64, theta1 in -3.14..3.14f64,
        a2 in 1.0..5.0f64, ratio2 in 1.0..4.0f64, theta2 in -3.14..3.14f64,
        mx in -3.0..3.0f64, my in -3.0..3.0f64,
    ) {
        let make = |a: f64, ratio: f64, theta: f64, mean: Vector2<f64>| {
            let b = ratio / a; // a·b = ratio ≥ 1
            let (c, s) = (theta.cos(), theta.sin());
            let rot = Matrix2::new(c, -s, s, c);
            let cov = rot * Matrix2::new(a, 0.0, 0.0, b) * rot.transpose();
            SingleModeGaussian::new((cov + cov.transpose()) * 0.5, mean).unwrap()
        };
        let s1 = make(a1, ratio1, theta1, Vector2::zeros());
        let s2 = make(a2, ratio2, theta2, Vector2::new(mx, my));
        let f12 = gaussian_fidelity(&s1, &s2).unwrap();
        let f21 = gaussian_fidelity(&s2, &s1).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f12), "F = {f12}");
        prop_assert!((f12 - f21).abs() < 1e-12);
        let f11 = gaussian_fidelity(&s1, &s1).unwrap();
        prop_assert!((f11 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn heisenberg_variance_invariant_under_label_permutation(
        coeffs in proptest::collection::vec(-3.0..3.0f64, 12),
        seed in any::<u64>(),
    ) {
        use cvcx::heisenberg::{NoiseLabel, QuadratureCombo};
        use rand::{seq::SliceRandom, SeedableRng};
        let assemble = |labels: &[NoiseLabel]| {
            let mut acc = QuadratureCombo::zero();
            for (&label, &c) in labels.iter().zip(&coeffs) {
                acc = acc.add(&QuadratureCombo::scaled_label(label, c));
            }
            acc
        };
        let labels = NoiseLabel::all();
        let mut shuffled = labels;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        shuffled.shuffle(&mut rng);
        let combo = assemble(&labels);
        let permuted = assemble(&shuffled);
        prop_assert!((combo.variance() - permuted.variance()).abs() < 1e-12);
    }
}
