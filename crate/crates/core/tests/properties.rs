use hyper_toffoli::analysis::metrics::{branch_spread, conditional_fidelity};
use hyper_toffoli::circuits::{GateProgram, GateVariant, MeasurementMode};
use hyper_toffoli::elements::{BlockKind, BlockOperator, Element};
use hyper_toffoli::physics::{reflection_cold, reflection_hot, scatter, ReflectionPair, Spin, SystemParams};
use hyper_toffoli::state::{
    Ancilla, DetectorId, Photon, Predicate, ProductInput, QubitAddress, RegisterState, Sink, SpinId, Term,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = SystemParams> {
    (0.0..5.0f64, 0.0..2.0f64, -4.0..4.0f64, -4.0..4.0f64, -2.0..2.0f64, 0.05..4.0f64).prop_map(
        |(g, gamma, dc, dd, wp, kappa)| {
            let mut p = SystemParams::detuned(g, gamma, dc, dd);
            p.omega_p = wp;
            p.kappa = kappa;
            p
        },
    )
}

fn pair_strategy() -> impl Strategy<Value = ReflectionPair> {
    (0.05..3.0f64, 0.0..0.5f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(g, gamma, dc, dd)| SystemParams::detuned(g, gamma, dc, dd).reflection_pair().unwrap())
}

fn photon() -> impl Strategy<Value = Photon> {
    prop::sample::select(Photon::ALL.to_vec())
}

fn spin_id() -> impl Strategy<Value = SpinId> {
    prop::sample::select(SpinId::ALL.to_vec())
}

fn rail_term() -> impl Strategy<Value = Term> {
    (photon(), 0..2usize).prop_map(|(p, v)| Term::bit(QubitAddress::Spatial(p), v))
}

fn mode() -> impl Strategy<Value = Term> {
    prop_oneof![Just(Term::ALWAYS), rail_term()]
}

fn unitary_element() -> impl Strategy<Value = Element> {
    prop_oneof![
        (photon(), mode()).prop_map(|(p, mode)| Element::Hwp22 { pol: QubitAddress::Polarization(p), mode }),
        (photon(), mode()).prop_map(|(p, mode)| Element::Hwp45 { pol: QubitAddress::Polarization(p), mode }),
        (photon(), 0..2usize).prop_map(|(p, v)| {
            let other = Photon::ALL[(p as usize + 1) % 3];
            Element::BeamSplitter { rail: QubitAddress::Spatial(p), mode: Term::bit(QubitAddress::Spatial(other), v) }
        }),
        mode().prop_map(|mode| Element::PhaseShifter { mode }),
        spin_id().prop_map(Element::SpinHadamard),
        (photon(), mode()).prop_map(|(p, mode)| Element::Cpbs {
            pol: QubitAddress::Polarization(p),
            arm: Ancilla::Route,
            mode
        }),
        Just(Element::DelayLine),
    ]
}

fn element() -> impl Strategy<Value = Element> {
    prop_oneof![
        3 => unitary_element(),
        1 => (mode(), 0.0..=1.0f64, 0.0..6.3f64, any::<bool>(), 0..1000u32).prop_map(|(mode, m, ph, lost, k)| {
            Element::Vbs {
                mode,
                t: C64::from_polar(m, ph),
                sink: if lost { Sink::Loss } else { Sink::Detector(DetectorId::new(format!("vbs{k}"))) },
            }
        }),
        1 => (photon(), spin_id(), pair_strategy(), mode()).prop_map(|(p, spin, pair, mode)| {
            Element::NvReflection { pol: QubitAddress::Polarization(p), spin, pair, mode }
        }),
        1 => (photon(), 0..2usize, rail_term(), 0..1000u32).prop_map(|(p, v, rail, k)| Element::DetectorPort {
            id: DetectorId::new(format!("det{k}")),
            subspace: Predicate::from(Term::bit(QubitAddress::Polarization(p), v).and_term(rail)),
        }),
    ]
}

fn block() -> impl Strategy<Value = BlockOperator> {
    (any::<bool>(), photon(), 0..2usize, spin_id(), pair_strategy()).prop_map(|(one, p, rail, spin, pair)| {
        let kind = if one { BlockKind::Block1 } else { BlockKind::Block2 };
        BlockOperator::new(kind, p, Term::bit(QubitAddress::Spatial(p), rail), spin, pair)
    })
}

fn start_state(seed: u64) -> RegisterState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = ProductInput::random(&mut rng);
    let spins = std::array::from_fn(|_| Spin::from_bit(rng.gen_range(0..2)));
    RegisterState::init_product(&input, spins).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reflection_is_passive(p in params()) {
        let r0 = reflection_cold(&p).unwrap();
        let r1 = reflection_hot(&p).unwrap();
        prop_assert!((r0.norm() - 1.0).abs() < 1e-14);
        prop_assert!(r1.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn lossless_emitter_reflects_fully(mut p in params()) {
        p.gamma = 0.0;
        p.g = p.g.max(0.01);
        prop_assert!((reflection_hot(&p).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_is_the_cold_cavity(mut p in params()) {
        p.g = 0.0;
        prop_assert!((reflection_hot(&p).unwrap() - reflection_cold(&p).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn resonant_reflection_is_real(g in 0.01..5.0f64, gamma in 0.0..2.0f64) {
        let r1 = reflection_hot(&SystemParams::resonant(g, gamma)).unwrap();
        let closed = (g * g - gamma / 4.0) / (g * g + gamma / 4.0);
        prop_assert!(r1.im.abs() < 1e-14);
        prop_assert!((r1.re - closed).abs() < 1e-13);
        prop_assert!((reflection_cold(&SystemParams::resonant(g, gamma)).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn only_matching_spin_couples(pair in pair_strategy(), pol in 0..2usize, bit in 0..2usize) {
        let spin = Spin::from_bit(bit);
        let expected = if pol == bit { pair.r1 } else { pair.r0 };
        prop_assert_eq!(scatter(pol, spin, &pair), expected);
    }

    #[test]
    fn unitary_elements_preserve_trace(seed in any::<u64>(), seq in prop::collection::vec(unitary_element(), 1..20)) {
        let mut state = start_state(seed);
        for e in &seq {
            e.apply(&mut state).unwrap();
            prop_assert!((state.trace() - 1.0).abs() < 1e-12, "{:?}", e.kind());
        }
        prop_assert_eq!(state.heralded_mass(), 0.0);
        prop_assert_eq!(state.loss(), 0.0);
    }

    #[test]
    fn bookkeeping_closes_after_any_sequence(
        seed in any::<u64>(),
        seq in prop::collection::vec(prop_oneof![4 => element().prop_map(Ok), 1 => block().prop_map(Err)], 1..=50),
    ) {
        let mut state = start_state(seed);
        for (k, item) in seq.into_iter().enumerate() {
            match item {
                Ok(e) => { e.apply(&mut state).unwrap(); }
                Err(b) => { b.with_label(format!("blk{k}")).apply(&mut state).unwrap(); }
            }
        }
        let total = state.trace() + state.heralded_mass() + state.loss();
        prop_assert!((total - 1.0).abs() < 1e-10, "total {}", total);
        prop_assert!((state.bookkeeping_total() - total).abs() < 1e-15);
    }

    #[test]
    fn block_herald_is_leak_squared(b in block(), seed in any::<u64>()) {
        let mut state = start_state(seed);
        let rail = b.mode;
        let pol0 = Term::bit(QubitAddress::Polarization(b.photon), 0).and_term(rail);
        let arm_mass: f64 = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| if b.kind == BlockKind::Block1 { pol0.matches(*i) } else { rail.matches(*i) })
            .map(|(_, a)| a.norm_sqr())
            .sum();
        b.apply(&mut state).unwrap();
        let d: f64 = state.herald_totals().into_iter().filter(|(id, _)| *id == b.detector()).map(|(_, m)| m).sum();
        prop_assert!((d - b.pair.leak_amplitude().norm_sqr() * arm_mass).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branches_agree_and_match_the_oracle(seed in any::<u64>(), g in 0.2..3.0f64, v in 0..6usize) {
        let variant = GateVariant::ALL[v];
        let input = ProductInput::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let program = GateProgram::new(variant, SystemParams::resonant(g, 0.01).reflection_pair().unwrap());
        let outs = program.run(&input, &MeasurementMode::Exhaustive).unwrap();
        prop_assert!(branch_spread(&outs).unwrap() < 1e-10);
        let total: f64 = outs.iter().map(|o| o.branch_probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for o in &outs {
            prop_assert!(o.success_probability > 0.0 && o.success_probability <= 1.0);
            prop_assert!((o.conditional_state.trace() - 1.0).abs() < 1e-10);
            prop_assert!(conditional_fidelity(o, &input).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn projected_run_is_linear(seed in any::<u64>(), v in 0..6usize, alpha in (-1.0..1.0f64, -1.0..1.0f64)) {
        let variant = GateVariant::ALL[v];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = GateProgram::new(variant, SystemParams::detuned(0.9, 0.05, 0.2, -0.1).reflection_pair().unwrap());
        let spins = program.spin_init;
        let x = ProductInput::random(&mut rng).photonic_amplitudes();
        let y = ProductInput::random(&mut rng).photonic_amplitudes();
        let a = C64::new(alpha.0, alpha.1);
        let mix: Vec<C64> = x.iter().zip(&y).map(|(p, q)| a * p + q).collect();
        let outcomes = &program.outcome_combinations()[rng.gen_range(0..program.outcome_combinations().len())];
        let run = |v: &[C64]| program.run_projected(RegisterState::from_photonic(v, spins), outcomes).unwrap();
        let (ox, oy, om) = (run(&x), run(&y), run(&mix));
        for ((p, q), m) in ox.amplitudes().iter().zip(oy.amplitudes()).zip(om.amplitudes()) {
            prop_assert!((a * p + q - m).norm() < 1e-12);
        }
    }
}
