//! Linear-optical elements and the two error-detecting blocks built from them.
//!
//! Every element acts on the register through one channel of
//! [`crate::state`]. A block exists in two forms: as the element sequence the
//! photon actually traverses ([`BlockOperator::elements`]) and as the
//! conditional operator that sequence is supposed to realize
//! ([`BlockOperator::apply_direct`]). Tests keep the two in agreement.

use num_complex::Complex64 as C64;

use crate::physics::{ReflectionPair, Spin};
use crate::state::{
    Ancilla, DetectorId, Photon, Predicate, QubitAddress, RegisterState, SingleQubitOp, Sink, SpinId, StateError, Term,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    /// Circularly polarizing beam splitter: reflects `|0>^p`, transmits `|1>^p`.
    Cpbs,
    /// Half-wave plate at 22.5 degrees (polarization Hadamard).
    Hwp22,
    /// Half-wave plate at 45 degrees (polarization flip).
    Hwp45,
    /// 50:50 beam splitter on a pair of rails (spatial Hadamard).
    BeamSplitter,
    /// Variable beam splitter used as an attenuator.
    Vbs,
    /// `e^{i pi}` phase shifter.
    PhaseShifter,
    SpinHadamard,
    NvReflection,
    DetectorPort,
    DelayLine,
}

/// One placed optical element.
///
/// `mode` selects the basis states the element sees (a rail, an arm, or both).
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// Routes the photon by polarization: the arm qubit is set to the
    /// polarization value inside `mode`. The same device recombines the arms.
    Cpbs {
        pol: QubitAddress,
        arm: Ancilla,
        mode: Term,
    },
    Hwp22 {
        pol: QubitAddress,
        mode: Term,
    },
    Hwp45 {
        pol: QubitAddress,
        mode: Term,
    },
    /// Hadamard on a rail qubit. Both conventions used in the circuits
    /// (`|1>_c -> (|0>_d + |1>_d)/sqrt 2` and the balanced `d`-rail mixer)
    /// reduce to this matrix in the register encoding.
    BeamSplitter {
        rail: QubitAddress,
        mode: Term,
    },
    Vbs {
        mode: Term,
        t: C64,
        sink: Sink,
    },
    PhaseShifter {
        mode: Term,
    },
    SpinHadamard(SpinId),
    NvReflection {
        pol: QubitAddress,
        spin: SpinId,
        pair: ReflectionPair,
        mode: Term,
    },
    DetectorPort {
        id: DetectorId,
        subspace: Predicate,
    },
    /// Timing only; identity on the state.
    DelayLine,
}

impl Element {
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Cpbs { .. } => ElementKind::Cpbs,
            Element::Hwp22 { .. } => ElementKind::Hwp22,
            Element::Hwp45 { .. } => ElementKind::Hwp45,
            Element::BeamSplitter { .. } => ElementKind::BeamSplitter,
            Element::Vbs { .. } => ElementKind::Vbs,
            Element::PhaseShifter { .. } => ElementKind::PhaseShifter,
            Element::SpinHadamard(_) => ElementKind::SpinHadamard,
            Element::NvReflection { .. } => ElementKind::NvReflection,
            Element::DetectorPort { .. } => ElementKind::DetectorPort,
            Element::DelayLine => ElementKind::DelayLine,
        }
    }

    /// Applies the element and returns the heralded mass it produced.
    pub fn apply(&self, state: &mut RegisterState) -> Result<f64, StateError> {
        match self {
            Element::Cpbs { pol, arm, mode } => {
                state.apply_cnot_where(*pol, QubitAddress::Ancilla(*arm), *mode);
            }
            Element::Hwp22 { pol, mode } => state.apply_single_where(*pol, &SingleQubitOp::hadamard(), *mode),
            Element::Hwp45 { pol, mode } => state.apply_single_where(*pol, &SingleQubitOp::pauli_x(), *mode),
            Element::BeamSplitter { rail, mode } => state.apply_single_where(*rail, &SingleQubitOp::hadamard(), *mode),
            Element::Vbs { mode, t, sink } => {
                let removed = state.apply_attenuator(*mode, *t, sink)?;
                if let Sink::Detector(_) = sink {
                    return Ok(removed);
                }
            }
            Element::PhaseShifter { mode } => state.apply_phase(*mode, C64::new(-1.0, 0.0)),
            Element::SpinHadamard(s) => apply_spin_hadamard(state, *s),
            Element::NvReflection { pol, spin, pair, mode } => state.apply_controlled_amp(*pol, *spin, pair, *mode),
            Element::DetectorPort { id, subspace } => return Ok(state.project_detector(id, subspace)),
            Element::DelayLine => {}
        }
        Ok(0.0)
    }
}

/// Applies a sequence of elements, returning the total heralded mass.
pub fn apply_all(state: &mut RegisterState, elements: &[Element]) -> Result<f64, StateError> {
    elements.iter().try_fold(0.0, |acc, e| Ok(acc + e.apply(state)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Scaled controlled phase flip between a photon's polarization and a
    /// spin: `-1` on `|0>^p |-1>`.
    Block1,
    /// Scaled spin-controlled phase on a rail, independent of polarization:
    /// `-1` on `|-1>`.
    Block2,
}

/// An error-detecting block placed on one mode of one photon, coupled to
/// the cavity of one spin.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    pub kind: BlockKind,
    pub photon: Photon,
    /// Rail (or rail plus route) the block sits on. Must not constrain the
    /// arm qubit or the photon's polarization.
    pub mode: Term,
    pub spin: SpinId,
    pub pair: ReflectionPair,
    pub label: String,
}

impl BlockOperator {
    pub fn new(kind: BlockKind, photon: Photon, mode: Term, spin: SpinId, pair: ReflectionPair) -> Self {
        let name = match kind {
            BlockKind::Block1 => "block1",
            BlockKind::Block2 => "block2",
        };
        let label = format!("{name}[{photon},{spin},{:x}/{:x}]", mode.mask, mode.value);
        Self { kind, photon, mode, spin, pair, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Amplitude factor of one successful pass, `(r1 - r0) / 2`.
    pub fn success_scale(&self) -> C64 {
        self.pair.success_amplitude()
    }

    /// Sign picked up in the success branch for a given polarization and spin.
    pub fn conditional_sign(&self, pol: usize, spin: Spin) -> f64 {
        let flips = match self.kind {
            BlockKind::Block1 => pol & 1 == 0 && spin == Spin::Minus,
            BlockKind::Block2 => spin == Spin::Minus,
        };
        if flips {
            -1.0
        } else {
            1.0
        }
    }

    /// Detector on the unused output port of the recombining CPBS.
    pub fn detector(&self) -> DetectorId {
        DetectorId::new(format!("{}/D", self.label))
    }

    /// Detector on the reflected port of the balancing VBS (block1 only).
    pub fn vbs_detector(&self) -> Option<DetectorId> {
        match self.kind {
            BlockKind::Block1 => Some(DetectorId::new(format!("{}/VBS", self.label))),
            BlockKind::Block2 => None,
        }
    }

    fn pol(&self) -> QubitAddress {
        QubitAddress::Polarization(self.photon)
    }

    /// The element sequence a photon traverses inside the block.
    pub fn elements(&self) -> Vec<Element> {
        let pol = self.pol();
        let arm = Ancilla::Arm;
        let arm_q = QubitAddress::Ancilla(arm);
        let m = self.mode;
        let reflected = m.and(arm_q, 0);
        let transmitted = m.and(arm_q, 1);
        let nv = |mode| Element::NvReflection { pol, spin: self.spin, pair: self.pair, mode };

        let mut seq = vec![Element::Cpbs { pol, arm, mode: m }];
        match self.kind {
            BlockKind::Block1 => {
                seq.extend([
                    Element::Hwp22 { pol, mode: reflected },
                    nv(reflected),
                    Element::Hwp22 { pol, mode: reflected },
                    Element::Hwp45 { pol, mode: reflected },
                    Element::DelayLine,
                    Element::Vbs {
                        mode: transmitted,
                        t: self.success_scale(),
                        sink: Sink::Detector(self.vbs_detector().expect("block1 has a VBS")),
                    },
                    // reflected |0> and transmitted |1> leave through the
                    // output port; the rest is heralded
                    Element::DetectorPort { id: self.detector(), subspace: Predicate::differ(m, arm_q, pol) },
                    Element::Cpbs { pol, arm, mode: m },
                ]);
            }
            BlockKind::Block2 => {
                seq.extend([
                    Element::Hwp22 { pol, mode: reflected },
                    nv(reflected),
                    Element::Hwp22 { pol, mode: reflected },
                    Element::Hwp45 { pol, mode: transmitted },
                    Element::Hwp22 { pol, mode: transmitted },
                    nv(transmitted),
                    Element::Hwp22 { pol, mode: transmitted },
                    Element::Hwp45 { pol, mode: transmitted },
                    // the good amplitude of each arm leaves with flipped
                    // polarization through the crossed port
                    Element::DetectorPort { id: self.detector(), subspace: Predicate::agree(m, arm_q, pol) },
                    Element::Hwp45 { pol, mode: m },
                    Element::Cpbs { pol, arm, mode: m },
                ]);
            }
        }
        seq
    }

    /// Sends the photon through the composed element sequence.
    pub fn apply(&self, state: &mut RegisterState) -> Result<f64, StateError> {
        apply_all(state, &self.elements())
    }

    /// Applies the block's conditional operator directly: success branch
    /// scaled by `(r1 - r0)/2` with the block's sign pattern, herald and loss
    /// masses booked under the same detector ids as the composed form.
    pub fn apply_direct(&self, state: &mut RegisterState) -> Result<f64, StateError> {
        let t = self.success_scale();
        let leak = self.pair.leak_amplitude().norm_sqr();
        let absorbed = (1.0 - t.norm_sqr() - leak).max(0.0);
        let pb = self.pol().bit();
        let sb = QubitAddress::Spin(self.spin).bit();
        let cond = self.mode.and(QubitAddress::Ancilla(Ancilla::Arm), 0);

        let (mut det, mut vbs, mut lost) = (0.0, 0.0, 0.0);
        for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
            if !cond.matches(i) {
                continue;
            }
            let m = a.norm_sqr();
            let pol = (i >> pb) & 1;
            let meets_cavity = self.kind == BlockKind::Block2 || pol == 0;
            if meets_cavity {
                det += leak * m;
                lost += absorbed * m;
            } else {
                vbs += (1.0 - t.norm_sqr()) * m;
            }
            *a *= t * self.conditional_sign(pol, Spin::from_bit(i >> sb));
        }
        state.record(&self.detector(), det);
        if let Some(id) = self.vbs_detector() {
            state.record(&id, vbs);
        }
        state.add_loss(lost);
        Ok(det + vbs)
    }
}

fn rail_mode(photon: Photon, rail: usize) -> Term {
    Term::bit(QubitAddress::Spatial(photon), rail)
}

/// Block1 on one rail of `photon`. Returns the heralded mass.
pub fn apply_block1(
    state: &mut RegisterState,
    photon: Photon,
    rail: usize,
    spin: SpinId,
    pair: &ReflectionPair,
) -> Result<f64, StateError> {
    BlockOperator::new(BlockKind::Block1, photon, rail_mode(photon, rail), spin, *pair).apply(state)
}

/// Block2 on one rail of `photon`. Returns the heralded mass.
pub fn apply_block2(
    state: &mut RegisterState,
    photon: Photon,
    rail: usize,
    spin: SpinId,
    pair: &ReflectionPair,
) -> Result<f64, StateError> {
    BlockOperator::new(BlockKind::Block2, photon, rail_mode(photon, rail), spin, *pair).apply(state)
}

/// Balancing attenuator on a rail; reflected mass is heralded.
pub fn apply_vbs_rail(
    state: &mut RegisterState,
    photon: Photon,
    rail: usize,
    t: C64,
    detector: DetectorId,
) -> Result<f64, StateError> {
    Element::Vbs { mode: rail_mode(photon, rail), t, sink: Sink::Detector(detector) }.apply(state)
}

/// `|+1> -> (|+1> + |-1>)/sqrt 2`, `|-1> -> (|+1> - |-1>)/sqrt 2`.
pub fn apply_spin_hadamard(state: &mut RegisterState, spin: SpinId) {
    state.apply_single(QubitAddress::Spin(spin), &SingleQubitOp::hadamard());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::SystemParams;
    use crate::state::{DIM, LOGICAL_DIM};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const A_POL: QubitAddress = QubitAddress::Polarization(Photon::A);
    const A_SP: QubitAddress = QubitAddress::Spatial(Photon::A);

    fn index(bits: &[(QubitAddress, usize)]) -> usize {
        bits.iter().map(|(a, v)| v << a.bit()).sum()
    }

    fn pair_at(g: f64) -> ReflectionPair {
        SystemParams::resonant(g, 0.01).reflection_pair().unwrap()
    }

    fn spin_bit(spin: Spin) -> (QubitAddress, usize) {
        (QubitAddress::Spin(SpinId::Nv1), spin.bit())
    }

    #[test]
    fn block1_basis_examples() {
        let pair = pair_at(0.5);
        let t = pair.success_amplitude();
        let l = pair.leak_amplitude();

        let i = index(&[spin_bit(Spin::Plus)]);
        let mut s = RegisterState::basis(i);
        apply_block1(&mut s, Photon::A, 0, SpinId::Nv1, &pair).unwrap();
        assert!((s.amplitudes()[i] - t).norm() < 1e-15);
        let b = BlockOperator::new(BlockKind::Block1, Photon::A, rail_mode(Photon::A, 0), SpinId::Nv1, pair);
        let totals = s.herald_totals();
        let d = totals.iter().find(|(id, _)| *id == b.detector()).unwrap().1;
        assert!((d - l.norm_sqr()).abs() < 1e-15);

        let i = index(&[(A_POL, 1), spin_bit(Spin::Minus)]);
        let mut s = RegisterState::basis(i);
        apply_block1(&mut s, Photon::A, 0, SpinId::Nv1, &pair).unwrap();
        assert!((s.amplitudes()[i] - t).norm() < 1e-15);
        let totals = s.herald_totals();
        let d = totals.iter().find(|(id, _)| *id == b.detector()).unwrap().1;
        let v = totals.iter().find(|(id, _)| Some(id.clone()) == b.vbs_detector()).unwrap().1;
        assert_eq!(d, 0.0);
        assert!((v - (1.0 - t.norm_sqr())).abs() < 1e-15);
        assert_eq!(s.loss(), 0.0);
    }

    #[test]
    fn block1_minus_sign_matches_hand_composition() {
        // X . H . diag(r0, r1) . H |0>, read on |0>
        let pair = pair_at(0.5);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let after_h = [C64::new(h, 0.0), C64::new(h, 0.0)];
        let scattered = [after_h[0] * pair.r0, after_h[1] * pair.r1];
        let back = [(scattered[0] + scattered[1]) * h, (scattered[0] - scattered[1]) * h];
        let flipped = [back[1], back[0]];
        let oracle = flipped[0];

        let i = index(&[spin_bit(Spin::Minus)]);
        let mut s = RegisterState::basis(i);
        apply_block1(&mut s, Photon::A, 0, SpinId::Nv1, &pair).unwrap();
        assert!((s.amplitudes()[i] - oracle).norm() < 1e-15);
        assert!((oracle + pair.success_amplitude()).norm() < 1e-15);
    }

    #[test]
    fn block2_signs_and_polarization_independence() {
        let pair = pair_at(1.5);
        let t = pair.success_amplitude();
        for pol in 0..2 {
            for (spin, sign) in [(Spin::Plus, 1.0), (Spin::Minus, -1.0)] {
                let i = index(&[(A_POL, pol), (A_SP, 1), spin_bit(spin)]);
                let mut s = RegisterState::basis(i);
                apply_block2(&mut s, Photon::A, 1, SpinId::Nv1, &pair).unwrap();
                assert!((s.amplitudes()[i] - t * sign).norm() < 1e-15);
                let off: f64 = (0..DIM).filter(|&j| j != i).map(|j| s.amplitudes()[j].norm_sqr()).sum();
                assert_eq!(off, 0.0);
            }
        }
    }

    #[test]
    fn block2_leaves_other_rail_alone() {
        let pair = pair_at(1.5);
        let i = index(&[(A_SP, 0), spin_bit(Spin::Minus)]);
        let mut s = RegisterState::basis(i);
        apply_block2(&mut s, Photon::A, 1, SpinId::Nv1, &pair).unwrap();
        assert_eq!(s, {
            let mut e = RegisterState::basis(i);
            e.record(
                &BlockOperator::new(BlockKind::Block2, Photon::A, rail_mode(Photon::A, 1), SpinId::Nv1, pair)
                    .detector(),
                0.0,
            );
            e
        });
    }

    #[test]
    fn vbs_rail() {
        let pair = pair_at(0.5);
        let t = pair.success_amplitude();
        let mut s = RegisterState::basis(index(&[(A_SP, 1)]));
        let h = apply_vbs_rail(&mut s, Photon::A, 1, t, DetectorId::new("v")).unwrap();
        assert!((h - (1.0 - t.norm_sqr())).abs() < 1e-15);

        let mut s = RegisterState::basis(index(&[(A_SP, 1)]));
        apply_vbs_rail(&mut s, Photon::A, 1, C64::new(1.0, 0.0), DetectorId::new("v")).unwrap();
        assert_eq!(s.trace(), 1.0);
        assert!(apply_vbs_rail(&mut s, Photon::A, 1, C64::new(1.5, 0.0), DetectorId::new("v")).is_err());
    }

    #[test]
    fn rails_balanced_after_block2_and_vbs() {
        let pair = pair_at(0.5);
        let t = pair.success_amplitude();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for spin in [Spin::Plus, Spin::Minus] {
            let mut v = vec![C64::new(0.0, 0.0); LOGICAL_DIM];
            let base = index(&[spin_bit(spin)]);
            v[base] = C64::new(h, 0.0);
            v[base | (1 << A_SP.bit())] = C64::new(h, 0.0);
            let mut s = RegisterState::from_amplitudes(v).unwrap();
            apply_block2(&mut s, Photon::A, 1, SpinId::Nv1, &pair).unwrap();
            apply_vbs_rail(&mut s, Photon::A, 0, t, DetectorId::new("v")).unwrap();
            let r0 = s.amplitudes()[base] / h;
            let r1 = s.amplitudes()[base | (1 << A_SP.bit())] / h;
            assert!((r0 - t).norm() < 1e-15);
            let sign = if spin == Spin::Minus { -1.0 } else { 1.0 };
            assert!((r1 - t * sign).norm() < 1e-15);
        }
    }

    #[test]
    fn spin_hadamard() {
        let mut s = RegisterState::basis(0);
        apply_spin_hadamard(&mut s, SpinId::Nv4);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[1 << 9].re - h).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<C64> = (0..DIM).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let s0 = RegisterState::from_amplitudes(v).unwrap();
        let mut s = s0.clone();
        apply_spin_hadamard(&mut s, SpinId::Nv2);
        assert!((s.trace() - s0.trace()).abs() < 1e-12 * s0.trace());
        apply_spin_hadamard(&mut s, SpinId::Nv2);
        for (x, y) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn lossless_resonant_block_is_deterministic() {
        let pair = SystemParams::resonant(0.8, 0.0).reflection_pair().unwrap();
        for kind in [BlockKind::Block1, BlockKind::Block2] {
            let b = BlockOperator::new(kind, Photon::B, Term::ALWAYS, SpinId::Nv2, pair);
            let mut s = RegisterState::basis(1 << QubitAddress::Spin(SpinId::Nv2).bit());
            let heralded = b.apply(&mut s).unwrap();
            assert!(heralded < 1e-30);
            assert!((s.trace() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn element_kinds_cover_library() {
        let e = Element::Vbs { mode: Term::ALWAYS, t: C64::new(0.5, 0.0), sink: Sink::Loss };
        assert_eq!(e.kind(), ElementKind::Vbs);
        assert_eq!(Element::DelayLine.kind(), ElementKind::DelayLine);
        let mut s = RegisterState::basis(0);
        assert_eq!(e.apply(&mut s).unwrap(), 0.0);
        assert!((s.loss() - 0.75).abs() < 1e-15);
    }
}
