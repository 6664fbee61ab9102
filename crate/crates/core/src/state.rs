//! Dense state vector over three dual-DoF photons and four NV spins.
//!
//! The logical register holds ten qubits (six photonic, four spins). Two more
//! qubits label the optical path a photon takes inside an interferometer
//! (the arm behind a polarizing beam splitter, or the intermediate rails of
//! photon `c`). They are `|0>` whenever no photon is in flight, so the logical
//! subspace is exactly the first [`LOGICAL_DIM`] amplitudes.
//!
//! Evolution is unnormalized: attenuators, detector ports and lossy
//! reflections remove probability mass and book it either in the herald
//! ledger or as silent loss. [`RegisterState::renormalize`] conditions on
//! no herald at the end of a run.

use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::physics::{scatter, ReflectionPair, Spin};

pub const PHOTON_QUBITS: usize = 6;
pub const SPIN_QUBITS: usize = 4;
pub const LOGICAL_QUBITS: usize = PHOTON_QUBITS + SPIN_QUBITS;
pub const ANCILLA_QUBITS: usize = 2;
pub const TOTAL_QUBITS: usize = LOGICAL_QUBITS + ANCILLA_QUBITS;
pub const PHOTONIC_DIM: usize = 1 << PHOTON_QUBITS;
pub const LOGICAL_DIM: usize = 1 << LOGICAL_QUBITS;
pub const DIM: usize = 1 << TOTAL_QUBITS;

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("input pair `{name}` is not normalized (|x1|^2 + |x2|^2 = {norm})")]
    Unnormalized { name: &'static str, norm: f64 },

    #[error("attenuator transmission |t| = {0} exceeds 1")]
    TransmissionAboveOne(f64),

    #[error("gate aborted, all amplitude heralded away")]
    ZeroTrace,

    #[error("state is not unit norm (norm^2 = {0})")]
    NotUnitNorm(f64),

    #[error("amplitude vector has length {0}, expected {1}")]
    BadLength(usize, usize),

    #[error("spins and path qubits are not in a definite basis state")]
    NotSeparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Photon {
    A,
    B,
    C,
}

impl Photon {
    pub const ALL: [Photon; 3] = [Photon::A, Photon::B, Photon::C];
}

impl fmt::Display for Photon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Photon::A => "a",
            Photon::B => "b",
            Photon::C => "c",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinId {
    Nv1,
    Nv2,
    Nv3,
    Nv4,
}

impl SpinId {
    pub const ALL: [SpinId; 4] = [SpinId::Nv1, SpinId::Nv2, SpinId::Nv3, SpinId::Nv4];

    /// Zero-based position, `Nv1 -> 0`.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SpinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NV{}", self.index() + 1)
    }
}

/// Transient path qubits used while a photon is inside an interferometer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ancilla {
    /// Outer routing of photon `c` (polarizing split of the target chain, or
    /// the intermediate `d` rails of the spatial target network).
    Route,
    /// Arm inside an error-detecting block.
    Arm,
}

/// Degree of freedom carried by a photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dof {
    Polarization,
    Spatial,
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dof::Polarization => f.write_str("p"),
            Dof::Spatial => f.write_str("s"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitAddress {
    Polarization(Photon),
    Spatial(Photon),
    Spin(SpinId),
    Ancilla(Ancilla),
}

impl QubitAddress {
    pub fn photon(photon: Photon, dof: Dof) -> Self {
        match dof {
            Dof::Polarization => QubitAddress::Polarization(photon),
            Dof::Spatial => QubitAddress::Spatial(photon),
        }
    }

    pub fn bit(self) -> usize {
        RegisterLayout::bit(self)
    }
}

impl fmt::Display for QubitAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitAddress::Polarization(p) => write!(f, "{p}^p"),
            QubitAddress::Spatial(p) => write!(f, "{p}^s"),
            QubitAddress::Spin(s) => write!(f, "{s}"),
            QubitAddress::Ancilla(Ancilla::Route) => f.write_str("route"),
            QubitAddress::Ancilla(Ancilla::Arm) => f.write_str("arm"),
        }
    }
}

/// Fixed bit assignment of the register.
///
/// | bit | qubit |
/// |-----|-------|
/// | 0, 1 | photon a polarization, spatial |
/// | 2, 3 | photon b polarization, spatial |
/// | 4, 5 | photon c polarization, spatial |
/// | 6..=9 | NV1..NV4 (`|+1>` = 0, `|-1>` = 1) |
/// | 10, 11 | route and arm path qubits |
///
/// A photonic basis index `0..64` uses the same bit order.
#[derive(Clone, Copy, Debug, Default)]
pub struct RegisterLayout;

impl RegisterLayout {
    pub const fn bit(addr: QubitAddress) -> usize {
        match addr {
            QubitAddress::Polarization(p) => 2 * (p as usize),
            QubitAddress::Spatial(p) => 2 * (p as usize) + 1,
            QubitAddress::Spin(s) => PHOTON_QUBITS + s as usize,
            QubitAddress::Ancilla(Ancilla::Route) => LOGICAL_QUBITS,
            QubitAddress::Ancilla(Ancilla::Arm) => LOGICAL_QUBITS + 1,
        }
    }

    pub fn addresses() -> Vec<QubitAddress> {
        let mut out = Vec::with_capacity(TOTAL_QUBITS);
        for p in Photon::ALL {
            out.push(QubitAddress::Polarization(p));
            out.push(QubitAddress::Spatial(p));
        }
        out.extend(SpinId::ALL.iter().map(|&s| QubitAddress::Spin(s)));
        out.push(QubitAddress::Ancilla(Ancilla::Route));
        out.push(QubitAddress::Ancilla(Ancilla::Arm));
        out
    }
}

/// Conjunction of fixed bit values: matches basis index `i` iff
/// `i & mask == value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub mask: usize,
    pub value: usize,
}

impl Term {
    pub const ALWAYS: Term = Term { mask: 0, value: 0 };

    pub fn bit(addr: QubitAddress, value: usize) -> Self {
        Term::ALWAYS.and(addr, value)
    }

    pub fn and(self, addr: QubitAddress, value: usize) -> Self {
        let b = 1 << addr.bit();
        debug_assert!(self.mask & b == 0 || (self.value & b != 0) == (value & 1 == 1));
        Term { mask: self.mask | b, value: if value & 1 == 1 { self.value | b } else { self.value & !b } }
    }

    pub fn and_term(self, other: Term) -> Self {
        debug_assert_eq!(self.value & other.mask, other.value & self.mask);
        Term { mask: self.mask | other.mask, value: self.value | other.value }
    }

    #[inline]
    pub fn matches(&self, index: usize) -> bool {
        index & self.mask == self.value
    }

    fn involves(&self, bit: usize) -> bool {
        self.mask & (1 << bit) != 0
    }
}

/// Disjunction of [`Term`]s; used for detector subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Predicate {
    pub terms: Vec<Term>,
}

impl Predicate {
    pub fn never() -> Self {
        Predicate { terms: Vec::new() }
    }

    pub fn any(terms: impl IntoIterator<Item = Term>) -> Self {
        Predicate { terms: terms.into_iter().collect() }
    }

    /// Basis states inside `mode` where the two qubits differ.
    pub fn differ(mode: Term, x: QubitAddress, y: QubitAddress) -> Self {
        Predicate::any([mode.and(x, 0).and(y, 1), mode.and(x, 1).and(y, 0)])
    }

    /// Basis states inside `mode` where the two qubits agree.
    pub fn agree(mode: Term, x: QubitAddress, y: QubitAddress) -> Self {
        Predicate::any([mode.and(x, 0).and(y, 0), mode.and(x, 1).and(y, 1)])
    }

    #[inline]
    pub fn matches(&self, index: usize) -> bool {
        self.terms.iter().any(|t| t.matches(index))
    }
}

impl From<Term> for Predicate {
    fn from(t: Term) -> Self {
        Predicate { terms: vec![t] }
    }
}

/// A 2x2 operator on one qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitOp {
    matrix: [[C64; 2]; 2],
    unitary: bool,
}

impl SingleQubitOp {
    pub fn new(matrix: [[C64; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = matrix;
        // U^dagger U
        let m00 = a.conj() * a + c.conj() * c;
        let m01 = a.conj() * b + c.conj() * d;
        let m11 = b.conj() * b + d.conj() * d;
        let unitary = (m00 - 1.0).norm() < UNITARY_TOL && m01.norm() < UNITARY_TOL && (m11 - 1.0).norm() < UNITARY_TOL;
        Self { matrix, unitary }
    }

    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new([[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self::new([[z, o], [o, z]])
    }

    pub fn pauli_z() -> Self {
        Self::diag(C64::new(1.0, 0.0), C64::new(-1.0, 0.0))
    }

    /// `e^{i pi}` on `|value>`, identity on the other basis state.
    pub fn phase_flip_on(value: usize) -> Self {
        let (o, m) = (C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        if value & 1 == 0 {
            Self::diag(m, o)
        } else {
            Self::diag(o, m)
        }
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new([[d0, z], [z, d1]])
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }
}

/// Where an attenuator sends the probability mass it removes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sink {
    Detector(DetectorId),
    Loss,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectorId(pub String);

impl DetectorId {
    pub fn new(name: impl Into<String>) -> Self {
        DetectorId(name.into())
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeraldRecord {
    pub detector: DetectorId,
    pub mass: f64,
}

/// Three photons with two input qubits each.
///
/// Each pair `[x0, x1]` holds the amplitudes of `|0>` and `|1>` in that
/// degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductInput {
    pub a_pol: [C64; 2],
    pub a_spatial: [C64; 2],
    pub b_pol: [C64; 2],
    pub b_spatial: [C64; 2],
    pub c_pol: [C64; 2],
    pub c_spatial: [C64; 2],
}

impl ProductInput {
    pub const FIELD_NAMES: [&'static str; 6] = ["a_pol", "a_spatial", "b_pol", "b_spatial", "c_pol", "c_spatial"];

    /// Pairs in register bit order (`a_pol` first).
    pub fn pairs(&self) -> [[C64; 2]; 6] {
        [self.a_pol, self.a_spatial, self.b_pol, self.b_spatial, self.c_pol, self.c_spatial]
    }

    pub fn from_pairs(p: [[C64; 2]; 6]) -> Self {
        ProductInput { a_pol: p[0], a_spatial: p[1], b_pol: p[2], b_spatial: p[3], c_pol: p[4], c_spatial: p[5] }
    }

    /// Every qubit in `|bit>` of the photonic basis index.
    pub fn basis(index: usize) -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let mut pairs = [[z; 2]; 6];
        for (k, pair) in pairs.iter_mut().enumerate() {
            pair[(index >> k) & 1] = o;
        }
        Self::from_pairs(pairs)
    }

    /// Random normalized pairs.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut pairs = [[C64::new(0.0, 0.0); 2]; 6];
        for pair in pairs.iter_mut() {
            loop {
                let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-3 {
                    *pair = [C64::new(v[0] / n, v[1] / n), C64::new(v[2] / n, v[3] / n)];
                    break;
                }
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        for (name, pair) in Self::FIELD_NAMES.iter().zip(self.pairs()) {
            let norm = pair[0].norm_sqr() + pair[1].norm_sqr();
            if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
                return Err(StateError::Unnormalized { name, norm });
            }
        }
        Ok(())
    }

    /// Tensor product over the 64 photonic basis states.
    pub fn photonic_amplitudes(&self) -> Vec<C64> {
        let pairs = self.pairs();
        (0..PHOTONIC_DIM).map(|i| pairs.iter().enumerate().map(|(k, p)| p[(i >> k) & 1]).product()).collect()
    }
}

/// Full register state together with its probability bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct RegisterState {
    amplitudes: Vec<C64>,
    ledger: Vec<HeraldRecord>,
    loss: f64,
}

fn spins_index(spins: &[Spin; 4]) -> usize {
    spins.iter().zip(SpinId::ALL).map(|(s, id)| s.bit() << QubitAddress::Spin(id).bit()).sum()
}

impl RegisterState {
    /// Product state of the photonic input and the four spins.
    pub fn init_product(input: &ProductInput, spins: [Spin; 4]) -> Result<Self, StateError> {
        input.validate()?;
        Ok(Self::from_photonic(&input.photonic_amplitudes(), spins))
    }

    /// `photonic ⊗ |spins>`; no normalization is enforced.
    pub fn from_photonic(photonic: &[C64], spins: [Spin; 4]) -> Self {
        assert_eq!(photonic.len(), PHOTONIC_DIM);
        let mut amplitudes = vec![C64::new(0.0, 0.0); DIM];
        let offset = spins_index(&spins);
        amplitudes[offset..offset + PHOTONIC_DIM].copy_from_slice(photonic);
        Self { amplitudes, ledger: Vec::new(), loss: 0.0 }
    }

    pub fn basis(index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); DIM];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes, ledger: Vec::new(), loss: 0.0 }
    }

    /// Any vector of length [`DIM`], or [`LOGICAL_DIM`] (padded with zero
    /// path qubits).
    pub fn from_amplitudes(mut amplitudes: Vec<C64>) -> Result<Self, StateError> {
        match amplitudes.len() {
            DIM => {}
            LOGICAL_DIM => amplitudes.resize(DIM, C64::new(0.0, 0.0)),
            n => return Err(StateError::BadLength(n, DIM)),
        }
        Ok(Self { amplitudes, ledger: Vec::new(), loss: 0.0 })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitudes with both path qubits in `|0>`.
    pub fn logical_amplitudes(&self) -> &[C64] {
        &self.amplitudes[..LOGICAL_DIM]
    }

    /// Remaining probability mass, `sum |amp|^2`.
    pub fn trace(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn ledger(&self) -> &[HeraldRecord] {
        &self.ledger
    }

    pub fn heralded_mass(&self) -> f64 {
        self.ledger.iter().map(|r| r.mass).sum()
    }

    /// Mass removed without a herald (lossy reflections, attenuators with
    /// [`Sink::Loss`]).
    pub fn loss(&self) -> f64 {
        self.loss
    }

    /// `trace + heralded + loss`; equals the input trace for any channel
    /// sequence.
    pub fn bookkeeping_total(&self) -> f64 {
        self.trace() + self.heralded_mass() + self.loss
    }

    /// Heralded mass summed per detector, sorted by detector id.
    pub fn herald_totals(&self) -> Vec<(DetectorId, f64)> {
        let mut map = std::collections::BTreeMap::<DetectorId, f64>::new();
        for r in &self.ledger {
            *map.entry(r.detector.clone()).or_default() += r.mass;
        }
        map.into_iter().collect()
    }

    pub(crate) fn record(&mut self, detector: &DetectorId, mass: f64) {
        self.ledger.push(HeraldRecord { detector: detector.clone(), mass });
    }

    pub(crate) fn add_loss(&mut self, mass: f64) {
        self.loss += mass;
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn apply_single(&mut self, addr: QubitAddress, op: &SingleQubitOp) {
        self.apply_single_where(addr, op, Term::ALWAYS)
    }

    /// Applies `op` to `addr` on the subspace selected by `cond`, which must
    /// not constrain `addr` itself. Mass changes of non-unitary ops are not
    /// booked anywhere; optical losses go through the attenuator channels.
    pub fn apply_single_where(&mut self, addr: QubitAddress, op: &SingleQubitOp, cond: Term) {
        let bit = addr.bit();
        assert!(!cond.involves(bit), "condition constrains the target qubit {addr}");
        let stride = 1 << bit;
        let [[m00, m01], [m10, m11]] = op.matrix;
        for i in 0..DIM {
            if i & stride != 0 || !cond.matches(i) {
                continue;
            }
            let j = i | stride;
            let (x0, x1) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m00 * x0 + m01 * x1;
            self.amplitudes[j] = m10 * x0 + m11 * x1;
        }
    }

    /// Multiplies every amplitude matching `cond` by `phase` (`|phase| = 1`).
    pub fn apply_phase(&mut self, cond: Term, phase: C64) {
        debug_assert!((phase.norm() - 1.0).abs() < UNITARY_TOL);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if cond.matches(i) {
                *a *= phase;
            }
        }
    }

    /// Swaps `target` for basis states where `control = 1` inside `cond`.
    pub fn apply_cnot_where(&mut self, control: QubitAddress, target: QubitAddress, cond: Term) {
        let tb = 1 << target.bit();
        let cond = cond.and_term(Term::bit(control, 1));
        assert!(!cond.involves(target.bit()));
        for i in 0..DIM {
            if i & tb == 0 && cond.matches(i) {
                self.amplitudes.swap(i, i | tb);
            }
        }
    }

    /// Spin-selective reflection of the photon polarization `pol` off the
    /// cavity holding `spin`, restricted to `cond`. Mass not reflected is
    /// booked as silent loss.
    pub fn apply_controlled_amp(&mut self, pol: QubitAddress, spin: SpinId, pair: &ReflectionPair, cond: Term) {
        let pb = pol.bit();
        let sb = QubitAddress::Spin(spin).bit();
        let mut lost = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if !cond.matches(i) || a.norm_sqr() == 0.0 {
                continue;
            }
            let r = scatter((i >> pb) & 1, Spin::from_bit(i >> sb), pair);
            let before = a.norm_sqr();
            *a *= r;
            lost += before - a.norm_sqr();
        }
        self.loss += lost;
    }

    /// Scales amplitudes matching `cond` by `t`; the removed mass goes to
    /// `sink`. Returns the removed mass.
    pub fn apply_attenuator(&mut self, cond: Term, t: C64, sink: &Sink) -> Result<f64, StateError> {
        let tn = t.norm();
        if !tn.is_finite() || tn > 1.0 + 1e-15 {
            return Err(StateError::TransmissionAboveOne(tn));
        }
        let mut matched = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if cond.matches(i) {
                matched += a.norm_sqr();
                *a *= t;
            }
        }
        let removed = (1.0 - t.norm_sqr()).max(0.0) * matched;
        match sink {
            Sink::Detector(id) => self.record(id, removed),
            Sink::Loss => self.loss += removed,
        }
        Ok(removed)
    }

    /// Zeroes the detector subspace and books its mass under `detector`.
    /// The survivor is not renormalized. Returns the click probability mass.
    pub fn project_detector(&mut self, detector: &DetectorId, subspace: &Predicate) -> f64 {
        let mut clicked = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if subspace.matches(i) {
                clicked += a.norm_sqr();
                *a = C64::new(0.0, 0.0);
            }
        }
        self.record(detector, clicked);
        clicked
    }

    fn spin_mass(&self, spin: SpinId, outcome: Spin) -> f64 {
        let cond = Term::bit(QubitAddress::Spin(spin), outcome.bit());
        self.amplitudes.iter().enumerate().filter(|(i, _)| cond.matches(*i)).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn collapse(&mut self, spin: SpinId, outcome: Spin, mass: f64, trace: f64) {
        let cond = Term::bit(QubitAddress::Spin(spin), outcome.bit());
        let scale = (trace / mass).sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if cond.matches(i) {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    /// Born probabilities of the two outcomes of a spin measurement in the
    /// `{|+1>, |-1>}` basis, relative to the current trace.
    pub fn spin_probabilities(&self, spin: SpinId) -> Result<[f64; 2], StateError> {
        let trace = self.trace();
        if trace <= 0.0 {
            return Err(StateError::ZeroTrace);
        }
        Ok([self.spin_mass(spin, Spin::Plus) / trace, self.spin_mass(spin, Spin::Minus) / trace])
    }

    /// Samples a spin measurement; the collapsed state keeps the
    /// pre-measurement trace.
    pub fn measure_spin<R: Rng + ?Sized>(&mut self, spin: SpinId, rng: &mut R) -> Result<(Spin, f64), StateError> {
        let trace = self.trace();
        let [p_plus, p_minus] = self.spin_probabilities(spin)?;
        let outcome = if rng.gen::<f64>() < p_plus { Spin::Plus } else { Spin::Minus };
        let p = if outcome == Spin::Plus { p_plus } else { p_minus };
        self.collapse(spin, outcome, p * trace, trace);
        Ok((outcome, p))
    }

    /// Both measurement branches with nonzero probability, each renormalized
    /// to the pre-measurement trace.
    pub fn measure_spin_branches(&self, spin: SpinId) -> Result<Vec<(Spin, f64, RegisterState)>, StateError> {
        let trace = self.trace();
        let probs = self.spin_probabilities(spin)?;
        let mut out = Vec::with_capacity(2);
        for (outcome, p) in [Spin::Plus, Spin::Minus].into_iter().zip(probs) {
            if p > 0.0 {
                let mut branch = self.clone();
                branch.collapse(spin, outcome, p * trace, trace);
                out.push((outcome, p, branch));
            }
        }
        Ok(out)
    }

    /// Conditions on no herald: returns the remaining trace as success
    /// probability and scales the state to unit norm.
    pub fn renormalize(&mut self) -> Result<f64, StateError> {
        let trace = self.trace();
        if trace.is_nan() || trace <= 0.0 {
            return Err(StateError::ZeroTrace);
        }
        let s = 1.0 / trace.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(trace)
    }

    /// Inner product `<self|other>` over the full register.
    pub fn inner(&self, other: &RegisterState) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Photonic amplitudes and spin values, when both path qubits are `|0>`
    /// and the spins sit in one basis state.
    pub fn photonic_amplitudes(&self) -> Result<(Vec<C64>, [Spin; 4]), StateError> {
        let total = self.trace();
        let mut best = (0usize, -1.0);
        for block in 0..(DIM / PHOTONIC_DIM) {
            let m: f64 =
                self.amplitudes[block * PHOTONIC_DIM..(block + 1) * PHOTONIC_DIM].iter().map(|a| a.norm_sqr()).sum();
            if m > best.1 {
                best = (block, m);
            }
        }
        let (block, mass) = best;
        if total <= 0.0 || (total - mass) > 1e-12 * total.max(1.0) || block >= LOGICAL_DIM / PHOTONIC_DIM {
            return Err(StateError::NotSeparable);
        }
        let offset = block * PHOTONIC_DIM;
        let spins = std::array::from_fn(|k| Spin::from_bit(offset >> (PHOTON_QUBITS + k)));
        Ok((self.amplitudes[offset..offset + PHOTONIC_DIM].to_vec(), spins))
    }
}

/// `|<a|b>|^2` for two unit-norm states.
pub fn fidelity(a: &RegisterState, b: &RegisterState) -> Result<f64, StateError> {
    for s in [a, b] {
        let n = s.trace();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotUnitNorm(n));
        }
    }
    Ok(a.inner(b).norm_sqr().min(1.0))
}
