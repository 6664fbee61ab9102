//! Gate programs: the polarization and spatial Toffoli sections, their
//! hyperparallel combination, and the three hybrid wirings.
//!
//! A section is a doubly controlled gate on photon `c`, driven by two spins.
//! Spin `X` carries the control on photon `b`, spin `Y` the control on photon
//! `a`. After the coherent part both spins are measured and a feed-forward
//! table removes the phase kickback the measurement leaves on the controls.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::elements::{BlockKind, BlockOperator, Element};
use crate::physics::{ReflectionPair, Spin};
use crate::state::{
    Ancilla, DetectorId, Dof, HeraldRecord, Photon, Predicate, QubitAddress, RegisterState, SingleQubitOp, Sink,
    SpinId, StateError, Term, PHOTONIC_DIM, PHOTON_QUBITS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error(transparent)]
    State(StateError),

    #[error("gate aborted, all amplitude heralded away")]
    Aborted,

    #[error("variant `{0}` is not a hybrid variant")]
    NotHybrid(GateVariant),

    #[error("no measurement outcome for spin {0}")]
    MissingOutcome(SpinId),

    #[error("unknown gate variant `{0}`")]
    UnknownVariant(String),
}

impl From<StateError> for CircuitError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::ZeroTrace => CircuitError::Aborted,
            other => CircuitError::State(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateVariant {
    PolToffoli,
    SpatialToffoli,
    HyperToffoli,
    Hybrid1,
    Hybrid2,
    Hybrid3,
}

impl GateVariant {
    pub const ALL: [GateVariant; 6] = [
        GateVariant::PolToffoli,
        GateVariant::SpatialToffoli,
        GateVariant::HyperToffoli,
        GateVariant::Hybrid1,
        GateVariant::Hybrid2,
        GateVariant::Hybrid3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateVariant::PolToffoli => "pol_toffoli",
            GateVariant::SpatialToffoli => "spatial_toffoli",
            GateVariant::HyperToffoli => "hyper_toffoli",
            GateVariant::Hybrid1 => "hybrid_1",
            GateVariant::Hybrid2 => "hybrid_2",
            GateVariant::Hybrid3 => "hybrid_3",
        }
    }

    pub fn is_hybrid(self) -> bool {
        matches!(self, GateVariant::Hybrid1 | GateVariant::Hybrid2 | GateVariant::Hybrid3)
    }

    /// The Toffoli sections this variant runs, in circuit order.
    pub fn sections(self) -> Vec<SectionWiring> {
        use Dof::{Polarization as P, Spatial as S};
        let first = |a, b, c| SectionWiring::new(a, b, c, SpinId::Nv1, SpinId::Nv2);
        let second = |a, b, c| SectionWiring::new(a, b, c, SpinId::Nv3, SpinId::Nv4);
        match self {
            GateVariant::PolToffoli => vec![first(P, P, P)],
            GateVariant::SpatialToffoli => vec![second(S, S, S)],
            GateVariant::HyperToffoli => vec![first(P, P, P), second(S, S, S)],
            GateVariant::Hybrid1 => vec![first(P, P, S), second(S, S, P)],
            GateVariant::Hybrid2 => vec![first(P, S, S), second(S, P, P)],
            GateVariant::Hybrid3 => vec![first(P, S, P), second(S, P, S)],
        }
    }
}

impl fmt::Display for GateVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateVariant {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateVariant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| CircuitError::UnknownVariant(s.to_string()))
    }
}

/// Which degree of freedom of each photon a section reads and writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SectionWiring {
    pub control_a: Dof,
    pub control_b: Dof,
    pub target: Dof,
    /// Spin coupled to the control on photon `b`.
    pub x_spin: SpinId,
    /// Spin coupled to the control on photon `a`.
    pub y_spin: SpinId,
}

impl SectionWiring {
    pub fn new(control_a: Dof, control_b: Dof, target: Dof, x_spin: SpinId, y_spin: SpinId) -> Self {
        Self { control_a, control_b, target, x_spin, y_spin }
    }

    pub fn control_a_addr(&self) -> QubitAddress {
        QubitAddress::photon(Photon::A, self.control_a)
    }

    pub fn control_b_addr(&self) -> QubitAddress {
        QubitAddress::photon(Photon::B, self.control_b)
    }

    pub fn target_addr(&self) -> QubitAddress {
        QubitAddress::photon(Photon::C, self.target)
    }

    /// Control value for which the `X` spin ends the control stage in `|-1>`.
    fn x_minus_value(&self) -> usize {
        1
    }

    /// Control value for which the `Y` spin ends the control stage in `|-1>`.
    /// The polarization target network flips on `X = Y = -1`, the spatial one
    /// on `X = -1, Y = +1`.
    fn y_minus_value(&self) -> usize {
        match self.target {
            Dof::Polarization => 1,
            Dof::Spatial => 0,
        }
    }

    /// Initial spin state that leaves the spin in `|-1>` after the control
    /// stage exactly when the control equals `minus_value`.
    fn required_init(control: Dof, minus_value: usize) -> Spin {
        // block1 kicks the phase on |0>, block2 on rail 1
        let base = match control {
            Dof::Polarization => Spin::Minus,
            Dof::Spatial => Spin::Plus,
        };
        if minus_value == 1 {
            base
        } else {
            base.flipped()
        }
    }

    /// Initial states of `(X, Y)` this wiring needs.
    pub fn required_spins(&self) -> (Spin, Spin) {
        (
            Self::required_init(self.control_b, self.x_minus_value()),
            Self::required_init(self.control_a, self.y_minus_value()),
        )
    }

    pub fn feed_forward_table(&self) -> FeedForwardTable {
        let x_fix = Correction { target: self.control_b_addr(), flip_value: self.x_minus_value() };
        let y_fix = Correction { target: self.control_a_addr(), flip_value: self.y_minus_value() };
        let mut entries = Vec::with_capacity(4);
        for sx in [Spin::Plus, Spin::Minus] {
            for sy in [Spin::Plus, Spin::Minus] {
                let mut fixes = Vec::new();
                if sy == Spin::Minus {
                    fixes.push(y_fix);
                }
                if sx == Spin::Minus {
                    fixes.push(x_fix);
                }
                entries.push(((sx, sy), fixes));
            }
        }
        FeedForwardTable { x_spin: self.x_spin, y_spin: self.y_spin, entries }
    }
}

/// `e^{i pi}` on `|flip_value>` of one photonic qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Correction {
    pub target: QubitAddress,
    pub flip_value: usize,
}

impl Correction {
    pub fn apply(&self, state: &mut RegisterState) {
        state.apply_single(self.target, &SingleQubitOp::phase_flip_on(self.flip_value));
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.target, self.flip_value) {
            (QubitAddress::Polarization(p), 1) => write!(f, "sigma_z^p({p})"),
            (t, v) => write!(f, "e^(i pi)|{v}>({t})"),
        }
    }
}

/// Corrections for each outcome pair of the two spins of one section.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedForwardTable {
    pub x_spin: SpinId,
    pub y_spin: SpinId,
    /// Keyed by `(X outcome, Y outcome)`.
    pub entries: Vec<((Spin, Spin), Vec<Correction>)>,
}

impl FeedForwardTable {
    pub fn corrections(&self, x: Spin, y: Spin) -> &[Correction] {
        self.entries
            .iter()
            .find(|(k, _)| *k == (x, y))
            .map(|(_, v)| v.as_slice())
            .expect("table covers all outcome pairs")
    }

    /// Corrections for spins given in ascending spin order, as printed in the
    /// tables of the gate description.
    pub fn by_spin_order(&self, first: Spin, second: Spin) -> &[Correction] {
        if self.x_spin < self.y_spin {
            self.corrections(first, second)
        } else {
            self.corrections(second, first)
        }
    }
}

fn outcome_of(outcomes: &[(SpinId, Spin)], spin: SpinId) -> Result<Spin, CircuitError> {
    outcomes.iter().find(|(s, _)| *s == spin).map(|(_, o)| *o).ok_or(CircuitError::MissingOutcome(spin))
}

/// Applies the corrections the table lists for the measured outcomes and
/// returns them.
pub fn feed_forward(
    state: &mut RegisterState,
    table: &FeedForwardTable,
    outcomes: &[(SpinId, Spin)],
) -> Result<Vec<Correction>, CircuitError> {
    let x = outcome_of(outcomes, table.x_spin)?;
    let y = outcome_of(outcomes, table.y_spin)?;
    let fixes = table.corrections(x, y).to_vec();
    for c in &fixes {
        c.apply(state);
    }
    Ok(fixes)
}

/// One step of a gate program.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Element(Element),
    Block(BlockOperator),
    /// Preparation pulse flipping a spin before the gate.
    SpinFlip(SpinId),
    /// Measures both spins of a section in the `{|+1>, |-1>}` basis.
    Measure(SpinId, SpinId),
    FeedForward(FeedForwardTable),
}

/// How spin measurements are resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Every outcome branch, each with its probability.
    Exhaustive,
    /// One outcome per measurement, drawn from a seeded generator.
    Sampled(u64),
}

/// Result of one run (or of one branch in exhaustive mode).
#[derive(Clone, Debug)]
pub struct GateOutcome {
    pub variant: GateVariant,
    /// Unit-norm state conditioned on no herald and on the recorded outcomes.
    pub conditional_state: RegisterState,
    /// Probability that no detector fired and no photon was lost.
    pub success_probability: f64,
    /// Probability of this outcome branch given success.
    pub branch_probability: f64,
    pub spin_outcomes: Vec<(SpinId, Spin)>,
    pub corrections_applied: Vec<Correction>,
    pub herald_ledger: Vec<HeraldRecord>,
    /// Mass lost without a herald.
    pub loss: f64,
}

impl GateOutcome {
    pub fn heralded_mass(&self) -> f64 {
        self.herald_ledger.iter().map(|r| r.mass).sum()
    }
}

/// An executable gate: its step list plus the initial spin states.
#[derive(Clone, Debug)]
pub struct GateProgram {
    pub variant: GateVariant,
    pub pair: ReflectionPair,
    pub spin_init: [Spin; 4],
    sections: Vec<SectionWiring>,
    use_direct_blocks: bool,
}

/// Spin states used when no section constrains a spin.
pub const DEFAULT_SPINS: [Spin; 4] = [Spin::Minus, Spin::Minus, Spin::Plus, Spin::Minus];

impl GateProgram {
    pub fn new(variant: GateVariant, pair: ReflectionPair) -> Self {
        let sections = variant.sections();
        let mut spin_init = DEFAULT_SPINS;
        for s in &sections {
            let (x, y) = s.required_spins();
            spin_init[s.x_spin.index()] = x;
            spin_init[s.y_spin.index()] = y;
        }
        Self { variant, pair, spin_init, sections, use_direct_blocks: false }
    }

    /// Runs the sections in the opposite order.
    pub fn reversed(mut self) -> Self {
        self.sections.reverse();
        self
    }

    /// Starts the spins in other states. Preparation pulses bring every
    /// section spin to the state its wiring needs, so the feed-forward tables
    /// stay as they are.
    pub fn with_spin_init(mut self, spins: [Spin; 4]) -> Self {
        self.spin_init = spins;
        self
    }

    /// Uses the directly constructed block operators instead of the element
    /// sequences.
    pub fn with_direct_blocks(mut self, direct: bool) -> Self {
        self.use_direct_blocks = direct;
        self
    }

    pub fn sections(&self) -> &[SectionWiring] {
        &self.sections
    }

    pub fn feed_forward_tables(&self) -> Vec<FeedForwardTable> {
        self.sections.iter().map(|s| s.feed_forward_table()).collect()
    }

    /// The spin states the sections need.
    pub fn required_spins(&self) -> [Spin; 4] {
        GateProgram::new(self.variant, self.pair).spin_init
    }

    pub fn steps(&self) -> Vec<Step> {
        let required = self.required_spins();
        let mut steps: Vec<Step> = Vec::new();
        for s in &self.sections {
            for spin in [s.x_spin, s.y_spin] {
                if self.spin_init[spin.index()] != required[spin.index()] {
                    steps.push(Step::SpinFlip(spin));
                }
            }
        }
        for (k, s) in self.sections.iter().enumerate() {
            steps.extend(section_steps(s, &self.pair, &format!("s{}", k + 1)));
        }
        steps
    }

    /// Runs the program on a product input.
    pub fn run(
        &self,
        input: &crate::state::ProductInput,
        mode: &MeasurementMode,
    ) -> Result<Vec<GateOutcome>, CircuitError> {
        let state = RegisterState::init_product(input, self.spin_init)?;
        self.run_state(state, mode)
    }

    /// Runs the program on an arbitrary initial register state.
    pub fn run_state(&self, state: RegisterState, mode: &MeasurementMode) -> Result<Vec<GateOutcome>, CircuitError> {
        let steps = self.steps();
        let mut out = Vec::new();
        let mut branch = Branch { state, outcomes: Vec::new(), corrections: Vec::new(), probability: 1.0 };
        match mode {
            MeasurementMode::Exhaustive => self.explore(&steps, 0, branch, &mut out)?,
            MeasurementMode::Sampled(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for step in &steps {
                    match step {
                        Step::Measure(x, y) => {
                            for spin in [*x, *y] {
                                let (o, p) = branch.state.measure_spin(spin, &mut rng)?;
                                branch.outcomes.push((spin, o));
                                branch.probability *= p;
                            }
                        }
                        other => self.apply_step(other, &mut branch)?,
                    }
                }
                out.push(self.finish(branch)?);
            }
        }
        Ok(out)
    }

    fn explore(
        &self,
        steps: &[Step],
        from: usize,
        mut branch: Branch,
        out: &mut Vec<GateOutcome>,
    ) -> Result<(), CircuitError> {
        for (k, step) in steps.iter().enumerate().skip(from) {
            if let Step::Measure(x, y) = step {
                for (ox, px, bx) in branch.state.measure_spin_branches(*x)? {
                    for (oy, py, by) in bx.measure_spin_branches(*y)? {
                        let mut outcomes = branch.outcomes.clone();
                        outcomes.extend([(*x, ox), (*y, oy)]);
                        let next = Branch {
                            state: by,
                            outcomes,
                            corrections: branch.corrections.clone(),
                            probability: branch.probability * px * py,
                        };
                        self.explore(steps, k + 1, next, out)?;
                    }
                }
                return Ok(());
            }
            self.apply_step(step, &mut branch)?;
        }
        out.push(self.finish(branch)?);
        Ok(())
    }

    fn apply_step(&self, step: &Step, branch: &mut Branch) -> Result<(), CircuitError> {
        match step {
            Step::Element(e) => {
                e.apply(&mut branch.state)?;
            }
            Step::Block(b) => {
                if self.use_direct_blocks {
                    b.apply_direct(&mut branch.state)?;
                } else {
                    b.apply(&mut branch.state)?;
                }
            }
            Step::SpinFlip(s) => branch.state.apply_single(QubitAddress::Spin(*s), &SingleQubitOp::pauli_x()),
            Step::Measure(..) => unreachable!("measurements are resolved by the runner"),
            Step::FeedForward(table) => {
                let fixes = feed_forward(&mut branch.state, table, &branch.outcomes)?;
                branch.corrections.extend(fixes);
            }
        }
        Ok(())
    }

    fn finish(&self, branch: Branch) -> Result<GateOutcome, CircuitError> {
        let Branch { mut state, outcomes, corrections, probability } = branch;
        let herald_ledger = state.ledger().to_vec();
        let loss = state.loss();
        let success_probability = state.renormalize()?;
        Ok(GateOutcome {
            variant: self.variant,
            conditional_state: state,
            success_probability,
            branch_probability: probability,
            spin_outcomes: outcomes,
            corrections_applied: corrections,
            herald_ledger,
            loss,
        })
    }

    /// Runs the program on `state` with every spin measurement replaced by a
    /// projection onto the given outcome, without renormalizing. The result
    /// depends linearly on the input.
    pub fn run_projected(
        &self,
        state: RegisterState,
        outcomes: &[(SpinId, Spin)],
    ) -> Result<RegisterState, CircuitError> {
        let mut branch = Branch { state, outcomes: Vec::new(), corrections: Vec::new(), probability: 1.0 };
        for step in self.steps() {
            match step {
                Step::Measure(x, y) => {
                    for spin in [x, y] {
                        let o = outcome_of(outcomes, spin)?;
                        let keep = Term::bit(QubitAddress::Spin(spin), o.bit());
                        for (i, a) in branch.state.amplitudes_mut().iter_mut().enumerate() {
                            if !keep.matches(i) {
                                *a = C64::new(0.0, 0.0);
                            }
                        }
                        branch.outcomes.push((spin, o));
                    }
                }
                other => self.apply_step(&other, &mut branch)?,
            }
        }
        Ok(branch.state)
    }

    /// Runs every coherent step and skips the spin measurements and their
    /// corrections. Trace, ledger and loss equal those of any measured run.
    pub fn run_unmeasured(&self, state: RegisterState) -> Result<RegisterState, CircuitError> {
        let mut branch = Branch { state, outcomes: Vec::new(), corrections: Vec::new(), probability: 1.0 };
        for step in self.steps() {
            match step {
                Step::Measure(..) | Step::FeedForward(_) => {}
                other => self.apply_step(&other, &mut branch)?,
            }
        }
        Ok(branch.state)
    }

    /// Conditional photonic operator of one outcome branch, extracted column
    /// by column from the 64 photonic basis inputs. `op[out][in]`.
    pub fn conditional_operator(&self, outcomes: &[(SpinId, Spin)]) -> Result<Vec<Vec<C64>>, CircuitError> {
        let mut op = vec![vec![C64::new(0.0, 0.0); PHOTONIC_DIM]; PHOTONIC_DIM];
        let mut final_spins = self.spin_init;
        for (s, o) in outcomes {
            final_spins[s.index()] = *o;
        }
        let offset: usize = final_spins.iter().enumerate().map(|(k, s)| s.bit() << (PHOTON_QUBITS + k)).sum();
        for col in 0..PHOTONIC_DIM {
            let mut basis = vec![C64::new(0.0, 0.0); PHOTONIC_DIM];
            basis[col] = C64::new(1.0, 0.0);
            let input = RegisterState::from_photonic(&basis, self.spin_init);
            let out = self.run_projected(input, outcomes)?;
            for (row, line) in op.iter_mut().enumerate() {
                line[col] = out.amplitudes()[offset + row];
            }
        }
        Ok(op)
    }

    /// Every measured spin with every outcome combination, in measurement
    /// order.
    pub fn outcome_combinations(&self) -> Vec<Vec<(SpinId, Spin)>> {
        let spins: Vec<SpinId> = self.sections.iter().flat_map(|s| [s.x_spin, s.y_spin]).collect();
        (0..1usize << spins.len())
            .map(|mask| {
                spins.iter().enumerate().map(|(k, &s)| (s, Spin::from_bit(mask >> (spins.len() - 1 - k)))).collect()
            })
            .collect()
    }
}

struct Branch {
    state: RegisterState,
    outcomes: Vec<(SpinId, Spin)>,
    corrections: Vec<Correction>,
    probability: f64,
}

fn block(kind: BlockKind, photon: Photon, mode: Term, spin: SpinId, pair: &ReflectionPair, label: String) -> Step {
    Step::Block(BlockOperator::new(kind, photon, mode, spin, *pair).with_label(label))
}

fn vbs(mode: Term, t: C64, label: String) -> Step {
    Step::Element(Element::Vbs { mode, t, sink: Sink::Detector(DetectorId::new(label)) })
}

fn rail(photon: Photon, r: usize) -> Term {
    Term::bit(QubitAddress::Spatial(photon), r)
}

fn control_steps(photon: Photon, dof: Dof, spin: SpinId, pair: &ReflectionPair, label: &str) -> Vec<Step> {
    match dof {
        Dof::Polarization => (0..2)
            .map(|r| block(BlockKind::Block1, photon, rail(photon, r), spin, pair, format!("{label}/{photon}{r}")))
            .collect(),
        Dof::Spatial => vec![
            block(BlockKind::Block2, photon, rail(photon, 1), spin, pair, format!("{label}/{photon}1")),
            vbs(rail(photon, 0), pair.success_amplitude(), format!("{label}/{photon}0/VBS")),
            Step::Element(Element::DelayLine),
        ],
    }
}

/// Controlled-controlled phase flip on the polarization of `c`, flipping
/// exactly when both spins are `|-1>`.
fn pol_target_steps(x: SpinId, y: SpinId, pair: &ReflectionPair, label: &str) -> Vec<Step> {
    let pol = QubitAddress::Polarization(Photon::C);
    let route = QubitAddress::Ancilla(Ancilla::Route);
    let t = pair.success_amplitude();
    let mut steps = Vec::new();
    for r in 0..2 {
        let m = rail(Photon::C, r);
        let coupled = m.and(route, 1);
        let h = || Step::Element(Element::Hwp22 { pol, mode: coupled });
        let b = |spin, k| block(BlockKind::Block1, Photon::C, coupled, spin, pair, format!("{label}/c{r}/{k}"));
        steps.push(Step::Element(Element::Cpbs { pol, arm: Ancilla::Route, mode: m }));
        steps.extend([h(), b(x, 1), h(), b(y, 2), h(), b(x, 3), h()]);
        steps.push(vbs(m.and(route, 0), t * t * t, format!("{label}/c{r}/VBS")));
        steps.push(Step::Element(Element::DetectorPort {
            id: DetectorId::new(format!("{label}/c{r}/D")),
            subspace: Predicate::differ(m, route, pol),
        }));
        steps.push(Step::Element(Element::Cpbs { pol, arm: Ancilla::Route, mode: m }));
    }
    steps
}

/// Phase flip on rail 1 of `c`, flipping exactly when `X = -1` and `Y = +1`.
fn spatial_target_steps(x: SpinId, y: SpinId, pair: &ReflectionPair, label: &str) -> Vec<Step> {
    let route = QubitAddress::Ancilla(Ancilla::Route);
    let t = pair.success_amplitude();
    let r1 = rail(Photon::C, 1);
    let (d0, d1) = (r1.and(route, 0), r1.and(route, 1));
    let bs = || Step::Element(Element::BeamSplitter { rail: route, mode: r1 });
    let b = |spin, mode, k| block(BlockKind::Block2, Photon::C, mode, spin, pair, format!("{label}/d/{k}"));
    let v = |mode, k| vbs(mode, t, format!("{label}/d/{k}/VBS"));
    vec![
        vbs(rail(Photon::C, 0), t * t * t, format!("{label}/c0/VBS")),
        Step::Element(Element::DelayLine),
        bs(),
        b(x, d1, 1),
        v(d0, 1),
        bs(),
        b(y, d1, 2),
        v(d0, 2),
        bs(),
        v(d1, 3),
        b(x, d0, 3),
        bs(),
        Step::Element(Element::DetectorPort { id: DetectorId::new(format!("{label}/d/D")), subspace: d1.into() }),
    ]
}

fn target_hadamard(target: Dof) -> Step {
    let mode = Term::ALWAYS;
    Step::Element(match target {
        Dof::Polarization => Element::Hwp22 { pol: QubitAddress::Polarization(Photon::C), mode },
        Dof::Spatial => Element::BeamSplitter { rail: QubitAddress::Spatial(Photon::C), mode },
    })
}

/// Full step list of one section.
pub fn section_steps(s: &SectionWiring, pair: &ReflectionPair, label: &str) -> Vec<Step> {
    let he = || [Step::Element(Element::SpinHadamard(s.x_spin)), Step::Element(Element::SpinHadamard(s.y_spin))];
    let mut steps = Vec::new();
    steps.extend(he());
    steps.extend(control_steps(Photon::A, s.control_a, s.y_spin, pair, label));
    steps.extend(control_steps(Photon::B, s.control_b, s.x_spin, pair, label));
    steps.extend(he());
    steps.push(target_hadamard(s.target));
    steps.extend(match s.target {
        Dof::Polarization => pol_target_steps(s.x_spin, s.y_spin, pair, label),
        Dof::Spatial => spatial_target_steps(s.x_spin, s.y_spin, pair, label),
    });
    steps.extend(he());
    steps.push(Step::Measure(s.x_spin, s.y_spin));
    steps.push(Step::FeedForward(s.feed_forward_table()));
    steps.push(target_hadamard(s.target));
    steps
}

pub fn run_pol_toffoli(
    input: &crate::state::ProductInput,
    pair: &ReflectionPair,
    mode: &MeasurementMode,
) -> Result<Vec<GateOutcome>, CircuitError> {
    GateProgram::new(GateVariant::PolToffoli, *pair).run(input, mode)
}

pub fn run_spatial_toffoli(
    input: &crate::state::ProductInput,
    pair: &ReflectionPair,
    mode: &MeasurementMode,
) -> Result<Vec<GateOutcome>, CircuitError> {
    GateProgram::new(GateVariant::SpatialToffoli, *pair).run(input, mode)
}

pub fn run_hyper_toffoli(
    input: &crate::state::ProductInput,
    pair: &ReflectionPair,
    mode: &MeasurementMode,
) -> Result<Vec<GateOutcome>, CircuitError> {
    GateProgram::new(GateVariant::HyperToffoli, *pair).run(input, mode)
}

pub fn run_hybrid(
    variant: GateVariant,
    input: &crate::state::ProductInput,
    pair: &ReflectionPair,
    mode: &MeasurementMode,
) -> Result<Vec<GateOutcome>, CircuitError> {
    if !variant.is_hybrid() {
        return Err(CircuitError::NotHybrid(variant));
    }
    GateProgram::new(variant, *pair).run(input, mode)
}

/// Runs any variant.
pub fn run_variant(
    variant: GateVariant,
    input: &crate::state::ProductInput,
    pair: &ReflectionPair,
    mode: &MeasurementMode,
) -> Result<Vec<GateOutcome>, CircuitError> {
    GateProgram::new(variant, *pair).run(input, mode)
}
