//! Circuit execution with injected faults, shot classification, the switching protocols and
//! exhaustive single-fault enumeration.

use crate::circuits::prep::{append_switch, block_circuit, embed, target_group, BLOCK_QUBITS};
use crate::circuits::{Basis, Circuit, Op};
use crate::codes::{code, gauge_x, gauge_z, Direction, Version};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::pauli::{Gate, Pauli};
use crate::statevec::StateVector;
use crate::tableau::{shot_rng, MeasurementRecord, StabilizerState};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write;

/// Simulator interface used by the executor.
pub trait Backend {
    fn n(&self) -> usize;
    fn apply_gate(&mut self, g: &Gate) -> Result<()>;
    fn apply_pauli(&mut self, p: &Pauli);
    fn measure(&mut self, p: &Pauli) -> Result<i8>;
    fn reset(&mut self, q: usize, basis: Basis);
    /// ⟨p⟩, exact ±1/0 for the tableau.
    fn expectation(&self, p: &Pauli) -> f64;
}

impl Backend for StabilizerState {
    fn n(&self) -> usize {
        StabilizerState::n(self)
    }
    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        StabilizerState::apply_gate(self, g)
    }
    fn apply_pauli(&mut self, p: &Pauli) {
        self.inject_error(p)
    }
    fn measure(&mut self, p: &Pauli) -> Result<i8> {
        StabilizerState::measure(self, p)
    }
    fn reset(&mut self, q: usize, basis: Basis) {
        StabilizerState::reset(self, q, basis == Basis::X)
    }
    fn expectation(&self, p: &Pauli) -> f64 {
        StabilizerState::expectation(self, p) as f64
    }
}

/// State vector paired with its measurement generator.
#[derive(Clone, Debug)]
pub struct SvBackend {
    pub sv: StateVector,
    pub rng: ChaCha8Rng,
}

impl Backend for SvBackend {
    fn n(&self) -> usize {
        self.sv.n()
    }
    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        self.sv.apply(g)
    }
    fn apply_pauli(&mut self, p: &Pauli) {
        self.sv.apply_pauli(p)
    }
    fn measure(&mut self, p: &Pauli) -> Result<i8> {
        self.sv.measure(p, &mut self.rng)
    }
    fn reset(&mut self, q: usize, basis: Basis) {
        self.sv.reset(q, basis == Basis::X, &mut self.rng)
    }
    fn expectation(&self, p: &Pauli) -> f64 {
        self.sv.expectation(p)
    }
}

/// Tableau until the first non-Clifford gate, then a state vector.
#[derive(Clone, Debug)]
pub enum HybridBackend {
    Tableau(StabilizerState),
    Dense(SvBackend),
}

impl HybridBackend {
    pub fn new(n: usize, rng: ChaCha8Rng) -> HybridBackend {
        HybridBackend::Tableau(StabilizerState::new(n, rng))
    }
}

macro_rules! hybrid {
    ($s:expr, $b:ident => $e:expr) => {
        match $s {
            HybridBackend::Tableau($b) => $e,
            HybridBackend::Dense($b) => $e,
        }
    };
}

impl Backend for HybridBackend {
    fn n(&self) -> usize {
        hybrid!(self, b => b.n())
    }
    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if let HybridBackend::Tableau(st) = self {
            if !g.kind.is_clifford() {
                let sv = StateVector::from_tableau(st)?;
                *self = HybridBackend::Dense(SvBackend { sv, rng: st.rng.clone() });
            }
        }
        hybrid!(self, b => Backend::apply_gate(b, g))
    }
    fn apply_pauli(&mut self, p: &Pauli) {
        hybrid!(self, b => Backend::apply_pauli(b, p))
    }
    fn measure(&mut self, p: &Pauli) -> Result<i8> {
        hybrid!(self, b => Backend::measure(b, p))
    }
    fn reset(&mut self, q: usize, basis: Basis) {
        hybrid!(self, b => Backend::reset(b, q, basis))
    }
    fn expectation(&self, p: &Pauli) -> f64 {
        hybrid!(self, b => Backend::expectation(b, p))
    }
}

/// A single fault: `pauli` (on the full register) after gate `op`, or before measurement `op`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FaultSite {
    pub op: usize,
    pub pauli: Pauli,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShotRecord {
    /// Measurement bits by label index (true for −1).
    pub bits: Vec<bool>,
    pub discarded: bool,
    pub corrections: Vec<Pauli>,
}

impl ShotRecord {
    pub fn record(&self, c: &Circuit) -> MeasurementRecord {
        let mut r = MeasurementRecord::default();
        for (l, name) in c.labels.iter().enumerate() {
            if l < self.bits.len() {
                r.push(name, if self.bits[l] { -1 } else { 1 });
            }
        }
        r
    }

    pub fn outputs(&self, c: &Circuit) -> Vec<bool> {
        c.outputs.iter().map(|o| o.eval(&self.bits)).collect()
    }
}

fn basis_pauli(n: usize, q: usize, b: Basis) -> Pauli {
    Pauli::single(n, q, if b == Basis::X { 'X' } else { 'Z' })
}

/// Runs `c` on `b`. `faults` must be sorted by op index. Stops at the first discard.
pub fn execute<B: Backend>(c: &Circuit, b: &mut B, faults: &[FaultSite]) -> Result<ShotRecord> {
    let mut rec = ShotRecord { bits: vec![false; c.labels.len()], ..Default::default() };
    let mut next = 0;
    for (i, op) in c.ops.iter().enumerate() {
        match op {
            Op::Gate(g) => b.apply_gate(g)?,
            Op::Init { q, basis } => b.reset(*q, *basis),
            Op::Measure { q, basis, label } => {
                while next < faults.len() && faults[next].op == i {
                    b.apply_pauli(&faults[next].pauli);
                    next += 1;
                }
                rec.bits[*label] = b.measure(&basis_pauli(c.n, *q, *basis))? == -1;
            }
            Op::Correction { pauli, cond } => {
                if cond.eval(&rec.bits) {
                    b.apply_pauli(pauli);
                    rec.corrections.push(*pauli);
                }
            }
            Op::DiscardIf(cond) => {
                if cond.eval(&rec.bits) {
                    rec.discarded = true;
                    return Ok(rec);
                }
            }
        }
        while next < faults.len() && faults[next].op == i {
            b.apply_pauli(&faults[next].pauli);
            next += 1;
        }
    }
    Ok(rec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    Success,
    Discard,
    Failure,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Success => "success",
            Classification::Discard => "discard",
            Classification::Failure => "failure",
        }
    }
}

/// What a correct accepted shot looks like.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    /// +1 eigenoperators on the full register: stabilizers, then logicals.
    State { stabilizers: Vec<Pauli>, logicals: Vec<Pauli> },
    /// Accepted logical readouts, as bit vectors over `Circuit::outputs`.
    Outputs(Vec<Vec<bool>>),
}

impl Reference {
    /// Reference for a logical basis state of one block embedded at data offset 0.
    pub fn logical_state(version: Version, state: &str, n: usize) -> Result<Reference> {
        let g = target_group(version, state)?;
        let k = code(version).stabilizers.len();
        let e = |p: &Pauli| embed(p, n, 0);
        Ok(Reference::State { stabilizers: g[..k].iter().map(e).collect(), logicals: g[k..].iter().map(e).collect() })
    }

    pub fn grover() -> Reference {
        let bits = |s: &str| s.chars().map(|c| c == '1').collect();
        Reference::Outputs(crate::circuits::logical::GROVER_MARKED.iter().map(|s| bits(s)).collect())
    }
}

/// Final diagnostic: discard if the shot was discarded or a reference stabilizer reads −1;
/// failure if a reference logical then reads −1. With `strict`, a logical that is not exactly
/// +1 (including a random one) counts as failure instead of being measured.
pub fn classify_shot<B: Backend>(b: &mut B, reference: &Reference, rec: &ShotRecord, c: &Circuit, strict: bool) -> Result<Classification> {
    if rec.discarded {
        return Ok(Classification::Discard);
    }
    match reference {
        Reference::State { stabilizers, logicals } => {
            for s in stabilizers {
                if b.measure(s)? == -1 {
                    return Ok(Classification::Discard);
                }
            }
            for l in logicals {
                let bad = if strict { b.expectation(l) < 1.0 - 1e-6 } else { b.measure(l)? == -1 };
                if bad {
                    return Ok(Classification::Failure);
                }
            }
            Ok(Classification::Success)
        }
        Reference::Outputs(ok) => {
            let out = rec.outputs(c);
            Ok(if ok.contains(&out) { Classification::Success } else { Classification::Failure })
        }
    }
}

/// Runs one shot on the backend suited to the circuit and classifies it.
pub fn run_shot(c: &Circuit, reference: &Reference, faults: &[FaultSite], rng: ChaCha8Rng, strict: bool) -> Result<(Classification, ShotRecord)> {
    if c.is_clifford() {
        let mut st = StabilizerState::new(c.n, rng);
        let rec = execute(c, &mut st, faults)?;
        Ok((classify_shot(&mut st, reference, &rec, c, strict)?, rec))
    } else {
        if c.n > crate::statevec::MAX_SV_QUBITS {
            return Err(Error::Capacity(c.n, crate::statevec::MAX_SV_QUBITS));
        }
        let mut b = HybridBackend::new(c.n, rng);
        let rec = execute(c, &mut b, faults)?;
        Ok((classify_shot(&mut b, reference, &rec, c, strict)?, rec))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchOutcome {
    pub direction: Direction,
    pub measurements: MeasurementRecord,
    pub accepted: bool,
    pub corrections_applied: Vec<Pauli>,
}

fn switch(state: &mut StabilizerState, dir: Direction, noise: &NoiseModel) -> Result<SwitchOutcome> {
    if state.n() != BLOCK_QUBITS {
        return Err(Error::Dimension(state.n(), BLOCK_QUBITS));
    }
    let mut c = block_circuit();
    append_switch(&mut c, dir, 0)?;
    let faults = noise.sample_faults(&c, &mut state.rng);
    let rec = execute(&c, state, &faults)?;
    Ok(SwitchOutcome {
        direction: dir,
        measurements: rec.record(&c),
        accepted: !rec.discarded,
        corrections_applied: rec.corrections,
    })
}

/// Switching round from Version 1 to Version 2 on a 12-qubit block state (data 0..8).
pub fn switch_1_to_2(state: &mut StabilizerState, noise: &NoiseModel) -> Result<SwitchOutcome> {
    switch(state, Direction::OneToTwo, noise)
}

/// Switching round from Version 2 to Version 1 on a 12-qubit block state (data 0..8).
pub fn switch_2_to_1(state: &mut StabilizerState, noise: &NoiseModel) -> Result<SwitchOutcome> {
    switch(state, Direction::TwoToOne, noise)
}

/// Gauge corrections a switching round is allowed to apply.
pub fn allowed_corrections(dir: Direction) -> Vec<Pauli> {
    let g = match dir {
        Direction::OneToTwo => gauge_x(),
        Direction::TwoToOne => gauge_z(),
    };
    g.iter().map(|p| embed(p, BLOCK_QUBITS, 0)).collect()
}

/// Every single fault of the circuit: all non-identity Paulis on each gate's support after
/// the gate, and one flip before each measurement.
pub fn fault_sites(c: &Circuit) -> Vec<FaultSite> {
    let mut out = vec![];
    for (i, op) in c.ops.iter().enumerate().skip(c.noise_from) {
        match op {
            Op::Gate(g) => {
                for pauli in support_paulis(c.n, g.qubits()) {
                    out.push(FaultSite { op: i, pauli });
                }
            }
            Op::Measure { q, basis, .. } => {
                let flip = if *basis == Basis::X { 'Z' } else { 'X' };
                out.push(FaultSite { op: i, pauli: Pauli::single(c.n, *q, flip) });
            }
            _ => {}
        }
    }
    out
}

/// Non-identity Paulis on `qubits`, in base-4 order with digit k for qubit k (I, X, Y, Z).
pub fn support_paulis(n: usize, qubits: &[usize]) -> Vec<Pauli> {
    let k = qubits.len() as u32;
    (1..4usize.pow(k))
        .map(|mut code| {
            let mut p = Pauli::identity(n);
            for &q in qubits {
                let letter = ['I', 'X', 'Y', 'Z'][code % 4];
                code /= 4;
                if letter != 'I' {
                    p = p.mul(&Pauli::single(n, q, letter));
                }
            }
            p
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaultRow {
    pub site_index: usize,
    pub op: usize,
    pub op_text: String,
    pub fault: String,
    pub classification: Classification,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FaultReport {
    pub total_sites: usize,
    pub detected: usize,
    pub benign: usize,
    pub logical_failures: Vec<FaultSite>,
    pub rows: Vec<FaultRow>,
}

impl FaultReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Config(e.to_string());
        wr.write_record(["site_index", "op", "fault_pauli", "classification"]).map_err(io)?;
        for r in &self.rows {
            wr.write_record([r.site_index.to_string(), r.op_text.clone(), r.fault.clone(), r.classification.name().to_string()])
                .map_err(io)?;
        }
        wr.flush().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

fn op_text(c: &Circuit, i: usize) -> String {
    match &c.ops[i] {
        Op::Gate(g) => g.to_string(),
        Op::Measure { q, basis, label } => format!("M {:?} {q} {}", basis, c.labels[*label]),
        other => format!("{other:?}"),
    }
}

/// Runs the circuit once per single fault (and per random branch) and classifies each run.
/// A site counts as a logical failure if any branch fails, as detected if any branch discards.
pub fn enumerate_faults(c: &Circuit, reference: &Reference, branches: u64, threads: usize) -> Result<FaultReport> {
    let sites = fault_sites(c);
    let classify = |idx: usize| -> Result<Classification> {
        let mut worst = Classification::Success;
        for br in 0..branches.max(1) {
            let rng = shot_rng(idx as u64, br);
            let (cl, _) = run_shot(c, reference, std::slice::from_ref(&sites[idx]), rng, true)?;
            match cl {
                Classification::Failure => return Ok(cl),
                Classification::Discard => worst = Classification::Discard,
                Classification::Success => {}
            }
        }
        Ok(worst)
    };
    let threads = threads.max(1).min(sites.len().max(1));
    let chunk = sites.len().div_ceil(threads).max(1);
    let results: Vec<Result<Classification>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..sites.len())
            .step_by(chunk)
            .map(|start| {
                let end = (start + chunk).min(sites.len());
                let f = &classify;
                s.spawn(move || (start..end).map(f).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut rep = FaultReport { total_sites: sites.len(), ..Default::default() };
    for (idx, r) in results.into_iter().enumerate() {
        let cl = r?;
        match cl {
            Classification::Success => rep.benign += 1,
            Classification::Discard => rep.detected += 1,
            Classification::Failure => rep.logical_failures.push(sites[idx].clone()),
        }
        rep.rows.push(FaultRow {
            site_index: idx,
            op: sites[idx].op,
            op_text: op_text(c, sites[idx].op),
            fault: sites[idx].pauli.to_string(),
            classification: cl,
        });
    }
    Ok(rep)
}

/// Noiseless preparation of a logical state followed by `tail`, which alone carries noise.
pub fn with_noiseless_prep(version: Version, state: &str, tail: &Circuit) -> Result<Circuit> {
    let mut c = crate::circuits::build_state_prep(version, state)?;
    c.mark_noiseless_prep_end();
    c.append(tail);
    c.validate()?;
    Ok(c)
}

/// Reference for a logical state after a Clifford map on the data block, given as the images of
/// its stabilizers and logicals.
pub fn mapped_reference(version: Version, state: &str, n: usize, map: impl Fn(&Pauli) -> Result<Pauli>) -> Result<Reference> {
    let Reference::State { stabilizers, logicals } = Reference::logical_state(version, state, n)? else { unreachable!() };
    let img = |v: Vec<Pauli>| v.iter().map(&map).collect::<Result<Vec<_>>>();
    Ok(Reference::State { stabilizers: img(stabilizers)?, logicals: img(logicals)? })
}

/// A circuit with the reference its accepted shots must match.
#[derive(Clone, Debug)]
pub struct NamedCircuit {
    pub name: String,
    pub circuit: Circuit,
    pub reference: Reference,
}

/// Ideal logical action of a single-block tail: conjugation by its rotations and byproducts.
fn logical_image(tail_gates: &[Gate], byproduct: Option<Pauli>) -> impl Fn(&Pauli) -> Result<Pauli> {
    let gates = tail_gates.to_vec();
    move |p: &Pauli| {
        let r = gates.iter().try_fold(*p, |acc, g| crate::pauli::conjugate(g, &acc))?;
        Ok(match byproduct {
            Some(b) if !r.commutes(&b) => r.neg(),
            _ => r,
        })
    }
}

/// Every circuit whose single-fault enumeration must report zero logical failures, plus the
/// flag-stripped switching negative control (named `negative-control`).
pub fn certification_suite() -> Result<Vec<NamedCircuit>> {
    use crate::circuits::gadgets::{AncillaInput, GadgetVariant, Rotation};
    use crate::circuits::prep::{append_switch_flags, STATES};
    use crate::circuits::{build_ghz, build_logical_hadamard, build_rotation_gadget, build_state_prep};
    let mut out = vec![];
    let n = BLOCK_QUBITS;
    // FT GHZ on its own register
    let ghz = build_ghz(8, false, true)?;
    let mut stabs = vec![Pauli::xs(9, &[0, 1, 2, 3, 4, 5, 6, 7])];
    stabs.extend((1..8).map(|j| Pauli::zs(9, &[0, j])));
    out.push(NamedCircuit { name: "ghz8-ft".into(), circuit: ghz, reference: Reference::State { stabilizers: stabs, logicals: vec![] } });
    for v in [Version::V1, Version::V2] {
        for s in STATES {
            out.push(NamedCircuit {
                name: format!("prep-v{}-{s}", v.number()),
                circuit: build_state_prep(v, s)?,
                reference: Reference::logical_state(v, s, n)?,
            });
        }
    }
    for (dir, from, to, tag) in [(Direction::OneToTwo, Version::V1, Version::V2, "1to2"), (Direction::TwoToOne, Version::V2, Version::V1, "2to1")] {
        for s in ["000", "+++"] {
            let mut tail = block_circuit();
            append_switch(&mut tail, dir, 0)?;
            out.push(NamedCircuit {
                name: format!("switch-{tag}-{s}"),
                circuit: with_noiseless_prep(from, s, &tail)?,
                reference: Reference::logical_state(to, s, n)?,
            });
            // the same round with the preparation also noisy
            let mut full = build_state_prep(from, s)?;
            full.append(&tail);
            out.push(NamedCircuit {
                name: format!("prep-switch-{tag}-{s}"),
                circuit: full,
                reference: Reference::logical_state(to, s, n)?,
            });
        }
    }
    for v in GadgetVariant::all() {
        let (pair, kind) = match v.rotation {
            Rotation::ZZ => ((4, 0), crate::pauli::GateKind::Zz),
            Rotation::XX => ((4, 6), crate::pauli::GateKind::Xx),
        };
        let tail = build_rotation_gadget(&v, pair)?;
        let tag = format!(
            "{}-{}",
            match v.rotation {
                Rotation::XX => "xx",
                Rotation::ZZ => "zz",
            },
            match v.ancilla_input {
                AncillaInput::Bell => "bell",
                AncillaInput::PlusPlus => "plus",
            }
        );
        for s in ["000", "+++"] {
            let map = logical_image(&[Gate::two(kind, pair.0, pair.1)], None);
            let e = |p: &Pauli| -> Result<Pauli> { map(&embed(&p.restrict(&(0..8).collect::<Vec<_>>()), 8, 0)).map(|q| embed(&q, n, 0)) };
            out.push(NamedCircuit {
                name: format!("gadget-{tag}-{s}"),
                circuit: with_noiseless_prep(Version::V1, s, &tail)?,
                reference: mapped_reference(Version::V1, s, n, e)?,
            });
        }
    }
    for j in 1..=3 {
        let tail = build_logical_hadamard(j)?;
        let crate::codes::Realization::Gadgets { rotations, byproduct } = crate::codes::v1_hadamard(j)? else { unreachable!() };
        let map = logical_image(&rotations, Some(byproduct));
        for s in ["000", "+++"] {
            let e = |p: &Pauli| -> Result<Pauli> { map(&p.restrict(&(0..8).collect::<Vec<_>>())).map(|q| embed(&q, n, 0)) };
            out.push(NamedCircuit {
                name: format!("hadamard-{j}-{s}"),
                circuit: with_noiseless_prep(Version::V1, s, &tail)?,
                reference: mapped_reference(Version::V1, s, n, e)?,
            });
        }
    }
    let mut tail = block_circuit();
    append_switch_flags(&mut tail, Direction::OneToTwo, 0, false)?;
    out.push(NamedCircuit {
        name: "negative-control".into(),
        circuit: with_noiseless_prep(Version::V1, "+++", &tail)?,
        reference: Reference::logical_state(Version::V2, "+++", n)?,
    });
    Ok(out)
}

/// Writes a fault report CSV to `path`.
pub fn write_fault_report(rep: &FaultReport, path: &std::path::Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(f);
    rep.write_csv(&mut w)?;
    w.flush().map_err(|e| Error::Config(e.to_string()))
}
