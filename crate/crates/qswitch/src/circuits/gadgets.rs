//! Weakly fault-tolerant XX/ZZ rotation gadgets and the gadget-compiled logical Hadamard.

use super::prep::{block_circuit, GADGET_ANC};
use super::{Basis, Circuit, Cond};
use crate::codes::v1_partner;
use crate::error::{Error, Result};
use crate::pauli::{GateKind, Pauli};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    XX,
    ZZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AncillaInput {
    Bell,
    PlusPlus,
}

impl AncillaInput {
    pub fn output(self) -> AncillaInput {
        match self {
            AncillaInput::Bell => AncillaInput::PlusPlus,
            AncillaInput::PlusPlus => AncillaInput::Bell,
        }
    }
}

/// A gadget version. `recovery` is a dense Pauli string on (data1, data2, anc1, anc2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetVariant {
    pub rotation: Rotation,
    pub ancilla_input: AncillaInput,
    pub recovery: &'static str,
}

// Qubit roles inside a gadget sequence.
const D1: usize = 0;
const D2: usize = 1;
const A1: usize = 2;
const A2: usize = 3;

struct Sequence {
    /// Hadamards on both data qubits before and after (turns a ZZ† core into an XX rotation).
    conjugate_h: bool,
    gates: &'static [(GateKind, usize, usize)],
    recovery: &'static str,
}

use GateKind::{Rx, Rxdg, Xx, Yy, Yydg, Zz, Zzdg};

const ZZ_BELL: Sequence = Sequence {
    conjugate_h: false,
    gates: &[(Rxdg, A1, A1), (Zz, D1, A1), (Rx, A1, A1), (Zz, D2, A1), (Yy, D1, A1), (Xx, D1, A2), (Yydg, D1, A1), (Zz, D2, A2)],
    recovery: "ZIZI",
};

const ZZ_PLUS: Sequence = Sequence {
    conjugate_h: false,
    gates: &[(Yy, D1, A1), (Zz, D2, A2), (Rx, A2, A2), (GateKind::Xxdg, D1, A2), (Yy, D1, A1), (Zz, D1, A2), (Rx, A2, A2), (Zz, D2, A1)],
    recovery: "XIXI",
};

const XX_PLUS: Sequence = Sequence {
    conjugate_h: true,
    gates: &[(Yy, D1, A1), (Zz, D2, A2), (Rx, A2, A2), (Xx, D1, A2), (Yy, D1, A1), (Zz, D1, A2), (Zz, D2, A1), (Rx, A1, A1)],
    recovery: "YIYI",
};

const XX_BELL: Sequence = Sequence {
    conjugate_h: true,
    gates: &[(Rx, A1, A1), (Zzdg, D1, A1), (Zz, D2, A1), (Zz, D2, A2), (Yy, D2, A1), (Xx, D2, A2), (Yy, D2, A1), (Zz, D1, A2)],
    recovery: "IZII",
};

fn sequence(rotation: Rotation, input: AncillaInput) -> &'static Sequence {
    match (rotation, input) {
        (Rotation::ZZ, AncillaInput::Bell) => &ZZ_BELL,
        (Rotation::ZZ, AncillaInput::PlusPlus) => &ZZ_PLUS,
        (Rotation::XX, AncillaInput::Bell) => &XX_BELL,
        (Rotation::XX, AncillaInput::PlusPlus) => &XX_PLUS,
    }
}

/// Reference recovery table, for comparison with the derived recoveries.
pub fn reference_recovery(rotation: Rotation, input: AncillaInput) -> &'static str {
    match (rotation, input) {
        (Rotation::ZZ, AncillaInput::Bell) => "ZIZI",
        (Rotation::ZZ, AncillaInput::PlusPlus) => "XIXI",
        (Rotation::XX, AncillaInput::Bell) => "IZYI",
        (Rotation::XX, AncillaInput::PlusPlus) => "YIYI",
    }
}

impl GadgetVariant {
    pub fn new(rotation: Rotation, ancilla_input: AncillaInput) -> GadgetVariant {
        GadgetVariant { rotation, ancilla_input, recovery: sequence(rotation, ancilla_input).recovery }
    }

    pub fn all() -> [GadgetVariant; 4] {
        [
            GadgetVariant::new(Rotation::ZZ, AncillaInput::Bell),
            GadgetVariant::new(Rotation::ZZ, AncillaInput::PlusPlus),
            GadgetVariant::new(Rotation::XX, AncillaInput::Bell),
            GadgetVariant::new(Rotation::XX, AncillaInput::PlusPlus),
        ]
    }

    /// The ideal rotation the gadget implements: (I + i·XX)/√2 or (I − i·ZZ)/√2.
    pub fn ideal_kind(&self) -> GateKind {
        match self.rotation {
            Rotation::XX => GateKind::Xx,
            Rotation::ZZ => GateKind::Zz,
        }
    }
}

pub fn append_ancilla_prep(c: &mut Circuit, state: AncillaInput, a: [usize; 2]) {
    match state {
        AncillaInput::Bell => {
            c.init(a[0], Basis::X).init(a[1], Basis::Z).cnot(a[0], a[1]);
        }
        AncillaInput::PlusPlus => {
            c.init(a[0], Basis::X).init(a[1], Basis::X);
        }
    }
}

/// Measures the ancillas and discards unless they are in `state`. The Bell check unwinds the
/// Bell encoder and reads both qubits in Z.
pub fn append_ancilla_check(c: &mut Circuit, state: AncillaInput, a: [usize; 2], name: &str) {
    let basis = match state {
        AncillaInput::PlusPlus => Basis::X,
        AncillaInput::Bell => {
            c.cnot(a[0], a[1]).g1(GateKind::H, a[0]);
            Basis::Z
        }
    };
    for (k, &q) in a.iter().enumerate() {
        let name = c.fresh(&format!("{name}{}", k + 1));
        let m = c.measure(q, basis, &name);
        c.discard_if(Cond::bit(m));
    }
}

/// Gate body plus recovery, with no ancilla preparation or final check.
pub fn append_gadget_body(c: &mut Circuit, v: &GadgetVariant, d: (usize, usize), a: [usize; 2]) -> Result<()> {
    if d.0 == d.1 || a.contains(&d.0) || a.contains(&d.1) || a[0] == a[1] {
        return Err(Error::InvalidTarget(format!("gadget on data ({}, {}) with ancillas {:?}", d.0, d.1, a)));
    }
    let seq = sequence(v.rotation, v.ancilla_input);
    let role = [d.0, d.1, a[0], a[1]];
    if seq.conjugate_h {
        c.g1(GateKind::H, d.0).g1(GateKind::H, d.1);
    }
    for &(k, x, y) in seq.gates {
        if k.arity() == 1 {
            c.g1(k, role[x]);
        } else {
            c.g2(k, role[x], role[y]);
        }
    }
    if seq.conjugate_h {
        c.g1(GateKind::H, d.0).g1(GateKind::H, d.1);
    }
    let mut rec = Pauli::identity(c.n);
    for (k, ch) in seq.recovery.chars().enumerate() {
        if ch != 'I' {
            rec = rec.mul(&Pauli::single(c.n, role[k], ch));
        }
    }
    c.correct(rec, Cond::always());
    Ok(())
}

/// Standalone gadget on a single block: prepares the ancilla input, runs the gadget, applies
/// the recovery and checks the ancilla output.
pub fn build_rotation_gadget(v: &GadgetVariant, data_pair: (usize, usize)) -> Result<Circuit> {
    if data_pair.0 >= 8 || data_pair.1 >= 8 {
        return Err(Error::InvalidTarget(format!("data pair ({}, {})", data_pair.0, data_pair.1)));
    }
    let mut c = block_circuit();
    append_ancilla_prep(&mut c, v.ancilla_input, GADGET_ANC);
    append_gadget_body(&mut c, v, data_pair, GADGET_ANC)?;
    append_ancilla_check(&mut c, v.ancilla_input.output(), GADGET_ANC, "gadget_check");
    c.validate()?;
    Ok(c)
}

/// H̄_j on a Version 1 block: ZZ(q,0) then XX(q,6) then ZZ(q,0) with ancilla handoff
/// Bell → ++ → Bell → ++, a final X-basis ancilla check and the byproduct Y_q X6 Z0.
pub fn append_logical_hadamard(c: &mut Circuit, j: usize, offset: usize) -> Result<()> {
    let q = v1_partner(j)? + offset;
    let (z0, x6) = (offset, offset + 6);
    let a = GADGET_ANC;
    append_ancilla_prep(c, AncillaInput::Bell, a);
    append_gadget_body(c, &GadgetVariant::new(Rotation::ZZ, AncillaInput::Bell), (q, z0), a)?;
    append_gadget_body(c, &GadgetVariant::new(Rotation::XX, AncillaInput::PlusPlus), (q, x6), a)?;
    append_gadget_body(c, &GadgetVariant::new(Rotation::ZZ, AncillaInput::Bell), (q, z0), a)?;
    append_ancilla_check(c, AncillaInput::PlusPlus, a, &format!("h{j}_anc"));
    let byproduct = Pauli::single(c.n, q, 'Y').mul(&Pauli::single(c.n, x6, 'X')).mul(&Pauli::single(c.n, z0, 'Z'));
    c.correct(byproduct, Cond::always());
    Ok(())
}

pub fn build_logical_hadamard(j: usize) -> Result<Circuit> {
    let mut c = block_circuit();
    append_logical_hadamard(&mut c, j, 0)?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::super::prep::BLOCK_QUBITS;
    use super::super::Op;
    use super::*;
    use crate::pauli::Gate;
    use crate::statevec::{equal_up_to_global_phase, StateVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Runs gadget gates on 4 qubits (d1, d2, a1, a2) in statevec, returns the final state.
    fn run_core(v: &GadgetVariant, data: usize) -> StateVector {
        let mut c = Circuit::new(4, vec![0, 1], vec![2, 3], vec![]);
        append_gadget_body(&mut c, v, (0, 1), [2, 3]).unwrap();
        let mut sv = StateVector::basis(4, data).unwrap();
        match v.ancilla_input {
            AncillaInput::Bell => {
                sv.apply(&Gate::one(GateKind::H, 2)).unwrap();
                sv.apply(&Gate::cnot(2, 3)).unwrap();
            }
            AncillaInput::PlusPlus => {
                sv.apply(&Gate::one(GateKind::H, 2)).unwrap();
                sv.apply(&Gate::one(GateKind::H, 3)).unwrap();
            }
        }
        for op in &c.ops {
            match op {
                Op::Gate(g) => sv.apply(g).unwrap(),
                Op::Correction { pauli, .. } => sv.apply_pauli(pauli),
                _ => unreachable!(),
            }
        }
        sv
    }

    fn expected(v: &GadgetVariant, data: usize) -> StateVector {
        let mut sv = StateVector::basis(4, data).unwrap();
        sv.apply(&Gate::two(v.ideal_kind(), 0, 1)).unwrap();
        match v.ancilla_input.output() {
            AncillaInput::Bell => {
                sv.apply(&Gate::one(GateKind::H, 2)).unwrap();
                sv.apply(&Gate::cnot(2, 3)).unwrap();
            }
            AncillaInput::PlusPlus => {
                sv.apply(&Gate::one(GateKind::H, 2)).unwrap();
                sv.apply(&Gate::one(GateKind::H, 3)).unwrap();
            }
        }
        sv
    }

    #[test]
    fn gadgets_implement_rotation_with_declared_ancilla_output() {
        for v in GadgetVariant::all() {
            for b in 0..4 {
                assert!(equal_up_to_global_phase(&run_core(&v, b), &expected(&v, b), 1e-10), "{v:?} on |{b}>");
            }
            // a superposed data input exposes relative phases between basis branches
            let mix = |f: &dyn Fn(usize) -> StateVector| {
                let mut acc = vec![num_complex::Complex64::new(0.0, 0.0); 16];
                for (b, coef) in [(0usize, 0.5), (1, 0.5), (2, -0.5), (3, 0.5)] {
                    for (i, a) in f(b).amplitudes().iter().enumerate() {
                        acc[i] += a * coef;
                    }
                }
                StateVector::from_amplitudes(acc).unwrap()
            };
            let got = mix(&|b| run_core(&v, b));
            let want = mix(&|b| expected(&v, b));
            assert!(equal_up_to_global_phase(&got, &want, 1e-10), "{v:?} on superposition");
        }
    }

    #[test]
    fn three_recoveries_match_reference_table() {
        for v in GadgetVariant::all() {
            let reference = reference_recovery(v.rotation, v.ancilla_input);
            if (v.rotation, v.ancilla_input) == (Rotation::XX, AncillaInput::Bell) {
                assert_ne!(v.recovery, reference);
            } else {
                assert_eq!(v.recovery, reference);
            }
        }
    }

    #[test]
    fn noiseless_xx_bell_gadget_on_zero_data() {
        let v = GadgetVariant::new(Rotation::XX, AncillaInput::Bell);
        let c = build_rotation_gadget(&v, (0, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut sv = StateVector::new(BLOCK_QUBITS).unwrap();
        for op in &c.ops {
            match op {
                Op::Gate(g) => sv.apply(g).unwrap(),
                Op::Init { q, basis } => sv.reset(*q, *basis == Basis::X, &mut rng),
                Op::Correction { pauli, .. } => sv.apply_pauli(pauli),
                Op::Measure { q, basis, .. } => {
                    let p = Pauli::single(BLOCK_QUBITS, *q, if *basis == Basis::X { 'X' } else { 'Z' });
                    assert_eq!(sv.measure(&p, &mut rng).unwrap(), 1);
                }
                Op::DiscardIf(_) => {}
            }
        }
        for q in GADGET_ANC {
            sv.reset(q, false, &mut rng);
        }
        let mut want = StateVector::new(BLOCK_QUBITS).unwrap();
        want.apply(&Gate::two(GateKind::Xx, 0, 1)).unwrap();
        assert!(equal_up_to_global_phase(&sv, &want, 1e-10));
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        let v = GadgetVariant::new(Rotation::ZZ, AncillaInput::Bell);
        assert!(build_rotation_gadget(&v, (3, 3)).is_err());
        assert!(build_rotation_gadget(&v, (0, 9)).is_err());
        assert!(build_logical_hadamard(4).is_err());
    }

    #[test]
    fn hadamard_pairs_follow_partner_qubits() {
        let c = build_logical_hadamard(3).unwrap();
        let pairs: Vec<(usize, usize)> = c
            .ops
            .iter()
            .filter_map(|o| match o {
                Op::Gate(g) if g.kind.arity() == 2 && g.q[0] < 8 && g.q[1] >= 10 => Some((g.q[0], g.q[1])),
                _ => None,
            })
            .collect();
        assert!(pairs.iter().all(|&(d, _)| [0, 1, 6].contains(&d)));
    }
}
