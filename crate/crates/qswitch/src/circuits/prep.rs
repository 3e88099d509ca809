//! Single-block register layout, Pauli measurement gadgets, GHZ encoders, state preparation
//! and the two switching protocols.

use super::{Basis, Circuit, Cond};
use crate::codes::{self, code, complementary_check, gauge_x, gauge_z, partial_complement, x_all, z_all, Direction, Version};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Data qubits 0..8, measurement ancilla 8, flag 9, gadget ancillas 10 and 11.
pub const BLOCK_QUBITS: usize = 12;
pub const ANC: usize = 8;
pub const FLAG: usize = 9;
pub const GADGET_ANC: [usize; 2] = [10, 11];

pub fn block_circuit() -> Circuit {
    Circuit::new(BLOCK_QUBITS, (0..8).collect(), vec![ANC, GADGET_ANC[0], GADGET_ANC[1]], vec![FLAG])
}

/// Embeds an 8-qubit operator into an `n`-qubit register starting at `offset`.
pub fn embed(p: &Pauli, n: usize, offset: usize) -> Pauli {
    let map: Vec<usize> = (0..p.n).map(|q| q + offset).collect();
    p.relabel(n, &map)
}

/// Measures a Z-type or X-type Pauli with one ancilla, coupling the data in ascending order.
/// With a flag, the flag couples to the ancilla after the first and before the last data
/// coupling and a fired flag discards the run. Returns the outcome label.
pub fn append_pauli_measurement(c: &mut Circuit, op: &Pauli, anc: usize, flag: Option<usize>, name: &str) -> Result<usize> {
    let z_type = op.x == 0;
    if !(z_type || op.z == 0) || op.is_identity() || op.phase != 0 {
        return Err(Error::UnsupportedMeasurement(op.to_string()));
    }
    let support = op.support();
    let flag = flag.filter(|_| support.len() > 2);
    let (anc_basis, flag_basis) = if z_type { (Basis::Z, Basis::X) } else { (Basis::X, Basis::Z) };
    c.init(anc, anc_basis);
    if let Some(f) = flag {
        c.init(f, flag_basis);
    }
    let last = support.len() - 1;
    for (k, &q) in support.iter().enumerate() {
        if k == last {
            if let Some(f) = flag {
                flag_couple(c, z_type, anc, f);
            }
        }
        if z_type {
            c.cnot(q, anc);
        } else {
            c.cnot(anc, q);
        }
        if k == 0 {
            if let Some(f) = flag {
                flag_couple(c, z_type, anc, f);
            }
        }
    }
    let name = c.fresh(name);
    let m = c.measure(anc, anc_basis, &name);
    if let Some(f) = flag {
        let fname = c.fresh(&format!("{name}_flag"));
        let fl = c.measure(f, flag_basis, &fname);
        c.discard_if(Cond::bit(fl));
    }
    Ok(m)
}

fn flag_couple(c: &mut Circuit, z_type: bool, anc: usize, flag: usize) {
    if z_type {
        c.cnot(flag, anc);
    } else {
        c.cnot(anc, flag);
    }
}

/// Operators the single-block measurement builder accepts.
pub fn measurable_set() -> Vec<Pauli> {
    let mut v = gauge_x();
    v.extend(gauge_z());
    v.push(complementary_check(Direction::OneToTwo));
    v.push(complementary_check(Direction::TwoToOne));
    v.extend(gauge_x().iter().chain(gauge_z().iter()).map(partial_complement));
    v.push(x_all());
    v.push(z_all());
    v
}

/// Standalone circuit measuring one gauge operator, complementary check or weight-8 stabilizer.
pub fn build_gauge_measurement(op: &Pauli, flagged: bool) -> Result<Circuit> {
    if op.n != codes::N || !measurable_set().contains(op) {
        return Err(Error::UnsupportedMeasurement(op.to_string()));
    }
    let mut c = block_circuit();
    append_pauli_measurement(&mut c, &embed(op, BLOCK_QUBITS, 0), ANC, flagged.then_some(FLAG), "m")?;
    c.validate()?;
    Ok(c)
}

/// GHZ encoder on `qubits` rooted at the first one. The dual form prepares the root in |0⟩, the
/// rest in |+⟩ and reverses every CNOT. With `verify`, the ancilla checks the root parity before
/// and after the fan-out and a flipped outcome discards the run.
pub fn append_ghz(c: &mut Circuit, qubits: &[usize], dual: bool, verify: Option<usize>, name: &str) {
    let root = qubits[0];
    let (root_basis, leaf_basis) = if dual { (Basis::Z, Basis::X) } else { (Basis::X, Basis::Z) };
    c.init(root, root_basis);
    for &q in &qubits[1..] {
        c.init(q, leaf_basis);
    }
    let couple = |c: &mut Circuit, q: usize| {
        if dual {
            c.cnot(q, root);
        } else {
            c.cnot(root, q);
        }
    };
    if let Some(a) = verify {
        c.init(a, leaf_basis);
        couple(c, a);
    }
    for &q in &qubits[1..] {
        couple(c, q);
    }
    if let Some(a) = verify {
        couple(c, a);
        let name = c.fresh(name);
        let m = c.measure(a, leaf_basis, &name);
        c.discard_if(Cond::bit(m));
    }
}

pub fn build_ghz(n: usize, dual: bool, fault_tolerant: bool) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Dimension(n, 2));
    }
    let qubits: Vec<usize> = (0..n).collect();
    let (anc, total) = if fault_tolerant { (vec![n], n + 1) } else { (vec![], n) };
    let mut c = Circuit::new(total, qubits.clone(), anc, vec![]);
    append_ghz(&mut c, &qubits, dual, fault_tolerant.then_some(n), "ghz_check");
    c.validate()?;
    Ok(c)
}

/// Logical basis states with a supported preparation circuit.
pub const STATES: [&str; 4] = ["000", "+++", "++0", "00+"];

/// The +1 eigenoperators defining a logical state: code stabilizers then one logical per qubit.
pub fn target_group(version: Version, state: &str) -> Result<Vec<Pauli>> {
    let cd = code(version);
    let chars: Vec<char> = state.chars().collect();
    if chars.len() != 3 {
        return Err(Error::UnsupportedState(state.into()));
    }
    let mut g = cd.stabilizers.clone();
    for (j, ch) in chars.iter().enumerate() {
        g.push(match ch {
            '0' => cd.logical_z[j],
            '+' => cd.logical_x[j],
            _ => return Err(Error::UnsupportedState(state.into())),
        });
    }
    Ok(g)
}

/// Measures `gauge` and its complement inside the weight-8 stabilizer, discards on odd parity
/// and applies `fix` when the gauge reads −1.
fn append_gauge_fix(c: &mut Circuit, gauge: &Pauli, fix: &Pauli, name: &str) -> Result<()> {
    let n = c.n;
    let g = append_pauli_measurement(c, &embed(gauge, n, 0), ANC, Some(FLAG), name)?;
    let comp = partial_complement(gauge);
    let k = append_pauli_measurement(c, &embed(&comp, n, 0), ANC, Some(FLAG), &format!("{name}_comp"))?;
    c.discard_if(Cond::parity(&[g, k]));
    c.correct(embed(fix, n, 0), Cond::bit(g));
    Ok(())
}

/// Fault-tolerant preparation of a logical basis state on a single block.
pub fn build_state_prep(version: Version, state: &str) -> Result<Circuit> {
    let mut c = block_circuit();
    let v = Some(ANC);
    match (version, state) {
        (Version::V1, "000") => {
            append_ghz(&mut c, &[0, 1, 2, 4], false, v, "ghz_a");
            append_ghz(&mut c, &[7, 3, 5, 6], true, v, "ghz_b");
        }
        (Version::V1, "+++") => append_ghz(&mut c, &[7, 0, 1, 2, 3, 4, 5, 6], true, v, "ghz"),
        (Version::V1, "++0") => {
            c.init(0, Basis::X).init(1, Basis::Z).cnot(0, 1);
            append_ghz(&mut c, &[7, 2, 3, 4, 5, 6], true, v, "ghz");
        }
        (Version::V1, "00+") => {
            append_ghz(&mut c, &[0, 2, 4, 6], false, v, "ghz_a");
            append_ghz(&mut c, &[7, 1, 3, 5], true, v, "ghz_b");
            append_gauge_fix(&mut c, &gauge_x()[2], &gauge_z()[2], "gx6")?;
        }
        (Version::V2, "000") => append_ghz(&mut c, &[0, 1, 2, 3, 4, 5, 6, 7], false, v, "ghz"),
        (Version::V2, "+++") => {
            append_ghz(&mut c, &[7, 0, 1, 2, 3, 4, 5, 6], true, v, "ghz");
            append_switch(&mut c, Direction::OneToTwo, 0)?;
        }
        (Version::V2, "++0") => {
            for a in [0, 2, 4, 6] {
                c.init(a, Basis::X).init(a + 1, Basis::Z).cnot(a, a + 1);
            }
            append_gauge_fix(&mut c, &gauge_z()[2], &gauge_x()[2], "gz6")?;
        }
        (Version::V2, "00+") => {
            append_ghz(&mut c, &[0, 2, 4, 6], false, v, "ghz_a");
            append_ghz(&mut c, &[1, 3, 5, 7], false, v, "ghz_b");
        }
        _ => return Err(Error::UnsupportedState(format!("version {} state {state}", version.number()))),
    }
    c.validate()?;
    Ok(c)
}

/// Labels written by one switching round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwitchLabels {
    pub gauge: [usize; 3],
    pub check: usize,
    pub full: usize,
}

/// Appends a switching round on the block whose data starts at `offset`.
/// 1→2 measures the Z gauges (flagged), Z4Z5Z6Z7 and Z⊗8, accepts iff M4·M7 = +1 and M8 = +1,
/// then applies G^X_i for each −1. 2→1 measures the X gauges (unflagged), X0X1X2X4 and X⊗8,
/// accepts iff the four-way product and M8 are +1, then applies G^Z_i for each −1.
pub fn append_switch(c: &mut Circuit, dir: Direction, offset: usize) -> Result<SwitchLabels> {
    append_switch_flags(c, dir, offset, true)
}

/// `append_switch` with the flags optionally stripped (a negative control, not fault tolerant).
pub fn append_switch_flags(c: &mut Circuit, dir: Direction, offset: usize, flags: bool) -> Result<SwitchLabels> {
    let n = c.n;
    let flag = flags.then_some(FLAG);
    let (gauges, fixes, full, prefix) = match dir {
        Direction::OneToTwo => (gauge_z(), gauge_x(), z_all(), "mz"),
        Direction::TwoToOne => (gauge_x(), gauge_z(), x_all(), "mx"),
    };
    let mut g = [0; 3];
    for i in 0..3 {
        g[i] = append_pauli_measurement(c, &embed(&gauges[i], n, offset), ANC, flag, &format!("{prefix}{}", i + 4))?;
    }
    let chk = complementary_check(dir);
    let check = append_pauli_measurement(c, &embed(&chk, n, offset), ANC, flag, &format!("{prefix}7"))?;
    let fl = append_pauli_measurement(c, &embed(&full, n, offset), ANC, flag, &format!("{prefix}8"))?;
    match dir {
        Direction::OneToTwo => c.discard_if(Cond::parity(&[g[0], check])),
        Direction::TwoToOne => c.discard_if(Cond::parity(&[g[0], g[1], g[2], check])),
    };
    c.discard_if(Cond::bit(fl));
    for i in 0..3 {
        c.correct(embed(&fixes[i], n, offset), Cond::bit(g[i]));
    }
    Ok(SwitchLabels { gauge: g, check, full: fl })
}

/// Error-detection round: measures every stabilizer generator of `version` on the block at
/// `offset` (flagged above weight 2) and discards on any −1.
pub fn append_verification(c: &mut Circuit, version: Version, offset: usize, name: &str) -> Result<()> {
    let n = c.n;
    for (k, s) in code(version).stabilizers.iter().enumerate() {
        let m = append_pauli_measurement(c, &embed(s, n, offset), ANC, Some(FLAG), &format!("{name}{k}"))?;
        c.discard_if(Cond::bit(m));
    }
    Ok(())
}

/// Standalone switching circuit on one block.
pub fn build_switch(dir: Direction) -> Result<Circuit> {
    let mut c = block_circuit();
    append_switch(&mut c, dir, 0)?;
    c.validate()?;
    Ok(c)
}
