//! Inter-block logical gates and the Grover search circuit.

use super::gadgets::append_logical_hadamard;
use super::prep::{append_switch, append_verification, build_state_prep, embed, BLOCK_QUBITS};
use super::{Basis, Circuit, Cond};
use crate::codes::{self, ccz_pattern, cnot_transpositions, code, cz_pattern, gauge_z, interblock_direction_allowed, perm_from_cycles, permutation_swaps, swap_cycles, v1_partner, z_all, Direction, Version};
use crate::error::{Error, Result};
use crate::pauli::{Gate, GateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterblockGate {
    /// Transversal CNOT: three logical CNOTs in parallel.
    ParallelCnot,
    /// Single CNOT whose target is moved back onto the control's index with logical SWAPs.
    SingleCnotSwapped,
    /// Two parallel layers separated and followed by an in-block CNOT on the control block.
    SingleCnotSmallest,
    /// As `SingleCnotSmallest` with the in-block CNOT on the target block.
    SingleCnotAlt,
    /// Two parallel CZ layers with the in-block CNOT on the first block.
    SingleCz,
}

/// Qubit of block 2 paired with qubit q of block 1 by the parallel CZ layer. Transversal CZ
/// without relabelling only couples logical X̄_i to stabilizers; this permutation sends each
/// X̄_i support onto a Z̄_i representative.
pub const CZ_PAIRING: [usize; 8] = [0, 1, 3, 6, 7, 4, 5, 2];

fn shifted(gates: Vec<Gate>, offset: usize) -> Vec<Gate> {
    gates
        .into_iter()
        .map(|mut g| {
            for q in g.q.iter_mut() {
                *q += offset;
            }
            g
        })
        .collect()
}

fn in_block_cnot(version: Version, i: usize, j: usize, offset: usize) -> Result<Vec<Gate>> {
    match version {
        Version::V2 => Ok(shifted(permutation_swaps(&cnot_transpositions(i, j)?), offset)),
        Version::V1 => Err(Error::UnsupportedGate(format!("in-block CNOT({i},{j}) on a version 1 block"))),
    }
}

fn in_block_swap(version: Version, i: usize, j: usize, offset: usize) -> Result<Vec<Gate>> {
    let perm = match version {
        Version::V2 => swap_cycles(i, j)?,
        Version::V1 => perm_from_cycles(codes::N, &[&[v1_partner(i)?, v1_partner(j)?]]),
    };
    Ok(shifted(permutation_swaps(&perm), offset))
}

fn parallel_cnot() -> Vec<Gate> {
    (0..8).map(|q| Gate::cnot(q, q + 8)).collect()
}

fn parallel_cz() -> Vec<Gate> {
    (0..8).map(|q| Gate::two(GateKind::Cz, q, CZ_PAIRING[q] + 8)).collect()
}

/// Two-block circuit on data qubits 0..16 (block 1 first).
pub fn build_interblock(gate: InterblockGate, blocks: (Version, Version), logicals: (usize, usize)) -> Result<Circuit> {
    let (b1, b2) = blocks;
    let (i, j) = logicals;
    for l in [i, j] {
        if !(1..=3).contains(&l) {
            return Err(Error::InvalidTarget(format!("logical index {l}")));
        }
    }
    let mut gates = vec![];
    let distinct = || {
        if i == j {
            Err(Error::InvalidTarget(format!("single inter-block gate needs distinct indices, got ({i},{j})")))
        } else {
            Ok(())
        }
    };
    match gate {
        InterblockGate::SingleCz => {
            if blocks != (Version::V2, Version::V2) {
                return Err(Error::Direction(b1.number(), b2.number()));
            }
            distinct()?;
            let c = in_block_cnot(b1, i, j, 0)?;
            for _ in 0..2 {
                gates.extend(parallel_cz());
                gates.extend(c.iter().copied());
            }
        }
        _ => {
            if !interblock_direction_allowed(b1, b2) {
                return Err(Error::Direction(b1.number(), b2.number()));
            }
            match gate {
                InterblockGate::ParallelCnot => gates = parallel_cnot(),
                InterblockGate::SingleCnotSmallest | InterblockGate::SingleCnotAlt => {
                    distinct()?;
                    let c = if gate == InterblockGate::SingleCnotSmallest { in_block_cnot(b1, i, j, 0)? } else { in_block_cnot(b2, i, j, 8)? };
                    for _ in 0..2 {
                        gates.extend(parallel_cnot());
                        gates.extend(c.iter().copied());
                    }
                }
                InterblockGate::SingleCnotSwapped => {
                    if i != j {
                        return Err(Error::InvalidTarget(format!("swapped variant targets the control's index, got ({i},{j})")));
                    }
                    let k = (1..=3).find(|&k| k != i).unwrap();
                    let c = in_block_cnot(b1, i, k, 0)?;
                    let s = in_block_swap(b2, j, k, 8)?;
                    gates.extend(s.iter().copied());
                    for _ in 0..2 {
                        gates.extend(parallel_cnot());
                        gates.extend(c.iter().copied());
                    }
                    gates.extend(s);
                }
                InterblockGate::SingleCz => unreachable!(),
            }
        }
    }
    let mut c = Circuit::new(16, (0..16).collect(), vec![], vec![]);
    for g in gates {
        c.gate(g);
    }
    c.validate()?;
    Ok(c)
}

/// Marked strings of the search; bit k of the string is logical qubit k+1.
pub const GROVER_MARKED: [&str; 2] = ["101", "011"];

/// CCZ as CNOT and T gates (Toffoli decomposition without its outer Hadamards).
pub fn ccz_clifford_t(a: usize, b: usize, c: usize) -> Vec<Gate> {
    use GateKind::{Tdg, T};
    vec![
        Gate::cnot(b, c),
        Gate::one(Tdg, c),
        Gate::cnot(a, c),
        Gate::one(T, c),
        Gate::cnot(b, c),
        Gate::one(Tdg, c),
        Gate::cnot(a, c),
        Gate::one(T, b),
        Gate::one(T, c),
        Gate::cnot(a, b),
        Gate::one(T, a),
        Gate::one(Tdg, b),
        Gate::cnot(a, b),
    ]
}

/// One Grover iteration for the marked set {101, 011}: oracle CZ(1,3)·CZ(2,3), then diffusion.
pub fn build_grover(encoded: bool) -> Result<Circuit> {
    if !encoded {
        let mut c = Circuit::new(3, vec![0, 1, 2], vec![], vec![]);
        let layer = |c: &mut Circuit, k: GateKind| {
            for q in 0..3 {
                c.g1(k, q);
            }
        };
        for q in 0..3 {
            c.init(q, Basis::Z);
        }
        layer(&mut c, GateKind::H);
        c.g2(GateKind::Cz, 0, 2).g2(GateKind::Cz, 1, 2);
        layer(&mut c, GateKind::H);
        layer(&mut c, GateKind::X);
        for g in ccz_clifford_t(0, 1, 2) {
            c.gate(g);
        }
        layer(&mut c, GateKind::X);
        layer(&mut c, GateKind::H);
        for q in 0..3 {
            let m = c.measure(q, Basis::Z, &format!("out{q}"));
            c.outputs.push(Cond::bit(m));
        }
        c.validate()?;
        return Ok(c);
    }
    let mut c = build_state_prep(Version::V2, "+++")?;
    let n = BLOCK_QUBITS;
    append_verification(&mut c, Version::V2, 0, "v2chk")?;
    for (i, j) in [(1, 3), (2, 3)] {
        for g in cz_pattern(i, j)? {
            c.gate(g);
        }
    }
    let hadamard_layer = |c: &mut Circuit| -> Result<()> {
        append_switch(c, Direction::TwoToOne, 0)?;
        for j in 1..=3 {
            append_logical_hadamard(c, j, 0)?;
        }
        append_verification(c, Version::V1, 0, "v1chk")?;
        append_switch(c, Direction::OneToTwo, 0)?;
        append_verification(c, Version::V2, 0, "v2chk")?;
        Ok(())
    };
    hadamard_layer(&mut c)?;
    // X̄ on every logical, kept in the Pauli frame
    let v2 = code(Version::V2);
    let xbar = v2.logical_x.iter().fold(crate::pauli::Pauli::identity(8), |a, x| a.mul(x));
    c.correct(embed(&xbar, n, 0), Cond::always());
    for g in ccz_pattern() {
        c.gate(g);
    }
    c.correct(embed(&xbar, n, 0), Cond::always());
    hadamard_layer(&mut c)?;
    let out: Vec<usize> = (0..8).map(|q| c.measure(q, Basis::Z, &format!("out{q}"))).collect();
    let parity = |p: &crate::pauli::Pauli| Cond::parity(&p.support().iter().map(|&q| out[q]).collect::<Vec<_>>());
    c.discard_if(parity(&z_all()));
    for g in gauge_z() {
        c.discard_if(parity(&g));
    }
    for z in &v2.logical_z {
        c.outputs.push(parity(z));
    }
    c.validate()?;
    Ok(c)
}
