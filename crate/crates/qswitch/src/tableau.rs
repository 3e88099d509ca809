//! Stabilizer tableau with destabilizers, Pauli measurement and group canonicalization.

use crate::error::{Error, Result};
use crate::pauli::{conjugate_in_place, product_phase, Gate, Pauli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;

/// Per-shot generator: stream `shot` of the ChaCha8 instance keyed by `master_seed`.
pub fn shot_rng(master_seed: u64, shot: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(master_seed);
    r.set_stream(shot);
    r
}

#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    // rows 0..n are destabilizers, n..2n stabilizers
    x: Vec<u64>,
    z: Vec<u64>,
    ph: Vec<u8>,
    pub rng: ChaCha8Rng,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub entries: Vec<(String, i8)>,
}

impl MeasurementRecord {
    pub fn push(&mut self, label: &str, outcome: i8) {
        debug_assert!(outcome == 1 || outcome == -1);
        debug_assert!(self.get(label).is_none(), "duplicate label {label}");
        self.entries.push((label.to_string(), outcome));
    }

    pub fn get(&self, label: &str) -> Option<i8> {
        self.entries.iter().find(|(l, _)| l == label).map(|e| e.1)
    }
}

impl StabilizerState {
    /// |0…0⟩ on n qubits.
    pub fn new(n: usize, rng: ChaCha8Rng) -> Self {
        assert!(n <= 64);
        let mut x = vec![0; 2 * n];
        let mut z = vec![0; 2 * n];
        for q in 0..n {
            x[q] = 1 << q;
            z[n + q] = 1 << q;
        }
        StabilizerState { n, x, z, ph: vec![0; 2 * n], rng }
    }

    pub fn with_seed(n: usize, seed: u64) -> Self {
        StabilizerState::new(n, shot_rng(seed, 0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> Pauli {
        Pauli { n: self.n, x: self.x[i], z: self.z[i], phase: self.ph[i] }
    }

    pub fn stabilizers(&self) -> Vec<Pauli> {
        (self.n..2 * self.n).map(|i| self.row(i)).collect()
    }

    pub fn destabilizers(&self) -> Vec<Pauli> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if !g.kind.is_clifford() {
            return Err(Error::UnsupportedGate(g.kind.name().into()));
        }
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n) {
            return Err(Error::InvalidTarget(format!("qubit {q} outside {} qubits", self.n)));
        }
        for i in 0..2 * self.n {
            conjugate_in_place(g, &mut self.x[i], &mut self.z[i], &mut self.ph[i]);
        }
        Ok(())
    }

    /// Applies a Pauli operator to the state: stabilizers that anticommute flip sign.
    pub fn inject_error(&mut self, e: &Pauli) {
        for i in self.n..2 * self.n {
            let anti = ((self.x[i] & e.z).count_ones() + (self.z[i] & e.x).count_ones()) & 1;
            self.ph[i] = (self.ph[i] + 2 * anti as u8) & 3;
        }
    }

    fn rowmul(&mut self, target: usize, src: usize) {
        let ph = product_phase(self.x[target], self.z[target], self.x[src], self.z[src]);
        self.ph[target] = (self.ph[target] + self.ph[src] + ph) & 3;
        self.x[target] ^= self.x[src];
        self.z[target] ^= self.z[src];
    }

    fn anticommutes_row(&self, i: usize, p: &Pauli) -> bool {
        ((self.x[i] & p.z).count_ones() + (self.z[i] & p.x).count_ones()) & 1 == 1
    }

    /// ±1 if `p` (up to sign) lies in the stabilizer group, 0 otherwise. Does not disturb the state.
    pub fn expectation(&self, p: &Pauli) -> i8 {
        if (self.n..2 * self.n).any(|i| self.anticommutes_row(i, p)) {
            return 0;
        }
        let mut acc = Pauli::identity(self.n);
        for j in 0..self.n {
            if self.anticommutes_row(j, p) {
                acc = acc.mul(&self.row(self.n + j));
            }
        }
        debug_assert!(acc.same_support_letters(p));
        if acc.phase == p.phase {
            1
        } else {
            -1
        }
    }

    /// Projective measurement of a Hermitian Pauli.
    pub fn measure(&mut self, p: &Pauli) -> Result<i8> {
        if !p.is_hermitian() {
            return Err(Error::InvalidOperator(p.to_string()));
        }
        if p.n != self.n {
            return Err(Error::Dimension(p.n, self.n));
        }
        let n = self.n;
        let pivot = (n..2 * n).find(|&i| self.anticommutes_row(i, p));
        let Some(pv) = pivot else {
            return Ok(self.expectation(p));
        };
        for i in 0..2 * n {
            if i != pv && i != pv - n && self.anticommutes_row(i, p) {
                self.rowmul(i, pv);
            }
        }
        self.x[pv - n] = self.x[pv];
        self.z[pv - n] = self.z[pv];
        self.ph[pv - n] = self.ph[pv];
        let outcome: i8 = if self.rng.gen::<bool>() { 1 } else { -1 };
        self.x[pv] = p.x;
        self.z[pv] = p.z;
        self.ph[pv] = if outcome == 1 { p.phase } else { (p.phase + 2) & 3 };
        Ok(outcome)
    }

    pub fn measure_z(&mut self, q: usize) -> i8 {
        self.measure(&Pauli::single(self.n, q, 'Z')).expect("valid qubit")
    }

    pub fn measure_x(&mut self, q: usize) -> i8 {
        self.measure(&Pauli::single(self.n, q, 'X')).expect("valid qubit")
    }

    /// Resets qubit q to the +1 eigenstate of Z (or X when `x_basis`).
    pub fn reset(&mut self, q: usize, x_basis: bool) {
        let (letter, flip) = if x_basis { ('X', 'Z') } else { ('Z', 'X') };
        let p = Pauli::single(self.n, q, letter);
        if self.measure(&p).expect("valid qubit") == -1 {
            self.inject_error(&Pauli::single(self.n, q, flip));
        }
    }

    /// Rows in sparse Pauli notation, destabilizers first.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for i in 0..2 * self.n {
            let tag = if i < self.n { "D" } else { "S" };
            let _ = writeln!(s, "{tag}{:<3} {}", i % self.n, self.row(i));
        }
        s
    }
}

/// Row-reduced echelon form over columns x_0..x_{n-1}, z_0..z_{n-1}, signs carried exactly.
pub fn canonicalize(generators: &[Pauli]) -> Result<Vec<Pauli>> {
    if generators.is_empty() {
        return Ok(vec![]);
    }
    let n = generators[0].n;
    for (i, a) in generators.iter().enumerate() {
        if a.n != n {
            return Err(Error::Dimension(a.n, n));
        }
        if !a.is_hermitian() {
            return Err(Error::InvalidGroup(format!("{a} is not Hermitian")));
        }
        for b in &generators[i + 1..] {
            if !a.commutes(b) {
                return Err(Error::InvalidGroup(format!("{a} and {b} anticommute")));
            }
        }
    }
    let mut rows: Vec<Pauli> = generators.to_vec();
    let mut top = 0;
    for col in 0..2 * n {
        let hit = |p: &Pauli| if col < n { p.x >> col & 1 == 1 } else { p.z >> (col - n) & 1 == 1 };
        let Some(r) = (top..rows.len()).find(|&r| hit(&rows[r])) else {
            continue;
        };
        rows.swap(top, r);
        let pivot = rows[top];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != top && hit(row) {
                *row = row.mul(&pivot);
            }
        }
        top += 1;
        if top == rows.len() {
            break;
        }
    }
    if rows[top..].iter().any(|r| r.is_identity()) || top < rows.len() {
        return Err(Error::InvalidGroup("generators are dependent".into()));
    }
    Ok(rows)
}

/// Same stabilizer group, signs included.
pub fn same_group(a: &[Pauli], b: &[Pauli]) -> Result<bool> {
    Ok(canonicalize(a)? == canonicalize(b)?)
}

/// If `p` is (±) an element of the group generated by `canonical` (output of `canonicalize`),
/// returns the sign relating them.
pub fn group_sign(canonical: &[Pauli], p: &Pauli) -> Option<i8> {
    let n = p.n;
    let mut acc = *p;
    for row in canonical {
        let col = (0..n)
            .find(|&q| row.x >> q & 1 == 1)
            .or_else(|| (0..n).find(|&q| row.z >> q & 1 == 1).map(|q| q + n))?;
        let set = if col < n { acc.x >> col & 1 == 1 } else { acc.z >> (col - n) & 1 == 1 };
        if set {
            acc = acc.mul(row);
        }
    }
    if !acc.is_identity() {
        return None;
    }
    match acc.phase {
        0 => Some(1),
        2 => Some(-1),
        _ => None,
    }
}
