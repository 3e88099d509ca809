//! Signed Pauli strings on up to 64 qubits and their conjugation by the gate set.
//!
//! A `Pauli` is `i^phase * P_0 ⊗ ... ⊗ P_{n-1}` where each letter is stored as an
//! (x, z) bit pair and the pair (1, 1) means Y itself (not XZ).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Pauli {
    pub n: usize,
    pub x: u64,
    pub z: u64,
    /// Power of i, kept in 0..4.
    pub phase: u8,
}

#[inline]
fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Phase exponent (power of i) picked up when multiplying letters (x1,z1)·(x2,z2).
#[inline]
pub(crate) fn product_phase(x1: u64, z1: u64, x2: u64, z2: u64) -> u8 {
    let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
    let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
    let plus = (px & qy) | (py & qz) | (pz & qx);
    let minus = (py & qx) | (pz & qy) | (px & qz);
    ((plus.count_ones() + 3 * minus.count_ones()) & 3) as u8
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        Pauli { n, x: 0, z: 0, phase: 0 }
    }

    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= MAX_QUBITS);
        Pauli { n, x: x & mask(n), z: z & mask(n), phase: 0 }
    }

    /// Single-qubit Pauli; `letter` is one of I, X, Y, Z.
    pub fn single(n: usize, q: usize, letter: char) -> Self {
        assert!(q < n);
        let b = 1u64 << q;
        match letter {
            'X' => Pauli::from_masks(n, b, 0),
            'Y' => Pauli::from_masks(n, b, b),
            'Z' => Pauli::from_masks(n, 0, b),
            _ => Pauli::identity(n),
        }
    }

    /// Tensor product of `letter` on every listed qubit.
    pub fn on(n: usize, letter: char, qubits: &[usize]) -> Self {
        let mut p = Pauli::identity(n);
        for &q in qubits {
            p = p.mul(&Pauli::single(n, q, letter));
        }
        p
    }

    pub fn xs(n: usize, qubits: &[usize]) -> Self {
        Pauli::on(n, 'X', qubits)
    }

    pub fn zs(n: usize, qubits: &[usize]) -> Self {
        Pauli::on(n, 'Z', qubits)
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn neg(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    /// Same operator with phase +1.
    pub fn unsigned(mut self) -> Self {
        self.phase = 0;
        self
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// +1 or -1 for Hermitian strings.
    pub fn sign(&self) -> i8 {
        if self.phase == 2 {
            -1
        } else {
            1
        }
    }

    /// Signed product `self · other`.
    pub fn mul(&self, other: &Pauli) -> Pauli {
        debug_assert_eq!(self.n, other.n);
        let ph = product_phase(self.x, self.z, other.x, other.z);
        Pauli {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (self.phase + other.phase + ph) & 3,
        }
    }

    pub fn try_mul(&self, other: &Pauli) -> Result<Pauli> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        Ok(self.mul(other))
    }

    pub fn commutes(&self, other: &Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    pub fn try_commutes(&self, other: &Pauli) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        Ok(self.commutes(other))
    }

    /// Equality ignoring the phase.
    pub fn same_support_letters(&self, other: &Pauli) -> bool {
        self.x == other.x && self.z == other.z
    }

    /// Embed into a larger register, sending qubit q to `map[q]`.
    pub fn relabel(&self, n: usize, map: &[usize]) -> Pauli {
        let mut p = Pauli::identity(n);
        p.phase = self.phase;
        for q in 0..self.n {
            if self.x >> q & 1 == 1 {
                p.x |= 1 << map[q];
            }
            if self.z >> q & 1 == 1 {
                p.z |= 1 << map[q];
            }
        }
        p
    }

    /// Restrict to the listed qubits, producing a `qubits.len()`-qubit string.
    pub fn restrict(&self, qubits: &[usize]) -> Pauli {
        let mut p = Pauli::identity(qubits.len());
        p.phase = self.phase;
        for (i, &q) in qubits.iter().enumerate() {
            p.x |= (self.x >> q & 1) << i;
            p.z |= (self.z >> q & 1) << i;
        }
        p
    }

    /// Dense letters, qubit 0 first.
    pub fn dense(&self) -> String {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Parses sparse ("-Z0Z4", "X0X1X2X3") or dense ("XIZY") notation.
    pub fn parse(s: &str, n: usize) -> Result<Pauli> {
        let err = || Error::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let (phase, body) = if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1, r)
        } else {
            (0, t.as_str())
        };
        if body.is_empty() || body == "I" {
            return Ok(Pauli::identity(n).with_phase(phase));
        }
        let mut p = Pauli::identity(n);
        if !body.chars().any(|c| c.is_ascii_digit()) {
            if body.len() != n {
                return Err(Error::Dimension(body.len(), n));
            }
            for (q, c) in body.chars().enumerate() {
                if !"IXYZ".contains(c) {
                    return Err(err());
                }
                p = p.mul(&Pauli::single(n, q, c));
            }
        } else {
            let chars: Vec<char> = body.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                if !"IXYZ".contains(c) {
                    return Err(err());
                }
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(err());
                }
                let q: usize = chars[start..i].iter().collect::<String>().parse().map_err(|_| err())?;
                if q >= n {
                    return Err(Error::InvalidTarget(format!("qubit {q} in {n}-qubit string")));
                }
                if (p.x | p.z) >> q & 1 == 1 {
                    return Err(err());
                }
                p = p.mul(&Pauli::single(n, q, c));
            }
        }
        p.phase = (p.phase + phase) & 3;
        Ok(p)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        if self.is_identity() {
            return write!(f, "I");
        }
        for q in 0..self.n {
            let c = self.letter(q);
            if c != 'I' {
                write!(f, "{c}{q}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    Sdg,
    SqrtX,
    SqrtXdg,
    X,
    Y,
    Z,
    Cnot,
    Cz,
    Swap,
    /// (I + iXX)/√2
    Xx,
    Xxdg,
    /// (I - iYY)/√2
    Yy,
    Yydg,
    /// (I - iZZ)/√2
    Zz,
    Zzdg,
    /// (I - iX)/√2
    Rx,
    Rxdg,
    T,
    Tdg,
    Ccz,
}

impl GateKind {
    pub const ALL: [GateKind; 22] = [
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::SqrtX,
        GateKind::SqrtXdg,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Xx,
        GateKind::Xxdg,
        GateKind::Yy,
        GateKind::Yydg,
        GateKind::Zz,
        GateKind::Zzdg,
        GateKind::Rx,
        GateKind::Rxdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Ccz,
    ];

    pub fn arity(self) -> usize {
        use GateKind::*;
        match self {
            Cnot | Cz | Swap | Xx | Xxdg | Yy | Yydg | Zz | Zzdg => 2,
            Ccz => 3,
            _ => 1,
        }
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::T | GateKind::Tdg | GateKind::Ccz)
    }

    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            H => "H",
            S => "S",
            Sdg => "SDG",
            SqrtX => "SQRTX",
            SqrtXdg => "SQRTXDG",
            X => "X",
            Y => "Y",
            Z => "Z",
            Cnot => "CNOT",
            Cz => "CZ",
            Swap => "SWAP",
            Xx => "XX",
            Xxdg => "XXDG",
            Yy => "YY",
            Yydg => "YYDG",
            Zz => "ZZ",
            Zzdg => "ZZDG",
            Rx => "RX",
            Rxdg => "RXDG",
            T => "T",
            Tdg => "TDG",
            Ccz => "CCZ",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    pub fn inverse(self) -> GateKind {
        use GateKind::*;
        match self {
            S => Sdg,
            Sdg => S,
            SqrtX => SqrtXdg,
            SqrtXdg => SqrtX,
            Xx => Xxdg,
            Xxdg => Xx,
            Yy => Yydg,
            Yydg => Yy,
            Zz => Zzdg,
            Zzdg => Zz,
            Rx => Rxdg,
            Rxdg => Rx,
            T => Tdg,
            Tdg => T,
            k => k,
        }
    }

    /// For rotations `(I + s·i·P)/√2`: the letter of P and the sign s.
    pub fn rotation(self) -> Option<(char, i8)> {
        use GateKind::*;
        match self {
            Xx => Some(('X', 1)),
            Xxdg => Some(('X', -1)),
            Yy => Some(('Y', -1)),
            Yydg => Some(('Y', 1)),
            Zz => Some(('Z', -1)),
            Zzdg => Some(('Z', 1)),
            Rx => Some(('X', -1)),
            Rxdg => Some(('X', 1)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub q: [usize; 3],
}

impl Gate {
    pub fn one(kind: GateKind, a: usize) -> Gate {
        debug_assert_eq!(kind.arity(), 1);
        Gate { kind, q: [a, a, a] }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Gate {
        debug_assert_eq!(kind.arity(), 2);
        assert_ne!(a, b, "two-qubit gate on a single qubit");
        Gate { kind, q: [a, b, b] }
    }

    pub fn cnot(c: usize, t: usize) -> Gate {
        Gate::two(GateKind::Cnot, c, t)
    }

    pub fn ccz(a: usize, b: usize, c: usize) -> Gate {
        Gate { kind: GateKind::Ccz, q: [a, b, c] }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.q[..self.kind.arity()]
    }

    pub fn inverse(&self) -> Gate {
        Gate { kind: self.kind.inverse(), q: self.q }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[inline]
fn bit(v: u64, q: usize) -> u64 {
    (v >> q) & 1
}

/// `g · p · g†`, phase-exact. Non-Clifford gates are rejected.
pub fn conjugate(g: &Gate, p: &Pauli) -> Result<Pauli> {
    if !g.kind.is_clifford() {
        return Err(Error::UnsupportedGate(g.kind.name().into()));
    }
    if let Some(&q) = g.qubits().iter().find(|&&q| q >= p.n) {
        return Err(Error::InvalidTarget(format!("qubit {q} outside {} qubits", p.n)));
    }
    let mut r = *p;
    conjugate_in_place(g, &mut r.x, &mut r.z, &mut r.phase);
    Ok(r)
}

/// Core kernel shared by `conjugate` and the tableau rows.
#[inline]
pub(crate) fn conjugate_in_place(g: &Gate, x: &mut u64, z: &mut u64, phase: &mut u8) {
    use GateKind::*;
    let a = g.q[0];
    let b = g.q[1];
    if g.kind.arity() == 2 {
        if let Some((letter, s)) = g.kind.rotation() {
            let (px, pz) = match letter {
                'X' => ((1u64 << a) | (1u64 << b), 0),
                'Z' => (0, (1u64 << a) | (1u64 << b)),
                _ => ((1u64 << a) | (1u64 << b), (1u64 << a) | (1u64 << b)),
            };
            rotate_in_place(px, pz, s, x, z, phase);
            return;
        }
    }
    let ma = 1u64 << a;
    let xa = bit(*x, a);
    let za = bit(*z, a);
    let mut dph = 0u8;
    match g.kind {
        H => {
            dph = 2 * (xa & za) as u8;
            *x = (*x & !ma) | (za << a);
            *z = (*z & !ma) | (xa << a);
        }
        S => {
            // X -> Y, Y -> -X
            if xa == 1 {
                dph = 2 * za as u8;
                *z ^= ma;
            }
        }
        Sdg => {
            // X -> -Y, Y -> X
            if xa == 1 {
                dph = 2 * (1 - za) as u8;
                *z ^= ma;
            }
        }
        SqrtX | Rx => {
            // Z -> -Y, Y -> Z
            if za == 1 {
                dph = 2 * (1 - xa) as u8;
                *x ^= ma;
            }
        }
        SqrtXdg | Rxdg => {
            // Z -> Y, Y -> -Z
            if za == 1 {
                dph = 2 * xa as u8;
                *x ^= ma;
            }
        }
        X => dph = 2 * za as u8,
        Z => dph = 2 * xa as u8,
        Y => dph = 2 * (xa ^ za) as u8,
        Cnot => {
            let xb = bit(*x, b);
            let zb = bit(*z, b);
            dph = 2 * (xa & zb & (xb ^ za ^ 1)) as u8;
            *x ^= xa << b;
            *z ^= zb << a;
        }
        Cz => {
            let xb = bit(*x, b);
            let zb = bit(*z, b);
            dph = 2 * (xa & xb & (za ^ zb)) as u8;
            *z ^= xb << a;
            *z ^= xa << b;
        }
        Swap => {
            let xb = bit(*x, b);
            let zb = bit(*z, b);
            let mb = 1u64 << b;
            *x = (*x & !(ma | mb)) | (xb << a) | (xa << b);
            *z = (*z & !(ma | mb)) | (zb << a) | (za << b);
        }
        Xx | Xxdg | Yy | Yydg | Zz | Zzdg | T | Tdg | Ccz => unreachable!(),
    }
    *phase = (*phase + dph) & 3;
}

/// Anticommuting Q maps to `-s·i·Q·P` under `(I + s·i·P)/√2`.
#[inline]
pub(crate) fn rotate_in_place(px: u64, pz: u64, s: i8, x: &mut u64, z: &mut u64, phase: &mut u8) {
    let anti = ((*x & pz).count_ones() + (*z & px).count_ones()) & 1;
    if anti == 0 {
        return;
    }
    let ph = product_phase(*x, *z, px, pz);
    *x ^= px;
    *z ^= pz;
    let extra = if s > 0 { 3 } else { 1 };
    *phase = (*phase + ph + extra) & 3;
}
