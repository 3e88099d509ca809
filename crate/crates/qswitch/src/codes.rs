//! The [[8,6,2]] parent code, the [[8,3,3,2]] subsystem code and its two gauge-fixed versions.

use crate::error::{Error, Result};
use crate::pauli::{conjugate, Gate, GateKind, Pauli};
use crate::tableau::{canonicalize, group_sign};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

pub const N: usize = 8;
const ALL: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Version {
    /// Gauge qubits fixed in |+⟩.
    V1,
    /// Gauge qubits fixed in |0⟩.
    V2,
}

impl Version {
    pub fn number(self) -> u8 {
        match self {
            Version::V1 => 1,
            Version::V2 => 2,
        }
    }

    pub fn from_number(v: u8) -> Result<Version> {
        match v {
            1 => Ok(Version::V1),
            2 => Ok(Version::V2),
            _ => Err(Error::InvalidTarget(format!("version {v}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeFix {
    Plus,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    OneToTwo,
    TwoToOne,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeDefinition {
    pub name: String,
    pub n: usize,
    pub stabilizers: Vec<Pauli>,
    pub logical_x: Vec<Pauli>,
    pub logical_z: Vec<Pauli>,
    pub gauge_x: Vec<Pauli>,
    pub gauge_z: Vec<Pauli>,
    pub complementary_checks: Vec<(String, Pauli)>,
}

pub fn x_all() -> Pauli {
    Pauli::xs(N, &ALL)
}

pub fn z_all() -> Pauli {
    Pauli::zs(N, &ALL)
}

pub fn logical_x_weight4() -> Vec<Pauli> {
    vec![Pauli::xs(N, &[0, 1, 2, 3]), Pauli::xs(N, &[0, 1, 4, 5]), Pauli::xs(N, &[0, 2, 4, 6])]
}

pub fn logical_z_weight2() -> Vec<Pauli> {
    vec![Pauli::zs(N, &[0, 4]), Pauli::zs(N, &[0, 2]), Pauli::zs(N, &[0, 1])]
}

/// G^X_4, G^X_5, G^X_6.
pub fn gauge_x() -> Vec<Pauli> {
    vec![Pauli::xs(N, &[7, 3]), Pauli::xs(N, &[7, 5]), Pauli::xs(N, &[7, 6])]
}

/// G^Z_4, G^Z_5, G^Z_6.
pub fn gauge_z() -> Vec<Pauli> {
    vec![Pauli::zs(N, &[0, 1, 2, 3]), Pauli::zs(N, &[0, 1, 4, 5]), Pauli::zs(N, &[0, 2, 4, 6])]
}

/// The data qubit that pairs with qubits 0 and 6 for logical j in Version 1.
pub fn v1_partner(j: usize) -> Result<usize> {
    match j {
        1 => Ok(4),
        2 => Ok(2),
        3 => Ok(1),
        _ => Err(Error::InvalidTarget(format!("logical index {j}"))),
    }
}

/// [[8,6,2]]: six logical pairs, the last three being the gauge qubits of the subsystem code.
pub fn parent_code() -> CodeDefinition {
    let mut lx = logical_x_weight4();
    lx.extend(gauge_x());
    let mut lz = logical_z_weight2();
    lz.extend(gauge_z());
    CodeDefinition {
        name: "[[8,6,2]]".into(),
        n: N,
        stabilizers: vec![x_all(), z_all()],
        logical_x: lx,
        logical_z: lz,
        gauge_x: vec![],
        gauge_z: vec![],
        complementary_checks: vec![],
    }
}

pub fn subsystem_code() -> CodeDefinition {
    CodeDefinition {
        name: "[[8,3,3,2]]".into(),
        n: N,
        stabilizers: vec![x_all(), z_all()],
        logical_x: logical_x_weight4(),
        logical_z: logical_z_weight2(),
        gauge_x: gauge_x(),
        gauge_z: gauge_z(),
        complementary_checks: vec![],
    }
}

/// Minimum-weight representative of `p` times the group generated by `gens`.
/// Ties prefer supports containing `anchor`, then the lexicographically smallest support.
pub fn reduce_min_weight(p: &Pauli, gens: &[Pauli], anchor: Option<usize>) -> Pauli {
    let mut best = *p;
    for m in 0u32..(1 << gens.len()) {
        let mut q = *p;
        for (k, g) in gens.iter().enumerate() {
            if m >> k & 1 == 1 {
                q = q.mul(g);
            }
        }
        let key = |a: &Pauli| (a.weight(), anchor.map_or(false, |q| (a.x | a.z) >> q & 1 == 0), a.support());
        if key(&q) < key(&best) {
            best = q;
        }
    }
    best
}

/// Fixes the gauge of the subsystem code: gauge-X operators become stabilizers for `Plus`
/// (Version 1), gauge-Z operators for `Zero` (Version 2).
pub fn derive_version(fix: GaugeFix) -> CodeDefinition {
    let sub = subsystem_code();
    let (promoted, name) = match fix {
        GaugeFix::Plus => (sub.gauge_x.clone(), "[[8,3,2]] version 1"),
        GaugeFix::Zero => (sub.gauge_z.clone(), "[[8,3,2]] version 2"),
    };
    let mut stabilizers = sub.stabilizers.clone();
    stabilizers.extend(promoted);
    let reduce = |l: &Pauli| {
        let same_type: Vec<Pauli> = stabilizers
            .iter()
            .copied()
            .filter(|s| (l.z == 0 && s.z == 0) || (l.x == 0 && s.x == 0))
            .collect();
        // qubit 6 (X type) and qubit 0 (Z type) are shared by all Version 1 rotation gadgets
        let anchor = match (fix, l.z == 0) {
            (GaugeFix::Plus, true) => Some(6),
            (GaugeFix::Plus, false) => Some(0),
            _ => None,
        };
        reduce_min_weight(l, &same_type, anchor)
    };
    let logical_x = sub.logical_x.iter().map(reduce).collect();
    let logical_z = sub.logical_z.iter().map(reduce).collect();
    let checks = match fix {
        GaugeFix::Plus => vec![("1->2".to_string(), complementary_check(Direction::OneToTwo))],
        GaugeFix::Zero => vec![("2->1".to_string(), complementary_check(Direction::TwoToOne))],
    };
    CodeDefinition {
        name: name.into(),
        n: N,
        stabilizers,
        logical_x,
        logical_z,
        gauge_x: vec![],
        gauge_z: vec![],
        complementary_checks: checks,
    }
}

pub fn code(v: Version) -> CodeDefinition {
    match v {
        Version::V1 => derive_version(GaugeFix::Plus),
        Version::V2 => derive_version(GaugeFix::Zero),
    }
}

/// The low-weight check whose product with the three measured gauge operators is a weight-8
/// stabilizer. Measured when switching *into* the version named by the direction's target.
pub fn complementary_check(direction: Direction) -> Pauli {
    match direction {
        Direction::TwoToOne => {
            let c = Pauli::xs(N, &[0, 1, 2, 4]);
            let prod = gauge_x().iter().fold(c, |a, g| a.mul(g));
            assert_eq!(prod, x_all());
            c
        }
        Direction::OneToTwo => {
            // Only G^Z_4 pairs with this check; G^Z_5 and G^Z_6 are random on Version 1 states.
            let c = Pauli::zs(N, &[4, 5, 6, 7]);
            assert_eq!(c.mul(&gauge_z()[0]), z_all());
            c
        }
    }
}

/// Complement of a single gauge operator inside the weight-8 stabilizer of the same type.
pub fn partial_complement(gauge: &Pauli) -> Pauli {
    let full = if gauge.z == 0 { x_all() } else { z_all() };
    gauge.mul(&full)
}

impl CodeDefinition {
    /// Checks commutation relations; returns a description of the first violation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGroup(format!("{}: {m}", self.name)));
        for (i, a) in self.stabilizers.iter().enumerate() {
            for b in &self.stabilizers[i + 1..] {
                if !a.commutes(b) {
                    return bad(format!("{a} and {b} anticommute"));
                }
            }
        }
        let pairs = [(&self.logical_x, &self.logical_z), (&self.gauge_x, &self.gauge_z)];
        let mut all_ops: Vec<Pauli> = vec![];
        for (xs, zs) in pairs {
            all_ops.extend(xs.iter().copied());
            all_ops.extend(zs.iter().copied());
            for (i, x) in xs.iter().enumerate() {
                for (j, z) in zs.iter().enumerate() {
                    if x.commutes(z) == (i == j) {
                        return bad(format!("pair ({x}, {z}) has wrong commutation"));
                    }
                }
                for x2 in xs {
                    if !x.commutes(x2) {
                        return bad(format!("{x} and {x2} anticommute"));
                    }
                }
            }
        }
        for op in &all_ops {
            for s in &self.stabilizers {
                if !op.commutes(s) {
                    return bad(format!("{op} anticommutes with stabilizer {s}"));
                }
            }
        }
        canonicalize(&self.stabilizers)?;
        Ok(())
    }

    /// Smallest weight of a non-stabilizer Pauli commuting with all stabilizers, searched up to `max_w`.
    pub fn distance(&self, max_w: u32) -> Option<u32> {
        let canon = canonicalize(&self.stabilizers).ok()?;
        for w in 1..=max_w {
            for support in combinations(self.n, w as usize) {
                for letters in 0..3usize.pow(w) {
                    let mut p = Pauli::identity(self.n);
                    let mut l = letters;
                    for &q in &support {
                        p = p.mul(&Pauli::single(self.n, q, ['X', 'Y', 'Z'][l % 3]));
                        l /= 3;
                    }
                    if self.stabilizers.iter().all(|s| s.commutes(&p)) && group_sign(&canon, &p).is_none() {
                        return Some(w);
                    }
                }
            }
        }
        None
    }

    /// Y-type logical `i X̄_j Z̄_j` (0-based j).
    pub fn logical_y(&self, j: usize) -> Pauli {
        self.logical_x[j].mul(&self.logical_z[j]).mul(&Pauli::identity(self.n).with_phase(1))
    }

    /// Name → Pauli listing in text form.
    pub fn catalog(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.name);
        for (i, p) in self.stabilizers.iter().enumerate() {
            let _ = writeln!(s, "stabilizer.{i} = {p}");
        }
        for (j, p) in self.logical_x.iter().enumerate() {
            let _ = writeln!(s, "logical_x.{} = {p}", j + 1);
        }
        for (j, p) in self.logical_z.iter().enumerate() {
            let _ = writeln!(s, "logical_z.{} = {p}", j + 1);
        }
        for (j, p) in self.gauge_x.iter().enumerate() {
            let _ = writeln!(s, "gauge_x.{} = {p}", j + 4);
        }
        for (j, p) in self.gauge_z.iter().enumerate() {
            let _ = writeln!(s, "gauge_z.{} = {p}", j + 4);
        }
        for (name, p) in &self.complementary_checks {
            let _ = writeln!(s, "check.{name} = {p}");
        }
        s
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(0, n, k, &mut vec![], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Realization {
    /// Transversal layer of physical gates.
    Physical(Vec<Gate>),
    /// `perm[q]` is where the content of qubit q ends up.
    Permutation(Vec<usize>),
    /// Two-qubit rotations to be compiled into weakly fault-tolerant gadgets, then a Pauli byproduct.
    Gadgets { rotations: Vec<Gate>, byproduct: Pauli },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalGateSpec {
    pub name: String,
    pub version: Version,
    pub realization: Realization,
}

impl Realization {
    /// Physical gate list; permutations expand into SWAP gates.
    pub fn gates(&self) -> Vec<Gate> {
        match self {
            Realization::Physical(g) => g.clone(),
            Realization::Gadgets { rotations, .. } => rotations.clone(),
            Realization::Permutation(perm) => permutation_swaps(perm),
        }
    }

    /// Images of a Pauli under the (Clifford) realization.
    pub fn conjugate(&self, p: &Pauli) -> Result<Pauli> {
        match self {
            Realization::Permutation(perm) => Ok(p.relabel(p.n, perm)),
            Realization::Physical(gs) => gs.iter().try_fold(*p, |acc, g| conjugate(g, &acc)),
            Realization::Gadgets { rotations, byproduct } => {
                let r = rotations.iter().try_fold(*p, |acc, g| conjugate(g, &acc))?;
                Ok(if r.commutes(byproduct) { r } else { r.neg() })
            }
        }
    }
}

/// Decomposes a permutation into transpositions, as SWAP gates.
pub fn permutation_swaps(perm: &[usize]) -> Vec<Gate> {
    // content at q goes to perm[q]; track where each original content currently sits
    let n = perm.len();
    let mut at: Vec<usize> = (0..n).collect(); // at[pos] = original content at pos
    let mut out = vec![];
    for target in 0..n {
        // want content c with perm[c] == target at position target
        let c = (0..n).find(|&c| perm[c] == target).expect("bijection");
        let pos = at.iter().position(|&v| v == c).unwrap();
        if pos != target {
            out.push(Gate::two(GateKind::Swap, pos, target));
            at.swap(pos, target);
        }
    }
    out
}

/// Builds `perm` from disjoint cycles written as `a→b→c→…→a`.
pub fn perm_from_cycles(n: usize, cycles: &[&[usize]]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for c in cycles {
        for k in 0..c.len() {
            p[c[k]] = c[(k + 1) % c.len()];
        }
    }
    p
}

fn layer(kinds: &[(GateKind, usize)]) -> Vec<Gate> {
    kinds.iter().map(|&(k, q)| Gate::one(k, q)).collect()
}

pub fn ccz_pattern() -> Vec<Gate> {
    use GateKind::{Tdg, T};
    layer(&[(T, 0), (Tdg, 1), (Tdg, 2), (T, 3), (Tdg, 4), (T, 5), (T, 6), (Tdg, 7)])
}

/// S-pattern realizing CZ̄(i,j) in Version 2.
pub fn cz_pattern(i: usize, j: usize) -> Result<Vec<Gate>> {
    use GateKind::{Sdg, S};
    let qs = match (i.min(j), i.max(j)) {
        (1, 2) => [0, 2, 4, 6],
        (1, 3) => [0, 1, 4, 5],
        (2, 3) => [0, 1, 2, 3],
        _ => return Err(Error::InvalidTarget(format!("CZ({i},{j})"))),
    };
    Ok(layer(&[(S, qs[0]), (Sdg, qs[1]), (Sdg, qs[2]), (S, qs[3])]))
}

pub fn swap_cycles(i: usize, j: usize) -> Result<Vec<usize>> {
    let cyc: [&[usize]; 2] = match (i.min(j), i.max(j)) {
        (1, 2) => [&[0, 4, 6, 2], &[1, 5, 7, 3]],
        (1, 3) => [&[2, 6, 7, 3], &[0, 4, 5, 1]],
        (2, 3) => [&[0, 2, 3, 1], &[4, 6, 7, 5]],
        _ => return Err(Error::InvalidTarget(format!("SWAP({i},{j})"))),
    };
    Ok(perm_from_cycles(N, &cyc))
}

pub fn cnot_transpositions(c: usize, t: usize) -> Result<Vec<usize>> {
    let pairs: [(usize, usize); 2] = match (c, t) {
        (1, 2) => [(0, 4), (1, 5)],
        (2, 1) => [(0, 2), (1, 3)],
        (1, 3) => [(0, 4), (2, 6)],
        (3, 1) => [(0, 1), (2, 3)],
        (2, 3) => [(0, 2), (4, 6)],
        (3, 2) => [(0, 1), (4, 5)],
        _ => return Err(Error::InvalidTarget(format!("CNOT({c},{t})"))),
    };
    let cyc: Vec<[usize; 2]> = pairs.iter().map(|&(a, b)| [a, b]).collect();
    let refs: Vec<&[usize]> = cyc.iter().map(|c| &c[..]).collect();
    Ok(perm_from_cycles(N, &refs))
}

pub fn v1_hadamard(j: usize) -> Result<Realization> {
    let q = v1_partner(j)?;
    let byproduct = Pauli::single(N, q, 'Y').mul(&Pauli::single(N, 6, 'X')).mul(&Pauli::single(N, 0, 'Z'));
    Ok(Realization::Gadgets {
        rotations: vec![
            Gate::two(GateKind::Zz, q, 0),
            Gate::two(GateKind::Xx, q, 6),
            Gate::two(GateKind::Zz, q, 0),
        ],
        byproduct,
    })
}

pub fn logical_gate_table(v: Version) -> Vec<LogicalGateSpec> {
    let mut t = vec![];
    let spec = |name: String, realization| LogicalGateSpec { name, version: v, realization };
    match v {
        Version::V1 => {
            for j in 1..=3 {
                let q = v1_partner(j).unwrap();
                t.push(spec(format!("H{j}"), v1_hadamard(j).unwrap()));
                t.push(spec(
                    format!("S{j}"),
                    Realization::Gadgets { rotations: vec![Gate::two(GateKind::Zz, q, 0)], byproduct: Pauli::identity(N) },
                ));
                t.push(spec(
                    format!("SQRTXDG{j}"),
                    Realization::Gadgets { rotations: vec![Gate::two(GateKind::Xx, q, 6)], byproduct: Pauli::identity(N) },
                ));
            }
            for (i, j) in [(1, 2), (1, 3), (2, 3)] {
                let (a, b) = (v1_partner(i).unwrap(), v1_partner(j).unwrap());
                t.push(spec(format!("SWAP{i}{j}"), Realization::Permutation(perm_from_cycles(N, &[&[a, b]]))));
            }
        }
        Version::V2 => {
            t.push(spec("CCZ".into(), Realization::Physical(ccz_pattern())));
            for (i, j) in [(1, 2), (1, 3), (2, 3)] {
                t.push(spec(format!("CZ{i}{j}"), Realization::Physical(cz_pattern(i, j).unwrap())));
            }
            for (i, j) in [(1, 2), (1, 3), (2, 3)] {
                t.push(spec(format!("SWAP{i}{j}"), Realization::Permutation(swap_cycles(i, j).unwrap())));
            }
            for (c, tg) in [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)] {
                t.push(spec(format!("CNOT{c}{tg}"), Realization::Permutation(cnot_transpositions(c, tg).unwrap())));
            }
        }
    }
    t
}

/// Whether a transversal CNOT from a block of version `control` onto a block of version
/// `target` maps the joint stabilizer group to itself. Computed, not tabulated.
pub fn interblock_direction_allowed(control: Version, target: Version) -> bool {
    let n = 2 * N;
    let a = code(control);
    let b = code(target);
    let lo: Vec<usize> = (0..N).collect();
    let hi: Vec<usize> = (N..2 * N).collect();
    let mut joint: Vec<Pauli> = a.stabilizers.iter().map(|s| s.relabel(n, &lo)).collect();
    joint.extend(b.stabilizers.iter().map(|s| s.relabel(n, &hi)));
    let canon = canonicalize(&joint).expect("valid joint group");
    joint.iter().all(|s| {
        let img = (0..N).fold(*s, |acc, q| conjugate(&Gate::cnot(q, q + N), &acc).unwrap());
        group_sign(&canon, &img) == Some(1)
    })
}
