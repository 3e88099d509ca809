//! Circuit intermediate representation and its line-oriented text form.

pub mod gadgets;
pub mod logical;
pub mod prep;

pub use gadgets::{build_logical_hadamard, build_rotation_gadget, AncillaInput, GadgetVariant, Rotation};
pub use logical::{build_grover, build_interblock, InterblockGate};
pub use prep::{build_gauge_measurement, build_ghz, build_state_prep, build_switch, target_group};

use crate::error::{Error, Result};
use crate::pauli::{Gate, GateKind, Pauli};
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    fn tag(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }
}

/// Parity of measurement bits (bit = 1 for outcome −1), XOR a constant. Fires when the result is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cond {
    pub labels: Vec<usize>,
    pub constant: bool,
}

impl Cond {
    pub fn always() -> Cond {
        Cond { labels: vec![], constant: true }
    }

    pub fn parity(labels: &[usize]) -> Cond {
        Cond { labels: labels.to_vec(), constant: false }
    }

    pub fn bit(label: usize) -> Cond {
        Cond::parity(&[label])
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.labels.iter().fold(self.constant, |a, &l| a ^ bits[l])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate(Gate),
    /// Noiseless preparation of |0⟩ (Z) or |+⟩ (X).
    Init { q: usize, basis: Basis },
    Measure { q: usize, basis: Basis, label: usize },
    /// Noiseless Pauli, applied when the condition fires.
    Correction { pauli: Pauli, cond: Cond },
    DiscardIf(Cond),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    pub n: usize,
    pub data: Vec<usize>,
    pub ancilla: Vec<usize>,
    pub flag: Vec<usize>,
    pub ops: Vec<Op>,
    pub labels: Vec<String>,
    /// Ops before this index are never faulted (used to isolate a noiseless preparation).
    pub noise_from: usize,
    /// Logical readout bits, each a parity of measurement labels.
    pub outputs: Vec<Cond>,
}

impl Circuit {
    pub fn new(n: usize, data: Vec<usize>, ancilla: Vec<usize>, flag: Vec<usize>) -> Circuit {
        Circuit { n, data, ancilla, flag, ops: vec![], labels: vec![], noise_from: 0, outputs: vec![] }
    }

    pub fn gate(&mut self, g: Gate) -> &mut Self {
        self.ops.push(Op::Gate(g));
        self
    }

    pub fn g1(&mut self, kind: GateKind, q: usize) -> &mut Self {
        self.gate(Gate::one(kind, q))
    }

    pub fn g2(&mut self, kind: GateKind, a: usize, b: usize) -> &mut Self {
        self.gate(Gate::two(kind, a, b))
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> &mut Self {
        self.gate(Gate::cnot(c, t))
    }

    pub fn init(&mut self, q: usize, basis: Basis) -> &mut Self {
        self.ops.push(Op::Init { q, basis });
        self
    }

    /// Adds a measurement and returns its label index. Labels must be unique.
    pub fn measure(&mut self, q: usize, basis: Basis, name: &str) -> usize {
        assert!(self.label(name).is_none(), "duplicate label {name}");
        self.labels.push(name.to_string());
        let label = self.labels.len() - 1;
        self.ops.push(Op::Measure { q, basis, label });
        label
    }

    pub fn correct(&mut self, pauli: Pauli, cond: Cond) -> &mut Self {
        debug_assert_eq!(pauli.n, self.n);
        self.ops.push(Op::Correction { pauli, cond });
        self
    }

    pub fn discard_if(&mut self, cond: Cond) -> &mut Self {
        self.ops.push(Op::DiscardIf(cond));
        self
    }

    pub fn label(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// Unique label name derived from `base`.
    pub fn fresh(&self, base: &str) -> String {
        if self.label(base).is_none() {
            return base.to_string();
        }
        (1..).map(|k| format!("{base}_{k}")).find(|s| self.label(s).is_none()).unwrap()
    }

    /// Appends the ops of `other` (same register layout), renaming clashing labels.
    pub fn append(&mut self, other: &Circuit) {
        assert_eq!(self.n, other.n, "register size mismatch");
        let map: Vec<usize> = other
            .labels
            .iter()
            .map(|l| {
                let name = self.fresh(l);
                self.labels.push(name);
                self.labels.len() - 1
            })
            .collect();
        let remap = |c: &Cond| Cond { labels: c.labels.iter().map(|&l| map[l]).collect(), constant: c.constant };
        for op in &other.ops {
            self.ops.push(match op {
                Op::Measure { q, basis, label } => Op::Measure { q: *q, basis: *basis, label: map[*label] },
                Op::Correction { pauli, cond } => Op::Correction { pauli: *pauli, cond: remap(cond) },
                Op::DiscardIf(c) => Op::DiscardIf(remap(c)),
                other => other.clone(),
            });
        }
        self.outputs.extend(other.outputs.iter().map(remap));
    }

    /// Marks everything added so far as noiseless.
    pub fn mark_noiseless_prep_end(&mut self) {
        self.noise_from = self.ops.len();
    }

    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Gate(_))).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(|o| match o {
            Op::Gate(g) => g.kind.is_clifford(),
            _ => true,
        })
    }

    /// Index bounds, label ordering, register membership and ancilla reuse discipline.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Circuit(m));
        let known = |q: usize| self.data.contains(&q) || self.ancilla.contains(&q) || self.flag.contains(&q);
        let mut defined = vec![false; self.labels.len()];
        // per ancilla/flag: true once measured and not yet re-initialised
        let mut spent = vec![false; self.n];
        let aux = |q: usize| self.ancilla.contains(&q) || self.flag.contains(&q);
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::Gate(g) => {
                    for &q in g.qubits() {
                        if q >= self.n || !known(q) {
                            return bad(format!("op {i}: qubit {q} not in any register"));
                        }
                        if spent[q] {
                            return bad(format!("op {i}: ancilla {q} reused without reset"));
                        }
                    }
                }
                Op::Init { q, .. } => {
                    if *q >= self.n || !known(*q) {
                        return bad(format!("op {i}: qubit {q} not in any register"));
                    }
                    spent[*q] = false;
                }
                Op::Measure { q, label, .. } => {
                    if *q >= self.n || !known(*q) {
                        return bad(format!("op {i}: qubit {q} not in any register"));
                    }
                    if defined[*label] {
                        return bad(format!("op {i}: label {} measured twice", self.labels[*label]));
                    }
                    defined[*label] = true;
                    if aux(*q) {
                        spent[*q] = true;
                    }
                }
                Op::Correction { pauli, cond } => {
                    if pauli.n != self.n {
                        return bad(format!("op {i}: Pauli on {} qubits", pauli.n));
                    }
                    if let Some(&l) = cond.labels.iter().find(|&&l| !defined[l]) {
                        return bad(format!("op {i}: condition uses {} before it is measured", self.labels[l]));
                    }
                }
                Op::DiscardIf(cond) => {
                    if let Some(&l) = cond.labels.iter().find(|&&l| !defined[l]) {
                        return bad(format!("op {i}: condition uses {} before it is measured", self.labels[l]));
                    }
                }
            }
        }
        if self.outputs.iter().flat_map(|c| &c.labels).any(|&l| !defined[l]) {
            return bad("output refers to an unmeasured label".into());
        }
        Ok(())
    }

    fn cond_text(&self, c: &Cond) -> String {
        let mut parts: Vec<String> = c.labels.iter().map(|&l| self.labels[l].clone()).collect();
        if c.constant {
            parts.push("1".into());
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("^")
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list = |v: &[usize]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "QUBITS {}", self.n);
        let _ = writeln!(s, "DATA {}", list(&self.data));
        let _ = writeln!(s, "ANCILLA {}", list(&self.ancilla));
        let _ = writeln!(s, "FLAG {}", list(&self.flag));
        let _ = writeln!(s, "NOISE_FROM {}", self.noise_from);
        for op in &self.ops {
            let _ = match op {
                Op::Gate(g) => writeln!(s, "{g}"),
                Op::Init { q, basis } => writeln!(s, "INIT {} {q}", basis.tag()),
                Op::Measure { q, basis, label } => writeln!(s, "M {} {q} {}", basis.tag(), self.labels[*label]),
                Op::Correction { pauli, cond } => writeln!(s, "CORR {pauli} IF {}", self.cond_text(cond)),
                Op::DiscardIf(c) => writeln!(s, "DISCARD_IF {}", self.cond_text(c)),
            };
        }
        for o in &self.outputs {
            let _ = writeln!(s, "OUT {}", self.cond_text(o));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut c = Circuit::default();
        let err = |ln: usize, m: &str| Error::Circuit(format!("line {}: {m}", ln + 1));
        let nums = |toks: &[&str], ln: usize| -> Result<Vec<usize>> {
            toks.iter().map(|t| t.parse::<usize>().map_err(|_| err(ln, "bad integer"))).collect()
        };
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "QUBITS" => c.n = nums(&toks[1..], ln)?.first().copied().ok_or_else(|| err(ln, "missing count"))?,
                "DATA" => c.data = nums(&toks[1..], ln)?,
                "ANCILLA" => c.ancilla = nums(&toks[1..], ln)?,
                "FLAG" => c.flag = nums(&toks[1..], ln)?,
                "NOISE_FROM" => c.noise_from = nums(&toks[1..], ln)?.first().copied().unwrap_or(0),
                "INIT" | "M" => {
                    let basis = match toks.get(1) {
                        Some(&"Z") => Basis::Z,
                        Some(&"X") => Basis::X,
                        _ => return Err(err(ln, "basis must be Z or X")),
                    };
                    let q = nums(&toks[2..3], ln)?[0];
                    if toks[0] == "INIT" {
                        c.init(q, basis);
                    } else {
                        let name = toks.get(3).ok_or_else(|| err(ln, "missing label"))?;
                        if c.label(name).is_some() {
                            return Err(err(ln, "duplicate label"));
                        }
                        c.measure(q, basis, name);
                    }
                }
                "CORR" => {
                    if toks.len() != 4 || toks[2] != "IF" {
                        return Err(err(ln, "expected CORR <pauli> IF <expr>"));
                    }
                    let p = Pauli::parse(toks[1], c.n)?;
                    let cond = c.parse_cond(toks[3]).ok_or_else(|| err(ln, "unknown label"))?;
                    c.correct(p, cond);
                }
                "OUT" => {
                    let cond = c.parse_cond(toks.get(1).ok_or_else(|| err(ln, "missing expr"))?).ok_or_else(|| err(ln, "unknown label"))?;
                    c.outputs.push(cond);
                }
                "DISCARD_IF" => {
                    let cond = c.parse_cond(toks.get(1).ok_or_else(|| err(ln, "missing expr"))?).ok_or_else(|| err(ln, "unknown label"))?;
                    c.discard_if(cond);
                }
                name => {
                    let kind = GateKind::from_name(name).ok_or_else(|| err(ln, "unknown gate"))?;
                    let qs = nums(&toks[1..], ln)?;
                    if qs.len() != kind.arity() {
                        return Err(err(ln, "wrong number of targets"));
                    }
                    let mut q = [qs[qs.len() - 1]; 3];
                    q[..qs.len()].copy_from_slice(&qs);
                    c.gate(Gate { kind, q });
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn parse_cond(&self, expr: &str) -> Option<Cond> {
        let mut cond = Cond { labels: vec![], constant: false };
        for t in expr.split('^') {
            match t {
                "1" => cond.constant ^= true,
                "0" => {}
                name => cond.labels.push(self.label(name)?),
            }
        }
        Some(cond)
    }
}
