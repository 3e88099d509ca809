//! Dense state vectors for circuits with T, T† and CCZ. Basis index bit q is qubit q.

use crate::error::{Error, Result};
use crate::pauli::{Gate, GateKind, Pauli};
use crate::tableau::StabilizerState;
use num_complex::Complex64 as C;
use rand::Rng;

pub const MAX_SV_QUBITS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amp: Vec<C>,
}

const FRAC: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl StateVector {
    /// |0…0⟩.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_SV_QUBITS {
            return Err(Error::Capacity(n, MAX_SV_QUBITS));
        }
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        amp[0] = C::new(1.0, 0.0);
        Ok(StateVector { n, amp })
    }

    pub fn from_amplitudes(amp: Vec<C>) -> Result<Self> {
        let n = amp.len().trailing_zeros() as usize;
        if amp.len() != 1 << n {
            return Err(Error::Dimension(amp.len(), 1 << n));
        }
        if n > MAX_SV_QUBITS {
            return Err(Error::Capacity(n, MAX_SV_QUBITS));
        }
        Ok(StateVector { n, amp })
    }

    /// Computational basis state with the given bits (bit q = qubit q).
    pub fn basis(n: usize, bits: usize) -> Result<Self> {
        let mut s = StateVector::new(n)?;
        s.amp[0] = C::new(0.0, 0.0);
        s.amp[bits] = C::new(1.0, 0.0);
        Ok(s)
    }

    /// The unique state stabilized by a full commuting set of `n` generators.
    pub fn from_stabilizers(n: usize, gens: &[Pauli]) -> Result<Self> {
        for b in 0..1usize << n {
            let mut s = StateVector::basis(n, b)?;
            for g in gens {
                let pg = s.pauli_applied(g);
                for (a, p) in s.amp.iter_mut().zip(pg) {
                    *a = (*a + p) * 0.5;
                }
            }
            if s.norm_sqr() > 1e-6 {
                s.normalize();
                return Ok(s);
            }
        }
        Err(Error::InvalidGroup("stabilizers have no common +1 eigenvector".into()))
    }

    /// Amplitudes of a tableau state, up to global phase.
    pub fn from_tableau(st: &StabilizerState) -> Result<Self> {
        let n = st.n();
        let mut probe = st.clone();
        let b = (0..n).filter(|&q| probe.measure_z(q) == -1).fold(0usize, |acc, q| acc | 1 << q);
        let mut s = StateVector::basis(n, b)?;
        let half = C::new(0.5, 0.0);
        for g in st.stabilizers() {
            s.combine(&g, half, half);
        }
        s.normalize();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        for a in &mut self.amp {
            *a /= s;
        }
    }

    fn one_qubit(&mut self, q: usize, m: [[C; 2]; 2]) {
        let b = 1usize << q;
        for i in 0..self.amp.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amp[i], self.amp[i | b]);
                self.amp[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// `P|ψ⟩` without modifying the state.
    pub fn pauli_applied(&self, p: &Pauli) -> Vec<C> {
        let mut out = self.clone();
        out.apply_pauli(p);
        out.amp
    }

    pub fn apply_pauli(&mut self, p: &Pauli) {
        self.combine(p, C::new(0.0, 0.0), C::new(1.0, 0.0));
    }

    /// ψ ← α·ψ + β·Pψ in place.
    fn combine(&mut self, p: &Pauli, alpha: C, beta: C) {
        let (x, z, ph) = pauli_action(p);
        let sgn = |b: usize| if (b & z).count_ones() & 1 == 1 { -ph } else { ph };
        if x == 0 {
            for (b, a) in self.amp.iter_mut().enumerate() {
                *a *= alpha + beta * sgn(b);
            }
            return;
        }
        let hi = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..self.amp.len() {
            if b & hi == 0 {
                let (a0, a1) = (self.amp[b], self.amp[b ^ x]);
                self.amp[b] = alpha * a0 + beta * sgn(b ^ x) * a1;
                self.amp[b ^ x] = alpha * a1 + beta * sgn(b) * a0;
            }
        }
    }

    fn rotate(&mut self, p: &Pauli, s: f64) {
        self.combine(p, C::new(FRAC, 0.0), C::new(0.0, s * FRAC));
    }

    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        use GateKind::*;
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n) {
            return Err(Error::InvalidTarget(format!("qubit {q} outside {} qubits", self.n)));
        }
        let o = C::new(0.0, 0.0);
        let l = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        let h = C::new(FRAC, 0.0);
        let [a, b, c] = g.q;
        let t = C::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        match g.kind {
            H => self.one_qubit(a, [[h, h], [h, -h]]),
            S => self.one_qubit(a, [[l, o], [o, i]]),
            Sdg => self.one_qubit(a, [[l, o], [o, -i]]),
            T => self.one_qubit(a, [[l, o], [o, t]]),
            Tdg => self.one_qubit(a, [[l, o], [o, t.conj()]]),
            SqrtX => {
                let (p, m) = (C::new(0.5, 0.5), C::new(0.5, -0.5));
                self.one_qubit(a, [[p, m], [m, p]])
            }
            SqrtXdg => {
                let (p, m) = (C::new(0.5, 0.5), C::new(0.5, -0.5));
                self.one_qubit(a, [[m, p], [p, m]])
            }
            X => self.one_qubit(a, [[o, l], [l, o]]),
            Y => self.one_qubit(a, [[o, -i], [i, o]]),
            Z => self.one_qubit(a, [[l, o], [o, -l]]),
            Cnot => {
                let (cb, tb) = (1usize << a, 1usize << b);
                for k in 0..self.amp.len() {
                    if k & cb != 0 && k & tb == 0 {
                        self.amp.swap(k, k | tb);
                    }
                }
            }
            Cz => {
                let m = (1usize << a) | (1usize << b);
                for (k, v) in self.amp.iter_mut().enumerate() {
                    if k & m == m {
                        *v = -*v;
                    }
                }
            }
            Ccz => {
                let m = (1usize << a) | (1usize << b) | (1usize << c);
                for (k, v) in self.amp.iter_mut().enumerate() {
                    if k & m == m {
                        *v = -*v;
                    }
                }
            }
            Swap => {
                let (ba, bb) = (1usize << a, 1usize << b);
                for k in 0..self.amp.len() {
                    if k & ba != 0 && k & bb == 0 {
                        self.amp.swap(k, (k ^ ba) | bb);
                    }
                }
            }
            Xx | Xxdg | Yy | Yydg | Zz | Zzdg | Rx | Rxdg => {
                let (letter, s) = g.kind.rotation().expect("rotation");
                let p = Pauli::on(self.n, letter, g.qubits());
                self.rotate(&p, s as f64);
            }
        }
        Ok(())
    }

    pub fn expectation(&self, p: &Pauli) -> f64 {
        let (x, z, ph) = pauli_action(p);
        let mut e = C::new(0.0, 0.0);
        for (b, a) in self.amp.iter().enumerate() {
            let s = if ((b ^ x) & z).count_ones() & 1 == 1 { -ph } else { ph };
            e += a.conj() * s * self.amp[b ^ x];
        }
        e.re
    }

    /// Projective measurement of a Hermitian Pauli; returns ±1.
    pub fn measure<R: Rng>(&mut self, p: &Pauli, rng: &mut R) -> Result<i8> {
        if !p.is_hermitian() {
            return Err(Error::InvalidOperator(p.to_string()));
        }
        let p_plus = ((1.0 + self.expectation(p)) / 2.0).clamp(0.0, 1.0);
        let outcome: i8 = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        let prob = if outcome == 1 { p_plus } else { 1.0 - p_plus };
        let f = 0.5 / prob.sqrt();
        self.combine(p, C::new(f, 0.0), C::new(outcome as f64 * f, 0.0));
        Ok(outcome)
    }

    pub fn reset<R: Rng>(&mut self, q: usize, x_basis: bool, rng: &mut R) {
        let (letter, flip) = if x_basis { ('X', 'Z') } else { ('Z', 'X') };
        if self.measure(&Pauli::single(self.n, q, letter), rng).expect("hermitian") == -1 {
            self.apply_pauli(&Pauli::single(self.n, q, flip));
        }
    }

    /// Samples all qubits in Z; returns the basis index (bit q = qubit q).
    pub fn measure_all_z<R: Rng>(&self, rng: &mut R) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, a) in self.amp.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                return k;
            }
        }
        self.amp.len() - 1
    }
}

/// (x mask, z mask, phase) such that P|b⟩ = phase·(−1)^{|b∧z|}·|b⊕x⟩.
fn pauli_action(p: &Pauli) -> (usize, usize, C) {
    let ny = (p.x & p.z).count_ones() as u8;
    let ph = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][((p.phase + ny) & 3) as usize];
    (p.x as usize, p.z as usize, ph)
}

/// Compares up to a global phase fixed from the largest amplitude of `b`.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    if a.n != b.n {
        return false;
    }
    let (k, bk) = b
        .amp
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
        .expect("non-empty");
    if bk.norm() < 1e-12 || a.amp[k].norm() < 1e-12 {
        return false;
    }
    let phase = (a.amp[k] / bk) / (a.amp[k] / bk).norm();
    a.amp.iter().zip(&b.amp).all(|(x, y)| (x - phase * y).norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::shot_rng;

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&Gate::one(GateKind::H, 0)).unwrap();
        assert!((s.amplitudes()[0].re - FRAC).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC).abs() < 1e-15);
    }

    #[test]
    fn ccz_flips_all_ones() {
        let mut s = StateVector::basis(3, 0b111).unwrap();
        s.apply(&Gate::ccz(0, 1, 2)).unwrap();
        assert_eq!(s.amplitudes()[7], C::new(-1.0, 0.0));
    }

    #[test]
    fn t_to_the_eighth_is_identity() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&Gate::one(GateKind::H, 0)).unwrap();
        let before = s.clone();
        for _ in 0..8 {
            s.apply(&Gate::one(GateKind::T, 0)).unwrap();
        }
        assert!(equal_up_to_global_phase(&s, &before, 1e-12));
    }

    #[test]
    fn basis_state_readout() {
        let s = StateVector::basis(3, 0b101).unwrap();
        let mut r = shot_rng(1, 0);
        for _ in 0..20 {
            assert_eq!(s.measure_all_z(&mut r), 0b101);
        }
    }

    #[test]
    fn ghz_frequencies() {
        let mut s = StateVector::new(3).unwrap();
        s.apply(&Gate::one(GateKind::H, 0)).unwrap();
        s.apply(&Gate::cnot(0, 1)).unwrap();
        s.apply(&Gate::cnot(0, 2)).unwrap();
        let mut r = shot_rng(3, 0);
        let n = 10_000;
        let zeros = (0..n).filter(|_| s.measure_all_z(&mut r) == 0).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((zeros - 0.5 * n as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn phase_equivalence() {
        let mut a = StateVector::new(2).unwrap();
        a.apply(&Gate::one(GateKind::H, 0)).unwrap();
        a.apply(&Gate::cnot(0, 1)).unwrap();
        let mut b = a.clone();
        let ph = C::from_polar(1.0, std::f64::consts::PI / 7.0);
        b.amp.iter_mut().for_each(|v| *v *= ph);
        assert!(equal_up_to_global_phase(&a, &b, 1e-12));
        b.amp[3] = -b.amp[3];
        assert!(!equal_up_to_global_phase(&a, &b, 1e-6));
    }

    #[test]
    fn capacity_limit() {
        assert_eq!(StateVector::new(21), Err(Error::Capacity(21, 20)));
    }

    #[test]
    fn stabilizer_projection() {
        let all: Vec<usize> = (0..8).collect();
        let mut gens = vec![Pauli::xs(8, &all)];
        for j in 1..8 {
            gens.push(Pauli::zs(8, &[0, j]));
        }
        let s = StateVector::from_stabilizers(8, &gens).unwrap();
        assert!((s.expectation(&gens[0]) - 1.0).abs() < 1e-10);
        assert!((s.amplitudes()[0].norm() - FRAC).abs() < 1e-12);
    }
}
