//! Exact dense statevector simulation.
//!
//! Basis ordering: for an `n`-qubit register, qubit `q` is bit `n - 1 - q`
//! of the basis index, so qubit 0 is the most significant bit. The same
//! convention applies to the local basis of multi-qubit gates: the first
//! entry of `targets` is the most significant local bit.
//!
//! Gates are applied in place by sweeping the amplitude array with the
//! stride of the target qubit(s); there is no dense-matrix application path.
//! [`Gate::matrix`] exists only for verification.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default upper bound on register width.
pub const DEFAULT_MAX_QUBITS: usize = 20;

/// Tolerance used for normalization checks.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits, with the default qubit cap.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(n_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_cap(n_qubits: usize, cap: usize) -> Result<Self> {
        Self::basis_with_cap(n_qubits, 0, cap)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(n_qubits, index, DEFAULT_MAX_QUBITS)
    }

    fn basis_with_cap(n_qubits: usize, index: usize, cap: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > cap {
            return Err(Error::Capacity { requested: n_qubits, cap });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Index { index, size: dim });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps a normalized amplitude vector whose length is a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Shape(format!("amplitude vector length {dim} is not 2^n, n >= 1")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::Capacity { requested: n_qubits, cap: DEFAULT_MAX_QUBITS });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Argument(format!("state is not normalized (norm^2 = {norm})")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Argument("cannot normalize a zero or non-finite vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        gate.apply_unchecked(self.n_qubits, &mut self.amps);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!(
                "circuit has {} qubits, state has {}",
                circuit.n_qubits, self.n_qubits
            )));
        }
        for g in &circuit.gates {
            g.apply_unchecked(self.n_qubits, &mut self.amps);
        }
        Ok(())
    }

    /// Kronecker product; `self` occupies the more significant qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        self.tensor_with_cap(other, DEFAULT_MAX_QUBITS)
    }

    pub fn tensor_with_cap(&self, other: &StateVector, cap: usize) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        if n > cap {
            return Err(Error::Capacity { requested: n, cap });
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum_z g(z) |amp_z|^2`.
    pub fn expectation_diag<F: Fn(usize) -> f64>(&self, g: F) -> f64 {
        self.amps.iter().enumerate().map(|(z, a)| g(z) * a.norm_sqr()).sum()
    }

    /// Histogram of `shots` computational-basis measurements.
    pub fn sample_counts(&self, shots: usize, seed: u64) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.dim());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; self.dim()];
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let z = cdf.partition_point(|&c| c <= u).min(self.dim() - 1);
            counts[z] += 1;
        }
        Ok(counts)
    }

    /// Bloch vector `(<X>, <Y>, <Z>)` of a single-qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.n_qubits != 1 {
            return Err(Error::Shape(format!("bloch vector needs 1 qubit, got {}", self.n_qubits)));
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let off = a.conj() * b;
        Ok([2.0 * off.re, 2.0 * off.im, a.norm_sqr() - b.norm_sqr()])
    }
}

/// The `|0...0>` state on `n` qubits.
pub fn zero_state(n: usize) -> Result<StateVector> {
    StateVector::zero(n)
}

pub fn apply_gate(s: &StateVector, g: &Gate) -> Result<StateVector> {
    let mut out = s.clone();
    out.apply(g)?;
    Ok(out)
}

pub fn apply_circuit(s: &StateVector, c: &Circuit) -> Result<StateVector> {
    let mut out = s.clone();
    out.apply_circuit(c)?;
    Ok(out)
}

pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

pub fn probabilities(s: &StateVector) -> Vec<f64> {
    s.probabilities()
}

pub fn expectation_diag<F: Fn(usize) -> f64>(s: &StateVector, g: F) -> f64 {
    s.expectation_diag(g)
}

pub fn sample_counts(s: &StateVector, shots: usize, seed: u64) -> Result<Vec<u64>> {
    s.sample_counts(shots, seed)
}

/// Gate set. Rotations follow `R_P(theta) = exp(-i theta P / 2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    Ry(usize, f64),
    Rz(usize, f64),
    Cz(usize, usize),
    Xx(usize, usize, f64),
    Zz(usize, usize, f64),
    /// `|z> -> exp(i phases[z_local]) |z>` over the basis of `targets`.
    DiagPhase { targets: Vec<usize>, phases: Vec<f64> },
}

impl Gate {
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cz(a, b) | Gate::Xx(a, b, _) | Gate::Zz(a, b, _) => vec![*a, *b],
            Gate::DiagPhase { targets, .. } => targets.clone(),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let targets = self.targets();
        for (i, &t) in targets.iter().enumerate() {
            if t >= n_qubits {
                return Err(Error::Index { index: t, size: n_qubits });
            }
            if targets[..i].contains(&t) {
                return Err(Error::Argument(format!("repeated target qubit {t} in {self:?}")));
            }
        }
        if let Gate::DiagPhase { targets, phases } = self {
            if targets.is_empty() || phases.len() != 1usize << targets.len() {
                return Err(Error::Shape(format!(
                    "DiagPhase over {} targets needs {} phases, got {}",
                    targets.len(),
                    1usize << targets.len(),
                    phases.len()
                )));
            }
        }
        Ok(())
    }

    /// Inverse gate.
    pub fn dagger(&self) -> Gate {
        match self {
            Gate::H(_) | Gate::X(_) | Gate::Cz(..) => self.clone(),
            Gate::Ry(q, t) => Gate::Ry(*q, -t),
            Gate::Rz(q, t) => Gate::Rz(*q, -t),
            Gate::Xx(a, b, t) => Gate::Xx(*a, *b, -t),
            Gate::Zz(a, b, t) => Gate::Zz(*a, *b, -t),
            Gate::DiagPhase { targets, phases } => Gate::DiagPhase {
                targets: targets.clone(),
                phases: phases.iter().map(|p| -p).collect(),
            },
        }
    }

    /// Dense unitary in the local basis of [`Gate::targets`] (row-major).
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let k = self.targets().len();
        let dim = 1usize << k;
        // Columns are images of local basis states under the strided kernels.
        let local: Vec<usize> = (0..k).collect();
        let relabeled = self.relabel(&local);
        let mut m = vec![vec![ZERO; dim]; dim];
        for col in 0..dim {
            let mut v = vec![ZERO; dim];
            v[col] = ONE;
            relabeled.apply_unchecked(k, &mut v);
            for (row, amp) in v.into_iter().enumerate() {
                m[row][col] = amp;
            }
        }
        m
    }

    /// Same gate acting on `map[t]` for each current target position `t`.
    fn relabel(&self, new_targets: &[usize]) -> Gate {
        let t = new_targets;
        match self {
            Gate::H(_) => Gate::H(t[0]),
            Gate::X(_) => Gate::X(t[0]),
            Gate::Ry(_, a) => Gate::Ry(t[0], *a),
            Gate::Rz(_, a) => Gate::Rz(t[0], *a),
            Gate::Cz(..) => Gate::Cz(t[0], t[1]),
            Gate::Xx(_, _, a) => Gate::Xx(t[0], t[1], *a),
            Gate::Zz(_, _, a) => Gate::Zz(t[0], t[1], *a),
            Gate::DiagPhase { phases, .. } => Gate::DiagPhase { targets: t.to_vec(), phases: phases.clone() },
        }
    }

    pub(crate) fn apply_unchecked(&self, n: usize, amps: &mut [Complex64]) {
        match *self {
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for_pairs(n, q, amps, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * s;
                    *b = (x - y) * s;
                });
            }
            Gate::X(q) => for_pairs(n, q, amps, std::mem::swap),
            Gate::Ry(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                for_pairs(n, q, amps, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = x * c - y * s;
                    *b = x * s + y * c;
                });
            }
            Gate::Rz(q, theta) => {
                let p0 = Complex64::from_polar(1.0, -theta / 2.0);
                let p1 = p0.conj();
                for_pairs(n, q, amps, |a, b| {
                    *a *= p0;
                    *b *= p1;
                });
            }
            Gate::Cz(qa, qb) => {
                let mask = bit(n, qa) | bit(n, qb);
                for (z, a) in amps.iter_mut().enumerate() {
                    if z & mask == mask {
                        *a = -*a;
                    }
                }
            }
            Gate::Zz(qa, qb, theta) => {
                let (ma, mb) = (bit(n, qa), bit(n, qb));
                let even = Complex64::from_polar(1.0, -theta / 2.0);
                let odd = even.conj();
                for (z, a) in amps.iter_mut().enumerate() {
                    let parity = ((z & ma) != 0) ^ ((z & mb) != 0);
                    *a *= if parity { odd } else { even };
                }
            }
            Gate::Xx(qa, qb, theta) => {
                let (ma, mb) = (bit(n, qa), bit(n, qb));
                let (s, c) = (theta / 2.0).sin_cos();
                let mis = Complex64::new(0.0, -s);
                for z in 0..amps.len() {
                    if z & ma == 0 {
                        let w = z ^ ma ^ mb;
                        let (x, y) = (amps[z], amps[w]);
                        amps[z] = x * c + y * mis;
                        amps[w] = y * c + x * mis;
                    }
                }
            }
            Gate::DiagPhase { ref targets, ref phases } => {
                let masks: Vec<usize> = targets.iter().map(|&t| bit(n, t)).collect();
                let factors: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
                for (z, a) in amps.iter_mut().enumerate() {
                    let local = masks.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(z & m != 0));
                    *a *= factors[local];
                }
            }
        }
    }
}

#[inline]
fn bit(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Visits every amplitude pair differing only in qubit `q` (bit clear, bit set).
#[inline]
fn for_pairs<F: FnMut(&mut Complex64, &mut Complex64)>(n: usize, q: usize, amps: &mut [Complex64], mut f: F) {
    let stride = bit(n, q);
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends every gate of `other`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!("cannot append {}-qubit circuit to {}", other.n_qubits, self.n_qubits)));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Inverse circuit: reversed order, each gate inverted.
    pub fn dagger(&self) -> Circuit {
        Circuit { n_qubits: self.n_qubits, gates: self.gates.iter().rev().map(Gate::dagger).collect() }
    }

    /// Applies the circuit to `|0...0>`.
    pub fn run(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits)?;
        s.apply_circuit(self)?;
        Ok(s)
    }
}
