//! Sum-of-products simulation for circuits whose two-qubit gates all couple
//! one readout qubit.
//!
//! A gate `exp(-i theta P_d Q_r / 2)` splits into one single-qubit rotation of
//! qubit `d` per eigenspace of `Q_r`, so a product input stays a short sum of
//! product states. The number of terms doubles only when the readout basis
//! changes (`XX` layer to `ZZ` layer), not per gate.

use num_complex::Complex64;

use crate::ansatz::{Op, RotKind, Template};
use crate::statevec::{Gate, StateVector};
use crate::{Error, Result};

/// Amplitudes of one qubit.
pub type Qubit = [Complex64; 2];
type Mat = [[Complex64; 2]; 2];

const MAX_TERMS: usize = 1 << 12;
/// Relative weight below which an eigen-component is dropped.
const DROP: f64 = 1e-30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
enum Basis {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
enum Coupling {
    /// `exp(-i theta P_d Q_r / 2)`.
    Rot { basis: Basis, index: usize },
    /// Controlled-Z.
    Cz,
}

#[derive(Clone, Debug, PartialEq)]
enum Step {
    Fixed { q: usize, m: Mat },
    Rot { q: usize, kind: RotKind, index: usize },
    Coupled { data: usize, coupling: Coupling },
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    data: Vec<Qubit>,
    ro: Qubit,
}

/// Compiled plan for `<Z_r>` after a readout-star template.
#[derive(Clone, Debug, PartialEq)]
pub struct StarPlan {
    n_qubits: usize,
    readout: usize,
    n_params: usize,
    steps: Vec<Step>,
}

fn mat2(g: &Gate) -> Mat {
    let m = g.matrix();
    [[m[0][0], m[0][1]], [m[1][0], m[1][1]]]
}

fn rot(kind: RotKind, theta: f64) -> Mat {
    let (s, c) = (theta / 2.0).sin_cos();
    match kind {
        RotKind::Ry => [[ONE * c, -ONE * s], [ONE * s, ONE * c]],
        RotKind::Rz => [[Complex64::from_polar(1.0, -theta / 2.0), ZERO], [ZERO, Complex64::from_polar(1.0, theta / 2.0)]],
        RotKind::Xx | RotKind::Zz => unreachable!("two-qubit kinds are couplings"),
    }
}

fn apply(m: &Mat, v: &Qubit) -> Qubit {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// `cos(t/2) I - i sign sin(t/2) P` for `P` in {X, Z}.
fn pauli_rot(basis: Basis, sign: f64, theta: f64) -> Mat {
    let (s, c) = (theta / 2.0).sin_cos();
    let a = Complex64::new(0.0, -sign * s);
    match basis {
        Basis::X => [[ONE * c, a], [a, ONE * c]],
        Basis::Z => [[ONE * c + a, ZERO], [ZERO, ONE * c - a]],
    }
}

/// Components of `v` in the two eigenspaces of `basis`, `+1` first.
fn split(basis: Basis, v: &Qubit) -> [Qubit; 2] {
    match basis {
        Basis::Z => [[v[0], ZERO], [ZERO, v[1]]],
        Basis::X => {
            let p = (v[0] + v[1]) * 0.5;
            let m = (v[0] - v[1]) * 0.5;
            [[p, p], [m, -m]]
        }
    }
}

fn norm2(v: &Qubit) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

impl StarPlan {
    /// `None` unless every two-qubit op of `t` couples `readout` through
    /// `XX`, `ZZ` or `CZ`, every parameter feeds one gate, and the term count
    /// stays bounded.
    pub fn new(t: &Template, readout: usize) -> Option<Self> {
        if readout >= t.n_qubits() || t.check_shift_compatible().is_err() {
            return None;
        }
        let partner = |targets: &[usize]| -> Option<usize> {
            match targets {
                [a, b] if *b == readout => Some(*a),
                [a, b] if *a == readout => Some(*b),
                _ => None,
            }
        };
        let mut steps = Vec::new();
        let mut known: Option<Basis> = None;
        let mut terms = 1usize;
        let mut couple = |basis: Basis, known: &mut Option<Basis>| {
            if *known != Some(basis) {
                terms *= 2;
                *known = Some(basis);
            }
        };
        for op in t.ops() {
            match op {
                Op::Fixed(g) => match g.targets().as_slice() {
                    [q] => {
                        if *q == readout {
                            known = None;
                        }
                        steps.push(Step::Fixed { q: *q, m: mat2(g) });
                    }
                    targets => match (g, partner(targets)) {
                        (Gate::Cz(..), Some(d)) => {
                            couple(Basis::Z, &mut known);
                            steps.push(Step::Coupled { data: d, coupling: Coupling::Cz });
                        }
                        _ => return None,
                    },
                },
                Op::Param { kind: kind @ (RotKind::Ry | RotKind::Rz), targets, index } => {
                    if targets[0] == readout {
                        known = None;
                    }
                    steps.push(Step::Rot { q: targets[0], kind: *kind, index: *index });
                }
                Op::Param { kind, targets, index } => {
                    let d = partner(targets)?;
                    let basis = if *kind == RotKind::Xx { Basis::X } else { Basis::Z };
                    couple(basis, &mut known);
                    steps.push(Step::Coupled { data: d, coupling: Coupling::Rot { basis, index: *index } });
                }
            }
        }
        (terms <= MAX_TERMS).then_some(Self { n_qubits: t.n_qubits(), readout, n_params: t.n_params(), steps })
    }

    pub fn readout(&self) -> usize {
        self.readout
    }

    /// Single-qubit amplitudes of `factors`, or `None` if any factor spans
    /// more than one qubit.
    pub fn qubits(&self, factors: &[StateVector]) -> Option<Vec<Qubit>> {
        if factors.len() != self.n_qubits || factors.iter().any(|f| f.n_qubits() != 1) {
            return None;
        }
        Some(factors.iter().map(|f| [f.amps()[0], f.amps()[1]]).collect())
    }

    /// `<Z_r>` of the template applied to the product state `input`.
    pub fn expect_z(&self, theta: &[f64], input: &[Qubit]) -> Result<f64> {
        if theta.len() != self.n_params || input.len() != self.n_qubits {
            return Err(Error::Shape(format!(
                "plan takes {} parameters and {} qubits, got {} and {}",
                self.n_params,
                self.n_qubits,
                theta.len(),
                input.len()
            )));
        }
        let r = self.readout;
        let mut terms = vec![Term { data: input.to_vec(), ro: input[r] }];
        for step in &self.steps {
            match step {
                Step::Fixed { q, m } => local(&mut terms, *q, r, m),
                Step::Rot { q, kind, index } => local(&mut terms, *q, r, &rot(*kind, theta[*index])),
                Step::Coupled { data: d, coupling } => {
                    let (basis, ms) = match coupling {
                        Coupling::Rot { basis, index } => {
                            let t = theta[*index];
                            (*basis, [pauli_rot(*basis, 1.0, t), pauli_rot(*basis, -1.0, t)])
                        }
                        Coupling::Cz => (Basis::Z, [[[ONE, ZERO], [ZERO, ONE]], [[ONE, ZERO], [ZERO, -ONE]]]),
                    };
                    let mut next = Vec::with_capacity(terms.len() * 2);
                    for t in terms {
                        let total = norm2(&t.ro);
                        let parts = split(basis, &t.ro);
                        for j in (0..2).filter(|&j| norm2(&parts[j]) > DROP * total) {
                            let mut data = t.data.clone();
                            data[*d] = apply(&ms[j], &t.data[*d]);
                            next.push(Term { data, ro: parts[j] });
                        }
                    }
                    terms = next;
                }
            }
        }
        Ok(z_expectation(&terms, r))
    }
}

fn local(terms: &mut [Term], q: usize, r: usize, m: &Mat) {
    for t in terms {
        if q == r {
            t.ro = apply(m, &t.ro);
        } else {
            t.data[q] = apply(m, &t.data[q]);
        }
    }
}

fn z_expectation(terms: &[Term], r: usize) -> f64 {
    let mut acc = 0.0;
    for (k, a) in terms.iter().enumerate() {
        for (l, b) in terms.iter().enumerate().skip(k) {
            let mut ov = a.ro[0].conj() * b.ro[0] - a.ro[1].conj() * b.ro[1];
            for (q, (x, y)) in a.data.iter().zip(&b.data).enumerate() {
                if q != r {
                    ov *= x[0].conj() * y[0] + x[1].conj() * y[1];
                }
            }
            acc += if k == l { ov.re } else { 2.0 * ov.re };
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{template, AnsatzSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_qubit(rng: &mut ChaCha8Rng) -> Qubit {
        let v = [Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))];
        let n = norm2(&v).sqrt();
        [v[0] / n, v[1] / n]
    }

    fn dense_z(t: &Template, theta: &[f64], input: &[Qubit], r: usize) -> f64 {
        let factors: Vec<StateVector> = input.iter().map(|q| StateVector::from_amplitudes(q.to_vec()).unwrap()).collect();
        let mut s = crate::featmap::product(&factors).unwrap();
        t.apply(theta, &mut s).unwrap();
        let n = t.n_qubits();
        let bit = 1usize << (n - 1 - r);
        s.amps().iter().enumerate().map(|(z, a)| if z & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() }).sum()
    }

    #[test]
    fn matches_dense_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, depth) in [(2, 1), (3, 2), (5, 3), (6, 2)] {
            let r = n - 1;
            let spec = AnsatzSpec { readout: Some(r), ..AnsatzSpec::xxzz(n, depth) };
            let t = template(&spec).unwrap();
            let plan = StarPlan::new(&t, r).expect("star layout");
            for _ in 0..20 {
                let theta: Vec<f64> = (0..t.n_params()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let input: Vec<Qubit> = (0..n).map(|_| random_qubit(&mut rng)).collect();
                let fast = plan.expect_z(&theta, &input).unwrap();
                assert!((fast - dense_z(&t, &theta, &input, r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_local_and_cz_steps() {
        let r = 1;
        let ops = vec![
            Op::Param { kind: RotKind::Ry, targets: vec![0], index: 0 },
            Op::Fixed(Gate::Cz(0, 1)),
            Op::Param { kind: RotKind::Rz, targets: vec![1], index: 1 },
            Op::Param { kind: RotKind::Xx, targets: vec![1, 2], index: 2 },
            Op::Fixed(Gate::H(1)),
        ];
        let t = Template::new(3, 3, ops).unwrap();
        let plan = StarPlan::new(&t, r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let theta: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let input: Vec<Qubit> = (0..3).map(|_| random_qubit(&mut rng)).collect();
            assert!((plan.expect_z(&theta, &input).unwrap() - dense_z(&t, &theta, &input, r)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_star_layouts() {
        let t = template(&AnsatzSpec::ryrz(3, 1)).unwrap();
        assert!(StarPlan::new(&t, 2).is_none());
        let ring = template(&AnsatzSpec::xxzz(4, 1)).unwrap();
        assert!(StarPlan::new(&ring, 3).is_none());
        let spec = AnsatzSpec { readout: Some(2), ..AnsatzSpec::xxzz(3, 1) };
        let plan = StarPlan::new(&template(&spec).unwrap(), 2).unwrap();
        assert!(plan.expect_z(&[0.0], &[[ONE, ZERO]; 3]).is_err());
    }
}
