//! Parameterized circuits `W(theta)`.
//!
//! RyRz layout (`n` qubits, depth `l`, parameters `2n(l+1)`):
//! rotation layer 0, then `l` times [CZ on every entangler pair, rotation
//! layer]. A rotation layer is `Ry(theta[2(nL+q)])` then
//! `Rz(theta[2(nL+q)+1])` on each qubit `q` in order.
//!
//! XXZZ layout (`|pairs|` entanglers, depth `l`, parameters `2|pairs|l`):
//! per layer, `XX` on each pair (one angle each) followed by `ZZ` on each pair.
//! An optional readout qubit receives a final Hadamard.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::statevec::{Circuit, Gate, StateVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    RyRz,
    Xxzz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n_qubits: usize,
    pub depth: usize,
    /// Entangling pairs; all pairs for RyRz, a ring (or a star onto the
    /// readout qubit) for XXZZ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entangler: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<usize>,
}

impl AnsatzSpec {
    pub fn ryrz(n_qubits: usize, depth: usize) -> Self {
        Self { kind: AnsatzKind::RyRz, n_qubits, depth, entangler: None, readout: None }
    }

    pub fn xxzz(n_qubits: usize, depth: usize) -> Self {
        Self { kind: AnsatzKind::Xxzz, n_qubits, depth, entangler: None, readout: None }
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        if let Some(p) = &self.entangler {
            return p.clone();
        }
        let n = self.n_qubits;
        match (self.kind, self.readout) {
            (AnsatzKind::RyRz, _) => all_pairs(n),
            (AnsatzKind::Xxzz, Some(r)) => (0..n).filter(|&q| q != r).map(|q| (q, r)).collect(),
            (AnsatzKind::Xxzz, None) => ring(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::Argument("ansatz needs at least one qubit".into()));
        }
        if let Some(r) = self.readout {
            if r >= self.n_qubits {
                return Err(Error::Index { index: r, size: self.n_qubits });
            }
        }
        for (a, b) in self.pairs() {
            if a == b || a >= self.n_qubits || b >= self.n_qubits {
                return Err(Error::Argument(format!("invalid entangler pair ({a}, {b})")));
            }
        }
        Ok(())
    }
}

pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Nearest-neighbour ring; a single pair for two qubits, none for one.
pub fn ring(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

pub fn parameter_count(spec: &AnsatzSpec) -> usize {
    match spec.kind {
        AnsatzKind::RyRz => 2 * spec.n_qubits * (spec.depth + 1),
        AnsatzKind::Xxzz => 2 * spec.pairs().len() * spec.depth,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotKind {
    Ry,
    Rz,
    Xx,
    Zz,
}

/// One step of a parametric circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    Fixed(Gate),
    /// `exp(-i theta[index] P / 2)` with `P` the Pauli (string) of `kind`.
    Param { kind: RotKind, targets: Vec<usize>, index: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    n_qubits: usize,
    n_params: usize,
    ops: Vec<Op>,
}

fn bind(kind: RotKind, t: &[usize], theta: f64) -> Gate {
    match kind {
        RotKind::Ry => Gate::Ry(t[0], theta),
        RotKind::Rz => Gate::Rz(t[0], theta),
        RotKind::Xx => Gate::Xx(t[0], t[1], theta),
        RotKind::Zz => Gate::Zz(t[0], t[1], theta),
    }
}

impl Template {
    pub fn new(n_qubits: usize, n_params: usize, ops: Vec<Op>) -> Result<Self> {
        for op in &ops {
            match op {
                Op::Fixed(g) => g.validate(n_qubits)?,
                Op::Param { kind, targets, index } => {
                    let arity = if matches!(kind, RotKind::Ry | RotKind::Rz) { 1 } else { 2 };
                    if targets.len() != arity {
                        return Err(Error::Shape(format!("{kind:?} takes {arity} targets")));
                    }
                    if *index >= n_params {
                        return Err(Error::Index { index: *index, size: n_params });
                    }
                    bind(*kind, targets, 0.0).validate(n_qubits)?;
                }
            }
        }
        Ok(Self { n_qubits, n_params, ops })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::Shape(format!("expected {} parameters, got {}", self.n_params, theta.len())));
        }
        Ok(())
    }

    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        self.check_theta(theta)?;
        let gates = self
            .ops
            .iter()
            .map(|op| match op {
                Op::Fixed(g) => g.clone(),
                Op::Param { kind, targets, index } => bind(*kind, targets, theta[*index]),
            })
            .collect();
        Circuit::from_gates(self.n_qubits, gates)
    }

    /// Applies `W(theta)` in place.
    pub fn apply(&self, theta: &[f64], s: &mut StateVector) -> Result<()> {
        self.check_theta(theta)?;
        if s.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!("state has {} qubits, ansatz {}", s.n_qubits(), self.n_qubits)));
        }
        for op in &self.ops {
            match op {
                Op::Fixed(g) => s.apply(g)?,
                Op::Param { kind, targets, index } => s.apply(&bind(*kind, targets, theta[*index]))?,
            }
        }
        Ok(())
    }

    /// Errors unless every parameter feeds exactly one rotation, which is
    /// what the two-term shift rule needs.
    pub fn check_shift_compatible(&self) -> Result<()> {
        let mut uses = vec![0usize; self.n_params];
        for op in &self.ops {
            if let Op::Param { index, .. } = op {
                uses[*index] += 1;
            }
        }
        if let Some((k, u)) = uses.iter().enumerate().find(|(_, &u)| u != 1) {
            return Err(Error::Unsupported(format!(
                "parameter {k} enters {u} gates; the two-term shift rule needs exactly one"
            )));
        }
        Ok(())
    }

    /// Gradient of `expectation` by the parameter-shift rule.
    pub fn parameter_shift_gradient<F: FnMut(&[f64]) -> f64>(&self, expectation: F, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        self.check_shift_compatible()?;
        Ok(crate::optim::parameter_shift_gradient(expectation, theta))
    }

    /// Value and gradient of `<psi| W(theta)^dag diag(g) W(theta) |psi>` by
    /// reverse-mode (adjoint) differentiation: one forward pass, one backward.
    pub fn adjoint_gradient(&self, theta: &[f64], psi: &StateVector, g: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut phi = psi.clone();
        self.apply(theta, &mut phi)?;
        if g.len() != phi.dim() {
            return Err(Error::Shape(format!("observable has {} entries, state {}", g.len(), phi.dim())));
        }
        let value: f64 = phi.amps().iter().zip(g).map(|(a, w)| w * a.norm_sqr()).sum();
        let lam_amps: Vec<Complex64> = phi.amps().iter().zip(g).map(|(a, w)| a * w).collect();
        let mut phi = phi.into_amps();
        let mut lam = lam_amps;
        let n = self.n_qubits;
        let mut grad = vec![0.0; self.n_params];
        for op in self.ops.iter().rev() {
            let gate = match op {
                Op::Fixed(g) => g.clone(),
                Op::Param { kind, targets, index } => {
                    grad[*index] += generator_overlap(*kind, targets, n, &lam, &phi).im;
                    bind(*kind, targets, theta[*index])
                }
            };
            let inv = gate.dagger();
            inv.apply_unchecked(n, &mut phi);
            inv.apply_unchecked(n, &mut lam);
        }
        Ok((value, grad))
    }
}

/// `<lam| P |phi>` for the generator `P` of a rotation kind.
fn generator_overlap(kind: RotKind, t: &[usize], n: usize, lam: &[Complex64], phi: &[Complex64]) -> Complex64 {
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut acc = Complex64::new(0.0, 0.0);
    match kind {
        RotKind::Ry => {
            let m = bit(t[0]);
            // Y|0> = i|1>, Y|1> = -i|0>.
            for z in 0..phi.len() {
                let v = if z & m == 0 { Complex64::new(0.0, -1.0) * phi[z | m] } else { Complex64::new(0.0, 1.0) * phi[z & !m] };
                acc += lam[z].conj() * v;
            }
        }
        RotKind::Rz => {
            let m = bit(t[0]);
            for z in 0..phi.len() {
                let s = if z & m == 0 { 1.0 } else { -1.0 };
                acc += lam[z].conj() * phi[z] * s;
            }
        }
        RotKind::Xx => {
            let m = bit(t[0]) | bit(t[1]);
            for z in 0..phi.len() {
                acc += lam[z].conj() * phi[z ^ m];
            }
        }
        RotKind::Zz => {
            let (a, b) = (bit(t[0]), bit(t[1]));
            for z in 0..phi.len() {
                let s = if ((z & a) != 0) ^ ((z & b) != 0) { -1.0 } else { 1.0 };
                acc += lam[z].conj() * phi[z] * s;
            }
        }
    }
    acc
}

pub fn template(spec: &AnsatzSpec) -> Result<Template> {
    spec.validate()?;
    let n = spec.n_qubits;
    let pairs = spec.pairs();
    let mut ops = Vec::new();
    match spec.kind {
        AnsatzKind::RyRz => {
            for layer in 0..=spec.depth {
                if layer > 0 {
                    ops.extend(pairs.iter().map(|&(a, b)| Op::Fixed(Gate::Cz(a, b))));
                }
                for q in 0..n {
                    let base = 2 * (n * layer + q);
                    ops.push(Op::Param { kind: RotKind::Ry, targets: vec![q], index: base });
                    ops.push(Op::Param { kind: RotKind::Rz, targets: vec![q], index: base + 1 });
                }
            }
        }
        AnsatzKind::Xxzz => {
            let p = pairs.len();
            for layer in 0..spec.depth {
                for (k, &(a, b)) in pairs.iter().enumerate() {
                    ops.push(Op::Param { kind: RotKind::Xx, targets: vec![a, b], index: 2 * p * layer + k });
                }
                for (k, &(a, b)) in pairs.iter().enumerate() {
                    ops.push(Op::Param { kind: RotKind::Zz, targets: vec![a, b], index: 2 * p * layer + p + k });
                }
            }
        }
    }
    if let Some(r) = spec.readout {
        ops.push(Op::Fixed(Gate::H(r)));
    }
    Template::new(n, parameter_count(spec), ops)
}

pub fn build_ryrz(spec: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    if spec.kind != AnsatzKind::RyRz {
        return Err(Error::Argument("ansatz is not RyRz".into()));
    }
    template(spec)?.circuit(theta)
}

pub fn build_xxzz(spec: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    if spec.kind != AnsatzKind::Xxzz {
        return Err(Error::Argument("ansatz is not XXZZ".into()));
    }
    template(spec)?.circuit(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn parameter_counts() {
        assert_eq!(parameter_count(&AnsatzSpec::ryrz(2, 4)), 20);
        assert_eq!(parameter_count(&AnsatzSpec::ryrz(3, 4)), 30);
        assert_eq!(parameter_count(&AnsatzSpec::ryrz(4, 4)), 40);
        assert_eq!(parameter_count(&AnsatzSpec::ryrz(1, 0)), 2);
        assert_eq!(parameter_count(&AnsatzSpec::xxzz(4, 1)), 8);
    }

    #[test]
    fn zero_angles_are_identity() {
        let s = StateVector::normalized(vec![
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -0.6),
        ])
        .unwrap();
        for spec in [AnsatzSpec::ryrz(2, 0), AnsatzSpec::xxzz(2, 3)] {
            let c = template(&spec).unwrap().circuit(&vec![0.0; parameter_count(&spec)]).unwrap();
            let mut t = s.clone();
            t.apply_circuit(&c).unwrap();
            assert!((t.inner(&s).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn layout_and_errors() {
        let c = build_ryrz(&AnsatzSpec::ryrz(2, 1), &(0..8).map(|k| k as f64).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            c.gates(),
            &[
                Gate::Ry(0, 0.0),
                Gate::Rz(0, 1.0),
                Gate::Ry(1, 2.0),
                Gate::Rz(1, 3.0),
                Gate::Cz(0, 1),
                Gate::Ry(0, 4.0),
                Gate::Rz(0, 5.0),
                Gate::Ry(1, 6.0),
                Gate::Rz(1, 7.0)
            ]
        );
        assert!(matches!(build_ryrz(&AnsatzSpec::ryrz(2, 1), &[0.0; 3]), Err(Error::Shape(_))));
        assert!(matches!(build_xxzz(&AnsatzSpec::xxzz(4, 1), &[0.0; 7]), Err(Error::Shape(_))));
        let star = AnsatzSpec { readout: Some(3), ..AnsatzSpec::xxzz(4, 1) };
        assert_eq!(star.pairs(), vec![(0, 3), (1, 3), (2, 3)]);
        assert_eq!(template(&star).unwrap().ops().last(), Some(&Op::Fixed(Gate::H(3))));
    }

    #[test]
    fn xx_pi_flip() {
        let c = build_xxzz(&AnsatzSpec::xxzz(2, 1), &[PI, 0.0]).unwrap();
        let s = c.run().unwrap();
        assert!((s.amps()[3].norm() - 1.0).abs() < 1e-12);
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        StateVector::normalized((0..1 << n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
            .unwrap()
    }

    #[test]
    fn gradients_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [AnsatzSpec::ryrz(3, 2), AnsatzSpec::xxzz(3, 2), AnsatzSpec { readout: Some(2), ..AnsatzSpec::xxzz(3, 2) }] {
            let t = template(&spec).unwrap();
            let psi = random_state(3, &mut rng);
            let g: Vec<f64> = (0..8usize).map(|z| if z.count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let theta: Vec<f64> = (0..t.n_params()).map(|_| rng.random_range(-PI..PI)).collect();
            let f = |th: &[f64]| {
                let mut s = psi.clone();
                t.apply(th, &mut s).unwrap();
                s.expectation_diag(|z| g[z])
            };
            let ps = t.parameter_shift_gradient(f, &theta).unwrap();
            let (v, adj) = t.adjoint_gradient(&theta, &psi, &g).unwrap();
            assert!((v - f(&theta)).abs() < 1e-12);
            let h = 1e-5;
            for k in 0..theta.len() {
                let mut p = theta.clone();
                p[k] += h;
                let mut m = theta.clone();
                m[k] -= h;
                let fd = (f(&p) - f(&m)) / (2.0 * h);
                assert!((ps[k] - fd).abs() < 1e-6, "{spec:?} k={k}");
                assert!((ps[k] - adj[k]).abs() < 1e-10, "{spec:?} k={k}");
            }
        }
    }

    #[test]
    fn shared_parameters_are_rejected() {
        let t = Template::new(
            1,
            1,
            vec![
                Op::Param { kind: RotKind::Ry, targets: vec![0], index: 0 },
                Op::Param { kind: RotKind::Ry, targets: vec![0], index: 0 },
            ],
        )
        .unwrap();
        assert!(matches!(t.parameter_shift_gradient(|_| 0.0, &[0.1]), Err(Error::Unsupported(_))));
    }
}
