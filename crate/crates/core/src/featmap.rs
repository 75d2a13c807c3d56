//! Classical-to-quantum encoders.
//!
//! An [`Encoder`] is an ordered list of [`FeaturePart`]s whose outputs are
//! tensored together, the first part on the most significant qubits. Discrete
//! parts read from the sample's bit vector, the ZZ part reads continuous
//! values, and latent parts ignore the input.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::qrac::{BlochVector, Codebook};
use crate::statevec::{Circuit, Gate, StateVector, DEFAULT_MAX_QUBITS};
use crate::{Error, Result};

/// One input record: discrete bits and continuous values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub bits: Vec<u8>,
    pub reals: Vec<f64>,
}

impl Sample {
    pub fn bits(bits: Vec<u8>) -> Self {
        Self { bits, reals: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeaturePart {
    /// Encodes `slots` (indices into `Sample::bits`) with a codebook.
    Qrac { codebook: Codebook, slots: Vec<usize> },
    /// ZZ embedding of `slots` (indices into `Sample::reals`), one qubit each.
    Zz {
        slots: Vec<usize>,
        #[serde(default = "default_reps")]
        reps: usize,
    },
    /// One qubit per bit in `slots`, set to `|bit>`.
    Basis { slots: Vec<usize> },
    /// Input-independent qubits, `|0>` unless a Bloch vector is given per qubit.
    Latent {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state: Option<Vec<BlochVector>>,
    },
}

fn default_reps() -> usize {
    2
}

impl FeaturePart {
    pub fn n_qubits(&self) -> usize {
        match self {
            FeaturePart::Qrac { codebook, .. } => codebook.m_qubits(),
            FeaturePart::Zz { slots, .. } | FeaturePart::Basis { slots } => slots.len(),
            FeaturePart::Latent { count, .. } => *count,
        }
    }

    fn factors(&self, s: &Sample, out: &mut Vec<StateVector>) -> Result<()> {
        match self {
            FeaturePart::Qrac { codebook, slots } => {
                let bits: Vec<u8> = slots.iter().map(|&k| s.bits[k]).collect();
                out.extend(codebook.codeword_factors(&bits)?);
            }
            FeaturePart::Zz { slots, reps } => {
                let x: Vec<f64> = slots.iter().map(|&k| s.reals[k]).collect();
                out.push(zz_map_circuit(&x, *reps)?.run()?);
            }
            FeaturePart::Basis { slots } => {
                for &k in slots {
                    out.push(StateVector::basis(1, usize::from(s.bits[k] != 0))?);
                }
            }
            FeaturePart::Latent { count, state } => match state {
                None => out.extend((0..*count).map(|_| StateVector::zero(1).expect("one qubit"))),
                Some(vs) => {
                    for v in vs {
                        out.push(crate::qrac::bloch_to_state(*v)?);
                    }
                }
            },
        }
        Ok(())
    }
}

/// Diagonal phase block of the ZZ map:
/// `exp(i (sum_i x_i Z_i + sum_{i<j} (pi - x_i)(pi - x_j) Z_i Z_j))`.
pub fn zz_phase_gate(x: &[f64]) -> Result<Gate> {
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::Data(format!("non-finite feature value {v}")));
    }
    let d = x.len();
    let phases = (0..1usize << d)
        .map(|z| {
            let zi = |i: usize| if (z >> (d - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 };
            let mut phi = 0.0;
            for i in 0..d {
                phi += x[i] * zi(i);
                for j in i + 1..d {
                    phi += (PI - x[i]) * (PI - x[j]) * zi(i) * zi(j);
                }
            }
            phi
        })
        .collect();
    Ok(Gate::DiagPhase { targets: (0..d).collect(), phases })
}

/// `reps` repetitions of a Hadamard layer followed by the ZZ phase block.
pub fn zz_map_circuit(x: &[f64], reps: usize) -> Result<Circuit> {
    if x.is_empty() {
        return Err(Error::Shape("ZZ map needs at least one feature".into()));
    }
    if reps == 0 {
        return Err(Error::Argument("ZZ map needs at least one repetition".into()));
    }
    let d = x.len();
    let phase = zz_phase_gate(x)?;
    let mut c = Circuit::new(d);
    for _ in 0..reps {
        for q in 0..d {
            c.push(Gate::H(q))?;
        }
        c.push(phase.clone())?;
    }
    Ok(c)
}

/// X on every qubit whose bit is 1.
pub fn basis_encode(bits: &[u8]) -> Result<Circuit> {
    let gates = bits.iter().enumerate().filter(|(_, &b)| b != 0).map(|(q, _)| Gate::X(q)).collect();
    Circuit::from_gates(bits.len(), gates)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EncoderDoc", into = "EncoderDoc")]
pub struct Encoder {
    parts: Vec<FeaturePart>,
    n_bits: usize,
    n_reals: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncoderDoc {
    n_bits: usize,
    n_reals: usize,
    parts: Vec<FeaturePart>,
}

impl TryFrom<EncoderDoc> for Encoder {
    type Error = Error;
    fn try_from(d: EncoderDoc) -> Result<Self> {
        compose_encoder(d.parts, d.n_bits, d.n_reals)
    }
}

impl From<Encoder> for EncoderDoc {
    fn from(e: Encoder) -> Self {
        EncoderDoc { n_bits: e.n_bits, n_reals: e.n_reals, parts: e.parts }
    }
}

/// Builds an encoder for samples with `n_bits` discrete and `n_reals`
/// continuous slots. Every slot must be read by exactly one part.
pub fn compose_encoder(parts: Vec<FeaturePart>, n_bits: usize, n_reals: usize) -> Result<Encoder> {
    if parts.is_empty() {
        return Err(Error::Schema("encoder has no parts".into()));
    }
    let mut bit_use = vec![0usize; n_bits];
    let mut real_use = vec![0usize; n_reals];
    let mark = |slots: &[usize], uses: &mut Vec<usize>, what: &str| -> Result<()> {
        for &k in slots {
            *uses.get_mut(k).ok_or_else(|| Error::Schema(format!("{what} slot {k} out of range")))? += 1;
        }
        Ok(())
    };
    for p in &parts {
        match p {
            FeaturePart::Qrac { codebook, slots } => {
                if codebook.n_bits() != slots.len() {
                    return Err(Error::Schema(format!(
                        "{}-bit codebook assigned {} slots",
                        codebook.n_bits(),
                        slots.len()
                    )));
                }
                mark(slots, &mut bit_use, "discrete")?;
            }
            FeaturePart::Basis { slots } => mark(slots, &mut bit_use, "discrete")?,
            FeaturePart::Zz { slots, reps } => {
                if *reps == 0 || slots.is_empty() {
                    return Err(Error::Schema("ZZ part needs slots and reps >= 1".into()));
                }
                mark(slots, &mut real_use, "continuous")?;
            }
            FeaturePart::Latent { count, state } => {
                if *count == 0 || state.as_ref().is_some_and(|s| s.len() != *count) {
                    return Err(Error::Schema("latent part needs count >= 1 and one state per qubit".into()));
                }
            }
        }
    }
    for (what, uses) in [("discrete", &bit_use), ("continuous", &real_use)] {
        if let Some((k, &u)) = uses.iter().enumerate().find(|(_, &u)| u != 1) {
            let msg = if u == 0 { "not assigned to any part" } else { "assigned more than once" };
            return Err(Error::Schema(format!("{what} slot {k} {msg}")));
        }
    }
    let enc = Encoder { parts, n_bits, n_reals };
    if enc.n_qubits() > DEFAULT_MAX_QUBITS {
        return Err(Error::Capacity { requested: enc.n_qubits(), cap: DEFAULT_MAX_QUBITS });
    }
    Ok(enc)
}

impl Encoder {
    pub fn parts(&self) -> &[FeaturePart] {
        &self.parts
    }

    pub fn n_qubits(&self) -> usize {
        self.parts.iter().map(FeaturePart::n_qubits).sum()
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn n_reals(&self) -> usize {
        self.n_reals
    }

    pub fn check(&self, s: &Sample) -> Result<()> {
        if s.bits.len() != self.n_bits || s.reals.len() != self.n_reals {
            return Err(Error::Data(format!(
                "sample has {} bits and {} reals, encoder expects {} and {}",
                s.bits.len(),
                s.reals.len(),
                self.n_bits,
                self.n_reals
            )));
        }
        Ok(())
    }

    /// Product factors of the encoded state, in qubit order.
    pub fn factors(&self, s: &Sample) -> Result<Vec<StateVector>> {
        self.check(s)?;
        let mut out = Vec::new();
        for p in &self.parts {
            p.factors(s, &mut out)?;
        }
        Ok(out)
    }

    pub fn encode(&self, s: &Sample) -> Result<StateVector> {
        product(&self.factors(s)?)
    }
}

/// Tensor product of `factors`, first factor most significant.
pub fn product(factors: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = factors.split_first().ok_or_else(|| Error::Shape("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
}
