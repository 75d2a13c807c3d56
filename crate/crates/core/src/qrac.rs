//! Quantum random-access codes.
//!
//! A [`Codebook`] maps `n`-bit strings to pure `m`-qubit states. It is stored
//! as an ordered list of [`Block`]s, each owning a subset of the bit
//! positions and a table of codewords for that subset, plus a copy count:
//! the codeword of `x` is `(block_1(x) ⊗ ... ⊗ block_k(x))^{⊗copies}`.
//! Codewords are assembled on demand, so concatenations of many small codes
//! never materialize the full `2^n`-entry table.
//!
//! Bitstrings are `&[u8]` slices of 0/1 values; bit 0 is listed first. Within
//! a block, the local table index is big-endian over the block's bit list.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::statevec::{StateVector, NORM_TOL};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Pure one-qubit state with the given Bloch vector. The `|0>` amplitude is
/// real and non-negative.
pub fn bloch_to_state(v: BlochVector) -> Result<StateVector> {
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Argument(format!("Bloch vector {v:?} is not a unit vector (norm {norm})")));
    }
    let theta = v.z.clamp(-1.0, 1.0).acos();
    let phi = v.y.atan2(v.x);
    let a = Complex64::new((theta / 2.0).cos(), 0.0);
    let b = Complex64::from_polar((theta / 2.0).sin(), phi);
    StateVector::normalized(vec![a, b])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    bits: Vec<usize>,
    width: usize,
    table: Vec<StateVector>,
}

impl Block {
    pub fn new(bits: Vec<usize>, table: Vec<StateVector>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Partition("a block must own at least one bit".into()));
        }
        if table.len() != 1usize << bits.len() {
            return Err(Error::Shape(format!(
                "block over {} bits needs {} codewords, got {}",
                bits.len(),
                1usize << bits.len(),
                table.len()
            )));
        }
        let width = table[0].n_qubits();
        if table.iter().any(|s| s.n_qubits() != width) {
            return Err(Error::Shape("codewords of one block must share a width".into()));
        }
        Ok(Self { bits, width, table })
    }

    pub fn bits(&self) -> &[usize] {
        &self.bits
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn table(&self) -> &[StateVector] {
        &self.table
    }

    fn local_index(&self, bits: &[u8]) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | bits[b] as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CodebookDoc", into = "CodebookDoc")]
pub struct Codebook {
    n_bits: usize,
    blocks: Vec<Block>,
    copies: usize,
}

impl Codebook {
    /// Monolithic codebook from a full table indexed big-endian by bit 0 first.
    pub fn from_table(n_bits: usize, table: Vec<StateVector>) -> Result<Self> {
        Self::from_blocks(n_bits, vec![Block::new((0..n_bits).collect(), table)?], 1)
    }

    pub fn from_blocks(n_bits: usize, blocks: Vec<Block>, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::Argument("copies must be at least 1".into()));
        }
        let mut seen = vec![false; n_bits];
        for b in &blocks {
            for &i in &b.bits {
                if i >= n_bits {
                    return Err(Error::Partition(format!("bit {i} outside 0..{n_bits}")));
                }
                if seen[i] {
                    return Err(Error::Partition(format!("bit {i} appears in more than one block")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Partition(format!("bit {i} is not covered by any block")));
        }
        Ok(Self { n_bits, blocks, copies })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn m_qubits(&self) -> usize {
        self.copies * self.blocks.iter().map(|b| b.width).sum::<usize>()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    fn check_bits(&self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.n_bits {
            return Err(Error::Shape(format!("expected {} bits, got {}", self.n_bits, bits.len())));
        }
        if let Some(v) = bits.iter().find(|&&v| v > 1) {
            return Err(Error::Encoding(format!("bit value {v} is not 0 or 1")));
        }
        Ok(())
    }

    /// Per-block codeword states in qubit order, one entry per block per copy.
    pub fn codeword_factors(&self, bits: &[u8]) -> Result<Vec<StateVector>> {
        self.check_bits(bits)?;
        let once: Vec<&StateVector> = self.blocks.iter().map(|b| &b.table[b.local_index(bits)]).collect();
        Ok((0..self.copies).flat_map(|_| once.iter().map(|s| (*s).clone())).collect())
    }

    pub fn codeword(&self, bits: &[u8]) -> Result<StateVector> {
        let factors = self.codeword_factors(bits)?;
        let mut it = factors.into_iter();
        let first = it.next().expect("codebooks have at least one block");
        it.try_fold(first, |acc, f| acc.tensor(&f))
    }

    /// Codeword for the integer `index` (bit 0 is the most significant).
    pub fn codeword_at(&self, index: usize) -> Result<StateVector> {
        if index >= 1usize << self.n_bits {
            return Err(Error::Index { index, size: 1usize << self.n_bits });
        }
        self.codeword(&index_to_bits(index, self.n_bits))
    }

    /// Codewords of the block holding `bit`, each raised to the copy count.
    fn block_states(&self, block: &Block) -> Vec<StateVector> {
        block
            .table
            .iter()
            .map(|s| (1..self.copies).fold(s.clone(), |acc, _| acc.tensor(s).expect("block copies fit the cap")))
            .collect()
    }
}

/// Big-endian bit decomposition with bit 0 first.
pub fn index_to_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect()
}

pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// The `(n, 1)` cube code: bit `k` sets the sign along Bloch axis `k`
/// (X, Y, Z order), scaled by `1/sqrt(n)`. For `n = 1` the code is the Z pair.
pub fn one_qubit_codebook(n: usize) -> Result<Codebook> {
    if !(1..=3).contains(&n) {
        return Err(Error::Unsupported(format!("no ({n}, 1) code: one qubit encodes at most 3 bits")));
    }
    let table = (0..1usize << n)
        .map(|idx| {
            let bits = index_to_bits(idx, n);
            let sign = |k: usize| if bits[k] == 0 { 1.0 } else { -1.0 };
            let s = 1.0 / (n as f64).sqrt();
            let v = match n {
                1 => BlochVector::new(0.0, 0.0, sign(0)),
                2 => BlochVector::new(sign(0) * s, sign(1) * s, 0.0),
                _ => BlochVector::new(sign(0) * s, sign(1) * s, sign(2) * s),
            };
            bloch_to_state(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Codebook::from_table(n, table)
}

/// Concatenates sub-codebooks over a partition of the bit positions. The
/// codeword is the tensor product of the sub-codewords in the listed order.
pub fn concat_codebook(parts: Vec<(Vec<usize>, Codebook)>) -> Result<Codebook> {
    if parts.is_empty() {
        return Err(Error::Partition("no blocks given".into()));
    }
    let n_bits: usize = parts.iter().map(|(s, _)| s.len()).sum();
    let mut blocks = Vec::new();
    for (subset, sub) in parts {
        if subset.len() != sub.n_bits {
            return Err(Error::Partition(format!(
                "subset of {} bits paired with a {}-bit codebook",
                subset.len(),
                sub.n_bits
            )));
        }
        if sub.copies == 1 {
            for b in sub.blocks {
                let bits = b.bits.iter().map(|&i| subset[i]).collect();
                blocks.push(Block::new(bits, b.table)?);
            }
        } else {
            let table = (0..1usize << sub.n_bits).map(|i| sub.codeword_at(i)).collect::<Result<Vec<_>>>()?;
            blocks.push(Block::new(subset, table)?);
        }
    }
    Codebook::from_blocks(n_bits, blocks, 1)
}

/// Encodes every bitstring with `copies` copies of its codeword.
pub fn duplicate_codebook(c: &Codebook, copies: usize) -> Result<Codebook> {
    if copies == 0 {
        return Err(Error::Argument("copies must be at least 1".into()));
    }
    Codebook::from_blocks(c.n_bits, c.blocks.clone(), c.copies * copies)
}

pub fn encode(c: &Codebook, bits: &[u8]) -> Result<StateVector> {
    c.codeword(bits)
}

fn density_average<'a, I: Iterator<Item = &'a StateVector>>(dim: usize, states: I) -> DMatrix<Complex64> {
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut count = 0usize;
    for s in states {
        let a = s.amps();
        for r in 0..dim {
            for c in 0..dim {
                rho[(r, c)] += a[r] * a[c].conj();
            }
        }
        count += 1;
    }
    rho / Complex64::new(count as f64, 0.0)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().map(|e| e.abs()).sum()
}

/// Success probability of the optimal measurement for bit `i` under
/// uniformly random inputs: `1/2 + ||rho_0 - rho_1||_1 / 4`.
pub fn helstrom_success(c: &Codebook, i: usize) -> Result<f64> {
    if i >= c.n_bits {
        return Err(Error::Index { index: i, size: c.n_bits });
    }
    // Other blocks factor out of the difference operator and have unit trace.
    let block = c.blocks.iter().find(|b| b.bits.contains(&i)).expect("partition covers every bit");
    let pos = block.bits.iter().position(|&b| b == i).unwrap();
    let k = block.bits.len();
    let states = c.block_states(block);
    let dim = states[0].dim();
    let with = |v: usize| {
        states.iter().enumerate().filter(move |(idx, _)| (idx >> (k - 1 - pos)) & 1 == v).map(|(_, s)| s)
    };
    let diff = density_average(dim, with(0)) - density_average(dim, with(1));
    Ok(0.5 + 0.25 * trace_norm(&diff))
}

/// Helstrom success computed from fully assembled codewords; exponential in
/// `n_bits` and `m_qubits`, intended for cross-checking small codes.
pub fn helstrom_success_dense(c: &Codebook, i: usize) -> Result<f64> {
    if i >= c.n_bits {
        return Err(Error::Index { index: i, size: c.n_bits });
    }
    let n = c.n_bits;
    let states = (0..1usize << n).map(|x| c.codeword_at(x)).collect::<Result<Vec<_>>>()?;
    let dim = states[0].dim();
    let pick = |v: usize| {
        states.iter().enumerate().filter(move |(x, _)| (x >> (n - 1 - i)) & 1 == v).map(|(_, s)| s)
    };
    let diff = density_average(dim, pick(0)) - density_average(dim, pick(1));
    Ok(0.5 + 0.25 * trace_norm(&diff))
}

pub fn min_success(c: &Codebook) -> Result<f64> {
    (0..c.n_bits).map(|i| helstrom_success(c, i)).try_fold(f64::INFINITY, |m, p| Ok(m.min(p?)))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    h(p) + h(1.0 - p)
}

/// Necessary condition `m >= (1 - H(p)) n` for an `(n, m, p)` code.
pub fn nayak_check(n: usize, m: usize, p: f64) -> Result<bool> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::Argument(format!("success probability {p} outside [1/2, 1]")));
    }
    Ok(m as f64 >= (1.0 - binary_entropy(p)) * n as f64)
}

/// Trace distance between pure states, `sqrt(1 - |<a|b>|^2)`.
pub fn trace_distance(a: &StateVector, b: &StateVector) -> f64 {
    (1.0 - a.inner(b).norm_sqr()).max(0.0).sqrt()
}

/// For each Hamming distance `h` within a block, the (min, max) trace
/// distance between codewords at that distance. Indexed by block.
pub fn hamming_distance_profile(c: &Codebook) -> Vec<Vec<(usize, f64, f64)>> {
    c.blocks
        .iter()
        .map(|b| {
            let states = c.block_states(b);
            let k = b.bits.len();
            let mut ranges: Vec<Option<(f64, f64)>> = vec![None; k + 1];
            for x in 0..states.len() {
                for y in x + 1..states.len() {
                    let h = (x ^ y).count_ones() as usize;
                    let d = trace_distance(&states[x], &states[y]);
                    let r = ranges[h].get_or_insert((d, d));
                    r.0 = r.0.min(d);
                    r.1 = r.1.max(d);
                }
            }
            ranges.into_iter().enumerate().filter_map(|(h, r)| r.map(|(lo, hi)| (h, lo, hi))).collect()
        })
        .collect()
}

/// True iff, within every block, codewords at a larger Hamming distance are
/// strictly farther apart in trace distance.
pub fn hamming_distance_monotonicity(c: &Codebook) -> bool {
    const TOL: f64 = 1e-10;
    hamming_distance_profile(c).iter().all(|p| p.windows(2).all(|w| w[1].1 > w[0].2 + TOL))
}

/// Searches for an `(n, m)` code maximizing the worst-bit Helstrom success.
///
/// Each restart alternates between the optimal measurements for the current
/// states and the best states for the current measurements (top eigenvector
/// of the weighted sum of signed observables), while bit weights drift toward
/// the currently weakest bits. Restarts run in parallel and are seeded from
/// `seed`; the best codebook wins.
pub fn optimize_codebook(n: usize, m: usize, seed: u64, restarts: usize, iterations: usize) -> Result<Codebook> {
    if !(1..=2).contains(&m) {
        return Err(Error::Argument(format!("codebook optimization supports m in {{1, 2}}, got {m}")));
    }
    let limit = (1usize << (1usize << m)) - 1;
    if n == 0 || n > limit {
        return Err(Error::Existence { n, m, limit });
    }
    if restarts == 0 || iterations == 0 {
        return Err(Error::Argument("restarts and iterations must be at least 1".into()));
    }
    let results: Vec<(f64, Vec<StateVector>)> = (0..restarts)
        .into_par_iter()
        .map(|r| seesaw(n, 1usize << m, seed.wrapping_add(r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15), iterations))
        .collect();
    let (best, states) = results
        .into_iter()
        .fold(None::<(f64, Vec<StateVector>)>, |acc, cur| match acc {
            Some(a) if a.0 >= cur.0 => Some(a),
            _ => Some(cur),
        })
        .expect("at least one restart");
    if best <= 0.5 + 1e-9 {
        return Err(Error::OptimizationFailure { best });
    }
    Codebook::from_table(n, states)
}

type CMat = DMatrix<Complex64>;

fn random_observable(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut g = CMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            g[(r, c)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    sign_of(&(&g + g.adjoint()))
}

/// `sum_k sign(lambda_k) |v_k><v_k|`, with zero mapped to +1.
fn sign_of(h: &CMat) -> CMat {
    let e = h.clone().symmetric_eigen();
    let mut out = CMat::zeros(h.nrows(), h.ncols());
    for (k, &l) in e.eigenvalues.iter().enumerate() {
        let v = e.eigenvectors.column(k);
        let s = if l >= 0.0 { 1.0 } else { -1.0 };
        out += (v * v.adjoint()) * Complex64::new(s, 0.0);
    }
    out
}

fn top_eigenvector(h: &CMat) -> StateVector {
    let e = h.clone().symmetric_eigen();
    let k = e.eigenvalues.imax();
    let v = e.eigenvectors.column(k);
    // Fix the global phase so the first non-negligible amplitude is real positive.
    let lead = v.iter().find(|a| a.norm() > 1e-8).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    StateVector::normalized(v.iter().map(|a| a * phase).collect()).expect("eigenvectors are nonzero")
}

fn seesaw(n: usize, dim: usize, seed: u64, iterations: usize) -> (f64, Vec<StateVector>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obs: Vec<CMat> = (0..n).map(|_| random_observable(dim, &mut rng)).collect();
    let mut weights = vec![1.0; n];
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for _ in 0..iterations {
        let states: Vec<StateVector> = (0..1usize << n)
            .map(|x| {
                let mut h = CMat::zeros(dim, dim);
                for i in 0..n {
                    let s = if (x >> (n - 1 - i)) & 1 == 0 { weights[i] } else { -weights[i] };
                    h += &obs[i] * Complex64::new(s, 0.0);
                }
                top_eigenvector(&h)
            })
            .collect();
        let mut probs = Vec::with_capacity(n);
        for (i, o) in obs.iter_mut().enumerate() {
            let pick = |v: usize| states.iter().enumerate().filter(move |(x, _)| (x >> (n - 1 - i)) & 1 == v).map(|(_, s)| s);
            let diff = density_average(dim, pick(0)) - density_average(dim, pick(1));
            probs.push(0.5 + 0.25 * trace_norm(&diff));
            *o = sign_of(&diff);
        }
        let worst = probs.iter().cloned().fold(f64::INFINITY, f64::min);
        if worst > best.0 {
            best = (worst, states);
        }
        let mean = probs.iter().sum::<f64>() / n as f64;
        for (w, p) in weights.iter_mut().zip(&probs) {
            *w *= (2.0 * (mean - p)).exp();
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w *= n as f64 / total);
    }
    best
}

/// Serialized codebook: per-block codeword tables as `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookDoc {
    pub n_bits: usize,
    pub m_qubits: usize,
    #[serde(default = "one")]
    pub copies: usize,
    pub blocks: Vec<BlockDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub bits: Vec<usize>,
    pub codewords: Vec<Vec<(f64, f64)>>,
}

fn one() -> usize {
    1
}

impl Codebook {
    pub fn to_doc(&self) -> CodebookDoc {
        CodebookDoc {
            n_bits: self.n_bits,
            m_qubits: self.m_qubits(),
            copies: self.copies,
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    bits: b.bits.clone(),
                    codewords: b.table.iter().map(|s| s.amps().iter().map(|a| (a.re, a.im)).collect()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &CodebookDoc) -> Result<Self> {
        let blocks = doc
            .blocks
            .iter()
            .map(|b| {
                let table = b
                    .codewords
                    .iter()
                    .map(|amps| StateVector::from_amplitudes(amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect()))
                    .collect::<Result<Vec<_>>>()?;
                Block::new(b.bits.clone(), table)
            })
            .collect::<Result<Vec<_>>>()?;
        let c = Codebook::from_blocks(doc.n_bits, blocks, doc.copies)?;
        if c.m_qubits() != doc.m_qubits {
            return Err(Error::Format(format!("declared m_qubits {} but blocks give {}", doc.m_qubits, c.m_qubits())));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl TryFrom<CodebookDoc> for Codebook {
    type Error = Error;

    fn try_from(doc: CodebookDoc) -> Result<Self> {
        Codebook::from_doc(&doc)
    }
}

impl From<Codebook> for CodebookDoc {
    fn from(c: Codebook) -> Self {
        c.to_doc()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bloch_of(s: &StateVector) -> [f64; 3] {
        s.bloch().unwrap()
    }

    #[test]
    fn bloch_round_trip() {
        let z = bloch_to_state(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(z.amps()[0], Complex64::new(1.0, 0.0));
        let x = bloch_to_state(BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x.amps()[0].re - r).abs() < 1e-15 && (x.amps()[1].re - r).abs() < 1e-15);
        let s = 1.0 / 3f64.sqrt();
        let d = bloch_to_state(BlochVector::new(s, s, s)).unwrap();
        for v in bloch_of(&d) {
            assert!((v - s).abs() < 1e-10);
        }
        assert!(matches!(bloch_to_state(BlochVector::new(0.5, 0.0, 0.0)), Err(Error::Argument(_))));
    }

    #[test]
    fn one_qubit_codes() {
        let c2 = one_qubit_codebook(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = bloch_of(&encode(&c2, &[0, 0]).unwrap());
        assert!((b[0] - s).abs() < 1e-12 && (b[1] - s).abs() < 1e-12 && b[2].abs() < 1e-12);
        let c3 = one_qubit_codebook(3).unwrap();
        let t = 1.0 / 3f64.sqrt();
        let b = bloch_of(&encode(&c3, &[1, 1, 1]).unwrap());
        for v in b {
            assert!((v + t).abs() < 1e-12);
        }
        let a = encode(&c3, &[0, 0, 0]).unwrap();
        let z = encode(&c3, &[1, 1, 1]).unwrap();
        assert!((trace_distance(&a, &z) - 1.0).abs() < 1e-12);
        assert!(matches!(one_qubit_codebook(4), Err(Error::Unsupported(_))));
        assert!(matches!(encode(&c3, &[0, 1]), Err(Error::Shape(_))));
    }

    #[test]
    fn helstrom_values() {
        for (n, expect) in [(2, 0.853553), (3, 0.788675)] {
            let c = one_qubit_codebook(n).unwrap();
            for i in 0..n {
                let p = helstrom_success(&c, i).unwrap();
                assert!((p - expect).abs() < 1e-6);
                assert!((p - 0.5 * (1.0 + 1.0 / (n as f64).sqrt())).abs() < 1e-9);
            }
        }
        let same = Codebook::from_table(2, vec![StateVector::zero(1).unwrap(); 4]).unwrap();
        assert_eq!(helstrom_success(&same, 0).unwrap(), 0.5);
        assert!(matches!(helstrom_success(&same, 2), Err(Error::Index { .. })));
    }

    #[test]
    fn concatenation_and_copies() {
        let c3 = one_qubit_codebook(3).unwrap();
        let c = concat_codebook(vec![
            (vec![0, 3, 6], c3.clone()),
            (vec![1, 4, 7], c3.clone()),
            (vec![2, 5, 8], c3.clone()),
        ])
        .unwrap();
        assert_eq!((c.n_bits(), c.m_qubits()), (9, 3));
        for i in 0..9 {
            assert!((helstrom_success(&c, i).unwrap() - helstrom_success(&c3, i / 3).unwrap()).abs() < 1e-10);
        }
        let id = concat_codebook(vec![(vec![0, 1, 2], c3.clone())]).unwrap();
        assert_eq!(id, c3);
        let bad = concat_codebook(vec![(vec![0, 1, 2], c3.clone()), (vec![2, 3, 4], c3.clone())]);
        assert!(matches!(bad, Err(Error::Partition(_))));

        let dup = duplicate_codebook(&c3, 2).unwrap();
        assert_eq!(dup.m_qubits(), 2);
        for i in 0..3 {
            assert!(helstrom_success(&dup, i).unwrap() >= helstrom_success(&c3, i).unwrap());
            let dense = helstrom_success_dense(&dup, i).unwrap();
            assert!((dense - helstrom_success(&dup, i).unwrap()).abs() < 1e-10);
        }
        assert_eq!(duplicate_codebook(&c3, 1).unwrap(), c3);
        assert!(matches!(duplicate_codebook(&c3, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn nayak_examples() {
        assert!(nayak_check(3, 1, 0.7887).unwrap());
        assert!(!nayak_check(4, 1, 0.85).unwrap());
        assert!(nayak_check(7, 0, 0.5).unwrap());
        assert!(nayak_check(3, 1, 0.4).is_err());
    }

    #[test]
    fn hamming_profile() {
        let p3 = &hamming_distance_profile(&one_qubit_codebook(3).unwrap())[0];
        let expect = [(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt(), 1.0];
        for ((h, lo, hi), e) in p3.iter().zip(expect) {
            assert!((lo - e).abs() < 1e-12 && (hi - e).abs() < 1e-12, "h={h}");
        }
        let p2 = &hamming_distance_profile(&one_qubit_codebook(2).unwrap())[0];
        assert!((p2[0].1 - 0.5f64.sqrt()).abs() < 1e-12 && (p2[1].1 - 1.0).abs() < 1e-12);
        assert!(hamming_distance_monotonicity(&one_qubit_codebook(3).unwrap()));
        let single = Codebook::from_table(1, vec![StateVector::zero(1).unwrap(), StateVector::basis(1, 1).unwrap()]);
        assert!(hamming_distance_monotonicity(&single.unwrap()));
    }

    #[test]
    fn optimizer_examples() {
        let c = optimize_codebook(2, 1, 1, 4, 60).unwrap();
        assert!(min_success(&c).unwrap() >= 0.8535 - 1e-3);
        let c = optimize_codebook(3, 2, 1, 16, 300).unwrap();
        assert!(min_success(&c).unwrap() >= 0.89, "{}", min_success(&c).unwrap());
        assert!(matches!(optimize_codebook(4, 1, 0, 1, 1), Err(Error::Existence { .. })));
        assert!(matches!(optimize_codebook(16, 2, 0, 1, 1), Err(Error::Existence { .. })));
    }

    #[test]
    fn json_round_trip() {
        let c3 = one_qubit_codebook(3).unwrap();
        let c = concat_codebook(vec![(vec![0, 2, 4], c3.clone()), (vec![1, 3, 5], c3)]).unwrap();
        let c = duplicate_codebook(&c, 2).unwrap();
        let back = Codebook::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back.n_bits(), 6);
        assert_eq!(back.m_qubits(), 4);
        for x in [0usize, 5, 63] {
            assert_eq!(back.codeword_at(x).unwrap(), c.codeword_at(x).unwrap());
        }
        assert!(Codebook::from_json(r#"{"n_bits":1,"m_qubits":1,"blocks":[],"extra":1}"#).is_err());
    }
}
