//! Dense statevector simulation of ideal output distributions.
//!
//! Basis convention: the bitstring `x = (x_{n-1}, ..., x_0)` is the integer
//! `j = sum_k x_k 2^k`, so the rightmost character of a printed bitstring is
//! qubit 0. Inside a gate block acting on `targets`, the local basis index is
//! `sum_b bit(targets[b]) 2^b`, i.e. `targets[0]` is the least significant.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::compensated_sum;

/// Default cap on qubits for anything that allocates a dense statevector.
pub const DEFAULT_MAX_QUBITS: u32 = 24;

/// Largest register whose bitstrings fit a `u64` index.
pub const MAX_INDEX_QUBITS: u32 = 63;

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;
const RENORMALIZE_TOL: f64 = 1e-12;

/// Qubit count `n` and Hilbert dimension `N = 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SystemDims {
    n: u32,
}

impl SystemDims {
    /// Dimensions for indexing bitstrings (`1 <= n <= 63`). No dense storage implied.
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_INDEX_QUBITS {
            return Err(Error::Dimension(format!(
                "qubit count must be in 1..={MAX_INDEX_QUBITS}, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Dimensions for dense simulation, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn dense(n: u32) -> Result<Self> {
        Self::dense_with_cap(n, DEFAULT_MAX_QUBITS)
    }

    /// Dense dimensions under a tighter cap. Caps above [`DEFAULT_MAX_QUBITS`] are clamped.
    pub fn dense_with_cap(n: u32, cap: u32) -> Result<Self> {
        let dims = Self::new(n)?;
        let cap = cap.min(DEFAULT_MAX_QUBITS);
        if n > cap {
            return Err(Error::SizeCap(format!(
                "{n} qubits exceeds the dense statevector cap of {cap}"
            )));
        }
        Ok(dims)
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    /// `N = 2^n`.
    pub fn dim(&self) -> u64 {
        1u64 << self.n
    }

    pub fn dim_f64(&self) -> f64 {
        self.dim() as f64
    }

    /// `N` as a length, for dense containers.
    pub fn len(&self) -> usize {
        self.dim() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Render `x` with qubit 0 as the rightmost character.
    pub fn format_bitstring(&self, x: u64) -> String {
        (0..self.n)
            .rev()
            .map(|k| if (x >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Parse an `n`-character `0`/`1` string, rightmost character is qubit 0.
    pub fn parse_bitstring(&self, s: &str) -> Option<u64> {
        if s.len() != self.n as usize {
            return None;
        }
        s.bytes().try_fold(0u64, |acc, b| match b {
            b'0' => Some(acc << 1),
            b'1' => Some((acc << 1) | 1),
            _ => None,
        })
    }
}

impl TryFrom<u32> for SystemDims {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<SystemDims> for u32 {
    fn from(d: SystemDims) -> u32 {
        d.n
    }
}

/// Normalized pure state `|psi>` stored as `N` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: SystemDims,
    amps: Vec<Complex64>,
}

impl PureState {
    /// `|0^n>`.
    pub fn zero(dims: SystemDims) -> Result<Self> {
        Self::basis(dims, 0)
    }

    pub fn basis(dims: SystemDims, index: u64) -> Result<Self> {
        check_dense(dims)?;
        if index >= dims.dim() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for N = {}",
                dims.dim()
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dims.len()];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    pub fn from_amplitudes(dims: SystemDims, amps: Vec<Complex64>) -> Result<Self> {
        check_dense(dims)?;
        if amps.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for N = {}",
                amps.len(),
                dims.dim()
            )));
        }
        let state = Self { dims, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized: |psi|^2 = {norm}"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_amplitudes_unchecked(dims: SystemDims, amps: Vec<Complex64>) -> Self {
        Self { dims, amps }
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        compensated_sum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    /// Apply `block` (tensored with identity on the other qubits) in place.
    pub fn apply(&mut self, block: &GateBlock) -> Result<()> {
        for &t in &block.targets {
            if t >= self.dims.qubits() as usize {
                return Err(Error::TargetOutOfRange {
                    index: t,
                    n: self.dims.qubits(),
                });
            }
        }
        if block.is_identity() {
            return Ok(());
        }
        let k = block.targets.len();
        let d = 1usize << k;
        let offsets: Vec<usize> = (0..d)
            .map(|local| {
                block
                    .targets
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| (local >> b) & 1 == 1)
                    .map(|(_, &t)| 1usize << t)
                    .sum()
            })
            .collect();
        let mut sorted = block.targets.clone();
        sorted.sort_unstable();
        let mut gathered = vec![Complex64::new(0.0, 0.0); d];
        let groups = self.amps.len() >> k;
        for g in 0..groups {
            let base = deposit_zero_bits(g, &sorted);
            for (slot, off) in gathered.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let m = &block.matrix[row * d..(row + 1) * d];
                let mut acc = Complex64::new(0.0, 0.0);
                for (mij, v) in m.iter().zip(&gathered) {
                    acc += mij * v;
                }
                self.amps[base + off] = acc;
            }
        }
        Ok(())
    }

    /// Ideal output distribution `|<x|psi>|^2`.
    pub fn distribution(&self) -> Result<OutputDistribution> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Distribution(format!("state norm drifted to {norm}")));
        }
        OutputDistribution::from_probs(self.dims, self.amps.iter().map(|a| a.norm_sqr()).collect())
    }
}

/// Insert a zero bit at each (ascending) position in `sorted`.
#[inline]
fn deposit_zero_bits(mut g: usize, sorted: &[usize]) -> usize {
    for &p in sorted {
        let low = g & ((1usize << p) - 1);
        g = ((g >> p) << (p + 1)) | low;
    }
    g
}

fn check_dense(dims: SystemDims) -> Result<()> {
    if dims.qubits() > DEFAULT_MAX_QUBITS {
        return Err(Error::SizeCap(format!(
            "{} qubits exceeds the dense statevector cap of {DEFAULT_MAX_QUBITS}",
            dims.qubits()
        )));
    }
    Ok(())
}

/// Ideal output distribution `P_U(x)` over all `N` bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    dims: SystemDims,
    probs: Vec<f64>,
}

impl OutputDistribution {
    /// Validate and wrap a probability vector.
    ///
    /// Entries down to `-1e-15` are clamped to zero; the vector is renormalized
    /// when its sum is off by more than `1e-12` but within `1e-10`.
    pub fn from_probs(dims: SystemDims, mut probs: Vec<f64>) -> Result<Self> {
        check_dense(dims)?;
        if probs.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "{} probabilities for N = {}",
                probs.len(),
                dims.dim()
            )));
        }
        for (x, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -1e-15 || *p > 1.0 + 1e-12 {
                return Err(Error::Distribution(format!(
                    "probability {p} at {} outside [0, 1]",
                    dims.format_bitstring(x as u64)
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        if (total - 1.0).abs() > RENORMALIZE_TOL {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Self { dims, probs })
    }

    pub fn uniform(dims: SystemDims) -> Result<Self> {
        check_dense(dims)?;
        let p = 1.0 / dims.dim_f64();
        Ok(Self {
            dims,
            probs: vec![p; dims.len()],
        })
    }

    /// Point mass at `index`.
    pub fn delta(dims: SystemDims, index: u64) -> Result<Self> {
        PureState::basis(dims, index)?.distribution()
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: u64) -> f64 {
        self.probs[x as usize]
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}

/// A dense unitary acting on an ordered list of target qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateBlock {
    targets: Vec<usize>,
    /// Row-major `2^k x 2^k` matrix.
    matrix: Vec<Complex64>,
}

impl GateBlock {
    /// Build a block, checking shape, distinct targets and unitarity (`1e-12`).
    pub fn new(targets: Vec<usize>, matrix: Vec<Complex64>) -> Result<Self> {
        let block = Self::new_unchecked(targets, matrix)?;
        let deviation = block.unitarity_deviation();
        if deviation.is_nan() || deviation > UNITARY_TOL {
            return Err(Error::NonUnitary {
                targets: block.targets,
                deviation,
            });
        }
        Ok(block)
    }

    /// Shape and target checks only.
    pub fn new_unchecked(targets: Vec<usize>, matrix: Vec<Complex64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidArgument("gate block with no targets".into()));
        }
        if targets.len() > DEFAULT_MAX_QUBITS as usize {
            return Err(Error::SizeCap(format!(
                "gate block on {} qubits",
                targets.len()
            )));
        }
        let mut seen = targets.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated target qubit in {targets:?}"
            )));
        }
        let d = 1usize << targets.len();
        if matrix.len() != d * d {
            return Err(Error::Dimension(format!(
                "gate on {} qubits needs a {d}x{d} matrix, got {} entries",
                targets.len(),
                matrix.len()
            )));
        }
        Ok(Self { targets, matrix })
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        1 << self.targets.len()
    }

    /// `max_{ij} |(U^dag U - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += m[k * d + i].conj() * m[k * d + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    fn is_identity(&self) -> bool {
        let d = self.dim();
        self.matrix.iter().enumerate().all(|(idx, z)| {
            let expected = if idx / d == idx % d { 1.0 } else { 0.0 };
            z.re == expected && z.im == 0.0
        })
    }
}

/// An ordered gate list on `n` qubits. A full dense unitary is a single
/// block on targets `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateProgram {
    dims: SystemDims,
    gates: Vec<GateBlock>,
}

impl GateProgram {
    pub fn new(dims: SystemDims, gates: Vec<GateBlock>) -> Result<Self> {
        for g in &gates {
            if let Some(&t) = g.targets.iter().find(|&&t| t >= dims.qubits() as usize) {
                return Err(Error::TargetOutOfRange {
                    index: t,
                    n: dims.qubits(),
                });
            }
        }
        Ok(Self { dims, gates })
    }

    pub fn identity(dims: SystemDims) -> Self {
        Self {
            dims,
            gates: Vec::new(),
        }
    }

    /// Wrap a row-major `N x N` unitary.
    pub fn from_dense(dims: SystemDims, matrix: Vec<Complex64>) -> Result<Self> {
        let targets = (0..dims.qubits() as usize).collect();
        Self::new(dims, vec![GateBlock::new(targets, matrix)?])
    }

    /// Wrap a matrix that is unitary by construction, skipping the `O(N^3)` check.
    pub(crate) fn from_dense_trusted(dims: SystemDims, matrix: Vec<Complex64>) -> Result<Self> {
        let targets = (0..dims.qubits() as usize).collect();
        Self::new(dims, vec![GateBlock::new_unchecked(targets, matrix)?])
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn gates(&self) -> &[GateBlock] {
        &self.gates
    }

    pub fn push(&mut self, block: GateBlock) -> Result<()> {
        if let Some(&t) = block
            .targets
            .iter()
            .find(|&&t| t >= self.dims.qubits() as usize)
        {
            return Err(Error::TargetOutOfRange {
                index: t,
                n: self.dims.qubits(),
            });
        }
        self.gates.push(block);
        Ok(())
    }

    /// `U|psi>` for the composed program.
    pub fn apply_to(&self, mut state: PureState) -> Result<PureState> {
        if state.dims() != self.dims {
            return Err(Error::Dimension(format!(
                "{}-qubit state for a {}-qubit program",
                state.dims().qubits(),
                self.dims.qubits()
            )));
        }
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(state)
    }

    /// `U|0^n>`.
    pub fn output_state(&self) -> Result<PureState> {
        self.apply_to(PureState::zero(self.dims)?)
    }

    /// Row-major composed unitary, built column by column.
    pub fn unitary(&self) -> Result<Vec<Complex64>> {
        let dim = self.dims.len();
        if self.dims.qubits() > 12 {
            return Err(Error::SizeCap(format!(
                "explicit unitary for {} qubits",
                self.dims.qubits()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let psi = self.apply_to(PureState::basis(self.dims, col as u64)?)?;
            for (row, a) in psi.amplitudes().iter().enumerate() {
                out[row * dim + col] = *a;
            }
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ProgramJson = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&ProgramJson::from(self))?)
    }

    /// Read a JSON list of programs (the fixed-ensemble file format).
    pub fn read_list(path: &Path) -> Result<Vec<Self>> {
        let text = std::fs::read_to_string(path)?;
        let list: Vec<ProgramJson> = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        list.into_iter().map(Self::try_from).collect()
    }

    pub fn write_list(path: &Path, programs: &[Self]) -> Result<()> {
        let list: Vec<ProgramJson> = programs.iter().map(ProgramJson::from).collect();
        std::fs::write(path, serde_json::to_string_pretty(&list)?)?;
        Ok(())
    }
}

/// `probs(x) = |<x|U|0^n>|^2` for the composed program.
pub fn output_distribution(program: &GateProgram) -> Result<OutputDistribution> {
    program.output_state()?.distribution()
}

/// Apply one block to a state, returning the transformed state.
pub fn apply_block(mut state: PureState, block: &GateBlock) -> Result<PureState> {
    state.apply(block)?;
    Ok(state)
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    targets: Vec<usize>,
    matrix: Vec<[f64; 2]>,
}

/// On-disk form: `{"n": .., "gates": [{"targets": [..], "matrix": [[re, im], ..]}]}`.
#[derive(Serialize, Deserialize)]
struct ProgramJson {
    n: u32,
    gates: Vec<GateJson>,
}

impl From<&GateProgram> for ProgramJson {
    fn from(p: &GateProgram) -> Self {
        Self {
            n: p.dims.qubits(),
            gates: p
                .gates
                .iter()
                .map(|g| GateJson {
                    targets: g.targets.clone(),
                    matrix: g.matrix.iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ProgramJson> for GateProgram {
    type Error = Error;

    fn try_from(f: ProgramJson) -> Result<Self> {
        let dims = SystemDims::dense(f.n)?;
        let gates = f
            .gates
            .into_iter()
            .map(|g| {
                let m = g
                    .matrix
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect();
                GateBlock::new(g.targets, m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, gates)
    }
}

/// Common single-qubit gates, row-major.
pub mod gates {
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    const fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn identity() -> Vec<Complex64> {
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
    }

    pub fn pauli_x() -> Vec<Complex64> {
        vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]
    }

    pub fn pauli_y() -> Vec<Complex64> {
        vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]
    }

    pub fn pauli_z() -> Vec<Complex64> {
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]
    }

    pub fn hadamard() -> Vec<Complex64> {
        let h = FRAC_1_SQRT_2;
        vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]
    }
}
