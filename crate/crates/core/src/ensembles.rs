//! Circuit ensembles: Haar, the n-qubit Pauli group, brickwork circuits of
//! Haar two-qubit blocks, and fixed lists of programs read from a file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::SchemeFunction;
use crate::rng::{derive_seed, mix64, rng_from_seed, Rng};
use crate::statevector::{
    gates, output_distribution, GateBlock, GateProgram, OutputDistribution, PureState, SystemDims,
};
use crate::summation::{compensated_sum, CompensatedSum};

/// Largest dimension for which a dense Haar unitary is drawn.
pub const MAX_HAAR_DIM: u64 = 1 << 12;

/// Largest register for exhaustive Pauli enumeration.
pub const MAX_PAULI_QUBITS: u32 = 8;

/// Cap on the number of entries of the `t`-th moment tensor.
pub const MAX_MOMENT_ENTRIES: u64 = 1 << 20;

/// Salt separating the Haar reference stream of the design check from the ensemble stream.
const HAAR_REFERENCE_SALT: u64 = 0x4841_4152_5245_4600;

/// Members per parallel work unit; fixed so reductions do not depend on the thread count.
const CHUNK: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    Haar,
    Pauli,
    /// `depth: None` means the default of `5n` layers.
    Brickwork {
        depth: Option<u32>,
    },
    Fixed {
        source_path: PathBuf,
    },
}

/// A circuit ensemble on a fixed register.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSpec {
    #[serde(flatten)]
    kind: EnsembleKind,
    dims: SystemDims,
    base_seed: u64,
    #[serde(skip)]
    fixed: Option<Arc<Vec<GateProgram>>>,
}

impl PartialEq for EnsembleSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.dims == other.dims && self.base_seed == other.base_seed
    }
}

impl EnsembleSpec {
    pub fn haar(dims: SystemDims, base_seed: u64) -> Self {
        Self {
            kind: EnsembleKind::Haar,
            dims,
            base_seed,
            fixed: None,
        }
    }

    pub fn pauli(dims: SystemDims) -> Self {
        Self {
            kind: EnsembleKind::Pauli,
            dims,
            base_seed: 0,
            fixed: None,
        }
    }

    /// Brickwork circuits; `depth: None` selects `5n` layers. Needs `n >= 2`.
    pub fn brickwork(dims: SystemDims, depth: Option<u32>, base_seed: u64) -> Result<Self> {
        if dims.qubits() < 2 {
            return Err(Error::InvalidArgument(
                "brickwork circuits need at least 2 qubits".into(),
            ));
        }
        if depth == Some(0) {
            return Err(Error::InvalidArgument(
                "brickwork depth must be at least 1".into(),
            ));
        }
        Ok(Self {
            kind: EnsembleKind::Brickwork { depth },
            dims,
            base_seed,
            fixed: None,
        })
    }

    /// Load a JSON list of programs; all must act on the same register.
    pub fn fixed(path: &Path) -> Result<Self> {
        let programs = GateProgram::read_list(path)?;
        let first = programs.first().ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "fixed ensemble file contains no programs".into(),
        })?;
        let dims = first.dims();
        if let Some((i, p)) = programs.iter().enumerate().find(|(_, p)| p.dims() != dims) {
            return Err(Error::Dimension(format!(
                "program {i} in {} acts on {} qubits, program 0 on {}",
                path.display(),
                p.dims().qubits(),
                dims.qubits()
            )));
        }
        Ok(Self {
            kind: EnsembleKind::Fixed {
                source_path: path.to_path_buf(),
            },
            dims,
            base_seed: 0,
            fixed: Some(Arc::new(programs)),
        })
    }

    /// The same ensemble family on another register.
    pub fn with_dims(&self, dims: SystemDims) -> Result<Self> {
        match &self.kind {
            EnsembleKind::Haar => Ok(Self::haar(dims, self.base_seed)),
            EnsembleKind::Pauli => Ok(Self::pauli(dims)),
            EnsembleKind::Brickwork { depth } => Self::brickwork(dims, *depth, self.base_seed),
            EnsembleKind::Fixed { source_path } => {
                if dims != self.dims {
                    return Err(Error::Dimension(format!(
                        "fixed ensemble {} acts on {} qubits, not {}",
                        source_path.display(),
                        self.dims.qubits(),
                        dims.qubits()
                    )));
                }
                Ok(self.clone())
            }
        }
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn kind(&self) -> &EnsembleKind {
        &self.kind
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    /// Short family name: `haar`, `pauli`, `brickwork` or `fixed`.
    pub fn name(&self) -> &'static str {
        match self.kind {
            EnsembleKind::Haar => "haar",
            EnsembleKind::Pauli => "pauli",
            EnsembleKind::Brickwork { .. } => "brickwork",
            EnsembleKind::Fixed { .. } => "fixed",
        }
    }

    /// Layer count actually used (brickwork only).
    pub fn depth(&self) -> Option<u32> {
        match self.kind {
            EnsembleKind::Brickwork { depth } => Some(depth.unwrap_or(5 * self.dims.qubits())),
            _ => None,
        }
    }

    /// Number of members of a finite ensemble.
    pub fn size(&self) -> Option<u64> {
        match self.kind {
            EnsembleKind::Pauli => 4u64.checked_pow(self.dims.qubits()),
            EnsembleKind::Fixed { .. } => self.fixed.as_ref().map(|p| p.len() as u64),
            _ => None,
        }
    }

    /// Seed of member `index`.
    pub fn member_seed(&self, index: u64) -> u64 {
        mix64(self.base_seed, index)
    }
}

fn complex_normal(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar unitary of dimension `d` from `rng`, row-major.
///
/// The Ginibre matrix is filled column by column, so its first column uses the
/// first `d` normals of the stream; [`haar_state`] relies on this.
fn haar_matrix(rng: &mut Rng, d: usize) -> Vec<Complex64> {
    let data: Vec<Complex64> = (0..d * d).map(|_| complex_normal(rng)).collect();
    let qr = DMatrix::from_vec(d, d, data).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        if norm > 0.0 {
            let phase = rjj / norm;
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(q[(i, j)]);
        }
    }
    out
}

fn check_haar_dim(dims: SystemDims) -> Result<usize> {
    if dims.dim() > MAX_HAAR_DIM {
        return Err(Error::SizeCap(format!(
            "dense Haar unitary needs N <= {MAX_HAAR_DIM}, got N = {}",
            dims.dim()
        )));
    }
    Ok(dims.len())
}

/// Haar-random `N x N` unitary (row-major) drawn from `seed`.
pub fn sample_haar_unitary(dims: SystemDims, seed: u64) -> Result<Vec<Complex64>> {
    let d = check_haar_dim(dims)?;
    Ok(haar_matrix(&mut rng_from_seed(seed), d))
}

/// First column of [`sample_haar_unitary`] for the same seed, i.e. `U|0^n>`,
/// without forming the matrix.
pub fn haar_state(dims: SystemDims, seed: u64) -> Result<PureState> {
    let dims = SystemDims::dense(dims.qubits())?;
    Ok(PureState::from_amplitudes_unchecked(
        dims,
        haar_vector(dims.len(), seed),
    ))
}

/// Haar-random unit vector of any length `len >= 1`: the first column of a
/// Haar unitary of that dimension drawn from `seed`.
pub fn haar_vector(len: usize, seed: u64) -> Vec<Complex64> {
    haar_vector_from(&mut rng_from_seed(seed), len)
}

/// [`haar_vector`] drawing from an existing stream.
pub fn haar_vector_from(rng: &mut Rng, len: usize) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = (0..len).map(|_| complex_normal(rng)).collect();
    let norm = compensated_sum(amps.iter().map(|a| a.norm_sqr())).sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}

fn pauli_program(dims: SystemDims, index: u64) -> Result<GateProgram> {
    let mut program = GateProgram::identity(dims);
    for q in 0..dims.qubits() {
        let matrix = match (index >> (2 * q)) & 3 {
            0 => gates::identity(),
            1 => gates::pauli_x(),
            2 => gates::pauli_y(),
            _ => gates::pauli_z(),
        };
        program.push(GateBlock::new_unchecked(vec![q as usize], matrix)?)?;
    }
    Ok(program)
}

fn brickwork_program(dims: SystemDims, depth: u32, seed: u64) -> Result<GateProgram> {
    let n = dims.qubits() as usize;
    let mut rng = rng_from_seed(seed);
    let mut program = GateProgram::identity(dims);
    for layer in 0..depth as usize {
        let mut q = layer % 2;
        while q + 1 < n {
            let block = GateBlock::new_unchecked(vec![q, q + 1], haar_matrix(&mut rng, 4))?;
            program.push(block)?;
            q += 2;
        }
    }
    Ok(program)
}

/// Member `index` of the ensemble; a pure function of `(spec, index)`.
///
/// Haar members are one dense block; Pauli member `k` puts Pauli
/// `(k >> 2q) & 3` (I, X, Y, Z) on qubit `q`; brickwork alternates even and
/// odd nearest-neighbour layers.
pub fn sample_member(spec: &EnsembleSpec, index: u64) -> Result<GateProgram> {
    if let Some(size) = spec.size() {
        if index >= size {
            return Err(Error::MemberOutOfRange { index, size });
        }
    }
    match &spec.kind {
        EnsembleKind::Haar => {
            let u = sample_haar_unitary(spec.dims, spec.member_seed(index))?;
            GateProgram::from_dense_trusted(spec.dims, u)
        }
        EnsembleKind::Pauli => pauli_program(spec.dims, index),
        EnsembleKind::Brickwork { .. } => brickwork_program(
            spec.dims,
            spec.depth().unwrap_or(1),
            spec.member_seed(index),
        ),
        EnsembleKind::Fixed { .. } => {
            let programs = spec
                .fixed
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("fixed ensemble was not loaded".into()))?;
            Ok(programs[index as usize].clone())
        }
    }
}

/// Output distribution of member `index`.
///
/// Haar members skip the dense matrix and use [`haar_state`], so they are
/// available up to the statevector cap.
pub fn member_distribution(spec: &EnsembleSpec, index: u64) -> Result<OutputDistribution> {
    match spec.kind {
        EnsembleKind::Haar => haar_state(spec.dims, spec.member_seed(index))?.distribution(),
        _ => output_distribution(&sample_member(spec, index)?),
    }
}

/// Exact mean of `f(P(x0))` over the `4^n` Pauli operators.
pub fn pauli_ensemble_average(dims: SystemDims, scheme: &SchemeFunction, x0: u64) -> Result<f64> {
    if dims.qubits() > MAX_PAULI_QUBITS {
        return Err(Error::SizeCap(format!(
            "Pauli enumeration limited to {MAX_PAULI_QUBITS} qubits"
        )));
    }
    if x0 >= dims.dim() {
        return Err(Error::InvalidArgument(format!(
            "bitstring index {x0} out of range for N = {}",
            dims.dim()
        )));
    }
    let spec = EnsembleSpec::pauli(dims);
    let size = spec.size().unwrap_or(0);
    let n = dims.dim_f64();
    let mut total = CompensatedSum::new();
    for k in 0..size {
        let p = output_distribution(&sample_member(&spec, k)?)?.prob(x0);
        total.add(scheme.f(p, n));
    }
    Ok(total.value() / size as f64)
}

/// Design order and Monte-Carlo budget for [`design_moment_discrepancy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DesignCheckConfig {
    pub t: u32,
    pub mc_samples: u64,
}

impl DesignCheckConfig {
    pub fn new(t: u32, mc_samples: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument(
                "design order t must be at least 1".into(),
            ));
        }
        if mc_samples < 2 {
            return Err(Error::InvalidArgument(
                "design check needs at least 2 Monte-Carlo samples".into(),
            ));
        }
        Ok(Self { t, mc_samples })
    }

    /// Entries of the `N^{2t} x N^{2t}` moment tensor, if it fits under the cap.
    pub fn tensor_entries(&self, dims: SystemDims) -> Result<usize> {
        let entries = dims
            .dim()
            .checked_pow(4 * self.t)
            .filter(|&e| e <= MAX_MOMENT_ENTRIES);
        entries.map(|e| e as usize).ok_or_else(|| {
            Error::SizeCap(format!(
                "moment tensor of order t = {} at N = {} exceeds {MAX_MOMENT_ENTRIES} entries",
                self.t,
                dims.dim()
            ))
        })
    }
}

/// Outcome of a design check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignCheckReport {
    /// Max-entry modulus of (ensemble tensor - Haar tensor).
    pub discrepancy: f64,
    /// Standard error of the difference at the maximizing entry.
    pub std_error: f64,
    /// `discrepancy / std_error` (infinite when both sides are exact and differ).
    pub z: f64,
    /// Members averaged on the ensemble side.
    pub ensemble_members: u64,
    /// Whether the Haar side is the exact tensor (t = 1) rather than Monte-Carlo.
    pub haar_exact: bool,
}

/// Running mean of `U^{(x)t} (x) conj(U)^{(x)t}` over unitaries.
struct TensorAccumulator {
    sum: Vec<Complex64>,
    sum_sq: Vec<f64>,
    count: u64,
}

impl TensorAccumulator {
    fn new(entries: usize) -> Self {
        Self {
            sum: vec![Complex64::new(0.0, 0.0); entries],
            sum_sq: vec![0.0; entries],
            count: 0,
        }
    }

    fn push(&mut self, u: &[Complex64], d: usize, t: u32) {
        let t = t as usize;
        // Row index of the tensor is (i_1..i_t, k_1..k_t), column (j_1..j_t, l_1..l_t);
        // the entry is prod_a U[i_a, j_a] * prod_a conj(U[k_a, l_a]).
        let side = d.pow(2 * t as u32);
        for row in 0..side {
            for col in 0..side {
                let mut v = Complex64::new(1.0, 0.0);
                let (mut r, mut c) = (row, col);
                for a in 0..2 * t {
                    let i = r % d;
                    let j = c % d;
                    r /= d;
                    c /= d;
                    let z = u[i * d + j];
                    v *= if a < t { z } else { z.conj() };
                }
                let e = row * side + col;
                self.sum[e] += v;
                self.sum_sq[e] += v.norm_sqr();
            }
        }
        self.count += 1;
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.count += other.count;
    }

    fn mean(&self, e: usize) -> Complex64 {
        self.sum[e] / self.count as f64
    }

    /// Standard error of the complex mean at entry `e` (zero for `exact`).
    fn std_error(&self, e: usize, exact: bool) -> f64 {
        if exact || self.count < 2 {
            return 0.0;
        }
        let c = self.count as f64;
        let m = self.mean(e);
        let var = ((self.sum_sq[e] - c * m.norm_sqr()) / (c - 1.0)).max(0.0);
        (var / c).sqrt()
    }
}

/// Accumulate the tensor over `count` unitaries in fixed-size chunks.
fn accumulate<F>(
    count: u64,
    entries: usize,
    d: usize,
    t: u32,
    unitary: F,
) -> Result<TensorAccumulator>
where
    F: Fn(u64) -> Result<Vec<Complex64>> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let partials: Vec<TensorAccumulator> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = TensorAccumulator::new(entries);
            for k in c * CHUNK..((c + 1) * CHUNK).min(count) {
                acc.push(&unitary(k)?, d, t);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = TensorAccumulator::new(entries);
    for p in &partials {
        total.merge(p);
    }
    Ok(total)
}

/// Max-entry gap between the ensemble's `t`-th moment tensor and Haar's.
///
/// Finite ensembles (Pauli, Fixed) are averaged exactly; Haar and brickwork
/// use `mc_samples` members. The Haar side is exact for `t = 1`
/// (`E[U_ij conj(U_kl)] = delta_ik delta_jl / N`) and otherwise Monte-Carlo
/// with the same sample count on an independent stream.
pub fn design_moment_discrepancy(
    spec: &EnsembleSpec,
    cfg: &DesignCheckConfig,
) -> Result<DesignCheckReport> {
    let dims = spec.dims();
    let entries = cfg.tensor_entries(dims)?;
    check_haar_dim(dims)?;
    let d = dims.len();
    let t = cfg.t;

    let (members, ensemble_exact) = match spec.size() {
        Some(size) => (size, true),
        None => (cfg.mc_samples, false),
    };
    let ensemble = accumulate(members, entries, d, t, |k| match spec.kind {
        EnsembleKind::Haar => sample_haar_unitary(dims, spec.member_seed(k)),
        _ => sample_member(spec, k)?.unitary(),
    })?;

    let haar_exact = t == 1;
    let reference = if haar_exact {
        None
    } else {
        let base = derive_seed(spec.base_seed(), &[HAAR_REFERENCE_SALT, u64::from(t)]);
        Some(accumulate(cfg.mc_samples, entries, d, t, |k| {
            sample_haar_unitary(dims, mix64(base, k))
        })?)
    };

    let side = d * d;
    let haar_mean = |e: usize| -> Complex64 {
        match &reference {
            Some(acc) => acc.mean(e),
            None => {
                // t = 1: row (i, k), column (j, l)
                let (row, col) = (e / side, e % side);
                let (i, k) = (row % d, row / d);
                let (j, l) = (col % d, col / d);
                if i == k && j == l {
                    Complex64::new(1.0 / d as f64, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    };

    let mut best = (0usize, -1.0f64);
    for e in 0..entries {
        let gap = (ensemble.mean(e) - haar_mean(e)).norm();
        if gap > best.1 {
            best = (e, gap);
        }
    }
    let (e, discrepancy) = best;
    let se_ens = ensemble.std_error(e, ensemble_exact);
    let se_ref = reference.as_ref().map_or(0.0, |r| r.std_error(e, false));
    let std_error = se_ens.hypot(se_ref);
    let z = if std_error > 0.0 {
        discrepancy / std_error
    } else if discrepancy > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(DesignCheckReport {
        discrepancy,
        std_error,
        z,
        ensemble_members: members,
        haar_exact,
    })
}
