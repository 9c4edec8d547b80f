// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Embedded statevector backend with shot sampling.
//!
//! Measurements must be terminal. The noiseless path evolves the state once
//! and samples the marginal distribution of the measured qubits; the noisy
//! path runs one trajectory per shot with stochastic Pauli injection after
//! every gate. Shot work is split into fixed-size streams, and parallel
//! and sequential runs draw the same numbers.

pub mod rng;
pub mod state;

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{circuit_stats, Bindings, Circuit, GateKind, GateOp};
use crate::par;
use rng::Stream;
use state::{gates, Matrix2, StateVector};

pub use state::StateVector as State;

pub const DEFAULT_BACKEND: &str = "statevector-sim";
pub const DEFAULT_MAX_QUBITS: usize = 20;
pub const MAX_UNITARY_QUBITS: usize = 10;

/// Shots handled by one random stream on the noiseless path.
const SHOTS_PER_STREAM: u64 = 8192;

/// Outcome counts keyed by bitstring; character `k` is classical bit `k`.
pub type Counts = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("circuit has unbound parameters: {}", .0.join(", "))]
    UnboundParameters(Vec<String>),
    #[error("{n} qubits exceeds the limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("qubit {qubit} is used after being measured; only terminal measurements are supported")]
    MidCircuitMeasurement { qubit: usize },
    #[error("angle of `{gate}` does not evaluate to a finite value")]
    NonFiniteAngle { gate: String },
    #[error("shots must be at least 1")]
    InvalidShots,
    #[error("noise probabilities must lie in [0, 1]")]
    InvalidNoise,
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            SimError::UnboundParameters(_) => "UnboundParameters",
            SimError::TooManyQubits { .. } => "TooManyQubits",
            SimError::MidCircuitMeasurement { .. } => "MidCircuitMeasurement",
            SimError::NonFiniteAngle { .. } => "NonFiniteAngle",
            SimError::InvalidShots => "InvalidShots",
            SimError::InvalidNoise => "InvalidNoise",
        }
    }
}

/// Depolarizing probabilities per one- and two-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec { p1: 0.0, p2: 0.0 };

    pub fn new(p1: f64, p2: f64) -> Result<NoiseSpec, SimError> {
        let n = NoiseSpec { p1, p2 };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if (0.0..=1.0).contains(&self.p1) && (0.0..=1.0).contains(&self.p2) {
            Ok(())
        } else {
            Err(SimError::InvalidNoise)
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    One(usize, Matrix2),
    Cx(usize, usize),
}

impl Instr {
    fn apply(&self, s: &mut StateVector) {
        match *self {
            Instr::One(q, ref m) => s.apply_1q(q, m),
            Instr::Cx(c, t) => s.apply_cx(c, t),
        }
    }
}

/// Unitary part of a circuit with evaluated angles, plus its measurement map.
struct Program {
    n_qubits: usize,
    n_clbits: usize,
    instrs: Vec<Instr>,
    /// `(qubit, clbit)` in program order; later writes to a clbit win.
    measures: Vec<(usize, usize)>,
}

fn matrix_of(op: &GateOp) -> Result<Instr, SimError> {
    let angle = |i: usize| -> Result<f64, SimError> {
        op.params()[i].eval().map_err(|_| SimError::NonFiniteAngle {
            gate: op.to_string(),
        })
    };
    let q = op.qubits()[0];
    let m = match op.kind() {
        GateKind::H => gates::h(),
        GateKind::X => gates::x(),
        GateKind::Y => gates::y(),
        GateKind::Z => gates::z(),
        GateKind::S => gates::s(),
        GateKind::Sdg => gates::sdg(),
        GateKind::T => gates::t(),
        GateKind::Tdg => gates::tdg(),
        GateKind::Rx => gates::rx(angle(0)?),
        GateKind::Ry => gates::ry(angle(0)?),
        GateKind::Rz => gates::rz(angle(0)?),
        GateKind::U1 => gates::phase(angle(0)?),
        GateKind::U2 => gates::u2(angle(0)?, angle(1)?),
        GateKind::U3 => gates::u3(angle(0)?, angle(1)?, angle(2)?),
        GateKind::Cx => return Ok(Instr::Cx(q, op.qubits()[1])),
        GateKind::Measure | GateKind::Barrier => unreachable!("filtered by caller"),
    };
    Ok(Instr::One(q, m))
}

/// Execution settings shared by all jobs of one service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    pub max_qubits: usize,
    /// Use rayon kernels when the `parallel` feature is built in.
    pub parallel: bool,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            max_qubits: DEFAULT_MAX_QUBITS,
            parallel: par::available(),
        }
    }
}

impl Simulator {
    pub fn sequential() -> Simulator {
        Simulator {
            parallel: false,
            ..Simulator::default()
        }
    }

    fn lower(&self, circuit: &Circuit, max_qubits: usize) -> Result<Program, SimError> {
        if !circuit.is_bound() {
            return Err(SimError::UnboundParameters(circuit.free_param_names()));
        }
        if circuit.n_qubits() > max_qubits {
            return Err(SimError::TooManyQubits {
                n: circuit.n_qubits(),
                max: max_qubits,
            });
        }
        let mut measured = vec![false; circuit.n_qubits()];
        let mut instrs = Vec::new();
        let mut measures = Vec::new();
        for op in circuit.ops() {
            match op.kind() {
                GateKind::Barrier => {}
                GateKind::Measure => {
                    measured[op.qubits()[0]] = true;
                    measures.push((op.qubits()[0], op.clbits()[0]));
                }
                _ => {
                    if let Some(&qubit) = op.qubits().iter().find(|&&q| measured[q]) {
                        return Err(SimError::MidCircuitMeasurement { qubit });
                    }
                    instrs.push(matrix_of(op)?);
                }
            }
        }
        Ok(Program {
            n_qubits: circuit.n_qubits(),
            n_clbits: circuit.n_clbits(),
            instrs,
            measures,
        })
    }

    fn evolve(&self, program: &Program, initial: usize) -> StateVector {
        let mut s = StateVector::basis(program.n_qubits, initial).with_parallel(self.parallel);
        for i in &program.instrs {
            i.apply(&mut s);
        }
        s
    }

    /// Amplitudes of `U|0…0⟩`. Measurements and barriers are ignored.
    pub fn run_statevector(&self, circuit: &Circuit) -> Result<StateVector, SimError> {
        let program = self.lower(circuit, self.max_qubits)?;
        Ok(self.evolve(&program, 0))
    }

    /// Full unitary, built column by column from basis-state runs.
    /// Measurements and barriers are ignored.
    pub fn unitary_of(&self, circuit: &Circuit) -> Result<DMatrix<Complex64>, SimError> {
        let program = self.lower(circuit, self.max_qubits.min(MAX_UNITARY_QUBITS))?;
        let dim = 1usize << program.n_qubits;
        let columns = par::map_range(dim, self.parallel, |col| {
            let mut s = StateVector::basis(program.n_qubits, col);
            for i in &program.instrs {
                i.apply(&mut s);
            }
            s.into_amplitudes()
        });
        Ok(DMatrix::from_fn(dim, dim, |r, c| columns[c][r]))
    }

    /// Samples `shots` terminal-measurement outcomes.
    pub fn sample_counts(
        &self,
        circuit: &Circuit,
        shots: u64,
        seed: u64,
        noise: NoiseSpec,
    ) -> Result<Counts, SimError> {
        if shots == 0 {
            return Err(SimError::InvalidShots);
        }
        noise.validate()?;
        let program = self.lower(circuit, self.max_qubits)?;
        let outcomes = Outcomes::new(&program);
        let hist = if noise.is_noiseless() {
            self.sample_noiseless(&program, &outcomes, shots, seed)
        } else {
            self.sample_noisy(&program, &outcomes, shots, seed, noise)
        };
        Ok(outcomes.to_counts(&hist))
    }

    fn sample_noiseless(&self, program: &Program, outcomes: &Outcomes, shots: u64, seed: u64) -> Vec<u64> {
        let state = self.evolve(program, 0);
        let mut marginal = vec![0.0f64; outcomes.len()];
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            marginal[outcomes.index_of(idx)] += amp.norm_sqr();
        }
        let cdf = Cdf::new(&marginal);
        let streams = shots.div_ceil(SHOTS_PER_STREAM) as usize;
        let partial = par::map_range(streams, self.parallel, |k| {
            let begin = k as u64 * SHOTS_PER_STREAM;
            let n = SHOTS_PER_STREAM.min(shots - begin);
            let mut rng = Stream::new(seed, k as u64);
            let mut hist = vec![0u64; cdf.len()];
            for _ in 0..n {
                hist[cdf.sample(rng.unit())] += 1;
            }
            hist
        });
        sum_histograms(partial, outcomes.len())
    }

    fn sample_noisy(
        &self,
        program: &Program,
        outcomes: &Outcomes,
        shots: u64,
        seed: u64,
        noise: NoiseSpec,
    ) -> Vec<u64> {
        let paulis = [gates::x(), gates::y(), gates::z()];
        let picks = par::map_range(shots as usize, self.parallel, |shot| {
            let mut rng = Stream::new(seed, shot as u64);
            // Trajectories run sequentially inside; parallelism is across shots.
            let mut s = StateVector::zero(program.n_qubits);
            for instr in &program.instrs {
                instr.apply(&mut s);
                let (p, touched, n) = match *instr {
                    Instr::One(q, _) => (noise.p1, [q, 0], 1),
                    Instr::Cx(c, t) => (noise.p2, [c, t], 2),
                };
                for &q in &touched[..n] {
                    if rng.unit() < p {
                        s.apply_1q(q, &paulis[rng.below(3) as usize]);
                    }
                }
            }
            let u = rng.unit();
            let mut acc = 0.0;
            let amps = s.amplitudes();
            let mut chosen = amps.len() - 1;
            for (i, a) in amps.iter().enumerate() {
                acc += a.norm_sqr();
                if u < acc {
                    chosen = i;
                    break;
                }
            }
            outcomes.index_of(chosen)
        });
        let mut hist = vec![0u64; outcomes.len()];
        for o in picks {
            hist[o] += 1;
        }
        hist
    }
}

fn sum_histograms(parts: Vec<Vec<u64>>, len: usize) -> Vec<u64> {
    let mut total = vec![0u64; len];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Inverse-CDF sampler over a discrete distribution.
struct Cdf {
    cumulative: Vec<f64>,
    last_nonzero: usize,
}

impl Cdf {
    fn new(weights: &[f64]) -> Cdf {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let last_nonzero = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        Cdf {
            cumulative,
            last_nonzero,
        }
    }

    fn len(&self) -> usize {
        self.cumulative.len()
    }

    fn sample(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        // Rounding can leave the total slightly below 1.
        i.min(self.last_nonzero)
    }
}

/// Compresses basis states to the values of the measured qubits.
struct Outcomes {
    /// Measured qubits, ascending; their values form the compressed index.
    qubits: Vec<usize>,
    /// For each clbit, the position in `qubits` of its source, if measured.
    clbit_source: Vec<Option<usize>>,
}

impl Outcomes {
    fn new(program: &Program) -> Outcomes {
        let mut qubits: Vec<usize> = program.measures.iter().map(|&(q, _)| q).collect();
        qubits.sort_unstable();
        qubits.dedup();
        let mut clbit_source = vec![None; program.n_clbits];
        for &(q, c) in &program.measures {
            clbit_source[c] = qubits.iter().position(|&x| x == q);
        }
        Outcomes {
            qubits,
            clbit_source,
        }
    }

    fn len(&self) -> usize {
        1 << self.qubits.len()
    }

    fn index_of(&self, basis: usize) -> usize {
        self.qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | (((basis >> q) & 1) << k))
    }

    fn bitstring(&self, outcome: usize) -> String {
        self.clbit_source
            .iter()
            .map(|src| match src {
                Some(k) if (outcome >> k) & 1 == 1 => '1',
                _ => '0',
            })
            .collect()
    }

    fn to_counts(&self, hist: &[u64]) -> Counts {
        let mut counts = Counts::new();
        for (o, &n) in hist.iter().enumerate() {
            if n > 0 {
                *counts.entry(self.bitstring(o)).or_insert(0) += n;
            }
        }
        counts
    }
}

/// Exact outcome distribution over the classical bits, keyed like [`Counts`].
pub fn exact_distribution(sim: &Simulator, circuit: &Circuit) -> Result<BTreeMap<String, f64>, SimError> {
    let program = sim.lower(circuit, sim.max_qubits)?;
    let outcomes = Outcomes::new(&program);
    let state = sim.evolve(&program, 0);
    let mut dist = BTreeMap::new();
    for (idx, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *dist.entry(outcomes.bitstring(outcomes.index_of(idx))).or_insert(0.0) += p;
        }
    }
    Ok(dist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub n_qubits: usize,
    pub depth: usize,
    pub gate_counts: BTreeMap<String, usize>,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub warnings: Vec<String>,
    pub rng: RngInfo,
    pub noise: NoiseSpec,
    /// Set when the terminal measurement was added by the compiler.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub measurements_appended: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngInfo {
    pub generator: String,
    pub seeding: String,
}

impl Default for RngInfo {
    fn default() -> Self {
        RngInfo {
            generator: rng::GENERATOR.into(),
            seeding: rng::SEEDING.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub code: String,
    pub message: String,
}

/// The result payload returned to clients and stored with each job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultObject {
    pub job_id: String,
    pub status: JobStatus,
    pub backend: String,
    pub shots: u64,
    pub counts: Counts,
    pub parameters: Option<Bindings>,
    pub source: String,
    pub generated_qasm: Option<String>,
    pub metadata: ResultMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<Failure>,
}

impl ResultObject {
    pub fn is_completed(&self) -> bool {
        self.status == JobStatus::Completed
    }
}

#[derive(Debug, Clone)]
pub struct ExecutionRequest {
    pub job_id: String,
    pub circuit: Circuit,
    /// Echoed verbatim in the result.
    pub parameters: Option<Bindings>,
    pub shots: u64,
    pub seed: Option<u64>,
    pub noise: NoiseSpec,
    pub backend: String,
}

#[derive(Debug, Clone, Default)]
pub struct ProgramOrigin {
    pub source: String,
    pub generated_qasm: Option<String>,
    pub warnings: Vec<String>,
    pub measurements_appended: bool,
}

/// Seed for jobs submitted without one.
pub fn fresh_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or_default(),
    );
    h.finish()
}

/// Runs a request and assembles its result. Failures become a result with
/// `status = failed` and a machine-readable code.
pub fn execute(sim: &Simulator, request: ExecutionRequest, origin: ProgramOrigin) -> ResultObject {
    let started = Instant::now();
    let seed = request.seed.unwrap_or_else(fresh_seed);
    let stats = circuit_stats(&request.circuit);
    let outcome = sim.sample_counts(&request.circuit, request.shots, seed, request.noise);
    let wall_time_ms = started.elapsed().as_millis() as u64;
    let (status, counts, error) = match outcome {
        Ok(counts) => (JobStatus::Completed, counts, None),
        Err(e) => (
            JobStatus::Failed,
            Counts::new(),
            Some(Failure {
                code: e.code().into(),
                message: e.to_string(),
            }),
        ),
    };
    ResultObject {
        job_id: request.job_id,
        status,
        backend: request.backend,
        shots: request.shots,
        counts,
        parameters: request.parameters,
        source: origin.source,
        generated_qasm: origin.generated_qasm,
        metadata: ResultMetadata {
            n_qubits: stats.n_qubits,
            depth: stats.depth,
            gate_counts: stats.gate_counts,
            seed,
            wall_time_ms,
            warnings: origin.warnings,
            rng: RngInfo::default(),
            noise: request.noise,
            measurements_appended: origin.measurements_appended,
        },
        error,
    }
}
