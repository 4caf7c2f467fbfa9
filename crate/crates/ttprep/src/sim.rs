//! Dense statevector simulation of the gate plans built by [`crate::circuit`].
//!
//! Indices follow the global convention of [`crate::bits`]: qubit 1 is the
//! most significant bit of a basis index. A gate on qubits `(k, ..., k-w+1)`
//! lists its first qubit as the local MSB while that qubit holds the least
//! significant bit of the support's contiguous field, so local and global
//! support indices differ by one bit reversal, precomputed per gate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bits::{index_to_bits, reverse_bits};
use crate::circuit::{CircuitPlan, GateKind, GateOp};

/// Hard register cap: 2^26 complex amplitudes is 1 GiB, the largest state
/// this simulator is willing to allocate.
pub const MAX_QUBITS: usize = 26;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SimError {
    #[error("{requested} qubits requested, simulator caps at {max}")]
    TooManyQubits { requested: usize, max: usize },
    #[error("gate support out of range: {0}")]
    SupportOutOfRange(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

/// A normalized `2^d`-amplitude register.
#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubit_count(d: usize) -> Result<(), SimError> {
    if d == 0 {
        return Err(SimError::InvalidState("zero qubits".into()));
    }
    if d > MAX_QUBITS {
        return Err(SimError::TooManyQubits {
            requested: d,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// Wraps explicit amplitudes; the vector must have length `2^d` and unit
    /// norm to within `1e-10`.
    pub fn from_amps(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        check_qubit_count(num_qubits)?;
        if amps.len() != 1 << num_qubits {
            return Err(SimError::InvalidState(format!(
                "{} amplitudes for {num_qubits} qubits",
                amps.len()
            )));
        }
        let norm = libm::sqrt(amps.iter().map(|z| z.norm_sqr()).sum());
        if !(libm::fabs(norm - 1.0) <= 1e-10) {
            return Err(SimError::InvalidState(format!(
                "norm {norm} is not 1 within 1e-10"
            )));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Amplitudes in basis-index order.
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Measurement probabilities `|amp|^2` in basis-index order.
    pub fn probs(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }
}

/// `|0...0>` on `d` qubits.
pub fn zero_state(d: usize) -> Result<StateVector, SimError> {
    check_qubit_count(d)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << d];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { num_qubits: d, amps })
}

/// Applies one gate, returning the new state.
pub fn apply_gate(sv: &StateVector, gate: &GateOp) -> Result<StateVector, SimError> {
    let d = sv.num_qubits();
    let k = gate.first_qubit();
    if k > d {
        return Err(SimError::SupportOutOfRange(format!(
            "gate on qubits {:?} in a {d}-qubit register",
            gate.qubits()
        )));
    }
    let mut amps = sv.amps.clone();
    match gate.kind() {
        GateKind::Unitary(m) => apply_unitary(&mut amps, d, k, gate.width(), m),
        GateKind::MultiplexedRy(angles) => apply_multiplexed(&mut amps, d, k, angles),
    }
    Ok(StateVector {
        num_qubits: d,
        amps,
    })
}

fn apply_unitary(
    amps: &mut [Complex64],
    d: usize,
    k: usize,
    w: usize,
    m: &nalgebra::DMatrix<Complex64>,
) {
    let s0 = d - k; // shift of qubit k, the low end of the support field
    let dim = 1usize << w;
    let offsets: Vec<usize> = (0..dim).map(|l| reverse_bits(l, w) << s0).collect();
    let mut local = vec![Complex64::new(0.0, 0.0); dim];
    for hi in 0..1usize << (k - w) {
        for lo in 0..1usize << s0 {
            let base = (hi << (s0 + w)) | lo;
            for (slot, &off) in local.iter_mut().zip(&offsets) {
                *slot = amps[base | off];
            }
            for (lout, &off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (lin, &x) in local.iter().enumerate() {
                    acc += m[(lout, lin)] * x;
                }
                amps[base | off] = acc;
            }
        }
    }
}

fn apply_multiplexed(amps: &mut [Complex64], d: usize, k: usize, angles: &[f64]) {
    let nc = angles.len().trailing_zeros() as usize;
    let st = d - k; // target qubit shift; controls sit directly above
    let tmask = 1usize << st;
    for (c, theta) in angles.iter().enumerate() {
        let (co, si) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
        let g = reverse_bits(c, nc);
        for hi in 0..1usize << (k - 1 - nc) {
            for lo in 0..1usize << st {
                let base = (hi << (st + 1 + nc)) | (g << (st + 1)) | lo;
                let (a0, a1) = (amps[base], amps[base | tmask]);
                amps[base] = co * a0 - si * a1;
                amps[base | tmask] = si * a0 + co * a1;
            }
        }
    }
}

/// Runs a plan from `|0...0>`, applying gates in list order.
pub fn run(plan: &CircuitPlan) -> Result<StateVector, SimError> {
    let mut sv = zero_state(plan.num_qubits())?;
    for gate in plan.gates() {
        sv = apply_gate(&sv, gate)?;
    }
    Ok(sv)
}

/// Draws `shots` basis-state measurements with a seeded generator, keyed by
/// bit string (qubit 1 first).
pub fn sample(sv: &StateVector, shots: u64, seed: u64) -> BTreeMap<String, u64> {
    let mut cum = Vec::with_capacity(sv.amps.len());
    let mut acc = 0.0;
    for z in &sv.amps {
        acc += z.norm_sqr();
        cum.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        // 53 uniform mantissa bits in [0, 1)
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let idx = cum.partition_point(|&c| c <= u).min(sv.amps.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(idx, n)| {
            let bits: String = index_to_bits(idx as u64, sv.num_qubits)
                .into_iter()
                .map(|b| if b == 0 { '0' } else { '1' })
                .collect();
            (bits, n)
        })
        .collect()
}
