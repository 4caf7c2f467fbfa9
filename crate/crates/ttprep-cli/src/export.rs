//! Circuit interchange: a JSON document carrying the gate list as dense
//! matrices plus the bit convention, so nothing about qubit ordering is left
//! implicit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use ttprep::circuit::{CircuitPlan, GateOp, GateOrigin};
use ttprep::nalgebra::DMatrix;
use ttprep::num_complex::Complex64;

use crate::error::AppError;

pub const BIT_CONVENTION: &str = "qubit1_msb";

/// Widest gate that will be expanded to a dense matrix on export.
const MAX_EXPORT_WIDTH: usize = 12;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    num_qubits: usize,
    normalizer: f64,
    gates: Vec<GateDoc>,
    bit_convention: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    /// Support, descending; the first qubit is the most significant local bit.
    qubits: Vec<usize>,
    /// Row-major `[re, im]` pairs.
    matrix: Vec<Vec<[f64; 2]>>,
}

pub fn export_circuit(plan: &CircuitPlan, path: &Path) -> Result<(), AppError> {
    let mut gates = Vec::with_capacity(plan.gates().len());
    for gate in plan.gates() {
        if gate.width() > MAX_EXPORT_WIDTH {
            return Err(AppError::Numeric(format!(
                "a {}-qubit gate is too wide to expand for export (cap {MAX_EXPORT_WIDTH})",
                gate.width()
            )));
        }
        let m = gate.dense_matrix();
        let matrix = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect();
        gates.push(GateDoc {
            qubits: gate.qubits().to_vec(),
            matrix,
        });
    }
    let doc = CircuitDoc {
        num_qubits: plan.num_qubits(),
        normalizer: plan.normalizer(),
        gates,
        bit_convention: BIT_CONVENTION.into(),
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| AppError::Numeric(format!("serializing circuit: {e}")))?;
    std::fs::write(path, text).map_err(|e| AppError::io(path, e))
}

pub fn import_circuit(path: &Path) -> Result<CircuitPlan, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let doc: CircuitDoc = serde_json::from_str(&text)
        .map_err(|e| AppError::Config(format!("{}: schema error: {e}", path.display())))?;

    if doc.bit_convention != BIT_CONVENTION {
        return Err(AppError::Config(format!(
            "{}: bit_convention must be {BIT_CONVENTION:?}, got {:?}",
            path.display(),
            doc.bit_convention
        )));
    }
    let mut gates = Vec::with_capacity(doc.gates.len());
    for (i, gate) in doc.gates.iter().enumerate() {
        let bad = |msg: String| AppError::Config(format!("{}: gate {i}: {msg}", path.display()));
        if gate.qubits.is_empty() {
            return Err(bad("qubits list is empty".into()));
        }
        if gate.qubits.windows(2).any(|w| w[0] != w[1] + 1) || *gate.qubits.last().unwrap() == 0 {
            return Err(bad(format!(
                "qubits {:?} must be contiguous descending and at least 1",
                gate.qubits
            )));
        }
        let dim = 1usize << gate.qubits.len();
        if gate.matrix.len() != dim || gate.matrix.iter().any(|row| row.len() != dim) {
            return Err(bad(format!(
                "matrix must be {dim}x{dim} for {} qubits",
                gate.qubits.len()
            )));
        }
        if gate
            .matrix
            .iter()
            .flatten()
            .any(|e| !e[0].is_finite() || !e[1].is_finite())
        {
            return Err(bad("matrix entries must be finite".into()));
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            Complex64::new(gate.matrix[r][c][0], gate.matrix[r][c][1])
        });
        let op = GateOp::unitary(gate.qubits[0], m, GateOrigin::Imported)
            .map_err(|e| bad(format!("{e}")))?;
        gates.push(op);
    }
    CircuitPlan::new(doc.num_qubits, gates, doc.normalizer)
        .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
}
