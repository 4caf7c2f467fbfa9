//! Compilation of amplitude tensor trains into unitary gate lists, plus the
//! Grover-Rudolph baseline the benchmarks compare against.
//!
//! The compiler walks the train front to back. At core `k` it carries the
//! matrix `C_{k-1} = Sigma V^T` left over from the previous SVD, contracts it
//! into the core, reshapes to `M_k` with rows `(i_k, j)` (physical bit over
//! incoming bond), takes the economy SVD `M_k = U Sigma V^T`, and embeds `U`
//! into a unitary gate on qubits `(k, ..., k-w+1)`. The last SVD leaves a
//! single positive singular value, the normalizer `A`; applying the gates in
//! reverse core order to `|0...0>` then prepares amplitudes `A(i)/A`.
//!
//! Gate-local basis convention (shared with the simulator): the first-listed
//! support qubit carries the most significant local bit. A bond value `j`
//! therefore enters gate `k` at basis state `j * 2^(w - omega)` (register of
//! width `omega` topped up with fresh `|0>`s), which is exactly where gate
//! `k+1`'s rows `(i_{k+1}, j)` left it.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bits::reverse_bits;
use crate::linalg;
use crate::quantize::DiscreteDistribution;
use crate::tensor::{TTCore, TensorTrain};

/// Unitarity acceptance threshold for gate construction.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Relative cutoff on singular values inside the compiler.
const SVD_TRUNC_TOL: f64 = 1e-12;
/// Near-dependence threshold for the Gram-Schmidt completion.
const COMPLETION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, thiserror::Error)]
pub enum CircuitError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("rank cap exceeded: {0}")]
    RankCapExceeded(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Where a gate came from, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOrigin {
    /// Emitted for TT core `k`.
    TtCore(usize),
    /// Product of merged gates.
    Merged,
    /// Grover-Rudolph level `k`.
    BaselineLevel(usize),
    /// Reconstructed from an interchange document.
    Imported,
}

/// Gate payload. Baseline rotation levels stay in angle form: a level on
/// many qubits would be astronomically large as a dense matrix, and the
/// simulator has a specialized kernel for them.
#[derive(Debug, Clone)]
pub enum GateKind {
    /// Dense unitary on the support.
    Unitary(DMatrix<Complex64>),
    /// Uniformly controlled Ry. The first support qubit is the target; the
    /// remaining support qubits select `angles[c]`, where the second-listed
    /// qubit carries the most significant bit of `c`.
    MultiplexedRy(Vec<f64>),
}

/// A unitary on a contiguous descending run of qubits `(k, ..., k-w+1)`.
///
/// Local basis: the first-listed qubit is the most significant bit of the
/// `2^w` gate-local index.
#[derive(Debug, Clone)]
pub struct GateOp {
    kind: GateKind,
    qubits: Vec<usize>,
    origin: GateOrigin,
}

fn log2_exact(n: usize, what: &str) -> Result<usize, CircuitError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(CircuitError::InvalidInput(format!(
            "{what} must be a power of two, got {n}"
        )));
    }
    Ok(n.trailing_zeros() as usize)
}

fn support(first_qubit: usize, width: usize) -> Result<Vec<usize>, CircuitError> {
    if width == 0 || first_qubit < width {
        return Err(CircuitError::InvalidInput(format!(
            "a {width}-qubit gate cannot end at qubit {first_qubit}"
        )));
    }
    Ok((0..width).map(|t| first_qubit - t).collect())
}

impl GateOp {
    /// Dense unitary with its first (most significant) qubit at `first_qubit`.
    pub fn unitary(
        first_qubit: usize,
        matrix: DMatrix<Complex64>,
        origin: GateOrigin,
    ) -> Result<Self, CircuitError> {
        let gate = Self::unitary_unchecked(first_qubit, matrix, origin)?;
        let GateKind::Unitary(m) = &gate.kind else {
            unreachable!()
        };
        let n = m.nrows();
        let gram = m.adjoint() * m;
        let defect = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let want = if i == j { 1.0 } else { 0.0 };
                (gram[(i, j)] - Complex64::new(want, 0.0)).norm()
            })
            .fold(0.0f64, f64::max);
        if !(defect <= UNITARITY_TOL) {
            return Err(CircuitError::NotUnitary(format!(
                "max |W^H W - I| = {defect:.3e}"
            )));
        }
        Ok(gate)
    }

    /// Shape checks only; for compositions that are unitary by construction.
    pub(crate) fn unitary_unchecked(
        first_qubit: usize,
        matrix: DMatrix<Complex64>,
        origin: GateOrigin,
    ) -> Result<Self, CircuitError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(CircuitError::InvalidInput(format!(
                "gate matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let width = log2_exact(matrix.nrows(), "gate dimension")?;
        if width == 0 {
            return Err(CircuitError::InvalidInput("1x1 gate".into()));
        }
        Ok(Self {
            kind: GateKind::Unitary(matrix),
            qubits: support(first_qubit, width)?,
            origin,
        })
    }

    /// Multiplexed Ry targeting `first_qubit`, controlled by the rest of the
    /// support; `angles.len()` fixes the width as `1 + log2(len)`.
    pub fn multiplexed_ry(
        first_qubit: usize,
        angles: Vec<f64>,
        origin: GateOrigin,
    ) -> Result<Self, CircuitError> {
        let controls = log2_exact(angles.len(), "multiplexed angle count")?;
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(CircuitError::InvalidInput("non-finite angle".into()));
        }
        Ok(Self {
            kind: GateKind::MultiplexedRy(angles),
            qubits: support(first_qubit, controls + 1)?,
            origin,
        })
    }

    /// Support qubits, first entry most significant (and largest label).
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn first_qubit(&self) -> usize {
        self.qubits[0]
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn origin(&self) -> &GateOrigin {
        &self.origin
    }

    /// Elementary operations inside this gate: one for a dense unitary, one
    /// per rotation node for a multiplexed level.
    pub fn node_count(&self) -> usize {
        match &self.kind {
            GateKind::Unitary(_) => 1,
            GateKind::MultiplexedRy(angles) => angles.len(),
        }
    }

    /// The gate as an explicit `2^w x 2^w` matrix (multiplexed levels are
    /// expanded; mind the size for wide gates).
    pub fn dense_matrix(&self) -> DMatrix<Complex64> {
        match &self.kind {
            GateKind::Unitary(m) => m.clone(),
            GateKind::MultiplexedRy(angles) => {
                let half = angles.len();
                let n = 2 * half;
                let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
                for (c, theta) in angles.iter().enumerate() {
                    let (co, si) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
                    m[(c, c)] = Complex64::new(co, 0.0);
                    m[(half + c, c)] = Complex64::new(si, 0.0);
                    m[(c, half + c)] = Complex64::new(-si, 0.0);
                    m[(half + c, half + c)] = Complex64::new(co, 0.0);
                }
                m
            }
        }
    }
}

/// An ordered gate list preparing `A(i)/normalizer` from `|0...0>`.
///
/// `gates` is in application order: the first element acts first. For a
/// compiled train that means `[W_d, ..., W_1]`. `total_gate_count` counts
/// rotation nodes, so a multiplexed baseline level of `2^(k-1)` angles
/// contributes `2^(k-1)`.
#[derive(Debug, Clone)]
pub struct CircuitPlan {
    num_qubits: usize,
    gates: Vec<GateOp>,
    normalizer: f64,
    depth: usize,
    total_gate_count: usize,
}

fn compute_depth(num_qubits: usize, gates: &[GateOp]) -> usize {
    let mut last_layer = vec![0usize; num_qubits + 1];
    let mut depth = 0;
    for gate in gates {
        let layer = 1 + gate.qubits().iter().map(|&q| last_layer[q]).max().unwrap_or(0);
        for &q in gate.qubits() {
            last_layer[q] = layer;
        }
        depth = depth.max(layer);
    }
    depth
}

impl CircuitPlan {
    pub fn new(
        num_qubits: usize,
        gates: Vec<GateOp>,
        normalizer: f64,
    ) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::InvalidInput("zero qubits".into()));
        }
        if !(normalizer > 0.0) || !normalizer.is_finite() {
            return Err(CircuitError::InvalidInput(format!(
                "normalizer {normalizer} must be a positive real"
            )));
        }
        for gate in &gates {
            if gate.first_qubit() > num_qubits {
                return Err(CircuitError::InvalidInput(format!(
                    "gate on qubit {} in a {num_qubits}-qubit plan",
                    gate.first_qubit()
                )));
            }
        }
        let depth = compute_depth(num_qubits, &gates);
        let total_gate_count = gates.iter().map(GateOp::node_count).sum();
        Ok(Self {
            num_qubits,
            gates,
            normalizer,
            depth,
            total_gate_count,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Gates in application order (first element acts first).
    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    /// The positive scale `A` dividing the encoded amplitudes.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Longest chain of gates with overlapping supports in list order.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn total_gate_count(&self) -> usize {
        self.total_gate_count
    }
}

/// Reshapes a mode-2 core `(l, 2, r)` into the `2l x r` matrix whose row
/// `i*l + j` is the core slice `(j, i, :)`: physical bit over incoming bond.
pub fn reshape_core(core: &TTCore) -> Result<DMatrix<f64>, CircuitError> {
    if core.mode() != 2 {
        return Err(CircuitError::InvalidInput(format!(
            "mode size {} (compilation needs qubits)",
            core.mode()
        )));
    }
    if !core.left_rank().is_power_of_two() {
        return Err(CircuitError::InvalidInput(format!(
            "left rank {} is not a power of two; pad first",
            core.left_rank()
        )));
    }
    let (l, r) = (core.left_rank(), core.right_rank());
    Ok(DMatrix::from_fn(2 * l, r, |row, b| {
        core.get(row % l, row / l, b)
    }))
}

/// Extends a column-orthonormal `m x n` matrix (`m >= n`) to an `m x m`
/// orthogonal matrix whose first `n` columns are the input.
///
/// Completion is deterministic: canonical basis vectors are Gram-Schmidt
/// orthogonalized in index order, skipping near-dependent candidates.
pub fn complete_isometry(u: &DMatrix<f64>) -> Result<DMatrix<f64>, CircuitError> {
    let (m, n) = (u.nrows(), u.ncols());
    if n == 0 || m < n {
        return Err(CircuitError::InvalidInput(format!(
            "{m}x{n} is not a tall isometry"
        )));
    }
    let gram = u.transpose() * u;
    let defect = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| libm::fabs(gram[(i, j)] - if i == j { 1.0 } else { 0.0 }))
        .fold(0.0f64, f64::max);
    if !(defect <= UNITARITY_TOL) {
        return Err(CircuitError::NotUnitary(format!(
            "columns are not orthonormal: max |U^T U - I| = {defect:.3e}"
        )));
    }

    let mut full = DMatrix::zeros(m, m);
    full.columns_mut(0, n).copy_from(u);
    let mut have = n;
    for i in 0..m {
        if have == m {
            break;
        }
        let mut v = DMatrix::zeros(m, 1);
        v[(i, 0)] = 1.0;
        // two projection passes keep the completion orthogonal to 1e-14
        for _ in 0..2 {
            for c in 0..have {
                let col = full.column(c);
                let dot: f64 = (0..m).map(|t| col[t] * v[(t, 0)]).sum();
                for t in 0..m {
                    v[(t, 0)] -= dot * col[t];
                }
            }
        }
        let norm = libm::sqrt((0..m).map(|t| v[(t, 0)] * v[(t, 0)]).sum());
        if norm > COMPLETION_TOL {
            for t in 0..m {
                full[(t, have)] = v[(t, 0)] / norm;
            }
            have += 1;
        }
    }
    if have != m {
        return Err(CircuitError::Numerical(
            "Gram-Schmidt completion ran out of basis vectors".into(),
        ));
    }
    Ok(full)
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Compiles an amplitude train (mode sizes 2, power-of-two ranks at most
/// `chi_cap`) into one gate per core; see the module docs for the scheme.
pub fn tt_to_circuit(tt: &TensorTrain, chi_cap: usize) -> Result<CircuitPlan, CircuitError> {
    if chi_cap == 0 {
        return Err(CircuitError::InvalidInput("chi_cap of zero".into()));
    }
    let d = tt.len();
    if tt.mode_sizes().iter().any(|&n| n != 2) {
        return Err(CircuitError::InvalidInput(
            "all mode sizes must be 2 (quantics train)".into(),
        ));
    }
    for r in tt.ranks() {
        if !r.is_power_of_two() {
            return Err(CircuitError::InvalidInput(format!(
                "bond rank {r} is not a power of two; run pad_ranks_pow2 first"
            )));
        }
        if r > chi_cap {
            return Err(CircuitError::RankCapExceeded(format!(
                "bond rank {r} exceeds chi_cap {chi_cap}; round the train first"
            )));
        }
    }

    // carry C_{k-1} = Sigma V^T from the previous SVD, zero-padded to the
    // power-of-two register size rho
    let mut carry = DMatrix::from_element(1, 1, 1.0);
    let mut rho = 1usize;
    let mut gates: Vec<GateOp> = Vec::with_capacity(d);
    for (idx, core) in tt.cores().iter().enumerate() {
        let k = idx + 1;
        let rk = core.right_rank();
        let h = &carry * core.right_unfolding();
        let rows = 2 * rho;
        let mat = DMatrix::from_fn(rows, rk, |row, b| {
            let (i, j) = (row / rho, row % rho);
            h[(j, i * rk + b)]
        });

        let (u, s, vt) = linalg::svd_thin(&mat)
            .ok_or_else(|| CircuitError::Numerical(format!("SVD failed at core {k}")))?;
        let kept = linalg::rank_from_singulars(&s, SVD_TRUNC_TOL);
        if kept == 0 {
            return Err(CircuitError::InvalidInput(
                "amplitude tensor is identically zero".into(),
            ));
        }
        let mut u_kept = u.columns(0, kept).into_owned();
        let mut next_carry = DMatrix::from_fn(kept, rk, |t, b| s[t] * vt[(t, b)]);
        if k == d && next_carry[(0, 0)] < 0.0 {
            // the final 1x1 carry is the normalizer; keep it positive
            u_kept.neg_mut();
            next_carry.neg_mut();
        }

        let omega = ceil_log2(kept);
        let full = complete_isometry(&u_kept)?;
        let stride = rows >> omega;
        let mut gate = DMatrix::zeros(rows, rows);
        let mut used = vec![false; rows];
        for j in 0..kept {
            gate.set_column(j * stride, &full.column(j));
            used[j * stride] = true;
        }
        let mut spare = kept;
        for col in 0..rows {
            if !used[col] {
                gate.set_column(col, &full.column(spare));
                spare += 1;
            }
        }
        gates.push(GateOp::unitary(
            k,
            gate.map(|x| Complex64::new(x, 0.0)),
            GateOrigin::TtCore(k),
        )?);

        rho = 1 << omega;
        let mut padded = DMatrix::zeros(rho, rk);
        padded.rows_mut(0, kept).copy_from(&next_carry);
        carry = padded;
    }

    let normalizer = carry[(0, 0)];
    gates.reverse();
    CircuitPlan::new(d, gates, normalizer)
}

/// Composes runs of consecutive gates whose support lies inside the support
/// of the gate accumulated before them, producing one wider unitary per run.
///
/// Multiplexed gates pass through unmerged: expanding one to compose would
/// reintroduce exactly the exponential matrix the angle form avoids.
pub fn merge_gates(plan: &CircuitPlan) -> CircuitPlan {
    let mut out: Vec<GateOp> = Vec::with_capacity(plan.gates().len());
    for gate in plan.gates() {
        let nested = out.last().is_some_and(|prev| {
            matches!(prev.kind(), GateKind::Unitary(_))
                && matches!(gate.kind(), GateKind::Unitary(_))
                && gate.first_qubit() <= prev.first_qubit()
                && gate.first_qubit() - gate.width() >= prev.first_qubit() - prev.width()
        });
        if nested {
            let prev = out.pop().expect("nested implies a predecessor");
            let (GateKind::Unitary(big), GateKind::Unitary(small)) = (prev.kind(), gate.kind())
            else {
                unreachable!()
            };
            // embed the nested gate at its offset inside the larger support
            let above = 1usize << (prev.first_qubit() - gate.first_qubit());
            let below = 1usize
                << ((gate.first_qubit() - gate.width()) - (prev.first_qubit() - prev.width()));
            let embedded = DMatrix::identity(above, above)
                .kronecker(small)
                .kronecker(&DMatrix::identity(below, below));
            let composed = embedded * big;
            out.push(
                GateOp::unitary_unchecked(prev.first_qubit(), composed, GateOrigin::Merged)
                    .expect("composed gate keeps the larger support"),
            );
        } else {
            out.push(gate.clone());
        }
    }
    CircuitPlan::new(plan.num_qubits(), out, plan.normalizer())
        .expect("merging preserves plan validity")
}

/// Exact Grover-Rudolph-style preparation of a one-variable distribution:
/// level `k` rotates qubit `k` by angles conditioned on the measured prefix,
/// one rotation node per prefix, `2^q - 1` nodes in total.
pub fn grover_rudolph_baseline(dd: &DiscreteDistribution) -> Result<CircuitPlan, CircuitError> {
    if dd.dims() != 1 {
        return Err(CircuitError::InvalidInput(format!(
            "baseline is univariate, distribution has {} variables",
            dd.dims()
        )));
    }
    let q = dd.grid().qubits_per_dim();
    let probs = dd
        .materialize_probs(crate::quantize::EAGER_NORM_CAP)
        .map_err(|e| CircuitError::InvalidInput(format!("cannot materialize target: {e}")))?;

    // layers[t][p] = probability of the length-t prefix p
    let mut layers: Vec<Vec<f64>> = vec![probs];
    while layers.last().map(Vec::len) != Some(1) {
        let prev = layers.last().expect("non-empty");
        let next: Vec<f64> = prev.chunks_exact(2).map(|pair| pair[0] + pair[1]).collect();
        layers.push(next);
    }
    layers.reverse();

    let mut gates = Vec::with_capacity(q);
    for k in 1..=q {
        let parents = &layers[k - 1];
        let children = &layers[k];
        let mut angles = vec![0.0; 1 << (k - 1)];
        for (pfx, &parent) in parents.iter().enumerate() {
            if parent > 0.0 {
                let ratio = (children[2 * pfx] / parent).clamp(0.0, 1.0);
                angles[reverse_bits(pfx, k - 1)] = 2.0 * libm::acos(libm::sqrt(ratio));
            }
        }
        gates.push(GateOp::multiplexed_ry(k, angles, GateOrigin::BaselineLevel(k))?);
    }
    CircuitPlan::new(q, gates, 1.0)
}

/// Size accounting for benchmark tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthReport {
    /// Rotation-node count (matches `CircuitPlan::total_gate_count`).
    pub gate_count: usize,
    pub depth: usize,
    pub max_gate_width: usize,
    /// `sum over gates of 4^width`: a crude exhaustive two-level-decomposition
    /// bound, used only to compare scaling shapes across methods.
    pub two_level_decomposed_depth_estimate: f64,
}

pub fn depth_report(plan: &CircuitPlan) -> DepthReport {
    let estimate = plan
        .gates()
        .iter()
        .map(|g| (1u128 << (2 * g.width())) as f64)
        .sum();
    DepthReport {
        gate_count: plan.total_gate_count(),
        depth: plan.depth(),
        max_gate_width: plan.gates().iter().map(GateOp::width).max().unwrap_or(0),
        two_level_decomposed_depth_estimate: estimate,
    }
}
