//! Tensor-train cores and the operations the rest of the crate builds on:
//! evaluation, dense materialization, TT-SVD construction, rounding, and
//! the power-of-two rank padding required by the circuit compiler.
//!
//! A train of length `d` represents `A(i_1,...,i_d) = G_1[i_1] G_2[i_2] ... G_d[i_d]`
//! where `G_k[i]` is the `r_{k-1} x r_k` slice of core `k` and the boundary
//! ranks are one. Core data is stored row-major with axes (left, mode, right).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::linalg;

/// Default refusal threshold for dense materialization.
pub const DENSE_CAP_DEFAULT: usize = 1 << 20;

#[derive(Debug, Clone, thiserror::Error)]
pub enum TTError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid ranks: {0}")]
    InvalidRanks(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("tensor too large: {0}")]
    SizeOverCap(String),
    #[error("svd failed: {0}")]
    SvdFailure(String),
}

/// Row-major dense tensor, used as the small-instance oracle format.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TTError> {
        if shape.is_empty() {
            return Err(TTError::InvalidShape(String::from("empty shape")));
        }
        let mut len = 1usize;
        for &n in &shape {
            if n == 0 {
                return Err(TTError::InvalidShape(String::from("zero mode size")));
            }
            len = len
                .checked_mul(n)
                .ok_or_else(|| TTError::InvalidShape(String::from("size overflow")))?;
        }
        if len != data.len() {
            return Err(TTError::InvalidShape(format!(
                "shape wants {len} entries, data has {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major flat offset of a multi-index. Panics on a malformed index;
    /// fallible lookups belong on the TT side (`tt_eval`).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.len(), "index length mismatch");
        let mut flat = 0usize;
        for (k, &i) in idx.iter().enumerate() {
            assert!(i < self.shape[k], "index {i} out of range at axis {k}");
            flat = flat * self.shape[k] + i;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }
}

/// One TT-core with axes (left, mode, right), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TTCore {
    left_rank: usize,
    mode: usize,
    right_rank: usize,
    data: Vec<f64>,
}

impl TTCore {
    pub fn new(
        left_rank: usize,
        mode: usize,
        right_rank: usize,
        data: Vec<f64>,
    ) -> Result<Self, TTError> {
        if left_rank == 0 || mode == 0 || right_rank == 0 {
            return Err(TTError::InvalidRanks(String::from("zero core dimension")));
        }
        if data.len() != left_rank * mode * right_rank {
            return Err(TTError::InvalidShape(format!(
                "core ({left_rank},{mode},{right_rank}) wants {} entries, data has {}",
                left_rank * mode * right_rank,
                data.len()
            )));
        }
        Ok(Self {
            left_rank,
            mode,
            right_rank,
            data,
        })
    }

    pub fn zeros(left_rank: usize, mode: usize, right_rank: usize) -> Self {
        Self {
            left_rank,
            mode,
            right_rank,
            data: vec![0.0; left_rank * mode * right_rank],
        }
    }

    pub fn left_rank(&self) -> usize {
        self.left_rank
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn right_rank(&self) -> usize {
        self.right_rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[(a * self.mode + i) * self.right_rank + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, i: usize, b: usize, value: f64) {
        self.data[(a * self.mode + i) * self.right_rank + b] = value;
    }

    /// (left·mode) × right matrix; coincides with the raw data seen row-major.
    pub(crate) fn left_unfolding(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left_rank * self.mode, self.right_rank, &self.data)
    }

    /// left × (mode·right) matrix; also the raw data seen row-major.
    pub(crate) fn right_unfolding(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left_rank, self.mode * self.right_rank, &self.data)
    }

    pub(crate) fn from_left_unfolding(m: &DMatrix<f64>, left: usize, mode: usize) -> Self {
        debug_assert_eq!(m.nrows(), left * mode);
        Self {
            left_rank: left,
            mode,
            right_rank: m.ncols(),
            data: matrix_row_major(m),
        }
    }

    pub(crate) fn from_right_unfolding(m: &DMatrix<f64>, mode: usize, right: usize) -> Self {
        debug_assert_eq!(m.ncols(), mode * right);
        Self {
            left_rank: m.nrows(),
            mode,
            right_rank: right,
            data: matrix_row_major(m),
        }
    }
}

pub(crate) fn matrix_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Contract a matrix into the right bond: (l,n,r)·(r×s) -> (l,n,s).
pub(crate) fn contract_right(core: &TTCore, m: &DMatrix<f64>) -> TTCore {
    let a = core.left_unfolding() * m;
    TTCore::from_left_unfolding(&a, core.left_rank, core.mode)
}

/// Contract a matrix into the left bond: (s×l)·(l,n,r) -> (s,n,r).
pub(crate) fn contract_left(m: &DMatrix<f64>, core: &TTCore) -> TTCore {
    let a = m * core.right_unfolding();
    TTCore::from_right_unfolding(&a, core.mode, core.right_rank)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorTrain {
    cores: Vec<TTCore>,
}

impl TensorTrain {
    pub fn new(cores: Vec<TTCore>) -> Result<Self, TTError> {
        if cores.is_empty() {
            return Err(TTError::InvalidRanks(String::from("empty train")));
        }
        if cores[0].left_rank != 1 || cores[cores.len() - 1].right_rank != 1 {
            return Err(TTError::InvalidRanks(String::from(
                "boundary ranks must be one",
            )));
        }
        for k in 0..cores.len() - 1 {
            if cores[k].right_rank != cores[k + 1].left_rank {
                return Err(TTError::InvalidRanks(format!(
                    "rank chain broken at bond {}: {} vs {}",
                    k + 1,
                    cores[k].right_rank,
                    cores[k + 1].left_rank
                )));
            }
        }
        Ok(Self { cores })
    }

    pub fn cores(&self) -> &[TTCore] {
        &self.cores
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.mode).collect()
    }

    /// All d+1 bond ranks including the unit boundaries.
    pub fn ranks(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cores.len() + 1);
        out.push(1);
        for c in &self.cores {
            out.push(c.right_rank);
        }
        out
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    /// True when every mode size is 2 (the quantics case the compiler needs).
    pub fn is_quantics(&self) -> bool {
        self.cores.iter().all(|c| c.mode == 2)
    }
}

fn check_index(tt: &TensorTrain, idx: &[usize]) -> Result<(), TTError> {
    if idx.len() != tt.len() {
        return Err(TTError::IndexOutOfRange(format!(
            "index length {} for a train of length {}",
            idx.len(),
            tt.len()
        )));
    }
    for (k, (&i, core)) in idx.iter().zip(tt.cores()).enumerate() {
        if i >= core.mode {
            return Err(TTError::IndexOutOfRange(format!(
                "index {i} at axis {k} with mode size {}",
                core.mode
            )));
        }
    }
    Ok(())
}

/// Evaluate one entry: row vector through the core slices, left to right.
pub fn tt_eval(tt: &TensorTrain, idx: &[usize]) -> Result<f64, TTError> {
    check_index(tt, idx)?;
    let first = &tt.cores[0];
    let mut v: Vec<f64> = (0..first.right_rank)
        .map(|b| first.get(0, idx[0], b))
        .collect();
    for (core, &i) in tt.cores[1..].iter().zip(&idx[1..]) {
        let mut next = vec![0.0; core.right_rank];
        for (c, slot) in next.iter_mut().enumerate() {
            let mut s = 0.0;
            for (b, &vb) in v.iter().enumerate() {
                s += vb * core.get(b, i, c);
            }
            *slot = s;
        }
        v = next;
    }
    Ok(v[0])
}

/// Materialize the full tensor. The contraction below mirrors `tt_eval`
/// operation for operation (same accumulation order), so the two agree
/// exactly, not just to roundoff.
pub fn tt_to_dense(tt: &TensorTrain, cap: usize) -> Result<DenseTensor, TTError> {
    let mut size = 1usize;
    for core in tt.cores() {
        size = size
            .checked_mul(core.mode)
            .ok_or_else(|| TTError::SizeOverCap(String::from("size overflow")))?;
        if size > cap {
            return Err(TTError::SizeOverCap(format!(
                "dense size exceeds cap {cap}"
            )));
        }
    }
    let first = &tt.cores[0];
    // acc holds prefix_count x r_k values, row-major.
    let mut acc: Vec<f64> = first.data.clone();
    let mut rank = first.right_rank;
    for core in &tt.cores[1..] {
        let prefixes = acc.len() / rank;
        let mut next = vec![0.0; prefixes * core.mode * core.right_rank];
        for p in 0..prefixes {
            let row = &acc[p * rank..(p + 1) * rank];
            for i in 0..core.mode {
                for c in 0..core.right_rank {
                    let mut s = 0.0;
                    for (b, &vb) in row.iter().enumerate() {
                        s += vb * core.get(b, i, c);
                    }
                    next[(p * core.mode + i) * core.right_rank + c] = s;
                }
            }
        }
        acc = next;
        rank = core.right_rank;
    }
    DenseTensor::new(tt.mode_sizes(), acc)
}

/// Smallest kept rank whose discarded tail satisfies sum of squares <= delta^2.
fn truncation_rank(s: &DVector<f64>, delta: f64) -> usize {
    let budget = delta * delta;
    let mut tail = 0.0;
    let mut rank = s.len();
    while rank > 0 {
        let t = tail + s[rank - 1] * s[rank - 1];
        if t > budget {
            break;
        }
        tail = t;
        rank -= 1;
    }
    rank
}

/// TT-SVD of a dense tensor. The truncation budget `rel_tol * ||A||_F`
/// is split evenly across the d-1 bonds.
pub fn tt_from_dense(
    dense: &DenseTensor,
    rel_tol: f64,
    max_rank: usize,
) -> Result<TensorTrain, TTError> {
    if max_rank == 0 {
        return Err(TTError::InvalidRanks(String::from("max_rank must be >= 1")));
    }
    let shape = dense.shape();
    let d = shape.len();
    if d == 1 {
        let core = TTCore::new(1, shape[0], 1, dense.data().to_vec())?;
        return TensorTrain::new(vec![core]);
    }
    let delta = rel_tol * dense.frobenius_norm() / libm::sqrt((d - 1) as f64);
    let mut cores = Vec::with_capacity(d);
    let mut carry: Vec<f64> = dense.data().to_vec();
    let mut r_prev = 1usize;
    let mut rest: usize = dense.len();
    for &n in &shape[..d - 1] {
        rest /= n;
        let m = DMatrix::from_row_slice(r_prev * n, rest, &carry);
        let (u, s, vt) = linalg::svd_thin(&m)
            .ok_or_else(|| TTError::SvdFailure(String::from("unfolding svd")))?;
        let rank = truncation_rank(&s, delta).clamp(1, max_rank.min(s.len()));
        cores.push(TTCore::from_left_unfolding(
            &u.columns(0, rank).into_owned(),
            r_prev,
            n,
        ));
        let mut scaled = vt.rows(0, rank).into_owned();
        for r in 0..rank {
            scaled.row_mut(r).scale_mut(s[r]);
        }
        carry = matrix_row_major(&scaled);
        r_prev = rank;
    }
    cores.push(TTCore::new(r_prev, shape[d - 1], 1, carry)?);
    TensorTrain::new(cores)
}

/// SVD rounding: right-to-left QR orthogonalization, then a left-to-right
/// truncation sweep with the Frobenius budget split across bonds.
pub fn tt_round(tt: &TensorTrain, rel_tol: f64, max_rank: usize) -> Result<TensorTrain, TTError> {
    if max_rank == 0 {
        return Err(TTError::InvalidRanks(String::from("max_rank must be >= 1")));
    }
    let d = tt.len();
    if d == 1 {
        return Ok(tt.clone());
    }
    let mut cores: Vec<TTCore> = tt.cores().to_vec();
    for k in (1..d).rev() {
        let m = cores[k].right_unfolding();
        let (l_mat, q) = linalg::lq_thin(&m);
        cores[k] = TTCore::from_right_unfolding(&q, cores[k].mode, cores[k].right_rank);
        cores[k - 1] = contract_right(&cores[k - 1], &l_mat);
    }
    // With everything to the right orthogonal, the first core carries the norm.
    let norm = libm::sqrt(cores[0].data.iter().map(|x| x * x).sum());
    let delta = rel_tol * norm / libm::sqrt((d - 1) as f64);
    for k in 0..d - 1 {
        let m = cores[k].left_unfolding();
        let (u, s, vt) = linalg::svd_thin(&m)
            .ok_or_else(|| TTError::SvdFailure(String::from("rounding svd")))?;
        let rank = truncation_rank(&s, delta).clamp(1, max_rank.min(s.len()));
        cores[k] = TTCore::from_left_unfolding(
            &u.columns(0, rank).into_owned(),
            cores[k].left_rank,
            cores[k].mode,
        );
        let mut carry = vt.rows(0, rank).into_owned();
        for r in 0..rank {
            carry.row_mut(r).scale_mut(s[r]);
        }
        cores[k + 1] = contract_left(&carry, &cores[k + 1]);
    }
    TensorTrain::new(cores)
}

/// Pad every internal rank up to the next power of two with exact zeros.
///
/// On quantics trains (all modes 2) the padded profile additionally satisfies
/// r_k <= 2 r_{k-1} and r_k <= 2 r_{k+1}, which the gate construction needs.
/// Bonds sitting above those structural caps are first reduced by exact QR/LQ
/// factorizations; such bonds are redundant by construction (a core with
/// l*n < r cannot carry more than l*n independent columns), so evaluated
/// values are preserved.
pub fn pad_ranks_pow2(tt: &TensorTrain) -> TensorTrain {
    let d = tt.len();
    if d == 1 {
        return tt.clone();
    }
    let mut cores: Vec<TTCore> = tt.cores().to_vec();
    let quantics = tt.is_quantics();
    if quantics {
        for k in 0..d - 1 {
            let (l, n, r) = (cores[k].left_rank, cores[k].mode, cores[k].right_rank);
            if r > l * n {
                let (q, r_mat) = linalg::qr_thin(&cores[k].left_unfolding());
                cores[k] = TTCore::from_left_unfolding(&q, l, n);
                cores[k + 1] = contract_left(&r_mat, &cores[k + 1]);
            }
        }
        for k in (1..d).rev() {
            let (l, n, r) = (cores[k].left_rank, cores[k].mode, cores[k].right_rank);
            if l > n * r {
                let (l_mat, q) = linalg::lq_thin(&cores[k].right_unfolding());
                cores[k] = TTCore::from_right_unfolding(&q, n, r);
                cores[k - 1] = contract_right(&cores[k - 1], &l_mat);
            }
        }
    }
    let bonds = d - 1;
    let mut targets: Vec<usize> = (0..bonds)
        .map(|k| cores[k].right_rank.next_power_of_two())
        .collect();
    if quantics {
        for k in 0..bonds {
            let left = if k == 0 { 1 } else { targets[k - 1] };
            targets[k] = targets[k].min(2 * left);
        }
        for k in (0..bonds).rev() {
            let right = if k + 1 == bonds { 1 } else { targets[k + 1] };
            targets[k] = targets[k].min(2 * right);
        }
    }
    for k in 0..d {
        let want_left = if k == 0 { 1 } else { targets[k - 1] };
        let want_right = if k == d - 1 { 1 } else { targets[k] };
        let core = &cores[k];
        if core.left_rank == want_left && core.right_rank == want_right {
            continue;
        }
        let mut padded = TTCore::zeros(want_left, core.mode, want_right);
        for a in 0..core.left_rank {
            for i in 0..core.mode {
                for b in 0..core.right_rank {
                    padded.set(a, i, b, core.get(a, i, b));
                }
            }
        }
        cores[k] = padded;
    }
    TensorTrain::new(cores).expect("padding preserves rank chaining")
}
