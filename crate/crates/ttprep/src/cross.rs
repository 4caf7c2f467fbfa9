//! TT-cross interpolation: learn a tensor train from a black-box function
//! by sampling crosses of rows and columns chosen with maxvol.
//!
//! The sweep schedule is DMRG-style: a left-to-right half-sweep rebuilds the
//! left (prefix) index sets, a right-to-left half-sweep rebuilds the right
//! (suffix) sets, and both sides stay nested by construction. Ranks grow by
//! appending random nested candidates before each pivot selection and shrink
//! automatically when a cross block is numerically rank-deficient.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg;
use crate::tensor::{tt_eval, TTCore, TensorTrain};

/// Dominance threshold used for internal pivot searches.
pub const MAXVOL_SWAP_TOL: f64 = 1.01;
const MAXVOL_MAX_SWAPS: usize = 200;
const RANK_DETECT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, thiserror::Error)]
pub enum CrossError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("rank deficient matrix: numerical rank {detected_rank}")]
    RankDeficient { detected_rank: usize },
    #[error("function returned a non-finite value at index {index:?}")]
    NonFiniteValue { index: Vec<usize> },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<crate::tensor::TTError> for CrossError {
    fn from(e: crate::tensor::TTError) -> Self {
        CrossError::Numerical(format!("{e}"))
    }
}

#[derive(Debug, Clone)]
pub struct CrossConfig {
    pub max_rank: usize,
    /// Validation-error target; the run stops early once reached.
    pub rel_tol: f64,
    pub max_sweeps: usize,
    /// Random nested candidates appended per bond per half-sweep.
    pub rank_increment: usize,
    pub rng_seed: u64,
    pub validation_samples: usize,
}

impl Default for CrossConfig {
    fn default() -> Self {
        Self {
            max_rank: 16,
            rel_tol: 1e-10,
            max_sweeps: 10,
            rank_increment: 4,
            rng_seed: 0,
            validation_samples: 512,
        }
    }
}

impl CrossConfig {
    fn validate(&self) -> Result<(), CrossError> {
        if self.max_rank == 0 {
            return Err(CrossError::InvalidInput(String::from("max_rank must be >= 1")));
        }
        if self.max_sweeps == 0 {
            return Err(CrossError::InvalidInput(String::from("max_sweeps must be >= 1")));
        }
        if self.validation_samples == 0 {
            return Err(CrossError::InvalidInput(String::from(
                "validation_samples must be >= 1",
            )));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(CrossError::InvalidInput(String::from("rel_tol must be >= 0")));
        }
        Ok(())
    }
}

/// The left-nested prefix sets and right-nested suffix sets of a finished run,
/// one entry per internal bond.
#[derive(Debug, Clone)]
pub struct IndexSets {
    left: Vec<Vec<Vec<usize>>>,
    right: Vec<Vec<Vec<usize>>>,
}

impl IndexSets {
    pub fn left_sets(&self) -> &[Vec<Vec<usize>>] {
        &self.left
    }

    pub fn right_sets(&self) -> &[Vec<Vec<usize>>] {
        &self.right
    }

    /// Structural nesting check: every prefix extends a prefix one bond to the
    /// left, every suffix extends a suffix one bond to the right.
    pub fn check_nesting(&self) -> bool {
        let bonds = self.left.len();
        for b in 1..bonds {
            for p in &self.left[b] {
                if !self.left[b - 1].iter().any(|q| q[..] == p[..b]) {
                    return false;
                }
            }
        }
        for b in 0..bonds.saturating_sub(1) {
            for s in &self.right[b] {
                if !self.right[b + 1].iter().any(|t| t[..] == s[1..]) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
pub struct CrossReport {
    pub sweeps_run: usize,
    pub function_evaluations: u64,
    /// Max deviation over the validation samples, relative to the largest
    /// sampled |f|; well-defined even when the function has exact zeros.
    pub final_validation_error: f64,
    pub converged: bool,
    pub index_sets: IndexSets,
}

/// Transparent call-counting wrapper for evaluation callbacks.
pub struct EvalCounter<F> {
    f: F,
    calls: Cell<u64>,
}

impl<F: Fn(&[usize]) -> f64> EvalCounter<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            calls: Cell::new(0),
        }
    }

    pub fn call(&self, idx: &[usize]) -> f64 {
        self.calls.set(self.calls.get() + 1);
        (self.f)(idx)
    }

    pub fn count(&self) -> u64 {
        self.calls.get()
    }
}

/// Classical maxvol: greedy pivoted start, then single-row swaps until every
/// entry of `M·M[S]^{-1}` is at most `swap_tol` (or the swap cap is hit).
/// Ties during the swap search go to the lowest row index.
pub fn maxvol(m: &DMatrix<f64>, swap_tol: f64) -> Result<Vec<usize>, CrossError> {
    let (n, r) = m.shape();
    if r == 0 || n < r {
        return Err(CrossError::InvalidInput(format!(
            "maxvol wants n >= r >= 1, got {n}x{r}"
        )));
    }
    if !(swap_tol >= 1.0) {
        return Err(CrossError::InvalidInput(String::from("swap_tol must be >= 1")));
    }
    let mut rows = linalg::pivot_rows(m, RANK_DETECT_TOL)
        .map_err(|detected_rank| CrossError::RankDeficient { detected_rank })?;
    if n == r {
        rows.sort_unstable();
        return Ok(rows);
    }
    for _ in 0..MAXVOL_MAX_SWAPS {
        let sub = DMatrix::from_fn(r, r, |i, j| m[(rows[i], j)]);
        let b = linalg::right_solve(m, &sub)
            .ok_or_else(|| CrossError::Numerical(String::from("singular maxvol block")))?;
        let mut best = swap_tol;
        let mut swap = None;
        for i in 0..n {
            for j in 0..r {
                let v = b[(i, j)].abs();
                if v > best {
                    best = v;
                    swap = Some((i, j));
                }
            }
        }
        match swap {
            Some((i, j)) => rows[j] = i,
            None => break,
        }
    }
    Ok(rows)
}

struct Counted<'a, F> {
    f: &'a mut F,
    evals: u64,
}

impl<F: FnMut(&[usize]) -> f64> Counted<'_, F> {
    fn eval(&mut self, idx: &[usize]) -> Result<f64, CrossError> {
        self.evals += 1;
        let v = (self.f)(idx);
        if !v.is_finite() {
            return Err(CrossError::NonFiniteValue {
                index: idx.to_vec(),
            });
        }
        Ok(v)
    }

    fn eval_cross(
        &mut self,
        rows: &[Vec<usize>],
        cols: &[Vec<usize>],
    ) -> Result<DMatrix<f64>, CrossError> {
        let mut buf = Vec::with_capacity(rows.len() * cols.len());
        let mut idx = Vec::new();
        for p in rows {
            for s in cols {
                idx.clear();
                idx.extend_from_slice(p);
                idx.extend_from_slice(s);
                buf.push(self.eval(&idx)?);
            }
        }
        Ok(DMatrix::from_row_slice(rows.len(), cols.len(), &buf))
    }
}

fn draw(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn gather(items: &[Vec<usize>], picks: &[usize]) -> Vec<Vec<usize>> {
    picks.iter().map(|&i| items[i].clone()).collect()
}

fn row_candidates(prev: &[Vec<usize>], mode: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(prev.len() * mode);
    for p in prev {
        for i in 0..mode {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.extend_from_slice(p);
            q.push(i);
            out.push(q);
        }
    }
    out
}

fn col_candidates(mode: usize, deeper: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(mode * deeper.len());
    for i in 0..mode {
        for t in deeper {
            let mut s = Vec::with_capacity(t.len() + 1);
            s.push(i);
            s.extend_from_slice(t);
            out.push(s);
        }
    }
    out
}

/// Append up to `inc` random nested candidates (drawn as one mode value plus
/// one element of the deeper set) that are not already present.
fn enrich_suffixes(
    existing: &[Vec<usize>],
    mode: usize,
    deeper: &[Vec<usize>],
    inc: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut out = existing.to_vec();
    if inc == 0 {
        return out;
    }
    let mut seen: BTreeSet<Vec<usize>> = existing.iter().cloned().collect();
    let pool = mode * deeper.len();
    let mut added = 0;
    let mut attempts = 0;
    while added < inc && out.len() < pool && attempts < 8 * inc + 16 {
        attempts += 1;
        let mut cand = Vec::new();
        cand.push(draw(rng, mode));
        cand.extend_from_slice(&deeper[draw(rng, deeper.len())]);
        if seen.insert(cand.clone()) {
            out.push(cand);
            added += 1;
        }
    }
    out
}

fn enrich_prefixes(
    existing: &[Vec<usize>],
    prev: &[Vec<usize>],
    mode: usize,
    inc: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut out = existing.to_vec();
    if inc == 0 {
        return out;
    }
    let mut seen: BTreeSet<Vec<usize>> = existing.iter().cloned().collect();
    let pool = mode * prev.len();
    let mut added = 0;
    let mut attempts = 0;
    while added < inc && out.len() < pool && attempts < 8 * inc + 16 {
        attempts += 1;
        let mut cand = prev[draw(rng, prev.len())].clone();
        cand.push(draw(rng, mode));
        if seen.insert(cand.clone()) {
            out.push(cand);
            added += 1;
        }
    }
    out
}

/// Numerical rank (capped at `max_rank`) plus maxvol row and column pivots of
/// the dominant subspaces. `None` for an all-zero block.
fn rank_pivots(
    b: &DMatrix<f64>,
    max_rank: usize,
) -> Result<Option<(usize, Vec<usize>, Vec<usize>)>, CrossError> {
    let (u, s, vt) = linalg::svd_thin(b)
        .ok_or_else(|| CrossError::Numerical(String::from("cross block svd")))?;
    let rank = linalg::rank_from_singulars(&s, RANK_DETECT_TOL).min(max_rank);
    if rank == 0 {
        return Ok(None);
    }
    let rows = maxvol(&u.columns(0, rank).into_owned(), MAXVOL_SWAP_TOL)?;
    let cols = maxvol(&vt.rows(0, rank).transpose(), MAXVOL_SWAP_TOL)?;
    Ok(Some((rank, rows, cols)))
}

/// `M·A^{-1}` with an SVD pseudo-inverse fallback for singular pivot blocks.
fn interpolate(m: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<DMatrix<f64>, CrossError> {
    if let Some(x) = linalg::right_solve(m, a) {
        if x.iter().all(|v| v.is_finite()) {
            return Ok(x);
        }
    }
    let (u, s, vt) = linalg::svd_thin(a)
        .ok_or_else(|| CrossError::Numerical(String::from("pivot block svd")))?;
    let cutoff = s.iter().fold(0.0f64, |acc, &v| acc.max(v)) * 1e-14;
    // A^+ = V diag(1/sigma) U^T, built by scaling the rows of U^T
    let mut ut = u.transpose();
    for (i, &sv) in s.iter().enumerate() {
        let f = if sv > cutoff { 1.0 / sv } else { 0.0 };
        ut.row_mut(i).scale_mut(f);
    }
    Ok(m * (vt.transpose() * ut))
}

struct Sets {
    left: Vec<Vec<Vec<usize>>>,
    right: Vec<Vec<Vec<usize>>>,
}

impl Sets {
    fn left_of(&self, core: usize) -> Vec<Vec<usize>> {
        if core == 0 {
            vec![Vec::new()]
        } else {
            self.left[core - 1].clone()
        }
    }

    fn right_of(&self, core: usize, d: usize) -> Vec<Vec<usize>> {
        if core + 1 == d {
            vec![Vec::new()]
        } else {
            self.right[core].clone()
        }
    }
}

/// Build interpolant cores from the final sets. `stored[b]`, when present and
/// shape-consistent, holds the right-to-left cross block at bond `b` (rows:
/// left set of bond b, columns: mode x right set of bond b+1) and saves the
/// re-evaluation.
fn build_cores<F: FnMut(&[usize]) -> f64>(
    c: &mut Counted<'_, F>,
    shape: &[usize],
    sets: &Sets,
    stored: &[Option<DMatrix<f64>>],
) -> Result<TensorTrain, CrossError> {
    let d = shape.len();
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let lefts = sets.left_of(k);
        let rights = sets.right_of(k, d);
        let n = shape[k];
        let (l, r) = (lefts.len(), rights.len());
        let bmat = match k.checked_sub(1).and_then(|b| stored[b].as_ref()) {
            Some(m) if m.nrows() == l && m.ncols() == n * r => {
                // reshape (l) x (n·r) rows-of-prefixes into (l·n) x r
                DMatrix::from_fn(l * n, r, |row, t| m[(row / n, (row % n) * r + t)])
            }
            _ => c.eval_cross(&row_candidates(&lefts, n), &rights)?,
        };
        if k == d - 1 {
            cores.push(TTCore::new(l, n, 1, crate::tensor::matrix_row_major(&bmat))?);
            continue;
        }
        // pivot block: rows of bmat at the bond-k left set
        let picks = &sets.left[k];
        let mut bhat = DMatrix::zeros(picks.len(), r);
        for (j, pref) in picks.iter().enumerate() {
            let head = &pref[..pref.len() - 1];
            let x = pref[pref.len() - 1];
            match lefts.iter().position(|p| p[..] == head[..]) {
                Some(pos) => {
                    for t in 0..r {
                        bhat[(j, t)] = bmat[(pos * n + x, t)];
                    }
                }
                None => {
                    // orphaned prefix after a late rank reduction: evaluate directly
                    let mut idx = pref.clone();
                    for (t, suf) in rights.iter().enumerate() {
                        idx.truncate(pref.len());
                        idx.extend_from_slice(suf);
                        bhat[(j, t)] = c.eval(&idx)?;
                    }
                }
            }
        }
        let g = interpolate(&bmat, &bhat)?;
        cores.push(TTCore::new(l, n, g.ncols(), crate::tensor::matrix_row_major(&g))?);
    }
    Ok(TensorTrain::new(cores)?)
}

/// Learn a tensor train for `f` over the grid `shape`.
pub fn tt_cross<F>(
    mut f: F,
    shape: &[usize],
    cfg: &CrossConfig,
) -> Result<(TensorTrain, CrossReport), CrossError>
where
    F: FnMut(&[usize]) -> f64,
{
    cfg.validate()?;
    if shape.is_empty() {
        return Err(CrossError::InvalidInput(String::from("empty shape")));
    }
    if shape.iter().any(|&n| n < 2) {
        return Err(CrossError::InvalidInput(String::from(
            "every mode size must be >= 2",
        )));
    }
    let d = shape.len();
    let mut c = Counted { f: &mut f, evals: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let val_idx: Vec<Vec<usize>> = (0..cfg.validation_samples)
        .map(|_| shape.iter().map(|&n| draw(&mut rng, n)).collect())
        .collect();
    let mut val_vals = Vec::with_capacity(val_idx.len());
    for idx in &val_idx {
        val_vals.push(c.eval(idx)?);
    }
    let scale = val_vals
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    let validate = |tt: &TensorTrain| -> f64 {
        val_idx
            .iter()
            .zip(&val_vals)
            .map(|(idx, &want)| {
                let got = tt_eval(tt, idx).expect("validation index in range");
                (got - want).abs() / scale
            })
            .fold(0.0, f64::max)
    };

    if d == 1 {
        let mut data = Vec::with_capacity(shape[0]);
        for i in 0..shape[0] {
            data.push(c.eval(&[i])?);
        }
        let tt = TensorTrain::new(vec![TTCore::new(1, shape[0], 1, data)?])?;
        let err = validate(&tt);
        let report = CrossReport {
            sweeps_run: 1,
            function_evaluations: c.evals,
            final_validation_error: err,
            converged: err <= cfg.rel_tol,
            index_sets: IndexSets {
                left: Vec::new(),
                right: Vec::new(),
            },
        };
        return Ok((tt, report));
    }

    // one random full index seeds nested singleton suffix sets
    let seed_idx: Vec<usize> = shape.iter().map(|&n| draw(&mut rng, n)).collect();
    let mut sets = Sets {
        left: vec![Vec::new(); d - 1],
        right: (0..d - 1).map(|b| vec![seed_idx[b + 1..].to_vec()]).collect(),
    };

    let mut sweeps_run = 0;
    let mut err = f64::INFINITY;
    let mut converged = false;
    let mut result: Option<TensorTrain> = None;

    for _ in 0..cfg.max_sweeps {
        // left-to-right: rebuild prefix sets against (enriched) suffix sets
        for b in 0..d - 1 {
            let rows = row_candidates(&sets.left_of(b), shape[b]);
            let deeper = sets.right_of(b + 1, d);
            let cols = enrich_suffixes(
                &sets.right[b],
                shape[b + 1],
                &deeper,
                cfg.rank_increment,
                &mut rng,
            );
            let bmat = c.eval_cross(&rows, &cols)?;
            match rank_pivots(&bmat, cfg.max_rank)? {
                Some((_, rp, cp)) => {
                    sets.left[b] = gather(&rows, &rp);
                    sets.right[b] = gather(&cols, &cp);
                }
                None => {
                    sets.left[b] = vec![rows[0].clone()];
                    sets.right[b] = vec![cols[0].clone()];
                }
            }
        }
        // right-to-left: rebuild suffix sets against (enriched) prefix sets,
        // keeping each cross block for the core construction afterwards
        let mut stored: Vec<Option<DMatrix<f64>>> = vec![None; d - 1];
        for b in (0..d - 1).rev() {
            let cols = col_candidates(shape[b + 1], &sets.right_of(b + 1, d));
            let rows = enrich_prefixes(
                &sets.left[b],
                &sets.left_of(b),
                shape[b],
                cfg.rank_increment,
                &mut rng,
            );
            let bmat = c.eval_cross(&rows, &cols)?;
            match rank_pivots(&bmat, cfg.max_rank)? {
                Some((rank, rp, cp)) => {
                    sets.left[b] = gather(&rows, &rp);
                    sets.right[b] = gather(&cols, &cp);
                    let kept = DMatrix::from_fn(rank, cols.len(), |i, j| bmat[(rp[i], j)]);
                    stored[b] = Some(kept);
                }
                None => {
                    sets.left[b] = vec![rows[0].clone()];
                    sets.right[b] = vec![cols[0].clone()];
                    stored[b] = Some(DMatrix::from_fn(1, cols.len(), |_, j| bmat[(0, j)]));
                }
            }
        }
        sweeps_run += 1;
        let tt = build_cores(&mut c, shape, &sets, &stored)?;
        err = validate(&tt);
        result = Some(tt);
        if err <= cfg.rel_tol {
            converged = true;
            break;
        }
    }

    let tt = result.expect("max_sweeps >= 1 ran at least one sweep");
    let report = CrossReport {
        sweeps_run,
        function_evaluations: c.evals,
        final_validation_error: err,
        converged,
        index_sets: IndexSets {
            left: sets.left,
            right: sets.right,
        },
    };
    Ok((tt, report))
}
