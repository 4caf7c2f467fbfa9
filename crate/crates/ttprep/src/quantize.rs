//! Discretization of continuous densities onto dyadic grids.
//!
//! Each variable lives on `2^q` uniformly spaced points between its bounds
//! (endpoints included), so a `dims`-variable problem occupies `dims * q`
//! qubits. An [`OrderingMap`] decides which qubit carries which significance
//! bit of which variable; the discrete probabilities themselves never depend
//! on the ordering, only their position in the register does.
//!
//! Probabilities are the pointwise density values divided by the discrete
//! grid sum, not by an integral. Grids above [`EAGER_NORM_CAP`] points skip
//! that sum; their amplitudes stay unnormalized and downstream compilation
//! absorbs the missing scale into the circuit normalizer.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::bits;

/// Largest grid (total points) normalized by exhaustive summation.
pub const EAGER_NORM_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, thiserror::Error)]
pub enum QuantizeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unsupported ordering scheme: {0}")]
    UnsupportedScheme(String),
    #[error("density invalid at grid index {index:?}: {value}")]
    InvalidDensity { index: Vec<usize>, value: f64 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("grid too large: {0}")]
    SizeOverCap(String),
}

/// Uniform dyadic grid: per-variable bounds, one shared qubit count.
///
/// Point `i` of variable `v` is `lower_v + i * (upper_v - lower_v) / (2^q - 1)`,
/// so both endpoints are grid points. Unequal qubit counts per variable are
/// not supported; reshaping the register mid-train buys nothing here.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    bounds: Vec<(f64, f64)>,
    qubits: usize,
}

impl GridSpec {
    pub fn new(bounds: Vec<(f64, f64)>, qubits_per_dim: usize) -> Result<Self, QuantizeError> {
        if bounds.is_empty() {
            return Err(QuantizeError::InvalidGrid("no variables".into()));
        }
        if qubits_per_dim == 0 {
            return Err(QuantizeError::InvalidGrid("zero qubits per variable".into()));
        }
        if bounds.len() * qubits_per_dim > 63 {
            return Err(QuantizeError::InvalidGrid(format!(
                "{} variables at {} qubits exceed the 63-bit index budget",
                bounds.len(),
                qubits_per_dim
            )));
        }
        for (v, &(lo, hi)) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(QuantizeError::InvalidGrid(format!(
                    "variable {v} bounds ({lo}, {hi}) are not a finite increasing pair"
                )));
            }
        }
        Ok(Self {
            bounds,
            qubits: qubits_per_dim,
        })
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn qubits_per_dim(&self) -> usize {
        self.qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.bounds.len() * self.qubits
    }

    /// Points per variable, `2^q`.
    pub fn points_per_dim(&self) -> usize {
        1usize << self.qubits
    }

    /// Total grid points, `2^(dims * q)`.
    pub fn total_points(&self) -> u64 {
        1u64 << self.total_qubits()
    }

    pub fn bounds(&self, dim: usize) -> (f64, f64) {
        self.bounds[dim]
    }

    pub fn spacing(&self, dim: usize) -> f64 {
        let (lo, hi) = self.bounds[dim];
        (hi - lo) / ((self.points_per_dim() - 1) as f64)
    }

    /// Coordinate of point `i` of variable `dim`. Panics out of range.
    pub fn point(&self, dim: usize, i: usize) -> f64 {
        assert!(i < self.points_per_dim(), "grid index {i} out of range");
        let (lo, _) = self.bounds[dim];
        lo + i as f64 * self.spacing(dim)
    }
}

/// How variable bits map onto register qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingScheme {
    /// Variable blocks in order, big-endian within each block.
    Sequential,
    /// Two variables, one of them bit-reversed (little-endian). Puts the
    /// coarse bits of both variables next to the center bond.
    Mirrored,
    /// Round-robin: qubits of equal significance are adjacent.
    Interleaved,
}

/// Bijection between per-variable grid indices and flat register indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingMap {
    scheme: OrderingScheme,
    dims: usize,
    qubits: usize,
    /// `slot[v][b]` is the register slot (0 = most significant) holding
    /// significance bit `b` (0 = most significant) of variable `v`.
    slot: Vec<Vec<usize>>,
    reversed_var: usize,
}

/// Builds the qubit assignment for `dims` variables of `q` qubits each.
///
/// `Mirrored` reverses the first variable; see
/// [`OrderingMap::with_reversed_variable`] to pick the other one.
pub fn ordering_bitmap(
    scheme: OrderingScheme,
    dims: usize,
    qubits_per_dim: usize,
) -> Result<OrderingMap, QuantizeError> {
    OrderingMap::new(scheme, dims, qubits_per_dim, 0)
}

impl OrderingMap {
    fn new(
        scheme: OrderingScheme,
        dims: usize,
        qubits: usize,
        reversed_var: usize,
    ) -> Result<Self, QuantizeError> {
        if dims == 0 || qubits == 0 {
            return Err(QuantizeError::InvalidGrid(
                "ordering needs at least one variable and one qubit".into(),
            ));
        }
        if dims * qubits > 63 {
            return Err(QuantizeError::InvalidGrid(
                "ordering exceeds the 63-bit index budget".into(),
            ));
        }
        if scheme == OrderingScheme::Mirrored && dims != 2 {
            return Err(QuantizeError::UnsupportedScheme(format!(
                "mirrored ordering is defined for 2 variables, got {dims}"
            )));
        }
        if reversed_var >= dims {
            return Err(QuantizeError::IndexOutOfRange(format!(
                "reversed variable {reversed_var} of {dims}"
            )));
        }
        let slot = (0..dims)
            .map(|v| {
                (0..qubits)
                    .map(|b| match scheme {
                        OrderingScheme::Sequential => v * qubits + b,
                        OrderingScheme::Mirrored if v == reversed_var => {
                            v * qubits + (qubits - 1 - b)
                        }
                        OrderingScheme::Mirrored => v * qubits + b,
                        OrderingScheme::Interleaved => b * dims + v,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            scheme,
            dims,
            qubits,
            slot,
            reversed_var,
        })
    }

    /// Same scheme with a different bit-reversed variable (mirrored only).
    pub fn with_reversed_variable(&self, var: usize) -> Result<Self, QuantizeError> {
        if self.scheme != OrderingScheme::Mirrored {
            return Err(QuantizeError::UnsupportedScheme(
                "only the mirrored scheme has a reversed variable".into(),
            ));
        }
        Self::new(self.scheme, self.dims, self.qubits, var)
    }

    pub fn scheme(&self) -> OrderingScheme {
        self.scheme
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn qubits_per_dim(&self) -> usize {
        self.qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.dims * self.qubits
    }

    /// Register slot carrying significance bit `b` of variable `v`.
    pub fn slot_of(&self, var: usize, bit: usize) -> usize {
        self.slot[var][bit]
    }

    /// Per-variable grid indices -> flat register index. Panics on a wrong
    /// variable count or an index `>= 2^q`.
    pub fn to_flat(&self, var_indices: &[usize]) -> u64 {
        assert_eq!(var_indices.len(), self.dims, "variable count mismatch");
        let total = self.total_qubits();
        let mut flat = 0u64;
        for (v, &i) in var_indices.iter().enumerate() {
            assert!(i < (1usize << self.qubits), "grid index {i} out of range");
            for b in 0..self.qubits {
                let bit = (i >> (self.qubits - 1 - b)) & 1;
                flat |= (bit as u64) << (total - 1 - self.slot[v][b]);
            }
        }
        flat
    }

    /// Flat register index -> per-variable grid indices.
    pub fn from_flat(&self, flat: u64) -> Vec<usize> {
        let total = self.total_qubits();
        assert!(flat < (1u64 << total), "register index out of range");
        let mut vars = vec![0usize; self.dims];
        for v in 0..self.dims {
            for b in 0..self.qubits {
                let bit = (flat >> (total - 1 - self.slot[v][b])) & 1;
                vars[v] |= (bit as usize) << (self.qubits - 1 - b);
            }
        }
        vars
    }

    /// Register bit vector (most significant first) -> per-variable indices.
    pub fn bits_to_vars(&self, register_bits: &[usize]) -> Vec<usize> {
        assert_eq!(register_bits.len(), self.total_qubits(), "bit count mismatch");
        let flat = register_bits
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64);
        self.from_flat(flat)
    }
}

/// Bits of `i` as `(b_1, ..., b_d)`, most significant first.
pub fn binary_index(i: u64, d: usize) -> Result<Vec<u8>, QuantizeError> {
    if d == 0 || d > 63 {
        return Err(QuantizeError::InvalidGrid(format!(
            "bit width {d} outside 1..=63"
        )));
    }
    if i >= (1u64 << d) {
        return Err(QuantizeError::IndexOutOfRange(format!(
            "index {i} does not fit in {d} bits"
        )));
    }
    Ok(bits::index_to_bits(i, d))
}

/// Density to discretize. Custom densities receive the grid point as a
/// coordinate slice and must return a finite nonnegative value.
pub enum DistributionSpec {
    Lognormal1d { mu: f64, sigma: f64 },
    LognormalNd { mu: Vec<f64>, cov: Vec<Vec<f64>> },
    Custom(Box<dyn Fn(&[f64]) -> f64>),
}

impl core::fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::Lognormal1d { mu, sigma } => f
                .debug_struct("Lognormal1d")
                .field("mu", mu)
                .field("sigma", sigma)
                .finish(),
            Self::LognormalNd { mu, .. } => f
                .debug_struct("LognormalNd")
                .field("dims", &mu.len())
                .finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl DistributionSpec {
    pub fn custom(f: impl Fn(&[f64]) -> f64 + 'static) -> Self {
        Self::Custom(Box::new(f))
    }

    /// The benchmark workhorse: lognormal with `mu = 0`, `sigma = 0.25`.
    pub fn canonical_lognormal_1d() -> Self {
        Self::Lognormal1d {
            mu: 0.0,
            sigma: 0.25,
        }
    }

    /// Multivariate benchmark: `mu = 0`, `Sigma = 0.25^2 (I + 0.3 offdiag)`.
    pub fn canonical_lognormal_nd(dims: usize) -> Self {
        let s = 0.25 * 0.25;
        let cov = (0..dims)
            .map(|i| {
                (0..dims)
                    .map(|j| if i == j { s } else { 0.3 * s })
                    .collect()
            })
            .collect();
        Self::LognormalNd {
            mu: vec![0.0; dims],
            cov,
        }
    }

    /// Declared variable count, if the density has one.
    pub fn dims(&self) -> Option<usize> {
        match self {
            Self::Lognormal1d { .. } => Some(1),
            Self::LognormalNd { mu, .. } => Some(mu.len()),
            Self::Custom(_) => None,
        }
    }

    /// Grid clipped to the [0.0005, 0.9995] marginal quantiles, the span the
    /// benchmarks run on. Custom densities carry no quantile information.
    pub fn canonical_grid(&self, qubits_per_dim: usize) -> Result<GridSpec, QuantizeError> {
        const P_LO: f64 = 0.0005;
        const P_HI: f64 = 0.9995;
        let marginal = |mu: f64, sigma: f64| {
            (
                libm::exp(mu + sigma * inverse_normal_cdf(P_LO)),
                libm::exp(mu + sigma * inverse_normal_cdf(P_HI)),
            )
        };
        match self {
            Self::Lognormal1d { mu, sigma } => {
                if !(*sigma > 0.0) {
                    return Err(QuantizeError::InvalidDistribution(format!(
                        "sigma {sigma} must be positive"
                    )));
                }
                GridSpec::new(vec![marginal(*mu, *sigma)], qubits_per_dim)
            }
            Self::LognormalNd { mu, cov } => {
                let bounds = mu
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        let var = cov
                            .get(i)
                            .and_then(|row| row.get(i))
                            .copied()
                            .unwrap_or(f64::NAN);
                        if !(var > 0.0) {
                            return Err(QuantizeError::InvalidDistribution(format!(
                                "covariance diagonal entry {i} is {var}"
                            )));
                        }
                        Ok(marginal(m, libm::sqrt(var)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GridSpec::new(bounds, qubits_per_dim)
            }
            Self::Custom(_) => Err(QuantizeError::InvalidDistribution(
                "custom densities have no canonical grid".into(),
            )),
        }
    }
}

enum Density {
    Lognormal1d {
        mu: f64,
        sigma: f64,
    },
    LognormalNd {
        mu: DVector<f64>,
        chol: Cholesky<f64, Dyn>,
        /// `(2 pi)^(d/2) * sqrt(det Sigma)`.
        norm: f64,
    },
    Custom(Box<dyn Fn(&[f64]) -> f64>),
}

impl Density {
    fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Self::Lognormal1d { mu, sigma } => {
                let x = point[0];
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (libm::log(x) - mu) / sigma;
                libm::exp(-0.5 * z * z)
                    / (x * sigma * libm::sqrt(2.0 * core::f64::consts::PI))
            }
            Self::LognormalNd { mu, chol, norm } => {
                let mut jac = 1.0;
                for &x in point {
                    if x <= 0.0 {
                        return 0.0;
                    }
                    jac *= x;
                }
                let y = DVector::from_iterator(point.len(), point.iter().map(|&x| libm::log(x)))
                    - mu;
                let quad = y.dot(&chol.solve(&y));
                libm::exp(-0.5 * quad) / (norm * jac)
            }
            Self::Custom(f) => f(point),
        }
    }
}

/// A density pinned to a grid and an ordering. Probabilities are computed
/// lazily from the density; only the normalizer is (optionally) precomputed.
pub struct DiscreteDistribution {
    grid: GridSpec,
    ordering: OrderingMap,
    density: Density,
    /// Discrete normalizer `Z`; `1.0` when the grid was too large to sum.
    z: f64,
    normalized: bool,
}

impl core::fmt::Debug for DiscreteDistribution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DiscreteDistribution")
            .field("grid", &self.grid)
            .field("scheme", &self.ordering.scheme())
            .field("z", &self.z)
            .field("normalized", &self.normalized)
            .finish()
    }
}

/// Pins `dist` to `grid` under `ordering`.
///
/// Validates dimension agreement and (for `LognormalNd`) that the covariance
/// is symmetric positive definite. Grids of at most [`EAGER_NORM_CAP`] points
/// are summed exhaustively, which both fixes `Z` and proves the density is
/// finite and nonnegative everywhere on the grid; larger grids get a probe
/// check and stay unnormalized.
pub fn discretize(
    dist: DistributionSpec,
    grid: &GridSpec,
    ordering: &OrderingMap,
) -> Result<DiscreteDistribution, QuantizeError> {
    if grid.dims() != ordering.dims() || grid.qubits_per_dim() != ordering.qubits_per_dim() {
        return Err(QuantizeError::InvalidGrid(format!(
            "grid ({} vars, q={}) does not match ordering ({} vars, q={})",
            grid.dims(),
            grid.qubits_per_dim(),
            ordering.dims(),
            ordering.qubits_per_dim()
        )));
    }
    if let Some(d) = dist.dims() {
        if d != grid.dims() {
            return Err(QuantizeError::InvalidDistribution(format!(
                "distribution has {d} variables, grid has {}",
                grid.dims()
            )));
        }
    }

    let density = match dist {
        DistributionSpec::Lognormal1d { mu, sigma } => {
            if !(sigma > 0.0) || !mu.is_finite() {
                return Err(QuantizeError::InvalidDistribution(format!(
                    "lognormal parameters mu={mu} sigma={sigma}"
                )));
            }
            Density::Lognormal1d { mu, sigma }
        }
        DistributionSpec::LognormalNd { mu, cov } => {
            let d = mu.len();
            if d == 0 || cov.len() != d || cov.iter().any(|row| row.len() != d) {
                return Err(QuantizeError::InvalidDistribution(
                    "covariance is not square of the mean's dimension".into(),
                ));
            }
            let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
            let scale = m.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            if !m.iter().all(|v| v.is_finite())
                || (&m - m.transpose()).iter().any(|v| v.abs() > 1e-12 * scale)
            {
                return Err(QuantizeError::InvalidDistribution(
                    "covariance is not finite symmetric".into(),
                ));
            }
            let chol = Cholesky::new(m).ok_or_else(|| {
                QuantizeError::InvalidDistribution("covariance is not positive definite".into())
            })?;
            let sqrt_det: f64 = chol.l().diagonal().iter().product();
            let norm = libm::pow(2.0 * core::f64::consts::PI, d as f64 / 2.0) * sqrt_det;
            Density::LognormalNd {
                mu: DVector::from_vec(mu),
                chol,
                norm,
            }
        }
        DistributionSpec::Custom(f) => Density::Custom(f),
    };

    let dd = DiscreteDistribution {
        grid: grid.clone(),
        ordering: ordering.clone(),
        density,
        z: 1.0,
        normalized: false,
    };
    let total = grid.total_points();
    if total <= EAGER_NORM_CAP {
        let mut z = 0.0;
        let mut vars = vec![0usize; grid.dims()];
        for flat in 0..total {
            decode_sequential(flat, grid, &mut vars);
            let raw = dd.raw_density(&vars);
            if !raw.is_finite() || raw < 0.0 {
                return Err(QuantizeError::InvalidDensity {
                    index: vars,
                    value: raw,
                });
            }
            z += raw;
        }
        if z <= 0.0 {
            return Err(QuantizeError::InvalidDistribution(
                "density is zero on the whole grid".into(),
            ));
        }
        Ok(DiscreteDistribution {
            z,
            normalized: true,
            ..dd
        })
    } else {
        // Too large to sum: probe a strided sample so broken densities still
        // fail fast, and leave amplitudes unnormalized.
        let mut vars = vec![0usize; grid.dims()];
        let stride = (total / 4096).max(1);
        let mut flat = 0u64;
        while flat < total {
            decode_sequential(flat, grid, &mut vars);
            let raw = dd.raw_density(&vars);
            if !raw.is_finite() || raw < 0.0 {
                return Err(QuantizeError::InvalidDensity {
                    index: vars,
                    value: raw,
                });
            }
            flat += stride;
        }
        Ok(dd)
    }
}

/// Decodes `flat` as big-endian variable blocks (normalization sweeps do not
/// care about the qubit ordering, so the cheapest bijection wins).
fn decode_sequential(flat: u64, grid: &GridSpec, vars: &mut [usize]) {
    let q = grid.qubits_per_dim();
    let mask = (1u64 << q) - 1;
    let d = vars.len();
    for (v, slot) in vars.iter_mut().enumerate() {
        *slot = ((flat >> (q * (d - 1 - v))) & mask) as usize;
    }
}

impl DiscreteDistribution {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ordering(&self) -> &OrderingMap {
        &self.ordering
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    pub fn total_qubits(&self) -> usize {
        self.grid.total_qubits()
    }

    /// Discrete normalizer `Z` (1.0 when unnormalized).
    pub fn normalizer(&self) -> f64 {
        self.z
    }

    /// Whether probabilities sum to one (grids above [`EAGER_NORM_CAP`] skip
    /// the normalizing sweep).
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn raw_density(&self, var_indices: &[usize]) -> f64 {
        let point: Vec<f64> = var_indices
            .iter()
            .enumerate()
            .map(|(v, &i)| self.grid.point(v, i))
            .collect();
        self.density.eval(&point)
    }

    /// Probability of the grid point `var_indices` (one index per variable).
    /// Panics on out-of-range indices.
    pub fn prob(&self, var_indices: &[usize]) -> f64 {
        assert_eq!(var_indices.len(), self.dims(), "variable count mismatch");
        self.raw_density(var_indices) / self.z
    }

    /// `sqrt(prob)`, the value the state-preparation pipeline encodes.
    pub fn amplitude(&self, var_indices: &[usize]) -> f64 {
        libm::sqrt(self.prob(var_indices))
    }

    /// Amplitude addressed by register bits (most significant first), the
    /// shape cross interpolation asks for. Panics on malformed bits.
    pub fn amplitude_at_bits(&self, register_bits: &[usize]) -> f64 {
        debug_assert!(register_bits.iter().all(|&b| b < 2), "non-binary bit");
        self.amplitude(&self.ordering.bits_to_vars(register_bits))
    }

    /// All probabilities ordered by flat register index, normalized to sum
    /// one. Refuses grids larger than `cap` points.
    pub fn materialize_probs(&self, cap: u64) -> Result<Vec<f64>, QuantizeError> {
        let total = self.grid.total_points();
        if total > cap {
            return Err(QuantizeError::SizeOverCap(format!(
                "{total} grid points exceed the cap of {cap}"
            )));
        }
        let mut probs: Vec<f64> = (0..total)
            .map(|flat| self.prob(&self.ordering.from_flat(flat)))
            .collect();
        if !self.normalized {
            let sum: f64 = probs.iter().sum();
            if sum <= 0.0 {
                return Err(QuantizeError::InvalidDistribution(
                    "density is zero on the whole grid".into(),
                ));
            }
            for p in &mut probs {
                *p /= sum;
            }
        }
        Ok(probs)
    }
}

/// CDF of a one-variable distribution over its grid, i.e. prefix sums of the
/// probabilities in grid order, renormalized to end at exactly `F(last) = 1`
/// up to roundoff. Multivariate inputs are rejected.
pub fn cdf_1d(dd: &DiscreteDistribution) -> Result<Vec<f64>, QuantizeError> {
    if dd.dims() != 1 {
        return Err(QuantizeError::InvalidGrid(format!(
            "cdf_1d needs one variable, got {}",
            dd.dims()
        )));
    }
    let n = dd.grid.total_points();
    if n > EAGER_NORM_CAP {
        return Err(QuantizeError::SizeOverCap(format!(
            "{n} grid points exceed the cap of {EAGER_NORM_CAP}"
        )));
    }
    let raw: Vec<f64> = (0..n as usize).map(|i| dd.raw_density(&[i])).collect();
    let z: f64 = raw.iter().sum();
    if z <= 0.0 {
        return Err(QuantizeError::InvalidDistribution(
            "density is zero on the whole grid".into(),
        ));
    }
    let mut acc = 0.0;
    Ok(raw
        .iter()
        .map(|r| {
            acc += r / z;
            acc
        })
        .collect())
}

/// Inverse standard normal CDF (Acklam's rational approximation, absolute
/// error below 1.2e-9 over (0, 1)). Returns NaN outside (0, 1).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}
