//! Distribution and state comparison: KS distance, KL divergence, fidelity.
//!
//! KS compares one-variable CDFs (the multivariate benchmarks use KL
//! instead). KL uses the natural logarithm throughout; `Q` is clamped at a
//! caller-chosen floor so empirical zeros in the reconstruction stay finite,
//! while `P(x) = 0` terms contribute exactly zero.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Tolerance on "is a CDF" / "sums to one" input validation.
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, thiserror::Error)]
pub enum MetricsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("not a CDF: {0}")]
    InvalidCdf(String),
    #[error("not normalized: {0}")]
    Unnormalized(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// One comparison run, as serialized into benchmark reports. `ks` and `kl`
/// are optional because each applies to only part of the benchmark grid
/// (KS univariate, KL where the target is materializable).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub ks: Option<f64>,
    pub kl: Option<f64>,
    pub fidelity: Option<f64>,
    pub l2_amplitude_error: f64,
    /// Free-form run identifier (config name, sweep point, seed).
    pub metadata: String,
}

fn check_cdf(name: &str, f: &[f64]) -> Result<(), MetricsError> {
    if f.is_empty() {
        return Err(MetricsError::InvalidCdf(format!("{name} is empty")));
    }
    for w in f.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(MetricsError::InvalidCdf(format!(
                "{name} is not nondecreasing"
            )));
        }
    }
    let last = *f.last().unwrap();
    if f[0] < -NORM_TOL || !(libm::fabs(last - 1.0) <= NORM_TOL) {
        return Err(MetricsError::InvalidCdf(format!(
            "{name} does not run from >=0 to 1 (ends at {last})"
        )));
    }
    Ok(())
}

/// Kolmogorov-Smirnov distance `sup_x |F(x) - G(x)|` between two CDFs
/// sampled on the same grid.
pub fn ks_distance(f: &[f64], g: &[f64]) -> Result<f64, MetricsError> {
    if f.len() != g.len() {
        return Err(MetricsError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    check_cdf("F", f)?;
    check_cdf("G", g)?;
    Ok(f.iter()
        .zip(g)
        .map(|(a, b)| libm::fabs(a - b))
        .fold(0.0, f64::max))
}

/// KL divergence `sum P ln(P / max(Q, floor))` in nats.
///
/// Both vectors must sum to one within 1e-9. Terms with `P(x) = 0`
/// contribute zero regardless of `Q(x)`.
pub fn kl_divergence(p: &[f64], q: &[f64], floor: f64) -> Result<f64, MetricsError> {
    if p.len() != q.len() {
        return Err(MetricsError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if !(floor > 0.0) {
        return Err(MetricsError::InvalidInput(format!(
            "floor {floor} must be positive"
        )));
    }
    for (name, v) in [("P", p), ("Q", q)] {
        if v.iter().any(|&x| !(x >= 0.0)) {
            return Err(MetricsError::Unnormalized(format!(
                "{name} has negative or NaN entries"
            )));
        }
        let total: f64 = v.iter().sum();
        if libm::fabs(total - 1.0) > NORM_TOL {
            return Err(MetricsError::Unnormalized(format!(
                "{name} sums to {total}"
            )));
        }
    }
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            kl += pi * libm::log(pi / qi.max(floor));
        }
    }
    Ok(kl)
}

/// `|<target|state>|`, the state overlap modulo global phase.
///
/// Both arguments are assumed unit-norm; only the length is checked.
pub fn fidelity(state: &[Complex64], target: &[Complex64]) -> Result<f64, MetricsError> {
    if state.len() != target.len() {
        return Err(MetricsError::LengthMismatch {
            left: state.len(),
            right: target.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, s) in target.iter().zip(state) {
        acc += t.conj() * s;
    }
    Ok(acc.norm())
}

/// Euclidean distance between two amplitude vectors (no phase quotient).
pub fn l2_amplitude_error(a: &[Complex64], b: &[Complex64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok(libm::sqrt(sq))
}

/// Convenience: real amplitudes promoted to complex, for targets produced by
/// the quantizer.
pub fn to_complex(real_amps: &[f64]) -> Vec<Complex64> {
    real_amps.iter().map(|&a| Complex64::new(a, 0.0)).collect()
}
