//! Centralized numerical tolerances.
//!
//! Every threshold used for validation, convergence, and internal consistency
//! checks lives in this one record so suites can tighten or loosen them
//! uniformly instead of scattering magic numbers.

use crate::scalar::Scalar;

/// Tolerance and limit configuration.
///
/// The defaults are calibrated for `f64`. For other scalar types use
/// [`Tolerances::for_epsilon`], which rescales the floating thresholds by the
/// ratio of machine epsilons.
#[derive(Debug, Clone)]
pub struct Tolerances<T: Scalar> {
    /// Allowed deviation from `entries[i][j] == conj(entries[j][i])`.
    pub hermitian: T,
    /// Allowed deviation of a density operator's trace from one.
    pub unit_trace: T,
    /// Most negative eigenvalue still accepted as positive semidefinite.
    pub psd: T,
    /// Negative eigenvalues above this magnitude are clamped to zero inside
    /// matrix square roots; rank-deficient states round off slightly negative.
    pub negative_clamp: T,
    /// Allowed deviation of a probability vector's sum from one.
    pub prob_sum: T,
    /// Off-diagonal Frobenius norm at which the Jacobi sweep stops, relative
    /// to the input's Frobenius norm.
    pub jacobi_offdiag: T,
    /// Hard cap on Jacobi sweeps before reporting non-convergence.
    pub jacobi_max_sweeps: usize,
    /// Slack used when an operation verifies an inequality it reports.
    pub assert_slack: T,
    /// Minimum improvement per iteration of the trace-distance minimizer.
    pub search_improvement: T,
    /// Eigenvalues below this are treated as zero when inverting on a support.
    pub support_cutoff: T,
    /// Pairwise commutator norm below which operators count as commuting.
    pub commutator: T,
    /// Largest total dimension any dense operator may take.
    pub dim_cap: usize,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let c = T::from_f64_c;
        Tolerances {
            hermitian: c(1e-12),
            unit_trace: c(1e-8),
            psd: c(1e-10),
            negative_clamp: c(1e-10),
            prob_sum: c(1e-12),
            jacobi_offdiag: c(1e-13),
            jacobi_max_sweeps: 100,
            assert_slack: c(1e-10),
            search_improvement: c(1e-9),
            support_cutoff: c(1e-12),
            commutator: c(1e-10),
            dim_cap: 4096,
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Defaults rescaled for the scalar's machine epsilon, so `f32`
    /// instantiations converge instead of chasing `f64`-sized residuals.
    pub fn for_epsilon() -> Self {
        let ratio = T::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        let base: Tolerances<T> = Tolerances::default();
        let scale = |v: T| v * T::from_f64_c(ratio);
        Tolerances {
            hermitian: scale(base.hermitian),
            unit_trace: scale(base.unit_trace),
            psd: scale(base.psd),
            negative_clamp: scale(base.negative_clamp),
            prob_sum: scale(base.prob_sum),
            jacobi_offdiag: scale(base.jacobi_offdiag),
            assert_slack: scale(base.assert_slack),
            search_improvement: scale(base.search_improvement),
            support_cutoff: scale(base.support_cutoff),
            commutator: scale(base.commutator),
            ..base
        }
    }

    /// Same tolerances with a different dense-dimension cap.
    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }
}
