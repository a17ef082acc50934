//! Numerical toolkit for quantum-key-distribution security criteria.
//!
//! The crate constructs small classical-quantum key states exactly and
//! evaluates the security quantities defined on them: trace distance and the
//! correctness/secrecy decomposition, the statistical-distance lower bound
//! and its coupling-lemma reading, the fidelity chain that upper-bounds the
//! trace distance, Helstrom discrimination and key-guessing probabilities
//! with their bound, Markov-averaging penalties, and operational leak-rate
//! arithmetic at extreme exponents. A toy intercept-resend protocol feeds the
//! same machinery with exactly enumerated states.
//!
//! Dense linear algebra is generic over the floating-point scalar through
//! [`scalar::Scalar`] (`f32`/`f64`); classical probability routines are
//! additionally generic over [`scalar::Prob`], which exact rationals satisfy,
//! so identities that are exact statements can be verified in exact
//! arithmetic. The `f64` instantiations used by the command-line runner are
//! aliased below.

pub mod coupling;
pub mod discrimination;
pub mod error;
pub mod metrics;
pub mod opalg;
pub mod report;
pub mod riskavg;
pub mod sampling;
pub mod scalar;
pub mod scenario;
pub mod states;
pub mod tol;
pub mod toysim;

pub use error::{Error, Result};
pub use report::{MetricEntry, MetricReport, ReportFormat};

use num_rational::BigRational;

/// Self-adjoint operator over `f64` scalars.
pub type Hermitian64 = opalg::HermitianOperator<f64>;
/// Eigendecomposition over `f64` scalars.
pub type Spectrum64 = opalg::Spectrum<f64>;
/// Classical-quantum state over `f64` scalars.
pub type CqState64 = states::CqState<f64>;
/// Branch of a classical-quantum state over `f64` scalars.
pub type Branch64 = states::Branch<f64>;
/// Floating-point probability vector.
pub type Distribution64 = states::ClassicalDistribution<f64>;
/// Exact-rational probability vector.
pub type DistributionExact = states::ClassicalDistribution<BigRational>;
/// Measurement over `f64` scalars.
pub type Povm64 = discrimination::Povm<f64>;
/// Weighted state ensemble over `f64` scalars.
pub type Ensemble64 = discrimination::Ensemble<f64>;
/// Tolerance record over `f64` scalars.
pub type Tolerances64 = tol::Tolerances<f64>;
/// Base-2 log-domain probability over `f64`.
pub type LogProb64 = riskavg::LogProb<f64>;
