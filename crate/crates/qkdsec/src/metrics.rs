//! Distance and fidelity security quantities.
//!
//! Trace distance between key states (blockwise on the shared classical
//! structure, dense otherwise), the correctness/secrecy triangle
//! decomposition, the statistical-distance lower bound, the Fuchs–van de
//! Graaf bracket, the fidelity chain through the maximally correlated key
//! vector, and the comparison between a fixed reference system and the
//! minimized choice.

use crate::error::{Error, Result};
use crate::opalg::{self, HermitianOperator};
use crate::report::MetricReport;
use crate::sampling;
use crate::scalar::Scalar;
use crate::states::{self, CqState, Side};
use crate::tol::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Trace distance `½ tr|A − B|` between density operators.
pub fn trace_distance<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<T> {
    trace_distance_with(a, b, &Tolerances::default())
}

pub fn trace_distance_with<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "trace distance requires equal dimensions, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let half = T::from_f64_c(0.5);
    Ok(opalg::trace_norm_with(&a.sub(b)?, tol)? * half)
}

/// Trace distance between cq states sharing the same key space and
/// eavesdropper dimension, computed blockwise:
/// `½ Σ_{(k_A,k_B)} tr|p₁ρ₁ − p₂ρ₂|`.
pub fn trace_distance_cq<T: Scalar>(s1: &CqState<T>, s2: &CqState<T>) -> Result<T> {
    trace_distance_cq_with(s1, s2, &Tolerances::default())
}

pub fn trace_distance_cq_with<T: Scalar>(
    s1: &CqState<T>,
    s2: &CqState<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    if s1.keyspace() != s2.keyspace() || s1.eve_dim() != s2.eve_dim() {
        return Err(Error::validation(format!(
            "cq trace distance requires matching shapes: ({} bits, eve {}) vs ({} bits, eve {})",
            s1.keyspace().bits(),
            s1.eve_dim(),
            s2.keyspace().bits(),
            s2.eve_dim()
        )));
    }
    let half = T::from_f64_c(0.5);
    let mut keys: Vec<(usize, usize)> = s1
        .branches()
        .iter()
        .chain(s2.branches())
        .map(|b| (b.ka, b.kb))
        .collect();
    keys.sort_unstable();
    keys.dedup();

    let mut acc = T::zero();
    for (ka, kb) in keys {
        let block = match (s1.branch(ka, kb), s2.branch(ka, kb)) {
            (Some(b1), Some(b2)) => b1.eve_op.scale(b1.prob).sub(&b2.eve_op.scale(b2.prob))?,
            (Some(b1), None) => b1.eve_op.scale(b1.prob),
            (None, Some(b2)) => b2.eve_op.scale(b2.prob),
            (None, None) => continue,
        };
        acc = acc + opalg::trace_norm_with(&block, tol)?;
    }
    Ok(acc * half)
}

/// Splits the distance to the ideal state into the key-mismatch probability
/// and the secrecy distance of the corrected state, and verifies the
/// triangle inequality between them.
///
/// Report entries: `eps_cor`, `eps_sec`, `eps_total`.
pub fn epsilon_decomposition<T: Scalar>(
    rho: &CqState<T>,
    sigma: &HermitianOperator<T>,
) -> Result<MetricReport> {
    epsilon_decomposition_with(rho, sigma, &Tolerances::default())
}

pub fn epsilon_decomposition_with<T: Scalar>(
    rho: &CqState<T>,
    sigma: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<MetricReport> {
    check_sigma_shape(rho, sigma)?;
    let ideal = states::ideal_state_with(rho.keyspace(), sigma, tol)?;
    let zeta = states::correctify(rho);

    let eps_cor = rho.mismatch_prob();
    let eps_sec = trace_distance_cq_with(&zeta, &ideal, tol)?;
    let total = trace_distance_cq_with(rho, &ideal, tol)?;

    if total > eps_cor + eps_sec + tol.assert_slack {
        return Err(Error::numerical(format!(
            "triangle decomposition violated: total {} > {} + {}",
            total.to_f64().unwrap_or(f64::NAN),
            eps_cor.to_f64().unwrap_or(f64::NAN),
            eps_sec.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let mut r = MetricReport::new();
    r.push(
        "eps_cor",
        eps_cor.to_f64_lossy(),
        "epsilon_decomposition: key mismatch probability read from branches",
    );
    r.push(
        "eps_sec",
        eps_sec.to_f64_lossy(),
        "epsilon_decomposition: trace distance of corrected state to ideal",
    );
    r.push(
        "eps_total",
        total.to_f64_lossy(),
        "epsilon_decomposition: trace distance of delivered state to ideal",
    );
    Ok(r)
}

/// Statistical-distance lower bound `½ Σ_k |P(k) − 2^{-bits}|` on the secrecy
/// distance, with `P` the corrected key marginal. Verifies that it does not
/// exceed the trace distance it bounds.
pub fn statistical_distance_lb<T: Scalar>(
    s: &CqState<T>,
    sigma: &HermitianOperator<T>,
) -> Result<T> {
    statistical_distance_lb_with(s, sigma, &Tolerances::default())
}

pub fn statistical_distance_lb_with<T: Scalar>(
    s: &CqState<T>,
    sigma: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    check_sigma_shape(s, sigma)?;
    let zeta = states::correctify(s);
    let p = states::key_marginal(&zeta, Side::A);
    let uniform: T = s.keyspace().uniform_prob();
    let half = T::from_f64_c(0.5);
    let sd = p
        .probs()
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - uniform).abs())
        * half;

    let ideal = states::ideal_state_with(s.keyspace(), sigma, tol)?;
    let d = trace_distance_cq_with(&zeta, &ideal, tol)?;
    if sd > d + tol.assert_slack {
        return Err(Error::numerical(format!(
            "statistical distance {} exceeds the trace distance {} it lower-bounds",
            sd.to_f64().unwrap_or(f64::NAN),
            d.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(sd)
}

/// Fuchs–van de Graaf bracket around the trace distance.
///
/// Report entries: `trace_distance`, `fidelity`, `upper` = `√(1−F²)`
/// (verified to dominate the distance), and `lower` = `1−F`, the companion
/// bound (an extension beyond the chain being checked, labeled as such).
pub fn fvg_bounds<T: Scalar>(
    s1: &HermitianOperator<T>,
    s2: &HermitianOperator<T>,
) -> Result<MetricReport> {
    fvg_bounds_with(s1, s2, &Tolerances::default())
}

pub fn fvg_bounds_with<T: Scalar>(
    s1: &HermitianOperator<T>,
    s2: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<MetricReport> {
    let d = trace_distance_with(s1, s2, tol)?;
    let f = opalg::fidelity_with(s1, s2, tol)?;
    let upper = (T::one() - f * f).max(T::zero()).sqrt();
    let lower = T::one() - f;

    if d > upper + tol.assert_slack {
        return Err(Error::numerical(format!(
            "fidelity upper bound violated: D {} > sqrt(1-F^2) {}",
            d.to_f64().unwrap_or(f64::NAN),
            upper.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if lower > d + tol.assert_slack {
        return Err(Error::numerical(format!(
            "companion lower bound violated: 1-F {} > D {}",
            lower.to_f64().unwrap_or(f64::NAN),
            d.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let mut r = MetricReport::new();
    r.push(
        "trace_distance",
        d.to_f64_lossy(),
        "fvg_bounds: trace_distance",
    );
    r.push("fidelity", f.to_f64_lossy(), "fvg_bounds: fidelity");
    r.push(
        "upper",
        upper.to_f64_lossy(),
        "fvg_bounds: sqrt(1 - F^2) upper bound on trace distance",
    );
    r.push(
        "lower",
        lower.to_f64_lossy(),
        "fvg_bounds: 1 - F companion lower bound (extension, not part of the checked chain)",
    );
    Ok(r)
}

/// Fidelity-chain check on a corrected state: compares the trace distance to
/// the bound through the maximally correlated key vector and the version with
/// the eavesdropper traced out.
///
/// Report entries: `l13` = `√(1−F(ζ, ψψ†⊗σ)²)`, `l15` = `√(1−⟨ψ|tr_E ζ|ψ⟩)`,
/// `trace_distance`, `gap_l13_l15`, and `equality_within_1e8` (1 when the two
/// levels agree to 1e-8 — the agreement that cannot generally be arranged
/// once the reference system is pinned).
pub fn koashi_chain_check<T: Scalar>(
    zeta: &CqState<T>,
    sigma: &HermitianOperator<T>,
) -> Result<MetricReport> {
    koashi_chain_check_with(zeta, sigma, &Tolerances::default())
}

pub fn koashi_chain_check_with<T: Scalar>(
    zeta: &CqState<T>,
    sigma: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<MetricReport> {
    if !zeta.is_corrected() {
        return Err(Error::validation(
            "fidelity chain requires a corrected state (every branch with k_A = k_B)",
        ));
    }
    check_sigma_shape(zeta, sigma)?;

    let ks = zeta.keyspace();
    let size = ks.size();
    let dense = states::to_density_with(zeta, tol)?;
    let psi = states::max_entangled_ket::<T>(ks);
    let psi_proj = HermitianOperator::outer(&psi);
    let reference = opalg::tensor_with(&psi_proj, sigma, tol)?;

    let f13 = opalg::fidelity_with(&dense, &reference, tol)?;
    let l13 = (T::one() - f13 * f13).max(T::zero()).sqrt();

    let reduced = opalg::partial_trace(&dense, &[size, size, zeta.eve_dim()], &[0, 1])?;
    let overlap = reduced.expectation(&psi);
    let l15 = (T::one() - overlap).max(T::zero()).sqrt();

    let ideal = states::ideal_state_with(ks, sigma, tol)?;
    let d = trace_distance_cq_with(zeta, &ideal, tol)?;

    if l15 > l13 + tol.assert_slack {
        return Err(Error::numerical(format!(
            "fidelity monotonicity violated: traced-out level {} exceeds joint level {}",
            l15.to_f64().unwrap_or(f64::NAN),
            l13.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if d > l13 + tol.assert_slack {
        return Err(Error::numerical(format!(
            "fidelity upper bound violated: trace distance {} exceeds chain level {}",
            d.to_f64().unwrap_or(f64::NAN),
            l13.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let gap = l13 - l15;
    let equal = if gap.abs() <= T::from_f64_c(1e-8) {
        1.0
    } else {
        0.0
    };

    let mut r = MetricReport::new();
    r.push(
        "l13",
        l13.to_f64_lossy(),
        "koashi_chain_check: sqrt(1 - F(zeta, psi x sigma)^2)",
    );
    r.push(
        "l15",
        l15.to_f64_lossy(),
        "koashi_chain_check: sqrt(1 - <psi| tr_E zeta |psi>)",
    );
    r.push(
        "trace_distance",
        d.to_f64_lossy(),
        "koashi_chain_check: trace distance of corrected state to ideal",
    );
    r.push(
        "gap_l13_l15",
        gap.to_f64_lossy(),
        "koashi_chain_check: slack between the two chain levels",
    );
    r.push(
        "equality_within_1e8",
        equal,
        "koashi_chain_check: 1 when the chain levels agree to 1e-8 with this fixed reference system",
    );
    Ok(r)
}

/// Outcome of the reference-system scan: the distance at the averaged choice
/// against a local-search minimum over all density operators.
#[derive(Debug, Clone)]
pub struct SigmaScan<T: Scalar> {
    pub at_avg: T,
    pub minimum: T,
    pub best_sigma: HermitianOperator<T>,
    pub report: MetricReport,
}

/// Compares the trace distance at `σ = sigma_avg(s)` with a local-search
/// minimum over density operators (coordinate descent on the
/// eigen-parameterized simplex with random restarts).
///
/// The search result is an upper bound on the true minimum and is labeled as
/// such; the averaged choice is one of the starting points, so the minimum
/// never exceeds it.
pub fn min_sigma_trace_distance<T: Scalar>(
    s: &CqState<T>,
    restarts: usize,
    seed: u64,
) -> Result<SigmaScan<T>> {
    min_sigma_trace_distance_with(s, restarts, seed, &Tolerances::default())
}

pub fn min_sigma_trace_distance_with<T: Scalar>(
    s: &CqState<T>,
    restarts: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<SigmaScan<T>> {
    if restarts == 0 {
        return Err(Error::validation("sigma search needs at least one restart"));
    }
    let avg = states::sigma_avg(s);

    // Blockwise objective, identical to the trace distance against the
    // ideal state at σ but without rebuilding that state per evaluation:
    // mismatched blocks contribute their probability outright, agreeing
    // blocks contribute tr|p_k ρ_k − 2^{-bits} σ|.
    let half = T::from_f64_c(0.5);
    let uniform: T = s.keyspace().uniform_prob();
    let mismatch = s.mismatch_prob();
    let diag_blocks: Vec<HermitianOperator<T>> = (0..s.keyspace().size())
        .map(|k| match s.branch(k, k) {
            Some(b) => b.eve_op.scale(b.prob),
            None => HermitianOperator::zero(s.eve_dim()),
        })
        .collect();
    let objective = move |sigma: &HermitianOperator<T>| -> Result<T> {
        let mut acc = mismatch;
        for block in &diag_blocks {
            let diff = block.sub(&sigma.scale(uniform))?;
            acc = acc + opalg::trace_norm_with(&diff, tol)?;
        }
        Ok(acc * half)
    };
    let at_avg = objective(&avg)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = s.eve_dim();
    let mut best = at_avg;
    let mut best_sigma = avg.clone();
    for restart in 0..restarts {
        let start = if restart == 0 {
            avg.clone()
        } else {
            sampling::random_density(&mut rng, d)
        };
        let (value, sigma) = descend(start, &objective, &mut rng, tol)?;
        if value < best {
            best = value;
            best_sigma = sigma;
        }
    }

    if best > at_avg + tol.search_improvement {
        return Err(Error::numerical(
            "sigma search ended above its own starting point".to_string(),
        ));
    }

    let mut report = MetricReport::new();
    report.push(
        "trace_distance_at_sigma_avg",
        at_avg.to_f64_lossy(),
        "min_sigma_trace_distance: averaged reference system",
    );
    report.push(
        "trace_distance_minimized",
        best.to_f64_lossy(),
        "min_sigma_trace_distance: local minimum over density operators -- upper bound on the true minimum",
    );
    report.push(
        "gap_avg_minus_min",
        (at_avg - best).to_f64_lossy(),
        "min_sigma_trace_distance: cost of pinning the reference system to the average",
    );
    report.push(
        "restarts",
        restarts as f64,
        "min_sigma_trace_distance: random restarts",
    );
    Ok(SigmaScan {
        at_avg,
        minimum: best,
        best_sigma,
        report,
    })
}

/// Coordinate descent over mixtures: at each step the current iterate's
/// eigenbasis and a few random pure states propose directions, and a convex
/// line search along `(1−t)σ + tD` picks the best move. Stops when no
/// direction improves by more than the configured threshold.
fn descend<T: Scalar>(
    mut sigma: HermitianOperator<T>,
    objective: &dyn Fn(&HermitianOperator<T>) -> Result<T>,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances<T>,
) -> Result<(T, HermitianOperator<T>)> {
    let d = sigma.dim();
    let mut current = objective(&sigma)?;
    for _ in 0..200 {
        let mut directions: Vec<HermitianOperator<T>> = Vec::new();
        let spec = opalg::eig_hermitian_with(&sigma, tol)?;
        for v in &spec.eigenvectors {
            directions.push(HermitianOperator::outer(v));
        }
        for _ in 0..4 {
            directions.push(HermitianOperator::outer(&sampling::random_unit_vector(
                rng, d,
            )));
        }

        let mut best_move: Option<(T, HermitianOperator<T>)> = None;
        for dir in &directions {
            let (t, value) = line_search(&sigma, dir, objective)?;
            if value < current - tol.search_improvement
                && best_move.as_ref().is_none_or(|(v, _)| value < *v)
            {
                best_move = Some((value, mix(&sigma, dir, t)));
            }
        }
        match best_move {
            Some((value, next)) => {
                current = value;
                sigma = next;
            }
            None => break,
        }
    }
    Ok((current, sigma))
}

fn mix<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    t: T,
) -> HermitianOperator<T> {
    a.scale(T::one() - t).add(&b.scale(t)).expect("same dim")
}

/// Ternary search for the minimum of the convex section
/// `t ↦ objective((1−t)σ + tD)` on `[0, 1]`.
fn line_search<T: Scalar>(
    sigma: &HermitianOperator<T>,
    dir: &HermitianOperator<T>,
    objective: &dyn Fn(&HermitianOperator<T>) -> Result<T>,
) -> Result<(T, T)> {
    let mut lo = T::zero();
    let mut hi = T::one();
    let third = T::from_f64_c(1.0 / 3.0);
    for _ in 0..28 {
        let m1 = lo + (hi - lo) * third;
        let m2 = hi - (hi - lo) * third;
        let f1 = objective(&mix(sigma, dir, m1))?;
        let f2 = objective(&mix(sigma, dir, m2))?;
        if f1 <= f2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let two = T::one() + T::one();
    let t = (lo + hi) / two;
    let value = objective(&mix(sigma, dir, t))?;
    Ok((t, value))
}

fn check_sigma_shape<T: Scalar>(s: &CqState<T>, sigma: &HermitianOperator<T>) -> Result<()> {
    if sigma.dim() != s.eve_dim() {
        return Err(Error::validation(format!(
            "reference system dimension {} differs from eavesdropper dimension {}",
            sigma.dim(),
            s.eve_dim()
        )));
    }
    Ok(())
}

/// Seeded random operator with spectrum in `[0, 1]`, used by the duality and
/// measurement-bound checks.
pub fn random_effect<T: Scalar>(rng: &mut impl Rng, dim: usize) -> HermitianOperator<T> {
    sampling::random_contraction(rng, dim)
}
