//! The eavesdropper's side: state discrimination and key guessing.
//!
//! Binary discrimination at the Helstrom optimum, measurement-based guessing
//! probabilities scored on Alice's key, the guessing bound
//! `2^{-bits} + ε_sec`, and the exact or near-optimal guessing value —
//! Helstrom for two keys, the classical maximum-a-posteriori value when the
//! conditional operators commute, and the pretty-good measurement as an
//! explicitly flagged lower bound otherwise.

use crate::error::{Error, Result};
use crate::metrics;
use crate::opalg::{self, HermitianOperator, MatrixDoc};
use crate::report::MetricReport;
use crate::scalar::Scalar;
use crate::states::{self, CqState, KeySpace, Side};
use crate::tol::Tolerances;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Finite measurement: positive operators summing to identity, each labeled
/// by the key it votes for. A key may own several elements; every key must
/// own at least one when the measurement is scored against a key space.
#[derive(Debug, Clone)]
pub struct Povm<T: Scalar> {
    dim: usize,
    elements: Vec<(usize, HermitianOperator<T>)>,
}

/// Serialized form of a measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmDoc {
    pub dim: usize,
    pub elements: Vec<PovmElementDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmElementDoc {
    pub label: usize,
    pub op: MatrixDoc,
}

impl<T: Scalar> Povm<T> {
    pub fn new(dim: usize, elements: Vec<(usize, HermitianOperator<T>)>) -> Result<Self> {
        Self::new_with(dim, elements, &Tolerances::default())
    }

    pub fn new_with(
        dim: usize,
        elements: Vec<(usize, HermitianOperator<T>)>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::validation("measurement needs at least one element"));
        }
        let mut sum = HermitianOperator::zero(dim);
        for (label, op) in &elements {
            if op.dim() != dim {
                return Err(Error::validation(format!(
                    "element labeled {label} has dimension {}, expected {dim}",
                    op.dim()
                )));
            }
            let spec = opalg::eig_hermitian_with(op, tol)?;
            if let Some(min) = spec.eigenvalues.last() {
                if *min < -tol.psd {
                    return Err(Error::validation(format!(
                        "element labeled {label} has negative eigenvalue {}",
                        min.to_f64().unwrap_or(f64::NAN)
                    )));
                }
            }
            sum = sum.add(op)?;
        }
        let deviation = sum.sub(&HermitianOperator::identity(dim))?.frobenius_norm();
        if deviation > tol.psd {
            return Err(Error::validation(format!(
                "measurement elements sum to identity only within {:e}",
                deviation.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Povm { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[(usize, HermitianOperator<T>)] {
        &self.elements
    }

    /// True when every key in `0..size` labels at least one element and no
    /// label falls outside the key space.
    pub fn covers(&self, size: usize) -> bool {
        let mut seen = vec![false; size];
        for (label, _) in &self.elements {
            if *label >= size {
                return false;
            }
            seen[*label] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_doc(&self) -> PovmDoc {
        PovmDoc {
            dim: self.dim,
            elements: self
                .elements
                .iter()
                .map(|(label, op)| PovmElementDoc {
                    label: *label,
                    op: op.to_doc(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &PovmDoc) -> Result<Self> {
        let elements = doc
            .elements
            .iter()
            .map(|e| Ok((e.label, HermitianOperator::from_doc(&e.op)?)))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(doc.dim, elements)
    }
}

/// Weighted ensemble of density operators.
#[derive(Debug, Clone)]
pub struct Ensemble<T: Scalar> {
    items: Vec<(T, HermitianOperator<T>)>,
}

impl<T: Scalar> Ensemble<T> {
    pub fn new(items: Vec<(T, HermitianOperator<T>)>) -> Result<Self> {
        Self::new_with(items, &Tolerances::default())
    }

    pub fn new_with(items: Vec<(T, HermitianOperator<T>)>, tol: &Tolerances<T>) -> Result<Self> {
        let mut total = T::zero();
        for (p, state) in &items {
            if *p < T::zero() {
                return Err(Error::validation("ensemble priors must be nonnegative"));
            }
            if *p > tol.support_cutoff {
                state.validate_density(tol)?;
            }
            total = total + *p;
        }
        if (total - T::one()).abs() > tol.prob_sum {
            return Err(Error::validation(format!(
                "ensemble priors sum to {}, expected 1",
                total.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Ensemble { items })
    }

    pub fn items(&self) -> &[(T, HermitianOperator<T>)] {
        &self.items
    }
}

/// Helstrom outcome: the optimal success probability, the projective
/// measurement achieving it, and the report.
#[derive(Debug, Clone)]
pub struct HelstromOutcome<T: Scalar> {
    pub p_guess: T,
    pub measurement: Povm<T>,
    pub report: MetricReport,
}

/// Optimal binary discrimination: `P_guess = ½ + ½ tr|p₀ρ₀ − p₁ρ₁|`, achieved
/// by projecting onto the positive eigenspace of the weighted difference.
/// Achievability is verified by scoring the returned measurement.
pub fn helstrom<T: Scalar>(e: &Ensemble<T>) -> Result<HelstromOutcome<T>> {
    helstrom_with(e, &Tolerances::default())
}

pub fn helstrom_with<T: Scalar>(
    e: &Ensemble<T>,
    tol: &Tolerances<T>,
) -> Result<HelstromOutcome<T>> {
    if e.items().len() != 2 {
        return Err(Error::validation(format!(
            "binary discrimination needs exactly 2 hypotheses, got {}",
            e.items().len()
        )));
    }
    let (p0, rho0) = &e.items()[0];
    let (p1, rho1) = &e.items()[1];
    let delta = rho0.scale(*p0).sub(&rho1.scale(*p1))?;
    let half = T::from_f64_c(0.5);
    let p_guess = half + half * opalg::trace_norm_with(&delta, tol)?;

    let spec = opalg::eig_hermitian_with(&delta, tol)?;
    let m0 = spec.projector(|l| l > T::zero());
    let m1 = HermitianOperator::identity(delta.dim()).sub(&m0)?;
    let measurement = Povm::new_with(delta.dim(), vec![(0, m0), (1, m1)], tol)?;

    // Score the measurement on the two-hypothesis cq state to confirm the
    // optimum is achieved, not just predicted.
    let ks = KeySpace::new(1)?;
    let as_cq = CqState::new_with(
        ks,
        delta.dim(),
        vec![
            states::Branch {
                ka: 0,
                kb: 0,
                prob: *p0,
                eve_op: rho0.clone(),
            },
            states::Branch {
                ka: 1,
                kb: 1,
                prob: *p1,
                eve_op: rho1.clone(),
            },
        ],
        tol,
    )?;
    let achieved = povm_guess_prob_with(&as_cq, &measurement, tol)?;
    if (achieved - p_guess).abs() > tol.assert_slack {
        return Err(Error::numerical(format!(
            "optimal measurement scored {} against predicted {}",
            achieved.to_f64().unwrap_or(f64::NAN),
            p_guess.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let mut report = MetricReport::new();
    report.push(
        "p_guess",
        p_guess.to_f64_lossy(),
        "helstrom: 1/2 + 1/2 tr|p0 rho0 - p1 rho1|",
    );
    report.push(
        "achieved",
        achieved.to_f64_lossy(),
        "helstrom: positive-eigenspace projector scored on the ensemble",
    );
    Ok(HelstromOutcome {
        p_guess,
        measurement,
        report,
    })
}

/// Probability that the measurement outputs Alice's key:
/// `Σ_branches p · tr[M_{k_A} ρ]`. Equals `tr[Γ ζ]` with `Γ` from
/// [`build_gamma`] applied to the corrected state.
pub fn povm_guess_prob<T: Scalar>(s: &CqState<T>, m: &Povm<T>) -> Result<T> {
    povm_guess_prob_with(s, m, &Tolerances::default())
}

pub fn povm_guess_prob_with<T: Scalar>(
    s: &CqState<T>,
    m: &Povm<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    let _ = tol;
    if m.dim() != s.eve_dim() {
        return Err(Error::validation(format!(
            "measurement dimension {} differs from eavesdropper dimension {}",
            m.dim(),
            s.eve_dim()
        )));
    }
    if !m.covers(s.keyspace().size()) {
        return Err(Error::validation(
            "measurement labels do not cover the key space",
        ));
    }
    let mut acc = T::zero();
    for b in s.branches() {
        for (label, op) in m.elements() {
            if *label == b.ka {
                acc = acc + b.prob * op.trace_product(&b.eve_op)?;
            }
        }
    }
    Ok(acc)
}

/// Block embedding `Γ = Σ_k |k,k⟩⟨k,k| ⊗ M_k` of a measurement into the
/// joint register, with `M_k` the sum of the elements labeled `k`.
/// Satisfies `0 ≤ Γ ≤ I`, and scores exactly `2^{-bits}` on any ideal state.
pub fn build_gamma<T: Scalar>(m: &Povm<T>, ks: KeySpace) -> Result<HermitianOperator<T>> {
    build_gamma_with(m, ks, &Tolerances::default())
}

pub fn build_gamma_with<T: Scalar>(
    m: &Povm<T>,
    ks: KeySpace,
    tol: &Tolerances<T>,
) -> Result<HermitianOperator<T>> {
    let size = ks.size();
    if !m.covers(size) {
        return Err(Error::validation(
            "measurement labels do not cover the key space",
        ));
    }
    let d = m.dim();
    let dim = size
        .checked_mul(size)
        .and_then(|v| v.checked_mul(d))
        .ok_or_else(|| Error::resource("joint dimension overflow".to_string()))?;
    if dim > tol.dim_cap {
        return Err(Error::resource(format!(
            "joint dimension {dim} exceeds cap {}",
            tol.dim_cap
        )));
    }
    let mut out = HermitianOperator::zero(dim);
    for (label, op) in m.elements() {
        let base = (label * size + label) * d;
        for i in 0..d {
            for j in 0..d {
                let v = out.get(base + i, base + j) + op.get(i, j);
                out.set(base + i, base + j, v);
            }
        }
    }
    Ok(out)
}

/// Guessing bound `2^{-bits} + ε_sec` with `ε_sec` the secrecy distance at
/// the supplied reference system, checked against the best guessing value.
///
/// Report entries: `uniform_floor`, `eps_sec_term`, `guess_bound`,
/// `best_guess_prob`, `gap`.
pub fn guess_bound<T: Scalar>(
    s: &CqState<T>,
    sigma: &HermitianOperator<T>,
) -> Result<MetricReport> {
    guess_bound_with(s, sigma, &Tolerances::default())
}

pub fn guess_bound_with<T: Scalar>(
    s: &CqState<T>,
    sigma: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<MetricReport> {
    let zeta = states::correctify(s);
    let ideal = states::ideal_state_with(s.keyspace(), sigma, tol)?;
    let eps_sec = metrics::trace_distance_cq_with(&zeta, &ideal, tol)?;
    let floor: T = s.keyspace().uniform_prob();
    let bound = floor + eps_sec;

    let best = best_guess_prob_with(s, tol)?;
    if best.value > bound + tol.assert_slack {
        return Err(Error::numerical(format!(
            "guessing value {} exceeds its bound {}",
            best.value.to_f64().unwrap_or(f64::NAN),
            bound.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let mut r = MetricReport::new();
    r.push(
        "uniform_floor",
        floor.to_f64_lossy(),
        "guess_bound: 2^{-bits} blind-guess probability",
    );
    r.push(
        "eps_sec_term",
        eps_sec.to_f64_lossy(),
        "guess_bound: trace distance of corrected state to ideal at the given reference system",
    );
    r.push(
        "guess_bound",
        bound.to_f64_lossy(),
        "guess_bound: uniform floor plus secrecy distance",
    );
    r.push(
        "best_guess_prob",
        best.value.to_f64_lossy(),
        best.provenance(),
    );
    r.push(
        "gap",
        (bound - best.value).to_f64_lossy(),
        "guess_bound: bound minus best guessing value",
    );
    Ok(r)
}

/// How the best guessing value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessMethod {
    /// Exact binary optimum.
    Helstrom,
    /// Exact classical maximum-a-posteriori value on commuting conditionals.
    MapCommuting,
    /// Pretty-good-measurement value: a lower bound, not the optimum.
    PrettyGoodLowerBound,
}

/// Best guessing value with its method tag.
#[derive(Debug, Clone)]
pub struct BestGuess<T: Scalar> {
    pub value: T,
    pub method: GuessMethod,
    pub report: MetricReport,
}

impl<T: Scalar> BestGuess<T> {
    pub fn is_exact(&self) -> bool {
        self.method != GuessMethod::PrettyGoodLowerBound
    }

    fn provenance(&self) -> &'static str {
        match self.method {
            GuessMethod::Helstrom => "best_guess_prob: exact binary optimum",
            GuessMethod::MapCommuting => {
                "best_guess_prob: exact maximum-a-posteriori value on commuting conditionals"
            }
            GuessMethod::PrettyGoodLowerBound => {
                "best_guess_prob: pretty-good-measurement value -- lower bound, not optimal"
            }
        }
    }
}

/// Best probability of guessing Alice's key from the eavesdropper's system.
///
/// The ensemble being discriminated mixes the conditionals over Bob's
/// register at fixed `k_A`. Two keys take the exact binary optimum; pairwise
/// commuting conditionals take the exact maximum-a-posteriori value in the
/// common eigenbasis (ties broken toward the smaller key); everything else
/// falls back to the pretty-good measurement, flagged non-optimal.
pub fn best_guess_prob<T: Scalar>(s: &CqState<T>) -> Result<BestGuess<T>> {
    best_guess_prob_with(s, &Tolerances::default())
}

pub fn best_guess_prob_with<T: Scalar>(
    s: &CqState<T>,
    tol: &Tolerances<T>,
) -> Result<BestGuess<T>> {
    let size = s.keyspace().size();
    let d = s.eve_dim();
    let weighted = weighted_conditionals(s)?;
    let priors = states::key_marginal(s, Side::A);

    let (value, method) = if size == 2 {
        let items = (0..2)
            .map(|k| normalized(&weighted[k], priors.prob(k), d))
            .collect();
        let outcome = helstrom_with(&Ensemble::new_with(items, tol)?, tol)?;
        (outcome.p_guess, GuessMethod::Helstrom)
    } else if pairwise_commuting(&weighted, tol)? {
        (map_value(&weighted, tol)?, GuessMethod::MapCommuting)
    } else {
        (
            pgm_value(&weighted, tol)?,
            GuessMethod::PrettyGoodLowerBound,
        )
    };

    let mut report = MetricReport::new();
    let tag = match method {
        GuessMethod::Helstrom => "helstrom",
        GuessMethod::MapCommuting => "map_commuting",
        GuessMethod::PrettyGoodLowerBound => "pretty_good_lower_bound",
    };
    let bg = BestGuess {
        value,
        method,
        report: MetricReport::new(),
    };
    report.push("best_guess_prob", value.to_f64_lossy(), bg.provenance());
    report.push(
        "exact",
        if bg.is_exact() { 1.0 } else { 0.0 },
        format!("best_guess_prob: method {tag}"),
    );
    Ok(BestGuess { report, ..bg })
}

/// Weighted conditionals `W_k = Σ_{k_B} Pr(k, k_B) ρ_E(k, k_B)`, the
/// ensemble the eavesdropper discriminates when guessing Alice's key; the
/// guessing value of a measurement `{M_k}` is `Σ_k tr[M_k W_k]`.
fn weighted_conditionals<T: Scalar>(s: &CqState<T>) -> Result<Vec<HermitianOperator<T>>> {
    let size = s.keyspace().size();
    let mut weighted = vec![HermitianOperator::zero(s.eve_dim()); size];
    for b in s.branches() {
        weighted[b.ka] = weighted[b.ka].add(&b.eve_op.scale(b.prob))?;
    }
    Ok(weighted)
}

/// Pretty-good-measurement guessing value on the induced ensemble: a lower
/// bound on the optimum for any state.
pub fn pgm_guess_prob<T: Scalar>(s: &CqState<T>) -> Result<T> {
    pgm_value(&weighted_conditionals(s)?, &Tolerances::default())
}

/// Exact maximum-a-posteriori guessing value; requires pairwise commuting
/// induced conditionals.
pub fn map_guess_prob<T: Scalar>(s: &CqState<T>) -> Result<T> {
    let tol = Tolerances::default();
    let weighted = weighted_conditionals(s)?;
    if !pairwise_commuting(&weighted, &tol)? {
        return Err(Error::validation(
            "maximum-a-posteriori value requires commuting conditionals",
        ));
    }
    map_value(&weighted, &tol)
}

fn normalized<T: Scalar>(
    weighted: &HermitianOperator<T>,
    prior: T,
    dim: usize,
) -> (T, HermitianOperator<T>) {
    if prior.is_zero() {
        // Zero-weight hypothesis: any density works, it never scores.
        let uniform = T::from_f64_c((dim as f64).recip());
        (prior, HermitianOperator::from_diag(&vec![uniform; dim]))
    } else {
        (prior, weighted.scale(prior.recip()))
    }
}

fn pairwise_commuting<T: Scalar>(
    ops: &[HermitianOperator<T>],
    tol: &Tolerances<T>,
) -> Result<bool> {
    for i in 0..ops.len() {
        for j in (i + 1)..ops.len() {
            if opalg::commutator_norm(&ops[i], &ops[j])? > tol.commutator {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Classical maximum-a-posteriori value `Σ_e max_k (W_k)_{ee}` in a common
/// eigenbasis of the weighted conditionals.
fn map_value<T: Scalar>(weighted: &[HermitianOperator<T>], tol: &Tolerances<T>) -> Result<T> {
    let basis = common_eigenbasis(weighted, tol)?;
    let mut total = T::zero();
    for v in &basis {
        let mut best = T::neg_infinity();
        // Ties broken toward the smaller key by strict comparison.
        for w in weighted {
            let val = w.expectation(v);
            if val > best {
                best = val;
            }
        }
        total = total + best;
    }
    Ok(total)
}

/// Orthonormal basis diagonalizing every operator in a commuting family:
/// eigenspaces of the first operator are refined by the next, recursively.
#[allow(clippy::needless_range_loop)] // c is a matrix column index
fn common_eigenbasis<T: Scalar>(
    ops: &[HermitianOperator<T>],
    tol: &Tolerances<T>,
) -> Result<Vec<Vec<Complex<T>>>> {
    let d = ops.first().map_or(0, HermitianOperator::dim);
    let identity_basis: Vec<Vec<Complex<T>>> = (0..d)
        .map(|i| {
            let mut v = vec![Complex::zero(); d];
            v[i] = Complex::new(T::one(), T::zero());
            v
        })
        .collect();

    let mut blocks: Vec<Vec<Vec<Complex<T>>>> = vec![identity_basis];
    for op in ops {
        let mut next = Vec::new();
        for block in &blocks {
            if block.len() == 1 {
                next.push(block.clone());
                continue;
            }
            // Diagonalize the operator restricted to the block's span,
            // through matrix-vector products to keep the restriction
            // quadratic rather than quartic in the dimension.
            let k = block.len();
            let applied: Vec<Vec<Complex<T>>> = block
                .iter()
                .map(|vj| {
                    (0..d)
                        .map(|r| {
                            let mut acc = Complex::<T>::zero();
                            for c in 0..d {
                                acc = acc + op.get(r, c) * vj[c];
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
            let mut restricted = vec![Complex::<T>::zero(); k * k];
            for (i, vi) in block.iter().enumerate() {
                for (j, wj) in applied.iter().enumerate() {
                    let mut acc = Complex::<T>::zero();
                    for r in 0..d {
                        acc = acc + vi[r].conj() * wj[r];
                    }
                    restricted[i * k + j] = acc;
                }
            }
            let spec = opalg::eig_hermitian_with(&HermitianOperator::from_raw(k, restricted), tol)?;
            // Rotate the block basis and split by eigenvalue clusters.
            let rotated: Vec<Vec<Complex<T>>> = spec
                .eigenvectors
                .iter()
                .map(|coeffs| {
                    let mut v = vec![Complex::<T>::zero(); d];
                    for (c, bv) in coeffs.iter().zip(block) {
                        for r in 0..d {
                            v[r] = v[r] + *c * bv[r];
                        }
                    }
                    v
                })
                .collect();
            let mut start = 0usize;
            for i in 1..=k {
                let split = i == k
                    || (spec.eigenvalues[i - 1] - spec.eigenvalues[i]).abs() > tol.commutator;
                if split {
                    next.push(rotated[start..i].to_vec());
                    start = i;
                }
            }
        }
        blocks = next;
    }
    Ok(blocks.into_iter().flatten().collect())
}

/// Pretty-good-measurement guessing value `Σ_k tr[M_k W_k]` with
/// `M_k = S^{-1/2} W_k S^{-1/2}` on the support of `S = Σ_k W_k`; the
/// identity deficit off the support goes to the smallest key.
fn pgm_value<T: Scalar>(weighted: &[HermitianOperator<T>], tol: &Tolerances<T>) -> Result<T> {
    let d = weighted.first().map_or(0, HermitianOperator::dim);
    let mut total_op = HermitianOperator::zero(d);
    for w in weighted {
        total_op = total_op.add(w)?;
    }
    let spec = opalg::eig_hermitian_with(&total_op, tol)?;
    let inv_sqrt = spec.apply(|l| {
        if l > tol.support_cutoff {
            l.sqrt().recip()
        } else {
            T::zero()
        }
    });

    let mut value = T::zero();
    let mut elements: Vec<(usize, HermitianOperator<T>)> = Vec::with_capacity(weighted.len());
    for (k, w) in weighted.iter().enumerate() {
        // M_k = S^{-1/2} W_k S^{-1/2}, assembled through the sandwich
        // identity tr[M_k W_k] after symmetrization.
        let m = sandwich(&inv_sqrt, w);
        value = value + m.trace_product(w)?;
        elements.push((k, m));
    }
    // Completion element for the kernel of S, mapped to key 0: it never
    // scores because every W_k lives on the support.
    let kernel = spec.projector(|l| l <= tol.support_cutoff);
    if kernel.frobenius_norm() > T::zero() {
        elements[0].1 = elements[0].1.add(&kernel)?;
    }
    // The assembled elements must form a measurement; this guards the
    // support-cutoff bookkeeping against an ill-conditioned average state.
    Povm::new_with(d, elements, tol).map_err(|e| {
        Error::numerical(format!(
            "pretty-good measurement did not close to a valid measurement \
             (ill-conditioned ensemble average): {e}"
        ))
    })?;
    Ok(value)
}

/// `B ← A B A` for self-adjoint `A`, `B` (self-adjoint by symmetry).
fn sandwich<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> HermitianOperator<T> {
    let d = a.dim();
    let mut ab = vec![Complex::<T>::zero(); d * d];
    for i in 0..d {
        for k in 0..d {
            let v = a.get(i, k);
            if v.norm_sqr().is_zero() {
                continue;
            }
            for j in 0..d {
                ab[i * d + j] = ab[i * d + j] + v * b.get(k, j);
            }
        }
    }
    let mut out = vec![Complex::<T>::zero(); d * d];
    for i in 0..d {
        for k in 0..d {
            let v = ab[i * d + k];
            if v.norm_sqr().is_zero() {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = out[i * d + j] + v * a.get(k, j);
            }
        }
    }
    // Symmetrize away rounding skew.
    let half = T::from_f64_c(0.5);
    let mut sym = vec![Complex::<T>::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            sym[i * d + j] =
                (out[i * d + j] + out[j * d + i].conj()) * Complex::new(half, T::zero());
        }
    }
    HermitianOperator::from_raw(d, sym)
}
