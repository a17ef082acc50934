//! Classical-quantum key states and key distributions.
//!
//! A [`CqState`] is classical on Alice's and Bob's key registers and quantum
//! on the eavesdropper's system: a list of branches `(k_A, k_B, probability,
//! conditional operator)`. The joint density operator is block diagonal in
//! the `(k_A, k_B)` classical register, so the branch list is the primary
//! representation and the dense operator is materialized only on demand.
//!
//! Keys are integers `0..2^bits` in big-endian bit order; the composite
//! register order is `(k_A, k_B, E)` with the leftmost factor most
//! significant.

use crate::error::{Error, Result};
use crate::opalg::{self, HermitianOperator, MatrixDoc};
use crate::scalar::{Prob, Scalar};
use crate::tol::Tolerances;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Key alphabet of `2^bits` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeySpace {
    bits: u32,
}

impl KeySpace {
    pub fn new(bits: u32) -> Result<Self> {
        Self::new_with(bits, &Tolerances::default())
    }

    pub fn new_with(bits: u32, tol: &Tolerances<f64>) -> Result<Self> {
        if bits == 0 {
            return Err(Error::validation("key space needs at least one bit"));
        }
        let size = 1u128 << bits;
        if size > tol.dim_cap as u128 {
            return Err(Error::resource(format!(
                "key space size 2^{bits} exceeds dimension cap {}",
                tol.dim_cap
            )));
        }
        Ok(KeySpace { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn size(&self) -> usize {
        1usize << self.bits
    }

    /// `2^{-bits}`, the uniform key probability.
    pub fn uniform_prob<T: Scalar>(&self) -> T {
        T::from_f64_c((self.size() as f64).recip())
    }
}

/// One classical branch of a cq state.
#[derive(Debug, Clone)]
pub struct Branch<T: Scalar> {
    pub ka: usize,
    pub kb: usize,
    pub prob: T,
    pub eve_op: HermitianOperator<T>,
}

/// Classical-quantum state over `(k_A, k_B, E)`.
#[derive(Debug, Clone)]
pub struct CqState<T: Scalar> {
    keyspace: KeySpace,
    eve_dim: usize,
    branches: Vec<Branch<T>>,
}

/// Serialized form of a cq state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CqStateDoc {
    pub bits: u32,
    pub eve_dim: usize,
    pub branches: Vec<BranchDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchDoc {
    pub ka: usize,
    pub kb: usize,
    pub p: f64,
    pub eve_op: MatrixDoc,
}

impl<T: Scalar> CqState<T> {
    /// Validates and canonicalizes a branch list: probabilities nonnegative
    /// and summing to one, conditional operators unit-trace positive
    /// semidefinite, at most one branch per `(k_A, k_B)` pair.
    pub fn new(keyspace: KeySpace, eve_dim: usize, branches: Vec<Branch<T>>) -> Result<Self> {
        Self::new_with(keyspace, eve_dim, branches, &Tolerances::default())
    }

    pub fn new_with(
        keyspace: KeySpace,
        eve_dim: usize,
        mut branches: Vec<Branch<T>>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if eve_dim == 0 {
            return Err(Error::validation(
                "eavesdropper dimension must be at least 1",
            ));
        }
        let size = keyspace.size();
        let mut seen = BTreeMap::new();
        let mut total = T::zero();
        for b in &branches {
            if b.ka >= size || b.kb >= size {
                return Err(Error::validation(format!(
                    "branch key ({}, {}) outside key space of size {size}",
                    b.ka, b.kb
                )));
            }
            if seen.insert((b.ka, b.kb), ()).is_some() {
                return Err(Error::validation(format!(
                    "duplicate branch for key pair ({}, {})",
                    b.ka, b.kb
                )));
            }
            if b.prob < T::zero() {
                return Err(Error::validation(format!(
                    "negative branch probability {} at ({}, {})",
                    b.prob.to_f64().unwrap_or(f64::NAN),
                    b.ka,
                    b.kb
                )));
            }
            if b.eve_op.dim() != eve_dim {
                return Err(Error::validation(format!(
                    "conditional operator dimension {} differs from eve_dim {eve_dim}",
                    b.eve_op.dim()
                )));
            }
            let tr = b.eve_op.trace();
            if (tr - T::one()).abs() > tol.psd {
                return Err(Error::validation(format!(
                    "conditional operator trace {} deviates from 1 at ({}, {})",
                    tr.to_f64().unwrap_or(f64::NAN),
                    b.ka,
                    b.kb
                )));
            }
            let spec = opalg::eig_hermitian_with(&b.eve_op, tol)?;
            if let Some(min) = spec.eigenvalues.last() {
                if *min < -tol.psd {
                    return Err(Error::validation(format!(
                        "conditional operator at ({}, {}) has negative eigenvalue {}",
                        b.ka,
                        b.kb,
                        min.to_f64().unwrap_or(f64::NAN)
                    )));
                }
            }
            total = total + b.prob;
        }
        if (total - T::one()).abs() > tol.prob_sum {
            return Err(Error::validation(format!(
                "branch probabilities sum to {}, expected 1",
                total.to_f64().unwrap_or(f64::NAN)
            )));
        }
        branches.sort_by_key(|b| (b.ka, b.kb));
        Ok(CqState {
            keyspace,
            eve_dim,
            branches,
        })
    }

    pub fn keyspace(&self) -> KeySpace {
        self.keyspace
    }

    pub fn eve_dim(&self) -> usize {
        self.eve_dim
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn branch(&self, ka: usize, kb: usize) -> Option<&Branch<T>> {
        self.branches.iter().find(|b| b.ka == ka && b.kb == kb)
    }

    /// Probability that the two key registers disagree.
    pub fn mismatch_prob(&self) -> T {
        self.branches
            .iter()
            .filter(|b| b.ka != b.kb)
            .fold(T::zero(), |acc, b| acc + b.prob)
    }

    /// Whether every branch has agreeing keys.
    pub fn is_corrected(&self) -> bool {
        self.branches.iter().all(|b| b.ka == b.kb)
    }

    pub fn to_doc(&self) -> CqStateDoc {
        CqStateDoc {
            bits: self.keyspace.bits(),
            eve_dim: self.eve_dim,
            branches: self
                .branches
                .iter()
                .map(|b| BranchDoc {
                    ka: b.ka,
                    kb: b.kb,
                    p: b.prob.to_f64().unwrap(),
                    eve_op: b.eve_op.to_doc(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &CqStateDoc) -> Result<Self> {
        let keyspace = KeySpace::new(doc.bits)?;
        let branches = doc
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    ka: b.ka,
                    kb: b.kb,
                    prob: T::from_f64_c(b.p),
                    eve_op: HermitianOperator::from_doc(&b.eve_op)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CqState::new(keyspace, doc.eve_dim, branches)
    }
}

/// Probability vector over a key space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDistribution<P: Prob> {
    probs: Vec<P>,
}

impl<P: Prob> ClassicalDistribution<P> {
    pub fn new(probs: Vec<P>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::validation("distribution needs at least one outcome"));
        }
        let mut total = P::zero();
        for (i, p) in probs.iter().enumerate() {
            if *p < P::zero() {
                return Err(Error::validation(format!(
                    "negative probability at outcome {i}"
                )));
            }
            total = total + p.clone();
        }
        let dev = (total - P::one()).abs();
        if dev > P::from_dyadic(1e-12) {
            return Err(Error::validation(format!(
                "probabilities deviate from unit sum by {:e}",
                dev.to_f64_lossy()
            )));
        }
        Ok(ClassicalDistribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        let p = P::one() / P::from_count(n as u64);
        ClassicalDistribution { probs: vec![p; n] }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut probs = vec![P::zero(); n];
        probs[at] = P::one();
        ClassicalDistribution { probs }
    }

    pub fn support(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> P {
        self.probs[k].clone()
    }

    pub fn is_point_mass(&self) -> bool {
        self.probs.iter().filter(|p| p.is_pos()).count() == 1
    }

    pub fn to_f64(&self) -> ClassicalDistribution<f64> {
        ClassicalDistribution {
            probs: self.probs.iter().map(Prob::to_f64_lossy).collect(),
        }
    }
}

/// Statistical distance `½ Σ_k |P(k) − U(k)|`.
pub fn statistical_distance<P: Prob>(
    p: &ClassicalDistribution<P>,
    u: &ClassicalDistribution<P>,
) -> Result<P> {
    if p.support() != u.support() {
        return Err(Error::validation(format!(
            "statistical distance needs equal supports, got {} and {}",
            p.support(),
            u.support()
        )));
    }
    let two = P::one() + P::one();
    let sum = p
        .probs()
        .iter()
        .zip(u.probs())
        .fold(P::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs());
    Ok(sum / two)
}

/// Dense joint density operator of a cq state, block diagonal in the
/// `(k_A, k_B)` register.
pub fn to_density<T: Scalar>(s: &CqState<T>) -> Result<HermitianOperator<T>> {
    to_density_with(s, &Tolerances::default())
}

pub fn to_density_with<T: Scalar>(
    s: &CqState<T>,
    tol: &Tolerances<T>,
) -> Result<HermitianOperator<T>> {
    let size = s.keyspace().size();
    let dim = size
        .checked_mul(size)
        .and_then(|v| v.checked_mul(s.eve_dim()))
        .ok_or_else(|| Error::resource("joint dimension overflow".to_string()))?;
    if dim > tol.dim_cap {
        return Err(Error::resource(format!(
            "joint dimension {dim} = {size}^2 x {} exceeds cap {}",
            s.eve_dim(),
            tol.dim_cap
        )));
    }
    let d = s.eve_dim();
    let mut out = HermitianOperator::zero(dim);
    for b in s.branches() {
        let base = (b.ka * size + b.kb) * d;
        let w = Complex::new(b.prob, T::zero());
        for i in 0..d {
            for j in 0..d {
                let v = w * b.eve_op.get(i, j);
                if !v.norm_sqr().is_zero() {
                    out.set(base + i, base + j, v);
                }
            }
        }
    }
    Ok(out)
}

/// The ideal key state: uniform perfectly correlated keys with an
/// eavesdropper system in a fixed state `σ` independent of the key.
pub fn ideal_state<T: Scalar>(ks: KeySpace, sigma: &HermitianOperator<T>) -> Result<CqState<T>> {
    ideal_state_with(ks, sigma, &Tolerances::default())
}

pub fn ideal_state_with<T: Scalar>(
    ks: KeySpace,
    sigma: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<CqState<T>> {
    sigma.validate_density(tol)?;
    let p = ks.uniform_prob::<T>();
    let branches = (0..ks.size())
        .map(|k| Branch {
            ka: k,
            kb: k,
            prob: p,
            eve_op: sigma.clone(),
        })
        .collect();
    CqState::new_with(ks, sigma.dim(), branches, tol)
}

/// Overwrites Bob's register with Alice's: every branch `(k_A, k_B, p, ρ)`
/// becomes `(k_A, k_A, p, ρ)`, merging collisions by probability-weighted
/// mixture. Idempotent.
pub fn correctify<T: Scalar>(s: &CqState<T>) -> CqState<T> {
    let d = s.eve_dim();
    let mut groups: BTreeMap<usize, (T, HermitianOperator<T>)> = BTreeMap::new();
    for b in s.branches() {
        if b.prob.is_zero() {
            continue;
        }
        let entry = groups
            .entry(b.ka)
            .or_insert_with(|| (T::zero(), HermitianOperator::zero(d)));
        entry.0 = entry.0 + b.prob;
        entry.1 = entry.1.add(&b.eve_op.scale(b.prob)).expect("same eve dim");
    }
    let branches = groups
        .into_iter()
        .map(|(k, (p, weighted))| Branch {
            ka: k,
            kb: k,
            prob: p,
            eve_op: weighted.scale(p.recip()),
        })
        .collect();
    // Invariants survive the merge: probabilities regroup and mixtures of
    // unit-trace PSD operators stay unit-trace PSD.
    CqState {
        keyspace: s.keyspace(),
        eve_dim: d,
        branches,
    }
}

/// Probability-weighted average of the conditional operators; equals the
/// reduced state on the eavesdropper's system.
pub fn sigma_avg<T: Scalar>(s: &CqState<T>) -> HermitianOperator<T> {
    let mut acc = HermitianOperator::zero(s.eve_dim());
    for b in s.branches() {
        acc = acc.add(&b.eve_op.scale(b.prob)).expect("same eve dim");
    }
    acc
}

/// Which key register to marginalize onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Marginal key distribution on the chosen register.
pub fn key_marginal<T: Scalar>(s: &CqState<T>, side: Side) -> ClassicalDistribution<T> {
    let mut probs = vec![T::zero(); s.keyspace().size()];
    for b in s.branches() {
        let k = match side {
            Side::A => b.ka,
            Side::B => b.kb,
        };
        probs[k] = probs[k] + b.prob;
    }
    ClassicalDistribution { probs }
}

/// The maximally correlated key vector `Σ_k 2^{-bits/2} |k, k⟩` on the
/// doubled register, unit norm.
pub fn max_entangled_ket<T: Scalar>(ks: KeySpace) -> Vec<Complex<T>> {
    let size = ks.size();
    let amp = T::from_f64_c((size as f64).sqrt().recip());
    let mut v = vec![Complex::zero(); size * size];
    for k in 0..size {
        v[k * size + k] = Complex::new(amp, T::zero());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn ket(k: usize, dim: usize) -> HermitianOperator<f64> {
        let mut d = vec![0.0; dim];
        d[k] = 1.0;
        HermitianOperator::from_diag(&d)
    }

    fn plus() -> HermitianOperator<f64> {
        HermitianOperator::new(2, vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap()
    }

    fn one_bit() -> KeySpace {
        KeySpace::new(1).unwrap()
    }

    #[test]
    fn to_density_matches_hand_expansion() {
        // 1-bit key, Pr(0,0)=Pr(1,1)=1/2, conditional |k⟩⟨k|: expanding the
        // eight-dimensional sum by hand puts 1/2 at indices 0 and 7 in the
        // (k_A, k_B, e) ordering.
        let s = CqState::new(
            one_bit(),
            2,
            vec![
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.5,
                    eve_op: ket(0, 2),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 0.5,
                    eve_op: ket(1, 2),
                },
            ],
        )
        .unwrap();
        let rho = to_density(&s).unwrap();
        let mut expect = vec![0.0; 8];
        expect[0] = 0.5;
        expect[7] = 0.5;
        let expect = HermitianOperator::from_diag(&expect);
        assert!(rho.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn single_branch_block_state_has_unit_trace() {
        let s = CqState::new(
            one_bit(),
            3,
            vec![Branch {
                ka: 1,
                kb: 0,
                prob: 1.0,
                eve_op: HermitianOperator::from_diag(&[1.0 / 3.0; 3]),
            }],
        )
        .unwrap();
        let rho = to_density(&s).unwrap();
        assert_eq!(rho.dim(), 12);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_eve_system_reduces_to_classical_joint() {
        let s = CqState::new(
            one_bit(),
            1,
            vec![
                Branch {
                    ka: 0,
                    kb: 1,
                    prob: 0.25,
                    eve_op: HermitianOperator::identity(1),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 0.75,
                    eve_op: HermitianOperator::identity(1),
                },
            ],
        )
        .unwrap();
        let rho = to_density(&s).unwrap();
        let expect = HermitianOperator::from_diag(&[0.0, 0.25, 0.0, 0.75]);
        assert!(rho.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn ideal_state_is_uniform_and_correlated() {
        let s = ideal_state(one_bit(), &ket(0, 2)).unwrap();
        assert_eq!(s.branches().len(), 2);
        for b in s.branches() {
            assert_eq!(b.ka, b.kb);
            assert_abs_diff_eq!(b.prob, 0.5, epsilon = 1e-15);
        }

        let s2 = ideal_state(KeySpace::new(2).unwrap(), &ket(0, 2)).unwrap();
        assert_eq!(s2.branches().len(), 4);
        for b in s2.branches() {
            assert_abs_diff_eq!(b.prob, 0.25, epsilon = 1e-15);
        }

        let marg = key_marginal(&s2, Side::A);
        for k in 0..4 {
            assert_abs_diff_eq!(marg.prob(k), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn correctify_leaves_corrected_states_unchanged() {
        let s = ideal_state(one_bit(), &plus()).unwrap();
        let z = correctify(&s);
        assert_eq!(z.branches().len(), s.branches().len());
        for (a, b) in z.branches().iter().zip(s.branches()) {
            assert_eq!((a.ka, a.kb), (b.ka, b.kb));
            assert_abs_diff_eq!(a.prob, b.prob, epsilon = 1e-15);
            assert!(a.eve_op.sub(&b.eve_op).unwrap().frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn correctify_merges_by_weighted_mixture() {
        // Weighted-mixture arithmetic: (1/2)|0⟩⟨0| + (1/2)|+⟩⟨+| averaged.
        let s = CqState::new(
            one_bit(),
            2,
            vec![
                Branch {
                    ka: 0,
                    kb: 1,
                    prob: 0.5,
                    eve_op: ket(0, 2),
                },
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.5,
                    eve_op: plus(),
                },
            ],
        )
        .unwrap();
        let z = correctify(&s);
        assert_eq!(z.branches().len(), 1);
        let b = &z.branches()[0];
        assert_eq!((b.ka, b.kb), (0, 0));
        assert_abs_diff_eq!(b.prob, 1.0, epsilon = 1e-15);
        let expect = ket(0, 2).add(&plus()).unwrap().scale(0.5);
        assert!(b.eve_op.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn correctify_is_idempotent() {
        let s = CqState::new(
            one_bit(),
            2,
            vec![
                Branch {
                    ka: 0,
                    kb: 1,
                    prob: 0.3,
                    eve_op: ket(0, 2),
                },
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.2,
                    eve_op: plus(),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 0.5,
                    eve_op: ket(1, 2),
                },
            ],
        )
        .unwrap();
        let once = correctify(&s);
        let twice = correctify(&once);
        assert_eq!(once.branches().len(), twice.branches().len());
        for (a, b) in once.branches().iter().zip(twice.branches()) {
            assert_abs_diff_eq!(a.prob, b.prob, epsilon = 1e-15);
            assert!(a.eve_op.sub(&b.eve_op).unwrap().frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn mismatch_prob_reads_off_branches() {
        let s = CqState::new(
            one_bit(),
            1,
            vec![
                Branch {
                    ka: 0,
                    kb: 1,
                    prob: 0.5,
                    eve_op: HermitianOperator::identity(1),
                },
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.5,
                    eve_op: HermitianOperator::identity(1),
                },
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(s.mismatch_prob(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sigma_avg_examples() {
        // All conditionals equal: average is that operator.
        let s = ideal_state(one_bit(), &plus()).unwrap();
        assert!(sigma_avg(&s).sub(&plus()).unwrap().frobenius_norm() < 1e-15);

        // Half |0⟩⟨0| and half |+⟩⟨+|: matrix average [[3/4,1/4],[1/4,1/4]].
        let s = CqState::new(
            one_bit(),
            2,
            vec![
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.5,
                    eve_op: ket(0, 2),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 0.5,
                    eve_op: plus(),
                },
            ],
        )
        .unwrap();
        let avg = sigma_avg(&s);
        let expect = HermitianOperator::new(
            2,
            vec![c(0.75, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.25, 0.0)],
        )
        .unwrap();
        assert!(avg.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn sigma_avg_agrees_with_partial_trace() {
        let s = CqState::new(
            one_bit(),
            2,
            vec![
                Branch {
                    ka: 0,
                    kb: 1,
                    prob: 0.25,
                    eve_op: ket(0, 2),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 0.75,
                    eve_op: plus(),
                },
            ],
        )
        .unwrap();
        let dense = to_density(&s).unwrap();
        let size = s.keyspace().size();
        let reduced = opalg::partial_trace(&dense, &[size, size, 2], &[2]).unwrap();
        assert!(reduced.sub(&sigma_avg(&s)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn key_marginals() {
        let s = CqState::new(
            one_bit(),
            1,
            vec![
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.75,
                    eve_op: HermitianOperator::identity(1),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 0.25,
                    eve_op: HermitianOperator::identity(1),
                },
            ],
        )
        .unwrap();
        let pa = key_marginal(&s, Side::A);
        assert_abs_diff_eq!(pa.prob(0), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(pa.prob(1), 0.25, epsilon = 1e-15);

        // On a corrected state the two marginals coincide.
        let z = correctify(&s);
        let pa = key_marginal(&z, Side::A);
        let pb = key_marginal(&z, Side::B);
        assert_eq!(pa.probs(), pb.probs());
    }

    #[test]
    fn marginal_sums_to_one() {
        let s = CqState::new(
            KeySpace::new(2).unwrap(),
            1,
            vec![
                Branch {
                    ka: 0,
                    kb: 3,
                    prob: 0.5,
                    eve_op: HermitianOperator::identity(1),
                },
                Branch {
                    ka: 2,
                    kb: 2,
                    prob: 0.5,
                    eve_op: HermitianOperator::identity(1),
                },
            ],
        )
        .unwrap();
        let m = key_marginal(&s, Side::B);
        let total: f64 = m.probs().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn max_entangled_ket_one_bit() {
        let v: Vec<Complex64> = max_entangled_ket(one_bit());
        let amp = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(v[0].re, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(v[3].re, amp, epsilon = 1e-15);
        assert_eq!(v[1], Complex64::new(0.0, 0.0));
        assert_eq!(v[2], Complex64::new(0.0, 0.0));

        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cq_state_rejects_bad_inputs() {
        let bad_sum = CqState::new(
            one_bit(),
            1,
            vec![Branch {
                ka: 0,
                kb: 0,
                prob: 0.9,
                eve_op: HermitianOperator::identity(1),
            }],
        );
        assert!(matches!(bad_sum, Err(Error::Validation(_))));

        let dup = CqState::new(
            one_bit(),
            1,
            vec![
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.5,
                    eve_op: HermitianOperator::identity(1),
                },
                Branch {
                    ka: 0,
                    kb: 0,
                    prob: 0.5,
                    eve_op: HermitianOperator::identity(1),
                },
            ],
        );
        assert!(matches!(dup, Err(Error::Validation(_))));

        let not_density = CqState::new(
            one_bit(),
            2,
            vec![Branch {
                ka: 0,
                kb: 0,
                prob: 1.0,
                eve_op: HermitianOperator::from_diag(&[1.5, -0.5]),
            }],
        );
        assert!(matches!(not_density, Err(Error::Validation(_))));
    }

    #[test]
    fn density_respects_dimension_cap() {
        let tol = Tolerances::<f64>::default().with_dim_cap(7);
        let s = ideal_state(one_bit(), &plus()).unwrap();
        assert!(matches!(to_density_with(&s, &tol), Err(Error::Resource(_))));
    }

    #[test]
    fn cq_doc_round_trips_exactly() {
        let s = CqState::new(
            one_bit(),
            2,
            vec![
                Branch {
                    ka: 0,
                    kb: 1,
                    prob: 1.0 / 3.0 + 1e-16,
                    eve_op: ket(0, 2),
                },
                Branch {
                    ka: 1,
                    kb: 1,
                    prob: 1.0 - (1.0 / 3.0 + 1e-16),
                    eve_op: plus(),
                },
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&s.to_doc()).unwrap();
        let back: CqStateDoc = serde_json::from_str(&json).unwrap();
        let t = CqState::<f64>::from_doc(&back).unwrap();
        for (a, b) in s.branches().iter().zip(t.branches()) {
            assert_eq!(a.prob.to_bits(), b.prob.to_bits());
            assert_eq!(a.eve_op, b.eve_op);
        }
    }

    #[test]
    fn statistical_distance_basics() {
        let p = ClassicalDistribution::new(vec![0.75, 0.25]).unwrap();
        let u = ClassicalDistribution::uniform(2);
        assert_abs_diff_eq!(statistical_distance(&p, &u).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(statistical_distance(&u, &u).unwrap(), 0.0, epsilon = 1e-15);
    }
}
