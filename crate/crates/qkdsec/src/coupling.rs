//! Couplings of key distributions and the one-time-pad secrecy check.
//!
//! The maximal coupling puts `min[P(k), U(k)]` on the diagonal and completes
//! the remainder with the product `S(k)T(k')` over the statistical distance;
//! its mismatch probability equals the statistical distance exactly, which
//! is the identity the independent-coupling comparison is measured against.
//!
//! Everything here is generic over [`Prob`], so dyadic inputs can run in
//! exact rational arithmetic where these identities hold with equality
//! rather than within rounding.

use crate::error::{Error, Result};
use crate::report::MetricReport;
use crate::scalar::Prob;
use crate::states::{statistical_distance, ClassicalDistribution};

/// Joint distribution over key pairs with its prescribed marginals.
#[derive(Debug, Clone)]
pub struct CouplingTable<P: Prob> {
    size: usize,
    joint: Vec<P>,
    row_marginal: ClassicalDistribution<P>,
    col_marginal: ClassicalDistribution<P>,
}

impl<P: Prob> CouplingTable<P> {
    /// Validates entry positivity, unit total, and both marginals.
    pub fn new(
        joint: Vec<P>,
        row_marginal: ClassicalDistribution<P>,
        col_marginal: ClassicalDistribution<P>,
    ) -> Result<Self> {
        let size = row_marginal.support();
        if col_marginal.support() != size || joint.len() != size * size {
            return Err(Error::validation(format!(
                "coupling table shape mismatch: {} entries for marginals of size {size} and {}",
                joint.len(),
                col_marginal.support()
            )));
        }
        let tol_sum = P::from_dyadic(1e-12);
        let tol_marginal = P::from_dyadic(1e-10);
        let mut total = P::zero();
        for (i, v) in joint.iter().enumerate() {
            if *v < -P::from_dyadic(1e-15) {
                return Err(Error::validation(format!(
                    "negative coupling entry at ({}, {})",
                    i / size,
                    i % size
                )));
            }
            total = total + v.clone();
        }
        if (total - P::one()).abs() > tol_sum {
            return Err(Error::validation(
                "coupling entries do not sum to one".to_string(),
            ));
        }
        for k in 0..size {
            let row: P = (0..size).fold(P::zero(), |acc, j| acc + joint[k * size + j].clone());
            if (row - row_marginal.prob(k)).abs() > tol_marginal {
                return Err(Error::validation(format!(
                    "row {k} does not reproduce its marginal"
                )));
            }
            let col: P = (0..size).fold(P::zero(), |acc, i| acc + joint[i * size + k].clone());
            if (col - col_marginal.prob(k)).abs() > tol_marginal {
                return Err(Error::validation(format!(
                    "column {k} does not reproduce its marginal"
                )));
            }
        }
        Ok(CouplingTable {
            size,
            joint,
            row_marginal,
            col_marginal,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, k: usize, kp: usize) -> P {
        self.joint[k * self.size + kp].clone()
    }

    pub fn row_marginal(&self) -> &ClassicalDistribution<P> {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &ClassicalDistribution<P> {
        &self.col_marginal
    }
}

/// The diagonal-maximal coupling of `P` and `U`: `min[P(k), U(k)]` on the
/// diagonal, remainder completed by `S(k)T(k')` over the statistical
/// distance. When the distributions coincide the table is purely diagonal.
pub fn maximal_coupling<P: Prob>(
    p: &ClassicalDistribution<P>,
    u: &ClassicalDistribution<P>,
) -> Result<CouplingTable<P>> {
    let size = p.support();
    if u.support() != size {
        return Err(Error::validation(format!(
            "coupling needs equal supports, got {size} and {}",
            u.support()
        )));
    }
    let sd = statistical_distance(p, u)?;

    let diag: Vec<P> = (0..size)
        .map(|k| P::min_of(&p.prob(k), &u.prob(k)))
        .collect();
    let s: Vec<P> = (0..size).map(|k| p.prob(k) - diag[k].clone()).collect();
    let t: Vec<P> = (0..size).map(|k| u.prob(k) - diag[k].clone()).collect();

    let mut joint = vec![P::zero(); size * size];
    for k in 0..size {
        joint[k * size + k] = diag[k].clone();
    }
    if sd.is_pos() {
        for k in 0..size {
            if !s[k].is_pos() {
                continue;
            }
            for kp in 0..size {
                let add = s[k].clone() * t[kp].clone() / sd.clone();
                joint[k * size + kp] = joint[k * size + kp].clone() + add;
            }
        }
    } else {
        // Statistical distance zero forces S = T = 0; anything else means the
        // completion term is undefined and the construction is inconsistent.
        if s.iter().chain(&t).any(|v| v.is_pos()) {
            return Err(Error::numerical(
                "coupling completion undefined: zero distance with leftover mass".to_string(),
            ));
        }
    }
    CouplingTable::new(joint, p.clone(), u.clone())
}

/// The independent coupling `R(k,k') = P(k)U(k')`.
pub fn independent_coupling<P: Prob>(
    p: &ClassicalDistribution<P>,
    u: &ClassicalDistribution<P>,
) -> Result<CouplingTable<P>> {
    let size = p.support();
    if u.support() != size {
        return Err(Error::validation(format!(
            "coupling needs equal supports, got {size} and {}",
            u.support()
        )));
    }
    let mut joint = vec![P::zero(); size * size];
    for k in 0..size {
        for kp in 0..size {
            joint[k * size + kp] = p.prob(k) * u.prob(kp);
        }
    }
    CouplingTable::new(joint, p.clone(), u.clone())
}

/// Mismatch probability `Pr[K ≠ K'] = 1 − Σ_k R(k,k)`.
pub fn mismatch_prob<P: Prob>(t: &CouplingTable<P>) -> P {
    let diag = (0..t.size()).fold(P::zero(), |acc, k| acc + t.entry(k, k));
    P::one() - diag
}

/// Compares the maximal coupling against the independent one.
///
/// Verifies that the maximal coupling's mismatch equals the statistical
/// distance and that it never exceeds the independent mismatch; flags
/// strictness of the gap. Report entries: `statistical_distance`,
/// `maximal_mismatch`, `independent_mismatch`, `gap`, `strict`.
pub fn independent_coupling_check<P: Prob>(
    p: &ClassicalDistribution<P>,
    u: &ClassicalDistribution<P>,
) -> Result<MetricReport> {
    let sd = statistical_distance(p, u)?;
    let maximal = mismatch_prob(&maximal_coupling(p, u)?);
    let independent = mismatch_prob(&independent_coupling(p, u)?);

    if (maximal.clone() - sd.clone()).abs() > P::from_dyadic(1e-12) {
        return Err(Error::numerical(
            "maximal-coupling mismatch deviates from the statistical distance".to_string(),
        ));
    }
    if independent < sd {
        return Err(Error::numerical(
            "independent mismatch fell below the statistical distance".to_string(),
        ));
    }
    let gap = independent.clone() - sd.clone();
    let strict = gap.is_pos();

    let mut r = MetricReport::new();
    r.push(
        "statistical_distance",
        sd.to_f64_lossy(),
        "independent_coupling_check: half L1 distance of the marginals",
    );
    r.push(
        "maximal_mismatch",
        maximal.to_f64_lossy(),
        "independent_coupling_check: mismatch of the diagonal-maximal coupling",
    );
    r.push(
        "independent_mismatch",
        independent.to_f64_lossy(),
        "independent_coupling_check: mismatch of the product coupling",
    );
    r.push(
        "gap",
        gap.to_f64_lossy(),
        "independent_coupling_check: independent mismatch minus statistical distance",
    );
    r.push(
        "strict",
        if strict { 1.0 } else { 0.0 },
        "independent_coupling_check: 1 when the product coupling strictly exceeds the distance",
    );
    Ok(r)
}

/// Exhaustive one-time-pad secrecy check over bit strings.
///
/// Enumerates `C = X ⊕ K` and reports the worst conditional-versus-prior
/// deviation `max_{x,c} |Pr(x|c) − Pr(x)|` over ciphertexts with positive
/// probability; zero-probability ciphertexts are excluded and counted.
///
/// The deviation vanishes whenever the key is uniform. The converse is
/// verified only when the plaintext support differences span the whole bit
/// group (reported as `converse_applicable`): a degenerate plaintext hides
/// key bias.
///
/// Report entries: `deviation`, `key_uniformity_deviation`,
/// `excluded_ciphertexts`, `converse_applicable`.
#[allow(clippy::needless_range_loop)] // c is the ciphertext value, not just an index
pub fn otp_secrecy_check<P: Prob>(
    key_dist: &ClassicalDistribution<P>,
    plaintext_dist: &ClassicalDistribution<P>,
) -> Result<MetricReport> {
    let n = key_dist.support();
    if plaintext_dist.support() != n {
        return Err(Error::validation(format!(
            "key and plaintext need equal bit-lengths, got supports {n} and {}",
            plaintext_dist.support()
        )));
    }
    if !n.is_power_of_two() {
        return Err(Error::validation(format!(
            "bit-string support must be a power of two, got {n}"
        )));
    }

    // Joint Pr(x, c) = Pr_X(x) · Pr_K(x ⊕ c); ciphertext marginal by summing.
    let mut cipher = vec![P::zero(); n];
    for x in 0..n {
        for c in 0..n {
            cipher[c] = cipher[c].clone() + plaintext_dist.prob(x) * key_dist.prob(x ^ c);
        }
    }

    let mut deviation = P::zero();
    let mut excluded = 0usize;
    for c in 0..n {
        if !cipher[c].is_pos() {
            excluded += 1;
            continue;
        }
        for x in 0..n {
            let joint = plaintext_dist.prob(x) * key_dist.prob(x ^ c);
            let conditional = joint / cipher[c].clone();
            let dev = (conditional - plaintext_dist.prob(x)).abs();
            if dev > deviation {
                deviation = dev;
            }
        }
    }

    let uniform = ClassicalDistribution::<P>::uniform(n);
    let key_dev = key_dist.probs().iter().fold(P::zero(), |acc, v| {
        let d = (v.clone() - uniform.prob(0)).abs();
        if d > acc {
            d
        } else {
            acc
        }
    });

    let tol = P::from_dyadic(1e-12);
    if key_dev <= tol && deviation > tol {
        return Err(Error::numerical(
            "uniform key produced a nonzero secrecy deviation".to_string(),
        ));
    }
    let converse_applicable = plaintext_support_spans_group(plaintext_dist);
    if converse_applicable && deviation <= tol && key_dev > tol {
        return Err(Error::numerical(
            "zero deviation with a biased key despite spanning plaintext support".to_string(),
        ));
    }

    let mut r = MetricReport::new();
    r.push(
        "deviation",
        deviation.to_f64_lossy(),
        "otp_secrecy_check: max over (x, c) of |Pr(x|c) - Pr(x)|, exact enumeration",
    );
    r.push(
        "key_uniformity_deviation",
        key_dev.to_f64_lossy(),
        "otp_secrecy_check: max |Pr_K(k) - 2^{-bits}|",
    );
    r.push(
        "excluded_ciphertexts",
        excluded as f64,
        "otp_secrecy_check: zero-probability ciphertexts skipped (conditional undefined)",
    );
    r.push(
        "converse_applicable",
        if converse_applicable { 1.0 } else { 0.0 },
        "otp_secrecy_check: 1 when plaintext support differences span the bit group",
    );
    Ok(r)
}

/// Whether the XOR differences of the plaintext support generate the whole
/// group of bit strings; when they do, zero deviation forces a uniform key.
fn plaintext_support_spans_group<P: Prob>(dist: &ClassicalDistribution<P>) -> bool {
    let support: Vec<usize> = (0..dist.support())
        .filter(|&x| dist.prob(x).is_pos())
        .collect();
    let Some(&base) = support.first() else {
        return false;
    };
    // Gaussian elimination over GF(2) on the differences.
    let mut basis: Vec<usize> = Vec::new();
    for &x in &support[1..] {
        let mut v = x ^ base;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let bits = dist.support().trailing_zeros() as usize;
    basis.len() == bits
}
