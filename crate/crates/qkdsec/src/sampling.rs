//! Seeded random instances: states, measurements, and distributions.
//!
//! All randomness in the crate flows through a caller-supplied generator;
//! the runner and the verification suites use the counter-based ChaCha8
//! stream seeded from the scenario seed, so identical seeds reproduce
//! identical instances on every platform.

use crate::opalg::{self, HermitianOperator};
use crate::scalar::Scalar;
use crate::states::{Branch, ClassicalDistribution, CqState, KeySpace};
use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

/// Standard normal sample by Box–Muller.
pub fn standard_normal<T: Scalar>(rng: &mut impl Rng) -> T {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    T::from_f64_c((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
}

fn complex_normal<T: Scalar>(rng: &mut impl Rng) -> Complex<T> {
    Complex::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-ish random unit vector from normalized Gaussian amplitudes.
pub fn random_unit_vector<T: Scalar>(rng: &mut impl Rng, dim: usize) -> Vec<Complex<T>> {
    loop {
        let v: Vec<Complex<T>> = (0..dim).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm > T::from_f64_c(1e-6) {
            let inv = Complex::new(norm.recip(), T::zero());
            return v.into_iter().map(|z| z * inv).collect();
        }
    }
}

/// Random Hermitian matrix with Gaussian entries, `(G + G†)/2`.
pub fn random_hermitian<T: Scalar>(rng: &mut impl Rng, dim: usize) -> HermitianOperator<T> {
    let half = T::from_f64_c(0.5);
    let mut entries = vec![Complex::<T>::zero(); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                entries[i * dim + i] = Complex::new(standard_normal(rng), T::zero());
            } else {
                let z = complex_normal::<T>(rng) * Complex::new(half, T::zero());
                entries[i * dim + j] = z;
                entries[j * dim + i] = z.conj();
            }
        }
    }
    HermitianOperator::new(dim, entries).expect("construction is self-adjoint")
}

/// Random traceless Hermitian matrix.
pub fn random_traceless_hermitian<T: Scalar>(
    rng: &mut impl Rng,
    dim: usize,
) -> HermitianOperator<T> {
    let h = random_hermitian(rng, dim);
    let shift = h.trace() / T::from_f64_c(dim as f64);
    let mut out = h;
    for i in 0..dim {
        let v = out.get(i, i) - Complex::new(shift, T::zero());
        out.set(i, i, v);
    }
    out
}

/// Random density operator from the Ginibre construction `GG†/tr`.
pub fn random_density<T: Scalar>(rng: &mut impl Rng, dim: usize) -> HermitianOperator<T> {
    let g: Vec<Complex<T>> = (0..dim * dim).map(|_| complex_normal(rng)).collect();
    let mut entries = vec![Complex::<T>::zero(); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex::<T>::zero();
            for k in 0..dim {
                acc = acc + g[i * dim + k] * g[j * dim + k].conj();
            }
            entries[i * dim + j] = acc;
        }
    }
    let m = HermitianOperator::from_raw(dim, entries);
    let tr = m.trace();
    m.scale(tr.recip())
}

/// Random pure density operator.
pub fn random_pure_density<T: Scalar>(rng: &mut impl Rng, dim: usize) -> HermitianOperator<T> {
    HermitianOperator::outer(&random_unit_vector(rng, dim))
}

/// Random operator with spectrum in `[0, 1]`: a measurement effect.
pub fn random_contraction<T: Scalar>(rng: &mut impl Rng, dim: usize) -> HermitianOperator<T> {
    let h: HermitianOperator<T> = random_hermitian(rng, dim);
    let spec = opalg::eig_hermitian(&h).expect("random Hermitian converges");
    let lo = *spec.eigenvalues.last().expect("nonempty spectrum");
    let hi = spec.eigenvalues[0];
    let span = (hi - lo).max(T::from_f64_c(1e-9));
    spec.apply(|l| (l - lo) / span)
}

/// Random probability vector from normalized uniform weights.
pub fn random_distribution<T: Scalar>(rng: &mut impl Rng, n: usize) -> ClassicalDistribution<T> {
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0) + 1e-6).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<T> = weights.iter().map(|w| T::from_f64_c(w / total)).collect();
    // Pin the sum to exactly one in the scalar type.
    let sum = probs.iter().fold(T::zero(), |a, &b| a + b);
    let last = probs.len() - 1;
    probs[last] = probs[last] + (T::one() - sum);
    ClassicalDistribution::new(probs).expect("normalized by construction")
}

/// Conditional-operator families for random cq states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveStyle {
    /// Unconstrained Ginibre conditionals.
    General,
    /// Conditionals diagonal in one shared random basis, hence commuting.
    Commuting,
}

/// Random cq state with the requested conditional-operator family. Branch
/// probabilities cover all `(k_A, k_B)` pairs with normalized random weights,
/// so key mismatch is generically present.
pub fn random_cq_state<T: Scalar>(
    rng: &mut impl Rng,
    bits: u32,
    eve_dim: usize,
    style: EveStyle,
) -> CqState<T> {
    let ks = KeySpace::new(bits).expect("small key space");
    let size = ks.size();
    let joint = random_distribution::<T>(rng, size * size);

    let common_basis: Option<Vec<Vec<Complex<T>>>> = match style {
        EveStyle::General => None,
        EveStyle::Commuting => {
            let spec = opalg::eig_hermitian(&random_hermitian::<T>(rng, eve_dim))
                .expect("random Hermitian converges");
            Some(spec.eigenvectors)
        }
    };

    let mut branches = Vec::with_capacity(size * size);
    for ka in 0..size {
        for kb in 0..size {
            let eve_op = match &common_basis {
                None => random_density(rng, eve_dim),
                Some(basis) => {
                    let weights = random_distribution::<T>(rng, eve_dim);
                    let mut acc = HermitianOperator::zero(eve_dim);
                    for (w, v) in weights.probs().iter().zip(basis) {
                        acc = acc
                            .add(&HermitianOperator::outer(v).scale(*w))
                            .expect("same dim");
                    }
                    acc
                }
            };
            branches.push(Branch {
                ka,
                kb,
                prob: joint.prob(ka * size + kb),
                eve_op,
            });
        }
    }
    CqState::new(ks, eve_dim, branches).expect("random state satisfies invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_density_is_a_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..=6 {
            let rho = random_density::<f64>(&mut rng, dim);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            let spec = opalg::eig_hermitian(&rho).unwrap();
            assert!(*spec.eigenvalues.last().unwrap() > -1e-12);
        }
    }

    #[test]
    fn random_contraction_spectrum_is_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_contraction::<f64>(&mut rng, 5);
        let spec = opalg::eig_hermitian(&g).unwrap();
        assert!(spec.eigenvalues[0] <= 1.0 + 1e-10);
        assert!(*spec.eigenvalues.last().unwrap() >= -1e-10);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_cq_state::<f64>(&mut ChaCha8Rng::seed_from_u64(9), 1, 2, EveStyle::General);
        let b = random_cq_state::<f64>(&mut ChaCha8Rng::seed_from_u64(9), 1, 2, EveStyle::General);
        for (x, y) in a.branches().iter().zip(b.branches()) {
            assert_eq!(x.prob.to_bits(), y.prob.to_bits());
            assert_eq!(x.eve_op, y.eve_op);
        }
    }

    #[test]
    fn commuting_style_produces_commuting_conditionals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_cq_state::<f64>(&mut rng, 1, 3, EveStyle::Commuting);
        let ops: Vec<_> = s.branches().iter().map(|b| &b.eve_op).collect();
        for i in 0..ops.len() {
            for j in (i + 1)..ops.len() {
                let c = opalg::commutator_norm(ops[i], ops[j]).unwrap();
                assert!(c < 1e-10, "commutator norm {c}");
            }
        }
    }
}
