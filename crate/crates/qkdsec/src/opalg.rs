//! Dense complex linear algebra on self-adjoint operators.
//!
//! Everything downstream computes on [`HermitianOperator`]: density
//! operators, measurement elements, and their differences. The module
//! provides the Hermitian eigendecomposition (cyclic Jacobi with unitary
//! rotations), trace norm, Uhlmann fidelity, tensor products, and partial
//! traces.
//!
//! Composite indexing is row-major with the leftmost tensor factor most
//! significant: the basis vector `|i⟩⊗|j⟩` of `A⊗B` has index
//! `i * dim(B) + j`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tol::Tolerances;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Dense self-adjoint matrix with its dimension.
///
/// Entries are stored row-major. Self-adjointness is validated on
/// construction and preserved by every public operation.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Scalar> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

/// Serialized form of a matrix: dimension plus row-major real and imaginary
/// parts at full double precision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Scalar> HermitianOperator<T> {
    /// Builds an operator from row-major entries, validating squareness and
    /// self-adjointness against the default tolerances.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        Self::new_with(dim, entries, &Tolerances::default())
    }

    pub fn new_with(dim: usize, entries: Vec<Complex<T>>, tol: &Tolerances<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("operator dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(Error::validation(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let op = HermitianOperator { dim, entries };
        for i in 0..dim {
            for j in i..dim {
                let d = op.get(i, j) - op.get(j, i).conj();
                if d.norm() > tol.hermitian {
                    return Err(Error::validation(format!(
                        "operator is not self-adjoint at ({i},{j}): asymmetry {}",
                        d.norm().to_f64().unwrap_or(f64::NAN)
                    )));
                }
            }
        }
        Ok(op)
    }

    /// Builds an operator from entries known to be self-adjoint.
    pub(crate) fn from_raw(dim: usize, entries: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        HermitianOperator { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex::one();
        }
        HermitianOperator { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        HermitianOperator {
            dim,
            entries: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let dim = diag.len();
        let mut entries = vec![Complex::zero(); dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * dim + i] = Complex::new(v, T::zero());
        }
        HermitianOperator { dim, entries }
    }

    /// Rank-one projector `|v⟩⟨v|` scaled by nothing; `v` need not be
    /// normalized (the caller decides).
    pub fn outer(v: &[Complex<T>]) -> Self {
        let dim = v.len();
        let mut entries = vec![Complex::zero(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = v[i] * v[j].conj();
            }
        }
        HermitianOperator { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i).re)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::validation(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(HermitianOperator {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, s: T) -> Self {
        let s = Complex::new(s, T::zero());
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    /// Real quadratic form `⟨v|A|v⟩`; real because the operator is
    /// self-adjoint.
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        debug_assert_eq!(v.len(), self.dim);
        let mut acc = Complex::<T>::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + v[i].conj() * self.get(i, j) * v[j];
            }
        }
        acc.re
    }

    /// Trace of the product `tr[A B]`; real for self-adjoint `A`, `B`.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::validation(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        let mut acc = Complex::<T>::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + self.get(i, j) * other.get(j, i);
            }
        }
        Ok(acc.re)
    }

    /// Validates that the operator is a density operator: positive
    /// semidefinite within tolerance with unit trace.
    pub fn validate_density(&self, tol: &Tolerances<T>) -> Result<()> {
        let tr = self.trace();
        if (tr - T::one()).abs() > tol.unit_trace {
            return Err(Error::validation(format!(
                "density operator trace deviates from 1: {}",
                tr.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let spec = eig_hermitian_with(self, tol)?;
        if let Some(min) = spec.eigenvalues.last() {
            if *min < -tol.psd {
                return Err(Error::validation(format!(
                    "density operator has negative eigenvalue {}",
                    min.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        Ok(())
    }

    /// Converts to the serialized matrix document (always double precision).
    pub fn to_doc(&self) -> MatrixDoc {
        MatrixDoc {
            dim: self.dim,
            re: self
                .entries
                .iter()
                .map(|z| z.re.to_f64().unwrap())
                .collect(),
            im: self
                .entries
                .iter()
                .map(|z| z.im.to_f64().unwrap())
                .collect(),
        }
    }

    pub fn from_doc(doc: &MatrixDoc) -> Result<Self> {
        if doc.re.len() != doc.dim * doc.dim || doc.im.len() != doc.dim * doc.dim {
            return Err(Error::validation(format!(
                "matrix document length mismatch for dim {}",
                doc.dim
            )));
        }
        let entries = doc
            .re
            .iter()
            .zip(&doc.im)
            .map(|(&re, &im)| Complex::new(T::from_f64_c(re), T::from_f64_c(im)))
            .collect();
        HermitianOperator::new(doc.dim, entries)
    }
}

/// Eigendecomposition of a self-adjoint operator: real eigenvalues sorted
/// descending with matching orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct Spectrum<T: Scalar> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> Spectrum<T> {
    /// Rebuilds `Σ λ_i v_i v_i†`, for reconstruction checks and functional
    /// calculus.
    pub fn reconstruct(&self) -> HermitianOperator<T> {
        self.apply(|l| l)
    }

    /// Applies a real function to the eigenvalues: `Σ f(λ_i) v_i v_i†`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> HermitianOperator<T> {
        let dim = self.eigenvectors.first().map_or(0, Vec::len);
        let mut entries = vec![Complex::<T>::zero(); dim * dim];
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let fl = f(*lam);
            if fl.is_zero() {
                continue;
            }
            let fl = Complex::new(fl, T::zero());
            for i in 0..dim {
                for j in 0..dim {
                    entries[i * dim + j] = entries[i * dim + j] + fl * v[i] * v[j].conj();
                }
            }
        }
        HermitianOperator::from_raw(dim, entries)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies the
    /// predicate.
    pub fn projector(&self, keep: impl Fn(T) -> bool) -> HermitianOperator<T> {
        let dim = self.eigenvectors.first().map_or(0, Vec::len);
        let mut entries = vec![Complex::<T>::zero(); dim * dim];
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            if !keep(*lam) {
                continue;
            }
            for i in 0..dim {
                for j in 0..dim {
                    entries[i * dim + j] = entries[i * dim + j] + v[i] * v[j].conj();
                }
            }
        }
        HermitianOperator::from_raw(dim, entries)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Each pivot combines a phase that makes the off-diagonal entry real with a
/// real Jacobi rotation that annihilates it; accumulated rotations give the
/// eigenvectors. Unconditionally stable at the dimensions this crate targets.
pub fn eig_hermitian<T: Scalar>(a: &HermitianOperator<T>) -> Result<Spectrum<T>> {
    eig_hermitian_with(a, &Tolerances::default())
}

pub fn eig_hermitian_with<T: Scalar>(
    a: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<Spectrum<T>> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = HermitianOperator::<T>::identity(n);

    let scale = a.frobenius_norm().max(T::one());
    let threshold = tol.jacobi_offdiag * scale;

    let mut sweeps = 0usize;
    while off_diagonal_norm(&m) > threshold {
        if sweeps >= tol.jacobi_max_sweeps {
            return Err(Error::numerical(format!(
                "eigendecomposition did not converge for a {n}x{n} operator after {} sweeps \
                 (off-diagonal residual {:e})",
                tol.jacobi_max_sweeps,
                off_diagonal_norm(&m).to_f64().unwrap_or(f64::NAN)
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| {
        diag[j]
            .partial_cmp(&diag[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&c| (0..n).map(|r| v.get(r, c)).collect())
        .collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Scalar>(m: &HermitianOperator<T>) -> T {
    let n = m.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + m.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi step on the pivot `(p, q)`: `M ← U† M U`, `V ← V U`.
fn rotate<T: Scalar>(
    m: &mut HermitianOperator<T>,
    v: &mut HermitianOperator<T>,
    p: usize,
    q: usize,
) {
    let apq = m.get(p, q);
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    let phase = apq / Complex::new(mag, T::zero());

    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let two = T::one() + T::one();
    let tau = (aqq - app) / (two * mag);
    let t = if tau.is_zero() {
        T::one()
    } else {
        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // U = P·J with P = diag(1, conj(phase)) and J the real rotation; written
    // out as the four entries acting on coordinates (p, q).
    let upp = Complex::new(c, T::zero());
    let upq = Complex::new(s, T::zero());
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = m.dim();
    // Right-multiply M by U on columns p, q.
    for r in 0..n {
        let mp = m.get(r, p);
        let mq = m.get(r, q);
        m.set(r, p, mp * upp + mq * uqp);
        m.set(r, q, mp * upq + mq * uqq);
    }
    // Left-multiply by U† on rows p, q.
    for col in 0..n {
        let mp = m.get(p, col);
        let mq = m.get(q, col);
        m.set(p, col, upp.conj() * mp + uqp.conj() * mq);
        m.set(q, col, upq.conj() * mp + uqq.conj() * mq);
    }
    // The pivot is annihilated by construction; pin it to keep the matrix
    // exactly self-adjoint against rounding drift.
    m.set(p, q, Complex::zero());
    m.set(q, p, Complex::zero());
    let dpp = m.get(p, p).re;
    let dqq = m.get(q, q).re;
    m.set(p, p, Complex::new(dpp, T::zero()));
    m.set(q, q, Complex::new(dqq, T::zero()));

    // Accumulate eigenvectors.
    for r in 0..n {
        let vp = v.get(r, p);
        let vq = v.get(r, q);
        v.set(r, p, vp * upp + vq * uqp);
        v.set(r, q, vp * upq + vq * uqq);
    }
}

/// Trace norm `tr|A| = Σ |λ_i|`.
pub fn trace_norm<T: Scalar>(a: &HermitianOperator<T>) -> Result<T> {
    trace_norm_with(a, &Tolerances::default())
}

pub fn trace_norm_with<T: Scalar>(a: &HermitianOperator<T>, tol: &Tolerances<T>) -> Result<T> {
    let spec = eig_hermitian_with(a, tol)?;
    Ok(spec
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, l| acc + l.abs()))
}

/// Positive-semidefinite square root via the spectral decomposition.
///
/// Eigenvalues in `[-negative_clamp, 0)` are clamped to zero, and eigenvalues
/// below the relative support cutoff are treated as exact zeros: the square
/// root amplifies spectral noise at zero from `ε` to `√ε`, which would
/// otherwise dominate downstream fidelities.
pub fn sqrt_psd<T: Scalar>(
    a: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<HermitianOperator<T>> {
    let spec = eig_hermitian_with(a, tol)?;
    for l in &spec.eigenvalues {
        if *l < -tol.negative_clamp {
            return Err(Error::validation(format!(
                "matrix square root of a non-positive operator (eigenvalue {})",
                l.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }
    let floor = spec.eigenvalues[0].max(T::zero()) * tol.support_cutoff;
    Ok(spec.apply(|l| if l > floor { l.sqrt() } else { T::zero() }))
}

/// Uhlmann fidelity `F(A, B) = tr √(√A B √A)` for density operators.
///
/// Equals `|⟨a|b⟩|` on pure states. Both arguments are validated as density
/// operators first.
pub fn fidelity<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<T> {
    fidelity_with(a, b, &Tolerances::default())
}

pub fn fidelity_with<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "fidelity requires equal dimensions, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    a.validate_density(tol)?;
    b.validate_density(tol)?;

    let s = sqrt_psd(a, tol)?;
    let sandwich = hermitize(&matmul(&matmul(&s, b), &s));
    let spec = eig_hermitian_with(&sandwich, tol)?;
    // Same relative cutoff as the square root: spectral noise at zero enters
    // the sum as its square root otherwise.
    let floor = spec.eigenvalues[0].max(T::zero()) * tol.support_cutoff;
    let mut f = T::zero();
    for l in spec.eigenvalues {
        if l > floor {
            f = f + l.sqrt();
        }
    }
    // Rounding can push the sum a hair past one on identical states.
    Ok(f.min(T::one()))
}

/// Plain matrix product; the result is generally not self-adjoint, so it is
/// kept private to this module.
fn matmul<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> HermitianOperator<T> {
    let n = a.dim();
    debug_assert_eq!(n, b.dim());
    let mut entries = vec![Complex::<T>::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            if aik.norm_sqr().is_zero() {
                continue;
            }
            for j in 0..n {
                entries[i * n + j] = entries[i * n + j] + aik * b.get(k, j);
            }
        }
    }
    HermitianOperator::from_raw(n, entries)
}

/// `(M + M†)/2`, discarding the skew part rounding introduced.
fn hermitize<T: Scalar>(m: &HermitianOperator<T>) -> HermitianOperator<T> {
    let n = m.dim();
    let half = T::from_f64_c(0.5);
    let mut entries = vec![Complex::<T>::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let avg = (m.get(i, j) + m.get(j, i).conj()) * Complex::new(half, T::zero());
            entries[i * n + j] = avg;
        }
    }
    HermitianOperator::from_raw(n, entries)
}

/// Frobenius norm of the commutator `AB − BA`; zero exactly when the
/// operators share an eigenbasis.
pub fn commutator_norm<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "commutator requires equal dimensions, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let ab = matmul(a, b);
    let ba = matmul(b, a);
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n * n {
        acc = acc + (ab.entries[i] - ba.entries[i]).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Kronecker product `A ⊗ B` with the leftmost factor most significant.
pub fn tensor<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<HermitianOperator<T>> {
    tensor_with(a, b, &Tolerances::default())
}

pub fn tensor_with<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    tol: &Tolerances<T>,
) -> Result<HermitianOperator<T>> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .ok_or_else(|| Error::resource("tensor product dimension overflow".to_string()))?;
    if dim > tol.dim_cap {
        return Err(Error::resource(format!(
            "tensor product dimension {dim} exceeds cap {}",
            tol.dim_cap
        )));
    }
    let (da, db) = (a.dim(), b.dim());
    let mut entries = vec![Complex::<T>::zero(); dim * dim];
    for ia in 0..da {
        for ja in 0..da {
            let va = a.get(ia, ja);
            if va.norm_sqr().is_zero() {
                continue;
            }
            for ib in 0..db {
                for jb in 0..db {
                    let row = ia * db + ib;
                    let col = ja * db + jb;
                    entries[row * dim + col] = va * b.get(ib, jb);
                }
            }
        }
    }
    Ok(HermitianOperator::from_raw(dim, entries))
}

/// Partial trace over the complement of `keep`.
///
/// `dims` are the factor dimensions in most-significant-first order and must
/// multiply to the operator's dimension; `keep` lists the factor indices to
/// retain, in increasing order.
pub fn partial_trace<T: Scalar>(
    a: &HermitianOperator<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<HermitianOperator<T>> {
    let total: usize = dims.iter().product();
    if total != a.dim() || dims.contains(&0) {
        return Err(Error::validation(format!(
            "factor dimensions {dims:?} do not multiply to operator dimension {}",
            a.dim()
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::validation(format!(
            "keep set {keep:?} is not an increasing subset of 0..{}",
            dims.len()
        )));
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each factor in the composite index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let compose = |multi: &[usize], subsystems: &[usize]| -> usize {
        subsystems
            .iter()
            .zip(multi)
            .map(|(&sys, &idx)| idx * strides[sys])
            .sum()
    };

    let unrank = |mut r: usize, subsystems: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize; subsystems.len()];
        for (slot, &sys) in subsystems.iter().enumerate().rev() {
            out[slot] = r % dims[sys];
            r /= dims[sys];
        }
        out
    };

    let mut entries = vec![Complex::<T>::zero(); keep_dim * keep_dim];
    for ri in 0..keep_dim {
        let mi = unrank(ri, keep);
        let base_i = compose(&mi, keep);
        for rj in 0..keep_dim {
            let mj = unrank(rj, keep);
            let base_j = compose(&mj, keep);
            let mut acc = Complex::<T>::zero();
            for t in 0..traced_dim {
                let mt = unrank(t, &traced);
                let off = compose(&mt, &traced);
                acc = acc + a.get(base_i + off, base_j + off);
            }
            entries[ri * keep_dim + rj] = acc;
        }
    }
    Ok(HermitianOperator::from_raw(keep_dim, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket_zero() -> HermitianOperator<f64> {
        HermitianOperator::from_diag(&[1.0, 0.0])
    }

    fn ket_plus() -> HermitianOperator<f64> {
        HermitianOperator::new(2, vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap()
    }

    /// Closed-form eigenvalues of a 2x2 Hermitian matrix from the
    /// characteristic polynomial; independent oracle for the Jacobi path.
    fn eig2_oracle(a: &HermitianOperator<f64>) -> (f64, f64) {
        let tr = a.trace();
        let det = a.get(0, 0).re * a.get(1, 1).re - a.get(0, 1).norm_sqr();
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }

    #[test]
    fn identity_eigenvalues_are_one() {
        let spec = eig_hermitian(&HermitianOperator::<f64>::identity(2)).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_matrix_is_already_solved() {
        let spec = eig_hermitian(&HermitianOperator::from_diag(&[3.0, -1.0])).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_offdiagonal_matches_characteristic_polynomial() {
        let a = HermitianOperator::new(
            2,
            vec![c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0)],
        )
        .unwrap();
        let (hi, lo) = eig2_oracle(&a);
        let spec = eig_hermitian(&a).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], hi, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], lo, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[0], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn complex_entries_reconstruct() {
        let a = HermitianOperator::new(
            3,
            vec![
                c(1.0, 0.0),
                c(0.3, 0.2),
                c(-0.1, 0.4),
                c(0.3, -0.2),
                c(-0.5, 0.0),
                c(0.0, -0.7),
                c(-0.1, -0.4),
                c(0.0, 0.7),
                c(2.0, 0.0),
            ],
        )
        .unwrap();
        let spec = eig_hermitian(&a).unwrap();
        let diff = spec.reconstruct().sub(&a).unwrap();
        assert!(diff.frobenius_norm() < 1e-10);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let err =
            HermitianOperator::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn trace_norm_identity_and_diag() {
        assert_abs_diff_eq!(
            trace_norm(&HermitianOperator::<f64>::identity(2)).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            trace_norm(&HermitianOperator::from_diag(&[0.5, -0.5])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn trace_norm_of_projector_difference() {
        // |0⟩⟨0| − |+⟩⟨+| has eigenvalues ±1/√2 by the 2x2 oracle.
        let diff = ket_zero().sub(&ket_plus()).unwrap();
        let (hi, lo) = eig2_oracle(&diff);
        assert_abs_diff_eq!(hi, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(lo, -1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(trace_norm(&diff).unwrap(), 2.0_f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn fidelity_identity_orthogonal_and_overlap() {
        let rho = ket_plus();
        assert_abs_diff_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-10);

        let zero = ket_zero();
        let one = HermitianOperator::from_diag(&[0.0, 1.0]);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-10);

        // Pure-state overlap oracle: F = |⟨0|+⟩| = 1/√2.
        assert_abs_diff_eq!(
            fidelity(&zero, &ket_plus()).unwrap(),
            1.0 / 2.0_f64.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn fidelity_rejects_non_density_inputs() {
        let not_unit = HermitianOperator::from_diag(&[0.9, 0.3]);
        assert!(matches!(
            fidelity(&not_unit, &ket_zero()),
            Err(Error::Validation(_))
        ));
        let negative = HermitianOperator::from_diag(&[1.5, -0.5]);
        assert!(matches!(
            fidelity(&negative, &ket_zero()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn tensor_identities() {
        let i2 = HermitianOperator::<f64>::identity(2);
        let i4 = tensor(&i2, &i2).unwrap();
        assert_eq!(i4.dim(), 4);
        assert!(
            i4.sub(&HermitianOperator::identity(4))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );

        let a = HermitianOperator::from_diag(&[1.0, 0.0]);
        let b = HermitianOperator::from_diag(&[0.0, 1.0]);
        let ab = tensor(&a, &b).unwrap();
        let expect = HermitianOperator::from_diag(&[0.0, 1.0, 0.0, 0.0]);
        assert!(ab.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        // Direct-summation oracle on fixed operators.
        let a =
            HermitianOperator::new(2, vec![c(0.7, 0.0), c(0.1, 0.3), c(0.1, -0.3), c(0.4, 0.0)])
                .unwrap();
        let b =
            HermitianOperator::new(2, vec![c(0.2, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.9, 0.0)])
                .unwrap();
        let ab = tensor(&a, &b).unwrap();
        assert_abs_diff_eq!(ab.trace(), a.trace() * b.trace(), epsilon = 1e-12);
    }

    #[test]
    fn tensor_respects_dimension_cap() {
        let tol = Tolerances::<f64>::default().with_dim_cap(3);
        let i2 = HermitianOperator::<f64>::identity(2);
        assert!(matches!(
            tensor_with(&i2, &i2, &tol),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = ket_plus();
        let sigma = HermitianOperator::from_diag(&[0.25, 0.75]);
        let joint = tensor(&rho, &sigma).unwrap();
        let back = partial_trace(&joint, &[2, 2], &[0]).unwrap();
        assert!(back.sub(&rho).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        // Index-summation oracle: |Φ+⟩ = (|00⟩+|11⟩)/√2, tracing either qubit
        // leaves I/2.
        let amp = 1.0 / 2.0_f64.sqrt();
        let psi = vec![c(amp, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(amp, 0.0)];
        let bell = HermitianOperator::outer(&psi);
        let reduced = partial_trace(&bell, &[2, 2], &[0]).unwrap();
        let half = HermitianOperator::from_diag(&[0.5, 0.5]);
        assert!(reduced.sub(&half).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_keeping_everything_is_identity_map() {
        let a =
            HermitianOperator::new(2, vec![c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)])
                .unwrap();
        let kept = partial_trace(&a, &[2], &[0]).unwrap();
        assert!(kept.sub(&a).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_inconsistent_dims() {
        let a = HermitianOperator::<f64>::identity(6);
        assert!(matches!(
            partial_trace(&a, &[2, 2], &[0]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn matrix_doc_round_trips_bit_exactly() {
        let a = HermitianOperator::new(
            2,
            vec![
                c(1.0 / 3.0, 0.0),
                c(0.1, 0.7000000000000001),
                c(0.1, -0.7000000000000001),
                c(2.0 / 3.0, 0.0),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&a.to_doc()).unwrap();
        let doc: MatrixDoc = serde_json::from_str(&json).unwrap();
        let b = HermitianOperator::<f64>::from_doc(&doc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn f32_instantiation_works_with_scaled_tolerances() {
        let tol = Tolerances::<f32>::for_epsilon();
        let a = HermitianOperator::<f32>::new_with(
            2,
            vec![
                Complex::new(0.5, 0.0),
                Complex::new(-0.5, 0.0),
                Complex::new(-0.5, 0.0),
                Complex::new(-0.5, 0.0),
            ],
            &tol,
        )
        .unwrap();
        let spec = eig_hermitian_with(&a, &tol).unwrap();
        assert!((spec.eigenvalues[0] - 1.0 / 2.0_f32.sqrt()).abs() < 1e-5);
    }
}
