//! Dense complex matrix helpers.
//!
//! Every operator in the library is banded up to the periodic wrap, so
//! products skip the zero entries of the right operand.

use nalgebra::{Schur, SymmetricEigen, SVD};
use num_complex::Complex;

use crate::scalar::{cabs, carg, cone, czero, is_zero, CMatrix, Real, M2};

/// `a * b`, skipping zero entries of `b`.
pub fn mul<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    let mut out = CMatrix::<T>::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bkj = b[(k, j)];
            if is_zero(&bkj) {
                continue;
            }
            let col = a.column(k);
            let mut dst = out.column_mut(j);
            for i in 0..a.nrows() {
                let aik = col[i];
                if !is_zero(&aik) {
                    dst[i] += aik * bkj;
                }
            }
        }
    }
    out
}

/// Left-to-right product of a non-empty list of square matrices.
pub fn product<T: Real>(factors: &[CMatrix<T>]) -> CMatrix<T> {
    let mut it = factors.iter();
    let first = it.next().expect("product of an empty list").clone();
    it.fold(first, |acc, f| mul(&acc, f))
}

/// `u * m * u†`.
pub fn conjugate<T: Real>(u: &CMatrix<T>, m: &CMatrix<T>) -> CMatrix<T> {
    mul(&mul(u, m), &u.adjoint())
}

pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::<T>::identity(dim, dim)
}

pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

pub fn max_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "shapes differ");
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc.max(cabs(*x - *y)))
}

pub fn unitarity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let g = mul(&m.adjoint(), m);
    max_diff(&g, &identity(m.nrows()))
}

pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    max_diff(m, &m.adjoint())
}

/// Max-norm of `[a, b]`.
pub fn commutator_norm<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    max_diff(&mul(a, b), &mul(b, a))
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().fold(T::zero(), |acc, s| acc.max(*s))
}

/// Dense matrix exponential (Padé approximant with scaling and squaring).
pub fn expm<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.exp()
}

/// `exp(-i t H)` by dense exponentiation.
pub fn evolution<T: Real>(h: &CMatrix<T>, t: T) -> CMatrix<T> {
    let minus_it = Complex::new(T::zero(), -t);
    expm(&h.map(|z| z * minus_it))
}

/// Block-diagonal matrix repeating `block` on each of `n` sites.
pub fn site_diag<T: Real>(n: usize, block: &M2<T>) -> CMatrix<T> {
    let mut out = CMatrix::<T>::zeros(2 * n, 2 * n);
    for p in 0..n {
        for r in 0..2 {
            for c in 0..2 {
                out[(2 * p + r, 2 * p + c)] = block[(r, c)];
            }
        }
    }
    out
}

/// Block-diagonal matrix with a different 2x2 block per site.
pub fn site_blocks<T: Real>(blocks: &[M2<T>]) -> CMatrix<T> {
    let n = blocks.len();
    let mut out = CMatrix::<T>::zeros(2 * n, 2 * n);
    for (p, b) in blocks.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                out[(2 * p + r, 2 * p + c)] = b[(r, c)];
            }
        }
    }
    out
}

/// Diagonal matrix from a list of entries.
pub fn diag<T: Real>(entries: &[Complex<T>]) -> CMatrix<T> {
    let mut out = CMatrix::<T>::zeros(entries.len(), entries.len());
    for (i, z) in entries.iter().enumerate() {
        out[(i, i)] = *z;
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
    v
}

/// Eigenvalues of a general complex matrix, read off the complex Schur form.
pub fn eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<Complex<T>> {
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Sorts unit-circle points by principal phase, ties broken on the real part.
pub fn sort_by_phase<T: Real>(v: &mut [Complex<T>]) {
    v.sort_by(|a, b| {
        let (pa, pb) = (carg(*a), carg(*b));
        pa.partial_cmp(&pb).expect("finite phase").then(a.re.partial_cmp(&b.re).expect("finite real part"))
    });
}

/// Bottleneck distance between two phase-sorted lists of unit-circle points.
/// On the circle the optimal matching is a cyclic shift of the sorted order.
pub fn circle_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    assert_eq!(a.len(), b.len(), "spectra have different sizes");
    let n = a.len();
    let mut best: Option<T> = None;
    for shift in 0..n {
        let mut worst = T::zero();
        for i in 0..n {
            worst = worst.max(cabs(a[i] - b[(i + shift) % n]));
            if let Some(b) = best {
                if worst >= b {
                    break;
                }
            }
        }
        best = Some(best.map_or(worst, |b: T| b.min(worst)));
    }
    best.unwrap_or_else(T::zero)
}

/// Max distance between two ascending real spectra.
pub fn line_distance<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "spectra have different sizes");
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).abs()))
}

pub(crate) fn m2<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> M2<T> {
    M2::new(a, b, c, d)
}

pub(crate) fn m2_identity<T: Real>() -> M2<T> {
    m2(cone(), czero(), czero(), cone())
}
