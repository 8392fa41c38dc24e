//! Continuous-time lattice Dirac Hamiltonians on a periodic lattice.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gauge::{self, GaugeConfig};
use crate::lattice::{change_operator_basis, lr_index, pauli, Basis, Component, LatticeOperator, OperatorKind, WalkParams};
use crate::linalg::{self, site_diag};
use crate::scalar::{ci, cr, czero, lit, scaled_tol, CMatrix, Real, M2};

use Component::{L, R};

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind<T: Real> {
    LeftRight,
    Naive,
    Wilson(T),
    Staggered,
    LeftRightGauged(GaugeConfig<T>, usize),
    NaiveGauged(GaugeConfig<T>, usize),
}

impl<T: Real> HamiltonianKind<T> {
    pub fn build(&self, params: &WalkParams<T>) -> Result<LatticeOperator<T>> {
        params.validate()?;
        match self {
            HamiltonianKind::LeftRight => Ok(build_left_right(params)),
            HamiltonianKind::Naive => Ok(build_naive(params)),
            HamiltonianKind::Wilson(r) => {
                if !r.is_finite() {
                    return Err(Error::InvalidParams("Wilson parameter must be finite".into()));
                }
                Ok(build_wilson(&WalkParams { r: *r, ..*params }))
            }
            HamiltonianKind::Staggered => Ok(build_staggered(params)),
            HamiltonianKind::LeftRightGauged(g, j) => gauge::gauged_left_right_hamiltonian(params, g, *j),
            HamiltonianKind::NaiveGauged(g, j) => gauge::gauged_naive_hamiltonian(params, g, *j),
        }
    }
}

/// Adds `w * block` to the 2x2 block coupling site `p` to site `q`.
pub(crate) fn add_block<T: Real>(h: &mut CMatrix<T>, n: usize, p: isize, q: isize, block: &M2<T>, w: Complex<T>) {
    for (ri, rc) in [L, R].into_iter().enumerate() {
        for (ci_, cc) in [L, R].into_iter().enumerate() {
            let z = block[(ri, ci_)];
            if z != czero() {
                h[(lr_index(n, p, rc), lr_index(n, q, cc))] += z * w;
            }
        }
    }
}

/// Left-right transport term alone.
pub fn left_right_transport<T: Real>(params: &WalkParams<T>) -> CMatrix<T> {
    let n = params.n_sites;
    let inv_a = T::one() / params.a;
    let mut h = CMatrix::zeros(params.dim(), params.dim());
    for p in 0..n as isize {
        h[(lr_index(n, p, L), lr_index(n, p, R))] += ci(-inv_a);
        h[(lr_index(n, p, L), lr_index(n, p - 1, R))] += ci(inv_a);
        h[(lr_index(n, p, R), lr_index(n, p + 1, L))] += ci(-inv_a);
        h[(lr_index(n, p, R), lr_index(n, p, L))] += ci(inv_a);
    }
    h
}

/// Mass term `m alpha^0` with `alpha^0 = sigma^3`.
pub fn left_right_mass<T: Real>(params: &WalkParams<T>) -> CMatrix<T> {
    site_diag(params.n_sites, &(pauli::sigma3::<T>() * cr(params.m)))
}

pub fn build_left_right<T: Real>(params: &WalkParams<T>) -> LatticeOperator<T> {
    let h = left_right_transport(params) + left_right_mass(params);
    LatticeOperator::lr(h, OperatorKind::Hermitian, *params)
}

pub fn build_left_right_transport<T: Real>(params: &WalkParams<T>) -> LatticeOperator<T> {
    LatticeOperator::lr(left_right_transport(params), OperatorKind::Hermitian, *params)
}

/// Symmetric-difference transport `-i/(2a) sigma^1 (|p><p+1| - |p+1><p|)`.
pub fn naive_transport<T: Real>(params: &WalkParams<T>) -> CMatrix<T> {
    let (h_e, h_o) = naive_even_odd_split(params);
    h_e + h_o
}

/// Naive transport split into bonds `(p, p+1)` with `p` even and with `p` odd.
pub fn naive_even_odd_split<T: Real>(params: &WalkParams<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = params.n_sites;
    let w = T::one() / (lit::<T>(2.0) * params.a);
    let s1 = pauli::sigma1::<T>();
    let mut h_e = CMatrix::zeros(params.dim(), params.dim());
    let mut h_o = CMatrix::zeros(params.dim(), params.dim());
    for p in 0..n as isize {
        let h = if p % 2 == 0 { &mut h_e } else { &mut h_o };
        add_block(h, n, p, p + 1, &s1, ci(-w));
        add_block(h, n, p + 1, p, &s1, ci(w));
    }
    (h_e, h_o)
}

/// Mass term `m (-sigma^2)`.
pub fn naive_mass<T: Real>(params: &WalkParams<T>) -> CMatrix<T> {
    site_diag(params.n_sites, &(pauli::sigma2::<T>() * cr(-params.m)))
}

pub fn build_naive<T: Real>(params: &WalkParams<T>) -> LatticeOperator<T> {
    let h = naive_transport(params) + naive_mass(params);
    LatticeOperator::lr(h, OperatorKind::Hermitian, *params)
}

/// Diagonal part of the Wilson term, `alpha^0 r/(2a) 2|p><p|`.
pub fn wilson_diagonal<T: Real>(params: &WalkParams<T>) -> CMatrix<T> {
    site_diag(params.n_sites, &(pauli::sigma3::<T>() * cr(params.r / params.a)))
}

/// Nearest-neighbour part of the Wilson term, `-alpha^0 r/(2a) (|p><p+1| + |p+1><p|)`.
pub fn wilson_nearest_neighbor<T: Real>(params: &WalkParams<T>) -> CMatrix<T> {
    let n = params.n_sites;
    let w = params.r / (lit::<T>(2.0) * params.a);
    let s3 = pauli::sigma3::<T>();
    let mut h = CMatrix::zeros(params.dim(), params.dim());
    for p in 0..n as isize {
        add_block(&mut h, n, p, p + 1, &s3, cr(-w));
        add_block(&mut h, n, p + 1, p, &s3, cr(-w));
    }
    h
}

pub fn build_wilson_nearest_neighbor<T: Real>(params: &WalkParams<T>) -> LatticeOperator<T> {
    LatticeOperator::lr(wilson_nearest_neighbor(params), OperatorKind::Hermitian, *params)
}

/// Naive Hamiltonian plus the Wilson term with parameter `params.r`.
pub fn build_wilson<T: Real>(params: &WalkParams<T>) -> LatticeOperator<T> {
    let h = naive_transport(params) + naive_mass(params) + wilson_diagonal(params) + wilson_nearest_neighbor(params);
    LatticeOperator::lr(h, OperatorKind::Hermitian, *params)
}

/// Scalar Hamiltonian on `2N` staggered sites with spacing `a' = a/2`.
pub fn build_staggered<T: Real>(params: &WalkParams<T>) -> LatticeOperator<T> {
    let (h_e, h_o) = staggered_even_odd_split(params);
    let mut h = h_e + h_o;
    for n in 0..params.dim() {
        let sign = if n % 2 == 0 { T::one() } else { -T::one() };
        h[(n, n)] += cr(params.m * sign);
    }
    LatticeOperator { matrix: h, basis: Basis::StaggeredPosition, kind: OperatorKind::Hermitian, params: *params }
}

/// Massless staggered hops split into bonds `(n, n+1)` with `n` even and `n` odd.
pub fn staggered_even_odd_split<T: Real>(params: &WalkParams<T>) -> (CMatrix<T>, CMatrix<T>) {
    let d = params.dim();
    let a_prime = params.a / lit(2.0);
    let w = T::one() / (lit::<T>(2.0) * a_prime);
    let mut h_e = CMatrix::zeros(d, d);
    let mut h_o = CMatrix::zeros(d, d);
    for n in 0..d {
        let h = if n % 2 == 0 { &mut h_e } else { &mut h_o };
        let next = (n + 1) % d;
        h[(n, next)] += ci(-w);
        h[(next, n)] += ci(w);
    }
    (h_e, h_o)
}

/// Splits the left-right transport term into its on-site part, `sigma^2/a` on
/// every site, and the inter-site remainder coupling `R_p` to `L_{p+1}`.
pub fn split_on_inter<T: Real>(h_transport: &LatticeOperator<T>) -> Result<(LatticeOperator<T>, LatticeOperator<T>)> {
    if h_transport.basis != Basis::LRPosition {
        return Err(Error::BasisMismatch("split_on_inter expects an LR-position operator".into()));
    }
    let params = h_transport.params;
    let expected = left_right_transport(&params);
    let defect = linalg::max_diff(&h_transport.matrix, &expected);
    if defect > scaled_tol::<T>(1e-12) {
        return Err(Error::NotTransport(format!("max deviation {defect:?} from the left-right transport pattern")));
    }
    let h_on = site_diag(params.n_sites, &(pauli::sigma2::<T>() * cr(T::one() / params.a)));
    let h_int = &h_transport.matrix - &h_on;
    Ok((LatticeOperator::lr(h_on, OperatorKind::Hermitian, params), LatticeOperator::lr(h_int, OperatorKind::Hermitian, params)))
}

/// `h` expressed in the staggered basis.
pub fn to_staggered<T: Real>(h: &LatticeOperator<T>) -> LatticeOperator<T> {
    change_operator_basis(h, Basis::StaggeredPosition)
}
