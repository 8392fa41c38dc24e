//! Unitary equivalences between digitizations: the Strauch conjugation, the
//! two-site Fourier blocks of the even-odd and walk schemes with the mapping
//! `B_K` between them, and the even-odd coin-basis rewriting.
//!
//! Two-site cells group `(Phi_{2l}, Phi_{2l+1})`, so a cell vector is
//! `[E_L, E_R, O_L, O_R]` and occupies LR indices `4l .. 4l + 4`.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::digitize::{build_two_angle_walk, CoinOp, Factor, FactorLabel, ShiftOp, WalkOperator};
use crate::error::{Error, Result};
use crate::lattice::{pauli, WalkParams};
use crate::linalg::{self, site_diag};
use crate::scalar::{cabs, carg, cis, cone, cr, csqrt, czero, CMatrix, Real, M2, M4};

/// A 4x4 two-site Fourier block at cell momentum `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBlock4<T: Real> {
    pub k: T,
    pub matrix: M4<T>,
}

impl<T: Real> FourierBlock4<T> {
    pub fn unitarity_defect(&self) -> T {
        max_diff4(&(self.matrix.adjoint() * self.matrix), &M4::identity())
    }

    /// Rows and columns `{1, 2}`.
    pub fn pi_block(&self) -> M2<T> {
        sub_block(&self.matrix, 1, 2)
    }

    /// Rows and columns `{0, 3}`.
    pub fn corner_block(&self) -> M2<T> {
        sub_block(&self.matrix, 0, 3)
    }
}

/// Real-space coefficients `b_N` of the mapping, `B_{ll'} = b_{l - l'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingCoefficients<T: Real> {
    pub entries: BTreeMap<i64, M4<T>>,
    pub quadrature_points: usize,
}

impl<T: Real> MappingCoefficients<T> {
    pub fn max_offset(&self) -> i64 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn coefficient(&self, offset: i64) -> Option<&M4<T>> {
        self.entries.get(&offset)
    }

    /// `sum_N b_N e^{-i K N}`.
    pub fn reconstruct(&self, k: T) -> M4<T> {
        let mut out = M4::zeros();
        for (&n, b) in &self.entries {
            out += b * cis(-k * int(n));
        }
        out
    }

    /// Max entrywise reconstruction error over `samples` uniform momenta.
    pub fn reconstruction_error(&self, params: &WalkParams<T>, samples: usize) -> Result<T> {
        let mut worst = T::zero();
        for m in 0..samples {
            let k = grid_k::<T>(m, samples);
            let exact = mapping_b_of_k(k, params)?;
            worst = worst.max(max_diff4(&self.reconstruct(k), &exact.matrix));
        }
        Ok(worst)
    }

    /// Geometric decay ratio of `|b_N^{uv}|` over `N = 1..=max_offset`, from a
    /// least-squares fit of `ln |b_N^{uv}|` against `N`.
    pub fn decay_ratio(&self, u: usize, v: usize) -> Result<T> {
        let pts: Vec<(T, T)> = self.entries.iter().filter(|(&n, _)| n >= 1).map(|(&n, b)| (int(n), cabs(b[(u, v)]))).collect();
        if pts.len() < 2 || pts.iter().any(|(_, y)| *y <= T::zero()) {
            return Err(Error::SingularFit("need at least two nonzero coefficients".into()));
        }
        let (slope, _) = linear_fit(&pts.iter().map(|(x, y)| (*x, y.ln())).collect::<Vec<_>>())?;
        Ok(slope.exp())
    }
}

fn int<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("integer fits the scalar type")
}

fn grid_k<T: Real>(m: usize, points: usize) -> T {
    -T::pi() + T::two_pi() * int::<T>(m as i64) / int::<T>(points as i64)
}

pub(crate) fn linear_fit<T: Real>(pts: &[(T, T)]) -> Result<(T, T)> {
    let n = int::<T>(pts.len() as i64);
    let (sx, sy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + *x, b + *y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + (*x - mx) * (*x - mx), b + (*x - mx) * (*y - my)));
    if sxx <= T::default_epsilon() {
        return Err(Error::SingularFit("abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn max_diff4<T: Real>(a: &M4<T>, b: &M4<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc.max(cabs(*x - *y)))
}

fn sub_block<T: Real>(m: &M4<T>, i: usize, j: usize) -> M2<T> {
    M2::new(m[(i, i)], m[(i, j)], m[(j, i)], m[(j, j)])
}

/// `O = S^-1 K(theta) S^-1 K(theta)` with `K = i exp(-i sigma^1 theta / 2)`.
pub fn strauch_operator<T: Real>(theta: T, params: &WalkParams<T>) -> WalkOperator<T> {
    let n = params.n_sites;
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::shift(ShiftOp::both().inv(), n),
            Factor::coin(CoinOp::k(theta), n),
            Factor::shift(ShiftOp::both().inv(), n),
            Factor::coin(CoinOp::k(theta), n),
        ],
    )
}

/// `-S^-1 C(theta) S^-1 C(theta)` with the `sigma^1` coin `C = exp(-i sigma^1 theta / 2)`.
pub fn strauch_operator_breve<T: Real>(theta: T, params: &WalkParams<T>) -> CMatrix<T> {
    let n = params.n_sites;
    let s = ShiftOp::<T>::both().inv().matrix(n);
    let c = CoinOp::cbreve(theta).matrix(n);
    -linalg::product(&[s.clone(), c.clone(), s, c])
}

/// The passage operator `P S^L`.
pub fn strauch_passage<T: Real>(n_sites: usize) -> CMatrix<T> {
    linalg::mul(&site_diag(n_sites, &pauli::p_matrix()), &ShiftOp::<T>::left().matrix(n_sites))
}

/// `-(P S^L) U^t_n(-theta, theta) (P S^L)^{-1}`.
pub fn strauch_conjugate<T: Real>(theta: T, params: &WalkParams<T>) -> CMatrix<T> {
    let q = strauch_passage::<T>(params.n_sites);
    let w = build_two_angle_walk(-theta, theta, params);
    -linalg::conjugate(&q, w.matrix())
}

fn tilde_cs<T: Real>(params: &WalkParams<T>) -> (T, T) {
    let d = params.delta_tilde();
    (d.cos(), d.sin())
}

fn block4<T: Real>(diag: [Complex<T>; 4], anti: [Complex<T>; 4]) -> M4<T> {
    let mut m = M4::zeros();
    for i in 0..4 {
        m[(i, i)] = diag[i];
        m[(i, 3 - i)] = anti[i];
    }
    m
}

fn eo_entries<T: Real>(k: T, params: &WalkParams<T>) -> (Complex<T>, Complex<T>, Complex<T>, Complex<T>) {
    let (c, s) = tilde_cs(params);
    let plus = cr(c * c) + cis(k) * (s * s);
    let minus = cr(c * c) + cis(-k) * (s * s);
    let up = (cone::<T>() - cis(-k)) * (-s * c);
    let down = (cis(k) - cone::<T>()) * (-s * c);
    (plus, minus, up, down)
}

/// Fourier block of the even-odd transport.
pub fn fourier_block_even_odd<T: Real>(k: T, params: &WalkParams<T>) -> FourierBlock4<T> {
    let (plus, minus, up, down) = eo_entries(k, params);
    FourierBlock4 { k, matrix: block4([plus, plus, minus, minus], [up, up, down, down]) }
}

/// Fourier block of the naive walk transport.
pub fn fourier_block_walk<T: Real>(k: T, params: &WalkParams<T>) -> FourierBlock4<T> {
    let (plus, minus, up, down) = eo_entries(k, params);
    FourierBlock4 { k, matrix: block4([plus, minus, plus, minus], [up, up, down, down]) }
}

/// Both block samplers at one momentum.
pub fn fourier_blocks<T: Real>(k: T, params: &WalkParams<T>) -> (FourierBlock4<T>, FourierBlock4<T>) {
    (fourier_block_even_odd(k, params), fourier_block_walk(k, params))
}

/// Cell momenta `2 pi m / (N/2)` of the periodic lattice.
pub fn cell_momenta<T: Real>(n_sites: usize) -> Vec<T> {
    let cells = n_sites / 2;
    (0..cells).map(|m| T::two_pi() * int::<T>(m as i64) / int::<T>(cells as i64)).collect()
}

/// `sum_d A_d e^{i K d}` for the cell-translation-invariant operator `op`, with
/// `A_d` the block coupling cell 0 to cell `d` (offsets read in `(-cells/2, cells/2]`).
pub fn fourier_block_of_operator<T: Real>(op: &CMatrix<T>, n_sites: usize, k: T) -> Result<M4<T>> {
    if !n_sites.is_multiple_of(2) || op.nrows() != 2 * n_sites || op.ncols() != 2 * n_sites {
        return Err(Error::ShapeMismatch("operator does not match an even-site lattice".into()));
    }
    let cells = n_sites / 2;
    let mut out = M4::zeros();
    for l in 0..cells {
        let d = if l > cells / 2 { l as i64 - cells as i64 } else { l as i64 };
        let ph = cis(k * int(d));
        for u in 0..4 {
            for v in 0..4 {
                out[(u, v)] += op[(u, 4 * l + v)] * ph;
            }
        }
    }
    Ok(out)
}

/// Closed form `B_K = F [[1/F,0,0,0],[0,2,t(1+e^{-iK}),0],[0,-t(1+e^{iK}),2,0],[0,0,0,1/F]]`
/// with `t = tan(delta~)`, `F = (1 + X)^{-1/2} / 2`, `X = t^2 (2 + 2 cos K) / 4`.
pub fn mapping_b_of_k<T: Real>(k: T, params: &WalkParams<T>) -> Result<FourierBlock4<T>> {
    let d = params.delta_tilde();
    if d.cos().abs() <= lit_eps::<T>() {
        return Err(Error::Domain(format!("tan(delta~) is undefined at delta~ = {}", crate::scalar::to_f64(d))));
    }
    let t = d.tan();
    let two = T::one() + T::one();
    let x = t * t * (two + two * k.cos()) / (two * two);
    let f = (T::one() + x).sqrt().recip() / two;
    let mut m = M4::zeros();
    m[(0, 0)] = cone();
    m[(3, 3)] = cone();
    m[(1, 1)] = cr(two * f);
    m[(2, 2)] = cr(two * f);
    m[(1, 2)] = (cone::<T>() + cis(-k)) * (f * t);
    m[(2, 1)] = (cone::<T>() + cis(k)) * (-f * t);
    Ok(FourierBlock4 { k, matrix: m })
}

fn lit_eps<T: Real>() -> T {
    crate::scalar::lit(1e-12)
}

/// Eigenpairs of a 2x2 matrix, ordered by phase, with each eigenvector
/// normalized and its first nonzero component made real-positive.
fn eigen2<T: Real>(m: &M2<T>) -> ([Complex<T>; 2], M2<T>) {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half = cr(crate::scalar::lit::<T>(0.5));
    let tr = a + d;
    let disc = csqrt((a - d) * (a - d) + b * c * cr(crate::scalar::lit::<T>(4.0)));
    let mut lams = [(tr + disc) * half, (tr - disc) * half];
    linalg::sort_by_phase(&mut lams);
    let tiny = crate::scalar::lit::<T>(1e-14);
    let split = cabs(lams[0] - lams[1]) > tiny;
    let mut vecs = M2::zeros();
    for (i, &lam) in lams.iter().enumerate() {
        let v = if !split {
            if i == 0 {
                [cone(), czero()]
            } else {
                [czero(), cone()]
            }
        } else if cabs(b) > tiny || cabs(lam - a) > tiny {
            [b, lam - a]
        } else {
            [lam - d, c]
        };
        let norm = (cabs(v[0]).powi(2) + cabs(v[1]).powi(2)).sqrt();
        let lead = if cabs(v[0]) > tiny { v[0] } else { v[1] };
        let fix = cis(-carg(lead));
        vecs[(0, i)] = v[0] * fix / norm;
        vecs[(1, i)] = v[1] * fix / norm;
    }
    (lams, vecs)
}

/// `B_K = Q_K P_K^{-1}` built from the eigenvectors of the two `Pi` blocks.
/// Agrees with [`mapping_b_of_k`] only up to the eigenvector phases.
pub fn mapping_b_constructive<T: Real>(k: T, params: &WalkParams<T>) -> FourierBlock4<T> {
    let (u, w) = fourier_blocks(k, params);
    let (_, r) = eigen2(&u.pi_block());
    let (_, s) = eigen2(&w.pi_block());
    let pi_b = s * r.adjoint();
    let mut m = M4::zeros();
    m[(0, 0)] = cone();
    m[(3, 3)] = cone();
    m[(1, 1)] = pi_b[(0, 0)];
    m[(1, 2)] = pi_b[(0, 1)];
    m[(2, 1)] = pi_b[(1, 0)];
    m[(2, 2)] = pi_b[(1, 1)];
    FourierBlock4 { k, matrix: m }
}

/// Max-norm of `B U B^{-1} - W` at one momentum.
pub fn conjugation_defect<T: Real>(b: &FourierBlock4<T>, params: &WalkParams<T>) -> T {
    let (u, w) = fourier_blocks(b.k, params);
    let inv = b.matrix.try_inverse().expect("mapping block is invertible");
    max_diff4(&(b.matrix * u.matrix * inv), &w.matrix)
}

/// `b_N = (1/2pi) int B_K e^{iKN} dK` for `|N| <= max_offset`, by the uniform
/// trapezoid rule on `[-pi, pi)`.
pub fn mapping_real_space_coefficients<T: Real>(
    params: &WalkParams<T>,
    max_offset: usize,
    quadrature_points: usize,
) -> Result<MappingCoefficients<T>> {
    let required = (8 * max_offset).max(1);
    if quadrature_points < required {
        return Err(Error::InsufficientQuadrature { points: quadrature_points, max_offset, required });
    }
    let samples: Vec<(T, M4<T>)> = (0..quadrature_points)
        .map(|m| {
            let k = grid_k::<T>(m, quadrature_points);
            mapping_b_of_k(k, params).map(|b| (k, b.matrix))
        })
        .collect::<Result<_>>()?;
    let weight = cr(T::one() / int::<T>(quadrature_points as i64));
    let mut entries = BTreeMap::new();
    let max = max_offset as i64;
    for n in -max..=max {
        let mut acc = M4::zeros();
        for (k, b) in &samples {
            acc += b * cis(*k * int(n));
        }
        entries.insert(n, acc * weight);
    }
    Ok(MappingCoefficients { entries, quadrature_points })
}

/// Decay ratio `exp(-acosh(1 + 2/tan^2 delta~))` of `b_N`, set by the branch
/// points of `F` nearest the real axis, at `K = pi +- i acosh(1 + 2/tan^2 delta~)`.
pub fn predicted_decay_ratio<T: Real>(params: &WalkParams<T>) -> T {
    let t = params.delta_tilde().tan();
    if t == T::zero() {
        return T::zero();
    }
    let two = T::one() + T::one();
    let y = T::one() + two / (t * t);
    (-(y + (y * y - T::one()).sqrt()).ln()).exp()
}

/// The mapping `B` as a `2N x 2N` matrix on the periodic lattice, from its
/// exact discrete Fourier sum over the cell momenta.
pub fn mapping_real_space_operator<T: Real>(params: &WalkParams<T>) -> Result<CMatrix<T>> {
    let n = params.n_sites;
    let cells = n / 2;
    let ks = cell_momenta::<T>(n);
    let blocks: Vec<M4<T>> = ks.iter().map(|&k| mapping_b_of_k(k, params).map(|b| b.matrix)).collect::<Result<_>>()?;
    let weight = T::one() / int::<T>(cells as i64);
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for l in 0..cells {
        for lp in 0..cells {
            let d = int::<T>(l as i64 - lp as i64);
            let mut acc = M4::zeros();
            for (&k, b) in ks.iter().zip(&blocks) {
                acc += b * cis(k * d);
            }
            for u in 0..4 {
                for v in 0..4 {
                    out[(4 * l + u, 4 * lp + v)] = acc[(u, v)] * weight;
                }
            }
        }
    }
    Ok(out)
}

fn cell_coin<T: Real>(n_sites: usize, theta: T) -> CMatrix<T> {
    let (c, s) = ((theta / (T::one() + T::one())).cos(), (theta / (T::one() + T::one())).sin());
    let g = [[c, -s], [s, c]];
    let mut m = CMatrix::zeros(2 * n_sites, 2 * n_sites);
    for l in 0..n_sites / 2 {
        for a in 0..2 {
            for b in 0..2 {
                for lr in 0..2 {
                    m[(4 * l + 2 * a + lr, 4 * l + 2 * b + lr)] = cr(g[a][b]);
                }
            }
        }
    }
    m
}

/// Two-site cell shift of one coin branch: `E_l <- E_{l+1}` or `O_l <- O_{l-1}`.
fn cell_shift<T: Real>(n_sites: usize, even: bool) -> CMatrix<T> {
    let cells = n_sites / 2;
    let mut m = CMatrix::zeros(2 * n_sites, 2 * n_sites);
    for l in 0..cells {
        for lr in 0..2 {
            let (moving, fixed) = if even { (0, 2) } else { (2, 0) };
            let src = if even { (l + 1) % cells } else { (l + cells - 1) % cells };
            m[(4 * l + moving + lr, 4 * src + moving + lr)] = cone();
            m[(4 * l + fixed + lr, 4 * l + fixed + lr)] = cone();
        }
    }
    m
}

fn cell_v<T: Real>(n_sites: usize, adjoint: bool) -> CMatrix<T> {
    let rho = pauli::rho::<T>();
    let (e, o) = if adjoint { (rho.adjoint(), rho) } else { (rho, rho.adjoint()) };
    let mut m = CMatrix::zeros(2 * n_sites, 2 * n_sites);
    for l in 0..n_sites / 2 {
        for r in 0..2 {
            for c in 0..2 {
                m[(4 * l + r, 4 * l + c)] = e[(r, c)];
                m[(4 * l + 2 + r, 4 * l + 2 + c)] = o[(r, c)];
            }
        }
    }
    m
}

/// `V C(-theta~) S^R_K C(theta~) S^L_K V^dag` in the even-odd coin basis, with
/// `V = diag(rho, rho^dag)` and two-site cell shifts.
pub fn even_odd_coin_decomposition<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let (n, th) = (params.n_sites, params.theta_tilde());
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::new(FactorLabel::Conjugation("V"), cell_v(n, false)),
            Factor::new(FactorLabel::Exponential("C(-theta~) on EO"), cell_coin(n, -th)),
            Factor::new(FactorLabel::Exponential("S^R_K"), cell_shift(n, false)),
            Factor::new(FactorLabel::Exponential("C(theta~) on EO"), cell_coin(n, th)),
            Factor::new(FactorLabel::Exponential("S^L_K"), cell_shift(n, true)),
            Factor::new(FactorLabel::Conjugation("V^dag"), cell_v(n, true)),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitize::{build_even_odd, build_naive_dtqw};
    use crate::lattice::SpinorField;
    use crate::linalg::{circle_distance, eigenvalues, max_diff, sort_by_phase};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(dt: f64, n: usize) -> WalkParams<f64> {
        WalkParams::new(1.0, dt, 0.0, 0.0, n).unwrap()
    }

    fn eig2_sorted(m: &M2<f64>) -> [Complex<f64>; 2] {
        eigen2(m).0
    }

    #[test]
    fn strauch_forms_agree() {
        let p = params(0.46, 8);
        let th = p.theta_tilde();
        let o = strauch_operator(th, &p);
        assert!(max_diff(o.matrix(), &strauch_operator_breve(th, &p)) < 1e-14);
        assert!(max_diff(o.matrix(), &strauch_conjugate(th, &p)) < 1e-13);
        assert!(o.unitarity_defect() < 1e-13);
    }

    #[test]
    fn strauch_at_pi_is_squared_sigma1_walk() {
        let p = params(0.0, 6);
        let k = CoinOp::<f64>::k(std::f64::consts::PI).block(0);
        assert!(pauli::max_diff2(&k, &pauli::sigma1()) < 1e-15);
        let s = ShiftOp::<f64>::both().inv().matrix(6);
        let x = site_diag(6, &pauli::sigma1());
        let sx = linalg::mul(&s, &x);
        let want = linalg::mul(&sx, &sx);
        assert!(max_diff(strauch_operator(std::f64::consts::PI, &p).matrix(), &want) < 1e-15);
    }

    #[test]
    fn strauch_and_its_negative_differ() {
        let p = params(0.1, 16);
        let o = strauch_operator(p.theta_tilde(), &p);
        let mut a = eigenvalues(o.matrix());
        let mut b: Vec<_> = a.iter().map(|z| -z).collect();
        sort_by_phase(&mut a);
        sort_by_phase(&mut b);
        assert!(circle_distance(&a, &b) > 0.1);
    }

    #[test]
    fn blocks_at_k_zero_are_identity() {
        let p = params(0.7, 8);
        let (u, w) = fourier_blocks(0.0, &p);
        assert!(max_diff4(&u.matrix, &M4::identity()) < 1e-15);
        assert!(max_diff4(&w.matrix, &M4::identity()) < 1e-15);
    }

    #[test]
    fn blocks_match_real_space_operators() {
        let p = params(0.63, 12);
        let eo = build_even_odd(&p);
        let walk = build_naive_dtqw(&p);
        for k in [0.0, 0.4, -1.3, 2.2, 3.0] {
            let (u, w) = fourier_blocks(k, &p);
            assert!(max_diff4(&fourier_block_of_operator(eo.matrix(), 12, k).unwrap(), &u.matrix) < 1e-14);
            assert!(max_diff4(&fourier_block_of_operator(walk.matrix(), 12, k).unwrap(), &w.matrix) < 1e-14);
            assert!(u.unitarity_defect() < 1e-14 && w.unitarity_defect() < 1e-14);
            assert!(pauli::max_diff2(&u.corner_block(), &w.corner_block()) < 1e-15);
        }
    }

    #[test]
    fn pi_blocks_isospectral_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = params(rng.gen_range(0.0..3.0), 8);
            let k = rng.gen_range(-PI..PI);
            let (u, w) = fourier_blocks(k, &p);
            let (a, b) = (eig2_sorted(&u.pi_block()), eig2_sorted(&w.pi_block()));
            assert!(circle_distance(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn closed_form_mapping() {
        let p0 = params(0.0, 8);
        assert!(max_diff4(&mapping_b_of_k(1.1, &p0).unwrap().matrix, &M4::identity()) < 1e-15);
        for i in 0..16 {
            let dt = 0.05 + 0.15 * i as f64;
            let p = params(dt, 8);
            for j in 0..16 {
                let k = -std::f64::consts::PI + 0.39 * j as f64;
                let b = mapping_b_of_k(k, &p).unwrap();
                assert!(b.unitarity_defect() < 1e-13);
                assert!(conjugation_defect(&b, &p) < 1e-12);
                assert!(conjugation_defect(&mapping_b_constructive(k, &p), &p) < 1e-12);
            }
        }
    }

    #[test]
    fn mapping_domain_error() {
        let p = params(std::f64::consts::PI, 8);
        assert!(matches!(mapping_b_of_k(0.3, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn real_space_mapping_conjugates_schemes() {
        let p = params(0.8, 16);
        let b = mapping_real_space_operator(&p).unwrap();
        assert!(linalg::unitarity_defect(&b) < 1e-13);
        let lhs = linalg::conjugate(&b, build_even_odd(&p).matrix());
        assert!(max_diff(&lhs, build_naive_dtqw(&p).matrix()) < 1e-12);
    }

    #[test]
    fn coefficients_trivial_and_tail() {
        let c0 = mapping_real_space_coefficients(&params(0.0, 8), 4, 32).unwrap();
        assert!(max_diff4(c0.coefficient(0).unwrap(), &M4::identity()) < 1e-15);
        assert!(max_diff4(c0.coefficient(3).unwrap(), &M4::zeros()) < 1e-15);
        assert!(matches!(mapping_real_space_coefficients(&params(0.8, 8), 8, 63), Err(Error::InsufficientQuadrature { required: 64, .. })));
        let p = params(0.8, 8);
        let c = mapping_real_space_coefficients(&p, 8, 256).unwrap();
        for n in -8..=8 {
            assert!(c.coefficient(n).unwrap()[(1, 1)].norm() > 1e-12, "b_{n}");
        }
        let measured = c.decay_ratio(1, 1).unwrap();
        let predicted = predicted_decay_ratio(&p);
        assert!((measured / predicted - 1.0).abs() < 0.2, "{measured} vs {predicted}");
        assert!(c.reconstruction_error(&p, 37).unwrap() < 1e-10);
    }

    #[test]
    fn off_diagonal_is_f_times_two_offsets() {
        // b^{23}_N = t (f_N + f_{N-1}) where f_N are the coefficients of F.
        let p = params(0.8, 8);
        let t = p.delta_tilde().tan();
        let c = mapping_real_space_coefficients(&p, 6, 128).unwrap();
        for n in -5..=6 {
            let f_n = c.coefficient(n).unwrap()[(1, 1)] / 2.0;
            let f_m = c.coefficient(n - 1).unwrap()[(1, 1)] / 2.0;
            assert!((c.coefficient(n).unwrap()[(1, 2)] - (f_n + f_m) * t).norm() < 1e-14);
        }
    }

    #[test]
    fn truncation_error_decreases() {
        let p = params(1.0, 8);
        let errs: Vec<f64> = [1, 2, 4, 8]
            .iter()
            .map(|&m| mapping_real_space_coefficients(&p, m, 256).unwrap().reconstruction_error(&p, 29).unwrap())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn coin_decomposition_matches_even_odd() {
        for dt in [0.0, 0.3, 1.1, 2.9] {
            let p = params(dt, 12);
            let d = even_odd_coin_decomposition(&p);
            assert!(max_diff(d.matrix(), build_even_odd(&p).matrix()) < 1e-12);
            assert!(d.factorization_defect() < 1e-14);
        }
        let p0 = params(0.0, 8);
        assert!(max_diff(even_odd_coin_decomposition(&p0).matrix(), &linalg::identity(16)) < 1e-15);
    }

    #[test]
    fn coin_decomposition_four_term_action() {
        let p = params(0.9, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = crate::scalar::CVector::from_fn(16, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let psi = SpinorField::from_vector(p, data.clone()).unwrap();
        let out = even_odd_coin_decomposition(&p).step(&psi).unwrap().into_vector();
        let (c, s) = tilde_cs(&p);
        let cells = 4;
        let e = |l: usize, lr: usize| data[4 * (l % cells) + lr];
        let o = |l: usize, lr: usize| data[4 * (l % cells) + 2 + lr];
        for l in 0..cells {
            let lm = l + cells - 1;
            for lr in 0..2 {
                let x = 1 - lr;
                // E: s (s E_{l+1} - c s1 O_l) + c s1 (c s1 E_l + s O_{l-1})
                let want_e = (e(l + 1, lr) * s - o(l, x) * c) * s + (e(l, lr) * c + o(lm, x) * s) * c;
                // O: -c s1 (s E_{l+1} - c s1 O_l) + s (c s1 E_l + s O_{l-1})
                let want_o = -(e(l + 1, x) * s - o(l, lr) * c) * c + (e(l, x) * c + o(lm, lr) * s) * s;
                assert!((out[4 * l + lr] - want_e).norm() < 1e-14);
                assert!((out[4 * l + 2 + lr] - want_o).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rho_squares_to_sigma1() {
        let r = pauli::rho::<f64>();
        assert!(pauli::max_diff2(&(r * r), &pauli::sigma1()) < 1e-15);
    }

    proptest! {
        #[test]
        fn mapping_unitary_and_conjugating(dt in 0.0f64..3.0, k in -PI..PI) {
            let p = params(dt, 8);
            let b = mapping_b_of_k(k, &p).unwrap();
            prop_assert!(b.unitarity_defect() < 1e-13);
            prop_assert!(conjugation_defect(&b, &p) < 1e-12);
        }

        #[test]
        fn coefficients_never_vanish(dtilde in 0.4f64..0.6) {
            let p = params(2.0 * dtilde, 8);
            let c = mapping_real_space_coefficients(&p, 8, 256).unwrap();
            for n in -8..=8i64 {
                prop_assert!(c.coefficient(n).unwrap()[(1, 1)].norm() > 1e-13);
            }
        }
    }
}
