//! Discrete-time, ultralocal evolution operators built from coins and shifts.
//!
//! All block exponentials are closed-form Pauli rotations. Each walk keeps
//! its factor list so the product can be re-checked against the stored matrix.

use crate::error::Result;
use crate::lattice::{lr_index, pauli, Component, LatticeOperator, OperatorKind, SpinorField, WalkParams};
use crate::linalg::{self, m2, site_blocks, site_diag};
use crate::scalar::{ci, cis, cone, cr, czero, CMatrix, Real, M2};

use Component::{L, R};

#[derive(Debug, Clone, PartialEq)]
pub enum CoinKind<T> {
    /// `exp(-i sigma^2 theta / 2)`.
    C,
    /// `exp(-i sigma^1 theta / 2)`.
    Cbreve,
    /// `i exp(-i sigma^1 theta / 2)`.
    K,
    /// `C(theta)` with `e^{+-i vartheta_p}` on its diagonal, per site.
    Gauged(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinOp<T> {
    pub theta: T,
    pub kind: CoinKind<T>,
}

impl<T: Real> CoinOp<T> {
    pub fn c(theta: T) -> Self {
        Self { theta, kind: CoinKind::C }
    }

    pub fn cbreve(theta: T) -> Self {
        Self { theta, kind: CoinKind::Cbreve }
    }

    pub fn k(theta: T) -> Self {
        Self { theta, kind: CoinKind::K }
    }

    pub fn gauged(theta: T, phases: Vec<T>) -> Self {
        Self { theta, kind: CoinKind::Gauged(phases) }
    }

    /// The 2x2 block on site `p`.
    pub fn block(&self, p: usize) -> M2<T> {
        let (c, s) = half_angle(self.theta);
        match &self.kind {
            CoinKind::C => m2(cr(c), cr(-s), cr(s), cr(c)),
            CoinKind::Cbreve => m2(cr(c), ci(-s), ci(-s), cr(c)),
            CoinKind::K => m2(ci(c), cr(s), cr(s), ci(c)),
            CoinKind::Gauged(ph) => m2(cis(ph[p]) * cr(c), cr(-s), cr(s), cis(-ph[p]) * cr(c)),
        }
    }

    pub fn matrix(&self, n_sites: usize) -> CMatrix<T> {
        let blocks: Vec<M2<T>> = (0..n_sites).map(|p| self.block(p)).collect();
        site_blocks(&blocks)
    }
}

/// `(cos(theta/2), sin(theta/2))`, evaluated through the complement
/// `(pi - |theta|)/2` near `theta = +-pi` so the coin is exact there.
fn half_angle<T: Real>(theta: T) -> (T, T) {
    let two = T::one() + T::one();
    if theta.abs() <= T::frac_pi_2() {
        let h = theta / two;
        return (h.cos(), h.sin());
    }
    let u = (T::pi() - theta.abs()) / two;
    let sign = if theta < T::zero() { -T::one() } else { T::one() };
    (u.sin(), sign * u.cos())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShiftKind<T> {
    /// `diag(e^{ik}, 1)`: `(S^L psi)^L_p = psi^L_{p+1}`.
    Left,
    /// `diag(1, e^{-ik})`: `(S^R psi)^R_p = psi^R_{p-1}`.
    Right,
    /// `S^L S^R`.
    Both,
    /// `diag(e^{i vartheta_p}, 1)`.
    LeftPhase(Vec<T>),
    /// `diag(1, e^{-i vartheta_p})`.
    RightPhase(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOp<T> {
    pub kind: ShiftKind<T>,
    pub inverse: bool,
}

impl<T: Real> ShiftOp<T> {
    pub fn left() -> Self {
        Self { kind: ShiftKind::Left, inverse: false }
    }

    pub fn right() -> Self {
        Self { kind: ShiftKind::Right, inverse: false }
    }

    pub fn both() -> Self {
        Self { kind: ShiftKind::Both, inverse: false }
    }

    pub fn left_phase(phases: Vec<T>) -> Self {
        Self { kind: ShiftKind::LeftPhase(phases), inverse: false }
    }

    pub fn right_phase(phases: Vec<T>) -> Self {
        Self { kind: ShiftKind::RightPhase(phases), inverse: false }
    }

    pub fn inv(mut self) -> Self {
        self.inverse = !self.inverse;
        self
    }

    pub fn matrix(&self, n_sites: usize) -> CMatrix<T> {
        let n = n_sites;
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        let (hop_l, hop_r): (Option<isize>, Option<isize>) = match self.kind {
            ShiftKind::Left => (Some(1), None),
            ShiftKind::Right => (None, Some(-1)),
            ShiftKind::Both => (Some(1), Some(-1)),
            _ => (None, None),
        };
        for p in 0..n as isize {
            match &self.kind {
                ShiftKind::LeftPhase(ph) => {
                    m[(lr_index(n, p, L), lr_index(n, p, L))] = cis(ph[p as usize]);
                    m[(lr_index(n, p, R), lr_index(n, p, R))] = cone();
                }
                ShiftKind::RightPhase(ph) => {
                    m[(lr_index(n, p, L), lr_index(n, p, L))] = cone();
                    m[(lr_index(n, p, R), lr_index(n, p, R))] = cis(-ph[p as usize]);
                }
                _ => {
                    m[(lr_index(n, p, L), lr_index(n, p + hop_l.unwrap_or(0), L))] = cone();
                    m[(lr_index(n, p, R), lr_index(n, p + hop_r.unwrap_or(0), R))] = cone();
                }
            }
        }
        if self.inverse {
            m.adjoint()
        } else {
            m
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorLabel<T> {
    Coin(CoinOp<T>),
    Shift(ShiftOp<T>),
    /// Site-diagonal mass phase.
    Mass,
    /// Site-diagonal `e^{-i alpha_p}` potential phase.
    Potential,
    /// Closed-form exponential of a block-diagonal Hamiltonian piece.
    Exponential(&'static str),
    /// Constant site-diagonal change of coin basis.
    Conjugation(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T: Real> {
    pub label: FactorLabel<T>,
    pub matrix: CMatrix<T>,
}

impl<T: Real> Factor<T> {
    pub fn coin(op: CoinOp<T>, n_sites: usize) -> Self {
        let matrix = op.matrix(n_sites);
        Self { label: FactorLabel::Coin(op), matrix }
    }

    pub fn shift(op: ShiftOp<T>, n_sites: usize) -> Self {
        let matrix = op.matrix(n_sites);
        Self { label: FactorLabel::Shift(op), matrix }
    }

    pub fn new(label: FactorLabel<T>, matrix: CMatrix<T>) -> Self {
        Self { label, matrix }
    }
}

/// A unitary one-step evolution operator with its factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOperator<T: Real> {
    pub op: LatticeOperator<T>,
    /// Factors in left-to-right product order.
    pub factors: Vec<Factor<T>>,
}

impl<T: Real> WalkOperator<T> {
    pub fn from_factors(params: WalkParams<T>, factors: Vec<Factor<T>>) -> Self {
        let mats: Vec<CMatrix<T>> = factors.iter().map(|f| f.matrix.clone()).collect();
        let matrix = linalg::product(&mats);
        Self { op: LatticeOperator::lr(matrix, OperatorKind::Unitary, params), factors }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.op.matrix
    }

    pub fn params(&self) -> &WalkParams<T> {
        &self.op.params
    }

    pub fn unitarity_defect(&self) -> T {
        self.op.unitarity_defect()
    }

    /// Max-norm distance between the stored matrix and the product of its factors.
    pub fn factorization_defect(&self) -> T {
        let mut acc = linalg::identity::<T>(self.op.dim());
        for f in &self.factors {
            acc = linalg::mul(&acc, &f.matrix);
        }
        linalg::max_diff(&acc, &self.op.matrix)
    }

    pub fn step(&self, field: &SpinorField<T>) -> Result<SpinorField<T>> {
        self.op.apply(field)
    }

    /// `self * other`, concatenating factor lists.
    pub fn then_after(&self, other: &WalkOperator<T>) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let matrix = linalg::mul(&self.op.matrix, &other.op.matrix);
        Self { op: LatticeOperator::lr(matrix, OperatorKind::Unitary, self.op.params), factors }
    }
}

fn rotation<T: Real>(angle: T) -> M2<T> {
    let (c, s) = (angle.cos(), angle.sin());
    m2(cr(c), cr(-s), cr(s), cr(c))
}

fn sigma1_conj<T: Real>(n_sites: usize, m: &CMatrix<T>) -> CMatrix<T> {
    let x = site_diag(n_sites, &pauli::sigma1::<T>());
    linalg::mul(&linalg::mul(&x, m), &x)
}

/// `diag(mu, mu*, ...)` with `mu = exp(-i dt m)`.
pub fn build_u_mass<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let mu = cis(-params.dt * params.m);
    let block = m2(mu, czero(), czero(), mu.conj());
    WalkOperator::from_factors(*params, vec![Factor::new(FactorLabel::Mass, site_diag(params.n_sites, &block))])
}

fn u_on_matrix<T: Real>(n_sites: usize, delta: T) -> CMatrix<T> {
    site_diag(n_sites, &rotation(delta))
}

/// Rotation blocks on the staggered pairs `(R_p, L_{p+1})`, wrap included.
fn u_int_matrix<T: Real>(n_sites: usize, delta: T) -> CMatrix<T> {
    let d = 2 * n_sites;
    let rot = rotation(delta);
    let mut m = CMatrix::zeros(d, d);
    for p in 0..n_sites {
        let (i, j) = (2 * p + 1, (2 * p + 2) % d);
        m[(i, i)] = rot[(0, 0)];
        m[(i, j)] = rot[(0, 1)];
        m[(j, i)] = rot[(1, 0)];
        m[(j, j)] = rot[(1, 1)];
    }
    m
}

/// `exp(-i dt H^on)`: `[[c, -s], [s, c]]` on every site.
pub fn build_u_on<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let m = u_on_matrix(params.n_sites, params.delta());
    WalkOperator::from_factors(*params, vec![Factor::new(FactorLabel::Exponential("U^on"), m)])
}

/// `exp(-i dt H^int)`: the same rotation on the staggered pairs `(R_p, L_{p+1})`.
pub fn build_u_int<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let m = u_int_matrix(params.n_sites, params.delta());
    WalkOperator::from_factors(*params, vec![Factor::new(FactorLabel::Exponential("U^int"), m)])
}

/// `U^t = U^on U^int`.
pub fn build_u_transport<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let n = params.n_sites;
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::new(FactorLabel::Exponential("U^on"), u_on_matrix(n, params.delta())),
            Factor::new(FactorLabel::Exponential("U^int"), u_int_matrix(n, params.delta())),
        ],
    )
}

/// `C(-theta) S^R C(theta) S^L`.
pub fn build_dtqw_compact<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let (n, th) = (params.n_sites, params.theta());
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::coin(CoinOp::c(-th), n),
            Factor::shift(ShiftOp::right(), n),
            Factor::coin(CoinOp::c(th), n),
            Factor::shift(ShiftOp::left(), n),
        ],
    )
}

/// `C(-theta) S^L C(theta) S^R`, equal to [`build_dtqw_compact`].
pub fn build_dtqw_compact_swapped<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let (n, th) = (params.n_sites, params.theta());
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::coin(CoinOp::c(-th), n),
            Factor::shift(ShiftOp::left(), n),
            Factor::coin(CoinOp::c(th), n),
            Factor::shift(ShiftOp::right(), n),
        ],
    )
}

/// Full left-right walk `U^m U^t`.
pub fn build_left_right_walk<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    build_u_mass(params).then_after(&build_dtqw_compact(params))
}

/// `S^R C(-theta_1) S C(theta_2) S (S^R)^{-1}`.
pub fn build_two_angle_walk<T: Real>(theta1: T, theta2: T, params: &WalkParams<T>) -> WalkOperator<T> {
    let n = params.n_sites;
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::shift(ShiftOp::right(), n),
            Factor::coin(CoinOp::c(-theta1), n),
            Factor::shift(ShiftOp::both(), n),
            Factor::coin(CoinOp::c(theta2), n),
            Factor::shift(ShiftOp::both(), n),
            Factor::shift(ShiftOp::right().inv(), n),
        ],
    )
}

/// Angles `theta~_i = pi - kappa_i dt / a` of the two-angle walk.
pub fn two_angle_thetas<T: Real>(kappa1: T, kappa2: T, params: &WalkParams<T>) -> (T, T) {
    let d = params.dt / params.a;
    (T::pi() - kappa1 * d, T::pi() - kappa2 * d)
}

/// Generator `G` of the two-angle walk's continuous-time limit, `dpsi/dt = G psi`:
/// `dL_p = -(k1 R_{p+1} - k2 R_{p-1}) / 2a`, `dR_p = -(k2 L_{p+1} - k1 L_{p-1}) / 2a`.
pub fn two_angle_limit_generator<T: Real>(kappa1: T, kappa2: T, params: &WalkParams<T>) -> CMatrix<T> {
    let n = params.n_sites;
    let w = -T::one() / ((T::one() + T::one()) * params.a);
    let mut g = CMatrix::zeros(2 * n, 2 * n);
    for p in 0..n as isize {
        g[(lr_index(n, p, L), lr_index(n, p + 1, R))] += cr(w * kappa1);
        g[(lr_index(n, p, L), lr_index(n, p - 1, R))] -= cr(w * kappa2);
        g[(lr_index(n, p, R), lr_index(n, p + 1, L))] += cr(w * kappa2);
        g[(lr_index(n, p, R), lr_index(n, p - 1, L))] -= cr(w * kappa1);
    }
    g
}

/// Naive-fermion walk `S^R C(-theta~) S C(theta~) S (S^R)^{-1}`.
pub fn build_naive_dtqw<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let th = params.theta_tilde();
    build_two_angle_walk(th, th, params)
}

/// The naive walk as the two-factor product `(U^t_{2a})^◊ U^t_{2a}`, with
/// `(U^t_{2a})^◊ = (U^int_{2a})^◊ (U^on_{2a})^◊` and `X^◊ = sigma^1 X sigma^1`.
pub fn build_naive_two_factor<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let (n, d) = (params.n_sites, params.delta_tilde());
    let on = u_on_matrix(n, d);
    let int = u_int_matrix(n, d);
    WalkOperator::from_factors(
        *params,
        vec![
            Factor::new(FactorLabel::Exponential("(U^int_2a)'"), sigma1_conj(n, &int)),
            Factor::new(FactorLabel::Exponential("(U^on_2a)'"), sigma1_conj(n, &on)),
            Factor::new(FactorLabel::Exponential("U^on_2a"), on),
            Factor::new(FactorLabel::Exponential("U^int_2a"), int),
        ],
    )
}

/// `(U^t_{2a})^◊ = (U^int_{2a})^◊ (U^on_{2a})^◊`.
pub fn build_u_transport_2a_diamond<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let mut w = build_naive_two_factor(params);
    w.factors.truncate(2);
    WalkOperator::from_factors(*params, w.factors)
}

/// Naive mass step `exp(i dt m sigma^2)`, the exponential of `-dt m (-sigma^2)`.
pub fn build_u_mass_naive<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let x = params.dt * params.m;
    let (c, s) = (x.cos(), x.sin());
    let block = m2(cr(c), cr(s), cr(-s), cr(c));
    WalkOperator::from_factors(*params, vec![Factor::new(FactorLabel::Mass, site_diag(params.n_sites, &block))])
}

/// Full naive walk `U^m_n U^t_n`.
pub fn build_naive_walk<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    build_u_mass_naive(params).then_after(&build_naive_dtqw(params))
}

/// Bond rotations on `(p, p+1)` for `p` of the given parity, with a 2x2
/// site-block `a` on the diagonal and `b`, `b2` on the off-diagonal blocks.
fn bond_blocks<T: Real>(n_sites: usize, parity: usize, a: &M2<T>, b: &M2<T>, b2: &M2<T>) -> CMatrix<T> {
    let n = n_sites;
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for p in (parity..n).step_by(2) {
        let q = (p + 1) % n;
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * p + r, 2 * p + c)] = a[(r, c)];
                m[(2 * q + r, 2 * q + c)] = a[(r, c)];
                m[(2 * p + r, 2 * q + c)] = b[(r, c)];
                m[(2 * q + r, 2 * p + c)] = b2[(r, c)];
            }
        }
    }
    m
}

fn even_odd_factors<T: Real>(params: &WalkParams<T>) -> (CMatrix<T>, CMatrix<T>) {
    let d = params.delta_tilde();
    let (c, s) = (d.cos(), d.sin());
    let s1 = pauli::sigma1::<T>();
    let diag = pauli::identity::<T>() * cr(c);
    let up = s1 * cr(-s);
    let down = s1 * cr(s);
    (bond_blocks(params.n_sites, 0, &diag, &up, &down), bond_blocks(params.n_sites, 1, &diag, &up, &down))
}

/// Even-odd digitization of the naive transport, `U^e U^o`.
pub fn build_even_odd<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let (e, o) = even_odd_factors(params);
    WalkOperator::from_factors(
        *params,
        vec![Factor::new(FactorLabel::Exponential("U^e"), e), Factor::new(FactorLabel::Exponential("U^o"), o)],
    )
}

/// Full even-odd scheme `U^m_n U^e U^o`.
pub fn build_even_odd_walk<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    build_u_mass_naive(params).then_after(&build_even_odd(params))
}

fn g_conjugations<T: Real>(n: usize) -> (Factor<T>, Factor<T>) {
    let g = pauli::g_matrix::<T>();
    (
        Factor::new(FactorLabel::Conjugation("G"), site_diag(n, &g)),
        Factor::new(FactorLabel::Conjugation("G^-1"), site_diag(n, &g.adjoint())),
    )
}

/// Even-odd digitization of the nearest-neighbour Wilson term, conjugated by `G`.
pub fn build_wilson_even_odd<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let d = params.delta_tilde_r();
    let (c, s) = (d.cos(), d.sin());
    let s1 = pauli::sigma1::<T>();
    let diag = pauli::identity::<T>() * cr(c);
    let off = s1 * ci(s);
    let n = params.n_sites;
    let (g, g_inv) = g_conjugations(n);
    WalkOperator::from_factors(
        *params,
        vec![
            g,
            Factor::new(FactorLabel::Exponential("U^(r)e"), bond_blocks(n, 0, &diag, &off, &off)),
            Factor::new(FactorLabel::Exponential("U^(r)o"), bond_blocks(n, 1, &diag, &off, &off)),
            g_inv,
        ],
    )
}

/// `G S^R K(theta~_r) S K(theta~_r) S (S^R)^{-1} G^{-1}`.
pub fn build_wilson_dtqw<T: Real>(params: &WalkParams<T>) -> WalkOperator<T> {
    let (n, th) = (params.n_sites, params.theta_tilde_r());
    let (g, g_inv) = g_conjugations(n);
    WalkOperator::from_factors(
        *params,
        vec![
            g,
            Factor::shift(ShiftOp::right(), n),
            Factor::coin(CoinOp::k(th), n),
            Factor::shift(ShiftOp::both(), n),
            Factor::coin(CoinOp::k(th), n),
            Factor::shift(ShiftOp::both(), n),
            Factor::shift(ShiftOp::right().inv(), n),
            g_inv,
        ],
    )
}

/// Names of every walk builder that takes only [`WalkParams`].
pub const WALK_SCHEMES: [&str; 12] = [
    "u-mass",
    "u-on",
    "u-int",
    "u-transport",
    "dtqw-compact",
    "left-right-walk",
    "naive-dtqw",
    "naive-two-factor",
    "naive-walk",
    "even-odd",
    "even-odd-walk",
    "wilson-dtqw",
];

/// Builds a walk by scheme name.
pub fn build_walk<T: Real>(scheme: &str, params: &WalkParams<T>) -> Option<WalkOperator<T>> {
    let w = match scheme {
        "u-mass" => build_u_mass(params),
        "u-on" => build_u_on(params),
        "u-int" => build_u_int(params),
        "u-transport" => build_u_transport(params),
        "dtqw-compact" => build_dtqw_compact(params),
        "left-right-walk" => build_left_right_walk(params),
        "naive-dtqw" => build_naive_dtqw(params),
        "naive-two-factor" => build_naive_two_factor(params),
        "naive-walk" => build_naive_walk(params),
        "even-odd" => build_even_odd(params),
        "even-odd-walk" => build_even_odd_walk(params),
        "wilson-dtqw" => build_wilson_dtqw(params),
        "wilson-even-odd" => build_wilson_even_odd(params),
        _ => return None,
    };
    Some(w)
}

/// Ultralocality radius, in non-staggered sites, of a walk scheme.
pub fn scheme_radius(scheme: &str) -> Option<usize> {
    match scheme {
        "u-mass" | "u-on" => Some(0),
        "u-int" | "u-transport" | "dtqw-compact" | "left-right-walk" => Some(1),
        "naive-dtqw" | "naive-two-factor" | "naive-walk" | "even-odd" | "even-odd-walk" | "wilson-dtqw" | "wilson-even-odd" => Some(2),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{self, left_right_transport, naive_even_odd_split, split_on_inter};
    use crate::lattice::SpinorField;
    use crate::linalg::{conjugate, evolution, expm, max_diff};
    use crate::scalar::lit;
    use num_complex::Complex;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(n: usize, dt: f64) -> WalkParams<f64> {
        WalkParams::new(1.0, dt, 0.0, 1.0, n).unwrap()
    }

    fn eye(n: usize) -> CMatrix<f64> {
        linalg::identity(2 * n)
    }

    #[test]
    fn mass_step_values() {
        let p = WalkParams::new(1.0, 0.0, 1.0, 0.0, 4).unwrap();
        assert!(max_diff(build_u_mass(&p).matrix(), &eye(4)) < 1e-15);
        let p = WalkParams::new(1.0, PI, 1.0, 0.0, 4).unwrap();
        assert!(max_diff(build_u_mass(&p).matrix(), &(eye(4) * cr(-1.0))) < 1e-15);
        let p = WalkParams::new(1.0, FRAC_PI_2, 1.0, 0.0, 4).unwrap();
        let m = build_u_mass(&p);
        for i in 0..8 {
            let want = if i % 2 == 0 { ci(-1.0) } else { ci(1.0) };
            assert!((m.matrix()[(i, i)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn on_and_int_at_extremes() {
        let p = params(4, 0.0);
        assert_eq!(build_u_on(&p).matrix(), &eye(4));
        assert_eq!(build_u_int(&p).matrix(), &eye(4));
        let p = params(4, FRAC_PI_2);
        let on = build_u_on(&p);
        let want = rotation(FRAC_PI_2);
        for r in 0..2 {
            for c in 0..2 {
                assert!((on.matrix()[(r, c)] - want[(r, c)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn on_and_int_match_dense_exponential() {
        for &dt in &[0.1, 0.5, 1.3] {
            let p = WalkParams::new(0.8, dt, 0.0, 0.0, 6).unwrap();
            let (on, int) = split_on_inter(&hamiltonians::build_left_right_transport(&p)).unwrap();
            assert!(max_diff(build_u_on(&p).matrix(), &evolution(&on.matrix, dt)) < 1e-12);
            assert!(max_diff(build_u_int(&p).matrix(), &evolution(&int.matrix, dt)) < 1e-12);
        }
    }

    #[test]
    fn transport_entries_follow_product_pattern() {
        let p = params(6, FRAC_PI_4);
        let u = build_u_transport(&p);
        let m = u.matrix();
        // row L_p: s c psi^R_{p-1} + c^2 psi^L_p - s c psi^R_p + s^2 psi^L_{p+1}
        let h = 0.5;
        let row = lr_index(6, 2, L);
        assert!((m[(row, lr_index(6, 1, R))] - cr(h)).norm() < 1e-15);
        assert!((m[(row, lr_index(6, 2, L))] - cr(h)).norm() < 1e-15);
        assert!((m[(row, lr_index(6, 2, R))] - cr(-h)).norm() < 1e-15);
        assert!((m[(row, lr_index(6, 3, L))] - cr(h)).norm() < 1e-15);
    }

    #[test]
    fn one_step_on_peak_matches_update_rule() {
        // psi^L_{j+1,p} = sc psi^R_{p-1} + c^2 psi^L_p - sc psi^R_p + s^2 psi^L_{p+1}
        // psi^R_{j+1,p} = sc psi^L_p + c^2 psi^R_p + s^2 psi^R_{p-1} - sc psi^L_{p+1}
        let p = params(8, 0.37);
        let (c, s) = (0.37f64.cos(), 0.37f64.sin());
        let w = build_dtqw_compact(&p);
        for comp in [L, R] {
            let peak = SpinorField::delta_peak(p, 4, comp).unwrap();
            let out = w.step(&peak).unwrap();
            let mut want = SpinorField::zeros(p).into_vector();
            match comp {
                L => {
                    want[lr_index(8, 4, L)] = cr(c * c);
                    want[lr_index(8, 3, L)] = cr(s * s);
                    want[lr_index(8, 4, R)] = cr(s * c);
                    want[lr_index(8, 3, R)] = cr(-s * c);
                }
                R => {
                    want[lr_index(8, 5, L)] = cr(s * c);
                    want[lr_index(8, 4, L)] = cr(-s * c);
                    want[lr_index(8, 4, R)] = cr(c * c);
                    want[lr_index(8, 5, R)] = cr(s * s);
                }
            }
            assert!((out.as_vector() - want).camax() < 1e-15);
        }
    }

    #[test]
    fn compact_form_and_swap() {
        for &dt in &[0.1, 0.5, 1.0] {
            let p = params(8, dt);
            let t = build_u_transport(&p);
            assert!(max_diff(build_dtqw_compact(&p).matrix(), t.matrix()) < 1e-13);
            assert!(max_diff(build_dtqw_compact_swapped(&p).matrix(), t.matrix()) < 1e-13);
        }
        assert!(max_diff(build_dtqw_compact(&params(4, 0.0)).matrix(), &eye(4)) < 1e-15);
    }

    #[test]
    fn naive_forms_agree() {
        for &dt in &[0.0, 0.2, 0.9] {
            let p = params(8, dt);
            let five = build_naive_dtqw(&p);
            assert!(max_diff(five.matrix(), build_naive_two_factor(&p).matrix()) < 1e-13);
            if dt == 0.0 {
                assert!(max_diff(five.matrix(), &eye(8)) < 1e-15);
            }
        }
    }

    #[test]
    fn diamond_transport_pattern() {
        // rows of (U^t_2a)': L_p gets c~^2 L_p, -s~c~ R_{p-1} ... with L and R exchanged
        let p = params(6, 0.6);
        let dm = build_u_transport_2a_diamond(&p);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let m = dm.matrix();
        let x = site_diag(6, &pauli::sigma1::<f64>());
        let p2 = WalkParams::new(2.0, 0.6, 0.0, 0.0, 6).unwrap();
        let (on, int) = split_on_inter(&hamiltonians::build_left_right_transport(&p2)).unwrap();
        let oracle = &x * evolution(&int.matrix, 0.6) * &evolution(&on.matrix, 0.6) * &x;
        assert!(max_diff(m, &oracle) < 1e-12);
        let want = [
            (lr_index(6, 2, L), lr_index(6, 2, L), c * c),
            (lr_index(6, 2, L), lr_index(6, 2, R), s * c),
            (lr_index(6, 2, L), lr_index(6, 3, L), s * s),
            (lr_index(6, 2, L), lr_index(6, 3, R), -s * c),
            (lr_index(6, 2, R), lr_index(6, 1, L), s * c),
            (lr_index(6, 2, R), lr_index(6, 1, R), s * s),
            (lr_index(6, 2, R), lr_index(6, 2, L), -s * c),
            (lr_index(6, 2, R), lr_index(6, 2, R), c * c),
        ];
        for (i, j, v) in want {
            assert!((m[(i, j)] - cr(v)).norm() < 1e-15, "({i},{j})");
        }
        for row in [lr_index(6, 2, L), lr_index(6, 2, R)] {
            assert_eq!(m.row(row).iter().filter(|z| z.norm() > 1e-15).count(), 4);
        }
    }

    #[test]
    fn naive_walk_limit_is_naive_transport() {
        let dt = 1e-3;
        let p = params(8, dt);
        let h = hamiltonians::naive_transport(&p);
        assert!(max_diff(build_naive_dtqw(&p).matrix(), &evolution(&h, dt)) < 1e-5);
    }

    #[test]
    fn even_odd_matches_dense_exponentials() {
        let p = WalkParams::new(1.0, 0.74, 0.0, 0.0, 8).unwrap();
        let (he, ho) = naive_even_odd_split(&p);
        let oracle = evolution(&he, 0.74) * evolution(&ho, 0.74);
        assert!(max_diff(build_even_odd(&p).matrix(), &oracle) < 1e-12);
        assert!(max_diff(build_even_odd(&params(8, 0.0)).matrix(), &eye(8)) < 1e-15);
    }

    #[test]
    fn even_odd_one_step_rule() {
        // (U Phi)_p = c^2 Phi_p - sigma^1 s c (Phi_{p+1} - Phi_{p-1}) + s^2 Phi_{p + 2(-1)^p}
        let n = 8;
        let p = params(n, 0.74);
        let (c, s) = (0.37f64.cos(), 0.37f64.sin());
        let v = crate::scalar::CVector::<f64>::from_fn(2 * n, |i, _| Complex::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()));
        let out = build_even_odd(&p).matrix() * &v;
        let phi = |q: isize| {
            let q = q.rem_euclid(n as isize) as usize;
            nalgebra::Vector2::new(v[2 * q], v[2 * q + 1])
        };
        let s1 = pauli::sigma1::<f64>();
        for q in 0..n as isize {
            let jump = if q % 2 == 0 { 2 } else { -2 };
            let want = phi(q) * cr(c * c) - s1 * (phi(q + 1) - phi(q - 1)) * cr(s * c) + phi(q + jump) * cr(s * s);
            let q = q as usize;
            assert!((out[2 * q] - want[0]).norm() < 1e-14 && (out[2 * q + 1] - want[1]).norm() < 1e-14);
        }
    }

    #[test]
    fn wilson_walk_reduces_at_zero_r() {
        let p = WalkParams::new(1.0, 0.5, 0.0, 0.0, 8).unwrap();
        assert!(max_diff(build_wilson_dtqw(&p).matrix(), &eye(8)) < 1e-15);
    }

    #[test]
    fn wilson_even_odd_matches_dense_exponential() {
        let p = WalkParams::new(1.0, 0.6, 0.0, 0.8, 8).unwrap();
        let nn = hamiltonians::wilson_nearest_neighbor(&p);
        let g = site_diag(8, &pauli::g_matrix::<f64>());
        let rot = conjugate(&g.adjoint(), &nn);
        // split the rotated term into even and odd bonds through the pattern of nn
        let mut he = CMatrix::<f64>::zeros(16, 16);
        let mut ho = CMatrix::<f64>::zeros(16, 16);
        for i in 0..16 {
            for j in 0..16 {
                let (pi, pj) = (i / 2, j / 2);
                let bond = if (pi + 1) % 8 == pj {
                    pi
                } else if (pj + 1) % 8 == pi {
                    pj
                } else {
                    continue;
                };
                if bond % 2 == 0 {
                    he[(i, j)] = rot[(i, j)];
                } else {
                    ho[(i, j)] = rot[(i, j)];
                }
            }
        }
        let oracle = conjugate(&g, &(evolution(&he, 0.6) * evolution(&ho, 0.6)));
        assert!(max_diff(build_wilson_even_odd(&p).matrix(), &oracle) < 1e-12);
    }

    #[test]
    fn wilson_bracket_pattern() {
        // G^-1 U_eo^(r) G has c_r^2 on the diagonal, i s_r c_r to the neighbours, -s_r^2 two sites away
        let p = WalkParams::new(1.0, 0.6, 0.0, 0.8, 8).unwrap();
        let g = site_diag(8, &pauli::g_matrix::<f64>());
        let inner = conjugate(&g.adjoint(), build_wilson_even_odd(&p).matrix());
        let d = 0.8 * 0.3;
        let (c, s) = (f64::cos(d), f64::sin(d));
        assert!((inner[(0, 0)] - cr(c * c)).norm() < 1e-15);
        assert!((inner[(0, 3)] - ci(s * c)).norm() < 1e-15);
        assert!((inner[(0, 4)] - cr(-s * s)).norm() < 1e-15);
    }

    #[test]
    fn wilson_walk_continuum_limit() {
        let dt = 1e-3;
        let p = WalkParams::new(1.0, dt, 0.0, 0.8, 8).unwrap();
        let h = hamiltonians::wilson_nearest_neighbor(&p);
        assert!(max_diff(build_wilson_dtqw(&p).matrix(), &evolution(&h, dt)) < 1e-5);
    }

    #[test]
    fn two_angle_reductions() {
        let p = params(8, 0.44);
        let th = p.theta_tilde();
        assert!(max_diff(build_two_angle_walk(th, th, &p).matrix(), build_naive_dtqw(&p).matrix()) < 1e-13);
        assert!(max_diff(build_two_angle_walk(PI, PI, &p).matrix(), &eye(8)) < 1e-15);
    }

    #[test]
    fn two_angle_limit_is_first_order() {
        let (k1, k2) = (0.7, 1.9);
        let errs: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&dt| {
                let p = params(8, dt);
                let (t1, t2) = two_angle_thetas(k1, k2, &p);
                let w = build_two_angle_walk(t1, t2, &p);
                let fd = (w.matrix() - eye(8)) * cr(1.0 / dt);
                max_diff(&fd, &two_angle_limit_generator(k1, k2, &p))
            })
            .collect();
        assert!(((errs[0] / errs[1]).log10() - 1.0).abs() < 0.05, "{errs:?}");
    }

    #[test]
    fn two_angle_one_step_rule() {
        let p = params(8, 0.1);
        let (t1, t2) = (2.3, 2.9);
        let w = build_two_angle_walk(t1, t2, &p);
        let (s1, c1) = ((t1 / 2.0).cos(), (t1 / 2.0).sin());
        let (s2, c2) = ((t2 / 2.0).cos(), (t2 / 2.0).sin());
        let m = w.matrix();
        let q = 4;
        let lrow = lr_index(8, q, L);
        assert!((m[(lrow, lr_index(8, q + 2, L))] - cr(s2 * s1)).norm() < 1e-15);
        assert!((m[(lrow, lr_index(8, q, L))] - cr(c2 * c1)).norm() < 1e-15);
        assert!((m[(lrow, lr_index(8, q + 1, R))] - cr(-c2 * s1)).norm() < 1e-15);
        assert!((m[(lrow, lr_index(8, q - 1, R))] - cr(s2 * c1)).norm() < 1e-15);
        let rrow = lr_index(8, q, R);
        assert!((m[(rrow, lr_index(8, q, R))] - cr(c2 * c1)).norm() < 1e-15);
        assert!((m[(rrow, lr_index(8, q + 1, L))] - cr(-s2 * c1)).norm() < 1e-15);
        assert!((m[(rrow, lr_index(8, q - 1, L))] - cr(c2 * s1)).norm() < 1e-15);
        assert!((m[(rrow, lr_index(8, q - 2, R))] - cr(s2 * s1)).norm() < 1e-15);
    }

    #[test]
    fn coins_are_unitary_and_consistent() {
        let th = 0.83;
        let s1 = pauli::sigma1::<f64>();
        let s2 = pauli::sigma2::<f64>();
        let c = (s2 * ci(-th / 2.0)).exp();
        let cb = (s1 * ci(-th / 2.0)).exp();
        assert!(pauli::max_diff2(&CoinOp::c(th).block(0), &c) < 1e-15);
        assert!(pauli::max_diff2(&CoinOp::cbreve(th).block(0), &cb) < 1e-15);
        assert!(pauli::max_diff2(&CoinOp::k(th).block(0), &(cb * ci(1.0))) < 1e-15);
        let g = CoinOp::gauged(th, vec![0.3, -1.2, 2.0, 0.0]);
        assert!(linalg::unitarity_defect(&g.matrix(4)) < 1e-15);
        assert_eq!(CoinOp::<f64>::c(PI).block(0)[(0, 0)].re, 0.0);
    }

    #[test]
    fn shifts_are_permutations() {
        let n = 6;
        for s in [ShiftOp::<f64>::left(), ShiftOp::right(), ShiftOp::both(), ShiftOp::right().inv()] {
            let m = s.matrix(n);
            assert!(linalg::unitarity_defect(&m) == 0.0);
        }
        let sl = ShiftOp::<f64>::left().matrix(n);
        let sr = ShiftOp::<f64>::right().matrix(n);
        assert_eq!(&sl * &sr, ShiftOp::both().matrix(n));
        let v = SpinorField::delta_peak(params(n, 0.1), 3, L).unwrap();
        let out = &sl * v.as_vector();
        assert_eq!(out[lr_index(n, 2, L)], cone());
    }

    #[test]
    fn factorizations_multiply_back() {
        let p = WalkParams::new(1.0, 0.41, 0.6, 0.7, 8).unwrap();
        for s in WALK_SCHEMES {
            let w = build_walk(s, &p).unwrap();
            assert!(w.factorization_defect() <= 1e-13, "{s}");
            assert!(w.unitarity_defect() <= 1e-12, "{s}");
        }
    }

    #[test]
    fn transport_limit_is_left_right() {
        let dt = 1e-3;
        let p = params(8, dt);
        let h = left_right_transport(&p);
        assert!(max_diff(build_dtqw_compact(&p).matrix(), &expm(&(h * ci(-dt)))) < 1e-5);
    }

    proptest! {
        #[test]
        fn diamond_commutes_with_exponentiation(v in proptest::collection::vec(-1.0f64..1.0, 32)) {
            // exp(X O X) = X exp(O) X on a random anti-Hermitian O
            let n = 2;
            let a = CMatrix::<f64>::from_fn(4, 4, |i, j| Complex::new(v[4 * i + j], v[16 + 4 * i + j]));
            let o = (&a - a.adjoint()) * cr(0.5);
            let x = site_diag(n, &pauli::sigma1::<f64>());
            let lhs = expm(&(&x * &o * &x));
            let rhs = &x * expm(&o) * &x;
            prop_assert!(max_diff(&lhs, &rhs) < 1e-13);
        }

        #[test]
        fn walks_unitary_over_angles(delta in 0.0f64..FRAC_PI_2, m in -2.0f64..2.0, r in 0.0f64..1.5) {
            let p = WalkParams::new(1.0, delta, m, r, 6).unwrap();
            for s in WALK_SCHEMES {
                let w = build_walk(s, &p).unwrap();
                prop_assert!(w.unitarity_defect() <= lit::<f64>(1e-12));
            }
        }
    }
}
