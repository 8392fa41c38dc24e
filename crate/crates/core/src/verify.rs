//! Measurement harness: convergence orders, light-cone leakage, symmetry
//! witnesses, spectral comparison and zero-mode counting.

use num_complex::Complex;
use serde::Serialize;

use crate::digitize::{build_left_right_walk, WalkOperator};
use crate::equivalence::linear_fit;
use crate::error::{Error, Result};
use crate::hamiltonians::{build_left_right, build_naive};
use crate::lattice::{lr_index, pauli, Basis, Component, LatticeOperator, OperatorKind, WalkParams};
use crate::linalg::{self, commutator_norm, evolution, site_diag, spectral_norm};
use crate::scalar::{cabs, ci, cr, lit, to_f64, CMatrix, CVector, Real};

/// Errors against a swept parameter with a log-log least-squares order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub parameter: String,
    pub norm: String,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub order: f64,
    /// Root-mean-square residual of the fit, in natural-log units.
    pub residual: f64,
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn fit(parameter: &str, norm: &str, values: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        if values.len() != errors.len() || values.len() < 4 {
            return Err(Error::SingularFit(format!("need at least 4 points, got {}", values.len())));
        }
        if errors.iter().any(|e| !e.is_finite() || *e <= 0.0) || values.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::SingularFit("errors and parameters must be positive".into()));
        }
        let pts: Vec<(f64, f64)> = values.iter().zip(&errors).map(|(v, e)| (v.ln(), e.ln())).collect();
        let (order, icpt) = linear_fit(&pts)?;
        let residual = (pts.iter().map(|(x, y)| (y - order * x - icpt).powi(2)).sum::<f64>() / pts.len() as f64).sqrt();
        let mut order_idx: Vec<usize> = (0..values.len()).collect();
        order_idx.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite"));
        let monotone = order_idx.windows(2).all(|w| errors[w[1]] < errors[w[0]]);
        Ok(Self { parameter: parameter.into(), norm: norm.into(), values, errors, order, residual, monotone })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeLimitReport {
    pub per_step: ConvergenceReport,
    pub fixed_horizon: ConvergenceReport,
    pub horizon: f64,
}

/// `||U(dt) - exp(-i dt H)||_2`, exactly 0 at `dt = 0`.
pub fn step_error<T: Real>(walk: &WalkOperator<T>, hamiltonian: &LatticeOperator<T>, dt: T) -> T {
    if dt == T::zero() {
        return linalg::max_diff(walk.matrix(), &linalg::identity(walk.op.dim()));
    }
    spectral_norm(&(walk.matrix() - evolution(&hamiltonian.matrix, dt)))
}

fn power<T: Real>(m: &CMatrix<T>, mut k: usize) -> CMatrix<T> {
    let mut acc = linalg::identity::<T>(m.nrows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = linalg::mul(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = linalg::mul(&base, &base);
        }
    }
    acc
}

/// Per-step and fixed-horizon spectral-norm errors of a walk against
/// `exp(-i dt H)` over a decreasing `dt_grid`.
pub fn continuum_time_limit<T, W, H>(base: &WalkParams<T>, walk: W, hamiltonian: H, dt_grid: &[T], horizon: T) -> Result<TimeLimitReport>
where
    T: Real,
    W: Fn(&WalkParams<T>) -> WalkOperator<T>,
    H: Fn(&WalkParams<T>) -> LatticeOperator<T>,
{
    if dt_grid.len() < 4 || dt_grid.windows(2).any(|w| w[1] >= w[0]) || dt_grid.iter().any(|d| *d <= T::zero()) {
        return Err(Error::SingularFit("dt grid must hold at least 4 positive, strictly decreasing values".into()));
    }
    let mut step_errs = Vec::new();
    let mut horizon_errs = Vec::new();
    for &dt in dt_grid {
        let p = base.with_dt(dt);
        p.validate()?;
        let u = walk(&p);
        let h = hamiltonian(&p);
        step_errs.push(to_f64(step_error(&u, &h, dt)));
        let steps = to_f64(horizon / dt).round().max(1.0) as usize;
        let t = dt * T::from_usize(steps).expect("step count fits");
        let err = spectral_norm(&(power(u.matrix(), steps) - evolution(&h.matrix, t)));
        horizon_errs.push(to_f64(err));
    }
    let values: Vec<f64> = dt_grid.iter().map(|d| to_f64(*d)).collect();
    Ok(TimeLimitReport {
        per_step: ConvergenceReport::fit("dt", "spectral", values.clone(), step_errs)?,
        fixed_horizon: ConvergenceReport::fit("dt", "spectral", values, horizon_errs)?,
        horizon: to_f64(horizon),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpaceScheme {
    /// `exp(-i t H)` with the left-right Hamiltonian; continuum `k sigma^1 + m sigma^3`.
    LeftRight,
    /// `exp(-i t H_n)` with the naive Hamiltonian; continuum `k sigma^1 - m sigma^2`.
    Naive,
    /// The left-right walk with `dt = a^2`.
    LeftRightWalk,
}

/// One continuum plane wave `amplitude * e^{i k x}` with `k = 2 pi n / length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneMode<T: Real> {
    pub n: i64,
    pub amplitude: [Complex<T>; 2],
}

fn continuum_block<T: Real>(scheme: SpaceScheme, k: T, m: T) -> [[Complex<T>; 2]; 2] {
    match scheme {
        SpaceScheme::Naive => [[Complex::new(T::zero(), T::zero()), cr(k) + ci(m)], [cr(k) - ci(m), cr(T::zero())]],
        _ => [[cr(m), cr(k)], [cr(k), cr(-m)]],
    }
}

/// `exp(-i t H(k)) v`, via `cos(E t) - i sin(E t) H / E` with `E = sqrt(k^2 + m^2)`.
pub fn continuum_mode_evolution<T: Real>(scheme: SpaceScheme, k: T, m: T, t: T, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let e = (k * k + m * m).sqrt();
    if e == T::zero() {
        return v;
    }
    let h = continuum_block(scheme, k, m);
    let hv = [h[0][0] * v[0] + h[0][1] * v[1], h[1][0] * v[0] + h[1][1] * v[1]];
    let (c, s) = ((e * t).cos(), (e * t).sin());
    [v[0] * c - ci(s / e) * hv[0], v[1] * c - ci(s / e) * hv[1]]
}

/// The continuum solution sampled at `x_p = p a`, both components at the same point.
pub fn continuum_state<T: Real>(scheme: SpaceScheme, modes: &[PlaneMode<T>], length: T, m: T, t: T, n_sites: usize, a: T) -> CVector<T> {
    let mut out = CVector::zeros(2 * n_sites);
    for mode in modes {
        let k = T::two_pi() * T::from_i64(mode.n).expect("mode index fits") / length;
        let v = continuum_mode_evolution(scheme, k, m, t, mode.amplitude);
        for p in 0..n_sites {
            let x = a * T::from_usize(p).expect("site fits");
            let ph = crate::scalar::cis(k * x);
            out[2 * p] += v[0] * ph;
            out[2 * p + 1] += v[1] * ph;
        }
    }
    out
}

/// Lattice-vs-continuum error at horizon `t` over a decreasing grid of spacings,
/// in the discrete `L2` norm `sqrt(a sum_p |psi_lat - psi|^2)`.
pub fn continuum_space_limit<T: Real>(
    scheme: SpaceScheme,
    length: T,
    a_grid: &[T],
    mass: T,
    horizon: T,
    modes: &[PlaneMode<T>],
) -> Result<ConvergenceReport> {
    if a_grid.is_empty() {
        return Err(Error::SingularFit("empty spacing grid".into()));
    }
    let mut errs = Vec::new();
    for &a in a_grid {
        let n = to_f64(length / a).round() as usize;
        if (to_f64(a) * n as f64 - to_f64(length)).abs() > 1e-9 * to_f64(length) {
            return Err(Error::InvalidParams(format!("spacing {} does not divide the box", to_f64(a))));
        }
        if let Some(bad) = modes.iter().find(|md| 2 * md.n.unsigned_abs() as usize >= n) {
            return Err(Error::Aliasing(format!("mode {} is not resolved by {n} sites", bad.n)));
        }
        let (lattice, t) = match scheme {
            SpaceScheme::LeftRight | SpaceScheme::Naive => {
                let p = WalkParams::new(a, T::zero(), mass, T::zero(), n)?;
                let h = if scheme == SpaceScheme::Naive { build_naive(&p) } else { build_left_right(&p) };
                let psi0 = continuum_state(scheme, modes, length, mass, T::zero(), n, a);
                (evolution(&h.matrix, horizon) * psi0, horizon)
            }
            SpaceScheme::LeftRightWalk => {
                let dt = a * a;
                let steps = to_f64(horizon / dt).round() as usize;
                let p = WalkParams::new(a, dt, mass, T::zero(), n)?;
                let u = build_left_right_walk(&p);
                let mut psi = continuum_state(scheme, modes, length, mass, T::zero(), n, a);
                for _ in 0..steps {
                    psi = u.matrix() * psi;
                }
                (psi, dt * T::from_usize(steps).expect("step count fits"))
            }
        };
        let exact = continuum_state(scheme, modes, length, mass, t, n, a);
        let sq: f64 = lattice.iter().zip(exact.iter()).map(|(x, y)| to_f64(cabs(*x - *y)).powi(2)).sum();
        errs.push((to_f64(a) * sq).sqrt());
    }
    ConvergenceReport::fit("a", "discrete L2", a_grid.iter().map(|x| to_f64(*x)).collect(), errs)
}

/// Closed-form positive energy branch of the lattice Hamiltonians at momentum `k`.
pub fn lattice_dispersion<T: Real>(scheme: SpaceScheme, k: T, a: T, m: T) -> T {
    let two = T::one() + T::one();
    let kin = match scheme {
        SpaceScheme::Naive => (k * a).sin() / a,
        _ => two * (k * a / two).sin() / a,
    };
    (kin * kin + m * m).sqrt()
}

/// Outside-cone mass per step for a one-step evolution matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LightConeReport {
    pub label: String,
    pub radius: usize,
    pub steps: Vec<usize>,
    pub outside_mass: Vec<f64>,
}

impl LightConeReport {
    pub fn max_outside(&self) -> f64 {
        self.outside_mass.iter().copied().fold(0.0, f64::max)
    }
}

fn periodic_distance(n: usize, p: usize, q: usize) -> usize {
    let d = p.abs_diff(q);
    d.min(n - d)
}

/// Probability on sites at non-staggered distance `>= d` from `p0`.
pub fn mass_beyond<T: Real>(psi: &CVector<T>, n_sites: usize, p0: usize, d: usize) -> T {
    let mut acc = T::zero();
    for p in 0..n_sites {
        if periodic_distance(n_sites, p, p0) >= d {
            acc += cabs(psi[2 * p]).powi(2) + cabs(psi[2 * p + 1]).powi(2);
        }
    }
    acc
}

/// Probability on staggered sites at distance `>= d` from staggered site `n0`.
pub fn staggered_mass_beyond<T: Real>(psi: &CVector<T>, n0: usize, d: usize) -> T {
    let len = psi.len();
    (0..len).filter(|&n| periodic_distance(len, n, n0) >= d).fold(T::zero(), |acc, n| acc + cabs(psi[n]).powi(2))
}

/// Evolves a peak at `(p0, c)` for `steps` steps and records the mass outside
/// the cone `|p - p0| <= radius * j` after each step.
pub fn light_cone_scan<T: Real>(
    label: &str,
    step: &CMatrix<T>,
    n_sites: usize,
    radius: usize,
    steps: usize,
    p0: usize,
    c: Component,
) -> Result<LightConeReport> {
    if n_sites <= 2 * radius * steps + 2 {
        return Err(Error::WrapDetected(format!("{n_sites} sites cannot hold a cone of radius {radius} over {steps} steps")));
    }
    if step.nrows() != 2 * n_sites || p0 >= n_sites {
        return Err(Error::ShapeMismatch("step matrix or start site does not fit the lattice".into()));
    }
    let mut psi = CVector::zeros(2 * n_sites);
    psi[lr_index(n_sites, p0 as isize, c)] = cr(T::one());
    let mut out = Vec::with_capacity(steps);
    for j in 1..=steps {
        psi = step * psi;
        out.push(to_f64(mass_beyond(&psi, n_sites, p0, radius * j + 1)));
    }
    Ok(LightConeReport { label: label.into(), radius, steps: (1..=steps).collect(), outside_mass: out })
}

/// Largest non-staggered periodic distance between two sites coupled by a
/// nonzero entry of `m`.
pub fn operator_radius<T: Real>(m: &CMatrix<T>, n_sites: usize) -> usize {
    let mut r = 0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !crate::scalar::is_zero(&m[(i, j)]) {
                r = r.max(periodic_distance(n_sites, i / 2, j / 2));
            }
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    T1Staggered,
    T2Staggered,
    Gamma5,
}

/// `||[op, S]||_max` for a staggered translation or for `gamma^5` on every site.
pub fn symmetry_witness<T: Real>(op: &LatticeOperator<T>, symmetry: Symmetry) -> Result<T> {
    let n = op.params.n_sites;
    let (needed, s) = match symmetry {
        Symmetry::T1Staggered => (Basis::StaggeredPosition, crate::lattice::staggered_translation::<T>(n, 1)),
        Symmetry::T2Staggered => (Basis::StaggeredPosition, crate::lattice::staggered_translation::<T>(n, 2)),
        Symmetry::Gamma5 => (Basis::LRPosition, site_diag(n, &pauli::gamma5())),
    };
    if op.basis != needed {
        return Err(Error::BasisMismatch(format!("{symmetry:?} needs an operator in the {needed:?} basis")));
    }
    Ok(commutator_norm(&op.matrix, &s))
}

/// Max distance between sorted spectra; phase-sorted bottleneck distance for
/// unitaries, ascending order for Hermitian operators.
pub fn spectral_compare<T: Real>(a: &LatticeOperator<T>, b: &LatticeOperator<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!("dimensions {} and {} differ", a.dim(), b.dim())));
    }
    match (a.kind, b.kind) {
        (OperatorKind::Unitary, OperatorKind::Unitary) => Ok(unitary_spectral_distance(&a.matrix, &b.matrix)),
        (OperatorKind::Hermitian, OperatorKind::Hermitian) => {
            Ok(linalg::line_distance(&linalg::hermitian_eigenvalues(&a.matrix), &linalg::hermitian_eigenvalues(&b.matrix)))
        }
        (x, y) => Err(Error::MixedKinds(x.name(), y.name())),
    }
}

/// Bottleneck distance between the unit-circle spectra of two matrices.
pub fn unitary_spectral_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let mut ea = linalg::eigenvalues(a);
    let mut eb = linalg::eigenvalues(b);
    linalg::sort_by_phase(&mut ea);
    linalg::sort_by_phase(&mut eb);
    linalg::circle_distance(&ea, &eb)
}

/// Eigenvalues of a Hermitian operator with modulus below `tol`.
pub fn count_zero_modes<T: Real>(h: &LatticeOperator<T>, tol: T) -> usize {
    linalg::hermitian_eigenvalues(&h.matrix).iter().filter(|e| e.abs() < tol).count()
}

/// Momentum zeros of a massless two-component Hamiltonian: each contributes a
/// doubly degenerate zero eigenvalue. The threshold is `1e-8`, raised to a few
/// hundred ulps of `||H||` for narrow scalars.
pub fn doubling_count<T: Real>(h: &LatticeOperator<T>) -> usize {
    let floor = T::default_epsilon() * lit(256.0) * linalg::max_abs(&h.matrix) * T::from_usize(h.dim()).expect("dimension fits").sqrt();
    count_zero_modes(h, floor.max(lit(1e-8))) / 2
}
