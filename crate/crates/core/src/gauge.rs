//! U(1)-gauged walks, lattice gauge transformations and the plaquette observables.
//!
//! Time step `j` of a gauged walk reads `A0[j]` and `A1[j]`; `A1` carries one
//! extra slice so the field strength at step `j` can use `A1[j + 1]`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::digitize::{CoinOp, Factor, FactorLabel, ShiftOp, WalkOperator};
use crate::error::{Error, Result};
use crate::hamiltonians::add_block;
use crate::lattice::{lr_index, pauli, Component, LatticeOperator, OperatorKind, SpinorField, WalkParams};
use crate::linalg::{self, diag};
use crate::scalar::{ci, cis, cr, Real};

use Component::{L, R};

/// Potentials `A0` (`J x N`) and `A1` (`(J+1) x N`) with charge `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig<T> {
    pub q: T,
    #[serde(rename = "A0")]
    pub a0: Vec<Vec<T>>,
    #[serde(rename = "A1")]
    pub a1: Vec<Vec<T>>,
}

/// Local phases `phi` (`(J+1) x N`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeTransform<T> {
    pub phi: Vec<Vec<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugedScheme {
    LeftRight,
    Naive,
}

fn check_rect<T: Real>(name: &str, rows: &[Vec<T>], nrows: usize, ncols: usize) -> Result<()> {
    if rows.len() != nrows {
        return Err(Error::ShapeMismatch(format!("{name} has {} time slices, expected {nrows}", rows.len())));
    }
    for (j, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::ShapeMismatch(format!("{name}[{j}] has {} sites, expected {ncols}", r.len())));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("{name}[{j}] contains a non-finite value")));
        }
    }
    Ok(())
}

impl<T: Real> GaugeConfig<T> {
    pub fn new(q: T, a0: Vec<Vec<T>>, a1: Vec<Vec<T>>) -> Result<Self> {
        let g = Self { q, a0, a1 };
        g.validate()?;
        Ok(g)
    }

    pub fn zero(q: T, steps: usize, n_sites: usize) -> Self {
        Self { q, a0: vec![vec![T::zero(); n_sites]; steps], a1: vec![vec![T::zero(); n_sites]; steps + 1] }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() {
            return Err(Error::InvalidParams("charge must be finite".into()));
        }
        if self.a0.is_empty() {
            return Err(Error::ShapeMismatch("A0 needs at least one time slice".into()));
        }
        let n = self.a0[0].len();
        check_rect("A0", &self.a0, self.a0.len(), n)?;
        check_rect("A1", &self.a1, self.a0.len() + 1, n)
    }

    /// Number of walk steps `J` the window covers.
    pub fn steps(&self) -> usize {
        self.a0.len()
    }

    pub fn n_sites(&self) -> usize {
        self.a0.first().map_or(0, Vec::len)
    }

    fn check_step(&self, params: &WalkParams<T>, j: usize) -> Result<()> {
        if self.n_sites() != params.n_sites {
            return Err(Error::ShapeMismatch(format!("gauge field has {} sites, lattice has {}", self.n_sites(), params.n_sites)));
        }
        if j >= self.steps() {
            return Err(Error::OutOfWindow { index: j, len: self.steps() });
        }
        Ok(())
    }

    /// `alpha_{j,p} = dt q A0_{j,p}`.
    pub fn alpha(&self, params: &WalkParams<T>, j: usize) -> Vec<T> {
        self.a0[j].iter().map(|&x| params.dt * self.q * x).collect()
    }

    /// `vartheta_{j,p} = -a q A1_{j,p}`.
    pub fn vartheta(&self, params: &WalkParams<T>, j: usize) -> Vec<T> {
        self.a1[j].iter().map(|&x| -params.a * self.q * x).collect()
    }
}

impl<T: Real> GaugeTransform<T> {
    pub fn constant(value: T, slices: usize, n_sites: usize) -> Self {
        Self { phi: vec![vec![value; n_sites]; slices] }
    }

    fn check(&self, gauge: &GaugeConfig<T>) -> Result<()> {
        check_rect("phi", &self.phi, gauge.steps() + 1, gauge.n_sites())
    }
}

fn potential_factor<T: Real>(alpha: &[T]) -> Factor<T> {
    let entries: Vec<Complex<T>> = alpha.iter().flat_map(|&x| [cis(-x), cis(-x)]).collect();
    Factor::new(FactorLabel::Potential, diag(&entries))
}

/// `e^{-i alpha_j} C(-theta) S^R S^R_vartheta C(theta) S^L_vartheta S^L`.
pub fn build_gauged_leftright_step<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, j: usize) -> Result<WalkOperator<T>> {
    gauge.check_step(params, j)?;
    let (n, th) = (params.n_sites, params.theta());
    let vt = gauge.vartheta(params, j);
    Ok(WalkOperator::from_factors(
        *params,
        vec![
            potential_factor(&gauge.alpha(params, j)),
            Factor::coin(CoinOp::c(-th), n),
            Factor::shift(ShiftOp::right(), n),
            Factor::shift(ShiftOp::right_phase(vt.clone()), n),
            Factor::coin(CoinOp::c(th), n),
            Factor::shift(ShiftOp::left_phase(vt), n),
            Factor::shift(ShiftOp::left(), n),
        ],
    ))
}

/// `e^{-i alpha_j} S^R C^g(-theta~) S C^g(theta~) S (S^R)^{-1}`.
pub fn build_gauged_naive_step<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, j: usize) -> Result<WalkOperator<T>> {
    gauge.check_step(params, j)?;
    let (n, th) = (params.n_sites, params.theta_tilde());
    let vt = gauge.vartheta(params, j);
    Ok(WalkOperator::from_factors(
        *params,
        vec![
            potential_factor(&gauge.alpha(params, j)),
            Factor::shift(ShiftOp::right(), n),
            Factor::coin(CoinOp::gauged(-th, vt.clone()), n),
            Factor::shift(ShiftOp::both(), n),
            Factor::coin(CoinOp::gauged(th, vt), n),
            Factor::shift(ShiftOp::both(), n),
            Factor::shift(ShiftOp::right().inv(), n),
        ],
    ))
}

pub fn build_gauged_step<T: Real>(
    scheme: GaugedScheme,
    params: &WalkParams<T>,
    gauge: &GaugeConfig<T>,
    j: usize,
) -> Result<WalkOperator<T>> {
    match scheme {
        GaugedScheme::LeftRight => build_gauged_leftright_step(params, gauge, j),
        GaugedScheme::Naive => build_gauged_naive_step(params, gauge, j),
    }
}

fn add_potential<T: Real>(h: &mut crate::scalar::CMatrix<T>, gauge: &GaugeConfig<T>, j: usize) {
    for (p, &x) in gauge.a0[j].iter().enumerate() {
        h[(2 * p, 2 * p)] += cr(gauge.q * x);
        h[(2 * p + 1, 2 * p + 1)] += cr(gauge.q * x);
    }
}

/// Continuous-time generator of the gauged left-right step at slice `j`:
/// left-right transport with link phases `e^{+-i vartheta}` plus `q A0`.
pub fn gauged_left_right_hamiltonian<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, j: usize) -> Result<LatticeOperator<T>> {
    gauge.check_step(params, j)?;
    let n = params.n_sites;
    let inv_a = T::one() / params.a;
    let vt = gauge.vartheta(params, j);
    let mut h = crate::scalar::CMatrix::zeros(params.dim(), params.dim());
    for p in 0..n as isize {
        let prev = vt[(p - 1).rem_euclid(n as isize) as usize];
        let here = vt[p as usize];
        h[(lr_index(n, p, L), lr_index(n, p, R))] += ci(-inv_a);
        h[(lr_index(n, p, L), lr_index(n, p - 1, R))] += ci(inv_a) * cis(-prev);
        h[(lr_index(n, p, R), lr_index(n, p + 1, L))] += ci(-inv_a) * cis(here);
        h[(lr_index(n, p, R), lr_index(n, p, L))] += ci(inv_a);
    }
    add_potential(&mut h, gauge, j);
    Ok(LatticeOperator::lr(h, OperatorKind::Hermitian, *params))
}

/// Continuous-time generator of the gauged naive step at slice `j`:
/// massless naive transport with link phases plus `q A0`.
pub fn gauged_naive_hamiltonian<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, j: usize) -> Result<LatticeOperator<T>> {
    gauge.check_step(params, j)?;
    let n = params.n_sites;
    let w = T::one() / ((T::one() + T::one()) * params.a);
    let vt = gauge.vartheta(params, j);
    let s1 = pauli::sigma1::<T>();
    let mut h = crate::scalar::CMatrix::zeros(params.dim(), params.dim());
    for p in 0..n as isize {
        let ph = vt[p as usize];
        add_block(&mut h, n, p, p + 1, &s1, ci(-w) * cis(ph));
        add_block(&mut h, n, p + 1, p, &s1, ci(w) * cis(-ph));
    }
    add_potential(&mut h, gauge, j);
    Ok(LatticeOperator::lr(h, OperatorKind::Hermitian, *params))
}

/// Applies `Psi -> e^{i q phi_j} Psi` and the matching shift of the potentials,
/// `A0 -> A0 - (phi_{j+1} - phi_j)/dt`, `A1 -> A1 + (phi_{p+1} - phi_p)/a`.
pub fn apply_gauge_transform<T: Real>(
    params: &WalkParams<T>,
    state: &SpinorField<T>,
    gauge: &GaugeConfig<T>,
    transform: &GaugeTransform<T>,
    j: usize,
) -> Result<(SpinorField<T>, GaugeConfig<T>)> {
    gauge.validate()?;
    transform.check(gauge)?;
    if gauge.n_sites() != state.n_sites() || gauge.n_sites() != params.n_sites {
        return Err(Error::ShapeMismatch("state, gauge field and lattice disagree on the site count".into()));
    }
    if j > gauge.steps() {
        return Err(Error::OutOfWindow { index: j, len: gauge.steps() + 1 });
    }
    let g = transform_potentials(params, gauge, transform);
    let phases: Vec<T> = transform.phi[j].iter().map(|&x| gauge.q * x).collect();
    Ok((state.with_site_phases(&phases)?, g))
}

/// The potentials after a gauge transformation.
pub fn transform_potentials<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, transform: &GaugeTransform<T>) -> GaugeConfig<T> {
    let n = gauge.n_sites();
    let phi = &transform.phi;
    let a0 = (0..gauge.steps()).map(|j| (0..n).map(|p| gauge.a0[j][p] - (phi[j + 1][p] - phi[j][p]) / params.dt).collect()).collect();
    let a1 = (0..=gauge.steps()).map(|j| (0..n).map(|p| gauge.a1[j][p] + (phi[j][(p + 1) % n] - phi[j][p]) / params.a).collect()).collect();
    GaugeConfig { q: gauge.q, a0, a1 }
}

/// Max-norm of `U_j[A'] D(phi_j) - D(phi_{j+1}) U_j[A]`, with `D(phi) = e^{i q phi}`.
pub fn covariance_defect<T: Real>(
    scheme: GaugedScheme,
    params: &WalkParams<T>,
    gauge: &GaugeConfig<T>,
    transform: &GaugeTransform<T>,
    j: usize,
) -> Result<T> {
    transform.check(gauge)?;
    let moved = transform_potentials(params, gauge, transform);
    let before = build_gauged_step(scheme, params, gauge, j)?;
    let after = build_gauged_step(scheme, params, &moved, j)?;
    let d = |slice: usize| {
        let e: Vec<Complex<T>> = transform.phi[slice].iter().flat_map(|&x| [cis(gauge.q * x), cis(gauge.q * x)]).collect();
        diag(&e)
    };
    let lhs = linalg::mul(after.matrix(), &d(j));
    let rhs = linalg::mul(&d(j + 1), before.matrix());
    Ok(linalg::max_diff(&lhs, &rhs))
}

fn check_plaquette<T: Real>(gauge: &GaugeConfig<T>, j: usize, p: usize) -> Result<()> {
    gauge.validate()?;
    if j >= gauge.steps() {
        return Err(Error::OutOfWindow { index: j, len: gauge.steps() });
    }
    if p >= gauge.n_sites() {
        return Err(Error::ShapeMismatch(format!("site {p} outside lattice of {} sites", gauge.n_sites())));
    }
    Ok(())
}

/// `F01_{j,p} = (A1_{j+1,p} - A1_{j,p})/dt + (A0_{j,p+1} - A0_{j,p})/a`, periodic in `p`.
pub fn field_strength_f01<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, j: usize, p: usize) -> Result<T> {
    check_plaquette(gauge, j, p)?;
    let n = gauge.n_sites();
    let d0 = (gauge.a1[j + 1][p] - gauge.a1[j][p]) / params.dt;
    let d1 = (gauge.a0[j][(p + 1) % n] - gauge.a0[j][p]) / params.a;
    Ok(d0 + d1)
}

/// `U01 = exp(i q a dt F01)`.
pub fn plaquette_u01<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, j: usize, p: usize) -> Result<Complex<T>> {
    let f = field_strength_f01(params, gauge, j, p)?;
    Ok(cis(gauge.q * params.a * params.dt * f))
}

/// Shifts `A0 -> A0 + 2 pi w0/(q dt)` and `A1 -> A1 + 2 pi w1/(q a)` by integer patterns.
pub fn large_shift<T: Real>(params: &WalkParams<T>, gauge: &GaugeConfig<T>, w0: &[Vec<i64>], w1: &[Vec<i64>]) -> Result<GaugeConfig<T>> {
    gauge.validate()?;
    let n = gauge.n_sites();
    let shape_ok = w0.len() == gauge.steps() && w1.len() == gauge.steps() + 1 && w0.iter().chain(w1).all(|r| r.len() == n);
    if !shape_ok {
        return Err(Error::ShapeMismatch("integer shift patterns must match the A0 and A1 shapes".into()));
    }
    let two_pi = T::two_pi();
    let int = |k: i64| T::from_i64(k).expect("integer fits the scalar type");
    let a0 = gauge
        .a0
        .iter()
        .zip(w0)
        .map(|(r, w)| r.iter().zip(w).map(|(&x, &k)| x + two_pi * int(k) / (gauge.q * params.dt)).collect())
        .collect();
    let a1 = gauge
        .a1
        .iter()
        .zip(w1)
        .map(|(r, w)| r.iter().zip(w).map(|(&x, &k)| x + two_pi * int(k) / (gauge.q * params.a)).collect())
        .collect();
    Ok(GaugeConfig { q: gauge.q, a0, a1 })
}

/// The integer `(w1_{j+1,p} - w1_{j,p}) + (w0_{j,p+1} - w0_{j,p})` by which a large
/// shift moves `F01_{j,p}`, in units of `2 pi/(q a dt)`.
pub fn large_shift_winding(w0: &[Vec<i64>], w1: &[Vec<i64>], j: usize, p: usize) -> i64 {
    let n = w0[j].len();
    (w1[j + 1][p] - w1[j][p]) + (w0[j][(p + 1) % n] - w0[j][p])
}

/// A large shift is admissible at `(j, p)` when it changes `F01` there.
pub fn admissible_large_shift(w0: &[Vec<i64>], w1: &[Vec<i64>], j: usize, p: usize) -> bool {
    large_shift_winding(w0, w1, j, p) != 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitize::{build_dtqw_compact, build_naive_dtqw};
    use crate::lattice::{change_operator_basis, staggered_translation, Basis};
    use crate::linalg::{commutator_norm, evolution, max_diff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> WalkParams<f64> {
        WalkParams::new(0.9, 0.37, 0.0, 0.0, 8).unwrap()
    }

    fn random_rows(rng: &mut ChaCha8Rng, rows: usize, n: usize) -> Vec<Vec<f64>> {
        (0..rows).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect()
    }

    fn random_gauge(rng: &mut ChaCha8Rng, steps: usize, n: usize) -> GaugeConfig<f64> {
        GaugeConfig::new(0.8, random_rows(rng, steps, n), random_rows(rng, steps + 1, n)).unwrap()
    }

    #[test]
    fn zero_field_reduces_to_free_walks() {
        let p = params();
        let g = GaugeConfig::zero(1.0, 3, 8);
        assert_eq!(build_gauged_leftright_step(&p, &g, 1).unwrap().matrix(), build_dtqw_compact(&p).matrix());
        assert_eq!(build_gauged_naive_step(&p, &g, 2).unwrap().matrix(), build_naive_dtqw(&p).matrix());
        assert!(matches!(build_gauged_naive_step(&p, &g, 3), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GaugeConfig::new(1.0, vec![vec![0.0; 4]], vec![vec![0.0; 4]]).is_err());
        assert!(GaugeConfig::new(1.0, vec![vec![0.0; 4]], vec![vec![0.0; 4], vec![0.0; 3]]).is_err());
    }

    #[test]
    fn uniform_a1_keeps_two_site_symmetry() {
        let p = params();
        let g = GaugeConfig::new(1.3, vec![vec![0.0; 8]], vec![vec![0.45; 8], vec![0.45; 8]]).unwrap();
        let u = build_gauged_leftright_step(&p, &g, 0).unwrap();
        let st = change_operator_basis(&u.op, Basis::StaggeredPosition);
        assert!(commutator_norm(&st.matrix, &staggered_translation(8, 2)) <= 1e-12);
    }

    #[test]
    fn peak_step_matches_gauged_update_rule() {
        // psi^L_{j+1,p} = e^{-i alpha_p} (sc e^{-i vt_{p-1}} R_{p-1} + c^2 L_p - sc R_p + s^2 e^{i vt_p} L_{p+1})
        // psi^R_{j+1,p} = e^{-i alpha_p} (s^2 e^{-i vt_{p-1}} R_{p-1} + sc L_p + c^2 R_p - sc e^{i vt_p} L_{p+1})
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_gauge(&mut rng, 2, 8);
        let u = build_gauged_leftright_step(&p, &g, 1).unwrap();
        let m = u.matrix();
        let (c, s) = (p.delta().cos(), p.delta().sin());
        let al = g.alpha(&p, 1);
        let vt = g.vartheta(&p, 1);
        let n = 8isize;
        for q in 0..n {
            let e = cis(-al[q as usize]);
            let qm = (q - 1).rem_euclid(n) as usize;
            let lq = lr_index(8, q, L);
            let rq = lr_index(8, q, R);
            let checks = [
                (lq, lr_index(8, q - 1, R), e * cr(s * c) * cis(-vt[qm])),
                (lq, lr_index(8, q, L), e * cr(c * c)),
                (lq, lr_index(8, q, R), e * cr(-s * c)),
                (lq, lr_index(8, q + 1, L), e * cr(s * s) * cis(vt[q as usize])),
                (rq, lr_index(8, q - 1, R), e * cr(s * s) * cis(-vt[qm])),
                (rq, lr_index(8, q, L), e * cr(s * c)),
                (rq, lr_index(8, q, R), e * cr(c * c)),
                (rq, lr_index(8, q + 1, L), e * cr(-s * c) * cis(vt[q as usize])),
            ];
            for (i, j, want) in checks {
                assert!((m[(i, j)] - want).norm() < 1e-15, "row {i} col {j}");
            }
        }
    }

    #[test]
    fn covariance_of_both_steps() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_gauge(&mut rng, 3, 8);
        for _ in 0..5 {
            let t = GaugeTransform { phi: random_rows(&mut rng, 4, 8) };
            for j in 0..3 {
                for s in [GaugedScheme::LeftRight, GaugedScheme::Naive] {
                    assert!(covariance_defect(s, &p, &g, &t, j).unwrap() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn gauged_coin_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ph: Vec<f64> = (0..8).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let c = CoinOp::gauged(2.1, ph);
        assert!(linalg::unitarity_defect(&c.matrix(8)) < 1e-15);
    }

    #[test]
    fn transform_state_and_fields() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_gauge(&mut rng, 2, 8);
        let psi = SpinorField::delta_peak(p, 2, L).unwrap();
        let t = GaugeTransform::constant(0.7, 3, 8);
        let (psi2, g2) = apply_gauge_transform(&p, &psi, &g, &t, 0).unwrap();
        assert!((psi2.psi_l(2) - cis(0.8 * 0.7)).norm() < 1e-15);
        for (x, y) in g.a0.iter().flatten().zip(g2.a0.iter().flatten()) {
            assert!((x - y).abs() < 1e-15);
        }
        let lin = GaugeTransform { phi: (0..3).map(|_| (0..8).map(|q| 0.25 * q as f64).collect()).collect() };
        let g3 = transform_potentials(&p, &g, &lin);
        for j in 0..3 {
            for q in 0..7 {
                assert!((g3.a1[j][q] - g.a1[j][q] - 0.25 / p.a).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn field_strength_examples() {
        let p = params();
        let e = 1.7;
        let a1 = (0..4).map(|j| vec![e * p.dt * j as f64; 8]).collect();
        let g = GaugeConfig::new(1.0, vec![vec![0.0; 8]; 3], a1).unwrap();
        for j in 0..3 {
            assert!((field_strength_f01(&p, &g, j, 5).unwrap() - e).abs() < 1e-13);
        }
        assert!(field_strength_f01(&p, &g, 3, 0).is_err());
        // pure gauge
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = GaugeTransform { phi: random_rows(&mut rng, 4, 8) };
        let pure = transform_potentials(&p, &GaugeConfig::zero(1.0, 3, 8), &t);
        for j in 0..3 {
            for q in 0..8 {
                assert!(field_strength_f01(&p, &pure, j, q).unwrap().abs() < 1e-13);
                assert!((plaquette_u01(&p, &pure, j, q).unwrap() - cr(1.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn large_shift_moves_f01_not_u01() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_gauge(&mut rng, 2, 8);
        let mut w0 = vec![vec![0i64; 8]; 2];
        let w1 = vec![vec![0i64; 8]; 3];
        w0[0][4] = 1;
        assert!(admissible_large_shift(&w0, &w1, 0, 3));
        let g2 = large_shift(&p, &g, &w0, &w1).unwrap();
        let f1 = field_strength_f01(&p, &g, 0, 3).unwrap();
        let f2 = field_strength_f01(&p, &g2, 0, 3).unwrap();
        let unit = 2.0 * std::f64::consts::PI / (g.q * p.a * p.dt);
        assert!((f2 - f1 - unit).abs() < 1e-11);
        let u1 = plaquette_u01(&p, &g, 0, 3).unwrap();
        let u2 = plaquette_u01(&p, &g2, 0, 3).unwrap();
        assert!((u1 - u2).norm() < 1e-12);
        assert!((u1.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauged_limits_are_first_order_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let base = random_gauge(&mut rng, 1, 8);
        for (scheme, build) in [
            (
                GaugedScheme::LeftRight,
                gauged_left_right_hamiltonian::<f64> as fn(&WalkParams<f64>, &GaugeConfig<f64>, usize) -> Result<LatticeOperator<f64>>,
            ),
            (GaugedScheme::Naive, gauged_naive_hamiltonian::<f64>),
        ] {
            let mut errs = Vec::new();
            for dt in [1e-2, 1e-3] {
                let p = WalkParams::new(1.0, dt, 0.0, 0.0, 8).unwrap();
                let u = build_gauged_step(scheme, &p, &base, 0).unwrap();
                let h = build(&p, &base, 0).unwrap();
                errs.push(max_diff(u.matrix(), &evolution(&h.matrix, dt)));
            }
            let order = (errs[0] / errs[1]).log10();
            assert!((order - 2.0).abs() < 0.1, "{scheme:?}: per-step order {order}");
        }
    }
}
