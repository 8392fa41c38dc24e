//! Value types, bases and basis maps shared by the other modules.
//!
//! The LR-position basis is interleaved: index `2p` holds `psi^L_p` and
//! `2p + 1` holds `psi^R_p`. The staggered basis on `2N` sites uses the same
//! ordering, with `L_p -> 2p` and `R_p -> 2p + 1`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, m2};
use crate::scalar::{cabs, ci, cis, cone, cr, czero, lit, CMatrix, CVector, Real, M2};

/// Lattice spacing, time step, mass, Wilson parameter and site count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams<T> {
    pub a: T,
    pub dt: T,
    pub m: T,
    pub r: T,
    pub n_sites: usize,
}

/// Angles derived from a [`WalkParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedAngles<T> {
    pub delta: T,
    pub theta: T,
    pub delta_tilde: T,
    pub theta_tilde: T,
    pub delta_tilde_r: T,
    pub theta_tilde_r: T,
}

impl<T: Real> WalkParams<T> {
    pub fn new(a: T, dt: T, m: T, r: T, n_sites: usize) -> Result<Self> {
        let p = Self { a, dt, m, r, n_sites };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || self.a <= T::zero() {
            return Err(Error::InvalidParams(format!("lattice spacing must be positive, got {:?}", self.a)));
        }
        if !self.dt.is_finite() || self.dt < T::zero() {
            return Err(Error::InvalidParams(format!("time step must be non-negative, got {:?}", self.dt)));
        }
        if !self.m.is_finite() || !self.r.is_finite() {
            return Err(Error::InvalidParams("mass and Wilson parameter must be finite".into()));
        }
        if self.n_sites < 4 || !self.n_sites.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("n_sites must be even and at least 4, got {}", self.n_sites)));
        }
        Ok(())
    }

    /// Same parameters with a different time step.
    pub fn with_dt(&self, dt: T) -> Self {
        Self { dt, ..*self }
    }

    pub fn with_mass(&self, m: T) -> Self {
        Self { m, ..*self }
    }

    /// Hilbert-space dimension `2N`.
    pub fn dim(&self) -> usize {
        2 * self.n_sites
    }

    pub fn delta(&self) -> T {
        self.dt / self.a
    }

    pub fn theta(&self) -> T {
        T::pi() - lit::<T>(2.0) * self.delta()
    }

    pub fn delta_tilde(&self) -> T {
        self.delta() / lit(2.0)
    }

    pub fn theta_tilde(&self) -> T {
        T::pi() - lit::<T>(2.0) * self.delta_tilde()
    }

    pub fn delta_tilde_r(&self) -> T {
        self.r * self.delta_tilde()
    }

    pub fn theta_tilde_r(&self) -> T {
        T::pi() - lit::<T>(2.0) * self.delta_tilde_r()
    }

    pub fn angles(&self) -> DerivedAngles<T> {
        DerivedAngles {
            delta: self.delta(),
            theta: self.theta(),
            delta_tilde: self.delta_tilde(),
            theta_tilde: self.theta_tilde(),
            delta_tilde_r: self.delta_tilde_r(),
            theta_tilde_r: self.theta_tilde_r(),
        }
    }
}

/// Internal component of a two-component spinor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    L,
    R,
}

impl Component {
    pub fn offset(self) -> usize {
        match self {
            Component::L => 0,
            Component::R => 1,
        }
    }
}

/// Index of `(site, component)` in the LR-position basis, with periodic wrap.
pub fn lr_index(n_sites: usize, site: isize, c: Component) -> usize {
    2 * site.rem_euclid(n_sites as isize) as usize + c.offset()
}

/// Two-component wavefunction on `N` periodic sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField<T: Real> {
    data: CVector<T>,
    params: WalkParams<T>,
}

impl<T: Real> SpinorField<T> {
    pub fn zeros(params: WalkParams<T>) -> Self {
        Self { data: CVector::zeros(params.dim()), params }
    }

    /// Wraps an interleaved `(L_0, R_0, L_1, R_1, ...)` vector.
    pub fn from_vector(params: WalkParams<T>, data: CVector<T>) -> Result<Self> {
        if data.len() != params.dim() {
            return Err(Error::ShapeMismatch(format!("spinor needs {} amplitudes, got {}", params.dim(), data.len())));
        }
        Ok(Self { data, params })
    }

    pub fn from_components(params: WalkParams<T>, left: &[Complex<T>], right: &[Complex<T>]) -> Result<Self> {
        if left.len() != params.n_sites || right.len() != params.n_sites {
            return Err(Error::ShapeMismatch(format!(
                "spinor needs {} sites per component, got {} and {}",
                params.n_sites,
                left.len(),
                right.len()
            )));
        }
        let data = CVector::from_fn(params.dim(), |i, _| if i % 2 == 0 { left[i / 2] } else { right[i / 2] });
        Ok(Self { data, params })
    }

    pub fn delta_peak(params: WalkParams<T>, site: usize, c: Component) -> Result<Self> {
        if site >= params.n_sites {
            return Err(Error::ShapeMismatch(format!("site {site} outside lattice of {} sites", params.n_sites)));
        }
        let mut f = Self::zeros(params);
        f.data[2 * site + c.offset()] = cone();
        Ok(f)
    }

    pub fn params(&self) -> &WalkParams<T> {
        &self.params
    }

    pub fn n_sites(&self) -> usize {
        self.params.n_sites
    }

    pub fn as_vector(&self) -> &CVector<T> {
        &self.data
    }

    pub fn into_vector(self) -> CVector<T> {
        self.data
    }

    pub fn psi_l(&self, p: usize) -> Complex<T> {
        self.data[2 * p]
    }

    pub fn psi_r(&self, p: usize) -> Complex<T> {
        self.data[2 * p + 1]
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// `|psi^L_p|^2 + |psi^R_p|^2` per site.
    pub fn density(&self) -> Vec<T> {
        (0..self.n_sites()).map(|p| self.psi_l(p).norm_sqr() + self.psi_r(p).norm_sqr()).collect()
    }

    /// Multiplies each site by `e^{i phase_p}`.
    pub fn with_site_phases(&self, phases: &[T]) -> Result<Self> {
        if phases.len() != self.n_sites() {
            return Err(Error::ShapeMismatch(format!("{} phases for {} sites", phases.len(), self.n_sites())));
        }
        let data = CVector::from_fn(self.data.len(), |i, _| self.data[i] * cis(phases[i / 2]));
        Ok(Self { data, params: self.params })
    }
}

/// Scalar wavefunction on `2N` periodic staggered sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField<T: Real> {
    data: CVector<T>,
    params: WalkParams<T>,
}

impl<T: Real> StaggeredField<T> {
    pub fn from_vector(params: WalkParams<T>, data: CVector<T>) -> Result<Self> {
        if data.len() != params.dim() {
            return Err(Error::ShapeMismatch(format!("staggered field needs {} sites, got {}", params.dim(), data.len())));
        }
        Ok(Self { data, params })
    }

    pub fn params(&self) -> &WalkParams<T> {
        &self.params
    }

    pub fn as_vector(&self) -> &CVector<T> {
        &self.data
    }

    pub fn phi(&self, n: usize) -> Complex<T> {
        self.data[n]
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }
}

/// Staggered index of an LR-position index.
pub fn lr_to_staggered(index: usize) -> usize {
    let (p, c) = (index / 2, index % 2);
    2 * p + c
}

/// LR-position index of a staggered index.
pub fn staggered_to_lr(n: usize) -> usize {
    let (p, c) = (n / 2, n % 2);
    2 * p + c
}

/// `phi_{2p} = psi^L_p`, `phi_{2p+1} = psi^R_p`.
pub fn stagger<T: Real>(field: &SpinorField<T>) -> StaggeredField<T> {
    let src = field.as_vector();
    let mut data = CVector::zeros(src.len());
    for i in 0..src.len() {
        data[lr_to_staggered(i)] = src[i];
    }
    StaggeredField { data, params: field.params }
}

pub fn unstagger<T: Real>(field: &StaggeredField<T>) -> SpinorField<T> {
    let src = field.as_vector();
    let mut data = CVector::zeros(src.len());
    for n in 0..src.len() {
        data[staggered_to_lr(n)] = src[n];
    }
    SpinorField { data, params: field.params }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    LRPosition,
    StaggeredPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    General,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Hermitian => "Hermitian",
            OperatorKind::Unitary => "unitary",
            OperatorKind::General => "general",
        }
    }
}

/// Dense `2N x 2N` operator with its basis and lattice metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOperator<T: Real> {
    pub matrix: CMatrix<T>,
    pub basis: Basis,
    pub kind: OperatorKind,
    pub params: WalkParams<T>,
}

impl<T: Real> LatticeOperator<T> {
    pub fn new(matrix: CMatrix<T>, basis: Basis, kind: OperatorKind, params: WalkParams<T>) -> Result<Self> {
        let d = params.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!("operator must be {d}x{d}, got {}x{}", matrix.nrows(), matrix.ncols())));
        }
        Ok(Self { matrix, basis, kind, params })
    }

    pub(crate) fn lr(matrix: CMatrix<T>, kind: OperatorKind, params: WalkParams<T>) -> Self {
        debug_assert_eq!(matrix.nrows(), params.dim());
        Self { matrix, basis: Basis::LRPosition, kind, params }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_defect(&self) -> T {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn unitarity_defect(&self) -> T {
        linalg::unitarity_defect(&self.matrix)
    }

    /// Whether the matrix satisfies the property its tag declares, to `tol`.
    pub fn satisfies_tag(&self, tol: T) -> bool {
        match self.kind {
            OperatorKind::Hermitian => self.hermiticity_defect() <= tol,
            OperatorKind::Unitary => self.unitarity_defect() <= tol,
            OperatorKind::General => true,
        }
    }

    pub fn apply(&self, field: &SpinorField<T>) -> Result<SpinorField<T>> {
        if self.basis != Basis::LRPosition {
            return Err(Error::BasisMismatch("apply expects an LR-position operator".into()));
        }
        if field.as_vector().len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("field of length {} for operator of size {}", field.as_vector().len(), self.dim())));
        }
        Ok(SpinorField { data: &self.matrix * field.as_vector(), params: field.params })
    }

    pub fn apply_staggered(&self, field: &StaggeredField<T>) -> Result<StaggeredField<T>> {
        if self.basis != Basis::StaggeredPosition {
            return Err(Error::BasisMismatch("apply_staggered expects a staggered-basis operator".into()));
        }
        if field.as_vector().len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("field of length {} for operator of size {}", field.as_vector().len(), self.dim())));
        }
        Ok(StaggeredField { data: &self.matrix * field.as_vector(), params: field.params })
    }
}

/// Re-expresses `op` in `target` by conjugating with the LR/staggered index map.
pub fn change_operator_basis<T: Real>(op: &LatticeOperator<T>, target: Basis) -> LatticeOperator<T> {
    if op.basis == target {
        return op.clone();
    }
    let map: fn(usize) -> usize = match target {
        Basis::StaggeredPosition => lr_to_staggered,
        Basis::LRPosition => staggered_to_lr,
    };
    let d = op.dim();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(map(i), map(j))] = op.matrix[(i, j)];
        }
    }
    LatticeOperator { matrix: out, basis: target, kind: op.kind, params: op.params }
}

/// Translation by `shift` sites on the `2N`-site staggered lattice,
/// `(T phi)_n = phi_{n + shift}`.
pub fn staggered_translation<T: Real>(n_sites: usize, shift: isize) -> CMatrix<T> {
    let d = 2 * n_sites;
    let mut t = CMatrix::zeros(d, d);
    for n in 0..d {
        let target = (n as isize + shift).rem_euclid(d as isize) as usize;
        t[(n, target)] = cone();
    }
    t
}

/// The constant 2x2 matrices used throughout.
pub mod pauli {
    use super::*;

    pub fn identity<T: Real>() -> M2<T> {
        linalg::m2_identity()
    }

    pub fn sigma1<T: Real>() -> M2<T> {
        m2(czero(), cone(), cone(), czero())
    }

    pub fn sigma2<T: Real>() -> M2<T> {
        m2(czero(), ci(-T::one()), ci(T::one()), czero())
    }

    pub fn sigma3<T: Real>() -> M2<T> {
        m2(cone(), czero(), czero(), cr(-T::one()))
    }

    /// `(sigma^1 + i sigma^2) / 2`.
    pub fn sigma_plus<T: Real>() -> M2<T> {
        m2(czero(), cone(), czero(), czero())
    }

    pub fn alpha0<T: Real>() -> M2<T> {
        sigma3()
    }

    pub fn alpha1<T: Real>() -> M2<T> {
        sigma1()
    }

    pub fn gamma5<T: Real>() -> M2<T> {
        sigma1()
    }

    /// `exp(-i sigma^1 pi / 4)`.
    pub fn b_matrix<T: Real>() -> M2<T> {
        let h: T = lit(FRAC_1_SQRT_2);
        m2(cr(h), ci(-h), ci(-h), cr(h))
    }

    /// `exp(i sigma^2 pi / 4)`.
    pub fn g_matrix<T: Real>() -> M2<T> {
        let h: T = lit(FRAC_1_SQRT_2);
        m2(cr(h), cr(h), cr(-h), cr(h))
    }

    /// Passage matrix taking `C(theta)` to `exp(-i sigma^1 theta / 2)`.
    pub fn p_matrix<T: Real>() -> M2<T> {
        let q: T = lit(FRAC_PI_4);
        m2(czero(), cis(q), -cis(-q), czero())
    }

    /// Square root of `sigma^1`, normalized so that `rho^2 = sigma^1`.
    pub fn rho<T: Real>() -> M2<T> {
        let f = cis::<T>(lit(FRAC_PI_4)) * cr(lit::<T>(FRAC_1_SQRT_2));
        m2(f, f * ci(-T::one()), f * ci(-T::one()), f)
    }

    pub fn max_diff2<T: Real>(a: &M2<T>, b: &M2<T>) -> T {
        a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc.max(cabs(*x - *y)))
    }

    pub fn unitarity_defect2<T: Real>(a: &M2<T>) -> T {
        max_diff2(&(a.adjoint() * a), &identity())
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use proptest::prelude::*;

    fn params(n: usize) -> WalkParams<f64> {
        WalkParams::new(1.0, 0.3, 0.0, 1.0, n).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(WalkParams::new(0.0, 0.1, 0.0, 0.0, 4).is_err());
        assert!(WalkParams::new(1.0, -0.1, 0.0, 0.0, 4).is_err());
        assert!(WalkParams::new(1.0, 0.1, 0.0, 0.0, 5).is_err());
        assert!(WalkParams::new(1.0, 0.1, 0.0, 0.0, 2).is_err());
    }

    #[test]
    fn angle_relations() {
        let p = WalkParams::new(0.5, 0.2, 0.0, 0.7, 8).unwrap();
        let g = p.angles();
        assert!((g.theta + 2.0 * g.delta - std::f64::consts::PI).abs() < 1e-15);
        assert!((g.delta - 0.4).abs() < 1e-15);
        assert!((g.delta_tilde - 0.2).abs() < 1e-15);
        assert!((g.delta_tilde_r - 0.14).abs() < 1e-15);
    }

    #[test]
    fn stagger_delta_peaks() {
        let p = params(4);
        let l = stagger(&SpinorField::delta_peak(p, 1, Component::L).unwrap());
        let r = stagger(&SpinorField::delta_peak(p, 1, Component::R).unwrap());
        for n in 0..8 {
            assert_eq!(l.phi(n), if n == 2 { cone() } else { czero() });
            assert_eq!(r.phi(n), if n == 3 { cone() } else { czero() });
        }
    }

    #[test]
    fn unstagger_peak_and_zeros() {
        let p = params(4);
        let mut v = CVector::zeros(8);
        v[2] = cone();
        let back = unstagger(&StaggeredField::from_vector(p, v).unwrap());
        assert_eq!(back.psi_l(1), cone());
        let z = unstagger(&StaggeredField::from_vector(p, CVector::zeros(8)).unwrap());
        assert_eq!(z, SpinorField::zeros(p));
    }

    #[test]
    fn basis_change_of_identity() {
        let p = params(4);
        let id = LatticeOperator::lr(linalg::identity(8), OperatorKind::Unitary, p);
        let st = change_operator_basis(&id, Basis::StaggeredPosition);
        assert_eq!(st.matrix, id.matrix);
        assert_eq!(st.basis, Basis::StaggeredPosition);
    }

    #[test]
    fn constant_matrix_identities() {
        let id = identity::<f64>();
        for s in [sigma1(), sigma2(), sigma3()] {
            assert!(max_diff2(&(s * s), &id) < 1e-15);
        }
        let sp = (sigma1::<f64>() + sigma2::<f64>() * ci(1.0)) * cr(0.5);
        assert!(max_diff2(&sp, &sigma_plus()) < 1e-15);
        for u in [b_matrix::<f64>(), g_matrix(), p_matrix(), rho()] {
            assert!(unitarity_defect2(&u) < 1e-15);
        }
        assert!(max_diff2(&(rho::<f64>() * rho()), &sigma1()) < 1e-15);
        // G sigma^1 G^-1 = sigma^3
        let g = g_matrix::<f64>();
        assert!(max_diff2(&(g * sigma1() * g.adjoint()), &sigma3()) < 1e-15);
    }

    #[test]
    fn constant_matrices_are_exponentials() {
        let quarter = std::f64::consts::FRAC_PI_4;
        let b = (sigma1::<f64>() * ci(-quarter)).exp();
        let g = (sigma2::<f64>() * ci(quarter)).exp();
        assert!(max_diff2(&b, &b_matrix()) < 1e-15);
        assert!(max_diff2(&g, &g_matrix()) < 1e-15);
    }

    fn arb_field(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * n)
    }

    proptest! {
        #[test]
        fn stagger_round_trip_is_exact(v in arb_field(6)) {
            let p = params(6);
            let data = CVector::from_iterator(12, v.iter().map(|&(a, b)| Complex::new(a, b)));
            let f = SpinorField::from_vector(p, data).unwrap();
            let s = stagger(&f);
            prop_assert_eq!(unstagger(&s), f.clone());
            prop_assert!((s.norm_sqr() - f.norm_sqr()).abs() <= 1e-15 * f.norm_sqr().max(1.0));
        }
    }
}
