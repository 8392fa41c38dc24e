use std::f64::consts::FRAC_PI_2;

use lattice_walk::digitize::{
    build_dtqw_compact, build_even_odd, build_left_right_walk, build_naive_dtqw, build_two_angle_walk, build_u_int, build_u_on,
    build_u_transport,
};
use lattice_walk::equivalence::{
    conjugation_defect, even_odd_coin_decomposition, fourier_blocks, mapping_b_of_k, strauch_conjugate, strauch_operator,
};
use lattice_walk::hamiltonians::{build_left_right, build_left_right_transport, build_naive, build_staggered, build_wilson, to_staggered};
use lattice_walk::lattice::{change_operator_basis, lr_index, pauli, Basis, Component};
use lattice_walk::linalg::{self, circle_distance, eigenvalues, evolution, max_diff, site_diag, sort_by_phase};
use lattice_walk::scalar::{CMatrix, CVector};
use lattice_walk::verify::{
    continuum_space_limit, continuum_time_limit, doubling_count, light_cone_scan, spectral_compare, staggered_mass_beyond,
    symmetry_witness, PlaneMode, SpaceScheme, Symmetry,
};
use lattice_walk::WalkParamsF64;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::commands::{gauge_checks, random_gauge};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Emitter, Table};
use crate::schemes::{scheme_names, Scheme};

pub const SUITES: [&str; 6] = ["unitarity", "ultralocality", "equivalence", "gauge", "convergence", "symmetry"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, relation: "<=", bound, pass: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, relation: ">=", bound, pass: value >= bound }
    }

    /// `|value - target| <= tol`, reported with the target as bound.
    pub fn near(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Check { name: name.into(), value, relation: "~", bound: target, pass: (value - target).abs() <= tol }
    }

    pub fn equal(name: &str, value: usize, expected: usize) -> Self {
        Check { name: name.into(), value: value as f64, relation: "==", bound: expected as f64, pass: value == expected }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Check { name: name.into(), value: f64::from(u8::from(ok)), relation: "==", bound: 1.0, pass: ok }
    }
}

/// Writes the JSON report (plus a CSV table in CSV mode) and prints one line per check.
pub fn report(out: &Emitter, name: &str, checks: &[Check]) -> Result<bool, CliError> {
    let passed = checks.iter().all(|c| c.pass);
    for c in checks {
        println!("[{}] {}: {:.3e} {} {:.3e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.relation, c.bound);
    }
    println!("wrote {}", out.write_json(name, &json!({ "checks": checks, "passed": passed }))?.display());
    if out.format == crate::output::Format::Csv {
        let mut t = Table::new(name, &["check", "value [1]", "relation", "bound [1]", "pass"]);
        for c in checks {
            t.push(vec![json!(c.name), json!(c.value), json!(c.relation), json!(c.bound), json!(c.pass)]);
        }
        println!("wrote {}", out.write(&t)?.display());
    }
    Ok(passed)
}

pub fn run(suite: &str, cfg: &RunConfig, out: &Emitter) -> Result<bool, CliError> {
    let checks = match suite {
        "unitarity" => unitarity(cfg)?,
        "ultralocality" => ultralocality(cfg)?,
        "equivalence" => equivalence(cfg)?,
        "gauge" => gauge(cfg)?,
        "convergence" => convergence(cfg)?,
        "symmetry" => symmetry(cfg)?,
        other => return Err(CliError::Config(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    };
    report(out, &format!("verify_{suite}"), &checks)
}

fn walk_schemes() -> Vec<Scheme> {
    scheme_names().iter().map(|n| Scheme::parse(n).unwrap()).filter(|s| !s.is_hamiltonian()).collect()
}

fn params(a: f64, dt: f64, m: f64, r: f64, n: usize) -> Result<WalkParamsF64, CliError> {
    WalkParamsF64::new(a, dt, m, r, n).map_err(|e| CliError::Config(e.to_string()))
}

fn unitarity(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = cfg.params.a;
    let mut out = Vec::new();
    for s in walk_schemes() {
        let mut worst = 0.0f64;
        for d in [0.0, 0.1, 0.5, 1.0, FRAC_PI_2 - 0.01] {
            for n in [4, 8, cfg.params.n_sites] {
                for m in [0.0, 1.0] {
                    for r in [0.0, 0.5, 1.0] {
                        let p = params(a, d * a, m, r, n)?;
                        let g = random_gauge(&mut rng, 1, n);
                        worst = worst.max(s.walk(&p, Some(&g), cfg.kappa, 0)?.unwrap().unitarity_defect());
                    }
                }
            }
        }
        out.push(Check::at_most(&format!("{}_unitarity", s.name()), worst, 1e-12));
    }
    Ok(out)
}

fn ultralocality(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let n = 64;
    let base = cfg.params;
    let p = params(base.a, base.dt, base.m, base.r, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = random_gauge(&mut rng, 1, n);
    let mut out = Vec::new();
    for s in walk_schemes() {
        let u = s.walk(&p, Some(&g), cfg.kappa, 0)?.unwrap();
        let mut leak = 0.0f64;
        for c in [Component::L, Component::R] {
            leak = leak.max(light_cone_scan(&s.name(), u.matrix(), n, s.radius(), 10, n / 2, c)?.max_outside());
        }
        out.push(Check::at_most(&format!("{}_outside_cone_mass", s.name()), leak, 1e-15));
    }
    let q = params(1.0, 0.5, 0.0, 0.0, n)?;
    let u = evolution(&build_left_right_transport(&q).matrix, q.dt);
    let mut psi = CVector::<f64>::zeros(2 * n);
    psi[lr_index(n, (n / 2) as isize, Component::L)] = Complex64::new(1.0, 0.0);
    let leak = staggered_mass_beyond(&(&u * &psi), n, 3);
    out.push(Check::at_least("exponential_staggered_leakage", leak, 1e-6));
    Ok(out)
}

fn to_dense(m: nalgebra::Matrix2<Complex64>) -> CMatrix<f64> {
    CMatrix::from_fn(2, 2, |r, c| m[(r, c)])
}

fn equivalence(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let base = cfg.params;
    let n = base.n_sites;
    let mut out = Vec::new();
    let (mut entry, mut spec) = (0.0f64, 0.0f64);
    for m in [0.0, base.m, 0.7] {
        let p = params(base.a, base.dt, m, 1.0, n)?;
        let b = site_diag(n, &pauli::b_matrix());
        let (hlr, hw) = (build_left_right(&p), build_wilson(&p));
        entry = entry.max(max_diff(&linalg::conjugate(&b, &hlr.matrix), &hw.matrix));
        spec = spec.max(spectral_compare(&hlr, &hw)?);
    }
    out.push(Check::at_most("wilson_conjugation", entry, 1e-12));
    out.push(Check::at_most("wilson_same_spectrum", spec, 1e-10));
    let p = base;
    let compact = build_dtqw_compact(&p);
    let prod = linalg::mul(build_u_on(&p).matrix(), build_u_int(&p).matrix());
    out.push(Check::at_most(
        "product_identity",
        max_diff(compact.matrix(), &prod).max(max_diff(build_u_transport(&p).matrix(), &prod)),
        1e-13,
    ));
    let st = to_staggered(&build_left_right_transport(&p.with_mass(0.0)));
    out.push(Check::at_most("staggering_identity", max_diff(&st.matrix, &build_staggered(&p.with_mass(0.0)).matrix), 1e-14));
    let th = p.theta_tilde();
    out.push(Check::at_most("strauch_conjugation", max_diff(strauch_operator(th, &p).matrix(), &strauch_conjugate(th, &p)), 1e-13));
    out.push(Check::at_most(
        "two_angle_reduction",
        max_diff(build_two_angle_walk(th, th, &p).matrix(), build_naive_dtqw(&p).matrix()),
        1e-13,
    ));
    out.push(Check::at_most("even_odd_coin_basis", max_diff(even_odd_coin_decomposition(&p).matrix(), build_even_odd(&p).matrix()), 1e-12));
    let (mut pi_spec, mut conj) = (0.0f64, 0.0f64);
    for j in 0..16 {
        let k = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / 16.0;
        let (u, w) = fourier_blocks(k, &p);
        let mut a = eigenvalues(&to_dense(u.pi_block()));
        let mut b = eigenvalues(&to_dense(w.pi_block()));
        sort_by_phase(&mut a);
        sort_by_phase(&mut b);
        pi_spec = pi_spec.max(circle_distance(&a, &b));
        conj = conj.max(conjugation_defect(&mapping_b_of_k(k, &p)?, &p));
    }
    out.push(Check::at_most("even_odd_pi_spectra", pi_spec, 1e-12));
    out.push(Check::at_most("mapping_conjugation", conj, 1e-12));
    Ok(out)
}

fn gauge(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = match &cfg.gauge {
        Some(g) => g.clone(),
        None => random_gauge(&mut rng, 3, cfg.params.n_sites),
    };
    gauge_checks(&cfg.params, &g, &mut rng, 20)
}

fn convergence(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let base = params(1.0, 0.1, 1.0, 0.0, 16)?;
    let rep = continuum_time_limit(&base, build_left_right_walk, build_left_right, &[0.2, 0.1, 0.05, 0.025], 1.0)?;
    let modes = [
        PlaneMode { n: 1, amplitude: [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.3)] },
        PlaneMode { n: -2, amplitude: [Complex64::new(0.2, -0.1), Complex64::new(0.4, 0.0)] },
    ];
    let grid = [0.5, 0.25, 0.125, 0.0625];
    let m = cfg.params.m.max(0.7);
    let lr = continuum_space_limit(SpaceScheme::LeftRight, 8.0, &grid, m, 1.0, &modes)?;
    let nv = continuum_space_limit(SpaceScheme::Naive, 8.0, &grid, m, 1.0, &modes)?;
    Ok(vec![
        Check::near("time_limit_per_step_order", rep.per_step.order, 2.0, 0.2),
        Check::near("time_limit_fixed_horizon_order", rep.fixed_horizon.order, 1.0, 0.2),
        Check::near("space_limit_left_right_order", lr.order, 1.0, 0.2),
        Check::near("space_limit_naive_order", nv.order, 2.0, 0.2),
    ])
}

fn symmetry(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let n = cfg.params.n_sites;
    let p = params(cfg.params.a, cfg.params.dt, 0.0, 0.0, n)?;
    let hs = symmetry_witness(&build_staggered(&p), Symmetry::T1Staggered)?;
    let q = params(1.0, 0.5, 0.0, 0.0, n)?;
    let ut = change_operator_basis(&build_u_transport(&q).op, Basis::StaggeredPosition);
    let mut out = vec![
        Check::at_most("staggered_hamiltonian_T1", hs, 1e-12),
        Check::at_least("transport_walk_breaks_T1", symmetry_witness(&ut, Symmetry::T1Staggered)?, 0.05),
        Check::at_most("transport_walk_keeps_T2", symmetry_witness(&ut, Symmetry::T2Staggered)?, 1e-12),
    ];
    let d = params(1.0, 0.1, 0.0, 1.0, n.max(16))?;
    out.push(Check::equal("naive_doublers", doubling_count(&build_naive(&d)), 2));
    out.push(Check::equal("left_right_doublers", doubling_count(&build_left_right(&d)), 1));
    out.push(Check::equal("wilson_doublers", doubling_count(&build_wilson(&d)), 1));
    Ok(out)
}
