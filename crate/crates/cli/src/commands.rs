use std::f64::consts::PI;

use lattice_walk::equivalence::{mapping_real_space_coefficients, predicted_decay_ratio};
use lattice_walk::gauge::{
    admissible_large_shift, covariance_defect, field_strength_f01, large_shift, large_shift_winding, plaquette_u01, transform_potentials,
    GaugeTransform, GaugedScheme,
};
use lattice_walk::lattice::{lr_index, Component};
use lattice_walk::linalg::{eigenvalues, hermitian_eigenvalues, sort_by_phase, unitarity_defect};
use lattice_walk::scalar::{CMatrix, CVector};
use lattice_walk::verify::{doubling_count, mass_beyond, step_error};
use lattice_walk::{GaugeConfigF64, WalkParamsF64};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{InitialState, Observable, RunConfig};
use crate::error::CliError;
use crate::output::{Emitter, Table};

pub const NORM_DRIFT_TOL: f64 = 1e-12;
pub const COVARIANCE_TOL: f64 = 1e-12;

pub fn initial_state(cfg: &RunConfig) -> CVector<f64> {
    let n = cfg.params.n_sites;
    let mut psi = CVector::zeros(2 * n);
    match cfg.initial_state {
        InitialState::DeltaPeak { site, component } => psi[lr_index(n, site as isize, component)] = Complex64::new(1.0, 0.0),
        InitialState::Gaussian { center, width, momentum, component } => {
            for p in 0..n {
                let d = (p as f64 - center).rem_euclid(n as f64);
                let d = if d >= n as f64 / 2.0 { d - n as f64 } else { d };
                let env = (-d * d / (2.0 * width * width)).exp();
                psi[lr_index(n, p as isize, component)] = Complex64::from_polar(env, momentum * p as f64);
            }
            let norm = psi.norm();
            psi /= Complex64::new(norm, 0.0);
        }
        InitialState::PlaneWave { k, branch } => {
            let amp = 1.0 / (n as f64).sqrt();
            for p in 0..n {
                psi[lr_index(n, p as isize, branch)] = Complex64::from_polar(amp, 2.0 * PI * (k * p as i64) as f64 / n as f64);
            }
        }
    }
    psi
}

fn peak_site(cfg: &RunConfig) -> Option<usize> {
    match cfg.initial_state {
        InitialState::DeltaPeak { site, .. } => Some(site),
        _ => None,
    }
}

fn check_cone_fits(cfg: &RunConfig, observables: &[Observable]) -> Result<(), CliError> {
    let (n, r) = (cfg.params.n_sites, cfg.scheme.radius());
    if observables.contains(&Observable::OutsideConeMass) && n <= 2 * r * cfg.steps + 2 {
        return Err(CliError::Config(format!("outside_cone_mass needs n_sites > 2 * {r} * steps + 2 so the cone does not wrap")));
    }
    Ok(())
}

/// Steps the initial state through `cfg.steps` steps, calling `visit(step, psi)` after each, step 0 included.
fn run_steps(cfg: &RunConfig, p: &WalkParamsF64, mut visit: impl FnMut(usize, &CVector<f64>)) -> Result<CVector<f64>, CliError> {
    let mut psi = initial_state(cfg);
    visit(0, &psi);
    let mut fixed: Option<CMatrix<f64>> = None;
    for j in 0..cfg.steps {
        let u = if cfg.scheme.is_gauged() {
            cfg.scheme.step(p, cfg.gauge.as_ref(), cfg.kappa, j)?
        } else {
            if fixed.is_none() {
                fixed = Some(cfg.scheme.step(p, None, cfg.kappa, 0)?);
            }
            fixed.clone().unwrap()
        };
        psi = &u * &psi;
        visit(j + 1, &psi);
    }
    Ok(psi)
}

fn spectrum_table(cfg: &RunConfig, p: &WalkParamsF64) -> Result<Table, CliError> {
    if let Some(h) = cfg.scheme.hamiltonian(p, cfg.gauge.as_ref(), 0)? {
        let mut t = Table::new("spectrum", &["index [1]", "energy [1/len]"]);
        for (i, e) in hermitian_eigenvalues(&h.matrix).into_iter().enumerate() {
            t.push(vec![json!(i), json!(e)]);
        }
        return Ok(t);
    }
    let u = cfg.scheme.step(p, cfg.gauge.as_ref(), cfg.kappa, 0)?;
    let mut ev = eigenvalues(&u);
    sort_by_phase(&mut ev);
    let mut t = Table::new("spectrum", &["index [1]", "eigenvalue_re [1]", "eigenvalue_im [1]", "phase [rad]", "quasi_energy [1/len]"]);
    for (i, z) in ev.into_iter().enumerate() {
        let qe = if p.dt > 0.0 { json!(-z.arg() / p.dt) } else { Value::Null };
        t.push(vec![json!(i), json!(z.re), json!(z.im), json!(z.arg()), qe]);
    }
    Ok(t)
}

fn plaquette_table(p: &WalkParamsF64, g: &GaugeConfigF64) -> Result<Table, CliError> {
    let mut t = Table::new("plaquettes", &["j [step]", "p [site]", "F01 [1/len^2]", "U01_re [1]", "U01_im [1]"]);
    for j in 0..g.steps() {
        for q in 0..g.n_sites() {
            let f = field_strength_f01(p, g, j, q)?;
            let u = plaquette_u01(p, g, j, q)?;
            t.push(vec![json!(j), json!(q), json!(f), json!(u.re), json!(u.im)]);
        }
    }
    Ok(t)
}

fn final_state_table(psi: &CVector<f64>, p: &WalkParamsF64) -> Table {
    let n = p.n_sites;
    let mut t = Table::new("final_state", &["p [site]", "x [len]", "psi_L_re [1]", "psi_L_im [1]", "psi_R_re [1]", "psi_R_im [1]"]);
    for s in 0..n {
        let (l, r) = (psi[lr_index(n, s as isize, Component::L)], psi[lr_index(n, s as isize, Component::R)]);
        t.push(vec![json!(s), json!(s as f64 * p.a), json!(l.re), json!(l.im), json!(r.re), json!(r.im)]);
    }
    t
}

pub fn evolve(cfg: &RunConfig, out: &Emitter) -> Result<bool, CliError> {
    use Observable::*;
    let obs = cfg.observables(&[ProbabilityDensity, Norm, OutsideConeMass, Spectrum, F01, U01], &[ProbabilityDensity, Norm])?;
    check_cone_fits(cfg, &obs)?;
    let p = cfg.params;
    let n = p.n_sites;
    let (p0, radius) = (peak_site(cfg), cfg.scheme.radius());
    let mut density = Table::new("density", &["step [1]", "t [len]", "p [site]", "x [len]", "rho_L [prob]", "rho_R [prob]", "rho [prob]"]);
    let mut norms = Table::new("norms", &["step [1]", "t [len]", "norm [1]", "drift [1]"]);
    let mut cone = Table::new("outside_cone_mass", &["step [1]", "t [len]", "cone_radius [site]", "outside_mass [prob]"]);
    let mut initial_norm = None;
    let mut drift = 0.0f64;
    let psi = run_steps(cfg, &p, |j, psi| {
        let t = j as f64 * p.dt;
        if obs.contains(&ProbabilityDensity) {
            for s in 0..n {
                let l = psi[lr_index(n, s as isize, Component::L)].norm_sqr();
                let r = psi[lr_index(n, s as isize, Component::R)].norm_sqr();
                density.push(vec![json!(j), json!(t), json!(s), json!(s as f64 * p.a), json!(l), json!(r), json!(l + r)]);
            }
        }
        let norm = psi.norm_squared();
        let n0 = *initial_norm.get_or_insert(norm);
        drift = drift.max((norm - n0).abs());
        if obs.contains(&Norm) {
            norms.push(vec![json!(j), json!(t), json!(norm), json!(norm - n0)]);
        }
        if let (true, Some(p0)) = (obs.contains(&OutsideConeMass), p0) {
            let d = radius * j + 1;
            cone.push(vec![json!(j), json!(t), json!(d - 1), json!(mass_beyond(psi, n, p0, d))]);
        }
    })?;
    let mut written = vec![out.write(&final_state_table(&psi, &p))?];
    if obs.contains(&ProbabilityDensity) {
        written.push(out.write(&density)?);
    }
    if obs.contains(&Norm) {
        written.push(out.write(&norms)?);
    }
    if obs.contains(&OutsideConeMass) {
        written.push(out.write(&cone)?);
    }
    if obs.contains(&Spectrum) {
        written.push(out.write(&spectrum_table(cfg, &p)?)?);
    }
    if obs.contains(&F01) || obs.contains(&U01) {
        written.push(out.write(&plaquette_table(&p, cfg.gauge.as_ref().unwrap())?)?);
    }
    for w in &written {
        println!("wrote {}", w.display());
    }
    let ok = drift <= NORM_DRIFT_TOL;
    println!("{} steps of {}, norm drift {drift:.3e} ({})", cfg.steps, cfg.scheme.name(), if ok { "ok" } else { "exceeds 1e-12" });
    Ok(ok)
}

fn axis(values: &Option<Vec<f64>>, default: f64, name: &str) -> Result<Vec<f64>, CliError> {
    match values {
        Some(v) if v.is_empty() => Err(CliError::Config(format!("empty grid: axis {name} has no values"))),
        Some(v) => Ok(v.clone()),
        None => Ok(vec![default]),
    }
}

pub fn sweep(cfg: &RunConfig, out: &Emitter) -> Result<bool, CliError> {
    use Observable::*;
    let mut default = vec![Norm, UnitarityDefect];
    if cfg.scheme.continuum_name().is_some() {
        default.push(StepError);
    }
    if cfg.scheme.is_hamiltonian() {
        default.push(DoublingCount);
    }
    let obs = cfg.observables(&[Norm, OutsideConeMass, UnitarityDefect, StepError, DoublingCount], &default)?;
    check_cone_fits(cfg, &obs)?;
    let g = &cfg.grid;
    let (dts, as_, ms, rs) =
        (axis(&g.dt, cfg.params.dt, "dt")?, axis(&g.a, cfg.params.a, "a")?, axis(&g.m, cfg.params.m, "m")?, axis(&g.r, cfg.params.r, "r")?);
    let mut columns = vec!["dt [len]", "a [len]", "m [1/len]", "r [1]", "delta [rad]", "theta [rad]"];
    for o in &obs {
        columns.push(match o {
            Norm => "norm [1]",
            OutsideConeMass => "outside_cone_mass [prob]",
            UnitarityDefect => "unitarity_defect [1]",
            StepError => "step_error [1]",
            DoublingCount => "doubling_count [1]",
            _ => unreachable!(),
        });
    }
    let mut table = Table::new("sweep", &columns);
    let mut ok = true;
    for &dt in &dts {
        for &a in &as_ {
            for &m in &ms {
                for &r in &rs {
                    let p =
                        WalkParamsF64::new(a, dt, m, r, cfg.params.n_sites).map_err(|e| CliError::Config(format!("grid point: {e}")))?;
                    let mut row = vec![json!(dt), json!(a), json!(m), json!(r), json!(p.delta()), json!(p.theta())];
                    let gauge = cfg.gauge.as_ref();
                    let mut outside = 0.0f64;
                    let (p0, radius, n) = (peak_site(cfg), cfg.scheme.radius(), p.n_sites);
                    let (mut n0, mut drift) = (None, 0.0f64);
                    let psi = run_steps(cfg, &p, |j, psi| {
                        if let Some(p0) = p0 {
                            outside = outside.max(mass_beyond(psi, n, p0, radius * j + 1));
                        }
                        let norm = psi.norm_squared();
                        drift = drift.max((norm - *n0.get_or_insert(norm)).abs());
                    })?;
                    ok &= drift <= NORM_DRIFT_TOL;
                    for o in &obs {
                        row.push(match o {
                            Norm => json!(psi.norm_squared()),
                            OutsideConeMass => json!(outside),
                            UnitarityDefect => json!(unitarity_defect(&cfg.scheme.step(&p, gauge, cfg.kappa, 0)?)),
                            StepError => {
                                let w = cfg.scheme.walk(&p, gauge, cfg.kappa, 0)?.unwrap();
                                let h = cfg.scheme.continuum(&p, gauge, 0)?.unwrap();
                                json!(step_error(&w, &h, dt))
                            }
                            DoublingCount => json!(doubling_count(&cfg.scheme.hamiltonian(&p, gauge, 0)?.unwrap())),
                            _ => unreachable!(),
                        });
                    }
                    table.push(row);
                }
            }
        }
    }
    println!("wrote {} ({} grid points)", out.write(&table)?.display(), table.rows.len());
    Ok(ok)
}

pub fn spectrum(cfg: &RunConfig, out: &Emitter) -> Result<bool, CliError> {
    let table = spectrum_table(cfg, &cfg.params)?;
    println!("wrote {} ({} eigenvalues)", out.write(&table)?.display(), table.rows.len());
    if let Some(h) = cfg.scheme.hamiltonian(&cfg.params, cfg.gauge.as_ref(), 0)? {
        println!("doubling count {}", doubling_count(&h));
    }
    Ok(true)
}

pub fn map_coeffs(cfg: &RunConfig, out: &mut Emitter) -> Result<bool, CliError> {
    let p = cfg.params;
    let coeffs = mapping_real_space_coefficients(&p, cfg.max_offset, cfg.points).map_err(|e| CliError::Config(e.to_string()))?;
    let ratio = coeffs.decay_ratio(1, 1).ok();
    out.header.insert("max_offset".into(), json!(cfg.max_offset));
    out.header.insert("quadrature_points".into(), json!(cfg.points));
    out.header.insert("decay_ratio_b22".into(), json!(ratio));
    out.header.insert("predicted_decay_ratio".into(), json!(predicted_decay_ratio(&p)));
    out.header.insert("reconstruction_error".into(), json!(coeffs.reconstruction_error(&p, 64)?));
    let names: Vec<String> = (0..4)
        .flat_map(|u| (0..4).flat_map(move |v| [format!("b{}{}_re [1]", u + 1, v + 1), format!("b{}{}_im [1]", u + 1, v + 1)]))
        .collect();
    let mut columns = vec!["N [cell]"];
    columns.extend(names.iter().map(String::as_str));
    columns.push("frobenius [1]");
    let mut table = Table::new("map_coeffs", &columns);
    for (&nn, b) in &coeffs.entries {
        let mut row = vec![json!(nn)];
        for u in 0..4 {
            for v in 0..4 {
                row.push(json!(b[(u, v)].re));
                row.push(json!(b[(u, v)].im));
            }
        }
        row.push(json!(b.norm()));
        table.push(row);
    }
    println!("wrote {} (|N| <= {}, decay ratio {:?})", out.write(&table)?.display(), cfg.max_offset, ratio);
    Ok(true)
}

pub fn random_gauge(rng: &mut ChaCha8Rng, steps: usize, n: usize) -> GaugeConfigF64 {
    let mut rows = |k: usize| (0..k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>()).collect::<Vec<_>>();
    let a0 = rows(steps);
    let a1 = rows(steps + 1);
    GaugeConfigF64::new(1.0, a0, a1).expect("shapes are consistent")
}

pub fn random_transform(rng: &mut ChaCha8Rng, slices: usize, n: usize) -> GaugeTransform<f64> {
    GaugeTransform { phi: (0..slices).map(|_| (0..n).map(|_| rng.gen_range(-PI..PI)).collect()).collect() }
}

/// Covariance, `F01` invariance and large-shift checks on one gauge field.
pub fn gauge_checks(
    p: &WalkParamsF64,
    g: &GaugeConfigF64,
    rng: &mut ChaCha8Rng,
    transforms: usize,
) -> Result<Vec<crate::suites::Check>, CliError> {
    use crate::suites::Check;
    let (steps, n) = (g.steps(), g.n_sites());
    let (mut cov, mut f_inv) = (0.0f64, 0.0f64);
    for _ in 0..transforms {
        let t = random_transform(rng, steps + 1, n);
        let moved = transform_potentials(p, g, &t);
        for j in 0..steps {
            for s in [GaugedScheme::LeftRight, GaugedScheme::Naive] {
                cov = cov.max(covariance_defect(s, p, g, &t, j)?);
            }
            for q in 0..n {
                f_inv = f_inv.max((field_strength_f01(p, g, j, q)? - field_strength_f01(p, &moved, j, q)?).abs());
            }
        }
    }
    let mut w0 = vec![vec![0i64; n]; steps];
    let mut w1 = vec![vec![0i64; n]; steps + 1];
    let (j, q) = (rng.gen_range(0..steps), rng.gen_range(0..n));
    w0[j][(q + 1) % n] = rng.gen_range(1..4);
    w1[j + 1][q] = rng.gen_range(1..4);
    let shifted = large_shift(p, g, &w0, &w1)?;
    let unit = 2.0 * PI / (g.q * p.a * p.dt);
    let expected = unit * large_shift_winding(&w0, &w1, j, q) as f64;
    let df = field_strength_f01(p, &shifted, j, q)? - field_strength_f01(p, g, j, q)?;
    let mut du = 0.0f64;
    for jj in 0..steps {
        for qq in 0..n {
            du = du.max((plaquette_u01(p, &shifted, jj, qq)? - plaquette_u01(p, g, jj, qq)?).norm());
        }
    }
    let scale = unit.abs().max(1.0);
    Ok(vec![
        Check::at_most("covariance_defect", cov, COVARIANCE_TOL),
        Check::at_most("F01_invariance", f_inv, 1e-10 * scale),
        Check::at_most("large_shift_U01_change", du, 1e-10),
        Check::at_most("large_shift_F01_quantization", (df - expected).abs(), 1e-9 * scale),
        Check::flag("large_shift_admissible", admissible_large_shift(&w0, &w1, j, q)),
    ])
}

pub fn gauge_check(cfg: &RunConfig, out: &Emitter) -> Result<bool, CliError> {
    let p = cfg.params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = match &cfg.gauge {
        Some(g) => g.clone(),
        None => {
            let g = random_gauge(&mut rng, cfg.steps.max(1), p.n_sites);
            println!("wrote {}", out.write_json("gauge", &json!(g))?.display());
            g
        }
    };
    let checks = gauge_checks(&p, &g, &mut rng, 20)?;
    println!("wrote {}", out.write(&plaquette_table(&p, &g)?)?.display());
    crate::suites::report(out, "gauge_check", &checks)
}
