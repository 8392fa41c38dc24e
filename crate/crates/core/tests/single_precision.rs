use lattice_walk::digitize::{build_walk, WALK_SCHEMES};
use lattice_walk::equivalence::{mapping_b_of_k, strauch_conjugate, strauch_operator};
use lattice_walk::hamiltonians::{build_left_right, build_naive, build_wilson};
use lattice_walk::linalg::{self, max_diff, site_diag};
use lattice_walk::lattice::pauli;
use lattice_walk::verify::{doubling_count, spectral_compare};
use lattice_walk::{WalkParamsF32, WalkParamsF64};

fn pair(dt: f64, m: f64, r: f64, n: usize) -> (WalkParamsF32, WalkParamsF64) {
    (WalkParamsF32::new(1.0, dt as f32, m as f32, r as f32, n).unwrap(), WalkParamsF64::new(1.0, dt, m, r, n).unwrap())
}

#[test]
fn walks_are_unitary_and_track_double_precision() {
    let (p32, p64) = pair(0.4, 0.8, 0.5, 8);
    for s in WALK_SCHEMES {
        let w32 = build_walk(s, &p32).unwrap();
        let w64 = build_walk(s, &p64).unwrap();
        assert!(w32.unitarity_defect() < 1e-5, "{s}");
        let widened = w32.matrix().map(|z| num_complex::Complex64::new(z.re as f64, z.im as f64));
        assert!(max_diff(&widened, w64.matrix()) < 1e-5, "{s}");
    }
}

#[test]
fn equivalences_hold_to_single_precision() {
    let (p, _) = pair(0.3, 0.6, 1.0, 8);
    let b = site_diag(8, &pauli::b_matrix::<f32>());
    assert!(max_diff(&linalg::conjugate(&b, &build_left_right(&p).matrix), &build_wilson(&p).matrix) < 1e-5);
    assert!(spectral_compare(&build_left_right(&p), &build_wilson(&p)).unwrap() < 1e-4);
    let th = p.theta_tilde();
    assert!(max_diff(strauch_operator(th, &p).matrix(), &strauch_conjugate(th, &p)) < 1e-5);
    assert!(mapping_b_of_k(0.7f32, &p).unwrap().unitarity_defect() < 1e-5);
}

#[test]
fn doubling_count_in_single_precision() {
    let (p, _) = pair(0.1, 0.0, 1.0, 32);
    assert_eq!(doubling_count(&build_naive(&p)), 2);
    assert_eq!(doubling_count(&build_wilson(&p)), 1);
}
