use lattice_walk::digitize::{build_two_angle_walk, build_walk, scheme_radius, two_angle_thetas, WALK_SCHEMES};
use lattice_walk::equivalence::{even_odd_coin_decomposition, strauch_operator};
use lattice_walk::gauge::{build_gauged_step, gauged_left_right_hamiltonian, gauged_naive_hamiltonian, GaugedScheme};
use lattice_walk::hamiltonians::{
    build_left_right, build_left_right_transport, build_naive, build_staggered, build_wilson, build_wilson_nearest_neighbor,
    left_right_mass, naive_transport, split_on_inter,
};
use lattice_walk::lattice::{Basis, OperatorKind};
use lattice_walk::linalg::evolution;
use lattice_walk::scalar::CMatrix;
use lattice_walk::{GaugeConfigF64, LatticeOperatorF64, WalkOperatorF64, WalkParamsF64};
use serde::{Serialize, Serializer};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ham {
    LeftRight,
    Naive,
    Wilson,
    Staggered,
    GaugedLeftRight,
    GaugedNaive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Walk(&'static str),
    Strauch,
    TwoAngle,
    EvenOddCoin,
    Gauged(GaugedScheme),
    Hamiltonian(Ham),
}

const HAMILTONIANS: [(&str, Ham); 6] = [
    ("h-left-right", Ham::LeftRight),
    ("h-naive", Ham::Naive),
    ("h-wilson", Ham::Wilson),
    ("h-staggered", Ham::Staggered),
    ("h-gauged-left-right", Ham::GaugedLeftRight),
    ("h-gauged-naive", Ham::GaugedNaive),
];

/// Every scheme name the CLI accepts.
pub fn scheme_names() -> Vec<String> {
    let mut out: Vec<String> = WALK_SCHEMES.iter().map(|s| s.to_string()).collect();
    out.extend(["wilson-even-odd", "strauch", "two-angle", "even-odd-coin", "gauged-left-right", "gauged-naive"].map(String::from));
    out.extend(HAMILTONIANS.iter().map(|(n, _)| n.to_string()));
    out
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

fn lr_hermitian(h: CMatrix<f64>, p: &WalkParamsF64) -> LatticeOperatorF64 {
    LatticeOperatorF64::new(h, Basis::LRPosition, OperatorKind::Hermitian, *p).expect("dimensions fixed by params")
}

impl Scheme {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        if let Some(s) = WALK_SCHEMES.iter().find(|s| **s == name) {
            return Ok(Scheme::Walk(s));
        }
        if let Some((_, h)) = HAMILTONIANS.iter().find(|(n, _)| *n == name) {
            return Ok(Scheme::Hamiltonian(*h));
        }
        Ok(match name {
            "wilson-even-odd" => Scheme::Walk("wilson-even-odd"),
            "strauch" => Scheme::Strauch,
            "two-angle" => Scheme::TwoAngle,
            "even-odd-coin" => Scheme::EvenOddCoin,
            "gauged-left-right" => Scheme::Gauged(GaugedScheme::LeftRight),
            "gauged-naive" => Scheme::Gauged(GaugedScheme::Naive),
            _ => return Err(CliError::Config(format!("unknown scheme {name:?}; expected one of {}", scheme_names().join(", ")))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Scheme::Walk(s) => s.to_string(),
            Scheme::Strauch => "strauch".into(),
            Scheme::TwoAngle => "two-angle".into(),
            Scheme::EvenOddCoin => "even-odd-coin".into(),
            Scheme::Gauged(GaugedScheme::LeftRight) => "gauged-left-right".into(),
            Scheme::Gauged(GaugedScheme::Naive) => "gauged-naive".into(),
            Scheme::Hamiltonian(h) => HAMILTONIANS.iter().find(|(_, x)| x == h).map(|(n, _)| n.to_string()).unwrap(),
        }
    }

    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, Scheme::Hamiltonian(_))
    }

    pub fn is_gauged(&self) -> bool {
        matches!(self, Scheme::Gauged(_) | Scheme::Hamiltonian(Ham::GaugedLeftRight | Ham::GaugedNaive))
    }

    /// Light-cone radius per step in sites; Hamiltonians report their hopping range.
    pub fn radius(&self) -> usize {
        match self {
            Scheme::Walk(s) => scheme_radius(s).unwrap(),
            Scheme::Strauch | Scheme::TwoAngle | Scheme::EvenOddCoin | Scheme::Gauged(GaugedScheme::Naive) => 2,
            Scheme::Gauged(GaugedScheme::LeftRight) | Scheme::Hamiltonian(_) => 1,
        }
    }

    pub fn walk(
        &self,
        p: &WalkParamsF64,
        gauge: Option<&GaugeConfigF64>,
        kappa: [f64; 2],
        j: usize,
    ) -> Result<Option<WalkOperatorF64>, CliError> {
        Ok(Some(match self {
            Scheme::Walk(s) => build_walk(s, p).unwrap(),
            Scheme::Strauch => strauch_operator(p.theta_tilde(), p),
            Scheme::TwoAngle => {
                let (t1, t2) = two_angle_thetas(kappa[0], kappa[1], p);
                build_two_angle_walk(t1, t2, p)
            }
            Scheme::EvenOddCoin => even_odd_coin_decomposition(p),
            Scheme::Gauged(g) => build_gauged_step(*g, p, gauge.expect("validated"), j)?,
            Scheme::Hamiltonian(_) => return Ok(None),
        }))
    }

    pub fn hamiltonian(&self, p: &WalkParamsF64, gauge: Option<&GaugeConfigF64>, j: usize) -> Result<Option<LatticeOperatorF64>, CliError> {
        let Scheme::Hamiltonian(h) = self else { return Ok(None) };
        Ok(Some(match h {
            Ham::LeftRight => build_left_right(p),
            Ham::Naive => build_naive(p),
            Ham::Wilson => build_wilson(p),
            Ham::Staggered => build_staggered(p),
            Ham::GaugedLeftRight => gauged_left_right_hamiltonian(p, gauge.expect("validated"), j)?,
            Ham::GaugedNaive => gauged_naive_hamiltonian(p, gauge.expect("validated"), j)?,
        }))
    }

    /// One-step evolution matrix at time slice `j`.
    pub fn step(&self, p: &WalkParamsF64, gauge: Option<&GaugeConfigF64>, kappa: [f64; 2], j: usize) -> Result<CMatrix<f64>, CliError> {
        if let Some(h) = self.hamiltonian(p, gauge, j)? {
            return Ok(evolution(&h.matrix, p.dt));
        }
        Ok(self.walk(p, gauge, kappa, j)?.expect("walk scheme").op.matrix)
    }

    /// Label of the Hamiltonian a walk digitizes, if it has one.
    pub fn continuum_name(&self) -> Option<&'static str> {
        Some(match self {
            Scheme::Walk("u-mass") => "left-right mass",
            Scheme::Walk("u-on") => "left-right on-site transport",
            Scheme::Walk("u-int") => "left-right inter-site transport",
            Scheme::Walk("u-transport" | "dtqw-compact") => "left-right transport",
            Scheme::Walk("left-right-walk") => "left-right",
            Scheme::Walk("naive-dtqw" | "naive-two-factor" | "even-odd") | Scheme::EvenOddCoin => "naive transport",
            Scheme::Walk("naive-walk" | "even-odd-walk") => "naive",
            Scheme::Walk("wilson-dtqw" | "wilson-even-odd") => "Wilson nearest-neighbour term",
            Scheme::Gauged(GaugedScheme::LeftRight) => "gauged left-right",
            Scheme::Gauged(GaugedScheme::Naive) => "gauged naive",
            _ => return None,
        })
    }

    /// The Hamiltonian whose exponential the walk approximates to first order in `dt`.
    pub fn continuum(&self, p: &WalkParamsF64, gauge: Option<&GaugeConfigF64>, j: usize) -> Result<Option<LatticeOperatorF64>, CliError> {
        let massless = p.with_mass(0.0);
        Ok(Some(match self {
            Scheme::Walk("u-mass") => lr_hermitian(left_right_mass(p), p),
            Scheme::Walk("u-on") => split_on_inter(&build_left_right_transport(p))?.0,
            Scheme::Walk("u-int") => split_on_inter(&build_left_right_transport(p))?.1,
            Scheme::Walk("u-transport" | "dtqw-compact") => build_left_right_transport(p),
            Scheme::Walk("left-right-walk") => build_left_right(p),
            Scheme::Walk("naive-dtqw" | "naive-two-factor" | "even-odd") | Scheme::EvenOddCoin => {
                lr_hermitian(naive_transport(&massless), p)
            }
            Scheme::Walk("naive-walk" | "even-odd-walk") => build_naive(p),
            Scheme::Walk("wilson-dtqw" | "wilson-even-odd") => build_wilson_nearest_neighbor(p),
            Scheme::Gauged(GaugedScheme::LeftRight) => gauged_left_right_hamiltonian(p, gauge.expect("validated"), j)?,
            Scheme::Gauged(GaugedScheme::Naive) => gauged_naive_hamiltonian(p, gauge.expect("validated"), j)?,
            _ => return Ok(None),
        }))
    }
}
