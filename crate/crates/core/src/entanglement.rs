//! Magic-basis machinery, Wootters concurrence and entanglement of
//! formation for the two-dot state.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat4};
use crate::propagator::{DensityMatrix, NEGATIVE_EIGEN_TOL};

/// Eigenvalues of ρρ̃ above this negative value are rounding noise.
const SPECTRUM_CLAMP: f64 = 1e-10;

/// The four Bell states
///
/// ```text
/// e1 = (|XX⟩ + |00⟩)/√2     e2 = i(|XX⟩ - |00⟩)/√2
/// e3 = i(|X0⟩ + |0X⟩)/√2    e4 = (|X0⟩ - |0X⟩)/√2
/// ```
///
/// `u_magic` maps product-basis components to magic-basis components; its
/// row `i` is `⟨e_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicBasis {
    pub u_magic: CMat4,
}

impl Default for MagicBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl MagicBasis {
    pub fn new() -> Self {
        let h = FRAC_1_SQRT_2;
        // columns are e1..e4 in (00, X0, 0X, XX) components
        #[rustfmt::skip]
        let vectors = CMat4::new(
            c(h, 0.0), c(0.0, -h), c(0.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, h), c(h, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, h), c(-h, 0.0),
            c(h, 0.0), c(0.0, h), c(0.0, 0.0), c(0.0, 0.0),
        );
        Self {
            u_magic: vectors.adjoint(),
        }
    }

    /// Product-basis components of `e_{index+1}`.
    pub fn vector(&self, index: usize) -> Vector4<Complex64> {
        self.u_magic.row(index).adjoint()
    }
}

/// `ρ_magic = U ρ U†`.
pub fn to_magic_basis(rho: &DensityMatrix) -> DensityMatrix {
    rho.transformed(&MagicBasis::new().u_magic)
}

pub fn from_magic_basis(rho_magic: &DensityMatrix) -> DensityMatrix {
    rho_magic.transformed(&MagicBasis::new().u_magic.adjoint())
}

/// Diagonal of ρ in the magic basis.
pub fn magic_diagonal(rho: &DensityMatrix) -> [f64; 4] {
    let m = to_magic_basis(rho);
    [
        m.get(0, 0).re,
        m.get(1, 1).re,
        m.get(2, 2).re,
        m.get(3, 3).re,
    ]
}

/// `σ_y ⊗ σ_y` in the product basis.
fn sigma_yy() -> CMat4 {
    let mut y = CMat4::zeros();
    y[(0, 3)] = c(-1.0, 0.0);
    y[(3, 0)] = c(-1.0, 0.0);
    y[(1, 2)] = c(1.0, 0.0);
    y[(2, 1)] = c(1.0, 0.0);
    y
}

/// Spin-flipped matrix `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(rho: &CMat4) -> CMat4 {
    let y = sigma_yy();
    y * rho.map(|z| z.conj()) * y
}

/// Eigen-decomposition of ρ with eigenvalues in `[-1e-8, 0)` clipped to
/// zero; more negative ones are an error.
fn clipped_eigen(rho: &DensityMatrix) -> Result<(Vector4<f64>, CMat4)> {
    if !linalg::is_finite(rho.matrix()) {
        return Err(Error::Numeric(
            "density matrix has non-finite entries".into(),
        ));
    }
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix());
    if vals[0] < -NEGATIVE_EIGEN_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {:.3e}",
            vals[0]
        )));
    }
    Ok((vals.map(|l| l.max(0.0)), vecs))
}

fn clipped(rho: &DensityMatrix) -> Result<CMat4> {
    if rho.min_eigenvalue() >= 0.0 {
        return Ok(*rho.matrix());
    }
    let (vals, vecs) = clipped_eigen(rho)?;
    let d = Matrix4::from_diagonal(&vals.map(|l| c(l, 0.0)));
    Ok(vecs * d * vecs.adjoint())
}

fn sorted_desc(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Square roots of the eigenvalues of `ρρ̃`, descending.
///
/// With `ρ = W W†` (`W` the eigenvectors scaled by `√p`), `ρρ̃` is similar
/// to `τ*τ` for the symmetric `τ = Wᵀ(σ_y⊗σ_y)W`, so these are the singular
/// values of `τ`. Zero eigenvalues of ρ then enter only at second order,
/// which keeps rank-deficient states at full precision.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let (vals, vecs) = clipped_eigen(rho)?;
    let w = vecs * Matrix4::from_diagonal(&vals.map(|p| c(p.sqrt(), 0.0)));
    let tau = w.transpose() * sigma_yy() * w;
    let sv = tau.singular_values();
    Ok(sorted_desc([sv[0], sv[1], sv[2], sv[3]]))
}

/// Same spectrum from the eigenvalues of the product `ρρ̃` itself.
pub fn product_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let m = clipped(rho)?;
    let ev = linalg::general_eigenvalues(&(m * spin_flip(&m)));
    let mut out = [0.0; 4];
    for (o, z) in out.iter_mut().zip(ev.iter()) {
        let re = if z.re < 0.0 && z.re >= -SPECTRUM_CLAMP {
            0.0
        } else {
            z.re
        };
        *o = re.max(0.0).sqrt();
    }
    Ok(sorted_desc(out))
}

/// Eigenvalues of `R = sqrt(sqrt(ρ) ρ* sqrt(ρ))` with the conjugation taken
/// in the magic basis, descending.
pub fn r_matrix_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let m = clipped(rho)?;
    let u = MagicBasis::new().u_magic;
    let magic = u * m * u.adjoint();
    let root = linalg::sqrt_psd(&magic);
    let inner = root * magic.map(|z| z.conj()) * root;
    let r = linalg::sqrt_psd(&inner);
    let vals = linalg::hermitian_eigenvalues(&r);
    Ok(sorted_desc([vals[0], vals[1], vals[2], vals[3]]))
}

/// `H(x) = -x log₂ x - (1-x) log₂(1-x)`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `E = H(1/2 + √(1 - C²)/2)`.
pub fn eof_from_concurrence(concurrence: f64) -> f64 {
    let cc = concurrence.clamp(0.0, 1.0);
    binary_entropy(0.5 + 0.5 * (1.0 - cc * cc).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub lambdas: [f64; 4],
    pub concurrence: f64,
    pub eof: f64,
}

pub fn analyze(rho: &DensityMatrix) -> Result<EntanglementReport> {
    let lambdas = wootters_lambdas(rho)?;
    let concurrence = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0);
    Ok(EntanglementReport {
        lambdas,
        concurrence,
        eof: eof_from_concurrence(concurrence),
    })
}

pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    analyze(rho).map(|r| r.concurrence)
}

pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    analyze(rho).map(|r| r.eof)
}

/// Named initial states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StandardState {
    E1,
    E2,
    E3,
    E4,
    /// `|00⟩⟨00|`
    Ground,
    /// `I/4`
    Mixed,
    /// `λ|e4⟩⟨e4| + (1-λ)I/4`
    Werner(f64),
}

impl FromStr for StandardState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e1" => Ok(Self::E1),
            "e2" => Ok(Self::E2),
            "e3" => Ok(Self::E3),
            "e4" | "singlet" => Ok(Self::E4),
            "ground" => Ok(Self::Ground),
            "mixed" => Ok(Self::Mixed),
            other => {
                if let Some(arg) = other
                    .strip_prefix("werner(")
                    .and_then(|r| r.strip_suffix(')'))
                {
                    let lambda = arg
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad werner parameter '{arg}'")))?;
                    Ok(Self::Werner(lambda))
                } else {
                    Err(Error::Config(format!("unknown state '{other}'")))
                }
            }
        }
    }
}

impl std::fmt::Display for StandardState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::E1 => write!(f, "e1"),
            Self::E2 => write!(f, "e2"),
            Self::E3 => write!(f, "e3"),
            Self::E4 => write!(f, "e4"),
            Self::Ground => write!(f, "ground"),
            Self::Mixed => write!(f, "mixed"),
            Self::Werner(l) => write!(f, "werner({l:?})"),
        }
    }
}

pub fn standard_state(name: StandardState) -> Result<DensityMatrix> {
    let basis = MagicBasis::new();
    let projector = |i: usize| DensityMatrix::pure(&basis.vector(i));
    Ok(match name {
        StandardState::E1 => projector(0),
        StandardState::E2 => projector(1),
        StandardState::E3 => projector(2),
        StandardState::E4 => projector(3),
        StandardState::Ground => {
            let mut m = CMat4::zeros();
            m[(0, 0)] = c(1.0, 0.0);
            DensityMatrix::from_matrix_unchecked(m)
        }
        StandardState::Mixed => {
            DensityMatrix::from_matrix_unchecked(CMat4::identity() * c(0.25, 0.0))
        }
        StandardState::Werner(lambda) => {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::Domain(format!(
                    "werner lambda must be in [0, 1], got {lambda}"
                )));
            }
            let singlet = projector(3).into_matrix();
            let m = singlet * c(lambda, 0.0) + CMat4::identity() * c((1.0 - lambda) / 4.0, 0.0);
            DensityMatrix::from_matrix_unchecked(m)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(s: StandardState) -> DensityMatrix {
        standard_state(s).unwrap()
    }

    #[test]
    fn magic_basis_unitary() {
        let u = MagicBasis::new().u_magic;
        assert!(linalg::max_abs(&(u * u.adjoint() - CMat4::identity())) < 1e-14);
    }

    #[test]
    fn magic_basis_rows() {
        let b = MagicBasis::new();
        let h = FRAC_1_SQRT_2;
        let e2 = b.vector(1);
        assert_eq!(e2[0], c(0.0, -h));
        assert_eq!(e2[3], c(0.0, h));
        let e3 = b.vector(2);
        assert_eq!(e3[1], c(0.0, h));
        assert_eq!(e3[2], c(0.0, h));
        let e4 = b.vector(3);
        assert_eq!((e4[1], e4[2]), (c(h, 0.0), c(-h, 0.0)));
    }

    #[test]
    fn e3_is_diagonal_in_magic_basis() {
        let m = to_magic_basis(&state(StandardState::E3));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (2, 2) { 1.0 } else { 0.0 };
                assert!((m.get(i, j) - c(expect, 0.0)).norm() < 1e-15);
            }
        }
        // (|X0⟩+|0X⟩)(⟨X0|+⟨0X|)/2
        let e3 = state(StandardState::E3);
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((e3.get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn mixed_state_invariant_and_round_trip() {
        let mixed = state(StandardState::Mixed);
        assert!(to_magic_basis(&mixed).linf_distance(&mixed) < 1e-15);
        let w = state(StandardState::Werner(0.3));
        let back = from_magic_basis(&to_magic_basis(&w));
        assert!(back.linf_distance(&w) < 1e-14);
    }

    #[test]
    fn simple_concurrences() {
        assert!((concurrence(&state(StandardState::E4)).unwrap() - 1.0).abs() < 1e-12);
        assert!(concurrence(&state(StandardState::Ground)).unwrap().abs() < 1e-12);
        let diag = DensityMatrix::from_matrix_unchecked(CMat4::from_diagonal(&Vector4::new(
            c(1.0 / 3.0, 0.0),
            c(1.0 / 3.0, 0.0),
            c(1.0 / 3.0, 0.0),
            c(0.0, 0.0),
        )));
        let attractor = from_magic_basis(&diag);
        let report = analyze(&attractor).unwrap();
        for (l, e) in report
            .lambdas
            .iter()
            .zip([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0])
        {
            assert!((l - e).abs() < 1e-7, "{:?}", report.lambdas);
        }
        assert_eq!(report.concurrence, 0.0);
        assert_eq!(report.eof, 0.0);
    }

    #[test]
    fn eof_values() {
        assert!((eof_from_concurrence(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(eof_from_concurrence(0.0), 0.0);
        assert!((eof_from_concurrence(0.6) - 0.4690).abs() < 1e-4);
    }

    #[test]
    fn werner_edges() {
        assert!(
            state(StandardState::Werner(0.0)).linf_distance(&state(StandardState::Mixed)) < 1e-15
        );
        assert!(state(StandardState::Werner(1.0)).linf_distance(&state(StandardState::E4)) < 1e-15);
        assert!(standard_state(StandardState::Werner(1.5)).is_err());
    }

    #[test]
    fn negative_state_rejected() {
        let m = CMat4::from_diagonal(&Vector4::new(
            c(1.1, 0.0),
            c(-0.1, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ));
        let rho = DensityMatrix::from_matrix_unchecked(m);
        assert!(matches!(concurrence(&rho), Err(Error::InvalidState(_))));
    }

    #[test]
    fn parse_names() {
        assert_eq!("e3".parse::<StandardState>().unwrap(), StandardState::E3);
        assert_eq!(
            "werner(0.625)".parse::<StandardState>().unwrap(),
            StandardState::Werner(0.625)
        );
        assert!("bogus".parse::<StandardState>().is_err());
        let w = StandardState::Werner(0.625);
        assert_eq!(w.to_string().parse::<StandardState>().unwrap(), w);
    }
}
