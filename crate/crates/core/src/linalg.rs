//! Small dense helpers for 4×4 matrices.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub type CMat4 = Matrix4<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &Matrix4<f64>) -> CMat4 {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn is_finite(m: &CMat4) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
/// A non-finite input yields NaN throughout (the iterative solver would
/// not terminate on it).
pub fn hermitian_eigen(m: &CMat4) -> (Vector4<f64>, CMat4) {
    if !is_finite(m) {
        return (
            Vector4::repeat(f64::NAN),
            CMat4::repeat(c(f64::NAN, f64::NAN)),
        );
    }
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = Vector4::zeros();
    let mut vecs = CMat4::zeros();
    for (k, &i) in idx.iter().enumerate() {
        vals[k] = eig.eigenvalues[i];
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn hermitian_eigenvalues(m: &CMat4) -> Vector4<f64> {
    hermitian_eigen(m).0
}

/// `exp(-i t H)` for a real symmetric `H`, by diagonalization.
pub fn expm_i_symmetric(h: &Matrix4<f64>, t: f64) -> CMat4 {
    let eig = h.symmetric_eigen();
    let v = to_complex(&eig.eigenvectors);
    let phases = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| (-I * l * t).exp()));
    v * phases * v.adjoint()
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Negative eigenvalues are clipped to zero.
pub fn sqrt_psd(m: &CMat4) -> CMat4 {
    if !is_finite(m) {
        return CMat4::repeat(c(f64::NAN, f64::NAN));
    }
    let (vals, vecs) = hermitian_eigen(m);
    let d = Matrix4::from_diagonal(&vals.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    vecs * d * vecs.adjoint()
}

/// Eigenvalues of a general complex matrix, via the complex Schur form.
pub fn general_eigenvalues(m: &CMat4) -> Vector4<Complex64> {
    if !is_finite(m) {
        return Vector4::repeat(c(f64::NAN, f64::NAN));
    }
    m.schur()
        .eigenvalues()
        .expect("complex Schur form is always triangular")
}

pub fn max_abs(m: &CMat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMat4) -> Complex64 {
    (0..4).map(|i| m[(i, i)]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_taylor() {
        let h = Matrix4::new(
            0.3, 0.1, -0.2, 0.0, 0.1, -0.5, 0.4, 0.2, -0.2, 0.4, 0.1, 0.3, 0.0, 0.2, 0.3, 0.7,
        );
        let t = 0.37;
        let u = expm_i_symmetric(&h, t);
        let a = to_complex(&h) * (-I * t);
        let mut term = CMat4::identity();
        let mut sum = CMat4::identity();
        for k in 1..40 {
            term = term * a / Complex64::new(k as f64, 0.0);
            sum += term;
        }
        assert!(max_abs(&(u - sum)) < 1e-14);
    }

    #[test]
    fn general_eigenvalues_of_triangular() {
        let mut m = CMat4::zeros();
        for i in 0..4 {
            m[(i, i)] = c(i as f64, 1.0);
            if i < 3 {
                m[(i, i + 1)] = c(0.5, -0.2);
            }
        }
        let mut ev: Vec<_> = general_eigenvalues(&m).iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (i, v) in ev.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-12);
        }
    }
}
