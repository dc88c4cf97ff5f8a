//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's numerics.

#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

pub type CMat4 = Matrix4<Complex64>;

pub const KB_OVER_HBAR: f64 = 1.380_649e-23 / 1.054_571_817e-34 * 1e-12;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Bath correlation function by a plain trapezoid rule on a fine grid.
pub fn correlation_trapezoid(
    alpha: f64,
    omega_c: f64,
    temperature: f64,
    t: f64,
    points: usize,
) -> Complex64 {
    let beta = 1.0 / (KB_OVER_HBAR * temperature);
    let wmax = 10.0 * omega_c;
    let h = wmax / points as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 1..=points {
        let w = i as f64 * h;
        let j = alpha * w.powi(3) * (-(w / omega_c).powi(2)).exp();
        let coth = 1.0 / (0.5 * beta * w).tanh();
        let weight = if i == points { 0.5 } else { 1.0 };
        sum += weight * j * Complex64::new(coth * (w * t).cos(), -(w * t).sin());
    }
    sum * h / std::f64::consts::PI
}

/// Dense `exp(A)` by scaling and squaring of a Taylor series.
pub fn expm(a: &CMat4) -> CMat4 {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = CMat4::identity();
    let mut sum = CMat4::identity();
    for k in 1..30 {
        term = term * scaled / Complex64::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Bare Hamiltonian in the (00, X0, 0X, XX) basis.
pub fn hamiltonian(delta1: f64, delta2: f64, k1: f64, k2: f64, j: f64) -> CMat4 {
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut h = CMat4::zeros();
    h[(1, 1)] = r(delta1);
    h[(2, 2)] = r(delta2);
    h[(3, 3)] = r(delta1 + delta2);
    for (a, b, k) in [(0, 1, k1), (0, 2, k2), (1, 3, k2), (2, 3, k1)] {
        h[(a, b)] = r(0.5 * k);
        h[(b, a)] = r(0.5 * k);
    }
    h[(1, 2)] = r(j);
    h[(2, 1)] = r(j);
    h
}

pub fn linf(a: &CMat4, b: &CMat4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Random normalized pure state with box-uniform components (not Haar).
pub fn random_state<R: rand::Rng>(rng: &mut R) -> Vector4<Complex64> {
    let v =
        Vector4::from_fn(|_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    v / Complex64::new(v.norm(), 0.0)
}

/// Random mixed state `A A† / tr(A A†)`.
pub fn random_density<R: rand::Rng>(rng: &mut R) -> CMat4 {
    let a =
        CMat4::from_fn(|_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = a * a.adjoint();
    let tr = m.trace();
    m / tr
}

pub fn random_unitary2<R: rand::Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let (a, b, c, d): (f64, f64, f64, f64) = (
        rng.gen_range(0.0..6.3),
        rng.gen_range(0.0..6.3),
        rng.gen_range(0.0..6.3),
        rng.gen_range(0.0..1.6),
    );
    let e = |x: f64| Complex64::from_polar(1.0, x);
    Matrix2::new(
        e(a) * d.cos(),
        e(b) * d.sin(),
        -e(-b) * d.sin(),
        e(-a) * d.cos(),
    ) * e(c)
}

/// `A ⊗ B` in the (00, X0, 0X, XX) ordering, where the first label is dot A.
pub fn local(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> CMat4 {
    CMat4::from_fn(|i, j| a[(i % 2, j % 2)] * b[(i / 2, j / 2)])
}

pub fn entropy_of_first_dot(psi: &Vector4<Complex64>) -> f64 {
    let rho = psi * psi.adjoint();
    let reduced = Matrix2::from_fn(|i, j| rho[(i, j)] + rho[(i + 2, j + 2)]);
    let ev = reduced.symmetric_eigenvalues();
    ev.iter()
        .map(|&p| if p > 1e-15 { -p * p.log2() } else { 0.0 })
        .sum()
}
