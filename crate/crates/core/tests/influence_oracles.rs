mod common;

use num_complex::Complex64;
use qd_quapi::influence::{bath_correlation, eta_between, memory_kernel, reorganization_energy};
use qd_quapi::BathSpec;

use common::{correlation_trapezoid, gauss_legendre};

const ALPHA: f64 = 0.027;
const OMEGA_C: f64 = 2.2;

fn bath(t: f64) -> BathSpec {
    BathSpec::new(ALPHA, OMEGA_C, t).unwrap()
}

#[test]
fn correlation_matches_trapezoid() {
    for temperature in [4.0, 77.0, 300.0] {
        for t in [0.0, 0.1, 0.5, 1.3, 4.0] {
            let got = bath_correlation(&bath(temperature), t).unwrap();
            let want = correlation_trapezoid(ALPHA, OMEGA_C, temperature, t, 200_000);
            assert!(
                (got - want).norm() < 1e-8,
                "T={temperature} t={t}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn correlation_is_hermitian_in_time() {
    let b = bath(77.0);
    for t in [0.2, 0.9, 2.5] {
        let plus = bath_correlation(&b, t).unwrap();
        let minus = bath_correlation(&b, -t).unwrap();
        assert!((plus - minus.conj()).norm() < 1e-12);
    }
}

/// η from Gauss-Legendre double integrals of the trapezoid correlation
/// function over the two time windows.
fn eta_oracle(temperature: f64, dt: f64, delta: usize) -> Complex64 {
    let nodes = gauss_legendre(24);
    let corr = |tau: f64| correlation_trapezoid(ALPHA, OMEGA_C, temperature, tau, 60_000);
    let mut sum = Complex64::new(0.0, 0.0);
    if delta == 0 {
        // triangle t' < t inside one window: substitute t' = t·(1+v)/2
        for &(u, wu) in &nodes {
            let t = 0.5 * dt * (1.0 + u);
            for &(v, wv) in &nodes {
                let tp = 0.5 * t * (1.0 + v);
                sum += wu * wv * 0.5 * dt * 0.5 * t * corr(t - tp);
            }
        }
    } else {
        for &(u, wu) in &nodes {
            let t = delta as f64 * dt + 0.5 * dt * (1.0 + u);
            for &(v, wv) in &nodes {
                let tp = 0.5 * dt * (1.0 + v);
                sum += wu * wv * 0.25 * dt * dt * corr(t - tp);
            }
        }
    }
    sum
}

#[test]
fn eta_matches_double_time_integral() {
    for (temperature, dt) in [(77.0, 0.25), (300.0, 0.5)] {
        let kernel = memory_kernel(&bath(temperature), dt, 2).unwrap();
        for delta in 0..=2 {
            let want = eta_oracle(temperature, dt, delta);
            let got = kernel.eta(delta);
            assert!(
                (got - want).norm() < 1e-7,
                "T={temperature} dt={dt} delta={delta}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn eta_depends_only_on_separation() {
    let b = bath(77.0);
    let kernel = memory_kernel(&b, 0.25, 4).unwrap();
    for (k, kp) in [(2, 1), (5, 4), (6, 3), (9, 5)] {
        let got = eta_between(&b, 0.25, k, kp).unwrap();
        assert!((got - kernel.eta(k - kp)).norm() < 1e-12);
    }
}

#[test]
fn eta_sum_builds_the_cumulant() {
    // Over a span of n windows the η table tiles ∫₀ᵗ∫₀^{t₁} C, whose
    // closed form is (1/π)∫ J/ω² [coth(1 − cos ωt) + i(sin ωt − ωt)].
    let b = bath(77.0);
    let dt = 0.25;
    let n = 4;
    let kernel = memory_kernel(&b, dt, n).unwrap();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        sum += kernel.eta(0);
        for d in 1..k {
            sum += kernel.eta(d);
        }
    }
    let t = n as f64 * dt;
    let beta = 1.0 / (common::KB_OVER_HBAR * 77.0);
    let points = 400_000;
    let h = 10.0 * OMEGA_C / points as f64;
    let mut want = Complex64::new(0.0, 0.0);
    for i in 1..=points {
        let w = i as f64 * h;
        let g = ALPHA * w * (-(w / OMEGA_C).powi(2)).exp();
        let coth = 1.0 / (0.5 * beta * w).tanh();
        want += g * Complex64::new(coth * (1.0 - (w * t).cos()), (w * t).sin() - w * t);
    }
    want *= h / std::f64::consts::PI;
    assert!((sum - want).norm() < 1e-9, "{sum} vs {want}");
}

#[test]
fn full_memory_sum_is_the_polaron_shift() {
    // Σ_{Δ≥0} η_Δ = -iλΔt: no net decay per step, phase at the
    // reorganization energy.
    let b = bath(77.0);
    let dt = 0.25;
    let kernel = memory_kernel(&b, dt, 60).unwrap();
    let sum: Complex64 = (0..=60).map(|d| kernel.eta(d)).sum();
    let lambda = ALPHA * OMEGA_C.powi(3) / (4.0 * std::f64::consts::PI.sqrt());
    assert!(sum.re.abs() < 1e-9, "{sum}");
    assert!((sum.im + lambda * dt).abs() < 1e-9, "{sum}");
}

#[test]
fn reorganization_energy_closed_form() {
    let b = bath(77.0);
    let want = ALPHA * OMEGA_C.powi(3) / (4.0 * std::f64::consts::PI.sqrt());
    assert!((reorganization_energy(&b).unwrap() - want).abs() < 1e-12);
}
