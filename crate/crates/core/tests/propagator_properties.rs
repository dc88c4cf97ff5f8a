mod common;

use nalgebra::Vector4;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qd_quapi::entanglement::{standard_state, StandardState};
use qd_quapi::{
    build_hamiltonian, memory_kernel, propagate, propagate_with, BathSpec, DensityMatrix,
    OmegaPhase, PropagationOptions, SimGrid, SystemParams,
};

use common::{expm, hamiltonian, linf, CMat4};

fn unitary_reference(h: &CMat4, rho0: &CMat4, t: f64) -> CMat4 {
    let u = expm(&(h * Complex64::new(0.0, -t)));
    u * rho0 * u.adjoint()
}

#[test]
fn zero_coupling_is_unitary() {
    let mut rng = StdRng::seed_from_u64(11);
    let bath = BathSpec::new(0.0, 2.2, 77.0).unwrap();
    for _ in 0..5 {
        let (d1, d2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (k1, k2, j) = (
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
        );
        let params = SystemParams::new(d1, d2, k1, k2, j).unwrap();
        let rho0 = common::random_density(&mut rng);
        let rho = DensityMatrix::new(rho0).unwrap();
        let dt = 0.05;
        let grid = SimGrid::new(dt, 200, 2).unwrap();
        let kernel = memory_kernel(&bath, dt, 2).unwrap();
        let traj = propagate(&rho, &build_hamiltonian(&params), &kernel, &grid).unwrap();
        let h = hamiltonian(d1, d2, k1, k2, j);
        for rec in traj.records.iter().step_by(20) {
            let want = unitary_reference(&h, &rho0, rec.t);
            assert!(linf(rec.rho.matrix(), &want) < 1e-9);
        }
    }
}

#[test]
fn split_phase_is_first_order() {
    let params = SystemParams::new(0.3, -0.2, 0.48, 0.48, 0.6).unwrap();
    let bath = BathSpec::new(0.0, 2.2, 77.0).unwrap();
    let rho0 = standard_state(StandardState::E1).unwrap();
    let h = hamiltonian(0.3, -0.2, 0.48, 0.48, 0.6);
    let error = |dt: f64| {
        let n = (5.0 / dt).round() as usize;
        let grid = SimGrid::new(dt, n, 1).unwrap();
        let kernel = memory_kernel(&bath, dt, 1).unwrap();
        let options = PropagationOptions {
            stride: n,
            phase: OmegaPhase::Split,
        };
        let traj =
            propagate_with(&rho0, &build_hamiltonian(&params), &kernel, &grid, &options).unwrap();
        let rec = traj.last().unwrap();
        linf(
            rec.rho.matrix(),
            &unitary_reference(&h, rho0.matrix(), rec.t),
        )
    };
    let (coarse, fine) = (error(0.05), error(0.025));
    assert!(coarse > 1e-6);
    let ratio = coarse / fine;
    assert!((1.6..2.5).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn pure_dephasing_matches_independent_boson_cumulant() {
    // With no drive and no transfer the path sum is exact while t ≤ kmax·Δt.
    let bath = BathSpec::gaas_fit(77.0);
    let params = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let dt = 0.25;
    let kmax = 5;
    let psi = Vector4::new(1.0, 1.0, 0.0, 0.0).map(|x| Complex64::new(x / 2f64.sqrt(), 0.0));
    let rho0 = DensityMatrix::pure(&psi);
    let kernel = memory_kernel(&bath, dt, kmax).unwrap();
    let grid = SimGrid::new(dt, kmax, kmax).unwrap();
    let traj = propagate(&rho0, &build_hamiltonian(&params), &kernel, &grid).unwrap();

    let beta = bath.beta();
    let points = 400_000;
    let h = 10.0 * bath.omega_c / points as f64;
    for rec in &traj.records[1..] {
        let t = rec.t;
        let mut g = Complex64::new(0.0, 0.0);
        for i in 1..=points {
            let w = i as f64 * h;
            let jw2 = bath.alpha * w * (-(w / bath.omega_c).powi(2)).exp();
            let coth = 1.0 / (0.5 * beta * w).tanh();
            g += jw2 * Complex64::new(coth * (1.0 - (w * t).cos()), (w * t).sin() - w * t);
        }
        g *= h / std::f64::consts::PI;
        // ρ_{X0,00} = ρ_{X0,00}(0)·e^{-g(t)}
        let want = 0.5 * (-g).exp();
        assert!((rec.rho.get(1, 0) - want).norm() < 1e-10, "t={t}");
        assert!((rec.rho.get(0, 0).re - 0.5).abs() < 1e-12);
    }
}

#[test]
fn truncated_memory_gives_steady_per_step_factor() {
    // Past the memory time every step multiplies ρ_{X0,00} by the same
    // factor, exp(-Σ_{Δ=0}^{kmax} η_Δ).
    let bath = BathSpec::gaas_fit(77.0);
    let params = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let (dt, kmax) = (0.25, 5);
    let psi = Vector4::new(1.0, 1.0, 0.0, 0.0).map(|x| Complex64::new(x / 2f64.sqrt(), 0.0));
    let kernel = memory_kernel(&bath, dt, kmax).unwrap();
    let grid = SimGrid::new(dt, 40, kmax).unwrap();
    let traj = propagate(
        &DensityMatrix::pure(&psi),
        &build_hamiltonian(&params),
        &kernel,
        &grid,
    )
    .unwrap();
    let factor = (-(0..=kmax).map(|d| kernel.eta(d)).sum::<Complex64>()).exp();
    for pair in traj.records[kmax + 1..].windows(2) {
        let ratio = pair[1].rho.get(1, 0) / pair[0].rho.get(1, 0);
        assert!((ratio - factor).norm() < 1e-10, "t={}", pair[1].t);
    }
}

#[test]
fn occupancy_sectors_are_conserved_without_drive() {
    let bath = BathSpec::new(0.1, 2.2, 150.0).unwrap();
    let params = SystemParams::new(0.2, -0.1, 0.0, 0.0, 0.6).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let rho0 = DensityMatrix::new(common::random_density(&mut rng)).unwrap();
    let kernel = memory_kernel(&bath, 0.25, 3).unwrap();
    let grid = SimGrid::new(0.25, 200, 3).unwrap();
    let traj = propagate(&rho0, &build_hamiltonian(&params), &kernel, &grid).unwrap();
    let sectors = |r: &DensityMatrix| {
        [
            r.get(0, 0).re,
            r.get(1, 1).re + r.get(2, 2).re,
            r.get(3, 3).re,
        ]
    };
    let start = sectors(&rho0);
    for rec in &traj.records {
        let now = sectors(&rec.rho);
        for k in 0..3 {
            assert!((now[k] - start[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn hermiticity_trace_and_positivity_hold() {
    let bath = BathSpec::gaas_fit(300.0);
    let params = SystemParams::new(0.1, 0.0, 0.4766, 0.4766, 0.5963).unwrap();
    let rho0 = standard_state(StandardState::E1).unwrap();
    let kernel = memory_kernel(&bath, 0.25, 4).unwrap();
    let grid = SimGrid::new(0.25, 400, 4).unwrap();
    let traj = propagate(&rho0, &build_hamiltonian(&params), &kernel, &grid).unwrap();
    for rec in &traj.records {
        assert!(rec.rho.hermiticity_error() < 1e-12);
        assert!(rec.trace_error < 1e-9);
        assert!(rec.rho.min_eigenvalue() > -1e-8);
    }
}

#[test]
fn propagation_is_deterministic() {
    let bath = BathSpec::gaas_fit(77.0);
    let params = SystemParams::new(0.0, 0.0, 0.4766, 0.4766, 0.5963).unwrap();
    let rho0 = standard_state(StandardState::E3).unwrap();
    let kernel = memory_kernel(&bath, 0.25, 3).unwrap();
    let grid = SimGrid::new(0.25, 100, 3).unwrap();
    let h = build_hamiltonian(&params);
    let a = propagate(&rho0, &h, &kernel, &grid).unwrap();
    let b = propagate(&rho0, &h, &kernel, &grid).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mismatched_kernel_is_rejected() {
    let bath = BathSpec::gaas_fit(77.0);
    let params = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.6).unwrap();
    let rho0 = standard_state(StandardState::E3).unwrap();
    let kernel = memory_kernel(&bath, 0.25, 3).unwrap();
    let h = build_hamiltonian(&params);
    assert!(propagate(&rho0, &h, &kernel, &SimGrid::new(0.25, 10, 4).unwrap()).is_err());
    assert!(propagate(&rho0, &h, &kernel, &SimGrid::new(0.2, 10, 3).unwrap()).is_err());
}
