//! Numerically exact reduced dynamics of two dipole-coupled quantum dots
//! sharing an acoustic-phonon bath, by quasi-adiabatic propagator path
//! integration, with concurrence and entanglement-of-formation analysis.

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod influence;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod units;

pub use error::{Error, Result};
pub use influence::{bath_correlation, memory_kernel, reorganization_energy, MemoryKernel};
pub use model::{
    build_hamiltonian, dipole_coupling, material_to_bath, rabi_from_field, spectral_density,
    BathSpec, DotGeometry, HamiltonianParts, MaterialSpec, SystemParams,
};
pub use propagator::{
    contract_step, free_propagator, propagate, propagate_with, AugmentedTensor, DensityMatrix,
    OmegaPhase, PropagationOptions, Record, SimGrid, Trajectory,
};
