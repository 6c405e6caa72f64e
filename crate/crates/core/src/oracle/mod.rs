//! Brute-force reference for small chains.
//!
//! Everything here is built from dense matrices: the spin Hamiltonian, the
//! Lindblad operators (either from their closed form in the Fock basis or from
//! a numerical eigendecomposition in the spin basis), the vectorized generator
//! and its null space. None of it reuses the product-form stationary state.

pub mod lindblad;
pub mod liouvillian;
pub mod observables;
pub mod operators;

pub use lindblad::{
    build_lindblad_set, dissipator_apply, dissipator_apply_bath, spectral_lindblad_set, Bath,
    LindbladSet,
};
pub use liouvillian::{
    apply_generator, kernel_report, kernel_state, KernelReport, SUPEROPERATOR_LIMIT,
};
pub use observables::{
    expectation, fock_state, fock_to_tensor, gibbs_dense, partial_trace_pair, spin_observable,
    to_tensor, SpinObservable,
};
