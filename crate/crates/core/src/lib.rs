//! Lattice QED in Coulomb gauge as explicit qubit operators.
//!
//! The crate builds the five pieces of the lattice Hamiltonian (electric,
//! magnetic, current coupling, instantaneous Coulomb and Wilson fermion
//! terms) on a register made of Jordan-Wigner fermion qubits followed by
//! truncated field-basis gauge registers, evaluates the qubit and Trotter
//! cost bounds, and checks the structural properties of the construction by
//! exact numerics on lattices small enough to hold a state vector.
//!
//! Module map:
//!
//! * [`lattice`]: geometry, momenta, lattice kernels and the snake path.
//! * [`gauge`]: truncated field grids, field and conjugate operators.
//! * [`fermion`]: Pauli strings, Jordan-Wigner images, Weyl gamma matrices.
//! * [`hamiltonian`]: assembly of every piece in position and momentum space.
//! * [`resources`]: truncation bounds, qubit counts, Trotter step counts.
//! * [`trotter`]: the commuting-piece partition and state-vector evolution.
//! * [`circuit`]: abstract circuit emission above gate synthesis.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod fermion;
pub mod gauge;
pub mod hamiltonian;
pub mod lattice;
pub mod layout;
pub mod linalg;
pub mod resources;
pub mod trotter;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Largest Hilbert-space dimension for which explicit sparse matrices,
/// exact evolution and numeric commutator norms are supported.
pub const MAX_EXPLICIT_DIM: usize = 1 << 14;

/// Largest dimension that is ever converted to a dense matrix.
pub const MAX_DENSE_DIM: usize = 1 << 12;
