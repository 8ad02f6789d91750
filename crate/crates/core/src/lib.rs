//! Ground states, two-site entanglement, and Berry phases for small spin
//! chains.
//!
//! The crate covers three systems: a driven two-spin toy model solved in
//! closed form, the transverse-field XY chain (free-fermion mode sums and
//! exact diagonalization), and the spin-1/2 Heisenberg antiferromagnet.
//! Each exposes a geometric phase accumulated around a closed rotation of
//! the in-plane exchange, together with the nearest-neighbour concurrence
//! the phase encodes.

pub mod afm;
pub mod berry_loop;
pub mod eigensolve;
pub mod entangle;
pub mod free_fermion;
pub mod quad;
pub mod spin_model;
pub mod toy_two_spin;

pub use num_complex::Complex64;
