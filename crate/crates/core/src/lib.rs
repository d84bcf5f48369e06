//! Few-fermion tunneling dynamics in the one-dimensional Fermi-Hubbard model
//! with asymmetric two-site barriers.
//!
//! The crate builds sector Hamiltonians on a fermionic occupation basis,
//! propagates states with dense, Krylov or Taylor propagators, and measures
//! site densities along the way. [`verification`] holds executable checks of
//! the tunneling-symmetry results and [`scenarios`] drives the preset
//! experiments behind the `fhtunnel` command-line tool.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod observables;
pub mod scenarios;
pub mod states;
pub mod verification;

pub use basis::{FockConfig, Mask, ProductBasis, Spin, SpinSectorBasis};
pub use error::{Error, Result};
pub use evolution::{Method, PropagatorConfig, Trajectory};
pub use hamiltonian::{BarrierOrientation, HubbardParams, SparseHamiltonian};
pub use observables::ObservableSpec;
pub use states::StateVector;
