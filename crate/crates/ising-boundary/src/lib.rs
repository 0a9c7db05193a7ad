//! Exact solver for 2D Ising models on cylinders via the Grassmann/Pfaffian
//! formalism: Kasteleyn action matrices, boundary spin correlations, half-plane
//! propagators with multiscale decompositions, and the first-order boundary
//! renormalization constants, all cross-checked against brute-force oracles.

pub mod cli;
pub mod correlations;
pub mod error;
pub mod kasteleyn;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod perturbation;
pub mod pfaffian;
pub mod propagators;
pub mod quadrature;
pub mod scaling;

pub use error::IsingError;
pub use lattice::{BoundaryTuple, LatticeSpec, Side, Tau};
pub use pfaffian::SignedLogValue;
