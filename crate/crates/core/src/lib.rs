//! Linear maps describing the reduced dynamics of a quantum system that starts
//! out entangled with another one.
//!
//! Such maps preserve Hermiticity and trace but are in general not completely
//! positive. Every one of them still has an operator-sum form
//! `Q' = Σ C Q C† − Σ C Q C†`, a difference of two completely positive maps.
//!
//! Modules:
//!
//! * [`matlin`]: dense complex matrices, Kronecker products, partial traces and
//!   a cyclic Jacobi eigensolver for Hermitian matrices.
//! * [`hermmap`]: maps stored as their B-matrix, signed Kraus decomposition,
//!   complete positivity and trace preservation tests.
//! * [`twoqubit`]: the two-qubit example driven by `H = ½ω Σ₃Ξ₁`, with closed-form
//!   eigensystem, Kraus operators, small-time series and witnesses.
//! * [`domains`]: compatibility and positivity domains of the two-qubit map.
//! * [`reduced`]: operator bases, transfer matrices and the affine reduced map
//!   for arbitrary `N ⊗ M` Hamiltonians.
//! * [`pechukas`]: checks for linear assignments `ρ_A → ρ_AB`.
//! * [`cli`]: the command implementations behind the `ncpmap` binary.

pub mod cli;
pub mod domains;
pub mod error;
pub mod hermmap;
pub mod matlin;
pub mod pechukas;
pub mod reduced;
pub mod testing;
pub mod twoqubit;

pub use error::{Error, Result};
pub use hermmap::{MatrixMap, SignedKraus};
pub use matlin::{ComplexMatrix, EigenSystem, HermitianOperator};
pub use twoqubit::{BlochVector, CorrelationParams};
