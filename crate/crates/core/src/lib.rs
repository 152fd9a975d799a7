//! Classical simulation of qubit-encoded molecular vibrations.
//!
//! The crate covers the whole pipeline: Pauli algebra ([`pauli`]), boson to
//! qubit encodings ([`encoding`]), quartic force fields ([`forcefield`]),
//! vibrational Hamiltonians and exact spectra ([`hamiltonian`]), a dense
//! state-vector engine ([`statevector`]), VSCF ([`vscf`]), UVCC ansatz and VQE
//! ([`uvcc`]), Franck-Condon factors through the Doktorov unitary
//! ([`doktorov`]), Trotterized dynamics ([`dynamics`]) and file formats
//! ([`io`]).
//!
//! Everything is in atomic units with hbar = 1.

pub mod doktorov;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod forcefield;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod pauli;
pub mod statevector;
pub mod uvcc;
pub mod vscf;

pub use encoding::{BosonPolynomial, EncodingScheme, LadderKind, LadderOp, SchemeKind};
pub use error::{Result, VibError};
pub use forcefield::ForceField;
pub use hamiltonian::{build_qubit_hamiltonian, exact_spectrum, HamiltonianOptions, ModeBasis, VibHamiltonian};
pub use pauli::{Pauli, PauliString, PauliSum, PauliTerm};
pub use statevector::StateVector;
