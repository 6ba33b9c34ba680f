//! Low-depth fermion routing and encoding-transform compiler.
//!
//! * [`routing`] compiles any mode permutation under Jordan-Wigner into a
//!   circuit of depth `O(log² N)` built from staircases of fermionic swaps.
//! * [`transform`] synthesizes CNOT/S circuits between product-preserving
//!   ternary-tree encodings.
//! * [`pauli`] and [`oracle`] verify both, symbolically at scale and densely
//!   for small `N`.
//!
//! Qubit and mode 0 is the most significant bit of a basis index.

pub mod circuit;
pub mod metering;
pub mod oracle;
pub mod pauli;
pub mod random;
pub mod routing;
pub mod transform;
pub mod tree;
pub mod trotter;
pub mod verify;

pub use circuit::{Circuit, CircuitError, Gate};
pub use pauli::{ModeOperator, Pauli, PauliBatch, PauliString, Phase};
pub use routing::{
    decompose_staircase, synthesize_permutation, Permutation, PermutationPlan,
    StaircasePermutation,
};
pub use transform::{transform_between, HeavyPathInfo};
pub use tree::{StandardKind, TernaryTree};
pub use trotter::{Hamiltonian, HamiltonianTerm, TrotterPlan};
