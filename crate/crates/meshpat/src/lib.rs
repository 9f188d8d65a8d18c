//! Mesh pattern toolkit: containment and avoidance engines, point-insertion
//! operators, coincidence proving via shading lemmas and a recursive shading
//! algorithm, experimental classification, and force-based enumeration
//! utilities.
//!
//! A mesh pattern is a classical permutation pattern together with a set of
//! shaded grid squares that must map onto empty regions of the host. The
//! text form `word:mesh-int` encodes the shading as an integer whose bit `i`
//! covers the square `(i / (k+1), i mod (k+1))`, so
//! `21:56` is the inversion pattern with its middle column shaded.

pub mod classify;
pub mod enumerate;
pub mod error;
pub mod force;
pub mod insertion;
pub mod mesh;
pub mod occurrence;
pub mod perm;
pub mod prover;

pub use error::{Error, Result};
pub use force::{Force, ForcedPattern};
pub use insertion::Direction;
pub use mesh::{MeshPattern, Shading, Square, Symmetry};
pub use occurrence::{Fingerprint, Occurrence};
pub use perm::Permutation;
pub use prover::{Method, ProofResult, Verdict};
