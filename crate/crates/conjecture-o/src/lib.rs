//! Quantum multiplication by the first Chern class on the quantum cohomology
//! of a homogeneous space `G/P`, in the Schubert basis, together with the
//! Perron-Frobenius spectral analysis that machine-verifies Conjecture O
//! on concrete instances.
//!
//! The pipeline, bottom to top:
//!
//! * [`roots`] - exact root-system ground data (Cartan matrices, positive
//!   roots, coroots, pairings, parabolic subdata);
//! * [`weyl`] - Weyl group elements and the ordered basis `W^P` of minimal
//!   coset representatives;
//! * [`quantum`] - Chern numbers, quantum Chevalley products, and the
//!   nonnegative integer operator matrix `M(X)` at `q = 1`;
//! * [`spectral`] - digraph encoding, irreducibility, imprimitivity,
//!   superdiagonal block certificates, Perron data, and full spectra in
//!   numeric and exact modes;
//! * [`verify`] - the Conjecture O verdict with per-lemma witnesses;
//! * [`config`] - batch suites, exports, and persistence used by the
//!   `conjo` command-line front end.
//!
//! The runnable `examples/` directory demonstrates each capability on
//! desk-scale spaces; `cargo run -p conjecture-o --example conjecture_o`
//! is a good entry point.

pub mod cache;
pub mod config;
pub mod error;
pub mod quantum;
pub mod report;
pub mod roots;
pub mod spectral;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
