//! Goldman brackets of loops on closed orientable surfaces and the trace
//! functions they map to.
//!
//! The crate is organised bottom-up:
//!
//! * [`liealg`]: matrix groups, the trace invariant `f`, the pairing
//!   `Re tr(xy)`, variation functions and their enveloping-word extensions.
//! * [`surface`]: surface-group words, representations, holonomy.
//! * [`goldman`]: PL loops in the fundamental polygon, intersection data,
//!   oriented and unoriented brackets, and the Poisson-side evaluation.
//! * [`chen`]: iterated-integral parallel transport with truncation bounds and
//!   the degree-0 Wilson loop of a perturbed flat connection.
//! * [`dgla`]: finite-dimensional cyclic DGLAs, Maurer-Cartan residuals and
//!   the moment map of the gauge action.
//! * [`verify`]: the seeded invariant batteries shared by the CLI and the
//!   acceptance tests.

pub mod chen;
pub mod dgla;
pub mod error;
pub mod goldman;
pub mod io;
pub mod liealg;
pub mod linalg;
pub mod surface;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use liealg::{AlgebraElement, EnvelopingWord, GroupElement, GroupKind, GroupSpec};
pub use surface::{Letter, Representation, SurfacePresentation, Word};
