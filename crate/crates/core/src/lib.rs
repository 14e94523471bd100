//! Decoupling inequalities for Gaussian vectors.
//!
//! - [`covmodel`]: covariance models and their autocovariances.
//! - [`decoupling`]: the decoupling coefficient and bound constants.
//! - [`szego`]: Toeplitz determinant asymptotics for spectral symbols.
//! - [`brascamp`]: the Brascamp–Lieb constant and the determinant lemmas.
//! - [`verify`]: Monte Carlo checks of the inequalities.

pub mod brascamp;
pub mod covmodel;
pub mod decoupling;
pub mod error;
pub mod linalg;
pub mod random;
pub mod szego;
pub mod verify;

pub use error::{Error, Result};
