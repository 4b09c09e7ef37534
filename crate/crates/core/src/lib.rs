//! Leading-order entanglement harvesting between two localized probe-field
//! modes coupled to a free scalar vacuum in 3+1 dimensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`modes`]: trap eigenmodes and eigenfrequencies (harmonic trap, Dirichlet box).
//! * [`smearing`]: switching functions and spatial Fourier transforms of mode profiles.
//! * [`kernels`]: vacuum dispersion and the time kernels of the local and
//!   time-ordered terms.
//! * [`harvesting`]: the L, K and M integrals, the detector density matrix
//!   and its negativity.
//! * [`purity`]: mixedness of a Gaussian mode restricted to a harmonic trap.
//! * [`oracle`]: an exact Gaussian lattice simulation used to validate the
//!   perturbative pipeline.
//!
//! Units: ħ = c = 1. Lengths and times are usually quoted in units of the
//! switching timescale T.

pub mod error;
pub mod harvesting;
pub mod kernels;
pub mod modes;
pub mod oracle;
pub mod purity;
pub mod quadrature;
pub mod smearing;
pub mod special;

pub use error::{Error, Result};
