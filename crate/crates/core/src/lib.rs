//! Simulation of pump walk-off in type-I degenerate spontaneous parametric
//! downconversion and its effect on the orbital-angular-momentum (OAM)
//! content of the photon pair.
//!
//! The pipeline runs `dispersion` -> `pump` -> `biphoton` -> `oam`, with
//! `farfield` for intensity maps and `analysis` for sweeps, scaling fits,
//! the Bessel-expansion cross-check and astigmatism optimization. `oracles`
//! holds brute-force references used by the test suites.

pub mod analysis;
pub mod biphoton;
pub mod dispersion;
pub mod error;
pub mod farfield;
pub mod io;
pub mod oam;
pub mod oracles;
pub mod pump;
pub mod special;

pub use error::{Error, Result};
