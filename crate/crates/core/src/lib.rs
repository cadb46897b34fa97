//! # tcost-core
//!
//! Transportation-cost, entropy, Orlicz and spectral machinery on finite
//! metric measure spaces, with checkers that evaluate the quantitative
//! inequalities linking them and report their margins.
//!
//! `no_std` with `alloc`: everything here is a pure function of its inputs.
//! File formats, the CLI and parallel sweeps live in the `tcost` crate.
//!
//! ## Modules
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`space`] | metric measure spaces, grid construction, densities |
//! | [`family`] | seeded density populations |
//! | [`transport`] | exact / entropic `W_p`, dual certificates, infimum convolution |
//! | [`orlicz`] | the Young pair `τ`, `τ*`, gauge norms, Hölder–Orlicz |
//! | [`entropy`] | relative entropy, exponential integrals, large-entropy bounds |
//! | [`dirichlet`] | Dirichlet forms, Poincaré constant, `I(α)` ratio |
//! | [`report`] | the uniform [`InequalityReport`](report::InequalityReport) record |
//! | [`inequalities`] | truncation bounds, inequality checkers, concentration |
//! | [`semigroup`] | reversible generators, heat flow and its traces |

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dirichlet;
pub mod entropy;
pub mod error;
pub mod family;
pub mod inequalities;
pub mod orlicz;
pub mod report;
pub mod semigroup;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
pub use family::{sample_family, DensityFamily, FamilyKind, TiltDirection};
pub use space::{build_grid_space, gaussian_grid, validate_density, Density, MetricMeasureSpace};
