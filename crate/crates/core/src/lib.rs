#![no_std]
//! Core numerics for random Schrödinger operators driven by Gibbs point
//! processes: configurations and energies, birth-death-move sampling,
//! finite-difference operators with eigenvalue counting by inertia,
//! separated-packing norms, and explicit tail and Laplace-functional bounds.
//!
//! The crate is `no_std` (it needs `alloc`); IO, configuration files and the
//! command line live in the `gibbsids` crate.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod configuration;
pub mod error;
pub mod geometry;
pub mod interaction;
pub mod num;
pub mod packing;
pub mod potential;
pub mod profile;
pub mod quadrature;
pub mod sampler;
pub mod schrodinger;
pub mod stats;
mod union;

pub use configuration::PointConfiguration;
pub use error::{Error, Result};
pub use geometry::{BoxDomain, Point};
pub use interaction::{EnergyKind, InteractionModel, PairPotential};
pub use num::Energy;
pub use potential::{Layout, ReflectedPotential, SingleSitePotential, SiteFunction, WellProfile};
pub use profile::RadialTable;
