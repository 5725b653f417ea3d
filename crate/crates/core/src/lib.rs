//! Second class particles in attractive nearest-neighbour particle systems.
//!
//! Rate kernels and the model zoo live in [`model`], one-site marginals and
//! coupling measures in [`measures`], exact event-driven simulation in
//! [`dynamics`], hydrodynamic limit profiles in [`hydro`] and the experiment
//! drivers in [`harness`].

pub mod dynamics;
pub mod harness;
pub mod hydro;
pub mod measures;
pub mod model;
