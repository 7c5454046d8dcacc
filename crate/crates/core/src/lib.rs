//! Compile discrete-time quantum walks into liquid-crystal waveplate patterns.
//!
//! A translation-invariant walk of `tau` steps is a family of 2x2 coin
//! unitaries indexed by quasi-momentum. Three patterned waveplates with
//! retardations (pi/2, pi, pi/2) reproduce any such unitary pointwise, so the
//! whole walk can be written into three optic-axis profiles over one
//! Brillouin zone. This crate provides:
//!
//! - [`su2`]: exact 2x2 unitary algebra (waveplate Jones matrices, Pauli
//!   components, powers, eigenphases).
//! - [`protocols`]: step operators, Bloch walk operators, disorder schedules
//!   and quasi-energy bands.
//! - [`lattice`]: the position-space reference evolution.
//! - [`compiler`]: the waveplate-angle compiler with continuous branch
//!   tracking, reconstruction checks and feasibility reports.
//! - [`optics`]: a one-dimensional wave-optics model of the plate stack, far
//!   field mode projection and a synthetic camera.
//! - [`analysis`]: similarity, coin density matrices, entropy and Stokes
//!   tomography.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iterators otherwise.

pub mod analysis;
pub mod compiler;
pub mod error;
pub mod lattice;
pub mod optics;
pub mod par;
pub mod protocols;
pub mod su2;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
