//! Exact construction and verification of twisted toroidal Lie algebras,
//! their Z-algebras and Fock-space representations.

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod rootsys;
pub mod autom;
pub mod toroidal;
pub mod distops;
pub mod fock;
pub mod fockhom;
pub mod fockprin;
pub mod zbridge;
pub mod princiso;
pub mod report;
pub mod config;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::{CycScalar, Q};
