//! Phase-field approximation of Steiner trees and Plateau surfaces.
//!
//! The solvers alternate between weighted geodesic computations (fast marching, backtracking
//! and homotopy sweeps) and semi-implicit Fourier-spectral evolution of a phase field.

pub mod analysis;
pub mod config;
pub mod eikonal;
pub mod error;
pub mod flow;
pub mod grid;
pub mod io;
pub mod measure;
pub mod mesh;
pub mod path;
pub mod potential;
pub mod solver;

pub use error::{Error, Result};
