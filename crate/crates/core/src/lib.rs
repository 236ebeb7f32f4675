//! Exact diagonalization of the one-dimensional spin-1 bilinear-biquadratic
//! chain, bipartite correlation measures on its ground and thermal states,
//! and θ sweeps that flag candidate phase transitions.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod spectra;
pub mod spinops;
pub mod states;
pub mod measures;
pub mod sweep;

pub use error::{Error, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
