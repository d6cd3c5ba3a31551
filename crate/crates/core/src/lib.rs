//! Analysis toolbox for coherent feedback control of linear quantum
//! stochastic systems.
//!
//! The crate works at the matrix / transfer-function level:
//!
//! - [`dmat`]: complex dense algebra, doubled-up block structure and the
//!   Sylvester, Lyapunov and Riccati solvers everything else relies on.
//! - [`qsys`]: QSDE system matrices built from (Θ, M, N), physical
//!   realizability checks and parameter extraction.
//! - [`xfer`]: state-space transfer functions, (J,J)-unitary and lossless
//!   bounded real checks, H2 and H∞ norms.
//! - [`feedback`]: plant/controller models, augmentation, closed loops and
//!   controller noise synthesis.
//! - [`coherent`]: Kalman filter design and the zero-gain, static-LQG and
//!   trivial-controller H∞ verifications for annihilation-operator plants.
//!
//! Data-parallel sweeps (frequency grids, seeded verification suites) run
//! on rayon when the `parallel` feature is enabled; see [`par`].

pub mod coherent;
pub mod dmat;
pub mod error;
pub mod feedback;
pub mod par;
pub mod qsys;
pub mod tol;
pub mod xfer;

pub use dmat::{CMat, Cx};
pub use error::{Error, Result};
