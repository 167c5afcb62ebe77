//! Gaussian simulation of continuous-variable cluster states generated over a
//! spatial mode comb.
//!
//! The crate models multimode phase-insensitive amplifiers as banks of
//! two-mode squeezers acting on a comb of transverse modes, concatenates the
//! resulting EPR pairs into a dual-rail cluster wire with balanced beam
//! splitters, and evaluates entanglement witnesses and homodyne noise figures,
//! including a model of imperfect local-oscillator overlap.
//!
//! Every state is represented by its first and second moments in shot-noise
//! units: the vacuum has unit variance in each quadrature, and quadratures are
//! stored x-major, `(x_1 .. x_N, p_1 .. p_N)`.
//!
//! # Example
//! ```
//! use cvcomb::{elements, gaussian::{self, Quadrature, Witness}};
//!
//! let vac = gaussian::vacuum_state(2).unwrap();
//! let tms = elements::two_mode_squeezer(0.5, 0.0).unwrap();
//! let epr = gaussian::apply_symplectic(&vac, &tms, &[0, 1]).unwrap();
//!
//! let w = Witness::from_terms(2, &[(0, Quadrature::X, 1.0), (1, Quadrature::X, -1.0)]).unwrap();
//! let v = gaussian::witness_variance(&epr, &w).unwrap();
//! assert!((v - (-1.0f64).exp()).abs() < 1e-12);
//! ```
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory (`cargo run --example <name>`).

pub mod bloch_messiah;
pub mod cli;
pub mod cluster;
pub mod comb;
pub mod detection;
pub mod elements;
pub mod error;
pub mod gaussian;
pub mod scenario;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, Quadrature, SymplecticTransform, Witness};
