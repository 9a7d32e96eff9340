//! Exact arithmetic for rank-r Drinfeld modular forms over F_q[T].
//!
//! The crate models the completed algebraic closure C_oo of F_q((1/T)) by
//! truncated Puiseux series in u = T^(-1/e) with coefficients in F_{q^m}
//! and an explicit precision window, and builds on top of it:
//!
//! * the twisted polynomial ring C_oo{tau} (tau c = c^q tau): lattice
//!   exponentials and logarithms, operator polynomials phi_a, Newton
//!   polygons;
//! * finite F_q-lattices and rank-r A-lattices: successive minimum bases,
//!   spectra, Eisenstein sums, torsion bases, Moore determinants;
//! * modular-form values at a frame: para-Eisenstein series alpha_k,
//!   Eisenstein series E_k, coefficient forms, their normalizations and
//!   functional determinants;
//! * the combinatorics of the building map: apartment points, Weyl chamber
//!   and walls, the inseparability complexes W(k), fiber sampling, and the
//!   affine-interpolation checker for log|f| of units.
//!
//! All arithmetic is exact: coefficients are finite-field elements,
//! valuations are rational numbers, and every operation either certifies
//! its output precision or fails loudly. See the `verify` module for the
//! executable identity suites and the `dmf` binary for the CLI.

pub mod building;
pub mod cli;
pub mod dual;
pub mod error;
pub mod forms;
pub mod fq;
pub mod lattice;
pub mod params;
pub mod poly;
pub mod series;
pub mod tau;
pub mod verify;

pub use error::{Error, Result};
pub use params::{Context, Ctx, GroundParams};
pub use series::Puiseux;
