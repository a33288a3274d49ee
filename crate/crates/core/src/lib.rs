//! Numerics for the Kobayashi distance on model domains of `C^n`.
//!
//! * [`geometry`]: closed-form invariant distances, automorphisms,
//!   Kobayashi balls and boundary estimates.
//! * [`lempert`]: certified bounds for the Kobayashi distance of bounded
//!   convex domains through analytic discs and supporting half-planes.
//! * [`dynamics`]: iteration of holomorphic self-maps, fixed and Wolff
//!   points, target sets and limit period/rank arithmetic.
//! * [`horospheres`]: horosphere functionals, formulas and invariance.
//! * [`bergman`]: Bergman kernels, Berezin transform, Toeplitz operators
//!   and Carleson-measure experiments.

pub mod angles;
pub mod bergman;
pub mod convex;
pub mod cvec;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod horospheres;
pub mod lempert;
pub mod maps;
pub mod optim;
pub mod quadrature;

pub use cvec::{c, CVec, TangentVector, C64};
pub use domain::DomainSpec;
pub use error::{Error, Result};
