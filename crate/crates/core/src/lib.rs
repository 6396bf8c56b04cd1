//! Exact computation on the formal loop space of affine space.
//!
//! Everything is done over exact rationals in a finite quotient described by a
//! [`TruncationContext`]: negative-mode loop coordinates are nilpotent of a fixed
//! order and modes outside a window are set to zero. Inside that quotient the
//! library realizes the transgression of differential forms, the Heisenberg
//! vertex module together with its action by loop functions, and the
//! multi-point coordinates used to test the factorization property.

pub mod context;
pub mod derham;
pub mod error;
pub mod exactpoly;
pub mod factorization;
pub mod gen;
pub mod heisenberg;
pub mod laurent;
pub mod par;
pub mod powerseries;
pub mod report;
pub mod suites;
pub mod transgression;

pub use context::TruncationContext;
pub use derham::{DifferentialForm, Universe, VectorField};
pub use error::{Error, Result};
pub use exactpoly::{Monomial, Polynomial, Rational, Variable};
pub use heisenberg::{HeisenbergState, NormalWord};
pub use laurent::{LaurentSeries, Tail};
pub use report::{Record, Report, Status};
pub use transgression::{CoordChange, LoopFunction, XForm};
