//! Exact computation of elliptic divisibility sequences and the
//! valuation patterns of their terms.
//!
//! Modules, bottom to top: [`numbers`] (exact scalars), [`curves`]
//! (Weierstrass models and the group law), [`divpoly`] (division
//! polynomials and sequence terms), [`formal`] (formal group series),
//! [`troublemaker`] (the `R_n(a, l)` sequence), [`reduction`] (closed forms
//! for valuations and their verification) and [`heights`].

pub mod curves;
pub mod divpoly;
pub mod error;
pub mod formal;
pub mod heights;
pub mod numbers;
pub mod reduction;
pub mod troublemaker;

pub use error::{Error, ErrorClass, Result};
