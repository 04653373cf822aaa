//! Numerical toolkit for null hypersurfaces in Lorentzian space forms and
//! generalized Robertson-Walker spacetimes.

pub mod ambient;
pub mod error;
pub mod frame;
pub mod harness;
pub mod identities;
pub mod tensor_core;
