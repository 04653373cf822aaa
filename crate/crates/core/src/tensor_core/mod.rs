//! Jets and small dense linear algebra shared by every other module.

pub mod jet;
pub mod jet2;
pub mod linalg;

pub use jet::{Jet1, Scalar};
pub use jet2::{jet2_compose, Jet2Scalar};
pub use linalg::{
    degenerate_null_direction, generalized_symmetric_eigen, solve, GeneralizedEigen, Mat, SymMatrix,
    DEFAULT_RANK_TOL,
};
