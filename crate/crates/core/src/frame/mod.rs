//! Pointwise null-hypersurface geometry: frames, shape operators and their
//! covariant derivatives.

pub mod fields;
pub mod hypersurface;
pub mod nabla;
pub mod shape;

pub use fields::{frame_at, FramePoint};
pub use hypersurface::{GraphFunction, HypersurfaceMap, Parameterization, ScreenStrategy, XiNormalization};
pub use nabla::{nabla_derivative, Field, NablaValue};
pub use shape::{
    default_cluster_tol, point_at, screen_principal_curvatures, shape_at, ScreenCurvatures, Shape,
    ShapeData, ShapeJet,
};
