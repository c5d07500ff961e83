//! Framed curves in anti-de Sitter 3-space and the singularities of their
//! nullcone fronts.
//!
//! The ambient space is R^4 with the metric of signature `(-, -, +, +)`.
//! Curves are given by component expressions in `s`, by the built-in
//! catalog, or by sampled frames, and every evaluation carries a jet of
//! Taylor coefficients so that derivatives come out exact.

// `!(a < b)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adsdist;
pub mod curve;
pub mod error;
pub mod expr;
pub mod framed;
pub mod geom4;
pub mod jet;
pub mod nullcone;
pub mod regular;
pub mod roots;

pub use adsdist::{
    check_conditions, dist_sq_jets, locus_point, ConditionReport, DistanceEvaluation, VanishTol,
};
pub use curve::{
    catalog, documented_singular_parameters, AnalyticFrame, CurveSpec, CurveSpecFile, FrameSource,
    SampledFrame, TransformedFrame, CATALOG_NAMES,
};
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr};
pub use framed::{
    align_congruence, extract_curvature, integrate_frame, Curvature, CurvatureFn, CurvatureQuad,
    CurvatureQuadFile, FrameState, FramedCurve, Isometry22, ValidationReport,
};
pub use geom4::{
    causal_character, check_membership, pseudo_dot, pseudo_norm, triple_product, CausalClass,
    PseudoSphereKind, Vec4,
};
pub use jet::Jet4;
pub use nullcone::{
    classify_at, find_singularities, front_point, singular_lambda, FrontMesh, FrontSheet,
    SingularClass, SingularPointReport, Tolerances,
};
pub use regular::{frenet_at, FrenetData};
