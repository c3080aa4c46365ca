//! Convex bodies and their functionals: Minkowski functional, volume,
//! covariogram, projections, the difference body `DK` and the polar
//! projection body `Π°K`.

mod body;
pub mod clip;
mod covariogram;
mod grid;
pub mod hull;
mod spec;

pub use body::{gauge_from_halfspaces, ConvexBody, Estimate, HalfSpace, Polytope, Shape};
pub use covariogram::{ball_covariogram, covariogram_mc, evenness_defect, Covariogram, DEGENERATE_FRACTION};
pub use grid::{random_unit, DirectionGrid, GridScheme};
pub use spec::BodySpec;
