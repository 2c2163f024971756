//! Regions of the plane that are guarded against every empty cone of a
//! given aperture.

pub mod arc;
pub mod arcgen;
pub mod arrangement;
pub mod error;
pub mod geom;
pub mod hull;
pub mod lowerbound;
pub mod oracle;
pub mod ptree;
pub mod region;
pub mod wide;

pub use arc::{cone_arc, inscribed_arc, CircularArc, CircularSegment};
pub use arrangement::{region_theta_lt_pi, ClassifyBackend, RegionOptions};
pub use error::{Error, Result};
pub use geom::{Angle, BBox, Point, Side};
pub use hull::{convex_hull, ConvexHull};
pub use oracle::{
    batch_unguarded, is_theta_guarded, max_empty_cone_angle, maximal_empty_cones, rasterize,
    ConeWitness, GuardSet, Raster,
};
pub use region::{Component, Edge, Region};
pub use wide::region_theta_ge_pi;

use std::f64::consts::{PI, TAU};

/// The Θ-region for any Θ ∈ (0, 2π]: the arrangement pipeline below π, the
/// hull trace from π on, and the whole plane at 2π. A single guard leaves
/// every point unguarded.
pub fn compute_region(gs: &GuardSet, theta: f64, opts: &RegionOptions) -> Result<Region> {
    if !(theta > 0.0 && theta <= TAU) || !theta.is_finite() {
        return Err(Error::InvalidAngle(theta));
    }
    if gs.len() < 2 {
        return Ok(Region::empty(theta));
    }
    if theta == TAU {
        Ok(Region::plane(theta))
    } else if theta >= PI {
        region_theta_ge_pi(gs, theta)
    } else {
        region_theta_lt_pi(gs, theta, opts)
    }
}
