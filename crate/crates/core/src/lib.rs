//! Exact flat-surface computations: cone points, double covers, saddle connections,
//! cylinders and Siegel–Veech constants.

pub mod checks;
pub mod coverings;
pub mod enumerate;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod scalar;
pub mod surface;
pub mod svconst;
pub mod templates;
pub mod trace;
pub mod windtree;

pub use error::{Error, Result};
pub use geometry::Vec2;
pub use scalar::{Field, Scalar};
pub use surface::{FlatSurface, Gluing, Kind, Marking, StratumSignature};
