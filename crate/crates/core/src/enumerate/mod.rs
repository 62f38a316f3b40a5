//! Saddle connections, cylinders and weighted cylinder counts.

mod counting;
mod cylinders;
mod saddle;

pub use counting::{
    convergence, convergence_csv, core_marked_points, cylinders_in_directions, cylinders_up_to, cylinders_up_to_sq, lift_cylinders, lineage,
    normalized_estimate, profile_of, project_point, report_json_lines, sort_cylinders, weighted_count,
    weighted_count_of, ConvergenceRow, CylinderLift, CylinderRecord, ExactFloat, Filter, Profile,
};
pub use cylinders::{cylinders_in_direction, Cylinder, DirectionDecomposition};
pub use saddle::{saddle_connections, saddle_connections_sq, SaddleConnection};
