//! Experiments built on the lower layers.

pub mod boundary;
pub mod contours;
pub mod determinants;
pub mod registration;
pub mod time_curves;

pub use boundary::{boundary_curve, boundary_point_evolution, bisectrix_crossing, BoundaryCurve, BoundarySearch};
pub use contours::{
    margin_field, preimage_contours, shifted_boundary_scan, write_contours_csv, PlaneField, PreimageContour, ShiftedScan,
};
pub use determinants::{
    determinant_deviation_fields, determinant_stats, mean_determinant_fields, AlphaAverage, DeterminantStats,
};
pub use registration::{optimize_registration_time, Objective, RegistrationTime};
pub use time_curves::{curve_point, time_curves};
