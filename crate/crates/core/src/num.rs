//! Scalar abstraction for the floating-point oracles.

use nalgebra as na;
use num_traits as nt;

/// Real scalar accepted by the dense and iterative solvers.
///
/// Implemented for `f32` and `f64`. Graph quantities (degrees, volumes, the
/// per-tree contributions) are integers and never go through this trait.
pub trait Real:
    Copy + na::RealField + na::Scalar + nt::FromPrimitive + nt::ToPrimitive + Send + Sync
{
    /// Converts a count into the scalar type.
    fn of(x: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(x).expect("count representable as scalar")
    }

    fn of_f64(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("finite f64")
    }

    fn to_f64_lossy(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Rounds `x` up, treating values within `rel_tol` of an integer as that
/// integer. Used where a ceiling is applied to a quantity that is exact in
/// real arithmetic but carries representation error in floating point.
pub fn ceil_snapped(x: f64, rel_tol: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= rel_tol * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}
