use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Real scalar used by every numerical layer (grids, flows, forms).
///
/// Implemented for `f32` and `f64`. Symbolic constants are stored in double
/// precision and narrowed on evaluation.
pub trait Real: Float + FloatConst + FftNum + std::fmt::Display {
    #[inline]
    fn of(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(f64::of(0.25), 0.25);
        assert_eq!(f32::of(0.25), 0.25f32);
        assert_eq!(f32::of(1.5).to_f64_lossy(), 1.5);
        assert_eq!(f64::of_usize(7), 7.0);
    }
}
