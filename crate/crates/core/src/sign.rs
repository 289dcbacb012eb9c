/// Boundary-layer approximation of `sgn(s)`: `s / (|s| + delta)`.
///
/// Shared by every sliding-mode evaluation in the learning rules.
#[inline]
pub fn smoothed_sign(s: f64, delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    s / (libm::fabs(s) + delta)
}

/// Boundary-layer width used by the benchmark.
pub const DEFAULT_DELTA: f64 = 0.05;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(smoothed_sign(0.0, 0.05), 0.0);
        assert_eq!(smoothed_sign(0.05, 0.05), 0.5);
        assert!((smoothed_sign(-1e6, 0.05) + 1.0).abs() < 1e-7);
    }

    #[test]
    fn odd_and_bounded() {
        for s in [-3.0, -0.01, 1e-9, 0.2, 40.0] {
            let v = smoothed_sign(s, 0.05);
            assert_eq!(v, -smoothed_sign(-s, 0.05));
            assert!(v.abs() < 1.0);
        }
    }
}
