//! Small special functions used in several modules.

/// `sin(x)/x`, with a sixth-order Taylor expansion near the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}
