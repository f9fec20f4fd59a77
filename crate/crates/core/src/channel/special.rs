//! Gaussian tail function and its inverse.

use libm::erfc;
use statrs::function::erf::erfc_inv;

/// `Q(x) = P(Z > x)` for standard normal `Z`.
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_func`] on `(0, 1)`.
pub fn q_inv(p: f64) -> f64 {
    let mut x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // two Newton steps on ln Q(x) = ln p polish the starting value
    for _ in 0..2 {
        let q = q_func(x);
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if !(q > 0.0 && density > 0.0 && x.is_finite()) {
            break;
        }
        x += q * (q / p).ln() / density;
    }
    x
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
