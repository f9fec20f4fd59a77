//! J-function of a consistent Gaussian LLR and its inverse.
//!
//! A consistent Gaussian LLR has mean `σ²/2` and variance `σ²`; `J(σ)` is the
//! mutual information (bits) between a uniform binary input and that LLR.
//!
//! The curve is the usual two-segment polynomial/exponential fit
//! (Brännström, Rasmussen and Grant, 2005) with three repairs that keep it a
//! strictly increasing bijection `[0, σ_max] → [0, 1)`:
//!
//! * below `σ = 0.3899` the cubic dips negative; it is replaced by the
//!   quadratic `κσ²` that joins it with matching value and slope;
//! * the low branch is scaled by `0.998217` so that it meets the exponential
//!   branch at `σ* = 1.6363` (the published segments disagree there by
//!   `6.5e-4`, which makes the raw fit non-monotone);
//! * the exponential branch is used beyond the published cut at `σ = 10` up
//!   to its stationary point `σ_max = 52.695`, so that reliable channels keep
//!   a finite, invertible LLR width instead of collapsing onto `J = 1`.
//!
//! Every function here has a complement form (`1 − J`) evaluated without
//! cancellation, which density evolution relies on near `J = 1`.

const A1: f64 = -0.042_106_1;
const B1: f64 = 0.209_252;
const C1: f64 = -0.006_400_81;

const A2: f64 = 0.001_814_91;
const B2: f64 = -0.142_675;
const C2: f64 = -0.082_205_4;
const D2: f64 = 0.054_960_8;

/// Boundary between the polynomial and the exponential branch.
pub const SIGMA_STAR: f64 = 1.6363;
/// `sqrt(C1 / A1)`: where `κσ²` touches the cubic with equal slope.
const SIGMA_JOIN: f64 = 0.389_892_570_046_805_94;
/// `A1 σ_j + B1 + C1 / σ_j`.
const KAPPA: f64 = 0.176_418_288_912_704_4;
/// `(1 − exp(p2(σ*))) / p1(σ*)`.
const LOW_SCALE: f64 = 0.998_217_463_037_599_4;
/// Larger root of `p2'(σ) = 0`; `p2` is decreasing on `[σ*, σ_max]`.
pub const SIGMA_MAX: f64 = 52.694_995_510_424_185;

/// `J(SIGMA_JOIN)`.
const MI_JOIN: f64 = 0.026_770_635_883_152_212;
/// `J(SIGMA_STAR)`.
const MI_STAR: f64 = 0.364_669_294_919_682_9;

#[inline]
fn low_cubic(s: f64) -> f64 {
    s * (C1 + s * (B1 + s * A1))
}

#[inline]
fn low_cubic_slope(s: f64) -> f64 {
    C1 + s * (2.0 * B1 + s * 3.0 * A1)
}

/// Exponent of the high branch: `1 − J(σ) = exp(high_exponent(σ))`.
#[inline]
fn high_exponent(s: f64) -> f64 {
    D2 + s * (C2 + s * (B2 + s * A2))
}

#[inline]
fn high_exponent_slope(s: f64) -> f64 {
    C2 + s * (2.0 * B2 + s * 3.0 * A2)
}

/// `J(σ)` without argument checks. Negative input is treated as zero.
#[inline]
pub fn j(sigma: f64) -> f64 {
    if sigma <= SIGMA_JOIN {
        let s = sigma.max(0.0);
        LOW_SCALE * KAPPA * s * s
    } else if sigma <= SIGMA_STAR {
        LOW_SCALE * low_cubic(sigma)
    } else {
        -high_exponent(sigma.min(SIGMA_MAX)).exp_m1()
    }
}

/// `1 − J(σ)`, accurate when `J(σ)` is close to one.
#[inline]
pub fn j_complement(sigma: f64) -> f64 {
    if sigma <= SIGMA_STAR {
        1.0 - j(sigma)
    } else {
        high_exponent(sigma.min(SIGMA_MAX)).exp()
    }
}

/// `σ` such that `J(σ) = mi`. Accurate for small `mi`; saturates at
/// `SIGMA_MAX` for `mi ≥ 1`.
pub fn j_inv_raw(mi: f64) -> f64 {
    if mi.is_nan() || mi <= 0.0 {
        0.0
    } else if mi <= MI_JOIN {
        (mi / (LOW_SCALE * KAPPA)).sqrt()
    } else if mi <= MI_STAR {
        let target = mi / LOW_SCALE;
        // Initial guess from the published closed-form inverse.
        let guess = 1.09542 * mi * mi + 0.214217 * mi + 2.33727 * mi.sqrt();
        safeguarded_newton(
            |s| (low_cubic(s) - target, low_cubic_slope(s)),
            SIGMA_JOIN,
            SIGMA_STAR,
            guess,
        )
    } else {
        j_inv_complement(1.0 - mi)
    }
}

/// `σ` such that `1 − J(σ) = complement`. Accurate for small complements.
pub fn j_inv_complement(complement: f64) -> f64 {
    if complement.is_nan() || complement >= 1.0 {
        return 0.0;
    }
    if complement >= 1.0 - MI_STAR {
        return j_inv_raw(1.0 - complement);
    }
    if complement <= 0.0 {
        return SIGMA_MAX;
    }
    let target = complement.ln();
    if target <= high_exponent(SIGMA_MAX) {
        return SIGMA_MAX;
    }
    let guess = -0.706692 * (0.386013 * complement).ln() + 1.75017 * (1.0 - complement);
    safeguarded_newton(
        |s| (high_exponent(s) - target, high_exponent_slope(s)),
        SIGMA_STAR,
        SIGMA_MAX,
        guess,
    )
}

/// `σ'` with `J(σ') = 1 − J(σ)`, choosing whichever representation of the
/// intermediate value is free of cancellation.
#[inline]
pub fn j_flip(sigma: f64) -> f64 {
    let mi = j(sigma);
    if mi <= 0.5 {
        j_inv_complement(mi)
    } else {
        j_inv_raw(j_complement(sigma))
    }
}

/// Root of a monotone function on a bracketing interval. Newton steps are
/// taken while they stay inside the current bracket, bisection otherwise.
fn safeguarded_newton(f: impl Fn(f64) -> (f64, f64), lo: f64, hi: f64, guess: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, _) = f(lo);
    let lo_negative = f_lo < 0.0;
    let mut x = if guess.is_finite() && guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_join_continuously() {
        assert!((j(SIGMA_JOIN - 1e-12) - j(SIGMA_JOIN + 1e-12)).abs() < 1e-11);
        assert!((j(SIGMA_STAR) - (-high_exponent(SIGMA_STAR).exp_m1())).abs() < 1e-15);
        assert!((j(SIGMA_JOIN) - MI_JOIN).abs() < 1e-15);
        assert!((j(SIGMA_STAR) - MI_STAR).abs() < 1e-15);
        // slope of the quadratic patch equals the cubic's at the join
        let quad_slope = 2.0 * KAPPA * SIGMA_JOIN;
        assert!((quad_slope - low_cubic_slope(SIGMA_JOIN)).abs() < 1e-12);
        assert!(high_exponent_slope(SIGMA_MAX).abs() < 1e-12);
    }

    #[test]
    fn complement_is_accurate_in_the_tail() {
        for &s in &[2.0, 5.0, 12.0, 20.0, 30.0] {
            let c = j_complement(s);
            assert!(c > 0.0);
            let back = j_inv_complement(c);
            assert!((back - s).abs() < 1e-9 * s, "{s} -> {c} -> {back}");
        }
    }

    #[test]
    fn flip_is_an_involution() {
        for i in 1..200 {
            let s = i as f64 * 0.1;
            let twice = j_flip(j_flip(s));
            assert!((twice - s).abs() < 1e-8 * s.max(1.0), "{s} {twice}");
        }
    }

    #[test]
    fn tiny_mutual_information_inverts() {
        for &mi in &[1e-300, 1e-40, 1e-12, 1e-6, 0.01, 0.3, 0.364_669, 0.365, 0.9] {
            let s = j_inv_raw(mi);
            assert!(((j(s) - mi) / mi).abs() < 1e-9, "{mi}");
        }
    }
}
