//! Scalar numerics for BPSK over real AWGN channels with unit noise variance.
//!
//! A channel `Y = h √p S + N` with `S ∈ {±1}` and `N ~ N(0, 1)` has the
//! channel LLR `L = 2 h √p Y`, which is consistent Gaussian with
//! `σ = 2 h √p`. Its SNR is `h² p`.

pub mod jfunc;
pub mod quadrature;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use quadrature::NormalRule;
use special::{q_inv, softplus};

/// Feasibility slack for the average power constraint.
pub const POWER_SLACK: f64 = 1e-12;

/// A mutual information in bits per channel use, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MiValue(f64);

impl MiValue {
    pub const ZERO: MiValue = MiValue(0.0);

    pub fn new(value: f64) -> Result<Self> {
        ensure!(
            (0.0..=1.0).contains(&value),
            Domain,
            "mutual information {value} outside [0, 1]"
        );
        Ok(Self(value))
    }

    /// Clamps into `[0, 1]`; NaN maps to zero.
    pub fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Self(0.0)
        } else {
            Self(value.clamp(0.0, 1.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<MiValue> for f64 {
    fn from(v: MiValue) -> f64 {
        v.0
    }
}

/// Two BiAWGN channels and the power assigned to each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelPair {
    pub h1: f64,
    pub h2: f64,
    pub p1: f64,
    pub p2: f64,
    pub p_avg: f64,
}

impl ChannelPair {
    pub fn new(h1: f64, h2: f64, p1: f64, p2: f64, p_avg: f64) -> Result<Self> {
        ensure!(
            h1 > 0.0 && h2 > 0.0 && h1.is_finite() && h2.is_finite(),
            Domain,
            "channel gains must be positive and finite, got ({h1}, {h2})"
        );
        ensure!(
            p1 >= 0.0 && p2 >= 0.0 && p1.is_finite() && p2.is_finite(),
            Domain,
            "powers must be non-negative and finite, got ({p1}, {p2})"
        );
        ensure!(
            p_avg.is_finite() && 0.5 * (p1 + p2) <= p_avg + POWER_SLACK,
            Argument,
            "power split ({p1}, {p2}) violates the average constraint {p_avg}"
        );
        Ok(Self {
            h1,
            h2,
            p1,
            p2,
            p_avg,
        })
    }

    /// Split `2 p_avg` so that channel 1 gets the fraction `rho`.
    pub fn from_split(h1: f64, h2: f64, p_avg: f64, rho: f64) -> Result<Self> {
        ensure!(
            (0.0..=1.0).contains(&rho),
            Domain,
            "split fraction {rho} outside [0, 1]"
        );
        ensure!(p_avg >= 0.0, Domain, "average power {p_avg} is negative");
        let (p1, p2) = split_powers(p_avg, rho);
        Self::new(h1, h2, p1, p2, p_avg)
    }

    /// Fraction of the total budget on channel 1, `p1 / (p1 + p2)`.
    pub fn rho(&self) -> f64 {
        let total = self.p1 + self.p2;
        if total > 0.0 {
            self.p1 / total
        } else {
            0.5
        }
    }

    /// LLR standard deviations `2 h_i √p_i` of the two channels.
    pub fn llr_sigmas(&self) -> (f64, f64) {
        (llr_sigma(self.h1, self.p1), llr_sigma(self.h2, self.p2))
    }
}

/// `(p1, p2) = (2 ρ P, 2 (1 − ρ) P)`.
pub fn split_powers(p_avg: f64, rho: f64) -> (f64, f64) {
    let total = 2.0 * p_avg;
    let p1 = rho * total;
    (p1, total - p1)
}

/// Standard deviation of the channel LLR, `2 h √p`.
#[inline]
pub fn llr_sigma(h: f64, p: f64) -> f64 {
    2.0 * h * p.max(0.0).sqrt()
}

/// Inputs of the normal approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaInputs {
    pub capacity_per_use: f64,
    pub dispersion_per_use: f64,
    pub n_uses: u64,
    pub target_fer: f64,
}

impl NaInputs {
    pub fn new(
        capacity_per_use: f64,
        dispersion_per_use: f64,
        n_uses: u64,
        target_fer: f64,
    ) -> Result<Self> {
        ensure!(
            dispersion_per_use >= 0.0,
            Numerical,
            "negative dispersion {dispersion_per_use}"
        );
        ensure!(
            n_uses >= 2 && n_uses % 2 == 0,
            Argument,
            "number of channel uses must be even and at least 2, got {n_uses}"
        );
        ensure!(
            target_fer > 0.0 && target_fer < 1.0,
            Domain,
            "target FER {target_fer} outside (0, 1)"
        );
        Ok(Self {
            capacity_per_use,
            dispersion_per_use,
            n_uses,
            target_fer,
        })
    }

    /// `C − sqrt(V/N) Q⁻¹(FER) + log2(N) / (2N)`.
    pub fn rate(&self) -> f64 {
        let n = self.n_uses as f64;
        self.capacity_per_use - (self.dispersion_per_use / n).sqrt() * q_inv(self.target_fer)
            + n.log2() / (2.0 * n)
    }
}

/// J-function: MI of a consistent Gaussian LLR with standard deviation `sigma`.
pub fn j_func(sigma: f64) -> Result<MiValue> {
    ensure!(
        sigma >= 0.0 && sigma.is_finite(),
        Domain,
        "J-function argument must be finite and non-negative, got {sigma}"
    );
    Ok(MiValue(jfunc::j(sigma)))
}

/// Inverse J-function on `[0, 1)`.
pub fn j_inv(mi: MiValue) -> Result<f64> {
    let v = mi.get();
    ensure!(v < 1.0, Domain, "inverse J-function needs MI < 1, got {v}");
    Ok(jfunc::j_inv_raw(v))
}

/// BiAWGN mutual information under the J-function fit, `J(2 h √p)`.
pub fn biawgn_mi(h: f64, p: f64) -> Result<MiValue> {
    ensure!(
        h > 0.0 && h.is_finite(),
        Domain,
        "channel gain must be positive, got {h}"
    );
    ensure!(
        p >= 0.0 && p.is_finite(),
        Domain,
        "power must be non-negative, got {p}"
    );
    Ok(MiValue(jfunc::j(llr_sigma(h, p))))
}

/// BiAWGN mutual information by quadrature, as a function of `snr = h² p`.
///
/// This is the objective whose derivative is [`bpsk_mmse`]; the power
/// allocation and Shannon-limit solvers use it.
pub fn biawgn_mi_exact(snr: f64) -> f64 {
    let (mean, _) = density_moments(snr);
    mean
}

/// MMSE of a BPSK symbol observed at `snr`: `1 − E[tanh(snr + √snr Z)]`.
pub fn bpsk_mmse(snr: f64) -> Result<f64> {
    ensure!(
        snr >= 0.0 && !snr.is_nan(),
        Domain,
        "SNR must be non-negative, got {snr}"
    );
    Ok(bpsk_mmse_raw(snr))
}

pub(crate) fn bpsk_mmse_raw(snr: f64) -> f64 {
    if snr == 0.0 {
        return 1.0;
    }
    let root = snr.sqrt();
    // 1 − tanh(x) = 2 / (1 + e^{2x}), free of cancellation at high SNR
    let mmse = NormalRule::standard().expect(|z| 2.0 / (1.0 + (2.0 * (snr + root * z)).exp()));
    mmse.clamp(f64::MIN_POSITIVE, 1.0)
}

/// Mean and variance (bits, bits²) of the single-use information density
/// `1 − log2(1 + e^{−L})`, `L = 2 snr + 2 √snr Z`, with `S = +1` fixed.
pub fn density_moments(snr: f64) -> (f64, f64) {
    if snr <= 0.0 {
        return (0.0, 0.0);
    }
    let root = snr.sqrt();
    let rule = NormalRule::standard();
    let loss = |z: f64| softplus(-(2.0 * snr + 2.0 * root * z)) / std::f64::consts::LN_2;
    let m1 = rule.expect(loss);
    let m2 = rule.expect(|z| loss(z).powi(2));
    (1.0 - m1, (m2 - m1 * m1).max(0.0))
}

/// Capacity and dispersion per channel use of the channel pair.
///
/// The pair information density uses the standard LLR `2 h_i √p_i s_i y_i`;
/// the two uses are independent, so the dispersion per use is the mean of the
/// two single-channel dispersions.
pub fn info_density_moments(cp: &ChannelPair) -> (f64, f64) {
    let (m1, v1) = density_moments(cp.h1 * cp.h1 * cp.p1);
    let (m2, v2) = density_moments(cp.h2 * cp.h2 * cp.p2);
    (0.5 * (m1 + m2), 0.5 * (v1 + v2))
}
