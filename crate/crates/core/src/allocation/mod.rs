//! Power allocation between the two channels.
//!
//! Every allocation meets the average power constraint with equality:
//! `p1 = 2 ρ P_avg`, `p2 = 2 (1 − ρ) P_avg`.

mod golden;
pub mod polar;
pub mod sweep;

pub use golden::golden_section_min;
pub use polar::{
    design_split, fer_at_power, fer_of_split, optimize_power_fer, optimize_power_unfrozen_mi,
    required_power_db, PolarProblem, PowerOptimum, PowerSweepPoint, SplitDesign, SplitRule,
};
pub use sweep::{sweep_table, SweepRow};

use serde::{Deserialize, Serialize};

use crate::channel::{biawgn_mi_exact, bpsk_mmse_raw, info_density_moments, ChannelPair, NaInputs};
use crate::error::{ensure, Error, Result};

/// How an allocation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMethod {
    /// Maximises `I(X1;Y1) + I(X2;Y2)`; objective is that sum.
    MercuryWaterfilling,
    /// Minimises the estimated SC frame error rate; objective is the FER.
    FerOptimal,
    /// Maximises the MI sum of the unfrozen bits; objective is that sum.
    UnfrozenMiOptimal,
    /// Supplied by the user; objective is unset (NaN).
    Manual,
}

/// A power split with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub p1: f64,
    pub p2: f64,
    pub method: AllocationMethod,
    pub objective_value: f64,
}

impl Allocation {
    pub fn from_rho(p_avg: f64, rho: f64, method: AllocationMethod, objective_value: f64) -> Self {
        let (p1, p2) = crate::channel::split_powers(p_avg, rho);
        Self {
            p1,
            p2,
            method,
            objective_value,
        }
    }

    pub fn manual(p_avg: f64, rho: f64) -> Result<Self> {
        ensure!(
            (0.0..=1.0).contains(&rho),
            Domain,
            "split fraction {rho} outside [0, 1]"
        );
        ensure!(
            p_avg >= 0.0 && p_avg.is_finite(),
            Domain,
            "average power {p_avg} invalid"
        );
        Ok(Self::from_rho(
            p_avg,
            rho,
            AllocationMethod::Manual,
            f64::NAN,
        ))
    }

    pub fn p_avg(&self) -> f64 {
        0.5 * (self.p1 + self.p2)
    }

    /// `p1 / (2 P_avg)`.
    pub fn rho(&self) -> f64 {
        let total = self.p1 + self.p2;
        if total > 0.0 {
            self.p1 / total
        } else {
            0.5
        }
    }

    pub fn channel_pair(&self, h1: f64, h2: f64) -> Result<ChannelPair> {
        ChannelPair::new(h1, h2, self.p1, self.p2, self.p_avg())
    }
}

/// Mercury/waterfilling solution with its water level and KKT residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MercuryWaterfill {
    pub allocation: Allocation,
    /// Common value of `h_i² mmse(h_i² p_i)` over active channels.
    pub eta: f64,
    /// Per channel: `|h_i² mmse(h_i² p_i) − η|` if active, `max(0, h_i² − η)` if not.
    pub kkt_residuals: [f64; 2],
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

fn check_gains(h1: f64, h2: f64) -> Result<()> {
    ensure!(
        h1 > 0.0 && h2 > 0.0 && h1.is_finite() && h2.is_finite(),
        Argument,
        "channel gains must be positive and finite, got ({h1}, {h2})"
    );
    Ok(())
}

/// Sum of the exact BiAWGN MIs for the split `rho` of `2 p_avg`.
pub fn sum_mi(h1: f64, h2: f64, p_avg: f64, rho: f64) -> f64 {
    let (p1, p2) = crate::channel::split_powers(p_avg, rho);
    biawgn_mi_exact(h1 * h1 * p1) + biawgn_mi_exact(h2 * h2 * p2)
}

/// Maximises `I(X1;Y1) + I(X2;Y2)` subject to `(p1 + p2)/2 = p_avg`.
///
/// The KKT conditions read `h_i² mmse(h_i² p_i) = η` for active channels.
/// Since the left-hand side is decreasing in `p_i`, the difference of the two
/// marginal gains is monotone in `p1` and the optimum is found by bisection
/// on `p1`, with the boundary solutions `p1 ∈ {0, 2 p_avg}` checked first.
pub fn mercury_waterfill(h1: f64, h2: f64, p_avg: f64) -> Result<MercuryWaterfill> {
    check_gains(h1, h2)?;
    ensure!(
        p_avg > 0.0 && p_avg.is_finite(),
        Argument,
        "average power {p_avg} must be positive"
    );
    let (g1, g2) = (h1 * h1, h2 * h2);
    let total = 2.0 * p_avg;
    let gain1 = |p1: f64| g1 * bpsk_mmse_raw(g1 * p1);
    let gain2 = |p1: f64| g2 * bpsk_mmse_raw(g2 * (total - p1));
    let excess = |p1: f64| gain1(p1) - gain2(p1);

    let p1 = if excess(0.0) <= 0.0 {
        0.0
    } else if excess(total) >= 0.0 {
        total
    } else {
        let (mut lo, mut hi) = (0.0, total);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let p2 = total - p1;
    let eta = match (p1 > 0.0, p2 > 0.0) {
        (true, true) => 0.5 * (gain1(p1) + gain2(p1)),
        (true, false) => gain1(p1),
        _ => gain2(p1),
    };
    let residual = |active: bool, g: f64, marginal: f64| {
        if active {
            (marginal - eta).abs()
        } else {
            (g - eta).max(0.0)
        }
    };
    let kkt_residuals = [
        residual(p1 > 0.0, g1, gain1(p1)),
        residual(p2 > 0.0, g2, gain2(p1)),
    ];
    let objective = biawgn_mi_exact(g1 * p1) + biawgn_mi_exact(g2 * p2);
    if !objective.is_finite() || !eta.is_finite() {
        return Err(Error::Numerical(format!(
            "mercury/waterfilling failed for h = ({h1}, {h2}), P = {p_avg}"
        )));
    }
    Ok(MercuryWaterfill {
        allocation: Allocation {
            p1,
            p2,
            method: AllocationMethod::MercuryWaterfilling,
            objective_value: objective,
        },
        eta,
        kkt_residuals,
    })
}

/// Normal-approximation rate (bits per channel use) at `n_uses` channel uses.
pub fn na_rate(cp: &ChannelPair, n_uses: u64, target_fer: f64) -> Result<f64> {
    let (capacity, dispersion) = info_density_moments(cp);
    Ok(NaInputs::new(capacity, dispersion, n_uses, target_fer)?.rate())
}

/// Smallest `P_avg` (dB) at which mercury/waterfilling reaches the average
/// rate `½ (I1 + I2) = target_rate`.
pub fn shannon_limit_power(h1: f64, h2: f64, target_rate: f64) -> Result<f64> {
    check_gains(h1, h2)?;
    ensure!(
        target_rate > 0.0 && target_rate < 1.0,
        Domain,
        "target rate {target_rate} outside (0, 1)"
    );
    let rate_at = |db: f64| -> Result<f64> {
        Ok(0.5
            * mercury_waterfill(h1, h2, db_to_linear(db))?
                .allocation
                .objective_value)
    };
    let (mut lo, mut hi) = (-60.0, 20.0);
    while rate_at(hi)? < target_rate {
        hi += 20.0;
        ensure!(
            hi <= 200.0,
            Numerical,
            "rate {target_rate} not reached below 200 dB"
        );
    }
    ensure!(
        rate_at(lo)? < target_rate,
        Numerical,
        "rate {target_rate} reached below {lo} dB"
    );
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? < target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_gains_split_evenly() {
        let mw = mercury_waterfill(0.7, 0.7, 3.0).unwrap();
        assert!((mw.allocation.p1 - 3.0).abs() < 1e-9 && (mw.allocation.p2 - 3.0).abs() < 1e-9);
    }

    #[test]
    fn low_power_goes_to_the_better_channel() {
        let mw = mercury_waterfill(0.66, 0.33, 1e-3).unwrap();
        assert_eq!(mw.allocation.p2, 0.0);
        assert_eq!(mw.kkt_residuals, [0.0, 0.0]);
        let mw = mercury_waterfill(0.33, 0.66, 1e-3).unwrap();
        assert_eq!(mw.allocation.p1, 0.0);
    }

    #[test]
    fn constraint_met_with_equality() {
        let mw = mercury_waterfill(0.9, 0.1, db_to_linear(10.37)).unwrap();
        assert!((mw.allocation.p_avg() - db_to_linear(10.37)).abs() < 1e-9);
        assert!(mw.kkt_residuals.iter().all(|&r| r < 1e-8));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(mercury_waterfill(0.0, 1.0, 1.0).is_err());
        assert!(mercury_waterfill(1.0, 1.0, 0.0).is_err());
        assert!(shannon_limit_power(1.0, 1.0, 1.0).is_err());
        assert!(Allocation::manual(1.0, 1.5).is_err());
    }

    #[test]
    fn shannon_limit_decreases_with_rate() {
        let a = shannon_limit_power(1.0, 1.0, 0.5).unwrap();
        let b = shannon_limit_power(1.0, 1.0, 0.1).unwrap();
        let c = shannon_limit_power(1.0, 1.0, 0.01).unwrap();
        assert!(a > b && b > c);
    }
}
