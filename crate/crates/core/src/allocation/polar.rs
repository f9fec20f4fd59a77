//! Power splits chosen for a polar code rather than for mutual information.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{golden_section_min, mercury_waterfill, Allocation, AllocationMethod};
use crate::channel::{llr_sigma, split_powers};
use crate::construction::{de_from_sigmas, summarize_design, MappingKind};
use crate::error::{ensure, Result};

/// Relative precision of the golden-section refinement of `ρ`.
pub const RHO_REL_TOL: f64 = 1e-4;
/// Default number of grid points on `ρ ∈ [0, 1]`.
pub const DEFAULT_GRID_POINTS: usize = 201;

/// A length-`2^n`, dimension-`k` polar code over two channels sharing `p_avg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarProblem {
    pub h1: f64,
    pub h2: f64,
    pub p_avg: f64,
    pub n: u32,
    pub k: usize,
    pub mapping: MappingKind,
}

impl PolarProblem {
    pub fn new(
        h1: f64,
        h2: f64,
        p_avg: f64,
        n: u32,
        k: usize,
        mapping: MappingKind,
    ) -> Result<Self> {
        ensure!(
            h1 > 0.0 && h2 > 0.0 && h1.is_finite() && h2.is_finite(),
            Argument,
            "channel gains must be positive and finite, got ({h1}, {h2})"
        );
        ensure!(
            p_avg > 0.0 && p_avg.is_finite(),
            Argument,
            "average power {p_avg} must be positive"
        );
        ensure!(
            (1..=crate::construction::density::MAX_N).contains(&n),
            Argument,
            "code exponent {n} out of range"
        );
        ensure!(
            k <= 1 << n,
            Argument,
            "dimension {k} exceeds block length {}",
            1usize << n
        );
        Ok(Self {
            h1,
            h2,
            p_avg,
            n,
            k,
            mapping,
        })
    }

    pub fn with_power(&self, p_avg: f64) -> Result<Self> {
        Self::new(self.h1, self.h2, p_avg, self.n, self.k, self.mapping)
    }
}

/// The best code for one power split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDesign {
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
    pub frozen: Vec<usize>,
    pub fer: f64,
    pub unfrozen_mi: f64,
    pub frozen_mi: f64,
}

/// Runs density evolution at split `rho` and re-selects the frozen set.
pub fn design_split(problem: &PolarProblem, rho: f64) -> Result<SplitDesign> {
    ensure!(
        (0.0..=1.0).contains(&rho),
        Domain,
        "split fraction {rho} outside [0, 1]"
    );
    let (p1, p2) = split_powers(problem.p_avg, rho);
    let de = de_from_sigmas(
        problem.mapping,
        problem.n,
        llr_sigma(problem.h1, p1),
        llr_sigma(problem.h2, p2),
    )?;
    let s = summarize_design(&de, problem.k)?;
    Ok(SplitDesign {
        rho,
        p1,
        p2,
        frozen: s.frozen,
        fer: s.fer,
        unfrozen_mi: s.unfrozen_mi,
        frozen_mi: s.frozen_mi,
    })
}

/// Estimated SC frame error rate with the frozen set re-optimised for `rho`.
pub fn fer_of_split(problem: &PolarProblem, rho: f64) -> Result<f64> {
    Ok(design_split(problem, rho)?.fer)
}

/// One grid point of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSweepPoint {
    pub rho: f64,
    pub fer: f64,
    pub unfrozen_mi: f64,
    pub frozen_mi: f64,
    /// Distinct frozen sets numbered in order of first appearance along the sweep.
    pub frozen_set_id: usize,
}

/// An optimised allocation together with the grid it was found on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerOptimum {
    pub allocation: Allocation,
    pub rho: f64,
    pub mercury_rho: f64,
    pub sweep: Vec<PowerSweepPoint>,
}

/// Evaluates `grid_points` equally spaced splits on `[0, 1]` in parallel.
/// The result is ordered by `rho` and independent of the thread count.
pub fn evaluate_grid(problem: &PolarProblem, grid_points: usize) -> Result<Vec<SplitDesign>> {
    ensure!(
        grid_points >= 3,
        Argument,
        "need at least 3 grid points, got {grid_points}"
    );
    let last = (grid_points - 1) as f64;
    (0..grid_points)
        .into_par_iter()
        .map(|i| design_split(problem, i as f64 / last))
        .collect()
}

/// Numbers frozen sets by first appearance.
#[derive(Debug, Default)]
pub struct FrozenSetIds(HashMap<Vec<usize>, usize>);

impl FrozenSetIds {
    pub fn id(&mut self, frozen: &[usize]) -> usize {
        let next = self.0.len();
        *self.0.entry(frozen.to_vec()).or_insert(next)
    }
}

pub fn sweep_points(designs: &[SplitDesign], ids: &mut FrozenSetIds) -> Vec<PowerSweepPoint> {
    designs
        .iter()
        .map(|d| PowerSweepPoint {
            rho: d.rho,
            fer: d.fer,
            unfrozen_mi: d.unfrozen_mi,
            frozen_mi: d.frozen_mi,
            frozen_set_id: ids.id(&d.frozen),
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Target {
    Fer,
    UnfrozenMi,
}

impl Target {
    /// Value to be minimised.
    fn cost(self, d: &SplitDesign) -> f64 {
        match self {
            Target::Fer => d.fer,
            Target::UnfrozenMi => -d.unfrozen_mi,
        }
    }
}

/// Grid search, golden-section refinement around the best cell, and a final
/// comparison against the mercury/waterfilling split. Ties go to the
/// earliest candidate.
fn optimize(
    problem: &PolarProblem,
    designs: &[SplitDesign],
    target: Target,
) -> Result<(f64, f64, f64)> {
    let cost_at = |rho: f64| design_split(problem, rho).map(|d| target.cost(&d));
    let best = designs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            target
                .cost(a.1)
                .total_cmp(&target.cost(b.1))
                .then(a.0.cmp(&b.0))
        })
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let lo = designs[best.saturating_sub(1)].rho;
    let hi = designs[(best + 1).min(designs.len() - 1)].rho;
    let (refined, refined_cost) = golden_section_min(cost_at, lo, hi, RHO_REL_TOL, 1e-3)?;

    let mercury_rho = mercury_waterfill(problem.h1, problem.h2, problem.p_avg)?
        .allocation
        .rho();
    let mercury_cost = cost_at(mercury_rho)?;
    let candidates = [
        (designs[best].rho, target.cost(&designs[best])),
        (refined, refined_cost),
        (mercury_rho, mercury_cost),
    ];
    let (rho, cost) = candidates
        .into_iter()
        .reduce(|acc, c| if c.1 < acc.1 { c } else { acc })
        .expect("three candidates");
    Ok((rho, cost, mercury_rho))
}

fn optimum(
    problem: &PolarProblem,
    grid_points: usize,
    target: Target,
    method: AllocationMethod,
) -> Result<PowerOptimum> {
    let designs = evaluate_grid(problem, grid_points)?;
    let (rho, cost, mercury_rho) = optimize(problem, &designs, target)?;
    let objective = match target {
        Target::Fer => cost,
        Target::UnfrozenMi => -cost,
    };
    Ok(PowerOptimum {
        allocation: Allocation::from_rho(problem.p_avg, rho, method, objective),
        rho,
        mercury_rho,
        sweep: sweep_points(&designs, &mut FrozenSetIds::default()),
    })
}

/// Split minimising the estimated SC FER.
pub fn optimize_power_fer(problem: &PolarProblem, grid_points: usize) -> Result<PowerOptimum> {
    optimum(
        problem,
        grid_points,
        Target::Fer,
        AllocationMethod::FerOptimal,
    )
}

/// Split maximising the MI sum of the unfrozen bits.
pub fn optimize_power_unfrozen_mi(
    problem: &PolarProblem,
    grid_points: usize,
) -> Result<PowerOptimum> {
    optimum(
        problem,
        grid_points,
        Target::UnfrozenMi,
        AllocationMethod::UnfrozenMiOptimal,
    )
}

/// Both optimal splits from a single grid evaluation.
pub fn optimize_both(
    problem: &PolarProblem,
    designs: &[SplitDesign],
) -> Result<(Allocation, Allocation, f64)> {
    let (rho_fer, fer, mercury_rho) = optimize(problem, designs, Target::Fer)?;
    let (rho_mi, neg_mi, _) = optimize(problem, designs, Target::UnfrozenMi)?;
    Ok((
        Allocation::from_rho(problem.p_avg, rho_fer, AllocationMethod::FerOptimal, fer),
        Allocation::from_rho(
            problem.p_avg,
            rho_mi,
            AllocationMethod::UnfrozenMiOptimal,
            -neg_mi,
        ),
        mercury_rho,
    ))
}

/// Split rule applied at every power of a FER-versus-power curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    MercuryWaterfilling,
    FerOptimal,
}

/// Estimated FER at `p_avg` under `rule`, with the frozen set re-designed.
pub fn fer_at_power(
    problem: &PolarProblem,
    rule: SplitRule,
    grid_points: usize,
) -> Result<(f64, f64)> {
    match rule {
        SplitRule::MercuryWaterfilling => {
            let rho = mercury_waterfill(problem.h1, problem.h2, problem.p_avg)?
                .allocation
                .rho();
            Ok((rho, fer_of_split(problem, rho)?))
        }
        SplitRule::FerOptimal => {
            let opt = optimize_power_fer(problem, grid_points)?;
            Ok((opt.rho, opt.allocation.objective_value))
        }
    }
}

/// Smallest `P_avg` in dB on `[lo_db, hi_db]` at which the estimated FER
/// under `rule` drops to `target_fer`, by bisection to `tol_db`.
pub fn required_power_db(
    problem: &PolarProblem,
    rule: SplitRule,
    target_fer: f64,
    grid_points: usize,
    (lo_db, hi_db): (f64, f64),
    tol_db: f64,
) -> Result<f64> {
    ensure!(
        target_fer > 0.0 && target_fer < 1.0,
        Domain,
        "target FER {target_fer} outside (0, 1)"
    );
    let fer_at = |db: f64| -> Result<f64> {
        let p = problem.with_power(super::db_to_linear(db))?;
        Ok(fer_at_power(&p, rule, grid_points)?.1)
    };
    ensure!(
        fer_at(lo_db)? > target_fer,
        Argument,
        "FER already below {target_fer} at {lo_db} dB"
    );
    ensure!(
        fer_at(hi_db)? <= target_fer,
        Argument,
        "FER above {target_fer} at {hi_db} dB"
    );
    let (mut lo, mut hi) = (lo_db, hi_db);
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if fer_at(mid)? > target_fer {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
