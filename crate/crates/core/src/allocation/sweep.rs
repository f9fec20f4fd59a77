use serde::Serialize;

use super::polar::{
    design_split, evaluate_grid, optimize_both, FrozenSetIds, PolarProblem, SplitDesign,
};
use super::{linear_to_db, mercury_waterfill, na_rate, Allocation, MercuryWaterfill};
use crate::channel::ChannelPair;
use crate::error::Result;

/// One row of the power-sweep table. Grid rows have marker `grid`; the
/// optimal splits follow as extra rows marked with their method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub p1_db: f64,
    pub p2_db: f64,
    pub fer_estimate: f64,
    pub unfrozen_mi: f64,
    pub na_rate: f64,
    pub frozen_mi: f64,
    pub frozen_set_id: usize,
    pub marker: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub mercury: MercuryWaterfill,
    pub fer_optimal: Allocation,
    pub unfrozen_mi_optimal: Allocation,
}

impl SweepTable {
    pub fn grid(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.marker == "grid")
    }

    pub fn marked(&self, marker: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.marker == marker)
    }
}

/// Full sweep of `ρ` with the FER estimate, unfrozen/frozen MI sums and the
/// normal-approximation rate at `na_target_fer`, plus marker rows for the
/// mercury/waterfilling, FER-optimal and unfrozen-MI-optimal splits.
pub fn sweep_table(
    problem: &PolarProblem,
    grid_points: usize,
    na_target_fer: f64,
) -> Result<SweepTable> {
    let designs = evaluate_grid(problem, grid_points)?;
    let mercury = mercury_waterfill(problem.h1, problem.h2, problem.p_avg)?;
    let (fer_optimal, unfrozen_mi_optimal, _) = optimize_both(problem, &designs)?;

    let mut ids = FrozenSetIds::default();
    let n_uses = 1u64 << problem.n;
    let mut row = |d: &SplitDesign, marker: &'static str| -> Result<SweepRow> {
        let cp = ChannelPair::new(problem.h1, problem.h2, d.p1, d.p2, problem.p_avg)?;
        Ok(SweepRow {
            rho: d.rho,
            p1_db: linear_to_db(d.p1),
            p2_db: linear_to_db(d.p2),
            fer_estimate: d.fer,
            unfrozen_mi: d.unfrozen_mi,
            na_rate: na_rate(&cp, n_uses, na_target_fer)?,
            frozen_mi: d.frozen_mi,
            frozen_set_id: ids.id(&d.frozen),
            marker,
        })
    };
    let mut rows = Vec::with_capacity(designs.len() + 3);
    for d in &designs {
        rows.push(row(d, "grid")?);
    }
    for (rho, marker) in [
        (mercury.allocation.rho(), "mercury_waterfilling"),
        (fer_optimal.rho(), "fer_optimal"),
        (unfrozen_mi_optimal.rho(), "unfrozen_mi_optimal"),
    ] {
        rows.push(row(&design_split(problem, rho)?, marker)?);
    }
    Ok(SweepTable {
        rows,
        mercury,
        fer_optimal,
        unfrozen_mi_optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::MappingKind;

    #[test]
    fn table_has_grid_and_marker_rows() {
        let problem = PolarProblem::new(0.9, 0.3, 3.0, 6, 32, MappingKind::Sorted).unwrap();
        let t = sweep_table(&problem, 11, 1e-3).unwrap();
        assert_eq!(t.grid().count(), 11);
        assert_eq!(t.rows.len(), 14);
        let m = t.marked("mercury_waterfilling").unwrap();
        assert!((m.rho - t.mercury.allocation.rho()).abs() < 1e-15);
        assert!(t.marked("fer_optimal").unwrap().fer_estimate <= m.fer_estimate);
        assert_eq!(t.rows[0].p1_db, f64::NEG_INFINITY);
    }
}
