//! Polar code construction over two parallel channels.

pub mod code_spec;
pub mod density;
pub mod mapping;
pub mod search;

pub use code_spec::{select_frozen, CodeSpec};
pub use density::{de_from_sigmas, de_ga, mi_minus, mi_plus, DeResult};
pub use mapping::{leaf_channels, Link, MappingKind};
pub use search::{exhaustive_mapping_search, mapping_counterexamples, mapping_criterion_relaxed};

use crate::error::{ensure, Result};

/// Analytic SC frame error rate `1 − Π_{i∈I} (1 − Q(σ_i / 2))`.
///
/// Evaluated as `−expm1(Σ ln(1 − pe_i))`, so that frame error rates far
/// below machine epsilon are not rounded to zero.
pub fn estimate_fer(de: &DeResult, info_set: &[usize]) -> Result<f64> {
    let mut log_success = 0.0;
    for &i in info_set {
        ensure!(
            i < de.len(),
            Argument,
            "info position {i} outside 0..{}",
            de.len()
        );
        log_success += (-de.bit_pe[i]).ln_1p();
    }
    Ok((-log_success.exp_m1()).clamp(0.0, 1.0))
}

/// Sum of the GA-MI of the given positions.
pub fn mi_sum(de: &DeResult, positions: &[usize]) -> f64 {
    positions.iter().map(|&i| de.bit_mi[i]).sum()
}

/// Frozen set, unfrozen-MI sum, frozen-MI sum and FER estimate of the best
/// `k`-dimensional code for `de`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSummary {
    pub frozen: Vec<usize>,
    pub fer: f64,
    pub unfrozen_mi: f64,
    pub frozen_mi: f64,
}

pub fn summarize_design(de: &DeResult, k: usize) -> Result<DesignSummary> {
    let frozen = select_frozen(de, k)?;
    let mut is_frozen = vec![false; de.len()];
    for &i in &frozen {
        is_frozen[i] = true;
    }
    let info: Vec<usize> = (0..de.len()).filter(|&i| !is_frozen[i]).collect();
    Ok(DesignSummary {
        fer: estimate_fer(de, &info)?,
        unfrozen_mi: mi_sum(de, &info),
        frozen_mi: mi_sum(de, &frozen),
        frozen,
    })
}
