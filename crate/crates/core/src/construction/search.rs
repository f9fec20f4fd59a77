//! Mapping comparison: the relaxed kernel criterion and exhaustive search
//! over all channel assignments of short codes.

use serde::Serialize;

use super::density::{evolve_leaves, mi_plus, sigma_of_mi};
use super::mapping::{link_pattern, Link, MappingKind};
use super::summarize_design;
use crate::channel::MiValue;
use crate::error::{ensure, Result};

/// Largest exponent for which [`exhaustive_mapping_search`] runs (`N = 16`).
pub const MAX_SEARCH_N: u32 = 4;

/// Relaxed mapping criterion with the MI proxy `1 − I⁺`, averaged over the
/// channel-side kernels.
///
/// The criterion sums the unreliability of the even-indexed (variable-node)
/// outputs of the first polarization level. Lower is better.
pub fn mapping_criterion_relaxed(mapping: MappingKind, i1: MiValue, i2: MiValue) -> f64 {
    match mapping {
        MappingKind::Sorted => 1.0 - mi_plus(i1, i2).get(),
        MappingKind::Alternating => {
            0.5 * ((1.0 - mi_plus(i1, i1).get()) + (1.0 - mi_plus(i2, i2).get()))
        }
    }
}

/// Outcome of searching every assignment of `N/2` positions to each channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingSearch {
    /// Link of each codeword position in the best assignment found.
    pub best_first_positions: Vec<usize>,
    pub best_fer: f64,
    pub sorted_fer: f64,
    pub alternating_fer: f64,
    pub assignments: usize,
}

/// Jointly minimises the estimated FER over channel assignments and frozen
/// sets for `N ≤ 16`. The first assignment reaching the minimum wins.
pub fn exhaustive_mapping_search(
    n: u32,
    i1: MiValue,
    i2: MiValue,
    k: usize,
) -> Result<MappingSearch> {
    ensure!(
        (1..=MAX_SEARCH_N).contains(&n),
        Argument,
        "exhaustive search needs 1 ≤ n ≤ {MAX_SEARCH_N}"
    );
    let len = 1usize << n;
    ensure!(
        k <= len,
        Argument,
        "dimension {k} exceeds block length {len}"
    );
    let (s1, s2) = (sigma_of_mi(i1), sigma_of_mi(i2));
    let fer_of = |first: &dyn Fn(usize) -> bool| -> Result<f64> {
        let leaves: Vec<f64> = (0..len).map(|j| if first(j) { s1 } else { s2 }).collect();
        Ok(summarize_design(&evolve_leaves(&leaves), k)?.fer)
    };
    let fixed = |m: MappingKind| {
        let pattern = link_pattern(m, n);
        fer_of(&|j| pattern[j] == Link::First)
    };
    let sorted_fer = fixed(MappingKind::Sorted)?;
    let alternating_fer = fixed(MappingKind::Alternating)?;

    let mut best: Option<(u32, f64)> = None;
    let mut assignments = 0;
    for mask in 0u32..(1 << len) {
        if mask.count_ones() as usize != len / 2 {
            continue;
        }
        assignments += 1;
        let fer = fer_of(&|j| mask >> j & 1 == 1)?;
        if best.is_none_or(|(_, b)| fer < b) {
            best = Some((mask, fer));
        }
    }
    let (mask, best_fer) = best.expect("at least one balanced assignment");
    Ok(MappingSearch {
        best_first_positions: (0..len).filter(|&j| mask >> j & 1 == 1).collect(),
        best_fer,
        sorted_fer,
        alternating_fer,
        assignments,
    })
}

/// A channel/dimension triple for which the alternating mapping has the
/// lower estimated FER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterexample {
    pub i1: f64,
    pub i2: f64,
    pub k: usize,
    pub sorted_fer: f64,
    pub alternating_fer: f64,
}

/// Scans all `(i1, i2, k)` with `i1 > i2` on the MI grid and every
/// `1 ≤ k < N`, reporting where alternating beats sorted by more than a
/// relative `1e-9`.
pub fn mapping_counterexamples(n: u32, mi_grid: &[f64]) -> Result<Vec<Counterexample>> {
    ensure!(
        (1..=MAX_SEARCH_N).contains(&n),
        Argument,
        "counterexample scan needs 1 ≤ n ≤ {MAX_SEARCH_N}"
    );
    let len = 1usize << n;
    let mut found = Vec::new();
    for &a in mi_grid {
        for &b in mi_grid {
            if a <= b {
                continue;
            }
            let (i1, i2) = (MiValue::new(a)?, MiValue::new(b)?);
            let (s1, s2) = (sigma_of_mi(i1), sigma_of_mi(i2));
            let de_for = |m: MappingKind| {
                let leaves: Vec<f64> = link_pattern(m, n)
                    .into_iter()
                    .map(|l| if l == Link::First { s1 } else { s2 })
                    .collect();
                evolve_leaves(&leaves)
            };
            let (de_s, de_a) = (
                de_for(MappingKind::Sorted),
                de_for(MappingKind::Alternating),
            );
            for k in 1..len {
                let sorted_fer = summarize_design(&de_s, k)?.fer;
                let alternating_fer = summarize_design(&de_a, k)?.fer;
                if alternating_fer < sorted_fer * (1.0 - 1e-9) {
                    found.push(Counterexample {
                        i1: a,
                        i2: b,
                        k,
                        sorted_fer,
                        alternating_fer,
                    });
                }
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: f64) -> MiValue {
        MiValue::new(v).unwrap()
    }

    #[test]
    fn criterion_prefers_sorted() {
        let (s, a) = (
            mapping_criterion_relaxed(MappingKind::Sorted, mi(0.8), mi(0.2)),
            mapping_criterion_relaxed(MappingKind::Alternating, mi(0.8), mi(0.2)),
        );
        assert!(s < a, "{s} {a}");
        let same = |m| mapping_criterion_relaxed(m, mi(0.6), mi(0.6));
        assert_eq!(same(MappingKind::Sorted), same(MappingKind::Alternating));
    }

    #[test]
    fn exhaustive_search_is_no_worse_than_either_mapping() {
        let r = exhaustive_mapping_search(3, mi(0.8), mi(0.3), 4).unwrap();
        assert_eq!(r.assignments, 70);
        assert!(r.best_fer <= r.sorted_fer && r.best_fer <= r.alternating_fer);
        assert_eq!(r.best_first_positions.len(), 4);
    }

    #[test]
    fn search_rejects_long_codes() {
        assert!(exhaustive_mapping_search(5, mi(0.5), mi(0.5), 4).is_err());
        assert!(mapping_counterexamples(0, &[0.5]).is_err());
    }
}
