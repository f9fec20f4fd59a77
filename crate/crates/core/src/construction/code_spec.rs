use serde::{Deserialize, Serialize};

use super::density::{DeResult, MAX_N};
use super::mapping::MappingKind;
use crate::error::{ensure, Error, Result};
use crate::SCHEMA_VERSION;

/// A polar code `[N, K, I]` together with the channel mapping it was designed for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: u32,
    k: usize,
    frozen: Vec<bool>,
    mapping: MappingKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeSpecFile {
    #[serde(default = "current_schema")]
    schema_version: u32,
    n: u32,
    k: usize,
    mapping: MappingKind,
    frozen: Vec<usize>,
}

fn current_schema() -> u32 {
    SCHEMA_VERSION
}

impl CodeSpec {
    /// Builds a code from its frozen positions (any order, 0-based).
    pub fn new(n: u32, k: usize, frozen: &[usize], mapping: MappingKind) -> Result<Self> {
        ensure!(
            (1..=MAX_N).contains(&n),
            Argument,
            "code exponent {n} outside 1..={MAX_N}"
        );
        let len = 1usize << n;
        ensure!(
            k <= len,
            Argument,
            "dimension {k} exceeds block length {len}"
        );
        ensure!(
            frozen.len() == len - k,
            Argument,
            "expected {} frozen positions, got {}",
            len - k,
            frozen.len()
        );
        let mut mask = vec![false; len];
        for &i in frozen {
            ensure!(i < len, Argument, "frozen position {i} outside 0..{len}");
            ensure!(!mask[i], Argument, "frozen position {i} listed twice");
            mask[i] = true;
        }
        Ok(Self {
            n,
            k,
            frozen: mask,
            mapping,
        })
    }

    /// Freezes the `N − k` least reliable positions of `de`.
    pub fn from_design(de: &DeResult, k: usize, mapping: MappingKind) -> Result<Self> {
        ensure!(
            de.len().is_power_of_two() && de.len() >= 2,
            Argument,
            "density evolution length {} is not a code length",
            de.len()
        );
        let frozen = select_frozen(de, k)?;
        Self::new(de.len().trailing_zeros(), k, &frozen, mapping)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Block length `N = 2^n`.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mapping(&self) -> MappingKind {
        self.mapping
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frozen[i]).collect()
    }

    /// Unfrozen positions in increasing order.
    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.frozen[i]).collect()
    }

    pub fn to_json(&self) -> String {
        let file = CodeSpecFile {
            schema_version: SCHEMA_VERSION,
            n: self.n,
            k: self.k,
            mapping: self.mapping,
            frozen: self.frozen_positions(),
        };
        serde_json::to_string_pretty(&file).expect("code spec serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeSpecFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {}",
                file.schema_version
            )));
        }
        Self::new(file.n, file.k, &file.frozen, file.mapping)
    }
}

/// Indices of the `N − k` least reliable synthetic channels, ascending.
///
/// Reliability is the LLR width `σ_i` (equivalently the GA-MI); among equal
/// values the lower index is frozen first.
pub fn select_frozen(de: &DeResult, k: usize) -> Result<Vec<usize>> {
    ensure!(
        k <= de.len(),
        Argument,
        "dimension {k} exceeds block length {}",
        de.len()
    );
    let mut frozen: Vec<usize> = de.reliability_order()[..de.len() - k].to_vec();
    frozen.sort_unstable();
    Ok(frozen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::MiValue;
    use crate::construction::density::de_ga;

    fn de8() -> DeResult {
        let (i1, i2) = (MiValue::new(0.8).unwrap(), MiValue::new(0.2).unwrap());
        de_ga(MappingKind::Sorted, 3, i1, i2).unwrap()
    }

    #[test]
    fn extreme_dimensions() {
        let de = de8();
        assert!(select_frozen(&de, 8).unwrap().is_empty());
        assert_eq!(select_frozen(&de, 0).unwrap(), (0..8).collect::<Vec<_>>());
        assert!(select_frozen(&de, 9).is_err());
    }

    #[test]
    fn frozen_set_matches_sorted_mi() {
        let de = de8();
        let mut by_mi: Vec<usize> = (0..8).collect();
        by_mi.sort_by(|&a, &b| de.bit_mi[a].partial_cmp(&de.bit_mi[b]).unwrap());
        let mut expected = by_mi[..4].to_vec();
        expected.sort_unstable();
        assert_eq!(select_frozen(&de, 4).unwrap(), expected);
    }

    #[test]
    fn ties_freeze_lower_index_first() {
        let de = DeResult::from_sigmas(vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(select_frozen(&de, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn json_round_trip() {
        let spec = CodeSpec::from_design(&de8(), 4, MappingKind::Sorted).unwrap();
        let text = spec.to_json();
        assert!(text.contains("\"schema_version\""));
        assert_eq!(CodeSpec::from_json(&text).unwrap(), spec);
        assert_eq!(spec.info_positions().len(), 4);
    }

    #[test]
    fn rejects_inconsistent_specs() {
        assert!(CodeSpec::new(3, 4, &[0, 1, 2], MappingKind::Sorted).is_err());
        assert!(CodeSpec::new(3, 5, &[0, 1, 9], MappingKind::Sorted).is_err());
        assert!(CodeSpec::new(3, 5, &[0, 1, 1], MappingKind::Sorted).is_err());
        assert!(CodeSpec::new(0, 1, &[], MappingKind::Sorted).is_err());
        assert!(
            CodeSpec::from_json(r#"{"n":2,"k":1,"mapping":"diagonal","frozen":[0,1,2]}"#).is_err()
        );
        assert!(
            CodeSpec::from_json(r#"{"n":2,"k":1,"mapping":"sorted","frozen":[0,1,2]}"#).is_ok()
        );
        assert!(CodeSpec::from_json(
            r#"{"schema_version":7,"n":2,"k":4,"mapping":"sorted","frozen":[]}"#
        )
        .is_err());
    }
}
