use serde::{Deserialize, Serialize};

use crate::channel::MiValue;

/// Assignment of codeword positions to the two physical channels.
///
/// Positions are in natural (non-bit-reversed) order, so the first
/// polarization level seen from the channel combines positions `j` and
/// `j + N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingKind {
    /// First half of the codeword on `W1`, second half on `W2`: every
    /// channel-side 2×2 kernel sees one use of each channel.
    Sorted,
    /// Even positions on `W1`, odd positions on `W2`: identical channels are
    /// combined during the first `n − 1` levels.
    Alternating,
}

impl MappingKind {
    pub const ALL: [MappingKind; 2] = [MappingKind::Sorted, MappingKind::Alternating];

    /// Which channel carries codeword position `position` of a length-`2^n` code.
    pub fn link_of(self, n: u32, position: usize) -> Link {
        let half = 1usize << (n - 1);
        let first = match self {
            MappingKind::Sorted => position < half,
            MappingKind::Alternating => position % 2 == 0,
        };
        if first {
            Link::First
        } else {
            Link::Second
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MappingKind::Sorted => "sorted",
            MappingKind::Alternating => "alternating",
        }
    }
}

impl std::str::FromStr for MappingKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sorted" => Ok(MappingKind::Sorted),
            "alternating" => Ok(MappingKind::Alternating),
            other => Err(crate::Error::Parse(format!("unknown mapping '{other}'"))),
        }
    }
}

/// One of the two parallel channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    First,
    Second,
}

/// Per-position link assignment for a length-`2^n` codeword.
pub fn link_pattern(mapping: MappingKind, n: u32) -> Vec<Link> {
    (0..1usize << n).map(|j| mapping.link_of(n, j)).collect()
}

/// MI of the channel seen by each codeword position.
pub fn leaf_channels(mapping: MappingKind, n: u32, i1: MiValue, i2: MiValue) -> Vec<MiValue> {
    link_pattern(mapping, n)
        .into_iter()
        .map(|link| match link {
            Link::First => i1,
            Link::Second => i2,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: f64) -> MiValue {
        MiValue::new(v).unwrap()
    }

    #[test]
    fn single_kernel_gets_both_channels() {
        for mapping in MappingKind::ALL {
            assert_eq!(
                leaf_channels(mapping, 1, mi(0.8), mi(0.2)),
                vec![mi(0.8), mi(0.2)]
            );
        }
    }

    #[test]
    fn patterns_for_small_codes() {
        use Link::*;
        assert_eq!(
            link_pattern(MappingKind::Sorted, 2),
            vec![First, First, Second, Second]
        );
        assert_eq!(
            link_pattern(MappingKind::Alternating, 3),
            vec![First, Second, First, Second, First, Second, First, Second]
        );
    }

    #[test]
    fn half_of_the_positions_per_channel() {
        for mapping in MappingKind::ALL {
            for n in 1..8 {
                let leaves = leaf_channels(mapping, n, mi(0.9), mi(0.3));
                assert_eq!(
                    leaves.iter().filter(|&&v| v == mi(0.9)).count(),
                    1 << (n - 1)
                );
            }
        }
    }

    #[test]
    fn equal_channels_make_mappings_identical() {
        assert_eq!(
            leaf_channels(MappingKind::Sorted, 5, mi(0.4), mi(0.4)),
            leaf_channels(MappingKind::Alternating, 5, mi(0.4), mi(0.4))
        );
    }

    #[test]
    fn channel_side_kernels() {
        // sorted: j and j + N/2 on different links; alternating: same link
        let n = 4;
        let half = 1 << (n - 1);
        for j in 0..half {
            assert_ne!(
                MappingKind::Sorted.link_of(n, j),
                MappingKind::Sorted.link_of(n, j + half)
            );
            assert_eq!(
                MappingKind::Alternating.link_of(n, j),
                MappingKind::Alternating.link_of(n, j + half)
            );
        }
    }
}
