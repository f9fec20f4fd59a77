//! Density evolution with the Gaussian approximation.
//!
//! Every synthetic channel is summarised by the standard deviation `σ` of a
//! consistent Gaussian LLR, equivalently by its MI `J(σ)`. The 2×2 kernel
//! maps two input channels to
//!
//! ```text
//! I⁻ = 1 − J( sqrt( J⁻¹(1 − I₁)² + J⁻¹(1 − I₂)² ) )
//! I⁺ = J( sqrt( J⁻¹(I₁)² + J⁻¹(I₂)² ) )
//! ```
//!
//! The recursion is carried out on `σ` rather than on MI so that channels
//! with MI within `1e-16` of one keep their reliability ordering and their
//! error probability `Q(σ/2)` does not hit an artificial floor.

use serde::{Deserialize, Serialize};

use super::mapping::{link_pattern, Link, MappingKind};
use crate::channel::jfunc::{j, j_flip, j_inv_raw};
use crate::channel::special::q_func;
use crate::channel::MiValue;
use crate::error::{ensure, Result};

/// Largest supported code exponent (`N = 2^24`).
pub const MAX_N: u32 = 24;

/// MI values are clamped to this distance from one before inversion.
pub const MI_CEILING_GAP: f64 = 1e-12;

/// Per-bit outcome of density evolution, indexed by `u` position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeResult {
    /// LLR standard deviation of each synthetic channel.
    pub bit_sigma: Vec<f64>,
    /// `I(U_i; Y | U_1^{i−1})` under the Gaussian approximation.
    pub bit_mi: Vec<f64>,
    /// Genie-aided error probability `Q(σ_i / 2)`.
    pub bit_pe: Vec<f64>,
}

impl DeResult {
    pub fn from_sigmas(bit_sigma: Vec<f64>) -> Self {
        let bit_mi = bit_sigma.iter().map(|&s| j(s)).collect();
        let bit_pe = bit_sigma.iter().map(|&s| q_func(0.5 * s)).collect();
        Self {
            bit_sigma,
            bit_mi,
            bit_pe,
        }
    }

    pub fn len(&self) -> usize {
        self.bit_sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bit_sigma.is_empty()
    }

    /// Positions ordered from least to most reliable; equal reliabilities
    /// keep index order.
    pub fn reliability_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.bit_sigma[a]
                .total_cmp(&self.bit_sigma[b])
                .then(a.cmp(&b))
        });
        order
    }
}

/// LLR width of the check-node (`−`) output.
#[inline]
pub fn sigma_minus(s1: f64, s2: f64) -> f64 {
    if s1 <= 0.0 || s2 <= 0.0 {
        return 0.0;
    }
    let t1 = j_flip(s1);
    let t2 = j_flip(s2);
    j_flip((t1 * t1 + t2 * t2).sqrt())
}

/// LLR width of the variable-node (`+`) output.
#[inline]
pub fn sigma_plus(s1: f64, s2: f64) -> f64 {
    (s1 * s1 + s2 * s2).sqrt()
}

/// LLR width of a channel with the given MI, clamped below one.
pub fn sigma_of_mi(mi: MiValue) -> f64 {
    j_inv_raw(mi.get().min(1.0 - MI_CEILING_GAP))
}

/// `I⁻` of the 2×2 kernel.
pub fn mi_minus(i1: MiValue, i2: MiValue) -> MiValue {
    MiValue::saturating(j(sigma_minus(sigma_of_mi(i1), sigma_of_mi(i2))))
}

/// `I⁺` of the 2×2 kernel.
pub fn mi_plus(i1: MiValue, i2: MiValue) -> MiValue {
    MiValue::saturating(j(sigma_plus(sigma_of_mi(i1), sigma_of_mi(i2))))
}

/// Density evolution for the given mapping and channel MIs.
pub fn de_ga(mapping: MappingKind, n: u32, i1: MiValue, i2: MiValue) -> Result<DeResult> {
    de_from_sigmas(mapping, n, sigma_of_mi(i1), sigma_of_mi(i2))
}

/// Density evolution starting from the channel LLR widths `σ_i = 2 h_i √p_i`.
pub fn de_from_sigmas(mapping: MappingKind, n: u32, s1: f64, s2: f64) -> Result<DeResult> {
    ensure!(
        (1..=MAX_N).contains(&n),
        Argument,
        "code exponent {n} outside 1..={MAX_N}"
    );
    ensure!(
        s1 >= 0.0 && s2 >= 0.0 && s1.is_finite() && s2.is_finite(),
        Domain,
        "LLR widths must be finite and non-negative, got ({s1}, {s2})"
    );
    let leaves: Vec<f64> = link_pattern(mapping, n)
        .into_iter()
        .map(|link| match link {
            Link::First => s1,
            Link::Second => s2,
        })
        .collect();
    Ok(evolve_leaves(&leaves))
}

/// Density evolution for an arbitrary per-position vector of leaf LLR widths
/// (length a power of two).
pub fn evolve_leaves(leaves: &[f64]) -> DeResult {
    assert!(
        leaves.len().is_power_of_two(),
        "leaf count must be a power of two"
    );
    let mut out = Vec::with_capacity(leaves.len());
    evolve(shortest_period(leaves.to_vec()), leaves.len(), &mut out);
    DeResult::from_sigmas(out)
}

/// `block` holds one period of a length-`len` block of LLR widths. Blocks
/// produced by the two mappings stay periodic with period one or two below
/// the first level, so the whole evolution costs `O(N)` kernel evaluations.
fn evolve(block: Vec<f64>, len: usize, out: &mut Vec<f64>) {
    if len == 1 {
        out.push(block[0]);
        return;
    }
    let half = len / 2;
    let (minus, plus): (Vec<f64>, Vec<f64>) = if block.len() == len {
        let (a, b) = block.split_at(half);
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (sigma_minus(x, y), sigma_plus(x, y)))
            .unzip()
    } else {
        // the period divides `half`, so position j pairs with an equal value
        block
            .iter()
            .map(|&x| (sigma_minus(x, x), sigma_plus(x, x)))
            .unzip()
    };
    evolve(shortest_period(minus), half, out);
    evolve(shortest_period(plus), half, out);
}

fn shortest_period(mut v: Vec<f64>) -> Vec<f64> {
    let mut p = 1;
    while p < v.len() {
        if (p..v.len()).all(|i| v[i].to_bits() == v[i - p].to_bits()) {
            v.truncate(p);
            return v;
        }
        p *= 2;
    }
    v
}
