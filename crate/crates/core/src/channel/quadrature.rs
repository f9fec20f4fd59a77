//! Expectations over a standard normal variable by Gauss–Hermite quadrature.

use std::num::NonZeroUsize;
use std::sync::LazyLock;

use gauss_quad::GaussHermite;

/// Number of nodes used for every MI, MMSE and moment integral.
pub const NODES: usize = 96;

/// Gauss–Hermite rule rescaled to integrate against the standard normal
/// density: `E[f(Z)] ≈ Σ w_i f(z_i)`.
#[derive(Debug, Clone)]
pub struct NormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NormalRule {
    pub fn new(degree: usize) -> Self {
        let degree = NonZeroUsize::new(degree).expect("quadrature degree must be positive");
        let rule = GaussHermite::new(degree);
        let scale = std::f64::consts::PI.sqrt().recip();
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x * std::f64::consts::SQRT_2, w * scale))
            .unzip();
        Self { nodes, weights }
    }

    /// The shared 96-node rule.
    pub fn standard() -> &'static NormalRule {
        static RULE: LazyLock<NormalRule> = LazyLock::new(|| NormalRule::new(NODES));
        &RULE
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_normal_moments() {
        let rule = NormalRule::standard();
        assert!((rule.expect(|_| 1.0) - 1.0).abs() < 1e-13);
        assert!(rule.expect(|z| z).abs() < 1e-13);
        assert!((rule.expect(|z| z * z) - 1.0).abs() < 1e-12);
        assert!((rule.expect(|z| z.powi(4)) - 3.0).abs() < 1e-11);
    }
}
