//! Successive-cancellation decoding in natural bit order.

use serde::{Deserialize, Serialize};

use crate::construction::CodeSpec;

/// Channel LLRs are clamped to this magnitude and NaN is read as an erasure.
pub const LLR_LIMIT: f64 = 1e9;

/// Check-node rule of the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckNode {
    /// Exact `2 atanh(tanh(a/2) tanh(b/2))`.
    #[default]
    Exact,
    /// `sign(a) sign(b) min(|a|, |b|)`.
    MinSum,
}

impl CheckNode {
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
        let min = sign * a.abs().min(b.abs());
        match self {
            CheckNode::MinSum => min,
            CheckNode::Exact => min + log1p_exp_neg((a + b).abs()) - log1p_exp_neg((a - b).abs()),
        }
    }
}

/// `ln(1 + e^{−x})` for `x ≥ 0`, zero once it drops below `1e-17`.
#[inline]
fn log1p_exp_neg(x: f64) -> f64 {
    if x > 40.0 {
        0.0
    } else {
        (-x).exp().ln_1p()
    }
}

/// Variable-node update given the left partial sum `u`.
#[inline]
pub fn g(a: f64, b: f64, u: u8) -> f64 {
    if u & 1 == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision: negative LLR decides `1`.
#[inline]
pub fn hard(l: f64) -> u8 {
    u8::from(l < 0.0)
}

pub fn sanitize_llr(l: f64) -> f64 {
    if l.is_nan() {
        0.0
    } else {
        l.clamp(-LLR_LIMIT, LLR_LIMIT)
    }
}

/// Result of one SC pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    /// Estimated `u`; frozen positions are zero.
    pub u_hat: Vec<u8>,
    /// Hard decision taken at every position before any genie substitution.
    pub decisions: Vec<u8>,
}

/// Reusable SC decoder for one block length.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: u32,
    check: CheckNode,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<u8>>,
    frozen_before: Vec<usize>,
}

impl ScDecoder {
    pub fn new(n: u32, check: CheckNode) -> Self {
        let alpha = (0..=n).map(|l| vec![0.0; 1 << (n - l)]).collect();
        let beta = (0..=n).map(|l| vec![0u8; 1 << (n - l)]).collect();
        Self {
            n,
            check,
            alpha,
            beta,
            frozen_before: vec![0; (1 << n) + 1],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Decodes `llr` (length `N`) under `spec`. With `genie`, every decision
    /// is fed forward as the corresponding true bit.
    ///
    /// Panics if the lengths disagree with the decoder's block length.
    pub fn decode(&mut self, llr: &[f64], spec: &CodeSpec, genie: Option<&[u8]>) -> ScOutput {
        let len = 1usize << self.n;
        assert_eq!(llr.len(), len, "LLR length");
        assert_eq!(spec.len(), len, "code length");
        if let Some(t) = genie {
            assert_eq!(t.len(), len, "genie length");
        }
        for (a, &l) in self.alpha[0].iter_mut().zip(llr) {
            *a = sanitize_llr(l);
        }
        for (i, &f) in spec.frozen_mask().iter().enumerate() {
            self.frozen_before[i + 1] = self.frozen_before[i] + usize::from(f);
        }
        let mut out = ScOutput {
            u_hat: vec![0; len],
            decisions: vec![0; len],
        };
        self.node(0, 0, spec.frozen_mask(), genie, &mut out);
        out
    }

    fn node(
        &mut self,
        level: usize,
        first: usize,
        frozen: &[bool],
        genie: Option<&[u8]>,
        out: &mut ScOutput,
    ) {
        let m = self.alpha[level].len();
        if self.frozen_before[first + m] - self.frozen_before[first] == m {
            // all-frozen subtree: every decision and partial sum is zero
            self.beta[level].iter_mut().for_each(|b| *b = 0);
            return;
        }
        if m == 1 {
            let decision = if frozen[first] {
                0
            } else {
                hard(self.alpha[level][0])
            };
            out.decisions[first] = decision;
            out.u_hat[first] = decision;
            self.beta[level][0] = genie.map_or(decision, |t| t[first] & 1);
            return;
        }
        let half = m / 2;
        let check = self.check;
        {
            let (upper, lower) = self.alpha.split_at_mut(level + 1);
            let (src, dst) = (&upper[level], &mut lower[0]);
            for j in 0..half {
                dst[j] = check.combine(src[j], src[j + half]);
            }
        }
        self.node(level + 1, first, frozen, genie, out);
        {
            let (upper, lower) = self.beta.split_at_mut(level + 1);
            upper[level][..half].copy_from_slice(&lower[0][..half]);
        }
        {
            let (upper, lower) = self.alpha.split_at_mut(level + 1);
            let (src, dst) = (&upper[level], &mut lower[0]);
            let left = &self.beta[level];
            for j in 0..half {
                dst[j] = g(src[j], src[j + half], left[j]);
            }
        }
        self.node(level + 1, first + half, frozen, genie, out);
        let (upper, lower) = self.beta.split_at_mut(level + 1);
        let (dst, right) = (&mut upper[level], &lower[0]);
        for j in 0..half {
            dst[j] ^= right[j];
        }
        dst[half..2 * half].copy_from_slice(&right[..half]);
    }
}

/// One-shot SC decoding with exact check nodes.
pub fn sc_decode(llr: &[f64], spec: &CodeSpec, genie: Option<&[u8]>) -> crate::Result<ScOutput> {
    crate::error::ensure!(
        llr.len() == spec.len(),
        Argument,
        "LLR length {} does not match N = {}",
        llr.len(),
        spec.len()
    );
    if let Some(t) = genie {
        crate::error::ensure!(t.len() == spec.len(), Argument, "genie length mismatch");
    }
    Ok(ScDecoder::new(spec.n(), CheckNode::Exact).decode(llr, spec, genie))
}
