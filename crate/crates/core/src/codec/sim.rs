//! Monte-Carlo link simulation.
//!
//! Frame `i` draws its message from ChaCha8 stream `2i` and its noise from
//! stream `2i + 1` of the run seed, so results do not depend on how frames
//! are distributed over threads, and runs that differ only in the decoder or
//! the CRC see identical noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crc::CrcSpec;
use super::encoder::encode_in_place;
use super::sc::{CheckNode, ScDecoder};
use super::scl::SclDecoder;
use crate::channel::{llr_sigma, ChannelPair};
use crate::construction::{CodeSpec, Link, MappingKind};
use crate::error::{ensure, Result};

/// 97.5 % quantile of the standard normal.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DecoderKind {
    Sc,
    Scl { list_size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    /// Outer CRC occupying the last `width` information positions.
    #[serde(default)]
    pub crc: Option<CrcSpec>,
    #[serde(default)]
    pub check_node: CheckNode,
}

impl DecoderConfig {
    pub fn sc() -> Self {
        Self {
            kind: DecoderKind::Sc,
            crc: None,
            check_node: CheckNode::Exact,
        }
    }

    pub fn scl(list_size: usize, crc: Option<CrcSpec>) -> Self {
        Self {
            kind: DecoderKind::Scl { list_size },
            crc,
            check_node: CheckNode::Exact,
        }
    }
}

/// Stop after `target_frame_errors` frame errors or `max_frames` frames,
/// whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_frames: u64,
    pub target_frame_errors: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_frames: 10_000_000,
            target_frame_errors: 100,
        }
    }
}

/// Everything that determines a simulation run besides the code itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub h1: f64,
    pub h2: f64,
    pub p_avg: f64,
    pub p1: f64,
    pub p2: f64,
    pub decoder: DecoderConfig,
    #[serde(default)]
    pub stop: StopRule,
    pub seed: u64,
    /// Feed true bits forward in SC decoding and count per-bit errors.
    #[serde(default)]
    pub genie: bool,
}

/// Outcome of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub frames: u64,
    pub frame_errors: u64,
    /// Information-bit errors (CRC bits included).
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub fer_ci_95: (f64, f64),
    pub seed: u64,
    pub genie_mode: bool,
    /// Genie mode only: decision errors per `u` position.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_bit_errors: Option<Vec<u64>>,
    pub n: u32,
    pub k: usize,
    pub mapping: MappingKind,
    pub config: SimConfig,
}

impl SimReport {
    pub fn to_json(&self) -> Result<String> {
        crate::output::json_with_schema(self)
    }
}

/// Wilson score interval at 95 % confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// Consistent-Gaussian channel LLR `2 h √p y`.
pub fn channel_llr(y: f64, h: f64, p: f64) -> f64 {
    llr_sigma(h, p) * y
}

enum Decoder {
    Sc(ScDecoder),
    Scl(SclDecoder),
}

struct FrameOutcome {
    frame_error: bool,
    bit_errors: u32,
    wrong_decisions: Vec<u32>,
}

struct ChannelUse {
    amplitude: f64,
    gain: f64,
    power: f64,
}

struct Frame<'a> {
    spec: &'a CodeSpec,
    config: &'a SimConfig,
    info: Vec<usize>,
    links: Vec<Link>,
    channels: [ChannelUse; 2],
}

impl Frame<'_> {
    fn run(&self, index: u64, decoder: &mut Decoder) -> FrameOutcome {
        let len = self.spec.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(2 * index);
        let crc = self.config.decoder.crc;
        let message_len = self.info.len() - crc.map_or(0, |c| c.width as usize);
        let mut message: Vec<u8> = (0..message_len).map(|_| rng.random_range(0..2u8)).collect();
        if let Some(c) = crc {
            message = c.attach(&message);
        }
        let mut u = vec![0u8; len];
        for (&pos, &b) in self.info.iter().zip(&message) {
            u[pos] = b;
        }
        let mut x = u.clone();
        encode_in_place(&mut x);

        rng.set_stream(2 * index + 1);
        rng.set_word_pos(0);
        let llr: Vec<f64> = x
            .iter()
            .zip(&self.links)
            .map(|(&bit, &link)| {
                let ch = &self.channels[(link == Link::Second) as usize];
                let z: f64 = rng.sample(StandardNormal);
                let y = ch.gain * ch.amplitude * (1.0 - 2.0 * f64::from(bit)) + z;
                channel_llr(y, ch.gain, ch.power)
            })
            .collect();

        let (u_hat, decisions) = match decoder {
            Decoder::Sc(d) => {
                let out = d.decode(&llr, self.spec, self.config.genie.then_some(u.as_slice()));
                (out.u_hat, Some(out.decisions))
            }
            Decoder::Scl(d) => (d.decode(&llr, self.spec, crc.as_ref()).u_hat, None),
        };
        let bit_errors = self.info.iter().filter(|&&i| u_hat[i] != u[i]).count() as u32;
        let wrong_decisions = match (self.config.genie, decisions) {
            (true, Some(d)) => self
                .info
                .iter()
                .filter(|&&i| d[i] != u[i])
                .map(|&i| i as u32)
                .collect(),
            _ => Vec::new(),
        };
        FrameOutcome {
            frame_error: bit_errors > 0,
            bit_errors,
            wrong_decisions,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, spec: &CodeSpec) -> Result<()> {
        ChannelPair::new(self.h1, self.h2, self.p1, self.p2, self.p_avg)?;
        ensure!(
            self.stop.max_frames >= 1,
            Argument,
            "max_frames must be at least one"
        );
        ensure!(
            self.stop.target_frame_errors >= 1,
            Argument,
            "target_frame_errors must be at least one"
        );
        if let DecoderKind::Scl { list_size } = self.decoder.kind {
            ensure!(list_size >= 1, Argument, "list size must be at least one");
            ensure!(!self.genie, Argument, "genie mode needs the SC decoder");
        }
        if let Some(c) = self.decoder.crc {
            c.validate()?;
            ensure!(
                (c.width as usize) < spec.k(),
                Argument,
                "CRC width {} must be below the dimension {}",
                c.width,
                spec.k()
            );
        }
        Ok(())
    }
}

/// Runs the link simulation for `spec` until the stop rule fires.
pub fn simulate(spec: &CodeSpec, config: &SimConfig) -> Result<SimReport> {
    config.validate(spec)?;
    let frame = Frame {
        spec,
        config,
        info: spec.info_positions(),
        links: (0..spec.len())
            .map(|j| spec.mapping().link_of(spec.n(), j))
            .collect(),
        channels: [
            ChannelUse {
                amplitude: config.p1.sqrt(),
                gain: config.h1,
                power: config.p1,
            },
            ChannelUse {
                amplitude: config.p2.sqrt(),
                gain: config.h2,
                power: config.p2,
            },
        ],
    };
    let new_decoder = || match config.decoder.kind {
        DecoderKind::Sc => Decoder::Sc(ScDecoder::new(spec.n(), config.decoder.check_node)),
        DecoderKind::Scl { list_size } => Decoder::Scl(SclDecoder::new(
            spec.n(),
            list_size,
            config.decoder.check_node,
        )),
    };

    let batch = 64 * rayon::current_num_threads() as u64;
    let stop = config.stop;
    let (mut frames, mut frame_errors, mut bit_errors) = (0u64, 0u64, 0u64);
    let mut per_bit = config.genie.then(|| vec![0u64; spec.len()]);
    'outer: while frames < stop.max_frames && frame_errors < stop.target_frame_errors {
        let end = (frames + batch).min(stop.max_frames);
        let outcomes: Vec<FrameOutcome> = (frames..end)
            .into_par_iter()
            .map_init(new_decoder, |dec, i| frame.run(i, dec))
            .collect();
        for o in outcomes {
            frames += 1;
            frame_errors += u64::from(o.frame_error);
            bit_errors += u64::from(o.bit_errors);
            if let Some(counts) = per_bit.as_mut() {
                for i in o.wrong_decisions {
                    counts[i as usize] += 1;
                }
            }
            if frame_errors >= stop.target_frame_errors {
                break 'outer;
            }
        }
    }
    let info_bits = frame.info.len() as f64;
    Ok(SimReport {
        frames,
        frame_errors,
        bit_errors,
        fer: frame_errors as f64 / frames as f64,
        ber: if info_bits > 0.0 {
            bit_errors as f64 / (frames as f64 * info_bits)
        } else {
            0.0
        },
        fer_ci_95: wilson_interval(frame_errors, frames),
        seed: config.seed,
        genie_mode: config.genie,
        per_bit_errors: per_bit,
        n: spec.n(),
        k: spec.k(),
        mapping: spec.mapping(),
        config: *config,
    })
}

/// One point of a FER-versus-power sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerSweepRow {
    pub p_avg_db: f64,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
    pub frames: u64,
}

impl FerSweepRow {
    pub fn from_report(p_avg_db: f64, report: &SimReport) -> Self {
        Self {
            p_avg_db,
            fer: report.fer,
            fer_lo: report.fer_ci_95.0,
            fer_hi: report.fer_ci_95.1,
            frames: report.frames,
        }
    }
}
