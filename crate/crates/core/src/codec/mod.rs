//! Encoder, channel interleaver, SC and CRC-aided SCL decoders and the
//! Monte-Carlo link simulator.

pub mod crc;
pub mod encoder;
pub mod sc;
pub mod scl;
pub mod sim;

pub use crc::{crc_attach, crc_check, CrcSpec};
pub use encoder::{deinterleave, encode, interleave};
pub use sc::{sc_decode, CheckNode, ScDecoder, ScOutput};
pub use scl::{scl_decode, SclDecoder, SclOutput};
pub use sim::{
    channel_llr, simulate, wilson_interval, DecoderConfig, DecoderKind, FerSweepRow, SimConfig,
    SimReport, StopRule,
};
