//! Polar codes over two parallel binary-input AWGN channels with a shared
//! average power budget.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: J-function, BiAWGN mutual information, BPSK MMSE and the
//!   information-density moments used by the normal approximation.
//! * [`construction`]: codeword-to-channel mappings, density evolution with
//!   the Gaussian approximation, frozen-set selection and the analytic SC
//!   frame error rate.
//! * [`allocation`]: mercury/waterfilling, the FER-optimal and
//!   unfrozen-MI-optimal power splits, normal-approximation rates and the
//!   Shannon limit.
//! * [`codec`]: encoder, channel interleaver, SC and CRC-aided SCL decoders
//!   and the Monte-Carlo link simulator.
//!
//! All powers are linear and relative to unit noise variance; "dB" always
//! means `10 log10(P)`.

pub mod allocation;
pub mod channel;
pub mod codec;
pub mod construction;
pub mod error;
pub mod fuzz;
pub mod output;

pub use error::{Error, Result};

/// Version tag written into every file this crate emits.
pub const SCHEMA_VERSION: u32 = 1;
