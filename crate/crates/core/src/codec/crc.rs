//! Bit-serial CRC over arbitrary-length bit sequences.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// CRC parameters in the usual Rocksoft form.
///
/// `polynomial` omits the leading `x^width` term. With `reflect_in` each
/// group of 8 message bits is processed LSB first (a trailing partial group
/// is reversed within its own length); with `reflect_out` the register is
/// bit-reversed before `xor_out` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    pub width: u32,
    pub polynomial: u64,
    #[serde(default)]
    pub init: u64,
    #[serde(default)]
    pub reflect_in: bool,
    #[serde(default)]
    pub reflect_out: bool,
    #[serde(default)]
    pub xor_out: u64,
}

impl Default for CrcSpec {
    /// 20-bit CRC with the primitive generator `x^20 + x^3 + 1`.
    fn default() -> Self {
        Self {
            width: 20,
            polynomial: 0x0_0009,
            init: 0,
            reflect_in: false,
            reflect_out: false,
            xor_out: 0,
        }
    }
}

impl CrcSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            (1..=64).contains(&self.width),
            Argument,
            "CRC width {} outside 1..=64",
            self.width
        );
        let mask = self.mask();
        ensure!(
            self.polynomial & !mask == 0 && self.init & !mask == 0 && self.xor_out & !mask == 0,
            Argument,
            "CRC parameters wider than {} bits",
            self.width
        );
        ensure!(
            self.polynomial & 1 == 1,
            Argument,
            "CRC polynomial must have a constant term"
        );
        Ok(())
    }

    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    /// CRC register value of a bit sequence.
    pub fn checksum(&self, bits: &[u8]) -> u64 {
        let mask = self.mask();
        let top = self.width - 1;
        let mut reg = self.init & mask;
        let mut feed = |b: u8| {
            let msb = (reg >> top) & 1;
            reg = (reg << 1) & mask;
            if msb ^ u64::from(b & 1) == 1 {
                reg ^= self.polynomial;
            }
        };
        if self.reflect_in {
            for group in bits.chunks(8) {
                group.iter().rev().for_each(|&b| feed(b));
            }
        } else {
            bits.iter().for_each(|&b| feed(b));
        }
        if self.reflect_out {
            reg = reg.reverse_bits() >> (64 - self.width);
        }
        (reg ^ self.xor_out) & mask
    }

    /// `width` check bits, most significant first.
    pub fn check_bits(&self, bits: &[u8]) -> Vec<u8> {
        let crc = self.checksum(bits);
        (0..self.width)
            .rev()
            .map(|i| ((crc >> i) & 1) as u8)
            .collect()
    }

    /// Message followed by its check bits.
    pub fn attach(&self, bits: &[u8]) -> Vec<u8> {
        let mut out = bits.to_vec();
        out.extend(self.check_bits(bits));
        out
    }

    /// Whether the trailing `width` bits are the CRC of the bits before them.
    pub fn check(&self, bits: &[u8]) -> bool {
        let w = self.width as usize;
        if bits.len() < w {
            return false;
        }
        let (msg, crc) = bits.split_at(bits.len() - w);
        self.check_bits(msg)
            .iter()
            .zip(crc)
            .all(|(a, &b)| *a == b & 1)
    }
}

/// [`CrcSpec::attach`] after validating the parameters.
pub fn crc_attach(bits: &[u8], spec: &CrcSpec) -> Result<Vec<u8>> {
    spec.validate()?;
    Ok(spec.attach(bits))
}

/// [`CrcSpec::check`] after validating the parameters.
pub fn crc_check(bits: &[u8], spec: &CrcSpec) -> Result<bool> {
    spec.validate()?;
    Ok(spec.check(bits))
}
