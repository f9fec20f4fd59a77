//! Entry points for the fuzz targets. Each accepts arbitrary bytes and must
//! neither panic nor loop; they also assert round-trip properties.

use crate::codec::{CheckNode, CrcSpec, ScDecoder, SclDecoder, SimConfig};
use crate::construction::{CodeSpec, MappingKind};

/// Largest code exponent exercised by the decoder targets.
const MAX_FUZZ_N: u32 = 8;

/// Parses a code description; valid ones must survive a JSON round trip.
pub fn code_spec_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = CodeSpec::from_json(text) {
        let again = CodeSpec::from_json(&spec.to_json()).expect("re-parse");
        assert_eq!(again, spec);
        assert_eq!(spec.info_positions().len(), spec.k());
    }
}

/// Parses and validates a simulation configuration.
pub fn sim_config_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = serde_json::from_str::<SimConfig>(text) {
        let spec = CodeSpec::new(3, 4, &[0, 1, 2, 4], MappingKind::Sorted).expect("fixed code");
        let _ = cfg.validate(&spec);
    }
}

struct DecoderInput {
    spec: CodeSpec,
    llr: Vec<f64>,
    list: usize,
    crc: Option<CrcSpec>,
}

/// Layout: `n`, list size, CRC width, frozen mask bytes (`N/8`, at least
/// one), then little-endian `f64` LLRs, zero-padded.
fn decoder_input(data: &[u8]) -> Option<DecoderInput> {
    let (&n_byte, rest) = data.split_first()?;
    let (&list_byte, rest) = rest.split_first()?;
    let (&crc_byte, rest) = rest.split_first()?;
    let n = u32::from(n_byte) % MAX_FUZZ_N + 1;
    let len = 1usize << n;
    let mask_len = len.div_ceil(8);
    let (mask, rest) = rest.split_at(mask_len.min(rest.len()));
    let frozen: Vec<usize> = (0..len)
        .filter(|&i| mask.get(i / 8).is_some_and(|b| b >> (i % 8) & 1 == 1))
        .collect();
    let k = len - frozen.len();
    let spec = CodeSpec::new(n, k, &frozen, MappingKind::Sorted).ok()?;
    let mut llr: Vec<f64> = rest
        .chunks(8)
        .map(|c| {
            let mut b = [0u8; 8];
            b[..c.len()].copy_from_slice(c);
            f64::from_le_bytes(b)
        })
        .collect();
    llr.resize(len, 0.0);
    let width = u32::from(crc_byte % 9);
    let crc = (width >= 1 && (width as usize) <= k).then(|| CrcSpec {
        width,
        polynomial: 1 | (u64::from(crc_byte) & ((1 << width) - 1)),
        ..CrcSpec::default()
    });
    Some(DecoderInput {
        spec,
        llr,
        list: usize::from(list_byte % 8) + 1,
        crc,
    })
}

/// SC decoding of arbitrary LLRs, including NaN and infinities.
pub fn sc_decode(data: &[u8]) {
    let Some(input) = decoder_input(data) else {
        return;
    };
    for check in [CheckNode::Exact, CheckNode::MinSum] {
        let out = ScDecoder::new(input.spec.n(), check).decode(&input.llr, &input.spec, None);
        assert!(input
            .spec
            .frozen_positions()
            .iter()
            .all(|&i| out.u_hat[i] == 0));
    }
}

/// SCL decoding of arbitrary LLRs; a list of one must agree with SC.
pub fn scl_decode(data: &[u8]) {
    let Some(input) = decoder_input(data) else {
        return;
    };
    let spec = &input.spec;
    let mut scl = SclDecoder::new(spec.n(), input.list, CheckNode::Exact);
    let out = scl.decode(&input.llr, spec, input.crc.as_ref());
    assert!(spec.frozen_positions().iter().all(|&i| out.u_hat[i] == 0));
    let single = SclDecoder::new(spec.n(), 1, CheckNode::Exact).decode(&input.llr, spec, None);
    let sc = ScDecoder::new(spec.n(), CheckNode::Exact).decode(&input.llr, spec, None);
    assert_eq!(single.u_hat, sc.u_hat);
}

/// CRC attach/check over an arbitrary parameter set and message.
pub fn crc_check(data: &[u8]) {
    if data.len() < 3 {
        return;
    }
    let width = u32::from(data[0] % 64) + 1;
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    let spec = CrcSpec {
        width,
        polynomial: (u64::from(data[1]) << 8 | 1) & mask,
        init: u64::from(data[2]).wrapping_mul(0x9E37_79B9_7F4A_7C15) & mask,
        reflect_in: data[1] & 1 == 1,
        reflect_out: data[2] & 1 == 1,
        xor_out: 0,
    };
    if spec.validate().is_err() {
        return;
    }
    let bits: Vec<u8> = data[3..].iter().map(|b| b & 1).collect();
    let word = spec.attach(&bits);
    assert!(spec.check(&word));
    let _ = spec.check(&data[3..]);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harnesses_accept_garbage() {
        let inputs: [&[u8]; 5] = [
            b"",
            b"{\"n\":2,\"k\":4,\"mapping\":\"sorted\",\"frozen\":[]}",
            &[3, 7, 5, 0x0F, 0, 0, 0, 0, 0, 0xF8, 0x7F],
            &[
                200, 255, 255, 255, 255, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13,
            ],
            &[0xFF; 64],
        ];
        for d in inputs {
            code_spec_json(d);
            sim_config_json(d);
            sc_decode(d);
            scl_decode(d);
            crc_check(d);
        }
    }
}
