use crate::construction::mapping::{Link, MappingKind};
use crate::error::{ensure, Result};

/// `c = u G_n` over GF(2) in natural order, in place.
pub fn encode_in_place(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = len / 2;
    while half >= 1 {
        for block in bits.chunks_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, &y) in a.iter_mut().zip(b.iter()) {
                *x ^= y;
            }
        }
        half /= 2;
    }
}

/// `c = u G_n` with `G_n = [[1, 0], [1, 1]]^{⊗n}`.
pub fn encode(u: &[u8], n: u32) -> Result<Vec<u8>> {
    ensure!(n < usize::BITS, Argument, "code exponent {n} too large");
    ensure!(
        u.len() == 1usize << n,
        Argument,
        "message length {} does not match N = 2^{n}",
        u.len()
    );
    ensure!(
        u.iter().all(|&b| b <= 1),
        Argument,
        "message bits must be 0 or 1"
    );
    let mut c = u.to_vec();
    encode_in_place(&mut c);
    Ok(c)
}

/// Splits a codeword-length sequence into the two per-channel streams, each
/// in increasing position order.
pub fn interleave<T: Copy>(c: &[T], mapping: MappingKind) -> Result<(Vec<T>, Vec<T>)> {
    let n = code_exponent(c.len())?;
    let mut first = Vec::with_capacity(c.len() / 2);
    let mut second = Vec::with_capacity(c.len() / 2);
    for (j, &v) in c.iter().enumerate() {
        match mapping.link_of(n, j) {
            Link::First => first.push(v),
            Link::Second => second.push(v),
        }
    }
    Ok((first, second))
}

/// Inverse of [`interleave`].
pub fn deinterleave<T: Copy>(first: &[T], second: &[T], mapping: MappingKind) -> Result<Vec<T>> {
    ensure!(
        first.len() == second.len(),
        Argument,
        "stream lengths differ"
    );
    let n = code_exponent(2 * first.len())?;
    let (mut a, mut b) = (first.iter(), second.iter());
    (0..2 * first.len())
        .map(|j| {
            let v = match mapping.link_of(n, j) {
                Link::First => a.next(),
                Link::Second => b.next(),
            };
            Ok(*v.expect("streams hold N/2 entries each"))
        })
        .collect()
}

fn code_exponent(len: usize) -> Result<u32> {
    ensure!(
        len >= 2 && len.is_power_of_two(),
        Argument,
        "length {len} is not a power of two ≥ 2"
    );
    Ok(len.trailing_zeros())
}
