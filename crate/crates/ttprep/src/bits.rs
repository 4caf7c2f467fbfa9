//! The crate-wide bit/qubit convention, pinned in one place.
//!
//! A basis index `i` of a `d`-qubit register decomposes as
//! `i = Σ_k b_k · 2^(d-k)` for `k = 1..=d`, so **qubit 1 holds the most
//! significant bit**. TT core `k`, circuit qubit `k`, and bit `b_k` all refer
//! to the same position. Every module that converts between flat indices and
//! bit vectors goes through these helpers; endianness bugs are the dominant
//! cross-module failure mode and this is the single definition.

use alloc::vec::Vec;

/// Bits of `i` as `(b_1, …, b_d)`, most significant first.
///
/// Callers are expected to have checked `i < 2^d`; the public, validating
/// wrapper is [`crate::quantize::binary_index`].
pub fn index_to_bits(i: u64, d: usize) -> Vec<u8> {
    (0..d).map(|k| ((i >> (d - 1 - k)) & 1) as u8).collect()
}

/// Inverse of [`index_to_bits`]: `Σ b_k · 2^(d-k)`.
pub fn bits_to_index(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

/// Bit carried by qubit `k` (1-based) in basis index `i` of a `d`-qubit register.
pub fn bit_of(i: u64, d: usize, k: usize) -> u8 {
    debug_assert!(k >= 1 && k <= d);
    ((i >> (d - k)) & 1) as u8
}

/// Position of qubit `k`'s bit counted from the least significant end,
/// i.e. the shift amount such that `i >> shift & 1` is qubit `k`'s bit.
pub fn shift_of(d: usize, k: usize) -> usize {
    debug_assert!(k >= 1 && k <= d);
    d - k
}

/// `x` with its lowest `width` bits reversed.
///
/// Gate-local basis indices put the first-listed support qubit in the most
/// significant position while the global convention stores that qubit in the
/// least significant bit of the support's field, so every local/global
/// crossing is one reversal.
pub fn reverse_bits(x: usize, width: usize) -> usize {
    (0..width).fold(0, |acc, t| (acc << 1) | ((x >> t) & 1))
}
