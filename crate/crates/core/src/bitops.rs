//! Bit gathering over packed realizations.

/// Gathers the bits of `x` selected by `mask` into the low bits, lowest first.
pub(crate) fn pext(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= (x >> b & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`pext`]: spreads the low bits of `x` over the set bits of `mask`.
pub(crate) fn pdep(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= (x >> k & 1) << b;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Mask of the bits of messages `ms` when each message is `t` bits wide.
pub(crate) fn message_bits(ms: &[usize], t: u32) -> u64 {
    let tm = (1u64 << t) - 1;
    ms.iter().fold(0, |acc, &m| acc | tm << (m as u32 * t))
}

pub(crate) fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
