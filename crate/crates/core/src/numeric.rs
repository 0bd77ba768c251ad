//! Shared floating-point tolerances and seed mixing.

/// Relative tolerance used for every `<=` comparison between accumulated reals.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor added to [`REL_TOL`] so comparisons against zero behave.
pub const ABS_TOL: f64 = 1e-12;

/// `lhs <= rhs` up to the shared relative/absolute tolerance.
#[inline]
pub fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * rhs.abs().max(lhs.abs()) + ABS_TOL
}

/// `a == b` up to the shared tolerance.
#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    leq(a, b) && leq(b, a)
}

/// SplitMix64 finalizer, used to derive independent child seeds.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a stream index.
#[inline]
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}
