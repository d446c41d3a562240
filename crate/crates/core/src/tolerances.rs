//! Numerical thresholds used across the engine and its test suites.
//!
//! Exact-arithmetic code (the characteristic-number module) never consults
//! these; they only govern floating-point contraction results.

/// Relative tolerance when comparing planned evaluation against the
/// brute-force oracle.
pub const REL_ORACLE: f64 = 1e-10;

/// Relative tolerance for invariance under transforms that lose conditioning
/// (symplectic slot transforms built from matrix exponentials).
pub const REL_INVARIANCE: f64 = 1e-8;

/// Relative tolerance for identities that hold up to float associativity only
/// (homogeneity, Frobenius identity, matching-term sums).
pub const REL_EXACT: f64 = 1e-12;

/// Absolute threshold below which a trial value counts as zero in sign
/// statistics. Structural zeros (e.g. the second theta invariant in half
/// dimension one) evaluate to pure rounding noise and must not be counted as
/// a sign.
pub const SIGN_ZERO_ABS: f64 = 1e-12;

/// Maximum admissible imaginary residue for an invariant of a tau-real
/// curvature tensor with real part `re`.
pub fn imag_threshold(re: f64) -> f64 {
    1e-10 * (1.0 + re.abs())
}

/// Relative closeness with a unit floor, so comparisons against structural
/// zeros do not divide by zero: `|a - b| <= rel * (1 + max(|a|, |b|))`.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Complex variant of [`close`].
pub fn close_c(a: num_complex::Complex64, b: num_complex::Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
}
