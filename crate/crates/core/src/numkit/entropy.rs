//! Entropy helpers in bits, with the convention 0 log 0 = 0.

/// -x log2 x, zero for x <= 0 (tiny negative eigenvalues from roundoff).
pub fn neg_xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy of a probability vector (or von Neumann entropy of a spectrum).
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| neg_xlog2x(p)).sum()
}
