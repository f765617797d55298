//! Number formatting shared by every text output.

/// `x` with 17 significant digits in scientific notation, e.g. `1.0000000000000000e0`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional value as a CSV field (empty when absent).
pub fn opt_sig17(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}
