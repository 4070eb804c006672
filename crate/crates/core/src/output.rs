//! Text formatting shared by all data exports.

use crate::scalar::Real;

/// Formats a float with 17 significant digits in scientific notation.
pub fn fmt_f<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Joins formatted floats with commas.
pub fn csv_row<T: Real>(values: &[T]) -> String {
    values.iter().map(|&v| fmt_f(v)).collect::<Vec<_>>().join(",")
}
