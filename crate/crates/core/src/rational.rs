//! Exact rational arithmetic at the statistics layer.
//!
//! Means and proportions are kept as reduced `i128` ratios so that
//! equality-to-baseline claims are decidable; floats appear only at the
//! reporting boundary.

use num_traits::ToPrimitive;

/// Exact rational number. `i128` comfortably covers the worst case the
/// accumulators can produce (D < n² = 625 per structure, 10⁹ structures).
pub type Rational = num_rational::Ratio<i128>;

/// Shorthand constructor; reduces on the way in.
pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Renders a rational as `num/den`, always with an explicit denominator
/// (`2` prints as `2/1`). This is the wire format used in CSV output.
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Lossy conversion for plotting columns.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}
