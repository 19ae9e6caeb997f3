pub mod error;
pub mod interlace;
pub mod jacobi;
pub mod poly;
pub mod ratio_str;
pub mod realroots;
pub mod scanner;
pub mod stability;

pub use error::{Error, Result};
pub use jacobi::JacobiParams;
pub use poly::{RatPoly, Rational};

use num_traits::ToPrimitive;

/// Nearest `f64`, for display only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
