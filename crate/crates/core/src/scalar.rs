//! Scalar abstraction for reward arithmetic.
//!
//! The planning model is exact integer arithmetic (units, cents, minutes).
//! Scores, decay and the weighted reward are real-valued and generic over
//! [`Scalar`], implemented for `f32` and `f64`.

use num_traits::Float;

pub trait Scalar: Float + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self {
        Self::from(v).expect("integer representable in scalar")
    }

    fn from_f64(v: f64) -> Self {
        Self::from(v).expect("f64 representable in scalar")
    }

    fn hundred() -> Self {
        Self::from_i64(100)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `100 * num / den` with `den == 0` treated as a vacuous 100.
pub fn percent<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        return T::hundred();
    }
    T::hundred() * T::from_i64(num as i64) / T::from_i64(den as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_handles_vacuous_case() {
        assert_eq!(percent::<f64>(0, 0), 100.0);
        assert_eq!(percent::<f64>(50, 100), 50.0);
        assert_eq!(percent::<f32>(63, 63), 100.0);
    }
}
