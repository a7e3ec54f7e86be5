//! Scalar abstraction and small numeric helpers shared across modules.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum<Self>
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 converts to any Real")
}

pub(crate) fn real_usize<F: Real>(n: usize) -> F {
    real(n as f64)
}

pub(crate) fn real_u64<F: Real>(n: u64) -> F {
    real(n as f64)
}

/// Arithmetic mean. Empty input yields NaN.
pub fn mean<F: Real>(values: &[F]) -> F {
    if values.is_empty() {
        return F::nan();
    }
    values.iter().copied().sum::<F>() / real_usize(values.len())
}

/// Interpolated quantile of an ascending-sorted slice (linear between order
/// statistics, the numpy/R type-7 rule). The median of an even-count slice is
/// the midpoint of the two central values.
pub fn quantile_sorted<F: Real>(sorted: &[F], p: f64) -> F {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&p), "quantile fraction out of [0,1]");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w: F = real(h - lo as f64);
        sorted[lo] * (F::one() - w) + sorted[hi] * w
    }
}

/// Sorts a copy of `values` ascending and returns it. NaNs are not expected
/// in any caller; comparison falls back to `Equal` for them.
pub(crate) fn sorted<F: Real>(values: &[F]) -> Vec<F> {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}
