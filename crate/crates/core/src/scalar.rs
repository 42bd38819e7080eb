//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every literal used by the crate is representable in `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Cubic smoothstep `3x^2 - 2x^3` on `[0, 1]`, clamped outside.
    #[inline]
    fn smoothstep(self) -> Self {
        let x = self.max(Self::zero()).min(Self::one());
        x * x * (Self::lit(3.0) - Self::lit(2.0) * x)
    }

    /// Derivative of [`Real::smoothstep`] with respect to its argument.
    #[inline]
    fn smoothstep_prime(self) -> Self {
        if self <= Self::zero() || self >= Self::one() {
            Self::zero()
        } else {
            Self::lit(6.0) * self * (Self::one() - self)
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Area of the unit `k`-sphere in `R^{k+1}`, `|S^k|`.
pub fn unit_sphere_area<T: Real>(k: usize) -> T {
    // |S^0| = 2, |S^1| = 2 pi, |S^k| = 2 pi |S^{k-2}| / (k - 1)
    let two_pi = T::lit(2.0) * T::PI();
    let mut even = T::lit(2.0);
    let mut odd = two_pi;
    if k == 0 {
        return even;
    }
    if k == 1 {
        return odd;
    }
    for j in 2..=k {
        let next = |prev: T| two_pi * prev / T::from_usize_lossy(j - 1);
        if j % 2 == 0 {
            even = next(even);
        } else {
            odd = next(odd);
        }
    }
    if k.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// `log(sum(exp(x_i)))` without overflow; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    let xs: Vec<T> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return m;
    }
    let s = xs.iter().fold(T::zero(), |acc, &x| acc + (x - m).exp());
    m + s.ln()
}
