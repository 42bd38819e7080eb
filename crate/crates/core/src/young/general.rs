//! Young pairs `Phi = int phi`, `Psi = int phi^{-1}` for an arbitrary homeomorphism `phi`.

use crate::quadrature::composite;
use crate::scalar::Real;

/// Young functions generated by an increasing homeomorphism of `[0, inf)`.
pub struct GeneralYoungPair<T, F> {
    phi: F,
    panels: usize,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Real, F: Fn(T) -> T> GeneralYoungPair<T, F> {
    pub fn new(phi: F) -> Self {
        GeneralYoungPair { phi, panels: 64, _scalar: std::marker::PhantomData }
    }

    pub fn phi(&self, a: T) -> T {
        (self.phi)(a)
    }

    /// `phi^{-1}(b)` by bracketing and bisection.
    pub fn phi_inv(&self, b: T) -> T {
        if b <= T::zero() {
            return T::zero();
        }
        let mut hi = T::one();
        while (self.phi)(hi) < b {
            hi = hi * T::lit(2.0);
        }
        let mut lo = T::zero();
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if (self.phi)(mid) < b {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        (lo + hi) / T::lit(2.0)
    }

    /// `Phi(a) = int_0^a phi`.
    pub fn big_phi(&self, a: T) -> T {
        composite(T::zero(), a, self.panels, 8, |s| (self.phi)(s))
    }

    /// `Psi(b) = int_0^b phi^{-1}`.
    pub fn big_psi(&self, b: T) -> T {
        composite(T::zero(), b, self.panels, 8, |s| self.phi_inv(s))
    }
}
