use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A radial function `k^2(r) >= 0`; the model manifold generated from it has radial
/// sectional curvature `-k^2(r)`.
///
/// The log-form envelopes are held at the constant `cap` on `[0, r0]` and blended into
/// their asymptotic formula over `[r0, 2 r0]` with a C^1 smoothstep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile<T> {
    /// Constant curvature `-k2`.
    Constant { k2: T },
    /// Upper curvature envelope `(1 + eps) / (r^2 log r)`.
    UpperLog { eps: T, r0: T, cap: T },
    /// Lower curvature envelope `(log r)^{2 eps_bar} / r^2`.
    LowerLog { eps_bar: T, r0: T, cap: T },
}

impl<T: Real> RadialProfile<T> {
    pub fn flat() -> Self {
        RadialProfile::Constant { k2: T::zero() }
    }

    pub fn hyperbolic() -> Self {
        RadialProfile::Constant { k2: T::one() }
    }

    /// Curvature `-1/(r^2 log r)` outside `2 r0`: the borderline between the solvable
    /// and the parabolic regime.
    pub fn borderline(r0: T, cap: T) -> Self {
        RadialProfile::UpperLog {
            eps: T::zero(),
            r0,
            cap,
        }
    }

    pub fn k_squared(&self, r: T) -> T {
        match *self {
            RadialProfile::Constant { k2 } => k2,
            RadialProfile::UpperLog { eps, r0, cap } => blend(r, r0, cap, |t| upper_formula(eps, t)),
            RadialProfile::LowerLog { eps_bar, r0, cap } => {
                blend(r, r0, cap, |t| lower_formula(eps_bar, t))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialProfile::Constant { k2 } => {
                if !(k2 >= T::zero() && k2.is_finite()) {
                    return Err(Error::param("k2", "must be finite and nonnegative"));
                }
            }
            RadialProfile::UpperLog { eps, r0, cap } => {
                check_log_params(r0, cap)?;
                if !(eps >= T::zero() && eps.is_finite()) {
                    return Err(Error::param("eps", "must be finite and nonnegative"));
                }
            }
            RadialProfile::LowerLog { eps_bar, r0, cap } => {
                check_log_params(r0, cap)?;
                if !(eps_bar >= T::zero() && eps_bar.is_finite()) {
                    return Err(Error::param("eps_bar", "must be finite and nonnegative"));
                }
            }
        }
        Ok(())
    }
}

fn check_log_params<T: Real>(r0: T, cap: T) -> Result<()> {
    if !(r0 > T::one() && r0.is_finite()) {
        return Err(Error::param("r0", "must exceed 1 so that log r > 0 on the formula range"));
    }
    if !(cap >= T::zero() && cap.is_finite()) {
        return Err(Error::param("cap", "must be finite and nonnegative"));
    }
    Ok(())
}

fn upper_formula<T: Real>(eps: T, r: T) -> T {
    (T::one() + eps) / (r * r * r.ln())
}

fn lower_formula<T: Real>(eps_bar: T, r: T) -> T {
    r.ln().powf(T::lit(2.0) * eps_bar) / (r * r)
}

fn blend<T: Real>(r: T, r0: T, cap: T, formula: impl Fn(T) -> T) -> T {
    if r <= r0 {
        cap
    } else if r >= r0 + r0 {
        formula(r)
    } else {
        let s = ((r - r0) / r0).smoothstep();
        (T::one() - s) * cap + s * formula(r)
    }
}

/// Two-sided radial curvature bounds `-b^2(r) <= K <= -a^2(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile<T> {
    pub eps: T,
    pub eps_bar: T,
    #[serde(rename = "R0")]
    pub r0: T,
    pub cap: T,
}

impl<T: Real> CurvatureProfile<T> {
    pub fn new(eps: T, eps_bar: T, r0: T, cap: T) -> Result<Self> {
        let p = CurvatureProfile { eps, eps_bar, r0, cap };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_bar > T::zero() && self.eps > self.eps_bar && self.eps.is_finite()) {
            return Err(Error::param(
                "eps_bar",
                format!(
                    "curvature bounds require eps > eps_bar > 0 (got eps = {}, eps_bar = {})",
                    self.eps, self.eps_bar
                ),
            ));
        }
        check_log_params(self.r0, self.cap)?;
        // a^2 <= b^2 on the formula range iff (log r)^{1 + 2 eps_bar} >= 1 + eps; the left
        // side increases with r and the blend preserves the order.
        let lhs = self.r0.ln().powf(T::one() + T::lit(2.0) * self.eps_bar);
        if lhs < T::one() + self.eps {
            return Err(Error::param(
                "R0",
                format!(
                    "envelopes cross: need (log R0)^(1 + 2 eps_bar) >= 1 + eps, got {} < {}",
                    lhs,
                    T::one() + self.eps
                ),
            ));
        }
        Ok(())
    }

    /// Upper curvature envelope `a^2`.
    pub fn upper(&self) -> RadialProfile<T> {
        RadialProfile::UpperLog {
            eps: self.eps,
            r0: self.r0,
            cap: self.cap,
        }
    }

    /// Lower curvature envelope `b^2`.
    pub fn lower(&self) -> RadialProfile<T> {
        RadialProfile::LowerLog {
            eps_bar: self.eps_bar,
            r0: self.r0,
            cap: self.cap,
        }
    }

    pub fn a_squared(&self, r: T) -> T {
        self.upper().k_squared(r)
    }

    pub fn b_squared(&self, r: T) -> T {
        self.lower().k_squared(r)
    }
}
