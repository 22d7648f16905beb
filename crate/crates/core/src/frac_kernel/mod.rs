//! Fractional-calculus primitives shared by the scalar recurrences, the PDE
//! solver and the reference solutions.

mod contour;
mod gamma;
mod mittag_leffler;
mod psi;
pub mod quad;
mod rl;
mod weights;

pub use contour::{
    contour_xi_forced, contour_xi_forced_series, contour_xi_hom, contour_xi_hom_series, contour_yk_forced,
    contour_yk_hom, ContourSpec,
};
pub use gamma::{gamma_fn, ln_gamma, rgamma};
pub use mittag_leffler::mittag_leffler;
pub use psi::{psi_eval, psi_exponential_series, psi_power_series};
pub use rl::{rl_integral_pc_left, rl_integral_pc_right};
pub use weights::{conv_weights, ConvolutionWeights};

use crate::error::{domain, Result};

/// Order `α` of the fractional integral in the model equation, `0 < α < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(domain(format!("fractional order must lie in (0,1), got {alpha}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = crate::Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_order_bounds() {
        assert!(FracOrder::new(0.5).is_ok());
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
    }
}
