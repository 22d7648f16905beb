use super::gamma::gamma_real;
use super::FracOrder;
use crate::error::{argument, Result};

/// Memory kernel of the time-stepping scheme.
///
/// `b[j] = j^{1+α}/Γ(2+α)` for `j = 0..=K`, and the second differences
/// `w[i] = b[i+1] - 2 b[i] + b[i-1]` for `i = 1..K` (stored at index `i`;
/// `w[0]` is unused and set to zero).
#[derive(Debug, Clone)]
pub struct ConvolutionWeights {
    alpha: FracOrder,
    b: Vec<f64>,
    w: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    /// Largest index `K` of the `b` sequence.
    pub fn len(&self) -> usize {
        self.b.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Second differences, indexed from 1; `w()[0] == 0`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    #[inline]
    pub fn b1(&self) -> f64 {
        self.b[1]
    }
}

/// `b_j` and its second differences for `j ≤ k_max`.
///
/// The second differences are formed from `j^{1+α}` through
/// `j^{1+α}·((1+1/j)^{1+α} - 2 + (1-1/j)^{1+α})` evaluated with `ln_1p`/`exp_m1`,
/// which keeps full relative accuracy for large `j` where the naive
/// difference loses digits.
pub fn conv_weights(alpha: FracOrder, k_max: usize) -> Result<ConvolutionWeights> {
    if k_max < 2 {
        return Err(argument(format!("conv_weights needs K >= 2, got {k_max}")));
    }
    let a = alpha.value();
    let p = 1.0 + a;
    let scale = 1.0 / gamma_real(2.0 + a);
    let b: Vec<f64> = (0..=k_max).map(|j| (j as f64).powf(p) * scale).collect();
    let mut w = vec![0.0; k_max];
    w[1] = (2f64.powf(p) - 2.0) * scale;
    for (i, wi) in w.iter_mut().enumerate().skip(2) {
        let x = 1.0 / i as f64;
        let up = (p * x.ln_1p()).exp_m1();
        let down = (p * (-x).ln_1p()).exp_m1();
        *wi = (i as f64).powf(p) * (up + down) * scale;
    }
    Ok(ConvolutionWeights { alpha, b, w })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let cw = conv_weights(FracOrder::new(0.5).unwrap(), 4).unwrap();
        assert_eq!(cw.b()[0], 0.0);
        // 1/Γ(2.5) and 2^{1.5}/Γ(2.5) with Γ(2.5) = 0.75√π
        let g = 0.75 * std::f64::consts::PI.sqrt();
        assert!((cw.b()[1] - 1.0 / g).abs() < 1e-15);
        assert!((cw.b()[1] - 0.752_252_778_063_675_0).abs() < 1e-14);
        assert!((cw.b()[2] - 2.127_692_162_140_974_3).abs() < 1e-14);
    }

    #[test]
    fn rejects_short_sequences() {
        assert!(conv_weights(FracOrder::new(0.3).unwrap(), 1).is_err());
    }

    #[test]
    fn second_differences_match_direct_formula_for_small_indices() {
        let cw = conv_weights(FracOrder::new(0.7).unwrap(), 40).unwrap();
        let b = cw.b();
        for i in 1..40 {
            let direct = b[i + 1] - 2.0 * b[i] + b[i - 1];
            assert!(((cw.w()[i] - direct) / direct).abs() < 1e-12, "i = {i}");
        }
    }

    #[test]
    fn weights_positive_and_decreasing() {
        for &a in &[0.05, 0.2, 0.5, 0.8, 0.95] {
            let cw = conv_weights(FracOrder::new(a).unwrap(), 5000).unwrap();
            let w = cw.w();
            assert!(w[1] > 0.0);
            for i in 1..w.len() - 1 {
                assert!(w[i + 1] > 0.0 && w[i + 1] < w[i], "alpha {a}, i {i}");
            }
        }
    }
}
