//! The memory term `H_k = Σ_{j=1}^{k} w_{k+1-j} U_j` of the scheme.
//!
//! Slabs are passed as one flat row-major buffer whose row `j-1` holds `U_j`.
//!
//! The blocked evaluation views `H_k = y_{k-1}` as the causal convolution
//! `y_r = Σ_{i ≤ r} g_{r-i} x_i` with `x_i = U_{i+1}` and `g_m = w_{m+1}`.
//! Once `x_i` is known, the block `x[s..s+B)` with `B` the largest power of
//! two dividing `i+1` (so `s = i+1-B` is a multiple of `2B`) is convolved
//! with `g[0..2B)` and added to the outputs `y[s+B..s+2B)`. These rectangles
//! tile the strictly lower triangle of the convolution exactly once, and each
//! is complete before any of its outputs is needed; the diagonal term
//! `g_0 x_r` is added when `y_r` is read. Large rectangles are cyclic
//! convolutions of length `2B` done by FFT (two spatial components per
//! complex transform); small ones are summed directly.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{argument, Result};
use crate::frac_kernel::ConvolutionWeights;

/// Rectangles narrower than this are summed directly.
const DIRECT_BLOCK: usize = 64;

fn check_rows(slabs: &[f64], n: usize, k: usize) -> Result<()> {
    if n == 0 || slabs.len() < k * n {
        return Err(argument(format!("history of {k} slabs of size {n} needs {} values, got {}", k * n, slabs.len())));
    }
    Ok(())
}

/// Direct `O(k·N)` evaluation of `H_k`.
pub fn history_sum_naive(slabs: &[f64], n: usize, weights: &ConvolutionWeights, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(argument("the memory term is defined for k >= 1"));
    }
    check_rows(slabs, n, k)?;
    let w = weights.w();
    if w.len() <= k {
        return Err(argument(format!("weights cover lags up to {}, need {k}", w.len() - 1)));
    }
    let mut out = vec![0.0; n];
    for j in 1..=k {
        let c = w[k + 1 - j];
        let row = &slabs[(j - 1) * n..j * n];
        for (o, u) in out.iter_mut().zip(row) {
            *o += c * u;
        }
    }
    Ok(out)
}

/// Incremental state of the blocked evaluation.
pub struct BlockState {
    n: usize,
    /// `g_m = w_{m+1}`, zero beyond the available weights.
    g: Vec<f64>,
    pushed: usize,
    pending: HashMap<usize, Vec<f64>>,
    planner: FftPlanner<f64>,
    /// Transformed `g[0..2B)` per block size.
    kernel_cache: HashMap<usize, Arc<Vec<C64>>>,
}

impl std::fmt::Debug for BlockState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockState").field("n", &self.n).field("pushed", &self.pushed).finish()
    }
}

impl BlockState {
    /// State for vectors of length `n`.
    pub fn new(n: usize, weights: &ConvolutionWeights) -> Self {
        let w = weights.w();
        let g = w.iter().skip(1).copied().collect();
        Self { n, g, pushed: 0, pending: HashMap::new(), planner: FftPlanner::new(), kernel_cache: HashMap::new() }
    }

    /// Number of slabs absorbed so far.
    pub fn pushed(&self) -> usize {
        self.pushed
    }

    fn g(&self, m: usize) -> f64 {
        self.g.get(m).copied().unwrap_or(0.0)
    }

    fn accumulator(&mut self, r: usize) -> &mut Vec<f64> {
        let n = self.n;
        self.pending.entry(r).or_insert_with(|| vec![0.0; n])
    }

    /// Absorbs `x_i = U_{i+1}` for the next `i`; `slabs` must hold the rows
    /// `U_1..U_{i+1}`.
    fn push(&mut self, slabs: &[f64]) {
        let n = self.n;
        let i = self.pushed;
        let b = 1usize << (i + 1).trailing_zeros();
        let s = i + 1 - b;
        if b < DIRECT_BLOCK {
            for r in s + b..s + 2 * b {
                let mut acc = vec![0.0; n];
                for ip in s..s + b {
                    let c = self.g(r - ip);
                    if c != 0.0 {
                        for (a, x) in acc.iter_mut().zip(&slabs[ip * n..(ip + 1) * n]) {
                            *a += c * x;
                        }
                    }
                }
                for (t, a) in self.accumulator(r).iter_mut().zip(&acc) {
                    *t += a;
                }
            }
        } else {
            self.fft_rectangle(slabs, s, b);
        }
        self.pushed += 1;
    }

    fn kernel(&mut self, b: usize) -> Arc<Vec<C64>> {
        if let Some(k) = self.kernel_cache.get(&b) {
            return Arc::clone(k);
        }
        let len = 2 * b;
        let mut buf: Vec<C64> = (0..len).map(|m| C64::new(self.g(m), 0.0)).collect();
        self.planner.plan_fft_forward(len).process(&mut buf);
        let k = Arc::new(buf);
        self.kernel_cache.insert(b, Arc::clone(&k));
        k
    }

    fn fft_rectangle(&mut self, slabs: &[f64], s: usize, b: usize) {
        let n = self.n;
        let len = 2 * b;
        let kernel = self.kernel(b);
        let fwd: Arc<dyn Fft<f64>> = self.planner.plan_fft_forward(len);
        let inv: Arc<dyn Fft<f64>> = self.planner.plan_fft_inverse(len);
        let scale = 1.0 / len as f64;
        let mut out = vec![vec![0.0; n]; b];
        let mut buf = vec![C64::new(0.0, 0.0); len];
        let mut scratch = vec![C64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
        let mut comp = 0;
        while comp < n {
            let second = comp + 1 < n;
            for (m, v) in buf.iter_mut().enumerate() {
                *v = if m < b {
                    let row = (s + m) * n;
                    C64::new(slabs[row + comp], if second { slabs[row + comp + 1] } else { 0.0 })
                } else {
                    C64::new(0.0, 0.0)
                };
            }
            fwd.process_with_scratch(&mut buf, &mut scratch);
            for (v, k) in buf.iter_mut().zip(kernel.iter()) {
                *v *= k;
            }
            inv.process_with_scratch(&mut buf, &mut scratch);
            for (r, row) in out.iter_mut().enumerate() {
                let v = buf[b + r] * scale;
                row[comp] = v.re;
                if second {
                    row[comp + 1] = v.im;
                }
            }
            comp += 2;
        }
        for (r, row) in out.into_iter().enumerate() {
            for (t, a) in self.accumulator(s + b + r).iter_mut().zip(&row) {
                *t += a;
            }
        }
    }

    /// `H_k`, consuming the accumulated part of `y_{k-1}`. Each `k` may be
    /// requested once, in increasing order.
    fn take(&mut self, slabs: &[f64], k: usize) -> Vec<f64> {
        let n = self.n;
        let r = k - 1;
        let mut h = self.pending.remove(&r).unwrap_or_else(|| vec![0.0; n]);
        let g0 = self.g(0);
        for (o, x) in h.iter_mut().zip(&slabs[r * n..(r + 1) * n]) {
            *o += g0 * x;
        }
        h
    }
}

/// Blocked evaluation of `H_k`. `state` absorbs the rows `U_1..U_k` it has
/// not seen yet; successive calls must use increasing `k`.
pub fn history_sum_fft(slabs: &[f64], state: &mut BlockState, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(argument("the memory term is defined for k >= 1"));
    }
    check_rows(slabs, state.n, k)?;
    if state.pushed > k {
        return Err(argument(format!("block state is already at step {}, asked for {k}", state.pushed)));
    }
    while state.pushed < k {
        state.push(slabs);
    }
    Ok(state.take(slabs, k))
}
