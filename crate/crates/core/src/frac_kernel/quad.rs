//! Quadrature building blocks: Gauss-Legendre rules, an adaptive
//! Gauss-Kronrod (10/21) integrator that returns the composite rule it
//! settled on, a logarithmic map for integrable power singularities at the
//! origin, and tanh-sinh for real integrands with endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Nodes and weights of a (composite) quadrature rule.
#[derive(Debug, Clone, Default)]
pub struct NodeSet {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn extend(&mut self, other: NodeSet) {
        self.x.extend(other.x);
        self.w.extend(other.w);
    }

    /// Applies the rule to a real integrand.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> NodeSet {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    NodeSet { x, w }
}

/// `n`-point Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> NodeSet {
    let base = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    NodeSet { x: base.x.iter().map(|t| c + h * t).collect(), w: base.w.iter().map(|w| h * w).collect() }
}

// Kronrod abscissae (descending, last one is the centre) and weights of the
// 21-point rule, plus the weights of the embedded 10-point Gauss rule that
// uses the odd-indexed abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_161_164,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel {
    a: f64,
    b: f64,
    err: f64,
    val: Vec<C64>,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod_panel<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [C64]) -> Panel
where
    F: FnMut(f64, &mut [C64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![C64::new(0.0, 0.0); dim];
    let mut g = vec![C64::new(0.0, 0.0); dim];
    f(c, buf);
    for d in 0..dim {
        k[d] += WGK[10] * buf[d];
    }
    for (i, &xi) in XGK.iter().enumerate().take(10) {
        for x in [c - h * xi, c + h * xi] {
            f(x, buf);
            for d in 0..dim {
                k[d] += WGK[i] * buf[d];
                if i % 2 == 1 {
                    g[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..dim {
        k[d] *= h;
        g[d] *= h;
        err = err.max((k[d] - g[d]).norm());
    }
    if !err.is_finite() {
        err = f64::INFINITY;
    }
    Panel { a, b, err, val: k }
}

fn panel_rule(a: f64, b: f64) -> NodeSet {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = NodeSet { x: Vec::with_capacity(21), w: Vec::with_capacity(21) };
    for i in 0..10 {
        out.x.push(c - h * XGK[i]);
        out.w.push(h * WGK[i]);
        out.x.push(c + h * XGK[i]);
        out.w.push(h * WGK[i]);
    }
    out.x.push(c);
    out.w.push(h * WGK[10]);
    out
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Adaptive {
    /// Composite Kronrod rule of the accepted panels.
    pub rule: NodeSet,
    /// Integral of each component.
    pub value: Vec<C64>,
    /// Summed |K21 - G10| estimate (max over components per panel).
    pub error: f64,
}

/// Adaptive Gauss-Kronrod integration of a `dim`-component complex integrand
/// over the union of the intervals delimited by `breaks`.
///
/// Panels are bisected, worst first, until the summed error estimate drops
/// below `tol` or `max_panels` is reached (which is reported as a
/// truncation error).
pub fn adaptive<F>(mut f: F, breaks: &[f64], dim: usize, tol: f64, max_panels: usize) -> Result<Adaptive>
where
    F: FnMut(f64, &mut [C64]),
{
    assert!(breaks.len() >= 2);
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for win in breaks.windows(2) {
        if win[1] > win[0] {
            let p = kronrod_panel(&mut f, win[0], win[1], dim, &mut buf);
            total_err += p.err;
            heap.push(p);
        }
    }
    while total_err > tol {
        if heap.len() >= max_panels {
            return Err(Error::Truncation { requested: tol, achieved: total_err });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Truncation { requested: tol, achieved: total_err });
        }
        let left = kronrod_panel(&mut f, worst.a, mid, dim, &mut buf);
        let right = kronrod_panel(&mut f, mid, worst.b, dim, &mut buf);
        // recompute the running total from scratch now and then to keep
        // cancellation in the incremental update from accumulating
        total_err += left.err + right.err - worst.err;
        if heap.len() % 64 == 0 {
            total_err = heap.iter().map(|p| p.err).sum::<f64>() + left.err + right.err;
        }
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut rule = NodeSet::default();
    let mut value = vec![C64::new(0.0, 0.0); dim];
    let mut error = 0.0;
    for p in &panels {
        rule.extend(panel_rule(p.a, p.b));
        for d in 0..dim {
            value[d] += p.val[d];
        }
        error += p.err;
    }
    Ok(Adaptive { rule, value, error })
}

/// Adaptive rule for `∫_0^b f(r) dr` where `f` may carry an integrable power
/// singularity (or a fractional power zero) at the origin.
///
/// The piece `[0, a0]` is mapped by `r = a0·e^u`, which turns `r^γ`,
/// `γ > -1`, into an exponentially decaying integrand on `u ∈ (-∞, 0]`; the
/// lower cut-off is placed where the mapped integrand has fallen far below
/// `tol`. The remainder `[a0, b]` starts from geometrically graded panels
/// (ratio 2) and is refined adaptively.
pub fn origin_adaptive<F>(mut f: F, a0: f64, b: f64, dim: usize, tol: f64, max_panels: usize) -> Result<Adaptive>
where
    F: FnMut(f64, &mut [C64]),
{
    assert!(a0 > 0.0 && b > a0);
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    // locate the cut-off of the log-mapped piece
    let mut probe = |u: f64, buf: &mut [C64]| -> f64 {
        let r = a0 * u.exp();
        f(r, buf);
        buf.iter().map(|v| v.norm()).fold(0.0, f64::max) * r
    };
    let mut u_min = 0.0;
    let mut quiet = 0;
    let floor = tol * 1e-4;
    while u_min > -700.0 - a0.ln() {
        u_min -= 2.0;
        let m = probe(u_min, &mut buf);
        if m < floor {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let breaks_u: Vec<f64> = {
        let n = ((-u_min) / 4.0).ceil().max(1.0) as usize;
        (0..=n).map(|i| u_min + (-u_min) * i as f64 / n as f64).collect()
    };
    let inner = adaptive(
        |u, out: &mut [C64]| {
            let r = a0 * u.exp();
            f(r, out);
            for v in out.iter_mut() {
                *v *= r;
            }
        },
        &breaks_u,
        dim,
        0.5 * tol,
        max_panels,
    )?;
    let mut breaks = vec![a0];
    let mut r = a0;
    while 2.0 * r < b {
        r *= 2.0;
        breaks.push(r);
    }
    breaks.push(b);
    let outer = adaptive(&mut f, &breaks, dim, 0.5 * tol, max_panels)?;

    let mut rule = NodeSet {
        x: inner.rule.x.iter().map(|u| a0 * u.exp()).collect(),
        w: inner.rule.x.iter().zip(&inner.rule.w).map(|(u, w)| w * a0 * u.exp()).collect(),
    };
    rule.extend(outer.rule);
    let value = inner.value.iter().zip(&outer.value).map(|(p, q)| p + q).collect();
    Ok(Adaptive { rule, value, error: inner.error + outer.error })
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn integrate_complex(mut f: impl FnMut(f64) -> C64, a: f64, b: f64, tol: f64) -> Result<C64> {
    let out = adaptive(|x, v: &mut [C64]| v[0] = f(x), &[a, b], 1, tol, 20_000)?;
    Ok(out.value[0])
}

/// Real-valued adaptive integration over `breaks`.
pub fn integrate_real(mut f: impl FnMut(f64) -> f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let out = adaptive(|x, v: &mut [C64]| v[0] = C64::new(f(x), 0.0), breaks, 1, tol, 50_000)?;
    Ok(out.value[0].re)
}

/// Tanh-sinh quadrature of a real integrand on `[a, b]`; tolerates integrable
/// singularities at both endpoints. The step is halved until two successive
/// estimates agree to `tol` (relative to the magnitude of the estimate).
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    // node at parameter t, returned as (distance to the nearer endpoint
    // scaled by half, weight); the complementary form avoids cancellation.
    let eval = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let cosh_s = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cosh_s * cosh_s);
        // 1 - tanh(|s|) = 2/(e^{2|s|}+1)
        let comp = 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        if comp == 0.0 {
            return 0.0;
        }
        let x = if s >= 0.0 { b - half * comp } else { a + half * comp };
        if x <= a || x >= b {
            return 0.0;
        }
        w * f(x)
    };
    let t_max = 4.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let est = sum * h * half;
        if (est - prev).abs() <= tol * est.abs().max(1e-300) {
            return est;
        }
        prev = est;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(7);
        for deg in 0..14 {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let got = rule.apply(|x| x.powi(deg));
            assert!((got - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn kronrod_rule_weights_sum_to_interval_length() {
        let rule = panel_rule(-1.0, 3.0);
        assert!((rule.w.iter().sum::<f64>() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        // ∫_0^{10} cos(20x) e^{-x} dx
        let v = integrate_real(|x| (20.0 * x).cos() * (-x).exp(), &[0.0, 10.0], 1e-13).unwrap();
        let exact = {
            let z = C64::new(-1.0, 20.0);
            ((z * 10.0).exp() - 1.0) / z
        };
        assert!((v - exact.re).abs() < 1e-12, "{v} vs {}", exact.re);
    }

    #[test]
    fn origin_map_captures_power_singularity() {
        // ∫_0^1 r^{-0.8} dr = 5
        let out = origin_adaptive(|r, v: &mut [C64]| v[0] = C64::new(r.powf(-0.8), 0.0), 1e-3, 1.0, 1, 1e-13, 10_000)
            .unwrap();
        assert!((out.value[0].re - 5.0).abs() < 1e-11, "{}", out.value[0].re);
        // the returned rule reproduces the value
        let again = out.rule.apply(|r| r.powf(-0.8));
        assert!((again - 5.0).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // ∫_0^1 x^{-1/2} / (1+x) dx = 2 arctan 1 = π/2
        let v = tanh_sinh(|x| 1.0 / (x.sqrt() * (1.0 + x)), 0.0, 1.0, 1e-14);
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "{v}");
        let v = tanh_sinh(|x| (x - 2.0).powf(0.3), 2.0, 3.5, 1e-15);
        let exact = 1.5f64.powf(1.3) / 1.3;
        assert!((v - exact).abs() < 1e-13);
    }
}
