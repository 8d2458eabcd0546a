//! Gauss–Legendre rules and an adaptive Gauss–Kronrod integrator for
//! complex-valued integrands.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Nodes are computed in the positive half and mirrored, so the rule is
/// exactly symmetric and an odd rule has its middle node at exactly zero.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n / 2;
    for i in 0..half {
        // i-th largest root; Tricomi-style initial guess.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let mut z = theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        x[half] = 0.0;
        w[half] = 2.0 / (d * d);
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A Gauss–Legendre rule reused across many panels.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    /// Composite rule over `panels` equal panels of `[a, b]`.
    pub fn composite<F>(&self, f: F, a: f64, b: f64, panels: usize) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..panels {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            for (x, w) in self.mapped(lo, hi) {
                sum += f(x) * w;
            }
        }
        sum
    }

    /// Flattened composite nodes and weights, for integrals evaluated many times.
    pub fn composite_nodes(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.nodes.len());
        let mut ws = Vec::with_capacity(panels * self.nodes.len());
        for i in 0..panels {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            for (x, w) in self.mapped(lo, hi) {
                xs.push(x);
                ws.push(w);
            }
        }
        (xs, ws)
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_954,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Kronrod estimate and `|K21 - G10|` on one interval.
pub fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * h;
    let gauss = gauss * h;
    (kronrod, (kronrod - gauss).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 20_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature over `[a, b]`.
pub fn adaptive<F>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    adaptive_with_breaks(f, &[a, b], opts)
}

/// Adaptive quadrature whose initial partition is given by `breaks`
/// (ascending, including both endpoints).
pub fn adaptive_with_breaks<F>(f: F, breaks: &[f64], opts: AdaptiveOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if breaks.len() < 2 {
        return Err(Error::arg("adaptive quadrature needs at least two break points"));
    }
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = gauss_kronrod_21(&f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if !total_err.is_finite() {
            return Err(Error::Quadrature {
                a: lo,
                b: hi,
                estimate: total_err,
                subdivisions: heap.len(),
            });
        }
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                a: lo,
                b: hi,
                estimate: total_err,
                subdivisions: heap.len(),
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution: accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod_21(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum from the panels so the result does not carry update drift.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    let error_estimate = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error_estimate,
        intervals: panels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn three_point_rule() {
        let (x, w) = gauss_legendre(3);
        let r = (3.0f64 / 5.0).sqrt();
        assert_relative_eq!(x[0], -r, epsilon = 1e-15);
        assert_eq!(x[1], 0.0);
        assert_relative_eq!(x[2], r, epsilon = 1e-15);
        assert_relative_eq!(w[0], 5.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(w[2], 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_rule_polynomial_exactness() {
        for n in [1usize, 2, 5, 10, 20, 41, 64] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() <= 1e-13, "n={n} deg={deg}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn kronrod_constants_integrate_degree_31() {
        // K21 is exact to degree 31, G10 to degree 19.
        for deg in 0..=31 {
            let f = |x: f64| Complex64::new(x.powi(deg), 0.0);
            let (k, _) = gauss_kronrod_21(&f, -1.0, 1.0);
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((k.re - exact).abs() < 1e-14, "deg {deg}");
        }
        let wsum: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert_relative_eq!(wsum, 2.0, epsilon = 1e-15);
        let gsum: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(gsum, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn adaptive_oscillatory() {
        let q = 60.0;
        let r = adaptive(|x| Complex64::new(0.0, -q * x).exp(), 0.0, 3.0, Default::default()).unwrap();
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -3.0 * q).exp()) / Complex64::new(0.0, q);
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let opts = AdaptiveOptions {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_intervals: 4,
        };
        let r = adaptive(|x| Complex64::new(x.abs().sqrt().recip(), 0.0), -1.0, 2.0, opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn composite_matches_exact() {
        let rule = GaussRule::new(8);
        let v = rule.composite(|x| Complex64::new(x.sin(), 0.0), 0.0, std::f64::consts::PI, 4);
        assert_relative_eq!(v.re, 2.0, epsilon = 1e-14);
    }
}
